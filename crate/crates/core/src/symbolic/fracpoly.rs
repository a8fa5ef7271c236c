//! Univariate rational functions with rational exponents.
//!
//! A [`FracPoly`] lives in `Q(x^{1/L})` for a lattice index `L` that is
//! refined on demand. Denominators are kept factored: every binomial
//! `1 ± x^r` is split into normalized cyclotomic factors `Φ'_j(x^{1/L})`,
//! which are irreducible, so reducing against them is a handful of exact
//! trial divisions. Anything else is a "general" factor and is reduced with
//! a dense Euclidean gcd. After [`FracPoly::reduce`] numerator and
//! denominator are coprime, and the expanded pair
//! ([`FracPoly::numerator`], [`FracPoly::denominator`]) is canonical: the
//! denominator has lowest exponent `0` with coefficient `+1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cyclotomic::{self, minus_binomial, plus_binomial};
use super::poly::{Mono, UPoly};
use super::{Exp, Rat};
use crate::arith::euler_phi;
use crate::error::SymbolicError;

/// The formal variable a univariate function is written in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    P,
    Q,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::P => "p",
            Var::Q => "q",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FracPoly {
    var: Var,
    lattice: u64,
    num: UPoly,
    cyclo: BTreeMap<u64, u32>,
    other: Vec<(UPoly, u32)>,
}

fn phi_poly(j: u64, lattice: u64) -> UPoly {
    let coeffs = cyclotomic::phi(j);
    UPoly::from_terms(
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| {
                (
                    Mono([Exp::new(i as i64, lattice as i64)]),
                    Rat::from_integer(BigInt::from(*c)),
                )
            }),
    )
}

fn upoly_lattice(p: &UPoly) -> u64 {
    p.exp_denominator_lcm(0) as u64
}

fn merge_factor(list: &mut Vec<(UPoly, u32)>, f: UPoly, k: u32) {
    if k == 0 {
        return;
    }
    if let Some(slot) = list.iter_mut().find(|(g, _)| *g == f) {
        slot.1 += k;
    } else {
        list.push((f, k));
    }
}

impl FracPoly {
    pub fn zero(var: Var) -> Self {
        Self::from_poly(var, UPoly::zero())
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, Rat::one())
    }

    pub fn constant(var: Var, c: Rat) -> Self {
        Self::from_poly(var, UPoly::constant(c))
    }

    pub fn from_poly(var: Var, num: UPoly) -> Self {
        let lattice = upoly_lattice(&num);
        FracPoly {
            var,
            lattice,
            num,
            cyclo: BTreeMap::new(),
            other: Vec::new(),
        }
    }

    /// `c * x^e`
    pub fn monomial(var: Var, e: Exp, c: Rat) -> Self {
        Self::from_poly(var, UPoly::x_pow(e, c))
    }

    /// `num / ∏ f^k`, reduced.
    pub fn from_factored(
        var: Var,
        num: UPoly,
        factors: &[(UPoly, u32)],
    ) -> Result<Self, SymbolicError> {
        let mut lattice = upoly_lattice(&num);
        for (f, _) in factors {
            lattice = lattice.lcm(&upoly_lattice(f));
        }
        let mut out = FracPoly {
            var,
            lattice,
            num,
            cyclo: BTreeMap::new(),
            other: Vec::new(),
        };
        for (f, k) in factors {
            out.absorb(f, *k)?;
        }
        out.reduce();
        Ok(out)
    }

    /// `num / den`, reduced.
    pub fn from_ratio(var: Var, num: UPoly, den: UPoly) -> Result<Self, SymbolicError> {
        Self::from_factored(var, num, &[(den, 1)])
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Divides the numerator by `f^k`, classifying `f`. The lattice must
    /// already cover `f`'s exponents.
    fn absorb(&mut self, f: &UPoly, k: u32) -> Result<(), SymbolicError> {
        if k == 0 {
            return Ok(());
        }
        let (s, m, n) = f.split_content().ok_or(SymbolicError::DivisionByZero)?;
        let unit = UPoly::term(m, s).pow(k);
        self.num = self.num.div_exact(&unit).expect("monomial division");
        if self.num.is_zero() {
            return Ok(());
        }
        if n.len() == 1 {
            return Ok(());
        }
        if n.len() == 2 {
            let (m2, c2) = n.leading().map(|(m, c)| (*m, c.clone())).unwrap();
            let steps = m2.0[0] * Exp::from_integer(self.lattice as i64);
            debug_assert!(steps.is_integer());
            let steps = steps.to_integer() as u64;
            let idx = if c2 == -Rat::one() {
                Some(minus_binomial(steps))
            } else if c2.is_one() {
                Some(plus_binomial(steps))
            } else {
                None
            };
            if let Some(idx) = idx {
                for j in idx {
                    *self.cyclo.entry(j).or_insert(0) += k;
                }
                return Ok(());
            }
        }
        merge_factor(&mut self.other, n, k);
        Ok(())
    }

    /// Cancels every common factor of numerator and denominator.
    pub fn reduce(&mut self) {
        if self.num.is_zero() {
            self.cyclo.clear();
            self.other.clear();
            self.lattice = 1;
            return;
        }
        let lattice = self.lattice;
        for (j, k) in self.cyclo.iter_mut() {
            let ph = phi_poly(*j, lattice);
            while *k > 0 {
                match self.num.div_exact(&ph) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.cyclo.retain(|_, k| *k > 0);

        let mut i = 0;
        while i < self.other.len() {
            let g = laurent_gcd(&self.num, &self.other[i].0, lattice);
            if g.len() <= 1 {
                i += 1;
                continue;
            }
            self.num = self.num.div_exact(&g).expect("gcd divides numerator");
            let f = self.other[i].0.clone();
            let rest = f.div_exact(&g).expect("gcd divides factor");
            self.other[i].1 -= 1;
            if self.other[i].1 == 0 {
                self.other.remove(i);
            }
            if rest.len() > 1 {
                merge_factor(&mut self.other, rest, 1);
            }
            i = 0;
        }
    }

    fn relattice(&self, target: u64) -> Self {
        debug_assert_eq!(target % self.lattice, 0);
        if target == self.lattice {
            return self.clone();
        }
        let m = target / self.lattice;
        let mut cyclo = BTreeMap::new();
        for (j, k) in &self.cyclo {
            for jj in cyclotomic::substitute(*j, m) {
                *cyclo.entry(jj).or_insert(0) += *k;
            }
        }
        FracPoly {
            var: self.var,
            lattice: target,
            num: self.num.clone(),
            cyclo,
            other: self.other.clone(),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = self.lattice.lcm(&other.lattice);
        (self.relattice(l), other.relattice(l))
    }

    fn cofactor(&self, cyclo: &BTreeMap<u64, u32>, other: &[(UPoly, u32)]) -> UPoly {
        let mut out = UPoly::one();
        for (j, k) in cyclo {
            let have = self.cyclo.get(j).copied().unwrap_or(0);
            if *k > have {
                out = out.mul(&phi_poly(*j, self.lattice).pow(*k - have));
            }
        }
        for (f, k) in other {
            let have = self
                .other
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, h)| *h)
                .unwrap_or(0);
            if *k > have {
                out = out.mul(&f.pow(*k - have));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.with_var(self.var);
        }
        if self.cyclo.is_empty()
            && self.other.is_empty()
            && other.cyclo.is_empty()
            && other.other.is_empty()
        {
            return Self::from_poly(self.var, self.num.add(&other.num));
        }
        let (a, b) = self.common(other);
        let mut cyclo = a.cyclo.clone();
        for (j, k) in &b.cyclo {
            let e = cyclo.entry(*j).or_insert(0);
            *e = (*e).max(*k);
        }
        let mut gen = a.other.clone();
        for (f, k) in &b.other {
            if let Some(slot) = gen.iter_mut().find(|(g, _)| g == f) {
                slot.1 = slot.1.max(*k);
            } else {
                gen.push((f.clone(), *k));
            }
        }
        let num = a
            .num
            .mul(&a.cofactor(&cyclo, &gen))
            .add(&b.num.mul(&b.cofactor(&cyclo, &gen)));
        let mut out = FracPoly {
            var: self.var,
            lattice: a.lattice,
            num,
            cyclo,
            other: gen,
        };
        out.reduce();
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.num = out.num.neg();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.var);
        }
        let (a, b) = self.common(other);
        let mut cyclo = a.cyclo.clone();
        for (j, k) in &b.cyclo {
            *cyclo.entry(*j).or_insert(0) += *k;
        }
        let mut gen = a.other.clone();
        for (f, k) in &b.other {
            merge_factor(&mut gen, f.clone(), *k);
        }
        let mut out = FracPoly {
            var: self.var,
            lattice: a.lattice,
            num: a.num.mul(&b.num),
            cyclo,
            other: gen,
        };
        out.reduce();
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        let mut out = self.clone();
        out.num = out.num.scale(c);
        out
    }

    /// Multiplies by `c * x^e`.
    pub fn mul_monomial(&self, e: Exp, c: &Rat) -> Self {
        self.mul(&Self::monomial(self.var, e, c.clone()))
    }

    pub fn recip(&self) -> Result<Self, SymbolicError> {
        if self.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Self::from_factored(self.var, self.denominator(), &[(self.num.clone(), 1)])
    }

    pub fn div(&self, other: &Self) -> Result<Self, SymbolicError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.var), |acc, _| acc.mul(self))
    }

    fn with_var(&self, var: Var) -> Self {
        let mut out = self.clone();
        out.var = var;
        out
    }

    /// Canonical numerator (Laurent, rational exponents allowed).
    pub fn numerator(&self) -> UPoly {
        self.num.clone()
    }

    /// Canonical expanded denominator: lowest exponent `0`, coefficient `+1`.
    pub fn denominator(&self) -> UPoly {
        let mut out = UPoly::one();
        for (j, k) in &self.cyclo {
            out = out.mul(&phi_poly(*j, self.lattice).pow(*k));
        }
        for (f, k) in &self.other {
            out = out.mul(&f.pow(*k));
        }
        out
    }

    /// `x ↦ x^k` for a positive rational `k`.
    pub fn map_exponents(&self, k: Exp) -> Self {
        assert!(k > Exp::zero(), "exponent map must be positive");
        let a = *k.numer() as u64;
        let b = *k.denom() as u64;
        let mut cyclo = BTreeMap::new();
        for (j, mult) in &self.cyclo {
            for jj in cyclotomic::substitute(*j, a) {
                *cyclo.entry(jj).or_insert(0) += *mult;
            }
        }
        let scale = |m: &Mono<1>| m.scale(k);
        FracPoly {
            var: self.var,
            lattice: self.lattice * b,
            num: self.num.map_monos(scale),
            cyclo,
            other: self
                .other
                .iter()
                .map(|(f, m)| (f.map_monos(scale), *m))
                .collect(),
        }
    }

    /// `x ↦ 1/x`.
    pub fn invert_var(&self) -> Self {
        let l = self.lattice as i64;
        let num = self.num.map_monos(|m| m.inv());
        let mut unit_exp = 0i64;
        let mut sign_flip = false;
        for (j, k) in &self.cyclo {
            if *j == 1 {
                unit_exp += *k as i64;
                sign_flip ^= k % 2 == 1;
            } else {
                unit_exp += euler_phi(*j) as i64 * *k as i64;
            }
        }
        let c = if sign_flip { -Rat::one() } else { Rat::one() };
        let num = num.mul_term(&Mono([Exp::new(unit_exp, l)]), &c);
        let inverted: Vec<(UPoly, u32)> = self
            .other
            .iter()
            .map(|(f, k)| (f.map_monos(|m| m.inv()), *k))
            .collect();
        let mut out = FracPoly {
            var: self.var,
            lattice: self.lattice,
            num,
            cyclo: self.cyclo.clone(),
            other: Vec::new(),
        };
        for (f, k) in &inverted {
            out.absorb(f, *k).expect("nonzero factor");
        }
        out.reduce();
        out
    }

    /// True when every exponent of numerator and denominator is an integer.
    pub fn has_integral_exponents(&self) -> bool {
        let int = |p: &UPoly| p.terms().all(|(m, _)| m.0[0].is_integer());
        int(&self.num) && int(&self.denominator())
    }

    /// True when every exponent is an integer multiple of `k`.
    pub fn exponents_divisible_by(&self, k: u64) -> bool {
        let kk = Exp::from_integer(k as i64);
        let ok = |p: &UPoly| p.terms().all(|(m, _)| (m.0[0] / kk).is_integer());
        ok(&self.num) && ok(&self.denominator())
    }

    /// Exact value at `x = x0`, or `None` for non-integral exponents or a
    /// pole.
    pub fn eval(&self, x0: &Rat) -> Option<Rat> {
        let n = self.num.eval(&[x0.clone()])?;
        let d = self.denominator().eval(&[x0.clone()])?;
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    /// Rewrites a function of `p` as a function of `q = p^f`.
    pub fn rewrite_in_q(&self, f_base: u64) -> Result<Self, SymbolicError> {
        assert_eq!(self.var, Var::P, "rewrite_in_q expects a function of p");
        if !self.exponents_divisible_by(f_base) {
            return Err(SymbolicError::NonIntegralExponent {
                f_base,
                value: self.to_string(),
            });
        }
        let mut out = self.map_exponents(Exp::new(1, f_base as i64));
        out.var = Var::Q;
        Ok(out)
    }

    /// Polynomial numerator and denominator with integer coefficients and
    /// no negative exponents; the denominator's leading coefficient is
    /// positive.
    pub fn cleared(&self) -> (UPoly, UPoly) {
        let num = self.numerator();
        let den = self.denominator();
        let lo = num
            .min_exp(0)
            .unwrap_or_else(Exp::zero)
            .min(den.min_exp(0).unwrap_or_else(Exp::zero));
        let shift = Mono([-lo]);
        let num = num.mul_term(&shift, &Rat::one());
        let den = den.mul_term(&shift, &Rat::one());
        let mut l = BigInt::one();
        for (_, c) in num.terms().chain(den.terms()) {
            l = l.lcm(c.denom());
        }
        let mut s = Rat::from_integer(l);
        if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            s = -s;
        }
        let num = num.scale(&s);
        let den = den.scale(&s);
        let mut g = BigInt::zero();
        for (_, c) in num.terms().chain(den.terms()) {
            g = g.gcd(c.numer());
        }
        if g.is_zero() {
            return (num, den);
        }
        let inv = Rat::new(BigInt::one(), g);
        (num.scale(&inv), den.scale(&inv))
    }

    /// The difference `self - other` if nonzero.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        let d = self.sub(other);
        (!d.is_zero()).then_some(d)
    }
}

impl PartialEq for FracPoly {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.denominator()) == other.num.mul(&self.denominator())
    }
}

impl Eq for FracPoly {}

fn content_split(p: &UPoly) -> (Rat, UPoly) {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    let scaled = p.scale(&Rat::from_integer(l.clone()));
    let mut g = BigInt::zero();
    for (_, c) in scaled.terms() {
        g = g.gcd(c.numer());
    }
    if g.is_zero() {
        return (Rat::one(), p.clone());
    }
    let prim = scaled.scale(&Rat::new(BigInt::one(), g.clone()));
    (Rat::new(g, l), prim)
}

impl fmt::Display for FracPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.var.name();
        let (num, den) = self.cleared();
        if num.is_zero() {
            return write!(f, "0");
        }
        if let Some(c) = den.as_constant() {
            let n = num.scale(&(Rat::one() / c));
            return write!(f, "{}", n.fmt_with([name]));
        }
        let (nc, nprim) = content_split(&num);
        let (dc, dprim) = content_split(&den);
        let s = nc / dc;
        let wrap = |p: &UPoly| {
            if p.len() > 1 {
                format!("({})", p.fmt_with([name]))
            } else {
                p.fmt_with([name])
            }
        };
        let (sn, sd) = (s.numer().clone(), s.denom().clone());
        let mut n_str = wrap(&nprim);
        if nprim.as_constant().is_some() {
            n_str = format!(
                "{}",
                Rat::from_integer(sn.clone()) * nprim.as_constant().unwrap()
            );
        } else if !sn.is_one() {
            n_str = if sn == -BigInt::one() {
                format!("-{}", n_str)
            } else {
                format!("{}*{}", sn, n_str)
            };
        }
        let d_str = if sd.is_one() {
            wrap(&dprim)
        } else {
            format!("({}*{})", sd, wrap(&dprim))
        };
        write!(f, "{}/{}", n_str, d_str)
    }
}

// ---- dense univariate helpers over u = x^{1/L} ----

fn to_dense(p: &UPoly, lattice: u64) -> (i64, Vec<Rat>) {
    let l = Exp::from_integer(lattice as i64);
    let idx: Vec<(i64, Rat)> = p
        .terms()
        .map(|(m, c)| {
            let k = m.0[0] * l;
            debug_assert!(k.is_integer());
            (k.to_integer(), c.clone())
        })
        .collect();
    let lo = idx.iter().map(|(k, _)| *k).min().unwrap_or(0);
    let hi = idx.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut v = vec![Rat::zero(); (hi - lo + 1) as usize];
    for (k, c) in idx {
        v[(k - lo) as usize] = c;
    }
    (lo, v)
}

fn from_dense(shift: i64, v: &[Rat], lattice: u64) -> UPoly {
    UPoly::from_terms(v.iter().enumerate().map(|(i, c)| {
        (
            Mono([Exp::new(shift + i as i64, lattice as i64)]),
            c.clone(),
        )
    }))
}

fn trim(v: &mut Vec<Rat>) {
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn dense_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let c = r.last().unwrap().clone() / &lb;
        let off = r.len() - 1 - db;
        for (i, bi) in b.iter().enumerate() {
            r[off + i] -= &c * bi;
        }
        r.pop();
        trim(&mut r);
    }
    if r.is_empty() {
        r.push(Rat::zero());
    }
    r
}

fn dense_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = dense_rem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().unwrap().clone();
    x.iter().map(|c| c / &lead).collect()
}

/// Gcd of two Laurent polynomials on the lattice `1/L`, normalized to lowest
/// exponent `0` and lowest coefficient `+1` (monomial units are ignored).
fn laurent_gcd(a: &UPoly, b: &UPoly, lattice: u64) -> UPoly {
    if a.is_zero() || b.is_zero() {
        return UPoly::one();
    }
    let (_, da) = to_dense(a, lattice);
    let (_, db) = to_dense(b, lattice);
    let g = dense_gcd(&da, &db);
    let p = from_dense(0, &g, lattice);
    match p.split_content() {
        Some((_, _, n)) => n,
        None => UPoly::one(),
    }
}
