//! Bivariate rational functions in `(p, t)`.
//!
//! The denominator is stored as a list of normalized factors with
//! multiplicities: each factor has per-variable minimal exponent `0` and its
//! `(p, t)`-lexicographically least term has coefficient `+1`. Monomial and
//! scalar content is folded into the numerator. Factors are merged by
//! identity and cancelled by exact trial division; this is not a full
//! bivariate gcd, so equality is decided by cross-multiplication.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::fracpoly::{FracPoly, Var};
use super::poly::{Mono, Poly, UPoly};
use super::{Exp, Rat};
use crate::error::SymbolicError;

/// Variable index of `p`.
pub const P: usize = 0;
/// Variable index of `t`.
pub const T: usize = 1;

pub type BiPoly = Poly<2>;

#[derive(Clone, Debug)]
pub struct GenFun {
    num: BiPoly,
    den: Vec<(BiPoly, u32)>,
}

pub fn mono(p: Exp, t: Exp) -> Mono<2> {
    Mono([p, t])
}

impl GenFun {
    pub fn zero() -> Self {
        Self::from_poly(BiPoly::zero())
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(BiPoly::constant(c))
    }

    pub fn from_poly(num: BiPoly) -> Self {
        GenFun {
            num,
            den: Vec::new(),
        }
    }

    /// `c * p^a * t^b`
    pub fn monomial(c: Rat, a: Exp, b: Exp) -> Self {
        Self::from_poly(BiPoly::term(mono(a, b), c))
    }

    /// `num / ∏ f^k`, normalized.
    pub fn from_factored(num: BiPoly, factors: &[(BiPoly, u32)]) -> Result<Self, SymbolicError> {
        let mut out = Self::from_poly(num);
        for (f, k) in factors {
            out.absorb(f, *k)?;
        }
        out.reduce();
        Ok(out)
    }

    pub fn from_ratio(num: BiPoly, den: BiPoly) -> Result<Self, SymbolicError> {
        Self::from_factored(num, &[(den, 1)])
    }

    /// Lifts a univariate function of `p` (no `t`).
    pub fn from_p_ratio(num: &UPoly, den: &UPoly) -> Result<Self, SymbolicError> {
        let lift = |m: &Mono<1>| mono(m.0[0], Exp::zero());
        Self::from_ratio(num.map_monos(lift), den.map_monos(lift))
    }

    /// Lifts a [`FracPoly`] in `p`.
    pub fn from_fracpoly_p(f: &FracPoly) -> Result<Self, SymbolicError> {
        assert_eq!(f.var(), Var::P, "expected a function of p");
        Self::from_p_ratio(&f.numerator(), &f.denominator())
    }

    fn absorb(&mut self, f: &BiPoly, k: u32) -> Result<(), SymbolicError> {
        if k == 0 {
            return Ok(());
        }
        let (s, m, n) = f.split_content().ok_or(SymbolicError::DivisionByZero)?;
        let unit = BiPoly::term(m, s).pow(k);
        self.num = self.num.div_exact(&unit).expect("monomial division");
        if n.len() > 1 {
            if let Some(slot) = self.den.iter_mut().find(|(g, _)| *g == n) {
                slot.1 += k;
            } else {
                self.den.push((n, k));
            }
        }
        Ok(())
    }

    /// Trial-divides the numerator by each denominator factor.
    pub fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
        self.den
            .sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| cmp_poly(&a.0, &b.0)));
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BiPoly {
        &self.num
    }

    pub fn factors(&self) -> &[(BiPoly, u32)] {
        &self.den
    }

    /// Expanded denominator.
    pub fn denominator(&self) -> BiPoly {
        self.den
            .iter()
            .fold(BiPoly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
    }

    fn cofactor(&self, target: &[(BiPoly, u32)]) -> BiPoly {
        let mut out = BiPoly::one();
        for (f, k) in target {
            let have = self
                .den
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
            return other.clone();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return Self::from_poly(self.num.add(&other.num));
        }
        let mut target = self.den.clone();
        for (f, k) in &other.den {
            if let Some(slot) = target.iter_mut().find(|(g, _)| g == f) {
                slot.1 = slot.1.max(*k);
            } else {
                target.push((f.clone(), *k));
            }
        }
        let num = self
            .num
            .mul(&self.cofactor(&target))
            .add(&other.num.mul(&other.cofactor(&target)));
        let mut out = GenFun { num, den: target };
        out.reduce();
        out
    }

    pub fn neg(&self) -> Self {
        GenFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            if let Some(slot) = den.iter_mut().find(|(g, _)| g == f) {
                slot.1 += *k;
            } else {
                den.push((f.clone(), *k));
            }
        }
        let mut out = GenFun {
            num: self.num.mul(&other.num),
            den,
        };
        out.reduce();
        out
    }

    pub fn div(&self, other: &Self) -> Result<Self, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        let mut out = GenFun {
            num: self.num.mul(&other.denominator()),
            den: self.den.clone(),
        };
        out.absorb(&other.num, 1)?;
        out.reduce();
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GenFun {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by `c * p^a * t^b`.
    pub fn mul_monomial(&self, c: &Rat, a: Exp, b: Exp) -> Self {
        GenFun {
            num: self.num.mul_term(&mono(a, b), c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `t ↦ t^n`.
    pub fn substitute_t_power(&self, n: Exp) -> Self {
        assert!(n > Exp::zero(), "substitution power must be positive");
        let f = |m: &Mono<2>| mono(m.0[P], m.0[T] * n);
        GenFun {
            num: self.num.map_monos(f),
            den: self.den.iter().map(|(g, k)| (g.map_monos(f), *k)).collect(),
        }
    }

    /// Substitutes `t = p^r`, giving a reduced function of `p`.
    pub fn eval_t_as_p_power(&self, r: Exp) -> Result<FracPoly, SymbolicError> {
        let f = |m: &Mono<2>| Mono([m.0[P] + m.0[T] * r]);
        let num = self.num.map_monos(f);
        let factors: Vec<(UPoly, u32)> =
            self.den.iter().map(|(g, k)| (g.map_monos(f), *k)).collect();
        if factors.iter().any(|(g, _)| g.is_zero()) {
            return Err(SymbolicError::Pole);
        }
        FracPoly::from_factored(Var::P, num, &factors)
    }

    /// `(p, t) ↦ (1/p, 1/t)`.
    pub fn invert(&self) -> Self {
        let f = |m: &Mono<2>| m.inv();
        let mut out = Self::from_poly(self.num.map_monos(f));
        for (g, k) in &self.den {
            out.absorb(&g.map_monos(f), *k).expect("nonzero factor");
        }
        out.reduce();
        out
    }

    /// Exact numeric value; `None` at a pole or for non-integral exponents.
    pub fn eval(&self, p0: &Rat, t0: &Rat) -> Option<Rat> {
        let pt = [p0.clone(), t0.clone()];
        let n = self.num.eval(&pt)?;
        let d = self.denominator().eval(&pt)?;
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    /// Least exponent of `t` in the power-series expansion.
    pub fn min_t_exponent(&self) -> Option<Exp> {
        self.num.min_exp(T)
    }

    /// Coefficients `c ↦ a_c(p)` of the expansion in `t` for `c ≤ c_max`.
    pub fn series_coefficients(
        &self,
        c_max: Exp,
    ) -> Result<BTreeMap<Exp, FracPoly>, SymbolicError> {
        let mut out = BTreeMap::new();
        if self.num.is_zero() {
            return Ok(out);
        }
        let den = self.denominator();
        let by_t = |poly: &BiPoly| {
            let mut m: BTreeMap<Exp, UPoly> = BTreeMap::new();
            for (mm, c) in poly.terms() {
                m.entry(mm.0[T])
                    .or_insert_with(UPoly::zero)
                    .add_term(Mono([mm.0[P]]), c.clone());
            }
            m
        };
        let n_by = by_t(&self.num);
        let d_by = by_t(&den);
        let d0 = d_by
            .get(&Exp::zero())
            .ok_or(SymbolicError::NoSeriesExpansion)?;
        if *n_by.keys().next().unwrap() < Exp::zero() {
            return Err(SymbolicError::NoSeriesExpansion);
        }
        let mut l = 1i64;
        for e in n_by.keys().chain(d_by.keys()) {
            l = l.lcm(e.denom());
        }
        let inv_d0 = FracPoly::from_ratio(Var::P, UPoly::one(), d0.clone())?;
        let d_rest: Vec<(i64, FracPoly)> = d_by
            .iter()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, p)| {
                (
                    (*e * l).to_integer(),
                    FracPoly::from_poly(Var::P, p.clone()),
                )
            })
            .collect();
        let top = (c_max * l).floor().to_integer();
        let mut coeffs: Vec<FracPoly> = Vec::with_capacity((top + 1).max(0) as usize);
        for k in 0..=top {
            let e = Exp::new(k, l);
            let mut acc = match n_by.get(&e) {
                Some(p) => FracPoly::from_poly(Var::P, p.clone()),
                None => FracPoly::zero(Var::P),
            };
            for (s, d) in &d_rest {
                if *s <= k {
                    let prev = &coeffs[(k - s) as usize];
                    if !prev.is_zero() {
                        acc = acc.sub(&d.mul(prev));
                    }
                }
            }
            let c = acc.mul(&inv_d0);
            if !c.is_zero() {
                out.insert(e, c.clone());
            }
            coeffs.push(c);
        }
        Ok(out)
    }
}

fn cmp_poly(a: &BiPoly, b: &BiPoly) -> std::cmp::Ordering {
    a.terms()
        .map(|(m, _)| *m)
        .cmp(b.terms().map(|(m, _)| *m))
        .then_with(|| {
            a.terms()
                .map(|(_, c)| c.clone())
                .cmp(b.terms().map(|(_, c)| c.clone()))
        })
}

impl PartialEq for GenFun {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.denominator()) == other.num.mul(&self.denominator())
    }
}

impl Eq for GenFun {}

impl fmt::Display for GenFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["p", "t"];
        let n = self.num.fmt_with(names);
        if self.den.is_empty() {
            return write!(f, "{}", n);
        }
        let dens: Vec<String> = self
            .den
            .iter()
            .map(|(g, k)| {
                if *k == 1 {
                    format!("({})", g.fmt_with(names))
                } else {
                    format!("({})^{}", g.fmt_with(names), k)
                }
            })
            .collect();
        if self.num.len() > 1 {
            write!(f, "({})/({})", n, dens.join("*"))
        } else {
            write!(f, "{}/({})", n, dens.join("*"))
        }
    }
}
