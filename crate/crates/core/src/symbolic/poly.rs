//! Sparse Laurent polynomials with exact-rational exponents.
//!
//! A [`Poly<N>`] is a finite map from monomials in `N` formal variables to
//! nonzero rational coefficients. Exponents are `Ratio<i64>` and may be
//! negative, so every monomial is a unit and exact division has to be
//! bounded explicitly (see [`Poly::div_exact`]).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Exp, Rat};

/// A monomial: one exponent per variable, ordered lexicographically by
/// variable index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono<const N: usize>(pub [Exp; N]);

impl<const N: usize> Mono<N> {
    pub fn one() -> Self {
        Mono([Exp::zero(); N])
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o += *e;
        }
        Mono(out)
    }

    pub fn div(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o -= *e;
        }
        Mono(out)
    }

    pub fn inv(&self) -> Self {
        let mut out = self.0;
        for o in out.iter_mut() {
            *o = -*o;
        }
        Mono(out)
    }

    pub fn scale(&self, k: Exp) -> Self {
        let mut out = self.0;
        for o in out.iter_mut() {
            *o *= k;
        }
        Mono(out)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<Mono<N>, Rat>,
}

pub type UPoly = Poly<1>;

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::term(Mono::one(), c)
    }

    pub fn term(m: Mono<N>, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono<N>, Rat)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono<N>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono<N>) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Returns the constant if this polynomial has no non-trivial monomial.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Returns `(monomial, coefficient)` if this is a single term.
    pub fn as_term(&self) -> Option<(Mono<N>, Rat)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Mono<N>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn leading(&self) -> Option<(&Mono<N>, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn trailing(&self) -> Option<(&Mono<N>, &Rat)> {
        self.terms.iter().next()
    }

    pub fn min_exp(&self, var: usize) -> Option<Exp> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn max_exp(&self, var: usize) -> Option<Exp> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in small.terms.iter() {
            big.add_term(*m, c.clone());
        }
        big
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Mono<N>, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(mm, cc)| (mm.mul(m), cc * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some((m, c)) = other.as_term() {
            return self.mul_term(&m, &c);
        }
        if let Some((m, c)) = self.as_term() {
            return other.mul_term(&m, &c);
        }
        let mut acc: HashMap<Mono<N>, Rat> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in other.terms.iter() {
                let e = acc.entry(ma.mul(mb)).or_insert_with(Rat::zero);
                *e += ca * cb;
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Applies an exponent map to every monomial, merging collisions.
    pub fn map_monos<const M: usize, F: Fn(&Mono<N>) -> Mono<M>>(&self, f: F) -> Poly<M> {
        let mut out = Poly::<M>::zero();
        for (m, c) in self.terms.iter() {
            out.add_term(f(m), c.clone());
        }
        out
    }

    /// Least common multiple of every exponent denominator of variable `var`.
    pub fn exp_denominator_lcm(&self, var: usize) -> i64 {
        self.terms
            .keys()
            .fold(1i64, |acc, m| acc.lcm(m.0[var].denom()))
    }

    /// Exact quotient `self / d` in the Laurent ring, or `None` when `d`
    /// does not divide `self`.
    ///
    /// The quotient's support must lie in the box spanned by the per-variable
    /// exponent ranges of dividend and divisor; any candidate term outside
    /// that box proves non-divisibility, which also bounds the loop.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some((m, c)) = d.as_term() {
            return Some(self.mul_term(&m.inv(), &(Rat::one() / c)));
        }
        let mut lo = [Exp::zero(); N];
        let mut hi = [Exp::zero(); N];
        for v in 0..N {
            lo[v] = self.min_exp(v).unwrap() - d.min_exp(v).unwrap();
            hi[v] = self.max_exp(v).unwrap() - d.max_exp(v).unwrap();
            if lo[v] > hi[v] {
                return None;
            }
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            let qm = m.div(&dm);
            for v in 0..N {
                if qm.0[v] < lo[v] || qm.0[v] > hi[v] {
                    return None;
                }
            }
            let qc = c / &dc;
            for (tm, tc) in d.terms.iter() {
                rem.add_term(tm.mul(&qm), -(tc * &qc));
            }
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    /// Splits `self = scalar * content * normalized`, where `content` is the
    /// monomial of per-variable minimal exponents and `normalized` has its
    /// order-least term with coefficient `+1`.
    pub fn split_content(&self) -> Option<(Rat, Mono<N>, Self)> {
        if self.is_zero() {
            return None;
        }
        let mut content = [Exp::zero(); N];
        for (v, slot) in content.iter_mut().enumerate() {
            *slot = self.min_exp(v).unwrap();
        }
        let content = Mono(content);
        let shifted = self.mul_term(&content.inv(), &Rat::one());
        let lead = shifted.trailing().unwrap().1.clone();
        let normalized = shifted.scale(&(Rat::one() / &lead));
        Some((lead, content, normalized))
    }

    /// Numeric evaluation; `None` when some exponent is not an integer.
    pub fn eval(&self, point: &[Rat; N]) -> Option<Rat> {
        let mut total = Rat::zero();
        for (m, c) in self.terms.iter() {
            let mut v = c.clone();
            for (e, x) in m.0.iter().zip(point.iter()) {
                if !e.is_integer() {
                    return None;
                }
                let k = e.to_integer();
                if k != 0 {
                    if x.is_zero() && k < 0 {
                        return None;
                    }
                    v *= pow_rat(x, k);
                }
            }
            total += v;
        }
        Some(total)
    }

    /// Renders with the given variable names, highest monomial first.
    pub fn fmt_with(&self, names: [&str; N]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = fmt_mono(m, &names);
            if mono.is_empty() {
                let _ = write!(s, "{}", abs);
            } else if abs.is_one() {
                s.push_str(&mono);
            } else {
                let _ = write!(s, "{}*{}", abs, mono);
            }
        }
        s
    }
}

fn fmt_mono<const N: usize>(m: &Mono<N>, names: &[&str; N]) -> String {
    let mut parts = Vec::new();
    for (e, name) in m.0.iter().zip(names.iter()) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            parts.push(name.to_string());
        } else if e.is_integer() && !e.is_negative() {
            parts.push(format!("{}^{}", name, e));
        } else {
            parts.push(format!("{}^({})", name, e));
        }
    }
    parts.join("*")
}

/// `x^k` for an integer `k` (negative allowed for nonzero `x`).
pub fn pow_rat(x: &Rat, k: i64) -> Rat {
    let base = if k < 0 { Rat::one() / x } else { x.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

impl UPoly {
    pub fn x_pow(e: Exp, c: Rat) -> Self {
        Poly::term(Mono([e]), c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{exp, rat};

    fn bi(terms: &[(i64, i64, i64)]) -> Poly<2> {
        Poly::from_terms(
            terms
                .iter()
                .map(|&(a, b, c)| (Mono([exp(a, 1), exp(b, 1)]), rat(c, 1))),
        )
    }

    #[test]
    fn exact_division_recovers_factor() {
        // (p - t^2) * (p^2 + p t^2 + t^4) = p^3 - t^6
        let a = bi(&[(1, 0, 1), (0, 2, -1)]);
        let b = bi(&[(2, 0, 1), (1, 2, 1), (0, 4, 1)]);
        let prod = a.mul(&b);
        assert_eq!(prod, bi(&[(3, 0, 1), (0, 6, -1)]));
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a));
    }

    #[test]
    fn exact_division_rejects_non_factor() {
        let a = bi(&[(1, 0, 1), (0, 2, -1)]);
        let c = bi(&[(1, 0, 1), (0, 2, 1)]);
        assert_eq!(a.div_exact(&c), None);
        // Laurent: p^-1 + t divides by itself shifted
        let lau = bi(&[(-1, 0, 1), (0, 1, 1)]);
        let shifted = lau.mul_term(&Mono([exp(3, 1), exp(1, 2)]), &rat(5, 1));
        assert!(shifted.div_exact(&lau).is_some());
    }

    #[test]
    fn split_content_normalizes_least_term() {
        let f = bi(&[(3, 1, -2), (1, 3, 4)]);
        let (s, m, n) = f.split_content().unwrap();
        assert_eq!(m, Mono([exp(1, 1), exp(1, 1)]));
        assert_eq!(n.trailing().unwrap().1, &Rat::one());
        assert_eq!(n.mul_term(&m, &s), f);
    }
}
