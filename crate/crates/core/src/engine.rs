//! The memoized generating-function recursion and the density assembly.
//!
//! `G(σ, e_base, f_base, b)(t)` is computed from `H` over the admissible
//! partition plans of one step; `G({0})` closes the recursion with a
//! geometric factor. Densities are assembled from `G({0})`, `G({1})` and
//! their products over sub-splitting types, evaluated at
//! `t = q^{−e_base/2}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::EngineError;
use crate::splitting::{
    beta_data, enumerate_plans, h_value, inc, k_lim, n_rec, perm, plan_t_exponent,
    plan_weight_poly, steps_to_rescale, SplittingType,
};
use crate::symbolic::genfun::mono;
use crate::symbolic::{Exp, FracPoly, GenFun, Mono, Rat, UPoly, Var};

/// Environment variable capping the number of memoized `G` values.
pub const MEMO_CAP_ENV: &str = "TAME_DENSITY_MEMO_CAP";
const DEFAULT_MEMO_CAP: usize = 1 << 20;

/// Memo key: the base and the sorted multiset of `(e_abs, f_abs, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecursionKey {
    pub e_base: u64,
    pub f_base: u64,
    pub parts: Vec<(u64, u64, u64)>,
}

impl RecursionKey {
    pub fn new(sigma: &SplittingType, b: &[u64]) -> Self {
        let mut parts: Vec<(u64, u64, u64)> = sigma
            .components
            .iter()
            .zip(b)
            .map(|(&(e, f), &bi)| (e, f, bi))
            .collect();
        parts.sort_unstable();
        RecursionKey {
            e_base: sigma.e_base,
            f_base: sigma.f_base,
            parts,
        }
    }
}

/// Every density attached to one splitting type.
#[derive(Clone, Debug)]
pub struct DensityResult {
    pub sigma: SplittingType,
    pub rho_q: FracPoly,
    pub alpha_q: FracPoly,
    pub beta_q: FracPoly,
    pub asymptotic: FracPoly,
    pub rho_bivariate: Option<GenFun>,
    pub functional_eq_holds: bool,
    pub c0: Exp,
}

pub struct Engine {
    memo: Mutex<HashMap<RecursionKey, Arc<GenFun>>>,
    cap: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

fn p_mono(a: Exp) -> GenFun {
    GenFun::monomial(Rat::one(), a, Exp::zero())
}

fn lift_p(poly: &UPoly) -> GenFun {
    GenFun::from_poly(poly.map_monos(|m: &Mono<1>| mono(m.0[0], Exp::zero())))
}

fn int(n: u64) -> Exp {
    Exp::from_integer(n as i64)
}

/// `w(d) = (q^{d+1} − q^d)/(q^{d+1} − 1)` as a function of `q`, with `w(0) = 1`.
pub fn w(d: u64) -> FracPoly {
    if d == 0 {
        return FracPoly::one(Var::Q);
    }
    let q = |e: u64| UPoly::x_pow(int(e), Rat::one());
    FracPoly::from_ratio(Var::Q, q(d + 1).sub(&q(d)), q(d + 1).sub(&UPoly::one()))
        .expect("nonzero denominator")
}

/// `w(d)` written in `p` with `q = p^{f_base}`.
fn w_in_p(d: u64, f_base: u64) -> FracPoly {
    if d == 0 {
        return FracPoly::one(Var::P);
    }
    let p = |e: u64| UPoly::x_pow(int(e * f_base), Rat::one());
    FracPoly::from_ratio(Var::P, p(d + 1).sub(&p(d)), p(d + 1).sub(&UPoly::one()))
        .expect("nonzero denominator")
}

/// `c₀ = Σ f_rel (e_rel − 1) / e_base`
pub fn min_disc_valuation_formula(sigma: &SplittingType) -> Exp {
    Exp::new(sigma.ramification_excess() as i64, sigma.e_base as i64)
}

/// `1 / (perm · ∏ f_rel · q^{Σ(e_rel − 1) f_rel})`
pub fn asymptotic_rho(sigma: &SplittingType) -> FracPoly {
    let c = Rat::new(1.into(), (perm(sigma) * sigma.prod_f_rel()).into());
    FracPoly::monomial(Var::Q, -int(sigma.ramification_excess()), c)
}

impl Engine {
    pub fn new() -> Self {
        let cap = std::env::var(MEMO_CAP_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_MEMO_CAP);
        Self::with_cap(cap)
    }

    pub fn with_cap(cap: usize) -> Self {
        Engine {
            memo: Mutex::new(HashMap::new()),
            cap,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    fn depth_limit(sigma: &SplittingType) -> usize {
        (10 * sigma.degree() * sigma.e_base * sigma.f_base) as usize
    }

    /// `G(σ, e_base, f_base, b)(t)`.
    pub fn compute_g(&self, sigma: &SplittingType, b: &[u64]) -> Result<GenFun, EngineError> {
        let limit = Self::depth_limit(sigma);
        Ok((*self.g_inner(sigma, b, 0, limit)?).clone())
    }

    /// `H(σ, e_base, f_base, b)(t)`.
    pub fn compute_h(&self, sigma: &SplittingType, b: &[u64]) -> Result<GenFun, EngineError> {
        let limit = Self::depth_limit(sigma);
        self.h_inner(sigma, b, 0, limit)
    }

    fn g_inner(
        &self,
        sigma: &SplittingType,
        b: &[u64],
        depth: usize,
        limit: usize,
    ) -> Result<Arc<GenFun>, EngineError> {
        if depth > limit {
            return Err(EngineError::DepthExceeded { depth, limit });
        }
        if b.len() != sigma.m() {
            return Err(EngineError::Invariant("b-vector length mismatch".into()));
        }
        let key = RecursionKey::new(sigma, b);
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let value = if sigma.is_base_case() {
            p_mono(-int(b[0] * sigma.f_abs(0)))
        } else if b.iter().all(|&x| x == 0) {
            self.g_zero(sigma, depth, limit)?
        } else {
            let d = sigma.degree();
            let mut total = GenFun::zero();
            let mut cur = b.to_vec();
            for _ in 0..steps_to_rescale(sigma, b) {
                total = total.add(&self.h_inner(sigma, &cur, depth, limit)?);
                cur = inc(sigma, &cur);
            }
            let k = k_lim(sigma, b);
            let zeros = vec![0; sigma.m()];
            let g0 = self.g_inner(sigma, &zeros, depth + 1, limit)?;
            total.add(&g0.mul_monomial(
                &Rat::one(),
                -int(sigma.f_base * d * k),
                Exp::new((k * d * (d - 1)) as i64, sigma.e_base as i64),
            ))
        };
        let value = Arc::new(value);
        let mut memo = self.memo.lock().unwrap();
        if memo.len() < self.cap {
            memo.entry(key).or_insert_with(|| value.clone());
        }
        Ok(value)
    }

    fn g_zero(
        &self,
        sigma: &SplittingType,
        depth: usize,
        limit: usize,
    ) -> Result<GenFun, EngineError> {
        let m = sigma.m();
        let d = sigma.degree();
        let zeros = vec![0; m];
        let mut s = self.h_inner(sigma, &zeros, depth, limit)?;
        let mut cur = inc(sigma, &zeros);
        let q = p_mono(int(sigma.f_base));
        for _ in 1..n_rec(sigma) {
            s = s.add(&q.mul(&self.h_inner(sigma, &cur, depth, limit)?));
            cur = inc(sigma, &cur);
        }
        let closing = GenFun::one().sub(&GenFun::monomial(
            Rat::one(),
            Exp::from_integer(sigma.f_base as i64 * (1 - d as i64)),
            Exp::new((d * (d - 1)) as i64, sigma.e_base as i64),
        ));
        Ok(s.div(&closing)?)
    }

    fn h_inner(
        &self,
        sigma: &SplittingType,
        b: &[u64],
        depth: usize,
        limit: usize,
    ) -> Result<GenFun, EngineError> {
        let m = sigma.m();
        let bd = beta_data(sigma, b);
        let bnext = inc(sigma, b);
        let mut total = GenFun::zero();
        for plan in enumerate_plans(sigma, b) {
            if plan.is_head(m) {
                continue;
            }
            let weight = plan_weight_poly(sigma, b, &plan);
            if weight.is_zero() {
                continue;
            }
            let texp = plan_t_exponent(sigma, &bd, &plan);
            let mut term = lift_p(&weight).mul_monomial(&Rat::one(), Exp::zero(), texp);
            for (block, &n) in plan.blocks.iter().zip(&plan.orbit_sizes) {
                let h = h_value(&bd, n);
                let sub = SplittingType::new(
                    sigma.restrict(block).components,
                    sigma.e_base * h,
                    sigma.f_base * n / h,
                )
                .map_err(|e| EngineError::Invariant(format!("sub-call base: {}", e)))?;
                if sub.degree() >= sigma.degree() {
                    return Err(EngineError::Invariant(format!(
                        "recursion measure did not decrease: {} -> {}",
                        sigma, sub
                    )));
                }
                let sub_b: Vec<u64> = block.iter().map(|&i| bnext[i]).collect();
                let g = self.g_inner(&sub, &sub_b, depth + 1, limit)?;
                term = term.mul(&g.substitute_t_power(int(n)));
                if term.is_zero() {
                    break;
                }
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// `r` with `t* = p^r = q^{−e_base/2}`.
    fn t_star(sigma: &SplittingType) -> Exp {
        Exp::new(-((sigma.e_base * sigma.f_base) as i64), 2)
    }

    fn normalizer_p(sigma: &SplittingType) -> FracPoly {
        // 1 / (perm · ∏ f_rel · q^{Σ(e_rel−1) f_rel / 2})
        let c = Rat::new(1.into(), (perm(sigma) * sigma.prod_f_rel()).into());
        FracPoly::monomial(
            Var::P,
            Exp::new(-((sigma.f_base * sigma.ramification_excess()) as i64), 2),
            c,
        )
    }

    fn g_at_t_star(&self, sigma: &SplittingType, b: &[u64]) -> Result<FracPoly, EngineError> {
        Ok(self
            .compute_g(sigma, b)?
            .eval_t_as_p_power(Self::t_star(sigma))?)
    }

    fn subsets(m: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
        (0u64..(1u64 << m)).map(move |mask| {
            let a: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let c: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 0).collect();
            (a, c)
        })
    }

    /// `ρ` as a function of `p`, before the rewrite in `q`.
    pub fn compute_rho_p(&self, sigma: &SplittingType) -> Result<FracPoly, EngineError> {
        let mut sum = FracPoly::zero(Var::P);
        for (a, c) in Self::subsets(sigma.m()) {
            let ga = if a.is_empty() {
                FracPoly::one(Var::P)
            } else {
                self.g_at_t_star(&sigma.restrict(&a), &vec![0; a.len()])?
            };
            let gc = if c.is_empty() {
                FracPoly::one(Var::P)
            } else {
                self.g_at_t_star(&sigma.restrict(&c), &vec![1; c.len()])?
            };
            sum = sum.add(&ga.mul(&gc));
        }
        Ok(w_in_p(sigma.degree(), sigma.f_base)
            .mul(&sum)
            .mul(&Self::normalizer_p(sigma)))
    }

    /// `ρ(σ)` as an exact rational function of `q = p^{f_base}`.
    pub fn compute_rho(&self, sigma: &SplittingType) -> Result<FracPoly, EngineError> {
        Ok(self.compute_rho_p(sigma)?.rewrite_in_q(sigma.f_base)?)
    }

    /// The bivariate `ρ(p, t)`: the same assembly with `t` left free.
    pub fn compute_rho_bivariate(&self, sigma: &SplittingType) -> Result<GenFun, EngineError> {
        let mut sum = GenFun::zero();
        for (a, c) in Self::subsets(sigma.m()) {
            let ga = if a.is_empty() {
                GenFun::one()
            } else {
                self.compute_g(&sigma.restrict(&a), &vec![0; a.len()])?
            };
            let gc = if c.is_empty() {
                GenFun::one()
            } else {
                self.compute_g(&sigma.restrict(&c), &vec![1; c.len()])?
            };
            sum = sum.add(&ga.mul(&gc));
        }
        let w = GenFun::from_fracpoly_p(&w_in_p(sigma.degree(), sigma.f_base))?;
        let norm = GenFun::from_fracpoly_p(&Self::normalizer_p(sigma))?;
        Ok(w.mul(&sum).mul(&norm))
    }

    /// Density among monic polynomials.
    pub fn compute_alpha(&self, sigma: &SplittingType) -> Result<FracPoly, EngineError> {
        let g = self.g_at_t_star(sigma, &vec![0; sigma.m()])?;
        Ok(g.mul(&Self::normalizer_p(sigma))
            .rewrite_in_q(sigma.f_base)?)
    }

    /// Density among monic polynomials congruent to `x^d`.
    pub fn compute_beta_monic(&self, sigma: &SplittingType) -> Result<FracPoly, EngineError> {
        let g = self.g_at_t_star(sigma, &vec![1; sigma.m()])?;
        let qd = FracPoly::monomial(Var::P, int(sigma.f_base * sigma.degree()), Rat::one());
        Ok(g.mul(&qd)
            .mul(&Self::normalizer_p(sigma))
            .rewrite_in_q(sigma.f_base)?)
    }

    /// `c₀`, checked against the least `t`-exponent of `G(σ, {0})`.
    pub fn min_disc_valuation(&self, sigma: &SplittingType) -> Result<Exp, EngineError> {
        let c0 = min_disc_valuation_formula(sigma);
        let g = self.compute_g(sigma, &vec![0; sigma.m()])?;
        match g.min_t_exponent() {
            Some(e) if e == c0 => Ok(c0),
            other => Err(EngineError::Invariant(format!(
                "least t-exponent {:?} of G({}, 0) differs from c0 = {}",
                other, sigma, c0
            ))),
        }
    }

    /// The coefficient of `t^{c₀}` in `G(σ, {0})`, as a function of `p`.
    pub fn leading_coefficient(&self, sigma: &SplittingType) -> Result<FracPoly, EngineError> {
        let c0 = min_disc_valuation_formula(sigma);
        let g = self.compute_g(sigma, &vec![0; sigma.m()])?;
        let s = g.series_coefficients(c0)?;
        Ok(s.get(&c0)
            .cloned()
            .unwrap_or_else(|| FracPoly::zero(Var::P)))
    }

    /// Every density at once; the bivariate form only on request.
    pub fn compute_density(
        &self,
        sigma: &SplittingType,
        with_bivariate: bool,
    ) -> Result<DensityResult, EngineError> {
        let rho_q = self.compute_rho(sigma)?;
        let functional_eq_holds = rho_q.invert_var() == rho_q;
        Ok(DensityResult {
            sigma: sigma.clone(),
            alpha_q: self.compute_alpha(sigma)?,
            beta_q: self.compute_beta_monic(sigma)?,
            asymptotic: asymptotic_rho(sigma),
            rho_bivariate: if with_bivariate {
                Some(self.compute_rho_bivariate(sigma)?)
            } else {
                None
            },
            functional_eq_holds,
            c0: self.min_disc_valuation(sigma)?,
            rho_q,
        })
    }
}

/// Decides `f(q) = f(1/q)`; the witness is `f(q) − f(1/q)` when it fails.
pub fn check_inversion_symmetry(f: &FracPoly) -> (bool, Option<FracPoly>) {
    let d = f.sub(&f.invert_var());
    if d.is_zero() {
        (true, None)
    } else {
        (false, Some(d))
    }
}

/// Decides `g(p, t) = g(1/p, 1/t)`; the witness is the difference.
pub fn check_bivariate_symmetry(g: &GenFun) -> (bool, Option<GenFun>) {
    let d = g.sub(&g.invert());
    if d.is_zero() {
        (true, None)
    } else {
        (false, Some(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{exp, rat, Poly};

    fn st(c: &[(u64, u64)]) -> SplittingType {
        SplittingType::absolute(c.to_vec())
    }

    fn bp(terms: &[(i64, i64, i64)]) -> Poly<2> {
        Poly::from_terms(
            terms
                .iter()
                .map(|&(a, b, c)| (mono(exp(a, 1), exp(b, 1)), rat(c, 1))),
        )
    }

    /// (p − 1) t^s / (p − t²)
    fn closed(s: i64) -> GenFun {
        GenFun::from_ratio(bp(&[(1, s, 1), (0, s, -1)]), bp(&[(1, 0, 1), (0, 2, -1)])).unwrap()
    }

    fn qpoly(c: &[i64]) -> UPoly {
        UPoly::from_terms(
            c.iter()
                .enumerate()
                .map(|(i, &v)| (Mono([exp(i as i64, 1)]), rat(v, 1))),
        )
    }

    #[test]
    fn g_examples() {
        let e = Engine::new();
        assert_eq!(
            e.compute_g(&st(&[(1, 1), (1, 1)]), &[0, 0]).unwrap(),
            closed(0)
        );
        assert_eq!(e.compute_g(&st(&[(1, 2)]), &[0]).unwrap(), closed(0));
        assert_eq!(e.compute_g(&st(&[(2, 1)]), &[0]).unwrap(), closed(1));
    }

    #[test]
    fn h_examples() {
        let e = Engine::new();
        let pm1_over = |k: i64| GenFun::from_poly(bp(&[(1 - k, 0, 1), (-k, 0, -1)]));
        assert_eq!(
            e.compute_h(&st(&[(1, 1), (1, 1)]), &[0, 0]).unwrap(),
            pm1_over(1)
        );
        assert_eq!(e.compute_h(&st(&[(1, 2)]), &[0]).unwrap(), pm1_over(1));
        let want = GenFun::from_poly(bp(&[(-1, 1, 1), (-2, 1, -1)]));
        assert_eq!(e.compute_h(&st(&[(2, 1)]), &[1]).unwrap(), want);
    }

    #[test]
    fn rho_examples() {
        let e = Engine::new();
        assert_eq!(
            e.compute_rho(&st(&[(1, 1), (1, 1)])).unwrap(),
            FracPoly::constant(Var::Q, rat(1, 2))
        );
        let want = FracPoly::from_ratio(Var::Q, qpoly(&[1, -1, 1]), qpoly(&[2, 2, 2])).unwrap();
        assert_eq!(e.compute_rho(&st(&[(1, 2)])).unwrap(), want);
        let want = FracPoly::from_ratio(Var::Q, qpoly(&[0, 1]), qpoly(&[1, 1, 1])).unwrap();
        assert_eq!(e.compute_rho(&st(&[(2, 1)])).unwrap(), want);
    }

    #[test]
    fn alpha_beta_examples() {
        let e = Engine::new();
        let one = FracPoly::one(Var::Q);
        assert_eq!(e.compute_alpha(&st(&[(1, 1)])).unwrap(), one);
        assert_eq!(e.compute_beta_monic(&st(&[(1, 1)])).unwrap(), one);
        let s = st(&[(1, 1), (1, 1)]);
        assert_eq!(
            e.compute_alpha(&s).unwrap(),
            FracPoly::from_ratio(Var::Q, qpoly(&[0, 1]), qpoly(&[2, 2])).unwrap()
        );
        assert_eq!(
            e.compute_beta_monic(&s).unwrap(),
            FracPoly::from_ratio(Var::Q, qpoly(&[1]), qpoly(&[2, 2])).unwrap()
        );
        let s = st(&[(2, 1)]);
        assert_eq!(
            e.compute_alpha(&s).unwrap(),
            FracPoly::from_ratio(Var::Q, qpoly(&[1]), qpoly(&[1, 1])).unwrap()
        );
        assert_eq!(
            e.compute_beta_monic(&s).unwrap(),
            FracPoly::from_ratio(Var::Q, qpoly(&[0, 1]), qpoly(&[1, 1])).unwrap()
        );
    }

    #[test]
    fn w_and_asymptotics() {
        assert_eq!(w(0), FracPoly::one(Var::Q));
        assert_eq!(
            w(1),
            FracPoly::from_ratio(Var::Q, qpoly(&[0, 1]), qpoly(&[1, 1])).unwrap()
        );
        assert_eq!(
            w(2),
            FracPoly::from_ratio(Var::Q, qpoly(&[0, 0, -1, 1]), qpoly(&[-1, 0, 0, 1])).unwrap()
        );
        assert_eq!(
            asymptotic_rho(&st(&[(1, 1), (1, 1)])),
            FracPoly::constant(Var::Q, rat(1, 2))
        );
        assert_eq!(
            asymptotic_rho(&st(&[(1, 2)])),
            FracPoly::constant(Var::Q, rat(1, 2))
        );
        assert_eq!(
            asymptotic_rho(&st(&[(2, 1)])),
            FracPoly::monomial(Var::Q, exp(-1, 1), rat(1, 1))
        );
    }

    #[test]
    fn min_disc_examples() {
        let e = Engine::new();
        assert_eq!(
            e.min_disc_valuation(&st(&[(1, 1), (1, 1)])).unwrap(),
            exp(0, 1)
        );
        assert_eq!(e.min_disc_valuation(&st(&[(2, 1)])).unwrap(), exp(1, 1));
        assert_eq!(e.min_disc_valuation(&st(&[(3, 2)])).unwrap(), exp(4, 1));
    }

    #[test]
    fn bivariate_symmetry_small() {
        let e = Engine::new();
        for s in [st(&[(1, 1), (1, 1)]), st(&[(2, 1)]), st(&[(1, 2)])] {
            let g = e.compute_rho_bivariate(&s).unwrap();
            assert!(check_bivariate_symmetry(&g).0, "{}", s);
        }
    }
}
