//! Splitting types and the combinatorics of one recursion step.
//!
//! Everything here is prime-symbolic: weights are polynomials in `p`, and
//! tameness only matters once a concrete prime is supplied.

use std::fmt;

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, mobius};
use crate::error::SplittingError;
use crate::symbolic::{rat, rat_int, Exp, FracPoly, Mono, Rat, UPoly, Var};

/// An ordered list of absolute `(e, f)` pairs over a base `(e_base, f_base)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplittingType {
    pub components: Vec<(u64, u64)>,
    pub e_base: u64,
    pub f_base: u64,
}

pub type BVector = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaData {
    pub beta: Exp,
    /// Argmin indices, ascending.
    pub i_set: Vec<usize>,
    pub denom: u64,
}

impl BetaData {
    pub fn is_full(&self, m: usize) -> bool {
        self.i_set.len() == m
    }

    pub fn contains(&self, i: usize) -> bool {
        self.i_set.binary_search(&i).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionPlan {
    pub blocks: Vec<Vec<usize>>,
    pub orbit_sizes: Vec<u64>,
}

impl PartitionPlan {
    /// The plan `({[m]}, {1})`, whose contribution the recursion routes
    /// through `G(inc(b))` instead of `H(b)`.
    pub fn is_head(&self, m: usize) -> bool {
        self.blocks.len() == 1 && self.blocks[0].len() == m && self.orbit_sizes[0] == 1
    }
}

impl SplittingType {
    pub fn new(
        components: Vec<(u64, u64)>,
        e_base: u64,
        f_base: u64,
    ) -> Result<Self, SplittingError> {
        if components.is_empty() {
            return Err(SplittingError::Empty);
        }
        for &(e, f) in &components {
            if e == 0 || f == 0 || e % e_base != 0 || f % f_base != 0 {
                return Err(SplittingError::Divisibility {
                    e,
                    f,
                    e_base,
                    f_base,
                });
            }
        }
        Ok(SplittingType {
            components,
            e_base,
            f_base,
        })
    }

    /// Over base `(1, 1)`.
    pub fn absolute(components: Vec<(u64, u64)>) -> Self {
        Self::new(components, 1, 1).expect("base (1,1) divides everything")
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn e_abs(&self, i: usize) -> u64 {
        self.components[i].0
    }

    pub fn f_abs(&self, i: usize) -> u64 {
        self.components[i].1
    }

    pub fn e_rel(&self, i: usize) -> u64 {
        self.components[i].0 / self.e_base
    }

    pub fn f_rel(&self, i: usize) -> u64 {
        self.components[i].1 / self.f_base
    }

    pub fn d_i(&self, i: usize) -> u64 {
        self.e_rel(i) * self.f_rel(i)
    }

    /// Relative degree `d = Σ e_rel f_rel`.
    pub fn degree(&self) -> u64 {
        (0..self.m()).map(|i| self.d_i(i)).sum()
    }

    /// `Σ (e_rel − 1) f_rel`
    pub fn ramification_excess(&self) -> u64 {
        (0..self.m())
            .map(|i| (self.e_rel(i) - 1) * self.f_rel(i))
            .sum()
    }

    pub fn prod_f_rel(&self) -> u64 {
        (0..self.m()).map(|i| self.f_rel(i)).product()
    }

    /// A single component with `e_rel = f_rel = 1`.
    pub fn is_base_case(&self) -> bool {
        self.m() == 1 && self.e_rel(0) == 1 && self.f_rel(0) == 1
    }

    pub fn restrict(&self, idx: &[usize]) -> Self {
        SplittingType {
            components: idx.iter().map(|&i| self.components[i]).collect(),
            e_base: self.e_base,
            f_base: self.f_base,
        }
    }

    pub fn with_base(&self, e_base: u64, f_base: u64) -> Result<Self, SplittingError> {
        Self::new(self.components.clone(), e_base, f_base)
    }

    /// Components sorted, for order-independent keys and display.
    pub fn canonical(&self) -> Self {
        let mut c = self.components.clone();
        c.sort_unstable();
        SplittingType {
            components: c,
            e_base: self.e_base,
            f_base: self.f_base,
        }
    }

    /// Checks `p ∤ e_rel` for every component.
    pub fn check_tame(&self, p: u64) -> Result<(), SplittingError> {
        for i in 0..self.m() {
            if self.e_rel(i) % p == 0 {
                return Err(SplittingError::WildInput {
                    p,
                    e: self.e_rel(i),
                });
            }
        }
        Ok(())
    }

    /// Pair grammar, e.g. `e1f1,e2f1@e1f1`.
    pub fn pairs_string(&self) -> String {
        let body: Vec<String> = self
            .components
            .iter()
            .map(|(e, f)| format!("e{}f{}", e, f))
            .collect();
        if self.e_base == 1 && self.f_base == 1 {
            body.join(",")
        } else {
            format!("{}@e{}f{}", body.join(","), self.e_base, self.f_base)
        }
    }

    /// The `f^e` display of relative invariants, e.g. `(1^1 2^1)`.
    pub fn f_pow_e_string(&self) -> String {
        let body: Vec<String> = (0..self.m())
            .map(|i| format!("{}^{}", self.f_rel(i), self.e_rel(i)))
            .collect();
        format!("({})", body.join(" "))
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pairs_string())
    }
}

/// Product over distinct `(e, f)` of the factorial of its multiplicity.
pub fn perm(sigma: &SplittingType) -> u64 {
    let c = sigma.canonical().components;
    let mut out = 1u64;
    let mut run = 0u64;
    for i in 0..c.len() {
        run = if i > 0 && c[i] == c[i - 1] {
            run + 1
        } else {
            1
        };
        out *= run;
    }
    out
}

pub fn beta_data(sigma: &SplittingType, b: &[u64]) -> BetaData {
    assert_eq!(b.len(), sigma.m(), "b-vector length mismatch");
    let ratios: Vec<Exp> = (0..sigma.m())
        .map(|i| Exp::new(b[i] as i64, sigma.e_rel(i) as i64))
        .collect();
    let beta = *ratios.iter().min().unwrap();
    let i_set = (0..sigma.m()).filter(|&i| ratios[i] == beta).collect();
    BetaData {
        beta,
        i_set,
        denom: *beta.denom() as u64,
    }
}

pub fn inc(sigma: &SplittingType, b: &[u64]) -> BVector {
    let bd = beta_data(sigma, b);
    let mut out = b.to_vec();
    for &i in &bd.i_set {
        out[i] += 1;
    }
    out
}

/// `max_i ⌈b_i / e_rel⌉`
pub fn k_lim(sigma: &SplittingType, b: &[u64]) -> u64 {
    (0..sigma.m())
        .map(|i| b[i].div_ceil(sigma.e_rel(i)))
        .max()
        .unwrap_or(0)
}

/// Number of `inc` steps from `b` to `{k_lim · e_rel}`.
pub fn steps_to_rescale(sigma: &SplittingType, b: &[u64]) -> u64 {
    let k = k_lim(sigma, b);
    let target: BVector = (0..sigma.m()).map(|i| k * sigma.e_rel(i)).collect();
    let mut cur = b.to_vec();
    let mut n = 0;
    while cur != target {
        cur = inc(sigma, &cur);
        n += 1;
        debug_assert!(cur.iter().zip(&target).all(|(c, t)| c <= t));
    }
    n
}

/// Number of `inc` steps from `{0}` to `{e_rel}`.
pub fn n_rec(sigma: &SplittingType) -> u64 {
    let zero = vec![0; sigma.m()];
    let target: BVector = (0..sigma.m()).map(|i| sigma.e_rel(i)).collect();
    let mut cur = inc(sigma, &zero);
    let mut n = 1;
    while cur != target {
        cur = inc(sigma, &cur);
        n += 1;
    }
    n
}

pub fn h_value(bd: &BetaData, n: u64) -> u64 {
    if n != 1 {
        bd.denom
    } else {
        1
    }
}

fn p_pow(e: u64) -> UPoly {
    UPoly::x_pow(Exp::from_integer(e as i64), Rat::one())
}

/// Number of Frobenius orbits of exact size `k'` on the nonzero elements of
/// the degree-`f k'` extension of `F_p`, relative to `F_{p^f}`:
/// `(1/k') Σ_{d | k'} μ(d) (p^{f k'/d} − 1)`.
pub fn mobius_orbit_count(f_base: u64, k_prime: u64) -> UPoly {
    assert!(k_prime >= 1);
    let mut out = UPoly::zero();
    for d in divisors(k_prime) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let term = p_pow(f_base * k_prime / d).sub(&UPoly::one());
        out = out.add(&term.scale(&rat_int(mu)));
    }
    out.scale(&rat(1, k_prime as i64))
}

/// `∏_{j<len} (x − j)` as a polynomial.
pub fn falling_factorial(x: &UPoly, len: u64) -> UPoly {
    (0..len).fold(UPoly::one(), |acc, j| {
        acc.mul(&x.sub(&UPoly::constant(rat_int(j as i64))))
    })
}

fn gcd_f_rel(sigma: &SplittingType, block: &[usize]) -> u64 {
    block.iter().fold(0, |g, &i| gcd(g, sigma.f_rel(i)))
}

/// Whether a plan satisfies every nonvanishing condition.
pub fn plan_admissible(sigma: &SplittingType, bd: &BetaData, plan: &PartitionPlan) -> bool {
    let m = sigma.m();
    let ones = plan.orbit_sizes.iter().filter(|&&n| n == 1).count();
    for (block, &n) in plan.blocks.iter().zip(&plan.orbit_sizes) {
        if n == 0 {
            return false;
        }
        if n != 1 {
            if n % bd.denom != 0 {
                return false;
            }
            let t = n / bd.denom;
            if block.iter().any(|&i| sigma.f_rel(i) % t != 0) {
                return false;
            }
        }
    }
    if bd.denom != 1 && ones > 1 {
        return false;
    }
    if !bd.is_full(m) {
        let outside: Vec<usize> = (0..m).filter(|i| !bd.contains(*i)).collect();
        let ok = plan
            .blocks
            .iter()
            .zip(&plan.orbit_sizes)
            .any(|(block, &n)| n == 1 && outside.iter().all(|i| block.contains(i)));
        if !ok {
            return false;
        }
    }
    true
}

/// All set partitions of `0..m` as restricted growth strings, in
/// lexicographic RGS order.
pub fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; m];
    fn rec(pos: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let m = rgs.len();
        if pos == m {
            let k = rgs.iter().copied().max().map(|x| x + 1).unwrap_or(0);
            let mut blocks = vec![Vec::new(); k];
            for (i, &r) in rgs.iter().enumerate() {
                blocks[r].push(i);
            }
            out.push(blocks);
            return;
        }
        for v in 0..=max + usize::from(pos > 0) {
            if pos == 0 && v > 0 {
                break;
            }
            rgs[pos] = v;
            let nmax = if pos == 0 { 0 } else { max.max(v) };
            rec(pos + 1, nmax, rgs, out);
        }
    }
    if m == 0 {
        return vec![Vec::new()];
    }
    rec(0, 0, &mut rgs, &mut out);
    out
}

/// Every plan with potentially nonzero weight, the head plan included.
pub fn enumerate_plans(sigma: &SplittingType, b: &[u64]) -> Vec<PartitionPlan> {
    let bd = beta_data(sigma, b);
    let mut out = Vec::new();
    for blocks in set_partitions(sigma.m()) {
        let choices: Vec<Vec<u64>> = blocks
            .iter()
            .map(|block| {
                let mut c = vec![1u64];
                if block.iter().all(|&i| bd.contains(i)) {
                    for t in divisors(gcd_f_rel(sigma, block)) {
                        let n = bd.denom * t;
                        if n != 1 {
                            c.push(n);
                        }
                    }
                }
                c
            })
            .collect();
        let mut idx = vec![0usize; blocks.len()];
        'odometer: loop {
            let plan = PartitionPlan {
                blocks: blocks.clone(),
                orbit_sizes: idx
                    .iter()
                    .enumerate()
                    .map(|(l, &k)| choices[l][k])
                    .collect(),
            };
            if plan_admissible(sigma, &bd, &plan) {
                out.push(plan);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break 'odometer;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
    out
}

/// The normalized count `P(σ, {E_l}, {b_i}, {n_l}, p)` as a polynomial in
/// `p`; zero for inadmissible plans.
pub fn plan_weight_poly(sigma: &SplittingType, b: &[u64], plan: &PartitionPlan) -> UPoly {
    let bd = beta_data(sigma, b);
    if !plan_admissible(sigma, &bd, plan) {
        return UPoly::zero();
    }
    let m = sigma.m();
    let mut sizes: Vec<u64> = plan.orbit_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut out = UPoly::one();
    for k in sizes {
        let blocks_k = plan.orbit_sizes.iter().filter(|&&n| n == k).count() as u64;
        let f_k: u64 = plan
            .blocks
            .iter()
            .zip(&plan.orbit_sizes)
            .filter(|(_, &n)| n == k)
            .map(|(bl, _)| bl.len() as u64)
            .sum();
        let n_k = if k == 1 {
            if bd.denom != 1 {
                UPoly::one()
            } else if bd.is_full(m) {
                falling_factorial(&p_pow(sigma.f_base), blocks_k)
            } else {
                falling_factorial(&p_pow(sigma.f_base).sub(&UPoly::one()), blocks_k - 1)
            }
        } else {
            let kp = k / bd.denom;
            let orbits = mobius_orbit_count(sigma.f_base, kp);
            falling_factorial(&orbits, blocks_k).scale(&rat_int(kp.pow(f_k as u32) as i64))
        };
        out = out.mul(&n_k);
        if out.is_zero() {
            break;
        }
    }
    out
}

pub fn plan_weight(sigma: &SplittingType, b: &[u64], plan: &PartitionPlan) -> FracPoly {
    FracPoly::from_poly(Var::P, plan_weight_poly(sigma, b, plan))
}

/// The exponent of `t` attached to a plan:
/// `(β / e_base)(d(d−1) − Σ_l D_l (D_l / n_l − 1))`, `D_l = Σ_{i∈E_l} d_i`.
pub fn plan_t_exponent(sigma: &SplittingType, bd: &BetaData, plan: &PartitionPlan) -> Exp {
    let d = sigma.degree() as i64;
    let mut s = Exp::from_integer(d * (d - 1));
    for (block, &n) in plan.blocks.iter().zip(&plan.orbit_sizes) {
        let dl: i64 = block.iter().map(|&i| sigma.d_i(i) as i64).sum();
        s -= Exp::from_integer(dl) * (Exp::new(dl, n as i64) - Exp::one());
    }
    bd.beta * s / Exp::from_integer(sigma.e_base as i64)
}

/// `(gcd(p^{f0} − 1, e0), f0 · gcd(p^{f0} − 1, e0))` for a tame `e0`.
pub fn tame_class_count(e0: u64, p: u64, f0: u64) -> Result<(u64, u64), SplittingError> {
    if e0 % p == 0 {
        return Err(SplittingError::WildInput { p, e: e0 });
    }
    let q = (p as u128).pow(f0 as u32) - 1;
    let g = (q.gcd(&(e0 as u128))) as u64;
    Ok((g, f0 * g))
}

/// Exact value of a polynomial in `p` at an integer.
pub fn eval_at(poly: &UPoly, p: u64) -> Rat {
    poly.eval(&[rat_int(p as i64)]).expect("integral exponents")
}

/// `p^e` helper for callers outside this module.
pub fn p_power(e: Exp) -> UPoly {
    UPoly::term(Mono([e]), Rat::one())
}

/// All splitting types of relative degree exactly `n` over `(e_base, f_base)`,
/// components sorted, tameness not checked.
pub fn splitting_types_of_degree(n: u64, e_base: u64, f_base: u64) -> Vec<SplittingType> {
    let mut shapes: Vec<(u64, u64)> = Vec::new();
    for d in 1..=n {
        for e in divisors(d) {
            shapes.push((e, d / e));
        }
    }
    shapes.sort_unstable();
    fn rec(
        rest: u64,
        start: usize,
        shapes: &[(u64, u64)],
        cur: &mut Vec<(u64, u64)>,
        out: &mut Vec<Vec<(u64, u64)>>,
    ) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for (k, &(e, f)) in shapes.iter().enumerate().skip(start) {
            if e * f <= rest {
                cur.push((e, f));
                rec(rest - e * f, k, shapes, cur, out);
                cur.pop();
            }
        }
    }
    let mut raw = Vec::new();
    rec(n, 0, &shapes, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| SplittingType {
            components: c
                .into_iter()
                .map(|(e, f)| (e * e_base, f * f_base))
                .collect(),
            e_base,
            f_base,
        })
        .collect()
}

/// All splitting types of relative degree `1..=degree_max`.
pub fn catalog(degree_max: u64, e_base: u64, f_base: u64) -> Vec<SplittingType> {
    (1..=degree_max)
        .flat_map(|n| splitting_types_of_degree(n, e_base, f_base))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn st(c: &[(u64, u64)]) -> SplittingType {
        SplittingType::absolute(c.to_vec())
    }

    fn plans_of(sigma: &SplittingType, b: &[u64]) -> Vec<(Vec<Vec<usize>>, Vec<u64>)> {
        enumerate_plans(sigma, b)
            .into_iter()
            .map(|p| (p.blocks, p.orbit_sizes))
            .collect()
    }

    #[test]
    fn perm_examples() {
        assert_eq!(perm(&st(&[(1, 1), (1, 1)])), 2);
        assert_eq!(perm(&st(&[(1, 1), (1, 2)])), 1);
        assert_eq!(perm(&st(&[(2, 1), (3, 1), (2, 1)])), 2);
    }

    #[test]
    fn beta_and_inc_examples() {
        let s = st(&[(2, 1), (3, 1)]);
        let bd = beta_data(&s, &[1, 1]);
        assert_eq!(
            (bd.beta, bd.i_set.clone(), bd.denom),
            (Exp::new(1, 3), vec![1], 3)
        );
        let bd = beta_data(&s, &[0, 0]);
        assert_eq!((bd.beta, bd.i_set.len(), bd.denom), (Exp::zero(), 2, 1));
        let bd = beta_data(&st(&[(2, 1)]), &[2]);
        assert_eq!(
            (bd.beta, bd.i_set.clone(), bd.denom),
            (Exp::one(), vec![0], 1)
        );

        let s = st(&[(1, 1), (2, 1)]);
        assert_eq!(inc(&s, &[0, 0]), vec![1, 1]);
        assert_eq!(inc(&s, &[1, 1]), vec![1, 2]);
        assert_eq!(inc(&st(&[(1, 1)]), &[3]), vec![4]);
    }

    #[test]
    fn orbit_counts() {
        let x = |e: i64| UPoly::x_pow(Exp::from_integer(e), Rat::one());
        assert_eq!(mobius_orbit_count(1, 1), x(1).sub(&UPoly::one()));
        assert_eq!(mobius_orbit_count(1, 2), x(2).sub(&x(1)).scale(&rat(1, 2)));
        assert_eq!(mobius_orbit_count(2, 1), x(2).sub(&UPoly::one()));
        assert_eq!(eval_at(&mobius_orbit_count(1, 2), 3), rat_int(3));
    }

    #[test]
    fn plan_enumeration_examples() {
        assert_eq!(
            plans_of(&st(&[(1, 1), (1, 1)]), &[0, 0]),
            vec![
                (vec![vec![0, 1]], vec![1]),
                (vec![vec![0], vec![1]], vec![1, 1])
            ]
        );
        assert_eq!(
            plans_of(&st(&[(1, 2)]), &[0]),
            vec![(vec![vec![0]], vec![1]), (vec![vec![0]], vec![2])]
        );
        assert_eq!(
            plans_of(&st(&[(2, 1)]), &[1]),
            vec![(vec![vec![0]], vec![1]), (vec![vec![0]], vec![2])]
        );
    }

    #[test]
    fn plan_weight_examples() {
        let x = |e: i64| UPoly::x_pow(Exp::from_integer(e), Rat::one());
        let s = st(&[(1, 1), (1, 1)]);
        let plan = PartitionPlan {
            blocks: vec![vec![0], vec![1]],
            orbit_sizes: vec![1, 1],
        };
        assert_eq!(plan_weight_poly(&s, &[0, 0], &plan), x(2).sub(&x(1)));
        for sigma in [st(&[(1, 1), (1, 1)]), st(&[(2, 1)]), st(&[(1, 2), (3, 1)])] {
            let m = sigma.m();
            let head = PartitionPlan {
                blocks: vec![(0..m).collect()],
                orbit_sizes: vec![1],
            };
            assert_eq!(plan_weight_poly(&sigma, &vec![0; m], &head), x(1));
        }
        let plan = PartitionPlan {
            blocks: vec![vec![0]],
            orbit_sizes: vec![2],
        };
        assert_eq!(
            plan_weight_poly(&st(&[(2, 1)]), &[1], &plan),
            x(1).sub(&UPoly::one())
        );
        // n = 3 cannot divide f_rel = 1
        let plan = PartitionPlan {
            blocks: vec![vec![0]],
            orbit_sizes: vec![3],
        };
        assert!(plan_weight_poly(&st(&[(1, 1)]), &[0], &plan).is_zero());
    }

    #[test]
    fn h_and_classes() {
        let bd = BetaData {
            beta: Exp::new(1, 2),
            i_set: vec![0],
            denom: 2,
        };
        assert_eq!(h_value(&bd, 2), 2);
        assert_eq!(h_value(&bd, 1), 1);
        let bd = BetaData {
            beta: Exp::zero(),
            i_set: vec![0],
            denom: 1,
        };
        assert_eq!(h_value(&bd, 4), 1);
        assert_eq!(tame_class_count(2, 5, 1).unwrap().0, 2);
        assert!(tame_class_count(2, 2, 1).is_err());
        assert_eq!(tame_class_count(3, 5, 1).unwrap().0, 1);
    }

    #[test]
    fn set_partition_counts() {
        let bell = [1usize, 1, 2, 5, 15, 52];
        for (m, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(m).len(), b);
        }
    }

    #[test]
    fn catalog_sizes() {
        // coefficients of ∏_d (1 - x^d)^{-τ(d)}
        let counts: Vec<usize> = (1..=5)
            .map(|n| splitting_types_of_degree(n, 1, 1).len())
            .collect();
        assert_eq!(counts, vec![1, 3, 5, 11, 17]);
        let s = splitting_types_of_degree(2, 2, 1);
        assert!(s.iter().all(|t| t.degree() == 2 && t.e_base == 2));
    }

    #[test]
    fn recursion_counters() {
        let s = st(&[(1, 1), (2, 1)]);
        assert_eq!(n_rec(&s), 2);
        assert_eq!(k_lim(&s, &[1, 1]), 1);
        assert_eq!(steps_to_rescale(&s, &[1, 1]), 1);
        assert_eq!(steps_to_rescale(&st(&[(2, 1)]), &[0]), 0);
    }
}
