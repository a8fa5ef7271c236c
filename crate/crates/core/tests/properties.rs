//! Property-based and exhaustive invariants across the symbolic layer, the
//! recursion and the oracle model.

use std::collections::BTreeMap;

use proptest::prelude::*;

use tame_density::engine::Engine;
use tame_density::oracle::{
    distinct_conjugates, pair_valuation, CommonFrame, TameFieldDesc, TeichExpansion,
};
use tame_density::splitting::{
    beta_data, catalog, enumerate_plans, eval_at, inc, k_lim, n_rec, plan_weight_poly,
    steps_to_rescale, SplittingType,
};
use tame_density::symbolic::cyclotomic::substitute;
use tame_density::symbolic::genfun::mono;
use tame_density::symbolic::json::{
    fracpoly_from_json, fracpoly_to_json, genfun_from_json, genfun_to_json,
};
use tame_density::symbolic::{rat_int, Exp, FracPoly, GenFun, Poly, Rat, UPoly, Var};

fn upoly(coeffs: &[i64]) -> UPoly {
    let mut p = UPoly::zero();
    for (i, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            p = p.add(&UPoly::x_pow(Exp::from_integer(i as i64), rat_int(c)));
        }
    }
    p
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 1..5)
}

fn nonzero_coeffs() -> impl Strategy<Value = Vec<i64>> {
    coeffs().prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

fn frac(num: &[i64], den: &[i64]) -> FracPoly {
    FracPoly::from_ratio(Var::Q, upoly(num), upoly(den)).unwrap()
}

/// `num(p, t) / (1 − c p^a t^k)` with a power-series expansion in `t`.
fn geometric(num: &[(i64, i64, i64)], c: i64, a: i64, k: i64) -> GenFun {
    let mut n = Poly::<2>::zero();
    for &(pe, te, cf) in num {
        n.add_term(
            mono(Exp::from_integer(pe), Exp::from_integer(te)),
            rat_int(cf),
        );
    }
    let mut d = Poly::<2>::one();
    d.add_term(
        mono(Exp::from_integer(a), Exp::from_integer(k)),
        rat_int(-c),
    );
    GenFun::from_ratio(n, d).unwrap()
}

fn bi_terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((0i64..3, 0i64..3, -3i64..=3), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        a in coeffs(), b in nonzero_coeffs(), c in coeffs(), d in nonzero_coeffs(), x in 2i64..30
    ) {
        let f = frac(&a, &b);
        let g = frac(&c, &d);
        let x = rat_int(x);
        if let (Some(fx), Some(gx)) = (f.eval(&x), g.eval(&x)) {
            prop_assert_eq!(f.add(&g).eval(&x), Some(&fx + &gx));
            prop_assert_eq!(f.mul(&g).eval(&x), Some(&fx * &gx));
            prop_assert_eq!(f.sub(&f), FracPoly::zero(Var::Q));
        }
    }

    #[test]
    fn exponent_scaling_is_multiplicative(
        a in coeffs(), b in nonzero_coeffs(), c in coeffs(), d in nonzero_coeffs(),
        k1 in 1i64..4, k2 in 1i64..4
    ) {
        let f = frac(&a, &b);
        let g = frac(&c, &d);
        let (k1, k2) = (Exp::from_integer(k1), Exp::from_integer(k2));
        prop_assert_eq!(f.mul(&g).map_exponents(k1), f.map_exponents(k1).mul(&g.map_exponents(k1)));
        prop_assert_eq!(f.map_exponents(k1).map_exponents(k2), f.map_exponents(k1 * k2));
    }

    #[test]
    fn cyclotomic_substitution_composes(j in 1u64..13, m1 in 1u64..7, m2 in 1u64..7) {
        let mut two_step: Vec<u64> = substitute(j, m1)
            .into_iter()
            .flat_map(|i| substitute(i, m2))
            .collect();
        let mut direct = substitute(j, m1 * m2);
        two_step.sort_unstable();
        direct.sort_unstable();
        prop_assert_eq!(two_step, direct);
    }

    #[test]
    fn series_of_product_is_convolution(
        n1 in bi_terms(), n2 in bi_terms(), c1 in 1i64..3, c2 in 1i64..3, k1 in 1i64..3, k2 in 1i64..3
    ) {
        let g1 = geometric(&n1, c1, 1, k1);
        let g2 = geometric(&n2, c2, -1, k2);
        let c_max = Exp::from_integer(5);
        let s1 = g1.series_coefficients(c_max).unwrap();
        let s2 = g2.series_coefficients(c_max).unwrap();
        let s12 = g1.mul(&g2).series_coefficients(c_max).unwrap();
        let mut conv: BTreeMap<Exp, FracPoly> = BTreeMap::new();
        for (a, x) in &s1 {
            for (b, y) in &s2 {
                if a + b <= c_max {
                    let e = conv.entry(a + b).or_insert_with(|| FracPoly::zero(Var::P));
                    *e = e.add(&x.mul(y));
                }
            }
        }
        for c in 0..=5 {
            let c = Exp::from_integer(c);
            let zero = FracPoly::zero(Var::P);
            prop_assert_eq!(s12.get(&c).unwrap_or(&zero), conv.get(&c).unwrap_or(&zero));
        }
    }

    #[test]
    fn inc_reaches_the_rescaled_vector(idx in 0usize..17, raw in prop::collection::vec(0u64..4, 4)) {
        let types = catalog(4, 1, 1);
        let sigma = &types[idx % types.len()];
        let b: Vec<u64> = raw[..sigma.m()].to_vec();
        let k = k_lim(sigma, &b);
        let mut cur = b.clone();
        for _ in 0..steps_to_rescale(sigma, &b) {
            cur = inc(sigma, &cur);
        }
        let rescaled: Vec<u64> = (0..sigma.m()).map(|i| k * sigma.e_rel(i)).collect();
        prop_assert_eq!(&cur, &rescaled);
        // One full period moves {k e_rel} to {(k + 1) e_rel}.
        for _ in 0..n_rec(sigma) {
            cur = inc(sigma, &cur);
        }
        let next: Vec<u64> = (0..sigma.m()).map(|i| (k + 1) * sigma.e_rel(i)).collect();
        prop_assert_eq!(cur, next);
    }

    #[test]
    fn ultrametric_inequality(
        p_idx in 0usize..3, e in 1u64..4, f in 1u64..3,
        xs in prop::collection::vec(prop::collection::vec(0u64..50, 4), 3)
    ) {
        let p = [5u64, 7, 11][p_idx];
        let fd = TameFieldDesc::new(p, e, f, 0).unwrap();
        let frame = CommonFrame::of_fields(&[fd]);
        let q1 = fd.unit_order() + 1;
        let elems: Vec<_> = xs
            .iter()
            .map(|raw| {
                let slots: Vec<Option<u64>> = raw.iter().map(|&v| (v % q1).checked_sub(1)).collect();
                TeichExpansion::from_residues(fd, &slots).conjugate(0, 0, &frame)
            })
            .collect();
        let v = |a: usize, b: usize| pair_valuation(&elems[a], &elems[b]).unwrap();
        if let (Some(xy), Some(yz), Some(xz)) = (v(0, 1), v(1, 2), v(0, 2)) {
            prop_assert!(xz >= xy.min(yz));
        }
    }

    #[test]
    fn generic_elements_have_full_conjugate_sets(
        p_idx in 0usize..3, e in 1u64..5, f in 1u64..4, lead in 0u64..1000, second in 0u64..1000
    ) {
        let p = [5u64, 7, 11][p_idx];
        prop_assume!(e % p != 0);
        let fd = TameFieldDesc::new(p, e, f, 0).unwrap();
        let q1 = fd.unit_order();
        // A primitive root of F_{p^f}^* has Frobenius orbit of size f.
        let primitive: Vec<u64> = (1..q1).filter(|&k| tame_density::arith::gcd(k, q1) == 1).collect();
        let a0 = primitive[lead as usize % primitive.len()];
        let x = TeichExpansion::from_residues(fd, &[Some(a0), Some(second % q1)]);
        prop_assert_eq!(distinct_conjugates(&x) as u64, e * f);
    }
}

#[test]
fn memo_results_do_not_depend_on_call_order() {
    let mut jobs: Vec<(SplittingType, Vec<u64>)> = Vec::new();
    for s in catalog(3, 1, 1) {
        for mask in 0..(1u32 << s.m()) {
            let b = (0..s.m()).map(|i| ((mask >> i) & 1) as u64).collect();
            jobs.push((s.clone(), b));
        }
    }
    let forward = Engine::new();
    let reference: Vec<GenFun> = jobs
        .iter()
        .map(|(s, b)| forward.compute_g(s, b).unwrap())
        .collect();
    let backward = Engine::new();
    for (i, (s, b)) in jobs.iter().enumerate().rev() {
        assert_eq!(
            backward.compute_g(s, b).unwrap(),
            reference[i],
            "{} {:?}",
            s,
            b
        );
    }
    let capped = Engine::with_cap(2);
    for (i, (s, b)) in jobs.iter().enumerate() {
        assert_eq!(capped.compute_g(s, b).unwrap(), reference[i]);
    }
}

#[test]
fn plan_weights_sum_to_free_leading_choices() {
    for (eb, fb) in [(1, 1), (2, 1), (1, 2)] {
        for s in catalog(3, eb, fb) {
            for p in [3u64, 5] {
                if s.check_tame(p).is_err() {
                    continue;
                }
                for mask in 0..(1u32 << s.m()) {
                    let b: Vec<u64> = (0..s.m()).map(|i| ((mask >> i) & 1) as u64).collect();
                    let bd = beta_data(&s, &b);
                    let total = enumerate_plans(&s, &b)
                        .iter()
                        .fold(Rat::from_integer(0.into()), |acc, plan| {
                            acc + eval_at(&plan_weight_poly(&s, &b, plan), p)
                        });
                    let free: u32 = bd.i_set.iter().map(|&i| s.f_abs(i) as u32).sum();
                    assert_eq!(
                        total,
                        rat_int((p as i64).pow(free)),
                        "{} b={:?} p={}",
                        s,
                        b,
                        p
                    );
                }
            }
        }
    }
}

#[test]
fn engine_outputs_round_trip_through_json() {
    let engine = Engine::new();
    for s in catalog(3, 1, 1) {
        let rho = engine.compute_rho(&s).unwrap();
        assert_eq!(fracpoly_from_json(&fracpoly_to_json(&rho)).unwrap(), rho);
        let bi = engine.compute_rho_bivariate(&s).unwrap();
        assert_eq!(genfun_from_json(&genfun_to_json(&bi)).unwrap(), bi);
    }
}
