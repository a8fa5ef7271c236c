//! Brute-force conjugate counts, Frobenius-orbit counts and the index parity
//! of polynomial versus field discriminants.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::teich::{
    check_tame_prime, disc_valuation, pow_mod, tuple_roots, TameFieldDesc, TeichExpansion,
};
use crate::arith::gcd;
use crate::error::OracleError;
use crate::splitting::{eval_at, mobius_orbit_count};
use crate::symbolic::Exp;

/// Number of pairs `(a, j)` with `a` a nonzero Teichmüller representative of
/// `F_{p^f}` and `j ∈ [0, gcd(p^f − 1, e))` such that `a·π_j^b` has exactly
/// `k` distinct conjugates.
pub fn count_orbit_choices(e: u64, f: u64, b: u64, k: u64, p: u64) -> Result<u64, OracleError> {
    check_tame_prime(p, e)?;
    let classes = TameFieldDesc::classes(p, e, f);
    let mut count = 0;
    for j in 0..classes {
        let fd = TameFieldDesc { p, e, f, j };
        for a in 0..fd.unit_order() {
            let mut seen = BTreeSet::new();
            for r in 0..f {
                for s in 0..e {
                    seen.insert(fd.conjugate_exponent(a, b, r, s));
                }
            }
            if seen.len() as u64 == k {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Closed form `gcd(p^f − 1, e)·(k/denom)·P(1, k/denom)` when `denom | k`
/// and `k/denom | f`, zero otherwise, with `denom` the denominator of `b/e`.
pub fn orbit_choices_closed_form(e: u64, f: u64, b: u64, k: u64, p: u64) -> u64 {
    let denom = e / gcd(b, e);
    if k == 0 || k % denom != 0 {
        return 0;
    }
    let kp = k / denom;
    if f % kp != 0 {
        return 0;
    }
    let orbits = eval_at(&mobius_orbit_count(1, kp), p)
        .to_integer()
        .to_u64()
        .unwrap_or(0);
    TameFieldDesc::classes(p, e, f) * kp * orbits
}

/// Frobenius orbits `x ↦ x^{p^f}` of exact size `k'` on the
/// `(p^{f k'} − 1)`-th roots of unity, by direct iteration.
pub fn brute_force_orbit_count(p: u64, f: u64, k_prime: u64) -> u64 {
    let n = p.pow((f * k_prime) as u32) - 1;
    let step = pow_mod(p, f, n.max(1));
    let mut seen = vec![false; n as usize];
    let mut count = 0;
    for x in 0..n {
        if seen[x as usize] {
            continue;
        }
        let mut size = 0;
        let mut y = x;
        loop {
            seen[y as usize] = true;
            size += 1;
            y = ((y as u128 * step as u128) % n as u128) as u64;
            if y == x {
                break;
            }
        }
        if size == k_prime {
            count += 1;
        }
    }
    count
}

/// Result of comparing `v(Δ_P)` with `v(Δ_L)` over a batch of generators.
#[derive(Clone, Debug, Serialize)]
pub struct ParityReport {
    pub field: TameFieldDesc,
    pub disc_field: u64,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
}

impl ParityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `v(Δ_P) − v(Δ_L)` is a nonnegative even integer for every
/// sample that generates its field, with `v(Δ_L) = (e − 1) f`.
pub fn check_index_parity(samples: &[TeichExpansion]) -> Result<ParityReport, OracleError> {
    let field = samples
        .first()
        .map(|x| x.field)
        .ok_or(OracleError::LengthMismatch(0, 1))?;
    let disc_field = (field.e - 1) * field.f;
    let mut report = ParityReport {
        field,
        disc_field,
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for x in samples {
        assert_eq!(x.field, field, "samples must share one field");
        let Some(v) = disc_valuation(&tuple_roots(std::slice::from_ref(x)))? else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        let diff = v - Exp::from_integer(disc_field as i64);
        let even = diff.is_integer() && diff.to_integer() % 2 == 0;
        if !even || diff < Exp::from_integer(0) {
            report
                .violations
                .push(format!("{:?}: v(Δ_P) = {}", x.slots, v));
        }
    }
    Ok(report)
}
