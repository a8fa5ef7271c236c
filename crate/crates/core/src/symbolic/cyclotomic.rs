//! Cyclotomic polynomials, normalized to constant term `+1`.
//!
//! We write `Φ'_1(u) = 1 - u` and `Φ'_j = Φ_j` for `j ≥ 2`, so that
//! `1 - u^n = ∏_{d | n} Φ'_d(u)` holds on the nose.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{divisors, factorize};

fn cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Dense coefficients of `Φ'_j`, index = degree.
pub fn phi(j: u64) -> Arc<Vec<i64>> {
    assert!(j >= 1, "cyclotomic index must be positive");
    if let Some(v) = cache().lock().unwrap().get(&j) {
        return v.clone();
    }
    // (1 - u^j) / ∏_{d | j, d < j} Φ'_d
    let mut num = vec![0i64; j as usize + 1];
    num[0] = 1;
    num[j as usize] = -1;
    for d in divisors(j) {
        if d == j {
            continue;
        }
        num = div_exact_dense(&num, &phi(d));
    }
    let out = Arc::new(num);
    cache().lock().unwrap().insert(j, out.clone());
    out
}

/// Dense exact division with divisor constant term `1`.
fn div_exact_dense(a: &[i64], d: &[i64]) -> Vec<i64> {
    debug_assert_eq!(d[0], 1);
    let qlen = a.len() + 1 - d.len();
    let mut rem = a.to_vec();
    let mut q = vec![0i64; qlen];
    for i in 0..qlen {
        let c = rem[i];
        q[i] = c;
        if c != 0 {
            for (k, &dk) in d.iter().enumerate() {
                rem[i + k] -= c * dk;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Indices `d` with `1 - u^n = ∏ Φ'_d(u)`.
pub fn minus_binomial(n: u64) -> Vec<u64> {
    divisors(n)
}

/// Indices `d` with `1 + u^n = ∏ Φ'_d(u)`.
pub fn plus_binomial(n: u64) -> Vec<u64> {
    divisors(2 * n).into_iter().filter(|d| n % d != 0).collect()
}

/// Indices `d` with `Φ'_j(u^m) = ∏ Φ'_d(u)`.
pub fn substitute(j: u64, m: u64) -> Vec<u64> {
    let mut cur = vec![j];
    for (l, k) in factorize(m) {
        for _ in 0..k {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for &i in &cur {
                next.push(i * l);
                if i % l != 0 {
                    next.push(i);
                }
            }
            cur = next;
        }
    }
    cur
}
