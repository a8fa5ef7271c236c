//! Oracle-versus-engine comparison records.

use serde::Serialize;

use super::enumerate::{enumerate_a_exact, monte_carlo_a};
use crate::engine::Engine;
use crate::error::{EngineError, OracleError};
use crate::splitting::SplittingType;
use crate::symbolic::{rat_int, Exp, Rat};

#[derive(Debug, thiserror::Error)]
pub enum CompareError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One compared coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRecord {
    pub sigma: String,
    pub b: Vec<u64>,
    pub p: u64,
    pub c: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_mass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub engine_value: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Engine coefficients of `G(σ, b)` at `p` for every integral `c ≤ c_max`.
pub fn engine_coefficients(
    engine: &Engine,
    sigma: &SplittingType,
    b: &[u64],
    c_max: u64,
    p: u64,
) -> Result<Vec<(Exp, Rat)>, CompareError> {
    let g = engine.compute_g(sigma, b)?;
    let series = g
        .series_coefficients(Exp::from_integer(c_max as i64))
        .map_err(EngineError::from)?;
    let p0 = rat_int(p as i64);
    let mut out = Vec::new();
    for c in 0..=c_max {
        let c = Exp::from_integer(c as i64);
        let v = match series.get(&c) {
            Some(f) => f
                .eval(&p0)
                .ok_or(EngineError::Invariant("pole in coefficient".into()))?,
            None => rat_int(0),
        };
        out.push((c, v));
    }
    // Any non-integral exponent carries mass the oracle cannot see.
    for (c, f) in &series {
        if !c.is_integer() && !f.is_zero() {
            out.push((*c, f.eval(&p0).unwrap_or_else(|| rat_int(0))));
        }
    }
    Ok(out)
}

/// Exact comparison of every coefficient `c ≤ c_max`.
pub fn compare_exact(
    engine: &Engine,
    sigma: &SplittingType,
    b: &[u64],
    c_max: u64,
    p: u64,
    guard: u128,
) -> Result<Vec<OracleRecord>, CompareError> {
    let exact = enumerate_a_exact(sigma, b, c_max, p, guard)?;
    let mut records = Vec::new();
    let mut cs: Vec<(Exp, Rat)> = engine_coefficients(engine, sigma, b, c_max, p)?;
    for c in exact.masses.keys() {
        if !cs.iter().any(|(k, _)| k == c) {
            cs.push((*c, rat_int(0)));
        }
    }
    cs.sort_by(|a, b| a.0.cmp(&b.0));
    for (c, v) in cs {
        let mass = exact.get(c);
        records.push(OracleRecord {
            sigma: sigma.pairs_string(),
            b: b.to_vec(),
            p,
            c: c.to_string(),
            exact_mass: Some(mass.to_string()),
            estimate: None,
            stderr: None,
            engine_value: v.to_string(),
            matches: mass == v,
        });
    }
    Ok(records)
}

/// Monte Carlo comparison: a match is agreement within `sigmas` standard errors.
#[allow(clippy::too_many_arguments)]
pub fn compare_monte_carlo(
    engine: &Engine,
    sigma: &SplittingType,
    b: &[u64],
    c_max: u64,
    p: u64,
    samples: u64,
    seed: u64,
    sigmas: f64,
) -> Result<Vec<OracleRecord>, CompareError> {
    use num_traits::ToPrimitive;
    let mc = monte_carlo_a(sigma, b, c_max, p, samples, seed)?;
    let mut records = Vec::new();
    for (c, v) in engine_coefficients(engine, sigma, b, c_max, p)? {
        let (est, se) = mc.get(c);
        let target = v.to_f64().unwrap_or(f64::NAN);
        // A zero standard error only accepts an exact hit.
        let ok = (est - target).abs() <= sigmas * se + 1e-12;
        records.push(OracleRecord {
            sigma: sigma.pairs_string(),
            b: b.to_vec(),
            p,
            c: c.to_string(),
            exact_mass: None,
            estimate: Some(est),
            stderr: Some(se),
            engine_value: v.to_string(),
            matches: ok,
        });
    }
    Ok(records)
}
