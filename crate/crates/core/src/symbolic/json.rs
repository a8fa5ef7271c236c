//! JSON encoding of [`FracPoly`] and [`GenFun`].
//!
//! Univariate: `{"var": "q", "num": [[exp_num, exp_den, coeff_num, coeff_den], ...], "den": [...]}`.
//! Bivariate: `{"vars": ["p", "t"], "num": [[p_num, p_den, t_num, t_den, coeff_num, coeff_den], ...], "den": [...]}`.
//! Integers that do not fit in 64 bits are written as decimal strings.
//! Terms are emitted in ascending monomial order, so encoding is
//! deterministic and decode-then-encode is the identity.

use num_bigint::BigInt;
use serde_json::{json, Value};

use super::fracpoly::{FracPoly, Var};
use super::genfun::GenFun;
use super::poly::{Mono, Poly};
use super::{Exp, Rat};
use crate::error::SymbolicError;

fn int_to_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt, SymbolicError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| SymbolicError::Format(format!("not an integer: {}", n))),
        Value::String(s) => s
            .parse()
            .map_err(|_| SymbolicError::Format(format!("not an integer: {}", s))),
        other => Err(SymbolicError::Format(format!("not an integer: {}", other))),
    }
}

fn exp_from_json(n: &Value, d: &Value) -> Result<Exp, SymbolicError> {
    let n = i64::try_from(int_from_json(n)?)
        .map_err(|_| SymbolicError::Format("exponent too large".into()))?;
    let d = i64::try_from(int_from_json(d)?)
        .map_err(|_| SymbolicError::Format("exponent too large".into()))?;
    if d == 0 {
        return Err(SymbolicError::Format("zero exponent denominator".into()));
    }
    Ok(Exp::new(n, d))
}

fn rat_from_json(n: &Value, d: &Value) -> Result<Rat, SymbolicError> {
    let d = int_from_json(d)?;
    if d == BigInt::from(0) {
        return Err(SymbolicError::Format("zero coefficient denominator".into()));
    }
    Ok(Rat::new(int_from_json(n)?, d))
}

fn poly_to_json<const N: usize>(p: &Poly<N>) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let mut row = Vec::with_capacity(2 * N + 2);
                for e in m.0.iter() {
                    row.push(json!(*e.numer()));
                    row.push(json!(*e.denom()));
                }
                row.push(int_to_json(c.numer()));
                row.push(int_to_json(c.denom()));
                Value::Array(row)
            })
            .collect(),
    )
}

fn poly_from_json<const N: usize>(v: &Value) -> Result<Poly<N>, SymbolicError> {
    let rows = v
        .as_array()
        .ok_or_else(|| SymbolicError::Format("term list must be an array".into()))?;
    let mut out = Poly::<N>::zero();
    for row in rows {
        let row = row
            .as_array()
            .filter(|r| r.len() == 2 * N + 2)
            .ok_or_else(|| {
                SymbolicError::Format(format!("term must have {} entries", 2 * N + 2))
            })?;
        let mut m = [Exp::from_integer(0); N];
        for (k, slot) in m.iter_mut().enumerate() {
            *slot = exp_from_json(&row[2 * k], &row[2 * k + 1])?;
        }
        out.add_term(Mono(m), rat_from_json(&row[2 * N], &row[2 * N + 1])?);
    }
    Ok(out)
}

pub fn fracpoly_to_json(f: &FracPoly) -> Value {
    json!({
        "var": f.var().name(),
        "num": poly_to_json(&f.numerator()),
        "den": poly_to_json(&f.denominator()),
    })
}

pub fn fracpoly_from_json(v: &Value) -> Result<FracPoly, SymbolicError> {
    let var = match v.get("var").and_then(Value::as_str) {
        Some("p") => Var::P,
        Some("q") => Var::Q,
        other => {
            return Err(SymbolicError::Format(format!(
                "unknown variable {:?}",
                other
            )))
        }
    };
    let num = poly_from_json::<1>(v.get("num").unwrap_or(&Value::Null))?;
    let den = poly_from_json::<1>(v.get("den").unwrap_or(&Value::Null))?;
    FracPoly::from_ratio(var, num, den)
}

pub fn genfun_to_json(g: &GenFun) -> Value {
    json!({
        "vars": ["p", "t"],
        "num": poly_to_json(g.numerator()),
        "den": poly_to_json(&g.denominator()),
    })
}

pub fn genfun_from_json(v: &Value) -> Result<GenFun, SymbolicError> {
    if v.get("vars") != Some(&json!(["p", "t"])) {
        return Err(SymbolicError::Format("expected vars [\"p\", \"t\"]".into()));
    }
    let num = poly_from_json::<2>(v.get("num").unwrap_or(&Value::Null))?;
    let den = poly_from_json::<2>(v.get("den").unwrap_or(&Value::Null))?;
    GenFun::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::genfun::mono;
    use crate::symbolic::{exp, rat};

    #[test]
    fn roundtrips() {
        let num = Poly::<1>::from_terms([
            (Mono([exp(2, 1)]), rat(1, 1)),
            (Mono([exp(1, 1)]), rat(-1, 1)),
            (Mono([exp(0, 1)]), rat(1, 1)),
        ]);
        let den = Poly::<1>::from_terms([
            (Mono([exp(2, 1)]), rat(2, 1)),
            (Mono([exp(1, 1)]), rat(2, 1)),
            (Mono([exp(0, 1)]), rat(2, 1)),
        ]);
        let f = FracPoly::from_ratio(Var::Q, num, den).unwrap();
        let v = fracpoly_to_json(&f);
        let back = fracpoly_from_json(&v).unwrap();
        assert_eq!(back, f);
        assert_eq!(fracpoly_to_json(&back).to_string(), v.to_string());

        let g = GenFun::from_ratio(
            Poly::<2>::from_terms([
                (mono(exp(1, 1), exp(1, 2)), rat(3, 7)),
                (mono(exp(0, 1), exp(0, 1)), rat(-1, 1)),
            ]),
            Poly::<2>::from_terms([
                (mono(exp(1, 1), exp(0, 1)), rat(1, 1)),
                (mono(exp(0, 1), exp(3, 2)), rat(-1, 1)),
            ]),
        )
        .unwrap();
        let v = genfun_to_json(&g);
        let back = genfun_from_json(&v).unwrap();
        assert_eq!(back, g);
        assert_eq!(genfun_to_json(&back).to_string(), v.to_string());
    }

    #[test]
    fn big_coefficients_use_strings() {
        let big = Rat::from_integer(BigInt::from(10).pow(30));
        let f = FracPoly::constant(Var::P, big.clone());
        let v = fracpoly_to_json(&f);
        assert!(v
            .to_string()
            .contains("\"1000000000000000000000000000000\""));
        assert_eq!(fracpoly_from_json(&v).unwrap(), f);
    }
}
