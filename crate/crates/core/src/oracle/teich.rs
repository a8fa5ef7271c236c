//! Truncated Teichmüller expansions in tame extensions of `Q_p` and their
//! Galois conjugates.
//!
//! Everything is encoded by exponents of roots of unity. Fix a compatible
//! system of roots of unity `ω_M` and of radicals `p^{1/E}` in an algebraic
//! closure. In the field `L_j = Q_p(ζ, π_j)` with `ζ = ω_{p^f−1}` and
//! `π_j = ω_M^j p^{1/e}` (so `π_j^e = ζ^j p`, `M = e(p^f − 1)`), the term
//! `ζ^k π_j^n` equals `ω_M^{ek + jn} p^{n/e}`. The embedding that sends
//! `ζ ↦ ζ^{p^r}` and `π_j ↦ ω_M^{j p^r} ζ_e^s p^{1/e}` maps it to
//! `ω_M^{(ek + jn) p^r + n s (p^f − 1)} p^{n/e}`.
//!
//! Two expansions over a common `p^{1/E}` differ first at some slot; since the
//! stored coefficients are roots of unity of order prime to `p` (or zero),
//! that difference is a unit, so the valuation of the difference is the slot
//! index over `E`.

use serde::Serialize;

use crate::arith::{gcd, is_prime, lcm};
use crate::error::{OracleError, SplittingError};
use crate::symbolic::Exp;

/// A coefficient: zero, or `ω^k` for the stored exponent `k`.
pub type Slot = Option<u64>;

/// The field `Q_p(ζ_{p^f−1}, (ζ^j p)^{1/e})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TameFieldDesc {
    pub p: u64,
    pub e: u64,
    pub f: u64,
    pub j: u64,
}

impl TameFieldDesc {
    pub fn new(p: u64, e: u64, f: u64, j: u64) -> Result<Self, OracleError> {
        check_tame_prime(p, e)?;
        assert!(e >= 1 && f >= 1);
        let classes = Self::classes(p, e, f);
        assert!(j < classes, "j = {j} outside [0, {classes})");
        Ok(TameFieldDesc { p, e, f, j })
    }

    /// Number of uniformizer classes `gcd(p^f − 1, e)`.
    pub fn classes(p: u64, e: u64, f: u64) -> u64 {
        gcd(p.pow(f as u32) - 1, e)
    }

    /// Order of the residue-field unit group, `p^f − 1`.
    pub fn unit_order(&self) -> u64 {
        self.p.pow(self.f as u32) - 1
    }

    /// Modulus `M = e(p^f − 1)` of the stored exponents.
    pub fn modulus(&self) -> u64 {
        self.e * self.unit_order()
    }

    /// Stored exponent at slot `n` of the `(r, s)` conjugate of `ζ^k π_j^n`.
    pub fn conjugate_exponent(&self, k: u64, n: u64, r: u64, s: u64) -> u64 {
        let m = self.modulus() as u128;
        let pr = pow_mod(self.p, r, self.modulus()) as u128;
        let base = (self.e as u128 * k as u128 + self.j as u128 * n as u128) % m;
        let twist = (n as u128 * s as u128 % m) * self.unit_order() as u128 % m;
        ((base * pr + twist) % m) as u64
    }
}

pub(crate) fn check_tame_prime(p: u64, e: u64) -> Result<(), OracleError> {
    if !is_prime(p) {
        return Err(SplittingError::NotPrime(p).into());
    }
    if e % p == 0 {
        return Err(SplittingError::WildInput { p, e }.into());
    }
    Ok(())
}

pub(crate) fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// `Σ_{n<N} a_n π_j^n` with `a_n = ζ^{k_n}` or zero, stored as exponents of
/// `ω_M` (multiples of `e`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeichExpansion {
    pub field: TameFieldDesc,
    pub slots: Vec<Slot>,
    pub start_slot: usize,
}

impl TeichExpansion {
    /// Builds from residue exponents `k_n` of `ζ = ω_{p^f−1}`.
    pub fn from_residues(field: TameFieldDesc, residues: &[Option<u64>]) -> Self {
        let q1 = field.unit_order();
        let slots: Vec<Slot> = residues
            .iter()
            .map(|a| a.map(|k| field.e * (k % q1)))
            .collect();
        let start_slot = slots
            .iter()
            .position(Option::is_some)
            .unwrap_or(slots.len());
        TeichExpansion {
            field,
            slots,
            start_slot,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The `(r, s)` conjugate re-embedded into `frame`.
    pub fn conjugate(&self, r: u64, s: u64, frame: &CommonFrame) -> CommonExpansion {
        let fd = &self.field;
        let step = (frame.e / fd.e) as usize;
        let scale = frame.m / fd.modulus();
        let mut slots = vec![None; self.len() * step];
        for (n, a) in self.slots.iter().enumerate() {
            if let Some(x) = a {
                let k = x / fd.e;
                slots[n * step] = Some(fd.conjugate_exponent(k, n as u64, r, s) * scale);
            }
        }
        CommonExpansion {
            e: frame.e,
            m: frame.m,
            slots,
        }
    }

    /// All `e·f` conjugates, ordered by `(r, s)`.
    pub fn conjugates(&self, frame: &CommonFrame) -> Vec<CommonExpansion> {
        let fd = &self.field;
        let mut out = Vec::with_capacity((fd.e * fd.f) as usize);
        for r in 0..fd.f {
            for s in 0..fd.e {
                out.push(self.conjugate(r, s, frame));
            }
        }
        out
    }
}

/// The common uniformizer `p^{1/E}` and exponent modulus `M_common`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommonFrame {
    pub p: u64,
    pub e: u64,
    pub m: u64,
}

impl CommonFrame {
    pub fn of_fields(fields: &[TameFieldDesc]) -> Self {
        let p = fields.first().map_or(2, |f| f.p);
        let e = fields.iter().fold(1, |acc, f| lcm(acc, f.e));
        let m = fields.iter().fold(1, |acc, f| lcm(acc, f.modulus()));
        CommonFrame { p, e, m }
    }
}

/// Slots over `p^{1/E}` with coefficients `ω_{M_common}^k` or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommonExpansion {
    pub e: u64,
    pub m: u64,
    pub slots: Vec<Slot>,
}

impl CommonExpansion {
    pub fn truncated(&self, len: usize) -> Self {
        CommonExpansion {
            e: self.e,
            m: self.m,
            slots: self.slots[..len.min(self.slots.len())].to_vec(),
        }
    }
}

/// `v_p(x − y)`: first differing slot over `E`; `None` if all stored slots agree.
pub fn pair_valuation(
    x: &CommonExpansion,
    y: &CommonExpansion,
) -> Result<Option<Exp>, OracleError> {
    if x.slots.len() != y.slots.len() {
        return Err(OracleError::LengthMismatch(x.slots.len(), y.slots.len()));
    }
    Ok(x.slots
        .iter()
        .zip(&y.slots)
        .position(|(a, b)| a != b)
        .map(|n| Exp::new(n as i64, x.e as i64)))
}

/// `v_p(Δ)` summed over ordered pairs of roots; `None` if any pair is unresolved.
pub fn disc_valuation(roots: &[CommonExpansion]) -> Result<Option<Exp>, OracleError> {
    let mut total = Exp::from_integer(0);
    for (a, x) in roots.iter().enumerate() {
        for y in &roots[a + 1..] {
            match pair_valuation(x, y)? {
                Some(v) => total += v * 2,
                None => return Ok(None),
            }
        }
    }
    Ok(Some(total))
}

/// All roots of the product of minimal polynomials of the components,
/// re-embedded in one frame and truncated to the common known length.
pub fn tuple_roots(components: &[TeichExpansion]) -> Vec<CommonExpansion> {
    let fields: Vec<TameFieldDesc> = components.iter().map(|c| c.field).collect();
    let frame = CommonFrame::of_fields(&fields);
    let len = components
        .iter()
        .map(|c| c.len() * (frame.e / c.field.e) as usize)
        .min()
        .unwrap_or(0);
    components
        .iter()
        .flat_map(|c| c.conjugates(&frame))
        .map(|x| x.truncated(len))
        .collect()
}

/// Number of distinct conjugates among the stored slots.
pub fn distinct_conjugates(x: &TeichExpansion) -> usize {
    let frame = CommonFrame::of_fields(&[x.field]);
    let mut cs = x.conjugates(&frame);
    cs.sort_by(|a, b| a.slots.cmp(&b.slots));
    cs.dedup();
    cs.len()
}
