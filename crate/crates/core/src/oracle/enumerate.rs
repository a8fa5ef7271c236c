//! Exact enumeration and Monte Carlo estimation of the measure coefficients
//! `a(σ, 1, 1, c, {b_i})` on truncated Teichmüller expansions.
//!
//! Slots are processed in order of the common uniformizer `p^{1/E}`. A branch
//! stops as soon as every pair of roots is separated (its mass is then the
//! absolute measure of the cylinder fixed so far) or as soon as `v(Δ)` must
//! exceed `c_max`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::teich::{check_tame_prime, CommonFrame, TameFieldDesc};
use crate::error::OracleError;
use crate::splitting::SplittingType;
use crate::symbolic::{Exp, Rat};

/// Default guard on the number of coefficient patterns.
pub const DEFAULT_GUARD: u128 = 1 << 40;
const MC_CHUNK: u64 = 4096;

/// Exact masses per discriminant valuation, plus the mass beyond `c_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMasses {
    pub masses: BTreeMap<Exp, Rat>,
    pub overflow: Rat,
}

impl ExactMasses {
    pub fn get(&self, c: Exp) -> Rat {
        self.masses.get(&c).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total(&self) -> Rat {
        self.masses
            .values()
            .fold(self.overflow.clone(), |a, b| a + b)
    }
}

/// Monte Carlo estimates with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub samples: u64,
    pub estimates: BTreeMap<Exp, (f64, f64)>,
    pub overflow: f64,
}

impl McEstimate {
    pub fn get(&self, c: Exp) -> (f64, f64) {
        self.estimates.get(&c).copied().unwrap_or((0.0, 0.0))
    }
}

struct Comp {
    field: TameFieldDesc,
    step: usize,
    b: usize,
    scale: u64,
}

/// One choice of uniformizer classes, laid out over the common positions.
struct Layout {
    comps: Vec<Comp>,
    /// `(component, r, s)` for every root.
    roots: Vec<(usize, u64, u64)>,
    e: u64,
    positions: usize,
    c_max_units: u64,
}

impl Layout {
    fn new(fields: Vec<TameFieldDesc>, b: &[u64], c_max: u64) -> Self {
        let frame = CommonFrame::of_fields(&fields);
        let positions = (frame.e * c_max / 2 + 1) as usize;
        let comps: Vec<Comp> = fields
            .iter()
            .zip(b)
            .map(|(fd, &bi)| Comp {
                field: *fd,
                step: (frame.e / fd.e) as usize,
                b: bi as usize,
                scale: frame.m / fd.modulus(),
            })
            .collect();
        let mut roots = Vec::new();
        for (i, c) in comps.iter().enumerate() {
            for r in 0..c.field.f {
                for s in 0..c.field.e {
                    roots.push((i, r, s));
                }
            }
        }
        Layout {
            comps,
            roots,
            e: frame.e,
            positions,
            c_max_units: frame.e * c_max,
        }
    }

    /// Components with a slot at common position `pos`, with that slot index.
    fn active(&self, pos: usize) -> Vec<(usize, u64)> {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| pos % c.step == 0)
            .map(|(i, c)| (i, (pos / c.step) as u64))
            .collect()
    }

    /// Number of choices at slot `n` of component `i` (zero first).
    fn choices(&self, i: usize, n: u64) -> u64 {
        let c = &self.comps[i];
        if (n as usize) < c.b {
            1
        } else {
            c.field.unit_order() + 1
        }
    }

    /// Root coefficients at one position given the active slot values.
    fn root_coefs(&self, active: &[(usize, u64)], values: &[Option<u64>]) -> Vec<Option<u64>> {
        self.roots
            .iter()
            .map(|&(i, r, s)| {
                let at = active.iter().position(|&(a, _)| a == i)?;
                let k = values[at]?;
                let c = &self.comps[i];
                Some(c.field.conjugate_exponent(k, active[at].1, r, s) * c.scale)
            })
            .collect()
    }

    fn mass_step(&self, active: &[(usize, u64)]) -> u64 {
        active.iter().map(|&(i, _)| self.comps[i].field.f).sum()
    }

    fn all_pairs(&self) -> Vec<(u8, u8)> {
        let d = self.roots.len();
        (0..d)
            .flat_map(|a| (a + 1..d).map(move |b| (a as u8, b as u8)))
            .collect()
    }

    fn patterns(&self) -> u128 {
        self.comps
            .iter()
            .map(|c| {
                let slots = self.positions.div_ceil(c.step);
                let free = slots.saturating_sub(c.b) as u32;
                (c.field.p as u128).saturating_pow(c.field.f as u32 * free)
            })
            .fold(1u128, |a, b| a.saturating_mul(b))
    }
}

/// Outcome of a branch: resolved with `v(Δ)` in units of `1/E`, or beyond `c_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Outcome {
    Resolved(u64),
    Overflow,
}

enum Step {
    Done(Outcome),
    Continue(Vec<(u8, u8)>, u64),
}

fn advance(
    layout: &Layout,
    pos: usize,
    coefs: &[Option<u64>],
    pending: &[(u8, u8)],
    acc: u64,
) -> Step {
    let mut left = Vec::with_capacity(pending.len());
    let mut acc = acc;
    for &(a, b) in pending {
        if coefs[a as usize] == coefs[b as usize] {
            left.push((a, b));
        } else {
            acc += 2 * pos as u64;
        }
    }
    if acc > layout.c_max_units {
        return Step::Done(Outcome::Overflow);
    }
    if left.is_empty() {
        return Step::Done(Outcome::Resolved(acc));
    }
    let bound = acc + 2 * (pos as u64 + 1) * left.len() as u64;
    if pos + 1 == layout.positions || bound > layout.c_max_units {
        return Step::Done(Outcome::Overflow);
    }
    Step::Continue(left, acc)
}

type Tally = HashMap<(Outcome, u64), u64>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Every joint assignment of the active slots, in odometer order.
fn joint_assignments(layout: &Layout, active: &[(usize, u64)]) -> Vec<Vec<Option<u64>>> {
    let radices: Vec<u64> = active.iter().map(|&(i, n)| layout.choices(i, n)).collect();
    let total: u64 = radices.iter().product();
    (0..total)
        .map(|mut idx| {
            radices
                .iter()
                .map(|&r| {
                    let d = idx % r;
                    idx /= r;
                    d.checked_sub(1)
                })
                .collect()
        })
        .collect()
}

fn dfs(layout: &Layout, pos: usize, pending: &[(u8, u8)], acc: u64, mass: u64, tally: &mut Tally) {
    let active = layout.active(pos);
    let mass = mass + layout.mass_step(&active);
    for values in joint_assignments(layout, &active) {
        let coefs = layout.root_coefs(&active, &values);
        match advance(layout, pos, &coefs, pending, acc) {
            Step::Done(o) => *tally.entry((o, mass)).or_insert(0) += 1,
            Step::Continue(left, acc2) => dfs(layout, pos + 1, &left, acc2, mass, tally),
        }
    }
}

fn tally_root(layout: &Layout) -> Tally {
    let pending = layout.all_pairs();
    if pending.is_empty() {
        // A lone root: only the cylinder `m^b` is constrained.
        let mass = layout.comps.iter().map(|c| c.field.f * c.b as u64).sum();
        let mut t = Tally::new();
        t.insert((Outcome::Resolved(0), mass), 1);
        return t;
    }
    let active = layout.active(0);
    let mass = layout.mass_step(&active);
    joint_assignments(layout, &active)
        .into_par_iter()
        .map(|values| {
            let mut t = Tally::new();
            let coefs = layout.root_coefs(&active, &values);
            match advance(layout, 0, &coefs, &pending, 0) {
                Step::Done(o) => {
                    t.insert((o, mass), 1);
                }
                Step::Continue(left, acc) => dfs(layout, 1, &left, acc, mass, &mut t),
            }
            t
        })
        .reduce(Tally::new, merge)
}

/// Every tuple of uniformizer classes `(j_1, …, j_m)`.
fn class_tuples(sigma: &SplittingType, p: u64) -> Vec<Vec<TameFieldDesc>> {
    let mut out: Vec<Vec<TameFieldDesc>> = vec![Vec::new()];
    for &(e, f) in &sigma.components {
        let g = TameFieldDesc::classes(p, e, f);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..g).map(move |j| {
                    let mut v = prefix.clone();
                    v.push(TameFieldDesc { p, e, f, j });
                    v
                })
            })
            .collect();
    }
    out
}

fn validate(sigma: &SplittingType, b: &[u64], p: u64) -> Result<(), OracleError> {
    if sigma.e_base != 1 || sigma.f_base != 1 {
        return Err(OracleError::UnsupportedBase);
    }
    if b.len() != sigma.m() {
        return Err(OracleError::LengthMismatch(b.len(), sigma.m()));
    }
    for &(e, _) in &sigma.components {
        check_tame_prime(p, e)?;
    }
    Ok(())
}

fn p_pow_inv(p: u64, k: u64) -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(p).pow(k as u32))
}

/// Exact `a(σ, 1, 1, c, {b_i})` at the prime `p` for every `c ≤ c_max`,
/// averaged over the uniformizer classes of every component.
pub fn enumerate_a_exact(
    sigma: &SplittingType,
    b: &[u64],
    c_max: u64,
    p: u64,
    guard: u128,
) -> Result<ExactMasses, OracleError> {
    validate(sigma, b, p)?;
    let tuples = class_tuples(sigma, p);
    let layouts: Vec<Layout> = tuples
        .into_iter()
        .map(|t| Layout::new(t, b, c_max))
        .collect();
    let patterns = layouts[0].patterns().saturating_mul(layouts.len() as u128);
    if patterns > guard {
        return Err(OracleError::TooLarge {
            patterns,
            limit: guard,
        });
    }
    let e = layouts[0].e;
    let classes = layouts.len() as i64;
    let mut masses: BTreeMap<Exp, Rat> = BTreeMap::new();
    let mut overflow = Rat::zero();
    for layout in &layouts {
        for ((o, mass), count) in tally_root(layout) {
            let w = p_pow_inv(p, mass) * Rat::from_integer(BigInt::from(count));
            match o {
                Outcome::Resolved(units) => {
                    *masses
                        .entry(Exp::new(units as i64, e as i64))
                        .or_insert_with(Rat::zero) += w
                }
                Outcome::Overflow => overflow += w,
            }
        }
    }
    let avg = Rat::from_integer(BigInt::from(classes));
    for v in masses.values_mut() {
        *v = &*v / &avg;
    }
    Ok(ExactMasses {
        masses,
        overflow: overflow / avg,
    })
}

/// Outcome of one uniformly sampled pattern.
fn sample_outcome(layout: &Layout, rng: &mut ChaCha8Rng) -> Outcome {
    let mut pending = layout.all_pairs();
    if pending.is_empty() {
        return Outcome::Resolved(0);
    }
    let mut acc = 0;
    for pos in 0..layout.positions {
        let active = layout.active(pos);
        let values: Vec<Option<u64>> = active
            .iter()
            .map(|&(i, n)| {
                let c = &layout.comps[i];
                if (n as usize) < c.b {
                    return None;
                }
                // Uniform over the p^f Teichmüller representatives.
                let d = rng.gen_range(0..=c.field.unit_order());
                d.checked_sub(1)
            })
            .collect();
        let coefs = layout.root_coefs(&active, &values);
        match advance(layout, pos, &coefs, &pending, acc) {
            Step::Done(o) => return o,
            Step::Continue(left, acc2) => {
                pending = left;
                acc = acc2;
            }
        }
    }
    Outcome::Overflow
}

/// Monte Carlo estimate of the same masses, deterministic for a fixed seed.
pub fn monte_carlo_a(
    sigma: &SplittingType,
    b: &[u64],
    c_max: u64,
    p: u64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    validate(sigma, b, p)?;
    assert!(samples > 0);
    let layouts: Vec<Layout> = class_tuples(sigma, p)
        .into_iter()
        .map(|t| Layout::new(t, b, c_max))
        .collect();
    let e = layouts[0].e;
    let chunks = samples.div_ceil(MC_CHUNK);
    let counts: HashMap<Outcome, u64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut local: HashMap<Outcome, u64> = HashMap::new();
            for _ in 0..n {
                let layout = &layouts[rng.gen_range(0..layouts.len())];
                *local.entry(sample_outcome(layout, &mut rng)).or_insert(0) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    // Patterns are drawn inside ∏ m^{b_i}; rescale to absolute measure.
    let weight: u64 = sigma
        .components
        .iter()
        .zip(b)
        .map(|(&(_, f), &bi)| f * bi)
        .sum();
    let scale = p_pow_inv(p, weight).to_f64().unwrap_or(0.0);
    let n = samples as f64;
    let estimate = |k: u64| {
        let phi = k as f64 / n;
        (scale * phi, scale * (phi * (1.0 - phi) / n).sqrt())
    };
    let mut estimates = BTreeMap::new();
    let mut overflow = 0.0;
    for (o, k) in counts {
        match o {
            Outcome::Resolved(units) => {
                estimates.insert(Exp::new(units as i64, e as i64), estimate(k));
            }
            Outcome::Overflow => overflow = estimate(k).0,
        }
    }
    Ok(McEstimate {
        samples,
        estimates,
        overflow,
    })
}
