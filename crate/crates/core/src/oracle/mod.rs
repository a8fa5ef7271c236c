//! Independent verification on truncated Teichmüller expansions over `Q_p`:
//! exact enumeration and sampling of the measure coefficients, conjugate and
//! orbit counts, and discriminant parity.

pub mod counting;
pub mod enumerate;
pub mod report;
pub mod teich;

pub use counting::{
    brute_force_orbit_count, check_index_parity, count_orbit_choices, orbit_choices_closed_form,
    ParityReport,
};
pub use enumerate::{enumerate_a_exact, monte_carlo_a, ExactMasses, McEstimate, DEFAULT_GUARD};
pub use report::{
    compare_exact, compare_monte_carlo, engine_coefficients, CompareError, OracleRecord,
};
pub use teich::{
    disc_valuation, distinct_conjugates, pair_valuation, tuple_roots, CommonExpansion, CommonFrame,
    Slot, TameFieldDesc, TeichExpansion,
};
