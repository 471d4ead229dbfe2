//! Hotelling location games on a line segment: the classic game, a variant
//! where the line may be cut, and a variant where servers may crash.
//!
//! Payoffs, equilibrium checks and constructors are generic over [`Scalar`],
//! so the same code runs on `f64` and on exact rationals.

// `!(a < b)` is how NaN inputs get rejected alongside out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod line_failure;
pub mod model;
pub mod montecarlo;
pub mod player_failure;
pub mod scalar;
pub mod scan;

pub use dynamics::{
    best_response, br_dynamics, candidate_set, grid_best_response_oracle, is_nash,
    DynamicsOptions, DynamicsTrace, GameVariant, NashReport, Outcome, Schedule,
};
pub use error::{Error, Result};
pub use line_failure::{
    lf_appendix_tables, lf_best_hinterland, lf_best_right_hinterland, lf_condition_check,
    lf_cut_scenario, lf_equilibrium, lf_equiv_segment, lf_family_interval, lf_payoffs,
    lf_payoffs_montecarlo, lf_payoffs_quadrature, ScenarioTable,
};
pub use model::{
    classic_equilibrium, classic_markets, classic_payoffs, el_check, validate, ConditionReport,
    ConfigFile, Configuration, Markets, Segment,
};
pub use montecarlo::Estimate;
pub use player_failure::{
    pf_pairing_gain, pf_pairing_gain_printed, pf_payoffs, pf_payoffs_exact,
    pf_payoffs_montecarlo, pf_three_server_gap,
};
pub use scalar::{Real, Scalar};
pub use scan::{grid_scan, pf_nonexistence_probe, ProbeReport, ScanReport};

/// Exact rational scalar used by the exact-arithmetic tests and oracles.
pub type Rational = num_rational::Ratio<i128>;

/// Floating-point instantiations used by the command-line front end.
pub type Config = Configuration<f64>;
pub type ExactConfig = Configuration<Rational>;
pub type Variant = GameVariant<f64>;
