//! Constructive witnesses for prescribed digit-sum ratios `s_q(f(u)) / s_q(u)`.
//!
//! Given a base `q` and a positive rational `r`, [`solver::witness`] builds an
//! integer `u` with `s_q(u^2) / s_q(u) = r` exactly, and
//! [`fracpow::witness_frac`] does the same for `floor(u^{h/m})`. Every witness
//! is re-verified by [`oracle::verify_witness`] before it is returned.

pub mod error;
pub mod fracpow;
pub mod oracle;
pub mod patterns;
pub mod radix;
pub mod ratio;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use fracpow::{
    floor_pow_rational, floor_pow_real, integer_root, liminf_demo, limsup_demo, witness_frac,
    DemoMode, DemoPoint, FracParams, RefinableReal,
};
pub use oracle::{melfi_count, scan, stolarsky_check, verify_witness, LogBase, RatioTable};
pub use patterns::{calibrate, CalibrationRecord, Constants};
pub use radix::{digit_sum, expand, from_pattern, DigitString, Natural, Run, RunLengthPattern};
pub use ratio::RatioTarget;
pub use report::{ConstructionTrace, Exponent, ReportJson, Route, WitnessReport};
pub use solver::{witness, witness_base2, witness_lt1, witness_mid};
