use thiserror::Error;

use crate::modgroup::GroupElement;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    Determinant { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("{element} is not in {group}")]
    NotInGroup { element: GroupElement, group: String },

    #[error("cannot raise zero to a real power")]
    ZeroPower,

    #[error("consistency factor for {m1} * {m2} has modulus {modulus}, expected 1")]
    BranchModulus { m1: GroupElement, m2: GroupElement, modulus: f64 },

    #[error("consistency factor for {m1} * {m2} depends on z (difference {difference:e})")]
    BranchDependence { m1: GroupElement, m2: GroupElement, difference: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expansion is not in the cusp class: index {index} has m + kappa = {value}")]
    NotCuspForm { index: i64, value: f64 },

    #[error("evaluation point {z} lies below the validity height {height}")]
    BelowValidityHeight { z: String, height: f64 },

    #[error("polynomial fit failed validation: residual {residual:e} exceeds {limit:e}")]
    FitValidation { residual: f64, limit: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    #[error("cocycle value at the translation is {norm:e}, expected 0")]
    NonzeroTranslationValue { norm: f64 },

    #[error("Eisenstein denominator {value:e} is too small relative to {scale:e} at z = {z}")]
    NearZeroDenominator { value: f64, scale: f64, z: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
