//! Error taxonomy shared across the crate.
//!
//! Every fallible operation reports *why* it failed rather than returning
//! NaN/Inf; a successful result always carries finite components.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Dual division with |denominator value| below the representable floor.
    #[error("dual division by zero: |denominator value| = {denom:e} < 1e-300")]
    DivisionByZeroDual { denom: f64 },

    /// Elementary function evaluated outside its domain.
    #[error("domain error: {func}({value}) is undefined")]
    DomainError { func: &'static str, value: f64 },

    /// Value is inside the closure of the domain but a derivative is unbounded
    /// there (e.g. sqrt at 0, asin at ±1).
    #[error("derivative singularity: {func} has unbounded derivative at {value}")]
    DerivativeSingularity { func: &'static str, value: f64 },

    /// Vector norm too small to normalize (value-part norm ≤ 1e-12).
    #[error("degenerate vector: norm {norm:e} ≤ 1e-12, direction undefined")]
    DegenerateVector { norm: f64 },

    /// Rotation axis whose value part is not a unit vector within 1e-9.
    #[error("non-unit rotation axis: |axis| = {norm} deviates from 1 by more than 1e-9")]
    NonUnitAxis { norm: f64 },

    /// The requested link geometry admits no closed assembly at the reference
    /// input angle (the two solution circles do not intersect).
    #[error("assembly impossible: link circles do not intersect ({detail})")]
    AssemblyImpossible { detail: String },

    /// Closure discriminant negative: the input angle lies outside the
    /// mechanism's mobility range.
    #[error("no assembly at theta = {theta}: closure discriminant {disc:e} < 0")]
    NoAssembly { theta: f64, disc: f64 },

    /// Closure discriminant vanishes (dead point): the two output branches
    /// coincide and dφ/dθ is unbounded.
    #[error("branch singularity at theta = {theta}: closure discriminant {disc:e} ≈ 0 (dead point)")]
    BranchSingularity { theta: f64, disc: f64 },

    /// Newton iteration failed to reach |F| < 1e-13 within the cap.
    #[error("newton divergence: |F| = {residual:e} after {iterations} iterations")]
    NewtonDivergence { iterations: u32, residual: f64 },

    /// |∂F/∂φ| < 1e-12 — implicit derivatives undefined (dead point).
    #[error("singular jacobian: |dF/dphi| = {dfdphi:e} < 1e-12 at theta = {theta}")]
    SingularJacobian { theta: f64, dfdphi: f64 },

    /// (θ, φ) pair handed to the implicit-derivative routine does not satisfy
    /// the closure equation.
    #[error("point not on constraint: |F(theta, phi)| = {residual:e} > 1e-9")]
    NotOnConstraint { residual: f64 },

    /// A finite-difference stencil point could not be evaluated.
    #[error("evaluation failed at stencil point {at}: {source}")]
    EvaluationFailed {
        at: f64,
        #[source]
        source: Box<Error>,
    },

    /// Malformed run configuration or parameter file.
    #[error("config error: {0}")]
    ConfigError(String),
}
