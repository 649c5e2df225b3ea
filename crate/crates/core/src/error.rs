//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("complex time within exclusion radius {radius} of a shape-function pole at {pole}")]
    PoleProximity { pole: String, radius: f64 },

    #[error("mixing angle undefined: both envelopes below floor at t = {t} and no one-sided limit")]
    DegenerateAngle { t: f64 },

    #[error("integration window too narrow: edge envelope {edge_value:.3e} exceeds floor {floor:.3e}")]
    WindowTooNarrow { edge_value: f64, floor: f64 },

    #[error("integrator step underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("amplitude vector not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("single-photon detuning |{delta}| too small for adiabatic elimination (need >= {minimum})")]
    DetuningTooSmall { delta: f64, minimum: f64 },

    #[error("eigensystem requires a Hermitian matrix; max asymmetry {asymmetry:.3e}")]
    NonHermitianInput { asymmetry: f64 },

    #[error("Newton iteration failed to converge from seed {seed}")]
    NoConvergence { seed: String },

    #[error("search box contains (or approaches) a shape-function pole at {pole}")]
    BoxContainsPole { pole: String },

    #[error("integration contour from {from} to {to} blocked by a pole; reroute failed")]
    ContourBlocked { from: String, to: String },

    #[error("quasienergy splitting vanishes on the real axis (min |eps| = {min_eps:.3e}); DDP condition (i) violated")]
    RealAxisZero { min_eps: f64 },

    #[error("transition point at {t0} is not a simple zero (multiplicity {multiplicity})")]
    HigherOrderZero { t0: String, multiplicity: usize },

    #[error("no breakdown of the exponential infidelity decline detected on the supplied area grid")]
    NoBreakdownDetected,

    #[error("configuration error: {0}")]
    Validation(String),

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
