use thiserror::Error;

/// Errors raised by the hysteresis model, the Riemann solver and the front tracker.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("incompatible initial state: u(0) = {u} with z = {z} violates {violated} for thresholds ({rho1}, {rho2})")]
    IncompatibleInitialState {
        u: f64,
        z: i8,
        rho1: f64,
        rho2: f64,
        violated: &'static str,
    },
    #[error("invalid threshold: rho1 = {rho1} must be below rho2 = {rho2}")]
    InvalidThreshold { rho1: f64, rho2: f64 },
    #[error("invalid triangle half-width {0}")]
    InvalidTriangle(f64),
    #[error("value {value} lies outside the Preisach triangle of half-width {a}")]
    OutOfTriangle { value: f64, a: f64 },
    #[error("curves live on different triangles ({0} vs {1})")]
    TriangleMismatch(f64, f64),
    #[error("invalid memory curve: {0}")]
    InvalidCurve(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("incompatible data: {0}")]
    IncompatibleData(String),
    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("no jump: both u and w are continuous")]
    NoJump,
    #[error("degenerate front: du + dw = 0 with du = {du}")]
    DegenerateFront { du: f64 },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("event cap of {0} exceeded")]
    EventOverflow(usize),
    #[error("unbounded support: tails carry u + w = {left} and {right}")]
    UnboundedSupport { left: f64, right: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
