use thiserror::Error;

/// Errors raised by the worm-domain library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("beta = {0} is out of range: the worm condition needs beta > pi/2")]
    BetaOutOfRange(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grids do not match")]
    GridMismatch,
    #[error("mode {j} is outside the retained range |j| <= {nj}")]
    ModeOutOfGrid { j: i64, nj: usize },
    #[error("symbol magnitude {magnitude:e} exceeds 1e300 at xi = {xi}, j = {j}")]
    SymbolOverflow { xi: f64, j: i64, magnitude: f64 },
    #[error("symbol or its derivative is not finite at xi = {0}")]
    NonFinite(f64),
    #[error("weighted profile has not decayed at the edge of the frequency grid (edge/peak = {0:e})")]
    TailNotDecayed(f64),
    #[error("adaptive quadrature did not converge on [{a}, {b}] within depth {depth}")]
    QuadratureNoConvergence { a: f64, b: f64, depth: usize },
    #[error("eps = {0} must lie in (0, beta)")]
    EpsOutOfRange(f64),
    #[error("|Im delta| = {im} exceeds the decay guard {guard}")]
    DecayGuardViolated { im: f64, guard: f64 },
    #[error("compact box touches the boundary (geometric ratio {ratio} >= 1)")]
    BoxNotCompact { ratio: f64 },
    #[error("kernel series needs more than {0} modes")]
    TruncationBudgetExceeded(usize),
    #[error("point (y = {y}, s = {s}) is not interior")]
    NotInterior { y: f64, s: f64 },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("Paley-Wiener condition violated for mode {j} (edge/peak = {ratio:e})")]
    PwConditionViolated { j: i64, ratio: f64 },
    #[error("p = {0} must lie in (1, inf)")]
    POutOfRange(f64),
    #[error("weighted integrand does not decay at the edge of the support (value {0:e})")]
    WeightDivergence(f64),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
