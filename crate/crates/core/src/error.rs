use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature order {order} out of range 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("{func}: domain error: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: overflow: {detail}")]
    Overflow { func: &'static str, detail: String },

    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),

    #[error("unsupported modulation: {0}")]
    UnsupportedModulation(String),

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("combinatorial guard: {0}")]
    BlowupGuard(String),

    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),

    #[error("analytic path unsupported: {0}")]
    AnalyticPathUnsupported(String),

    #[error("cancellation blowup: raw density {raw:e} at x = {x}")]
    CancellationBlowup { x: f64, raw: f64 },

    #[error("Laguerre order V = {0} too small (need V >= 8)")]
    QuadratureTooSmall(usize),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("search budget {0} too small (need >= 10000)")]
    BudgetTooSmall(usize),

    #[error("window unresolvable: {0}")]
    WindowUnresolvable(String),

    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Precondition violations, as opposed to numerical failures during evaluation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Overflow { .. } | Error::NoConvergence(_) | Error::CancellationBlowup { .. }
        )
    }
}
