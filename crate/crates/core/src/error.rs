use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Weyl model: {0}")]
    InvalidModel(String),

    #[error("kernel dimension {kernel_dim} exceeds the stored length {len}")]
    InconsistentKernel { kernel_dim: usize, len: usize },

    #[error("invalid eigenvalue sequence: {0}")]
    InvalidSequence(String),

    #[error("a growth certificate is required for {0}")]
    MissingGrowth(&'static str),

    #[error("derivative of order {requested} exceeds the supported order {supported}")]
    UnsupportedOrder { requested: usize, supported: usize },

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("non-finite value in {what} at abscissa {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error("mode {mode:?} is resonant at frequency {freq}: divisor {divisor:e}")]
    Resonance {
        mode: Option<usize>,
        freq: i64,
        divisor: f64,
    },

    #[error("exponent {exponent:.3} overflows double precision even after rescaling")]
    Overflow { exponent: f64 },

    #[error("precision of {available} digits is insufficient; {required} digits required")]
    Precision { required: usize, available: usize },

    #[error("quadrature did not converge within {panels} panels (relative change {change:e})")]
    NoConvergence { panels: usize, change: f64 },

    #[error("{} mode(s) failed: {}", failures.len(), render_failures(failures))]
    ModeFailures { failures: Vec<(usize, String)> },

    #[error("verification failed: check {check} at mode {mode}: {quantity}")]
    VerificationFailed {
        check: &'static str,
        mode: usize,
        quantity: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn render_failures(failures: &[(usize, String)]) -> String {
    failures
        .iter()
        .map(|(j, msg)| format!("j={j}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ")
}
