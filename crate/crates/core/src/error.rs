use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate} with error {abs_error} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("outcome '{0}' has zero probability")]
    ImpossibleOutcome(char),

    #[error("configuration error: {0}")]
    Config(String),
}
