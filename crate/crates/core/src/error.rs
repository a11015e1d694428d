use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants fall into two groups: input/shape problems (bad configuration or
/// data that never should have reached the numerics) and numerical guards
/// (conditioning or degeneracy detected while computing). The CLI maps the
/// first group to exit code 2 and the second to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input shape mismatch: {0}")]
    Shape(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("value outside function domain: {0}")]
    Domain(String),

    #[error("evaluation point {re}+{im}i is not interior to the domain")]
    Evaluation { re: f64, im: f64 },

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("chain rejected at stage {stage}: {reason}")]
    ChainRejected { stage: usize, reason: String },

    #[error("degenerate constraint at stage {stage}: representer norm {norm:e}")]
    DegenerateConstraint { stage: usize, norm: f64 },

    #[error("truncation too aggressive: Gram condition number {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by a numerical guard rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::DegenerateConstraint { .. }
            | Error::IllConditioned { .. }
            | Error::Truncation(_) => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
