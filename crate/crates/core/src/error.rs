use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A problem-parameter precondition failed. `condition` names the violated
    /// hypothesis ("superlinearity", "weight bound", ...).
    #[error("invalid parameters ({condition}): {detail}")]
    InvalidParams {
        condition: &'static str,
        detail: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{quantity} vanishes at r = {r:e}; phase variables undefined")]
    VanishingQuantity { quantity: &'static str, r: f64 },

    #[error("series start failed to contract: remainder {remainder:e} above tolerance {tol:e} even at radius {radius:e}")]
    ContractionFailure { remainder: f64, tol: f64, radius: f64 },

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("non-finite value encountered at t = {0:e}")]
    NonFinite(f64),

    #[error("nonnegative integration produced {component} = {value:e} at r = {r:e}")]
    Negativity {
        component: &'static str,
        value: f64,
        r: f64,
    },

    #[error("no blow-up detected before r = {0:e}")]
    NoBlowup(f64),

    #[error("blow-up extrapolation did not converge: {0}")]
    NonConvergence(String),

    #[error("trajectory left the admissible region at t = {t:e}: {detail}")]
    RegionExit { t: f64, detail: String },

    #[error("Z changes sign along the boundary trajectory at t = {0:e}")]
    ZSignChange(f64),

    #[error("fit needs more range: {0}")]
    InsufficientRange(String),

    #[error("ambiguous origin classification; candidates: {0:?}")]
    AmbiguousClassification(Vec<String>),

    #[error("structure check failed: {0}")]
    StructureViolation(String),

    /// Failures of independent sub-computations, with their indices.
    #[error("{}", describe_failures(.0))]
    Batch(Vec<(usize, Error)>),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParams {
            condition,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams { .. } | Error::InvalidArgument(_) => 2,
            Error::StructureViolation(_)
            | Error::AmbiguousClassification(_)
            | Error::NonConvergence(_) => 4,
            Error::Batch(v) => v.first().map_or(3, |(_, e)| e.exit_code()),
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn describe_failures(v: &[(usize, Error)]) -> String {
    let list: Vec<String> = v.iter().map(|(i, e)| format!("#{i}: {e}")).collect();
    format!("{} of the batch failed: {}", v.len(), list.join("; "))
}
