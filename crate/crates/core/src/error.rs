use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix order {0} exceeds the supported maximum of 8")]
    OrderTooLarge(usize),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    EigenNonConvergence { sweeps: usize, residual: f64 },
    #[error("penalty parameter must be positive, got {0}")]
    NonPositivePenalty(f64),
    #[error("multiplier lies outside the family's multiplier cone")]
    MultiplierOutsideCone,
    #[error("family {family} does not support {block} blocks")]
    UnsupportedBlock { family: String, block: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not differentiable at this point: {0}")]
    NonDifferentiable(String),
    #[error("non-finite arithmetic: {0}")]
    NonFinite(String),
    #[error("unknown catalog problem '{0}'")]
    UnknownProblem(String),
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("unknown construction '{0}'")]
    UnknownConstruction(String),
    #[error("missing derivative: {0}")]
    MissingDerivative(String),
    #[error("objective is nonsmooth here: {0}")]
    NonsmoothObjective(String),
    #[error("incompatible cone: {0}")]
    IncompatibleCone(String),
    #[error("starting point is outside the domain: {0}")]
    OutsideDomain(String),
    #[error("dimension {0} too large for exhaustive enumeration")]
    DimensionTooLarge(usize),
    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
