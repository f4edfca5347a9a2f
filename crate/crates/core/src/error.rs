use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors surfaced by the numerics.
///
/// Every variant is a contract violation or a refusal to compute something
/// that cannot be certified; none are recoverable-by-retry conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed a documented precondition.
    InvalidParameter(&'static str),
    /// An exhaustive enumeration would visit more supports than the cap.
    EnumerationCapExceeded { required: u128, cap: u64 },
    /// The certified constants violate `delta + theta < 1`, so the bound
    /// being requested is undefined.
    A4Violated { delta: f64, theta: f64 },
    /// The linear program has no feasible point.
    LpInfeasible,
    /// The linear program objective is unbounded below.
    LpUnbounded,
    /// The simplex iteration limit was reached without convergence.
    LpIterationLimit,
    /// A prior-specific operation was invoked on the wrong prior kind.
    PriorKindMismatch,
    /// The supplied coefficient vector does not have the promised sparsity.
    SparsityMismatch { expected: usize, actual: usize },
    /// A small-ball probability of zero was supplied where the bound
    /// requires strictly positive prior mass near the truth.
    SmallBallZero,
    /// The derived exponent `eta` is nonpositive, so the sharp bound does
    /// not apply.
    EtaNonpositive { eta: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::EnumerationCapExceeded { required, cap } => write!(
                f,
                "enumeration of {required} supports exceeds cap {cap}; \
                 use a randomized lower bound instead"
            ),
            Error::A4Violated { delta, theta } => write!(
                f,
                "delta + theta = {} >= 1: the isometry assumption fails and \
                 the requested bound is undefined",
                delta + theta
            ),
            Error::LpInfeasible => write!(f, "linear program is infeasible"),
            Error::LpUnbounded => write!(f, "linear program is unbounded below"),
            Error::LpIterationLimit => write!(f, "simplex iteration limit reached"),
            Error::PriorKindMismatch => write!(f, "operation does not apply to this prior kind"),
            Error::SparsityMismatch { expected, actual } => write!(
                f,
                "coefficient vector has {actual} nonzeros, expected {expected}"
            ),
            Error::SmallBallZero => write!(
                f,
                "small-ball probability is zero: the prior assigns no mass near the truth"
            ),
            Error::EtaNonpositive { eta } => {
                write!(f, "derived exponent eta = {eta} <= 0: sharp bound inapplicable")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}
