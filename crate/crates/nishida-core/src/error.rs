//! Error type shared by every module of the engine.
//!
//! All arithmetic here is exact over F2, so there are no tolerance or
//! rounding failures; errors are structural (mismatched alphabets, missing
//! table entries, precision exhausted, and so on).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("operands live over different alphabets")]
    AlphabetMismatch,

    #[error("variable {var} is not invertible; exponent {exp} rejected")]
    NegativeExponent { var: String, exp: i32 },

    #[error("exponent {exp} of {var} fell below the Laurent floor {floor}")]
    LaurentBound { var: String, exp: i32, floor: i32 },

    #[error("duplicate variable name {0}")]
    DuplicateVariable(String),

    #[error("invertible variable {0} must have grade 0")]
    InvertibleGrade(String),

    #[error("at most one invertible variable is allowed in a base alphabet")]
    TooManyInvertible,

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("series caps differ: {left} vs {right}")]
    CapMismatch { left: u32, right: u32 },

    #[error("inner series has a nonzero constant term")]
    ConstantTerm,

    #[error("leading coefficient is not an invertible monomial")]
    NonInvertibleLeading,

    #[error("series is not univariate in the expected variable")]
    NotUnivariate,

    #[error("homomorphism has no image for variable {0}")]
    MissingImage(String),

    #[error("image of invertible variable {0} must be an invertible monomial")]
    BadInvertibleImage(String),

    #[error("exponent list must be strictly increasing and nonempty")]
    BadExponentList,

    #[error("invariant quadratic must have x-order exactly 1 with a t-monomial lead")]
    BadQuadratic,

    #[error("no table entry for {0}; operation not registered on this carrier")]
    MissingTableEntry(String),

    #[error("requested precision {needed} exceeds available {available} for {what}")]
    Precision {
        what: String,
        needed: u32,
        available: u32,
    },

    #[error("element of bidegree ({degree},{weight}) is outside the computed range")]
    OutOfRange { degree: u32, weight: u32 },

    #[error("element does not lie in the recorded span: {0}")]
    NotInSpan(String),

    #[error("cap {cap} exceeds the memory budget (max {max})")]
    CapTooLarge { cap: u32, max: u32 },

    #[error("manifold descriptor must be finite-dimensional here")]
    InfiniteManifold,

    #[error("no bordism class in the model matches the requested numbers")]
    NoModelClass,

    #[error("{0}")]
    Unsupported(String),
}
