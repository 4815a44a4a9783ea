use thiserror::Error;

/// Failure modes of the numerical kernels.
///
/// Messages follow the vocabulary used in reports and CLI diagnostics, so
/// callers can match on the variant or print it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient terms: truncation bound {bound:e} exceeds 1e-14 of |result| = {magnitude:e}")]
    InsufficientTerms { bound: f64, magnitude: f64 },

    #[error("out of oracle range: |z| = {0} > 40")]
    OutOfOracleRange(f64),

    #[error("order {order} exceeds configured maximum {max}")]
    OrderTooLarge { order: u32, max: u32 },

    #[error("normalization underflow")]
    NormalizationUnderflow,

    #[error("overflow")]
    Overflow,

    #[error("near pole")]
    NearPole,

    #[error("outside scaling wedge: |Im lambda| must be < {theta0} * Re lambda")]
    OutsideScalingWedge { theta0: f64 },

    #[error("branch ambiguity: radicand on the closed negative real axis")]
    BranchAmbiguity,

    #[error("glancing singularity: square-root radicand vanishes")]
    GlancingSingularity,

    #[error("symbol undefined at zero frequency")]
    ZeroFrequency,

    #[error("not hyperbolic: r0 = {r0} >= n0 = {n0}")]
    NotHyperbolic { r0: f64, n0: f64 },

    #[error("zero on contour")]
    ZeroOnContour,

    #[error("scale fault")]
    ScaleFault,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("case refusal: {0}")]
    CaseRefusal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
