use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("invalid Jordan data: {0}")]
    InvalidJordanData(String),

    #[error("block index {index} out of range for {blocks} blocks")]
    FocusOutOfRange { index: usize, blocks: usize },

    #[error("{0} is not a pole of the rational function")]
    NotAPole(String),

    #[error("denominator has a root that is not rational")]
    IrrationalPole,

    #[error("denominator of a rational function is zero")]
    ZeroDenominator,

    #[error("jacobian determinant is zero")]
    ZeroJacobian,

    #[error("certificate identity fails in row {row}: u_{row}^{alpha} != sum_i b_ij X_i")]
    CertificateFailed { row: usize, alpha: u32 },

    #[error("focus block has size 1; the fixed point is nondegenerate and has no certificate matrix")]
    NondegenerateFocus,

    #[error("index k = {k} outside 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },

    #[error("integrand depends on a coordinate other than u_2: {0}")]
    IntegrandNotReduced(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("truncation order {cap} is below the required minimum {min}")]
    TruncationTooLow { cap: u32, min: u32 },

    #[error("expected a polynomial in z alone, found symbol {0}")]
    NotUnivariate(String),

    #[error("polynomial is not divisible: {0}")]
    NotDivisible(String),

    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
}
