use alloc::string::String;

/// Everything that can go wrong inside the core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("signature mismatch: n = {left} vs n = {right}")]
    SignatureMismatch { left: u8, right: u8 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported algebra dimension n = {0} (must be <= {max})", max = crate::algebra::MAX_N)]
    UnsupportedDimension(u8),
    #[error("element is not in the quadratic cone (defect {defect:e})")]
    NotInCone { defect: f64 },
    #[error("element is not in the imaginary sphere")]
    NotInSphere,
    #[error("zero element has no inverse or argument")]
    Zero,
    #[error("q is in (or too close to) the spherical spectrum: min singular value {min_sv:e}")]
    SingularDelta { min_sv: f64 },
    #[error("singular linear system: min singular value {min_sv:e}")]
    SingularSystem { min_sv: f64 },
    #[error("point {re} + {im}i is outside the stem domain")]
    OutsideDomain { re: f64, im: f64 },
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(&'static str),
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },
    #[error("extrapolation grid invalid: {0}")]
    BadGrid(&'static str),
    #[error("eigensolver failed")]
    Eigen,
    #[error("inputs do not commute: |pq - qp| = {0:e}")]
    NotCommuting(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
