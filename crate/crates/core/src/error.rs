use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Ambient dimensions of two operands disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Fiber (matrix) sizes of two operands disagree.
    FiberMismatch { expected: usize, found: usize },
    /// An operation received a form of the wrong degree.
    DegreeMismatch { expected: usize, found: usize },
    /// Operator experiments only exist for `n = 1` and `n = 3`.
    UnsupportedDimension(usize),
    /// Structural problem with an input form or connection.
    InvalidInput(String),
    /// Fourier support of the potential does not fit inside the cutoff.
    SupportExceedsCutoff { radius: i64, cutoff: usize },
    /// An eigensolve missed its residual or orthogonality certificate.
    EigenCertificate { block: String, residual: f64, orthogonality: f64 },
    /// Tridiagonal QL iteration did not converge.
    NoConvergence { block: String },
    /// A quantity that must be real came out with a significant imaginary part.
    ImaginaryResidue { what: &'static str, value: f64, residue: f64 },
    /// A path endpoint has an eigenvalue inside the declared gap.
    EndpointZeroMode { s: f64, lambda: f64, gap: f64 },
    /// Branch matching stayed ambiguous after the refinement cap.
    AmbiguousMatching { s_left: f64, s_right: f64, block: String, margin: f64 },
    /// Trusted-window eigenvalues still move when the cutoff grows.
    CutoffUnstable { cutoff: usize, drift: f64 },
    /// A requested eigenvalue window exceeds the trusted window.
    WindowExceedsTrusted { requested: f64, trusted: f64 },
    /// Heat time too small for the eigenvalue window to certify truncation.
    TimeTooSmall { t: f64, min_t: f64 },
    /// A stated precondition does not hold.
    Precondition(String),
}

impl Error {
    /// Numerical-certificate failures (residuals, cutoff, truncation) as opposed
    /// to contract or configuration errors.
    pub fn is_certificate(&self) -> bool {
        matches!(
            self,
            Error::EigenCertificate { .. }
                | Error::NoConvergence { .. }
                | Error::ImaginaryResidue { .. }
                | Error::AmbiguousMatching { .. }
                | Error::CutoffUnstable { .. }
                | Error::WindowExceedsTrusted { .. }
                | Error::TimeTooSmall { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::FiberMismatch { expected, found } => {
                write!(f, "fiber size mismatch: expected {expected}, found {found}")
            }
            Error::DegreeMismatch { expected, found } => {
                write!(f, "form degree mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedDimension(n) => {
                write!(f, "operator assembly supports n = 1 or 3, got n = {n}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::SupportExceedsCutoff { radius, cutoff } => write!(
                f,
                "Fourier support radius {radius} exceeds cutoff {cutoff} (would alias)"
            ),
            Error::EigenCertificate { block, residual, orthogonality } => write!(
                f,
                "eigensolve certificate failed on block {block}: residual {residual:.3e}, orthogonality {orthogonality:.3e}"
            ),
            Error::NoConvergence { block } => {
                write!(f, "tridiagonal QL iteration did not converge on block {block}")
            }
            Error::ImaginaryResidue { what, value, residue } => write!(
                f,
                "{what}: imaginary residue {residue:.3e} too large (real part {value:.6e})"
            ),
            Error::EndpointZeroMode { s, lambda, gap } => write!(
                f,
                "eigenvalue {lambda:.3e} at s = {s} lies inside the endpoint gap {gap:.1e}"
            ),
            Error::AmbiguousMatching { s_left, s_right, block, margin } => write!(
                f,
                "branch matching ambiguous on block {block} in [{s_left}, {s_right}] (overlap margin {margin:.3})"
            ),
            Error::CutoffUnstable { cutoff, drift } => write!(
                f,
                "trusted-window eigenvalues drift by {drift:.3e} from K = {cutoff} to K + 4"
            ),
            Error::WindowExceedsTrusted { requested, trusted } => write!(
                f,
                "eigenvalue window {requested:.4} exceeds the trusted window {trusted:.4}"
            ),
            Error::TimeTooSmall { t, min_t } => write!(
                f,
                "t = {t:.3e} too small for the eigenvalue window; minimum admissible t = {min_t:.3e}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
