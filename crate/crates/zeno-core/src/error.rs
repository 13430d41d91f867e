use core::fmt;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by construction and evolution routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must live in the same space have different dimensions.
    DimensionMismatch { expected: usize, actual: usize },
    /// A basis label lies outside the configured space.
    InvalidBasisLabel { n: usize, j1: u8, j2: u8, n_max: usize },
    /// Atom index outside {1, 2}.
    InvalidAtomIndex(usize),
    /// Atomic level outside {0, 1, 2}.
    InvalidAtomicLevel(u8),
    /// A parameter violates its documented range.
    InvalidParameter(&'static str),
    /// An operation required a normalized state.
    NotNormalized { norm_sq: f64 },
    /// Projector construction received states that are not pairwise
    /// orthonormal within tolerance.
    NotOrthonormal { max_deviation: f64 },
    /// A state with zero norm cannot be normalized.
    ZeroNormState,
    /// Conditional evolution produced a squared norm above 1 beyond the
    /// allowed numerical tolerance, indicating an integrator inconsistency.
    NormExceedsUnity { norm_sq: f64 },
    /// The adaptive stepper could not meet the requested tolerance.
    StepperFailure {
        t_reached: f64,
        step_size: f64,
        error_estimate: f64,
    },
    /// A linear solve hit a numerically singular pivot.
    SingularMatrix,
    /// The QR eigenvalue iteration failed to converge.
    EigenNoConvergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidBasisLabel { n, j1, j2, n_max } => write!(
                f,
                "basis label (n={n}, j1={j1}, j2={j2}) outside space with n_max={n_max}"
            ),
            Error::InvalidAtomIndex(i) => write!(f, "atom index {i} not in {{1, 2}}"),
            Error::InvalidAtomicLevel(j) => write!(f, "atomic level {j} not in {{0, 1, 2}}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NotNormalized { norm_sq } => {
                write!(f, "state not normalized: squared norm {norm_sq}")
            }
            Error::NotOrthonormal { max_deviation } => write!(
                f,
                "input states not orthonormal: max deviation {max_deviation}"
            ),
            Error::ZeroNormState => write!(f, "state has zero norm"),
            Error::NormExceedsUnity { norm_sq } => write!(
                f,
                "conditional state norm² = {norm_sq} exceeds 1 beyond tolerance"
            ),
            Error::StepperFailure {
                t_reached,
                step_size,
                error_estimate,
            } => write!(
                f,
                "adaptive stepper failed at t={t_reached} (step {step_size}, \
                 error estimate {error_estimate})"
            ),
            Error::SingularMatrix => write!(f, "matrix is numerically singular"),
            Error::EigenNoConvergence => write!(f, "QR eigenvalue iteration did not converge"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
