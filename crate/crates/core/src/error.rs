use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vorticity density is identically zero")]
    ZeroForm,

    #[error("vorticity density has no zeros (it is a volume form)")]
    NoZeros,

    #[error(
        "Morse condition violated near t = {location:.12}: |beta'| = {derivative:.3e} below threshold {threshold:.3e}"
    )]
    MorseViolation {
        location: f64,
        derivative: f64,
        threshold: f64,
    },

    #[error("zero refinement produced an odd number of zeros ({count})")]
    OddZeroCount { count: usize },

    #[error("partial vorticities fail to alternate in sign at segment {index} (omega = {value:e})")]
    AlternationViolation { index: usize, value: f64 },

    #[error("cumulative target {value:e} outside segment range [{lo:e}, {hi:e}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("partial vorticities have no proper rotational symmetry (step equals k)")]
    NoSymmetry,

    #[error("profiles do not match at shift {shift}: model {model:?}, target {target:?}")]
    ProfileMismatch {
        shift: usize,
        model: Vec<f64>,
        target: Vec<f64>,
    },

    #[error("loop is negatively oriented (shoelace area {area:e})")]
    OrientationError { area: f64 },

    #[error("loop polyline self-intersects: segments {first} and {second}")]
    SelfIntersection { first: usize, second: usize },

    #[error("loop is not an immersion at sample {index}")]
    NotImmersed { index: usize },

    #[error("tangent vector violates the area constraint (relative violation {violation:e})")]
    ConstraintViolation { violation: f64 },

    #[error("local error estimate {estimate:e} exceeds 1e-3 at step {step}, sample {sample}")]
    StepRejected {
        step: usize,
        sample: usize,
        estimate: f64,
    },

    #[error("evolved loop failed validation: {0}")]
    ValidationFailed(String),

    #[error("circle map is not an orientation-preserving diffeomorphism: {0}")]
    NotMonotone(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors that come from a vorticity density failing the Morse hypotheses.
    pub fn is_morse_class(&self) -> bool {
        matches!(
            self,
            Error::ZeroForm
                | Error::NoZeros
                | Error::MorseViolation { .. }
                | Error::OddZeroCount { .. }
                | Error::AlternationViolation { .. }
        )
    }
}
