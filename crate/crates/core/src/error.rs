use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fields live on different grids ({0} vs {1})")]
    GridMismatch(String, String),

    #[error("invalid form degree: {0}")]
    Degree(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("component mean {mean:.3e} exceeds harmonic tolerance {tolerance:.3e}; project out the harmonic part first")]
    NonzeroHarmonicPart { mean: f64, tolerance: f64 },

    #[error("vector field is not divergence-free (relative divergence {relative:.3e} > {tolerance:.3e})")]
    NotDivergenceFree { relative: f64, tolerance: f64 },

    #[error("vector field has nonzero mean {mean:.3e}")]
    NonzeroMean { mean: f64 },

    #[error("1-form has no potential on the torus (harmonic part {harmonic:.3e} > {tolerance:.3e})")]
    ObstructedPotential { harmonic: f64, tolerance: f64 },

    #[error("curve is not closed: {0}")]
    OpenCurve(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curves intersect (minimum distance {distance:.3e})")]
    CurvesIntersect { distance: f64 },

    #[error("projection direction is not generic: {0}")]
    DegenerateProjection(String),

    #[error("tube radius {radius:.4} is below three grid spacings ({min:.4})")]
    TubeTooThin { radius: f64, min: f64 },

    #[error("tubes overlap: radius {radius:.4} exceeds a third of the component distance {distance:.4}")]
    TubeOverlap { radius: f64, distance: f64 },

    #[error("curve is not planar (deviation {deviation:.3e})")]
    NotPlanar { deviation: f64 },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("obstructed class for pair ({i},{j}): meridian period {period:.4} on torus {torus} exceeds {tolerance}")]
    ObstructedClass {
        i: usize,
        j: usize,
        torus: usize,
        period: f64,
        tolerance: f64,
    },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("missing primitive v_{0}")]
    MissingPrimitive(String),

    #[error("inconsistent diagram: {0}")]
    InconsistentDiagram(String),

    #[error("invariant mu({index}) is indeterminate: lower invariant mu({sub_index}) = {value} is nonzero")]
    IndeterminateInvariant {
        index: String,
        sub_index: String,
        value: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 input validation, 3 numerical precondition,
    /// 4 topological obstruction, 5 invariant indeterminacy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ObstructedClass { .. } => 4,
            Error::IndeterminateInvariant { .. } => 5,
            Error::NonzeroHarmonicPart { .. }
            | Error::NotDivergenceFree { .. }
            | Error::NonzeroMean { .. }
            | Error::ObstructedPotential { .. }
            | Error::NoConvergence { .. }
            | Error::MissingPrimitive(_) => 3,
            _ => 2,
        }
    }
}
