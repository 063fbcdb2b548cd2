use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no closed curve for p={p}, q={q}, k={k}: k must satisfy {lo_inner} < k < {hi_inner} or k > {lo_outer}")]
    NoClosedCurve {
        p: u32,
        q: u32,
        k: f64,
        lo_inner: f64,
        hi_inner: f64,
        lo_outer: f64,
    },

    #[error("spectrum is not real: root {0} has imaginary part {1:e}")]
    ComplexSpectrum(usize, f64),

    #[error("degenerate plane wave: k = m_{0} makes a = 0")]
    Degenerate(usize),

    #[error("singular matrix (det = {0:e})")]
    Singular(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid data is not periodic (spectral tail {0:e})")]
    NotPeriodic(f64),

    #[error("D^-1 applied to {entry} with nonzero mean {mean:e}")]
    NonZeroMean { entry: &'static str, mean: f64 },

    #[error("phase undefined: |z| = {modulus:e} at x = {x}")]
    PhaseUndefined { x: f64, modulus: f64 },

    #[error("frame check failed at x = {x}: max residual {residual:e}")]
    FrameBlowUp { x: f64, residual: f64 },

    #[error("projection singular: |Gamma_3 + i Gamma_1| = {0:e}")]
    ProjectionSingular(f64),

    #[error("vector is not null: <v,v> = {0:e}")]
    NotNull(f64),

    #[error("curves too close for the linking integral (min distance {0:e})")]
    CurvesTooClose(f64),

    #[error("curve not closed (gap {0:e})")]
    NotClosed(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
