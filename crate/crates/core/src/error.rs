use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not skew-symmetric (defect {defect:e} at ({row}, {col}))")]
    NotSkew { row: usize, col: usize, defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("dimension {0} too large for exhaustive Pfaffian expansion")]
    TooLarge(usize),

    #[error("invalid variety spec: r = {r} must satisfy 0 <= r <= floor({n}/2) - 1")]
    InvalidSpec { n: usize, r: usize },

    #[error("pairs are not strictly descending and positive")]
    OutsideOrbitSpace,

    #[error("offset |t| = {t} is not below the focal radius {radius}")]
    FocalRadius { t: f64, radius: f64 },

    #[error("point is not on the variety (rank {rank} > {max_rank})")]
    OffVariety { rank: usize, max_rank: usize },

    #[error("degenerate secondary level: smallest label must be positive")]
    DegenerateLevel,

    #[error("step too large: leading block is singular at t = {0}")]
    SingularStep(f64),

    #[error("degenerate fit: only {0} usable points")]
    DegenerateFit(usize),

    #[error("unsupported regime: n - 2r = {0} < 3")]
    UnsupportedRegime(usize),

    #[error("isotropy constraint violated: {0}")]
    NotIsotropy(&'static str),
}
