use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation requires a closed curve")]
    OpenCurve,

    #[error("operation requires a planar curve, got dimension {0}")]
    NotPlanar(usize),

    #[error("rotation number residual {residual:.3} signals under-sampling")]
    UnderSampled { residual: f64 },

    #[error("curvature changes sign; support function undefined")]
    Inflection,

    #[error("monodromy is the identity: every rear track closes")]
    IdentityMonodromy,

    #[error("direction is not fixed by the monodromy (defect {defect:.3e})")]
    NotFixed { defect: f64 },

    #[error("zero direction vector")]
    ZeroVector,

    #[error("sphere chart breakdown: last homogeneous coordinate {0:.3e} is not positive")]
    ChartBreakdown(f64),

    #[error("non-unit tangent (|t| - 1 = {0:.3e})")]
    NonUnitTangent(f64),

    #[error("cusps under-resolved: crossings at x = {0:.6} and x = {1:.6} are within 4 grid steps")]
    UnderResolvedCusps(f64, f64),

    #[error("non-transversal crossing of the cusp locus at x = {0:.6}")]
    TangentialCrossing(f64),

    #[error("no sign change of |trace| - 2 in the bracket [{0}, {1}]")]
    NoSignChange(f64, f64),

    #[error("linkage left M0: |cos alpha_{index}| = {cosine:.3e}")]
    OutsideM0 { index: usize, cosine: f64 },

    #[error("linkage speed overflow: t_{index} = {speed:.3e}")]
    SpeedOverflow { index: usize, speed: f64 },

    #[error("linkage invariant violated: {0}")]
    LinkageInvariant(String),

    #[error("linkage too short: need at least {needed} links, have {have}")]
    InsufficientLength { needed: usize, have: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
