use thiserror::Error;

/// Errors produced by construction and evaluation routines.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch for `{what}`: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("wavevector column {column} has norm {norm:.6e}, expected {expected:.6e} (all columns must have equal length)")]
    UnequalColumnNorms {
        column: usize,
        norm: f64,
        expected: f64,
    },

    #[error("wavevector matrix is rank deficient: smallest singular value {smallest:.3e} vs largest {largest:.3e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("need at least as many wave pairs as spatial dimensions (N = {n} < d = {d})")]
    TooFewWaves { n: usize, d: usize },

    #[error("matrix is not Hermitian: entry ({i},{j}) differs from conjugate by {deviation:.3e}")]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("controls must be an eigenvector of Q: residual {residual:.3e} exceeds {tol:.3e}")]
    NotAnEigenvector { residual: f64, tol: f64 },

    #[error("controls are not of the real [v; v] / [v; -v] form (deviation {deviation:.3e})")]
    NotRealPaired { deviation: f64 },

    #[error("controls must have unit norm, got {norm}")]
    NotUnitNorm { norm: f64 },

    #[error("level-set sign search supports at most {max} nonzero entries, got {got}")]
    SignSearchTooLarge { max: usize, got: usize },

    #[error("dual basis requires a square invertible wavevector matrix (N = d)")]
    NotSquare,

    #[error("moiré integers must be nonzero and coprime: m = {m}, r = {r}")]
    NotCoprime { m: i64, r: i64 },

    #[error("moiré angle {theta:.6} rad is outside (0, pi/3)")]
    AngleOutOfRange { theta: f64 },

    #[error("configuration does not match the lifted planar template: {reason}")]
    TemplateMismatch { reason: String },

    #[error("no permutation/sign action realizes the requested orthogonal map")]
    NoMatchingAction,

    #[error("matrix is not orthogonal: ||RᵀR - I|| = {deviation:.3e}")]
    NotOrthogonal { deviation: f64 },

    #[error("configuration is not a standard fan: column {column} deviates by {deviation:.3e}")]
    NotAFan { column: usize, deviation: f64 },

    #[error("geodesic endpoints are antipodal; the shortest path is not unique, insert a waypoint")]
    AntipodalEndpoints,

    #[error("region is empty or degenerate along axis {axis}")]
    DegenerateRegion { axis: usize },

    #[error("tiling growth exceeded the node cap of {cap}")]
    TileOverflow { cap: usize },

    #[error("grid resolution must be positive on every axis")]
    ZeroResolution,

    #[error("grid of {points} points exceeds the memory cap of {cap} points")]
    GridTooLarge { points: usize, cap: usize },

    #[error("{0}")]
    Scene(#[from] crate::scene::SceneError),

    #[error("i/o failure for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CoreError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
