//! Scene description files: one TOML document per scene, holding the wave
//! configuration, controls, potential, region and output options.
//!
//! ```toml
//! d = 2
//! n = 5
//! k = [[1.0, 0.809017, 0.309017, -0.309017, -0.809017],
//!      [0.0, 0.587785, 0.951057,  0.951057,  0.587785]]
//! u = [1,0, 1,0, 1,0, 1,0, 1,0, -1,0, -1,0, -1,0, -1,0, -1,0]
//! units = "lambda"
//!
//! [potential]
//! a = 1.0
//! b = 1.0
//!
//! [region]
//! min = [-6.0, -6.0]
//! max = [6.0, 6.0]
//! resolution = [513, 513]
//! ```
//!
//! `k` is row-major (`d` rows of `N` columns); `u` interleaves real and
//! imaginary parts (`2·2N` numbers); `gamma` defaults to zero; the potential
//! defaults to `a = b = 1`; with `units = "lambda"` region bounds and
//! translation vectors are given in wavelengths. Optional `[output]`,
//! `[tiling]` and `[transition]` tables configure the batch commands.

use crate::control::PathKind;
use crate::error::CoreError;
use crate::grid::{sample_field, FieldGrid, Region};
use crate::wavefield::{Controls, PotentialSpec, WaveConfig};
use crate::{C64, CMat, CVec, RMat, RVec};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

/// Scene validation diagnostics. Every malformed field gets its own variant
/// naming the offender.
#[derive(Debug, Error)]
pub enum SceneError {
    #[error("scene file is not valid TOML: {0}")]
    Parse(String),

    #[error("`k` must have {expected} rows (one per dimension), found {got}")]
    KRows { expected: usize, got: usize },

    #[error("`k` row {row} must have {expected} entries, found {got}")]
    KRow {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("`k` column {column} breaks the configuration contract: {reason}")]
    KColumn { column: usize, reason: String },

    #[error("wavevector matrix rejected: {0}")]
    BadWavevectors(String),

    #[error("`u` must hold {expected} numbers (re/im interleaved for 2N = {pairs} amplitudes), found {got}")]
    ULength {
        expected: usize,
        pairs: usize,
        got: usize,
    },

    #[error("`gamma` must have {expected} entries, found {got}")]
    GammaLength { expected: usize, got: usize },

    #[error("`potential` may set either `a`/`b` or `matrix`, not both")]
    PotentialBothForms,

    #[error("`potential.matrix` must be {side}×{width} (rows × interleaved entries), found row {row} with {got}")]
    PotentialShape {
        side: usize,
        width: usize,
        row: usize,
        got: usize,
    },

    #[error("`potential.matrix` is not Hermitian: {0}")]
    PotentialNotHermitian(String),

    #[error("`region.{field}` must have {expected} entries, found {got}")]
    RegionDim {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("`region` is empty along axis {axis} (min must be strictly below max)")]
    RegionEmpty { axis: usize },

    #[error("`region.resolution` axis {axis} must be positive")]
    RegionResolution { axis: usize },

    #[error("`units` must be \"absolute\" or \"lambda\", found {0:?}")]
    BadUnits(String),

    #[error("`output.format` must be \"pgm\" or \"csv\", found {0:?}")]
    BadFormat(String),

    #[error("`transition.kind` must be \"direct\" or \"geodesic\", found {0:?}")]
    BadKind(String),

    #[error("`transition` needs exactly one of `eps` or `u1`")]
    TransitionTarget,

    #[error("`transition.eps` must have {expected} entries, found {got}")]
    TransitionEps { expected: usize, got: usize },

    #[error("`transition.frames` must be at least 2")]
    TransitionFrames,

    #[error("`tiling.seed_density` must be positive")]
    TilingDensity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    d: usize,
    n: usize,
    k: Vec<Vec<f64>>,
    gamma: Option<Vec<f64>>,
    u: Vec<f64>,
    units: Option<String>,
    /// Opt out of the equal-wavelength requirement (for cut lines/planes of
    /// arbitrary slope rather than physical transducer layouts).
    allow_unequal_lengths: Option<bool>,
    potential: Option<PotentialFile>,
    region: RegionFile,
    output: Option<OutputFile>,
    tiling: Option<TilingFile>,
    transition: Option<TransitionFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    a: Option<f64>,
    b: Option<f64>,
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    min: Vec<f64>,
    max: Vec<f64>,
    /// Samples per axis; defaults to 513 per axis (128 for 3-D scenes).
    resolution: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    format: Option<String>,
    path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TilingFile {
    seed_density: Option<f64>,
    overlay: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionFile {
    kind: Option<String>,
    frames: Option<usize>,
    eps: Option<Vec<f64>>,
    u1: Option<Vec<f64>>,
}

/// Output format for sampled fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Pgm,
    Csv,
}

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TilingOptions {
    pub seed_density: f64,
    pub overlay: bool,
}

#[derive(Debug, Clone)]
pub enum TransitionTarget {
    /// Move the pattern by this offset (the endpoint is the translated u).
    Translate(RVec),
    /// Explicit endpoint controls.
    Explicit(Controls),
}

#[derive(Debug, Clone)]
pub struct TransitionSpec {
    pub kind: PathKind,
    pub frames: usize,
    pub target: TransitionTarget,
}

/// A validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub cfg: WaveConfig,
    pub controls: Controls,
    pub spec: PotentialSpec,
    pub region: Region,
    pub resolution: Vec<usize>,
    pub output: OutputSpec,
    pub tiling: Option<TilingOptions>,
    pub transition: Option<TransitionSpec>,
    /// Multiplier turning scene-file lengths into absolute coordinates
    /// (1 for absolute units, λ when the scene declares `units = "lambda"`).
    pub unit_scale: f64,
}

impl Scene {
    /// Samples the scene's field over its region.
    pub fn sample(&self) -> Result<FieldGrid, CoreError> {
        sample_field(
            &self.region,
            &self.resolution,
            &self.controls,
            &self.cfg,
            &self.spec,
        )
    }
}

fn complex_interleaved(values: &[f64]) -> CVec {
    CVec::from_iterator(
        values.len() / 2,
        values.chunks(2).map(|c| C64::new(c[0], c[1])),
    )
}

/// Parses and validates a scene document.
pub fn parse_scene_str(text: &str) -> Result<Scene, SceneError> {
    let file: SceneFile = toml::from_str(text).map_err(|e| SceneError::Parse(e.to_string()))?;
    let (d, n) = (file.d, file.n);

    // wavevectors: d rows of N entries each
    if file.k.len() != d {
        return Err(SceneError::KRows {
            expected: d,
            got: file.k.len(),
        });
    }
    for (row, entries) in file.k.iter().enumerate() {
        if entries.len() != n {
            return Err(SceneError::KRow {
                row,
                expected: n,
                got: entries.len(),
            });
        }
    }
    let k = RMat::from_fn(d, n, |r, c| file.k[r][c]);

    let gamma = match file.gamma {
        Some(g) => {
            if g.len() != n {
                return Err(SceneError::GammaLength {
                    expected: n,
                    got: g.len(),
                });
            }
            Some(RVec::from_column_slice(&g))
        }
        None => None,
    };

    let cfg = if file.allow_unequal_lengths.unwrap_or(false) {
        WaveConfig::general(k, gamma).map_err(|e| SceneError::BadWavevectors(e.to_string()))?
    } else {
        WaveConfig::new(k, gamma).map_err(|e| match e {
            CoreError::UnequalColumnNorms { column, .. } => SceneError::KColumn {
                column,
                reason: e.to_string(),
            },
            other => SceneError::BadWavevectors(other.to_string()),
        })?
    };

    if file.u.len() != 4 * n {
        return Err(SceneError::ULength {
            expected: 4 * n,
            pairs: 2 * n,
            got: file.u.len(),
        });
    }
    let controls = Controls::new(complex_interleaved(&file.u)).expect("length checked");

    let spec = match file.potential {
        None => PotentialSpec::default(),
        Some(p) => match (&p.matrix, p.a.is_some() || p.b.is_some()) {
            (Some(_), true) => return Err(SceneError::PotentialBothForms),
            (Some(rows), false) => {
                let side = d + 1;
                if rows.len() != side {
                    return Err(SceneError::PotentialShape {
                        side,
                        width: 2 * side,
                        row: rows.len(),
                        got: rows.len(),
                    });
                }
                for (row, entries) in rows.iter().enumerate() {
                    if entries.len() != 2 * side {
                        return Err(SceneError::PotentialShape {
                            side,
                            width: 2 * side,
                            row,
                            got: entries.len(),
                        });
                    }
                }
                let m = CMat::from_fn(side, side, |r, c| {
                    C64::new(rows[r][2 * c], rows[r][2 * c + 1])
                });
                PotentialSpec::general(m)
                    .map_err(|e| SceneError::PotentialNotHermitian(e.to_string()))?
            }
            (None, _) => PotentialSpec::diagonal(p.a.unwrap_or(1.0), p.b.unwrap_or(1.0)),
        },
    };

    let unit_scale = match file.units.as_deref() {
        None | Some("absolute") => 1.0,
        Some("lambda") => cfg.lambda(),
        Some(other) => return Err(SceneError::BadUnits(other.to_string())),
    };

    if file.region.min.len() != d {
        return Err(SceneError::RegionDim {
            field: "min",
            expected: d,
            got: file.region.min.len(),
        });
    }
    if file.region.max.len() != d {
        return Err(SceneError::RegionDim {
            field: "max",
            expected: d,
            got: file.region.max.len(),
        });
    }
    let resolution = file
        .region
        .resolution
        .unwrap_or_else(|| vec![if d == 3 { 128 } else { 513 }; d]);
    if resolution.len() != d {
        return Err(SceneError::RegionDim {
            field: "resolution",
            expected: d,
            got: resolution.len(),
        });
    }
    for (axis, &r) in resolution.iter().enumerate() {
        if r == 0 {
            return Err(SceneError::RegionResolution { axis });
        }
    }
    let lo: Vec<f64> = file.region.min.iter().map(|v| v * unit_scale).collect();
    let hi: Vec<f64> = file.region.max.iter().map(|v| v * unit_scale).collect();
    for axis in 0..d {
        // negated form so NaN bounds are rejected as well
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(hi[axis] > lo[axis]) {
            return Err(SceneError::RegionEmpty { axis });
        }
    }
    let region = Region::new(lo, hi).expect("checked above");

    let output = match file.output {
        None => OutputSpec {
            format: OutputFormat::Pgm,
            path: None,
        },
        Some(o) => OutputSpec {
            format: match o.format.as_deref() {
                None | Some("pgm") => OutputFormat::Pgm,
                Some("csv") => OutputFormat::Csv,
                Some(other) => return Err(SceneError::BadFormat(other.to_string())),
            },
            path: o.path,
        },
    };

    let tiling = match file.tiling {
        None => None,
        Some(t) => {
            let seed_density = t.seed_density.unwrap_or(4.0);
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(seed_density > 0.0) {
                return Err(SceneError::TilingDensity);
            }
            Some(TilingOptions {
                seed_density,
                overlay: t.overlay.unwrap_or(false),
            })
        }
    };

    let transition = match file.transition {
        None => None,
        Some(t) => {
            let kind = match t.kind.as_deref() {
                None | Some("geodesic") => PathKind::Geodesic,
                Some("direct") => PathKind::Direct,
                Some(other) => return Err(SceneError::BadKind(other.to_string())),
            };
            let frames = t.frames.unwrap_or(6);
            if frames < 2 {
                return Err(SceneError::TransitionFrames);
            }
            let target = match (t.eps, t.u1) {
                (Some(eps), None) => {
                    if eps.len() != d {
                        return Err(SceneError::TransitionEps {
                            expected: d,
                            got: eps.len(),
                        });
                    }
                    Some(TransitionTarget::Translate(
                        RVec::from_column_slice(&eps) * unit_scale,
                    ))
                }
                (None, Some(u1)) => {
                    if u1.len() != 4 * n {
                        return Err(SceneError::ULength {
                            expected: 4 * n,
                            pairs: 2 * n,
                            got: u1.len(),
                        });
                    }
                    Some(TransitionTarget::Explicit(
                        Controls::new(complex_interleaved(&u1)).expect("length checked"),
                    ))
                }
                _ => return Err(SceneError::TransitionTarget),
            };
            Some(TransitionSpec {
                kind,
                frames,
                target: target.expect("resolved above"),
            })
        }
    };

    Ok(Scene {
        cfg,
        controls,
        spec,
        region,
        resolution,
        output,
        tiling,
        transition,
        unit_scale,
    })
}

/// Reads and validates a scene file from disk.
pub fn parse_scene(path: &Path) -> Result<Scene, CoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    parse_scene_str(&text).map_err(CoreError::from)
}
