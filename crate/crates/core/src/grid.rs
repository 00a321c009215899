//! Axis-aligned regions and dense field sampling.
//!
//! Grids sample the potential on an inclusive lattice of points per axis
//! (both endpoints included), row-major with the last axis contiguous.
//! Sampling is parallel over outer slabs and reassembled in index order, so
//! the result is byte-identical for any thread count.

use crate::error::CoreError;
use crate::linalg::pairwise_sum;
use crate::par;
use crate::wavefield::{arp_value, psi_bounds, Controls, PotentialSpec, WaveConfig};
use crate::RVec;

/// Axis-aligned box in `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, CoreError> {
        assert_eq!(lo.len(), hi.len(), "region bounds must have equal length");
        for axis in 0..lo.len() {
            // negated form so NaN bounds fail validation too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(hi[axis] > lo[axis]) {
                return Err(CoreError::DegenerateRegion { axis });
            }
        }
        Ok(Region { lo, hi })
    }

    /// Centered cube `[-h, h]^d`.
    pub fn centered_cube(d: usize, half_width: f64) -> Self {
        Region {
            lo: vec![-half_width; d],
            hi: vec![half_width; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.extent(a)).product()
    }

    pub fn contains(&self, x: &RVec) -> bool {
        (0..self.dim()).all(|a| x[a] >= self.lo[a] && x[a] <= self.hi[a])
    }

    /// Coordinate of the `i`-th of `count` inclusive samples along an axis.
    /// A single sample sits at the axis midpoint. The convex-combination
    /// form keeps symmetric regions exactly mirror-symmetric and preserves
    /// coincident points under resolution doubling.
    pub fn axis_coord(&self, axis: usize, i: usize, count: usize) -> f64 {
        if count == 1 {
            0.5 * (self.lo[axis] + self.hi[axis])
        } else {
            let steps = (count - 1) as f64;
            (self.lo[axis] * (count - 1 - i) as f64 + self.hi[axis] * i as f64) / steps
        }
    }
}

/// Hard cap on grid sizes; past this the sampler reports an explicit error
/// instead of attempting the allocation.
pub const GRID_POINT_CAP: usize = 1 << 28;

/// Sampled scalar field over a region.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub region: Region,
    /// Samples per axis (inclusive endpoints).
    pub resolution: Vec<usize>,
    /// Row-major values, last axis contiguous.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl FieldGrid {
    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid point for a multi-index.
    pub fn point(&self, idx: &[usize]) -> RVec {
        RVec::from_fn(self.dim(), |a, _| {
            self.region.axis_coord(a, idx[a], self.resolution[a])
        })
    }

    /// Flat index of a multi-index (row-major, last axis fastest).
    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.resolution)
            .fold(0, |f, (&i, &r)| f * r + i)
    }
}

/// Samples the restricted potential over a region. Resolution is the
/// inclusive per-axis sample count.
pub fn sample_field(
    region: &Region,
    resolution: &[usize],
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> Result<FieldGrid, CoreError> {
    let d = region.dim();
    assert_eq!(d, cfg.d(), "region dimension must match the configuration");
    assert_eq!(resolution.len(), d, "resolution must list one count per axis");
    if resolution.contains(&0) {
        return Err(CoreError::ZeroResolution);
    }
    let points: usize = resolution.iter().product();
    if points > GRID_POINT_CAP {
        return Err(CoreError::GridTooLarge {
            points,
            cap: GRID_POINT_CAP,
        });
    }

    let outer = resolution[0];
    let inner: usize = resolution[1..].iter().product::<usize>().max(1);
    let slabs = par::map_indexed(outer, |i0| {
        let mut slab = Vec::with_capacity(inner);
        let mut idx = vec![0usize; d];
        idx[0] = i0;
        loop {
            let x = RVec::from_fn(d, |a, _| region.axis_coord(a, idx[a], resolution[a]));
            slab.push(arp_value(&x, u, cfg, spec));
            // advance the inner odometer (axes 1..d)
            let mut a = d;
            loop {
                if a == 1 {
                    return slab;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < resolution[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    });

    let mut values = Vec::with_capacity(points);
    for slab in slabs {
        values.extend_from_slice(&slab);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in &values {
        min = min.min(v);
        max = max.max(v);
    }
    Ok(FieldGrid {
        region: region.clone(),
        resolution: resolution.to_vec(),
        values,
        min,
        max,
    })
}

/// Grid points of a 3-D grid whose value is within `fraction` of the way
/// from the grid minimum to the grid maximum, i.e. the sublevel set
/// `ψ ≤ ψ_min + fraction·(ψ_max - ψ_min)`.
pub fn level_set_points_3d(grid: &FieldGrid, fraction: f64) -> Result<Vec<[f64; 3]>, CoreError> {
    if grid.dim() != 3 {
        return Err(CoreError::DimensionMismatch {
            what: "level-set grid",
            expected: 3,
            got: grid.dim(),
        });
    }
    assert!(
        fraction > 0.0 && fraction <= 1.0,
        "fraction must be in (0, 1]"
    );
    let threshold = if fraction >= 1.0 {
        f64::INFINITY
    } else {
        grid.min + fraction * (grid.max - grid.min)
    };
    let (r0, r1, r2) = (grid.resolution[0], grid.resolution[1], grid.resolution[2]);
    let mut out = Vec::new();
    for i0 in 0..r0 {
        let x0 = grid.region.axis_coord(0, i0, r0);
        for i1 in 0..r1 {
            let x1 = grid.region.axis_coord(1, i1, r1);
            for i2 in 0..r2 {
                let v = grid.values[(i0 * r1 + i1) * r2 + i2];
                if v <= threshold {
                    out.push([x0, x1, grid.region.axis_coord(2, i2, r2)]);
                }
            }
        }
    }
    Ok(out)
}

/// Mean of the sampled values by deterministic pairwise summation.
pub fn grid_mean(grid: &FieldGrid) -> f64 {
    pairwise_sum(&grid.values) / grid.len() as f64
}

/// Checks the spectral bound `λ_min‖u‖² ≤ ψ ≤ λ_max‖u‖²` on a sampled grid.
pub fn within_spectral_bounds(
    grid: &FieldGrid,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> bool {
    let (lo, hi) = psi_bounds(cfg, spec);
    let p = u.norm() * u.norm();
    let slack = 1e-9 * (lo.abs().max(hi.abs()) * p).max(1.0);
    grid.min >= lo * p - slack && grid.max <= hi * p + slack
}
