//! Cut-and-project tiling generation.
//!
//! Nodes are the orthogonal projections (onto the cut subspace) of the
//! `(2π)ℤ^N` lattice points whose Voronoi cubes meet the subspace inside the
//! region of interest; edges join face-adjacent cubes. The construction:
//! seed points in the region, round their ambient images to lattice centers,
//! grow the center set to a fixed point through face-adjacent feasible
//! cells, project, and connect.
//!
//! Whether a cube meets the subspace is a linear feasibility problem in the
//! cut coordinates; see [`feasibility`].

pub mod feasibility;

use crate::error::CoreError;
use crate::grid::Region;
use crate::linalg::singular_values;
use crate::wavefield::WaveConfig;
use crate::RVec;
use feasibility::{feasible_point, Band};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

const TAU: f64 = std::f64::consts::TAU;

/// A Voronoi cell of the `(2π)ℤ^N` lattice: the closed cube of side `2π`
/// centered at `2πc`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeCell {
    pub c: Vec<i64>,
}

impl LatticeCell {
    pub fn new(c: Vec<i64>) -> Self {
        LatticeCell { c }
    }

    /// Coordinate bounds of the cube along axis `j`: `[2πc_j - π, 2πc_j + π]`.
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        let center = TAU * self.c[j] as f64;
        (center - std::f64::consts::PI, center + std::f64::consts::PI)
    }

    /// Face adjacency: centers differ by ±1 in exactly one coordinate.
    pub fn adjacent(&self, other: &LatticeCell) -> bool {
        let mut diff_one = 0;
        for (a, b) in self.c.iter().zip(&other.c) {
            match (a - b).abs() {
                0 => {}
                1 => diff_one += 1,
                _ => return false,
            }
        }
        diff_one == 1
    }
}

/// Node of a tiling graph: an accepted lattice cell with its projection onto
/// the cut subspace and the feasibility witness.
#[derive(Debug, Clone)]
pub struct TilingNode {
    pub center: Vec<i64>,
    pub projection: RVec,
    pub witness: RVec,
}

/// Cut-and-project tiling restricted to a region.
#[derive(Debug, Clone)]
pub struct TilingGraph {
    pub d: usize,
    pub n: usize,
    /// Nodes sorted by center, lexicographically.
    pub nodes: Vec<TilingNode>,
    /// Edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub region: Region,
}

impl TilingGraph {
    pub fn node_index(&self, center: &[i64]) -> Option<usize> {
        self.nodes
            .binary_search_by(|node| node.center.as_slice().cmp(center))
            .ok()
    }
}

/// Default cap on grown nodes before reporting overflow.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

fn cell_bands(c: &[i64], cfg: &WaveConfig) -> Vec<Band> {
    let k = cfg.k_matrix();
    (0..cfg.n())
        .map(|j| {
            let center = TAU * c[j] as f64 - cfg.gamma()[j];
            Band {
                normal: (0..cfg.d()).map(|i| k[(i, j)]).collect(),
                lo: center - std::f64::consts::PI,
                hi: center + std::f64::consts::PI,
            }
        })
        .collect()
}

fn witness_radius(c: &[i64], cfg: &WaveConfig) -> f64 {
    let sigma_min = *singular_values(cfg.k_matrix()).last().unwrap();
    let target: f64 = c
        .iter()
        .zip(cfg.gamma().iter())
        .map(|(&cj, &gj)| {
            let b = TAU * cj.abs() as f64 + std::f64::consts::PI + gj.abs();
            b * b
        })
        .sum::<f64>()
        .sqrt();
    target / sigma_min + 1.0
}

/// Whether the Voronoi cube centered at `2πc` meets the affine subspace
/// `y = Kᵀx + γ`; on success returns a witness `x` with constraint
/// violation below `1e-9`. Boundary contact counts as feasible.
pub fn cell_intersects_subspace(c: &[i64], cfg: &WaveConfig) -> Option<RVec> {
    assert_eq!(c.len(), cfg.n(), "center must be an N-vector");
    feasible_point(&cell_bands(c, cfg), cfg.d(), witness_radius(c, cfg))
}

/// Region-restricted variant: the witness is additionally confined to the
/// box, which keeps the growth phase of the tiling finite.
pub fn cell_intersects_region(c: &[i64], cfg: &WaveConfig, region: &Region) -> Option<RVec> {
    let mut bands = cell_bands(c, cfg);
    for axis in 0..cfg.d() {
        let mut normal = vec![0.0; cfg.d()];
        normal[axis] = 1.0;
        bands.push(Band {
            normal,
            lo: region.lo[axis],
            hi: region.hi[axis],
        });
    }
    let radius = region
        .lo
        .iter()
        .chain(region.hi.iter())
        .fold(0.0_f64, |m, &v| m.max(v.abs()))
        * (cfg.d() as f64).sqrt()
        + 1.0;
    feasible_point(&bands, cfg.d(), radius)
}

/// Orthogonal projection of the lattice point `2πc` onto the subspace,
/// expressed in the cut parameter: `x = (KKᵀ)⁻¹ K (2πc - γ)`.
pub fn project_center(c: &[i64], cfg: &WaveConfig) -> RVec {
    let k = cfg.k_matrix();
    let target = RVec::from_fn(cfg.n(), |j, _| TAU * c[j] as f64 - cfg.gamma()[j]);
    let normal = k * k.transpose();
    normal
        .lu()
        .solve(&(k * target))
        .expect("full-rank configuration")
}

/// Builds the tiling of a region: seed, round, grow to a fixed point,
/// project, connect. `seed_density` is the number of seed points per
/// wavelength per axis. Deterministic for fixed inputs.
pub fn build_tiling(
    region: &Region,
    seed_density: f64,
    cfg: &WaveConfig,
) -> Result<TilingGraph, CoreError> {
    build_tiling_with_cap(region, seed_density, cfg, DEFAULT_NODE_CAP)
}

pub fn build_tiling_with_cap(
    region: &Region,
    seed_density: f64,
    cfg: &WaveConfig,
    cap: usize,
) -> Result<TilingGraph, CoreError> {
    let d = cfg.d();
    assert_eq!(region.dim(), d, "region dimension must match configuration");
    assert!(seed_density > 0.0, "seed density must be positive");
    for axis in 0..d {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(region.hi[axis] > region.lo[axis]) {
            return Err(CoreError::DegenerateRegion { axis });
        }
    }

    // Step 1: regular seed grid over the region
    let lambda = cfg.lambda();
    let counts: Vec<usize> = (0..d)
        .map(|a| ((region.extent(a) / lambda * seed_density).ceil() as usize).max(1) + 1)
        .collect();

    // Step 2: round ambient images to lattice centers
    let mut visited: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    let mut idx = vec![0usize; d];
    'seeds: loop {
        let x = RVec::from_fn(d, |a, _| region.axis_coord(a, idx[a], counts[a]));
        let y = cfg.to_ambient(&x);
        let c: Vec<i64> = (0..cfg.n()).map(|j| (y[j] / TAU).round() as i64).collect();
        if visited.insert(c.clone()) {
            queue.push_back(c);
        }
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == d {
                break 'seeds;
            }
        }
    }

    // Step 3: close the set under face adjacency + feasibility, to a fixed
    // point; the region restriction keeps the growth finite.
    while let Some(c) = queue.pop_front() {
        for j in 0..cfg.n() {
            for step in [-1i64, 1] {
                let mut neighbor = c.clone();
                neighbor[j] += step;
                if visited.contains(&neighbor) {
                    continue;
                }
                if cell_intersects_region(&neighbor, cfg, region).is_some() {
                    visited.insert(neighbor.clone());
                    if visited.len() > cap {
                        return Err(CoreError::TileOverflow { cap });
                    }
                    queue.push_back(neighbor);
                }
            }
        }
    }

    // keep only cells that actually meet the subspace inside the region
    // (rounded seed cells always do, by construction of the rounding)
    let mut nodes: Vec<TilingNode> = Vec::new();
    for c in visited {
        if let Some(witness) = cell_intersects_region(&c, cfg, region) {
            let projection = project_center(&c, cfg);
            nodes.push(TilingNode {
                center: c,
                projection,
                witness,
            });
        }
    }

    // Step 5: edges between face-adjacent retained cells
    let index: BTreeMap<&[i64], usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| (node.center.as_slice(), i))
        .collect();
    let mut edges = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        for j in 0..cfg.n() {
            let mut neighbor = node.center.clone();
            neighbor[j] += 1;
            if let Some(&other) = index.get(neighbor.as_slice()) {
                edges.push((i.min(other), i.max(other)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();

    Ok(TilingGraph {
        d,
        n: cfg.n(),
        nodes,
        edges,
        region: region.clone(),
    })
}

/// One-dimensional cut of the square lattice along the line `y = slope·x`
/// through the origin: positions of the projected feasible cells and the
/// gap sequence between consecutive positions.
#[derive(Debug, Clone)]
pub struct LineTiling {
    pub positions: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl LineTiling {
    /// Distinct gap lengths, clustered at the given tolerance, with counts,
    /// ascending by length.
    pub fn distinct_gaps(&self, tol: f64) -> Vec<(f64, usize)> {
        cluster(&self.gaps, tol)
    }

    /// Labels each gap by its cluster index (0 = shortest).
    pub fn labels(&self, tol: f64) -> Vec<usize> {
        let clusters = self.distinct_gaps(tol);
        self.gaps
            .iter()
            .map(|&g| {
                clusters
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| (g - a.0).abs().total_cmp(&(g - b.0).abs()))
                    .map(|(i, _)| i)
                    .unwrap()
            })
            .collect()
    }
}

/// Generates the 1-D tiling for a line of the given positive slope over the
/// parameter interval `[-extent, extent]`.
pub fn tiling_1d(slope: f64, extent: f64) -> LineTiling {
    assert!(slope > 0.0, "slope must be positive");
    assert!(extent > 0.0, "extent must be positive");
    let scale = 1.0 + slope * slope;
    let mut positions: Vec<f64> = Vec::new();
    let c1_max = (extent / TAU).ceil() as i64 + 1;
    for c1 in -c1_max..=c1_max {
        // x must satisfy |x - 2πc₁| ≤ π and |slope·x - 2πc₂| ≤ π
        let x_lo = (TAU * c1 as f64 - std::f64::consts::PI).max(-extent);
        let x_hi = (TAU * c1 as f64 + std::f64::consts::PI).min(extent);
        if x_lo > x_hi {
            continue;
        }
        let c2_lo = ((slope * x_lo - std::f64::consts::PI) / TAU).floor() as i64;
        let c2_hi = ((slope * x_hi + std::f64::consts::PI) / TAU).ceil() as i64;
        for c2 in c2_lo..=c2_hi {
            let lo = ((TAU * c2 as f64 - std::f64::consts::PI) / slope).max(x_lo);
            let hi = ((TAU * c2 as f64 + std::f64::consts::PI) / slope).min(x_hi);
            if lo <= hi + 1e-12 {
                positions.push(TAU * (c1 as f64 + slope * c2 as f64) / scale);
            }
        }
    }
    positions.sort_by(|a, b| a.total_cmp(b));
    positions.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let gaps = positions.windows(2).map(|w| w[1] - w[0]).collect();
    LineTiling { positions, gaps }
}

/// Histogram by gap clustering: sorts the values and splits where
/// consecutive values differ by more than `tol`. Each cluster reports its
/// mean and count. Deterministic for a fixed value multiset.
pub fn cluster(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 0..sorted.len() {
        let is_break = i + 1 == sorted.len() || sorted[i + 1] - sorted[i] > tol;
        if is_break {
            let slice = &sorted[start..=i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            out.push((mean, slice.len()));
            start = i + 1;
        }
    }
    out
}

/// Edge-length and incident-edge-angle statistics of a tiling graph.
#[derive(Debug, Clone)]
pub struct TileStatistics {
    /// Clustered projected edge lengths with counts.
    pub edge_lengths: Vec<(f64, usize)>,
    /// Clustered angles (radians, in `[0, π]`) between pairs of edges
    /// meeting at a node.
    pub corner_angles: Vec<(f64, usize)>,
    pub edge_count: usize,
    pub corner_pair_count: usize,
}

/// Clustering tolerance used by [`tile_statistics`] and
/// [`rhombus_inventory`].
pub const STAT_CLUSTER_TOL: f64 = 5e-7;

pub fn tile_statistics(g: &TilingGraph) -> TileStatistics {
    let mut lengths = Vec::with_capacity(g.edges.len());
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        lengths.push((&g.nodes[j].projection - &g.nodes[i].projection).norm());
        incident[i].push(e);
        incident[j].push(e);
    }
    let mut angles = Vec::new();
    for (v, edges) in incident.iter().enumerate() {
        for (a, &ea) in edges.iter().enumerate() {
            for &eb in edges.iter().skip(a + 1) {
                let dir = |e: usize| {
                    let (i, j) = g.edges[e];
                    let other = if i == v { j } else { i };
                    (&g.nodes[other].projection - &g.nodes[v].projection).normalize()
                };
                let cos = dir(ea).dot(&dir(eb)).clamp(-1.0, 1.0);
                angles.push(cos.acos());
            }
        }
    }
    TileStatistics {
        edge_lengths: cluster(&lengths, STAT_CLUSTER_TOL),
        corner_angles: cluster(&angles, STAT_CLUSTER_TOL),
        edge_count: lengths.len(),
        corner_pair_count: angles.len(),
    }
}

/// Inventory of elementary rhombic tiles: lifted unit squares
/// `c, c+e_i, c+e_j, c+e_i+e_j` whose four cells are all present. Each tile
/// is classified by the acute angle between its projected edge directions
/// (π/2 for squares). Returns clustered angles with tile counts, ascending.
pub fn rhombus_inventory(g: &TilingGraph) -> Vec<(f64, usize)> {
    let index: BTreeMap<&[i64], usize> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| (node.center.as_slice(), i))
        .collect();
    let mut angles = Vec::new();
    for node in &g.nodes {
        for i in 0..g.n {
            let mut ci = node.center.clone();
            ci[i] += 1;
            let Some(&ni) = index.get(ci.as_slice()) else {
                continue;
            };
            for j in i + 1..g.n {
                let mut cj = node.center.clone();
                cj[j] += 1;
                let Some(&nj) = index.get(cj.as_slice()) else {
                    continue;
                };
                let mut cij = ci.clone();
                cij[j] += 1;
                if !index.contains_key(cij.as_slice()) {
                    continue;
                }
                let vi = (&g.nodes[ni].projection - &node.projection).normalize();
                let vj = (&g.nodes[nj].projection - &node.projection).normalize();
                let theta = vi.dot(&vj).clamp(-1.0, 1.0).acos();
                angles.push(theta.min(std::f64::consts::PI - theta));
            }
        }
    }
    cluster(&angles, STAT_CLUSTER_TOL)
}
