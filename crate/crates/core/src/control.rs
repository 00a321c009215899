//! Pattern transformations acting on the controls, and constant-power
//! transition paths between control vectors.
//!
//! Spatial translations are diagonal phase changes `exp[iD(Kᵀε)]`.
//! Rotations/reflections that map the wavevector set onto itself (up to
//! signs) act by permuting the control entries. Transitions between two
//! unit-power control vectors stay on the `ℂ^{2N}` unit sphere: either the
//! one-parameter phase family of a translation (direct path) or the great
//! circle through the endpoints (geodesic path).

use crate::error::CoreError;
use crate::grid::Region;
use crate::linalg::pairwise_sum;
use crate::par;
use crate::wavefield::{Controls, DiagPhase, PotentialSpec, WaveConfig};
use crate::{C64, CVec, RMat, RVec};

/// An orthogonal map `R` realized on the controls by a permutation with
/// sign-induced swaps: `Rᵀ k_j = s_j · k_{σ(j)}`, so that
/// `ψ(Rx; u) = ψ(x; action(u))`.
#[derive(Debug, Clone)]
pub struct SymmetryAction {
    rotation: RMat,
    /// Target column `σ(j)` for each original column `j`.
    target: Vec<usize>,
    /// Sign `s_j` relating `Rᵀk_j` to `k_{σ(j)}`.
    signs: Vec<i8>,
    /// Entry permutation on the `2N` control slots: `new[i] = u[perm[i]]`.
    perm: Vec<usize>,
}

impl SymmetryAction {
    fn from_columns(rotation: RMat, target: Vec<usize>, signs: Vec<i8>) -> Self {
        let n = target.len();
        let mut perm = vec![0usize; 2 * n];
        for j in 0..n {
            let t = target[j];
            if signs[j] > 0 {
                perm[t] = j;
                perm[n + t] = n + j;
            } else {
                // a flipped wavevector swaps the forward/backward amplitudes
                perm[t] = n + j;
                perm[n + t] = j;
            }
        }
        SymmetryAction {
            rotation,
            target,
            signs,
            perm,
        }
    }

    /// The realized orthogonal map.
    pub fn rotation(&self) -> &RMat {
        &self.rotation
    }

    /// One-based entry permutation: `new_u[i] = u[perm[i]]`.
    pub fn permutation_one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|&p| p + 1).collect()
    }

    pub fn column_targets(&self) -> &[usize] {
        &self.target
    }

    pub fn column_signs(&self) -> &[i8] {
        &self.signs
    }

    /// Applies the permutation to the controls. Norm is preserved exactly.
    pub fn apply(&self, u: &Controls) -> Controls {
        let v = u.as_vector();
        assert_eq!(v.len(), self.perm.len(), "control length mismatch");
        Controls::new(CVec::from_fn(v.len(), |i, _| v[self.perm[i]])).expect("even length")
    }
}

/// Searches for a permutation/sign action realizing the orthogonal map `R`:
/// each column of `RᵀK` must equal ±(some column of `K`) within `1e-8`.
/// Returns `Ok(None)` when no such action exists.
pub fn match_unitary(r: &RMat, cfg: &WaveConfig) -> Result<Option<SymmetryAction>, CoreError> {
    let d = cfg.d();
    assert_eq!(r.shape(), (d, d), "rotation must be d×d");
    let dev = (r.transpose() * r - RMat::identity(d, d)).norm();
    if dev > 1e-10 {
        return Err(CoreError::NotOrthogonal { deviation: dev });
    }
    let k = cfg.k_matrix();
    let n = cfg.n();
    let mut target = vec![usize::MAX; n];
    let mut signs = vec![0i8; n];
    let mut used = vec![false; n];
    for j in 0..n {
        let moved = r.transpose() * k.column(j);
        let mut found = false;
        for (m, used_m) in used.iter_mut().enumerate() {
            if *used_m {
                continue;
            }
            let plus = (&moved - k.column(m)).norm();
            let minus = (&moved + k.column(m)).norm();
            if plus < 1e-8 || minus < 1e-8 {
                target[j] = m;
                signs[j] = if plus < 1e-8 { 1 } else { -1 };
                *used_m = true;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(SymmetryAction::from_columns(r.clone(), target, signs)))
}

fn require_fan(cfg: &WaveConfig) -> Result<(), CoreError> {
    if let Some((column, deviation)) = cfg.fan_deviation() {
        return Err(CoreError::NotAFan { column, deviation });
    }
    Ok(())
}

/// Rotation of a planar fan pattern by `steps·π/N` (the rotational
/// symmetries of the regular 2N-gon), realized as a control permutation.
pub fn rotation_action(cfg: &WaveConfig, steps: usize) -> Result<SymmetryAction, CoreError> {
    require_fan(cfg)?;
    let theta = steps as f64 * std::f64::consts::PI / cfg.n() as f64;
    let (s, c) = theta.sin_cos();
    let r = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
    match_unitary(&r, cfg)?.ok_or(CoreError::NoMatchingAction)
}

/// Reflection of a planar fan pattern across the line through the origin at
/// angle `steps·π/(2N)` (the mirror symmetries of the regular 2N-gon).
pub fn reflection_action(cfg: &WaveConfig, steps: usize) -> Result<SymmetryAction, CoreError> {
    require_fan(cfg)?;
    let phi = steps as f64 * std::f64::consts::PI / (2.0 * cfg.n() as f64);
    let (s2, c2) = (2.0 * phi).sin_cos();
    let r = RMat::from_row_slice(2, 2, &[c2, s2, s2, -c2]);
    match_unitary(&r, cfg)?.ok_or(CoreError::NoMatchingAction)
}

/// Translates the pattern by `ε`: returns `exp[iD(Kᵀε)]u`, so that
/// `ψ(x + ε; u) = ψ(x; translate_controls(u, ε))`.
pub fn translate_controls(u: &Controls, eps: &RVec, cfg: &WaveConfig) -> Controls {
    assert_eq!(eps.len(), cfg.d(), "translation must be a d-vector");
    DiagPhase::new(cfg.k_matrix().transpose() * eps).apply(u)
}

/// Constant-power path kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Geodesic,
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathKind::Direct => write!(f, "direct"),
            PathKind::Geodesic => write!(f, "geodesic"),
        }
    }
}

#[derive(Debug, Clone)]
enum PathCurve {
    /// `u(t) = exp[i t D(h)] u₀`, `t ∈ [0, 1]`.
    Phase { h: RVec },
    /// `ũ(t) = ũ₀ cos t + w sin t`, `t ∈ [0, L]`, `w ⟂ ũ₀` unit.
    GreatCircle { base: RVec, tangent: RVec },
    /// Zero-length path.
    Still,
}

/// A constant-power curve of controls on the `ℂ^{2N}` unit sphere.
#[derive(Debug, Clone)]
pub struct TransitionPath {
    pub kind: PathKind,
    u0: Controls,
    u1: Controls,
    arc_length: f64,
    t_end: f64,
    curve: PathCurve,
}

fn to_real(u: &CVec) -> RVec {
    let n = u.len();
    RVec::from_fn(2 * n, |i, _| if i < n { u[i].re } else { u[i - n].im })
}

fn from_real(v: &RVec) -> CVec {
    let n = v.len() / 2;
    CVec::from_fn(n, |i, _| C64::new(v[i], v[n + i]))
}

impl TransitionPath {
    pub fn endpoints(&self) -> (&Controls, &Controls) {
        (&self.u0, &self.u1)
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    /// Parameter value at the end of the curve (1 for direct paths, the arc
    /// length for geodesics, 0 for degenerate paths).
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// The controls at parameter `t ∈ [0, t_end]`. Both curves have constant
    /// speed, so equal parameter steps are equal arc-length steps. The
    /// endpoints are returned exactly.
    pub fn at(&self, t: f64) -> Controls {
        if t <= 0.0 {
            return self.u0.clone();
        }
        if t >= self.t_end {
            return self.u1.clone();
        }
        match &self.curve {
            PathCurve::Phase { h } => DiagPhase::new(h.clone()).apply_scaled(&self.u0, t),
            PathCurve::GreatCircle { base, tangent } => {
                let (s, c) = t.sin_cos();
                Controls::new(from_real(&(base * c + tangent * s))).expect("even length")
            }
            PathCurve::Still => self.u0.clone(),
        }
    }

    /// The controls at the given fraction of the arc length.
    pub fn at_fraction(&self, fraction: f64) -> Controls {
        self.at(fraction * self.t_end)
    }

    /// `count ≥ 2` samples at equal arc-length increments, endpoints exact.
    pub fn sample_uniform(&self, count: usize) -> Vec<Controls> {
        assert!(count >= 2, "need at least the two endpoints");
        (0..count)
            .map(|i| self.at_fraction(i as f64 / (count - 1) as f64))
            .collect()
    }
}

fn require_unit(u: &Controls) -> Result<(), CoreError> {
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(CoreError::NotUnitNorm { norm });
    }
    Ok(())
}

/// The translation path `u(t) = exp[i t D(Kᵀε)] u₀` for `t ∈ [0, 1]`.
/// Its speed is constant, so the arc length is `‖D(Kᵀε) u₀‖`.
pub fn direct_path(u0: &Controls, eps: &RVec, cfg: &WaveConfig) -> Result<TransitionPath, CoreError> {
    require_unit(u0)?;
    let h = cfg.k_matrix().transpose() * eps;
    let n = u0.n_pairs();
    let mut speed2 = 0.0;
    for j in 0..n {
        speed2 += h[j] * h[j] * (u0.alpha(j).norm_sqr() + u0.beta(j).norm_sqr());
    }
    let arc_length = speed2.sqrt();
    let u1 = DiagPhase::new(h.clone()).apply(u0);
    Ok(TransitionPath {
        kind: PathKind::Direct,
        u0: u0.clone(),
        u1,
        arc_length,
        t_end: if arc_length > 0.0 { 1.0 } else { 0.0 },
        curve: if arc_length > 0.0 {
            PathCurve::Phase { h }
        } else {
            PathCurve::Still
        },
    })
}

/// The minimal-arc-length constant-power path: the great circle between the
/// endpoints on the real `ℝ^{4N}` unit sphere, parametrized by arc length;
/// its length is `arccos(ũ₀·ũ₁)`. Antipodal endpoints are rejected since
/// the shortest path is not unique there; route through a waypoint instead.
pub fn geodesic_path(u0: &Controls, u1: &Controls) -> Result<TransitionPath, CoreError> {
    require_unit(u0)?;
    require_unit(u1)?;
    let base = to_real(u0.as_vector());
    let tip = to_real(u1.as_vector());
    let dot = base.dot(&tip).clamp(-1.0, 1.0);
    if dot >= 1.0 - 1e-14 {
        return Ok(TransitionPath {
            kind: PathKind::Geodesic,
            u0: u0.clone(),
            u1: u1.clone(),
            arc_length: 0.0,
            t_end: 0.0,
            curve: PathCurve::Still,
        });
    }
    if dot <= -1.0 + 1e-12 {
        return Err(CoreError::AntipodalEndpoints);
    }
    let arc_length = dot.acos();
    // unit tangent at ũ₀ pointing toward ũ₁ (the component of ũ₁ ⟂ ũ₀,
    // normalized) — this keeps the curve on the sphere and lands on ũ₁
    let tangent = (&tip - &base * dot).normalize();
    Ok(TransitionPath {
        kind: PathKind::Geodesic,
        u0: u0.clone(),
        u1: u1.clone(),
        arc_length,
        t_end: arc_length,
        curve: PathCurve::GreatCircle { base, tangent },
    })
}

/// Average of the potential over a region by the composite midpoint rule
/// with `resolution` cells per axis. Values are accumulated by
/// deterministic pairwise summation.
pub fn total_arp(
    region: &Region,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
    resolution: &[usize],
) -> f64 {
    let d = region.dim();
    assert_eq!(resolution.len(), d, "one cell count per axis");
    assert!(resolution.iter().all(|&r| r > 0), "cell counts must be positive");
    let total: usize = resolution.iter().product();
    let values = par::map_indexed(total, |flat| {
        let mut rem = flat;
        let mut x = RVec::zeros(d);
        for a in (0..d).rev() {
            let i = rem % resolution[a];
            rem /= resolution[a];
            x[a] = region.lo[a] + region.extent(a) * (i as f64 + 0.5) / resolution[a] as f64;
        }
        crate::wavefield::arp_value(&x, u, cfg, spec)
    });
    pairwise_sum(&values) / total as f64
}

/// Default midpoint cells per axis for region averages.
pub const DEFAULT_REGION_RESOLUTION: usize = 129;
/// Default number of path segments for the cost quadrature.
pub const DEFAULT_PATH_SAMPLES: usize = 257;

/// Arc-length line integral of the region-averaged potential along a
/// transition path, by the composite midpoint rule over `n_samples`
/// segments. Bounded by `arc_length · λ_max(Q(0))` plus quadrature error.
pub fn transition_cost(
    path: &TransitionPath,
    region: &Region,
    region_resolution: &[usize],
    cfg: &WaveConfig,
    spec: &PotentialSpec,
    n_samples: usize,
) -> f64 {
    assert!(n_samples >= 2, "need at least two path segments");
    if path.arc_length == 0.0 {
        return 0.0;
    }
    let averages = par::map_indexed(n_samples, |k| {
        let u = path.at_fraction((k as f64 + 0.5) / n_samples as f64);
        total_arp(region, &u, cfg, spec, region_resolution)
    });
    path.arc_length * pairwise_sum(&averages) / n_samples as f64
}
