//! Analytic derivative calculus of the quadratic potential, eigenvector-based
//! minimum placement, Lagrange multipliers and level-set families.
//!
//! The gradient and Hessian of `ψ(x; u) = u* Q(x) u` follow from the unitary
//! translation structure of `Q`:
//!
//! ```text
//! ∇ψ  = 2 [K, -K] Im(diag(ū) Q u)
//! ∇²ψ = 2 [K, -K] (diag(ū) Q diag(u) - Re[diag(ū) diag(Q u)]) [K; -K]ᵀ
//! ```
//!
//! In the ambient setting the wavevectors are the canonical basis, so the
//! bracket matrices reduce to `[I, -I]` and the potential carries the lifted
//! Hermitian matrix. The restricted derivatives follow by the chain rule:
//! `∇ψ_d = K ∇ψ_N` and `∇²ψ_d = K ∇²ψ_N Kᵀ`.

pub mod fd;

use crate::error::CoreError;
use crate::linalg::{hermitian_eigen, null_space_basis, HermitianEigen};
use crate::wavefield::{q_matrix, q_matrix_nd, Controls, PotentialSpec, WaveConfig};
use crate::{C64, CMat, CVec, RMat, RVec};

/// Shared core of the gradient formula: the `2N`-vector
/// `s = Im(diag(ū) Q u)` folded into `g_j = 2(s_j - s_{N+j})`.
fn gradient_core(q: &CMat, u: &Controls) -> RVec {
    let n = u.n_pairs();
    let qu = q * u.as_vector();
    RVec::from_fn(n, |j, _| {
        let sj = (u.as_vector()[j].conj() * qu[j]).im;
        let snj = (u.as_vector()[n + j].conj() * qu[n + j]).im;
        2.0 * (sj - snj)
    })
}

/// Shared core of the Hessian formula: the real `N×N` fold of
/// `diag(ū) Q diag(u) - Re[diag(ū) diag(Qu)]` through `[I, -I]`.
fn hessian_core(q: &CMat, u: &Controls) -> RMat {
    let n = u.n_pairs();
    let uv = u.as_vector();
    let qu = q * uv;
    let mut h = RMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let s = uv[r].conj() * q[(r, c)] * uv[c] - uv[r].conj() * q[(r, n + c)] * uv[n + c]
                - uv[n + r].conj() * q[(n + r, c)] * uv[c]
                + uv[n + r].conj() * q[(n + r, n + c)] * uv[n + c];
            h[(r, c)] = 2.0 * s.re;
        }
    }
    // diagonal correction: both halves of each pair contribute with weight +1
    // because the fold squares the ±1 signs
    for r in 0..n {
        let corr = (uv[r].conj() * qu[r]).re + (uv[n + r].conj() * qu[n + r]).re;
        h[(r, r)] -= 2.0 * corr;
    }
    h
}

/// Gradient of the ambient potential `ψ_N` at `y` (an `N`-vector).
pub fn arp_gradient_nd(y: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> RVec {
    gradient_core(&q_matrix_nd(y, cfg, spec), u)
}

/// Hessian of the ambient potential `ψ_N` at `y`.
pub fn arp_hessian_nd(y: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> RMat {
    hessian_core(&q_matrix_nd(y, cfg, spec), u)
}

/// Gradient of the restricted potential via the chain rule,
/// `∇ψ_d(x) = K ∇ψ_N(Kᵀx + γ)`.
pub fn arp_gradient_restricted(
    x: &RVec,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> RVec {
    cfg.k_matrix() * arp_gradient_nd(&cfg.to_ambient(x), u, cfg, spec)
}

/// Hessian of the restricted potential, `K ∇²ψ_N(Kᵀx + γ) Kᵀ`.
pub fn arp_hessian_restricted(
    x: &RVec,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> RMat {
    let h = arp_hessian_nd(&cfg.to_ambient(x), u, cfg, spec);
    cfg.k_matrix() * h * cfg.k_matrix().transpose()
}

/// Gradient of the restricted potential evaluated directly from the
/// restricted quadratic form `Q(x)` — the algebraic twin of
/// [`arp_gradient_restricted`], kept as an independent route.
pub fn arp_gradient_direct(
    x: &RVec,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> RVec {
    cfg.k_matrix() * gradient_core(&q_matrix(x, cfg, spec), u)
}

/// Hessian twin of [`arp_gradient_direct`].
pub fn arp_hessian_direct(x: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> RMat {
    let h = hessian_core(&q_matrix(x, cfg, spec), u);
    cfg.k_matrix() * h * cfg.k_matrix().transpose()
}

/// Orthonormal basis `Z` of `null(K)`: `K Z = 0` and `ZᵀZ = I`.
/// For `N = d` the basis has zero columns.
#[derive(Debug, Clone)]
pub struct NullBasis {
    z: RMat,
}

impl NullBasis {
    pub fn columns(&self) -> usize {
        self.z.ncols()
    }

    pub fn matrix(&self) -> &RMat {
        &self.z
    }

    /// Coordinates of `v` along the basis: `Zᵀ v`.
    pub fn coefficients(&self, v: &RVec) -> RVec {
        self.z.transpose() * v
    }
}

/// Computes an orthonormal null-space basis of the wavevector matrix.
pub fn null_basis(cfg: &WaveConfig) -> NullBasis {
    NullBasis {
        z: null_space_basis(cfg.k_matrix(), cfg.d()),
    }
}

/// Dual lattice basis for a square invertible configuration: vectors `a_i`
/// with `k_j·a_i = 2π δ_ij`, i.e. `[a₁..a_N] = 2π K⁻ᵀ`.
#[derive(Debug, Clone)]
pub struct DualBasis {
    a: RMat,
}

impl DualBasis {
    pub fn new(cfg: &WaveConfig) -> Result<Self, CoreError> {
        if cfg.n() != cfg.d() {
            return Err(CoreError::NotSquare);
        }
        let kt = cfg.k_matrix().transpose();
        let inv = kt.lu().try_inverse().ok_or(CoreError::RankDeficient {
            smallest: 0.0,
            largest: 1.0,
        })?;
        Ok(DualBasis {
            a: inv * std::f64::consts::TAU,
        })
    }

    pub fn vector(&self, i: usize) -> RVec {
        self.a.column(i).into_owned()
    }

    pub fn matrix(&self) -> &RMat {
        &self.a
    }
}

/// Result of pinning a minimum at a point by eigenvector synthesis.
#[derive(Debug, Clone)]
pub struct MinControls {
    /// Deterministically chosen unit-norm minimum eigenvector of `Q(x₀)`.
    pub controls: Controls,
    /// The minimum eigenvalue: the global minimum value of the potential.
    pub eigenvalue: f64,
    /// Number of eigenvalues within `1e-9·ρ(Q)` of the minimum.
    pub multiplicity: usize,
    /// Basis of the (numerically) minimal eigenspace, one column per tied
    /// eigenvalue; any unit vector in its span is a valid choice.
    pub eigenspace: CMat,
}

/// Chooses the transducer parameters as the minimum eigenvector of `Q(x₀)`,
/// which places a global minimum of value `λ_min(Q(0))` at `x₀`: the gradient
/// vanishes there and the restricted Hessian is positive semidefinite.
pub fn synthesize_min_controls(x0: &RVec, cfg: &WaveConfig, spec: &PotentialSpec) -> MinControls {
    let q = q_matrix(x0, cfg, spec);
    let eig = hermitian_eigen(&q);
    let spectral_radius = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let lambda = eig.values[0];
    let tie = 1e-9 * spectral_radius.max(1.0);
    let multiplicity = eig.values.iter().take_while(|&&v| v - lambda < tie).count();
    let eigenspace = eig.vectors.columns(0, multiplicity).into_owned();
    let controls = Controls::new(eig.vectors.column(0).into_owned()).expect("even length");
    MinControls {
        controls,
        eigenvalue: lambda,
        multiplicity,
        eigenspace,
    }
}

/// Eigendecomposition of the quadratic-form matrix at a point, ascending.
pub fn q_eigen(x: &RVec, cfg: &WaveConfig, spec: &PotentialSpec) -> HermitianEigen {
    hermitian_eigen(&q_matrix(x, cfg, spec))
}

/// Lagrange-multiplier field of the constrained formulation
/// `min ψ_N(y) s.t. Zᵀy = 0`: with orthonormal `Z` the least-squares
/// multipliers are `λ(y) = Zᵀ ∇ψ_N(y)` at `y = Kᵀx + γ`. At stationary
/// points of `ψ_d` these are the KKT multipliers; elsewhere they measure the
/// sensitivity of the potential to shifting the cut subspace.
pub fn lagrange_multipliers(
    x: &RVec,
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
    basis: &NullBasis,
) -> RVec {
    let g = arp_gradient_nd(&cfg.to_ambient(x), u, cfg, spec);
    basis.coefficients(&g)
}

/// First-order sensitivity of `ψ_d(x; exp[iεD(h)]u)` with respect to ε:
/// `∇ψ_N(Kᵀx + γ; u)ᵀ h`. For `h = Kᵀz` this reduces to `∇ψ_d(x)·z`
/// (an in-plane translation); for `h = Zq` it equals `λ(Kᵀx)ᵀq`
/// (a normal shift of the cut subspace).
pub fn phase_sensitivity(
    x: &RVec,
    u: &Controls,
    h: &RVec,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> f64 {
    assert_eq!(h.len(), cfg.n(), "phase direction must be an N-vector");
    let g = arp_gradient_nd(&cfg.to_ambient(x), u, cfg, spec);
    g.dot(h)
}

/// A periodic family of affine subspaces contained in the `ψ = λ` level set
/// when the controls are a real eigenvector `[v; ±v]` of `Q(0)` and `K` is
/// square invertible.
///
/// With the dual vectors `a_i` (`k_j·a_i = 2πδ_ij`), the base space is
/// `S₀ = span{a_j | v_j = 0}` and the members are
/// `S_n = S₀ + Σ_{i∈E} n_i a_i / 2` for every admissible sign vector `n`.
/// Admissibility is decided numerically: flipping the signs of `v` on the
/// support according to `(-1)ⁿ` must again give a λ-eigenvector.
#[derive(Debug, Clone)]
pub struct LevelSetFamily {
    /// The anchor eigenvalue: the value of ψ on every member.
    pub lambda: f64,
    /// +1 when the controls are `[v; v]`, -1 for `[v; -v]`.
    pub pairing: f64,
    /// The real first half of the controls.
    pub v: RVec,
    /// Indices with `v_j = 0` (the base-space directions).
    pub zero_set: Vec<usize>,
    /// Indices with `v_j ≠ 0`.
    pub support: Vec<usize>,
    /// Admissible sign patterns over the support (entries 0 or 1).
    pub admissible: Vec<Vec<u8>>,
    dual: DualBasis,
}

impl LevelSetFamily {
    /// A point of the member `S_n` for `n = admissible[idx]`: the half-lattice
    /// offset plus the base-space combination with the given coefficients.
    pub fn sample(&self, idx: usize, base_coefficients: &[f64]) -> RVec {
        assert_eq!(base_coefficients.len(), self.zero_set.len());
        let n = self.v.len();
        let mut x = RVec::zeros(n);
        for (i, &j) in self.support.iter().enumerate() {
            x += self.dual.vector(j) * (self.admissible[idx][i] as f64 / 2.0);
        }
        for (c, &j) in base_coefficients.iter().zip(&self.zero_set) {
            x += self.dual.vector(j) * *c;
        }
        x
    }

    /// Dimension of the base space `S₀`.
    pub fn base_dim(&self) -> usize {
        self.zero_set.len()
    }
}

const SIGN_SEARCH_CAP: usize = 20;

/// Builds the level-set family for real paired controls. Errors when the
/// controls are not (numerically) an eigenvector of `Q(0)`, are not of the
/// `[v; ±v]` real form, or the support is too large to enumerate.
pub fn level_set_family(
    u: &Controls,
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> Result<LevelSetFamily, CoreError> {
    let n = u.n_pairs();
    let dual = DualBasis::new(cfg)?;

    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(CoreError::NotUnitNorm { norm });
    }

    // detect the [v; v] / [v; -v] real structure
    let mut dev_imag = 0.0_f64;
    for z in u.as_vector().iter() {
        dev_imag = dev_imag.max(z.im.abs());
    }
    let mut dev_plus = 0.0_f64;
    let mut dev_minus = 0.0_f64;
    for j in 0..n {
        dev_plus = dev_plus.max((u.beta(j) - u.alpha(j)).norm());
        dev_minus = dev_minus.max((u.beta(j) + u.alpha(j)).norm());
    }
    let pairing = if dev_plus <= dev_minus { 1.0 } else { -1.0 };
    let deviation = dev_imag.max(dev_plus.min(dev_minus));
    if deviation > 1e-10 {
        return Err(CoreError::NotRealPaired { deviation });
    }

    let q0 = q_matrix(&RVec::zeros(cfg.d()), cfg, spec);
    let qnorm = q0.norm().max(1.0);
    let uu = u.as_vector();
    let lambda = (uu.adjoint() * &q0 * uu)[(0, 0)].re / uu.norm_squared();
    let residual =
        (&q0 * uu - uu * C64::new(lambda, 0.0)).norm() / u.norm().max(f64::MIN_POSITIVE);
    if residual > 1e-9 * qnorm {
        return Err(CoreError::NotAnEigenvector {
            residual,
            tol: 1e-9 * qnorm,
        });
    }

    let v = RVec::from_fn(n, |j, _| u.alpha(j).re);
    let zero_set: Vec<usize> = (0..n).filter(|&j| v[j] == 0.0).collect();
    let support: Vec<usize> = (0..n).filter(|&j| v[j] != 0.0).collect();
    if support.len() > SIGN_SEARCH_CAP {
        return Err(CoreError::SignSearchTooLarge {
            max: SIGN_SEARCH_CAP,
            got: support.len(),
        });
    }

    let mut admissible = Vec::new();
    for mask in 0u32..(1u32 << support.len()) {
        let mut w = v.clone();
        for (i, &j) in support.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w[j] = -w[j];
            }
        }
        let mut cand = CVec::zeros(2 * n);
        for j in 0..n {
            cand[j] = C64::new(w[j], 0.0);
            cand[n + j] = C64::new(pairing * w[j], 0.0);
        }
        let res = (&q0 * &cand - &cand * C64::new(lambda, 0.0)).norm() / cand.norm();
        if res < 1e-8 * qnorm {
            admissible.push((0..support.len()).map(|i| (mask >> i & 1) as u8).collect());
        }
    }

    Ok(LevelSetFamily {
        lambda,
        pairing,
        v,
        zero_set,
        support,
        admissible,
        dual,
    })
}
