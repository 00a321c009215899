//! Plane-wave configurations, pressure fields and the quadratic radiation
//! potential in the ambient (`N`-dimensional periodic) and restricted
//! (`d`-dimensional) settings.
//!
//! The pressure field of `N` standing plane-wave pairs is
//! `p(x; u) = Σ_j α_j e^{i k_j·x} + β_j e^{-i k_j·x}` and equals the ambient
//! field `p_N(y; u) = Σ_j α_j e^{i y_j} + β_j e^{-i y_j}` evaluated on the
//! affine subspace `y = Kᵀx + γ`. The potential is a Hermitian quadratic in
//! `[p; ∇p]`, equivalently `ψ(x; u) = u* Q(x) u` with `Q(x) = M(x)* A M(x)`.
//! Both evaluation paths are implemented so each serves as the oracle for the
//! other.

use crate::error::CoreError;
use crate::linalg::{hermitian_eigen, singular_values};
use crate::{C64, CMat, CVec, RMat, RVec};

const RANK_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

/// Geometry of the problem: the `d×N` wavevector matrix `K`, one column per
/// transducer pair, plus the affine offset `γ` of the evaluation subspace.
#[derive(Debug, Clone)]
pub struct WaveConfig {
    k: RMat,
    gamma: RVec,
    wavenumber: f64,
}

impl WaveConfig {
    /// Builds a configuration from the wavevectors, enforcing equal column
    /// norms, full rank and `N ≥ d`. `γ` defaults to zero.
    pub fn new(k: RMat, gamma: Option<RVec>) -> Result<Self, CoreError> {
        let first = k.column(0).norm();
        for (j, col) in k.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - first).abs() > NORM_TOL * first.max(1.0) {
                return Err(CoreError::UnequalColumnNorms {
                    column: j,
                    norm,
                    expected: first,
                });
            }
        }
        Self::general(k, gamma)
    }

    /// Builds a configuration without the equal-column-norm requirement.
    /// Cut lines/planes of arbitrary slope (as used by the tiling and
    /// periodicity machinery) need wavevectors of unequal length; rank and
    /// shape are still validated.
    pub fn general(k: RMat, gamma: Option<RVec>) -> Result<Self, CoreError> {
        let (d, n) = k.shape();
        if n < d {
            return Err(CoreError::TooFewWaves { n, d });
        }
        let sv = singular_values(&k);
        let largest = sv[0];
        let smallest = sv[d - 1];
        // negated form so NaN singular values are treated as rank deficient
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(smallest > RANK_TOL * largest) {
            return Err(CoreError::RankDeficient { smallest, largest });
        }
        let gamma = gamma.unwrap_or_else(|| RVec::zeros(n));
        if gamma.len() != n {
            return Err(CoreError::DimensionMismatch {
                what: "gamma",
                expected: n,
                got: gamma.len(),
            });
        }
        let wavenumber = k
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        Ok(WaveConfig {
            k,
            gamma,
            wavenumber,
        })
    }

    /// The standard planar fan: `k_j = k·[cos((j-1)π/N), sin((j-1)π/N)]`.
    pub fn fan(n: usize) -> Self {
        Self::fan_with_wavenumber(n, 1.0)
    }

    pub fn fan_with_wavenumber(n: usize, k: f64) -> Self {
        assert!(n >= 2, "a planar fan needs at least two wave pairs");
        let mut m = RMat::zeros(2, n);
        for j in 0..n {
            let theta = j as f64 * std::f64::consts::PI / n as f64;
            m[(0, j)] = k * theta.cos();
            m[(1, j)] = k * theta.sin();
        }
        Self::new(m, None).expect("fan configuration is always valid")
    }

    /// The six unit directions of an icosahedron (d = 3, N = 6).
    pub fn icosahedral() -> Self {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let s = 1.0 / (1.0 + phi * phi).sqrt();
        #[rustfmt::skip]
        let k = RMat::from_row_slice(3, 6, &[
            0.0, 1.0, phi, 0.0, -1.0, phi,
            1.0, phi, 0.0, 1.0, phi, 0.0,
            phi, 0.0, 1.0, -phi, 0.0, -1.0,
        ]) * s;
        Self::new(k, None).expect("icosahedral configuration is always valid")
    }

    /// Lifts a planar configuration to 3-D: every column gains a zero third
    /// component and one axis-aligned pair `k·e₃` is appended. The resulting
    /// field is periodic along `x₃` only.
    pub fn lifted(planar: &WaveConfig) -> Result<Self, CoreError> {
        if planar.d() != 2 {
            return Err(CoreError::TemplateMismatch {
                reason: format!("expected a planar configuration, got d = {}", planar.d()),
            });
        }
        let n = planar.n();
        let mut k = RMat::zeros(3, n + 1);
        for j in 0..n {
            k[(0, j)] = planar.k[(0, j)];
            k[(1, j)] = planar.k[(1, j)];
        }
        k[(2, n)] = planar.wavenumber;
        let mut gamma = RVec::zeros(n + 1);
        gamma.rows_mut(0, n).copy_from(&planar.gamma);
        Self::new(k, Some(gamma))
    }

    pub fn d(&self) -> usize {
        self.k.nrows()
    }

    pub fn n(&self) -> usize {
        self.k.ncols()
    }

    pub fn k_matrix(&self) -> &RMat {
        &self.k
    }

    pub fn wavevector(&self, j: usize) -> RVec {
        self.k.column(j).into_owned()
    }

    pub fn gamma(&self) -> &RVec {
        &self.gamma
    }

    /// Returns a copy with a different affine offset.
    pub fn with_gamma(&self, gamma: RVec) -> Result<Self, CoreError> {
        Self::general(self.k.clone(), Some(gamma))
    }

    /// Common wavevector length (largest column norm for `general` configs).
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Wavelength `2π/k`.
    pub fn lambda(&self) -> f64 {
        std::f64::consts::TAU / self.wavenumber
    }

    /// Ambient coordinates of a physical point: `y = Kᵀx + γ`.
    pub fn to_ambient(&self, x: &RVec) -> RVec {
        assert_eq!(x.len(), self.d(), "point dimension mismatch");
        self.k.transpose() * x + &self.gamma
    }

    /// True when the columns match the standard fan within `tol`.
    pub fn fan_deviation(&self) -> Option<(usize, f64)> {
        if self.d() != 2 {
            return Some((0, f64::INFINITY));
        }
        let n = self.n();
        let k = self.wavenumber;
        let mut worst: Option<(usize, f64)> = None;
        for j in 0..n {
            let theta = j as f64 * std::f64::consts::PI / n as f64;
            let dx = self.k[(0, j)] - k * theta.cos();
            let dy = self.k[(1, j)] - k * theta.sin();
            let dev = (dx * dx + dy * dy).sqrt();
            if worst.map(|(_, w)| dev > w).unwrap_or(true) {
                worst = Some((j, dev));
            }
        }
        worst.filter(|&(_, dev)| dev > 1e-10)
    }
}

/// Transducer amplitudes/phases: the complex vector `u = [α₁..α_N, β₁..β_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    u: CVec,
}

impl Controls {
    pub fn new(u: CVec) -> Result<Self, CoreError> {
        if !u.len().is_multiple_of(2) || u.is_empty() {
            return Err(CoreError::DimensionMismatch {
                what: "controls",
                expected: 2,
                got: u.len(),
            });
        }
        Ok(Controls { u })
    }

    /// Builds controls rescaled to unit norm.
    pub fn normalized(u: CVec) -> Result<Self, CoreError> {
        let norm = u.norm();
        if norm == 0.0 {
            return Err(CoreError::DimensionMismatch {
                what: "controls (zero vector cannot be normalized)",
                expected: 1,
                got: 0,
            });
        }
        Self::new(u / C64::new(norm, 0.0))
    }

    /// All pairs share the same `(α, β)`.
    pub fn uniform(n: usize, alpha: C64, beta: C64) -> Self {
        let mut u = CVec::zeros(2 * n);
        for j in 0..n {
            u[j] = alpha;
            u[n + j] = beta;
        }
        Controls { u }
    }

    pub fn from_real(values: &[f64]) -> Result<Self, CoreError> {
        Self::new(CVec::from_iterator(
            values.len(),
            values.iter().map(|&v| C64::new(v, 0.0)),
        ))
    }

    pub fn n_pairs(&self) -> usize {
        self.u.len() / 2
    }

    pub fn alpha(&self, j: usize) -> C64 {
        self.u[j]
    }

    pub fn beta(&self, j: usize) -> C64 {
        self.u[self.n_pairs() + j]
    }

    pub fn as_vector(&self) -> &CVec {
        &self.u
    }

    pub fn norm(&self) -> f64 {
        self.u.norm()
    }

    /// Appends one transducer pair.
    pub fn extended(&self, alpha: C64, beta: C64) -> Self {
        let n = self.n_pairs();
        let mut u = CVec::zeros(2 * n + 2);
        for j in 0..n {
            u[j] = self.u[j];
            u[n + 1 + j] = self.u[n + j];
        }
        u[n] = alpha;
        u[2 * n + 1] = beta;
        Controls { u }
    }

    /// Drops the last transducer pair.
    pub fn truncated(&self) -> Self {
        let n = self.n_pairs();
        assert!(n >= 2, "cannot drop the only pair");
        let mut u = CVec::zeros(2 * n - 2);
        for j in 0..n - 1 {
            u[j] = self.u[j];
            u[n - 1 + j] = self.u[n + j];
        }
        Controls { u }
    }
}

/// The diagonal phase action `D(γ) = diag(γ, -γ)`; `exp[iD(γ)]` multiplies
/// `α_j` by `e^{iγ_j}` and `β_j` by `e^{-iγ_j}`, preserving power.
#[derive(Debug, Clone)]
pub struct DiagPhase {
    gamma: RVec,
}

impl DiagPhase {
    pub fn new(gamma: RVec) -> Self {
        DiagPhase { gamma }
    }

    pub fn gamma(&self) -> &RVec {
        &self.gamma
    }

    /// Applies `exp[i t D(γ)]` to the controls.
    pub fn apply_scaled(&self, u: &Controls, t: f64) -> Controls {
        let n = u.n_pairs();
        assert_eq!(self.gamma.len(), n, "phase vector length mismatch");
        let mut out = u.as_vector().clone();
        for j in 0..n {
            let rot = C64::from_polar(1.0, t * self.gamma[j]);
            out[j] *= rot;
            out[n + j] *= rot.conj();
        }
        Controls { u: out }
    }

    pub fn apply(&self, u: &Controls) -> Controls {
        self.apply_scaled(u, 1.0)
    }
}

/// The Hermitian matrix defining the quadratic potential, either the diagonal
/// physical form `diag(𝔞, -𝔟 I_d)` or a full `(d+1)×(d+1)` Hermitian matrix.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Diagonal { a: f64, b: f64 },
    General { matrix: CMat },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Diagonal { a: 1.0, b: 1.0 }
    }
}

impl PotentialSpec {
    pub fn diagonal(a: f64, b: f64) -> Self {
        PotentialSpec::Diagonal { a, b }
    }

    pub fn general(matrix: CMat) -> Result<Self, CoreError> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(CoreError::DimensionMismatch {
                what: "potential matrix",
                expected: n,
                got: matrix.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > 1e-12 {
                    return Err(CoreError::NotHermitian {
                        i,
                        j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(PotentialSpec::General { matrix })
    }

    /// The `(d+1)×(d+1)` Hermitian matrix. Exact for the diagonal form.
    pub fn full_matrix(&self, d: usize) -> CMat {
        match self {
            PotentialSpec::Diagonal { a, b } => {
                let mut m = CMat::zeros(d + 1, d + 1);
                m[(0, 0)] = C64::new(*a, 0.0);
                for i in 1..=d {
                    m[(i, i)] = C64::new(-b, 0.0);
                }
                m
            }
            PotentialSpec::General { matrix } => {
                assert_eq!(
                    matrix.nrows(),
                    d + 1,
                    "potential matrix size does not match the spatial dimension"
                );
                matrix.clone()
            }
        }
    }

    /// The ambient `(N+1)×(N+1)` lift `Bᵀ A B` with `B = diag(1, K)`, so that
    /// the ambient potential restricts to the physical one on `y = Kᵀx + γ`.
    /// For the diagonal form this is `diag(𝔞, -𝔟 KᵀK)`.
    pub fn lifted_matrix(&self, cfg: &WaveConfig) -> CMat {
        let (d, n) = (cfg.d(), cfg.n());
        let a = self.full_matrix(d);
        let mut b = CMat::zeros(d + 1, n + 1);
        b[(0, 0)] = C64::new(1.0, 0.0);
        for i in 0..d {
            for j in 0..n {
                b[(i + 1, j + 1)] = C64::new(cfg.k_matrix()[(i, j)], 0.0);
            }
        }
        b.adjoint() * a * b
    }
}

fn check_pair(u: &Controls, cfg: &WaveConfig) {
    assert_eq!(
        u.n_pairs(),
        cfg.n(),
        "controls have {} pairs but the configuration has {}",
        u.n_pairs(),
        cfg.n()
    );
}

/// Ambient pressure `p_N(y; u) = Σ_j α_j e^{i y_j} + β_j e^{-i y_j}`,
/// 2π-periodic in every coordinate.
pub fn pressure_nd(y: &RVec, u: &Controls) -> Result<C64, CoreError> {
    let n = u.n_pairs();
    if y.len() != n {
        return Err(CoreError::DimensionMismatch {
            what: "ambient point",
            expected: n,
            got: y.len(),
        });
    }
    let mut p = C64::new(0.0, 0.0);
    for j in 0..n {
        let e = C64::from_polar(1.0, y[j]);
        p += u.alpha(j) * e + u.beta(j) * e.conj();
    }
    Ok(p)
}

/// Gradient of the ambient pressure, `(∇p_N)_j = i(α_j e^{i y_j} - β_j e^{-i y_j})`.
pub fn pressure_gradient_nd(y: &RVec, u: &Controls) -> CVec {
    let n = u.n_pairs();
    assert_eq!(y.len(), n, "ambient point dimension mismatch");
    CVec::from_iterator(n, (0..n).map(|j| {
        let e = C64::from_polar(1.0, y[j]);
        C64::i() * (u.alpha(j) * e - u.beta(j) * e.conj())
    }))
}

/// Restricted pressure `p_d(x; u) = p_N(Kᵀx + γ; u)`.
pub fn pressure_restricted(x: &RVec, u: &Controls, cfg: &WaveConfig) -> Result<C64, CoreError> {
    check_pair(u, cfg);
    if x.len() != cfg.d() {
        return Err(CoreError::DimensionMismatch {
            what: "physical point",
            expected: cfg.d(),
            got: x.len(),
        });
    }
    pressure_nd(&cfg.to_ambient(x), u)
}

/// Gradient of the restricted pressure, `∇p_d(x) = K ∇p_N(Kᵀx + γ)`.
pub fn pressure_gradient_restricted(x: &RVec, u: &Controls, cfg: &WaveConfig) -> CVec {
    check_pair(u, cfg);
    let g = pressure_gradient_nd(&cfg.to_ambient(x), u);
    cfg.k_matrix().map(C64::from) * g
}

/// The `(d+1)×2N` matrix `M(x) = [M₊(x) M₋(x)]` with
/// `M±(x) = [e^{±i(xᵀK + γᵀ)}; ±i K diag(e^{±i(xᵀK + γᵀ)})]`.
pub fn m_matrix(x: &RVec, cfg: &WaveConfig) -> CMat {
    let (d, n) = (cfg.d(), cfg.n());
    let y = cfg.to_ambient(x);
    let mut m = CMat::zeros(d + 1, 2 * n);
    for j in 0..n {
        let e = C64::from_polar(1.0, y[j]);
        m[(0, j)] = e;
        m[(0, n + j)] = e.conj();
        for i in 0..d {
            let k = cfg.k_matrix()[(i, j)];
            m[(i + 1, j)] = C64::i() * k * e;
            m[(i + 1, n + j)] = -C64::i() * k * e.conj();
        }
    }
    m
}

/// Ambient analogue of [`m_matrix`]: wavevectors are the canonical basis of
/// `ℝ^N`, so the matrix is `(N+1)×2N` and the potential uses the lifted `A`.
pub fn m_matrix_nd(y: &RVec, n: usize) -> CMat {
    assert_eq!(y.len(), n, "ambient point dimension mismatch");
    let mut m = CMat::zeros(n + 1, 2 * n);
    for j in 0..n {
        let e = C64::from_polar(1.0, y[j]);
        m[(0, j)] = e;
        m[(0, n + j)] = e.conj();
        m[(j + 1, j)] = C64::i() * e;
        m[(j + 1, n + j)] = -C64::i() * e.conj();
    }
    m
}

/// The Hermitian `2N×2N` quadratic-form matrix `Q(x) = M(x)* A M(x)` of the
/// restricted potential: `ψ_d(x; u) = u* Q(x) u`.
pub fn q_matrix(x: &RVec, cfg: &WaveConfig, spec: &PotentialSpec) -> CMat {
    let m = m_matrix(x, cfg);
    let a = spec.full_matrix(cfg.d());
    m.adjoint() * a * m
}

/// Ambient quadratic-form matrix `Q_N(y)` built from the lifted potential,
/// so that `Q(x) = Q_N(Kᵀx + γ)`.
pub fn q_matrix_nd(y: &RVec, cfg: &WaveConfig, spec: &PotentialSpec) -> CMat {
    let m = m_matrix_nd(y, cfg.n());
    let a = spec.lifted_matrix(cfg);
    m.adjoint() * a * m
}

fn quadratic_form(p: C64, grad: &CVec, a: &CMat) -> f64 {
    let d = grad.len();
    let mut v = CVec::zeros(d + 1);
    v[0] = p;
    for i in 0..d {
        v[i + 1] = grad[i];
    }
    (v.adjoint() * a * v)[(0, 0)].re
}

/// Restricted potential `ψ_d(x; u)`, evaluated directly from the pressure and
/// its gradient. For the diagonal form this is `𝔞|p|² - 𝔟‖∇p‖²`.
pub fn arp_value(x: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> f64 {
    check_pair(u, cfg);
    assert_eq!(x.len(), cfg.d(), "physical point dimension mismatch");
    let y = cfg.to_ambient(x);
    let p = pressure_nd(&y, u).expect("dimensions checked");
    let g_ambient = pressure_gradient_nd(&y, u);
    match spec {
        PotentialSpec::Diagonal { a, b } => {
            // ‖∇p_d‖² = (∇p_N)* KᵀK (∇p_N); computed without forming K∇p twice.
            let g = cfg.k_matrix().map(C64::from) * g_ambient;
            a * p.norm_sqr() - b * g.norm_squared()
        }
        PotentialSpec::General { .. } => {
            let g = cfg.k_matrix().map(C64::from) * g_ambient;
            quadratic_form(p, &g, &spec.full_matrix(cfg.d()))
        }
    }
}

/// Restricted potential through the quadratic-form path `u* Q(x) u`.
/// Retained as the algebraic twin of [`arp_value`]; the two agree to
/// roundoff and each is the other's test oracle.
pub fn arp_value_quadratic(x: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> f64 {
    check_pair(u, cfg);
    let q = q_matrix(x, cfg, spec);
    (u.as_vector().adjoint() * q * u.as_vector())[(0, 0)].re
}

/// Ambient potential `ψ_N(y; u)` with the lifted matrix
/// `A_N = diag(𝔞, -𝔟 KᵀK)` (or `Bᵀ A B` in the general case), so that
/// `ψ_d(x; u) = ψ_N(Kᵀx + γ; u)`.
pub fn arp_nd(y: &RVec, u: &Controls, cfg: &WaveConfig, spec: &PotentialSpec) -> f64 {
    check_pair(u, cfg);
    let p = pressure_nd(y, u).expect("dimension checked by caller contract");
    let g = pressure_gradient_nd(y, u);
    match spec {
        PotentialSpec::Diagonal { a, b } => {
            let kg = cfg.k_matrix().map(C64::from) * &g;
            a * p.norm_sqr() - b * kg.norm_squared()
        }
        PotentialSpec::General { .. } => quadratic_form(p, &g, &spec.lifted_matrix(cfg)),
    }
}

/// Spectral range `[λ_min(Q(0)), λ_max(Q(0))]`. Since `Q(x)` is unitarily
/// similar to `Q(0)` at every `x`, these bound `ψ_d` globally.
pub fn psi_bounds(cfg: &WaveConfig, spec: &PotentialSpec) -> (f64, f64) {
    let q = q_matrix(&RVec::zeros(cfg.d()), cfg, spec);
    let eig = hermitian_eigen(&q);
    (eig.values[0], *eig.values.last().unwrap())
}

/// Evaluates both sides of the slice identity for a lifted planar
/// configuration: the 3-D potential equals
/// `ψ₂(x̃) + 4𝔞 sin²(k x₃) - 4𝔟 k² cos²(k x₃) + 4𝔞 sin(k x₃)·Im p₂(x̃)`
/// when the appended axis pair has `(α, β) = (1, -1)`.
pub fn arp_25d_identity(
    x: &RVec,
    cfg3: &WaveConfig,
    cfg2: &WaveConfig,
    u3: &Controls,
    spec: &PotentialSpec,
) -> Result<(f64, f64), CoreError> {
    let (a, b) = match spec {
        PotentialSpec::Diagonal { a, b } => (*a, *b),
        PotentialSpec::General { .. } => {
            return Err(CoreError::TemplateMismatch {
                reason: "the slice identity needs the diagonal potential form".into(),
            })
        }
    };
    let n2 = cfg2.n();
    if cfg3.d() != 3 || cfg2.d() != 2 || cfg3.n() != n2 + 1 {
        return Err(CoreError::TemplateMismatch {
            reason: format!(
                "expected d=3/N={} over d=2/N={}, got d={}/N={}",
                n2 + 1,
                n2,
                cfg3.d(),
                cfg3.n()
            ),
        });
    }
    for j in 0..n2 {
        let dev = (cfg3.k_matrix()[(0, j)] - cfg2.k_matrix()[(0, j)]).abs()
            + (cfg3.k_matrix()[(1, j)] - cfg2.k_matrix()[(1, j)]).abs()
            + cfg3.k_matrix()[(2, j)].abs();
        if dev > 1e-12 {
            return Err(CoreError::TemplateMismatch {
                reason: format!("column {j} is not the planar column lifted with zero height"),
            });
        }
    }
    let kz = cfg3.k_matrix()[(2, n2)];
    if cfg3.k_matrix()[(0, n2)].abs() + cfg3.k_matrix()[(1, n2)].abs() > 1e-12 || kz <= 0.0 {
        return Err(CoreError::TemplateMismatch {
            reason: "last column must point along +e₃".into(),
        });
    }
    if u3.n_pairs() != n2 + 1 {
        return Err(CoreError::DimensionMismatch {
            what: "lifted controls",
            expected: n2 + 1,
            got: u3.n_pairs(),
        });
    }
    let pair = (u3.alpha(n2) - C64::new(1.0, 0.0)).norm() + (u3.beta(n2) + C64::new(1.0, 0.0)).norm();
    if pair > 1e-12 {
        return Err(CoreError::TemplateMismatch {
            reason: "axis pair must carry (α, β) = (1, -1)".into(),
        });
    }

    let u2 = u3.truncated();
    let lhs = arp_value(x, u3, cfg3, spec);
    let xt = RVec::from_column_slice(&[x[0], x[1]]);
    let x3 = x[2];
    let p2 = pressure_restricted(&xt, &u2, cfg2)?;
    let (s, c) = (kz * x3).sin_cos();
    let rhs = arp_value(&xt, &u2, cfg2, spec) + 4.0 * a * s * s - 4.0 * b * kz * kz * c * c
        + 4.0 * a * s * p2.im;
    Ok((lhs, rhs))
}
