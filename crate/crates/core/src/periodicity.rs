//! Periodicity classification of a wavevector configuration and the
//! commensurate-angle machinery for moiré superpositions.
//!
//! The restricted field is periodic exactly when `range(Kᵀ) ∩ (2π)ℤ^N` has
//! dimension `d`, and quasiperiodic when the dimension is at most `d - 1`.
//! Membership of `2πn` in `range(Kᵀ)` is equivalent to `Zᵀn = 0` where the
//! columns of `Z` span `null(K)`, so the classifier searches integer vectors
//! `n` with `‖Zᵀn‖ < tol·‖n‖` inside the box `‖n‖_∞ ≤ bound`.
//!
//! With irrational entries in `K` the property is undecidable in floating
//! point; a `Quasiperiodic` verdict is therefore a certificate that no
//! witness exists inside the searched box at the given tolerance, never a
//! proof for all of `ℤ^N`. The report records the bound and tolerance, and
//! the verdict degrades to `Indeterminate` whenever the search cannot
//! certify exhaustiveness.

use crate::calculus::null_basis;
use crate::error::CoreError;
use crate::linalg::integer_rank;
use crate::wavefield::WaveConfig;
use crate::{RMat, RVec};
use std::collections::BTreeSet;

/// Classification verdict for a wavevector configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Periodic,
    Quasiperiodic,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Periodic => write!(f, "Periodic"),
            Verdict::Quasiperiodic => write!(f, "Quasiperiodic"),
            Verdict::Indeterminate => write!(f, "Indeterminate"),
        }
    }
}

/// Witness-search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSearch {
    /// Enumerate `d` free coordinates and complete the remaining ones by
    /// rounding onto the subspace. Exhaustive whenever the rounding margin
    /// holds (checked, and recorded in the report), at cost `O(bound^d)`.
    Completion,
    /// Enumerate the full box `‖n‖_∞ ≤ bound`, cost `O(bound^N)`. Only
    /// sensible for small bounds; serves as the oracle for the completion
    /// strategy.
    Exhaustive,
}

/// Outcome of the classification search.
#[derive(Debug, Clone)]
pub struct PeriodicityReport {
    pub verdict: Verdict,
    /// Dimension of the span of all witnesses found.
    pub lattice_dim: usize,
    /// Witnesses `n` with `2πn ∈ range(Kᵀ)` (within tolerance), canonical
    /// sign, at most [`PeriodicityReport::WITNESS_CAP`] stored.
    pub witnesses: Vec<Vec<i64>>,
    /// Total number of witnesses encountered before any early stop.
    pub witness_count: usize,
    pub search_bound: i64,
    pub tolerance: f64,
    /// Whether the search provably covered the whole box.
    pub exhaustive: bool,
}

impl PeriodicityReport {
    pub const WITNESS_CAP: usize = 64;
}

/// Default search bound used by the command-line surface.
pub const DEFAULT_BOUND: i64 = 1000;
/// Default witness tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Classifies the configuration with the default (completion) strategy.
pub fn classify(cfg: &WaveConfig, bound: i64, tol: f64) -> PeriodicityReport {
    classify_with(cfg, bound, tol, WitnessSearch::Completion)
}

pub fn classify_with(
    cfg: &WaveConfig,
    bound: i64,
    tol: f64,
    strategy: WitnessSearch,
) -> PeriodicityReport {
    assert!(bound >= 1, "search bound must be at least 1");
    assert!(tol > 0.0, "tolerance must be positive");
    let d = cfg.d();
    let n = cfg.n();
    let z = null_basis(cfg);

    // N = d: the subspace is everything, every integer vector is a witness.
    if z.columns() == 0 {
        let witnesses: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..n).map(|j| i64::from(j == i)).collect())
            .collect();
        return PeriodicityReport {
            verdict: Verdict::Periodic,
            lattice_dim: d,
            witness_count: witnesses.len(),
            witnesses,
            search_bound: bound,
            tolerance: tol,
            exhaustive: true,
        };
    }

    let mut collector = WitnessCollector::new(d, tol, z.matrix().clone());
    let exhaustive = match strategy {
        WitnessSearch::Completion => completion_search(cfg, bound, tol, &mut collector),
        WitnessSearch::Exhaustive => {
            box_search(n, bound, &mut collector);
            true
        }
    };

    let lattice_dim = collector.rank;
    let verdict = if lattice_dim == d {
        Verdict::Periodic
    } else if exhaustive {
        Verdict::Quasiperiodic
    } else {
        Verdict::Indeterminate
    };
    PeriodicityReport {
        verdict,
        lattice_dim,
        witnesses: collector.stored,
        witness_count: collector.count,
        search_bound: bound,
        tolerance: tol,
        exhaustive,
    }
}

struct WitnessCollector {
    z: RMat,
    tol: f64,
    d: usize,
    seen: BTreeSet<Vec<i64>>,
    representatives: Vec<Vec<i64>>,
    stored: Vec<Vec<i64>>,
    count: usize,
    rank: usize,
}

impl WitnessCollector {
    fn new(d: usize, tol: f64, z: RMat) -> Self {
        WitnessCollector {
            z,
            tol,
            d,
            seen: BTreeSet::new(),
            representatives: Vec::new(),
            stored: Vec::new(),
            count: 0,
            rank: 0,
        }
    }

    /// Tests a candidate; returns true once the witness rank reached `d`.
    fn offer(&mut self, n: &[i64]) -> bool {
        if n.iter().all(|&c| c == 0) {
            return false;
        }
        let mut norm2 = 0.0;
        for &c in n {
            norm2 += (c as f64) * (c as f64);
        }
        let norm = norm2.sqrt();
        let mut res2 = 0.0;
        for col in 0..self.z.ncols() {
            let mut dot = 0.0;
            for (row, &c) in n.iter().enumerate() {
                dot += self.z[(row, col)] * c as f64;
            }
            res2 += dot * dot;
        }
        if res2.sqrt() >= self.tol * norm.max(1.0) {
            return false;
        }
        let canonical = canonical_sign(n);
        if !self.seen.insert(canonical.clone()) {
            return self.rank == self.d;
        }
        self.count += 1;
        if self.stored.len() < PeriodicityReport::WITNESS_CAP {
            self.stored.push(canonical.clone());
        }
        if self.rank < self.d {
            let mut probe = self.representatives.clone();
            probe.push(canonical.clone());
            let r = integer_rank(&probe);
            if r > self.rank {
                self.rank = r;
                self.representatives.push(canonical);
            }
        }
        self.rank == self.d
    }
}

fn canonical_sign(n: &[i64]) -> Vec<i64> {
    let flip = n.iter().find(|&&c| c != 0).map(|&c| c < 0).unwrap_or(false);
    if flip {
        n.iter().map(|&c| -c).collect()
    } else {
        n.to_vec()
    }
}

/// Picks the `d` columns of `K` whose submatrix has the largest |det|
/// (exhaustive over subsets for small `N`, greedy volume otherwise).
fn best_free_columns(k: &RMat) -> Vec<usize> {
    let (d, n) = k.shape();
    let det_of = |idx: &[usize]| -> f64 {
        let sub = RMat::from_fn(d, d, |r, c| k[(r, idx[c])]);
        sub.determinant().abs()
    };
    if n <= 16 {
        let mut best: (f64, Vec<usize>) = (-1.0, Vec::new());
        let mut idx: Vec<usize> = (0..d).collect();
        loop {
            let v = det_of(&idx);
            if v > best.0 {
                best = (v, idx.clone());
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return best.1;
                }
                i -= 1;
                if idx[i] != i + n - d {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        // greedy: repeatedly take the column with the largest component
        // orthogonal to the chosen span
        let mut chosen: Vec<usize> = Vec::new();
        let mut basis: Vec<RVec> = Vec::new();
        for _ in 0..d {
            let mut best = (f64::NEG_INFINITY, 0);
            for j in 0..n {
                if chosen.contains(&j) {
                    continue;
                }
                let mut v = k.column(j).into_owned();
                for b in &basis {
                    let t = b.dot(&v);
                    v -= b * t;
                }
                if v.norm() > best.0 {
                    best = (v.norm(), j);
                }
            }
            chosen.push(best.1);
            let mut v = k.column(best.1).into_owned();
            for b in &basis {
                let t = b.dot(&v);
                v -= b * t;
            }
            basis.push(v.normalize());
        }
        chosen.sort_unstable();
        chosen
    }
}

/// Subspace-completion enumeration. Any witness lies within `tol·‖n‖` of
/// `range(Kᵀ)`, so its coordinates outside the free set are pinned by the
/// free ones up to a margin ≪ 1/2; rounding therefore reconstructs every
/// witness, which makes the search exhaustive whenever the margin condition
/// holds. Returns whether exhaustiveness is certified.
fn completion_search(cfg: &WaveConfig, bound: i64, tol: f64, out: &mut WitnessCollector) -> bool {
    let k = cfg.k_matrix();
    let (d, n) = k.shape();
    let free = best_free_columns(k);
    let k_free = RMat::from_fn(d, d, |r, c| k[(r, free[c])]);
    let Some(inv_t) = k_free.transpose().lu().try_inverse() else {
        return false;
    };
    let others: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();

    let c_max = others
        .iter()
        .map(|&j| (inv_t.transpose() * k.column(j)).norm())
        .fold(0.0, f64::max);
    let margin = (1.0 + c_max) * tol * (n as f64).sqrt().max(1.0) * bound as f64;
    let certified = margin < 0.49;

    let mut n_full = vec![0i64; n];
    let mut shell: Vec<Vec<i64>> = Vec::new();
    for radius in 1..=bound {
        shell.clear();
        collect_shell(d, radius, &mut shell);
        if d <= 2 {
            shell.sort_by_key(|v| (v.iter().map(|&c| c.abs()).sum::<i64>(), v.clone()));
        }
        for ns in &shell {
            let nf = RVec::from_fn(d, |i, _| ns[i] as f64);
            let x = &inv_t * nf;
            let mut ok = true;
            for &j in &others {
                let target = k.column(j).dot(&x);
                let rounded = target.round();
                if rounded.abs() > bound as f64 {
                    ok = false;
                    break;
                }
                n_full[j] = rounded as i64;
            }
            if !ok {
                continue;
            }
            for (i, &j) in free.iter().enumerate() {
                n_full[j] = ns[i];
            }
            if out.offer(&n_full) {
                return certified;
            }
        }
    }
    certified
}

/// Enumerates the boundary shell `‖v‖_∞ = radius` of the d-cube, each point
/// exactly once (classified by its first coordinate attaining the radius).
fn collect_shell(d: usize, radius: i64, out: &mut Vec<Vec<i64>>) {
    fn fill(
        d: usize,
        pin: usize,
        sign: i64,
        radius: i64,
        axis: usize,
        v: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if axis == d {
            out.push(v.clone());
            return;
        }
        if axis == pin {
            v[axis] = sign;
            fill(d, pin, sign, radius, axis + 1, v, out);
            return;
        }
        let lim = if axis < pin { radius - 1 } else { radius };
        for c in -lim..=lim {
            v[axis] = c;
            fill(d, pin, sign, radius, axis + 1, v, out);
        }
    }
    let mut v = vec![0i64; d];
    for pin in 0..d {
        for sign in [-radius, radius] {
            fill(d, pin, sign, radius, 0, &mut v, out);
        }
    }
}

/// Full box enumeration over `‖n‖_∞ ≤ bound` (oracle strategy).
fn box_search(n: usize, bound: i64, out: &mut WitnessCollector) {
    let mut v = vec![-bound; n];
    loop {
        out.offer(&v);
        let mut i = 0;
        loop {
            v[i] += 1;
            if v[i] > bound {
                v[i] = -bound;
                i += 1;
                if i == n {
                    return;
                }
            } else {
                break;
            }
        }
    }
}

/// Least-squares translation realizing a witness: the `x` with
/// `Kᵀx = 2πn`, satisfied within `2π·tol·‖n‖` for a genuine witness.
/// The translation leaves both the pressure and the potential invariant.
pub fn witness_translation(n: &[i64], cfg: &WaveConfig) -> Option<RVec> {
    let k = cfg.k_matrix();
    let target = RVec::from_fn(cfg.n(), |j, _| std::f64::consts::TAU * n[j] as f64);
    let normal = k * k.transpose();
    let rhs = k * &target;
    let x = normal.lu().solve(&rhs)?;
    let residual = (k.transpose() * &x - &target).norm();
    (residual < 1e-8 * target.norm().max(1.0)).then_some(x)
}

/// Commensurate rotation angle `θ(m, r)` of two superposed hexagonal wave
/// sets: `cos θ = (3m² + 3mr + r²/2) / (3m² + 3mr + r²)` for nonzero coprime
/// integers with `θ ∈ (0, π/3)`.
pub fn moire_angle(m: i64, r: i64) -> Result<f64, CoreError> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    if m == 0 || r == 0 || gcd(m, r) != 1 {
        return Err(CoreError::NotCoprime { m, r });
    }
    let mm = m as f64;
    let rr = r as f64;
    let den = 3.0 * mm * mm + 3.0 * mm * rr + rr * rr;
    let cos = (3.0 * mm * mm + 3.0 * mm * rr + rr * rr / 2.0) / den;
    let theta = cos.acos();
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_3) {
        return Err(CoreError::AngleOutOfRange { theta });
    }
    Ok(theta)
}

/// Wavevectors of a twisted-bilayer superposition: the hexagonal pair
/// `k₁ = [√3/2, 1/2]`, `k₂ = [-√3/2, 1/2]` plus their rotations by `θ`.
pub fn moire_wavevectors(theta: f64) -> Result<WaveConfig, CoreError> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_3) {
        return Err(CoreError::AngleOutOfRange { theta });
    }
    let s3 = 3.0_f64.sqrt() / 2.0;
    let (sin, cos) = theta.sin_cos();
    let rot = |x: f64, y: f64| (cos * x - sin * y, sin * x + cos * y);
    let (k3x, k3y) = rot(s3, 0.5);
    let (k4x, k4y) = rot(-s3, 0.5);
    #[rustfmt::skip]
    let k = RMat::from_row_slice(2, 4, &[
        s3,  -s3,  k3x, k4x,
        0.5, 0.5,  k3y, k4y,
    ]);
    WaveConfig::new(k, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{rand_unit, Rng};
    use crate::wavefield::{arp_value, PotentialSpec};

    const PHI: f64 = 1.618033988749895;

    #[test]
    fn identity_wavevectors_are_periodic() {
        let cfg = WaveConfig::new(RMat::identity(2, 2), None).unwrap();
        let report = classify(&cfg, 10, 1e-9);
        assert_eq!(report.verdict, Verdict::Periodic);
        assert_eq!(report.lattice_dim, 2);
        assert!(report.witnesses.contains(&vec![1, 0]));
        assert!(report.witnesses.contains(&vec![0, 1]));
    }

    #[test]
    fn golden_ratio_line_is_quasiperiodic() {
        let k = RMat::from_row_slice(1, 2, &[PHI, 1.0]);
        let cfg = WaveConfig::general(k, None).unwrap();
        let report = classify(&cfg, 10_000, 1e-9);
        assert_eq!(report.verdict, Verdict::Quasiperiodic);
        assert_eq!(report.lattice_dim, 0);
        assert_eq!(report.witness_count, 0);
        assert!(report.exhaustive);
    }

    #[test]
    fn rational_slope_line_is_periodic() {
        let k = RMat::from_row_slice(1, 2, &[2.0, 3.0]);
        let cfg = WaveConfig::general(k, None).unwrap();
        let report = classify(&cfg, 10, 1e-9);
        assert_eq!(report.verdict, Verdict::Periodic);
        assert_eq!(report.witnesses[0], vec![2, 3]);
    }

    #[test]
    fn five_fan_has_no_lattice_directions() {
        let cfg = WaveConfig::fan(5);
        let report = classify(&cfg, 100, 1e-9);
        assert_eq!(report.verdict, Verdict::Quasiperiodic);
        assert_eq!(report.lattice_dim, 0);
    }

    #[test]
    fn lifted_fan_is_periodic_along_one_direction_only() {
        let cfg = WaveConfig::lifted(&WaveConfig::fan(5)).unwrap();
        let report = classify(&cfg, 20, 1e-9);
        assert_eq!(report.lattice_dim, 1);
        assert_eq!(report.verdict, Verdict::Quasiperiodic);
        // the witness is the lifted axis direction
        assert_eq!(report.witnesses[0], vec![0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn completion_and_box_search_agree_on_small_instances() {
        let cases: Vec<(WaveConfig, i64)> = vec![
            (WaveConfig::fan(5), 3),
            (WaveConfig::fan(4), 3),
            (
                WaveConfig::general(RMat::from_row_slice(1, 2, &[PHI, 1.0]), None).unwrap(),
                30,
            ),
            (moire_wavevectors(moire_angle(1, 1).unwrap()).unwrap(), 4),
            (WaveConfig::lifted(&WaveConfig::fan(4)).unwrap(), 2),
        ];
        for (cfg, bound) in cases {
            let fast = classify_with(&cfg, bound, 1e-9, WitnessSearch::Completion);
            let slow = classify_with(&cfg, bound, 1e-9, WitnessSearch::Exhaustive);
            assert_eq!(
                fast.lattice_dim,
                slow.lattice_dim,
                "cfg N={} bound={bound}",
                cfg.n()
            );
            assert_eq!(fast.verdict, slow.verdict);
        }
    }

    #[test]
    fn witness_rank_is_monotone_in_the_bound() {
        let cfg = moire_wavevectors(moire_angle(2, 1).unwrap()).unwrap();
        let mut prev = 0;
        for bound in [2, 5, 10, 25, 60] {
            let report = classify(&cfg, bound, 1e-9);
            assert!(report.lattice_dim >= prev);
            prev = report.lattice_dim;
        }
        assert_eq!(prev, 2);
    }

    #[test]
    fn moire_angles_match_the_closed_form() {
        let t11 = moire_angle(1, 1).unwrap();
        assert!((t11.cos() - 6.5 / 7.0).abs() < 1e-15);
        assert!((t11 - 0.380251).abs() < 1e-6);
        let t21 = moire_angle(2, 1).unwrap();
        assert!((t21.cos() - 18.5 / 19.0).abs() < 1e-15);
        // the closed form is rational for every valid pair
        for (m, r) in [(1, 1), (2, 1), (3, 1), (2, 3), (3, 4), (5, 2)] {
            let theta = moire_angle(m, r).unwrap();
            let mm = m as f64;
            let rr = r as f64;
            let expected = (3.0 * mm * mm + 3.0 * mm * rr + rr * rr / 2.0)
                / (3.0 * mm * mm + 3.0 * mm * rr + rr * rr);
            assert!((theta.cos() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn moire_angle_rejects_bad_integers() {
        assert!(matches!(moire_angle(2, 4), Err(CoreError::NotCoprime { .. })));
        assert!(matches!(moire_angle(0, 1), Err(CoreError::NotCoprime { .. })));
        assert!(matches!(moire_angle(1, 0), Err(CoreError::NotCoprime { .. })));
        // coprime but outside (0, π/3)
        assert!(matches!(
            moire_angle(1, -3),
            Err(CoreError::AngleOutOfRange { .. })
        ));
    }

    #[test]
    fn commensurate_twists_are_periodic_and_pi_over_six_is_not() {
        for (m, r) in [(1, 1), (2, 1)] {
            let cfg = moire_wavevectors(moire_angle(m, r).unwrap()).unwrap();
            let report = classify(&cfg, 60, 1e-9);
            assert_eq!(report.verdict, Verdict::Periodic, "θ({m},{r})");
        }
        let cfg = moire_wavevectors(std::f64::consts::FRAC_PI_6).unwrap();
        let report = classify(&cfg, 60, 1e-9);
        assert_eq!(report.verdict, Verdict::Quasiperiodic);
    }

    #[test]
    fn witness_translations_leave_the_potential_invariant() {
        let cfg = moire_wavevectors(moire_angle(1, 1).unwrap()).unwrap();
        let report = classify(&cfg, 60, 1e-9);
        assert!(report.lattice_dim >= 2);
        let spec = PotentialSpec::default();
        let mut rng = Rng::seed(33);
        let mut checked = 0;
        for witness in report.witnesses.iter().take(2) {
            let t = witness_translation(witness, &cfg).expect("witness must be realizable");
            for _ in 0..50 {
                let x = RVec::from_fn(2, |_, _| rng.range(-10.0, 10.0));
                let u = rand_unit(&mut rng, 8);
                let a = arp_value(&x, &u, &cfg, &spec);
                let b = arp_value(&(&x + &t), &u, &cfg, &spec);
                assert!((a - b).abs() < 1e-9, "witness {witness:?}: {a} vs {b}");
                // the pressure itself is invariant too
                let p = crate::wavefield::pressure_restricted(&x, &u, &cfg).unwrap();
                let q = crate::wavefield::pressure_restricted(&(&x + &t), &u, &cfg).unwrap();
                assert!((p - q).norm() < 1e-9);
            }
            checked += 1;
        }
        assert_eq!(checked, 2);
    }

    #[test]
    fn every_reported_witness_passes_the_tolerance_test() {
        let cfg = moire_wavevectors(moire_angle(3, 1).unwrap()).unwrap();
        let report = classify(&cfg, 60, 1e-9);
        let z = null_basis(&cfg);
        for w in &report.witnesses {
            let n = RVec::from_fn(4, |j, _| w[j] as f64);
            assert!(z.coefficients(&n).norm() < report.tolerance * n.norm());
        }
    }

    #[test]
    fn shell_enumeration_covers_the_cube_exactly_once() {
        for d in 1..=3usize {
            let bound = 3i64;
            let mut all: Vec<Vec<i64>> = Vec::new();
            for r in 1..=bound {
                collect_shell(d, r, &mut all);
            }
            let expected = (2 * bound + 1).pow(d as u32) - 1;
            assert_eq!(all.len() as i64, expected);
            let unique: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(unique.len() as i64, expected);
        }
    }
}
