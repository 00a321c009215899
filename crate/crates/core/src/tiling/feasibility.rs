//! Feasibility of systems of two-sided linear constraints
//! `lo_i ≤ a_i·x ≤ hi_i`, used to decide whether a lattice Voronoi cell
//! meets the cut subspace.
//!
//! Two solvers are provided and cross-checked: incremental half-plane
//! clipping of a bounding box (planar case) and a dense phase-1 simplex with
//! Bland's rule (any dimension). Boundary contact counts as feasible,
//! matching the closed cells and non-strict inequalities of the problem.

use crate::RVec;

/// Two-sided constraint `lo ≤ normal·x ≤ hi`.
#[derive(Debug, Clone)]
pub struct Band {
    pub normal: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Feasibility tolerance: witnesses satisfy every constraint within this.
pub const FEAS_TOL: f64 = 1e-9;

/// Dispatches on dimension: interval intersection (1-D), half-plane clipping
/// (2-D) or the phase-1 simplex. `radius` must bound the norm of at least
/// one feasible point whenever the system is feasible.
pub fn feasible_point(bands: &[Band], dim: usize, radius: f64) -> Option<RVec> {
    match dim {
        1 => interval_feasible(bands),
        2 => clip_feasible(bands, radius),
        _ => simplex_feasible(bands, dim),
    }
}

fn interval_feasible(bands: &[Band]) -> Option<RVec> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for b in bands {
        let a = b.normal[0];
        if a.abs() < 1e-300 {
            if b.lo > FEAS_TOL || b.hi < -FEAS_TOL {
                return None;
            }
            continue;
        }
        let (l, h) = if a > 0.0 {
            (b.lo / a, b.hi / a)
        } else {
            (b.hi / a, b.lo / a)
        };
        lo = lo.max(l);
        hi = hi.min(h);
    }
    (lo <= hi + FEAS_TOL).then(|| RVec::from_column_slice(&[0.5 * (lo + hi.max(lo))]))
}

/// Sutherland–Hodgman clipping of a large square by each half plane.
/// Returns the clip polygon centroid as witness.
fn clip_feasible(bands: &[Band], radius: f64) -> Option<RVec> {
    let r = radius.max(1.0) * 1.5;
    let mut poly: Vec<[f64; 2]> = vec![[-r, -r], [r, -r], [r, r], [-r, r]];
    let clip = |poly: &mut Vec<[f64; 2]>, a: [f64; 2], c: f64| {
        // keep the side a·x ≤ c (with a small closed-boundary band)
        let input = std::mem::take(poly);
        let value = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - c;
        for i in 0..input.len() {
            let p = input[i];
            let q = input[(i + 1) % input.len()];
            let vp = value(&p);
            let vq = value(&q);
            if vp <= FEAS_TOL {
                poly.push(p);
            }
            if (vp <= FEAS_TOL) != (vq <= FEAS_TOL) {
                let t = vp / (vp - vq);
                poly.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        !poly.is_empty()
    };
    for b in bands {
        let a = [b.normal[0], b.normal[1]];
        if !clip(&mut poly, a, b.hi) {
            return None;
        }
        if !clip(&mut poly, [-a[0], -a[1]], -b.lo) {
            return None;
        }
    }
    let n = poly.len() as f64;
    let cx = poly.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = poly.iter().map(|p| p[1]).sum::<f64>() / n;
    Some(RVec::from_column_slice(&[cx, cy]))
}

/// Phase-1 simplex with Bland's rule over `x = x⁺ - x⁻`, slack and
/// artificial variables. Feasible iff the artificial optimum is ≤ FEAS_TOL.
fn simplex_feasible(bands: &[Band], dim: usize) -> Option<RVec> {
    // rows: a_i·x ≤ hi and -a_i·x ≤ -lo
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * bands.len());
    for b in bands {
        rows.push((b.normal.clone(), b.hi));
        rows.push((b.normal.iter().map(|v| -v).collect(), -b.lo));
    }
    let m = rows.len();
    let nx = 2 * dim;
    // columns: x⁺ x⁻ | slacks | artificials | rhs
    let mut art_of_row: Vec<Option<usize>> = vec![None; m];
    let mut n_art = 0;
    for (r, row) in rows.iter().enumerate() {
        if row.1 < 0.0 {
            art_of_row[r] = Some(n_art);
            n_art += 1;
        }
    }
    let ncols = nx + m + n_art;
    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0usize; m];
    for (r, (coef, rhs)) in rows.iter().enumerate() {
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        for c in 0..dim {
            t[r][c] = sign * coef[c];
            t[r][dim + c] = -sign * coef[c];
        }
        t[r][nx + r] = sign; // slack
        t[r][ncols] = sign * rhs;
        if let Some(a) = art_of_row[r] {
            t[r][nx + m + a] = 1.0;
            basis[r] = nx + m + a;
        } else {
            basis[r] = nx + r;
        }
    }
    // objective: minimize the sum of artificials; price out the basic ones
    let mut obj = vec![0.0; ncols + 1];
    for a in 0..n_art {
        obj[nx + m + a] = 1.0;
    }
    for r in 0..m {
        if art_of_row[r].is_some() {
            for c in 0..=ncols {
                obj[c] -= t[r][c];
            }
        }
    }

    const PIVOT_EPS: f64 = 1e-11;
    // Bland: lowest-index column with a negative reduced cost
    while let Some(enter) = (0..ncols).find(|&c| obj[c] < -PIVOT_EPS) {
        // ratio test, ties by lowest basis index
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            if t[r][enter] > PIVOT_EPS {
                let ratio = t[r][ncols] / t[r][enter];
                if ratio < best - 1e-15
                    || (ratio < best + 1e-15
                        && leave.map(|l| basis[r] < basis[l]).unwrap_or(false))
                {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            // unbounded phase-1 cannot happen (objective bounded below by 0)
            return None;
        };
        let piv = t[lr][enter];
        for v in t[lr].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != lr && t[r][enter].abs() > 0.0 {
                let f = t[r][enter];
                let pivot_row = t[lr].clone();
                for (v, p) in t[r].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        if obj[enter].abs() > 0.0 {
            let f = obj[enter];
            for c in 0..=ncols {
                obj[c] -= f * t[lr][c];
            }
        }
        basis[lr] = enter;
    }

    let objective = -obj[ncols];
    if objective > FEAS_TOL {
        return None;
    }
    let mut x = RVec::zeros(dim);
    for r in 0..m {
        if basis[r] < dim {
            x[basis[r]] += t[r][ncols];
        } else if basis[r] < nx {
            x[basis[r] - dim] -= t[r][ncols];
        }
    }
    Some(x)
}

/// Largest constraint violation of a point.
pub fn violation(bands: &[Band], x: &RVec) -> f64 {
    let mut worst = 0.0_f64;
    for b in bands {
        let mut v = 0.0;
        for (c, &a) in b.normal.iter().enumerate() {
            v += a * x[c];
        }
        worst = worst.max(b.lo - v).max(v - b.hi);
    }
    worst
}
