//! Small dense linear-algebra helpers shared by the other modules.

use crate::{C64, CMat, CVec, RMat, RVec};
use nalgebra::Complex;

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Real eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors, column `k` paired with `values[k]`.
    pub vectors: CMat,
    /// Largest residual `||A v - λ v||` over all pairs.
    pub max_residual: f64,
}

/// Eigendecomposition of a Hermitian matrix with deterministic ordering and
/// phase normalization: for each eigenvector the entry of largest modulus is
/// made real and positive.
pub fn hermitian_eigen(a: &CMat) -> HermitianEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen needs a square matrix");
    let se = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = CMat::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        values.push(se.eigenvalues[src]);
        let mut v: CVec = se.eigenvectors.column(src).into_owned();
        normalize_phase(&mut v);
        vectors.set_column(k, &v);
    }

    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut max_residual: f64 = 0.0;
    for (k, &value) in values.iter().enumerate() {
        let v = vectors.column(k);
        let r = a * v - v * Complex::new(value, 0.0);
        max_residual = max_residual.max(r.norm());
    }
    debug_assert!(max_residual <= 1e-12 * scale.max(1.0) * 10.0);

    HermitianEigen {
        values,
        vectors,
        max_residual,
    }
}

/// Rotate a complex vector so its largest-modulus entry is real positive and
/// scale it to unit norm. Ties are broken by the lowest index.
pub fn normalize_phase(v: &mut CVec) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    let mut pivot = 0;
    let mut best = 0.0_f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best * (1.0 + 1e-12) {
            best = m;
            pivot = i;
        }
    }
    let p = v[pivot];
    let phase = if p.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        p.conj() / p.norm()
    };
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Orthonormal basis of the null space of `k` (a `d×N` matrix, `d ≤ N`),
/// computed from the full QR factorization of `kᵀ`. The result has
/// `N - rank` columns; for a full-rank wide matrix that is `N - d`.
pub fn null_space_basis(k: &RMat, rank: usize) -> RMat {
    let n = k.ncols();
    let kt = k.transpose();
    let qr = kt.qr();
    let mut qt = RMat::identity(n, n);
    qr.q_tr_mul(&mut qt);
    // rows `rank..n` of Qᵀ span the orthogonal complement of range(Kᵀ)
    qt.rows(rank, n - rank).transpose()
}

/// Singular values of a real matrix in descending order.
pub fn singular_values(m: &RMat) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Solves the `d×d` system `a x = b` by LU with partial pivoting.
pub fn solve(a: &RMat, b: &RVec) -> Option<RVec> {
    a.clone().lu().solve(b)
}

/// Deterministic pairwise (binary-tree) summation. The reduction order is a
/// function of the length only, so results are bit-stable no matter how the
/// inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Rank of a set of integer vectors via fraction-free (Bareiss) elimination.
/// Exact for the magnitudes handled here (entries below ~2^40).
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..ncols {
        let pivot_row = (rank..nrows).find(|&r| m[r][col] != 0);
        let Some(p) = pivot_row else { continue };
        m.swap(rank, p);
        for r in 0..nrows {
            if r == rank || m[r][col] == 0 {
                continue;
            }
            for c in 0..ncols {
                if c == col {
                    continue;
                }
                m[r][c] = (m[r][c] * m[rank][col] - m[r][col] * m[rank][c]) / prev;
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}
