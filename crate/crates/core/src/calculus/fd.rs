//! Central finite-difference oracles. These are shipped (not test-only) so
//! that custom potential matrices can be validated against the analytic
//! derivative formulas.

use crate::{RMat, RVec};

/// Central-difference gradient with step `h`:
/// `g_i = [f(x + h e_i) - f(x - h e_i)] / 2h`.
pub fn gradient<F: Fn(&RVec) -> f64>(f: F, x: &RVec, h: f64) -> RVec {
    let n = x.len();
    let mut p = x.clone();
    RVec::from_fn(n, |i, _| {
        let xi = x[i];
        p[i] = xi + h;
        let fp = f(&p);
        p[i] = xi - h;
        let fm = f(&p);
        p[i] = xi;
        (fp - fm) / (2.0 * h)
    })
}

/// Second-order central-difference Hessian with step `h`.
pub fn hessian<F: Fn(&RVec) -> f64>(f: F, x: &RVec, h: f64) -> RMat {
    let n = x.len();
    let mut p = x.clone();
    let f0 = f(&p);
    let mut out = RMat::zeros(n, n);
    for i in 0..n {
        // diagonal: [f(x+h) - 2f(x) + f(x-h)] / h²
        let xi = x[i];
        p[i] = xi + h;
        let fp = f(&p);
        p[i] = xi - h;
        let fm = f(&p);
        p[i] = xi;
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let xj = x[j];
            p[i] = xi + h;
            p[j] = xj + h;
            let fpp = f(&p);
            p[j] = xj - h;
            let fpm = f(&p);
            p[i] = xi - h;
            p[j] = xj + h;
            let fmp = f(&p);
            p[j] = xj - h;
            let fmm = f(&p);
            p[i] = xi;
            p[j] = xj;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_differentiated_exactly() {
        // f(x) = x₀² + 3 x₀ x₁ - 2 x₁²
        let f = |x: &RVec| x[0] * x[0] + 3.0 * x[0] * x[1] - 2.0 * x[1] * x[1];
        let x = RVec::from_column_slice(&[0.7, -1.1]);
        let g = gradient(f, &x, 1e-5);
        assert!((g[0] - (2.0 * 0.7 + 3.0 * -1.1)).abs() < 1e-9);
        assert!((g[1] - (3.0 * 0.7 - 4.0 * -1.1)).abs() < 1e-9);
        let h = hessian(f, &x, 1e-4);
        assert!((h[(0, 0)] - 2.0).abs() < 1e-6);
        assert!((h[(0, 1)] - 3.0).abs() < 1e-6);
        assert!((h[(1, 1)] + 4.0).abs() < 1e-6);
    }
}
