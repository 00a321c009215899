//! Deterministic pseudo-random helpers for unit tests. A fixed splitmix64
//! keeps expected values stable across dependency upgrades.

use crate::wavefield::Controls;
use crate::{C64, CVec, RMat};

pub struct Rng(u64);

impl Rng {
    pub fn seed(seed: u64) -> Self {
        Rng(seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

pub fn rand_complex_vec(rng: &mut Rng, len: usize) -> CVec {
    CVec::from_fn(len, |_, _| C64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
}

/// Random unit-norm controls with `len` entries (`len/2` pairs).
pub fn rand_unit(rng: &mut Rng, len: usize) -> Controls {
    Controls::normalized(rand_complex_vec(rng, len)).unwrap()
}

/// Random Hermitian matrix with entries of order one.
pub fn rand_hermitian(rng: &mut Rng, n: usize) -> crate::CMat {
    let mut m = crate::CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.range(-1.0, 1.0), 0.0);
        for j in 0..i {
            let z = C64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random full-rank wavevector matrix with equal column norms `k`.
pub fn rand_wavevectors(rng: &mut Rng, d: usize, n: usize, k: f64) -> RMat {
    loop {
        let mut m = RMat::from_fn(d, n, |_, _| rng.range(-1.0, 1.0));
        for mut col in m.column_iter_mut() {
            let norm = col.norm();
            if norm < 1e-3 {
                col[0] += 1.0;
            }
            let norm = col.norm();
            col *= k / norm;
        }
        let sv = crate::linalg::singular_values(&m);
        if sv[d - 1] > 1e-3 * sv[0] {
            return m;
        }
    }
}
