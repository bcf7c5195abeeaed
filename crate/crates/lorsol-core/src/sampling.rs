//! Seeded, reproducible random sampling for points, tangent vectors and the
//! timelike/spacelike pair construction used by the Euclidean-norm bound.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::fm;

/// Deterministic sampler; the same seed reproduces the same draw sequence.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        // 53 random mantissa bits
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.unit()
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.unit().max(1e-300);
        let u2 = self.unit();
        fm::sqrt(-2.0 * fm::ln(u1)) * fm::cos(2.0 * core::f64::consts::PI * u2)
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform point in an axis box given as (min, max) pairs.
    pub fn point_in_box(&mut self, bounds: &[(f64, f64)]) -> Vec<f64> {
        bounds.iter().map(|&(a, b)| self.uniform(a, b)).collect()
    }

    /// Unit tangent vector with respect to a metric value matrix (row-major).
    pub fn unit_tangent(&mut self, g: &[f64], dim: usize) -> Vec<f64> {
        loop {
            let v = self.normal_vec(dim);
            let mut q = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    q += g[i * dim + j] * v[i] * v[j];
                }
            }
            if q > 1e-12 {
                let s = 1.0 / fm::sqrt(q);
                return v.iter().map(|c| c * s).collect();
            }
        }
    }
}

/// A Minkowski-orthogonal pair: `nu` timelike unit (future), `x` spacelike
/// unit, in `R^n x R` with metric `<., .> = g_eucl - dt^2`. The last slot is
/// the time component.
#[derive(Clone, Debug)]
pub struct OrthoPair {
    pub nu: Vec<f64>,
    pub x: Vec<f64>,
}

fn mink(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() - 1;
    let mut acc = 0.0;
    for i in 0..n {
        acc += a[i] * b[i];
    }
    acc - a[n] * b[n]
}

pub fn euclid_norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|c| c * c).sum()
}

impl OrthoPair {
    /// Random pair in dimension `n + 1`: boost magnitude up to `boost`.
    pub fn random(s: &mut Sampler, n: usize, boost: f64) -> OrthoPair {
        loop {
            let vm: Vec<f64> = (0..n).map(|_| s.normal() * boost).collect();
            let mut nu = vm.clone();
            nu.push(fm::sqrt(1.0 + euclid_norm_sq(&vm)));
            let y = s.normal_vec(n + 1);
            // project onto nu-orthogonal complement: y + <y, nu> nu
            let c = mink(&y, &nu);
            let mut x: Vec<f64> = y.iter().zip(&nu).map(|(yi, ni)| yi + c * ni).collect();
            let q = mink(&x, &x);
            if q > 1e-10 {
                let inv = 1.0 / fm::sqrt(q);
                for xi in x.iter_mut() {
                    *xi *= inv;
                }
                return OrthoPair { nu, x };
            }
        }
    }

    /// Boosted pair constructed inside a single 2-plane containing `d_t`;
    /// realises the equality case of the Euclidean-norm bound.
    pub fn coplanar(s: &mut Sampler, n: usize, alpha: f64) -> OrthoPair {
        let m = {
            let v = s.normal_vec(n);
            let norm = fm::sqrt(euclid_norm_sq(&v)).max(1e-12);
            v.iter().map(|c| c / norm).collect::<Vec<f64>>()
        };
        let mut nu: Vec<f64> = m.iter().map(|c| c * fm::sinh(alpha)).collect();
        nu.push(fm::cosh(alpha));
        let mut x: Vec<f64> = m.iter().map(|c| c * fm::cosh(alpha)).collect();
        x.push(fm::sinh(alpha));
        OrthoPair { nu, x }
    }

    pub fn minkowski_norms(&self) -> (f64, f64, f64) {
        (mink(&self.nu, &self.nu), mink(&self.x, &self.x), mink(&self.x, &self.nu))
    }

    /// `(|x|_E, |nu|_E, coplanarity defect)`; the defect is the Gram
    /// determinant of `{d_t, nu, x}`, zero exactly when the span is a plane.
    pub fn euclid_data(&self) -> (f64, f64, f64) {
        let n = self.nu.len() - 1;
        let mut et = alloc::vec![0.0; n + 1];
        et[n] = 1.0;
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };
        let v = [&et[..], &self.nu[..], &self.x[..]];
        let mut gram = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] = dot(v[i], v[j]);
            }
        }
        let det = gram[0][0] * (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1])
            - gram[0][1] * (gram[1][0] * gram[2][2] - gram[1][2] * gram[2][0])
            + gram[0][2] * (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0]);
        (
            fm::sqrt(euclid_norm_sq(&self.x)),
            fm::sqrt(euclid_norm_sq(&self.nu)),
            fm::abs(det),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..100 {
            assert_eq!(a.unit(), b.unit());
        }
    }

    #[test]
    fn ortho_pair_constraints() {
        let mut s = Sampler::new(3);
        for _ in 0..200 {
            let p = OrthoPair::random(&mut s, 3, 2.0);
            let (nn, xx, xn) = p.minkowski_norms();
            assert!((nn + 1.0).abs() < 1e-9);
            assert!((xx - 1.0).abs() < 1e-9);
            assert!(xn.abs() < 1e-9);
            assert!(*p.nu.last().unwrap() > 0.0, "future pointing");
        }
    }

    #[test]
    fn coplanar_pair_equality() {
        let mut s = Sampler::new(11);
        let p = OrthoPair::coplanar(&mut s, 3, 1.3);
        let (xe, ne, defect) = p.euclid_data();
        assert!((xe - ne).abs() < 1e-10);
        assert!(defect < 1e-10);
    }

    #[test]
    fn unit_tangent_normalised() {
        let mut s = Sampler::new(5);
        let g = [2.0, 0.3, 0.3, 1.0];
        for _ in 0..50 {
            let v = s.unit_tangent(&g, 2);
            let q = g[0] * v[0] * v[0] + 2.0 * g[1] * v[0] * v[1] + g[3] * v[1] * v[1];
            assert!((q - 1.0).abs() < 1e-12);
        }
    }
}
