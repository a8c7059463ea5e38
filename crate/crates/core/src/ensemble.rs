//! Deterministic random instance generation: Gaussian hermitian ensembles keyed
//! by a u64 seed, used by the CLI `gen` command and the seeded property sweeps.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMat, C};

/// Standard-normal sample from a ChaCha stream (Box-Muller; deterministic in seed).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub struct EnsembleRng(ChaCha8Rng);

impl EnsembleRng {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// GUE-style hermitian matrix with O(1) entries: real N(0,1) diagonal,
    /// complex N(0,1/2) + i N(0,1/2) above it.
    pub fn hermitian(&mut self, n: usize) -> CMat {
        let rng = &mut self.0;
        let mut m = Array2::<C>::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = C::new(normal(rng), 0.0);
            for j in (i + 1)..n {
                let re = normal(rng) * std::f64::consts::FRAC_1_SQRT_2;
                let im = normal(rng) * std::f64::consts::FRAC_1_SQRT_2;
                m[[i, j]] = C::new(re, im);
                m[[j, i]] = C::new(re, -im);
            }
        }
        m
    }

    /// Negative semidefinite hermitian matrix -A* A / n.
    pub fn negative_semidefinite(&mut self, n: usize) -> CMat {
        let a = self.complex_gaussian(n);
        let prod = crate::linalg::adjoint(&a).dot(&a);
        prod.mapv(|x| -x / C::new(n as f64, 0.0))
    }

    /// Dense complex Gaussian matrix (no symmetry).
    pub fn complex_gaussian(&mut self, n: usize) -> CMat {
        let rng = &mut self.0;
        Array2::from_shape_fn((n, n), |_| {
            C::new(
                normal(rng) * std::f64::consts::FRAC_1_SQRT_2,
                normal(rng) * std::f64::consts::FRAC_1_SQRT_2,
            )
        })
    }

    /// Haar-ish random unitary from the QR of a complex Gaussian.
    pub fn unitary(&mut self, n: usize) -> CMat {
        let a = self.complex_gaussian(n);
        crate::linalg::orthonormalize(&a).expect("gaussian matrix has full rank")
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }

    pub fn complex_in_disk(&mut self, radius: f64) -> C {
        let r = radius * self.0.gen_range(0.0f64..1.0).sqrt();
        let th = self.0.gen_range(0.0..2.0 * std::f64::consts::PI);
        C::from_polar(r, th)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn hermitian_and_deterministic() {
        let mut a = EnsembleRng::seeded(7);
        let mut b = EnsembleRng::seeded(7);
        let ma = a.hermitian(5);
        let mb = b.hermitian(5);
        assert_eq!(ma, mb);
        let defect = linalg::max_abs(&(&ma - &linalg::adjoint(&ma)));
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn negative_semidefinite_spectrum() {
        let mut g = EnsembleRng::seeded(3);
        let v = g.negative_semidefinite(6);
        let evals = ndarray_linalg::Eigh::eigh(&v, ndarray_linalg::UPLO::Lower).unwrap().0;
        assert!(evals.iter().all(|&e| e <= 1e-12));
    }

    #[test]
    fn unitary_is_unitary() {
        let mut g = EnsembleRng::seeded(11);
        let u = g.unitary(4);
        let defect = linalg::norm_2(&(linalg::adjoint(&u).dot(&u) - linalg::eye(4)));
        assert!(defect < 1e-12);
    }
}
