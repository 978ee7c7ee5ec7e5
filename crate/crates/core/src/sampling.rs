//! Seeded random subspaces and maps, for tests and the `sample` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::kernel::{gram_schmidt, Matrix, TolerancePolicy};
use crate::subspace::Subspace;

/// Target dimensions of a planted pair: the four corners and the number of
/// generic principal planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub mn: usize,
    pub m_nperp: usize,
    pub mperp_n: usize,
    pub mperp_nperp: usize,
    pub generic: usize,
}

impl Layout {
    pub fn ambient_dim(&self) -> usize {
        self.mn + self.m_nperp + self.mperp_n + self.mperp_nperp + 2 * self.generic
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn gaussian(&mut self, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| self.rng.sample(StandardNormal)).collect();
        Matrix::from_row_major(rows, cols, data).expect("gaussian entries are finite")
    }

    /// Haar-like orthogonal matrix (Gram-Schmidt of a Gaussian matrix).
    pub fn orthogonal(&mut self, n: usize) -> Matrix {
        loop {
            let q = gram_schmidt(&self.gaussian(n, n), 1e-8);
            if q.cols() == n {
                return q;
            }
        }
    }

    /// Span of `k` Gaussian vectors in `R^n`.
    pub fn subspace(&mut self, n: usize, k: usize, tol: &TolerancePolicy) -> Result<Subspace> {
        Subspace::span_of_columns(&self.gaussian(n, k), tol)
    }

    /// Pair with both dimensions uniform on `0..=n`.
    pub fn pair(&mut self, n: usize, tol: &TolerancePolicy) -> Result<(Subspace, Subspace)> {
        let k = self.rng.random_range(0..=n);
        let l = self.rng.random_range(0..=n);
        Ok((self.subspace(n, k, tol)?, self.subspace(n, l, tol)?))
    }

    /// Pair with a common dimension uniform on `0..=n`.
    pub fn equal_dim_pair(&mut self, n: usize, tol: &TolerancePolicy) -> Result<(Subspace, Subspace)> {
        let k = self.rng.random_range(0..=n);
        Ok((self.subspace(n, k, tol)?, self.subspace(n, k, tol)?))
    }

    /// Random split of `n` into the five parts of a [`Layout`].
    pub fn layout(&mut self, n: usize) -> Layout {
        let generic = self.rng.random_range(0..=n / 2);
        let mut rest = [0usize; 4];
        for _ in 0..n - 2 * generic {
            rest[self.rng.random_range(0..4)] += 1;
        }
        Layout {
            mn: rest[0],
            m_nperp: rest[1],
            mperp_n: rest[2],
            mperp_nperp: rest[3],
            generic,
        }
    }

    /// Pair with the given corner dimensions and generic angles drawn from
    /// `[min_angle, π/2 - min_angle]`, rotated by a random orthogonal map.
    pub fn planted_pair(&mut self, layout: Layout, min_angle: f64) -> Result<(Subspace, Subspace)> {
        let n = layout.ambient_dim();
        let q = self.orthogonal(n);
        let mut next = 0usize;
        let mut take = |count: usize| {
            let cols: Vec<usize> = (next..next + count).collect();
            next += count;
            q.select_columns(&cols)
        };
        let common = take(layout.mn);
        let m_only = take(layout.m_nperp);
        let n_only = take(layout.mperp_n);
        let _rest = take(layout.mperp_nperp);
        let xs = take(layout.generic);
        let ys = take(layout.generic);
        let mut rotated = Matrix::zeros(n, layout.generic);
        for i in 0..layout.generic {
            let theta = self
                .rng
                .random_range(min_angle..=std::f64::consts::FRAC_PI_2 - min_angle);
            let col: Vec<f64> = xs
                .column(i)
                .iter()
                .zip(ys.column(i))
                .map(|(x, y)| theta.cos() * x + theta.sin() * y)
                .collect();
            rotated.set_column(i, &col);
        }
        let m = common.hcat(&m_only).hcat(&xs);
        let nn = common.hcat(&n_only).hcat(&rotated);
        Ok((
            Subspace::from_orthonormal(gram_schmidt(&m, 1e-12))?,
            Subspace::from_orthonormal(gram_schmidt(&nn, 1e-12))?,
        ))
    }

    /// Invertible map `Q₁ diag(σ) Q₂` with `σ` log-uniform in `[1, max_cond]`.
    pub fn invertible(&mut self, n: usize, max_cond: f64) -> Matrix {
        let q1 = self.orthogonal(n);
        let q2 = self.orthogonal(n);
        let sigma: Vec<f64> = (0..n)
            .map(|_| max_cond.powf(self.rng.random_range(0.0..=1.0)))
            .collect();
        &(&q1 * &Matrix::diag(&sigma)) * &q2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relpos::pair_decomposition;

    #[test]
    fn seeded_runs_repeat() {
        let a = Sampler::new(7).gaussian(3, 3);
        let b = Sampler::new(7).gaussian(3, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn planted_layout_is_recovered() {
        let tol = TolerancePolicy::default();
        let mut s = Sampler::new(11);
        for _ in 0..20 {
            let layout = s.layout(7);
            let (m, n) = s.planted_pair(layout, 0.05).unwrap();
            let d = pair_decomposition(&m, &n, &tol).unwrap();
            assert_eq!(
                (
                    d.dim_mn,
                    d.dim_m_nperp,
                    d.dim_mperp_n,
                    d.dim_mperp_nperp,
                    d.generic_mult
                ),
                (
                    layout.mn,
                    layout.m_nperp,
                    layout.mperp_n,
                    layout.mperp_nperp,
                    layout.generic
                )
            );
        }
    }

    #[test]
    fn invertible_condition_is_bounded() {
        let a = Sampler::new(3).invertible(6, 1e3);
        let s = crate::kernel::svd(&a).unwrap();
        assert!(s.sigma[0] / s.sigma[5] <= 1e3 * (1.0 + 1e-12));
    }
}
