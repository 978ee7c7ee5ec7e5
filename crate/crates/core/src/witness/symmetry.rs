use crate::error::{ensure, Result};
use crate::kernel::{gram_schmidt, Matrix, TolerancePolicy};
use crate::relpos::classify;
use crate::subspace::Subspace;

use super::principal::{normalized_difference, principal_pairs};

/// Orthonormal normals `(u - v)/‖u - v‖` of every principal pair that is not a
/// common direction. Reflecting in these exchanges `M` and `N`.
pub(crate) fn exchange_normals(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<Matrix> {
    let pp = principal_pairs(m, n)?;
    let normals: Vec<Vec<f64>> = pp
        .pairs
        .iter()
        .filter(|p| p.angle > tol.angle_tol)
        .map(|p| normalized_difference(&p.u, &p.v))
        .collect();
    let q = Matrix::from_columns(m.ambient_dim(), &normals)?;
    Ok(gram_schmidt(&q, 1e-12))
}

/// Orthogonal symmetry `S = I - 2QQ^T` with `S(M) = N` and `⟨Sx, x⟩ ≥ 0` on `M`.
///
/// Identity on `M ∩ N` and on `(M + N)^⊥`; a reflection across the bisector
/// on each generic principal plane; a swap between paired basis vectors of
/// `M ∩ N^⊥` and `M^⊥ ∩ N`.
pub fn exchanging_symmetry(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<Matrix> {
    let report = classify(m, n, tol)?;
    ensure!(
        report.equivalently_positioned,
        Precondition,
        "pair is not equivalently positioned: dim(M∩N⊥) = {}, dim(M⊥∩N) = {}",
        report.decomposition.dim_m_nperp,
        report.decomposition.dim_mperp_n
    );
    let q = exchange_normals(m, n, tol)?;
    let amb = m.ambient_dim();
    Ok(&Matrix::identity(amb) - &(&q * &q.transpose()).scale(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::sym_eig;
    use std::f64::consts::FRAC_PI_8;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn identical_subspaces_give_identity() {
        let m = Subspace::coordinate(2, &[0]).unwrap();
        let s = exchanging_symmetry(&m, &m, &tol()).unwrap();
        assert!((&s - &Matrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn orthogonal_lines_are_swapped() {
        let m = Subspace::coordinate(2, &[0]).unwrap();
        let n = Subspace::coordinate(2, &[1]).unwrap();
        let s = exchanging_symmetry(&m, &n, &tol()).unwrap();
        let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((&s - &swap).max_abs() < 1e-15);
    }

    #[test]
    fn bisector_reflection() {
        let m = Subspace::coordinate(2, &[0]).unwrap();
        let n = Subspace::from_spanning(&[vec![1.0, 1.0]], 2, &tol()).unwrap();
        let s = exchanging_symmetry(&m, &n, &tol()).unwrap();
        let b = [FRAC_PI_8.cos(), FRAC_PI_8.sin()];
        let mut r = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = 2.0 * b[i] * b[j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        assert!((&s - &r).max_abs() < 1e-15);
    }

    #[test]
    fn nonnegative_on_m_in_mixed_position() {
        let t = tol();
        let m = Subspace::from_spanning(
            &[
                vec![1.0, 0.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0],
            ],
            5,
            &t,
        )
        .unwrap();
        let n = Subspace::from_spanning(
            &[
                vec![1.0, 0.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 2.0, 0.0],
                vec![0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            5,
            &t,
        )
        .unwrap();
        let s = exchanging_symmetry(&m, &n, &t).unwrap();
        assert!((&(&s * &s) - &Matrix::identity(5)).max_abs() < 1e-14);
        assert!(m.image(&s, &t).unwrap().equals(&n, &t).unwrap());
        let q = &(&m.basis().transpose() * &s) * m.basis();
        assert!(sym_eig(&q).unwrap().lambda[0] >= -1e-12);
    }

    #[test]
    fn unequal_dimensions_rejected() {
        let m = Subspace::coordinate(3, &[0, 1]).unwrap();
        let n = Subspace::coordinate(3, &[0]).unwrap();
        assert!(matches!(
            exchanging_symmetry(&m, &n, &tol()),
            Err(crate::Error::Precondition(_))
        ));
    }
}
