use crate::error::{ensure, Error, Result};
use crate::kernel::{complete_orthonormal, gram_schmidt, null_space, solve, svd, Matrix, TolerancePolicy};
use crate::subspace::Subspace;

use super::symmetry::exchange_normals;
use super::{ComplementCertificate, CERT_TOL};

/// Columns of `complete_orthonormal(y)` beyond those of `y`.
pub(crate) fn orthogonal_rest(y: &Matrix) -> Matrix {
    let amb = y.rows();
    complete_orthonormal(y, amb).select_columns(&(y.cols()..amb).collect::<Vec<_>>())
}

/// `K₀ ⊕ Y^⊥` for `K₀` given by columns inside `Y`.
pub(crate) fn extend_by_orthogonal_rest(k0: &Matrix, y: &Matrix) -> Subspace {
    let rest = orthogonal_rest(y);
    Subspace::from_orthonormal_unchecked(gram_schmidt(&k0.hcat(&rest), 1e-12))
}

/// Oblique projection onto `X` along `K` from the block system `[B_X | B_K]`,
/// together with the block's smallest singular value.
pub(crate) fn oblique_projection(
    x: &Subspace,
    k: &Subspace,
    tol: &TolerancePolicy,
    name: &str,
) -> Result<(Matrix, f64)> {
    let a = x.basis().hcat(k.basis());
    let amb = a.rows();
    if amb == 0 {
        return Ok((Matrix::zeros(0, 0), 1.0));
    }
    let s = svd(&a)?;
    let smax = s.sigma[0];
    let smin = *s.sigma.last().expect("non-empty block");
    let threshold = tol.rank_threshold(smax, (amb, amb));
    ensure!(
        smin > threshold,
        InvalidCertificate,
        "{name} + K is not a direct sum: σ_min([B_{name} | B_K]) = {smin:e}"
    );
    let inv =
        solve(&a, &Matrix::identity(amb)).map_err(|e| Error::InvalidCertificate(format!("[B_{name} | B_K]: {e}")))?;
    Ok((x.basis() * &inv.block(0, 0, x.dim(), amb), smin))
}

/// Checks that `K` complements both `M` and `N` and builds both oblique
/// projections along it.
pub fn verify_common_complement(
    m: &Subspace,
    n: &Subspace,
    k: &Subspace,
    tol: &TolerancePolicy,
) -> Result<ComplementCertificate> {
    m.check_same_ambient(n)?;
    m.check_same_ambient(k)?;
    let amb = m.ambient_dim();
    ensure!(
        k.dim() + m.dim() == amb,
        InvalidCertificate,
        "dim K + dim M = {} + {} != {amb}",
        k.dim(),
        m.dim()
    );
    ensure!(
        k.dim() + n.dim() == amb,
        InvalidCertificate,
        "dim K + dim N = {} + {} != {amb}",
        k.dim(),
        n.dim()
    );
    let (p_m, sv_m) = oblique_projection(m, k, tol, "M")?;
    let (p_n, sv_n) = oblique_projection(n, k, tol, "N")?;
    let bn = n.basis();
    let inverse_residual = if n.is_zero() {
        0.0
    } else {
        (&(&p_n * &(&p_m * bn)) - bn).norm2()?
    };
    ensure!(
        inverse_residual <= CERT_TOL,
        InvalidCertificate,
        "P_(N|K) P_(M|K) is not the identity on N (residual {inverse_residual:e})"
    );
    Ok(ComplementCertificate {
        k: k.clone(),
        p_m_along_k: p_m,
        p_n_along_k: p_n,
        min_basis_sv_m: sv_m,
        min_basis_sv_n: sv_n,
        inverse_residual,
    })
}

/// Default common complement: the `-1` eigenspace of the exchanging symmetry
/// inside `Y = M + N`, extended by `Y^⊥`.
pub fn common_complement(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<ComplementCertificate> {
    m.check_same_ambient(n)?;
    if m.dim() != n.dim() {
        return Err(Error::NoComplement(format!(
            "dim M = {} but dim N = {}",
            m.dim(),
            n.dim()
        )));
    }
    let q = exchange_normals(m, n, tol)?;
    let y = gram_schmidt(&m.basis().hcat(&q), 1e-12);
    let k = extend_by_orthogonal_rest(&q, &y);
    verify_common_complement(m, n, &k, tol)
}

/// Common complement `ker P` from the projection `P(x + y) = Ux + y`
/// (`x ∈ M`, `y ∈ N`) on `Y = M + N`, given an isomorphism `U: M → N` that
/// fixes `M ∩ N` and keeps `‖Ux + y‖ ≤ C‖x + y‖`.
pub fn projection_from_isomorphism(
    m: &Subspace,
    n: &Subspace,
    u_map: &Matrix,
    c: f64,
    tol: &TolerancePolicy,
) -> Result<ComplementCertificate> {
    m.check_same_ambient(n)?;
    let amb = m.ambient_dim();
    ensure!(
        u_map.shape() == (amb, amb),
        Input,
        "U must be {amb} x {amb}, got {:?}",
        u_map.shape()
    );
    ensure!(
        c.is_finite() && c > 0.0,
        Input,
        "C must be positive and finite, got {c}"
    );
    ensure!(
        m.dim() == n.dim(),
        Precondition,
        "U cannot map M onto N: dim M = {}, dim N = {}",
        m.dim(),
        n.dim()
    );
    let ubm = u_map * m.basis();
    for col in ubm.columns() {
        ensure!(n.contains(&col, tol)?, Precondition, "U does not map M into N");
    }
    if !m.is_zero() {
        let s = svd(&ubm)?;
        let threshold = tol.rank_threshold(s.sigma[0].max(1.0), ubm.shape());
        ensure!(
            *s.sigma.last().unwrap() > threshold,
            Precondition,
            "U is not injective on M"
        );
    }
    let l = m.intersect(n, tol)?;
    if !l.is_zero() {
        let fix = (&(u_map * l.basis()) - l.basis()).norm2()?;
        ensure!(fix <= CERT_TOL, Precondition, "U does not fix M ∩ N (residual {fix:e})");
    }

    let off_l = &Matrix::identity(amb) - &l.projector();
    let n1 = Subspace::span_of_columns(&(&off_l * n.basis()), tol)?;
    let a = m.basis().hcat(n1.basis());
    let p = if a.cols() == 0 {
        Matrix::zeros(amb, amb)
    } else {
        let at = a.transpose();
        &ubm.hcat(n1.basis()) * &solve(&(&at * &a), &at)?
    };
    let norm_p = p.norm2()?;
    ensure!(
        norm_p <= c * (1.0 + CERT_TOL),
        Precondition,
        "bound fails: ‖Ux + y‖ / ‖x + y‖ reaches {norm_p} > C = {c}"
    );
    let y = gram_schmidt(&a, 1e-12);
    let k0 = &y * &null_space(&(&p * &y), tol)?;
    let k = extend_by_orthogonal_rest(&k0, &y);
    verify_common_complement(m, n, &k, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn span(n: usize, vs: &[&[f64]]) -> Subspace {
        Subspace::from_spanning(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), n, &tol()).unwrap()
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx).unwrap()
    }

    #[test]
    fn complement_of_orthogonal_lines() {
        let c = common_complement(&coord(2, &[0]), &coord(2, &[1]), &tol()).unwrap();
        assert!(c.k.equals(&span(2, &[&[1.0, -1.0]]), &tol()).unwrap());
        assert!(c.inverse_residual < 1e-15);
    }

    #[test]
    fn complement_appends_orthogonal_rest() {
        let c = common_complement(&coord(3, &[0]), &coord(3, &[1]), &tol()).unwrap();
        let expected = span(3, &[&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!(c.k.equals(&expected, &tol()).unwrap());
    }

    #[test]
    fn complement_of_equal_subspaces_is_orthocomplement() {
        let m = span(4, &[&[1.0, 2.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 1.0]]);
        let c = common_complement(&m, &m, &tol()).unwrap();
        assert!(c.k.equals(&m.orthocomplement(), &tol()).unwrap());
    }

    #[test]
    fn complement_requires_equal_dimensions() {
        let r = common_complement(&coord(3, &[0, 1]), &coord(3, &[2]), &tol());
        assert!(matches!(r, Err(Error::NoComplement(_))));
    }

    #[test]
    fn verify_examples() {
        let t = tol();
        let c = verify_common_complement(&coord(2, &[0]), &span(2, &[&[1.0, 1.0]]), &coord(2, &[1]), &t).unwrap();
        // P_(M|K) e2 = 0 and P_(N|K) e1 = (1, 1).
        assert!((&c.p_m_along_k - &Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap()).max_abs() < 1e-15);
        assert!((&c.p_n_along_k - &Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap()).max_abs() < 1e-15);

        let r = verify_common_complement(&coord(2, &[0]), &coord(2, &[1]), &coord(2, &[0]), &t);
        assert!(matches!(r, Err(Error::InvalidCertificate(_))));

        let k = span(4, &[&[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]]);
        let c = verify_common_complement(&coord(4, &[0, 1]), &coord(4, &[0, 2]), &k, &t).unwrap();
        assert!(c.min_basis_sv_m > 0.1 && c.min_basis_sv_n > 0.1);
    }

    #[test]
    fn verify_rejects_wrong_dimension() {
        let r = verify_common_complement(&coord(3, &[0]), &coord(3, &[1]), &coord(3, &[2]), &tol());
        assert!(matches!(r, Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn isomorphism_identity_on_equal_subspaces() {
        let m = coord(3, &[0, 1]);
        let c = projection_from_isomorphism(&m, &m, &Matrix::identity(3), 1.0, &tol()).unwrap();
        assert!(c.k.equals(&coord(3, &[2]), &tol()).unwrap());
    }

    #[test]
    fn isomorphism_swapping_lines() {
        let u = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let (m, n) = (coord(2, &[0]), coord(2, &[1]));
        // P(x1, x2) = (0, x1 + x2) has norm √2, so C = 1 is too small.
        let r = projection_from_isomorphism(&m, &n, &u, 1.0, &tol());
        assert!(matches!(r, Err(Error::Precondition(_))));
        let c = projection_from_isomorphism(&m, &n, &u, SQRT_2, &tol()).unwrap();
        assert!(c.k.equals(&span(2, &[&[1.0, -1.0]]), &tol()).unwrap());
    }

    #[test]
    fn isomorphism_must_land_in_n() {
        let u = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let m = coord(2, &[0]);
        let r = projection_from_isomorphism(&m, &m, &u, 10.0, &tol());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn certificate_projection_satisfies_its_own_bound() {
        let t = tol();
        let m = span(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.3, 0.0]]);
        let n = span(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.2, 1.0, 0.5]]);
        let cert = common_complement(&m, &n, &t).unwrap();
        let c = cert.p_n_along_k.norm2().unwrap();
        let again = projection_from_isomorphism(&m, &n, &cert.p_n_along_k, c, &t).unwrap();
        assert!(again.inverse_residual <= CERT_TOL);
    }
}
