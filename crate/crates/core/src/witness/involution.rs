use crate::error::{ensure, Error, Result};
use crate::kernel::{inverse, null_space, solve, Matrix, TolerancePolicy};
use crate::subspace::Subspace;

use super::complement::{extend_by_orthogonal_rest, verify_common_complement};
use super::graph::{antisymmetric_graph_form, antisymmetric_graph_form_along};
use super::{ComplementCertificate, GraphForm, InvolutionCertificate, CERT_TOL};

struct Restricted {
    y: Subspace,
    m: Subspace,
    n: Subspace,
}

fn restrict(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<Restricted> {
    m.check_same_ambient(n)?;
    ensure!(
        m.dim() == n.dim(),
        NoComplement,
        "dim M = {} but dim N = {}",
        m.dim(),
        n.dim()
    );
    let y = m.sum(n, tol)?;
    Ok(Restricted {
        m: m.coordinates_in(&y, tol)?,
        n: n.coordinates_in(&y, tol)?,
        y,
    })
}

/// Involution `S = U⁻¹ diag(I, -I) U` built from the antisymmetric graph form
/// of the pair inside `Y = M + N`, extended by the identity on `Y^⊥`.
pub fn involution_for_pair(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<InvolutionCertificate> {
    let r = restrict(m, n, tol)?;
    let form = antisymmetric_graph_form(&r.m, &r.n, tol)?;
    from_form(m, n, &r.y, &form, tol)
}

/// [`involution_for_pair`] with the graph form taken along `K ∩ (M + N)`,
/// which must complement both subspaces inside `M + N`.
pub fn involution_for_pair_along(
    m: &Subspace,
    n: &Subspace,
    k: &Subspace,
    tol: &TolerancePolicy,
) -> Result<InvolutionCertificate> {
    m.check_same_ambient(k)?;
    let r = restrict(m, n, tol)?;
    let ky = k.intersect(&r.y, tol)?;
    ensure!(
        ky.dim() + m.dim() == r.y.dim(),
        Precondition,
        "K ∩ (M + N) has dimension {}, expected {}",
        ky.dim(),
        r.y.dim() - m.dim()
    );
    let form = antisymmetric_graph_form_along(&r.m, &r.n, &ky.coordinates_in(&r.y, tol)?, tol)?;
    from_form(m, n, &r.y, &form, tol)
}

fn from_form(
    m: &Subspace,
    n: &Subspace,
    y: &Subspace,
    form: &GraphForm,
    tol: &TolerancePolicy,
) -> Result<InvolutionCertificate> {
    let amb = m.ambient_dim();
    let signs: Vec<f64> = (0..form.dim_x1 + form.dim_x2)
        .map(|i| if i < form.dim_x1 { 1.0 } else { -1.0 })
        .collect();
    let s_y = if form.u.rows() == 0 {
        Matrix::zeros(0, 0)
    } else {
        &(&inverse(&form.u)? * &Matrix::diag(&signs)) * &form.u
    };
    let by = y.basis();
    let s = &(&(by * &s_y) * &by.transpose()) + &(&Matrix::identity(amb) - &y.projector());
    let c = 2.0 / (form.cond_u * (1.0 + form.t.norm2()?));
    certify(m, n, s, c, tol)
}

fn certify(m: &Subspace, n: &Subspace, s: Matrix, c: f64, tol: &TolerancePolicy) -> Result<InvolutionCertificate> {
    let amb = m.ambient_dim();
    let id = Matrix::identity(amb);
    let involution_residual = (&(&s * &s) - &id).norm2()?;
    let exchange_residual = m.image(&s, tol)?.largest_angle(n)?;
    let lower_bound_attained = if m.is_zero() {
        c
    } else {
        (&(&id + &s) * m.basis()).sigma_min()?
    };
    let k_plus = Subspace::from_orthonormal_unchecked(null_space(&(&s - &id), tol)?);
    let k_minus = Subspace::from_orthonormal_unchecked(null_space(&(&s + &id), tol)?);
    ensure!(
        k_plus.dim() + k_minus.dim() == amb,
        Numerical,
        "eigenspaces of S have dimensions {} + {} != {amb}",
        k_plus.dim(),
        k_minus.dim()
    );
    let splitting_residual = if amb == 0 {
        0.0
    } else {
        let a = k_plus.basis().hcat(k_minus.basis());
        let coeffs = solve(&a, &id)?;
        let p = k_plus.basis() * &coeffs.block(0, 0, k_plus.dim(), amb);
        (&p - &(&id + &s).scale(0.5)).norm2()?
    };
    let cert = InvolutionCertificate {
        s,
        c,
        k_plus,
        k_minus,
        involution_residual,
        exchange_residual,
        lower_bound_attained,
        splitting_residual,
    };
    ensure!(
        cert.involution_residual <= CERT_TOL
            && cert.exchange_residual <= CERT_TOL
            && cert.splitting_residual <= CERT_TOL
            && cert.lower_bound_attained >= cert.c - CERT_TOL,
        Numerical,
        "constructed involution misses its certificate: ‖S²-I‖ = {:e}, exchange {:e}, splitting {:e}, bound {} vs C = {}",
        cert.involution_residual,
        cert.exchange_residual,
        cert.splitting_residual,
        cert.lower_bound_attained,
        cert.c
    );
    Ok(cert)
}

/// Common complement `ker(S + I) ∩ Y ⊕ Y^⊥` from an involution `S` exchanging
/// `M` and `N` with `I + S` bounded below on `M`.
pub fn complement_from_involution(
    m: &Subspace,
    n: &Subspace,
    s: &Matrix,
    tol: &TolerancePolicy,
) -> Result<ComplementCertificate> {
    m.check_same_ambient(n)?;
    let amb = m.ambient_dim();
    ensure!(
        s.shape() == (amb, amb),
        Input,
        "S must be {amb} x {amb}, got {:?}",
        s.shape()
    );
    ensure!(s.is_finite(), Input, "S has non-finite entries");
    let id = Matrix::identity(amb);
    let scale = s.norm2()?.powi(2).max(1.0);
    let residual = (&(s * s) - &id).norm2()?;
    ensure!(
        residual <= CERT_TOL * scale,
        InvalidInvolution,
        "S² ≠ I (‖S² - I‖ = {residual:e})"
    );
    let sm = m.image(s, tol)?;
    let exchange = sm.largest_angle(n)?;
    ensure!(
        exchange <= CERT_TOL * scale,
        InvalidInvolution,
        "S(M) ≠ N (largest angle {exchange:e})"
    );
    if !m.is_zero() {
        let lower = (&(&id + s) * m.basis()).sigma_min()?;
        let threshold = tol.rank_threshold(1.0 + s.norm2()?, (amb, m.dim()));
        ensure!(
            lower > threshold,
            InvalidInvolution,
            "I + S is not bounded below on M (σ_min = {lower:e})"
        );
    }
    let y = m.sum(n, tol)?;
    let by = y.basis();
    let s_y = &(&by.transpose() * s) * by;
    let ky = null_space(&(&s_y + &Matrix::identity(y.dim())), tol)?;
    ensure!(
        ky.cols() + m.dim() == y.dim(),
        InvalidInvolution,
        "ker(S + I) ∩ (M + N) has dimension {}, expected {}",
        ky.cols(),
        y.dim() - m.dim()
    );
    let k = extend_by_orthogonal_rest(&(by * &ky), by);
    verify_common_complement(m, n, &k, tol).map_err(|e| match e {
        Error::InvalidCertificate(msg) => {
            Error::InvalidInvolution(format!("ker(S + I) is not a common complement: {msg}"))
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx).unwrap()
    }

    fn diagonal() -> Subspace {
        Subspace::from_spanning(&[vec![1.0, 1.0]], 2, &tol()).unwrap()
    }

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn shear_involution_of_line_and_diagonal() {
        let m = coord(2, &[0]);
        let c = involution_for_pair_along(&m, &diagonal(), &coord(2, &[1]), &tol()).unwrap();
        assert!((&c.s - &mat(&[&[1.0, 0.0], &[1.0, -1.0]])).max_abs() < 1e-15);
        assert!(c.involution_residual < 1e-15);
        assert!(c.lower_bound_attained >= c.c);
    }

    #[test]
    fn swap_for_orthogonal_lines() {
        let c = involution_for_pair(&coord(2, &[0]), &coord(2, &[1]), &tol()).unwrap();
        assert!((&c.s - &mat(&[&[0.0, 1.0], &[1.0, 0.0]])).max_abs() < 1e-14);
        assert!((c.lower_bound_attained - SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn identity_on_equal_subspaces() {
        let m = coord(3, &[0, 2]);
        let c = involution_for_pair(&m, &m, &tol()).unwrap();
        assert!((&c.s - &Matrix::identity(3)).max_abs() < 1e-15);
        assert!((c.lower_bound_attained - 2.0).abs() < 1e-15);
        assert_eq!(c.k_minus.dim(), 0);
    }

    #[test]
    fn extended_by_identity_off_the_sum() {
        let t = tol();
        let m = Subspace::from_spanning(&[vec![1.0, 0.0, 0.0, 0.0]], 4, &t).unwrap();
        let n = Subspace::from_spanning(&[vec![1.0, 2.0, 0.0, 0.0]], 4, &t).unwrap();
        let c = involution_for_pair(&m, &n, &t).unwrap();
        for j in [2, 3] {
            let col = c.s.column(j);
            assert!(col
                .iter()
                .enumerate()
                .all(|(i, x)| (x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15));
        }
        let k = complement_from_involution(&m, &n, &c.s, &t).unwrap();
        assert!(k.inverse_residual <= CERT_TOL);
    }

    #[test]
    fn complements_from_involutions() {
        let t = tol();
        let k =
            complement_from_involution(&coord(2, &[0]), &diagonal(), &mat(&[&[1.0, 0.0], &[1.0, -1.0]]), &t).unwrap();
        assert!(k.k.equals(&coord(2, &[1]), &t).unwrap());

        let swap = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let k = complement_from_involution(&coord(2, &[0]), &coord(2, &[1]), &swap, &t).unwrap();
        let anti = Subspace::from_spanning(&[vec![1.0, -1.0]], 2, &t).unwrap();
        assert!(k.k.equals(&anti, &t).unwrap());

        let m = coord(3, &[0]);
        let k = complement_from_involution(&m, &m, &Matrix::identity(3), &t).unwrap();
        assert!(k.k.equals(&m.orthocomplement(), &t).unwrap());
    }

    #[test]
    fn bad_involutions_are_rejected() {
        let t = tol();
        let (m, n) = (coord(2, &[0]), coord(2, &[1]));
        let not_involution = mat(&[&[0.0, 2.0], &[1.0, 0.0]]);
        assert!(matches!(
            complement_from_involution(&m, &n, &not_involution, &t),
            Err(Error::InvalidInvolution(_))
        ));
        let not_exchanging = Matrix::identity(2);
        assert!(matches!(
            complement_from_involution(&m, &n, &not_exchanging, &t),
            Err(Error::InvalidInvolution(_))
        ));
        // -I maps M to M but kills it under I + S.
        let minus = Matrix::identity(2).scale(-1.0);
        assert!(matches!(
            complement_from_involution(&m, &m, &minus, &t),
            Err(Error::InvalidInvolution(_))
        ));
    }

    #[test]
    fn unequal_dimensions() {
        let r = involution_for_pair(&coord(3, &[0, 1]), &coord(3, &[2]), &tol());
        assert!(matches!(r, Err(Error::NoComplement(_))));
    }
}
