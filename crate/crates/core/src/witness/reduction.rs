use serde::Serialize;

use crate::error::{ensure, Result};
use crate::kernel::{Matrix, TolerancePolicy};
use crate::subspace::Subspace;

use super::complement::verify_common_complement;
use super::CERT_TOL;

/// `M ∩ N` split off: `M₁ = (I - P_L) M`, `N₁ = (I - P_L) N` with `L = M ∩ N`.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedPair {
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub m1: Subspace,
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub n1: Subspace,
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub l: Subspace,
}

pub fn reduce_pair(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<ReducedPair> {
    m.check_same_ambient(n)?;
    let l = m.intersect(n, tol)?;
    let off = &Matrix::identity(m.ambient_dim()) - &l.projector();
    Ok(ReducedPair {
        m1: Subspace::span_of_columns(&(&off * m.basis()), tol)?,
        n1: Subspace::span_of_columns(&(&off * n.basis()), tol)?,
        l,
    })
}

/// Companion `N₁ = U⁻¹(M ⊖ M₁)` of `M₁ ⊆ M`, with `U = P_(M|K)|_N`, and the
/// constant `C'` for which `‖x + y‖ ≥ C'(‖x‖ + ‖y‖)` on `M₁ × N₁`.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedCompanion {
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub n1: Subspace,
    /// `min(1/‖U⁻¹‖, 1) / (√2 C)`
    pub c_prime: f64,
    /// `‖P_(M|K)‖` on `M + N`.
    pub c: f64,
    /// `‖U⁻¹‖ = ‖P_(N|K)|_M‖`
    pub u_inv_norm: f64,
    /// Sharp constant `inf ‖x + y‖ / (‖x‖ + ‖y‖) = σ_min([B_M₁ | B_N₁]) / √2`.
    pub attained: f64,
}

pub fn closed_companion(
    m: &Subspace,
    n: &Subspace,
    k: &Subspace,
    m1: &Subspace,
    tol: &TolerancePolicy,
) -> Result<ClosedCompanion> {
    let cert = verify_common_complement(m, n, k, tol)?;
    m.check_same_ambient(m1)?;
    ensure!(m.contains_subspace(m1, tol)?, Precondition, "M1 is not contained in M");
    let m1c = m1.coordinates_in(m, tol)?;
    let m2 = m1c.orthocomplement().embed_from(m)?;
    let n1 = m2.image(&cert.p_n_along_k, tol)?;

    let y = m.sum(n, tol)?;
    let c = (&cert.p_m_along_k * y.basis()).norm2()?;
    let u_inv_norm = (&cert.p_n_along_k * m.basis()).norm2()?;
    let c_prime = if u_inv_norm > 0.0 {
        (1.0 / u_inv_norm).min(1.0)
    } else {
        1.0
    } / (std::f64::consts::SQRT_2 * c.max(1.0));
    let attained = if m1.is_zero() || n1.is_zero() {
        1.0
    } else {
        m1.basis().hcat(n1.basis()).sigma_min()? / std::f64::consts::SQRT_2
    };
    ensure!(
        attained >= c_prime - CERT_TOL,
        Numerical,
        "‖x + y‖ ≥ C'(‖x‖ + ‖y‖) fails: sharp constant {attained} < C' = {c_prime}"
    );
    Ok(ClosedCompanion {
        n1,
        c_prime,
        c,
        u_inv_norm,
        attained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let t = tol();
        let m = coord(3, &[0, 1]);
        let r = reduce_pair(&m, &m, &t).unwrap();
        assert!(r.m1.is_zero() && r.n1.is_zero() && r.l.equals(&m, &t).unwrap());

        let (m, n) = (coord(3, &[0]), coord(3, &[1]));
        let r = reduce_pair(&m, &n, &t).unwrap();
        assert!(r.m1.equals(&m, &t).unwrap() && r.n1.equals(&n, &t).unwrap() && r.l.is_zero());

        let r = reduce_pair(&coord(4, &[0, 1]), &coord(4, &[0, 2]), &t).unwrap();
        assert!(r.m1.equals(&coord(4, &[1]), &t).unwrap());
        assert!(r.n1.equals(&coord(4, &[2]), &t).unwrap());
        assert!(r.l.equals(&coord(4, &[0]), &t).unwrap());
    }

    #[test]
    fn companion_in_orthogonal_setting() {
        let t = tol();
        let m = coord(4, &[0, 1]);
        let c = closed_companion(&m, &m, &coord(4, &[2, 3]), &coord(4, &[0]), &t).unwrap();
        assert!(c.n1.equals(&coord(4, &[1]), &t).unwrap());
        assert!((c.c_prime - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(c.attained >= c.c_prime);
    }

    #[test]
    fn companion_degenerate_cases() {
        let t = tol();
        let m = coord(4, &[0, 1]);
        let c = closed_companion(&m, &m, &coord(4, &[2, 3]), &m, &t).unwrap();
        assert!(c.n1.is_zero());

        let m = coord(2, &[0]);
        let n = Subspace::from_spanning(&[vec![1.0, 1.0]], 2, &t).unwrap();
        let c = closed_companion(&m, &n, &coord(2, &[1]), &Subspace::zero(2), &t).unwrap();
        assert!(c.n1.equals(&n, &t).unwrap());
    }

    #[test]
    fn companion_requires_m1_inside_m() {
        let t = tol();
        let m = coord(3, &[0]);
        let r = closed_companion(&m, &m, &coord(3, &[1, 2]), &coord(3, &[1]), &t);
        assert!(matches!(r, Err(crate::Error::Precondition(_))));
    }
}
