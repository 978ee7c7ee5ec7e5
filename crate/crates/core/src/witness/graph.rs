use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::kernel::{dot, gram_schmidt, svd, Matrix, TolerancePolicy};
use crate::relpos::classify;
use crate::subspace::Subspace;

use super::complement::{common_complement, orthogonal_rest, verify_common_complement};
use super::principal::{normalized_difference, normalized_sum, principal_pairs};
use super::{ComplementCertificate, GraphForm};

/// Contraction form `{Gr(T), Gr(-T)}` with `U` orthogonal.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionForm {
    pub form: GraphForm,
    /// `σ_min(I - T^T T)`; positive exactly when `M ∩ N^⊥ = {0}`.
    pub injectivity_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthoComplementCheck {
    /// Whether `M^⊥` complements both `M` and `N`.
    pub holds: bool,
    pub form: Option<GraphForm>,
    /// `σ_min(I - T T^T)` for the contraction of the pair.
    pub surjectivity_margin: Option<f64>,
}

fn assemble(t: Matrix, s: Matrix, u: Matrix) -> Result<GraphForm> {
    let (dim_x2, dim_x1) = t.shape();
    let cond_u = if u.rows() == 0 {
        1.0
    } else {
        let sv = svd(&u)?;
        let smin = *sv.sigma.last().unwrap();
        if smin <= 0.0 {
            return Err(Error::Numerical("graph form map U is singular".into()));
        }
        sv.sigma[0] / smin
    };
    Ok(GraphForm {
        dim_x1,
        dim_x2,
        t,
        s,
        u,
        cond_u,
    })
}

/// `X₁ = K^⊥`, `X₂ = K` and `U` the orthogonal change of coordinates; `M` and
/// `N` become the graphs of `T = B₂^T P_(M|K) B₁` and `S = B₂^T P_(N|K) B₁`.
pub fn graph_pair_form(m: &Subspace, n: &Subspace, k: &Subspace, tol: &TolerancePolicy) -> Result<GraphForm> {
    let cert = verify_common_complement(m, n, k, tol)?;
    let b1 = k.orthocomplement().basis().clone();
    let b2t = k.basis().transpose();
    let t = &(&b2t * &cert.p_m_along_k) * &b1;
    let s = &(&b2t * &cert.p_n_along_k) * &b1;
    let u = b1.transpose().vcat(&b2t);
    assemble(t, s, u)
}

fn zero_form_from(m: &Subspace, cert: &ComplementCertificate) -> Result<GraphForm> {
    let amb = m.ambient_dim();
    let p = &cert.p_m_along_k;
    let bm = m.basis();
    let bkt = cert.k.basis().transpose();
    let u = (&bm.transpose() * p).vcat(&(&bkt * &(&Matrix::identity(amb) - p)));
    let t = Matrix::zeros(cert.k.dim(), m.dim());
    let s = &bkt * &(&(&cert.p_n_along_k * bm) - bm);
    assemble(t, s, u)
}

/// `X₁ = M`, `X₂ = K` with `U x = (P x, (I - P) x)`, `P = P_(M|K)`, so that
/// `M` maps to `X₁ ⊕ {0}`. Uses the default common complement.
pub fn zero_graph_form(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<GraphForm> {
    zero_form_from(m, &common_complement(m, n, tol)?)
}

/// [`zero_graph_form`] along a given common complement `K`.
pub fn zero_graph_form_along(m: &Subspace, n: &Subspace, k: &Subspace, tol: &TolerancePolicy) -> Result<GraphForm> {
    ensure!(
        m.dim() == n.dim(),
        NoComplement,
        "dim M = {} but dim N = {}",
        m.dim(),
        n.dim()
    );
    zero_form_from(m, &verify_common_complement(m, n, k, tol)?)
}

/// Applies the shear `[[I, 0], [-S/2, I]]` to a zero form, giving `{Gr(-S/2), Gr(S/2)}`.
pub(crate) fn shear(zero: GraphForm) -> Result<GraphForm> {
    let (d1, d2) = (zero.dim_x1, zero.dim_x2);
    let half = zero.s.scale(0.5);
    let h = Matrix::identity(d1)
        .hcat(&Matrix::zeros(d1, d2))
        .vcat(&(-&half).hcat(&Matrix::identity(d2)));
    let u = &h * &zero.u;
    assemble(-&half, half, u)
}

/// `{Gr(-T), Gr(T)}`: the zero form followed by a shear. The returned T-field
/// is exactly the negated S-field.
pub fn antisymmetric_graph_form(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<GraphForm> {
    shear(zero_graph_form(m, n, tol)?)
}

pub fn antisymmetric_graph_form_along(
    m: &Subspace,
    n: &Subspace,
    k: &Subspace,
    tol: &TolerancePolicy,
) -> Result<GraphForm> {
    shear(zero_graph_form_along(m, n, k, tol)?)
}

/// Unitary form `{Gr(T), Gr(-T)}` with `T` a positive diagonal contraction:
/// `X₁` is spanned by the bisectors `u + v` and `M ∩ N`, `X₂` by the
/// normals `u - v` and `(M + N)^⊥`, and `T` carries `tan(θ/2)` per principal
/// plane.
pub fn contraction_graph_form(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<ContractionForm> {
    let report = classify(m, n, tol)?;
    ensure!(
        report.equivalently_positioned,
        Precondition,
        "pair is not equivalently positioned: dim(M∩N⊥) = {}, dim(M⊥∩N) = {}",
        report.decomposition.dim_m_nperp,
        report.decomposition.dim_mperp_n
    );
    let amb = m.ambient_dim();
    let pp = principal_pairs(m, n)?;
    let (generic, common): (Vec<_>, Vec<_>) = pp.pairs.iter().partition(|p| p.angle > tol.angle_tol);

    let mut x1_cols: Vec<Vec<f64>> = generic.iter().map(|p| normalized_sum(&p.u, &p.v)).collect();
    x1_cols.extend(common.iter().map(|p| p.u.clone()));
    let x1 = gram_schmidt(&Matrix::from_columns(amb, &x1_cols)?, 1e-12);
    let d: Vec<Vec<f64>> = generic.iter().map(|p| normalized_difference(&p.u, &p.v)).collect();
    let dq = gram_schmidt(&Matrix::from_columns(amb, &d)?, 1e-12);
    let x2 = dq.hcat(&orthogonal_rest(&x1.hcat(&dq)));
    ensure!(
        x1.cols() == m.dim() && x1.cols() + x2.cols() == amb,
        Numerical,
        "contraction form lost a direction: dim X1 = {}, dim X2 = {}",
        x1.cols(),
        x2.cols()
    );

    let mut t = Matrix::zeros(x2.cols(), x1.cols());
    for (i, p) in generic.iter().enumerate() {
        let b = x1.column(i);
        let dd = x2.column(i);
        t[(i, i)] = dot(&dd, &p.u) / dot(&b, &p.u);
    }
    let s = -&t;
    let injectivity_margin = if t.cols() == 0 {
        1.0
    } else {
        (&Matrix::identity(t.cols()) - &(&t.transpose() * &t)).sigma_min()?
    };
    let u = x1.transpose().vcat(&x2.transpose());
    Ok(ContractionForm {
        form: assemble(t, s, u)?,
        injectivity_margin,
    })
}

/// Whether `M^⊥` is a common complement, i.e. `dim M = dim N` and
/// `M^⊥ ∩ N = {0}`. When it is, also returns the graph form over `M^⊥` and
/// the margin of `I - T T^T` for the pair's contraction.
pub fn orthocomplement_common_complement(
    m: &Subspace,
    n: &Subspace,
    tol: &TolerancePolicy,
) -> Result<OrthoComplementCheck> {
    m.check_same_ambient(n)?;
    let mperp = m.orthocomplement();
    let holds = m.dim() == n.dim() && mperp.intersect(n, tol)?.is_zero();
    if !holds {
        return Ok(OrthoComplementCheck {
            holds,
            form: None,
            surjectivity_margin: None,
        });
    }
    let form = graph_pair_form(m, n, &mperp, tol)?;
    let t = contraction_graph_form(m, n, tol)?.form.t;
    let margin = if t.rows() == 0 {
        1.0
    } else {
        (&Matrix::identity(t.rows()) - &(&t * &t.transpose())).sigma_min()?
    };
    let threshold = tol.rank_threshold(1.0, (t.rows(), t.rows()));
    ensure!(
        margin > threshold,
        Numerical,
        "I - T T^T is numerically singular (σ_min = {margin:e}) although M⊥ ∩ N = {{0}}"
    );
    Ok(OrthoComplementCheck {
        holds,
        form: Some(form),
        surjectivity_margin: Some(margin),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn span(n: usize, vs: &[&[f64]]) -> Subspace {
        Subspace::from_spanning(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), n, &tol()).unwrap()
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx).unwrap()
    }

    fn scalar(a: &Matrix) -> f64 {
        assert_eq!(a.shape(), (1, 1));
        a[(0, 0)]
    }

    fn round_trip(f: &GraphForm, m: &Subspace, n: &Subspace) {
        let (rm, rn) = f.residuals(m, n, &tol()).unwrap();
        assert!(rm <= 1e-12 && rn <= 1e-12, "residuals {rm:e} {rn:e}");
    }

    #[test]
    fn pair_form_of_line_and_diagonal() {
        let (m, n, k) = (coord(2, &[0]), span(2, &[&[1.0, 1.0]]), coord(2, &[1]));
        let f = graph_pair_form(&m, &n, &k, &tol()).unwrap();
        assert!(scalar(&f.t).abs() < 1e-15);
        assert!((scalar(&f.s) - 1.0).abs() < 1e-15);
        assert!((&f.u - &Matrix::identity(2)).max_abs() < 1e-15);
        round_trip(&f, &m, &n);
    }

    #[test]
    fn pair_form_of_equal_subspaces() {
        let m = span(3, &[&[1.0, 1.0, 0.0]]);
        let f = graph_pair_form(&m, &m, &m.orthocomplement(), &tol()).unwrap();
        assert!(f.t.max_abs() < 1e-15 && f.s.max_abs() < 1e-15);
    }

    #[test]
    fn pair_form_in_four_dimensions() {
        let (m, n) = (coord(4, &[0, 1]), coord(4, &[0, 2]));
        let k = span(4, &[&[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]]);
        let f = graph_pair_form(&m, &n, &k, &tol()).unwrap();
        assert_eq!((f.dim_x1, f.dim_x2), (2, 2));
        assert!((f.cond_u - 1.0).abs() < 1e-12);
        round_trip(&f, &m, &n);
    }

    #[test]
    fn zero_form_examples() {
        let (m, n, k) = (coord(2, &[0]), span(2, &[&[1.0, 1.0]]), coord(2, &[1]));
        let f = zero_graph_form_along(&m, &n, &k, &tol()).unwrap();
        assert!(f.t.max_abs() == 0.0);
        assert!((scalar(&f.s) - 1.0).abs() < 1e-15);
        round_trip(&f, &m, &n);

        let f = zero_graph_form(&m, &m, &tol()).unwrap();
        assert!(f.s.max_abs() < 1e-15);

        // Along the default complement (e1 - e2)/√2, G₂⁻¹ e1 - e1 = e2 - e1.
        let n = coord(2, &[1]);
        let f = zero_graph_form(&m, &n, &tol()).unwrap();
        assert!((scalar(&f.s).abs() - 2f64.sqrt()).abs() < 1e-15);
        round_trip(&f, &m, &n);
    }

    #[test]
    fn antisymmetric_examples() {
        let (m, n, k) = (coord(2, &[0]), span(2, &[&[1.0, 1.0]]), coord(2, &[1]));
        let f = antisymmetric_graph_form_along(&m, &n, &k, &tol()).unwrap();
        assert!((scalar(&f.s) - 0.5).abs() < 1e-15);
        assert_eq!(f.t, -&f.s);
        let shear = Matrix::from_rows(&[vec![1.0, 0.0], vec![-0.5, 1.0]]).unwrap();
        assert!((&f.u - &shear).max_abs() < 1e-15);
        round_trip(&f, &m, &n);

        let f = antisymmetric_graph_form(&m, &m, &tol()).unwrap();
        assert!(f.t.max_abs() < 1e-15);

        let n = coord(2, &[1]);
        let f = antisymmetric_graph_form(&m, &n, &tol()).unwrap();
        assert!((scalar(&f.s).abs() - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.t, -&f.s);
        round_trip(&f, &m, &n);
    }

    #[test]
    fn contraction_examples() {
        let c = contraction_graph_form(&coord(2, &[0]), &coord(2, &[1]), &tol()).unwrap();
        assert!((scalar(&c.form.t) - 1.0).abs() < 1e-15);
        assert!(c.injectivity_margin < 1e-15);

        let m = span(3, &[&[1.0, 0.0, 2.0]]);
        let c = contraction_graph_form(&m, &m, &tol()).unwrap();
        assert!(c.form.t.max_abs() < 1e-15);
        assert!((c.injectivity_margin - 1.0).abs() < 1e-15);

        let (m, n) = (coord(2, &[0]), span(2, &[&[1.0, 1.0]]));
        let c = contraction_graph_form(&m, &n, &tol()).unwrap();
        assert!((scalar(&c.form.t) - FRAC_PI_8.tan()).abs() < 1e-15);
        assert!(c.injectivity_margin > 0.5);
        assert!((c.form.cond_u - 1.0).abs() < 1e-14);
        assert_eq!(c.form.s, -&c.form.t);
        round_trip(&c.form, &m, &n);
    }

    #[test]
    fn contraction_rejects_unequal_dimensions() {
        let r = contraction_graph_form(&coord(3, &[0, 1]), &coord(3, &[2]), &tol());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn orthocomplement_examples() {
        let r = orthocomplement_common_complement(&coord(2, &[0]), &span(2, &[&[1.0, 1.0]]), &tol()).unwrap();
        assert!(r.holds);
        assert!(r.surjectivity_margin.unwrap() > 0.5);
        let r = orthocomplement_common_complement(&coord(2, &[0]), &coord(2, &[1]), &tol()).unwrap();
        assert!(!r.holds && r.form.is_none());
        let m = coord(3, &[1]);
        let r = orthocomplement_common_complement(&m, &m, &tol()).unwrap();
        let f = r.form.unwrap();
        assert!(f.t.max_abs() < 1e-15 && f.s.max_abs() < 1e-15);
        assert!((r.surjectivity_margin.unwrap() - 1.0).abs() < 1e-15);
    }
}
