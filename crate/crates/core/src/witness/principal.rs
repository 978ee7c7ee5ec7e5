use crate::error::Result;
use crate::kernel::{complete_orthonormal, norm, svd, Matrix};
use crate::subspace::Subspace;

/// Unit vectors `u ∈ M`, `v ∈ N` with `⟨u, v⟩ = cos(angle)`. Distinct pairs
/// span mutually orthogonal planes.
#[derive(Debug, Clone)]
pub struct PrincipalPair {
    pub angle: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Principal vectors of a pair, plus the directions of the larger subspace
/// left over when the dimensions differ (these lie in `M ∩ N^⊥` or `M^⊥ ∩ N`).
#[derive(Debug, Clone)]
pub struct PrincipalPairs {
    pub pairs: Vec<PrincipalPair>,
    pub m_only: Matrix,
    pub n_only: Matrix,
}

pub fn principal_pairs(m: &Subspace, n: &Subspace) -> Result<PrincipalPairs> {
    m.check_same_ambient(n)?;
    let amb = m.ambient_dim();
    let (k, l) = (m.dim(), n.dim());
    let p = k.min(l);
    if p == 0 {
        return Ok(PrincipalPairs {
            pairs: Vec::new(),
            m_only: m.basis().clone(),
            n_only: n.basis().clone(),
        });
    }
    let cross = &m.basis().transpose() * n.basis();
    let s = svd(&cross)?;
    let y = complete_orthonormal(&s.u, k);
    let z = complete_orthonormal(&s.v, l);
    let um = m.basis() * &y;
    let vn = n.basis() * &z;
    let pn = n.projector();

    let pairs = (0..p)
        .map(|i| {
            let u = um.column(i);
            let v = vn.column(i);
            let pu = pn.mul_vec(&u);
            let off: Vec<f64> = u.iter().zip(&pu).map(|(a, b)| a - b).collect();
            let cos = s.sigma[i].clamp(0.0, 1.0);
            PrincipalPair {
                angle: norm(&off).atan2(cos),
                u,
                v,
            }
        })
        .collect();
    let m_only = um.select_columns(&(p..k).collect::<Vec<_>>());
    debug_assert_eq!(m_only.rows(), amb);
    Ok(PrincipalPairs {
        pairs,
        m_only,
        n_only: vn.select_columns(&(p..l).collect::<Vec<_>>()),
    })
}

pub(crate) fn normalized_difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let r = norm(&d);
    d.into_iter().map(|x| x / r).collect()
}

pub(crate) fn normalized_sum(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let r = norm(&d);
    d.into_iter().map(|x| x / r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::dot;
    use crate::TolerancePolicy;

    #[test]
    fn pairs_are_biorthogonal() {
        let tol = TolerancePolicy::default();
        let m = Subspace::from_spanning(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]], 4, &tol).unwrap();
        let n = Subspace::from_spanning(&[vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]], 4, &tol).unwrap();
        let pp = principal_pairs(&m, &n).unwrap();
        assert_eq!(pp.pairs.len(), 2);
        for (i, a) in pp.pairs.iter().enumerate() {
            assert!((dot(&a.u, &a.v) - a.angle.cos()).abs() < 1e-14);
            for b in &pp.pairs[i + 1..] {
                assert!(dot(&a.u, &b.v).abs() < 1e-14);
                assert!(dot(&a.u, &b.u).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn leftover_directions() {
        let m = Subspace::coordinate(3, &[0, 1]).unwrap();
        let n = Subspace::coordinate(3, &[0]).unwrap();
        let pp = principal_pairs(&m, &n).unwrap();
        assert_eq!(pp.pairs.len(), 1);
        assert_eq!(pp.m_only.cols(), 1);
        assert!((pp.m_only[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }
}
