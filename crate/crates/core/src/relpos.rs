//! Relative position of a pair of subspaces: principal angles, the four
//! corner intersections, the spectral and cone tests, and the master
//! common-complement decision.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::kernel::{clamp, svd, sym_eig, TolerancePolicy};
use crate::subspace::Subspace;

/// Corner dimensions and principal angles of a pair `{M, N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDecomposition {
    /// `dim(M ∩ N)`
    pub dim_mn: usize,
    /// `dim(M ∩ N^⊥)`
    pub dim_m_nperp: usize,
    /// `dim(M^⊥ ∩ N)`
    pub dim_mperp_n: usize,
    /// `dim(M^⊥ ∩ N^⊥)`
    pub dim_mperp_nperp: usize,
    /// Number of principal angles strictly inside `(0, π/2)`.
    pub generic_mult: usize,
    /// M-sided principal angles, ascending, length `dim M`.
    pub angles: Vec<f64>,
    /// Eigenvalues of `G*G` with `G = P_N|_M`, descending.
    pub gram_spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionReport {
    pub decomposition: PairDecomposition,
    pub generic_position: bool,
    pub generalized_generic: bool,
    pub position_p_prime: bool,
    pub equivalently_positioned: bool,
    pub dims_equal: bool,
    /// `dim(M ⊖ (M∩N)) = dim(N ⊖ (M∩N))`
    pub reduced_dims_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCheck {
    pub holds: bool,
    pub left_count: usize,
    pub right_count: usize,
    pub spectral_count: usize,
}

/// Cone `K^ε_M = {x ∈ M : dist(x, N) ≤ ε‖x‖}` and its twin in `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeReport {
    pub epsilon: f64,
    pub max_subspace_dim_m: usize,
    pub max_subspace_dim_n: usize,
    /// Upper linear codimension of the cone in `M`.
    pub ulc_m: usize,
    pub ulc_n: usize,
}

/// Outcome of each independent criterion evaluated by [`has_common_complement`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossChecks {
    pub epsilon: f64,
    pub equivalently_positioned: bool,
    pub spectral: SpectralCheck,
    pub cone: ConeReport,
    pub cone_ulc_equal: bool,
    pub reduced_dims_equal: bool,
}

/// How "for some ε" clauses are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonSemantics {
    /// Holds for at least one ε on the ladder below the default.
    Some,
    /// Holds for every ε on the ladder below the default.
    AllSufficientlySmall,
}

const LADDER_STEPS: i32 = 8;

/// M-sided principal angles of `M` against `N`, ascending and padded with
/// `π/2` up to `dim M`.
///
/// Cosines come from the singular values of `B_M^T B_N`, sines from those of
/// `(I - P_N) B_M`; each angle is taken from whichever is better conditioned,
/// switching at `cos²θ = 1/2`.
pub fn m_sided_angles(m: &Subspace, n: &Subspace) -> Result<Vec<f64>> {
    m.check_same_ambient(n)?;
    let k = m.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    let bm = m.basis();
    let bn = n.basis();
    let cross = &bm.transpose() * bn;
    let mut cosines: Vec<f64> = if n.dim() == 0 {
        Vec::new()
    } else {
        svd(&cross)?.sigma.iter().map(|&c| clamp(c, 0.0, 1.0)).collect()
    };
    cosines.resize(k, 0.0);

    let residual = bm - &(bn * &cross.transpose());
    let mut sines: Vec<f64> = svd(&residual)?.sigma.iter().map(|&s| clamp(s, 0.0, 1.0)).collect();
    sines.reverse();

    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| if c * c >= 0.5 { s.asin() } else { c.acos() })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Principal angles of the cross spectrum, ascending, length `min(dim M, dim N)`.
pub fn principal_angles(m: &Subspace, n: &Subspace) -> Result<Vec<f64>> {
    let mut angles = m_sided_angles(m, n)?;
    angles.truncate(m.dim().min(n.dim()));
    Ok(angles)
}

fn is_zero_angle(theta: f64, tol: &TolerancePolicy) -> bool {
    theta <= tol.angle_tol
}

fn is_right_angle(theta: f64, tol: &TolerancePolicy) -> bool {
    theta >= FRAC_PI_2 - tol.angle_tol
}

pub fn pair_decomposition(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<PairDecomposition> {
    m.check_same_ambient(n)?;
    let mperp = m.orthocomplement();
    let nperp = n.orthocomplement();
    let dim_mn = m.intersect(n, tol)?.dim();
    let dim_m_nperp = m.intersect(&nperp, tol)?.dim();
    let dim_mperp_n = mperp.intersect(n, tol)?.dim();
    let dim_mperp_nperp = mperp.intersect(&nperp, tol)?.dim();

    let angles = m_sided_angles(m, n)?;
    let generic_mult = angles
        .iter()
        .filter(|&&t| !is_zero_angle(t, tol) && !is_right_angle(t, tol))
        .count();

    let k = m.dim();
    let gram_spectrum = if k == 0 {
        Vec::new()
    } else {
        let cross = &m.basis().transpose() * n.basis();
        let mut lambda: Vec<f64> = sym_eig(&(&cross * &cross.transpose()))?
            .lambda
            .into_iter()
            .map(|l| clamp(l, 0.0, 1.0))
            .collect();
        lambda.reverse();
        lambda
    };

    let d = PairDecomposition {
        dim_mn,
        dim_m_nperp,
        dim_mperp_n,
        dim_mperp_nperp,
        generic_mult,
        angles,
        gram_spectrum,
    };
    check_consistency(&d, m.dim(), n.dim(), m.ambient_dim(), tol)?;
    Ok(d)
}

fn check_consistency(d: &PairDecomposition, k: usize, l: usize, ambient: usize, tol: &TolerancePolicy) -> Result<()> {
    let zeros = d.angles.iter().filter(|&&t| is_zero_angle(t, tol)).count();
    let rights = d.angles.iter().filter(|&&t| is_right_angle(t, tol)).count();
    let fail = |what: String| Err(Error::Numerical(format!("inconsistent pair decomposition: {what}")));
    if d.dim_mn + d.dim_m_nperp + d.generic_mult != k {
        return fail(format!(
            "dim(M∩N) + dim(M∩N⊥) + generic = {} + {} + {} != dim M = {k}",
            d.dim_mn, d.dim_m_nperp, d.generic_mult
        ));
    }
    if d.dim_mn + d.dim_mperp_n + d.generic_mult != l {
        return fail(format!(
            "dim(M∩N) + dim(M⊥∩N) + generic = {} + {} + {} != dim N = {l}",
            d.dim_mn, d.dim_mperp_n, d.generic_mult
        ));
    }
    // The four corners plus both halves of each generic plane exhaust R^n.
    let total = d.dim_mn + d.dim_m_nperp + d.dim_mperp_n + d.dim_mperp_nperp + 2 * d.generic_mult;
    if total != ambient {
        return fail(format!(
            "corner dimensions plus generic planes sum to {total}, not {ambient}"
        ));
    }
    if zeros != d.dim_mn || rights != d.dim_m_nperp {
        return fail(format!(
            "angle multiset has {zeros} zero and {rights} right angles, corners say {} and {}",
            d.dim_mn, d.dim_m_nperp
        ));
    }
    for (i, &g) in d.gram_spectrum.iter().enumerate() {
        let c = d.angles[i].cos();
        if (g - c * c).abs() > 1e-9 {
            return fail(format!("gram eigenvalue {g} does not match cos² = {}", c * c));
        }
    }
    Ok(())
}

pub fn classify(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<PositionReport> {
    let d = pair_decomposition(m, n, tol)?;
    let equivalently_positioned = d.dim_m_nperp == d.dim_mperp_n;
    let generic_position = d.dim_mn == 0 && d.dim_m_nperp == 0 && d.dim_mperp_n == 0 && d.dim_mperp_nperp == 0;
    let generalized_generic = d.dim_mn == 0 && d.dim_mperp_nperp == 0 && equivalently_positioned;
    let position_p_prime = d.dim_m_nperp == 0 && d.dim_mperp_n == 0;
    let reduced_dims_equal = m.dim() - d.dim_mn == n.dim() - d.dim_mn;
    Ok(PositionReport {
        dims_equal: m.dim() == n.dim(),
        decomposition: d,
        generic_position,
        generalized_generic,
        position_p_prime,
        equivalently_positioned,
        reduced_dims_equal,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    ensure!(
        epsilon > 0.0 && epsilon < 1.0,
        Input,
        "epsilon must lie in (0, 1), got {epsilon}"
    );
    Ok(())
}

fn spectral_check_from(d: &PairDecomposition, ambient: usize, epsilon: f64, tol: &TolerancePolicy) -> SpectralCheck {
    let floor = tol.rank_threshold(1.0, (ambient, ambient));
    let band = tol.rank_abs;
    let spectral_count = d
        .gram_spectrum
        .iter()
        .filter(|&&l| l > floor + band && l < 1.0 - epsilon - band)
        .count();
    let left_count = d.dim_m_nperp + spectral_count;
    let right_count = d.dim_mperp_n + spectral_count;
    SpectralCheck {
        holds: left_count == right_count,
        left_count,
        right_count,
        spectral_count,
    }
}

/// Dimension-count test: `dim(M∩N⊥) + dim E((0,1-ε))(M)` against
/// `dim(M⊥∩N) + dim E((0,1-ε))(M)`, with `E` the spectral measure of `G*G`.
/// In finite dimensions it holds exactly when the pair is equivalently
/// positioned.
pub fn spectral_count_check(m: &Subspace, n: &Subspace, epsilon: f64, tol: &TolerancePolicy) -> Result<SpectralCheck> {
    check_epsilon(epsilon)?;
    let d = pair_decomposition(m, n, tol)?;
    Ok(spectral_check_from(&d, m.ambient_dim(), epsilon, tol))
}

/// Evaluates the spectral test on the ladder `ε, ε/2, …, ε/2^8`.
pub fn spectral_count_with(
    m: &Subspace,
    n: &Subspace,
    epsilon: f64,
    semantics: EpsilonSemantics,
    tol: &TolerancePolicy,
) -> Result<bool> {
    check_epsilon(epsilon)?;
    let d = pair_decomposition(m, n, tol)?;
    let mut ladder = (0..=LADDER_STEPS).map(|j| epsilon * 2f64.powi(-j));
    let holds_at = |eps: f64| spectral_check_from(&d, m.ambient_dim(), eps, tol).holds;
    Ok(match semantics {
        EpsilonSemantics::Some => ladder.any(holds_at),
        EpsilonSemantics::AllSufficientlySmall => ladder.all(holds_at),
    })
}

fn cone_from(m_angles: &[f64], n_angles: &[f64], epsilon: f64) -> ConeReport {
    // dist(x, N)² / ‖x‖² ranges over sin²θ on M; by min-max the largest
    // subspace inside the cone is spanned by the principal vectors with
    // sin θ ≤ ε.
    let inside = |angles: &[f64]| angles.iter().filter(|&&t| t.sin() <= epsilon).count();
    let max_m = inside(m_angles);
    let max_n = inside(n_angles);
    ConeReport {
        epsilon,
        max_subspace_dim_m: max_m,
        max_subspace_dim_n: max_n,
        ulc_m: m_angles.len() - max_m,
        ulc_n: n_angles.len() - max_n,
    }
}

pub fn cone_report(m: &Subspace, n: &Subspace, epsilon: f64, _tol: &TolerancePolicy) -> Result<ConeReport> {
    check_epsilon(epsilon)?;
    let m_angles = m_sided_angles(m, n)?;
    let n_angles = m_sided_angles(n, m)?;
    Ok(cone_from(&m_angles, &n_angles, epsilon))
}

/// Smallest sine over the strictly positive principal angles, or 1 when
/// there are none. Sums are always closed here; this margin is the
/// quantitative stand-in that shrinks as a pair approaches a non-closed sum.
pub fn sum_closedness_margin(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<f64> {
    let angles = principal_angles(m, n)?;
    Ok(margin_from(&angles, tol))
}

fn margin_from(angles: &[f64], tol: &TolerancePolicy) -> f64 {
    angles
        .iter()
        .filter(|&&t| !is_zero_angle(t, tol))
        .map(|t| t.sin())
        .fold(1.0, f64::min)
}

/// `min(1/2, margin/2)`: below every positive spectral gap of the pair.
pub fn default_epsilon(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<f64> {
    Ok((0.5 * sum_closedness_margin(m, n, tol)?).min(0.5))
}

/// Master decision: a common complement exists iff `dim M = dim N`.
///
/// Four further criteria (equivalent position, the spectral count, the cone
/// codimensions and the reduced dimension equality) are evaluated at
/// `epsilon` (default [`default_epsilon`]); any disagreement is reported as a
/// numerical failure since they are equivalent in finite dimensions.
pub fn has_common_complement(
    m: &Subspace,
    n: &Subspace,
    epsilon: Option<f64>,
    tol: &TolerancePolicy,
) -> Result<(bool, CrossChecks)> {
    let report = classify(m, n, tol)?;
    let d = &report.decomposition;
    let epsilon = match epsilon {
        Some(e) => {
            check_epsilon(e)?;
            e
        }
        None => (0.5 * margin_from(&d.angles[..m.dim().min(n.dim())], tol)).min(0.5),
    };
    let spectral = spectral_check_from(d, m.ambient_dim(), epsilon, tol);
    let cone = cone_from(&d.angles, &m_sided_angles(n, m)?, epsilon);
    let checks = CrossChecks {
        epsilon,
        equivalently_positioned: report.equivalently_positioned,
        cone_ulc_equal: cone.ulc_m == cone.ulc_n,
        spectral,
        cone,
        reduced_dims_equal: report.reduced_dims_equal,
    };
    let decision = report.dims_equal;
    let votes = [
        ("equivalently positioned", checks.equivalently_positioned),
        ("spectral count", checks.spectral.holds),
        ("cone codimensions", checks.cone_ulc_equal),
        ("reduced dimensions", checks.reduced_dims_equal),
    ];
    for (name, vote) in votes {
        if vote != decision {
            return Err(Error::Numerical(format!(
                "criterion `{name}` says {vote} but dim M = {}, dim N = {}; checks: {checks:?}",
                m.dim(),
                n.dim()
            )));
        }
    }
    Ok((decision, checks))
}
