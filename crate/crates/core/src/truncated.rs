//! Finite truncations of three infinite-dimensional constructions: a pair
//! with a non-closed sum, a `Z`-indexed shift triple, and a pair in
//! hexagonal position.
//!
//! At every finite level the relative position collapses to dimension
//! counting; the diagnostics expose that collapse (and the margins that
//! drift towards the infinite-dimensional behaviour).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{ensure, Error, Result};
use crate::kernel::{Matrix, TolerancePolicy};
use crate::relpos::{has_common_complement, pair_decomposition, sum_closedness_margin};
use crate::subspace::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    NonclosedSum,
    ShiftTriple,
    Hexagonal,
}

impl FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonclosed-sum" => Ok(Self::NonclosedSum),
            "shift-triple" => Ok(Self::ShiftTriple),
            "hexagonal" => Ok(Self::Hexagonal),
            other => Err(Error::Input(format!(
                "unknown example `{other}` (expected nonclosed-sum, shift-triple or hexagonal)"
            ))),
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonclosedSum => "nonclosed-sum",
            Self::ShiftTriple => "shift-triple",
            Self::Hexagonal => "hexagonal",
        })
    }
}

/// Truncation window for the shift triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftWindow {
    /// Indices `-level..=level` for every pair.
    Asymmetric,
    /// Each pair is cut to a window symmetric about the gap between its two
    /// index ranges: `-level..=level-1` for `(M, N)`, `-level..=level` for
    /// `(N, L)` and `(M, L)`.
    Symmetric,
}

impl FromStr for ShiftWindow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric" => Ok(Self::Asymmetric),
            "symmetric" => Ok(Self::Symmetric),
            other => Err(Error::Input(format!(
                "unknown shift window `{other}` (expected symmetric or asymmetric)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostics {
    pub pair: String,
    /// Index window `[lo, hi]` the pair was evaluated in, for `Z`-indexed examples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    pub dim_m: usize,
    pub dim_n: usize,
    pub decision: bool,
    pub sum_closedness_margin: f64,
    pub dim_mn: usize,
    pub dim_m_nperp: usize,
    pub dim_mperp_n: usize,
    pub dim_mperp_nperp: usize,
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub dims: BTreeMap<String, usize>,
    pub pairs: Vec<PairDiagnostics>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedExample {
    pub name: ExampleName,
    pub level: usize,
    pub ambient_dim: usize,
    #[serde(serialize_with = "ser_named")]
    pub subspaces: BTreeMap<String, Subspace>,
    pub diagnostics: Diagnostics,
}

fn ser_named<S: Serializer>(m: &BTreeMap<String, Subspace>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: BTreeMap<&String, Vec<Vec<f64>>> = m.iter().map(|(k, v)| (k, v.basis().transpose().to_rows())).collect();
    rows.serialize(s)
}

impl TruncatedExample {
    pub fn subspace(&self, name: &str) -> &Subspace {
        &self.subspaces[name]
    }

    pub fn pair(&self, name: &str) -> Option<&PairDiagnostics> {
        self.diagnostics.pairs.iter().find(|p| p.pair == name)
    }
}

fn check_level(level: usize) -> Result<()> {
    ensure!(level >= 1, Input, "level must be at least 1");
    Ok(())
}

fn diagnose(
    label: &str,
    m: &Subspace,
    n: &Subspace,
    window: Option<(i64, i64)>,
    tol: &TolerancePolicy,
) -> Result<PairDiagnostics> {
    let (decision, _) = has_common_complement(m, n, None, tol)?;
    let d = pair_decomposition(m, n, tol)?;
    let mut angles = d.angles.clone();
    angles.truncate(m.dim().min(n.dim()));
    Ok(PairDiagnostics {
        pair: label.to_string(),
        window,
        dim_m: m.dim(),
        dim_n: n.dim(),
        decision,
        sum_closedness_margin: sum_closedness_margin(m, n, tol)?,
        dim_mn: d.dim_mn,
        dim_m_nperp: d.dim_m_nperp,
        dim_mperp_n: d.dim_mperp_n,
        dim_mperp_nperp: d.dim_mperp_nperp,
        angles,
    })
}

fn from_vectors(n: usize, vectors: Vec<Vec<f64>>) -> Result<Subspace> {
    // The generators are orthonormal by construction.
    Subspace::from_orthonormal(Matrix::from_columns(n, &vectors)?)
}

/// `M = span{e_{2k-1}}`, `N = span{√((k-1)/k) e_{2k-1} + √(1/k) e_{2k}}` for
/// `k = 1..=level` in `R^{2 level}`. The `k`-th principal angle has sine
/// `1/√k`, so the sum-closedness margin is `1/√level`.
pub fn nonclosed_sum_pair(level: usize, tol: &TolerancePolicy) -> Result<TruncatedExample> {
    check_level(level)?;
    let amb = 2 * level;
    let mut mv = Vec::with_capacity(level);
    let mut nv = Vec::with_capacity(level);
    for k in 1..=level {
        let kf = k as f64;
        let mut e = vec![0.0; amb];
        e[2 * k - 2] = 1.0;
        mv.push(e);
        let mut v = vec![0.0; amb];
        v[2 * k - 2] = ((kf - 1.0) / kf).sqrt();
        v[2 * k - 1] = (1.0 / kf).sqrt();
        nv.push(v);
    }
    let m = from_vectors(amb, mv)?;
    let n = from_vectors(amb, nv)?;
    let pair = diagnose("M,N", &m, &n, None, tol)?;
    Ok(TruncatedExample {
        name: ExampleName::NonclosedSum,
        level,
        ambient_dim: amb,
        diagnostics: Diagnostics {
            dims: BTreeMap::from([("M".into(), m.dim()), ("N".into(), n.dim())]),
            pairs: vec![pair],
            note: "dimensions agree at every level, so a common complement always exists; the margin 1/sqrt(level) \
                   tends to 0 as the truncation grows"
                .into(),
        },
        subspaces: BTreeMap::from([("M".into(), m), ("N".into(), n)]),
    })
}

fn coordinate_span(lo: i64, hi: i64, keep: impl Fn(i64) -> bool) -> Result<Subspace> {
    let amb = (hi - lo + 1) as usize;
    let idx: Vec<usize> = (lo..=hi).filter(|&i| keep(i)).map(|i| (i - lo) as usize).collect();
    Subspace::coordinate(amb, &idx)
}

fn shift_members(lo: i64, hi: i64) -> Result<(Subspace, Subspace, Subspace)> {
    Ok((
        coordinate_span(lo, hi, |i| i >= 0)?,
        coordinate_span(lo, hi, |i| i <= -1)?,
        coordinate_span(lo, hi, |i| i >= 1)?,
    ))
}

/// `M = span{e_k : k ≥ 0}`, `N = span{e_k : k ≤ -1}`, `L = span{e_k : k ≥ 1}`
/// on indices `-level..=level` (index `k` sits at coordinate `k + level`).
pub fn shift_triple(level: usize, window: ShiftWindow, tol: &TolerancePolicy) -> Result<TruncatedExample> {
    check_level(level)?;
    let lv = level as i64;
    let full = (-lv, lv);
    let (m, n, l) = shift_members(full.0, full.1)?;
    let mn_window = match window {
        ShiftWindow::Asymmetric => full,
        ShiftWindow::Symmetric => (-lv, lv - 1),
    };
    let pairs = [
        ("M,N", mn_window, 0usize, 1usize),
        ("N,L", full, 1, 2),
        ("M,L", full, 0, 2),
    ]
    .into_iter()
    .map(|(label, w, a, b)| {
        let members = shift_members(w.0, w.1)?;
        let pick = |i: usize| match i {
            0 => &members.0,
            1 => &members.1,
            _ => &members.2,
        };
        diagnose(label, pick(a), pick(b), Some(w), tol)
    })
    .collect::<Result<Vec<_>>>()?;
    ensure!(
        l.dim() < m.dim() && m.contains_subspace(&l, tol)?,
        Numerical,
        "L is not a proper subspace of M"
    );
    let note = match window {
        ShiftWindow::Asymmetric => {
            "on the window -level..level dim M = level + 1 and dim N = level, so (M, N) loses its common \
             complement; this is a truncation artifact"
        }
        ShiftWindow::Symmetric => {
            "each pair is cut to a window symmetric about its gap, restoring equal dimensions for (M, N) and \
             (N, L); L is a proper subspace of M, so (M, L) never has a common complement"
        }
    };
    Ok(TruncatedExample {
        name: ExampleName::ShiftTriple,
        level,
        ambient_dim: 2 * level + 1,
        diagnostics: Diagnostics {
            dims: BTreeMap::from([("L".into(), l.dim()), ("M".into(), m.dim()), ("N".into(), n.dim())]),
            pairs,
            note: note.into(),
        },
        subspaces: BTreeMap::from([("L".into(), l), ("M".into(), m), ("N".into(), n)]),
    })
}

/// `f_k = ½ e_{2k-1} - (√3/2) e_{2k}`, `g_k = ½ e_{2k-1} + (√3/2) e_{2k}` for
/// `k = 1..=level` and `g_0 = e_0`, in `R^{2 level + 1}`; `M = span{f_k}`,
/// `N = span{g_0, g_k}`.
pub fn hexagonal_pair(level: usize, tol: &TolerancePolicy) -> Result<TruncatedExample> {
    check_level(level)?;
    let amb = 2 * level + 1;
    let h = 3f64.sqrt() / 2.0;
    let mut fv = Vec::with_capacity(level);
    let mut e0 = vec![0.0; amb];
    e0[0] = 1.0;
    let mut gv = vec![e0];
    for k in 1..=level {
        let mut f = vec![0.0; amb];
        f[2 * k - 1] = 0.5;
        f[2 * k] = -h;
        fv.push(f);
        let mut g = vec![0.0; amb];
        g[2 * k - 1] = 0.5;
        g[2 * k] = h;
        gv.push(g);
    }
    let m = from_vectors(amb, fv)?;
    let n = from_vectors(amb, gv)?;
    let pair = diagnose("M,N", &m, &n, None, tol)?;
    Ok(TruncatedExample {
        name: ExampleName::Hexagonal,
        level,
        ambient_dim: amb,
        diagnostics: Diagnostics {
            dims: BTreeMap::from([("M".into(), m.dim()), ("N".into(), n.dim())]),
            pairs: vec![pair],
            note: "every principal angle is pi/3 but dim(M^perp cap N) = 1 != 0 = dim(M cap N^perp); with both \
                   reduced dimensions finite the pair has no common complement, whereas the infinite-dimensional \
                   pair does"
                .into(),
        },
        subspaces: BTreeMap::from([("M".into(), m), ("N".into(), n)]),
    })
}

pub fn build(name: ExampleName, level: usize, window: ShiftWindow, tol: &TolerancePolicy) -> Result<TruncatedExample> {
    match name {
        ExampleName::NonclosedSum => nonclosed_sum_pair(level, tol),
        ExampleName::ShiftTriple => shift_triple(level, window, tol),
        ExampleName::Hexagonal => hexagonal_pair(level, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn nonclosed_level_one() {
        // k = 1 gives the vector e_2, orthogonal to e_1.
        let ex = nonclosed_sum_pair(1, &tol()).unwrap();
        assert!(ex
            .subspace("N")
            .equals(&Subspace::coordinate(2, &[1]).unwrap(), &tol())
            .unwrap());
        let p = ex.pair("M,N").unwrap();
        assert!(p.decision);
        assert_eq!((p.dim_m_nperp, p.dim_mperp_n), (1, 1));
        assert_eq!(p.sum_closedness_margin, 1.0);
    }

    #[test]
    fn nonclosed_margins() {
        let p = nonclosed_sum_pair(4, &tol()).unwrap();
        assert!((p.pair("M,N").unwrap().sum_closedness_margin - 0.5).abs() < 1e-12);
        let p = nonclosed_sum_pair(100, &tol()).unwrap();
        let d = p.pair("M,N").unwrap();
        assert!((d.sum_closedness_margin - 0.1).abs() < 1e-12);
        assert!(d.decision);
    }

    #[test]
    fn shift_symmetric_level_one() {
        let ex = shift_triple(1, ShiftWindow::Symmetric, &tol()).unwrap();
        let mn = ex.pair("M,N").unwrap();
        assert_eq!(mn.dim_m, mn.dim_n);
        assert!(mn.decision);
        assert!(ex.pair("N,L").unwrap().decision);
        assert!(!ex.pair("M,L").unwrap().decision);
    }

    #[test]
    fn shift_asymmetric_exposes_artifact() {
        for level in 1..=5 {
            let ex = shift_triple(level, ShiftWindow::Asymmetric, &tol()).unwrap();
            assert!(!ex.pair("M,N").unwrap().decision);
            assert!(ex.pair("N,L").unwrap().decision);
            assert!(!ex.pair("M,L").unwrap().decision);
        }
    }

    #[test]
    fn shift_l_inside_m() {
        let ex = shift_triple(3, ShiftWindow::Symmetric, &tol()).unwrap();
        let (m, l) = (ex.subspace("M"), ex.subspace("L"));
        for c in l.basis().columns() {
            assert!(m.contains(&c, &tol()).unwrap());
        }
    }

    #[test]
    fn hexagonal_angles_and_corners() {
        let ex = hexagonal_pair(1, &tol()).unwrap();
        let p = ex.pair("M,N").unwrap();
        assert!(p.angles.iter().any(|a| (a - FRAC_PI_3).abs() < 1e-12));
        for level in [1, 2, 7] {
            let p = hexagonal_pair(level, &tol()).unwrap().pair("M,N").unwrap().clone();
            assert_eq!(p.dim_n - p.dim_m, 1);
            assert_eq!((p.dim_m_nperp, p.dim_mperp_n), (0, 1));
            assert!(!p.decision);
        }
    }

    #[test]
    fn level_zero_rejected() {
        assert!(matches!(hexagonal_pair(0, &tol()), Err(Error::Input(_))));
    }
}
