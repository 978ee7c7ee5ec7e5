//! Dense real matrix primitives with an explicit tolerance policy.
//!
//! Everything above this module phrases its numerics through the handful of
//! routines here: a one-sided Jacobi SVD, a cyclic Jacobi symmetric
//! eigensolver, rank-revealing orthonormalization, and an LU solver. All of
//! them are deterministic.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

const EPS: f64 = f64::EPSILON;
const MAX_SWEEPS: usize = 80;

/// Thresholds used wherever a floating point quantity has to be read as an
/// exact statement (a rank, a zero angle, subspace equality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rank_rel: f64,
    pub rank_abs: f64,
    pub angle_tol: f64,
    pub subspace_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_rel: 2f64.powi(-40),
            rank_abs: 1e-12,
            angle_tol: 1e-9,
            subspace_tol: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn new(rank_rel: f64, rank_abs: f64, angle_tol: f64, subspace_tol: f64) -> Result<Self> {
        let tol = Self {
            rank_rel,
            rank_abs,
            angle_tol,
            subspace_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Named profiles: `default`, `strict`, `loose`.
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "strict" => Self::new(2f64.powi(-46), 1e-14, 1e-11, 1e-11),
            "loose" => Self::new(2f64.powi(-30), 1e-9, 1e-7, 1e-7),
            other => Err(Error::Input(format!("unknown tolerance profile `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("rank_abs", self.rank_abs),
            ("angle_tol", self.angle_tol),
            ("subspace_tol", self.subspace_tol),
        ] {
            ensure!(v > 0.0 && v < 1.0, Input, "tolerance {name} = {v} must lie in (0, 1)");
        }
        Ok(())
    }

    /// Singular values strictly above this count towards the rank.
    pub fn rank_threshold(&self, sigma_max: f64, dims: (usize, usize)) -> f64 {
        let scale = dims.0.max(dims.1) as f64;
        (self.rank_rel * sigma_max * scale).max(self.rank_abs)
    }
}

/// Dense row-major matrix of finite `f64` entries.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.6e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            Input,
            "expected {} entries for a {rows}x{cols} matrix, got {}",
            rows * cols,
            data.len()
        );
        ensure!(
            data.iter().all(|v| v.is_finite()),
            Input,
            "matrix entries must be finite"
        );
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        ensure!(
            rows.iter().all(|r| r.len() == cols),
            Input,
            "ragged rows in matrix input"
        );
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    /// Builds an `n x k` matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        ensure!(
            columns.iter().all(|c| c.len() == n),
            Input,
            "every vector must have length {n}"
        );
        let mut m = Self::zeros(n, columns.len());
        for (j, c) in columns.iter().enumerate() {
            ensure!(c.iter().all(|v| v.is_finite()), Input, "vector entries must be finite");
            m.set_column(j, c);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Columns `indices` in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, indices.len());
        for (dst, &src) in indices.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, dst)] = self[(i, src)];
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `[self | other]`
    pub fn hcat(&self, other: &Matrix) -> Self {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// `[self ; other]`
    pub fn vcat(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Copy of the block starting at `(r0, c0)` of the given shape.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Spectral norm.
    pub fn norm2(&self) -> Result<f64> {
        Ok(svd(self)?.sigma.first().copied().unwrap_or(0.0))
    }

    /// Smallest singular value over the shorter side; zero for empty matrices.
    pub fn sigma_min(&self) -> Result<f64> {
        Ok(svd(self)?.sigma.last().copied().unwrap_or(0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `max |A^T A - I|` over the Gram matrix of the columns.
    pub fn orthonormality_defect(&self) -> f64 {
        (&(&self.transpose() * self) - &Matrix::identity(self.cols)).max_abs()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Thin singular value decomposition `A = U diag(sigma) V^T`.
///
/// For an `m x n` input with `p = min(m, n)`, `u` is `m x p`, `v` is `n x p`
/// and `sigma` has length `p`, sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Raw output of the one-sided Jacobi iteration: `A V = W`, with `V` square
/// orthogonal and the columns of `W` mutually orthogonal, sorted by
/// decreasing norm.
struct Hestenes {
    w: Matrix,
    v: Matrix,
    norms: Vec<f64>,
}

fn hestenes(a: &Matrix) -> Result<Hestenes> {
    let (m, n) = a.shape();
    // Column-major working copies keep the inner loops contiguous.
    let mut w: Vec<Vec<f64>> = a.columns();
    let mut v: Vec<Vec<f64>> = Matrix::identity(n).columns();

    // Inner products carry rounding of order m·eps relative to the column
    // norms; a stricter test can cycle on rank-deficient input.
    let ortho_tol = EPS * (m.max(1) as f64);
    // Columns at rounding level are numerically zero; they cannot be made
    // orthogonal to anything in relative terms, so they are left alone.
    let negligible = (EPS * ((m + n) as f64) * a.frobenius()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= ortho_tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s, m);
                rotate_pair(&mut v, p, q, c, s, n);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let w = Matrix::from_columns(m, &order.iter().map(|&j| w[j].clone()).collect::<Vec<_>>())?;
    let v = Matrix::from_columns(n, &order.iter().map(|&j| v[j].clone()).collect::<Vec<_>>())?;
    let norms = order.iter().map(|&j| norms[j]).collect();
    Ok(Hestenes { w, v, norms })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64, len: usize) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for i in 0..len {
        let x = cp[i];
        let y = cq[i];
        cp[i] = c * x - s * y;
        cq[i] = s * x + c * y;
    }
}

/// Extends the orthonormal columns of `q` (an `m x r` matrix) to `target`
/// orthonormal columns, each time taking the standard basis vector with the
/// largest residual against the current basis (earliest index on ties).
pub fn complete_orthonormal(q: &Matrix, target: usize) -> Matrix {
    let m = q.rows();
    assert!(target <= m, "cannot complete beyond the ambient dimension");
    let mut basis: Vec<Vec<f64>> = q.columns();
    if basis.len() < target {
        // res[i] = (I - Q Q^T) e_i, kept up to date with rank-one updates.
        let mut res: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                for b in &basis {
                    let d = b[i];
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
                e
            })
            .collect();
        while basis.len() < target {
            let mut best: Option<(f64, usize)> = None;
            for (i, r) in res.iter().enumerate() {
                let rn = norm(r);
                if best.is_none_or(|(bn, _)| rn > bn + 1e-12) {
                    best = Some((rn, i));
                }
            }
            let (_, i) = best.expect("ambient dimension is positive");
            let mut e = res[i].clone();
            for _ in 0..2 {
                for b in &basis {
                    let d = dot(&e, b);
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let r = norm(&e);
            e.iter_mut().for_each(|x| *x /= r);
            for (j, rj) in res.iter_mut().enumerate() {
                let d = e[j];
                if d != 0.0 {
                    rj.iter_mut().zip(&e).for_each(|(x, y)| *x -= d * y);
                }
            }
            basis.push(e);
        }
    }
    Matrix::from_columns(m, &basis).expect("completion vectors are finite")
}

/// Modified Gram-Schmidt with one reorthogonalization pass, keeping column
/// order. Columns whose residual falls below `floor` are dropped.
pub fn gram_schmidt(a: &Matrix, floor: f64) -> Matrix {
    let m = a.rows();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(a.cols());
    for mut c in a.columns() {
        let original = norm(&c);
        for _ in 0..2 {
            for q in &out {
                let d = dot(&c, q);
                c.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let r = norm(&c);
        if r > floor * original.max(1.0) && r > 0.0 {
            c.iter_mut().for_each(|x| *x /= r);
            out.push(c);
        }
    }
    Matrix::from_columns(m, &out).expect("finite columns")
}

/// Thin SVD of any finite matrix.
pub fn svd(a: &Matrix) -> Result<Svd> {
    ensure!(a.is_finite(), Input, "svd input has non-finite entries");
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    if n == 0 {
        return Ok(Svd {
            u: Matrix::zeros(m, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(0, 0),
        });
    }
    let h = hestenes(a)?;
    let sigma_max = h.norms[0];
    // Columns this small carry no reliable direction; they are replaced by a
    // completion, which moves the reconstruction by at most that norm.
    let cutoff = EPS * sigma_max * (m.max(n) as f64);
    let good: Vec<usize> = (0..n).filter(|&j| h.norms[j] > cutoff && h.norms[j] > 0.0).collect();
    let mut u_cols: Vec<Vec<f64>> = good
        .iter()
        .map(|&j| h.w.column(j).iter().map(|x| x / h.norms[j]).collect())
        .collect();
    let partial = Matrix::from_columns(m, &u_cols)?;
    let completed = complete_orthonormal(&partial, n);
    u_cols = completed.columns();
    let u = Matrix::from_columns(m, &u_cols)?;
    let sigma = (0..n)
        .map(|j| {
            if j < good.len() {
                h.norms[j]
            } else {
                h.norms[j].max(0.0)
            }
        })
        .collect();
    Ok(Svd { u, sigma, v: h.v })
}

/// Number of entries of a descending `sigma` above the rank threshold.
pub fn rank_count(sigma: &[f64], sigma_max: f64, dims: (usize, usize), tol: &TolerancePolicy) -> usize {
    let threshold = tol.rank_threshold(sigma_max, dims);
    sigma.iter().filter(|&&s| s > threshold).count()
}

/// Orthonormal basis of the column span of `a`, of width equal to the
/// numerical rank.
pub fn orthonormalize(a: &Matrix, tol: &TolerancePolicy) -> Result<Matrix> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Matrix::zeros(m, 0));
    }
    let s = svd(a)?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let r = rank_count(&s.sigma, smax, (m, n), tol);
    Ok(s.u.select_columns(&(0..r).collect::<Vec<_>>()))
}

/// Orthonormal basis of the right null space `{c : A c = 0}` (numerically).
pub fn null_space(a: &Matrix, tol: &TolerancePolicy) -> Result<Matrix> {
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if m == 0 {
        return Ok(Matrix::identity(n));
    }
    ensure!(a.is_finite(), Input, "null_space input has non-finite entries");
    let h = hestenes(a)?;
    let smax = h.norms[0];
    let r = rank_count(&h.norms, smax, (m, n), tol);
    Ok(h.v.select_columns(&(r..n).collect::<Vec<_>>()))
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Ascending eigenvalues.
    pub lambda: Vec<f64>,
    /// Orthogonal matrix of eigenvectors, column `i` pairs with `lambda[i]`.
    pub q: Matrix,
}

/// Cyclic Jacobi eigensolver for symmetric input.
pub fn sym_eig(a: &Matrix) -> Result<SymEig> {
    ensure!(
        a.is_square(),
        Input,
        "sym_eig needs a square matrix, got {:?}",
        a.shape()
    );
    ensure!(a.is_finite(), Input, "sym_eig input has non-finite entries");
    let n = a.rows();
    let asym = (a - &a.transpose()).max_abs();
    let scale = 1.0 + a.norm2()?;
    ensure!(
        asym <= 1e-10 * scale,
        Precondition,
        "matrix is not symmetric: max |A - A^T| = {asym:e}"
    );
    let mut s = (a + &a.transpose()).scale(0.5);
    let mut q = Matrix::identity(n);
    let frob = s.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |r| (p, r)))
            .map(|(p, r)| s[(p, r)] * s[(p, r)])
            .sum::<f64>()
            .sqrt();
        if off <= EPS * frob * 0.5 || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for r in p + 1..n {
                let apr = s[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (s[(r, r)] - s[(p, p)]) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[(k, p)];
                    let skr = s[(k, r)];
                    s[(k, p)] = c * skp - sn * skr;
                    s[(k, r)] = sn * skp + c * skr;
                }
                for k in 0..n {
                    let spk = s[(p, k)];
                    let srk = s[(r, k)];
                    s[(p, k)] = c * spk - sn * srk;
                    s[(r, k)] = sn * spk + c * srk;
                }
                s[(p, r)] = 0.0;
                s[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - sn * qkr;
                    q[(k, r)] = sn * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[(i, i)].total_cmp(&s[(j, j)]).then(i.cmp(&j)));
    Ok(SymEig {
        lambda: order.iter().map(|&i| s[(i, i)]).collect(),
        q: q.select_columns(&order),
    })
}

/// Solves `A X = B` for square nonsingular `A` by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    ensure!(a.is_square(), Input, "solve needs a square system, got {:?}", a.shape());
    ensure!(
        a.rows() == b.rows(),
        Input,
        "right-hand side has {} rows, expected {}",
        b.rows(),
        a.rows()
    );
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
            .expect("non-empty pivot range");
        if lu[(pivot, k)].abs() <= EPS * scale {
            return Err(Error::Numerical("singular system in solve".into()));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            for j in 0..x.cols() {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(pivot, j)];
                x[(pivot, j)] = tmp;
            }
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in k + 1..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
            for j in 0..x.cols() {
                x[(i, j)] -= f * x[(k, j)];
            }
        }
    }
    for j in 0..x.cols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Clamps into `[lo, hi]`; used before every inverse trigonometric call.
pub fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}
