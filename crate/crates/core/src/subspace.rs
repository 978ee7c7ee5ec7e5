//! Subspaces of `R^n` carried by orthonormal bases, and their lattice
//! operations.

use crate::error::{ensure, Error, Result};
use crate::kernel::{self, complete_orthonormal, norm, null_space, orthonormalize, Matrix, TolerancePolicy};

/// A linear subspace of `R^n`, stored as an `n x k` matrix with orthonormal
/// columns. The zero subspace is the `n x 0` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

const ORTHONORMAL_SLACK: f64 = 1e-10;

impl Subspace {
    /// Span of `vectors`, each of length `n`.
    pub fn from_spanning(vectors: &[Vec<f64>], n: usize, tol: &TolerancePolicy) -> Result<Self> {
        for (i, v) in vectors.iter().enumerate() {
            ensure!(v.len() == n, Input, "vector {i} has length {}, expected {n}", v.len());
        }
        Self::span_of_columns(&Matrix::from_columns(n, vectors)?, tol)
    }

    /// Span of the columns of `a`.
    pub fn span_of_columns(a: &Matrix, tol: &TolerancePolicy) -> Result<Self> {
        Ok(Self::from_orthonormal_unchecked(orthonormalize(a, tol)?))
    }

    /// Wraps a basis that is already orthonormal, checking that it is.
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        ensure!(basis.is_finite(), Input, "basis entries must be finite");
        ensure!(
            basis.cols() <= basis.rows(),
            Input,
            "more basis vectors than the ambient dimension"
        );
        let defect = basis.orthonormality_defect();
        ensure!(
            defect <= ORTHONORMAL_SLACK,
            Input,
            "basis is not orthonormal (defect {defect:e})"
        );
        Ok(Self::from_orthonormal_unchecked(basis))
    }

    pub(crate) fn from_orthonormal_unchecked(mut basis: Matrix) -> Self {
        canonicalize_signs(&mut basis);
        Self { basis }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: Matrix::identity(n),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut b = Matrix::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            ensure!(
                i < n,
                Input,
                "coordinate index {i} out of range for ambient dimension {n}"
            );
            b[(i, j)] = 1.0;
        }
        Self::from_orthonormal(b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub(crate) fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        ensure!(
            self.ambient_dim() == other.ambient_dim(),
            Input,
            "ambient dimensions differ: {} vs {}",
            self.ambient_dim(),
            other.ambient_dim()
        );
        Ok(())
    }

    /// Orthogonal complement; realizes the annihilator in an inner-product space.
    pub fn orthocomplement(&self) -> Subspace {
        let n = self.ambient_dim();
        let k = self.dim();
        let full = complete_orthonormal(&self.basis, n);
        Self::from_orthonormal_unchecked(full.select_columns(&(k..n).collect::<Vec<_>>()))
    }

    /// `self ∩ other`, read off the near-null space of `[B_M | -B_N]`.
    pub fn intersect(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let n = self.ambient_dim();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(n));
        }
        let stacked = self.basis.hcat(&(-&other.basis));
        let ns = null_space(&stacked, tol)?;
        if ns.cols() == 0 {
            return Ok(Self::zero(n));
        }
        let coeffs = ns.block(0, 0, self.dim(), ns.cols());
        Self::span_of_columns(&(&self.basis * &coeffs), tol)
    }

    pub fn sum(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        Self::span_of_columns(&self.basis.hcat(&other.basis), tol)
    }

    /// Whether `x` lies in the subspace up to `subspace_tol` relative error.
    pub fn contains(&self, x: &[f64], tol: &TolerancePolicy) -> Result<bool> {
        ensure!(
            x.len() == self.ambient_dim(),
            Input,
            "vector has length {}, expected {}",
            x.len(),
            self.ambient_dim()
        );
        let residual = self.residual(x);
        Ok(residual <= tol.subspace_tol * norm(x))
    }

    /// `‖x - P x‖`
    pub fn residual(&self, x: &[f64]) -> f64 {
        let coords = self.basis.transpose().mul_vec(x);
        let px = self.basis.mul_vec(&coords);
        x.iter().zip(&px).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Whether every column of `other`'s basis lies in `self`.
    pub fn contains_subspace(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
        self.check_same_ambient(other)?;
        for c in other.basis.columns() {
            if !self.contains(&c, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equal dimensions and largest principal angle within `angle_tol`.
    pub fn equals(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
        self.check_same_ambient(other)?;
        if self.dim() != other.dim() {
            return Ok(false);
        }
        Ok(self.largest_angle(other)? <= tol.angle_tol)
    }

    /// Largest principal angle between equal-dimensional subspaces, computed
    /// from the sine side so that small angles keep full relative accuracy.
    /// Returns `π/2` when the dimensions differ.
    pub fn largest_angle(&self, other: &Subspace) -> Result<f64> {
        self.check_same_ambient(other)?;
        if self.dim() != other.dim() {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        if self.is_zero() {
            return Ok(0.0);
        }
        let residual = &self.basis - &(&other.projector() * &self.basis);
        Ok(kernel::clamp(residual.norm2()?, 0.0, 1.0).asin())
    }

    /// Orthogonal projector `B B^T`.
    pub fn projector(&self) -> Matrix {
        &self.basis * &self.basis.transpose()
    }

    /// `A(self)` for an `n x n` (or `m x n`) matrix `A`.
    pub fn image(&self, a: &Matrix, tol: &TolerancePolicy) -> Result<Subspace> {
        ensure!(
            a.cols() == self.ambient_dim(),
            Input,
            "map has {} columns, expected {}",
            a.cols(),
            self.ambient_dim()
        );
        Self::span_of_columns(&(a * &self.basis), tol)
    }

    /// Coordinates of `self` inside the ambient subspace `host`, as a subspace
    /// of `R^{dim host}`. Requires `self ⊆ host`.
    pub fn coordinates_in(&self, host: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
        ensure!(
            host.contains_subspace(self, tol)?,
            Precondition,
            "subspace is not contained in the host subspace"
        );
        let coords = &host.basis.transpose() * &self.basis;
        Self::span_of_columns(&coords, tol)
    }

    /// Inverse of [`Subspace::coordinates_in`]: maps coordinates back into `R^n`.
    pub fn embed_from(&self, host: &Subspace) -> Result<Subspace> {
        ensure!(
            self.ambient_dim() == host.dim(),
            Input,
            "coordinate subspace lives in R^{}, host has dimension {}",
            self.ambient_dim(),
            host.dim()
        );
        Ok(Self::from_orthonormal_unchecked(&host.basis * &self.basis))
    }
}

/// Flips each column so that its first entry of (near) maximal magnitude is
/// positive. Bases stay non-canonical up to rotation; this only removes the
/// sign ambiguity so that printed results are reproducible.
fn canonicalize_signs(b: &mut Matrix) {
    for j in 0..b.cols() {
        let col = b.column(j);
        let max = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            continue;
        }
        let lead = col
            .iter()
            .find(|v| v.abs() >= max * (1.0 - 1e-9))
            .copied()
            .unwrap_or(0.0);
        if lead < 0.0 {
            let flipped: Vec<f64> = col.iter().map(|v| -v).collect();
            b.set_column(j, &flipped);
        }
    }
}

impl TryFrom<&[Vec<f64>]> for Subspace {
    type Error = Error;
    fn try_from(vectors: &[Vec<f64>]) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        Self::from_spanning(vectors, n, &TolerancePolicy::default())
    }
}
