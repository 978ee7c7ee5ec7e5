//! Constructive side: complements, symmetries, involutions, oblique
//! projections and graph forms, each with a checkable certificate.
//!
//! Nothing here is unique. Complements, symmetries and forms are validated
//! through their certificates, never compared against a reference value.

mod complement;
mod graph;
mod involution;
mod principal;
mod reduction;
mod symmetry;

use serde::Serialize;

use crate::kernel::Matrix;
use crate::subspace::Subspace;

pub use complement::{common_complement, projection_from_isomorphism, verify_common_complement};
pub use graph::{
    antisymmetric_graph_form, antisymmetric_graph_form_along, contraction_graph_form, graph_pair_form,
    orthocomplement_common_complement, zero_graph_form, zero_graph_form_along, ContractionForm, OrthoComplementCheck,
};
pub use involution::{complement_from_involution, involution_for_pair, involution_for_pair_along};
pub use principal::{principal_pairs, PrincipalPair, PrincipalPairs};
pub use reduction::{closed_companion, reduce_pair, ClosedCompanion, ReducedPair};
pub use symmetry::exchanging_symmetry;

/// Absolute slack for every residual a certificate reports.
pub const CERT_TOL: f64 = 1e-9;

/// Evidence that `K` complements both `M` and `N`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementCertificate {
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub k: Subspace,
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub p_m_along_k: Matrix,
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub p_n_along_k: Matrix,
    /// `σ_min([B_M | B_K])`
    pub min_basis_sv_m: f64,
    /// `σ_min([B_N | B_K])`
    pub min_basis_sv_n: f64,
    /// `‖P_{N∥K} P_{M∥K} B_N − B_N‖₂`: how far `P_{N∥K}|_M` is from inverting
    /// `P_{M∥K}|_N`.
    pub inverse_residual: f64,
}

/// A pair exhibited as `{Gr(T), Gr(S)}` inside `X₁ ⊕ X₂`, via the invertible
/// map `U` from ambient coordinates to `X₁ ⊕ X₂` coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct GraphForm {
    pub dim_x1: usize,
    pub dim_x2: usize,
    /// `dim_x2 x dim_x1`; `U(M) = Gr(T)`.
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub t: Matrix,
    /// `dim_x2 x dim_x1`; `U(N) = Gr(S)`.
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub s: Matrix,
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub u: Matrix,
    pub cond_u: f64,
}

impl GraphForm {
    /// Largest principal angles between `U(M)` and `Gr(T)`, and between
    /// `U(N)` and `Gr(S)`.
    pub fn residuals(&self, m: &Subspace, n: &Subspace, tol: &crate::TolerancePolicy) -> crate::Result<(f64, f64)> {
        let um = m.image(&self.u, tol)?;
        let un = n.image(&self.u, tol)?;
        let gr_t = graph_of(&self.t, tol)?;
        let gr_s = graph_of(&self.s, tol)?;
        Ok((um.largest_angle(&gr_t)?, un.largest_angle(&gr_s)?))
    }
}

/// `Gr(T) = {(x, Tx)}` as a subspace of `R^{cols + rows}`.
pub fn graph_of(t: &Matrix, tol: &crate::TolerancePolicy) -> crate::Result<Subspace> {
    let stacked = Matrix::identity(t.cols()).vcat(t);
    Subspace::span_of_columns(&stacked, tol)
}

/// An involution exchanging `M` and `N`, with the lower bound on `I + S`.
#[derive(Debug, Clone, Serialize)]
pub struct InvolutionCertificate {
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub s: Matrix,
    /// Constant `2 / (‖U‖‖U⁻¹‖(1 + ‖T‖))` from the antisymmetric graph form.
    pub c: f64,
    /// `ker(S − I)`
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub k_plus: Subspace,
    /// `ker(S + I)`
    #[serde(serialize_with = "crate::io::ser_subspace")]
    pub k_minus: Subspace,
    pub involution_residual: f64,
    /// Largest principal angle between `S(M)` and `N`.
    pub exchange_residual: f64,
    /// `σ_min((I + S) B_M)`, the sharp constant; equals `c` when `M = {0}`.
    pub lower_bound_attained: f64,
    /// `‖P_{K₊∥K₋} − (I + S)/2‖₂`
    pub splitting_residual: f64,
}
