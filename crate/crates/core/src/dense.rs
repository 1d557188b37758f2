//! Dense O(N³) verification leg. Production paths never call into here.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::matrices::build_matrices_dense;
use crate::{GameError, GameParams, Result};

fn lu_solve(m: DMatrix<f64>, rhs: &DVector<f64>) -> Result<Vec<f64>> {
    m.lu()
        .solve(rhs)
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| GameError::Inconsistent("dense LU: singular matrix".into()))
}

fn operands(params: &GameParams) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let m = build_matrices_dense(params)?;
    let d = m.dense().expect("dense storage requested");
    let n = m.size();
    let shift = DMatrix::identity(n, n) * (2.0 * params.theta);
    Ok((d.gamma_tilde.clone(), d.gamma.clone(), shift))
}

/// ν = (Γ+Γ̃+2θI)⁻¹1 by dense LU.
pub fn solve_nu_dense(params: &GameParams) -> Result<Vec<f64>> {
    let (gt, g, shift) = operands(params)?;
    let ones = DVector::from_element(params.size(), 1.0);
    lu_solve(g + gt + shift, &ones)
}

/// ω = (Γ−Γ̃+2θI)⁻¹1 by dense LU.
pub fn solve_omega_dense(params: &GameParams) -> Result<Vec<f64>> {
    let (gt, g, shift) = operands(params)?;
    let ones = DVector::from_element(params.size(), 1.0);
    lu_solve(g - gt + shift, &ones)
}

/// B = (1−α²)(I + Γ⁻¹(Γ̃+2θI)) assembled from its definition.
pub fn b_matrix_dense(params: &GameParams) -> Result<DMatrix<f64>> {
    let (gt, g, shift) = operands(params)?;
    let n = params.size();
    let g_inv = g
        .lu()
        .try_inverse()
        .ok_or_else(|| GameError::Inconsistent("dense LU: singular Γ".into()))?;
    Ok((DMatrix::identity(n, n) + g_inv * (gt + shift)) * params.one_minus_alpha_sq())
}

/// Dense LU inverse of an arbitrary square matrix.
pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| GameError::Inconsistent("dense LU: singular matrix".into()))
}

/// Whether the Cholesky factorization of Γ succeeds.
pub fn gamma_is_positive_definite(params: &GameParams) -> Result<bool> {
    let (_, g, _) = operands(params)?;
    Ok(Cholesky::new(g).is_some())
}
