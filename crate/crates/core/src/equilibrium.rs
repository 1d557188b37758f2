//! Equilibrium vectors ν, ω and the Nash strategies.

use serde::Serialize;

use crate::closed_form::{b_bands, nu_closed_form, omega_closed_form};
use crate::dense::{solve_nu_dense, solve_omega_dense};
use crate::matrices::{structured_matrices, ImpactMatrices};
use crate::numeric::{max_abs, sum};
use crate::{tridiag, GameParams, Result};

/// Which computation produces ν and ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Tridiagonal elimination and back substitution, O(N). The default.
    Structured,
    /// Explicit component formulas, O(N).
    ClosedForm,
    /// Dense LU, O(N³). Verification only.
    Dense,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    pub params: GameParams,
    pub nu: Vec<f64>,
    pub omega: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub xi_star: Vec<f64>,
    pub eta_star: Vec<f64>,
    /// max |g − mean g| with g = (Γ+2θI)ξ* + Γ̃η*.
    pub foc_deviation: f64,
    /// ‖g‖∞.
    pub foc_scale: f64,
    /// Same check for agent 2, with the roles swapped.
    pub foc_deviation_eta: f64,
    pub foc_scale_eta: f64,
    pub min_component_v: f64,
    pub min_component_w: f64,
    pub sign_changes_v: usize,
    pub sign_changes_w: usize,
}

/// ν = (Γ+Γ̃+2θI)⁻¹1 via ν = B⁻¹(1−α²)Γ⁻¹1 with tridiagonal B.
pub fn solve_nu(params: &GameParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.size();
    let oma = params.one_minus_alpha();
    let mut rhs = vec![oma * oma; n];
    rhs[0] = oma;
    rhs[n - 1] = oma;
    let (sub, diag, sup) = b_bands(params);
    tridiag::solve(&sub, &diag, &sup, &rhs)
}

/// ω = (Γ̃ᵀ+2θI)⁻¹1 by back substitution, O(N).
pub fn solve_omega(params: &GameParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.size();
    let a = params.alpha();
    let k = params.kappa();
    let mut omega = vec![0.0; n];
    // tail = Σ_{j>i} α^{j−i} ω_j
    let mut tail = 0.0;
    for i in (0..n).rev() {
        omega[i] = (1.0 - tail) / k;
        tail = a * (omega[i] + tail);
    }
    Ok(omega)
}

pub fn solve_with(params: &GameParams, solver: Solver) -> Result<(Vec<f64>, Vec<f64>)> {
    match solver {
        Solver::Structured => Ok((solve_nu(params)?, solve_omega(params)?)),
        Solver::ClosedForm => Ok((nu_closed_form(params)?, omega_closed_form(params)?)),
        Solver::Dense => Ok((solve_nu_dense(params)?, solve_omega_dense(params)?)),
    }
}

pub fn equilibrium_strategies(params: &GameParams) -> Result<EquilibriumSolution> {
    equilibrium_with(params, Solver::Structured)
}

pub fn equilibrium_with(params: &GameParams, solver: Solver) -> Result<EquilibriumSolution> {
    let (nu, omega) = solve_with(params, solver)?;
    let m = structured_matrices(params)?;
    assemble(params, &m, nu, omega)
}

fn normalize(u: &[f64]) -> Vec<f64> {
    let s = sum(u);
    u.iter().map(|x| x / s).collect()
}

fn assemble(
    params: &GameParams,
    m: &ImpactMatrices,
    nu: Vec<f64>,
    omega: Vec<f64>,
) -> Result<EquilibriumSolution> {
    let v = normalize(&nu);
    let w = normalize(&omega);
    let (x, y) = (params.x, params.y);
    let sp = 0.5 * (x + y);
    let sm = 0.5 * (x - y);
    let xi_star: Vec<f64> = v.iter().zip(&w).map(|(a, b)| sp * a + sm * b).collect();
    let eta_star: Vec<f64> = v.iter().zip(&w).map(|(a, b)| sp * a - sm * b).collect();
    let (foc_deviation, foc_scale) = stationarity(params, m, &xi_star, &eta_star)?;
    let (foc_deviation_eta, foc_scale_eta) = stationarity(params, m, &eta_star, &xi_star)?;
    Ok(EquilibriumSolution {
        params: *params,
        min_component_v: min_component(&v),
        min_component_w: min_component(&w),
        sign_changes_v: sign_changes(&v),
        sign_changes_w: sign_changes(&w),
        nu,
        omega,
        v,
        w,
        xi_star,
        eta_star,
        foc_deviation,
        foc_scale,
        foc_deviation_eta,
        foc_scale_eta,
    })
}

/// Gradient of the own cost: g = (Γ+2θI)ξ + Γ̃η.
pub fn cost_gradient(params: &GameParams, m: &ImpactMatrices, xi: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
    let gx = m.mul_gamma(xi)?;
    let ge = m.mul_gamma_tilde(eta)?;
    let t2 = 2.0 * params.theta;
    Ok(gx
        .iter()
        .zip(&ge)
        .zip(xi)
        .map(|((a, b), s)| a + t2 * s + b)
        .collect())
}

/// (max |g − mean g|, ‖g‖∞). Zero deviation means a constant Lagrange multiplier.
fn stationarity(params: &GameParams, m: &ImpactMatrices, xi: &[f64], eta: &[f64]) -> Result<(f64, f64)> {
    let g = cost_gradient(params, m, xi, eta)?;
    let mean = sum(&g) / g.len() as f64;
    let dev = g.iter().fold(0.0f64, |acc, v| acc.max((v - mean).abs()));
    Ok((dev, max_abs(&g)))
}

fn min_component(u: &[f64]) -> f64 {
    u.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Sign alternations between consecutive signed entries. Entries below
/// 1e−13·‖u‖∞ carry no sign and are skipped.
pub fn sign_changes(u: &[f64]) -> usize {
    let floor = 1e-13 * max_abs(u);
    let mut last: Option<bool> = None;
    let mut count = 0;
    for &e in u {
        if e.abs() < floor || e == 0.0 {
            continue;
        }
        let pos = e > 0.0;
        if last.is_some_and(|l| l != pos) {
            count += 1;
        }
        last = Some(pos);
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationReport {
    pub min_component_v: f64,
    pub min_component_w: f64,
    pub sign_changes_v: usize,
    pub sign_changes_w: usize,
}

pub fn oscillation_report(params: &GameParams) -> Result<OscillationReport> {
    let v = normalize(&solve_nu(params)?);
    let w = normalize(&solve_omega(params)?);
    Ok(OscillationReport {
        min_component_v: min_component(&v),
        min_component_w: min_component(&w),
        sign_changes_v: sign_changes(&v),
        sign_changes_w: sign_changes(&w),
    })
}
