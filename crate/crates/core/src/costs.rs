//! Expected costs, the closed cost decomposition, and tax metrics.
//!
//! Expected costs drop the terms driven by the unaffected price: their
//! expectation vanishes for deterministic strategies.

use serde::Serialize;

use crate::equilibrium::{equilibrium_strategies, solve_nu, solve_omega};
use crate::matrices::structured_matrices;
use crate::numeric::{dot, sum, KahanSum};
use crate::{GameParams, Result};

/// E[C(ξ|η)] = ½ξᵀ(Γ+2θI)ξ + ξᵀΓ̃η.
pub fn expected_cost(params: &GameParams, xi: &[f64], eta: &[f64]) -> Result<f64> {
    let m = structured_matrices(params)?;
    let gx = m.mul_gamma_tilde(xi)?;
    let ge = m.mul_gamma_tilde(eta)?;
    // ½ξᵀΓξ = ξᵀΓ̃ξ
    let mut acc = KahanSum::new();
    acc.add(dot(xi, &gx));
    acc.add(params.theta * dot(xi, xi));
    acc.add(dot(xi, &ge));
    Ok(acc.value())
}

#[derive(Debug, Clone, Serialize)]
pub struct CostBreakdown {
    pub cost_xi: f64,
    pub cost_eta: f64,
    pub total_cost: f64,
    pub tax_revenue: f64,
    pub taxation_cost: f64,
    /// The six bracketed terms of agent 1's cost; their sum over 8 is `cost_xi`.
    pub decomposition_terms: [f64; 6],
}

impl CostBreakdown {
    pub fn decomposition_cost(&self) -> f64 {
        sum(&self.decomposition_terms) / 8.0
    }
}

/// Agent 1's equilibrium cost written through 1ᵀν, 1ᵀω and three bilinear forms.
pub fn decomposition_terms(params: &GameParams, nu: &[f64], omega: &[f64]) -> Result<[f64; 6]> {
    let m = structured_matrices(params)?;
    let (x, y) = (params.x, params.y);
    let s_nu = sum(nu);
    let s_om = sum(omega);
    let gt_nu = m.mul_gamma_tilde(nu)?;
    let gtt_nu = m.mul_gamma_tilde_t(nu)?;
    let gt_om = m.mul_gamma_tilde(omega)?;
    let nu_gt_nu = dot(nu, &gt_nu);
    let skew: Vec<f64> = gt_nu.iter().zip(&gtt_nu).map(|(a, b)| a - b).collect();
    let om_skew_nu = dot(omega, &skew);
    let om_gt_om = dot(omega, &gt_om);
    let sp = x + y;
    let sm = x - y;
    let cross = x * x - y * y;
    Ok([
        sp * sp / s_nu,
        cross * (s_nu + s_om) / (s_nu * s_om),
        sm * sm / s_om,
        (sp / s_nu).powi(2) * nu_gt_nu,
        cross / (s_nu * s_om) * om_skew_nu,
        -(sm / s_om).powi(2) * om_gt_om,
    ])
}

fn total_equilibrium_cost(params: &GameParams) -> Result<(f64, f64, f64, Vec<f64>, Vec<f64>)> {
    let s = equilibrium_strategies(params)?;
    let cx = expected_cost(params, &s.xi_star, &s.eta_star)?;
    let ce = expected_cost(params, &s.eta_star, &s.xi_star)?;
    let mut acc = KahanSum::new();
    acc.add(cx);
    acc.add(ce);
    Ok((cx, ce, acc.value(), s.xi_star, s.eta_star))
}

pub fn cost_decomposition(params: &GameParams) -> Result<CostBreakdown> {
    let (cost_xi, cost_eta, total_cost, xi, eta) = total_equilibrium_cost(params)?;
    let nu = solve_nu(params)?;
    let omega = solve_omega(params)?;
    let decomposition_terms = decomposition_terms(params, &nu, &omega)?;
    let tax_revenue = params.theta * (dot(&xi, &xi) + dot(&eta, &eta));
    let taxation_cost = total_cost - total_equilibrium_cost(&params.with_theta(0.0)?)?.2;
    Ok(CostBreakdown {
        cost_xi,
        cost_eta,
        total_cost,
        tax_revenue,
        taxation_cost,
        decomposition_terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaxMetrics {
    /// TR = θ(ξ*ᵀξ* + η*ᵀη*).
    pub tax_revenue: f64,
    /// TC = C(θ) − C(0), total costs of both agents.
    pub taxation_cost: f64,
    pub total_cost: f64,
    pub total_cost_untaxed: f64,
}

pub fn tax_metrics(params: &GameParams) -> Result<TaxMetrics> {
    let (_, _, total_cost, xi, eta) = total_equilibrium_cost(params)?;
    let total_cost_untaxed = if params.theta == 0.0 {
        total_cost
    } else {
        total_equilibrium_cost(&params.with_theta(0.0)?)?.2
    };
    Ok(TaxMetrics {
        tax_revenue: params.theta * (dot(&xi, &xi) + dot(&eta, &eta)),
        taxation_cost: total_cost - total_cost_untaxed,
        total_cost,
        total_cost_untaxed,
    })
}
