//! High-frequency limits N → ∞: limit curves, cost and tax limits, and
//! empirical convergence against finite-N equilibria.
//!
//! With θ > 0 the renormalized strategies and costs converge, and the limits do
//! not depend on θ. With θ = 0 they oscillate. Even and odd N then have two
//! cluster points each.
//!
//! Limit expressions are written term by term as they are usually displayed
//! (no algebraic simplification). `e^{6ρT}` overflows for ρT above about 118.

use rayon::prelude::*;
use serde::Serialize;

use crate::costs::{expected_cost, tax_metrics};
use crate::equilibrium::{equilibrium_strategies, EquilibriumSolution};
use crate::{GameError, GameParams, Result};

/// Remaining-inventory step curves `V(t) = 1 − Σ_{k=1}^{n_t} v_k` and the same for `w`.
#[derive(Debug, Clone, Serialize)]
pub struct RenormalizedPaths {
    pub horizon: f64,
    pub steps: usize,
    /// `cum_v[n] = Σ_{k=1}^{n} v_k`, n = 0..=N+1.
    pub cum_v: Vec<f64>,
    pub cum_w: Vec<f64>,
}

fn partial_sums(u: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len() + 1);
    let mut acc = crate::numeric::KahanSum::new();
    out.push(0.0);
    for &e in u {
        acc.add(e);
        out.push(acc.value());
    }
    out
}

pub fn renormalized_paths(solution: &EquilibriumSolution) -> RenormalizedPaths {
    RenormalizedPaths {
        horizon: solution.params.horizon,
        steps: solution.params.steps,
        cum_v: partial_sums(&solution.v),
        cum_w: partial_sums(&solution.w),
    }
}

/// n_t = ⌈Nt/T⌉. Values within 1e−9 (relative) of an integer snap to it, so
/// that t = kT/N maps to k despite rounding in kT/N.
pub fn grid_index(t: f64, horizon: f64, steps: usize) -> Result<usize> {
    if !(0.0..=horizon).contains(&t) {
        return Err(GameError::TimeOutOfRange { t, horizon });
    }
    let z = steps as f64 * t / horizon;
    let r = z.round();
    let n = if (z - r).abs() <= 1e-9 * r.max(1.0) { r } else { z.ceil() };
    Ok(n as usize)
}

impl RenormalizedPaths {
    pub fn grid_index(&self, t: f64) -> Result<usize> {
        grid_index(t, self.horizon, self.steps)
    }

    /// t_{n_t} = n_t·T/N, the grid point the step curves use at t.
    pub fn grid_time(&self, t: f64) -> Result<f64> {
        Ok(self.grid_index(t)? as f64 * self.horizon / self.steps as f64)
    }

    pub fn v_at(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.cum_v[self.grid_index(t)?])
    }

    pub fn w_at(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.cum_w[self.grid_index(t)?])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaRegime {
    Zero,
    Positive,
}

impl ThetaRegime {
    pub fn of(theta: f64) -> Self {
        if theta > 0.0 {
            ThetaRegime::Positive
        } else {
            ThetaRegime::Zero
        }
    }
}

/// Every limit value and curve for one (ρ, T, x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitBundle {
    pub rho: f64,
    pub horizon: f64,
    pub x: f64,
    pub y: f64,
    pub regime: ThetaRegime,
    /// Cost limit of agent 1 for θ > 0.
    pub cost_limit_pos: f64,
    /// θ = 0, even N.
    pub cost_limit_even: f64,
    /// θ = 0, odd N.
    pub cost_limit_odd: f64,
    /// Limit of the tax revenue TR_N for θ > 0.
    pub tr_limit: f64,
    /// liminf (TR_N − TC_N) for θ > 0.
    pub tr_minus_tc_liminf: f64,
}

pub fn limit_bundle(params: &GameParams) -> LimitBundle {
    LimitBundle::new(
        params.rho,
        params.horizon,
        params.x,
        params.y,
        ThetaRegime::of(params.theta),
    )
}

impl LimitBundle {
    pub fn new(rho: f64, horizon: f64, x: f64, y: f64, regime: ThetaRegime) -> Self {
        let z = rho * horizon;
        let e3 = (3.0 * z).exp();
        let e6 = (6.0 * z).exp();
        let em = (-z).exp();
        let s = x + y;
        let d = x - y;
        let cross = x * x - y * y;

        let cost_limit_pos = s * s * (36.0 * e6 * (8.0 * z + 13.0) - 60.0 * e3 - 3.0)
            / (16.0 * (2.0 * e3 * (3.0 * z + 5.0) - 1.0).powi(2))
            + cross / (2.0 * (z + 1.0))
            + d * d / (16.0 * (z + 1.0).powi(2));
        let cost_limit_even = s * s * (6.0 * e6 + 3.0)
            / (2.0 * (2.0 * e6 * (3.0 * z + 5.0) + e3 + 3.0 * z + 7.0))
            + cross / (2.0 * (em + z + 1.0));
        let cost_limit_odd = s * s * (6.0 * e6 - 3.0)
            / (2.0 * (2.0 * e6 * (3.0 * z + 5.0) - 3.0 * e3 - 3.0 * z - 7.0))
            + cross / (2.0 * (-em + z + 1.0));
        let tr_limit = s * s * 9.0 * (1.0 + 2.0 * e3).powi(2)
            / (8.0 * (1.0 - 2.0 * e3 * (5.0 + 3.0 * z)).powi(2))
            + d * d / (8.0 * (z + 1.0).powi(2));
        let tr_minus_tc_liminf = s * s
            * 3.0
            * (2.0 * e3 + 1.0).powi(2)
            * (3.0 * (z + 3.0) + 2.0 * e6 * (3.0 * z + 5.0) - e3 * (12.0 * z + 19.0))
            / (2.0
                * (1.0 - 2.0 * e3 * (3.0 * z + 5.0)).powi(2)
                * (3.0 * z + e3 + 2.0 * e6 * (3.0 * z + 5.0) + 7.0));

        Self {
            rho,
            horizon,
            x,
            y,
            regime,
            cost_limit_pos,
            cost_limit_even,
            cost_limit_odd,
            tr_limit,
            tr_minus_tc_liminf,
        }
    }

    pub fn rho_t(&self) -> f64 {
        self.rho * self.horizon
    }

    /// Limit of agent 1's cost in this bundle's regime. For θ = 0 the parity of N decides.
    pub fn cost_limit(&self, steps: usize) -> f64 {
        match self.regime {
            ThetaRegime::Positive => self.cost_limit_pos,
            ThetaRegime::Zero if steps.is_multiple_of(2) => self.cost_limit_even,
            ThetaRegime::Zero => self.cost_limit_odd,
        }
    }

    /// Limit of V for θ > 0.
    pub fn v_limit(&self, t: f64) -> f64 {
        let (r, tt) = (self.rho, self.horizon);
        let e3 = (3.0 * r * tt).exp();
        (e3 * (6.0 * r * (tt - t) + 4.0) - 4.0 * (3.0 * r * t).exp())
            / (2.0 * e3 * (3.0 * r * tt + 5.0) - 1.0)
    }

    /// Limit of W for θ > 0.
    pub fn w_limit(&self, t: f64) -> f64 {
        (self.rho * (self.horizon - t) + 1.0) / (self.rho * self.horizon + 1.0)
    }

    fn fg_numerator(&self, t: f64, sign: f64, odd: bool) -> f64 {
        let (r, tt) = (self.rho, self.horizon);
        let e = |a: f64| (3.0 * r * a).exp();
        let e6 = (6.0 * r * tt).exp();
        let tail = r * (tt - t);
        let base = sign * 3.0 * e(tt - t) + sign * 6.0 * e(2.0 * tt - t) + e6 * (6.0 * tail + 4.0)
            - 4.0 * e(tt + t);
        if odd {
            base - 3.0 * tail - 2.0 * e(tt) - 4.0 * e(t) - 3.0
        } else {
            base + 3.0 * tail + 2.0 * e(tt) + 4.0 * e(t) + 3.0
        }
    }

    fn f_denominator(&self) -> f64 {
        let z = self.rho_t();
        2.0 * (6.0 * z).exp() * (3.0 * z + 5.0) + (3.0 * z).exp() + 3.0 * z + 7.0
    }

    fn g_denominator(&self) -> f64 {
        let z = self.rho_t();
        2.0 * (6.0 * z).exp() * (3.0 * z + 5.0) - 3.0 * (3.0 * z).exp() - 3.0 * z - 7.0
    }

    /// Cluster curves of V along even N, θ = 0.
    pub fn f_plus(&self, t: f64) -> f64 {
        self.fg_numerator(t, 1.0, false) / self.f_denominator()
    }

    pub fn f_minus(&self, t: f64) -> f64 {
        self.fg_numerator(t, -1.0, false) / self.f_denominator()
    }

    /// Cluster curves of V along odd N, θ = 0.
    pub fn g_plus(&self, t: f64) -> f64 {
        self.fg_numerator(t, 1.0, true) / self.g_denominator()
    }

    pub fn g_minus(&self, t: f64) -> f64 {
        self.fg_numerator(t, -1.0, true) / self.g_denominator()
    }

    fn w_cluster_numerator(&self, t: f64, sign: f64) -> f64 {
        let tail = self.rho * (self.horizon - t);
        1.0 + tail + sign * (-tail).exp()
    }

    /// Cluster curves of W along even N, θ = 0.
    pub fn phi_plus(&self, t: f64) -> f64 {
        let z = self.rho_t();
        self.w_cluster_numerator(t, 1.0) / (1.0 + z + (-z).exp())
    }

    pub fn phi_minus(&self, t: f64) -> f64 {
        let z = self.rho_t();
        self.w_cluster_numerator(t, -1.0) / (1.0 + z + (-z).exp())
    }

    /// Cluster curves of W along odd N, θ = 0.
    pub fn psi_plus(&self, t: f64) -> f64 {
        let z = self.rho_t();
        self.w_cluster_numerator(t, 1.0) / (1.0 + z - (-z).exp())
    }

    pub fn psi_minus(&self, t: f64) -> f64 {
        let z = self.rho_t();
        self.w_cluster_numerator(t, -1.0) / (1.0 + z - (-z).exp())
    }
}

/// Distance from `value` to the set {a, b}.
pub fn cluster_distance(value: f64, a: f64, b: f64) -> f64 {
    (value - a).abs().min((value - b).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    /// Expected cost of agent 1 at the equilibrium.
    pub cost: f64,
    pub limit: f64,
    pub limit_distance: f64,
    pub tax_revenue: f64,
    pub taxation_cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub regime: ThetaRegime,
    pub limits: LimitBundle,
    pub rows: Vec<ConvergenceRow>,
    /// Whether the limit distance strictly decreases along the list; for θ = 0
    /// this is checked separately within even and odd N.
    pub monotone_decreasing: bool,
    /// Last distance over first distance, per parity class for θ = 0 (the worse one).
    pub distance_ratio: f64,
}

fn trend(rows: &[&ConvergenceRow]) -> (bool, f64) {
    let mono = rows.windows(2).all(|w| w[1].limit_distance < w[0].limit_distance);
    let ratio = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if rows.len() > 1 => b.limit_distance / a.limit_distance,
        _ => 1.0,
    };
    (mono, ratio)
}

pub fn convergence_study(base: &GameParams, steps_list: &[usize]) -> Result<ConvergenceStudy> {
    if steps_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(GameError::Domain {
            name: "N_list",
            value: f64::NAN,
            bound: "N_list sorted ascending",
        });
    }
    let limits = limit_bundle(base);
    let rows = steps_list
        .par_iter()
        .map(|&n| {
            let p = base.with_steps(n)?;
            let s = equilibrium_strategies(&p)?;
            let cost = expected_cost(&p, &s.xi_star, &s.eta_star)?;
            let tax = tax_metrics(&p)?;
            let limit = limits.cost_limit(n);
            Ok(ConvergenceRow {
                steps: n,
                cost,
                limit,
                limit_distance: (cost - limit).abs(),
                tax_revenue: tax.tax_revenue,
                taxation_cost: tax.taxation_cost,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (monotone_decreasing, distance_ratio) = match limits.regime {
        ThetaRegime::Positive => trend(&rows.iter().collect::<Vec<_>>()),
        ThetaRegime::Zero => {
            let even: Vec<_> = rows.iter().filter(|r| r.steps % 2 == 0).collect();
            let odd: Vec<_> = rows.iter().filter(|r| r.steps % 2 == 1).collect();
            let (me, re) = trend(&even);
            let (mo, ro) = trend(&odd);
            (me && mo, re.max(ro))
        }
    };
    Ok(ConvergenceStudy {
        regime: limits.regime,
        limits,
        rows,
        monotone_decreasing,
        distance_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostComparison {
    /// Whether the θ > 0 cost limit is strictly below the θ = 0 liminf.
    pub holds: bool,
    /// min(even, odd) − positive-θ limit.
    pub margin: f64,
    pub cost_limit_pos: f64,
    pub liminf_untaxed: f64,
}

/// ρT above which the comparison is guaranteed for x = y.
pub fn comparison_threshold() -> f64 {
    (4.0 + 62f64.sqrt() / 2.0).ln() / 3.0
}

pub fn cost_comparison_predicate(rho_t: f64, x: f64, y: f64) -> CostComparison {
    let b = LimitBundle::new(rho_t, 1.0, x, y, ThetaRegime::Positive);
    let liminf_untaxed = b.cost_limit_even.min(b.cost_limit_odd);
    let margin = liminf_untaxed - b.cost_limit_pos;
    CostComparison {
        holds: margin > 0.0,
        margin,
        cost_limit_pos: b.cost_limit_pos,
        liminf_untaxed,
    }
}
