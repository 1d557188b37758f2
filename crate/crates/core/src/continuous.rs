//! Continuous-time game on [0, T].
//!
//! A strategy is a holdings path with a value before time zero, jumps at 0 and
//! T, and an absolutely continuous part whose rate is a sum of exponentials
//! `Σ c_i e^{μ_i t}`, μ_i ≥ 0. The equilibrium at θ = ¼ lives in this family.
//! All Stieltjes integrals against such strategies have closed forms, so none
//! of the computations here use quadrature.

use serde::Serialize;

use crate::numeric::{exprel, KahanSum};
use crate::{GameError, Result};

/// One rate term `coef · e^{rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpTerm {
    pub coef: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BVStrategy {
    pub horizon: f64,
    /// Holdings at 0−.
    pub initial_value: f64,
    pub jump_at_0: f64,
    pub jump_at_t: f64,
    /// dX_t/dt on (0, T).
    pub density: Vec<ExpTerm>,
}

/// ∫₀ᵗ e^{kt} dt.
fn e_int(k: f64, t: f64) -> f64 {
    t * exprel(k * t)
}

impl BVStrategy {
    pub fn new(
        horizon: f64,
        initial_value: f64,
        jump_at_0: f64,
        jump_at_t: f64,
        density: Vec<ExpTerm>,
    ) -> Result<Self> {
        let s = Self {
            horizon,
            initial_value,
            jump_at_0,
            jump_at_t,
            density,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(GameError::Domain { name: "T", value: self.horizon, bound: "T > 0" });
        }
        for term in &self.density {
            if !(term.rate.is_finite() && term.rate >= 0.0) {
                return Err(GameError::Domain {
                    name: "rate",
                    value: term.rate,
                    bound: "density rates >= 0",
                });
            }
            if !term.coef.is_finite() {
                return Err(GameError::Domain { name: "coef", value: term.coef, bound: "finite" });
            }
        }
        Ok(())
    }

    /// No trading at all.
    pub fn constant(horizon: f64, value: f64) -> Self {
        Self {
            horizon,
            initial_value: value,
            jump_at_0: 0.0,
            jump_at_t: 0.0,
            density: Vec::new(),
        }
    }

    pub fn density_at(&self, t: f64) -> f64 {
        self.density.iter().map(|e| e.coef * (e.rate * t).exp()).sum()
    }

    /// ∫₀ᵗ density.
    pub fn traded_by(&self, t: f64) -> f64 {
        self.density.iter().map(|e| e.coef * e_int(e.rate, t)).sum()
    }

    /// Right-continuous holdings X_t for t ∈ [0, T].
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(GameError::TimeOutOfRange { t, horizon: self.horizon });
        }
        let mut v = self.initial_value + self.jump_at_0 + self.traded_by(t);
        if t == self.horizon {
            v += self.jump_at_t;
        }
        Ok(v)
    }

    /// ΔX_t.
    pub fn jump_at(&self, t: f64) -> f64 {
        let mut j = 0.0;
        if t == 0.0 {
            j += self.jump_at_0;
        }
        if t == self.horizon {
            j += self.jump_at_t;
        }
        j
    }

    pub fn terminal_value(&self) -> f64 {
        self.initial_value + self.jump_at_0 + self.traded_by(self.horizon) + self.jump_at_t
    }

    /// a·self + b·other. Horizons must match.
    pub fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        let mut density: Vec<ExpTerm> = x
            .density
            .iter()
            .map(|e| ExpTerm { coef: a * e.coef, rate: e.rate })
            .collect();
        density.extend(y.density.iter().map(|e| ExpTerm { coef: b * e.coef, rate: e.rate }));
        Self {
            horizon: x.horizon,
            initial_value: a * x.initial_value + b * y.initial_value,
            jump_at_0: a * x.jump_at_0 + b * y.jump_at_0,
            jump_at_t: a * x.jump_at_t + b * y.jump_at_t,
            density,
        }
    }
}

/// Limit V as a unit-inventory strategy: jump at 0, no jump at T.
pub fn v_strategy(rho: f64, horizon: f64) -> Result<BVStrategy> {
    check_rho_t(rho, horizon)?;
    let e3 = (3.0 * rho * horizon).exp();
    let d = 2.0 * e3 * (3.0 * rho * horizon + 5.0) - 1.0;
    BVStrategy::new(
        horizon,
        1.0,
        -3.0 * (2.0 * e3 + 1.0) / d,
        0.0,
        vec![
            ExpTerm { coef: -6.0 * rho * e3 / d, rate: 0.0 },
            ExpTerm { coef: -12.0 * rho / d, rate: 3.0 * rho },
        ],
    )
}

/// Limit W as a unit-inventory strategy: linear decay, jump to zero at T.
pub fn w_strategy(rho: f64, horizon: f64) -> Result<BVStrategy> {
    check_rho_t(rho, horizon)?;
    let q = rho * horizon + 1.0;
    BVStrategy::new(
        horizon,
        1.0,
        0.0,
        -1.0 / q,
        vec![ExpTerm { coef: -rho / q, rate: 0.0 }],
    )
}

fn check_rho_t(rho: f64, horizon: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(GameError::Domain { name: "rho", value: rho, bound: "rho > 0" });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(GameError::Domain { name: "T", value: horizon, bound: "T > 0" });
    }
    Ok(())
}

/// X* = ½(x+y)V + ½(x−y)W and Y* = ½(x+y)V − ½(x−y)W.
pub fn continuous_equilibrium(rho: f64, horizon: f64, x: f64, y: f64) -> Result<(BVStrategy, BVStrategy)> {
    let v = v_strategy(rho, horizon)?;
    let w = w_strategy(rho, horizon)?;
    let sp = 0.5 * (x + y);
    let sm = 0.5 * (x - y);
    Ok((
        BVStrategy::combine(sp, &v, sm, &w),
        BVStrategy::combine(sp, &v, -sm, &w),
    ))
}

/// Closed-form integrals for the kernel e^{−ρ|t−s|} on [0, T].
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    pub rho: f64,
    pub horizon: f64,
}

impl Kernel {
    /// ∫₀ᵀ e^{−ρs} e^{μs} ds.
    fn from_start(&self, mu: f64) -> f64 {
        e_int(mu - self.rho, self.horizon)
    }

    /// ∫₀ᵀ e^{−ρ(T−s)} e^{μs} ds.
    fn to_end(&self, mu: f64) -> f64 {
        (mu * self.horizon).exp() * e_int(-(self.rho + mu), self.horizon)
    }

    /// ∫₀ᵀ e^{μ₁t} ∫₀ᵗ e^{−ρ(t−s)} e^{μ₂s} ds dt.
    fn nested(&self, mu1: f64, mu2: f64) -> f64 {
        let t = self.horizon;
        (e_int(mu1 + mu2, t) - e_int(mu1 - self.rho, t)) / (self.rho + mu2)
    }

    /// ∫_{[0,T]} e^{−ρ|t−s|} dX_s.
    pub fn full(&self, x: &BVStrategy, t: f64) -> f64 {
        let r = self.rho;
        let mut acc = KahanSum::new();
        acc.add(x.jump_at_0 * (-r * t).exp());
        acc.add(x.jump_at_t * (-r * (self.horizon - t)).exp());
        for e in &x.density {
            let before = t * exprel(-(r + e.rate) * t);
            let after = (self.horizon - t) * exprel((e.rate - r) * (self.horizon - t));
            acc.add(e.coef * (e.rate * t).exp() * (before + after));
        }
        acc.value()
    }

    /// ∫_{[0,t)} e^{−ρ(t−s)} dY_s.
    pub fn causal(&self, y: &BVStrategy, t: f64) -> f64 {
        let r = self.rho;
        let mut acc = KahanSum::new();
        if t > 0.0 {
            acc.add(y.jump_at_0 * (-r * t).exp());
        }
        for e in &y.density {
            acc.add(e.coef * (e.rate * t).exp() * t * exprel(-(r + e.rate) * t));
        }
        acc.value()
    }

    /// C(X,Y) = ∫∫ e^{−ρ|t−s|} dX_s dY_t.
    pub fn symmetric_form(&self, x: &BVStrategy, y: &BVStrategy) -> f64 {
        let edge = (-self.rho * self.horizon).exp();
        let mut acc = KahanSum::new();
        acc.add(x.jump_at_0 * y.jump_at_0 + x.jump_at_t * y.jump_at_t);
        acc.add((x.jump_at_0 * y.jump_at_t + x.jump_at_t * y.jump_at_0) * edge);
        for g in &y.density {
            acc.add(x.jump_at_0 * g.coef * self.from_start(g.rate));
            acc.add(x.jump_at_t * g.coef * self.to_end(g.rate));
        }
        for f in &x.density {
            acc.add(y.jump_at_0 * f.coef * self.from_start(f.rate));
            acc.add(y.jump_at_t * f.coef * self.to_end(f.rate));
            for g in &y.density {
                let both = self.nested(f.rate, g.rate) + self.nested(g.rate, f.rate);
                acc.add(f.coef * g.coef * both);
            }
        }
        acc.value()
    }

    /// C₁(X,Y) = ∫_{[0,T]} ∫_{[0,t)} e^{−ρ(t−s)} dY_s dX_t.
    pub fn causal_form(&self, x: &BVStrategy, y: &BVStrategy) -> f64 {
        let edge = (-self.rho * self.horizon).exp();
        let mut acc = KahanSum::new();
        acc.add(x.jump_at_t * y.jump_at_0 * edge);
        for g in &y.density {
            acc.add(x.jump_at_t * g.coef * self.to_end(g.rate));
        }
        for f in &x.density {
            acc.add(f.coef * y.jump_at_0 * self.from_start(f.rate));
            for g in &y.density {
                acc.add(f.coef * g.coef * self.nested(f.rate, g.rate));
            }
        }
        acc.value()
    }
}

/// C₂(X,Y) = Σ ΔX_t ΔY_t.
pub fn jump_form(x: &BVStrategy, y: &BVStrategy) -> f64 {
    x.jump_at_0 * y.jump_at_0 + x.jump_at_t * y.jump_at_t
}

/// 𝒞(X|Y) = ½C(X,X) + C₁(X,Y) + ½C₂(X,Y) + θC₂(X,X).
pub fn liquidation_cost(x: &BVStrategy, y: &BVStrategy, rho: f64, theta: f64) -> f64 {
    let k = Kernel { rho, horizon: x.horizon };
    0.5 * k.symmetric_form(x, x)
        + k.causal_form(x, y)
        + 0.5 * jump_form(x, y)
        + theta * jump_form(x, x)
}

/// Agent 1's cost at the continuous equilibrium (θ = ¼).
pub fn continuous_cost(rho: f64, horizon: f64, x: f64, y: f64) -> Result<f64> {
    let (xs, ys) = continuous_equilibrium(rho, horizon, x, y)?;
    Ok(liquidation_cost(&xs, &ys, rho, 0.25))
}

/// Left side of the first-order condition for X given Y at time t:
/// ∫ e^{−ρ|t−s|} dX_s + ∫_{[0,t)} e^{−ρ(t−s)} dY_s + ½ΔY_t + 2θΔX_t.
pub fn fredholm_lhs(x: &BVStrategy, y: &BVStrategy, rho: f64, theta: f64, t: f64) -> f64 {
    let k = Kernel { rho, horizon: x.horizon };
    k.full(x, t) + k.causal(y, t) + 0.5 * y.jump_at(t) + 2.0 * theta * x.jump_at(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FredholmReport {
    pub theta: f64,
    /// Mean of the left side over the grid, agent 1.
    pub constant_estimate_agent1: f64,
    pub constant_estimate_agent2: f64,
    /// Largest distance of either agent's left side from its mean.
    pub max_abs_deviation: f64,
    /// −½((x−y)/(ρT+1) + 18(x+y)/(10+6ρT−e^{−3ρT})).
    pub predicted_constant_agent1: f64,
    /// ½((x−y)/(ρT+1) − 18(x+y)/(10+6ρT−e^{−3ρT})).
    pub predicted_constant_agent2: f64,
}

/// Evaluates the first-order condition of both agents at the θ = ¼ equilibrium
/// strategies, on `n_grid` equally spaced points of [0, T] including both ends.
pub fn fredholm_residual(
    rho: f64,
    horizon: f64,
    x: f64,
    y: f64,
    theta: f64,
    n_grid: usize,
) -> Result<FredholmReport> {
    if n_grid < 16 {
        return Err(GameError::Domain { name: "n_grid", value: n_grid as f64, bound: "n_grid >= 16" });
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(GameError::Domain { name: "theta", value: theta, bound: "theta >= 0" });
    }
    let (xs, ys) = continuous_equilibrium(rho, horizon, x, y)?;
    let grid: Vec<f64> = (0..n_grid)
        .map(|i| {
            if i + 1 == n_grid {
                horizon
            } else {
                horizon * i as f64 / (n_grid - 1) as f64
            }
        })
        .collect();
    let f1: Vec<f64> = grid.iter().map(|&t| fredholm_lhs(&xs, &ys, rho, theta, t)).collect();
    let f2: Vec<f64> = grid.iter().map(|&t| fredholm_lhs(&ys, &xs, rho, theta, t)).collect();
    let mean = |v: &[f64]| crate::numeric::sum(v) / v.len() as f64;
    let (c1, c2) = (mean(&f1), mean(&f2));
    let dev = f1
        .iter()
        .map(|v| (v - c1).abs())
        .chain(f2.iter().map(|v| (v - c2).abs()))
        .fold(0.0, f64::max);
    let z = rho * horizon;
    let q = 18.0 * (x + y) / (10.0 + 6.0 * z - (-3.0 * z).exp());
    let l = (x - y) / (z + 1.0);
    Ok(FredholmReport {
        theta,
        constant_estimate_agent1: c1,
        constant_estimate_agent2: c2,
        max_abs_deviation: dev,
        predicted_constant_agent1: -0.5 * (l + q),
        predicted_constant_agent2: 0.5 * (l - q),
    })
}

/// Trades on the grid kT/N: ξ₀ = X₀₋ − X₀ and ξ_k = X_{t_{k−1}} − X_{t_k}.
/// Positive entries are sales, and Σξ = X₀₋ − X_T.
pub fn discretize_strategy(x: &BVStrategy, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(GameError::Domain { name: "N", value: steps as f64, bound: "N >= 2" });
    }
    let t = |k: usize| {
        if k == steps {
            x.horizon
        } else {
            x.horizon * k as f64 / steps as f64
        }
    };
    let mut out = Vec::with_capacity(steps + 1);
    let mut prev = x.initial_value;
    for k in 0..=steps {
        let cur = x.value_at(t(k))?;
        out.push(prev - cur);
        prev = cur;
    }
    Ok(out)
}
