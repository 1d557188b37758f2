//! Model parameters.

use serde::{Deserialize, Serialize};

use crate::{GameError, Result};

/// Discrete game parameters on the grid `kT/N`, `k = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Resilience rate ρ.
    pub rho: f64,
    /// Horizon T.
    pub horizon: f64,
    /// Number of grid steps N (there are N+1 trading times).
    pub steps: usize,
    /// Transaction-cost weight θ.
    pub theta: f64,
    /// Inventory of agent 1.
    pub x: f64,
    /// Inventory of agent 2.
    pub y: f64,
}

fn domain(name: &'static str, value: f64, bound: &'static str) -> GameError {
    GameError::Domain { name, value, bound }
}

impl GameParams {
    pub fn new(rho: f64, horizon: f64, steps: usize, theta: f64, x: f64, y: f64) -> Result<Self> {
        let p = Self {
            rho,
            horizon,
            steps,
            theta,
            x,
            y,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every domain bound; the error names the first violated one.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(domain("rho", self.rho, "rho > 0"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(domain("T", self.horizon, "T > 0"));
        }
        if self.steps < 2 {
            return Err(domain("N", self.steps as f64, "N >= 2"));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(domain("theta", self.theta, "theta >= 0"));
        }
        if !self.x.is_finite() {
            return Err(domain("x", self.x, "x finite"));
        }
        if !self.y.is_finite() {
            return Err(domain("y", self.y, "y finite"));
        }
        let a = self.alpha();
        if !(a > 0.0) {
            return Err(domain("alpha", a, "alpha = exp(-rho*T/N) > 0"));
        }
        if !(a < 1.0) {
            return Err(domain("alpha", a, "alpha = exp(-rho*T/N) < 1"));
        }
        Ok(())
    }

    /// Number of trading times, N+1.
    pub fn size(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// ρT/N.
    pub fn rho_dt(&self) -> f64 {
        self.rho * self.horizon / self.steps as f64
    }

    pub fn rho_t(&self) -> f64 {
        self.rho * self.horizon
    }

    /// α = e^{−ρT/N}.
    pub fn alpha(&self) -> f64 {
        (-self.rho_dt()).exp()
    }

    /// 1 − α without cancellation.
    pub fn one_minus_alpha(&self) -> f64 {
        -(-self.rho_dt()).exp_m1()
    }

    /// 1 − α² without cancellation.
    pub fn one_minus_alpha_sq(&self) -> f64 {
        -(-2.0 * self.rho_dt()).exp_m1()
    }

    /// κ = 2θ + ½.
    pub fn kappa(&self) -> f64 {
        2.0 * self.theta + 0.5
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.rho, self.horizon, self.steps, theta, self.x, self.y)
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(self.rho, self.horizon, steps, self.theta, self.x, self.y)
    }

    pub fn with_inventories(&self, x: f64, y: f64) -> Result<Self> {
        Self::new(self.rho, self.horizon, self.steps, self.theta, x, y)
    }

    /// Grid time t_k = k·T/N, rounded once, so t_N = T exactly.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.horizon / self.steps as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_each_bound() {
        let bad = [
            GameParams::new(0.0, 1.0, 2, 0.0, 1.0, 1.0),
            GameParams::new(1.0, -1.0, 2, 0.0, 1.0, 1.0),
            GameParams::new(1.0, 1.0, 1, 0.0, 1.0, 1.0),
            GameParams::new(1.0, 1.0, 2, -0.1, 1.0, 1.0),
            GameParams::new(1.0, 1.0, 2, 0.0, f64::NAN, 1.0),
            GameParams::new(1e6, 1e6, 2, 0.0, 1.0, 1.0),
        ];
        let names: Vec<_> = bad
            .iter()
            .map(|r| match r {
                Err(GameError::Domain { name, .. }) => *name,
                other => panic!("expected domain error, got {other:?}"),
            })
            .collect();
        assert_eq!(names, ["rho", "T", "N", "theta", "x", "alpha"]);
    }

    #[test]
    fn alpha_underflow_toward_one_is_rejected() {
        let e = GameParams::new(1e-300, 1.0, 1000, 0.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(e, GameError::Domain { name: "alpha", .. }));
    }

    #[test]
    fn kappa_landmarks() {
        let p = GameParams::new(1.0, 1.0, 10, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(p.kappa(), 0.5);
        assert_eq!(p.with_theta(0.25).unwrap().kappa(), 1.0);
    }

    #[test]
    fn stable_complements() {
        let p = GameParams::new(1e-3, 1.0, 10_000, 0.0, 1.0, 1.0).unwrap();
        let a = p.alpha();
        let h = 1e-7f64;
        assert!((p.one_minus_alpha() - (h - h * h / 2.0)).abs() < 1e-21);
        assert!((p.one_minus_alpha_sq() - (1.0 - a * a)).abs() < 1e-12);
    }
}
