//! Monte Carlo estimate of expected costs under random execution priority.
//!
//! At each grid time a fair coin decides whose order executes first. The agent
//! executing second pays the other's impact ξ_kη_k. The unaffected price is
//! either identically zero or a Gaussian random walk started at zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::KahanSum;
use crate::{GameError, GameParams, Result};

/// Samples per independently seeded RNG stream.
pub const BATCH_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceModel {
    ConstantZero,
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub price_model: PriceModel,
    /// Standard deviation of each random-walk increment.
    pub walk_scale: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(GameError::Domain {
                name: "n_samples",
                value: self.n_samples as f64,
                bound: "n_samples >= 1",
            });
        }
        if !(self.walk_scale.is_finite() && self.walk_scale >= 0.0) {
            return Err(GameError::Domain {
                name: "walk_scale",
                value: self.walk_scale,
                bound: "walk_scale >= 0",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub mean_xi_cost: f64,
    pub mean_eta_cost: f64,
    pub stderr_xi: f64,
    pub stderr_eta: f64,
    pub n_samples: usize,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

/// Realized costs of both agents for one draw.
///
/// `eta_first[k]` is true when agent 2's order executes first at t_k, so agent 1
/// pays ξ_kη_k. `unaffected[k]` is S⁰ at t_k.
pub fn realized_costs(
    params: &GameParams,
    xi: &[f64],
    eta: &[f64],
    eta_first: &[bool],
    unaffected: &[f64],
) -> Result<(f64, f64)> {
    let n = params.size();
    for len in [xi.len(), eta.len(), eta_first.len(), unaffected.len()] {
        if len != n {
            return Err(GameError::LengthMismatch { expected: n, actual: len });
        }
    }
    let a = params.alpha();
    let th = params.theta;
    let mut cx = KahanSum::new();
    let mut ce = KahanSum::new();
    cx.add(params.x * unaffected[0]);
    ce.add(params.y * unaffected[0]);
    // impact[k] = Σ_{j<k} α^{k−j}(ξ_j+η_j)
    let mut impact = 0.0;
    for k in 0..n {
        if k > 0 {
            impact = a * (impact + xi[k - 1] + eta[k - 1]);
        }
        let s = unaffected[k] - impact;
        let (x, e) = (xi[k], eta[k]);
        let cross = x * e;
        let (cross_x, cross_e) = if eta_first[k] { (cross, 0.0) } else { (0.0, cross) };
        cx.add((0.5 + th) * x * x - s * x + cross_x);
        ce.add((0.5 + th) * e * e - s * e + cross_e);
    }
    Ok((cx.value(), ce.value()))
}

fn run_batch(
    params: &GameParams,
    xi: &[f64],
    eta: &[f64],
    config: &SimConfig,
    batch: usize,
    count: usize,
) -> Result<(Moments, Moments)> {
    let n = params.size();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(batch as u64);
    let step = Normal::new(0.0, config.walk_scale)
        .map_err(|e| GameError::Inconsistent(format!("normal distribution: {e}")))?;
    let mut order = vec![false; n];
    let mut price = vec![0.0; n];
    let (mut mx, mut me) = (Moments::default(), Moments::default());
    for _ in 0..count {
        for o in order.iter_mut() {
            *o = rng.gen::<bool>();
        }
        if config.price_model == PriceModel::RandomWalk {
            for k in 1..n {
                price[k] = price[k - 1] + step.sample(&mut rng);
            }
        }
        let (cx, ce) = realized_costs(params, xi, eta, &order, &price)?;
        mx.push(cx);
        me.push(ce);
    }
    Ok((mx, me))
}

/// Sample means and standard errors of both agents' realized costs.
///
/// Batch b draws from ChaCha8 seeded with `seed` on stream b. Batches run in
/// parallel and merge in index order, so results are reproducible bit for bit.
pub fn simulate_cost(params: &GameParams, xi: &[f64], eta: &[f64], config: &SimConfig) -> Result<SimResult> {
    params.validate()?;
    config.validate()?;
    let n = params.size();
    for len in [xi.len(), eta.len()] {
        if len != n {
            return Err(GameError::LengthMismatch { expected: n, actual: len });
        }
    }
    let batches = config.n_samples.div_ceil(BATCH_SIZE);
    let parts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_SIZE.min(config.n_samples - b * BATCH_SIZE);
            run_batch(params, xi, eta, config, b, count)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mx, me) = parts
        .into_iter()
        .fold((Moments::default(), Moments::default()), |(ax, ae), (bx, be)| {
            (ax.merge(bx), ae.merge(be))
        });
    Ok(SimResult {
        mean_xi_cost: mx.mean,
        mean_eta_cost: me.mean,
        stderr_xi: mx.stderr(),
        stderr_eta: me.stderr(),
        n_samples: config.n_samples,
    })
}
