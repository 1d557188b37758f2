//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use gauss_quad::GaussLegendre;
use impact_game::asymptotics::{
    cluster_distance, comparison_threshold, cost_comparison_predicate, limit_bundle,
    renormalized_paths, LimitBundle, ThetaRegime,
};
use impact_game::closed_form::{nu_closed_form, omega_closed_form};
use impact_game::continuous::{continuous_cost, continuous_equilibrium, fredholm_residual, BVStrategy};
use impact_game::costs::{expected_cost, tax_metrics};
use impact_game::dense::{solve_nu_dense, solve_omega_dense};
use impact_game::equilibrium::{equilibrium_strategies, solve_nu, solve_omega};
use impact_game::matrices::structured_matrices;
use impact_game::montecarlo::{simulate_cost, PriceModel, SimConfig};
use impact_game::GameParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_N: [usize; 6] = [2, 3, 5, 10, 50, 200];
const GRID_THETA: [f64; 5] = [0.0, 0.05, 0.24, 0.25, 1.0];
const GRID_RHO_T: [f64; 3] = [0.1, 1.0, 10.0];

type Outcome = Result<String, String>;

fn grid() -> impl Iterator<Item = GameParams> {
    GRID_N.into_iter().flat_map(|n| {
        GRID_THETA.into_iter().flat_map(move |th| {
            GRID_RHO_T
                .into_iter()
                .map(move |rt| GameParams::new(rt, 1.0, n, th, 1.0, 0.5).unwrap())
        })
    })
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / scale
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let e = start.elapsed();
    if e < limit {
        Ok(())
    } else {
        Err(format!("runtime {e:?} exceeds {limit:?}"))
    }
}

fn solver_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in grid() {
        let nus = [solve_nu(&p).unwrap(), nu_closed_form(&p).unwrap(), solve_nu_dense(&p).unwrap()];
        let oms = [
            solve_omega(&p).unwrap(),
            omega_closed_form(&p).unwrap(),
            solve_omega_dense(&p).unwrap(),
        ];
        for set in [&nus, &oms] {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let d = rel_diff(&set[i], &set[j]);
                if !(d <= 1e-8) {
                    return Err(format!("N={} theta={} rhoT={}: rel diff {d:e}", p.steps, p.theta, p.rho));
                }
                worst = worst.max(d);
            }
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("90 parameter sets, worst pairwise rel diff {worst:.1e}, {:?}", start.elapsed()))
}

fn defining_residuals() -> Outcome {
    let (mut rn, mut ro) = (0.0f64, 0.0f64);
    for p in grid() {
        let m = structured_matrices(&p).unwrap();
        let nu = solve_nu(&p).unwrap();
        let om = solve_omega(&p).unwrap();
        let g = m.mul_gamma(&nu).unwrap();
        let gt = m.mul_gamma_tilde(&nu).unwrap();
        for k in 0..nu.len() {
            rn = rn.max((g[k] + gt[k] + 2.0 * p.theta * nu[k] - 1.0).abs());
        }
        let g = m.mul_gamma(&om).unwrap();
        let gt = m.mul_gamma_tilde(&om).unwrap();
        for k in 0..om.len() {
            ro = ro.max((g[k] - gt[k] + 2.0 * p.theta * om[k] - 1.0).abs());
        }
    }
    check(rn <= 1e-10 && ro <= 1e-12, format!("nu residual {rn:.1e}, omega residual {ro:.1e}"))
}

fn threshold() -> Outcome {
    let mut min_at_quarter = f64::INFINITY;
    for n in 2..=200 {
        for rt in GRID_RHO_T {
            let s = equilibrium_strategies(&GameParams::new(rt, 1.0, n, 0.25, 1.0, 1.0).unwrap()).unwrap();
            min_at_quarter = min_at_quarter.min(s.min_component_v).min(s.min_component_w);
        }
    }
    if min_at_quarter < -1e-12 {
        return Err(format!("theta=0.25 min component {min_at_quarter:e}"));
    }
    let rts = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut found = None;
    'search: for rt in rts {
        for n in 2..=200 {
            let s = equilibrium_strategies(&GameParams::new(rt, 1.0, n, 0.24, 1.0, 1.0).unwrap()).unwrap();
            let m = s.min_component_v.min(s.min_component_w);
            if m < -1e-8 {
                found = Some((n, rt, m));
                break 'search;
            }
        }
    }
    match found {
        Some((n, rt, m)) => Ok(format!(
            "theta=0.25 min component {min_at_quarter:.1e}; theta=0.24 N={n} rhoT={rt} gives {m:.2e}"
        )),
        None => Err("no negative component found at theta=0.24".into()),
    }
}

fn nash_certificate() -> Outcome {
    let mut worst = 0.0f64;
    for p in grid() {
        let s = equilibrium_strategies(&p).unwrap();
        let r = (s.foc_deviation / s.foc_scale).max(s.foc_deviation_eta / s.foc_scale_eta);
        if !(r <= 1e-9) {
            return Err(format!("N={} theta={} rhoT={}: foc ratio {r:e}", p.steps, p.theta, p.rho));
        }
        worst = worst.max(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_gain = f64::INFINITY;
    for th in [0.0, 0.25, 1.0] {
        let p = GameParams::new(1.0, 1.0, 50, th, 1.0, 0.5).unwrap();
        let s = equilibrium_strategies(&p).unwrap();
        let base = expected_cost(&p, &s.xi_star, &s.eta_star).unwrap();
        for _ in 0..1000 {
            let mut d: Vec<f64> = (0..p.size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            d.iter_mut().for_each(|v| *v = 1e-3 * (*v - mean));
            let xi: Vec<f64> = s.xi_star.iter().zip(&d).map(|(a, b)| a + b).collect();
            let gain = expected_cost(&p, &xi, &s.eta_star).unwrap() - base;
            min_gain = min_gain.min(gain);
        }
    }
    check(
        min_gain >= -1e-12,
        format!("worst foc ratio {worst:.1e}; 3000 perturbations, smallest cost change {min_gain:.2e}"),
    )
}

fn agent1_cost(p: &GameParams) -> f64 {
    let s = equilibrium_strategies(p).unwrap();
    expected_cost(p, &s.xi_star, &s.eta_star).unwrap()
}

fn cost_limit_convergence() -> Outcome {
    let start = Instant::now();
    let p = GameParams::new(1.0, 1.0, 100, 0.25, 1.0, 1.0).unwrap();
    let lim = limit_bundle(&p).cost_limit_pos;
    let d100 = (agent1_cost(&p) - lim).abs();
    let d800 = (agent1_cost(&p.with_steps(800).unwrap()) - lim).abs();
    within(Duration::from_secs(5), start)?;
    check(
        d800 < d100 && d800 < 1e-2 * lim.abs(),
        format!("limit {lim:.6}, |err| N=100 {d100:.2e}, N=800 {d800:.2e}"),
    )
}

fn parity_limits() -> Outcome {
    let p = GameParams::new(1.0, 1.0, 800, 0.0, 1.0, 1.0).unwrap();
    let b = limit_bundle(&p);
    let even = agent1_cost(&p);
    let odd = agent1_cost(&p.with_steps(801).unwrap());
    let re = (even - b.cost_limit_even).abs() / b.cost_limit_even.abs();
    let ro = (odd - b.cost_limit_odd).abs() / b.cost_limit_odd.abs();
    check(
        re <= 1e-2 && ro <= 1e-2 && b.cost_limit_even < b.cost_limit_odd,
        format!(
            "even limit {:.6} (rel err {re:.1e}), odd limit {:.6} (rel err {ro:.1e})",
            b.cost_limit_even, b.cost_limit_odd
        ),
    )
}

fn cluster_bracketing() -> Outcome {
    let b = LimitBundle::new(1.0, 1.0, 1.0, 1.0, ThetaRegime::Zero);
    let t = 0.5;
    let mut last = (f64::NAN, f64::NAN);
    for n in (100..=400).step_by(50) {
        let p = GameParams::new(1.0, 1.0, 2 * n, 0.0, 1.0, 1.0).unwrap();
        let paths = renormalized_paths(&equilibrium_strategies(&p).unwrap());
        let tg = paths.grid_time(t).unwrap();
        let dv = cluster_distance(paths.v_at(t).unwrap(), b.f_plus(tg), b.f_minus(tg));
        let dw = cluster_distance(paths.w_at(t).unwrap(), b.phi_plus(tg), b.phi_minus(tg));
        last = (dv, dw);
    }
    check(
        last.0 <= 5e-3 && last.1 <= 5e-3,
        format!("at 2N=800: V distance {:.1e}, W distance {:.1e}", last.0, last.1),
    )
}

fn cost_comparison() -> Outcome {
    let mut margins = Vec::new();
    for rt in [0.70, 1.0, 3.0, 6.0] {
        let c = cost_comparison_predicate(rt, 1.0, 1.0);
        if !(c.holds && c.margin > 0.0) {
            return Err(format!("rhoT={rt}: margin {}", c.margin));
        }
        margins.push(format!("{rt}:{:.3e}", c.margin));
    }
    Ok(format!("threshold {:.4}; margins {}", comparison_threshold(), margins.join(" ")))
}

fn tax_limits() -> Outcome {
    let p = GameParams::new(1.0, 1.0, 500, 0.25, 1.0, 0.5).unwrap();
    let tr = tax_metrics(&p).unwrap().tax_revenue;
    let lim = limit_bundle(&p).tr_limit;
    let rel = (tr - lim).abs() / lim;
    if rel > 1e-2 {
        return Err(format!("TR_500 {tr} vs limit {lim}: rel {rel:e}"));
    }
    let mut min = f64::INFINITY;
    for (x, y) in [(1.0, 0.5), (1.0, -0.3), (-2.0, 1.0), (0.5, 0.5), (3.0, -1.0)] {
        for rt in [0.1, 1.0, 3.0, 10.0] {
            min = min.min(LimitBundle::new(rt, 1.0, x, y, ThetaRegime::Positive).tr_minus_tc_liminf);
        }
    }
    let zero = LimitBundle::new(1.0, 1.0, 1.3, -1.3, ThetaRegime::Positive).tr_minus_tc_liminf;
    check(
        min >= 0.0 && zero == 0.0,
        format!("TR_500 rel err {rel:.1e}; liminf(TR-TC) min on 20 points {min:.3e}; x=-y gives {zero}"),
    )
}

const FRED_XY: [(f64, f64); 3] = [(1.0, 0.0), (1.0, 1.0), (2.0, -1.0)];
const FRED_RHO_T: [f64; 3] = [0.5, 1.0, 5.0];

fn fredholm() -> Outcome {
    let (mut dev, mut cerr) = (0.0f64, 0.0f64);
    for (x, y) in FRED_XY {
        for rt in FRED_RHO_T {
            let r = fredholm_residual(rt, 1.0, x, y, 0.25, 257).unwrap();
            dev = dev.max(r.max_abs_deviation);
            cerr = cerr
                .max((r.constant_estimate_agent1 - r.predicted_constant_agent1).abs())
                .max((r.constant_estimate_agent2 - r.predicted_constant_agent2).abs());
        }
    }
    check(dev <= 1e-10 && cerr <= 1e-12, format!("max deviation {dev:.1e}, constant error {cerr:.1e}"))
}

/// Agent 1's continuous cost by Gauss–Legendre quadrature of every integral.
fn quadrature_cost(x: &BVStrategy, y: &BVStrategy, rho: f64, theta: f64) -> f64 {
    let gl = GaussLegendre::new(60).unwrap();
    let tt = x.horizon;
    let k = |d: f64| (-rho * d.abs()).exp();
    let (fx, fy) = (|t: f64| x.density_at(t), |t: f64| y.density_at(t));
    // ∫₀ᵀ f(t) ∫₀ᵗ e^{−ρ(t−s)} g(s) ds dt
    let nested = |f: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64| {
        gl.integrate(0.0, tt, |t| f(t) * gl.integrate(0.0, t, |s| k(t - s) * g(s)))
    };
    let a0 = |z: &BVStrategy| z.jump_at_0;
    let at = |z: &BVStrategy| z.jump_at_t;
    let from0 = |g: &dyn Fn(f64) -> f64| gl.integrate(0.0, tt, |s| k(s) * g(s));
    let to_t = |g: &dyn Fn(f64) -> f64| gl.integrate(0.0, tt, |s| k(tt - s) * g(s));
    let cxx = a0(x).powi(2)
        + at(x).powi(2)
        + 2.0 * a0(x) * at(x) * k(tt)
        + 2.0 * a0(x) * from0(&fx)
        + 2.0 * at(x) * to_t(&fx)
        + 2.0 * nested(&fx, &fx);
    let c1 = at(x) * (a0(y) * k(tt) + to_t(&fy)) + a0(y) * from0(&fx) + nested(&fx, &fy);
    let c2 = |p: &BVStrategy, q: &BVStrategy| a0(p) * a0(q) + at(p) * at(q);
    0.5 * cxx + c1 + 0.5 * c2(x, y) + theta * c2(x, x)
}

fn continuous_cost_limit() -> Outcome {
    let (mut lim_err, mut quad_err) = (0.0f64, 0.0f64);
    for (x, y) in FRED_XY {
        for rt in FRED_RHO_T {
            let c = continuous_cost(rt, 1.0, x, y).unwrap();
            let lim = LimitBundle::new(rt, 1.0, x, y, ThetaRegime::Positive).cost_limit_pos;
            lim_err = lim_err.max((c - lim).abs());
            let (xs, ys) = continuous_equilibrium(rt, 1.0, x, y).unwrap();
            quad_err = quad_err.max((quadrature_cost(&xs, &ys, rt, 0.25) - c).abs());
        }
    }
    check(
        lim_err <= 1e-10 && quad_err <= 1e-6,
        format!("|cost - limit| {lim_err:.1e}, |cost - quadrature| {quad_err:.1e}"),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for th in [0.0, 0.25] {
        let p = GameParams::new(1.0, 1.0, 50, th, 1.0, 0.5).unwrap();
        let s = equilibrium_strategies(&p).unwrap();
        let ex = expected_cost(&p, &s.xi_star, &s.eta_star).unwrap();
        let ee = expected_cost(&p, &s.eta_star, &s.xi_star).unwrap();
        for model in [PriceModel::ConstantZero, PriceModel::RandomWalk] {
            let cfg = SimConfig { n_samples: 100_000, seed: 2024, price_model: model, walk_scale: 0.1 };
            let r = simulate_cost(&p, &s.xi_star, &s.eta_star, &cfg).unwrap();
            let zx = (r.mean_xi_cost - ex).abs() / r.stderr_xi;
            let ze = (r.mean_eta_cost - ee).abs() / r.stderr_eta;
            if !(zx <= 3.0 && ze <= 3.0) {
                return Err(format!("theta={th} {model:?}: z-scores {zx:.2} {ze:.2}"));
            }
            worst = worst.max(zx).max(ze);
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("4 runs of 1e5 samples, worst |z| {worst:.2}, {:?}", start.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("solver equivalence", solver_equivalence),
        ("defining residuals", defining_residuals),
        ("theta* = 1/4 threshold", threshold),
        ("Nash certificate", nash_certificate),
        ("cost-limit convergence", cost_limit_convergence),
        ("parity limits", parity_limits),
        ("cluster bracketing", cluster_bracketing),
        ("taxed limit beats untaxed liminf", cost_comparison),
        ("tax revenue limits", tax_limits),
        ("Fredholm constancy", fredholm),
        ("continuous cost", continuous_cost_limit),
        ("Monte Carlo", monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
