use impact_game::dense::gamma_is_positive_definite;
use impact_game::matrices::{build_matrices, build_matrices_dense, gamma_inverse_apply, structured_matrices};
use impact_game::{GameError, GameParams};
use nalgebra::DVector;
use proptest::prelude::*;

fn params(n: usize, rho_t: f64) -> GameParams {
    GameParams::new(rho_t, 1.0, n, 0.0, 1.0, 1.0).unwrap()
}

#[test]
fn zero_resilience_is_a_domain_error() {
    let e = GameParams::new(0.0, 1.0, 2, 0.0, 1.0, 1.0).unwrap_err();
    assert!(matches!(e, GameError::Domain { name: "rho", .. }));
    assert!(e.to_string().contains("rho > 0"));
}

#[test]
fn ones_map_to_boundary_weighted_vector() {
    for &(n, rt) in &[(2, 0.3), (7, 1.0), (40, 10.0)] {
        let p = params(n, rt);
        let z = gamma_inverse_apply(&p, &vec![1.0; n + 1]).unwrap();
        let oma = p.one_minus_alpha();
        for (k, zk) in z.iter().enumerate() {
            let inner = if k == 0 || k == n { 1.0 } else { oma };
            let want = oma * inner / p.one_minus_alpha_sq();
            assert!((zk - want).abs() < 1e-12 * want.abs().max(1.0), "k={k}");
        }
    }
}

#[test]
fn three_by_three_matches_dense_inverse() {
    let p = GameParams::new(2.0f64.ln(), 2.0, 2, 0.0, 1.0, 1.0).unwrap();
    let m = build_matrices(&p).unwrap();
    let inv = m.dense().unwrap().gamma.clone().try_inverse().unwrap();
    let want = inv * DVector::from_element(3, 1.0);
    let got = gamma_inverse_apply(&p, &[1.0, 1.0, 1.0]).unwrap();
    for k in 0..3 {
        assert!((got[k] - want[k]).abs() < 1e-14);
    }
    // α = ½: (1/(1−α²))(1−α)·(1, 1−α, 1)
    let a = 0.5;
    let scale = (1.0 - a) / (1.0 - a * a);
    for (g, w) in got.iter().zip([scale, scale * (1.0 - a), scale]) {
        assert!((g - w).abs() < 1e-14);
    }
}

#[test]
fn gamma_is_positive_definite_up_to_500() {
    for &n in &[2, 10, 100, 499] {
        for &rt in &[0.01, 1.0, 50.0] {
            assert!(gamma_is_positive_definite(&params(n, rt)).unwrap());
        }
    }
}

#[test]
fn dense_gamma_entries_are_kms() {
    let p = params(600, 3.0);
    let m = build_matrices_dense(&p).unwrap();
    let g = &m.dense().unwrap().gamma;
    let a = p.alpha();
    for &(i, j) in &[(0usize, 0usize), (5, 2), (2, 5), (599, 0), (300, 310)] {
        let d = (i as i32 - j as i32).unsigned_abs() as i32;
        assert!((g[(i, j)] - a.powi(d)).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // cond(Γ) ≈ 2N/ρT here is at most 800, so 1e−12 relative is attainable.
    #[test]
    fn inverse_recovers_random_vectors(
        n in 2usize..200,
        rt in 0.5f64..20.0,
        seed in proptest::collection::vec(-1.0f64..1.0, 301),
    ) {
        let p = params(n, rt);
        let m = structured_matrices(&p).unwrap();
        let z = &seed[..n + 1];
        let back = gamma_inverse_apply(&p, &m.mul_gamma(z).unwrap()).unwrap();
        let scale = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (b, zk) in back.iter().zip(z) {
            prop_assert!((b - zk).abs() <= 1e-12 * scale);
        }
    }

    // Below ρT ≈ 0.05 at N = 2000 the rounding of z alone exceeds 1e−10.
    #[test]
    fn inverse_residual_small(
        n in 2usize..2000,
        rt in 0.05f64..20.0,
        s in any::<u64>(),
    ) {
        let p = params(n, rt);
        let m = structured_matrices(&p).unwrap();
        let rhs: Vec<f64> = (0..=n).map(|k| ((k as u64).wrapping_mul(s | 1) % 1997) as f64 / 998.5 - 1.0).collect();
        let z = gamma_inverse_apply(&p, &rhs).unwrap();
        let r = m.mul_gamma(&z).unwrap();
        let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in r.iter().zip(&rhs) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }
}
