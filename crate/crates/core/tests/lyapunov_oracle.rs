mod common;

use common::{lyapunov_by_quadrature, random_stable_system, rng};
use magnomech::lyapunov::{residual, solve_stable, RESIDUAL_TOLERANCE};

#[test]
fn matches_quadrature_on_random_stable_systems() {
    let mut r = rng(7);
    for k in 0..10 {
        let margin = 0.2 + 0.08 * k as f64;
        let (a, d) = random_stable_system(&mut r, margin);
        let c = solve_stable(&a, &d).unwrap().0;
        assert!(residual(&a, &c, &d) <= RESIDUAL_TOLERANCE);
        let q = lyapunov_by_quadrature(&a, &d);
        let err = (c - q).norm() / q.norm();
        assert!(err <= 1e-6, "system {k}: {err:e}");
    }
}
