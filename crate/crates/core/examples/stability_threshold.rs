//! Largest parametric gain that keeps the linearized dynamics stable.

use std::f64::consts::PI;

use magnomech::dynamics::{drift_matrix, max_stable_gain, stability};
use magnomech::SystemParams;

fn main() -> magnomech::Result<()> {
    let p = SystemParams::baseline();
    let worst = max_stable_gain(&p, None)?;
    println!(
        "worst case over θ: G_max = {:.4e} s^-1 at θ = {:.3}",
        worst.gain, worst.phase
    );
    for k in 0..=4 {
        let theta = k as f64 * PI / 4.0;
        let t = max_stable_gain(&p, Some(theta))?;
        println!("θ = {:.3}: G_max = {:.4e} s^-1", theta, t.gain);
    }

    // margin just below and above the boundary
    for f in [0.99, 1.01] {
        let q = SystemParams {
            opa_gain: f * worst.gain,
            opa_phase: worst.phase,
            ..p
        };
        let s = stability(&drift_matrix(&q))?;
        println!("G = {f} G_max: stable = {}, max Re λ = {:+.3e}", s.stable, s.margin);
    }

    // without the optomechanical couplings the threshold is κ_c/2
    let bare = SystemParams {
        delta_c: 0.0,
        g_mc: 0.0,
        ..p
    };
    let t = max_stable_gain(&bare, Some(0.0))?;
    println!("isolated resonant cavity: {:.4e} vs κc/2 = {:.4e}", t.gain, bare.kappa_c / 2.0);
    Ok(())
}
