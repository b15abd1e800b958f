//! Without the magnomechanical coupling the cavity-magnon interaction is a
//! beam splitter and cannot entangle; the parametric amplifier restores it.

use std::f64::consts::PI;

use magnomech::sweep::{evaluate_point, EvalOptions};
use magnomech::SystemParams;

fn main() -> magnomech::Result<()> {
    let base = SystemParams {
        g_mb_eff: 0.0,
        ..SystemParams::baseline()
    };
    println!("Δc/ωb   E_cm(G=0)   E_cm(G=3.31e6, θ=π)");
    for k in 0..=10 {
        let dc = -2.0 + 0.2 * k as f64;
        let p = SystemParams {
            delta_c: dc * base.omega_b,
            ..base
        };
        let free = evaluate_point(&p, &EvalOptions::default())?;
        let pumped = evaluate_point(
            &SystemParams {
                opa_gain: 3.31e6,
                opa_phase: PI,
                ..p
            },
            &EvalOptions::default(),
        )?;
        let show = |v: Option<f64>| v.map_or("unstable".to_string(), |x| format!("{x:.4}"));
        println!("{dc:+.1}   {:>9}   {:>9}", show(free.e_cm), show(pumped.e_cm));
    }
    Ok(())
}
