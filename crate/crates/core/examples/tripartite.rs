//! Minimal residual contangle along the cavity detuning for the four
//! curves G = 0 and G = 3.61e6 s^-1 with θ ∈ {0, π/2, π}.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use magnomech::sweep::{tripartite_scan, Axis, AxisParam};
use magnomech::SystemParams;

fn main() -> magnomech::Result<()> {
    let axis = Axis::new(AxisParam::DeltaCOverOmegaB, -2.0, 0.0, 201);
    let curves = [("G = 0", 0.0, 0.0), ("θ = 0", 3.61e6, 0.0), ("θ = π/2", 3.61e6, FRAC_PI_2), ("θ = π", 3.61e6, PI)];
    let mut columns = Vec::new();
    for (label, gain, phase) in curves {
        let p = SystemParams {
            g_mb_eff: TAU * 4.8e6,
            opa_gain: gain,
            opa_phase: phase,
            ..SystemParams::baseline()
        };
        let t = tripartite_scan(&p, axis, 0)?;
        let (best, at) = t
            .rows
            .iter()
            .filter_map(|r| r.report.r_tau_min.map(|v| (v, r.x)))
            .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        let support = t.rows.iter().filter(|r| r.report.r_tau_min.is_some_and(|v| v > 0.0)).count();
        println!("{label:>8}: max R_τ^min = {best:.4} at Δc/ωb = {at:+.2}, positive at {support}/201 points");
        columns.push(t);
    }
    println!("\nΔc/ωb    G=0      θ=0      θ=π/2    θ=π");
    for i in (0..201).step_by(20) {
        print!("{:+.2}", columns[0].rows[i].x);
        for c in &columns {
            print!("  {:7.4}", c.rows[i].report.r_tau_min.unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
