//! E_cm against temperature at the optimal detunings of each configuration.

use std::f64::consts::{FRAC_PI_2, PI};

use magnomech::sweep::{
    argmax_measure, grid_sweep, temperature_scan, Axis, AxisParam, EvalOptions, Measure, SweepSpec,
};
use magnomech::SystemParams;

fn optimum(base: SystemParams) -> magnomech::Result<SystemParams> {
    let table = grid_sweep(
        &SweepSpec {
            base,
            axes: vec![
                Axis::new(AxisParam::DeltaCOverOmegaB, -2.0, 0.0, 101),
                Axis::new(AxisParam::DeltaMOverOmegaB, 0.0, 2.0, 101),
            ],
            tripartite: false,
        },
        0,
    )?;
    let (i, _) = argmax_measure(&table, Measure::Ecm)?;
    Ok(table.rows[i].report.params_echo)
}

fn main() -> magnomech::Result<()> {
    let cases = [("G = 0", 0.0, 0.0), ("θ = π", 3.31e6, PI), ("θ = π/2", 3.31e6, FRAC_PI_2)];
    for (label, gain, phase) in cases {
        let p = optimum(SystemParams {
            opa_gain: gain,
            opa_phase: phase,
            ..SystemParams::baseline()
        })?;
        let scan = temperature_scan(&p, 0.0, 0.3, 301, &EvalOptions::default(), 0)?;
        let at = |t: f64| {
            scan.rows
                .iter()
                .find(|r| (r.x - t).abs() < 5e-4)
                .and_then(|r| r.report.e_cm)
                .unwrap_or(0.0)
        };
        let vanish = scan.rows.iter().find(|r| r.report.e_cm == Some(0.0)).map(|r| r.x);
        println!(
            "{label:>8} (Δc/ωb = {:+.2}, Δ̃m/ωb = {:+.2}): E_cm(0.01 K) = {:.4}, E_cm(0.17 K) = {:.4}, vanishes at {}",
            p.delta_c / p.omega_b,
            p.delta_m_eff / p.omega_b,
            at(0.01),
            at(0.17),
            vanish.map_or("> 0.3 K".into(), |t| format!("{t:.3} K"))
        );
    }
    Ok(())
}
