//! Cavity-magnon entanglement over the (Δ_c/ω_b, Δ̃_m/ω_b) plane, with and
//! without the parametric amplifier.
//!
//! ```text
//! cargo run --release --example cavity_magnon_map [out.csv]
//! ```

use std::f64::consts::PI;
use std::fs::File;

use magnomech::sweep::{argmax_measure, grid_sweep, write_csv, Axis, AxisParam, Measure, SweepSpec};
use magnomech::SystemParams;

fn main() -> magnomech::Result<()> {
    let axes = vec![
        Axis::new(AxisParam::DeltaCOverOmegaB, -2.0, 0.0, 101),
        Axis::new(AxisParam::DeltaMOverOmegaB, 0.0, 2.0, 101),
    ];
    for (label, gain, phase) in [("G = 0", 0.0, 0.0), ("G = 3.31e6, θ = π", 3.31e6, PI)] {
        let base = SystemParams {
            opa_gain: gain,
            opa_phase: phase,
            ..SystemParams::baseline()
        };
        let table = grid_sweep(
            &SweepSpec {
                base,
                axes: axes.clone(),
                tripartite: false,
            },
            0,
        )?;
        for m in [Measure::Ecm, Measure::Ecb, Measure::Emb] {
            let (i, v) = argmax_measure(&table, m)?;
            let row = &table.rows[i];
            println!(
                "{label:>18}  max {m} = {v:.4} at Δc/ωb = {:+.2}, Δ̃m/ωb = {:+.2}",
                row.x,
                row.y.unwrap()
            );
        }
        if let (Some(path), true) = (std::env::args().nth(1), gain > 0.0) {
            write_csv(&table, File::create(&path)?)?;
            println!("wrote {path}");
        }
    }
    Ok(())
}
