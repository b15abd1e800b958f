//! From a YIG sphere and a drive field to the effective magnomechanical
//! coupling, and back.

use std::f64::consts::TAU;

use magnomech::steadystate::{
    drive_for_coupling, effective_coupling, field_for_rabi, magnon_amplitude, FixedPointOptions,
    MagnonDrive,
};
use magnomech::{PhysicalConstants, SphereSpec};

fn main() -> magnomech::Result<()> {
    let consts = PhysicalConstants::default();
    let sphere = SphereSpec::yig(250e-6)?;
    let (g_mb, omega_b) = (TAU * 0.2, TAU * 10e6);
    println!("250 μm sphere: N = {:.3e} spins", sphere.spin_count());

    for target in [3.2e6, 4.8e6] {
        let rabi = drive_for_coupling(TAU * target, g_mb, omega_b)?;
        let b0 = field_for_rabi(rabi, &sphere, &consts)?;
        let back = effective_coupling(g_mb, rabi, omega_b)? / TAU;
        println!("G_mb/2π = {target:.2e} Hz  ->  Ω = {rabi:.3e} rad/s, B0 = {b0:.3e} T  ->  {back:.4e} Hz");
    }

    // self-consistent mean field, including the magnomechanical frequency pull
    let drive = MagnonDrive {
        delta_c: -omega_b,
        delta_m_bare: 1.1 * omega_b,
        kappa_c: TAU * 1e6,
        kappa_m: TAU * 1e6,
        g_mc: TAU * 3.2e6,
        g_mb,
        omega_b,
        opa_gain: 0.0,
        opa_phase: 0.0,
        rabi: drive_for_coupling(TAU * 3.2e6, g_mb, omega_b)?,
    };
    let s = magnon_amplitude(&drive, &FixedPointOptions::default())?;
    println!(
        "|<m>|^2 = {:.4e} after {} iterations, Δ̃m/ωb = {:.4}, G_mb/2π = {:.4e} Hz, low-excitation violated: {}",
        s.population(),
        s.iterations,
        s.delta_m_eff / omega_b,
        s.effective_coupling(g_mb) / TAU,
        s.exceeds_low_excitation(&sphere)
    );
    println!("admissible populations: {:?}", s.populations);
    Ok(())
}
