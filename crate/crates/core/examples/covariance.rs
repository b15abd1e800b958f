//! One working point in full: drift, diffusion, covariance and the Gaussian
//! measures derived from it.

use magnomech::gaussian::{
    log_negativity, physicality_check, residual_contangles, symplectic_eigenvalues, Mode,
    ModePartition,
};
use magnomech::sweep::{evaluate_point_full, EvalOptions};
use magnomech::SystemParams;
use nalgebra::Matrix6;

fn show(name: &str, m: &Matrix6<f64>) {
    println!("{name} =");
    for i in 0..6 {
        let row: Vec<String> = (0..6).map(|j| format!("{:>11.3e}", m[(i, j)])).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> magnomech::Result<()> {
    let p = SystemParams {
        delta_c: -0.84 * SystemParams::baseline().omega_b,
        delta_m_eff: 0.88 * SystemParams::baseline().omega_b,
        ..SystemParams::baseline()
    };
    let ev = evaluate_point_full(&p, &EvalOptions::tripartite())?;
    show("A", &ev.drift.0);
    show("D", &ev.diffusion.0);
    let Some(cov) = ev.covariance else {
        println!("unstable, max Re λ = {:e}", ev.report.margin);
        return Ok(());
    };
    show("C", &cov.0);

    let c = cov.to_dmatrix();
    println!("symplectic eigenvalues: {:?}", symplectic_eigenvalues(&c)?);
    println!("min eig(C + iΣ/2) = {:.3e}", physicality_check(&c)?.min_eigenvalue);
    for (a, b) in [(Mode::Cavity, Mode::Magnon), (Mode::Cavity, Mode::Mechanics), (Mode::Magnon, Mode::Mechanics)] {
        let e = log_negativity(&c, &ModePartition::of(&[a], &[b]))?;
        println!("E_N({a}|{b}) = {:.4}  (η̃ = {:.4})", e.value, e.eta_tilde);
    }
    let r = residual_contangles(&cov)?;
    println!("R_τ^(c|mb), R_τ^(m|cb), R_τ^(b|cm) = {:.4e}, {:.4e}, {:.4e}", r[0], r[1], r[2]);
    println!("Lyapunov residual = {:.2e}", ev.report.lyapunov_residual.unwrap());
    Ok(())
}
