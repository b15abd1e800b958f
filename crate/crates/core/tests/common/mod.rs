#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use magnomech::SystemParams;
use nalgebra::{DMatrix, Matrix6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random drift with max Re λ = −`margin` and a random PSD diffusion.
pub fn random_stable_system(r: &mut ChaCha8Rng, margin: f64) -> (Matrix6<f64>, Matrix6<f64>) {
    let m = Matrix6::from_fn(|_, _| r.random_range(-1.0..1.0));
    let top = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let a = m - Matrix6::identity() * (top + margin);
    let b = Matrix6::from_fn(|_, _| r.random_range(-1.0..1.0));
    (a, b * b.transpose())
}

fn integrand(a: &Matrix6<f64>, d: &Matrix6<f64>, t: f64) -> Matrix6<f64> {
    let e = (a * t).exp();
    e * d * e.transpose()
}

fn simpson(
    a: &Matrix6<f64>,
    d: &Matrix6<f64>,
    (t0, t1): (f64, f64),
    (f0, fm, f1): (Matrix6<f64>, Matrix6<f64>, Matrix6<f64>),
    whole: Matrix6<f64>,
    tol: f64,
    depth: u32,
) -> Matrix6<f64> {
    let m = 0.5 * (t0 + t1);
    let (lm, rm) = (0.5 * (t0 + m), 0.5 * (m + t1));
    let (flm, frm) = (integrand(a, d, lm), integrand(a, d, rm));
    let h = (t1 - t0) / 12.0;
    let left = (f0 + flm * 4.0 + fm) * h;
    let right = (fm + frm * 4.0 + f1) * h;
    let diff = left + right - whole;
    if depth == 0 || diff.norm() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson(a, d, (t0, m), (f0, flm, fm), left, 0.5 * tol, depth - 1)
        + simpson(a, d, (m, t1), (fm, frm, f1), right, 0.5 * tol, depth - 1)
}

/// ∫₀^∞ e^{At} D e^{Aᵀt} dt by adaptive Simpson on unit panels, stopped once
/// a panel contributes less than 10⁻¹⁴ of the running total.
pub fn lyapunov_by_quadrature(a: &Matrix6<f64>, d: &Matrix6<f64>) -> Matrix6<f64> {
    let scale = d.norm();
    let mut total = Matrix6::zeros();
    let mut t = 0.0;
    let width = 1.0;
    loop {
        let (f0, fm, f1) = (
            integrand(a, d, t),
            integrand(a, d, t + 0.5 * width),
            integrand(a, d, t + width),
        );
        let whole = (f0 + fm * 4.0 + f1) * (width / 6.0);
        let panel = simpson(a, d, (t, t + width), (f0, fm, f1), whole, 1e-13 * scale, 40);
        total += panel;
        t += width;
        if t > 10.0 && panel.norm() < 1e-14 * total.norm() {
            return total;
        }
    }
}

/// Two-mode squeezed vacuum with squeezing r.
pub fn tmsv(r: f64) -> DMatrix<f64> {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    )
}

pub fn at_detunings(base: &SystemParams, dc: f64, dm: f64) -> SystemParams {
    SystemParams {
        delta_c: dc * base.omega_b,
        delta_m_eff: dm * base.omega_b,
        ..*base
    }
}

/// A point drawn uniformly from the sampling envelope: Δ_c/ω_b ∈ [−2, 0],
/// Δ̃_m/ω_b ∈ [0, 2], G_mb/g_mc ∈ [0, 1.5], G ∈ [0, 3.61×10⁶] s⁻¹,
/// θ ∈ [0, 2π), T ∈ [0, 0.3] K.
pub fn envelope_point(r: &mut ChaCha8Rng) -> SystemParams {
    let base = SystemParams::baseline();
    SystemParams {
        delta_c: r.random_range(-2.0..=0.0) * base.omega_b,
        delta_m_eff: r.random_range(0.0..=2.0) * base.omega_b,
        g_mb_eff: r.random_range(0.0..=1.5) * base.g_mc,
        opa_gain: r.random_range(0.0..=3.61e6),
        opa_phase: r.random_range(0.0..TAU),
        temperature: r.random_range(0.0..=0.3),
        ..base
    }
}

/// Random rates around the baseline, each scaled by a factor in [0.1, 10].
pub fn scattered_params(r: &mut ChaCha8Rng) -> SystemParams {
    let base = SystemParams::baseline();
    let mut f = || 10f64.powf(r.random_range(-1.0..1.0));
    let p = SystemParams {
        kappa_c: base.kappa_c * f(),
        kappa_m: base.kappa_m * f(),
        gamma_b: base.gamma_b * f(),
        g_mc: base.g_mc * f(),
        g_mb_eff: base.g_mb_eff * f(),
        opa_gain: 1e6 * f(),
        ..base
    };
    SystemParams {
        delta_c: r.random_range(-2.0..2.0) * p.omega_b,
        delta_m_eff: r.random_range(-2.0..2.0) * p.omega_b,
        opa_phase: r.random_range(-PI..PI),
        temperature: r.random_range(0.0..0.5),
        ..p
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
