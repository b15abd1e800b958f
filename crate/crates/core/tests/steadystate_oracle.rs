mod common;

use std::f64::consts::TAU;

use common::rel;
use magnomech::steadystate::{magnon_amplitude, FixedPointOptions, MagnonDrive};
use nalgebra::Complex;

fn drive(rabi: f64) -> MagnonDrive {
    let omega_b = TAU * 10e6;
    MagnonDrive {
        delta_c: -omega_b,
        delta_m_bare: 1.1 * omega_b,
        kappa_c: TAU * 1e6,
        kappa_m: TAU * 1e6,
        g_mc: TAU * 3.2e6,
        g_mb: TAU * 0.2,
        omega_b,
        opa_gain: 2e6,
        opa_phase: 1.0,
        rabi,
    }
}

/// Roots of u·|g² + (iΔ(u) + κ_m)K|² − Ω²|K|² with Δ(u) = Δ_m − (g_mb²/ω_b)u,
/// bracketed on a uniform grid and bisected.
fn brute_force_populations(d: &MagnonDrive) -> Vec<f64> {
    let k = Complex::new(d.kappa_c, d.delta_c) - Complex::from_polar(2.0 * d.opa_gain, d.opa_phase);
    let beta = d.g_mb * d.g_mb / d.omega_b;
    let h = |u: f64| {
        let den = Complex::from(d.g_mc * d.g_mc)
            + Complex::new(d.kappa_m, d.delta_m_bare - beta * u) * k;
        u * den.norm_sqr() - d.rabi * d.rabi * k.norm_sqr()
    };
    // |den|² is a quadratic in the detuning bounded below by its vertex value
    let (a2, a1, a0) = (
        k.norm_sqr(),
        -2.0 * k.im * d.g_mc * d.g_mc,
        (d.g_mc * d.g_mc + d.kappa_m * k.re).powi(2) + (d.kappa_m * k.im).powi(2),
    );
    let floor = a0 - a1 * a1 / (4.0 * a2);
    let upper = d.rabi * d.rabi * k.norm_sqr() / floor * 1.01;
    let n = 200_000;
    let mut roots = Vec::new();
    let mut prev = (0.0, h(0.0));
    for i in 1..=n {
        let u = upper * i as f64 / n as f64;
        let hu = h(u);
        if prev.1.signum() != hu.signum() {
            let (mut lo, mut hi) = (prev.0, u);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid).signum() == h(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (u, hu);
    }
    roots
}

#[test]
fn admissible_populations_match_brute_force() {
    let mut saw_bistable = false;
    for rabi in [1e14, 7.1e14, 2e15, 4e15, 6e15, 8e15, 1.2e16] {
        let d = drive(rabi);
        let fast = d.admissible_populations().unwrap();
        let slow = brute_force_populations(&d);
        assert_eq!(fast.len(), slow.len(), "Ω = {rabi:e}: {fast:?} vs {slow:?}");
        for (a, b) in fast.iter().zip(&slow) {
            assert!(rel(*a, *b) < 1e-8, "Ω = {rabi:e}: {a:e} vs {b:e}");
        }
        saw_bistable |= slow.len() == 3;

        if let Ok(s) = magnon_amplitude(&d, &FixedPointOptions::default()) {
            let u = s.population();
            assert!(slow.iter().any(|r| rel(u, *r) < 1e-8), "Ω = {rabi:e}: {u:e} not in {slow:?}");
            let back = d.amplitude_at(s.delta_m_eff).unwrap();
            assert!((back - s.m_avg).norm() <= 1e-10 * s.m_avg.norm());
        }
    }
    assert!(saw_bistable, "no drive in the list reached the bistable window");
}

#[test]
fn weak_drive_continues_the_lowest_branch() {
    let d = drive(7.1e14);
    let s = magnon_amplitude(&d, &FixedPointOptions::default()).unwrap();
    let slow = brute_force_populations(&d);
    assert!(rel(s.population(), slow[0]) < 1e-8);
}
