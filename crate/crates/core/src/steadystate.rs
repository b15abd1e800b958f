//! Drive strength, mean-field magnon amplitude and effective coupling.
//!
//! These bridge physical drive settings (field amplitude, sphere size,
//! single-magnon coupling) to the effective quantities Δ̃_m and G_mb used by
//! the linearized dynamics. The sweep pipeline takes Δ̃_m and G_mb directly.

use nalgebra::{Complex, Matrix3};

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, SphereSpec};

type C64 = Complex<f64>;

fn rabi_prefactor(sphere: &SphereSpec, c: &PhysicalConstants) -> f64 {
    5f64.sqrt() / 4.0 * c.gamma_gyro() * sphere.spin_count().sqrt()
}

/// Rabi frequency Ω = (√5/4)·γ·√N·B₀ (rad/s) of a uniform drive field `b0` (T).
pub fn rabi_frequency(b0: f64, sphere: &SphereSpec, c: &PhysicalConstants) -> Result<f64> {
    if !(b0 >= 0.0) {
        return Err(Error::Domain(format!("B0 must be >= 0, got {b0}")));
    }
    Ok(rabi_prefactor(sphere, c) * b0)
}

/// Field amplitude B₀ (T) producing the Rabi frequency `rabi`.
pub fn field_for_rabi(rabi: f64, sphere: &SphereSpec, c: &PhysicalConstants) -> Result<f64> {
    if !(rabi >= 0.0) {
        return Err(Error::Domain(format!("Omega must be >= 0, got {rabi}")));
    }
    Ok(rabi / rabi_prefactor(sphere, c))
}

/// G_mb = √2·g_mb·Ω/ω_b, valid when |Δ̃_m|, |Δ_c| ≈ ω_b and g_mc² ≪ ω_b².
pub fn effective_coupling(g_mb: f64, rabi: f64, omega_b: f64) -> Result<f64> {
    if omega_b == 0.0 {
        return Err(Error::Domain("omega_b must be nonzero".into()));
    }
    Ok(2f64.sqrt() * g_mb * rabi / omega_b)
}

/// Inverse of [`effective_coupling`]: the Rabi frequency giving `g_mb_eff`.
pub fn drive_for_coupling(g_mb_eff: f64, g_mb: f64, omega_b: f64) -> Result<f64> {
    if g_mb == 0.0 {
        return Err(Error::Domain("g_mb must be nonzero".into()));
    }
    Ok(g_mb_eff * omega_b / (2f64.sqrt() * g_mb))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// T
    pub b0: f64,
    /// rad/s
    pub rabi: f64,
    /// rad/s, bookkeeping only
    pub omega_0: f64,
}

impl DriveSpec {
    pub fn from_field(
        b0: f64,
        omega_0: f64,
        sphere: &SphereSpec,
        c: &PhysicalConstants,
    ) -> Result<Self> {
        Ok(Self {
            b0,
            rabi: rabi_frequency(b0, sphere, c)?,
            omega_0,
        })
    }
}

/// Inputs to the mean-field magnon amplitude. Rates in rad/s, `opa_gain` in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnonDrive {
    pub delta_c: f64,
    /// Bare magnon detuning Δ_m (without the magnomechanical shift).
    pub delta_m_bare: f64,
    pub kappa_c: f64,
    pub kappa_m: f64,
    pub g_mc: f64,
    /// Single-magnon magnomechanical coupling g_mb.
    pub g_mb: f64,
    pub omega_b: f64,
    pub opa_gain: f64,
    pub opa_phase: f64,
    pub rabi: f64,
}

impl MagnonDrive {
    /// (iΔ_c + κ_c) − 2G·e^{iθ}
    fn cavity_factor(&self) -> C64 {
        C64::new(self.kappa_c, self.delta_c) - C64::from_polar(2.0 * self.opa_gain, self.opa_phase)
    }

    /// Frequency pull per unit magnon population, g_mb²/ω_b.
    fn pull(&self) -> f64 {
        self.g_mb * self.g_mb / self.omega_b
    }

    fn delta_m_eff(&self, population: f64) -> f64 {
        self.delta_m_bare - self.pull() * population
    }

    /// Right-hand side of the self-consistency equation for ⟨m⟩ at the
    /// effective detuning `delta_m_eff`.
    pub fn amplitude_at(&self, delta_m_eff: f64) -> Result<C64> {
        let k = self.cavity_factor();
        let den = C64::from(self.g_mc * self.g_mc) + C64::new(self.kappa_m, delta_m_eff) * k;
        let scale = self.g_mc * self.g_mc + (self.kappa_m.abs() + delta_m_eff.abs()) * k.norm();
        if den.norm() <= 1e-14 * scale || den.norm() == 0.0 {
            return Err(Error::Singular(format!(
                "denominator vanishes at delta_m_eff = {delta_m_eff:e}"
            )));
        }
        Ok(k * self.rabi / den)
    }

    /// All magnon populations |⟨m⟩|² ≥ 0 solving the self-consistency
    /// equation, ascending. Empty when the nonlinearity is switched off.
    pub fn admissible_populations(&self) -> Result<Vec<f64>> {
        let beta = self.pull();
        if beta == 0.0 || self.rabi == 0.0 {
            return Ok(Vec::new());
        }
        let s = self.omega_b.abs();
        let k = self.cavity_factor() / s;
        let (a, b) = (k.re, k.im);
        let g2 = (self.g_mc / s).powi(2);
        let km = self.kappa_m / s;
        let d = self.delta_m_bare / s;
        // |g² + (ix + κ_m)K|² = c2 x² + c1 x + c0 in the scaled detuning x
        let c2 = a * a + b * b;
        if c2 == 0.0 {
            return Ok(Vec::new());
        }
        let c1 = -2.0 * b * g2;
        let c0 = (g2 + km * a).powi(2) + (km * b).powi(2);
        let rhs = beta * self.rabi * self.rabi * c2 / s.powi(3);
        // (d − x)(c2 x² + c1 x + c0) − rhs = 0, made monic
        let p2 = -(d * c2 - c1) / c2;
        let p1 = -(d * c1 - c0) / c2;
        let p0 = -(d * c0 - rhs) / c2;
        let companion = Matrix3::new(0.0, 0.0, -p0, 1.0, 0.0, -p1, 0.0, 1.0, -p2);
        let roots = companion.complex_eigenvalues();
        let poly = |x: f64| ((x + p2) * x + p1) * x + p0;
        let dpoly = |x: f64| (3.0 * x + 2.0 * p2) * x + p1;
        let mut out = Vec::new();
        for r in roots.iter() {
            if r.im.abs() > 1e-7 * (1.0 + r.re.abs()) {
                continue;
            }
            let mut x = r.re;
            for _ in 0..8 {
                let dp = dpoly(x);
                if dp == 0.0 {
                    break;
                }
                x -= poly(x) / dp;
            }
            let u = (d - x) * s / beta;
            if u >= 0.0 {
                out.push(u);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            relaxation: 0.5,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// ⟨m⟩
    pub m_avg: C64,
    /// ⟨q⟩ = −(g_mb/ω_b)|⟨m⟩|²
    pub q_avg: f64,
    /// Δ̃_m = Δ_m + g_mb⟨q⟩
    pub delta_m_eff: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual |F(⟨m⟩) − ⟨m⟩|/|⟨m⟩| of the returned amplitude.
    pub residual: f64,
    /// Every admissible |⟨m⟩|² root; more than one signals bistability.
    pub populations: Vec<f64>,
}

impl SteadyState {
    pub fn population(&self) -> f64 {
        self.m_avg.norm_sqr()
    }

    /// G_mb = √2·g_mb·|⟨m⟩|.
    pub fn effective_coupling(&self, g_mb: f64) -> f64 {
        2f64.sqrt() * g_mb * self.m_avg.norm()
    }

    /// True when the magnon population leaves the low-excitation regime
    /// |⟨m⟩|² ≪ 2Ns (flagged above a tenth of 2Ns).
    pub fn exceeds_low_excitation(&self, sphere: &SphereSpec) -> bool {
        self.population() > 2.0 * sphere.spin_count() * sphere.spin / 10.0
    }
}

/// Solves the nonlinear mean-field equation for ⟨m⟩ by damped fixed-point
/// iteration started from ⟨m⟩ = 0, i.e. the branch reached by ramping the
/// drive up adiabatically.
pub fn magnon_amplitude(drive: &MagnonDrive, opts: &FixedPointOptions) -> Result<SteadyState> {
    if !(drive.omega_b > 0.0) {
        return Err(Error::Domain("omega_b must be > 0".into()));
    }
    let pull = drive.pull();
    let finish = |m: C64, iterations: usize, residual: f64| -> Result<SteadyState> {
        let population = m.norm_sqr();
        Ok(SteadyState {
            m_avg: m,
            q_avg: -(drive.g_mb / drive.omega_b) * population,
            delta_m_eff: drive.delta_m_eff(population),
            iterations,
            converged: true,
            residual,
            populations: drive.admissible_populations()?,
        })
    };

    if drive.rabi == 0.0 {
        return finish(C64::new(0.0, 0.0), 0, 0.0);
    }
    if pull == 0.0 {
        return finish(drive.amplitude_at(drive.delta_m_bare)?, 1, 0.0);
    }

    let lambda = opts.relaxation;
    let mut m = C64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;
    for it in 0..opts.max_iterations {
        let f = drive.amplitude_at(drive.delta_m_eff(m.norm_sqr()))?;
        residual = if m.norm() > 0.0 {
            (f - m).norm() / m.norm()
        } else {
            f64::INFINITY
        };
        if residual <= opts.tolerance {
            return finish(m, it, residual);
        }
        m = m * (1.0 - lambda) + f * lambda;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
        last: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn reference_drive() -> MagnonDrive {
        let omega_b = TAU * 10e6;
        MagnonDrive {
            delta_c: -omega_b,
            delta_m_bare: 1.1 * omega_b,
            kappa_c: TAU * 1e6,
            kappa_m: TAU * 1e6,
            g_mc: TAU * 3.2e6,
            g_mb: TAU * 0.2,
            omega_b,
            opa_gain: 0.0,
            opa_phase: 0.0,
            rabi: 7.1e14,
        }
    }

    #[test]
    fn rabi_from_field() {
        let s = SphereSpec::yig(250e-6).unwrap();
        let c = PhysicalConstants::default();
        let w = rabi_frequency(3.9e-5, &s, &c).unwrap();
        assert!(rel(w, 7.1e14) < 0.01, "{w:e}");
        assert_eq!(rabi_frequency(0.0, &s, &c).unwrap(), 0.0);
        assert!(rel(rabi_frequency(7.8e-5, &s, &c).unwrap(), 2.0 * w) < 1e-15);
        assert!(rel(field_for_rabi(w, &s, &c).unwrap(), 3.9e-5) < 1e-12);
        assert!(rabi_frequency(-1.0, &s, &c).is_err());
    }

    #[test]
    fn coupling_from_drive() {
        let (g, wb) = (TAU * 0.2, TAU * 10e6);
        let gmb = effective_coupling(g, 7.1e14, wb).unwrap();
        assert!((gmb / TAU / 1e6 - 3.2).abs() < 0.01 * 3.2, "{}", gmb / TAU);
        assert_eq!(effective_coupling(g, 0.0, wb).unwrap(), 0.0);
        assert!(effective_coupling(g, 1.0, 0.0).is_err());

        let w = drive_for_coupling(TAU * 3.2e6, g, wb).unwrap();
        assert!(rel(w, 7.1e14) < 0.01, "{w:e}");
        assert!(rel(effective_coupling(g, w, wb).unwrap(), TAU * 3.2e6) < 1e-12);
        assert_eq!(drive_for_coupling(0.0, g, wb).unwrap(), 0.0);
        assert!(drive_for_coupling(1.0, 0.0, wb).is_err());
        // G_mb·ω_b/(√2 g_mb) = 2π·4.8e6·1e7/(√2·0.2)
        let w48 = drive_for_coupling(TAU * 4.8e6, g, wb).unwrap();
        assert!(rel(w48, TAU * 4.8e6 * 1e7 / (2f64.sqrt() * 0.2)) < 1e-12);
        assert!((w48 / 1e15 - 1.07).abs() < 0.005);
    }

    #[test]
    fn linear_limit_is_one_evaluation() {
        let d = MagnonDrive {
            g_mb: 0.0,
            ..reference_drive()
        };
        let s = magnon_amplitude(&d, &Default::default()).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.delta_m_eff, d.delta_m_bare);
        let k = C64::new(d.kappa_c, d.delta_c);
        let want = k * d.rabi / (d.g_mc * d.g_mc + C64::new(d.kappa_m, d.delta_m_bare) * k);
        assert!((s.m_avg - want).norm() <= 1e-14 * want.norm());

        // linear in the drive
        let d2 = MagnonDrive {
            rabi: 3.0 * d.rabi,
            ..d
        };
        let s2 = magnon_amplitude(&d2, &Default::default()).unwrap();
        assert!((s2.m_avg - s.m_avg * 3.0).norm() <= 1e-13 * s2.m_avg.norm());
    }

    #[test]
    fn zero_gain_matches_opa_free_expression() {
        let d = MagnonDrive {
            g_mb: 0.0,
            opa_phase: 1.3,
            ..reference_drive()
        };
        let s = magnon_amplitude(&d, &Default::default()).unwrap();
        let k = C64::new(d.kappa_c, d.delta_c);
        let want = k * d.rabi / (d.g_mc * d.g_mc + C64::new(d.kappa_m, d.delta_m_bare) * k);
        assert!((s.m_avg - want).norm() <= 1e-14 * want.norm());
    }

    #[test]
    fn nonlinear_fixed_point_is_self_consistent() {
        for (gain, phase) in [(0.0, 0.0), (3.31e6, PI), (3.31e6, PI / 2.0)] {
            let d = MagnonDrive {
                opa_gain: gain,
                opa_phase: phase,
                ..reference_drive()
            };
            let s = magnon_amplitude(&d, &Default::default()).unwrap();
            assert!(s.converged && s.iterations > 1);
            let back = d.amplitude_at(s.delta_m_eff).unwrap();
            assert!((back - s.m_avg).norm() <= 1e-10 * s.m_avg.norm());
            let q = -(d.g_mb / d.omega_b) * s.m_avg.norm_sqr();
            assert!(rel(s.q_avg, q) < 1e-10);
            assert!(rel(s.delta_m_eff, d.delta_m_bare + d.g_mb * s.q_avg) < 1e-12);
            // the solved population is one of the admissible roots
            assert!(
                s.populations
                    .iter()
                    .any(|u| rel(*u, s.population()) < 1e-6),
                "{:?} vs {}",
                s.populations,
                s.population()
            );
        }
    }

    #[test]
    fn zero_drive_is_zero() {
        let d = MagnonDrive {
            rabi: 0.0,
            ..reference_drive()
        };
        let s = magnon_amplitude(&d, &Default::default()).unwrap();
        assert_eq!(s.m_avg, C64::new(0.0, 0.0));
        assert_eq!(s.delta_m_eff, d.delta_m_bare);
    }

    #[test]
    fn singular_denominator() {
        // g_mc = 0, κ_m = 0 and Δ̃_m = 0 kill the denominator
        let d = MagnonDrive {
            g_mc: 0.0,
            kappa_m: 0.0,
            delta_m_bare: 0.0,
            g_mb: 0.0,
            ..reference_drive()
        };
        assert!(matches!(
            magnon_amplitude(&d, &Default::default()),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let opts = FixedPointOptions {
            max_iterations: 3,
            ..Default::default()
        };
        match magnon_amplitude(&reference_drive(), &opts) {
            Err(Error::NoConvergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn low_excitation_flag() {
        let sphere = SphereSpec::yig(250e-6).unwrap();
        let s = magnon_amplitude(&reference_drive(), &Default::default()).unwrap();
        assert!(!s.exceeds_low_excitation(&sphere));
        let tiny = SphereSpec::yig(1e-9).unwrap();
        assert!(s.exceeds_low_excitation(&tiny));
    }
}
