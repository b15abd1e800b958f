//! Linearized quadrature dynamics: drift and diffusion matrices, stability.
//!
//! Quadrature ordering is (δx₁, δy₁, δx₂, δy₂, δq, δp) for the cavity (1),
//! the magnon (2) and the mechanical mode.

use std::f64::consts::TAU;

use nalgebra::{linalg::Schur, Complex, Matrix6};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemParams, ThermalOccupations};

/// Relative margin (in units of ω_b) below which a stable point is marginal.
pub const MARGINAL_FRACTION: f64 = 1e-6;

/// Absolute bisection tolerance on the parametric gain, s⁻¹.
pub const GAIN_TOLERANCE: f64 = 1e3;

/// Number of pump phases probed when the phase is left free.
pub const PHASE_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix6<f64>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Matrix6<f64>);

impl DriftMatrix {
    pub fn as_matrix(&self) -> &Matrix6<f64> {
        &self.0
    }
}

impl DiffusionMatrix {
    pub fn as_matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn diagonal(&self) -> [f64; 6] {
        std::array::from_fn(|i| self.0[(i, i)])
    }
}

pub fn drift_matrix(p: &SystemParams) -> DriftMatrix {
    let g2 = 2.0 * p.opa_gain;
    let (s, c) = p.opa_phase.sin_cos();
    let (kc, dc, km, dm) = (p.kappa_c, p.delta_c, p.kappa_m, p.delta_m_eff);
    let (gmc, gmb, wb) = (p.g_mc, p.g_mb_eff, p.omega_b);
    #[rustfmt::skip]
    let a = Matrix6::new(
        -kc + g2 * c,  dc + g2 * s,   0.0,   gmc,  0.0,  0.0,
        -dc + g2 * s, -kc - g2 * c,  -gmc,   0.0,  0.0,  0.0,
         0.0,          gmc,          -km,    dm,  -gmb,  0.0,
        -gmc,          0.0,          -dm,   -km,   0.0,  0.0,
         0.0,          0.0,           0.0,   0.0,  0.0,  wb,
         0.0,          0.0,           0.0,   gmb, -wb,  -p.gamma_b,
    );
    DriftMatrix(a)
}

pub fn diffusion_matrix(p: &SystemParams, occ: &ThermalOccupations) -> DiffusionMatrix {
    let dc = p.kappa_c * (2.0 * occ.cavity + 1.0);
    let dm = p.kappa_m * (2.0 * occ.magnon + 1.0);
    let db = p.gamma_b * (2.0 * occ.mechanics + 1.0);
    DiffusionMatrix(Matrix6::from_diagonal(&[dc, dc, dm, dm, 0.0, db].into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// Largest real part of the drift eigenvalues, s⁻¹.
    pub margin: f64,
    #[serde(skip)]
    pub eigenvalues: [Complex<f64>; 6],
}

impl StabilityReport {
    /// Stable but so close to the boundary that the covariance is ill-conditioned.
    pub fn is_marginal(&self, omega_b: f64) -> bool {
        self.margin.abs() < MARGINAL_FRACTION * omega_b
    }
}

/// Eigenvalue test equivalent to the Routh–Hurwitz conditions.
pub fn stability(a: &DriftMatrix) -> Result<StabilityReport> {
    let schur = Schur::try_new(a.0, f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let ev = schur.complex_eigenvalues();
    let eigenvalues: [Complex<f64>; 6] = std::array::from_fn(|i| ev[i]);
    let margin = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !margin.is_finite() {
        return Err(Error::EigenFailure);
    }
    Ok(StabilityReport {
        stable: margin < 0.0,
        margin,
        eigenvalues,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainThreshold {
    /// Largest gain keeping the system stable, s⁻¹.
    pub gain: f64,
    /// Phase at which the threshold was attained.
    pub phase: f64,
}

fn is_stable(p: &SystemParams, gain: f64, phase: f64) -> Result<bool> {
    let q = SystemParams {
        opa_gain: gain,
        opa_phase: phase,
        ..*p
    };
    Ok(stability(&drift_matrix(&q))?.stable)
}

fn threshold_at_phase(p: &SystemParams, phase: f64) -> Result<f64> {
    const LIMIT: f64 = 1e15;
    let mut lo = 0.0;
    let mut hi = p.kappa_c.max(GAIN_TOLERANCE);
    while is_stable(p, hi, phase)? {
        lo = hi;
        hi *= 2.0;
        if hi > LIMIT {
            return Err(Error::NoBoundary { limit: LIMIT });
        }
    }
    while hi - lo > GAIN_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if is_stable(p, mid, phase)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest parametric gain for which the drift matrix stays stable.
///
/// With `phase = None` the worst case over a uniform grid of
/// [`PHASE_GRID`] pump phases is returned.
pub fn max_stable_gain(p: &SystemParams, phase: Option<f64>) -> Result<GainThreshold> {
    let free = SystemParams {
        opa_gain: 0.0,
        ..*p
    };
    let at_zero = stability(&drift_matrix(&free))?;
    if !at_zero.stable {
        return Err(Error::Unstable {
            margin: at_zero.margin,
        });
    }
    match phase {
        Some(th) => Ok(GainThreshold {
            gain: threshold_at_phase(p, th)?,
            phase: th,
        }),
        None => {
            let mut best: Option<GainThreshold> = None;
            for k in 0..PHASE_GRID {
                let th = TAU * k as f64 / PHASE_GRID as f64;
                let g = threshold_at_phase(p, th)?;
                if best.is_none_or(|b| g < b.gain) {
                    best = Some(GainThreshold { gain: g, phase: th });
                }
            }
            Ok(best.expect("phase grid is nonempty"))
        }
    }
}
