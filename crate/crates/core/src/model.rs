//! Physical constants, parameter records and thermal occupations.
//!
//! Every frequency and rate is stored in angular units (rad/s). The JSON
//! config speaks in ordinary frequencies `f = ω/2π` (Hz); [`ParamsConfig`]
//! is the bridge between the two.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018).
pub const K_B: f64 = 1.380_649e-23;
/// Gyromagnetic ratio γ/2π of the YIG spins, Hz/T.
pub const GYRO_OVER_2PI: f64 = 28e9;

/// Minimum mechanical quality factor ω_b/γ_b accepted by [`validate`].
pub const MIN_QUALITY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    k_b: f64,
    gamma_gyro: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
            gamma_gyro: TAU * GYRO_OVER_2PI,
        }
    }
}

impl PhysicalConstants {
    /// CODATA constants with a custom gyromagnetic ratio (rad/(s·T)).
    pub fn with_gyromagnetic_ratio(gamma_gyro: f64) -> Result<Self> {
        if !(gamma_gyro > 0.0 && gamma_gyro.is_finite()) {
            return Err(Error::Domain(format!(
                "gyromagnetic ratio must be > 0, got {gamma_gyro}"
            )));
        }
        Ok(Self {
            gamma_gyro,
            ..Self::default()
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn gamma_gyro(&self) -> f64 {
        self.gamma_gyro
    }
}

/// Geometry and spin content of the ferrimagnetic sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereSpec {
    /// m
    pub diameter: f64,
    /// spins per m³
    pub spin_density: f64,
    /// ground-state spin of a single ion
    pub spin: f64,
}

impl SphereSpec {
    /// YIG spin density, m⁻³.
    pub const YIG_SPIN_DENSITY: f64 = 4.22e27;
    /// Ground-state spin of Fe³⁺.
    pub const YIG_SPIN: f64 = 2.5;

    pub fn new(diameter: f64, spin_density: f64, spin: f64) -> Result<Self> {
        for (name, v) in [
            ("diameter", diameter),
            ("spin_density", spin_density),
            ("spin", spin),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self {
            diameter,
            spin_density,
            spin,
        })
    }

    /// A YIG sphere of the given diameter (m).
    pub fn yig(diameter: f64) -> Result<Self> {
        Self::new(diameter, Self::YIG_SPIN_DENSITY, Self::YIG_SPIN)
    }

    pub fn volume(&self) -> f64 {
        PI / 6.0 * self.diameter.powi(3)
    }

    /// Total number of spins N = ρV.
    pub fn spin_count(&self) -> f64 {
        self.spin_density * self.volume()
    }
}

/// Working point of the linearized model. All rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mechanical frequency ω_b.
    pub omega_b: f64,
    /// Cavity–drive detuning Δ_c.
    pub delta_c: f64,
    /// Effective magnon–drive detuning Δ̃_m (includes the magnomechanical shift).
    pub delta_m_eff: f64,
    pub kappa_c: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    /// Magnon–cavity coupling g_mc.
    pub g_mc: f64,
    /// Effective magnomechanical coupling G_mb (real magnitude).
    pub g_mb_eff: f64,
    /// Parametric gain G, s⁻¹ (not scaled by 2π).
    pub opa_gain: f64,
    /// Phase θ of the parametric pump, rad.
    pub opa_phase: f64,
    /// K
    pub temperature: f64,
    /// Bare cavity frequency, only used for the thermal occupation.
    pub omega_c: f64,
    /// Bare magnon frequency, only used for the thermal occupation.
    pub omega_m: f64,
}

impl SystemParams {
    /// Reference working point: ω_c/2π = ω_m/2π = 10 GHz, ω_b/2π = 10 MHz,
    /// γ_b/2π = 100 Hz, κ_c/2π = κ_m/2π = 1 MHz, g_mc/2π = G_mb/2π = 3.2 MHz,
    /// T = 10 mK, no parametric gain, and detunings Δ_c = −0.9ω_b,
    /// Δ̃_m = 0.9ω_b.
    pub fn baseline() -> Self {
        let omega_b = TAU * 10e6;
        Self {
            omega_b,
            delta_c: -0.9 * omega_b,
            delta_m_eff: 0.9 * omega_b,
            kappa_c: TAU * 1e6,
            kappa_m: TAU * 1e6,
            gamma_b: TAU * 1e2,
            g_mc: TAU * 3.2e6,
            g_mb_eff: TAU * 3.2e6,
            opa_gain: 0.0,
            opa_phase: 0.0,
            temperature: 0.01,
            omega_c: TAU * 10e9,
            omega_m: TAU * 10e9,
        }
    }

    pub fn quality_factor(&self) -> f64 {
        self.omega_b / self.gamma_b
    }

    pub fn to_config(&self) -> ParamsConfig {
        ParamsConfig {
            f_c: self.omega_c / TAU,
            f_m: self.omega_m / TAU,
            f_b: self.omega_b / TAU,
            kappa_c: self.kappa_c / TAU,
            kappa_m: self.kappa_m / TAU,
            gamma_b: self.gamma_b / TAU,
            g_mc: self.g_mc / TAU,
            g_mb: self.g_mb_eff / TAU,
            delta_c: self.delta_c / TAU,
            delta_m_eff: self.delta_m_eff / TAU,
            gain: self.opa_gain,
            theta: self.opa_phase,
            temperature: self.temperature,
        }
    }
}

/// Checks every invariant of `params` and reports all violations at once.
pub fn validate(params: SystemParams) -> Result<SystemParams> {
    let mut bad = Vec::new();
    let p = &params;
    let positive = [
        ("omega_b", p.omega_b),
        ("kappa_c", p.kappa_c),
        ("kappa_m", p.kappa_m),
        ("gamma_b", p.gamma_b),
        ("omega_c", p.omega_c),
        ("omega_m", p.omega_m),
    ];
    for (name, v) in positive {
        if !(v > 0.0) {
            bad.push(Violation(format!("{name} must be > 0")));
        }
    }
    let non_negative = [
        ("temperature", p.temperature),
        ("opa_gain", p.opa_gain),
        ("g_mb_eff", p.g_mb_eff),
    ];
    for (name, v) in non_negative {
        if !(v >= 0.0) {
            bad.push(Violation(format!("{name} must be >= 0")));
        }
    }
    let all = [
        ("omega_b", p.omega_b),
        ("delta_c", p.delta_c),
        ("delta_m_eff", p.delta_m_eff),
        ("kappa_c", p.kappa_c),
        ("kappa_m", p.kappa_m),
        ("gamma_b", p.gamma_b),
        ("g_mc", p.g_mc),
        ("g_mb_eff", p.g_mb_eff),
        ("opa_gain", p.opa_gain),
        ("opa_phase", p.opa_phase),
        ("temperature", p.temperature),
        ("omega_c", p.omega_c),
        ("omega_m", p.omega_m),
    ];
    for (name, v) in all {
        if !v.is_finite() {
            bad.push(Violation(format!("{name} must be finite")));
        }
    }
    if p.omega_b > 0.0 && p.gamma_b > 0.0 && p.quality_factor() < MIN_QUALITY_FACTOR {
        bad.push(Violation(format!(
            "quality factor below threshold (omega_b/gamma_b = {:.3e} < {MIN_QUALITY_FACTOR:e})",
            p.quality_factor()
        )));
    }
    if bad.is_empty() {
        Ok(params)
    } else {
        Err(Error::InvalidParams(bad))
    }
}

/// Soft warnings for working points outside the regime in which the drift
/// matrix was derived (|Δ̃_m|, |Δ_c| ≫ κ_c, κ_m, G).
pub fn regime_warnings(p: &SystemParams) -> Vec<String> {
    let scale = p.kappa_c.max(p.kappa_m).max(p.opa_gain);
    let mut out = Vec::new();
    for (name, d) in [("delta_c", p.delta_c), ("delta_m_eff", p.delta_m_eff)] {
        if d.abs() < 5.0 * scale {
            out.push(format!(
                "|{name}| = {:.3e} rad/s is not large compared with max(kappa_c, kappa_m, G) = {scale:.3e}",
                d.abs()
            ));
        }
    }
    out
}

/// Mean thermal quanta [exp(ħω/k_BT) − 1]⁻¹ of a mode at frequency `omega`.
pub fn thermal_occupation(omega: f64, temperature: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = c.hbar() * omega / (c.k_b() * temperature);
    Ok(1.0 / x.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalOccupations {
    pub cavity: f64,
    pub magnon: f64,
    pub mechanics: f64,
}

impl ThermalOccupations {
    pub fn for_params(p: &SystemParams, c: &PhysicalConstants) -> Result<Self> {
        Ok(Self {
            cavity: thermal_occupation(p.omega_c, p.temperature, c)?,
            magnon: thermal_occupation(p.omega_m, p.temperature, c)?,
            mechanics: thermal_occupation(p.omega_b, p.temperature, c)?,
        })
    }
}

/// On-disk parameter record. Frequencies are `ω/2π` in Hz except `G`
/// (s⁻¹), `theta` (rad) and `T` (K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub f_c: f64,
    pub f_m: f64,
    pub f_b: f64,
    pub kappa_c: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    pub g_mc: f64,
    #[serde(rename = "G_mb")]
    pub g_mb: f64,
    pub delta_c: f64,
    pub delta_m_eff: f64,
    #[serde(rename = "G")]
    pub gain: f64,
    pub theta: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
}

impl ParamsConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Converts to angular units. Does not validate.
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            omega_b: TAU * self.f_b,
            delta_c: TAU * self.delta_c,
            delta_m_eff: TAU * self.delta_m_eff,
            kappa_c: TAU * self.kappa_c,
            kappa_m: TAU * self.kappa_m,
            gamma_b: TAU * self.gamma_b,
            g_mc: TAU * self.g_mc,
            g_mb_eff: TAU * self.g_mb,
            opa_gain: self.gain,
            opa_phase: self.theta,
            temperature: self.temperature,
            omega_c: TAU * self.f_c,
            omega_m: TAU * self.f_m,
        }
    }
}

/// Parses a JSON config and converts it to a validated parameter set.
pub fn from_config(text: &str) -> Result<SystemParams> {
    validate(ParamsConfig::from_json(text)?.to_params())
}
