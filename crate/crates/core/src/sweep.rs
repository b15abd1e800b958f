//! Point evaluation and parameter scans.
//!
//! A point runs the whole pipeline: thermal occupations → drift and
//! diffusion → stability → covariance → entanglement measures. Grids,
//! temperature scans and tripartite scans are collections of independent
//! points evaluated in parallel and written into pre-indexed slots, so the
//! output order never depends on the schedule.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{diffusion_matrix, drift_matrix, stability, DiffusionMatrix, DriftMatrix};
use crate::error::{Error, Result};
use crate::gaussian::{log_negativity, residual_contangle_min, Mode, ModePartition};
use crate::lyapunov::{residual, solve_stable, CovarianceMatrix};
use crate::model::{validate, PhysicalConstants, SystemParams, ThermalOccupations};

pub const CSV_HEADER: &str = "x,y,stable,margin,E_cm,E_cb,E_mb,R_tau_min,residual";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointReport {
    pub params_echo: SystemParams,
    pub stable: bool,
    /// Stable, but within 10⁻⁶·ω_b of the stability boundary.
    pub marginal: bool,
    pub margin: f64,
    #[serde(rename = "E_cm")]
    pub e_cm: Option<f64>,
    #[serde(rename = "E_cb")]
    pub e_cb: Option<f64>,
    #[serde(rename = "E_mb")]
    pub e_mb: Option<f64>,
    #[serde(rename = "R_tau_min")]
    pub r_tau_min: Option<f64>,
    pub lyapunov_residual: Option<f64>,
}

impl PointReport {
    pub fn measure(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Ecm => self.e_cm,
            Measure::Ecb => self.e_cb,
            Measure::Emb => self.e_mb,
            Measure::RtauMin => self.r_tau_min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Ecm,
    Ecb,
    Emb,
    RtauMin,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Ecm, Measure::Ecb, Measure::Emb, Measure::RtauMin];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Ecm => "E_cm",
            Measure::Ecb => "E_cb",
            Measure::Emb => "E_mb",
            Measure::RtauMin => "R_tau_min",
        })
    }
}

/// Parses a measure name (`E_cm`, `E_cb`, `E_mb`, `R_tau_min`).
pub fn parse_measure(s: &str) -> Result<Measure> {
    match s {
        "E_cm" | "ecm" => Ok(Measure::Ecm),
        "E_cb" | "ecb" => Ok(Measure::Ecb),
        "E_mb" | "emb" => Ok(Measure::Emb),
        "R_tau_min" | "rtau" => Ok(Measure::RtauMin),
        _ => Err(Error::Config(format!("unknown measure {s:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    /// Also compute the minimal residual contangle.
    pub tripartite: bool,
    pub constants: PhysicalConstants,
}

impl EvalOptions {
    pub fn tripartite() -> Self {
        Self {
            tripartite: true,
            ..Self::default()
        }
    }
}

/// A point report together with the matrices it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub report: PointReport,
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub covariance: Option<CovarianceMatrix>,
}

fn describe(p: &SystemParams) -> String {
    format!(
        "delta_c/omega_b={:.6}, delta_m_eff/omega_b={:.6}, G_mb/2pi={:.6e} Hz, G={:.6e}, theta={:.6}, T={:.6e} K",
        p.delta_c / p.omega_b,
        p.delta_m_eff / p.omega_b,
        p.g_mb_eff / TAU,
        p.opa_gain,
        p.opa_phase,
        p.temperature
    )
}

pub fn evaluate_point(p: &SystemParams, opts: &EvalOptions) -> Result<PointReport> {
    evaluate_point_full(p, opts).map(|e| e.report)
}

pub fn evaluate_point_full(p: &SystemParams, opts: &EvalOptions) -> Result<PointEvaluation> {
    evaluate_inner(p, opts).map_err(|e| Error::AtPoint {
        point: describe(p),
        source: Box::new(e),
    })
}

fn evaluate_inner(p: &SystemParams, opts: &EvalOptions) -> Result<PointEvaluation> {
    let p = validate(*p)?;
    let occ = ThermalOccupations::for_params(&p, &opts.constants)?;
    let drift = drift_matrix(&p);
    let diffusion = diffusion_matrix(&p, &occ);
    let st = stability(&drift)?;
    let mut report = PointReport {
        params_echo: p,
        stable: st.stable,
        marginal: st.stable && st.is_marginal(p.omega_b),
        margin: st.margin,
        e_cm: None,
        e_cb: None,
        e_mb: None,
        r_tau_min: None,
        lyapunov_residual: None,
    };
    if !st.stable {
        return Ok(PointEvaluation {
            report,
            drift,
            diffusion,
            covariance: None,
        });
    }
    let cov = solve_stable(&drift.0, &diffusion.0)?;
    let full = cov.to_dmatrix();
    let pair = |a: Mode, b: Mode| -> Result<f64> {
        Ok(log_negativity(&full, &ModePartition::of(&[a], &[b]))?.value)
    };
    report.e_cm = Some(pair(Mode::Cavity, Mode::Magnon)?);
    report.e_cb = Some(pair(Mode::Cavity, Mode::Mechanics)?);
    report.e_mb = Some(pair(Mode::Magnon, Mode::Mechanics)?);
    if opts.tripartite {
        report.r_tau_min = Some(residual_contangle_min(&cov)?);
    }
    report.lyapunov_residual = Some(residual(&drift.0, &cov.0, &diffusion.0));
    Ok(PointEvaluation {
        report,
        drift,
        diffusion,
        covariance: Some(cov),
    })
}

/// A scannable parameter. Frequency-like axes use the config units
/// (Hz, i.e. ω/2π); normalized axes are ratios resolved against the base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisParam {
    DeltaCOverOmegaB,
    DeltaMOverOmegaB,
    GmbOverGmc,
    DeltaC,
    DeltaMEff,
    KappaC,
    KappaM,
    GammaB,
    GMc,
    GMb,
    Gain,
    Theta,
    Temperature,
    FB,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        use AxisParam::*;
        match self {
            DeltaCOverOmegaB => "delta_c_over_omega_b",
            DeltaMOverOmegaB => "delta_m_over_omega_b",
            GmbOverGmc => "Gmb_over_gmc",
            DeltaC => "delta_c",
            DeltaMEff => "delta_m_eff",
            KappaC => "kappa_c",
            KappaM => "kappa_m",
            GammaB => "gamma_b",
            GMc => "g_mc",
            GMb => "G_mb",
            Gain => "G",
            Theta => "theta",
            Temperature => "T",
            FB => "f_b",
        }
    }

    /// Sets this parameter on `p`; normalized axes scale `base`'s ω_b or g_mc.
    pub fn apply(self, p: &mut SystemParams, v: f64, base: &SystemParams) {
        use AxisParam::*;
        match self {
            DeltaCOverOmegaB => p.delta_c = v * base.omega_b,
            DeltaMOverOmegaB => p.delta_m_eff = v * base.omega_b,
            GmbOverGmc => p.g_mb_eff = v * base.g_mc,
            DeltaC => p.delta_c = TAU * v,
            DeltaMEff => p.delta_m_eff = TAU * v,
            KappaC => p.kappa_c = TAU * v,
            KappaM => p.kappa_m = TAU * v,
            GammaB => p.gamma_b = TAU * v,
            GMc => p.g_mc = TAU * v,
            GMb => p.g_mb_eff = TAU * v,
            Gain => p.opa_gain = v,
            Theta => p.opa_phase = v,
            Temperature => p.temperature = v,
            FB => p.omega_b = TAU * v,
        }
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use AxisParam::*;
        Ok(match s {
            "delta_c_over_omega_b" => DeltaCOverOmegaB,
            "delta_m_over_omega_b" => DeltaMOverOmegaB,
            "Gmb_over_gmc" => GmbOverGmc,
            "delta_c" => DeltaC,
            "delta_m_eff" => DeltaMEff,
            "kappa_c" => KappaC,
            "kappa_m" => KappaM,
            "gamma_b" => GammaB,
            "g_mc" => GMc,
            "G_mb" | "g_mb_eff" => GMb,
            "G" | "gain_G" | "opa_gain" => Gain,
            "theta" | "opa_phase" => Theta,
            "T" | "temperature" => Temperature,
            "f_b" => FB,
            _ => return Err(Error::Config(format!("unknown axis parameter {s:?}"))),
        })
    }
}

/// Inclusive, evenly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: AxisParam, start: f64, stop: f64, count: usize) -> Self {
        Self {
            param,
            start,
            stop,
            count,
        }
    }

    /// Parses `name:start:stop:count`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, a, b, n] = parts[..] else {
            return Err(Error::Config(format!(
                "axis {s:?} is not of the form name:start:stop:count"
            )));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("bad number {t:?} in axis {s:?}")))
        };
        let count = n
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad count {n:?} in axis {s:?}")))?;
        Ok(Self::new(name.parse()?, num(a)?, num(b)?, count))
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    /// One or two axes; the first is the outer loop.
    pub axes: Vec<Axis>,
    pub tripartite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub y: Option<f64>,
    pub report: PointReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub x_name: String,
    pub y_name: Option<String>,
    pub rows: Vec<SweepRow>,
}

fn run_parallel<T, F>(items: Vec<T>, threads: usize, f: F) -> Result<Vec<SweepRow>>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<SweepRow> + Send + Sync,
{
    let go = || items.par_iter().map(&f).collect::<Result<Vec<_>>>();
    if threads == 0 {
        go()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(go)
    }
}

/// Row-major evaluation over the first axis (outer) × second axis (inner).
/// `threads = 0` uses the global pool.
pub fn grid_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepTable> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(Error::Config("a sweep needs one or two axes".into()));
    }
    if let Some(a) = spec.axes.iter().find(|a| a.count < 2) {
        return Err(Error::Config(format!(
            "axis {} needs at least 2 points",
            a.param.name()
        )));
    }
    let xs = spec.axes[0].values();
    let ys: Vec<Option<f64>> = match spec.axes.get(1) {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<f64>)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();
    let opts = EvalOptions {
        tripartite: spec.tripartite,
        ..Default::default()
    };
    let rows = run_parallel(points, threads, |&(x, y)| {
        let mut p = spec.base;
        spec.axes[0].param.apply(&mut p, x, &spec.base);
        if let (Some(v), Some(ax)) = (y, spec.axes.get(1)) {
            ax.param.apply(&mut p, v, &spec.base);
        }
        Ok(SweepRow {
            x,
            y,
            report: evaluate_point(&p, &opts)?,
        })
    })?;
    Ok(SweepTable {
        x_name: spec.axes[0].param.name().into(),
        y_name: spec.axes.get(1).map(|a| a.param.name().into()),
        rows,
    })
}

/// Reports at `count` evenly spaced temperatures (inclusive), everything
/// else fixed at `p`.
pub fn temperature_scan(
    p: &SystemParams,
    t_start: f64,
    t_stop: f64,
    count: usize,
    opts: &EvalOptions,
    threads: usize,
) -> Result<SweepTable> {
    if count == 0 {
        return Err(Error::Config("temperature scan needs at least one point".into()));
    }
    if !(t_start >= 0.0 && t_stop >= 0.0) {
        return Err(Error::Domain("temperatures must be >= 0".into()));
    }
    let ts = Axis::new(AxisParam::Temperature, t_start, t_stop, count).values();
    let rows = run_parallel(ts, threads, |&t| {
        let q = SystemParams {
            temperature: t,
            ..*p
        };
        Ok(SweepRow {
            x: t,
            y: None,
            report: evaluate_point(&q, opts)?,
        })
    })?;
    Ok(SweepTable {
        x_name: "T".into(),
        y_name: None,
        rows,
    })
}

/// Minimal residual contangle along one axis (usually Δ_c/ω_b).
pub fn tripartite_scan(p: &SystemParams, axis: Axis, threads: usize) -> Result<SweepTable> {
    grid_sweep(
        &SweepSpec {
            base: *p,
            axes: vec![axis],
            tripartite: true,
        },
        threads,
    )
}

/// Row index and value of the largest `measure` among stable rows; ties go
/// to the smallest index.
pub fn argmax_measure(table: &SweepTable, measure: Measure) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, row) in table.rows.iter().enumerate() {
        if !row.report.stable {
            continue;
        }
        if let Some(v) = row.report.measure(measure) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.ok_or_else(|| Error::MeasureAbsent(measure.to_string()))
}

/// Nelder–Mead refinement of a measure's maximum over the normalized
/// detunings (Δ_c/ω_b, Δ̃_m/ω_b), starting from `start`. Unstable points
/// count as −∞. Returns the refined detunings and value.
pub fn refine_detunings(
    base: &SystemParams,
    measure: Measure,
    start: (f64, f64),
    tolerance: f64,
) -> Result<((f64, f64), f64)> {
    let opts = EvalOptions {
        tripartite: measure == Measure::RtauMin,
        ..Default::default()
    };
    let f = |x: [f64; 2]| -> Result<f64> {
        let p = SystemParams {
            delta_c: x[0] * base.omega_b,
            delta_m_eff: x[1] * base.omega_b,
            ..*base
        };
        let r = evaluate_point(&p, &opts)?;
        Ok(match (r.stable, r.measure(measure)) {
            (true, Some(v)) => -v,
            _ => f64::INFINITY,
        })
    };
    let step = 0.02;
    let mut simplex = [
        [start.0, start.1],
        [start.0 + step, start.1],
        [start.0, start.1 + step],
    ];
    let mut vals = [f(simplex[0])?, f(simplex[1])?, f(simplex[2])?];
    for _ in 0..500 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.map(|i| simplex[i]);
        vals = idx.map(|i| vals[i]);
        let size = (1..3)
            .map(|i| (simplex[i][0] - simplex[0][0]).hypot(simplex[i][1] - simplex[0][1]))
            .fold(0.0, f64::max);
        if size < tolerance {
            break;
        }
        let c = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| [c[0] + t * (simplex[2][0] - c[0]), c[1] + t * (simplex[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr)?;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe)?;
            (simplex[2], vals[2]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < vals[1] {
            (simplex[2], vals[2]) = (xr, fr);
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc)?;
            if fc < vals[2].min(fr) {
                (simplex[2], vals[2]) = (xc, fc);
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    vals[i] = f(simplex[i])?;
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    if !vals[best].is_finite() {
        return Err(Error::MeasureAbsent(measure.to_string()));
    }
    Ok(((simplex[best][0], simplex[best][1]), -vals[best]))
}

/// `printf("%.9g")`-style rendering.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        trim(&format!("{v:.*}", (8 - exp) as usize))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig9).unwrap_or_default()
}

pub fn write_csv<W: Write>(table: &SweepTable, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in &table.rows {
        let r = &row.report;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            fmt_sig9(row.x),
            opt(row.y),
            u8::from(r.stable),
            fmt_sig9(r.margin),
            opt(r.e_cm),
            opt(r.e_cb),
            opt(r.e_mb),
            opt(r.r_tau_min),
            opt(r.lyapunov_residual),
        )?;
    }
    Ok(())
}

/// One line with the maximum of each measure present and where it sits.
pub fn summary(table: &SweepTable) -> String {
    let mut parts = Vec::new();
    for m in Measure::ALL {
        if let Ok((i, v)) = argmax_measure(table, m) {
            let row = &table.rows[i];
            let at = match (&table.y_name, row.y) {
                (Some(yn), Some(y)) => format!("{}={}, {yn}={}", table.x_name, fmt_sig9(row.x), fmt_sig9(y)),
                _ => format!("{}={}", table.x_name, fmt_sig9(row.x)),
            };
            parts.push(format!("max {m} = {} at {at}", fmt_sig9(v)));
        }
    }
    let unstable = table.rows.iter().filter(|r| !r.report.stable).count();
    parts.push(format!("{unstable}/{} unstable", table.rows.len()));
    parts.join("; ")
}

/// A gnuplot script that renders `csv_path` (a table written by [`write_csv`]).
pub fn gnuplot_script(table: &SweepTable, csv_path: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{}'\n", table.x_name));
    match &table.y_name {
        Some(y) => {
            s.push_str(&format!("set ylabel '{y}'\nset view map\nset pm3d at b\nunset surface\n"));
            s.push_str("set multiplot layout 1,3\n");
            for (col, name) in [(5, "E_cm"), (6, "E_cb"), (7, "E_mb")] {
                s.push_str(&format!(
                    "set title '{name}'\nsplot '{csv_path}' using 1:2:(${col}) notitle\n"
                ));
            }
            s.push_str("unset multiplot\n");
        }
        None => {
            let tri = table.rows.iter().any(|r| r.report.r_tau_min.is_some());
            if tri {
                s.push_str(&format!(
                    "plot '{csv_path}' using 1:8 with lines title 'R_tau_min'\n"
                ));
            } else {
                s.push_str(&format!(
                    "plot '{csv_path}' using 1:5 with lines title 'E_cm', '' using 1:6 with lines title 'E_cb', '' using 1:7 with lines title 'E_mb'\n"
                ));
            }
        }
    }
    s
}
