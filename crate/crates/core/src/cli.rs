//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 config or I/O error, 3 numeric
//! failure, 4 instability under `--require-stable`. Data goes to `--out`
//! (or standard output); diagnostics go to standard error.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::max_stable_gain;
use crate::error::{Error, Result};
use crate::model::{regime_warnings, validate, ParamsConfig, PhysicalConstants, SphereSpec, SystemParams};
use crate::steadystate::{drive_for_coupling, effective_coupling, field_for_rabi, rabi_frequency};
use crate::sweep::{
    evaluate_point_full, grid_sweep, gnuplot_script, refine_detunings, argmax_measure, summary,
    temperature_scan, tripartite_scan, write_csv, Axis, EvalOptions, Measure, SweepSpec,
    SweepTable,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_UNSTABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "magnomech", version, about = "Steady-state entanglement in a cavity-magnomechanical system with an OPA")]
pub struct Cli {
    /// JSON parameter file; the built-in baseline is used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Exit with code 4 if any evaluated point is unstable.
    #[arg(long, global = true)]
    pub require_stable: bool,
    /// `eval` only: include A, D and C as row-major arrays.
    #[arg(long, global = true)]
    pub dump_matrices: bool,
    /// Also write `<out>.gp`, a gnuplot script for the CSV.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate a single point and print its report as JSON.
    Eval,
    /// Grid sweep over one or two axes, CSV output.
    Sweep {
        /// First (outer) axis, `name:start:stop:count`.
        #[arg(long)]
        x: String,
        /// Second (inner) axis.
        #[arg(long)]
        y: Option<String>,
        /// Also compute the minimal residual contangle.
        #[arg(long)]
        tripartite: bool,
        /// Refine the maximum of this measure over the detunings (reported on stderr).
        #[arg(long)]
        refine: Option<Measure>,
    },
    /// Temperature scan at fixed detunings, CSV output.
    Tscan {
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long, default_value_t = 0.3)]
        t_stop: f64,
        #[arg(long, default_value_t = 301)]
        count: usize,
    },
    /// Minimal residual contangle along one axis, CSV output.
    Tri {
        #[arg(long, default_value = "delta_c_over_omega_b:-2:0:201")]
        axis: String,
    },
    /// Largest stable parametric gain, JSON output.
    Maxgain {
        /// Pump phase (rad); worst case over phases when omitted.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Drive field, Rabi frequency and effective coupling for a YIG sphere, JSON output.
    Derive {
        /// Sphere diameter (m).
        #[arg(long, default_value_t = 250e-6)]
        diameter: f64,
        /// Single-magnon magnomechanical coupling g_mb/2π (Hz).
        #[arg(long, default_value_t = 0.2)]
        g_mb: f64,
        /// Target effective coupling G_mb/2π (Hz).
        #[arg(long, conflicts_with = "b0")]
        target_gmb: Option<f64>,
        /// Drive field amplitude (T).
        #[arg(long)]
        b0: Option<f64>,
        /// Mechanical frequency ω_b/2π (Hz); taken from the config when omitted.
        #[arg(long)]
        f_b: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Sweep { .. } => "sweep",
            Command::Tscan { .. } => "tscan",
            Command::Tri { .. } => "tri",
            Command::Maxgain { .. } => "maxgain",
            Command::Derive { .. } => "derive",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        crate::sweep::parse_measure(s).map_err(|e| e.to_string())
    }
}

/// What was run, written next to `--out` as `<out>.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: Option<PathBuf>,
    pub subcommand: &'static str,
    pub out: Option<PathBuf>,
    pub axes: Vec<String>,
    pub params: ParamsConfig,
}

fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Domain(_)
        | Error::InvalidParams(_)
        | Error::Config(_)
        | Error::Modes(_)
        | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_params(path: Option<&Path>) -> Result<SystemParams> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            validate(ParamsConfig::from_json(&text)?.to_params())
        }
        None => Ok(SystemParams::baseline()),
    }
}

struct Outcome {
    unstable: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(o) if cli.require_stable && o.unstable > 0 => {
            let _ = writeln!(stderr, "error: {} unstable point(s)", o.unstable);
            EXIT_UNSTABLE
        }
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    let params = load_params(cli.config.as_deref())?;
    if cli.config.is_none() {
        writeln!(stderr, "note: no --config given, using the built-in baseline")?;
    }
    if !matches!(cli.command, Command::Derive { .. } | Command::Maxgain { .. }) {
        for w in regime_warnings(&params) {
            writeln!(stderr, "warning: {w}")?;
        }
    }
    if cli.gnuplot && cli.out.is_none() {
        return Err(Error::Config("--gnuplot needs --out".into()));
    }
    let axes: Vec<String> = match &cli.command {
        Command::Sweep { x, y, .. } => std::iter::once(x.clone()).chain(y.clone()).collect(),
        Command::Tri { axis } => vec![axis.clone()],
        _ => Vec::new(),
    };
    let mut file = match &cli.out {
        Some(p) => Some(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        )),
        None => None,
    };
    let out: &mut dyn Write = match file.as_mut() {
        Some(f) => f,
        None => stdout,
    };
    let outcome = dispatch(cli, &params, &axes, out, stderr)?;
    out.flush()?;
    if let Some(p) = &cli.out {
        let manifest = RunManifest {
            config: cli.config.clone(),
            subcommand: cli.command.name(),
            out: cli.out.clone(),
            axes,
            params: params.to_config(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(sibling(p, ".manifest.json"), text + "\n")?;
    }
    Ok(outcome)
}

fn emit_table(
    cli: &Cli,
    table: &SweepTable,
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Outcome> {
    write_csv(table, &mut *out)?;
    writeln!(stderr, "{}", summary(table))?;
    if cli.gnuplot {
        let p = cli.out.as_ref().expect("checked above");
        std::fs::write(sibling(p, ".gp"), gnuplot_script(table, &p.to_string_lossy()))?;
    }
    Ok(Outcome {
        unstable: table.rows.iter().filter(|r| !r.report.stable).count(),
    })
}

fn row_major(m: &nalgebra::Matrix6<f64>) -> Value {
    json!((0..6)
        .map(|i| (0..6).map(|j| m[(i, j)]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn dispatch(
    cli: &Cli,
    params: &SystemParams,
    axes: &[String],
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Outcome> {
    match &cli.command {
        Command::Eval => {
            let ev = evaluate_point_full(params, &EvalOptions::tripartite())?;
            let mut v = serde_json::to_value(ev.report).expect("report serializes");
            if cli.dump_matrices {
                v["A"] = row_major(&ev.drift.0);
                v["D"] = row_major(&ev.diffusion.0);
                v["C"] = ev.covariance.map_or(Value::Null, |c| row_major(&c.0));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            if ev.report.marginal {
                writeln!(stderr, "warning: point is marginally stable")?;
            }
            Ok(Outcome {
                unstable: usize::from(!ev.report.stable),
            })
        }
        Command::Sweep {
            tripartite, refine, ..
        } => {
            let spec = SweepSpec {
                base: *params,
                axes: axes.iter().map(|a| Axis::parse(a)).collect::<Result<_>>()?,
                tripartite: *tripartite,
            };
            let table = grid_sweep(&spec, cli.threads)?;
            let outcome = emit_table(cli, &table, out, stderr)?;
            if let Some(m) = refine {
                let (i, _) = argmax_measure(&table, *m)?;
                let r = table.rows[i].report.params_echo;
                let start = (r.delta_c / params.omega_b, r.delta_m_eff / params.omega_b);
                let ((dc, dm), v) = refine_detunings(params, *m, start, 1e-4)?;
                writeln!(
                    stderr,
                    "refined max {m} = {v:.9} at delta_c/omega_b = {dc:.6}, delta_m_eff/omega_b = {dm:.6}"
                )?;
            }
            Ok(outcome)
        }
        Command::Tscan {
            t_start,
            t_stop,
            count,
        } => {
            let table = temperature_scan(
                params,
                *t_start,
                *t_stop,
                *count,
                &EvalOptions::default(),
                cli.threads,
            )?;
            emit_table(cli, &table, out, stderr)
        }
        Command::Tri { .. } => {
            let table = tripartite_scan(params, Axis::parse(&axes[0])?, cli.threads)?;
            emit_table(cli, &table, out, stderr)
        }
        Command::Maxgain { theta } => {
            let t = max_stable_gain(params, *theta)?;
            let v = json!({
                "max_stable_gain": t.gain,
                "theta": t.phase,
                "worst_case_over_theta": theta.is_none(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            Ok(Outcome { unstable: 0 })
        }
        Command::Derive {
            diameter,
            g_mb,
            target_gmb,
            b0,
            f_b,
        } => {
            let consts = PhysicalConstants::default();
            let sphere = SphereSpec::yig(*diameter)?;
            let omega_b = f_b.map_or(params.omega_b, |f| TAU * f);
            if !(omega_b > 0.0) {
                return Err(Error::Domain("f_b must be > 0".into()));
            }
            let g = TAU * g_mb;
            let rabi = match (target_gmb, b0) {
                (Some(t), _) => drive_for_coupling(TAU * t, g, omega_b)?,
                (None, Some(b)) => rabi_frequency(*b, &sphere, &consts)?,
                (None, None) => {
                    return Err(Error::Config("derive needs --target-gmb or --b0".into()))
                }
            };
            let field = field_for_rabi(rabi, &sphere, &consts)?;
            let g_eff = effective_coupling(g, rabi, omega_b)?;
            let n = sphere.spin_count();
            let population = if g == 0.0 {
                0.0
            } else {
                (g_eff / (2f64.sqrt() * g)).powi(2)
            };
            let limit = 2.0 * n * sphere.spin;
            if population > limit / 10.0 {
                writeln!(
                    stderr,
                    "warning: magnon population {population:.3e} is not small compared with 2Ns = {limit:.3e}"
                )?;
            }
            let v = json!({
                "diameter": diameter,
                "spin_count": n,
                "rabi_frequency": rabi,
                "B0": field,
                "B0_roundtrip": rabi_frequency(field, &sphere, &consts)?,
                "G_mb_hz": g_eff / TAU,
                "magnon_population": population,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            Ok(Outcome { unstable: 0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = run(
            std::iter::once("magnomech").chain(args.iter().copied()),
            &mut o,
            &mut e,
        );
        (
            code,
            String::from_utf8(o).unwrap(),
            String::from_utf8(e).unwrap(),
        )
    }

    #[test]
    fn needs_exactly_one_subcommand() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "tri"]).0, EXIT_USAGE);
    }

    #[test]
    fn malformed_axis_is_config_error() {
        let (code, _, err) = call(&["sweep", "--x", "delta_c_over_omega_b:-2:0"]);
        assert_eq!(code, EXIT_CONFIG, "{err}");
        assert_eq!(call(&["sweep", "--x", "nope:0:1:3"]).0, EXIT_CONFIG);
    }

    #[test]
    fn gnuplot_without_out_is_rejected() {
        assert_eq!(call(&["tscan", "--count", "1", "--gnuplot"]).0, EXIT_CONFIG);
    }

    #[test]
    fn derive_reproduces_field_estimate() {
        let (code, out, _) = call(&["derive", "--target-gmb", "3.2e6"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let b0 = v["B0"].as_f64().unwrap();
        assert!((b0 - 3.9e-5).abs() < 0.15e-5, "{b0}");
        let back = v["B0_roundtrip"].as_f64().unwrap();
        let rabi = v["rabi_frequency"].as_f64().unwrap();
        assert!((back - rabi).abs() <= 1e-12 * rabi);
        assert!(call(&["derive"]).0 == EXIT_CONFIG);
    }

    #[test]
    fn derive_from_field() {
        let (code, out, _) = call(&["derive", "--b0", "3.9e-5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let g = v["G_mb_hz"].as_f64().unwrap();
        assert!((g - 3.2e6).abs() < 0.15e6, "{g}");
    }
}
