//! Command-line front end. Everything here is reachable from tests through
//! [`run_cli`], which takes the argument list and output sinks explicitly.
//!
//! A `--config FILE` of flat `key=value` lines (keys are flag names without
//! the leading dashes) is spliced in before the command-line flags, so flags
//! given on the command line win.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::hilbert::{QubitState, Scheme};
use crate::lambda_gate::LambdaParams;
use crate::metrics::{self, GateResult, RunOptions, SchemeParams};
use crate::raman_gate::RamanParams;
use crate::regime::{RegimeReport, Status};
use crate::shelving::{self, ShelvingParams};

pub const CSV_COLUMNS: [&str; 12] = [
    "scheme",
    "omega0_or_omega20",
    "kappa",
    "gamma",
    "g",
    "delta",
    "omega_strong",
    "n_max",
    "T",
    "p0",
    "fidelity_conditional",
    "fidelity_unconditional",
];

#[derive(Debug, Parser)]
#[command(name = "cavity-cnot", version, about = "No-photon CNOT gate dynamics for two atoms in a lossy cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single gate run (or shelving survival curve).
    #[command(args_override_self = true)]
    Run(ParamArgs),
    /// Parameter scan written as CSV.
    #[command(args_override_self = true)]
    Scan(ScanArgs),
    /// Regime report; exit 0 all pass, 1 warnings, 2 violation.
    #[command(args_override_self = true)]
    Validate(ParamArgs),
    /// Photon-cutoff and time-step convergence table.
    #[command(args_override_self = true)]
    Converge(ParamArgs),
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// lambda | raman | shelving
    #[arg(long, default_value = "lambda", value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Flat key=value file; command-line flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Λ scheme laser Rabi frequency Ω₀ (= Ω₁).
    #[arg(long, default_value_t = 0.1)]
    pub omega0: f64,
    /// Cavity decay κ (Raman default: |g_eff|).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Atomic decay Γ (Raman: Γ of every excited level).
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,

    /// Raman detuning Δ (all three lasers).
    #[arg(long, default_value_t = 1000.0)]
    pub delta: f64,
    /// Raman strong-field Rabi frequency Ω_jj.
    #[arg(long = "omega-strong", default_value_t = 2.0)]
    pub omega_strong: f64,
    /// Raman weak field on atom 2 (2–e₀).
    #[arg(long, default_value_t = 0.05)]
    pub omega20: f64,
    /// Raman weak field on atom 1 (2–e₁); defaults to omega20.
    #[arg(long)]
    pub omega21: Option<f64>,

    /// Shelving weak Rabi frequency.
    #[arg(long = "omega-w", default_value_t = 0.02)]
    pub omega_w: f64,
    /// Shelving strong Rabi frequency.
    #[arg(long = "omega-s", default_value_t = 1.0)]
    pub omega_s: f64,
    /// Shelving decay of level C.
    #[arg(long = "gamma-s", default_value_t = 1.0)]
    pub gamma_s: f64,
    /// Shelving: end of the survival curve (default 2 T_dark).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Shelving: number of survival samples.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,

    /// Initial register state: 00, 01, 10, 11 or a sum like 00+10.
    #[arg(long, default_value = "10")]
    pub initial: String,
    /// Photon-number cutoff (scheme default when omitted).
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Propagator accuracy target.
    #[arg(long, default_value_t = crate::propagator::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Append a field-free 5/Γ window after the pulse (Λ scheme).
    #[arg(long)]
    pub relax: bool,
    /// Ratio standing in for "much less than".
    #[arg(long, default_value_t = crate::regime::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Physical value of g used to relabel output units.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Also write the CSV here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter to sweep (a flag name such as omega0 or omega20).
    #[arg(long)]
    pub sweep: String,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,
    /// Optional second, outer parameter.
    #[arg(long)]
    pub outer: Option<String>,
    /// Comma-separated values of the outer parameter.
    #[arg(long = "outer-values", value_delimiter = ',')]
    pub outer_values: Vec<f64>,
}

impl ParamArgs {
    pub fn qubit_state(&self) -> Result<QubitState> {
        QubitState::parse(&self.initial)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { n_max: self.n_max, epsilon: self.epsilon, relax: self.relax, refine: 0, threshold: self.threshold }
    }

    pub fn scheme_params(&self) -> Result<SchemeParams> {
        match self.scheme {
            Scheme::Lambda => {
                let p = LambdaParams { g: 1.0, kappa: self.kappa.unwrap_or(1.0), gamma: self.gamma, omega0: self.omega0 };
                p.validate()?;
                Ok(SchemeParams::Lambda(p))
            }
            Scheme::Raman => {
                let mut p = RamanParams::symmetric(self.delta, self.omega_strong, self.omega20, self.gamma);
                if let Some(k) = self.kappa {
                    p.kappa = k;
                }
                if let Some(o) = self.omega21 {
                    p.omega21 = o;
                }
                p.validate()?;
                Ok(SchemeParams::Raman(p))
            }
            Scheme::Shelving => Err(invalid("scheme", "shelving is not a gate scheme")),
        }
    }

    pub fn shelving_params(&self) -> Result<ShelvingParams> {
        let p = ShelvingParams { omega_w: self.omega_w, omega_s: self.omega_s, gamma_s: self.gamma_s };
        p.validate()?;
        Ok(p)
    }

    /// Set a parameter by its flag name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match (self.scheme, name) {
            (_, "kappa") => self.kappa = Some(value),
            (_, "gamma") => self.gamma = value,
            (Scheme::Lambda, "omega0") => self.omega0 = value,
            (Scheme::Raman, "omega20") => self.omega20 = value,
            (Scheme::Raman, "omega21") => self.omega21 = Some(value),
            (Scheme::Raman, "delta") => self.delta = value,
            (Scheme::Raman, "omega-strong") => self.omega_strong = value,
            _ => return Err(invalid("sweep", format!("`{name}` is not a scannable {} parameter", self.scheme))),
        }
        Ok(())
    }

    pub fn regime(&self) -> RegimeReport {
        match self.scheme {
            Scheme::Shelving => match self.shelving_params() {
                Ok(p) => shelving::validate_regime_shelving(&p, self.threshold),
                Err(e) => {
                    let mut r = RegimeReport::new();
                    r.violation(e.to_string());
                    r
                }
            },
            _ => match self.scheme_params() {
                Ok(p) => p.regime(self.threshold),
                Err(e) => {
                    let mut r = RegimeReport::new();
                    r.violation(e.to_string());
                    r
                }
            },
        }
    }
}

/// One output row. Rates are multiplied and times divided by `g_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRow {
    pub scheme: Scheme,
    pub omega0_or_omega20: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub g_scale: f64,
    pub delta: Option<f64>,
    pub omega_strong: Option<f64>,
    pub n_max: usize,
    pub gate_time: f64,
    pub p0: f64,
    pub fidelity_conditional: Option<f64>,
    pub fidelity_unconditional: f64,
}

impl GateRow {
    pub fn new(params: &SchemeParams, result: &GateResult, g_scale: f64) -> Self {
        let (scheme, weak, kappa, gamma, delta, strong) = match params {
            SchemeParams::Lambda(p) => (Scheme::Lambda, p.omega0, p.kappa, p.gamma, None, None),
            SchemeParams::Raman(p) => (Scheme::Raman, p.omega20, p.kappa, p.gamma[0], Some(p.delta[0]), Some(p.omega_diag[0])),
        };
        GateRow {
            scheme,
            omega0_or_omega20: weak * g_scale,
            kappa: kappa * g_scale,
            gamma: gamma * g_scale,
            g_scale,
            delta: delta.map(|d| d * g_scale),
            omega_strong: strong.map(|o| o * g_scale),
            n_max: result.n_max,
            gate_time: result.gate_time / g_scale,
            p0: result.p0,
            fidelity_conditional: result.fidelity,
            fidelity_unconditional: result.fidelity_unconditional,
        }
    }

    pub fn record(&self) -> [String; 12] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.scheme.to_string(),
            self.omega0_or_omega20.to_string(),
            self.kappa.to_string(),
            self.gamma.to_string(),
            self.g_scale.to_string(),
            opt(self.delta),
            opt(self.omega_strong),
            self.n_max.to_string(),
            self.gate_time.to_string(),
            self.p0.to_string(),
            opt(self.fidelity_conditional),
            self.fidelity_unconditional.to_string(),
        ]
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[GateRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[GateRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Scan grid: `count` points from `start` to `stop` inclusive.
pub fn scan_points(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(invalid("start/stop", "must be finite"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let n = (count - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..count).map(|i| start + (stop - start) * i as f64 / n).collect()),
        Spacing::Log => {
            if start <= 0.0 || stop <= 0.0 {
                return Err(invalid("start/stop", "log spacing needs positive bounds"));
            }
            let ratio = stop / start;
            Ok((0..count).map(|i| start * ratio.powf(i as f64 / n)).collect())
        }
    }
}

/// Parameter sets for every scan point, outer parameter major.
pub fn scan_configs(scan: &ScanArgs) -> Result<Vec<ParamArgs>> {
    let inner = scan_points(scan.start, scan.stop, scan.count, scan.spacing)?;
    let outer: Vec<Option<f64>> = match &scan.outer {
        Some(_) if scan.outer_values.is_empty() => return Err(invalid("outer-values", "needed with --outer")),
        Some(_) => scan.outer_values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut out = Vec::with_capacity(inner.len() * outer.len());
    for o in &outer {
        for &v in &inner {
            let mut p = scan.params.clone();
            if let (Some(name), Some(ov)) = (&scan.outer, o) {
                p.set(name, *ov)?;
            }
            p.set(&scan.sweep, v)?;
            out.push(p);
        }
    }
    Ok(out)
}

/// Evaluate all points concurrently; rows come back in input order.
pub fn run_scan(scan: &ScanArgs) -> Result<(Vec<GateRow>, Status)> {
    let configs = scan_configs(scan)?;
    let results: Vec<Result<(GateRow, Status)>> = configs
        .par_iter()
        .map(|p| {
            let params = p.scheme_params()?;
            let r = metrics::gate_run(&params, &p.qubit_state()?, &p.run_options())?;
            Ok((GateRow::new(&params, &r, p.g), r.regime.worst()))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut worst = Status::Pass;
    for r in results {
        let (row, status) = r?;
        worst = worst.max(status);
        rows.push(row);
    }
    Ok((rows, worst))
}

pub fn run_single(args: &ParamArgs) -> Result<(GateRow, GateResult)> {
    let params = args.scheme_params()?;
    let r = metrics::gate_run(&params, &args.qubit_state()?, &args.run_options())?;
    Ok((GateRow::new(&params, &r, args.g), r))
}

/// Survival samples and dark-time fit for the shelving model.
pub struct ShelvingRun {
    pub times: Vec<f64>,
    pub p0: Vec<f64>,
    pub fit: shelving::DarkTimeFit,
}

pub fn run_shelving(args: &ParamArgs) -> Result<ShelvingRun> {
    let p = args.shelving_params()?;
    let fit = shelving::fit_dark_time(&p)?;
    let tmax = args.tmax.unwrap_or(2.0 * fit.t_dark);
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(invalid("tmax", "must be positive"));
    }
    if args.samples < 2 {
        return Err(invalid("samples", "need at least 2 samples"));
    }
    let times: Vec<f64> = (0..args.samples).map(|i| tmax * i as f64 / (args.samples - 1) as f64).collect();
    let p0 = shelving::survival_probability(&p, &times)?;
    Ok(ShelvingRun { times, p0, fit })
}

/// Read a flat `key=value` file into `--key=value` arguments.
pub fn config_file_args(path: &Path) -> std::result::Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "config" {
            return Err(format!("{}:{}: nested config files are not supported", path.display(), lineno + 1));
        }
        match v {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => out.push(format!("--{k}={v}")),
        }
    }
    Ok(out)
}

/// Splice config-file arguments right after the subcommand name.
fn expand_config(args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    let mut iter = args.iter().enumerate();
    while let Some((i, a)) = iter.next() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
            break;
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
            break;
        }
    }
    let Some(path) = path else { return Ok(args) };
    let extra = config_file_args(Path::new(&path))?;
    let sub = args.iter().position(|a| matches!(a.as_str(), "run" | "scan" | "validate" | "converge"));
    let at = sub.map(|i| i + 1).unwrap_or(args.len().min(1));
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| invalid("output", format!("cannot write {}: {e}", path.display())))
}

fn report_warnings(err: &mut dyn Write, report: &RegimeReport) {
    for c in report.warnings() {
        let _ = writeln!(err, "regime {}: {} = {:.4e} (threshold {:.1e})", c.status, c.name, c.value, c.threshold);
    }
}

fn exit_for(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Warn => 1,
        Status::Violation => 2,
    }
}

fn cmd_run(args: &ParamArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if args.scheme == Scheme::Shelving {
        let run = run_shelving(args)?;
        let report = args.regime();
        report_warnings(err, &report);
        let mut text = format!("# t_fit={}\n# t_dark={}\n# fit_window={},{}\nt,p0\n", run.fit.t_fit / args.g, run.fit.t_dark / args.g, run.fit.window.0 / args.g, run.fit.window.1 / args.g);
        for (t, p) in run.times.iter().zip(&run.p0) {
            text.push_str(&format!("{},{}\n", t / args.g, p));
        }
        let _ = out.write_all(text.as_bytes());
        if let Some(path) = &args.output {
            write_output(path, &text)?;
        }
        return Ok(exit_for(report.worst()));
    }
    let (row, result) = run_single(args)?;
    report_warnings(err, &result.regime);
    if result.fidelity.is_none() {
        let _ = writeln!(err, "no-photon probability is zero: conditional fidelity undefined");
    }
    let text = csv_string(std::slice::from_ref(&row));
    let _ = out.write_all(text.as_bytes());
    if let Some(path) = &args.output {
        write_output(path, &text)?;
    }
    Ok(exit_for(result.regime.worst()))
}

fn cmd_scan(scan: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if scan.params.scheme == Scheme::Shelving {
        return Err(invalid("scheme", "scans are defined for the lambda and raman schemes"));
    }
    let (rows, worst) = run_scan(scan)?;
    let text = csv_string(&rows);
    match &scan.params.output {
        Some(path) => {
            write_output(path, &text)?;
            let _ = writeln!(err, "wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if worst != Status::Pass {
        let _ = writeln!(err, "regime: at least one scan point has status {worst}");
    }
    Ok(exit_for(worst))
}

fn cmd_validate(args: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let report = args.regime();
    let _ = write!(out, "{report}");
    Ok(report.exit_code())
}

fn cmd_converge(args: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "undefined".into());
    if args.scheme == Scheme::Shelving {
        let p = args.shelving_params()?;
        let t = args.tmax.unwrap_or(2.0 * shelving::dark_time(&p)?);
        let gen = shelving::build_generator_shelving(&p)?;
        let plan = crate::propagator::plan(&gen, t, 1, args.epsilon)?;
        let a = shelving::state(crate::hilbert::ShelvingLevel::A);
        let p_base = plan.no_photon_probability(&a, t)?;
        let p_half = plan.refined()?.no_photon_probability(&a, t)?;
        let _ = writeln!(out, "quantity,value");
        let _ = writeln!(out, "p0,{p_base}");
        let _ = writeln!(out, "dp0_n_max,0 (no cavity mode)");
        let _ = writeln!(out, "dp0_dt_half,{:.3e}", (p_half - p_base).abs());
        return Ok(0);
    }
    let params = args.scheme_params()?;
    let c = metrics::convergence_study(&params, &args.qubit_state()?, &args.run_options())?;
    let _ = writeln!(out, "quantity,value");
    let _ = writeln!(out, "n_max,{}", c.base.n_max);
    let _ = writeln!(out, "p0,{}", c.base.p0);
    let _ = writeln!(out, "fidelity_conditional,{}", c.base.fidelity.map(|f| f.to_string()).unwrap_or_default());
    let _ = writeln!(out, "dp0_n_max_plus_1,{:.3e}", c.dp0_cutoff());
    let _ = writeln!(out, "dfidelity_n_max_plus_1,{}", opt(c.dfidelity_cutoff()));
    let _ = writeln!(out, "dp0_dt_half,{:.3e}", c.dp0_step());
    let _ = writeln!(out, "dfidelity_dt_half,{}", opt(c.dfidelity_step()));
    let _ = writeln!(out, "damplitude_dt_half,{:.3e}", c.damplitude_step());
    Ok(0)
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run_cli(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Scan(s) => cmd_scan(s, out, err),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Converge(a) => cmd_converge(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_log_points() {
        assert_eq!(scan_points(1.0, 3.0, 3, Spacing::Linear).unwrap(), vec![1.0, 2.0, 3.0]);
        let l = scan_points(0.01, 1.0, 3, Spacing::Log).unwrap();
        assert!((l[1] - 0.1).abs() < 1e-15);
        assert_eq!(scan_points(0.5, 9.0, 1, Spacing::Log).unwrap(), vec![0.5]);
        assert!(scan_points(0.0, 1.0, 3, Spacing::Log).is_err());
        assert!(scan_points(0.0, 1.0, 0, Spacing::Linear).is_err());
    }

    #[test]
    fn unused_fields_are_empty() {
        let row = GateRow {
            scheme: Scheme::Lambda,
            omega0_or_omega20: 0.1,
            kappa: 1.0,
            gamma: 0.0,
            g_scale: 1.0,
            delta: None,
            omega_strong: None,
            n_max: 3,
            gate_time: 62.8,
            p0: 0.83,
            fidelity_conditional: None,
            fidelity_unconditional: 0.0,
        };
        let text = csv_string(&[row]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "lambda,0.1,1,0,1,,,3,62.8,0.83,,0");
    }

    #[test]
    fn set_rejects_foreign_parameters() {
        let mut p = Cli::try_parse_from(["x", "run"]).map(|c| match c.command {
            Command::Run(a) => a,
            _ => unreachable!(),
        })
        .unwrap();
        assert!(p.set("omega20", 0.1).is_err());
        p.set("omega0", 0.2).unwrap();
        assert_eq!(p.omega0, 0.2);
    }

    #[test]
    fn config_lines_become_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        fs::write(&path, "# comment\nscheme = raman\nomega20=0.02\nrelax=false\n\nn-max=3\n").unwrap();
        assert_eq!(config_file_args(&path).unwrap(), vec!["--scheme=raman", "--omega20=0.02", "--n-max=3"]);
        fs::write(&path, "oops\n").unwrap();
        assert!(config_file_args(&path).is_err());
    }
}
