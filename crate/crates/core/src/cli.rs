//! Argument parsing and output for the `qclone` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 I/O error. Everything the binary does goes through [`run`], which takes
//! its output streams as arguments so tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis::{perturbation, separability_report, single_clone_fidelity, OutputQubit};
use crate::cloner::{clone, input_state, InputSpec, MachineParams};
use crate::sweep::{run_sweep, Strategy, SweepConfig, SweepRow};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const DEFAULT_PRECISION: usize = 9;

/// Values smaller than this in magnitude print as zero.
pub const SNAP_TO_ZERO: f64 = 1e-12;

/// Column order of `sweep` output.
pub const SWEEP_COLUMNS: [&str; 10] = [
    "phi",
    "input",
    "a",
    "b",
    "c",
    "theta1",
    "clone_fidelity",
    "min_pt_eig_numeric",
    "min_pt_eig_closed",
    "verdict",
];

const FAMILY_ONLY: &str = "family-only";

#[derive(Debug, Parser)]
#[command(
    name = "qclone",
    version,
    about = "Simulate the 1->2 cloning network for two pairs of orthogonal states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Machine coefficients and preparation angles for one phi.
    Params {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the network on one input and analyse the output.
    Clone {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        /// psi1, psi2, psi3, psi4 or custom.
        #[arg(long, default_value = "psi1")]
        input: String,
        /// Amplitude of |0> for a custom input.
        #[arg(long, value_parser = parse_amplitude, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Amplitude of |1> for a custom input.
        #[arg(long, value_parser = parse_amplitude, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One row per (phi, input) over an evenly spaced phi range.
    Sweep {
        #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
        phi_start: f64,
        #[arg(long, value_parser = parse_angle, default_value = "pi/2", allow_hyphen_values = true)]
        phi_end: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Comma-separated subset of psi1..psi4.
        #[arg(long, default_value = "psi1,psi2,psi3,psi4")]
        inputs: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// First-order fidelity model against simulation for a common angle error.
    Perturb {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        /// Comma-separated angle errors.
        #[arg(long, allow_hyphen_values = true)]
        dt: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite.
    Verify {
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits.
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = clap::value_parser!(u8).range(1..=17).map(usize::from))]
    pub precision: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses an angle: a decimal, or `pi`, `pi/n`, `k*pi`, `k*pi/n` with decimal
/// `k` and `n`, optionally negated.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = if let Some(at) = t.find("pi") {
        let (head, tail) = (&t[..at], &t[at + 2..]);
        let k = match head.trim_end_matches('*').trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            k => parse_plain(k, s)?,
        };
        let n = match tail.trim() {
            "" => 1.0,
            rest => match rest.strip_prefix('/') {
                Some(n) => parse_plain(n.trim(), s)?,
                None => return Err(format!("cannot parse angle '{s}'")),
            },
        };
        if n == 0.0 {
            return Err(format!("division by zero in angle '{s}'"));
        }
        k * std::f64::consts::PI / n
    } else {
        parse_plain(&t, s)?
    };
    if !value.is_finite() {
        return Err(format!("angle '{s}' is not finite"));
    }
    Ok(value)
}

fn parse_plain(part: &str, whole: &str) -> Result<f64, String> {
    part.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("cannot parse angle '{whole}'"))
}

fn parse_amplitude(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(format!("amplitude '{s}' is not finite")),
        Err(_) if s.contains(['i', 'j']) => Err(format!(
            "complex amplitude '{s}' is not supported: the family and the network are real, \
             so only real alpha and beta are accepted"
        )),
        Err(_) => Err(format!("cannot parse amplitude '{s}'")),
    }
}

/// Fixed-notation rendering with `precision` significant digits. Magnitudes
/// below [`SNAP_TO_ZERO`] and negative zero print as zero.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let precision = precision.max(1);
    let x = if x.abs() < SNAP_TO_ZERO { 0.0 } else { x };
    let decimals_for = |exponent: i32| (precision as i32 - 1 - exponent).max(0) as usize;
    let mut decimals = if x == 0.0 {
        precision - 1
    } else {
        decimals_for(x.abs().log10().floor() as i32)
    };
    let mut s = format!("{x:.decimals$}");
    // Rounding up into the next decade (0.9999... -> 1.000...) adds a digit.
    if x != 0.0 {
        let rounded: f64 = s.parse().unwrap_or(x);
        let widened = decimals_for(rounded.abs().log10().floor() as i32);
        if widened < decimals {
            decimals = widened;
            s = format!("{x:.decimals$}");
        }
    }
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

enum Cell {
    Num(f64),
    Text(String),
}

/// Header plus rows; rendered as CSV or as JSON objects keyed by column.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self, precision: usize) -> Result<Vec<u8>, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| e.to_string();
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format_number(*x, precision),
                Cell::Text(t) => t.clone(),
            }))
            .map_err(io)?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }

    fn json_rows(&self, precision: usize) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.clone(), cell_json(c, precision)))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }

    fn render(&self, format: Format, precision: usize, single: bool) -> Result<Vec<u8>, String> {
        match format {
            Format::Csv => self.csv(precision),
            Format::Json => {
                let mut rows = self.json_rows(precision);
                let value = if single && rows.len() == 1 {
                    rows.remove(0)
                } else {
                    Value::Array(rows)
                };
                json_bytes(&value)
            }
        }
    }
}

fn number_json(x: f64, precision: usize) -> Value {
    let rounded: f64 = format_number(x, precision).parse().unwrap_or(f64::NAN);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn cell_json(c: &Cell, precision: usize) -> Value {
    match c {
        Cell::Num(x) => number_json(*x, precision),
        Cell::Text(t) => Value::String(t.clone()),
    }
}

fn json_bytes(value: &Value) -> Result<Vec<u8>, String> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// A failed command: exit code plus message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::usage(e)
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (bytes, out, code) = match command {
        Command::Params { phi, output } => (params(phi, &output)?, output.out, EXIT_OK),
        Command::Clone {
            phi,
            input,
            alpha,
            beta,
            output,
        } => {
            let spec = clone_input(&input, alpha, beta)?;
            (clone_record(phi, spec, &output)?, output.out, EXIT_OK)
        }
        Command::Sweep {
            phi_start,
            phi_end,
            steps,
            inputs,
            output,
        } => {
            let cfg = SweepConfig {
                phi_start,
                phi_end,
                steps,
                delta_thetas: Vec::new(),
                inputs: parse_inputs(&inputs)?,
            };
            (sweep(&cfg, &output)?, output.out, EXIT_OK)
        }
        Command::Perturb { phi, dt, output } => (perturb(phi, &dt, &output)?, output.out, EXIT_OK),
        Command::Verify { format, out } => {
            let report = verify::run();
            let bytes = match format {
                Some(Format::Json) => verify_json(&report)?,
                _ => verify_text(&report),
            };
            let code = if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
            emit(&bytes, out.as_ref(), stdout)?;
            if let Some(first) = report.first_failure() {
                let w = first.worst();
                return Err(Failure {
                    code,
                    message: format!(
                        "verification failed: first failing check {} ({} = {:e}, limit {:e})",
                        first.name, w.label, w.value, w.limit
                    ),
                });
            }
            return Ok(code);
        }
    };
    emit(&bytes, out.as_ref(), stdout)?;
    Ok(code)
}

fn emit(bytes: &[u8], out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io = |what: String| Failure {
        code: EXIT_IO,
        message: what,
    };
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| io(format!("cannot write to stdout: {e}"))),
    }
}

fn params(phi: f64, output: &OutputArgs) -> Result<Vec<u8>, Failure> {
    let p = MachineParams::from_phi(phi)?;
    let mut table = Table::new(["phi", "a", "b", "c", "theta1", "theta2", "theta3"]);
    table.push(
        [p.phi, p.a, p.b, p.c, p.theta1, p.theta2, p.theta3]
            .map(Cell::Num)
            .into(),
    );
    table
        .render(output.format, output.precision, true)
        .map_err(Failure::usage)
}

fn clone_input(input: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<InputSpec, Failure> {
    if input.trim().eq_ignore_ascii_case("custom") {
        return match (alpha, beta) {
            (Some(a), Some(b)) => Ok(InputSpec::custom(a, b)?),
            _ => Err(Failure::usage("--input custom needs both --alpha and --beta")),
        };
    }
    if alpha.is_some() || beta.is_some() {
        return Err(Failure::usage("--alpha and --beta apply only to --input custom"));
    }
    Ok(input.parse()?)
}

fn clone_record(phi: f64, spec: InputSpec, output: &OutputArgs) -> Result<Vec<u8>, Failure> {
    let state = clone(spec, phi)?;
    let psi = input_state(spec, phi)?;
    let report = separability_report(spec, phi)?;
    let (alpha, beta) = spec.amplitudes(phi);
    let fidelity = |q| single_clone_fidelity(&state, &psi, q);
    let fidelities = [
        fidelity(OutputQubit::A1)?,
        fidelity(OutputQubit::A2)?,
        fidelity(OutputQubit::A3)?,
    ];

    let closed = |i: usize| {
        if spec.is_family() {
            Cell::Num(report.pt_eigs_closed[i])
        } else {
            Cell::Text(FAMILY_ONLY.into())
        }
    };
    let mut columns = vec!["phi".to_string(), "input".into(), "alpha".into(), "beta".into()];
    let mut row = vec![
        Cell::Num(phi),
        Cell::Text(spec.name().into()),
        Cell::Num(alpha),
        Cell::Num(beta),
    ];
    for (index, amp) in state.amps().iter().enumerate() {
        columns.push(format!("amp_{index:03b}"));
        row.push(Cell::Num(amp.re));
    }
    for (name, f) in ["fidelity_a1", "fidelity_a2", "fidelity_a3"].iter().zip(fidelities) {
        columns.push(name.to_string());
        row.push(Cell::Num(f));
    }
    for i in 0..4 {
        columns.push(format!("pt_eig_numeric_{i}"));
        row.push(Cell::Num(report.pt_eigs_numeric[i]));
    }
    for i in 0..4 {
        columns.push(format!("pt_eig_closed_{i}"));
        row.push(closed(i));
    }
    columns.extend(["min_eig".into(), "verdict".into()]);
    row.extend([Cell::Num(report.min_eig), Cell::Text(report.verdict.to_string())]);

    match output.format {
        Format::Csv => {
            let mut table = Table::new(columns);
            table.push(row);
            table.csv(output.precision).map_err(Failure::usage)
        }
        Format::Json => {
            // Group the array-valued fields instead of flattening them.
            let p = output.precision;
            let nums = |xs: &[f64]| Value::Array(xs.iter().map(|&x| number_json(x, p)).collect());
            let amps: Vec<f64> = state.amps().iter().map(|z| z.re).collect();
            let value = json!({
                "phi": number_json(phi, p),
                "input": spec.name(),
                "alpha": number_json(alpha, p),
                "beta": number_json(beta, p),
                "amplitudes": nums(&amps),
                "fidelity": {
                    "a1": number_json(fidelities[0], p),
                    "a2": number_json(fidelities[1], p),
                    "a3": number_json(fidelities[2], p),
                },
                "pt_eigs_numeric": nums(&report.pt_eigs_numeric),
                "pt_eigs_closed": if spec.is_family() { nums(&report.pt_eigs_closed) } else { Value::from(FAMILY_ONLY) },
                "min_eig": number_json(report.min_eig, p),
                "verdict": report.verdict.to_string(),
            });
            json_bytes(&value).map_err(Failure::usage)
        }
    }
}

fn parse_inputs(list: &str) -> Result<Vec<InputSpec>, Failure> {
    let mut inputs = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec: InputSpec = name.parse()?;
        inputs.push(spec);
    }
    if inputs.is_empty() {
        return Err(Failure::usage("no inputs selected"));
    }
    Ok(inputs)
}

fn sweep_cells(r: &SweepRow) -> Vec<Cell> {
    vec![
        Cell::Num(r.phi),
        Cell::Text(r.input.name().into()),
        Cell::Num(r.a),
        Cell::Num(r.b),
        Cell::Num(r.c),
        Cell::Num(r.theta1),
        Cell::Num(r.clone_fidelity),
        Cell::Num(r.min_pt_eig_numeric),
        Cell::Num(r.min_pt_eig_closed),
        Cell::Text(r.verdict.to_string()),
    ]
}

fn sweep(cfg: &SweepConfig, output: &OutputArgs) -> Result<Vec<u8>, Failure> {
    let rows = run_sweep(cfg, Strategy::default())?;
    let mut table = Table::new(SWEEP_COLUMNS);
    for r in &rows {
        table.push(sweep_cells(r));
    }
    table
        .render(output.format, output.precision, false)
        .map_err(Failure::usage)
}

fn perturb(phi: f64, list: &str, output: &OutputArgs) -> Result<Vec<u8>, Failure> {
    let dts = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_angle)
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::usage)?;
    if dts.is_empty() {
        return Err(Failure::usage("no angle errors given"));
    }
    let mut table = Table::new(["dt", "f_closed", "f_simulated", "abs_difference"]);
    for dt in dts {
        let r = perturbation(phi, dt)?;
        table.push(vec![
            Cell::Num(dt),
            Cell::Num(r.f_closed),
            Cell::Num(r.f_simulated),
            Cell::Num(r.difference()),
        ]);
    }
    table
        .render(output.format, output.precision, false)
        .map_err(Failure::usage)
}

fn verify_text(report: &verify::Report) -> Vec<u8> {
    let mut text = String::new();
    for check in &report.checks {
        text.push_str(&format!("{check}\n"));
    }
    for note in &report.notes {
        text.push_str(&format!("note: {note}\n"));
    }
    let passed = report.checks.iter().filter(|c| c.passed()).count();
    text.push_str(&format!(
        "{}: {passed}/{} checks passed\n",
        if report.passed() { "PASS" } else { "FAIL" },
        report.checks.len()
    ));
    text.into_bytes()
}

fn verify_json(report: &verify::Report) -> Result<Vec<u8>, Failure> {
    let raw = |x: f64| serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            let bounds: Vec<Value> = c
                .bounds
                .iter()
                .map(|b| json!({ "label": b.label, "value": raw(b.value), "limit": raw(b.limit), "holds": b.holds() }))
                .collect();
            json!({ "name": c.name, "passed": c.passed(), "detail": c.detail, "bounds": bounds })
        })
        .collect();
    let value = json!({
        "passed": report.passed(),
        "first_failure": report.first_failure().map(|c| c.name),
        "checks": checks,
        "notes": report.notes,
    });
    json_bytes(&value).map_err(Failure::usage)
}
