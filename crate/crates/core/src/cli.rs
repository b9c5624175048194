//! `susyco` command-line front end.
//!
//! Tabular commands (`sweep`, `paramgrid`) default to CSV, scalar reports to
//! JSON. Output goes to stdout, or atomically to `--out`. Exit status is 0 on
//! success, 1 for usage errors and 2 for numerical failures.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{fit_divergence, param_grid_classify, sweep, GridRange, SweepSpec};
use crate::error::SusyError;
use crate::observables::uncertainty;
use crate::sao::{classify, eigen_decompose, eigen_decompose_with_tol, KMatrix, Region, DEFAULT_CLASSIFY_TOL};
use crate::states::{
    degenerate_basis, degenerate_mus, fock_solve, generic_basis, generic_mus_basis, mixed_state, singular_state,
    to_fock_fixed, SuperState, DEFAULT_FOCK_CAP,
};

/// Overrides the default truncation cap.
pub const FOCK_CAP_ENV: &str = "SUSYCO_FOCK_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "susyco",
    version,
    about = "Supersymmetric coherent states: classification, states, uncertainties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; csv for sweep/paramgrid and json otherwise by default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest Fock order accepted by --fock-n.
    #[arg(long, global = true)]
    fock_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Basis {
    #[value(name = "A")]
    A,
    #[value(name = "C")]
    C,
    Plus,
    Minus,
    Mus,
    Singular,
    Fock,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Region and eigenvalues of K.
    Classify {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: KMatrix,
        /// Relative classification tolerance.
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
    },
    /// Coherent-term content and optional Fock coefficients of one state.
    State {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: KMatrix,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: C64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum)]
        basis: Basis,
        /// Fock truncation order.
        #[arg(long)]
        fock_n: Option<usize>,
        /// Free parameter a0 of the recursion (basis fock).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
        a0: C64,
        /// Free parameter c1 of the recursion (basis fock).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
        c1: C64,
    },
    /// Variances of the natural state for the region of K.
    Uncertainty {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: KMatrix,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: C64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// θ-family uncertainty over a (θ, |z|) grid.
    Sweep {
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        theta: GridRange,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        zmag: GridRange,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        zarg: f64,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// Power-law exponent of the uncertainty growth with |z|.
    Fit {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        zarg: f64,
        #[arg(long, default_value_t = 10.0)]
        zmin: f64,
        #[arg(long, default_value_t = 100.0)]
        zmax: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Region of K = [[1, k2], [k3, k4]] on a grid.
    Paramgrid {
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        k2: GridRange,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        k3: GridRange,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        k4: GridRange,
    },
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(v)
}

/// `re,im`
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let v = parse_reals(s, 2)?;
    Ok(C64::new(v[0], v[1]))
}

/// `k1,k2,k3,k4`, real entries.
pub fn parse_k(s: &str) -> Result<KMatrix, String> {
    let v = parse_reals(s, 4)?;
    KMatrix::real(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// `start:stop:count`
pub fn parse_range(s: &str) -> Result<GridRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:count, got {s:?}"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    let count = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("{:?}: {e}", parts[2]))?;
    GridRange::new(num(parts[0])?, num(parts[1])?, count).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<SusyError> for Failure {
    fn from(e: SusyError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Numeric(format!("csv: {e}"))
    }
}

/// A rendered result: either one JSON document or a table.
enum Output {
    Report(Value),
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `stdout` and diagnostics to `stderr`. Returns the exit status.
pub fn run_with_io<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let line = msg.lines().next().unwrap_or("usage error");
                    let _ = writeln!(stderr, "{line}");
                    1
                }
            };
        }
    };
    match execute(&cli, stderr).and_then(|out| emit(&cli, &out, stdout)) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            1
        }
        Err(Failure::Numeric(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_io(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn fock_cap(cli: &Cli) -> Result<usize, Failure> {
    if let Some(c) = cli.fock_cap {
        return Ok(c);
    }
    match std::env::var(FOCK_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("{FOCK_CAP_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_FOCK_CAP),
    }
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Output, Failure> {
    match &cli.command {
        Command::Classify { k, tol } => {
            let c = classify(k, *tol)?;
            let sp = eigen_decompose_with_tol(k, *tol);
            Ok(Output::Report(json!({
                "region": c.region.name(),
                "chi_plus": [sp.chi_plus.re, sp.chi_plus.im],
                "chi_minus": [sp.chi_minus.re, sp.chi_minus.im],
                "discriminant": [c.discriminant.re, c.discriminant.im],
                "degenerate": c.degenerate,
                "nilpotent": c.is_nilpotent(),
            })))
        }
        Command::State {
            k,
            z0,
            t,
            basis,
            fock_n,
            a0,
            c1,
        } => {
            let cap = fock_cap(cli)?;
            if let Some(n) = fock_n {
                if *n > cap {
                    return Err(Failure::Usage(format!("--fock-n {n} exceeds the truncation cap {cap}")));
                }
            }
            if *basis == Basis::Fock {
                let f = fock_solve(k, *z0, *a0, *c1, *t, fock_n.unwrap_or(40))?;
                return Ok(Output::Report(json!({ "basis": "fock", "fock": to_value(&f) })));
            }
            let s = build_state(k, *z0, *t, *basis)?;
            let mut v = json!({
                "label": to_value(&s.label),
                "z": [s.z().re, s.z().im],
                "upper": to_value(&s.upper),
                "lower": to_value(&s.lower),
            });
            if let Some(n) = fock_n {
                v["fock"] = to_value(&to_fock_fixed(&s, *n)?);
            }
            Ok(Output::Report(v))
        }
        Command::Uncertainty { k, z0, t, eta, lambda } => {
            let s = natural_state(k, *z0, *t, *eta, *lambda)?;
            let mut v = to_value(&uncertainty(&s)?);
            v["state"] = to_value(&s.label);
            v["region"] = json!(eigen_decompose(k).region.region.name());
            Ok(Output::Report(v))
        }
        Command::Sweep {
            theta,
            zmag,
            zarg,
            eta,
            lambda,
            t,
        } => {
            let spec = SweepSpec {
                theta_range: *theta,
                zmag_range: *zmag,
                zarg: *zarg,
                eta: *eta,
                lambda: *lambda,
                t: *t,
            };
            let rows = sweep(&spec)?;
            let flagged = rows.iter().filter(|r| r.error.is_some()).count();
            if flagged > 0 {
                let _ = writeln!(
                    stderr,
                    "warning: {flagged} grid point(s) could not be evaluated and are written as NaN"
                );
            }
            let table = rows
                .iter()
                .map(|r| {
                    [r.theta, r.zmag, r.zarg, r.var_xi, r.var_mu, r.product]
                        .map(num)
                        .to_vec()
                })
                .collect();
            Ok(Output::Table {
                header: vec!["theta", "zmag", "zarg", "var_xi", "var_mu", "product"],
                rows: table,
            })
        }
        Command::Fit {
            theta,
            zarg,
            zmin,
            zmax,
            points,
            eta,
            lambda,
        } => {
            let f = fit_divergence(*theta, *zarg, (*zmin, *zmax), *points, *eta, *lambda)?;
            Ok(Output::Report(to_value(&f)))
        }
        Command::Paramgrid { k2, k3, k4 } => {
            let g = param_grid_classify(k2, k3, k4)?;
            let rows = g
                .voxels
                .iter()
                .map(|v| vec![num(v.k2), num(v.k3), num(v.k4), v.region.name().to_string()])
                .collect();
            Ok(Output::Table {
                header: vec!["k2", "k3", "k4", "region"],
                rows,
            })
        }
    }
}

fn build_state(k: &KMatrix, z0: C64, t: f64, basis: Basis) -> Result<SuperState, SusyError> {
    let region = eigen_decompose(k).region.region;
    Ok(match basis {
        Basis::A | Basis::C => {
            let (za, zc) = if region == Region::Degenerate {
                degenerate_basis(k, z0, t)?
            } else {
                generic_basis(k, z0, t)?
            };
            if basis == Basis::A {
                za
            } else {
                zc
            }
        }
        Basis::Plus => generic_mus_basis(k, z0, t)?.0,
        Basis::Minus => generic_mus_basis(k, z0, t)?.1,
        Basis::Mus => degenerate_mus(k, z0, t)?,
        Basis::Singular => singular_state(k, z0, t)?,
        Basis::Fock => unreachable!("handled by the recursion branch"),
    })
}

/// Mixed state in the generic region, `Z_s` when singular, `Z_MUS^d` when
/// degenerate.
pub fn natural_state(k: &KMatrix, z0: C64, t: f64, eta: f64, lambda: f64) -> Result<SuperState, SusyError> {
    match eigen_decompose(k).region.region {
        Region::GenericBounded | Region::GenericUnbounded => mixed_state(k, z0, t, eta, lambda),
        Region::Singular => singular_state(k, z0, t),
        Region::Degenerate => degenerate_mus(k, z0, t),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |s: &str| {
        if prefix.is_empty() {
            s.to_string()
        } else {
            format!("{prefix}.{s}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::Number(n) => out.push((prefix.to_string(), n.as_f64().map(num).unwrap_or_else(|| n.to_string()))),
        Value::Null => out.push((prefix.to_string(), "NaN".into())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

fn render(out: &Output, format: Format) -> Result<Vec<u8>, Failure> {
    match (out, format) {
        (Output::Report(v), Format::Json) => {
            let mut s = serde_json::to_vec_pretty(v).map_err(|e| Failure::Numeric(e.to_string()))?;
            s.push(b'\n');
            Ok(s)
        }
        (Output::Report(v), Format::Csv) => {
            let mut cells = Vec::new();
            flatten("", v, &mut cells);
            write_csv(
                cells.iter().map(|c| c.0.as_str()),
                std::iter::once(cells.iter().map(|c| c.1.clone()).collect()),
            )
        }
        (Output::Table { header, rows }, Format::Csv) => write_csv(header.iter().copied(), rows.iter().cloned()),
        (Output::Table { header, rows }, Format::Json) => {
            let objs: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| {
                                let cell = c.parse::<f64>().ok().and_then(serde_json::Number::from_f64);
                                (h.to_string(), cell.map(Value::Number).unwrap_or_else(|| json!(c)))
                            })
                            .collect(),
                    )
                })
                .collect();
            render(&Output::Report(Value::Array(objs)), Format::Json)
        }
    }
}

fn write_csv<'a>(
    header: impl Iterator<Item = &'a str>,
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))
}

fn emit(cli: &Cli, out: &Output, stdout: &mut dyn Write) -> Result<(), Failure> {
    let default = match out {
        Output::Table { .. } => Format::Csv,
        Output::Report(_) => Format::Json,
    };
    let bytes = render(out, cli.format.unwrap_or(default))?;
    match &cli.out {
        Some(path) => write_atomic(path, &bytes).map_err(|e| failure_at(path, e)),
        None => Ok(stdout.write_all(&bytes)?),
    }
}

fn failure_at(path: &Path, e: impl Display) -> Failure {
    Failure::Numeric(format!("writing {}: {e}", path.display()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
