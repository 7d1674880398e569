//! Command-line front end for the `polydot` binary.
//!
//! Exit codes:
//!
//! | code | meaning                                          |
//! |------|--------------------------------------------------|
//! | 0    | success                                          |
//! | 2    | invalid arguments, parameters or input files     |
//! | 3    | output file cannot be written                    |
//! | 4    | `run` self-check against the dense product failed |
//! | 5    | `audit` found a rank-deficient mask structure    |
//! | 6    | `verify` found a discrepancy                     |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::counts::{best_scheme, n_polydot_with_region, Baseline, Region, WorkerCountReport};
use crate::field::FieldModulus;
use crate::matrix::Matrix;
use crate::powersets::SchemeParams;
use crate::protocol::{audit_privacy, run_protocol, MaskCheck, ProtocolConfig};
use crate::rng::{stream, Role};
use crate::shares::MaskPolicy;
use crate::verify::{verify_grid_with, Grid};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_UNWRITABLE: u8 = 3;
pub const EXIT_SELF_CHECK: u8 = 4;
pub const EXIT_AUDIT: u8 = 5;
pub const EXIT_VERIFY: u8 = 6;

pub const CSV_HEADER: &str = "s,t,z,n_polydot,region,n_entangled,n_ssmm,n_gcsa,winner";

#[derive(Debug, Parser)]
#[command(
    name = "polydot",
    version,
    about = "PolyDot coded multi-party matrix multiplication"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the worker counts of all four schemes for one parameter triple.
    Count(CountArgs),
    /// Write worker counts over a z range or over all shapes with a fixed s*t.
    Sweep(SweepArgs),
    /// Run the protocol on two matrix files and write Y = A^T B.
    Run(RunArgs),
    /// Compare the closed-form count with the support oracle over a grid.
    Verify(VerifyArgs),
    /// Run the protocol on random inputs and audit z-subsets for privacy.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub z: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    /// Fixed z for a shape sweep.
    #[arg(long)]
    pub z: Option<u64>,
    #[arg(long)]
    pub zmin: Option<u64>,
    #[arg(long)]
    pub zmax: Option<u64>,
    /// Sweep every (s, t) with s*t equal to this product.
    #[arg(long)]
    pub product: Option<u64>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub z: u64,
    #[arg(long, env = "POLYDOT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Expected modulus; must agree with the input files.
    #[arg(long)]
    pub q: Option<u64>,
    /// Output matrix file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    pub smax: u64,
    #[arg(long, default_value_t = 6)]
    pub tmax: u64,
    /// Skip shapes with s*t above this bound.
    #[arg(long)]
    pub product: Option<u64>,
    /// z runs from 1 to 2ts + zpad.
    #[arg(long, default_value_t = 5)]
    pub zpad: u64,
    #[arg(long, hide = true)]
    pub mutate_psi3: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub z: u64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, env = "POLYDOT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub subsets: usize,
    /// Reuse one mask per source so the audit must fail.
    #[arg(long, hide = true)]
    pub corrupt_shares: bool,
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn invalid(e: impl ToString) -> Self {
        Self::new(EXIT_INVALID, e.to_string())
    }
}

pub type CliResult = std::result::Result<(), CliError>;

pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Count(a) => cmd_count(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Run(a) => cmd_run(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Audit(a) => cmd_audit(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new(EXIT_UNWRITABLE, format!("cannot write output: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| {
        CliError::new(
            EXIT_UNWRITABLE,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn modulus(q: Option<u64>) -> Result<FieldModulus, CliError> {
    q.map_or(Ok(FieldModulus::mersenne61()), |q| {
        FieldModulus::new(q).map_err(CliError::invalid)
    })
}

pub fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> CliResult {
    let params = SchemeParams::new(args.s, args.t, args.z).map_err(CliError::invalid)?;
    let r = best_scheme(&params).map_err(CliError::invalid)?;
    let text = format!(
        "{params}\npolydot={}\nregion={}\nentangled={}\nssmm={}\ngcsa={}\nwinner={}\n",
        r.n_polydot,
        r.region.symbol(),
        r.n_entangled,
        r.n_ssmm,
        r.n_gcsa,
        r.winner
    );
    emit(out, &text)
}

#[derive(Serialize)]
struct SweepRow {
    s: u64,
    t: u64,
    z: u64,
    n_polydot: u64,
    region: &'static str,
    n_entangled: u64,
    n_ssmm: u64,
    n_gcsa: u64,
    winner: &'static str,
}

impl From<&WorkerCountReport> for SweepRow {
    fn from(r: &WorkerCountReport) -> Self {
        Self {
            s: r.params.s(),
            t: r.params.t(),
            z: r.params.z(),
            n_polydot: r.n_polydot,
            region: r.region.label(),
            n_entangled: r.n_entangled,
            n_ssmm: r.n_ssmm,
            n_gcsa: r.n_gcsa,
            winner: r.winner.name(),
        }
    }
}

/// Points of a sweep in output order.
pub fn sweep_points(args: &SweepArgs) -> Result<Vec<SchemeParams>, CliError> {
    let points: Vec<(u64, u64, u64)> = match args.product {
        Some(product) => {
            if args.s.is_some() || args.t.is_some() || args.zmin.is_some() || args.zmax.is_some() {
                return Err(CliError::invalid(
                    "a shape sweep takes only --product and --z",
                ));
            }
            let z = args
                .z
                .ok_or_else(|| CliError::invalid("a shape sweep needs --z"))?;
            (1..=product)
                .filter(|s| product % s == 0)
                .map(|s| (s, product / s, z))
                .collect()
        }
        None => {
            let (Some(s), Some(t)) = (args.s, args.t) else {
                return Err(CliError::invalid("a z sweep needs --s and --t"));
            };
            if args.z.is_some() {
                return Err(CliError::invalid(
                    "a z sweep takes --zmin and --zmax, not --z",
                ));
            }
            let zmin = args.zmin.unwrap_or(1);
            let zmax = args
                .zmax
                .ok_or_else(|| CliError::invalid("a z sweep needs --zmax"))?;
            (zmin..=zmax).map(|z| (s, t, z)).collect()
        }
    };
    if points.is_empty() {
        return Err(CliError::invalid("the sweep range is empty"));
    }
    points
        .into_iter()
        .map(|(s, t, z)| SchemeParams::new(s, t, z).map_err(CliError::invalid))
        .collect()
}

/// Renders the sweep as CSV text with LF line endings.
pub fn sweep_csv(points: &[SchemeParams]) -> Result<String, CliError> {
    let reports = points
        .par_iter()
        .map(best_scheme)
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(CliError::invalid)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in &reports {
        w.serialize(SweepRow::from(r)).map_err(CliError::invalid)?;
    }
    let bytes = w.into_inner().map_err(CliError::invalid)?;
    String::from_utf8(bytes).map_err(CliError::invalid)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let csv = sweep_csv(&sweep_points(args)?)?;
    match &args.out {
        Some(path) => write_file(path, csv.as_bytes()),
        None => emit(out, &csv),
    }
}

fn read_matrix(path: &Path) -> Result<(Matrix, FieldModulus), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    Matrix::parse_text(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> CliResult {
    let params = SchemeParams::new(args.s, args.t, args.z).map_err(CliError::invalid)?;
    let (a, qa) = read_matrix(&args.a)?;
    let (b, qb) = read_matrix(&args.b)?;
    if qa != qb || args.q.is_some_and(|q| q != qa.q()) {
        return Err(CliError::invalid(
            "input files and --q disagree on the modulus",
        ));
    }
    if a.shape() != b.shape() {
        return Err(CliError::invalid("input matrices have different sizes"));
    }
    let config = ProtocolConfig::new(params, a.rows(), qa, args.seed).map_err(CliError::invalid)?;
    let (y, _) = run_protocol(&a, &b, &config).map_err(CliError::invalid)?;
    let dense = a.transpose().mul(&qa, &b).map_err(CliError::invalid)?;
    let ok = dense == y;
    let mut summary = format!(
        "N={}\nmaster_evaluations={}\nself_check={}\n",
        config.workers,
        config.master_evaluations(),
        if ok { "ok" } else { "FAILED" }
    );
    match &args.out {
        Some(path) => write_file(path, y.to_text(&qa).as_bytes())?,
        None => summary.push_str(&y.to_text(&qa)),
    }
    emit(out, &summary)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_SELF_CHECK,
            "reconstructed output differs from the dense product",
        ))
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let grid = Grid {
        s_max: args.smax,
        t_max: args.tmax,
        max_product: args.product.unwrap_or(u64::MAX),
        z_pad: args.zpad,
    };
    if grid.s_max == 0 || grid.t_max == 0 {
        return Err(CliError::invalid("grid bounds must be at least 1"));
    }
    let mutate = args.mutate_psi3;
    let report = verify_grid_with(&grid, |p: &SchemeParams| {
        n_polydot_with_region(p).map(|(r, n)| {
            if mutate && r == Region::Psi3 {
                (r, n + 1)
            } else {
                (r, n)
            }
        })
    });

    let mut text = String::new();
    for f in &report.equivalence_failures {
        text.push_str(&format!(
            "equivalence {} region={} formula={} oracle={}\n",
            f.params, f.region, f.formula, f.oracle
        ));
    }
    for (p, e) in &report.dispatch_errors {
        text.push_str(&format!("dispatch {p} {e}\n"));
    }
    for p in &report.condition_failures {
        text.push_str(&format!("conditions {p}\n"));
    }
    for v in &report.lemma_violations {
        text.push_str(&format!(
            "lemma{} condition={} {} polydot={} {}={}\n",
            v.baseline.lemma(),
            v.condition,
            v.params,
            v.polydot,
            v.baseline.scheme(),
            v.baseline_count
        ));
    }
    for (b, gaps) in Baseline::ALL.iter().zip(report.completeness_gaps) {
        text.push_str(&format!("completeness_gaps lemma{}={gaps}\n", b.lemma()));
    }
    let discrepancies = report.equivalence_failures.len()
        + report.dispatch_errors.len()
        + report.condition_failures.len();
    text.push_str(&format!(
        "points={} discrepancies={discrepancies}\n",
        report.points
    ));
    if let Some(f) = report.equivalence_failures.first() {
        text.push_str(&format!("first_failure {}\n", f.params));
    }
    emit(out, &text)?;
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VERIFY,
            format!("{discrepancies} discrepancies"),
        ))
    }
}

pub fn cmd_audit(args: &AuditArgs, out: &mut dyn Write) -> CliResult {
    let params = SchemeParams::new(args.s, args.t, args.z).map_err(CliError::invalid)?;
    let q = modulus(args.q)?;
    let policy = if args.corrupt_shares {
        MaskPolicy::ReuseFirst
    } else {
        MaskPolicy::Fresh
    };
    let config = ProtocolConfig::new(params, args.m, q, args.seed)
        .map_err(CliError::invalid)?
        .with_mask_policy(policy);
    let mut rng = stream(args.seed, Role::Inputs);
    let a = Matrix::random(&q, args.m, args.m, &mut rng);
    let b = Matrix::random(&q, args.m, args.m, &mut rng);
    let (_, transcript) = run_protocol(&a, &b, &config).map_err(CliError::invalid)?;
    let report = audit_privacy(&transcript, &config, args.subsets);

    let mut text = format!(
        "N={}\nsubsets={}\npassed={}\nfailed={}\n",
        config.workers,
        report.subsets.len(),
        report.passed(),
        report.failed()
    );
    if let Some(bad) = report.subsets.iter().find(|s| !s.passed()) {
        let f = &bad.failures[0];
        let which = match f.check {
            MaskCheck::SourceA => "source_a".to_string(),
            MaskCheck::SourceB => "source_b".to_string(),
            MaskCheck::Worker(n) => format!("worker_{n}"),
        };
        text.push_str(&format!(
            "first_failure workers={:?} masks={which} rank={} required={}\n",
            bad.workers, f.rank, f.required
        ));
    }
    emit(out, &text)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_AUDIT,
            format!("{} subsets failed the audit", report.failed()),
        ))
    }
}
