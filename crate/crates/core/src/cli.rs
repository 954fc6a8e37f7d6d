//! Command implementations behind the `risense` binary.
//!
//! Angles are taken in degrees here and converted to radians before they
//! reach the library; every file artifact records radians.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::harness::{
    deploy, emit_outputs, emit_strategy_table, emit_sweep, load_scenario, read_measurements_csv,
    resolution_monte_carlo, run_scenario, run_strategy_sweep, run_sweep, run_with_measurements, simulate,
    standard_strategies, write_measurements_csv, Method, RunRecord, Scenario, SweepKind,
};
use crate::operator::Measurements;
use crate::spectral::{relative_error_bound, spectral_report, ResolutionQuery, DEFAULT_RANK_TOL};

#[derive(Debug, Parser)]
#[command(name = "risense", version, about = "RIS backward sensing: synthesis, reconstruction and conditioning analysis")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize measurements S = HE + n and write them as CSV.
    Forward(ForwardArgs),
    /// Recover the RoI field and write field, spectrum and metrics artifacts.
    Reconstruct(ReconstructArgs),
    /// Singular values, rank, condition number and rank bound of the operator.
    Spectrum(Common),
    /// Rerun a scenario over a parameter list and write a summary table.
    Sweep(SweepArgs),
    /// Two-source resolution bound, optionally checked by Monte-Carlo.
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML); the built-in four-panel example when omitted.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Override the noise level (measurement-domain SNR in dB).
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub common: Common,
    /// Keep only |S|.
    #[arg(long)]
    pub magnitude_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ls,
    Rwf,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub common: Common,
    /// Solver; defaults to the scenario's.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Use magnitude-only data.
    #[arg(long)]
    pub magnitude_only: bool,
    /// Reconstruct from a measurement CSV instead of synthesizing.
    #[arg(long, value_name = "CSV")]
    pub measurements: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Measurements,
    Elements,
    Strategy,
    Snr,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    pub kind: SweepArg,
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated sweep values; strategy names (I,II,...) for `strategy`.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub sweep: Option<Vec<String>>,
    /// Seeds per sweep point.
    #[arg(long, default_value_t = 5)]
    pub seeds: usize,
    /// Total elements split over the panels of each strategy.
    #[arg(long, default_value_t = 200)]
    pub total_elements: usize,
    /// Total snapshots split over the panels of each strategy.
    #[arg(long, default_value_t = 200)]
    pub total_snapshots: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    /// Incidence angle θ of the first source, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_deg: f64,
    /// Angular separation Δ, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_deg: f64,
    #[arg(long, default_value_t = 50)]
    pub elements: usize,
    /// Element spacing d, meters.
    #[arg(long, default_value_t = 0.005)]
    pub spacing: f64,
    /// Wavelength λ, meters.
    #[arg(long, default_value_t = 0.01)]
    pub wavelength: f64,
    #[arg(long, default_value_t = 500)]
    pub snapshots: usize,
    /// Receiver distance r^s, meters.
    #[arg(long, default_value_t = 10.0)]
    pub distance: f64,
    /// Element gain magnitude |τ|.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Field-domain SNR ‖E‖²/σ² in dB.
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub snr_db: f64,
    /// Run the Monte-Carlo check.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Process exit code for an error: 2 validation, 3 non-convergence, 4 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::NonConvergence { .. } => 3,
        Error::Io { .. } | Error::Csv(_) => 4,
        _ => 2,
    }
}

fn scenario(common: &Common) -> Result<Scenario> {
    let mut s = match &common.scenario {
        Some(p) => load_scenario(p)?,
        None => Scenario::table_one(),
    };
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(db) = common.snr_db {
        s.noise.snr_db = Some(db);
        s.noise.variance = None;
    }
    s.validate()?;
    Ok(s)
}

/// Runs a parsed command, printing a short report to stdout.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Forward(a) => forward(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Sweep(a) => sweep(a),
        Command::Bound(a) => bound(a),
    }
}

fn forward(a: &ForwardArgs) -> Result<()> {
    let mut scn = scenario(&a.common)?;
    if a.magnitude_only {
        // the solver choice does not matter for synthesis
        scn.solver.magnitude_only = true;
        scn.solver.method = Method::Rwf;
    }
    let dep = deploy(&scn)?;
    let meas = simulate(&scn, &dep)?;
    let path = a.common.out.join(format!("measurements_{}.csv", scn.short_hash()));
    write_measurements_csv(&meas, &path)?;
    println!("{} measurements -> {}", meas.values.len(), path.display());
    Ok(())
}

fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    let mut scn = scenario(&a.common)?;
    let imported = match &a.measurements {
        Some(path) => Some(read_measurements_csv(path)?),
        None => None,
    };
    let magnitude_only = a.magnitude_only || imported.as_ref().is_some_and(|v| v.is_magnitude_only());
    scn.solver.magnitude_only = magnitude_only || (imported.is_none() && scn.solver.magnitude_only);
    scn.solver.method = match a.method {
        Some(MethodArg::Ls) if magnitude_only => return Err(Error::MagnitudeOnly),
        Some(MethodArg::Ls) => Method::Ls,
        Some(MethodArg::Rwf) => Method::Rwf,
        None if scn.solver.magnitude_only => Method::Rwf,
        None => scn.solver.method,
    };
    scn.validate()?;
    let rec = match imported {
        Some(values) if magnitude_only => run_with_measurements(&scn, Measurements::Magnitude(values.magnitudes()))?,
        Some(values) => run_with_measurements(&scn, values)?,
        None => run_scenario(&scn)?,
    };
    let art = emit_outputs(&rec, &a.common.out)?;
    report(&rec);
    println!("field -> {}", art.field_csv.display());
    println!("metrics -> {}", art.metrics_json.display());
    if !rec.metrics.converged {
        let m = &rec.metrics;
        return Err(Error::NonConvergence {
            iterations: m.iterations,
            loss: m.residual,
        });
    }
    Ok(())
}

fn report(rec: &RunRecord) {
    let m = &rec.metrics;
    println!(
        "operator {}x{}  rank {} (bound {})  cond {:.3e}",
        m.rows, m.cols, m.rank, m.rank_bound, m.condition_number
    );
    println!(
        "relative error {:.4e}  SSIM {:.4}  iterations {}  converged {}",
        m.relative_error, m.ssim, m.iterations, m.converged
    );
    if let Some(doa) = &rec.doa {
        for p in &doa.peaks {
            println!("peak {:.2} deg  |E| {:.4e}", p.angle.to_degrees(), p.magnitude);
        }
    }
}

fn spectrum(a: &Common) -> Result<()> {
    let scn = scenario(a)?;
    let dep = deploy(&scn)?;
    let rep = spectral_report(&dep.operator, DEFAULT_RANK_TOL)?;
    let path = a.out.join(format!("spectrum_{}.csv", scn.short_hash()));
    write_spectrum(&rep.singular_values, &path)?;
    println!(
        "operator {}x{}  rank {} (bound {})  cond {:.3e}",
        rep.rows, rep.cols, rep.rank, rep.rank_bound, rep.condition_number
    );
    println!("spectrum -> {}", path.display());
    Ok(())
}

fn write_spectrum(sv: &[f64], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "sigma"])?;
    for (i, s) in sv.iter().enumerate() {
        w.write_record([i.to_string(), format!("{s:.17e}")])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn default_values(kind: SweepKind) -> Vec<f64> {
    match kind {
        SweepKind::Measurements => vec![10.0, 20.0, 50.0, 100.0],
        SweepKind::Elements => vec![20.0, 30.0, 40.0, 50.0],
        SweepKind::Snr => vec![0.0, 10.0, 20.0, 30.0, 40.0],
    }
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let scn = scenario(&a.common)?;
    let hash = scn.hash();
    let kind = match a.kind {
        SweepArg::Measurements => SweepKind::Measurements,
        SweepArg::Elements => SweepKind::Elements,
        SweepArg::Snr => SweepKind::Snr,
        SweepArg::Strategy => {
            let mut strategies = standard_strategies();
            if let Some(names) = &a.sweep {
                for n in names {
                    if !strategies.iter().any(|s| &s.name == n) {
                        return Err(Error::invalid(format!("unknown strategy {n:?}")));
                    }
                }
                strategies.retain(|s| names.contains(&s.name));
            }
            let rows = run_strategy_sweep(&scn, &strategies, a.total_elements, a.total_snapshots, a.seeds)?;
            let path = emit_strategy_table(&rows, &hash, &a.common.out)?;
            println!("strategy  landmarks  cond        rank   rel.error   SSIM");
            for r in &rows {
                println!(
                    "{:<9} {:<10} {:<11.3e} {:<6.1} {:<11.4e} {:.4}",
                    r.strategy, r.landmarks, r.condition_number, r.rank, r.relative_error, r.ssim
                );
            }
            println!("table -> {}", path.display());
            return Ok(());
        }
    };
    let values = match &a.sweep {
        Some(list) => list
            .iter()
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("sweep value {v:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => default_values(kind),
    };
    let rows = run_sweep(&scn, kind, &values, a.seeds)?;
    let path = emit_sweep(&rows, kind, &hash, &a.common.out)?;
    println!("{:<10} cond        rank   rel.error   SSIM", kind.name());
    for r in &rows {
        println!(
            "{:<10} {:<11.3e} {:<6.1} {:<11.4e} {:.4}",
            r.value, r.condition_number, r.rank, r.relative_error, r.ssim
        );
    }
    println!("table -> {}", path.display());
    Ok(())
}

fn bound(a: &BoundArgs) -> Result<()> {
    let q = ResolutionQuery {
        theta: a.theta_deg.to_radians(),
        delta: a.delta_deg.to_radians(),
        elements: a.elements,
        spacing: a.spacing,
        wavelength: a.wavelength,
        snapshots: a.snapshots,
        receiver_distance: a.distance,
        tau: a.tau,
        snr: 10f64.powf(a.snr_db / 10.0),
    };
    let b = relative_error_bound(&q)?;
    println!("bound {b:.12e}");
    if a.check {
        let res = resolution_monte_carlo(&q, &[q.delta], a.trials, a.seed)?;
        println!(
            "mean error {:.6e}  violation rate {:.3} over {} trials",
            res.mean_error[0].1,
            res.violation_rate,
            res.trials.len()
        );
    }
    Ok(())
}
