use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use imlab::injection::Waveform;
use imlab::lab::experiments::{self, PointStatus};
use imlab::lab::output::{write_csv, Metadata, Table};
use imlab::lab::scenario::{run_scenario, Scenario};
use imlab::lab::{plot, tables, with_threads, LabConfig};
use imlab::{Error, Vec2};

/// Saturated induction-motor laboratory: saliency characterization,
/// observability sweeps, averaging convergence and scenario simulation.
#[derive(Parser)]
#[command(name = "imlab", version)]
struct Cli {
    /// Configuration file (dotted `section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long, global = true)]
    plot: bool,
    #[arg(long, global = true, value_enum)]
    waveform: Option<WaveformArg>,
    /// Injection frequency (Hz).
    #[arg(long = "omega-hz", global = true)]
    omega_hz: Option<f64>,
    /// Injection amplitude (V); the configured direction is kept.
    #[arg(long = "inject-amp", global = true)]
    inject_amp: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveformArg {
    Square,
    Sine,
}

#[derive(Subcommand)]
enum Command {
    /// Saliency (a, b, sigma): simulated injection vs. direct Hessian.
    Characterize,
    /// Condition numbers of Os and Os' along the zero stator speed line.
    Observability {
        /// Per-unit scaling of the matrices.
        #[arg(long)]
        per_unit: bool,
    },
    /// HF extraction error against injection frequency.
    Convergence,
    /// Simulate a scenario file and write the trajectory.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load_config(cli: &Cli) -> imlab::Result<LabConfig> {
    let mut cfg = match &cli.config {
        Some(path) => LabConfig::load(path)?,
        None => LabConfig::default(),
    };
    match cli.waveform {
        Some(WaveformArg::Square) => cfg.injection.waveform = Waveform::Square,
        Some(WaveformArg::Sine) => cfg.injection.waveform = Waveform::Sine,
        None => {}
    }
    if let Some(f) = cli.omega_hz {
        cfg.injection.omega_hz = f;
    }
    if let Some(v) = cli.inject_amp {
        let norm = cfg.injection.u_tilde.norm();
        let dir = if norm > 0.0 { cfg.injection.u_tilde / norm } else { Vec2::new(1.0, 0.0) };
        cfg.injection.u_tilde = dir * v;
    }
    if let Command::Observability { per_unit: true } = cli.command {
        cfg.observability.per_unit = true;
    }
    cfg.injection.validate().map_err(|e| Error::Config { line: None, message: e.to_string() })?;
    Ok(cfg)
}

fn emit(cli: &Cli, cfg: &LabConfig, name: &str, table: &Table, script: fn(&str) -> String) -> imlab::Result<PathBuf> {
    std::fs::create_dir_all(&cli.out)?;
    let csv = format!("{name}.csv");
    let path = cli.out.join(&csv);
    write_csv(&path, &Metadata::now(name, &cfg.sha256()), table)?;
    if cli.plot {
        std::fs::write(cli.out.join(format!("{name}.gp")), script(&csv))?;
    }
    Ok(path)
}

fn run(cli: &Cli) -> imlab::Result<()> {
    let cfg = load_config(cli)?;
    let wrote = |p: &Path| println!("wrote {}", p.display());
    match &cli.command {
        Command::Characterize => {
            let rows = with_threads(cli.parallel, || experiments::characterize(&cfg))??;
            let failed = rows.iter().filter(|r| r.status != PointStatus::Ok).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} points failed (see status column)", rows.len());
            }
            let worst = rows.iter().map(|r| r.err_a.max(r.err_b)).filter(|e| e.is_finite()).fold(0.0, f64::max);
            println!("{} points, worst relative a/b discrepancy {worst:.3e}", rows.len());
            wrote(&emit(cli, &cfg, "characterize", &tables::characterize_table(&rows), plot::characterize)?);
        }
        Command::Observability { .. } => {
            let rows = with_threads(cli.parallel, || experiments::observability(&cfg))??;
            let feasible = rows.iter().filter(|r| r.sweep.feasible).count();
            println!("{feasible} of {} grid points feasible", rows.len());
            wrote(&emit(cli, &cfg, "observability", &tables::observability_table(&rows), plot::observability)?);
        }
        Command::Convergence => {
            let study = with_threads(cli.parallel, || experiments::convergence(&cfg))??;
            for (r, ratio) in study.rows.iter().zip(std::iter::once(f64::NAN).chain(study.ratios.iter().copied())) {
                println!("{:>8} Hz  hf error {:.3e}  ratio {:.3}", r.omega_hz, r.hf_rel_err, ratio);
            }
            wrote(&emit(cli, &cfg, "convergence", &tables::convergence_table(&study), plot::convergence)?);
        }
        Command::Simulate { scenario } => {
            let scenario = Scenario::load(scenario)?;
            let (traj, demod) = run_scenario(&cfg, &scenario)?;
            println!("{} samples", traj.len());
            wrote(&emit(cli, &cfg, "trajectory", &tables::trajectory_table(&traj, &demod), plot::trajectory)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() || matches!(e, Error::Io(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
