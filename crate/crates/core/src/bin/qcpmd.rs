use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcpmd::hamiltonian::HamiltonianTable;
use qcpmd::pauli::ground_state_exact;
use qcpmd::runner::{self, Preset, RunConfig};
use qcpmd::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_FIXTURE: u8 = 2;
const EXIT_ABORT: u8 = 3;

#[derive(Parser)]
#[command(name = "qcpmd", version, about = "Bond-length dynamics driven by sampled quantum forces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment preset.
    Run {
        /// equilibrium, quench, variance-bench, vqe or curve
        #[arg(long)]
        preset: Preset,
        /// `key = value` overrides
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default qcpmd-out/<preset>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a coefficient table and print what it contains.
    Validate {
        #[arg(long)]
        table: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are configuration errors; --help and --version are not errors.
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run {
            preset,
            config,
            seed,
            out,
        } => run(preset, config, seed, out),
        Command::Validate { table } => validate(table),
    }
}

fn run(preset: Preset, config: Option<PathBuf>, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let cfg = match config {
        Some(path) => RunConfig::load(preset, &path),
        None => Ok(RunConfig::preset(preset)),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, &e),
    };
    if let Some(s) = seed {
        cfg.dynamics.seed = s;
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    if let Err(e) = runner::threads_from_env() {
        return fail(EXIT_CONFIG, &e);
    }
    let table = match runner::load_table(&cfg) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_FIXTURE, &e),
    };
    let outcome = match preset {
        Preset::Equilibrium => runner::preset_equilibrium(&cfg, &table),
        Preset::Quench => runner::preset_quench(&cfg, &table),
        Preset::VarianceBench => runner::preset_variance_bench(&cfg),
        Preset::Vqe => runner::preset_vqe(&cfg, &table),
        Preset::Curve => runner::preset_curve(&cfg, &table),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e @ (Error::OutOfRange { .. } | Error::NotConverged { .. })) => return fail(EXIT_ABORT, &e),
        Err(e) => return fail(EXIT_CONFIG, &e),
    };

    let s = &outcome.summary;
    for run in &s.runs {
        println!(
            "{:<20} mean R {:.4} A  std {:.4} A  preparations {}{}",
            run.label,
            run.stats.mean_r,
            run.stats.std_r,
            run.stats.preparations,
            run.stats.abort_reason.as_deref().map(|r| format!("  ABORTED: {r}")).unwrap_or_default()
        );
    }
    for m in s.modes.iter().filter(|m| m.trials > 1) {
        println!(
            "{:<20} grand mean R {:.4} A over {} of {} trials",
            m.estimator.name(),
            m.grand_mean_r,
            m.completed,
            m.trials
        );
    }
    for v in &s.vqe {
        println!(
            "vqe trial {}: E = {:.8} Ha, gap {:.2e} Ha, {} iterations{}",
            v.trial,
            v.energy,
            v.energy_gap,
            v.iterations,
            if v.converged { "" } else { ", not converged" }
        );
    }
    if let Some(b) = &s.variance_bench {
        println!(
            "{} variance: direct {:.4}, shadows {:.4} (min ratio {:.2})",
            b.observable, b.direct_variance, b.shadow_variance, b.min_ratio
        );
    }
    if let Some(c) = &s.curve {
        println!("minimum {:.8} Ha at R = {} A", c.min_energy, c.argmin_r);
    }
    println!("wrote {} files to {}", outcome.files.len(), cfg.output_dir.display());
    if s.aborted {
        ExitCode::from(EXIT_ABORT)
    } else {
        ExitCode::SUCCESS
    }
}

fn validate(path: PathBuf) -> ExitCode {
    let table = match HamiltonianTable::load(&path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_FIXTURE, &e),
    };
    let (lo, hi) = table.range();
    println!(
        "{}: {} qubits, {} words, {} points over [{lo}, {hi}] A",
        path.display(),
        table.num_qubits(),
        table.words().len(),
        table.grid().len()
    );
    if !table.words().iter().any(|w| w.is_identity()) {
        println!("warning: no identity column, energies exclude the constant shift");
    }
    let mut best = (f64::NAN, f64::INFINITY);
    for &r in table.grid() {
        match table.hamiltonian_at(r).and_then(|h| ground_state_exact(&h)) {
            Ok((e, _)) if e < best.1 => best = (r, e),
            Ok(_) => {}
            Err(e) => return fail(EXIT_FIXTURE, &e),
        }
    }
    println!("ground-energy minimum {:.8} Ha at R = {} A", best.1, best.0);
    if best.0 == lo || best.0 == hi {
        println!("warning: minimum sits on the edge of the grid");
    }
    ExitCode::SUCCESS
}

fn fail(code: u8, e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}
