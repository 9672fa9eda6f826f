//! Experiment presets behind the `qcpmd` command line.
//!
//! Each preset reads a [`RunConfig`], writes its CSV/SVG files and a
//! `summary.json` into the output directory, and hands the in-memory results
//! back to the caller.

mod config;
pub mod output;
mod presets;

pub use config::{read_theta_file, Preset, RunConfig, ThetaInit, EQUILIBRIUM_R};
pub use presets::{
    preset_curve, preset_equilibrium, preset_quench, preset_variance_bench, preset_vqe, run_preset,
    CurveSummary, ModeSummary, PresetOutcome, RunSummary, Summary, VarianceBenchSummary,
    VarianceTrial, VqeTrial,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTable;

/// Environment variable capping how many trials run at once.
pub const THREADS_VAR: &str = "QCPMD_THREADS";

/// Worker threads requested through [`THREADS_VAR`]; 0 means sequential.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_VAR} must be a non-negative integer, got {s:?}"))),
    }
}

/// Maps `f` over `jobs`, on `threads` workers when non-zero. Results keep the
/// order of `jobs` either way.
pub(crate) fn map_jobs<J, T, F>(jobs: &[J], threads: usize, f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> Result<T> + Sync + Send,
{
    if threads == 0 || jobs.len() < 2 {
        return jobs.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| jobs.par_iter().map(f).collect())
}

/// The table named in `cfg`, or the built-in one.
pub fn load_table(cfg: &RunConfig) -> Result<HamiltonianTable> {
    match &cfg.hamiltonian_table {
        Some(path) => HamiltonianTable::load(path),
        None => Ok(HamiltonianTable::h2_sto3g()),
    }
}
