use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::Serialize;

use super::config::{read_theta_file, Preset, RunConfig, ThetaInit};
use super::output::{self, write_file};
use super::{load_table, map_jobs, threads_from_env};
use crate::dynamics::{mean_std, run_trajectory, DynamicsConfig, Estimator, MDState, Trajectory, TrajectorySummary};
use crate::error::{ensure_dim, Error, Result};
use crate::hamiltonian::HamiltonianTable;
use crate::pauli::{ground_state_exact, pauli_expectation, Pauli, PauliWord};
use crate::rng::{self, derive_seed};
use crate::shadow::{collect_snapshots, direct_pauli_estimate, estimate_pauli_mom};
use crate::statevector::{prepare_ansatz_state, AnsatzConfig};
use crate::vqe::vqe_optimize;

// Stream indices below the root seed.
const STREAM_TRIAL: u64 = 1;
const STREAM_THETA: u64 = 2;
const STREAM_VQE: u64 = 3;
const STREAM_BENCH: u64 = 4;

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub estimator: Estimator,
    pub trial: usize,
    pub seed: u64,
    pub initial_r: f64,
    pub file: String,
    #[serde(flatten)]
    pub stats: TrajectorySummary,
}

/// Per-estimator aggregate over trials.
#[derive(Clone, Debug, Serialize)]
pub struct ModeSummary {
    pub estimator: Estimator,
    pub trials: usize,
    /// Trials that ran to the end.
    pub completed: usize,
    /// Post-burn-in mean R of each trial, `null` where it aborted early.
    pub trial_means: Vec<f64>,
    /// Mean of the finite entries of `trial_means`.
    pub grand_mean_r: f64,
    pub mean_trajectory_file: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VqeTrial {
    pub trial: usize,
    pub converged: bool,
    pub energy: f64,
    pub energy_gap: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceTrial {
    pub trial: usize,
    pub exact: f64,
    pub direct_mean: f64,
    pub direct_variance: f64,
    pub shadow_mean: f64,
    pub shadow_variance: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceBenchSummary {
    pub observable: String,
    pub repetitions: usize,
    pub shots: usize,
    pub snapshots: usize,
    pub groups: usize,
    pub trials: Vec<VarianceTrial>,
    pub direct_variance: f64,
    pub shadow_variance: f64,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveSummary {
    pub points: usize,
    pub argmin_r: f64,
    pub min_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub preset: Preset,
    pub seed: u64,
    pub total_preparations: u64,
    pub aborted: bool,
    pub runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vqe: Vec<VqeTrial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_bench: Option<VarianceBenchSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSummary>,
}

impl Summary {
    fn new(cfg: &RunConfig) -> Self {
        Self {
            preset: cfg.preset,
            seed: cfg.dynamics.seed,
            total_preparations: 0,
            aborted: false,
            runs: Vec::new(),
            modes: Vec::new(),
            vqe: Vec::new(),
            variance_bench: None,
            curve: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PresetOutcome {
    pub summary: Summary,
    /// One entry per `summary.runs` element.
    pub trajectories: Vec<Trajectory>,
    pub files: Vec<PathBuf>,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<String> {
        let path = self.dir.join(name);
        write_file(&path, contents)?;
        self.files.push(path);
        Ok(name.to_string())
    }

    fn finish(mut self, summary: Summary, trajectories: Vec<Trajectory>) -> Result<PresetOutcome> {
        self.put("summary.json", &output::json(&summary)?)?;
        Ok(PresetOutcome {
            summary,
            trajectories,
            files: self.files,
        })
    }
}

/// Runs the preset named in `cfg` against its configured table.
pub fn run_preset(cfg: &RunConfig) -> Result<PresetOutcome> {
    cfg.validate()?;
    let table = load_table(cfg)?;
    match cfg.preset {
        Preset::Equilibrium => preset_equilibrium(cfg, &table),
        Preset::Quench => preset_quench(cfg, &table),
        Preset::VarianceBench => preset_variance_bench(cfg),
        Preset::Vqe => preset_vqe(cfg, &table),
        Preset::Curve => preset_curve(cfg, &table),
    }
}

fn random_angles(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * TAU).collect()
}

fn check_ansatz(table: &HamiltonianTable, ansatz: &AnsatzConfig) -> Result<()> {
    if table.num_qubits() != ansatz.n {
        return Err(Error::Config(format!(
            "table acts on {} qubits but the occupation string has {}",
            table.num_qubits(),
            ansatz.n
        )));
    }
    Ok(())
}

/// Stable per-kind index so seeds do not depend on the order estimators are listed in.
fn estimator_index(e: &Estimator) -> u64 {
    match e {
        Estimator::Shadows { .. } => 0,
        Estimator::Direct { .. } => 1,
        Estimator::Exact => 2,
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(derive_seed(seed, STREAM_TRIAL), trial as u64)
}

fn vqe_start(cfg: &RunConfig, table: &HamiltonianTable, trial: usize) -> Result<crate::vqe::VqeResult> {
    let ansatz = &cfg.dynamics.ansatz;
    let mut rng = rng::stream(cfg.dynamics.seed, &[STREAM_VQE, trial as u64]);
    let init = random_angles(ansatz.parameter_count(), &mut rng);
    vqe_optimize(table, cfg.initial_r, ansatz, &init, cfg.vqe_tol)
}

/// Case 1: trajectories started at rest from the VQE optimum at 0.735 A.
pub fn preset_equilibrium(cfg: &RunConfig, table: &HamiltonianTable) -> Result<PresetOutcome> {
    dynamics_preset(cfg, table)
}

/// Case 2: trajectories from R = 1.0 A with random parameters, one parameter
/// set per trial shared by every estimator mode.
pub fn preset_quench(cfg: &RunConfig, table: &HamiltonianTable) -> Result<PresetOutcome> {
    dynamics_preset(cfg, table)
}

fn dynamics_preset(cfg: &RunConfig, table: &HamiltonianTable) -> Result<PresetOutcome> {
    cfg.validate()?;
    let ansatz = &cfg.dynamics.ansatz;
    check_ansatz(table, ansatz)?;
    table.check_range(cfg.initial_r)?;
    let seed = cfg.dynamics.seed;
    let mut summary = Summary::new(cfg);

    let thetas: Vec<Vec<f64>> = match &cfg.initial_theta {
        ThetaInit::Vqe => {
            let res = vqe_start(cfg, table, 0)?;
            summary.vqe.push(VqeTrial {
                trial: 0,
                converged: true,
                energy: res.energy,
                energy_gap: res.energy - res.ground_energy,
                iterations: res.iterations,
            });
            vec![res.theta; cfg.trials]
        }
        ThetaInit::Random => (0..cfg.trials)
            .map(|t| {
                let mut rng = rng::stream(trial_seed(seed, t), &[STREAM_THETA]);
                random_angles(ansatz.parameter_count(), &mut rng)
            })
            .collect(),
        ThetaInit::File(path) => {
            let theta = read_theta_file(path)?;
            ensure_dim(ansatz.parameter_count(), theta.len())?;
            vec![theta; cfg.trials]
        }
    };

    let jobs: Vec<(usize, Estimator)> = (0..cfg.trials)
        .flat_map(|t| cfg.estimators.iter().map(move |e| (t, *e)))
        .collect();
    let run_seed = |t: usize, e: &Estimator| derive_seed(trial_seed(seed, t), estimator_index(e));
    let trajectories = map_jobs(&jobs, threads_from_env()?, |(t, e)| {
        let dc = DynamicsConfig {
            estimator: *e,
            seed: run_seed(*t, e),
            ..cfg.dynamics.clone()
        };
        run_trajectory(&dc, MDState::at_rest(cfg.initial_r, thetas[*t].clone()), table)
    })?;

    let mut w = Writer::new(&cfg.output_dir)?;
    let label = |t: usize, e: &Estimator| {
        if cfg.trials == 1 {
            e.name().to_string()
        } else {
            format!("{}_trial{t}", e.name())
        }
    };
    for ((t, e), traj) in jobs.iter().zip(&trajectories) {
        let name = label(*t, e);
        let file = w.put(&format!("trajectory_{name}.csv"), &output::trajectory_csv(&traj.records))?;
        let sampled = traj
            .records
            .iter()
            .filter(|r| r.time_fs - traj.records[0].time_fs >= cfg.dynamics.burn_in - 1e-9)
            .map(|r| r.r);
        let title = format!("{name}: post-burn-in bond length");
        w.put(&format!("histogram_{name}.svg"), &output::histogram_svg(&title, &output::histogram(sampled)))?;
        summary.total_preparations += traj.summary.preparations;
        summary.aborted |= traj.summary.aborted;
        summary.runs.push(RunSummary {
            label: name,
            estimator: *e,
            trial: *t,
            seed: run_seed(*t, e),
            initial_r: cfg.initial_r,
            file,
            stats: traj.summary.clone(),
        });
    }

    for e in &cfg.estimators {
        let mine: Vec<&Trajectory> = jobs
            .iter()
            .zip(&trajectories)
            .filter(|((_, je), _)| je == e)
            .map(|(_, tr)| tr)
            .collect();
        let trial_means: Vec<f64> = mine.iter().map(|tr| tr.summary.mean_r).collect();
        let (grand_mean_r, _, _) = mean_std(trial_means.iter().copied().filter(|m| m.is_finite()));
        let mean_trajectory_file = if cfg.trials > 1 {
            Some(w.put(&format!("mean_trajectory_{}.csv", e.name()), &mean_trajectory_csv(&mine))?)
        } else {
            None
        };
        let series: Vec<&[_]> = mine.iter().map(|tr| tr.records.as_slice()).collect();
        w.put(
            &format!("trajectories_{}.svg", e.name()),
            &output::trajectories_svg(&format!("{}: bond length", e.name()), &series),
        )?;
        summary.modes.push(ModeSummary {
            estimator: *e,
            trials: mine.len(),
            completed: mine.iter().filter(|tr| !tr.summary.aborted).count(),
            trial_means,
            grand_mean_r,
            mean_trajectory_file,
        });
    }
    w.finish(summary, trajectories)
}

/// Average over trials at each step, over the trials that reached it.
fn mean_trajectory_csv(trials: &[&Trajectory]) -> String {
    let longest = trials.iter().map(|t| t.records.len()).max().unwrap_or(0);
    let mut out = String::from("step,time_fs,mean_R_angstrom,trials\n");
    for i in 0..longest {
        let at: Vec<_> = trials.iter().filter_map(|t| t.records.get(i)).collect();
        let mean = at.iter().map(|r| r.r).sum::<f64>() / at.len() as f64;
        out.push_str(&format!("{},{},{},{}\n", at[0].step, at[0].time_fs, mean, at.len()));
    }
    out
}

/// Repeated estimates of `Z` on qubit 0 for random parameter sets, by direct
/// measurement and by median-of-means shadows.
pub fn preset_variance_bench(cfg: &RunConfig) -> Result<PresetOutcome> {
    cfg.validate()?;
    let ansatz = &cfg.dynamics.ansatz;
    let seed = cfg.dynamics.seed;
    let shots = cfg
        .estimators
        .iter()
        .find_map(|e| match e {
            Estimator::Direct { shots } => Some(*shots),
            _ => None,
        })
        .unwrap_or(51);
    let (snapshots, groups) = cfg
        .estimators
        .iter()
        .find_map(|e| match e {
            Estimator::Shadows { snapshots, groups } => Some((*snapshots, *groups)),
            _ => None,
        })
        .unwrap_or((51, 3));
    let word = PauliWord::single(ansatz.n, 0, Pauli::Z);
    let reps = cfg.repetitions;

    let jobs: Vec<usize> = (0..cfg.trials).collect();
    let trials = map_jobs(&jobs, threads_from_env()?, |&t| {
        let mut rng = rng::stream(seed, &[STREAM_BENCH, t as u64]);
        let theta = random_angles(ansatz.parameter_count(), &mut rng);
        let state = prepare_ansatz_state(ansatz, &theta)?;
        let exact = pauli_expectation(&state, &word)?;
        let mut rng_direct = rng::stream(seed, &[STREAM_BENCH, t as u64, 1]);
        let direct = (0..reps)
            .map(|_| direct_pauli_estimate(&state, &word, shots, &mut rng_direct))
            .collect::<Result<Vec<_>>>()?;
        let mut rng_shadow = rng::stream(seed, &[STREAM_BENCH, t as u64, 2]);
        let shadow = (0..reps)
            .map(|_| {
                let batch = collect_snapshots(&state, snapshots, groups, &mut rng_shadow)?;
                estimate_pauli_mom(&batch, &word)
            })
            .collect::<Result<Vec<_>>>()?;
        let (direct_mean, direct_sd, _) = mean_std(direct);
        let (shadow_mean, shadow_sd, _) = mean_std(shadow);
        let (direct_variance, shadow_variance) = (direct_sd * direct_sd, shadow_sd * shadow_sd);
        Ok(VarianceTrial {
            trial: t,
            exact,
            direct_mean,
            direct_variance,
            shadow_mean,
            shadow_variance,
            ratio: shadow_variance / direct_variance,
        })
    })?;

    let mut w = Writer::new(&cfg.output_dir)?;
    let mut csv = String::from("trial,exact,direct_mean,direct_variance,shadow_mean,shadow_variance,ratio\n");
    for v in &trials {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v.trial, v.exact, v.direct_mean, v.direct_variance, v.shadow_mean, v.shadow_variance, v.ratio
        ));
    }
    w.put("variance_bench.csv", &csv)?;
    let n = trials.len() as f64;
    let mut summary = Summary::new(cfg);
    summary.total_preparations = (cfg.trials * reps * (shots + snapshots)) as u64;
    summary.variance_bench = Some(VarianceBenchSummary {
        observable: word.label(),
        repetitions: reps,
        shots,
        snapshots,
        groups,
        direct_variance: trials.iter().map(|v| v.direct_variance).sum::<f64>() / n,
        shadow_variance: trials.iter().map(|v| v.shadow_variance).sum::<f64>() / n,
        min_ratio: trials.iter().map(|v| v.ratio).fold(f64::INFINITY, f64::min),
        trials,
    });
    w.finish(summary, Vec::new())
}

/// VQE at the initial bond length from `trials` random starts. The lowest
/// converged energy's parameters go to `theta_star.txt`.
pub fn preset_vqe(cfg: &RunConfig, table: &HamiltonianTable) -> Result<PresetOutcome> {
    cfg.validate()?;
    check_ansatz(table, &cfg.dynamics.ansatz)?;
    table.check_range(cfg.initial_r)?;
    let jobs: Vec<usize> = (0..cfg.trials).collect();
    let results = map_jobs(&jobs, threads_from_env()?, |&t| match vqe_start(cfg, table, t) {
        Ok(res) => Ok((
            VqeTrial {
                trial: t,
                converged: true,
                energy: res.energy,
                energy_gap: res.energy - res.ground_energy,
                iterations: res.iterations,
            },
            res.theta,
        )),
        Err(Error::NotConverged {
            theta,
            energy,
            energy_gap,
            iterations,
        }) => Ok((
            VqeTrial {
                trial: t,
                converged: false,
                energy,
                energy_gap,
                iterations,
            },
            theta,
        )),
        Err(e) => Err(e),
    })?;

    let mut w = Writer::new(&cfg.output_dir)?;
    let mut csv = String::from("trial,converged,energy_ha,energy_gap_ha,iterations\n");
    for (v, _) in &results {
        csv.push_str(&format!("{},{},{},{},{}\n", v.trial, v.converged, v.energy, v.energy_gap, v.iterations));
    }
    w.put("vqe.csv", &csv)?;
    let best = results
        .iter()
        .filter(|(v, _)| v.converged)
        .min_by(|a, b| a.0.energy.total_cmp(&b.0.energy));
    if let Some((_, theta)) = best {
        let text: String = theta.iter().map(|x| format!("{x}\n")).collect();
        w.put("theta_star.txt", &text)?;
    }
    let mut summary = Summary::new(cfg);
    summary.aborted = results.iter().any(|(v, _)| !v.converged);
    summary.vqe = results.into_iter().map(|(v, _)| v).collect();
    w.finish(summary, Vec::new())
}

/// Exact ground energy at every grid point of the table.
pub fn preset_curve(cfg: &RunConfig, table: &HamiltonianTable) -> Result<PresetOutcome> {
    let mut csv = String::from("R_angstrom,ground_energy_ha\n");
    let mut best = (f64::NAN, f64::INFINITY);
    for &r in table.grid() {
        let (e, _) = ground_state_exact(&table.hamiltonian_at(r)?)?;
        csv.push_str(&format!("{r},{e}\n"));
        if e < best.1 {
            best = (r, e);
        }
    }
    let mut w = Writer::new(&cfg.output_dir)?;
    w.put("curve.csv", &csv)?;
    let mut summary = Summary::new(cfg);
    summary.curve = Some(CurveSummary {
        points: table.grid().len(),
        argmin_r: best.0,
        min_energy: best.1,
    });
    w.finish(summary, Vec::new())
}
