//! Car-Parrinello style co-evolution of the bond length and circuit parameters.
//!
//! One step of the default integrator:
//!
//! ```text
//! v'  = (1 - gamma dt) v + F(R, th) / m dt
//! xi' = (1 - zeta dt) xi + F_theta(R, th) / mu dt
//! R'  = R + v' dt
//! th' = th + xi' dt
//! ```
//!
//! Both forces are taken at the same point, which makes the undamped,
//! noise-free step a symplectic map. [`Scheme::Explicit`] is plain forward
//! Euler instead: positions move with the old velocities and the parameter
//! force is taken at (R', th). That variant blows up along any parameter
//! direction whose energy curvature exceeds `zeta * mu / dt` (0.8 Ha/rad^2 at
//! the default settings), which the layered ansatz easily reaches near its
//! optimum.
//!
//! Forces come from finite-sample estimators, so the only randomness in a
//! trajectory is measurement noise; the friction terms absorb it.
//!
//! Units: R in A, v in A/fs, t in fs, forces in Ha/A and Ha/rad, the nuclear
//! mass in electron masses and `mu` in Ha fs^2 / rad^2.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_dim, Error, Result};
use crate::hamiltonian::{HamiltonianTable, DEFAULT_FD_STEP};
use crate::pauli::{expectation_exact, Observable};
use crate::rng;
use crate::shadow::{collect_snapshots, direct_pauli_estimate, estimate_observable};
use crate::statevector::{prepare_ansatz_state, AnsatzConfig, StateVector};
#[cfg(test)]
use crate::statevector::AnsatzLayout;
use crate::units;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimator {
    /// One batch of `snapshots` random-basis snapshots per state,
    /// median-of-means over `groups` groups.
    Shadows { snapshots: usize, groups: usize },
    /// Every non-identity Pauli term measured separately with `shots` shots.
    Direct { shots: usize },
    /// Noise-free expectation values. Costs no preparations.
    Exact,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Shadows { .. } => "shadows",
            Self::Direct { .. } => "direct",
            Self::Exact => "exact",
        }
    }

    /// State preparations needed to estimate one observable with `terms`
    /// non-identity words.
    pub fn preparations_per_observable(&self, terms: usize) -> u64 {
        match *self {
            Self::Shadows { snapshots, .. } => snapshots as u64,
            Self::Direct { shots } => (terms * shots) as u64,
            Self::Exact => 0,
        }
    }

    /// Estimates `<obs>` on `state`, returning the value and preparations used.
    pub fn estimate<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        obs: &Observable,
        rng: &mut R,
    ) -> Result<(f64, u64)> {
        let value = match *self {
            Self::Shadows { snapshots, groups } => {
                let batch = collect_snapshots(state, snapshots, groups, rng)?;
                estimate_observable(&batch, obs)?
            }
            Self::Direct { shots } => {
                let mut total = 0.0;
                for (c, w) in obs.terms() {
                    total += if w.is_identity() {
                        *c
                    } else {
                        c * direct_pauli_estimate(state, w, shots, rng)?
                    };
                }
                total
            }
            Self::Exact => expectation_exact(state, obs)?,
        };
        Ok((value, self.preparations_per_observable(obs.measured_terms())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Dissipation {
    /// Constant friction coefficients in 1/fs.
    Fixed { gamma: f64, zeta: f64 },
    /// Coefficients from the variance of the last `window` force estimates.
    Adaptive { window: usize },
}

/// Update ordering within a step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Kick both velocities with forces at the current point, then move
    /// both positions with the new velocities.
    #[default]
    Symplectic,
    /// Forward Euler: positions move with the old velocities, the nuclear
    /// force is taken at (R, th) and the parameter force at (R', th).
    Explicit,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Symplectic => "symplectic",
            Self::Explicit => "explicit",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symplectic" => Ok(Self::Symplectic),
            "explicit" => Ok(Self::Explicit),
            _ => Err(Error::Config(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsConfig {
    /// Timestep in fs.
    pub dt: f64,
    /// Mass of the bond coordinate in electron masses.
    pub mass: f64,
    /// Fictitious parameter mass in Ha fs^2 / rad^2.
    pub mu: f64,
    /// Kelvin; only enters through `beta` in adaptive dissipation.
    pub temperature: f64,
    pub estimator: Estimator,
    pub dissipation: Dissipation,
    pub scheme: Scheme,
    /// Central-difference step for `dH/dR`, in A.
    pub fd_step: f64,
    /// Simulated time in fs.
    pub total_time: f64,
    /// Leading segment excluded from the summary statistics, in fs.
    pub burn_in: f64,
    pub seed: u64,
    pub ansatz: AnsatzConfig,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            mass: units::h2_reduced_mass(),
            mu: 0.1,
            temperature: 70.0,
            estimator: Estimator::Shadows {
                snapshots: 51,
                groups: 3,
            },
            dissipation: Dissipation::Fixed {
                gamma: 0.8,
                zeta: 0.8,
            },
            scheme: Scheme::Symplectic,
            fd_step: DEFAULT_FD_STEP,
            total_time: 4000.0,
            burn_in: 250.0,
            seed: 0,
            ansatz: AnsatzConfig::h2_default(),
        }
    }
}

impl DynamicsConfig {
    pub fn beta(&self) -> f64 {
        units::beta(self.temperature)
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("mass", self.mass),
            ("mu", self.mu),
            ("temperature", self.temperature),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.total_time >= 0.0) || !(self.burn_in >= 0.0) {
            return Err(Error::Config("total_time and burn_in must be non-negative".into()));
        }
        if let Dissipation::Fixed { gamma, zeta } = self.dissipation {
            for (name, c) in [("gamma", gamma), ("zeta", zeta)] {
                if !(c >= 0.0 && c * self.dt < 1.0) {
                    return Err(Error::Config(format!(
                        "{name} = {c} must satisfy 0 <= {name} * dt < 1"
                    )));
                }
            }
        }
        match self.estimator {
            Estimator::Shadows { snapshots, groups } if groups == 0 || snapshots < groups => {
                return Err(Error::Config(format!(
                    "need 1 <= K <= N_S, got K = {groups}, N_S = {snapshots}"
                )))
            }
            Estimator::Direct { shots: 0 } => {
                return Err(Error::Config("shots must be positive".into()))
            }
            _ => {}
        }
        if let Dissipation::Adaptive { window } = self.dissipation {
            if window < 2 {
                return Err(Error::Config("adaptive window needs at least 2 samples".into()));
            }
        }
        Ok(())
    }
}

/// Dynamical variables at step `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct MDState {
    pub r: f64,
    pub v: f64,
    pub theta: Vec<f64>,
    pub xi: Vec<f64>,
    pub step: usize,
}

impl MDState {
    /// Bond length `r` and parameters `theta`, both at rest.
    pub fn at_rest(r: f64, theta: Vec<f64>) -> Self {
        let xi = vec![0.0; theta.len()];
        Self {
            r,
            v: 0.0,
            theta,
            xi,
            step: 0,
        }
    }

    fn is_finite(&self) -> bool {
        self.r.is_finite()
            && self.v.is_finite()
            && self.theta.iter().chain(&self.xi).all(|x| x.is_finite())
    }
}

/// Force along the bond, `-<dH/dR>`, in Ha/A, with the preparations spent.
pub fn nuclear_force<R: Rng + ?Sized>(
    table: &HamiltonianTable,
    r: f64,
    theta: &[f64],
    config: &DynamicsConfig,
    rng: &mut R,
) -> Result<(f64, u64)> {
    let obs = table.force_observable(r, config.fd_step)?;
    let state = prepare_ansatz_state(&config.ansatz, theta)?;
    let (value, preparations) = config.estimator.estimate(&state, &obs, rng)?;
    Ok((-value, preparations))
}

/// `-dL/dtheta_i` by the two-term shift rule, in Ha/rad. Each shifted state
/// gets its own fresh measurements.
pub fn parameter_force<R: Rng + ?Sized>(
    table: &HamiltonianTable,
    r: f64,
    theta: &[f64],
    config: &DynamicsConfig,
    rng: &mut R,
) -> Result<(Vec<f64>, u64)> {
    ensure_dim(config.ansatz.parameter_count(), theta.len())?;
    let h = table.hamiltonian_at(r)?;
    let mut shifted = theta.to_vec();
    let mut preparations = 0;
    let mut forces = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let mut energy_at = |shift: f64| -> Result<f64> {
            shifted[i] = theta[i] + shift;
            let state = prepare_ansatz_state(&config.ansatz, &shifted)?;
            let (e, p) = config.estimator.estimate(&state, &h, rng)?;
            preparations += p;
            Ok(e)
        };
        let plus = energy_at(FRAC_PI_2)?;
        let minus = energy_at(-FRAC_PI_2)?;
        shifted[i] = theta[i];
        forces.push(-0.5 * (plus - minus));
    }
    Ok((forces, preparations))
}

/// Friction coefficients (1/fs) balancing force-estimate variances at the
/// configured temperature: `gamma = f^2 beta dt / 2m`, `zeta_i = f_i^2 beta dt / 2 mu`.
///
/// `force_variance` is in (Ha/A)^2 and `param_force_variance` in (Ha/rad)^2.
pub fn dissipation_coefficients(
    force_variance: f64,
    param_force_variance: &[f64],
    config: &DynamicsConfig,
) -> (f64, Vec<f64>) {
    let scale = config.beta() * config.dt / 2.0;
    let gamma = force_variance * scale * units::acceleration_factor() / config.mass;
    let zeta = param_force_variance
        .iter()
        .map(|f2| f2 * scale / config.mu)
        .collect();
    (gamma, zeta)
}

/// Sliding-window sample variance.
#[derive(Clone, Debug, Default)]
struct Window {
    values: VecDeque<f64>,
}

impl Window {
    fn push(&mut self, x: f64, cap: usize) {
        if self.values.len() == cap {
            self.values.pop_front();
        }
        self.values.push_back(x);
    }

    fn variance(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.values.iter().sum::<f64>() / n as f64;
        self.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

/// Friction state carried between steps.
#[derive(Clone, Debug)]
pub struct Thermostat {
    nuclear: Window,
    params: Vec<Window>,
}

impl Thermostat {
    pub fn new(n_params: usize) -> Self {
        Self {
            nuclear: Window::default(),
            params: vec![Window::default(); n_params],
        }
    }

    fn nuclear_gamma(&mut self, force: f64, config: &DynamicsConfig) -> f64 {
        match config.dissipation {
            Dissipation::Fixed { gamma, .. } => gamma,
            Dissipation::Adaptive { window } => {
                self.nuclear.push(force, window);
                let (gamma, _) = dissipation_coefficients(self.nuclear.variance(), &[], config);
                clamp_friction(gamma, config.dt)
            }
        }
    }

    fn parameter_zeta(&mut self, forces: &[f64], config: &DynamicsConfig) -> Vec<f64> {
        match config.dissipation {
            Dissipation::Fixed { zeta, .. } => vec![zeta; forces.len()],
            Dissipation::Adaptive { window } => {
                let variances: Vec<f64> = self
                    .params
                    .iter_mut()
                    .zip(forces)
                    .map(|(w, &f)| {
                        w.push(f, window);
                        w.variance()
                    })
                    .collect();
                let (_, zeta) = dissipation_coefficients(0.0, &variances, config);
                zeta.into_iter().map(|z| clamp_friction(z, config.dt)).collect()
            }
        }
    }
}

/// Keeps the damping factor `1 - c dt` in `[0, 1]`.
fn clamp_friction(c: f64, dt: f64) -> f64 {
    c.min(1.0 / dt)
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: MDState,
    /// Nuclear force estimate at the old configuration, Ha/A.
    pub force: f64,
    /// Parameter forces at old theta, Ha/rad. The bond length used depends on the scheme.
    pub param_force: Vec<f64>,
    pub gamma: f64,
    pub preparations: u64,
}

/// Advances one timestep.
pub fn qcpmd_step<R: Rng + ?Sized>(
    state: &MDState,
    table: &HamiltonianTable,
    config: &DynamicsConfig,
    thermostat: &mut Thermostat,
    rng: &mut R,
) -> Result<StepOutcome> {
    let dt = config.dt;
    let (force, nuclear_preps) = nuclear_force(table, state.r, &state.theta, config, rng)?;
    let gamma = thermostat.nuclear_gamma(force, config);
    let v = (1.0 - gamma * dt) * state.v + force / config.mass * units::acceleration_factor() * dt;
    let r = match config.scheme {
        Scheme::Symplectic => state.r + v * dt,
        Scheme::Explicit => state.r + state.v * dt,
    };
    table.check_range(r)?;

    let r_param = match config.scheme {
        Scheme::Symplectic => state.r,
        Scheme::Explicit => r,
    };
    let (param_force, param_preps) = parameter_force(table, r_param, &state.theta, config, rng)?;
    let zeta = thermostat.parameter_zeta(&param_force, config);
    let xi: Vec<f64> = state
        .xi
        .iter()
        .zip(&param_force)
        .zip(&zeta)
        .map(|((x, f), z)| (1.0 - z * dt) * x + f / config.mu * dt)
        .collect();
    let theta = match config.scheme {
        Scheme::Symplectic => state.theta.iter().zip(&xi).map(|(t, x)| t + x * dt).collect(),
        Scheme::Explicit => state.theta.iter().zip(&state.xi).map(|(t, x)| t + x * dt).collect(),
    };

    let next = MDState {
        r,
        v,
        theta,
        xi,
        step: state.step + 1,
    };
    if !next.is_finite() {
        return Err(Error::Config(format!("non-finite state at step {}", next.step)));
    }
    Ok(StepOutcome {
        state: next,
        force,
        param_force,
        gamma,
        preparations: nuclear_preps + param_preps,
    })
}

/// One row of trajectory output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub time_fs: f64,
    pub r: f64,
    pub v: f64,
    /// Force estimate used to produce this step (0 for the initial record).
    pub force: f64,
    /// Noise-free `<H(R)>` of the current circuit state.
    pub energy: f64,
    /// Cumulative state preparations.
    pub preparations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub mean_r: f64,
    pub std_r: f64,
    pub samples: usize,
    pub preparations: u64,
    pub aborted: bool,
    pub abort_reason: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub final_state: MDState,
    pub summary: TrajectorySummary,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: impl IntoIterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = values.into_iter().collect();
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    (mean, var.sqrt(), n)
}

fn diagnostic_energy(table: &HamiltonianTable, state: &MDState, config: &DynamicsConfig) -> Result<f64> {
    let psi = prepare_ansatz_state(&config.ansatz, &state.theta)?;
    expectation_exact(&psi, &table.hamiltonian_at(state.r)?)
}

/// Integrates `config.steps()` steps from `initial`. Step `k` draws from the
/// random stream `(config.seed, k)`. A step that leaves the table range ends
/// the run early; the records so far are kept and the summary is flagged.
pub fn run_trajectory(
    config: &DynamicsConfig,
    initial: MDState,
    table: &HamiltonianTable,
) -> Result<Trajectory> {
    config.validate()?;
    ensure_dim(config.ansatz.parameter_count(), initial.theta.len())?;
    ensure_dim(initial.theta.len(), initial.xi.len())?;
    ensure_dim(table.num_qubits(), config.ansatz.n)?;
    table.check_range(initial.r)?;

    let steps = config.steps();
    let mut records = Vec::with_capacity(steps + 1);
    let time0 = initial.step as f64 * config.dt;
    records.push(TrajectoryRecord {
        step: initial.step,
        time_fs: time0,
        r: initial.r,
        v: initial.v,
        force: 0.0,
        energy: diagnostic_energy(table, &initial, config)?,
        preparations: 0,
    });

    let mut thermostat = Thermostat::new(initial.theta.len());
    let mut state = initial;
    let mut preparations = 0u64;
    let mut abort_reason = None;
    for k in 0..steps {
        let mut rng = rng::stream(config.seed, &[state.step as u64]);
        match qcpmd_step(&state, table, config, &mut thermostat, &mut rng) {
            Ok(out) => {
                preparations += out.preparations;
                state = out.state;
                records.push(TrajectoryRecord {
                    step: state.step,
                    time_fs: time0 + (k + 1) as f64 * config.dt,
                    r: state.r,
                    v: state.v,
                    force: out.force,
                    energy: diagnostic_energy(table, &state, config)?,
                    preparations,
                });
            }
            Err(e @ (Error::OutOfRange { .. } | Error::Config(_))) => {
                abort_reason = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let (mean_r, std_r, samples) = mean_std(
        records
            .iter()
            .filter(|rec| rec.time_fs - time0 >= config.burn_in - 1e-9)
            .map(|rec| rec.r),
    );
    let summary = TrajectorySummary {
        steps: records.len() - 1,
        mean_r,
        std_r,
        samples,
        preparations,
        aborted: abort_reason.is_some(),
        abort_reason,
    };
    Ok(Trajectory {
        records,
        final_state: state,
        summary,
    })
}

/// Closed-form state-preparation counts per timestep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleBudget {
    pub nuclear_per_step: u64,
    pub parameter_per_step: u64,
}

impl SampleBudget {
    pub fn per_step(&self) -> u64 {
        self.nuclear_per_step + self.parameter_per_step
    }
}

/// Preparations per step for `n_coordinates` nuclear force components,
/// `n_params` circuit parameters and `n_terms` non-identity Hamiltonian terms.
///
/// Shadows: one batch serves every coordinate, so the nuclear count does not
/// depend on `n_coordinates`. Direct: every term of every coordinate is
/// measured on its own.
pub fn sample_budget(
    estimator: &Estimator,
    n_coordinates: usize,
    n_params: usize,
    n_terms: usize,
) -> SampleBudget {
    let per_observable = estimator.preparations_per_observable(n_terms);
    let nuclear_per_step = match estimator {
        Estimator::Shadows { .. } => per_observable,
        Estimator::Direct { .. } => n_coordinates as u64 * per_observable,
        Estimator::Exact => 0,
    };
    SampleBudget {
        nuclear_per_step,
        parameter_per_step: 2 * n_params as u64 * per_observable,
    }
}
