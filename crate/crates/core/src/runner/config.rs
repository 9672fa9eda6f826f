//! Run configuration: preset defaults overridden by a flat `key = value` file.
//!
//! ```text
//! # equilibrium run with a heavier parameter mass
//! mu = 0.2
//! estimator = shadows, direct
//! n_snapshots = 101
//! ```

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::{Dissipation, DynamicsConfig, Estimator};
use crate::error::{Error, Result};
use crate::statevector::{parse_bitstring, AnsatzLayout};

/// Equilibrium bond length of the shipped fixture, in Angstrom.
pub const EQUILIBRIUM_R: f64 = 0.735;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Equilibrium,
    Quench,
    VarianceBench,
    Vqe,
    Curve,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Equilibrium,
        Preset::Quench,
        Preset::VarianceBench,
        Preset::Vqe,
        Preset::Curve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Equilibrium => "equilibrium",
            Self::Quench => "quench",
            Self::VarianceBench => "variance-bench",
            Self::Vqe => "vqe",
            Self::Curve => "curve",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the starting parameters come from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaInit {
    /// Optimized at the initial bond length, from a random start.
    Vqe,
    /// Uniform on `[0, 2 pi)`, drawn per trial.
    Random,
    /// Whitespace- or comma-separated angles.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    /// Template for every trajectory; `estimator` is replaced per run.
    pub dynamics: DynamicsConfig,
    /// Estimator modes, one trajectory each per trial.
    pub estimators: Vec<Estimator>,
    /// `None` selects the built-in H2 table.
    pub hamiltonian_table: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub trials: usize,
    pub initial_r: f64,
    pub initial_theta: ThetaInit,
    pub vqe_tol: f64,
    /// Repetitions per trial in the variance benchmark.
    pub repetitions: usize,
}

impl RunConfig {
    /// Defaults reproducing the reference experiment for `preset`.
    pub fn preset(preset: Preset) -> Self {
        let dynamics = DynamicsConfig::default();
        let paired = vec![
            Estimator::Shadows {
                snapshots: 51,
                groups: 3,
            },
            Estimator::Direct { shots: 51 },
        ];
        let mut cfg = Self {
            preset,
            dynamics,
            estimators: paired,
            hamiltonian_table: None,
            output_dir: PathBuf::from("qcpmd-out").join(preset.name()),
            trials: 1,
            initial_r: EQUILIBRIUM_R,
            initial_theta: ThetaInit::Vqe,
            vqe_tol: 1e-5,
            repetitions: 1000,
        };
        match preset {
            Preset::Equilibrium | Preset::Curve => {}
            Preset::Quench => {
                cfg.dynamics.total_time = 2000.0;
                cfg.trials = 5;
                cfg.initial_r = 1.0;
                cfg.initial_theta = ThetaInit::Random;
            }
            Preset::VarianceBench | Preset::Vqe => cfg.trials = 5,
        }
        cfg
    }

    pub fn load(preset: Preset, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(preset, &text)
    }

    /// Applies the assignments in `text` on top of [`RunConfig::preset`].
    pub fn parse(preset: Preset, text: &str) -> Result<Self> {
        let mut cfg = Self::preset(preset);
        let mut seen = HashSet::new();
        let mut estimator_names: Option<Vec<String>> = None;
        let mut snapshots = 51;
        let mut groups = 3;
        let mut shots = 51;
        let mut dissipation = "fixed".to_string();
        let (mut gamma, mut zeta) = match cfg.dynamics.dissipation {
            Dissipation::Fixed { gamma, zeta } => (gamma, zeta),
            Dissipation::Adaptive { .. } => unreachable!("fixed by default"),
        };
        let mut window = 100;
        let mut theta_file = None;
        let mut initial_theta = None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, found {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key {key}"),
                });
            }
            let at = |e: Error| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            };
            let d = &mut cfg.dynamics;
            match key {
                "preset" => {
                    let p: Preset = value.parse().map_err(at)?;
                    if p != preset {
                        return Err(at(Error::Config(format!(
                            "file is for preset {p}, running {preset}"
                        ))));
                    }
                }
                "dt" => d.dt = num(value).map_err(at)?,
                "mass" => d.mass = num(value).map_err(at)?,
                "mu" => d.mu = num(value).map_err(at)?,
                "temperature" => d.temperature = num(value).map_err(at)?,
                "fd_step" => d.fd_step = num(value).map_err(at)?,
                "total_time" => d.total_time = num(value).map_err(at)?,
                "burn_in" => d.burn_in = num(value).map_err(at)?,
                "seed" => d.seed = num(value).map_err(at)?,
                "scheme" => d.scheme = value.parse().map_err(at)?,
                "depth" => d.ansatz.depth = num(value).map_err(at)?,
                "layout" => d.ansatz.layout = value.parse::<AnsatzLayout>().map_err(at)?,
                "occupation" => {
                    let (n, idx) = parse_bitstring(value).map_err(at)?;
                    d.ansatz.n = n;
                    d.ansatz.initial_occupation = idx;
                }
                "estimator" => {
                    estimator_names = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                }
                "n_snapshots" => snapshots = num(value).map_err(at)?,
                "n_groups" => groups = num(value).map_err(at)?,
                "n_shots" => shots = num(value).map_err(at)?,
                "dissipation" => dissipation = value.to_string(),
                "gamma" => gamma = num(value).map_err(at)?,
                "zeta" => zeta = num(value).map_err(at)?,
                "window" => window = num(value).map_err(at)?,
                "hamiltonian_table" => cfg.hamiltonian_table = Some(PathBuf::from(value)),
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "trials" => cfg.trials = num(value).map_err(at)?,
                "initial_r" => cfg.initial_r = num(value).map_err(at)?,
                "initial_theta" => initial_theta = Some(value.to_string()),
                "theta_file" => theta_file = Some(PathBuf::from(value)),
                "vqe_tol" => cfg.vqe_tol = num(value).map_err(at)?,
                "repetitions" => cfg.repetitions = num(value).map_err(at)?,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key {key}"),
                    })
                }
            }
        }

        let names = estimator_names.unwrap_or_else(|| {
            cfg.estimators.iter().map(|e| e.name().to_string()).collect()
        });
        cfg.estimators = names
            .iter()
            .map(|name| match name.as_str() {
                "shadows" => Ok(Estimator::Shadows { snapshots, groups }),
                "direct" => Ok(Estimator::Direct { shots }),
                "exact" => Ok(Estimator::Exact),
                _ => Err(Error::Config(format!("unknown estimator {name:?}"))),
            })
            .collect::<Result<_>>()?;
        cfg.dynamics.dissipation = match dissipation.as_str() {
            "fixed" => Dissipation::Fixed { gamma, zeta },
            "adaptive" => Dissipation::Adaptive { window },
            _ => return Err(Error::Config(format!("unknown dissipation {dissipation:?}"))),
        };
        cfg.initial_theta = match (initial_theta.as_deref(), theta_file) {
            (None, None) => cfg.initial_theta,
            (None | Some("file"), Some(path)) => ThetaInit::File(path),
            (Some("file"), None) => {
                return Err(Error::Config("initial_theta = file needs theta_file".into()))
            }
            (Some("vqe"), None) => ThetaInit::Vqe,
            (Some("random"), None) => ThetaInit::Random,
            (Some(other), _) => {
                return Err(Error::Config(format!(
                    "initial_theta {other:?} does not combine with theta_file"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimator selected".into()));
        }
        let mut names: Vec<_> = self.estimators.iter().map(|e| e.name()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.estimators.len() {
            return Err(Error::Config("estimator listed twice".into()));
        }
        if !(self.vqe_tol > 0.0) {
            return Err(Error::Config("vqe_tol must be positive".into()));
        }
        if self.preset == Preset::VarianceBench && self.repetitions < 2 {
            return Err(Error::Config("repetitions must be at least 2".into()));
        }
        for e in &self.estimators {
            DynamicsConfig {
                estimator: *e,
                ..self.dynamics.clone()
            }
            .validate()?;
        }
        Ok(())
    }
}

fn num<T: FromStr>(value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| Error::Config(format!("invalid value {value:?}: {e}")))
}

/// Reads angles separated by commas and/or whitespace.
pub fn read_theta_file(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(num)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Scheme;

    #[test]
    fn defaults_match_reference_experiments() {
        let eq = RunConfig::preset(Preset::Equilibrium);
        assert_eq!(eq.dynamics.total_time, 4000.0);
        assert_eq!(eq.dynamics.burn_in, 250.0);
        assert_eq!(eq.initial_r, 0.735);
        assert_eq!(eq.estimators.len(), 2);
        let q = RunConfig::preset(Preset::Quench);
        assert_eq!((q.trials, q.initial_r, q.dynamics.total_time), (5, 1.0, 2000.0));
        assert_eq!(q.initial_theta, ThetaInit::Random);
    }

    #[test]
    fn overrides() {
        let cfg = RunConfig::parse(
            Preset::Quench,
            "# comment\n  mu = 0.2  # trailing\n\nestimator = direct\nn_shots = 11\ndissipation = adaptive\nwindow = 50\ntheta_file = t.txt\nscheme = explicit\n",
        )
        .unwrap();
        assert_eq!(cfg.dynamics.mu, 0.2);
        assert_eq!(cfg.estimators, vec![Estimator::Direct { shots: 11 }]);
        assert_eq!(cfg.dynamics.dissipation, Dissipation::Adaptive { window: 50 });
        assert_eq!(cfg.initial_theta, ThetaInit::File("t.txt".into()));
        assert_eq!(cfg.dynamics.scheme, Scheme::Explicit);
    }

    #[test]
    fn errors_carry_lines() {
        let err = |t: &str| RunConfig::parse(Preset::Equilibrium, t).unwrap_err();
        assert!(matches!(err("dt = 0.1\nbogus = 1\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err("dt = fast\n"), Error::Parse { line: 1, .. }));
        assert!(matches!(err("dt = 0.1\ndt = 0.2\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err("no equals sign\n"), Error::Parse { line: 1, .. }));
        assert!(matches!(err("preset = quench\n"), Error::Parse { line: 1, .. }));
        assert!(matches!(err("trials = 0\n"), Error::Config(_)));
        assert!(matches!(err("gamma = 20\n"), Error::Config(_)));
        assert!(matches!(err("estimator = exact, exact\n"), Error::Config(_)));
        assert!(matches!(err("initial_theta = file\n"), Error::Config(_)));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("warmup".parse::<Preset>().is_err());
    }
}
