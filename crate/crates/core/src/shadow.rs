//! Classical shadows from random Pauli-basis measurements.
//!
//! A snapshot is stored as its measurement bases and outcome bits only. The
//! inverted-channel estimate of a Pauli word is evaluated in closed form:
//! for every qubit in the word's support the basis must match the letter,
//! and each matching qubit contributes `3 * (+1 | -1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{ensure_dim, Error, Result};
use crate::pauli::{Observable, Pauli, PauliWord};
use crate::statevector::{rotate_in_place, Basis, BasisChoice, Sampler, StateVector};

/// Largest register [`snapshot_density`] will expand.
pub const MAX_DENSITY_QUBITS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    bases: BasisChoice,
    /// Outcome bits; bit `q` is the result on qubit `q`.
    outcome: usize,
}

impl Snapshot {
    pub fn new(bases: BasisChoice, outcome: usize) -> Result<Self> {
        if bases.is_empty() || outcome >> bases.len() != 0 {
            return Err(Error::Dimension {
                expected: bases.len(),
                found: (usize::BITS - outcome.leading_zeros()) as usize,
            });
        }
        Ok(Self { bases, outcome })
    }

    pub fn num_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &BasisChoice {
        &self.bases
    }

    pub fn outcome(&self) -> usize {
        self.outcome
    }

    pub fn bit(&self, q: usize) -> u8 {
        (self.outcome >> q & 1) as u8
    }

    fn estimate_unchecked(&self, word: &PauliWord) -> f64 {
        let mut value = 1.0;
        for q in word.support() {
            let matches = matches!(
                (self.bases.0[q], word.op(q)),
                (Basis::X, Pauli::X) | (Basis::Y, Pauli::Y) | (Basis::Z, Pauli::Z)
            );
            if !matches {
                return 0.0;
            }
            value *= if self.bit(q) == 0 { 3.0 } else { -3.0 };
        }
        value
    }
}

/// `N_S` snapshots of one state plus the median-of-means group count `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowBatch {
    n: usize,
    snapshots: Vec<Snapshot>,
    groups: usize,
}

impl ShadowBatch {
    pub fn new(n: usize, snapshots: Vec<Snapshot>, groups: usize) -> Result<Self> {
        check_groups(snapshots.len(), groups)?;
        for s in &snapshots {
            ensure_dim(n, s.num_qubits())?;
        }
        Ok(Self {
            n,
            snapshots,
            groups,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    /// `floor(N_S / K)`; trailing snapshots beyond `K * group_size` carry no weight.
    pub fn group_size(&self) -> usize {
        self.snapshots.len() / self.groups
    }
}

fn check_groups(n_snapshots: usize, groups: usize) -> Result<()> {
    if groups == 0 || n_snapshots < groups {
        return Err(Error::Config(format!(
            "need 1 <= K <= N_S, got K = {groups}, N_S = {n_snapshots}"
        )));
    }
    Ok(())
}

/// Draws `n_snapshots` snapshots, each with independent uniform per-qubit bases.
pub fn collect_snapshots<R: Rng + ?Sized>(
    state: &StateVector,
    n_snapshots: usize,
    groups: usize,
    rng: &mut R,
) -> Result<ShadowBatch> {
    check_groups(n_snapshots, groups)?;
    let n = state.num_qubits();
    let snapshots = (0..n_snapshots)
        .map(|_| {
            let bases = BasisChoice::random(n, rng);
            let mut rotated = state.clone();
            rotate_in_place(&mut rotated, bases.0.iter().copied().enumerate());
            let outcome = Sampler::new(&rotated).sample(rng);
            Snapshot { bases, outcome }
        })
        .collect();
    Ok(ShadowBatch {
        n,
        snapshots,
        groups,
    })
}

/// `Tr[word * rho_hat]` for one snapshot.
pub fn snapshot_pauli_estimate(snapshot: &Snapshot, word: &PauliWord) -> Result<f64> {
    ensure_dim(snapshot.num_qubits(), word.num_qubits())?;
    Ok(snapshot.estimate_unchecked(word))
}

/// The explicit snapshot `rho_hat = (x)_q (3 U_q^dag |s_q><s_q| U_q - I)`.
/// Only meant for checking the closed-form estimators.
pub fn snapshot_density(snapshot: &Snapshot) -> Result<DMatrix<Complex64>> {
    let n = snapshot.num_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::Capacity {
            what: "snapshot density",
            n,
            max: MAX_DENSITY_QUBITS,
        });
    }
    let mut rho = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    // Highest qubit first so that index bit q is qubit q.
    for q in (0..n).rev() {
        rho = rho.kronecker(&single_qubit_snapshot(snapshot.bases.0[q], snapshot.bit(q)));
    }
    Ok(rho)
}

fn single_qubit_snapshot(basis: Basis, bit: u8) -> DMatrix<Complex64> {
    // U^dag |s> for the measured eigenvector, then 3|v><v| - I.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    let v = match basis {
        Basis::Z if bit == 0 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        Basis::Z => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        Basis::X => [Complex64::new(h, 0.0), Complex64::new(sign * h, 0.0)],
        Basis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, sign * h)],
    };
    DMatrix::from_fn(2, 2, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        v[i] * v[j].conj() * 3.0 - id
    })
}

/// Median of `values`; for an even count the lower-middle order statistic
/// (the `ceil(K/2)`-th smallest) is taken.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len().div_ceil(2) - 1]
}

fn mom_unchecked(batch: &ShadowBatch, word: &PauliWord) -> f64 {
    if word.is_identity() {
        return 1.0;
    }
    let size = batch.group_size();
    let mut means: Vec<f64> = batch
        .snapshots
        .chunks_exact(size)
        .take(batch.groups)
        .map(|g| g.iter().map(|s| s.estimate_unchecked(word)).sum::<f64>() / size as f64)
        .collect();
    median(&mut means)
}

/// Median over `K` consecutive groups of the per-group mean estimate.
pub fn estimate_pauli_mom(batch: &ShadowBatch, word: &PauliWord) -> Result<f64> {
    ensure_dim(batch.n, word.num_qubits())?;
    Ok(mom_unchecked(batch, word))
}

/// `sum_P c_P * estimate_pauli_mom(batch, P)` from one shared batch.
pub fn estimate_observable(batch: &ShadowBatch, obs: &Observable) -> Result<f64> {
    ensure_dim(batch.n, obs.num_qubits())?;
    Ok(obs
        .terms()
        .iter()
        .map(|(c, w)| c * mom_unchecked(batch, w))
        .sum())
}

/// Measures `word` alone with `shots` repetitions in its own eigenbasis.
pub fn direct_pauli_estimate<R: Rng + ?Sized>(
    state: &StateVector,
    word: &PauliWord,
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    ensure_dim(state.num_qubits(), word.num_qubits())?;
    if word.is_identity() {
        return Ok(1.0);
    }
    if shots == 0 {
        return Err(Error::Config("direct estimation needs at least one shot".into()));
    }
    let mut rotated = state.clone();
    rotate_in_place(
        &mut rotated,
        word.support().map(|q| {
            let b = match word.op(q) {
                Pauli::X => Basis::X,
                Pauli::Y => Basis::Y,
                _ => Basis::Z,
            };
            (q, b)
        }),
    );
    let mask: usize = word.support().map(|q| 1 << q).sum();
    let sampler = Sampler::new(&rotated);
    let total: i64 = (0..shots)
        .map(|_| {
            if (sampler.sample(rng) & mask).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
        .sum();
    Ok(total as f64 / shots as f64)
}
