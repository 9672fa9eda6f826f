//! Dense statevector simulation.
//!
//! Basis index bit `q` holds the computational-basis value of qubit `q`.
//! Bitstring labels are written little-endian, so the rightmost character
//! of `"0011"` is qubit 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{ensure_dim, Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 gate as `[[a, b], [c, d]]`.
pub type Gate1 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational-basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::Dimension {
                expected: 1 << n,
                found: index,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Wraps amplitudes that are already normalized to within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Observable(format!(
                "state is not normalized (norm^2 = {norm})"
            )));
        }
        Ok(Self { n, amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Observable("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        ensure_dim(self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply_gate(&mut self, q: usize, g: &Gate1) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let step = 1 << q;
        for base in (0..self.amps.len()).filter(|i| i & step == 0) {
            let a0 = self.amps[base];
            let a1 = self.amps[base | step];
            self.amps[base] = g[0][0] * a0 + g[0][1] * a1;
            self.amps[base | step] = g[1][0] * a0 + g[1][1] * a1;
        }
    }

    /// `Ry(theta) = exp(-i theta Y / 2)`, a real rotation.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let step = 1 << q;
        for base in (0..self.amps.len()).filter(|i| i & step == 0) {
            let a0 = self.amps[base];
            let a1 = self.amps[base | step];
            self.amps[base] = a0 * c - a1 * s;
            self.amps[base | step] = a0 * s + a1 * c;
        }
    }

    pub fn apply_h(&mut self, q: usize) {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_gate(q, &[[h, h], [h, -h]]);
    }

    pub fn apply_x(&mut self, q: usize) {
        let step = 1 << q;
        for base in (0..self.amps.len()).filter(|i| i & step == 0) {
            self.amps.swap(base, base | step);
        }
    }

    pub fn apply_s(&mut self, q: usize) {
        self.apply_phase(q, Complex64::i());
    }

    pub fn apply_sdg(&mut self, q: usize) {
        self.apply_phase(q, -Complex64::i());
    }

    fn apply_phase(&mut self, q: usize, phase: Complex64) {
        let step = 1 << q;
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| i & step != 0)
            .for_each(|(_, a)| *a *= phase);
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target);
        let (c, t) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "statevector",
            n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Observable(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// Parses a little-endian bitstring label into a basis index.
pub fn parse_bitstring(label: &str) -> Result<(usize, usize)> {
    let n = label.len();
    check_qubits(n)?;
    label
        .chars()
        .rev()
        .enumerate()
        .try_fold(0usize, |acc, (q, ch)| match ch {
            '0' => Ok(acc),
            '1' => Ok(acc | 1 << q),
            _ => Err(Error::Config(format!("invalid bitstring {label:?}"))),
        })
        .map(|idx| (n, idx))
}

/// Formats a basis index as a little-endian bitstring of width `n`.
pub fn format_bitstring(n: usize, index: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnsatzLayout {
    /// `D + 1` layers of per-qubit `Ry` rotations, separated by a CNOT
    /// chain `0 -> 1 -> ... -> n-1`. Amplitudes stay real throughout.
    #[default]
    RealLayered,
    /// No gates: the reference state itself, with no parameters.
    Reference,
}

impl FromStr for AnsatzLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-layered" => Ok(Self::RealLayered),
            "reference" => Ok(Self::Reference),
            _ => Err(Error::Config(format!("unknown ansatz layout {s:?}"))),
        }
    }
}

impl fmt::Display for AnsatzLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RealLayered => f.write_str("real-layered"),
            Self::Reference => f.write_str("reference"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzConfig {
    pub n: usize,
    pub depth: usize,
    pub layout: AnsatzLayout,
    /// Basis index of the reference state.
    pub initial_occupation: usize,
}

impl AnsatzConfig {
    pub fn new(depth: usize, occupation: &str) -> Result<Self> {
        let (n, initial_occupation) = parse_bitstring(occupation)?;
        Ok(Self {
            n,
            depth,
            layout: AnsatzLayout::RealLayered,
            initial_occupation,
        })
    }

    /// Four qubits, depth 4, Hartree-Fock reference `0011`.
    pub fn h2_default() -> Self {
        Self::new(4, "0011").expect("valid default")
    }

    pub fn parameter_count(&self) -> usize {
        match self.layout {
            AnsatzLayout::RealLayered => self.n * (self.depth + 1),
            AnsatzLayout::Reference => 0,
        }
    }

    pub fn occupation_label(&self) -> String {
        format_bitstring(self.n, self.initial_occupation)
    }
}

/// Prepares `U(theta)|reference>`.
pub fn prepare_ansatz_state(config: &AnsatzConfig, params: &[f64]) -> Result<StateVector> {
    ensure_dim(config.parameter_count(), params.len())?;
    let mut state = StateVector::basis(config.n, config.initial_occupation)?;
    match config.layout {
        AnsatzLayout::RealLayered => {
            for (layer, angles) in params.chunks(config.n).enumerate() {
                if layer > 0 {
                    for q in 0..config.n - 1 {
                        state.apply_cnot(q, q + 1);
                    }
                }
                for (q, &theta) in angles.iter().enumerate() {
                    state.apply_ry(q, theta);
                }
            }
        }
        AnsatzLayout::Reference => {}
    }
    Ok(state)
}

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..3)]
    }
}

/// Per-qubit measurement bases, indexed by qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisChoice(pub Vec<Basis>);

impl BasisChoice {
    pub fn uniform(n: usize, basis: Basis) -> Self {
        Self(vec![basis; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| Basis::random(rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rotates each qubit so that a computational-basis measurement reads out
/// the chosen Pauli: `H` for X, `S^dag` then `H` for Y, nothing for Z.
pub fn apply_basis_rotation(state: &StateVector, basis: &BasisChoice) -> Result<StateVector> {
    ensure_dim(state.n, basis.len())?;
    let mut out = state.clone();
    rotate_in_place(&mut out, basis.0.iter().copied().enumerate());
    Ok(out)
}

pub(crate) fn rotate_in_place(state: &mut StateVector, bases: impl Iterator<Item = (usize, Basis)>) {
    for (q, b) in bases {
        match b {
            Basis::X => state.apply_h(q),
            Basis::Y => {
                state.apply_sdg(q);
                state.apply_h(q);
            }
            Basis::Z => {}
        }
    }
}

/// Cumulative Born distribution for repeated sampling.
pub(crate) struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    pub(crate) fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cumulative = state
            .amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draws `count` i.i.d. computational-basis outcomes (basis indices).
pub fn sample_bitstrings<R: Rng + ?Sized>(state: &StateVector, count: usize, rng: &mut R) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    let sampler = Sampler::new(state);
    (0..count).map(|_| sampler.sample(rng)).collect()
}
