//! Pauli strings, real-weighted Pauli sums and exact expectation values.
//!
//! Labels follow the little-endian convention of [`crate::statevector`]: the
//! rightmost letter of `"IIIZ"` acts on qubit 0.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};
use crate::statevector::{StateVector, MAX_QUBITS};

/// Largest observable [`to_dense`] will expand.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        match self {
            Self::I => [[l, o], [o, l]],
            Self::X => [[o, l], [l, o]],
            Self::Y => [[o, -i], [i, o]],
            Self::Z => [[l, o], [o, -l]],
        }
    }
}

/// A tensor product of single-qubit Paulis; `ops[q]` acts on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    ops: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::PauliLabel(String::new()));
        }
        Ok(Self { ops })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0);
        Self { ops: vec![Pauli::I; n] }
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut w = Self::identity(n);
        w.ops[q] = p;
        w
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// `(x_mask, z_mask, y_count)` such that the word equals
    /// `i^y_count X^x_mask Z^z_mask`.
    fn masks(&self) -> (usize, usize, u32) {
        let mut x = 0;
        let mut z = 0;
        let mut y = 0;
        for (q, p) in self.ops.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x |= 1 << q,
                Pauli::Z => z |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    y += 1;
                }
            }
        }
        (x, z, y)
    }

    /// The little-endian label, highest qubit first.
    pub fn label(&self) -> String {
        self.ops.iter().rev().map(|p| p.as_char()).collect()
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .rev()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::PauliLabel(s.to_string()))?;
        Self::new(ops).map_err(|_| Error::PauliLabel(s.to_string()))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A real-weighted sum of distinct Pauli words on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n: usize,
    terms: Vec<(f64, PauliWord)>,
}

impl Observable {
    /// Builds a sum, merging repeated words (first occurrence keeps its
    /// position) and rejecting non-finite coefficients.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliWord)>) -> Result<Self> {
        let mut merged: Vec<(f64, PauliWord)> = Vec::new();
        let mut index: HashMap<PauliWord, usize> = HashMap::new();
        for (c, w) in terms {
            ensure_dim(n, w.num_qubits())?;
            if !c.is_finite() {
                return Err(Error::Observable(format!("coefficient {c} on {w} is not finite")));
            }
            match index.get(&w) {
                Some(&i) => merged[i].0 += c,
                None => {
                    index.insert(w.clone(), merged.len());
                    merged.push((c, w));
                }
            }
        }
        Ok(Self { n, terms: merged })
    }

    pub fn single(coefficient: f64, word: PauliWord) -> Self {
        Self {
            n: word.num_qubits(),
            terms: vec![(coefficient, word)],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliWord)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms that are not the identity.
    pub fn measured_terms(&self) -> usize {
        self.terms.iter().filter(|(_, w)| !w.is_identity()).count()
    }
}

impl Mul<f64> for &Observable {
    type Output = Observable;

    fn mul(self, rhs: f64) -> Observable {
        Observable {
            n: self.n,
            terms: self.terms.iter().map(|(c, w)| (c * rhs, w.clone())).collect(),
        }
    }
}

impl Add for &Observable {
    type Output = Observable;

    /// Panics if the registers differ.
    fn add(self, rhs: &Observable) -> Observable {
        assert_eq!(self.n, rhs.n, "observables act on different registers");
        Observable::new(self.n, self.terms.iter().chain(&rhs.terms).cloned())
            .expect("finite coefficients stay finite")
    }
}

/// `<psi|P|psi>` for a single word.
pub fn pauli_expectation(state: &StateVector, word: &PauliWord) -> Result<f64> {
    ensure_dim(state.num_qubits(), word.num_qubits())?;
    Ok(pauli_expectation_complex(state.amplitudes(), word).re)
}

fn pauli_expectation_complex(amps: &[Complex64], word: &PauliWord) -> Complex64 {
    let (x, z, y) = word.masks();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, a) in amps.iter().enumerate() {
        let v = amps[b ^ x].conj() * a;
        if (b & z).count_ones() % 2 == 1 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    acc * Complex64::i().powu(y)
}

/// `sum_P c_P <psi|P|psi>`, streamed word by word without a dense matrix.
pub fn expectation_exact(state: &StateVector, obs: &Observable) -> Result<f64> {
    ensure_dim(state.num_qubits(), obs.num_qubits())?;
    let total: Complex64 = obs
        .terms
        .iter()
        .map(|(c, w)| {
            if w.is_identity() {
                Complex64::new(*c, 0.0)
            } else {
                pauli_expectation_complex(state.amplitudes(), w) * *c
            }
        })
        .sum();
    debug_assert!(total.im.abs() < 1e-10, "imaginary residue {}", total.im);
    Ok(total.re)
}

/// Dense `2^n x 2^n` matrix of an observable; row/column index bit `q` is qubit `q`.
pub fn to_dense(obs: &Observable) -> Result<DMatrix<Complex64>> {
    let n = obs.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "dense observable",
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, w) in &obs.terms {
        let (x, z, y) = w.masks();
        let phase = Complex64::i().powu(y) * *c;
        // P|b> = i^y (-1)^{|b & z|} |b ^ x>
        for b in 0..dim {
            let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ x, b)] += phase * sign;
        }
    }
    Ok(m)
}

/// Lowest eigenpair of the dense observable.
pub fn ground_state_exact(obs: &Observable) -> Result<(f64, StateVector)> {
    let n = obs.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "exact diagonalization",
            n,
            max: MAX_QUBITS,
        });
    }
    let eig = SymmetricEigen::new(to_dense(obs)?);
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    Ok((energy, StateVector::normalized(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn labels_round_trip() {
        let word = w("XIYZ");
        assert_eq!(word.op(0), Pauli::Z);
        assert_eq!(word.op(3), Pauli::X);
        assert_eq!(word.label(), "XIYZ");
        assert_eq!(word.support().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(w("IIII").support().count(), 0);
        assert!("IXQ".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
    }

    #[test]
    fn duplicate_words_merge() {
        let o = Observable::new(2, [(0.5, w("ZI")), (0.25, w("XX")), (0.5, w("ZI"))]).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o.terms()[0], (1.0, w("ZI")));
        assert!(Observable::new(2, [(f64::NAN, w("ZI"))]).is_err());
        assert!(Observable::new(2, [(1.0, w("Z"))]).is_err());
    }

    #[test]
    fn eigenstate_expectations() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(expectation_exact(&zero, &Observable::single(1.0, w("Z"))).unwrap(), 1.0);
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply_h(0);
        let e = expectation_exact(&plus, &Observable::single(1.0, w("X"))).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        let four = StateVector::basis(4, 5).unwrap();
        assert_eq!(expectation_exact(&four, &Observable::single(-0.3, w("IIII"))).unwrap(), -0.3);
        assert!(expectation_exact(&four, &Observable::single(1.0, w("Z"))).is_err());
    }

    #[test]
    fn small_dense_matrices() {
        let z = to_dense(&Observable::single(1.0, w("Z"))).unwrap();
        assert_eq!(z[(0, 0)].re, 1.0);
        assert_eq!(z[(1, 1)].re, -1.0);
        let o = Observable::new(1, [(0.5, w("X")), (0.5, w("I"))]).unwrap();
        let m = to_dense(&o).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m[(i, j)], Complex64::new(0.5, 0.0));
            }
        }
        let big = Observable::single(1.0, PauliWord::identity(13));
        assert!(matches!(to_dense(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn single_qubit_ground_states() {
        let (e, v) = ground_state_exact(&Observable::single(1.0, w("Z"))).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        let (e, v) = ground_state_exact(&Observable::single(-1.0, w("X"))).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply_h(0);
        assert!((v.inner(&plus).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
