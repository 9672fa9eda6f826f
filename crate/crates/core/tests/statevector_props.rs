use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use qcpmd::rng::stream;
use qcpmd::statevector::{
    apply_basis_rotation, format_bitstring, parse_bitstring, prepare_ansatz_state, sample_bitstrings, AnsatzConfig,
    Basis, BasisChoice, StateVector,
};

type M = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn eye(n: usize) -> M {
    M::identity(n, n)
}

/// Lifts a one-qubit gate to `n` qubits; qubit 0 is the rightmost factor.
fn lift(g: &M, q: usize, n: usize) -> M {
    let id = eye(2);
    let mut m = eye(1);
    for k in (0..n).rev() {
        m = m.kronecker(if k == q { g } else { &id });
    }
    m
}

fn ry(t: f64) -> M {
    let (s, co) = (t / 2.0).sin_cos();
    M::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
}

fn cnot(control: usize, target: usize, n: usize) -> M {
    let dim = 1 << n;
    let mut m = M::zeros(dim, dim);
    for i in 0..dim {
        let j = if i >> control & 1 == 1 { i ^ (1 << target) } else { i };
        m[(j, i)] = c(1.0);
    }
    m
}

fn dense_ansatz(cfg: &AnsatzConfig, params: &[f64]) -> DVector<Complex64> {
    let n = cfg.n;
    let mut v = DVector::zeros(1 << n);
    v[cfg.initial_occupation] = c(1.0);
    for (layer, angles) in params.chunks(n).enumerate() {
        if layer > 0 {
            for q in 0..n - 1 {
                v = cnot(q, q + 1, n) * v;
            }
        }
        for (q, &t) in angles.iter().enumerate() {
            v = lift(&ry(t), q, n) * v;
        }
    }
    v
}

fn rotation(b: Basis) -> M {
    let h = 1.0 / 2f64.sqrt();
    let hadamard = M::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
    let sdg = M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), Complex64::new(0.0, -1.0)]);
    match b {
        Basis::X => hadamard,
        Basis::Y => hadamard * sdg,
        Basis::Z => eye(2),
    }
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn ansatz_case() -> impl Strategy<Value = (AnsatzConfig, Vec<f64>)> {
    (2usize..=4, 0usize..=4)
        .prop_flat_map(|(n, depth)| (0..1usize << n, Just((n, depth))))
        .prop_flat_map(|(occ, (n, depth))| {
            let cfg = AnsatzConfig::new(depth, &format_bitstring(n, occ)).unwrap();
            let k = cfg.parameter_count();
            (Just(cfg), prop::collection::vec(-10.0..10.0f64, k))
        })
}

proptest! {
    #[test]
    fn ansatz_matches_dense_gates((cfg, params) in ansatz_case()) {
        let got = prepare_ansatz_state(&cfg, &params).unwrap();
        let want = dense_ansatz(&cfg, &params);
        prop_assert!((got.norm_sqr() - 1.0).abs() < 1e-12);
        for (a, b) in got.amplitudes().iter().zip(want.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
            prop_assert!(a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn basis_rotation_matches_dense(
        (s, bases) in (1usize..=4).prop_flat_map(|n| (state(n), prop::collection::vec(0..3usize, n)))
    ) {
        let n = s.num_qubits();
        let choice = BasisChoice(bases.iter().map(|&i| Basis::ALL[i]).collect());
        let mut u = eye(1 << n);
        for (q, b) in choice.0.iter().enumerate() {
            u = lift(&rotation(*b), q, n) * u;
        }
        let want = u * DVector::from_column_slice(s.amplitudes());
        let got = apply_basis_rotation(&s, &choice).unwrap();
        prop_assert!((got.norm_sqr() - 1.0).abs() < 1e-12);
        for (a, b) in got.amplitudes().iter().zip(want.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bitstrings_round_trip(n in 1usize..=10, seed in any::<u64>()) {
        let index = (seed as usize) & ((1 << n) - 1);
        let label = format_bitstring(n, index);
        prop_assert_eq!(parse_bitstring(&label).unwrap(), (n, index));
        prop_assert_eq!(label.ends_with('1'), index & 1 == 1);
    }
}

#[test]
fn sampling_frequencies_follow_born_rule() {
    let cfg = AnsatzConfig::new(2, "0101").unwrap();
    let params: Vec<f64> = (0..cfg.parameter_count()).map(|i| 0.37 * i as f64 + 0.2).collect();
    let s = prepare_ansatz_state(&cfg, &params).unwrap();
    let count = 200_000;
    let draws = sample_bitstrings(&s, count, &mut stream(11, &[]));
    let mut hist = vec![0usize; s.dim()];
    draws.iter().for_each(|&i| hist[i] += 1);
    for (p, k) in s.probabilities().into_iter().zip(hist) {
        let sigma = (count as f64 * p * (1.0 - p)).sqrt();
        assert!((k as f64 - count as f64 * p).abs() <= 5.0 * sigma + 1.0, "p = {p}, k = {k}");
    }
}

#[test]
fn hartree_fock_reference_is_read_little_endian() {
    let cfg = AnsatzConfig::new(0, "0011").unwrap();
    assert_eq!(cfg.initial_occupation, 0b0011);
    let s = prepare_ansatz_state(&cfg, &vec![0.0; cfg.parameter_count()]).unwrap();
    assert_eq!(s.probabilities()[3], 1.0);
    assert!(parse_bitstring("01a1").is_err());
    assert!(AnsatzConfig::new(4, "0011").unwrap().parameter_count() == 20);
}
