use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use qcpmd::pauli::{pauli_expectation, to_dense, Observable, Pauli, PauliWord};
use qcpmd::rng::stream;
use qcpmd::shadow::{
    collect_snapshots, direct_pauli_estimate, estimate_observable, estimate_pauli_mom, snapshot_density,
    snapshot_pauli_estimate, ShadowBatch, Snapshot,
};
use qcpmd::statevector::{apply_basis_rotation, prepare_ansatz_state, AnsatzConfig, Basis, BasisChoice, StateVector};

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    prop::collection::vec(0..4usize, n).prop_map(|v| PauliWord::new(v.into_iter().map(|i| PAULIS[i]).collect()).unwrap())
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

/// Every basis assignment on `n` qubits.
fn all_bases(n: usize) -> Vec<BasisChoice> {
    (0..3usize.pow(n as u32))
        .map(|mut k| {
            BasisChoice(
                (0..n)
                    .map(|_| {
                        let b = Basis::ALL[k % 3];
                        k /= 3;
                        b
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Calls `f(snapshot, probability)` for every basis assignment and outcome.
fn enumerate(s: &StateVector, mut f: impl FnMut(&Snapshot, f64)) {
    let bases = all_bases(s.num_qubits());
    let weight = 1.0 / bases.len() as f64;
    for b in bases {
        let probs = apply_basis_rotation(s, &b).unwrap().probabilities();
        for (outcome, p) in probs.into_iter().enumerate() {
            f(&Snapshot::new(b.clone(), outcome).unwrap(), p * weight);
        }
    }
}

proptest! {
    #[test]
    fn snapshot_estimate_is_unbiased((s, w) in (1usize..=3).prop_flat_map(|n| (state(n), word(n)))) {
        let mut mean = 0.0;
        enumerate(&s, |snap, p| mean += p * snapshot_pauli_estimate(snap, &w).unwrap());
        prop_assert!((mean - pauli_expectation(&s, &w).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn averaged_snapshots_reconstruct_the_state(s in (1usize..=3).prop_flat_map(state)) {
        let dim = s.dim();
        let mut mean = DMatrix::<Complex64>::zeros(dim, dim);
        enumerate(&s, |snap, p| mean += snapshot_density(snap).unwrap() * Complex64::new(p, 0.0));
        let v = DVector::from_column_slice(s.amplitudes());
        let rho = &v * v.adjoint();
        prop_assert!((mean - rho).norm() < 1e-12);
    }

    #[test]
    fn closed_form_matches_trace(
        (w, bases, outcome) in (1usize..=4).prop_flat_map(|n| (word(n), prop::collection::vec(0..3usize, n), 0..1usize << n))
    ) {
        let snap = Snapshot::new(BasisChoice(bases.iter().map(|&i| Basis::ALL[i]).collect()), outcome).unwrap();
        let p = to_dense(&Observable::single(1.0, w.clone())).unwrap();
        let trace = (p * snapshot_density(&snap).unwrap()).trace();
        prop_assert!(trace.im.abs() < 1e-12);
        prop_assert!((snapshot_pauli_estimate(&snap, &w).unwrap() - trace.re).abs() < 1e-12);
    }

    #[test]
    fn median_of_means_uses_consecutive_groups(
        values in prop::collection::vec(prop::bool::ANY, 1..40),
        groups in 1usize..8,
    ) {
        prop_assume!(groups <= values.len());
        // Z-basis snapshots of one qubit read +3 or -3 for Z.
        let snaps: Vec<Snapshot> = values
            .iter()
            .map(|&b| Snapshot::new(BasisChoice(vec![Basis::Z]), b as usize).unwrap())
            .collect();
        let z = PauliWord::single(1, 0, Pauli::Z);
        let batch = ShadowBatch::new(1, snaps, groups).unwrap();
        let size = values.len() / groups;
        let mut means: Vec<f64> = (0..groups)
            .map(|g| values[g * size..(g + 1) * size].iter().map(|&b| if b { -3.0 } else { 3.0 }).sum::<f64>() / size as f64)
            .collect();
        means.sort_by(f64::total_cmp);
        let want = means[(groups - 1) / 2];
        prop_assert_eq!(estimate_pauli_mom(&batch, &z).unwrap(), want);
    }
}

#[test]
fn even_group_count_takes_lower_middle() {
    let z = PauliWord::single(1, 0, Pauli::Z);
    let snap = |bit| Snapshot::new(BasisChoice(vec![Basis::Z]), bit).unwrap();
    // Group means: +3, -3, +3, -3 -> sorted [-3, -3, 3, 3], lower middle -3.
    let batch = ShadowBatch::new(1, vec![snap(0), snap(1), snap(0), snap(1)], 4).unwrap();
    assert_eq!(estimate_pauli_mom(&batch, &z).unwrap(), -3.0);
    // A trailing snapshot that does not fill a group is ignored.
    let batch = ShadowBatch::new(1, vec![snap(0), snap(0), snap(1)], 2).unwrap();
    assert_eq!(estimate_pauli_mom(&batch, &z).unwrap(), 3.0);
    assert!(ShadowBatch::new(1, vec![snap(0)], 2).is_err());
    assert!(ShadowBatch::new(1, vec![snap(0)], 0).is_err());
}

#[test]
fn identity_costs_nothing_and_reads_one() {
    let s = StateVector::basis(2, 1).unwrap();
    let batch = collect_snapshots(&s, 6, 3, &mut stream(1, &[])).unwrap();
    assert_eq!(estimate_pauli_mom(&batch, &PauliWord::identity(2)).unwrap(), 1.0);
    let zi: PauliWord = "ZI".parse().unwrap();
    let obs = Observable::new(2, [(-0.5, PauliWord::identity(2)), (2.0, zi.clone())]).unwrap();
    let want = -0.5 + 2.0 * estimate_pauli_mom(&batch, &zi).unwrap();
    assert_eq!(estimate_observable(&batch, &obs).unwrap(), want);
}

fn variance(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

#[test]
fn single_qubit_variances_follow_closed_forms() {
    let cfg = AnsatzConfig::new(1, "0011").unwrap();
    let theta: Vec<f64> = (0..cfg.parameter_count()).map(|i| 0.3 + 0.41 * i as f64).collect();
    let s = prepare_ansatz_state(&cfg, &theta).unwrap();
    let z0 = PauliWord::single(4, 0, Pauli::Z);
    let mean = pauli_expectation(&s, &z0).unwrap();
    let (n, reps) = (51, 4000);
    let mut direct = Vec::with_capacity(reps);
    let mut shadows = Vec::with_capacity(reps);
    for r in 0..reps {
        direct.push(direct_pauli_estimate(&s, &z0, n, &mut stream(5, &[r as u64, 0])).unwrap());
        let batch = collect_snapshots(&s, n, 1, &mut stream(5, &[r as u64, 1])).unwrap();
        shadows.push(estimate_pauli_mom(&batch, &z0).unwrap());
    }
    // Single-shot variances: 1 - m^2 measured directly, 3 - m^2 from shadows.
    let want_direct = (1.0 - mean * mean) / n as f64;
    let want_shadow = (3.0 - mean * mean) / n as f64;
    // Relative standard error of a sample variance is about sqrt(2 / reps).
    let tol = 5.0 * (2.0 / reps as f64).sqrt();
    assert!((variance(&direct) / want_direct - 1.0).abs() < tol, "{}", variance(&direct) / want_direct);
    assert!((variance(&shadows) / want_shadow - 1.0).abs() < tol, "{}", variance(&shadows) / want_shadow);
    assert!(variance(&shadows) > variance(&direct));
}

#[test]
fn heavier_words_are_noisier_under_shadows() {
    let s = StateVector::basis(3, 0).unwrap();
    let words = ["IIZ", "IZZ", "ZZZ"].map(|w| w.parse::<PauliWord>().unwrap());
    let mut variances = Vec::new();
    for (k, w) in words.iter().enumerate() {
        let est: Vec<f64> = (0..3000)
            .map(|r| {
                let batch = collect_snapshots(&s, 20, 1, &mut stream(9, &[k as u64, r])).unwrap();
                estimate_pauli_mom(&batch, w).unwrap()
            })
            .collect();
        // Single-snapshot variance of a weight-k word with <P> = 1 is 3^k - 1.
        let want = (3f64.powi(k as i32 + 1) - 1.0) / 20.0;
        assert!((variance(&est) / want - 1.0).abs() < 0.15, "weight {}: {}", k + 1, variance(&est) / want);
        variances.push(variance(&est));
    }
    assert!(variances.windows(2).all(|p| p[0] < p[1]));
}
