//! Variational ground-state search used to seed equilibrium trajectories.

use std::f64::consts::FRAC_PI_2;

use crate::error::{ensure_dim, Error, Result};
use crate::hamiltonian::HamiltonianTable;
use crate::pauli::{expectation_exact, ground_state_exact, Observable};
use crate::statevector::{prepare_ansatz_state, AnsatzConfig};

pub const MAX_ITERATIONS: usize = 10_000;
/// Largest accepted gap to the exact ground energy, in Hartree.
pub const ENERGY_GAP_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub theta: Vec<f64>,
    pub energy: f64,
    pub ground_energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Noise-free energy and its parameter-shift gradient.
pub fn energy_and_gradient(
    ansatz: &AnsatzConfig,
    h: &Observable,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let energy = energy(ansatz, h, theta)?;
    let mut shifted = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        shifted[i] = theta[i] + FRAC_PI_2;
        let plus = self::energy(ansatz, h, &shifted)?;
        shifted[i] = theta[i] - FRAC_PI_2;
        let minus = self::energy(ansatz, h, &shifted)?;
        shifted[i] = theta[i];
        grad.push(0.5 * (plus - minus));
    }
    Ok((energy, grad))
}

fn energy(ansatz: &AnsatzConfig, h: &Observable, theta: &[f64]) -> Result<f64> {
    expectation_exact(&prepare_ansatz_state(ansatz, theta)?, h)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `<H(r)>` over the circuit parameters with BFGS and a
/// backtracking line search, stopping once the gradient infinity-norm drops
/// below `tol`. Fails unless the result is within [`ENERGY_GAP_TOLERANCE`]
/// of the exact ground energy.
pub fn vqe_optimize(
    table: &HamiltonianTable,
    r: f64,
    ansatz: &AnsatzConfig,
    theta_init: &[f64],
    tol: f64,
) -> Result<VqeResult> {
    ensure_dim(ansatz.parameter_count(), theta_init.len())?;
    let h = table.hamiltonian_at(r)?;
    let (ground_energy, _) = ground_state_exact(&h)?;
    let n = theta_init.len();

    let mut x = theta_init.to_vec();
    let (mut f, mut g) = energy_and_gradient(ansatz, &h, &x)?;
    // Inverse Hessian approximation, row-major.
    let identity = |n: usize| {
        let mut m = vec![0.0; n * n];
        (0..n).for_each(|i| m[i * n + i] = 1.0);
        m
    };
    let mut hinv = identity(n);
    let mut iterations = 0;

    while inf_norm(&g) >= tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            hinv = identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }
        let mut step = 1.0;
        let (x_new, f_new) = loop {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let ft = energy(ansatz, &h, &trial)?;
            if ft <= f + 1e-4 * step * slope || step < 1e-12 {
                break (trial, ft);
            }
            step *= 0.5;
        };
        let (_, g_new) = energy_and_gradient(ansatz, &h, &x_new)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
        } else if f_new >= f {
            hinv = identity(n);
        }
        x = x_new;
        f = f_new;
        g = g_new;
    }

    let gap = f - ground_energy;
    if inf_norm(&g) >= tol || gap > ENERGY_GAP_TOLERANCE {
        return Err(Error::NotConverged {
            theta: x,
            energy: f,
            energy_gap: gap,
            iterations,
        });
    }
    Ok(VqeResult {
        theta: x,
        energy: f,
        ground_energy,
        gradient_norm: inf_norm(&g),
        iterations,
    })
}
