//! Bond-length dependent qubit Hamiltonians from a tabulated coefficient grid.
//!
//! The table is a CSV with header `R_angstrom,<word>,<word>,...` and one row
//! per grid point. Each column is interpolated with a natural cubic spline.
//! The identity column carries the nuclear repulsion energy.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{Observable, PauliWord};

/// H2 / STO-3G, 0.30..2.50 A in 0.01 A steps.
pub const H2_STO3G_CSV: &str = include_str!("../data/h2_sto3g.csv");

/// Default central-difference step for force observables, in Angstrom.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Clone, Debug)]
struct CubicSpline {
    second: Vec<f64>,
}

impl CubicSpline {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut second = vec![0.0; n];
        // Tridiagonal system for the interior second derivatives, Thomas algorithm.
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let c = h1 / 6.0;
            let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            second[i] = d_prime[i] - c_prime[i] * second[i + 1];
        }
        Self { second }
    }

    fn eval(&self, x: &[f64], y: &[f64], at: f64) -> f64 {
        let i = x.partition_point(|&g| g <= at).clamp(1, x.len() - 1) - 1;
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - at) / h;
        let b = (at - x[i]) / h;
        a * y[i]
            + b * y[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianTable {
    words: Vec<PauliWord>,
    grid: Vec<f64>,
    /// `columns[j][i]` is the coefficient of `words[j]` at `grid[i]`.
    columns: Vec<Vec<f64>>,
    splines: Vec<CubicSpline>,
}

impl HamiltonianTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The shipped H2 / STO-3G table.
    pub fn h2_sto3g() -> Self {
        Self::parse(H2_STO3G_CSV).expect("shipped table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty table".into(),
        })?;
        let mut fields = header.split(',');
        if fields.next() != Some("R_angstrom") {
            return Err(Error::Parse {
                line: 1,
                message: "header must start with R_angstrom".into(),
            });
        }
        let words = fields
            .map(|f| f.trim().parse::<PauliWord>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?;
        let n = match words.first() {
            Some(w) => w.num_qubits(),
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "no Pauli columns".into(),
                })
            }
        };
        if words.iter().any(|w| w.num_qubits() != n) {
            return Err(Error::Parse {
                line: 1,
                message: "Pauli labels have different lengths".into(),
            });
        }
        for (i, w) in words.iter().enumerate() {
            if words[..i].contains(w) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("duplicate column {w}"),
                });
            }
        }

        let mut grid = Vec::new();
        let mut columns = vec![Vec::new(); words.len()];
        for (line, row) in lines {
            if row.trim().is_empty() {
                continue;
            }
            let values = row
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
            if values.len() != words.len() + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", words.len() + 1, values.len()),
                });
            }
            if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite value {bad}"),
                });
            }
            if let Some(&prev) = grid.last() {
                if values[0] <= prev {
                    return Err(Error::Parse {
                        line,
                        message: format!("grid not strictly increasing ({} after {prev})", values[0]),
                    });
                }
            }
            grid.push(values[0]);
            for (col, v) in columns.iter_mut().zip(&values[1..]) {
                col.push(*v);
            }
        }
        if grid.len() < 4 {
            return Err(Error::Parse {
                line: grid.len() + 1,
                message: format!("need at least 4 grid points, found {}", grid.len()),
            });
        }
        let splines = columns.iter().map(|c| CubicSpline::new(&grid, c)).collect();
        Ok(Self {
            words,
            grid,
            columns,
            splines,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.words[0].num_qubits()
    }

    pub fn words(&self) -> &[PauliWord] {
        &self.words
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Tabulated coefficients at grid row `i`, in word order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn check_range(&self, r: f64) -> Result<()> {
        let (min, max) = self.range();
        if r.is_finite() && r >= min && r <= max {
            Ok(())
        } else {
            Err(Error::OutOfRange { r, min, max })
        }
    }

    /// Interpolated coefficients at bond length `r`, in word order.
    pub fn coefficients_at(&self, r: f64) -> Result<Vec<f64>> {
        self.check_range(r)?;
        Ok(self
            .splines
            .iter()
            .zip(&self.columns)
            .map(|(s, y)| s.eval(&self.grid, y, r))
            .collect())
    }

    pub fn hamiltonian_at(&self, r: f64) -> Result<Observable> {
        let coeffs = self.coefficients_at(r)?;
        Observable::new(self.num_qubits(), coeffs.into_iter().zip(self.words.iter().cloned()))
    }

    /// Central-difference `dH/dR` in Ha/A. The bond force is minus its expectation.
    pub fn force_observable(&self, r: f64, d: f64) -> Result<Observable> {
        if !(d > 0.0) {
            return Err(Error::Config(format!("finite-difference step must be positive, got {d}")));
        }
        let plus = self.coefficients_at(r + d)?;
        let minus = self.coefficients_at(r - d)?;
        Observable::new(
            self.num_qubits(),
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * d))
                .zip(self.words.iter().cloned()),
        )
    }
}
