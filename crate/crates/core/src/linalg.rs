//! Small dense square matrices.
//!
//! Everything here works on `d x d` matrices with `d` in the tens at most, so
//! storage is a flat row-major `Vec<f64>` and the algorithms are the textbook
//! ones.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HawkesError, Result};

const POWER_ITER_TOL: f64 = 1e-12;
const POWER_ITER_MAX: usize = 100_000;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(HawkesError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.data.iter()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - self[(i, j)]
        })
    }

    /// Solves `self * x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(HawkesError::DimensionMismatch(format!(
                "right-hand side has {} entries, expected {n}",
                rhs.len()
            )));
        }
        let mut a = self.data.clone();
        let mut b = rhs.to_vec();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
                .expect("non-empty pivot range");
            if a[pivot * n + col].abs() <= 1e-14 * scale {
                return Err(HawkesError::InvalidParameter(
                    "matrix is singular to working precision".into(),
                ));
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                b.swap(col, pivot);
            }
            let diag = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / diag;
                if factor == 0.0 {
                    continue;
                }
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
                b[r] -= factor * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let tail: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
            x[r] = (b[r] - tail) / a[r * n + r];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Spectral radius of an entrywise nonnegative matrix.
    ///
    /// For `n <= 2` the characteristic polynomial is solved directly. Larger
    /// matrices use power iteration on `A + I` from the all-ones vector; the
    /// shift makes the dominant eigenvalue strictly dominant in modulus even
    /// for periodic matrices. Iteration stops when the Collatz-Wielandt bounds
    /// `min (Ax)_i / x_i <= rho <= max (Ax)_i / x_i` meet or, for reducible
    /// matrices where they need not meet, when the norm-ratio estimate settles.
    pub fn spectral_radius_nonneg(&self) -> f64 {
        match self.n {
            0 => 0.0,
            1 => self.data[0].abs(),
            2 => {
                let (a, b, c, d) = (self.data[0], self.data[1], self.data[2], self.data[3]);
                let half_tr = 0.5 * (a + d);
                let disc = half_tr * half_tr - (a * d - b * c);
                if disc >= 0.0 {
                    (half_tr + disc.sqrt())
                        .abs()
                        .max((half_tr - disc.sqrt()).abs())
                } else {
                    // complex pair; cannot happen for nonnegative input
                    (a * d - b * c).abs().sqrt()
                }
            }
            n => {
                let mut x = vec![1.0; n];
                let mut estimate = f64::INFINITY;
                for _ in 0..POWER_ITER_MAX {
                    let ax = self.mul_vec(&x);
                    let shifted: Vec<f64> = ax.iter().zip(&x).map(|(a, v)| a + v).collect();
                    let (lo, hi) = shifted
                        .iter()
                        .zip(&x)
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (s, v)| {
                            (lo.min(s / v), hi.max(s / v))
                        });
                    // x is normalized to unit sup norm
                    let norm = shifted.iter().fold(0.0f64, |m, v| m.max(*v));
                    let previous = estimate;
                    estimate = norm - 1.0;
                    if hi - lo < POWER_ITER_TOL {
                        estimate = 0.5 * (lo + hi) - 1.0;
                        break;
                    }
                    if (estimate - previous).abs() < 1e-3 * POWER_ITER_TOL {
                        break;
                    }
                    x = shifted.into_iter().map(|v| v / norm).collect();
                }
                estimate.max(0.0)
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
