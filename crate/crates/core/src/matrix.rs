//! Small dense matrices over a [`Scalar`] ring.

use std::array;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 4×4 matrix acting on column vectors: `M Ψ_j = Σ_i m[i][j] Ψ_i`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Matrix4<S>(pub [[S; 4]; 4]);

impl<S: Scalar> Matrix4<S> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Matrix4(array::from_fn(|i| array::from_fn(|j| f(i, j))))
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| S::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diagonal(d: [S; 4]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { S::zero() })
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() * s.clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..4).fold(S::zero(), |acc, k| acc + self.0[i][k].clone() * rhs.0[k][j].clone())
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() - rhs.0[i][j].clone())
    }

    pub fn apply(&self, v: &[S; 4]) -> [S; 4] {
        array::from_fn(|i| (0..4).fold(S::zero(), |acc, k| acc + self.0[i][k].clone() * v[k].clone()))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.0.iter().flatten().map(|s| s.magnitude()).fold(0.0, f64::max)
    }

    pub fn inverse(&self) -> Result<Self> {
        let rows = self.0.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        let inv = inverse(&rows)?;
        Ok(Self::from_fn(|i, j| inv[i][j].clone()))
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.0.iter().map(|r| r.to_vec()).collect()
    }
}

/// Leibniz determinant; adequate for the sizes used here (k ≤ 4).
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    match n {
        0 => S::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {
            let mut acc = S::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<S>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][col].clone() * determinant(&minor);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

fn pivot_row<S: Scalar>(a: &[Vec<S>], col: usize, start: usize, exact: bool) -> Option<usize> {
    if exact {
        (start..a.len()).find(|&r| !a[r][col].is_zero())
    } else {
        (start..a.len())
            .filter(|&r| a[r][col].magnitude() > 1e-12)
            .max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))
    }
}

/// Gauss–Jordan inverse of a square matrix.
pub fn inverse<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = pivot_row(&a, col, col, S::is_exact()).ok_or(Error::NonInvertible)?;
        a.swap(col, p);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve<S: Scalar>(m: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let inv = inverse(m)?;
    Ok(inv
        .iter()
        .map(|row| row.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone()))
        .collect())
}

/// Row rank by elimination (exact pivots for exact backends).
pub fn rank<S: Scalar>(m: &[Vec<S>]) -> usize {
    let mut a = m.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = pivot_row(&a, col, rank, S::is_exact()) else { continue };
        a.swap(rank, p);
        let inv = a[rank][col].inv().expect("pivot is nonzero");
        for r in 0..a.len() {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() * inv.clone();
            for c in col..cols {
                let v = a[rank][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
        rank += 1;
    }
    rank
}
