//! Dense exact matrices and rank.

use alloc::vec::Vec;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Rank by Gaussian elimination over rows, pivoting on the first nonzero
    /// entry of each column.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Scalar>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][c].clone();
            let pivot_row = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &pivot;
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Rank by incremental column-space basis building (modified Gram–Schmidt
    /// without normalization), an elimination order independent of [`Matrix::rank`].
    pub fn rank_by_columns(&self) -> usize {
        let mut basis: Vec<(Vec<Scalar>, Scalar)> = Vec::new();
        for c in (0..self.cols).rev() {
            let mut v: Vec<Scalar> = (0..self.rows).rev().map(|r| self.get(r, c).clone()).collect();
            for (b, bb) in &basis {
                let proj: Scalar = v.iter().zip(b).map(|(x, y)| x * y).sum();
                if proj.is_zero() {
                    continue;
                }
                let f = &proj / bb;
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &(&f * y);
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                let norm: Scalar = v.iter().map(|x| x * x).sum();
                basis.push((v, norm));
            }
        }
        basis.len()
    }
}
