//! Exact two-phase simplex with Bland's rule.
//!
//! Solves `maximize c·x subject to A x = b, x ≥ 0` with rational `A` and `c`
//! and right-hand side in Q(√2). Infeasible programs come with a Farkas
//! vector `y` satisfying `yᵀA ≤ 0` and `yᵀb > 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    cols: usize,
    rows: Vec<Vec<(usize, BigRational)>>,
    rhs: Vec<Scalar>,
    objective: Vec<(usize, BigRational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Scalar>, value: Scalar },
    Infeasible { farkas: Vec<Scalar> },
    Unbounded,
}

impl LinearProgram {
    pub fn new(cols: usize) -> Self {
        LinearProgram { cols, ..Default::default() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeff·x_j = rhs`; repeated indices accumulate.
    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>, rhs: Scalar) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.cols));
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, BigRational)>) {
        self.objective = coeffs;
    }

    fn dense(&self, coeffs: &[(usize, BigRational)]) -> Vec<BigRational> {
        let mut row = vec![BigRational::zero(); self.cols];
        for (j, v) in coeffs {
            row[*j] += v;
        }
        row
    }

    /// `yᵀA ≤ 0` on every column and `yᵀb > 0`.
    pub fn is_farkas_certificate(&self, y: &[Scalar]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let mut col = vec![Scalar::zero(); self.cols];
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (j, v) in row {
                col[*j] += yi.scale(v);
            }
        }
        let yb: Scalar = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        col.iter().all(|v| !v.is_positive()) && yb.is_positive()
    }

    pub fn is_feasible_point(&self, x: &[Scalar]) -> bool {
        x.len() == self.cols
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                let lhs: Scalar = row.iter().map(|(j, v)| x[*j].scale(v)).sum();
                lhs == *b
            })
    }

    pub fn solve(&self) -> LpOutcome {
        let m = self.rows.len();
        let n = self.cols;
        let mut signs = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, coeffs) in self.rows.iter().enumerate() {
            let mut r = self.dense(coeffs);
            let mut b = self.rhs[i].clone();
            let flip = b.is_negative();
            if flip {
                for v in r.iter_mut() {
                    *v = -&*v;
                }
                b = -b;
            }
            r.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            signs.push(flip);
            rows.push(r);
            rhs.push(b);
        }
        let mut obj = vec![BigRational::zero(); n + m];
        for r in &rows {
            for (o, v) in obj.iter_mut().zip(r).take(n) {
                *o += v;
            }
        }
        let obj_val = -rhs.iter().sum::<Scalar>();
        let mut t = Tableau { rows, rhs, basis: (n..n + m).collect(), obj, obj_val };
        if t.run(n).is_err() {
            unreachable!("phase one is bounded by zero");
        }
        if t.obj_val.is_negative() {
            let farkas = (0..m)
                .map(|i| {
                    let y = Scalar::from_rational(BigRational::one() + &t.obj[n + i]);
                    if signs[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }

        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= n {
                match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.swap_remove(r);
                        t.rhs.swap_remove(r);
                        t.basis.swap_remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.rows.iter_mut() {
            row.truncate(n);
        }

        let c = self.dense(&self.objective);
        t.obj = c.clone();
        t.obj_val = Scalar::zero();
        for (i, &bv) in t.basis.iter().enumerate() {
            let cb = &c[bv];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in t.obj.iter_mut().zip(&t.rows[i]) {
                if !v.is_zero() {
                    *o -= cb * v;
                }
            }
            t.obj_val += t.rhs[i].scale(cb);
        }
        if t.run(n).is_err() {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Scalar::zero(); n];
        for (i, &bv) in t.basis.iter().enumerate() {
            x[bv] = t.rhs[i].clone();
        }
        LpOutcome::Optimal { x, value: t.obj_val }
    }
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
    /// Reduced costs `c_j − c_B B⁻¹ A_j`.
    obj: Vec<BigRational>,
    obj_val: Scalar,
}

struct Unbounded;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] = self.rhs[r].div_rational(&p);
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &pivot_row[j];
                self.rows[i][j] -= d;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= pivot_rhs.scale(&f);
            }
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                let d = &f * &pivot_row[j];
                self.obj[j] -= d;
            }
            self.obj_val += pivot_rhs.scale(&f);
        }
        self.basis[r] = c;
    }

    /// Maximizes over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> Result<(), Unbounded> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].div_rational(a);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Err(Unbounded);
            };
            self.pivot(r, c);
        }
    }
}
