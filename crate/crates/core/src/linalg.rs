//! Small dense matrices over [`Real`] and the symmetric eigensolver.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// All entries, row by row.
    pub fn row_major(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max_of(x.abs()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        })
    }

    /// First `(i, j)` with `|a_ij − a_ji| > tol`, if any.
    pub fn asymmetry(&self, tol: &T) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self[(i, j)].clone() - self[(j, i)].clone()).abs() > *tol {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` when a pivot
    /// vanishes exactly.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| a[(x, c)].abs().partial_cmp(&a[(y, c)].abs()).unwrap())?;
            if a[(p, c)].is_zero() {
                return None;
            }
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / piv.clone();
                inv[(c, j)] = inv[(c, j)].clone() / piv.clone();
            }
            for r in 0..n {
                if r != c && !a[(r, c)].is_zero() {
                    let f = a[(r, c)].clone();
                    for j in 0..n {
                        a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                        inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
                    }
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Sweeps continue until the off-diagonal Frobenius norm is at most
/// `64 ε ‖A‖_F`. Fails with `NotSymmetric` if `|a_ij − a_ji|` exceeds
/// `√ε ‖A‖_max`.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::PartitionMismatch { dim: a.rows() });
    }
    let n = a.rows();
    let scale = a.max_abs();
    if let Some((i, j)) = a.asymmetry(&(T::epsilon().sqrt() * scale.clone().max_of(T::one()))) {
        return Err(Error::NotSymmetric { i, j });
    }
    // Symmetrize exactly so rotations preserve symmetry.
    let two = T::from_i64(2);
    let mut m = Matrix::from_fn(n, n, |i, j| (a[(i, j)].clone() + a[(j, i)].clone()) / two.clone());
    let frob = |m: &Matrix<T>, off_only: bool| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if !off_only || i != j {
                    s = s + m[(i, j)].clone() * m[(i, j)].clone();
                }
            }
        }
        s.sqrt()
    };
    let target = T::from_i64(64) * T::epsilon() * frob(&m, false);
    for _sweep in 0..100 {
        if frob(&m, true) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)].clone();
                if apq.is_zero() {
                    continue;
                }
                let app = m[(p, p)].clone();
                let aqq = m[(q, q)].clone();
                let theta = (aqq - app) / (two.clone() * apq.clone());
                let sign = if theta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (theta.abs() + (theta.clone() * theta + T::one()).sqrt());
                let c = T::one() / (t.clone() * t.clone() + T::one()).sqrt();
                let s = t.clone() * c.clone();
                for k in 0..n {
                    let mkp = m[(k, p)].clone();
                    let mkq = m[(k, q)].clone();
                    m[(k, p)] = c.clone() * mkp.clone() - s.clone() * mkq.clone();
                    m[(k, q)] = s.clone() * mkp + c.clone() * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)].clone();
                    let mqk = m[(q, k)].clone();
                    m[(p, k)] = c.clone() * mpk.clone() - s.clone() * mqk.clone();
                    m[(q, k)] = s.clone() * mpk + c.clone() * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[(i, i)].clone()).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}
