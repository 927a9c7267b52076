//! Dense row-major matrices over a generic ring element.
//!
//! Deliberately minimal: the rank and determinant machinery that must be
//! exact lives in `rankcheck`, the Laurent-entry matrices in `lax`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::Zero;

/// Ring operations needed for matrix arithmetic (no division).
pub trait RingElem:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> RingElem for T where
    T: Clone
        + PartialEq
        + std::fmt::Debug
        + Zero
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingElem> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Mat<T> {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Mat<T> {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity_scaled(n: usize, diag: T) -> Mat<T> {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag.clone();
        }
        m
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

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn neg(&self) -> Mat<T> {
        Mat::from_fn(self.rows, self.cols, |r, c| -self[(r, c)].clone())
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Mat<T> {
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() * s.clone()
        })
    }

    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out: Mat<T> = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out[(r, c)].clone();
                    out[(r, c)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut t = T::zero();
        for i in 0..self.rows {
            t = t + self[(i, i)].clone();
        }
        t
    }

    /// Commutator [A, B] = AB − BA.
    pub fn commutator(&self, other: &Mat<T>) -> Mat<T> {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|t| t.is_zero())
    }

    /// Places `block` with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat<T>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn map<U: RingElem>(&self, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat::from_fn(self.rows, self.cols, |r, c| f(&self[(r, c)]))
    }
}

impl<T: RingElem + num_traits::One + std::ops::Div<Output = T>> Mat<T> {
    /// Inverse over a field by Gauss-Jordan elimination; None if singular.
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Mat<T> = Mat::identity_scaled(n, T::one());
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
                inv.data.swap(col * n + j, pivot * n + j);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let av = a[(col, j)].clone() * f.clone();
                    a[(r, j)] = a[(r, j)].clone() - av;
                    let iv = inv[(col, j)].clone() * f.clone();
                    inv[(r, j)] = inv[(r, j)].clone() - iv;
                }
            }
        }
        Some(inv)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};

    #[test]
    fn matmul_and_trace() {
        let a = Mat::from_rows(vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)]]);
        let b = Mat::from_rows(vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
        let ab = a.matmul(&b);
        assert_eq!(
            ab,
            Mat::from_rows(vec![vec![qi(2), qi(1)], vec![qi(4), qi(3)]])
        );
        assert_eq!(a.trace(), qi(5));
    }

    #[test]
    fn commutator_antisymmetric() {
        let a = Mat::from_rows(vec![vec![qi(1), qi(2)], vec![qi(0), qi(1)]]);
        let b = Mat::from_rows(vec![vec![qi(2), qi(0)], vec![qi(1), qi(1)]]);
        let ab = a.commutator(&b);
        let ba = b.commutator(&a);
        assert_eq!(ab, ba.neg());
        assert!(ab.trace().is_zero());
    }

    #[test]
    fn block_placement() {
        let mut m: Mat<Q> = Mat::zeros(3, 3);
        let b = Mat::from_rows(vec![vec![qi(5)]]);
        m.set_block(2, 1, &b);
        assert_eq!(m[(2, 1)], qi(5));
        assert!(m[(0, 0)].is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Mat::from_rows(vec![
            vec![qi(2), qi(1), qi(0)],
            vec![qi(1), qi(3), qi(1)],
            vec![qi(0), qi(1), qi(2)],
        ]);
        let inv = a.inverse().unwrap();
        let id: Mat<Q> = Mat::identity_scaled(3, qi(1));
        assert_eq!(a.matmul(&inv), id);
        assert_eq!(inv.matmul(&a), id);
        let singular = Mat::from_rows(vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]]);
        assert!(singular.inverse().is_none());
    }
}
