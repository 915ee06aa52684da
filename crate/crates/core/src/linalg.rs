//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduces to reduced row echelon form in place; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = Rational::one() / self.get(r, c);
            for k in c..self.cols {
                let v = self.get(r, k) * &inv;
                self.set(r, k, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for k in c..self.cols {
                    let v = self.get(i, k) - &factor * self.get(r, k);
                    self.set(i, k, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Unique solution of `self * x = rhs` for a square nonsingular matrix.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(rhs.len(), self.rows);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, n + 1);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n, rhs[r].clone());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return None;
        }
        Some((0..n).map(|r| aug.get(r, n).clone()).collect())
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Rational::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| dot(&self.data[r * self.cols..(r + 1) * self.cols], v))
            .collect()
    }

    /// A nonzero vector `t` with `self * t = 0`, provided the kernel is
    /// exactly one-dimensional.
    pub fn kernel_vector(&self) -> Option<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        if pivots.len() + 1 != self.cols {
            return None;
        }
        let free = (0..self.cols).find(|c| !pivots.contains(c))?;
        let mut t = vec![Rational::zero(); self.cols];
        t[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            t[pc] = -m.get(r, free).clone();
        }
        Some(t)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, ints};

    #[test]
    fn rank_of_dependent_rows() {
        let m = Matrix::from_rows(&[ints(&[1, 1, 0]), ints(&[0, 1, 1]), ints(&[1, 2, 1])]);
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::from_rows(&[ints(&[0, 0])]).rank(), 0);
    }

    #[test]
    fn solves_system() {
        let m = Matrix::from_rows(&[ints(&[2, 1]), ints(&[1, 3])]);
        let x = m.solve(&ints(&[3, 5])).unwrap();
        assert_eq!(x, vec![frac(4, 5), frac(7, 5)]);
        let singular = Matrix::from_rows(&[ints(&[1, 2]), ints(&[2, 4])]);
        assert!(singular.solve(&ints(&[1, 2])).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(&[ints(&[1, 1, 1]), ints(&[1, 0, 0]), ints(&[0, 0, 1])]);
        let inv = m.inverse().unwrap();
        let b = ints(&[1, 2, 3]);
        assert_eq!(m.mul_vec(&inv.mul_vec(&b)), b);
        assert_eq!(inv.mul_vec(&b), m.solve(&b).unwrap());
        assert!(Matrix::from_rows(&[ints(&[1, 1]), ints(&[1, 1])]).inverse().is_none());
    }

    #[test]
    fn kernel_is_orthogonal() {
        let m = Matrix::from_rows(&[ints(&[1, 0, 0, 0]), ints(&[1, 1, 1, 0]), ints(&[1, 1, 1, 1])]);
        let t = m.kernel_vector().unwrap();
        for r in 0..m.rows() {
            let row: Vec<_> = (0..m.cols()).map(|c| m.get(r, c).clone()).collect();
            assert!(dot(&row, &t).is_zero());
        }
        assert!(t.iter().any(|v| !v.is_zero()));
        let full = Matrix::from_rows(&[ints(&[1, 0]), ints(&[0, 1])]);
        assert!(full.kernel_vector().is_none());
    }
}
