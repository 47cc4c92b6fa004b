//! Dense matrices and Gaussian elimination over exact fields.
//!
//! Pivot columns are taken left to right, so the pivot set is the
//! lexicographically first maximal independent set of columns; the pivot
//! row within a column is the first nonzero one.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub trait Field: Clone + PartialEq + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `o` is nonzero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// An `rows × cols` matrix, for shapes that may have zero rows.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let (a, b) = (&self[(i, k)], &other[(k, j)]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&other[(i, j)]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&other[(i, j)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn rank(&self) -> usize {
        echelon(self.clone(), None).pivots.len()
    }

    /// Pivot columns, lexicographically first.
    pub fn pivot_columns(&self) -> Vec<usize> {
        echelon(self.clone(), None).pivots
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return T::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = det.neg();
            }
            let pivot = m[(col, col)].clone();
            det = det.mul(&pivot);
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].div(&pivot);
                for c in col..n {
                    let v = m[(r, c)].sub(&factor.mul(&m[(col, c)]));
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        match solve(self, &Self::identity(n)) {
            Ok(sol) if sol.pivots.len() == n => Some(sol.x),
            _ => None,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Rows separated by `;`, entries by `,`.
impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

struct Echelon<T> {
    /// Reduced row echelon form of `[A | B]`.
    m: Matrix<T>,
    pivots: Vec<usize>,
}

/// Reduces `[a | rhs]`, choosing pivots only among the columns of `a`.
fn echelon<T: Field>(a: Matrix<T>, rhs: Option<&Matrix<T>>) -> Echelon<T> {
    let n_a = a.cols;
    let mut m = match rhs {
        None => a,
        Some(b) => {
            assert_eq!(a.rows, b.rows, "shape mismatch");
            Matrix::from_fn(a.rows, n_a + b.cols, |i, j| {
                if j < n_a {
                    a[(i, j)].clone()
                } else {
                    b[(i, j - n_a)].clone()
                }
            })
        }
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n_a {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        m.swap_rows(p, row);
        let inv = T::one().div(&m[(row, col)]);
        for c in col..m.cols {
            if !m[(row, c)].is_zero() {
                let v = m[(row, c)].mul(&inv);
                m[(row, c)] = v;
            }
        }
        for r in 0..m.rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for c in col..m.cols {
                if m[(row, c)].is_zero() {
                    continue;
                }
                let v = m[(r, c)].sub(&factor.mul(&m[(row, c)]));
                m[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Echelon { m, pivots }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistent {
    /// Right-hand-side column with no solution.
    pub column: usize,
}

pub struct Solution<T> {
    pub x: Matrix<T>,
    pub pivots: Vec<usize>,
}

/// Solves `a · X = b`; non-pivot unknowns are set to zero.
pub fn solve<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Solution<T>, Inconsistent> {
    let Echelon { m, pivots } = echelon(a.clone(), Some(b));
    let rank = pivots.len();
    for r in rank..m.rows {
        if let Some(column) = (0..b.cols).find(|&j| !m[(r, a.cols + j)].is_zero()) {
            return Err(Inconsistent { column });
        }
    }
    let mut x = Matrix::zeros(a.cols, b.cols);
    for (r, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x[(pc, j)] = m[(r, a.cols + j)].clone();
        }
    }
    Ok(Solution { x, pivots })
}

/// Basis of the right null space `{v : a v = 0}`.
pub fn nullspace<T: Field>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let Echelon { m, pivots } = echelon(a.clone(), None);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); a.cols];
            v[f] = T::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[(r, f)].neg();
            }
            v
        })
        .collect()
}
