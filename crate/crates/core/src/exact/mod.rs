//! Exact rational scalars, dense rational matrices and the linear-algebra
//! kernels the rest of the crate is built on. No floating point here.

pub mod bareiss;
mod rational;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use rational::{
    abs, common_denominator, dot, format_rational, int, integerize, ints, norm_squared,
    parse_rational, ratio, to_f64, Rational,
};

use crate::error::{Error, Result};

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from equally long rows. An empty row list gives a
    /// `0 x cols` matrix only through [`RationalMatrix::zeros`].
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer literals; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| ints(r)).collect()).expect("ragged literal matrix")
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &[Rational]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.row_iter().map(<[Rational]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Rows in the given order (duplicates allowed).
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            rows: idx.len(),
            cols: self.cols,
            data: idx
                .iter()
                .flat_map(|&i| self.row(i).iter().cloned())
                .collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        self.row_iter().map(|r| dot(r, x)).collect()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Each row multiplied by the lcm of its denominators, together with
    /// those positive row scales.
    pub fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        self.row_iter().map(integerize).unzip()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter()
            .map(|r| r.iter().map(to_f64).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .row_iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        write!(f, "RationalMatrix{rows:?}")
    }
}

/// Determinant via fraction-free elimination on the row-integerized matrix.
pub fn det_exact(m: &RationalMatrix) -> Rational {
    assert!(m.is_square(), "det_exact needs a square matrix");
    let (rows, scales) = m.integer_rows();
    let det = det_integer(rows);
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    Rational::new(det, scale)
}

/// Determinant of an integer matrix, using checked `i128` arithmetic when
/// every entry fits in an `i64` and falling back to big integers otherwise.
pub fn det_integer(rows: Vec<Vec<BigInt>>) -> BigInt {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_i64().map(i128::from)).collect())
        .collect();
    if let Some(mut small) = small {
        if let Some(d) = bareiss::det_i128(&mut small) {
            return BigInt::from(d);
        }
    }
    bareiss::det_bigint(rows)
}

pub fn rank_of(m: &RationalMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let (rows, _) = m.integer_rows();
    bareiss::rank_bigint(rows)
}

/// Exact solution of `m x = rhs` by Gauss-Jordan elimination.
pub fn solve_linear(m: &RationalMatrix, rhs: &[Rational]) -> Result<Vec<Rational>> {
    if !m.is_square() || rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with {} right-hand sides",
            m.rows(),
            m.cols(),
            rhs.len()
        )));
    }
    let n = m.rows();
    let mut aug: Vec<Vec<Rational>> = m
        .row_iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.to_vec();
            row.push(b.clone());
            row
        })
        .collect();
    gauss_jordan(&mut aug, n)?;
    Ok(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "inverse of a non-square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut aug: Vec<Vec<Rational>> = m
        .row_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.to_vec();
            row.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    gauss_jordan(&mut aug, n)?;
    RationalMatrix::from_rows(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

// Reduces the leading n x n block of `aug` to the identity.
fn gauss_jordan(aug: &mut [Vec<Rational>], n: usize) -> Result<()> {
    let width = aug.first().map_or(0, Vec::len);
    for col in 0..n {
        let p = (col..n)
            .find(|&i| !aug[i][col].is_zero())
            .ok_or(Error::SingularMatrix)?;
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..width {
                if !pivot[j].is_zero() {
                    row[j] -= &f * &pivot[j];
                }
            }
        }
    }
    Ok(())
}

/// The `i`-th column of `adj(m)`: orthogonal to every row of `m` except row
/// `i`, with which it has inner product `det m`.
pub fn adjugate_column(m: &RationalMatrix, i: usize) -> Vec<Rational> {
    assert!(
        m.is_square() && i < m.rows(),
        "adjugate_column: bad shape or index"
    );
    let n = m.rows();
    if n == 1 {
        return vec![Rational::one()];
    }
    let other_rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
    (0..n)
        .map(|j| {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = det_exact(&m.submatrix(&other_rows, &cols));
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect()
}

/// Inverse after replacing the basis row at `position` with `new_row`,
/// given the current inverse. Rank-one (pivot) update in `O(n^2)`.
pub fn basis_inverse_update(
    inv: &RationalMatrix,
    position: usize,
    new_row: &[Rational],
) -> Result<RationalMatrix> {
    let n = inv.rows();
    if !inv.is_square() || position >= n || new_row.len() != n {
        return Err(Error::DimensionMismatch(
            "basis_inverse_update: shape mismatch".into(),
        ));
    }
    // w = new_row^T * inv; the old row times inv is e_position.
    let w: Vec<Rational> = (0..n)
        .map(|j| {
            let mut acc = Rational::zero();
            for (k, a) in new_row.iter().enumerate() {
                if !a.is_zero() {
                    acc += a * &inv[(k, j)];
                }
            }
            acc
        })
        .collect();
    let pivot = &w[position];
    if pivot.is_zero() {
        return Err(Error::SingularUpdate);
    }
    let pcol: Vec<Rational> = inv
        .column(position)
        .into_iter()
        .map(|v| v / pivot)
        .collect();
    let mut out = inv.clone();
    for j in 0..n {
        if j == position {
            for k in 0..n {
                out[(k, j)] = pcol[k].clone();
            }
        } else if !w[j].is_zero() {
            for k in 0..n {
                out[(k, j)] -= &pcol[k] * &w[j];
            }
        }
    }
    Ok(out)
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn max_abs(values: &[Rational]) -> Rational {
    values
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero)
}
