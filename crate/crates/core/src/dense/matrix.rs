use std::fmt;
use std::ops::Range;

use super::LinalgError;

/// Dense real matrix stored column-major.
///
/// Column-major storage makes every contiguous column range a contiguous
/// slice, so panel views of a block row alias the owning buffer directly.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a rectangular (rows × cols) matrix with ones on the leading diagonal.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m.data[i * rows + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BufferLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BufferLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[j * rows + i] = data[i * cols + j];
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a list of rows. Panics on ragged input; meant for
    /// literals in tests and examples.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut flat = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            flat.extend_from_slice(row);
        }
        Self::from_row_major(r, c, &flat).expect("length checked")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = value;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_col_major(self) -> Vec<f64> {
        self.data
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn view(&self) -> MatRef<'_> {
        MatRef {
            rows: self.rows,
            cols: self.cols,
            data: &self.data,
        }
    }

    pub fn view_mut(&mut self) -> MatMut<'_> {
        MatMut {
            rows: self.rows,
            cols: self.cols,
            data: &mut self.data,
        }
    }

    /// View of the contiguous column range `cols`.
    pub fn columns(&self, cols: Range<usize>) -> MatRef<'_> {
        self.view().columns(cols)
    }

    pub fn columns_mut(&mut self, cols: Range<usize>) -> MatMut<'_> {
        assert!(cols.start <= cols.end && cols.end <= self.cols);
        MatMut {
            rows: self.rows,
            cols: cols.len(),
            data: &mut self.data[cols.start * self.rows..cols.end * self.rows],
        }
    }

    /// Copies the row range `rows` into a new matrix.
    pub fn row_block(&self, rows: Range<usize>) -> Matrix {
        assert!(rows.start <= rows.end && rows.end <= self.rows);
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for j in 0..self.cols {
            data.extend_from_slice(&self.col(j)[rows.clone()]);
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Exact equality of every entry's bit pattern (distinguishes -0.0 from 0.0).
    pub fn bit_eq(&self, other: &Matrix) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Largest absolute entrywise difference. Shapes must match.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale_columns(&mut self, factors: &[f64]) {
        assert_eq!(factors.len(), self.cols);
        let rows = self.rows;
        for (j, &f) in factors.iter().enumerate() {
            for x in &mut self.data[j * rows..(j + 1) * rows] {
                *x *= f;
            }
        }
    }

    /// Elementwise sum `self + other`.
    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op: "sub",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Writes `src` into the block whose top-left corner is (`row`, `col`).
    pub fn set_block(&mut self, row: usize, col: usize, src: MatRef<'_>) {
        assert!(row + src.rows() <= self.rows && col + src.cols() <= self.cols);
        for j in 0..src.cols() {
            let dst = &mut self.col_mut(col + j)[row..row + src.rows()];
            dst.copy_from_slice(src.col(j));
        }
    }

    /// Adds `src` into the block whose top-left corner is (`row`, `col`).
    pub fn add_block(&mut self, row: usize, col: usize, src: MatRef<'_>) {
        assert!(row + src.rows() <= self.rows && col + src.cols() <= self.cols);
        for j in 0..src.cols() {
            let dst = &mut self.col_mut(col + j)[row..row + src.rows()];
            for (d, s) in dst.iter_mut().zip(src.col(j)) {
                *d += s;
            }
        }
    }

    /// Copies the block of `rows` × `cols` at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| self.get(row + i, col + j))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{:>12.5e} ", self.get(i, j))?;
            }
            if self.cols > 8 {
                write!(f, "...")?;
            }
            writeln!(f)?;
        }
        if self.rows > 12 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

/// Borrowed column-major matrix; columns are contiguous with stride `rows`.
#[derive(Clone, Copy, Debug)]
pub struct MatRef<'a> {
    rows: usize,
    cols: usize,
    data: &'a [f64],
}

impl<'a> MatRef<'a> {
    pub fn new(rows: usize, cols: usize, data: &'a [f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &'a [f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &'a [f64] {
        self.data
    }

    pub fn columns(&self, cols: Range<usize>) -> MatRef<'a> {
        assert!(cols.start <= cols.end && cols.end <= self.cols);
        MatRef {
            rows: self.rows,
            cols: cols.len(),
            data: &self.data[cols.start * self.rows..cols.end * self.rows],
        }
    }

    pub fn to_owned(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.to_vec(),
        }
    }
}

impl<'a> From<&'a Matrix> for MatRef<'a> {
    fn from(m: &'a Matrix) -> Self {
        m.view()
    }
}

/// Mutable counterpart of [`MatRef`].
#[derive(Debug)]
pub struct MatMut<'a> {
    rows: usize,
    cols: usize,
    data: &'a mut [f64],
}

impl<'a> MatMut<'a> {
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_ref(&self) -> MatRef<'_> {
        MatRef {
            rows: self.rows,
            cols: self.cols,
            data: self.data,
        }
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Overwrites the view with `src` (same shape).
    pub fn copy_from(&mut self, src: MatRef<'_>) {
        assert_eq!(self.shape(), src.shape());
        self.data.copy_from_slice(src.as_slice());
    }

    /// Splits the view into columns `[0, mid)` and `[mid, cols)`.
    pub fn split_at_col(self, mid: usize) -> (MatMut<'a>, MatMut<'a>) {
        assert!(mid <= self.cols);
        let rows = self.rows;
        let cols = self.cols;
        let (left, right) = self.data.split_at_mut(mid * rows);
        (
            MatMut {
                rows,
                cols: mid,
                data: left,
            },
            MatMut {
                rows,
                cols: cols - mid,
                data: right,
            },
        )
    }
}

/// Square upper-triangular matrix; entries below the diagonal are exactly zero.
#[derive(Clone, PartialEq)]
pub struct UpperTriangular(Matrix);

impl UpperTriangular {
    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    /// Checks squareness and the zero lower triangle.
    pub fn try_from_matrix(m: Matrix) -> Result<Self, LinalgError> {
        if m.rows() != m.cols() {
            return Err(LinalgError::NotSquare { shape: m.shape() });
        }
        for j in 0..m.cols() {
            for i in j + 1..m.rows() {
                if m.get(i, j) != 0.0 {
                    return Err(LinalgError::NotUpperTriangular { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps `m` after zeroing its strictly lower triangle.
    pub(crate) fn from_upper_part(mut m: Matrix) -> Self {
        debug_assert_eq!(m.rows(), m.cols());
        let n = m.rows();
        for j in 0..n {
            for x in &mut m.col_mut(j)[j + 1..] {
                *x = 0.0;
            }
        }
        Self(m)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        Self::try_from_matrix(Matrix::from_rows(rows)).expect("not upper triangular")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.get(i, i)).collect()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn view(&self) -> MatRef<'_> {
        self.0.view()
    }

    pub fn bit_eq(&self, other: &UpperTriangular) -> bool {
        self.0.bit_eq(&other.0)
    }

    /// Flips the sign of each row whose diagonal entry is negative.
    pub fn sign_normalized(&self) -> UpperTriangular {
        let n = self.order();
        let mut m = self.0.clone();
        for i in 0..n {
            if m.get(i, i) < 0.0 {
                for j in i..n {
                    m.set(i, j, -m.get(i, j));
                }
            }
        }
        Self(m)
    }
}

impl fmt::Debug for UpperTriangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UpperTriangular({:?})", self.0)
    }
}
