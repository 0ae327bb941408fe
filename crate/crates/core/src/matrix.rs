//! Dense column-major storage and strided views.
//!
//! A [`DenseMatrix`] owns its data. [`MatRef`] and [`MatMut`] are windows
//! into it: a base pointer plus a row stride and a column stride, so that
//! submatrices and transposes are free. Element `(i, j)` of a view lives at
//! `ptr + i * rs + j * cs`.

use std::fmt;
use std::marker::PhantomData;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uplo {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diag {
    Unit,
    NonUnit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleSpec {
    pub uplo: Uplo,
    pub diag: Diag,
    pub side: Side,
}

impl TriangleSpec {
    pub fn upper(side: Side, diag: Diag) -> Self {
        TriangleSpec {
            uplo: Uplo::Upper,
            diag,
            side,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    ld: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::zeros_with_ld(rows, cols, rows.max(1))
    }

    /// Zero matrix with an explicit leading stride (`ld >= rows`).
    pub fn zeros_with_ld(rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows.max(1), "leading stride {ld} < rows {rows}");
        DenseMatrix {
            rows,
            cols,
            ld,
            data: vec![0.0; ld * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major nested slices, the way matrices are
    /// usually written down in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if rows == 0 {
            return Ok(Self::zeros(0, cols));
        }
        Ok(DenseMatrix {
            rows,
            cols,
            ld: rows,
            data,
        })
    }

    /// Uniform entries in `[0, 1)`, deterministic per seed.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(rows, cols, |_, _| rng.gen::<f64>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn leading_stride(&self) -> usize {
        self.ld
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_ref(&self) -> MatRef<'_> {
        MatRef {
            ptr: self.data.as_ptr(),
            rows: self.rows,
            cols: self.cols,
            rs: 1,
            cs: self.ld as isize,
            _marker: PhantomData,
        }
    }

    pub fn as_mut(&mut self) -> MatMut<'_> {
        MatMut {
            ptr: self.data.as_mut_ptr(),
            rows: self.rows,
            cols: self.cols,
            rs: 1,
            cs: self.ld as isize,
            _marker: PhantomData,
        }
    }

    pub fn view(&self, row_offset: usize, col_offset: usize, rows: usize, cols: usize) -> MatRef<'_> {
        self.as_ref().submatrix(row_offset, col_offset, rows, cols)
    }

    pub fn view_mut(
        &mut self,
        row_offset: usize,
        col_offset: usize,
        rows: usize,
        cols: usize,
    ) -> MatMut<'_> {
        self.as_mut().submatrix(row_offset, col_offset, rows, cols)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy of a view into fresh column-major storage.
    pub fn from_view(v: MatRef<'_>) -> DenseMatrix {
        DenseMatrix::from_fn(v.rows(), v.cols(), |i, j| v.get(i, j))
    }

    /// Copy of the upper triangle mirrored into the lower one.
    pub fn symmetrized_upper(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            if i <= j {
                self[(i, j)]
            } else {
                self[(j, i)]
            }
        })
    }

    /// Copy of the upper triangle with zeros below; `unit` forces a unit diagonal.
    pub fn upper_triangle(&self, unit: bool) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => self[(i, j)],
            std::cmp::Ordering::Equal if unit => 1.0,
            std::cmp::Ordering::Equal => self[(i, j)],
            std::cmp::Ordering::Greater => 0.0,
        })
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i + j * self.ld]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i + j * self.ld]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} (ld {})", self.rows, self.cols, self.ld)?;
        for i in 0..self.rows.min(12) {
            for j in 0..self.cols.min(12) {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Read-only strided view.
#[derive(Clone, Copy)]
pub struct MatRef<'a> {
    ptr: *const f64,
    rows: usize,
    cols: usize,
    rs: isize,
    cs: isize,
    _marker: PhantomData<&'a f64>,
}

unsafe impl Send for MatRef<'_> {}
unsafe impl Sync for MatRef<'_> {}

impl<'a> MatRef<'a> {
    /// # Safety
    /// Every `(i, j)` with `i < rows`, `j < cols` must address a live `f64`
    /// for `'a`.
    pub unsafe fn from_raw_parts(ptr: *const f64, rows: usize, cols: usize, rs: isize, cs: isize) -> Self {
        MatRef {
            ptr,
            rows,
            cols,
            rs,
            cs,
            _marker: PhantomData,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_stride(&self) -> isize {
        self.rs
    }

    pub fn col_stride(&self) -> isize {
        self.cs
    }

    pub fn as_ptr(&self) -> *const f64 {
        self.ptr
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        unsafe { self.get_unchecked(i, j) }
    }

    /// # Safety
    /// `i < rows` and `j < cols`.
    #[inline(always)]
    pub unsafe fn get_unchecked(&self, i: usize, j: usize) -> f64 {
        *self.ptr.offset(i as isize * self.rs + j as isize * self.cs)
    }

    pub fn submatrix(self, row_offset: usize, col_offset: usize, rows: usize, cols: usize) -> MatRef<'a> {
        assert!(
            row_offset + rows <= self.rows && col_offset + cols <= self.cols,
            "submatrix ({row_offset},{col_offset})+{rows}x{cols} outside {}x{}",
            self.rows,
            self.cols
        );
        let ptr = if rows == 0 || cols == 0 {
            self.ptr
        } else {
            self.ptr
                .wrapping_offset(row_offset as isize * self.rs + col_offset as isize * self.cs)
        };
        MatRef {
            ptr,
            rows,
            cols,
            rs: self.rs,
            cs: self.cs,
            _marker: PhantomData,
        }
    }

    pub fn transpose(self) -> MatRef<'a> {
        MatRef {
            ptr: self.ptr,
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
            _marker: PhantomData,
        }
    }

    pub fn to_owned(&self) -> DenseMatrix {
        DenseMatrix::from_view(*self)
    }
}

/// Mutable strided view. Writes through it are visible in the origin
/// matrix at the mapped coordinates.
pub struct MatMut<'a> {
    ptr: *mut f64,
    rows: usize,
    cols: usize,
    rs: isize,
    cs: isize,
    _marker: PhantomData<&'a mut f64>,
}

unsafe impl Send for MatMut<'_> {}

impl<'a> MatMut<'a> {
    /// # Safety
    /// Every `(i, j)` in range must address a distinct live `f64` that is
    /// not aliased elsewhere for `'a`.
    pub unsafe fn from_raw_parts(ptr: *mut f64, rows: usize, cols: usize, rs: isize, cs: isize) -> Self {
        MatMut {
            ptr,
            rows,
            cols,
            rs,
            cs,
            _marker: PhantomData,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_stride(&self) -> isize {
        self.rs
    }

    pub fn col_stride(&self) -> isize {
        self.cs
    }

    pub fn as_mut_ptr(&mut self) -> *mut f64 {
        self.ptr
    }

    pub fn rb(&self) -> MatRef<'_> {
        MatRef {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            rs: self.rs,
            cs: self.cs,
            _marker: PhantomData,
        }
    }

    pub fn rb_mut(&mut self) -> MatMut<'_> {
        MatMut {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            rs: self.rs,
            cs: self.cs,
            _marker: PhantomData,
        }
    }

    pub fn into_ref(self) -> MatRef<'a> {
        MatRef {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            rs: self.rs,
            cs: self.cs,
            _marker: PhantomData,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rb().get(i, j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        unsafe { self.set_unchecked(i, j, v) }
    }

    /// # Safety
    /// `i < rows` and `j < cols`.
    #[inline(always)]
    pub unsafe fn set_unchecked(&mut self, i: usize, j: usize, v: f64) {
        *self.ptr.offset(i as isize * self.rs + j as isize * self.cs) = v;
    }

    /// # Safety
    /// `i < rows` and `j < cols`.
    #[inline(always)]
    pub unsafe fn ptr_at(&mut self, i: usize, j: usize) -> *mut f64 {
        self.ptr.offset(i as isize * self.rs + j as isize * self.cs)
    }

    #[inline]
    pub fn update(&mut self, i: usize, j: usize, f: impl FnOnce(f64) -> f64) {
        let v = self.get(i, j);
        self.set(i, j, f(v));
    }

    pub fn submatrix(self, row_offset: usize, col_offset: usize, rows: usize, cols: usize) -> MatMut<'a> {
        assert!(
            row_offset + rows <= self.rows && col_offset + cols <= self.cols,
            "submatrix ({row_offset},{col_offset})+{rows}x{cols} outside {}x{}",
            self.rows,
            self.cols
        );
        let ptr = if rows == 0 || cols == 0 {
            self.ptr
        } else {
            self.ptr
                .wrapping_offset(row_offset as isize * self.rs + col_offset as isize * self.cs)
        };
        MatMut {
            ptr,
            rows,
            cols,
            rs: self.rs,
            cs: self.cs,
            _marker: PhantomData,
        }
    }

    pub fn transpose(self) -> MatMut<'a> {
        MatMut {
            ptr: self.ptr,
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
            _marker: PhantomData,
        }
    }

    /// Splits into rows `[0, r)` and `[r, rows)`.
    pub fn split_at_row(self, r: usize) -> (MatMut<'a>, MatMut<'a>) {
        assert!(r <= self.rows);
        let (rows, cols, rs, cs, ptr) = (self.rows, self.cols, self.rs, self.cs, self.ptr);
        let top = MatMut { ptr, rows: r, cols, rs, cs, _marker: PhantomData };
        let bot_ptr = if r < rows { ptr.wrapping_offset(r as isize * rs) } else { ptr };
        let bottom = MatMut { ptr: bot_ptr, rows: rows - r, cols, rs, cs, _marker: PhantomData };
        (top, bottom)
    }

    /// Splits into columns `[0, c)` and `[c, cols)`.
    pub fn split_at_col(self, c: usize) -> (MatMut<'a>, MatMut<'a>) {
        let (l, r) = self.transpose().split_at_row(c);
        (l.transpose(), r.transpose())
    }

    pub fn fill(&mut self, v: f64) {
        for j in 0..self.cols {
            for i in 0..self.rows {
                unsafe { self.set_unchecked(i, j, v) };
            }
        }
    }

    pub fn copy_from(&mut self, src: MatRef<'_>) {
        assert!(src.rows() == self.rows && src.cols() == self.cols, "copy_from shape mismatch");
        for j in 0..self.cols {
            for i in 0..self.rows {
                unsafe { self.set_unchecked(i, j, src.get_unchecked(i, j)) };
            }
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        assert!(a < self.rows && b < self.rows);
        for j in 0..self.cols {
            unsafe {
                let pa = self.ptr_at(a, j);
                let pb = self.ptr_at(b, j);
                std::ptr::swap(pa, pb);
            }
        }
    }
}

/// Symmetric positive definite test matrix `GᵀG + n·I` with `G` uniform in
/// `[0, 1)`. Symmetry is exact: only the upper triangle is computed.
pub fn make_spd(n: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let g = DenseMatrix::random(n, n, seed);
    let mut m = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let mut s = 0.0;
            for p in 0..n {
                s += g[(p, i)] * g[(p, j)];
            }
            if i == j {
                s += n as f64;
            }
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    Ok(m)
}

/// Upper triangular matrix with unit-dominant diagonal, suited to
/// triangular solves that stay well conditioned.
pub fn make_unit_dominant_upper(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => (rng.gen::<f64>() - 0.5) / (n as f64),
        std::cmp::Ordering::Equal => 1.0 + rng.gen::<f64>(),
        std::cmp::Ordering::Greater => 0.0,
    })
}

/// Random symmetric matrix with entries in `[-1, 1)`.
pub fn make_symmetric(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = 2.0 * rng.gen::<f64>() - 1.0;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn frobenius_norm(a: MatRef<'_>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let v = a.get(i, j);
            s += v * v;
        }
    }
    s.sqrt()
}

pub fn trace(a: MatRef<'_>) -> Result<f64> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok((0..a.rows()).map(|i| a.get(i, i)).sum())
}

/// `‖a − b‖_F / ‖b‖_F`, or the absolute difference norm when `b` is zero.
pub fn relative_error(a: MatRef<'_>, b: MatRef<'_>) -> f64 {
    assert!(a.rows() == b.rows() && a.cols() == b.cols(), "shape mismatch");
    let mut diff = 0.0;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let d = a.get(i, j) - b.get(i, j);
            diff += d * d;
        }
    }
    let base = frobenius_norm(b);
    if base == 0.0 {
        diff.sqrt()
    } else {
        diff.sqrt() / base
    }
}
