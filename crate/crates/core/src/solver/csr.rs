use std::fmt::Write as _;

use num_complex::Complex;

use super::SolverError;
use crate::scalar::{czero, Real};

/// Complex sparse matrix in compressed sparse row format.
///
/// Column indices are strictly increasing within each row. Explicit zeros
/// are allowed and kept, so the pattern can be wider than the true support.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> CsrMatrix<T> {
    /// Validates and wraps raw CSR arrays.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex<T>>,
    ) -> Result<Self, SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidMatrix(m.to_string()));
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 {
            return bad("row offsets have the wrong length or do not start at 0");
        }
        if *row_ptr.last().unwrap() != col_idx.len() || col_idx.len() != values.len() {
            return bad("row offsets, indices and values disagree in length");
        }
        for r in 0..nrows {
            if row_ptr[r] > row_ptr[r + 1] {
                return bad("row offsets are not monotone");
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.last().is_some_and(|&c| c >= ncols) {
                return bad("column indices must be increasing and in range");
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, Complex<T>)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of range");
            counts[r + 1] += 1;
        }
        for r in 0..nrows {
            counts[r + 1] += counts[r];
        }
        let mut next = counts.clone();
        let mut entries = vec![(0usize, czero()); triplets.len()];
        for &(r, c, v) in triplets {
            entries[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![Complex::new(T::one(), T::zero()); n],
        }
    }

    pub fn from_dense(a: &[Vec<Complex<T>>]) -> Self {
        let ncols = a.first().map_or(0, Vec::len);
        let trip: Vec<_> = a
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != czero())
                    .map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(a.len(), ncols, &trip)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[Complex<T>]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// Stored value at `(r, c)`, zero if outside the pattern.
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(czero(), |p| vals[p])
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>, SolverError> {
        if x.len() != self.ncols {
            return Err(SolverError::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = vec![czero(); self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            let mut acc = czero();
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            *out = acc;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let trip: Vec<_> = (0..self.nrows)
            .flat_map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(move |(&c, v)| (c, r, v.conj()))
            })
            .collect();
        Self::from_triplets(self.ncols, self.nrows, &trip)
    }

    /// `self + s · other` on the union pattern.
    pub fn add_scaled(&self, other: &Self, s: Complex<T>) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let (c1, v1) = self.row(r);
            trip.extend(c1.iter().zip(v1).map(|(&c, &v)| (r, c, v)));
            let (c2, v2) = other.row(r);
            trip.extend(c2.iter().zip(v2).map(|(&c, &v)| (r, c, v * s)));
        }
        Self::from_triplets(self.nrows, self.ncols, &trip)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        let mut d = vec![vec![czero(); self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }

    /// Coordinate text dump, one `row col re im` line per stored entry,
    /// 0-based indices, 17 significant digits.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.nrows, self.ncols, self.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, v) in cols.iter().zip(vals) {
                let _ = writeln!(out, "{r} {c} {:.16e} {:.16e}", v.re, v.im);
            }
        }
        out
    }
}
