//! Symmetric sparse matrices in CSR form and a Cholesky solver for the
//! reduced systems that arise once some unknowns are held fixed.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{MatMut, Side};

use crate::error::{Error, Result};

/// Symmetric matrix with both triangles stored, rows sorted by column.
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Assembles from `(row, col, value)` entries; duplicates are summed in
    /// a fixed order so assembly is reproducible.
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// xᵀ A x
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>()
            })
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| self.get(j, i) == v)
        })
    }
}

/// Cholesky factorization of `scale · A` restricted to the free unknowns.
///
/// Fixed unknowns are eliminated by replacing their rows and columns with
/// the identity; the sparsity pattern stays that of `A`, so the symbolic
/// analysis is computed once and reused across different fixed sets.
pub struct ReducedCholesky {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    /// Position in the CSR value array of every lower-triangle entry.
    source: Vec<usize>,
    symbolic: SymbolicLlt<usize>,
}

/// A numeric factorization produced by [`ReducedCholesky::factor`].
pub struct ReducedFactor {
    llt: Llt<usize, f64>,
    fixed: Vec<bool>,
    scale: f64,
}

impl ReducedCholesky {
    pub fn new(a: &SparseSym) -> Result<Self> {
        let n = a.n;
        // CSC lower triangle: column j holds rows i >= j, which by symmetry
        // are the entries of CSR row j with column >= j.
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut source = Vec::new();
        col_ptr.push(0);
        for j in 0..n {
            for k in a.row_ptr[j]..a.row_ptr[j + 1] {
                if a.col_idx[k] >= j {
                    row_idx.push(a.col_idx[k]);
                    source.push(k);
                }
            }
            col_ptr.push(row_idx.len());
        }
        let pattern = SymbolicSparseColMat::<usize>::new_checked(n, n, col_ptr.clone(), None, row_idx.clone());
        let symbolic = SymbolicLlt::try_new(pattern.as_ref(), Side::Lower)
            .map_err(|e| Error::Singular(format!("symbolic analysis failed: {e:?}")))?;
        Ok(ReducedCholesky {
            n,
            col_ptr,
            row_idx,
            source,
            symbolic,
        })
    }

    /// Factors `scale · A` with rows/columns of `fixed` unknowns replaced by
    /// the identity. Fails if the free block is not positive definite.
    pub fn factor(&self, a: &SparseSym, fixed: &[bool], scale: f64) -> Result<ReducedFactor> {
        let mut values = Vec::with_capacity(self.source.len());
        for j in 0..self.n {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[k];
                let v = if fixed[i] || fixed[j] {
                    if i == j {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    scale * a.values[self.source[k]]
                };
                values.push(v);
            }
        }
        let pattern = unsafe {
            faer::sparse::SymbolicSparseColMatRef::new_unchecked(self.n, self.n, &self.col_ptr, None, &self.row_idx)
        };
        let mat = SparseColMatRef::new(pattern, &values);
        let llt = Llt::try_new_with_symbolic(self.symbolic.clone(), mat, Side::Lower)
            .map_err(|e| Error::Singular(format!("free block is not positive definite ({e})")))?;
        Ok(ReducedFactor {
            llt,
            fixed: fixed.to_vec(),
            scale,
        })
    }
}

impl ReducedFactor {
    /// Solves `scale · A x = rhs` on the free unknowns with `x = fixed_values`
    /// on the fixed ones. `a` must be the matrix that was factored.
    pub fn solve(&self, a: &SparseSym, rhs: &[f64], fixed_values: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x = vec![0.0; n];
        for i in 0..n {
            if self.fixed[i] {
                x[i] = fixed_values[i];
            } else {
                let (cols, vals) = a.row(i);
                let mut r = rhs[i];
                for (&j, &v) in cols.iter().zip(vals) {
                    if self.fixed[j] {
                        r -= self.scale * v * fixed_values[j];
                    }
                }
                x[i] = r;
            }
        }
        self.llt
            .solve_in_place(MatMut::from_column_major_slice_mut(&mut x, n, 1));
        x
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }
}
