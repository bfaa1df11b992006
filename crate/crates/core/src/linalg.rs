//! Sparse direct solves via LU factorization with partial pivoting.

use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

/// Square sparse matrix assembled from (row, col, value) entries; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        Self { n, entries: Vec::with_capacity(nnz) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// Dense copy (small systems and tests only).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for &(i, j, v) in &self.entries {
            d[i][j] += v;
        }
        d
    }

    fn merged(&self) -> Vec<Triplet<usize, usize, f64>> {
        let mut e = self.entries.clone();
        e.sort_unstable_by_key(|&(i, j, _)| (j, i));
        let mut out: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(e.len());
        for (i, j, v) in e {
            match out.last_mut() {
                Some(t) if t.row == i && t.col == j => t.val += v,
                _ => out.push(Triplet::new(i, j, v)),
            }
        }
        out
    }

    /// LU factorization for repeated solves with the same matrix.
    pub fn factor(&self) -> Result<Factorization<'_>> {
        let n = self.n;
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &self.merged())
            .map_err(|e| Error::Singular(format!("assembly failed: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| Error::Singular(format!("factorization failed: {e:?}")))?;
        let scale_a = self.entries.iter().fold(0.0f64, |m, e| m.max(e.2.abs()));
        Ok(Factorization { matrix: self, lu, scale_a })
    }

    /// Solves `A x = b`, failing with [`Error::Singular`] when the
    /// factorization breaks down or the residual is not small.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve(b)
    }
}

/// Factored [`SparseMatrix`].
pub struct Factorization<'a> {
    matrix: &'a SparseMatrix,
    lu: Lu<usize, f64>,
    scale_a: f64,
}

impl Factorization<'_> {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.matrix.n;
        if b.len() != n {
            return Err(Error::Domain(format!("right-hand side has length {} for a {n}x{n} system", b.len())));
        }
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        let x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        let r = self.matrix.apply(&x);
        let scale_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale_x = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = r.iter().zip(b).fold(0.0f64, |m, (ri, bi)| m.max((ri - bi).abs()));
        if res > 1e-8 * (scale_b + self.scale_a * scale_x).max(f64::MIN_POSITIVE) {
            return Err(Error::Singular(format!("residual {res:.3e} after solve")));
        }
        Ok(x)
    }
}
