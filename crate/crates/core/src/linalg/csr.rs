use std::io::{self, Write};

use nalgebra::DMatrix;

use super::LinalgError;

/// Square sparse matrix in compressed sparse row format.
///
/// Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    column_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Builds a CSR matrix from `(row, col, value)` triplets.
///
/// Duplicates are summed in input order after a stable sort by `(row, col)`,
/// so the result does not depend on how the triplets were permuted as long
/// as equal positions keep their relative order. Explicit zeros are kept.
pub fn csr_from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<CsrMatrix, LinalgError> {
    if let Some(&(row, col, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
        return Err(LinalgError::IndexOutOfRange { row, col, dim });
    }
    let mut order: Vec<usize> = (0..triplets.len()).collect();
    order.sort_by_key(|&i| (triplets[i].0, triplets[i].1));

    let mut row_offsets = vec![0; dim + 1];
    let mut column_indices = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut last: Option<(usize, usize)> = None;
    for i in order {
        let (r, c, v) = triplets[i];
        if last == Some((r, c)) {
            *values.last_mut().unwrap() += v;
        } else {
            column_indices.push(c);
            values.push(v);
            row_offsets[r + 1] += 1;
            last = Some((r, c));
        }
    }
    for r in 0..dim {
        row_offsets[r + 1] += row_offsets[r];
    }
    Ok(CsrMatrix {
        dim,
        row_offsets,
        column_indices,
        values,
    })
}

impl CsrMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_offsets: (0..=dim).collect(),
            column_indices: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.column_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        self.column_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        match self.column_indices[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut y = vec![0.0; self.dim];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<(), LinalgError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    /// `max |A_ij − A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Whether the sparsity pattern of A equals that of Aᵀ.
    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.dim).all(|r| {
            self.row(r).all(|(c, _)| {
                let range = self.row_offsets[c]..self.row_offsets[c + 1];
                self.column_indices[range].binary_search(&r).is_ok()
            })
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Debug dump: header line `dim nnz`, then one `row col value` per entry.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.dim, self.nnz())?;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                writeln!(out, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}
