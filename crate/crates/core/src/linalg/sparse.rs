//! Compressed sparse row storage.

use std::io::Write;

use crate::error::{Error, Result};

/// Square or rectangular CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed in input order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= nrows || *j >= ncols) {
            return Err(Error::Dimension(format!(
                "entry ({i}, {j}) outside {nrows} x {ncols}"
            )));
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().expect("entry present") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// `sum_k c_k A_k` for matrices of equal shape.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<Self> {
        let (nrows, ncols) = terms
            .first()
            .map(|(_, a)| (a.nrows, a.ncols))
            .ok_or_else(|| Error::Dimension("empty combination".into()))?;
        let mut triplets = Vec::new();
        for &(c, a) in terms {
            if (a.nrows, a.ncols) != (nrows, ncols) {
                return Err(Error::Dimension("matrices of different shapes".into()));
            }
            for i in 0..nrows {
                let (cols, vals) = a.row(i);
                triplets.extend(cols.iter().zip(vals).map(|(&j, &v)| (i, j, c * v)));
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
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

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `max |a_ij - a_ji|` relative to `max |a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                scale = scale.max(v.abs());
                diff = diff.max((v - self.get(j, i)).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// Dense copy, for small matrices and oracles.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// MatrixMarket coordinate format (general, 1-based indices).
    pub fn write_matrix_market(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_duplicates_and_multiplies() {
        let a =
            CsrMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 0, 2.0), (1, 2, 0.5), (0, 1, -1.0)])
                .unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 2), 1.5);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 2.0, 3.0]), vec![0.0, 4.5]);
        assert!(CsrMatrix::from_triplets(1, 1, &[(1, 0, 1.0)]).is_err());
    }

    #[test]
    fn matrix_market_header() {
        let a = CsrMatrix::from_diagonal(&[1.0, 2.0]);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n2 2 2\n"));
        assert_eq!(a.asymmetry(), 0.0);
    }
}
