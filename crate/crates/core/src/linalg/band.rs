//! Banded symmetric LDL^T factorization without pivoting.

use super::CsrMatrix;
use crate::error::{Error, Result};

/// Lower band of a symmetric matrix: row `i` stores columns `i - bw ..= i`.
#[derive(Debug, Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Entry `(i, j)` with `j <= i` and `i - j <= bw`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Lower bandwidth of a sparse matrix.
    pub fn bandwidth_of(a: &CsrMatrix) -> usize {
        let mut bw = 0;
        for i in 0..a.nrows() {
            for &j in a.row(i).0 {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }

    /// `sum_k c_k A_k` for sparse symmetric matrices of equal size; only the lower
    /// triangle is read.
    pub fn combine(terms: &[(f64, &CsrMatrix)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, a)| a.nrows())
            .ok_or_else(|| Error::Dimension("empty combination".into()))?;
        if terms.iter().any(|(_, a)| a.nrows() != n || a.ncols() != n) {
            return Err(Error::Dimension("matrices of different sizes".into()));
        }
        let bw = terms
            .iter()
            .map(|(_, a)| Self::bandwidth_of(a))
            .max()
            .unwrap_or(0);
        let mut band = Self::zeros(n, bw);
        for &(c, a) in terms {
            if c == 0.0 {
                continue;
            }
            for i in 0..a.nrows() {
                let (cols, vals) = a.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    if j <= i {
                        let k = band.idx(i, j);
                        band.data[k] += c * v;
                    }
                }
            }
        }
        Ok(band)
    }
}

/// `A = L D L^T` with unit lower-triangular banded `L`.
#[derive(Debug, Clone)]
pub struct BandLdlt {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdlt {
    /// Factors in place. Fails on a pivot that is zero relative to the matrix scale.
    pub fn factor(a: SymBand) -> Result<Self> {
        let SymBand { n, bw, mut data } = a;
        let w = bw + 1;
        let scale = (0..n)
            .map(|i| data[i * w + bw].abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let tol = 1e-14 * scale;
        let mut d = vec![0.0; n];
        let mut u = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * w;
            for j in lo..i {
                let jlo = lo.max(j.saturating_sub(bw));
                let jrow = j * w;
                let mut s = data[row + j + bw - i];
                for k in jlo..j {
                    s -= u[k - lo] * data[jrow + k + bw - j];
                }
                u[j - lo] = s;
                data[row + j + bw - i] = s / d[j];
            }
            let mut di = data[row + bw];
            for k in lo..i {
                di -= u[k - lo] * data[row + k + bw - i];
            }
            if !di.is_finite() || di.abs() <= tol {
                return Err(Error::Factorization(format!(
                    "pivot {di:e} at row {i} (scale {scale:e})"
                )));
            }
            d[i] = di;
        }
        Ok(Self { n, bw, l: data, d })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of negative pivots, which equals the number of negative eigenvalues.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = i * w;
            let mut s = b[i];
            for k in lo..i {
                s -= self.l[row + k + self.bw - i] * b[k];
            }
            b[i] = s;
        }
        for (bi, di) in b.iter_mut().zip(&self.d) {
            *bi /= di;
        }
        for i in (0..self.n).rev() {
            let xi = b[i];
            let lo = i.saturating_sub(self.bw);
            let row = i * w;
            for k in lo..i {
                b[k] -= self.l[row + k + self.bw - i] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn random_banded(n: usize, bw: usize, shift: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = (((i * 31 + j * 17) % 23) as f64 - 11.0) / 7.0;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            m[(i, i)] += shift;
        }
        m
    }

    fn to_csr(m: &DMatrix<f64>) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        CsrMatrix::from_triplets(m.nrows(), m.ncols(), &t).unwrap()
    }

    #[test]
    fn solves_indefinite_band() {
        let m = random_banded(60, 4, 0.3);
        let band = SymBand::combine(&[(1.0, &to_csr(&m))]).unwrap();
        let f = BandLdlt::factor(band).unwrap();
        let b: Vec<f64> = (0..60).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        let r = &m * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.norm() < 1e-9, "{}", r.norm());
        let neg = m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .filter(|&&e| e < 0.0)
            .count();
        assert_eq!(f.negative_pivots(), neg);
    }

    #[test]
    fn combination_and_singular_pivot() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let band = SymBand::combine(&[(1.0, &to_csr(&a))]).unwrap();
        assert!(matches!(
            BandLdlt::factor(band),
            Err(Error::Factorization(_))
        ));
        let i = DMatrix::identity(2, 2);
        let band = SymBand::combine(&[(1.0, &to_csr(&a)), (-3.0, &to_csr(&i))]).unwrap();
        assert_eq!(band.get(1, 0), 1.0);
        assert_eq!(band.get(1, 1), -2.0);
    }
}
