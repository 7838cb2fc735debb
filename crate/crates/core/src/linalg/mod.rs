//! Linear algebra kernels shared by the discretizations.

mod band;
mod sparse;
mod tridiag;

pub use band::{BandLdlt, SymBand};
pub use sparse::CsrMatrix;
pub use tridiag::{ChainEigen, ChainForm, SymTridiagonal};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}
