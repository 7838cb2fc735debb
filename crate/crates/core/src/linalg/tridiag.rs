//! Symmetric tridiagonal eigenvalues by Sturm bisection, vectors by inverse iteration,
//! and the one-dimensional chain forms built on them.

use crate::error::{invalid, Error, Result};

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Dimension(format!(
                "tridiagonal with {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.off[i - 1];
            d = self.diag[i] - x - e * e / d;
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = 1e-12 * (hi - lo).abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// The `j`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        if j >= self.len() {
            return Err(invalid(
                "index",
                format!("{j} out of range for size {}", self.len()),
            ));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for an accurately known eigenvalue, normalized to unit 2-norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        self.eigenvector_deflated(lambda, &[])
    }

    /// Like [`Self::eigenvector`], kept orthogonal to `previous` (unit vectors of the
    /// same cluster), so that repeated eigenvalues get independent vectors.
    pub fn eigenvector_deflated(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let scale = self
            .diag
            .iter()
            .map(|d| d.abs())
            .chain(self.off.iter().map(|e| e.abs()))
            .fold(0.0, f64::max)
            .max(1e-300);
        let sigma = lambda + 1e-13 * scale;
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64)
            .collect();
        let deflate = |x: &mut Vec<f64>| {
            for p in previous {
                let c: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
            }
        };
        deflate(&mut x);
        normalize(&mut x);
        for _ in 0..4 {
            x = self.solve_shifted(sigma, &x);
            deflate(&mut x);
            normalize(&mut x);
        }
        x
    }

    /// Solves `(T - sigma I) y = b` by Gaussian elimination with partial pivoting.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * self.diag.iter().map(|d| d.abs()).fold(1e-300, f64::max);
        let mut dl: Vec<f64> = self.off.clone();
        let mut d: Vec<f64> = self.diag.iter().map(|a| a - sigma).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                d[i + 1] -= m * du[i];
                x[i + 1] -= m * x[i];
                if i + 2 < n {
                    du2[i] = 0.0;
                }
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - m * tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                du[i] = tmp;
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
            dl[i] = 0.0;
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        x[n - 1] /= d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// A quadratic form on a chain of nodes,
/// `Q(v) = sum_e edge[e] (v[e+1] - v[e])^2 + sum_i node[i] v[i]^2`,
/// with mass `M(v) = sum_i mass[i] v[i]^2`. Ends may be clamped to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainForm {
    pub edge: Vec<f64>,
    pub node: Vec<f64>,
    pub mass: Vec<f64>,
    pub clamp_left: bool,
    pub clamp_right: bool,
}

/// Eigenpair of a [`ChainForm`]; `vector` has one entry per node (zero on clamped ends).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEigen {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl ChainForm {
    pub fn nodes(&self) -> usize {
        self.node.len()
    }

    fn free_range(&self) -> std::ops::Range<usize> {
        let start = usize::from(self.clamp_left);
        let end = self.nodes() - usize::from(self.clamp_right);
        start..end
    }

    fn check(&self) -> Result<()> {
        let n = self.nodes();
        if self.mass.len() != n || self.edge.len() + 1 != n {
            return Err(Error::Dimension("chain form sizes disagree".into()));
        }
        let free = self.free_range();
        if free.is_empty() {
            return Err(Error::GridTooCoarse("no free nodes in chain".into()));
        }
        if free.clone().any(|i| !(self.mass[i] > 0.0)) {
            return Err(invalid("mass", "must be positive on free nodes"));
        }
        Ok(())
    }

    /// Stiffness matrix restricted to free nodes, as tridiagonal `(diag, off)`.
    pub fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let free = self.free_range();
        let n = self.nodes();
        let diag = free
            .clone()
            .map(|i| {
                let left = if i > 0 { self.edge[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.edge[i] } else { 0.0 };
                left + right + self.node[i]
            })
            .collect();
        let off = free.clone().skip(1).map(|i| -self.edge[i - 1]).collect();
        (diag, off)
    }

    /// The mass-symmetrized matrix `M^{-1/2} K M^{-1/2}` on free nodes.
    pub fn symmetrized(&self) -> Result<SymTridiagonal> {
        self.check()?;
        let free = self.free_range();
        let (diag, off) = self.stiffness();
        let r: Vec<f64> = free.clone().map(|i| self.mass[i].sqrt().recip()).collect();
        let diag = diag.iter().zip(&r).map(|(d, r)| d * r * r).collect();
        let off = off
            .iter()
            .enumerate()
            .map(|(k, e)| e * r[k] * r[k + 1])
            .collect();
        SymTridiagonal::new(diag, off)
    }

    pub fn energy(&self, v: &[f64]) -> f64 {
        let mut q = 0.0;
        for (e, w) in self.edge.iter().enumerate() {
            let d = v[e + 1] - v[e];
            q += w * d * d;
        }
        for (i, p) in self.node.iter().enumerate() {
            q += p * v[i] * v[i];
        }
        q
    }

    pub fn norm_sq(&self, v: &[f64]) -> f64 {
        self.mass.iter().zip(v).map(|(m, x)| m * x * x).sum()
    }

    /// The `j`-th eigenpair (0-based). The eigenvalue is the Rayleigh quotient of the
    /// inverse-iteration vector, evaluated in difference form.
    pub fn eigenpair(&self, j: usize) -> Result<ChainEigen> {
        let t = self.symmetrized()?;
        let lambda = t.eigenvalue(j)?;
        let y = t.eigenvector(lambda);
        let free = self.free_range();
        let mut v = vec![0.0; self.nodes()];
        for (k, i) in free.enumerate() {
            v[i] = y[k] / self.mass[i].sqrt();
        }
        let value = self.energy(&v) / self.norm_sq(&v);
        Ok(ChainEigen { value, vector: v })
    }

    /// The `j`-th eigenvalue from bisection alone.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        self.symmetrized()?.eigenvalue(j)
    }
}
