//! Lowest eigenpairs of `A v = lambda B v` and norms of resolvent differences.
//!
//! Eigenpairs come from shift-invert Lanczos: `(A - sigma B)` is factored once
//! (banded LDL^T), and the Krylov basis of `(A - sigma B)^{-1} B` is built in the
//! `B` inner product with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::FormPair;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, BandLdlt, CsrMatrix, SymBand, SymTridiagonal};

pub const MAX_BASIS: usize = 200;
const START_SEED: u64 = 0x5eed_1a2c;
/// Relative size of a Lanczos coefficient treated as an invariant subspace.
const BREAKDOWN: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    /// `|A v - lambda B v| / (max(1, |lambda|) |B v|)` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub shift: f64,
    /// Eigenvalues below `shift`, from the inertia of `A - shift B`.
    pub below_shift: usize,
}

/// Factor `A - sigma B`; on failure retry once at a perturbed shift.
fn factor_shifted(a: &CsrMatrix, b: &CsrMatrix, sigma: f64) -> Result<(BandLdlt, f64)> {
    match BandLdlt::factor(SymBand::combine(&[(1.0, a), (-sigma, b)])?) {
        Ok(f) => Ok((f, sigma)),
        Err(Error::Factorization(_)) => {
            let perturbed = sigma - 1e-6 * sigma.abs().max(1.0);
            let f = BandLdlt::factor(SymBand::combine(&[(1.0, a), (-perturbed, b)])?)?;
            Ok((f, perturbed))
        }
        Err(e) => Err(e),
    }
}

/// Number of eigenvalues of `(A, B)` strictly below `x` (Sylvester inertia).
pub fn count_below(a: &CsrMatrix, b: &CsrMatrix, x: f64) -> Result<usize> {
    Ok(factor_shifted(a, b, x)?.0.negative_pivots())
}

/// All-ones start vector with a small seeded perturbation, so that no symmetry class
/// of eigenvectors is missed.
fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    (0..n)
        .map(|_| 1.0 + 0.1 * rng.gen_range(-1.0..1.0))
        .collect()
}

fn residual(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, v: &[f64]) -> f64 {
    let av = a.mul_vec(v);
    let bv = b.mul_vec(v);
    let r: f64 = av
        .iter()
        .zip(&bv)
        .map(|(x, y)| (x - lambda * y).powi(2))
        .sum::<f64>()
        .sqrt();
    r / (lambda.abs().max(1.0) * dot(&bv, &bv).sqrt())
}

/// `k` lowest eigenpairs of `A v = lambda B v` above `shift`, which should lie
/// below the lowest eigenvalue. Eigenvalues below the shift are counted in
/// `below_shift` but not computed.
pub fn lowest_eigenpairs_raw(
    a: &CsrMatrix,
    b: &CsrMatrix,
    k: usize,
    tol: f64,
    shift: f64,
) -> Result<EigResult> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(crate::error::invalid("k", format!("need 1 <= k <= {n}")));
    }
    if b.nrows() != n || a.ncols() != n || b.ncols() != n {
        return Err(Error::Dimension(
            "A and B must be square of equal size".into(),
        ));
    }
    let (factor, sigma) = factor_shifted(a, b, shift)?;
    let below_shift = factor.negative_pivots();
    let cap = MAX_BASIS.min(n);

    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut bq: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut v = start_vector(n);
    let mut bv = b.mul_vec(&v);
    let nrm = dot(&v, &bv).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    bv.iter_mut().for_each(|x| *x /= nrm);

    let mut best: Option<EigResult> = None;
    let mut restart_rng = ChaCha8Rng::seed_from_u64(START_SEED + 1);
    let check_every = 5;

    for step in 0..cap {
        q.push(v);
        bq.push(bv);
        let j = q.len() - 1;
        let mut w = factor.solve(&bq[j]);
        let a_j = dot(&w, &bq[j]);
        alpha.push(a_j);
        for _ in 0..2 {
            for i in 0..=j {
                let c = dot(&w, &bq[i]);
                axpy(-c, &q[i], &mut w);
            }
        }
        let mut bw = b.mul_vec(&w);
        let b_j = dot(&w, &bw).max(0.0).sqrt();
        let scale = alpha
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);

        let last = step + 1 == cap;
        let breakdown = b_j <= BREAKDOWN * scale;
        // after a breakdown the basis is continued before any convergence test, so that
        // eigenvalues missing from the exhausted Krylov space are not skipped
        if j + 1 >= k && (last || ((j + 1) % check_every == 0 && !breakdown)) {
            let res = ritz(a, b, &q, &alpha, &beta, k, sigma, tol)?;
            let done = res.converged;
            best = Some(EigResult {
                iterations: j + 1,
                below_shift,
                ..res
            });
            if done {
                break;
            }
        }
        if last {
            break;
        }
        if breakdown {
            // invariant subspace: continue from a fresh direction
            w = (0..n).map(|_| restart_rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for i in 0..=j {
                    let c = dot(&w, &bq[i]);
                    axpy(-c, &q[i], &mut w);
                }
            }
            bw = b.mul_vec(&w);
            let nw = dot(&w, &bw).sqrt();
            if !(nw > 0.0) {
                break;
            }
            w.iter_mut().for_each(|x| *x /= nw);
            bw.iter_mut().for_each(|x| *x /= nw);
            beta.push(0.0);
        } else {
            w.iter_mut().for_each(|x| *x /= b_j);
            bw.iter_mut().for_each(|x| *x /= b_j);
            beta.push(b_j);
        }
        v = w;
        bv = bw;
    }
    best.ok_or_else(|| Error::Unsupported("Lanczos produced no Ritz pairs".into()))
}

#[allow(clippy::too_many_arguments)]
fn ritz(
    a: &CsrMatrix,
    b: &CsrMatrix,
    q: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    k: usize,
    sigma: f64,
    tol: f64,
) -> Result<EigResult> {
    let m = alpha.len();
    let t = SymTridiagonal::new(alpha.to_vec(), beta[..m - 1].to_vec())?;
    // largest positive theta <-> smallest lambda above sigma
    let mut thetas = Vec::with_capacity(k);
    for j in (0..m).rev().take(k) {
        let theta = t.eigenvalue(j)?;
        if theta > 0.0 {
            thetas.push(theta);
        }
    }
    let n = a.nrows();
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(thetas.len());
    let mut ys: Vec<(f64, Vec<f64>)> = Vec::new();
    for &theta in &thetas {
        let cluster: Vec<Vec<f64>> = ys
            .iter()
            .filter(|(th, _)| (th - theta).abs() <= 1e-8 * theta.abs())
            .map(|(_, y)| y.clone())
            .collect();
        let y = t.eigenvector_deflated(theta, &cluster);
        ys.push((theta, y.clone()));
        let mut v = vec![0.0; n];
        for (i, qi) in q.iter().enumerate() {
            axpy(y[i], qi, &mut v);
        }
        let bv = b.mul_vec(&v);
        let nb = dot(&v, &bv).sqrt();
        v.iter_mut().for_each(|x| *x /= nb);
        let lambda = dot(&v, &a.mul_vec(&v));
        let lambda = if lambda.is_finite() {
            lambda
        } else {
            sigma + 1.0 / theta
        };
        let r = residual(a, b, lambda, &v);
        pairs.push((lambda, v, r));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let converged = pairs.len() == k && pairs.iter().all(|p| p.2 <= tol);
    Ok(EigResult {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
        iterations: m,
        converged,
        shift: sigma,
        below_shift: 0,
    })
}

/// [`lowest_eigenpairs_raw`] from a guessed shift, lowered geometrically until the
/// inertia shows no eigenvalue below it.
pub fn lowest_eigenpairs_from_guess(
    a: &CsrMatrix,
    b: &CsrMatrix,
    k: usize,
    tol: f64,
    guess: f64,
    step: f64,
) -> Result<EigResult> {
    let mut sigma = guess;
    let mut step = step.abs().max(1e-3);
    for _ in 0..60 {
        let r = lowest_eigenpairs_raw(a, b, k, tol, sigma)?;
        if r.below_shift == 0 {
            return Ok(r);
        }
        sigma -= step;
        step *= 2.0;
    }
    Err(Error::Unsupported(format!(
        "no shift below the spectrum found from {guess}"
    )))
}

pub fn lowest_eigenpairs(pair: &FormPair, k: usize, tol: f64, shift: f64) -> Result<EigResult> {
    lowest_eigenpairs_raw(&pair.stiffness, &pair.mass, k, tol, shift)
}

/// Applies a resolvent-like operator that is self-adjoint in a shared mass inner product.
pub trait ResolventApply {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

/// `x -> (A + c B)^{-1} B x`, required to be positive definite.
pub struct ShiftedResolvent<'a> {
    factor: BandLdlt,
    mass: &'a CsrMatrix,
}

impl<'a> ShiftedResolvent<'a> {
    pub fn new(stiffness: &CsrMatrix, mass: &'a CsrMatrix, c: f64) -> Result<Self> {
        let factor = BandLdlt::factor(SymBand::combine(&[(1.0, stiffness), (c, mass)])?)?;
        let neg = factor.negative_pivots();
        if neg > 0 {
            return Err(Error::Hypothesis(format!(
                "shifted operator is not positive definite ({neg} negative eigenvalues); increase kappa"
            )));
        }
        Ok(Self { factor, mass })
    }

    pub fn from_pair(pair: &'a FormPair, c: f64) -> Result<Self> {
        Self::new(&pair.stiffness, &pair.mass, c)
    }
}

impl ResolventApply for ShiftedResolvent<'_> {
    fn dim(&self) -> usize {
        self.factor.size()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.factor.solve(&self.mass.mul_vec(x))
    }
}

/// Result of a gap-norm power iteration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapNorm {
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const GAP_MAX_ITERATIONS: usize = 300;

/// `|R_1 - R_2|` in the norm of `mass`, by power iteration on `(R_1 - R_2)^2`.
pub fn gap_norm(
    r1: &dyn ResolventApply,
    r2: &dyn ResolventApply,
    mass: &CsrMatrix,
    tol: f64,
) -> Result<GapNorm> {
    let n = r1.dim();
    if r2.dim() != n || mass.nrows() != n {
        return Err(Error::Dimension(
            "resolvents act on different spaces".into(),
        ));
    }
    let diff = |x: &[f64]| -> Vec<f64> {
        let mut y = r1.apply(x);
        axpy(-1.0, &r2.apply(x), &mut y);
        y
    };
    let bnorm = |x: &[f64]| dot(x, &mass.mul_vec(x)).max(0.0).sqrt();
    let mut x = start_vector(n);
    let nx = bnorm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut estimate = 0.0;
    for it in 1..=GAP_MAX_ITERATIONS {
        let y = diff(&x);
        let ny = bnorm(&y);
        if ny == 0.0 {
            return Ok(GapNorm {
                norm: 0.0,
                iterations: it,
                converged: true,
            });
        }
        let z = diff(&y);
        // |M x|^2 = <M^2 x, x>, and |M^2 x| / |M x| approaches the norm from below
        let nz = bnorm(&z);
        let new = nz / ny;
        let change = (new - estimate).abs();
        estimate = new;
        x = z.into_iter().map(|v| v / nz).collect();
        if it > 2 && change <= tol * estimate {
            return Ok(GapNorm {
                norm: estimate,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(GapNorm {
        norm: estimate,
        iterations: GAP_MAX_ITERATIONS,
        converged: false,
    })
}

/// `|(A_L + c B)^{-1} - (A_N + c B)^{-1}|` for two pairs with the same mass.
pub fn resolvent_gap_norm(
    pair_l: &FormPair,
    pair_n: &FormPair,
    c: f64,
    tol: f64,
) -> Result<GapNorm> {
    if pair_l.size() != pair_n.size() {
        return Err(Error::Dimension(
            "pairs live on different index spaces".into(),
        ));
    }
    let rl = ShiftedResolvent::from_pair(pair_l, c)?;
    let rn = ShiftedResolvent::from_pair(pair_n, c)?;
    gap_norm(&rl, &rn, &pair_l.mass, tol)
}

/// Dense `|B^{1/2} ((A_1 + cB)^{-1} - (A_2 + cB)^{-1}) B^{1/2}|_2`, for small oracles.
pub fn dense_gap_norm(
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: f64,
) -> Result<f64> {
    let sym = SymmetricEigen::new(b.clone());
    let half = &sym.eigenvectors
        * DMatrix::from_diagonal(&sym.eigenvalues.map(|x| x.max(0.0).sqrt()))
        * sym.eigenvectors.transpose();
    let inv = |a: &DMatrix<f64>| {
        (a + b * c)
            .try_inverse()
            .ok_or_else(|| Error::Factorization("dense shifted matrix is singular".into()))
    };
    let m = &half * (inv(a1)? - inv(a2)?) * &half;
    let m = (&m + m.transpose()) * 0.5;
    Ok(m.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{
        assemble_b, assemble_decoupled, discrete_dirichlet_line, discrete_dn_ground, GridSpec,
    };
    use crate::profiles::{ScalarFamily, StripProfile};
    use proptest::prelude::*;

    fn diag(v: &[f64]) -> CsrMatrix {
        CsrMatrix::from_diagonal(v)
    }

    #[test]
    fn two_by_two() {
        let r =
            lowest_eigenpairs_raw(&diag(&[1.0, 3.0]), &diag(&[1.0, 1.0]), 2, 1e-12, 0.0).unwrap();
        assert!(r.converged);
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn repeated_eigenvalue_gets_independent_vectors() {
        let a = diag(&[1.0, 1.0, 2.0, 4.0]);
        let b = diag(&[1.0; 4]);
        let r = lowest_eigenpairs_raw(&a, &b, 3, 1e-12, 0.0).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12 && (r.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[2] - 2.0).abs() < 1e-12);
        assert!(dot(&r.eigenvectors[0], &r.eigenvectors[1]).abs() < 1e-10);
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        let a = diag(&[1.0, 2.0, 5.0, 7.0]);
        let b = diag(&[1.0; 4]);
        assert_eq!(count_below(&a, &b, 4.0).unwrap(), 2);
        let r = lowest_eigenpairs_raw(&a, &b, 1, 1e-12, 1.5).unwrap();
        assert_eq!(r.below_shift, 1);
        assert!((r.eigenvalues[0] - 2.0).abs() < 1e-13);
        // shift exactly on an eigenvalue is perturbed, not fatal
        let r = lowest_eigenpairs_raw(&a, &b, 2, 1e-12, 1.0).unwrap();
        assert!(r.shift < 1.0);
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_strip_pair() {
        let eps = 0.1;
        let g = GridSpec::new(10.0, 401, 21).unwrap();
        let pair = assemble_b(&StripProfile::flat(), eps, g).unwrap();
        let shift = 0.9 * (std::f64::consts::FRAC_PI_2 / eps).powi(2);
        let r = lowest_eigenpairs(&pair, 3, 1e-9, shift).unwrap();
        assert!(r.converged);
        let exact_discrete =
            discrete_dirichlet_line(1, 10.0, 401) + discrete_dn_ground(21) / (eps * eps);
        assert!((r.eigenvalues[0] - exact_discrete).abs() < 1e-8 * exact_discrete);
        let continuum =
            (std::f64::consts::PI / 20.0).powi(2) + (std::f64::consts::FRAC_PI_2 / eps).powi(2);
        assert!((continuum - 246.7648).abs() < 1e-4);
        // the transverse ground state carries the discretization error
        assert!(r.eigenvalues[0] > continuum);
        for j in 1..3 {
            let e =
                discrete_dirichlet_line(j + 1, 10.0, 401) + discrete_dn_ground(21) / (eps * eps);
            assert!((r.eigenvalues[j] - e).abs() < 1e-8 * e);
        }
        let n = pair.size();
        for i in 0..3 {
            for j in 0..3 {
                let bij = dot(&r.eigenvectors[i], &pair.mass.mul_vec(&r.eigenvectors[j]));
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((bij - target).abs() < 1e-10, "{i} {j} {bij} (n = {n})");
            }
        }
    }

    #[test]
    fn decoupled_pair_against_tensor_enumeration() {
        let eps = 0.2;
        let g = GridSpec::new(4.0, 61, 11).unwrap();
        let p = StripProfile::bent(ScalarFamily::GaussianBump {
            amplitude: -1.0,
            width: 1.0,
            center: 0.0,
        })
        .unwrap();
        let pair = assemble_decoupled(&p, eps, g).unwrap();
        let f = crate::assembly::tensor_factors(g, &|s| p.kappa(s) / eps);
        let gen = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
            let l = b.clone().cholesky().unwrap().l().try_inverse().unwrap();
            let c = &l * a * l.transpose();
            let mut e: Vec<f64> = SymmetricEigen::new((&c + c.transpose()) * 0.5)
                .eigenvalues
                .iter()
                .copied()
                .collect();
            e.sort_by(f64::total_cmp);
            e
        };
        let es = gen(&(&f.stiffness_s + &f.potential_s), &f.mass_s);
        let et = gen(&f.stiffness_t, &f.mass_t);
        let mut sums: Vec<f64> = es
            .iter()
            .flat_map(|a| et.iter().map(move |b| a + b / (eps * eps)))
            .collect();
        sums.sort_by(f64::total_cmp);
        let r = lowest_eigenpairs(&pair, 4, 1e-11, sums[0] - 5.0).unwrap();
        assert!(r.converged);
        for j in 0..4 {
            assert!(
                (r.eigenvalues[j] - sums[j]).abs() < 1e-9 * sums[j].abs(),
                "{} {}",
                r.eigenvalues[j],
                sums[j]
            );
        }
    }

    #[test]
    fn deterministic_runs() {
        let g = GridSpec::new(3.0, 31, 9).unwrap();
        let pair = assemble_b(&StripProfile::flat(), 0.5, g).unwrap();
        let a = lowest_eigenpairs(&pair, 2, 1e-10, 5.0).unwrap();
        let b = lowest_eigenpairs(&pair, 2, 1e-10, 5.0).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn diagonal_gap_norms() {
        let i2 = diag(&[1.0, 1.0]);
        let l = ShiftedResolvent::new(&diag(&[2.0, 4.0]), &i2, 0.0).unwrap();
        let n = ShiftedResolvent::new(&diag(&[2.0, 5.0]), &i2, 0.0).unwrap();
        let g = gap_norm(&l, &n, &i2, 1e-12).unwrap();
        assert!((g.norm - 0.05).abs() < 1e-12);
        let same = gap_norm(&l, &l, &i2, 1e-12).unwrap();
        assert!(same.norm.abs() < 1e-14);
        assert!(matches!(
            ShiftedResolvent::new(&diag(&[2.0, -4.0]), &i2, 0.0),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn sparse_gap_matches_dense_oracle() {
        let eps = 0.3;
        let g = GridSpec::new(3.0, 21, 8).unwrap();
        let p = StripProfile::bent(ScalarFamily::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
        })
        .unwrap();
        let d = crate::assembly::assemble_d(&p, eps, g).unwrap();
        let h = assemble_decoupled(&p, eps, g).unwrap();
        let c = 1.0 - discrete_dn_ground(8) / (eps * eps);
        let sparse = resolvent_gap_norm(&d, &h, c, 1e-10).unwrap().norm;
        let dense = dense_gap_norm(
            &d.stiffness.to_dense(),
            &h.stiffness.to_dense(),
            &d.mass.to_dense(),
            c,
        )
        .unwrap();
        assert!((sparse - dense).abs() < 1e-3 * dense, "{sparse} vs {dense}");
    }

    fn spd(seed: &[f64], n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0 + seed[i].abs()));
            if i + 1 < n {
                t.push((i, i + 1, 0.5 * seed[n + i]));
                t.push((i + 1, i, 0.5 * seed[n + i]));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn gap_norm_is_a_metric(x in prop::collection::vec(-1.0f64..1.0, 24), y in prop::collection::vec(-1.0f64..1.0, 24), z in prop::collection::vec(-1.0f64..1.0, 24)) {
            let n = 12;
            let b = CsrMatrix::from_diagonal(&vec![1.0; n]);
            let (ax, ay, az) = (spd(&x, n), spd(&y, n), spd(&z, n));
            let rx = ShiftedResolvent::new(&ax, &b, 0.0).unwrap();
            let ry = ShiftedResolvent::new(&ay, &b, 0.0).unwrap();
            let rz = ShiftedResolvent::new(&az, &b, 0.0).unwrap();
            let dense = |p: &CsrMatrix, q: &CsrMatrix| dense_gap_norm(&p.to_dense(), &q.to_dense(), &b.to_dense(), 0.0).unwrap();
            let xy = dense(&ax, &ay);
            let yx = dense(&ay, &ax);
            prop_assert!((xy - yx).abs() <= 1e-12 * xy.max(1e-12));
            prop_assert!(xy <= dense(&ax, &az) + dense(&az, &ay) + 1e-12);
            let sparse_xy = gap_norm(&rx, &ry, &b, 1e-12).unwrap().norm;
            let sparse_yx = gap_norm(&ry, &rx, &b, 1e-12).unwrap().norm;
            prop_assert!((sparse_xy - sparse_yx).abs() <= 1e-9 * xy.max(1e-9));
            prop_assert!(sparse_xy <= xy * (1.0 + 1e-9));
            prop_assert!(sparse_xy >= 0.9 * xy);
            let _ = rz;
        }

        #[test]
        fn eigenvalues_are_symmetric_generalized(x in prop::collection::vec(-1.0f64..1.0, 24)) {
            let n = 12;
            let a = spd(&x, n);
            let b = CsrMatrix::from_diagonal(&(0..n).map(|i| 1.0 + 0.05 * i as f64).collect::<Vec<_>>());
            let r = lowest_eigenpairs_raw(&a, &b, 3, 1e-10, 0.0).unwrap();
            prop_assert!(r.converged, "{:?}", r);
            prop_assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..3 {
                for j in 0..3 {
                    let bij = dot(&r.eigenvectors[i], &b.mul_vec(&r.eigenvectors[j]));
                    let t = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((bij - t).abs() < 1e-10);
                }
            }
        }
    }
}
