//! One-dimensional cross-sectional problems on `(0, 1)`.
//!
//! Everything here is posed with a Dirichlet condition at `t = 0` and a natural
//! (Neumann or Robin) condition at `t = 1`, discretized by symmetric three-point
//! differences in variational form and upgraded by Richardson extrapolation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::ChainForm;
use crate::profiles::{metric_jet, Scaling, StripProfile};
use crate::quadrature::GaussRule;

/// `(pi/2)^2`, the bottom of the Dirichlet-Neumann spectrum on `(0, 1)`.
pub const DN_GROUND: f64 = FRAC_PI_2 * FRAC_PI_2;

/// `((2j - 1) pi / 2)^2` for `j = 1..=count`.
pub fn dn_eigenvalues_1d(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|j| {
            let k = (2 * j - 1) as f64 * FRAC_PI_2;
            k * k
        })
        .collect()
}

/// Ground state of `-v''` with `v(0) = 0`, `v'(1) + alpha v(1) = 0`: `nu = mu^2` with
/// `mu + alpha tan(mu) = 0`, `mu` in `(pi/2, pi)`.
pub fn solve_nu0(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Hypothesis(format!(
            "Robin coefficient alpha = {alpha} must be finite and nonnegative"
        )));
    }
    if alpha == 0.0 {
        return Ok(DN_GROUND);
    }
    // g(mu) = mu cos(mu) + alpha sin(mu) is positive at pi/2 and negative at pi
    let g = |mu: f64| mu * mu.cos() + alpha * mu.sin();
    let (mut lo, mut hi) = (FRAC_PI_2, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    Ok(mu * mu)
}

/// `psi(1)^2 / ||psi||^2` for the Robin ground state `psi = sin(sqrt(nu0) t)`.
pub fn boundary_ratio(alpha: f64, nu0: f64) -> f64 {
    2.0 * nu0 / (alpha * alpha + alpha + nu0)
}

/// `r(x) = x^2 (2 - x) / (4 (1 - x)^2 (4 - 5x))` on `[0, 4/5)`.
pub fn r_function(x: f64) -> Result<f64> {
    if !(0.0..0.8).contains(&x) {
        return Err(invalid("x", format!("{x} outside [0, 4/5)")));
    }
    Ok(x * x * (2.0 - x) / (4.0 * (1.0 - x).powi(2) * (4.0 - 5.0 * x)))
}

/// Root of `r(x) = (pi/2)^2` in `(0, 4/5)`.
pub fn find_x0() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.8f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = r_function(mid).expect("inside domain");
        if r < DN_GROUND {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cached [`find_x0`].
pub fn x0() -> f64 {
    static X0: OnceLock<f64> = OnceLock::new();
    *X0.get_or_init(find_x0)
}

/// Discretization of `int w |v'|^2 + int w p v^2 + alpha v(1)^2` over `int w v^2`
/// on `N` uniform intervals, Dirichlet at 0.
fn chain_on_unit_interval(
    n: usize,
    weight: &dyn Fn(f64) -> f64,
    potential: &dyn Fn(f64) -> f64,
    alpha: f64,
) -> ChainForm {
    let h = 1.0 / n as f64;
    let edge = (0..n)
        .map(|i| weight((i as f64 + 0.5) * h) / h)
        .collect::<Vec<_>>();
    let mass: Vec<f64> = (0..=n)
        .map(|i| {
            let t = i as f64 * h;
            let cell = if i == n { 0.5 * h } else { h };
            weight(t) * cell
        })
        .collect();
    let mut node: Vec<f64> = (0..=n).map(|i| potential(i as f64 * h) * mass[i]).collect();
    node[n] += alpha;
    ChainForm {
        edge,
        node,
        mass,
        clamp_left: true,
        clamp_right: false,
    }
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn check_resolution(resolution: usize, min: usize) -> Result<()> {
    if resolution < min {
        return Err(Error::GridTooCoarse(format!(
            "resolution {resolution} below the minimum {min}"
        )));
    }
    Ok(())
}

/// First eigenvalue of `-(1/w)(w v')'` on `(0, 1)`, Dirichlet at 0 and Neumann at 1,
/// i.e. of the quotient `int w |v'|^2 / int w v^2`.
pub fn weighted_dn_ground(weight: &dyn Fn(f64) -> f64, resolution: usize) -> Result<f64> {
    check_resolution(resolution, 16)?;
    let zero = |_: f64| 0.0;
    let coarse = chain_on_unit_interval(resolution, weight, &zero, 0.0).eigenpair(0)?;
    let fine = chain_on_unit_interval(2 * resolution, weight, &zero, 0.0).eigenpair(0)?;
    Ok(richardson(coarse.value, fine.value))
}

fn positive_weight(profile: &StripProfile, eps: f64, s: f64) -> Result<()> {
    let x = eps * profile.kappa(s);
    if x >= 1.0 {
        return Err(Error::Hypothesis(format!(
            "eps * kappa_g({s}) = {x} >= 1: the cross-sectional weight vanishes"
        )));
    }
    Ok(())
}

/// `lambda_0^eps(s)`: first eigenvalue of the cross-section with weight `1 - eps t kappa_g(s)`.
pub fn lambda0_transverse(
    profile: &StripProfile,
    eps: f64,
    s: f64,
    resolution: usize,
) -> Result<f64> {
    check_resolution(resolution, 64)?;
    positive_weight(profile, eps, s)?;
    let k = profile.kappa(s);
    weighted_dn_ground(&|t| 1.0 - eps * t * k, resolution)
}

/// `Sigma(s, eps)`: first eigenvalue of the cross-section with the full weight `f_eps(s, .)`.
pub fn sigma_transverse(
    profile: &StripProfile,
    eps: f64,
    s: f64,
    resolution: usize,
) -> Result<f64> {
    check_resolution(resolution, 64)?;
    positive_weight(profile, eps, s)?;
    weighted_dn_ground(
        &|t| metric_jet(profile, eps, s, t, Scaling::Thin).f,
        resolution,
    )
}

/// `alpha(s) = eps kappa_g(s) / (2 h_eps(s, 1))` with `h_eps = 1 - eps t kappa_g`.
pub fn robin_alpha(profile: &StripProfile, eps: f64, s: f64) -> f64 {
    let k = profile.kappa(s);
    eps * k / (2.0 * (1.0 - eps * k))
}

/// Perturbation coefficient `beta(s, eps)` with `Sigma = (pi/2)^2 + beta + O(eps^2)`.
pub fn beta_coefficient(profile: &StripProfile, eps: f64, s: f64) -> f64 {
    let k = profile.kappa(s);
    let tau2 = profile.tau_sq(s);
    let a = 1.0 - eps * k;
    let first =
        (eps * k - eps * eps * k * k - eps * eps * tau2) / (a * a + eps * eps * tau2).sqrt();
    let rule = GaussRule::new(8);
    let breaks: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let second = rule.integrate_panels(&breaks, |t| {
        let chi = std::f64::consts::SQRT_2 * (FRAC_PI_2 * t).sin();
        metric_jet(profile, eps, s, t, Scaling::Thin).f_tt * chi * chi
    });
    first + 0.5 * second
}

/// Cross-sectional data at one arclength position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseEigenvalue {
    pub s: f64,
    pub epsilon: f64,
    pub lambda0: f64,
    /// Robin comparison eigenvalue; absent when `alpha < 0`.
    pub nu0: Option<f64>,
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl TransverseEigenvalue {
    pub fn gap(&self) -> f64 {
        self.lambda0 - DN_GROUND
    }
}

pub fn transverse_sample(
    profile: &StripProfile,
    eps: f64,
    s: f64,
    resolution: usize,
) -> Result<TransverseEigenvalue> {
    let alpha = robin_alpha(profile, eps, s);
    Ok(TransverseEigenvalue {
        s,
        epsilon: eps,
        lambda0: lambda0_transverse(profile, eps, s, resolution)?,
        nu0: if alpha >= 0.0 {
            Some(solve_nu0(alpha)?)
        } else {
            None
        },
        alpha,
        sigma: sigma_transverse(profile, eps, s, resolution)?,
        beta: beta_coefficient(profile, eps, s),
    })
}

/// `-psi'' + V psi` on `(0, 1)` with `psi(0) = 0` and `psi'(1) + alpha psi(1) = 0`.
pub struct RobinProblem {
    pub potential: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub robin_alpha: f64,
}

impl RobinProblem {
    pub fn new(potential: impl Fn(f64) -> f64 + Send + Sync + 'static, robin_alpha: f64) -> Self {
        Self {
            potential: Box::new(potential),
            robin_alpha,
        }
    }

    pub fn free(robin_alpha: f64) -> Self {
        Self::new(|_| 0.0, robin_alpha)
    }
}

/// Ground state data of a [`RobinProblem`]; the eigenfunction is normalized so that
/// `norm_sq = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinEigen {
    pub eigenvalue: f64,
    pub boundary_value_sq: f64,
    pub norm_sq: f64,
}

pub fn robin_first_eigenvalue(problem: &RobinProblem, resolution: usize) -> Result<RobinEigen> {
    check_resolution(resolution, 64)?;
    if !problem.robin_alpha.is_finite() {
        return Err(invalid("robin_alpha", "must be finite"));
    }
    let one = |_: f64| 1.0;
    let solve = |n: usize| -> Result<(f64, f64)> {
        let chain = chain_on_unit_interval(n, &one, &*problem.potential, problem.robin_alpha);
        let e = chain.eigenpair(0)?;
        let ratio = e.vector[n] * e.vector[n] / chain.norm_sq(&e.vector);
        Ok((e.value, ratio))
    };
    let (e1, r1) = solve(resolution)?;
    let (e2, r2) = solve(2 * resolution)?;
    Ok(RobinEigen {
        eigenvalue: richardson(e1, e2),
        boundary_value_sq: richardson(r1, r2),
        norm_sq: 1.0,
    })
}

/// `lambda_j(-d^2/ds^2 + mu V) / mu` on `[-L, L]` with Dirichlet ends, for each `mu`.
/// `j` is 1-based; `resolution` is the number of intervals.
pub fn effective_limit_check(
    potential: &dyn Fn(f64) -> f64,
    mu_list: &[f64],
    j: usize,
    half_length: f64,
    resolution: usize,
) -> Result<Vec<f64>> {
    check_resolution(resolution, 16)?;
    if j == 0 {
        return Err(invalid("j", "eigenvalue index is 1-based"));
    }
    if !(half_length > 0.0) {
        return Err(invalid("half_length", "must be positive"));
    }
    let h = 2.0 * half_length / resolution as f64;
    let nodes: Vec<f64> = (0..=resolution)
        .map(|i| -half_length + i as f64 * h)
        .collect();
    let v: Vec<f64> = nodes.iter().map(|&s| potential(s)).collect();
    mu_list
        .iter()
        .map(|&mu| {
            if !(mu > 0.0) {
                return Err(invalid("mu", "must be positive"));
            }
            let chain = ChainForm {
                edge: vec![1.0 / h; resolution],
                node: v.iter().map(|&x| mu * x * h).collect(),
                mass: vec![h; resolution + 1],
                clamp_left: true,
                clamp_right: true,
            };
            Ok(chain.eigenpair(j - 1)?.value / mu)
        })
        .collect()
}
