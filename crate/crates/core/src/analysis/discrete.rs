//! Certificates for eigenvalues below the essential-spectrum threshold.

use serde::{Deserialize, Serialize};

use super::{threshold, GridPolicy};
use crate::assembly::assemble_b;
use crate::eigensolve::{count_below, lowest_eigenpairs_from_guess};
use crate::error::{Error, Result};
use crate::profiles::StripProfile;
use crate::quadrature::GaussRule;

/// One `(L, h)` setting of the discrete-spectrum detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSetting {
    pub half_length: f64,
    pub cells_s: usize,
    pub cells_t: usize,
    pub lambda1: f64,
    pub residual: f64,
    pub converged: bool,
    /// Eigenvalues below the threshold, from the inertia of `A - threshold B`.
    pub count_below: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    pub lambda1: f64,
    pub threshold: f64,
    /// `threshold - lambda1` at the first setting; positive when an eigenvalue sits below.
    pub margin: f64,
    pub certified: bool,
    pub settings: Vec<SpectrumSetting>,
}

/// Lowest eigenvalue guess below which the spectrum of `b_eps` cannot start by much.
pub(crate) fn shift_guess(profile: &StripProfile, eps: f64) -> f64 {
    let thr = threshold(eps);
    let bend = profile.kappa_infimum().min(0.0) / eps;
    let twist = profile.bounds.sup_tau.powi(2);
    thr + 1.5 * bend - twist - 1.0
}

/// Upper-bound eigenvalue of `b_eps` below the threshold at two `(L, h)` settings.
///
/// Conforming elements with Dirichlet truncation give upper bounds for the first
/// eigenvalue on the full strip, so a value below `(pi / 2 eps)^2` (minus the solver
/// error) certifies discrete spectrum.
pub fn detect_discrete_spectrum(
    profile: &StripProfile,
    eps: f64,
    policy: &GridPolicy,
    tol: f64,
) -> Result<DiscreteSpectrum> {
    let thr = threshold(eps);
    let settings_policy = [*policy, policy.extended(1.5).refined(1.25, eps)];
    let mut settings = Vec::new();
    for p in settings_policy {
        let grid = p.grid_for(eps)?;
        let pair = assemble_b(profile, eps, grid)?;
        let r = lowest_eigenpairs_from_guess(
            &pair.stiffness,
            &pair.mass,
            1,
            tol,
            shift_guess(profile, eps),
            1.0,
        )?;
        let below = count_below(&pair.stiffness, &pair.mass, thr)?;
        settings.push(SpectrumSetting {
            half_length: p.half_length,
            cells_s: grid.n_s - 1,
            cells_t: grid.n_t - 1,
            lambda1: r.eigenvalues[0],
            residual: r.residuals[0],
            converged: r.converged,
            count_below: below,
        });
    }
    // a relative residual r bounds the distance to the nearest discrete eigenvalue by
    // roughly r max(1, |lambda|) in the mass norm scale
    let certified = settings.iter().all(|s| {
        let err = 10.0 * s.residual * s.lambda1.abs().max(1.0);
        s.converged && s.count_below >= 1 && s.lambda1 + err < thr
    });
    Ok(DiscreteSpectrum {
        lambda1: settings[0].lambda1,
        threshold: thr,
        margin: thr - settings[0].lambda1,
        certified,
        settings,
    })
}

/// Plateau cutoff: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, quintic smootherstep joins.
pub fn plateau(x: f64) -> f64 {
    let u = x.abs() - 1.0;
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

pub fn plateau_derivative(x: f64) -> f64 {
    let u = x.abs() - 1.0;
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        -x.signum() * 30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Gap `b_eps(psi_n) - (pi/2 eps)^2 |psi_n|^2` of `psi_n = plateau(s/n) chi_1(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialGap {
    pub n: f64,
    pub gap: f64,
    /// `int |phi_n'|^2 chi_1^2 / f`, the cutoff cost.
    pub kinetic: f64,
    /// The twist contribution, `gap - kinetic`.
    pub twist: f64,
}

fn chi1(t: f64) -> (f64, f64) {
    let k = std::f64::consts::FRAC_PI_2;
    let r = std::f64::consts::SQRT_2;
    (r * (k * t).sin(), r * k * (k * t).cos())
}

fn s_breaks(n: f64, reach: f64) -> Vec<f64> {
    let mut b: Vec<f64> = Vec::new();
    let core = reach.min(2.0 * n);
    let panels = (2.0 * core / 0.25).ceil().max(1.0) as usize;
    for i in 0..=panels {
        b.push(-core + 2.0 * core * i as f64 / panels as f64);
    }
    for x in [-2.0 * n, -n, n, 2.0 * n] {
        b.push(x);
    }
    if 2.0 * n > reach {
        for k in 0..=16 {
            let x = reach + (2.0 * n - reach) * k as f64 / 16.0;
            b.push(x);
            b.push(-x);
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, c| (*a - *c).abs() < 1e-12);
    b
}

fn twist_reach(profile: &StripProfile) -> f64 {
    match profile.twist_decay() {
        crate::profiles::DecayClass::CompactSupport { radius } => radius + 1.0,
        _ => 40.0,
    }
}

/// Evaluates the trial-function gap by Gauss quadrature.
///
/// Writing `f - 1 = eps^2 t^2 tau^2 / (f + 1)` keeps the transverse part free of the
/// cancellation between `eps^-2 int |chi_1'|^2 f` and the threshold term.
pub fn trial_function_certificate(profile: &StripProfile, eps: f64, n: f64) -> Result<TrialGap> {
    if !profile.is_unbent() {
        return Err(Error::Hypothesis(
            "the trial-function certificate needs kappa_g = 0".into(),
        ));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(crate::error::invalid("n", "cutoff scale must be positive"));
    }
    let k2 = std::f64::consts::FRAC_PI_2.powi(2);
    let rule_t = GaussRule::new(16);
    let rule_s = GaussRule::new(8);
    let breaks = s_breaks(n, twist_reach(profile));
    let mut kinetic = 0.0;
    let mut twist = 0.0;
    for w in breaks.windows(2) {
        for (s, ws) in rule_s.on(w[0], w[1]) {
            let phi = plateau(s / n);
            let dphi = plateau_derivative(s / n) / n;
            let tau2 = profile.tau_sq(s);
            if dphi != 0.0 {
                kinetic += ws
                    * dphi
                    * dphi
                    * rule_t.integrate(0.0, 1.0, |t| {
                        let (c, _) = chi1(t);
                        c * c / (1.0 + eps * eps * t * t * tau2).sqrt()
                    });
            }
            if phi != 0.0 && tau2 != 0.0 {
                twist += ws
                    * phi
                    * phi
                    * tau2
                    * rule_t.integrate(0.0, 1.0, |t| {
                        let (c, dc) = chi1(t);
                        let f = (1.0 + eps * eps * t * t * tau2).sqrt();
                        (dc * dc - k2 * c * c) * t * t / (f + 1.0)
                    });
            }
        }
    }
    Ok(TrialGap {
        n,
        gap: kinetic + twist,
        kinetic,
        twist,
    })
}

/// `-int (tau^2 / f) t chi_1 chi_1'`, the limit of the trial gap as `n -> infinity`.
pub fn trial_gap_limit(profile: &StripProfile, eps: f64) -> f64 {
    let reach = twist_reach(profile);
    let rule_t = GaussRule::new(16);
    let rule_s = GaussRule::new(8);
    let breaks = s_breaks(reach, reach);
    rule_s.integrate_panels(&breaks, |s| {
        let tau2 = profile.tau_sq(s);
        if tau2 == 0.0 {
            return 0.0;
        }
        -tau2
            * rule_t.integrate(0.0, 1.0, |t| {
                let (c, dc) = chi1(t);
                t * c * dc / (1.0 + eps * eps * t * t * tau2).sqrt()
            })
    })
}

/// Smallest `n` in `1..=n_max` from which the trial gap stays negative.
pub fn first_negative_cutoff(
    profile: &StripProfile,
    eps: f64,
    n_max: usize,
) -> Result<Option<usize>> {
    let mut first = None;
    for n in 1..=n_max {
        let g = trial_function_certificate(profile, eps, n as f64)?.gap;
        if g < 0.0 {
            first.get_or_insert(n);
        } else {
            first = None;
        }
    }
    Ok(first)
}
