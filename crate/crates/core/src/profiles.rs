//! Curvature/twist profiles of a strip and the metric they induce.
//!
//! A strip is described by the geodesic curvature `kappa_g(s)` of its reference curve
//! along the transverse direction and by the rotation speed `tau(s) = |Theta'(s)|` of
//! that direction. For strips in three dimensions the direction is
//! `Theta = (cos theta, sin theta)` in the normal plane of the curve and the profile
//! stores `theta'`; general codimension is supported through `tau` alone.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

/// Closed-form scalar profile families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFamily {
    Zero,
    Constant {
        value: f64,
    },
    /// `a * exp(-((s - center) / width)^2)`
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `a * (1 - ((s - center) / radius)^2)^3` inside the support, zero outside (C^2).
    SmoothCompactBump {
        amplitude: f64,
        radius: f64,
        #[serde(default)]
        center: f64,
    },
    /// `delta / (1 + s^2)`
    RationalTwist {
        delta: f64,
    },
}

/// How fast a profile component vanishes at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    Flat,
    CompactSupport {
        radius: f64,
    },
    /// `|g(s)| <= delta / (1 + s^2)` for all `s`.
    RationalDecay {
        delta: f64,
    },
    /// Does not vanish at infinity.
    Persistent,
}

impl DecayClass {
    pub fn is_asymptotically_flat(&self) -> bool {
        !matches!(self, DecayClass::Persistent)
    }

    /// Bound `delta` with `|g(s)| <= delta / (1 + s^2)`, when one exists.
    pub fn rational_bound(&self) -> Option<f64> {
        match *self {
            DecayClass::Flat => Some(0.0),
            DecayClass::RationalDecay { delta } => Some(delta),
            _ => None,
        }
    }

    fn combine(self, other: DecayClass) -> DecayClass {
        use DecayClass::*;
        match (self, other) {
            (Persistent, _) | (_, Persistent) => Persistent,
            (Flat, x) | (x, Flat) => x,
            (CompactSupport { radius: a }, CompactSupport { radius: b }) => {
                CompactSupport { radius: a.max(b) }
            }
            (RationalDecay { delta: a }, RationalDecay { delta: b }) => {
                RationalDecay { delta: a.max(b) }
            }
            (RationalDecay { delta }, CompactSupport { .. })
            | (CompactSupport { .. }, RationalDecay { delta }) => RationalDecay { delta },
        }
    }
}

const GAUSS_D1: f64 = 0.857_763_884_960_706_8; // sup |2u exp(-u^2)| = sqrt(2/e)
const BUMP_D1: f64 = 1.717_300_846_556_393_7; // sup |6x(1-x^2)^2| at x^2 = 1/5

impl ScalarFamily {
    pub fn check(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        match *self {
            ScalarFamily::Zero => Ok(()),
            ScalarFamily::Constant { value } => finite("value", value),
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                finite("amplitude", amplitude)?;
                finite("center", center)?;
                if !(width > 0.0 && width.is_finite()) {
                    return Err(invalid("width", format!("must be positive, got {width}")));
                }
                Ok(())
            }
            ScalarFamily::SmoothCompactBump {
                amplitude,
                radius,
                center,
            } => {
                finite("amplitude", amplitude)?;
                finite("center", center)?;
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(invalid("radius", format!("must be positive, got {radius}")));
                }
                Ok(())
            }
            ScalarFamily::RationalTwist { delta } => finite("delta", delta),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            ScalarFamily::Zero => 0.0,
            ScalarFamily::Constant { value } => value,
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let u = (s - center) / width;
                amplitude * (-u * u).exp()
            }
            ScalarFamily::SmoothCompactBump {
                amplitude,
                radius,
                center,
            } => {
                let x = (s - center) / radius;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - x * x).powi(3)
                }
            }
            ScalarFamily::RationalTwist { delta } => delta / (1.0 + s * s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            ScalarFamily::Zero | ScalarFamily::Constant { .. } => 0.0,
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let u = (s - center) / width;
                -2.0 * u * amplitude * (-u * u).exp() / width
            }
            ScalarFamily::SmoothCompactBump {
                amplitude,
                radius,
                center,
            } => {
                let x = (s - center) / radius;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    -6.0 * x * (1.0 - x * x).powi(2) * amplitude / radius
                }
            }
            ScalarFamily::RationalTwist { delta } => {
                let q = 1.0 + s * s;
                -2.0 * delta * s / (q * q)
            }
        }
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        match *self {
            ScalarFamily::Zero | ScalarFamily::Constant { .. } => 0.0,
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let u = (s - center) / width;
                amplitude * (4.0 * u * u - 2.0) * (-u * u).exp() / (width * width)
            }
            ScalarFamily::SmoothCompactBump {
                amplitude,
                radius,
                center,
            } => {
                let x = (s - center) / radius;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let y = x * x;
                    6.0 * amplitude * (1.0 - y) * (5.0 * y - 1.0) / (radius * radius)
                }
            }
            ScalarFamily::RationalTwist { delta } => {
                let q = 1.0 + s * s;
                delta * (6.0 * s * s - 2.0) / (q * q * q)
            }
        }
    }

    /// Antiderivative normalized to vanish at `s = 0`.
    pub fn antiderivative(&self, s: f64) -> f64 {
        match *self {
            ScalarFamily::Zero => 0.0,
            ScalarFamily::Constant { value } => value * s,
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let c = amplitude * width * std::f64::consts::PI.sqrt() / 2.0;
                c * (libm::erf((s - center) / width) - libm::erf(-center / width))
            }
            ScalarFamily::SmoothCompactBump {
                amplitude,
                radius,
                center,
            } => {
                let prim = |x: f64| {
                    let x = x.clamp(-1.0, 1.0);
                    let x2 = x * x;
                    x * (1.0 - x2 + 0.6 * x2 * x2 - x2 * x2 * x2 / 7.0)
                };
                amplitude * radius * (prim((s - center) / radius) - prim(-center / radius))
            }
            ScalarFamily::RationalTwist { delta } => delta * s.atan(),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match *self {
            ScalarFamily::Zero => 0.0,
            ScalarFamily::Constant { value } => value.abs(),
            ScalarFamily::GaussianBump { amplitude, .. } => amplitude.abs(),
            ScalarFamily::SmoothCompactBump { amplitude, .. } => amplitude.abs(),
            ScalarFamily::RationalTwist { delta } => delta.abs(),
        }
    }

    pub fn sup_abs_derivative(&self) -> f64 {
        match *self {
            ScalarFamily::Zero | ScalarFamily::Constant { .. } => 0.0,
            ScalarFamily::GaussianBump {
                amplitude, width, ..
            } => amplitude.abs() * GAUSS_D1 / width,
            ScalarFamily::SmoothCompactBump {
                amplitude, radius, ..
            } => amplitude.abs() * BUMP_D1 / radius,
            ScalarFamily::RationalTwist { delta } => delta.abs() * 3.0 * 3f64.sqrt() / 8.0,
        }
    }

    pub fn sup_abs_second_derivative(&self) -> f64 {
        match *self {
            ScalarFamily::Zero | ScalarFamily::Constant { .. } => 0.0,
            ScalarFamily::GaussianBump {
                amplitude, width, ..
            } => 2.0 * amplitude.abs() / (width * width),
            ScalarFamily::SmoothCompactBump {
                amplitude, radius, ..
            } => 6.0 * amplitude.abs() / (radius * radius),
            ScalarFamily::RationalTwist { delta } => 2.0 * delta.abs(),
        }
    }

    /// Lower bound of the values (used for sign hypotheses).
    pub fn infimum(&self) -> f64 {
        match *self {
            ScalarFamily::Zero => 0.0,
            ScalarFamily::Constant { value } => value,
            ScalarFamily::GaussianBump { amplitude, .. }
            | ScalarFamily::SmoothCompactBump { amplitude, .. } => amplitude.min(0.0),
            ScalarFamily::RationalTwist { delta } => delta.min(0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup_abs() == 0.0
    }

    pub fn decay(&self) -> DecayClass {
        match *self {
            _ if self.is_zero() => DecayClass::Flat,
            ScalarFamily::Zero => DecayClass::Flat,
            ScalarFamily::Constant { .. } => DecayClass::Persistent,
            ScalarFamily::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                // (1+s^2) <= c + 2 w^2 u^2 with u = (s-center)/w, then maximize (c + 2w^2 v) e^{-v}
                let c = 1.0 + 2.0 * center * center;
                let w2 = width * width;
                let peak = if c >= 2.0 * w2 {
                    c
                } else {
                    2.0 * w2 * (c / (2.0 * w2) - 1.0).exp()
                };
                DecayClass::RationalDecay {
                    delta: amplitude.abs() * peak,
                }
            }
            ScalarFamily::SmoothCompactBump { radius, center, .. } => DecayClass::CompactSupport {
                radius: center.abs() + radius,
            },
            ScalarFamily::RationalTwist { delta } => {
                DecayClass::RationalDecay { delta: delta.abs() }
            }
        }
    }
}

/// The rotation of the transverse direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rate", rename_all = "snake_case")]
pub enum Twist {
    /// `theta'(s)` of `Theta = (cos theta, sin theta)`; `tau = |theta'|`.
    Angle(ScalarFamily),
    /// `tau(s) >= 0` given directly; no angle components are available.
    Speed(ScalarFamily),
}

impl Twist {
    fn family(&self) -> &ScalarFamily {
        match self {
            Twist::Angle(f) | Twist::Speed(f) => f,
        }
    }
}

/// Declared uniform bounds of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclaredBounds {
    pub sup_kappa: f64,
    pub sup_kappa_prime: f64,
    pub sup_tau: f64,
    /// `sup |Theta''|` for angle twists, `sup |tau'|` for speed twists.
    pub sup_tau_prime: f64,
}

/// Curvature and twist of a strip as functions of arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripProfile {
    pub curvature: ScalarFamily,
    pub twist: Twist,
    pub bounds: DeclaredBounds,
}

impl StripProfile {
    pub fn new(curvature: ScalarFamily, twist: Twist) -> Result<Self> {
        curvature.check()?;
        twist.family().check()?;
        if let Twist::Speed(f) = twist {
            if f.infimum() < 0.0 {
                return Err(invalid("twist", "a speed twist must be nonnegative"));
            }
        }
        let g = twist.family();
        let sup_tau_prime = match twist {
            Twist::Angle(_) => {
                let d = g.sup_abs_derivative();
                let s = g.sup_abs();
                (d * d + s.powi(4)).sqrt()
            }
            Twist::Speed(_) => g.sup_abs_derivative(),
        };
        let bounds = DeclaredBounds {
            sup_kappa: curvature.sup_abs(),
            sup_kappa_prime: curvature.sup_abs_derivative(),
            sup_tau: g.sup_abs(),
            sup_tau_prime,
        };
        Ok(Self {
            curvature,
            twist,
            bounds,
        })
    }

    pub fn flat() -> Self {
        Self::new(ScalarFamily::Zero, Twist::Angle(ScalarFamily::Zero)).expect("flat profile")
    }

    pub fn bent(curvature: ScalarFamily) -> Result<Self> {
        Self::new(curvature, Twist::Angle(ScalarFamily::Zero))
    }

    pub fn twisted(angle_rate: ScalarFamily) -> Result<Self> {
        Self::new(ScalarFamily::Zero, Twist::Angle(angle_rate))
    }

    /// Replaces the declared bounds, e.g. with sharper ones known to the caller.
    pub fn with_bounds(mut self, bounds: DeclaredBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn kappa(&self, s: f64) -> f64 {
        self.curvature.value(s)
    }

    pub fn kappa_prime(&self, s: f64) -> f64 {
        self.curvature.derivative(s)
    }

    pub fn tau(&self, s: f64) -> f64 {
        self.twist.family().value(s).abs()
    }

    pub fn tau_sq(&self, s: f64) -> f64 {
        let g = self.twist.family().value(s);
        g * g
    }

    /// `(tau^2)'`, smooth in both representations.
    pub fn tau_sq_prime(&self, s: f64) -> f64 {
        let g = self.twist.family();
        2.0 * g.value(s) * g.derivative(s)
    }

    /// The rotation angle `theta(s)` with `theta(0) = 0`, for angle twists only.
    pub fn angle(&self, s: f64) -> Result<f64> {
        match self.twist {
            Twist::Angle(g) => Ok(g.antiderivative(s)),
            Twist::Speed(_) => Err(Error::Unsupported(
                "profile has no angle components; only tau is known".into(),
            )),
        }
    }

    pub fn has_angle(&self) -> bool {
        matches!(self.twist, Twist::Angle(_))
    }

    pub fn is_untwisted(&self) -> bool {
        self.twist.family().is_zero()
    }

    pub fn is_unbent(&self) -> bool {
        self.curvature.is_zero()
    }

    pub fn is_flat(&self) -> bool {
        self.is_untwisted() && self.is_unbent()
    }

    pub fn decay(&self) -> DecayClass {
        self.curvature.decay().combine(self.twist.family().decay())
    }

    /// Decay class of `tau` alone.
    pub fn twist_decay(&self) -> DecayClass {
        self.twist.family().decay()
    }

    pub fn kappa_infimum(&self) -> f64 {
        self.curvature.infimum()
    }

    /// Curvatures `(k_1, k_2)` of a space curve in a parallel frame realizing this
    /// profile: the curvature vector is aligned with `Theta`, so `k . Theta = kappa_g`.
    pub fn frame_curvatures(&self, s: f64) -> Result<[f64; 2]> {
        let theta = self.angle(s)?;
        let k = self.kappa(s);
        Ok([k * theta.cos(), k * theta.sin()])
    }
}

/// Which metric scaling is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `f = sqrt((1 - eps t kappa)^2 + eps^2 t^2 tau^2)`
    Thin,
    /// `h = sqrt((1 - eps t kappa)^2 + eps t^2 tau^2)`
    Dilated,
}

/// A metric factor and the derivatives that enter the transformed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub f: f64,
    pub f_s: f64,
    pub f_t: f64,
    pub f_tt: f64,
}

/// Value and derivatives of the metric factor at `(s, t)`.
pub fn metric_jet(profile: &StripProfile, eps: f64, s: f64, t: f64, scaling: Scaling) -> MetricJet {
    let k = profile.kappa(s);
    let kp = profile.kappa_prime(s);
    let tau2 = profile.tau_sq(s);
    let tau2p = profile.tau_sq_prime(s);
    let c = match scaling {
        Scaling::Thin => eps * eps,
        Scaling::Dilated => eps,
    };
    let a = 1.0 - eps * t * k;
    let big_f = a * a + c * t * t * tau2;
    let f = big_f.sqrt();
    let f_t_sq = -2.0 * eps * k * a + 2.0 * c * t * tau2;
    let f_tt_sq = 2.0 * eps * eps * k * k + 2.0 * c * tau2;
    let f_s_sq = -2.0 * eps * t * kp * a + c * t * t * tau2p;
    let f_t = f_t_sq / (2.0 * f);
    let f_tt = (0.5 * f_tt_sq - f_t * f_t) / f;
    let f_s = f_s_sq / (2.0 * f);
    MetricJet { f, f_s, f_t, f_tt }
}

/// `f_eps(s, t)` for the thin strip.
pub fn metric_f(profile: &StripProfile, eps: f64, s: f64, t: f64) -> f64 {
    metric_jet(profile, eps, s, t, Scaling::Thin).f
}

/// `h_eps(s, t)` for the dilated strip.
pub fn metric_h_scaled(profile: &StripProfile, eps: f64, s: f64, t: f64) -> f64 {
    metric_jet(profile, eps, s, t, Scaling::Dilated).f
}

/// One hypothesis evaluated on a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub epsilon: f64,
    pub decay: DecayClass,
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.passed)
    }

    /// The strip is a valid tubular neighbourhood: `eps * sup kappa < 1`.
    pub fn admissible(&self) -> bool {
        self.passed(CHECK_BOUNDED_CURVATURE) && self.passed(CHECK_DECLARED_BOUNDS)
    }

    pub fn require_admissible(&self) -> Result<()> {
        for name in [CHECK_BOUNDED_CURVATURE, CHECK_DECLARED_BOUNDS] {
            if let Some(c) = self.check(name) {
                if !c.passed {
                    return Err(Error::Hypothesis(format!("{}: {}", c.name, c.detail)));
                }
            }
        }
        Ok(())
    }
}

pub const CHECK_BOUNDED_CURVATURE: &str = "bounded-curvature";
pub const CHECK_DECLARED_BOUNDS: &str = "declared-bounds";
pub const CHECK_ASYMPTOTICALLY_FLAT: &str = "asymptotically-flat";
pub const CHECK_BOUNDED_DERIVATIVES: &str = "bounded-derivatives";
pub const CHECK_NONNEGATIVE_CURVATURE: &str = "nonnegative-curvature";
pub const CHECK_CURVATURE_BELOW_X0: &str = "curvature-below-x0";
pub const CHECK_RATIONAL_TWIST: &str = "rational-twist-decay";

/// Sampling options for [`validate`].
#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    /// Half length of the uniformly sampled core interval.
    pub half_length: f64,
    pub core_samples: usize,
    /// Geometric samples per side, reaching `1e3 * half_length`.
    pub tail_samples: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            half_length: 10.0,
            core_samples: 2001,
            tail_samples: 200,
        }
    }
}

/// Sample abscissae used by [`validate`]: uniform on the core, geometric in the tails.
pub fn sample_points(opts: &SampleOptions) -> Vec<f64> {
    let l = opts.half_length;
    let n = opts.core_samples.max(2);
    let mut pts: Vec<f64> = (0..n)
        .map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64)
        .collect();
    let q = 1000f64.powf(1.0 / opts.tail_samples.max(1) as f64);
    let mut x = l;
    for _ in 0..opts.tail_samples {
        x *= q;
        pts.push(x);
        pts.push(-x);
    }
    pts
}

/// Checks a profile against the standing hypotheses for a given `eps`.
///
/// Inadmissible strips (`eps * sup kappa >= 1` or declared bounds contradicted by
/// samples) are reported as failed checks; [`ValidationReport::require_admissible`]
/// turns them into an error.
pub fn validate(
    profile: &StripProfile,
    eps: f64,
    opts: &SampleOptions,
) -> Result<ValidationReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {eps}")));
    }
    let b = profile.bounds;
    for (name, v) in [
        ("sup_kappa", b.sup_kappa),
        ("sup_kappa_prime", b.sup_kappa_prime),
        ("sup_tau", b.sup_tau),
        ("sup_tau_prime", b.sup_tau_prime),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "declared bound",
                reason: format!("{name} must be finite and nonnegative, got {v}"),
            });
        }
    }
    let pts = sample_points(opts);
    let slack = |bound: f64| bound * (1.0 + 1e-9) + 1e-300;
    let mut bound_violation: Option<String> = None;
    let mut min_kappa = f64::INFINITY;
    for &s in &pts {
        let k = ensure_finite("curvature", s, profile.kappa(s))?;
        let kp = ensure_finite("curvature derivative", s, profile.kappa_prime(s))?;
        let t = ensure_finite("twist", s, profile.tau(s))?;
        ensure_finite("twist derivative", s, profile.tau_sq_prime(s))?;
        min_kappa = min_kappa.min(k);
        if bound_violation.is_none() {
            if k.abs() > slack(b.sup_kappa) {
                bound_violation = Some(format!(
                    "|kappa({s})| = {} exceeds {}",
                    k.abs(),
                    b.sup_kappa
                ));
            } else if kp.abs() > slack(b.sup_kappa_prime) {
                bound_violation = Some(format!(
                    "|kappa'({s})| = {} exceeds {}",
                    kp.abs(),
                    b.sup_kappa_prime
                ));
            } else if t > slack(b.sup_tau) {
                bound_violation = Some(format!("tau({s}) = {t} exceeds {}", b.sup_tau));
            }
        }
    }

    let mut checks = Vec::new();
    let x = eps * b.sup_kappa;
    checks.push(HypothesisCheck {
        name: CHECK_BOUNDED_CURVATURE.into(),
        passed: x < 1.0,
        detail: format!("eps * sup|kappa| = {x}"),
    });
    checks.push(HypothesisCheck {
        name: CHECK_DECLARED_BOUNDS.into(),
        passed: bound_violation.is_none(),
        detail: bound_violation.unwrap_or_else(|| format!("{} samples within bounds", pts.len())),
    });
    checks.push(HypothesisCheck {
        name: CHECK_BOUNDED_DERIVATIVES.into(),
        passed: true,
        detail: format!(
            "sup|kappa'| = {}, sup|Theta''| = {}",
            b.sup_kappa_prime, b.sup_tau_prime
        ),
    });

    let decay = profile.decay();
    let (flat_ok, flat_detail) = audit_decay(profile, decay, &pts);
    checks.push(HypothesisCheck {
        name: CHECK_ASYMPTOTICALLY_FLAT.into(),
        passed: flat_ok,
        detail: flat_detail,
    });

    let x0 = crate::transverse::x0();
    checks.push(HypothesisCheck {
        name: CHECK_NONNEGATIVE_CURVATURE.into(),
        passed: min_kappa >= 0.0 && profile.kappa_infimum() >= 0.0,
        detail: format!("min sampled kappa = {min_kappa}"),
    });
    checks.push(HypothesisCheck {
        name: CHECK_CURVATURE_BELOW_X0.into(),
        passed: x <= x0,
        detail: format!("eps * sup|kappa| = {x}, x0 = {x0}"),
    });
    let twist_decay = profile.twist_decay();
    checks.push(HypothesisCheck {
        name: CHECK_RATIONAL_TWIST.into(),
        passed: twist_decay.rational_bound().is_some()
            || matches!(twist_decay, DecayClass::CompactSupport { .. }),
        detail: format!("{twist_decay:?}"),
    });

    Ok(ValidationReport {
        epsilon: eps,
        decay,
        checks,
    })
}

fn audit_decay(profile: &StripProfile, decay: DecayClass, pts: &[f64]) -> (bool, String) {
    let components = |s: f64| [profile.kappa(s).abs(), profile.tau(s)];
    match decay {
        DecayClass::Persistent => (false, "profile does not vanish at infinity".into()),
        DecayClass::Flat => {
            let bad = pts
                .iter()
                .find(|&&s| components(s).iter().any(|&v| v != 0.0));
            match bad {
                None => (true, "identically zero".into()),
                Some(s) => (false, format!("declared flat but nonzero at s = {s}")),
            }
        }
        DecayClass::CompactSupport { radius } => {
            let bad = pts
                .iter()
                .find(|&&s| s.abs() > radius && components(s).iter().any(|&v| v != 0.0));
            match bad {
                None => (true, format!("supported in |s| <= {radius}")),
                Some(s) => (false, format!("nonzero outside support at s = {s}")),
            }
        }
        DecayClass::RationalDecay { delta } => {
            let bad = pts.iter().find(|&&s| {
                let bound = delta / (1.0 + s * s) + 1e-10;
                components(s).iter().any(|&v| v > bound)
            });
            match bad {
                None => (true, format!("bounded by {delta}/(1+s^2)")),
                Some(s) => (false, format!("rational decay bound fails at s = {s}")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(a: f64, w: f64) -> ScalarFamily {
        ScalarFamily::GaussianBump {
            amplitude: a,
            width: w,
            center: 0.0,
        }
    }

    #[test]
    fn flat_metric_is_one() {
        let p = StripProfile::flat();
        for &(s, t) in &[(0.0, 0.0), (1.3, 0.7), (-4.0, 1.0)] {
            assert_eq!(metric_f(&p, 0.1, s, t), 1.0);
            assert_eq!(metric_h_scaled(&p, 0.1, s, t), 1.0);
        }
    }

    #[test]
    fn constant_curvature_metric() {
        let p = StripProfile::bent(ScalarFamily::Constant { value: 0.5 }).unwrap();
        assert!((metric_f(&p, 0.1, 0.0, 1.0) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn twisted_metric() {
        let p = StripProfile::twisted(ScalarFamily::Constant { value: 1.0 }).unwrap();
        assert!((metric_f(&p, 0.1, 0.0, 1.0) - 1.01f64.sqrt()).abs() < 1e-15);
        assert!((metric_h_scaled(&p, 0.1, 0.0, 1.0) - 1.1f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let p = StripProfile::new(
            gaussian(0.7, 1.3),
            Twist::Angle(ScalarFamily::RationalTwist { delta: 0.9 }),
        )
        .unwrap();
        for scaling in [Scaling::Thin, Scaling::Dilated] {
            for &(s, t) in &[(0.3, 0.4), (-1.1, 0.9), (2.0, 0.5)] {
                let eps = 0.3;
                let j = metric_jet(&p, eps, s, t, scaling);
                let f = |s: f64, t: f64| metric_jet(&p, eps, s, t, scaling).f;
                let h = 1e-4;
                let fs = (f(s + h, t) - f(s - h, t)) / (2.0 * h);
                let ft = (f(s, t + h) - f(s, t - h)) / (2.0 * h);
                let ftt = (f(s, t + h) - 2.0 * f(s, t) + f(s, t - h)) / (h * h);
                assert!((j.f_s - fs).abs() < 1e-8);
                assert!((j.f_t - ft).abs() < 1e-8);
                assert!((j.f_tt - ftt).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn family_derivatives_match_finite_differences() {
        let fams = [
            gaussian(-1.2, 0.8),
            ScalarFamily::SmoothCompactBump {
                amplitude: 0.4,
                radius: 2.0,
                center: 0.5,
            },
            ScalarFamily::RationalTwist { delta: 1.5 },
        ];
        for g in fams {
            for &s in &[-1.7, -0.2, 0.0, 0.9, 2.2] {
                let h = 1e-5;
                let d = (g.value(s + h) - g.value(s - h)) / (2.0 * h);
                let d2 = (g.derivative(s + h) - g.derivative(s - h)) / (2.0 * h);
                let a = (g.antiderivative(s + h) - g.antiderivative(s - h)) / (2.0 * h);
                assert!((g.derivative(s) - d).abs() < 1e-8, "{g:?} at {s}");
                assert!((g.second_derivative(s) - d2).abs() < 1e-7, "{g:?} at {s}");
                assert!((g.value(s) - a).abs() < 1e-8, "{g:?} at {s}");
            }
            assert_eq!(g.antiderivative(0.0), 0.0);
        }
    }

    #[test]
    fn declared_sups_are_attained_bounds() {
        let fams = [
            gaussian(-1.2, 0.8),
            ScalarFamily::SmoothCompactBump {
                amplitude: 0.4,
                radius: 2.0,
                center: 0.5,
            },
            ScalarFamily::RationalTwist { delta: 1.5 },
        ];
        for g in fams {
            let (mut m0, mut m1, mut m2) = (0f64, 0f64, 0f64);
            for i in 0..=200_000 {
                let s = -10.0 + 20.0 * i as f64 / 200_000.0;
                m0 = m0.max(g.value(s).abs());
                m1 = m1.max(g.derivative(s).abs());
                m2 = m2.max(g.second_derivative(s).abs());
            }
            assert!(m0 <= g.sup_abs() * (1.0 + 1e-12) && m0 > 0.999 * g.sup_abs());
            assert!(m1 <= g.sup_abs_derivative() * (1.0 + 1e-12));
            assert!(m1 > 0.999 * g.sup_abs_derivative(), "{g:?}");
            assert!(m2 <= g.sup_abs_second_derivative() * (1.0 + 1e-12));
            assert!(m2 > 0.999 * g.sup_abs_second_derivative(), "{g:?}");
        }
    }

    #[test]
    fn validate_flat() {
        let r = validate(&StripProfile::flat(), 0.1, &SampleOptions::default()).unwrap();
        assert!(r.checks.iter().all(|c| c.passed), "{r:?}");
        assert_eq!(r.decay, DecayClass::Flat);
    }

    #[test]
    fn validate_constant_curvature() {
        let p = StripProfile::bent(ScalarFamily::Constant { value: 0.5 }).unwrap();
        let r = validate(&p, 0.1, &SampleOptions::default()).unwrap();
        assert!(r.passed(CHECK_BOUNDED_CURVATURE));
        assert!(!r.passed(CHECK_ASYMPTOTICALLY_FLAT));
        let r = validate(&p, 3.0, &SampleOptions::default()).unwrap();
        assert!(!r.admissible());
        assert!(matches!(r.require_admissible(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn validate_rejects_wrong_declared_bound() {
        let p = StripProfile::bent(gaussian(1.0, 1.0))
            .unwrap()
            .with_bounds(DeclaredBounds {
                sup_kappa: 0.5,
                sup_kappa_prime: 1.0,
                sup_tau: 0.0,
                sup_tau_prime: 0.0,
            });
        let r = validate(&p, 0.1, &SampleOptions::default()).unwrap();
        assert!(!r.admissible());
    }

    #[test]
    fn gaussian_rational_bound_holds() {
        for (a, w, c) in [(1.0, 1.0, 0.0), (0.3, 4.0, 0.0), (2.0, 0.5, 3.0)] {
            let g = ScalarFamily::GaussianBump {
                amplitude: a,
                width: w,
                center: c,
            };
            let delta = g.decay().rational_bound().unwrap();
            for i in 0..=100_000 {
                let s = -50.0 + i as f64 * 1e-3;
                assert!(g.value(s).abs() <= delta / (1.0 + s * s) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn speed_twist_has_no_angle() {
        let p = StripProfile::new(
            ScalarFamily::Zero,
            Twist::Speed(ScalarFamily::RationalTwist { delta: 1.0 }),
        )
        .unwrap();
        assert!(matches!(p.angle(1.0), Err(Error::Unsupported(_))));
        assert!(StripProfile::new(
            ScalarFamily::Zero,
            Twist::Speed(ScalarFamily::Constant { value: -1.0 })
        )
        .is_err());
    }

    #[test]
    fn non_finite_parameters_rejected() {
        assert!(StripProfile::bent(gaussian(f64::NAN, 1.0)).is_err());
        assert!(StripProfile::bent(gaussian(1.0, 0.0)).is_err());
    }
}
