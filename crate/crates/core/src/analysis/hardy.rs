//! Hardy constants of the shifted operator and the cross-sectional positivity samples.

use serde::{Deserialize, Serialize};

use super::GridPolicy;
use crate::assembly::{assemble_b, assemble_hardy_mass, discrete_dn_ground};
use crate::eigensolve::lowest_eigenpairs_raw;
use crate::error::Result;
use crate::linalg::CsrMatrix;
use crate::profiles::StripProfile;
use crate::transverse::{lambda0_transverse, DN_GROUND};

/// Shift used for the weighted eigenproblem; must lie below the Hardy constant.
pub const HARDY_SHIFT: f64 = -0.01;
/// Accepted relative change of the constant under doubling of `L`.
pub const HARDY_STABILITY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyResult {
    pub constant: f64,
    pub constant_doubled: f64,
    pub relative_change: f64,
    pub stable: bool,
    pub converged: bool,
    /// Weighted eigenvalues below the shift: nonzero means the shifted operator is indefinite.
    pub below_shift: usize,
}

impl HardyResult {
    pub fn positive(&self) -> bool {
        self.below_shift == 0 && self.constant > 0.0 && self.constant_doubled > 0.0
    }
}

fn weighted_lowest(
    profile: &StripProfile,
    eps: f64,
    policy: &GridPolicy,
    tol: f64,
) -> Result<(f64, bool, usize)> {
    let grid = policy.grid_for(eps)?;
    let pair = assemble_b(profile, eps, grid)?;
    let level = discrete_dn_ground(grid.n_t) / (eps * eps);
    let shifted = CsrMatrix::linear_combination(&[(1.0, &pair.stiffness), (-level, &pair.mass)])?;
    let weight = assemble_hardy_mass(grid, 0.0, Some((profile, eps)))?;
    let r = lowest_eigenpairs_raw(&shifted, &weight, 1, tol, HARDY_SHIFT)?;
    if r.below_shift > 0 {
        return Ok((f64::NEG_INFINITY, r.converged, r.below_shift));
    }
    Ok((r.eigenvalues[0], r.converged, 0))
}

/// Largest `c` with `b_eps(psi) - level |psi|^2 >= c int rho |psi|^2 f_eps`, `rho = 1 / (1 + s^2)`,
/// on the truncated strip, recomputed on twice the length.
///
/// The level is the transverse ground value of the discretization, the discrete
/// counterpart of `(pi / 2 eps)^2`.
pub fn hardy_constant(
    profile: &StripProfile,
    eps: f64,
    policy: &GridPolicy,
    tol: f64,
) -> Result<HardyResult> {
    let (c1, ok1, neg1) = weighted_lowest(profile, eps, policy, tol)?;
    let (c2, ok2, neg2) = weighted_lowest(profile, eps, &policy.extended(2.0), tol)?;
    let relative_change = if c1.is_finite() && c2.is_finite() {
        (c1 - c2).abs() / c1.abs().max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    Ok(HardyResult {
        constant: c1,
        constant_doubled: c2,
        relative_change,
        stable: relative_change < HARDY_STABILITY,
        converged: ok1 && ok2,
        below_shift: neg1.max(neg2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Sample {
    pub s: f64,
    /// `lambda_0^eps(s) - (pi/2)^2`.
    pub excess: f64,
}

/// `lambda_0^eps(s) - (pi/2)^2` at `count` equally spaced points of `[-L, L]`.
pub fn lemma1_samples(
    profile: &StripProfile,
    eps: f64,
    half_length: f64,
    count: usize,
    resolution: usize,
) -> Result<Vec<Lemma1Sample>> {
    (0..count)
        .map(|i| {
            let s = -half_length + 2.0 * half_length * i as f64 / (count.max(2) - 1) as f64;
            Ok(Lemma1Sample {
                s,
                excess: lambda0_transverse(profile, eps, s, resolution)? - DN_GROUND,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ScalarFamily;

    #[test]
    fn flat_constant_decays_with_length() {
        let eps = 0.5;
        let small = GridPolicy {
            half_length: 4.0,
            cells_s: 80,
            cells_t: Some(12),
        };
        let r = hardy_constant(&StripProfile::flat(), eps, &small, 1e-9).unwrap();
        assert!(r.converged);
        // Dirichlet truncation alone gives a positive constant of order L^-2 log-ish
        assert!(r.constant > 0.0);
        assert!(r.constant_doubled < 0.6 * r.constant, "{r:?}");
    }

    #[test]
    fn bent_barrier_has_positive_constant() {
        let p = StripProfile::bent(ScalarFamily::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
        })
        .unwrap();
        let policy = GridPolicy {
            half_length: 6.0,
            cells_s: 120,
            cells_t: Some(16),
        };
        let r = hardy_constant(&p, 0.5, &policy, 1e-9).unwrap();
        assert!(r.positive());
        let flat = hardy_constant(&StripProfile::flat(), 0.5, &policy, 1e-9).unwrap();
        assert!(r.constant_doubled > 2.0 * flat.constant_doubled);
    }

    #[test]
    fn lemma1_positive_below_x0() {
        let p = StripProfile::bent(ScalarFamily::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
        })
        .unwrap();
        let samples = lemma1_samples(&p, 0.5, 5.0, 50, 256).unwrap();
        assert!(samples.iter().all(|x| x.excess >= -1e-10));
        assert!(samples[25].excess > 1e-3);
    }
}
