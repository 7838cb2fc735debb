//! Robin-monotonicity instances and the large-coupling limit of `-d^2 + mu V`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::transverse::{effective_limit_check, robin_first_eigenvalue, RobinProblem};

/// Slack allowed in both Robin inequalities.
pub const KRIZ_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrizInstance {
    pub coefficients: [f64; 3],
    pub alpha1: f64,
    pub alpha2: f64,
    pub e1: f64,
    pub e2: f64,
    /// `E_1(alpha_2) + (alpha_1 - alpha_2) psi_2(1)^2 / |psi_2|^2`.
    pub bound: f64,
    pub monotone: bool,
    pub bounded: bool,
}

/// `V(t) = a_0 + a_1 sin(pi t) + a_2 cos(2 pi t)`.
pub fn instance_potential(a: [f64; 3]) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    move |t: f64| {
        a[0] + a[1] * (std::f64::consts::PI * t).sin()
            + a[2] * (2.0 * std::f64::consts::PI * t).cos()
    }
}

/// Random `(V, alpha_1 <= alpha_2)` instances of the Robin comparison.
pub fn kriz_instances(count: usize, seed: u64, resolution: usize) -> Result<Vec<KrizInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let x: f64 = rng.gen_range(-0.5..3.0);
            let y: f64 = rng.gen_range(-0.5..3.0);
            let (alpha1, alpha2) = (x.min(y), x.max(y));
            let r1 = robin_first_eigenvalue(
                &RobinProblem::new(instance_potential(a), alpha1),
                resolution,
            )?;
            let r2 = robin_first_eigenvalue(
                &RobinProblem::new(instance_potential(a), alpha2),
                resolution,
            )?;
            let bound = r2.eigenvalue + (alpha1 - alpha2) * r2.boundary_value_sq / r2.norm_sq;
            Ok(KrizInstance {
                coefficients: a,
                alpha1,
                alpha2,
                e1: r1.eigenvalue,
                e2: r2.eigenvalue,
                bound,
                monotone: r1.eigenvalue <= r2.eigenvalue + KRIZ_TOLERANCE,
                bounded: r1.eigenvalue <= bound + KRIZ_TOLERANCE,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRatioCheck {
    pub mu: Vec<f64>,
    /// `lambda_1(-d^2 + mu V) / mu` per `mu`.
    pub ratio: Vec<f64>,
    pub inf_potential: f64,
    /// Distances to `inf V` decrease along `mu`.
    pub monotone: bool,
}

/// `lambda_1(-d^2 + mu V) / mu` for increasing `mu`, against `inf V`.
pub fn limit_ratio_check(
    potential: &dyn Fn(f64) -> f64,
    inf_potential: f64,
    mu: &[f64],
    half_length: f64,
    resolution: usize,
) -> Result<LimitRatioCheck> {
    let ratio = effective_limit_check(potential, mu, 1, half_length, resolution)?;
    let monotone = ratio
        .windows(2)
        .all(|w| (w[1] - inf_potential).abs() < (w[0] - inf_potential).abs());
    Ok(LimitRatioCheck {
        mu: mu.to_vec(),
        ratio,
        inf_potential,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robin_instances_satisfy_both_inequalities() {
        let inst = kriz_instances(20, 7, 256).unwrap();
        assert!(inst
            .iter()
            .all(|i| i.monotone && i.bounded && i.alpha1 <= i.alpha2));
        assert_eq!(kriz_instances(3, 7, 256).unwrap(), inst[..3].to_vec());
    }

    #[test]
    fn gaussian_well_limit() {
        let c = limit_ratio_check(&|s| -(-s * s).exp(), -1.0, &[1e2, 1e3, 1e4], 6.0, 6000).unwrap();
        assert!(c.monotone);
        let last = *c.ratio.last().unwrap();
        assert!(last > -1.0 && last < -0.9);
        // harmonic approximation: -1 + mu^-1/2
        assert!((last - (-1.0 + 1e-2)).abs() < 2e-3);
    }
}
