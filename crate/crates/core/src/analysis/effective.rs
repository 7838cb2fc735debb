//! One-dimensional effective operators on the `s` discretization of the strip.

use crate::assembly::{assemble_effective_fe, GridSpec};
use crate::eigensolve::{lowest_eigenpairs_from_guess, ResolventApply};
use crate::error::{Error, Result};
use crate::linalg::{BandLdlt, CsrMatrix, SymBand};

/// Lowest `count` eigenvalues of `-u'' + V u` on `[-L, L]` (Dirichlet) with linear
/// elements on `cells` uniform cells.
pub fn effective_eigenvalues_fe(
    potential: &dyn Fn(f64) -> f64,
    half_length: f64,
    cells: usize,
    count: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let pair = assemble_effective_fe(potential, half_length, cells + 1)?;
    let h = 2.0 * half_length / cells as f64;
    let inf = (0..=4 * cells)
        .map(|i| potential(-half_length + 0.25 * i as f64 * h))
        .fold(f64::INFINITY, f64::min);
    let r = lowest_eigenpairs_from_guess(&pair.stiffness, &pair.mass, count, tol, inf - 1.0, 1.0)?;
    if !r.converged {
        return Err(Error::Unsupported(format!(
            "effective eigenproblem did not converge (residuals {:?})",
            r.residuals
        )));
    }
    Ok(r.eigenvalues)
}

/// `N^{-1} (+) 0`: the resolvent of `-d_s^2 + V + c` acting on the transverse ground
/// mode `chi_1`, and zero on its complement, expressed on the strip grid.
pub struct ProjectedLimit {
    grid: GridSpec,
    factor: BandLdlt,
    mass_s: CsrMatrix,
    /// Nodal `chi_1` on free transverse nodes, normalized in the transverse mass.
    chi: Vec<f64>,
    /// Transverse mass times `chi`.
    m_chi: Vec<f64>,
}

impl ProjectedLimit {
    pub fn new(grid: GridSpec, potential: &dyn Fn(f64) -> f64, c: f64) -> Result<Self> {
        let line = assemble_effective_fe(&|s| potential(s) + c, grid.half_length, grid.n_s)?;
        let factor = BandLdlt::factor(SymBand::combine(&[(1.0, &line.stiffness)])?)?;
        if factor.negative_pivots() > 0 {
            return Err(Error::Hypothesis(
                "limit operator is not positive definite; increase kappa".into(),
            ));
        }
        let nt = grid.column_len();
        let ht = grid.ht();
        let raw: Vec<f64> = (1..=nt)
            .map(|j| (std::f64::consts::FRAC_PI_2 * grid.t(j)).sin())
            .collect();
        // linear-element transverse mass, Dirichlet at t = 0, free at t = 1
        let mass_t = |v: &[f64]| -> Vec<f64> {
            (0..nt)
                .map(|j| {
                    let diag = if j + 1 == nt {
                        ht / 3.0
                    } else {
                        2.0 * ht / 3.0
                    };
                    let mut y = diag * v[j];
                    if j > 0 {
                        y += ht / 6.0 * v[j - 1];
                    }
                    if j + 1 < nt {
                        y += ht / 6.0 * v[j + 1];
                    }
                    y
                })
                .collect()
        };
        let m_raw = mass_t(&raw);
        let norm = raw
            .iter()
            .zip(&m_raw)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .sqrt();
        let chi: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let m_chi: Vec<f64> = m_raw.iter().map(|x| x / norm).collect();
        Ok(Self {
            grid,
            factor,
            mass_s: line.mass,
            chi,
            m_chi,
        })
    }
}

impl ResolventApply for ProjectedLimit {
    fn dim(&self) -> usize {
        self.grid.unknowns()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let nt = self.grid.column_len();
        let coeff: Vec<f64> = x
            .chunks(nt)
            .map(|col| col.iter().zip(&self.m_chi).map(|(a, b)| a * b).sum())
            .collect();
        let y = self.factor.solve(&self.mass_s.mul_vec(&coeff));
        let mut out = Vec::with_capacity(x.len());
        for yi in y {
            out.extend(self.chi.iter().map(|c| yi * c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_decoupled, GridSpec};
    use crate::eigensolve::{gap_norm, ShiftedResolvent};
    use crate::profiles::StripProfile;

    #[test]
    fn free_line_is_closed_form() {
        let e = effective_eigenvalues_fe(&|_| 0.0, 5.0, 200, 2, 1e-11).unwrap();
        let h = 0.05;
        for (j, v) in e.iter().enumerate() {
            let k = (j + 1) as f64 * std::f64::consts::PI / 10.0;
            let exact = 6.0 / (h * h) * (1.0 - (k * h).cos()) / (2.0 + (k * h).cos());
            assert!((v - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn projected_limit_matches_decoupled_on_ground_mode() {
        // flat decoupled operator restricted to chi_1 coincides with the limit, and the
        // rest of its resolvent is O(eps^2)
        let g = GridSpec::new(4.0, 41, 17).unwrap();
        let eps = 0.05;
        let h = assemble_decoupled(&StripProfile::flat(), eps, g).unwrap();
        let thr = crate::assembly::discrete_dn_ground(17) / (eps * eps);
        let c = 1.0;
        let r = ShiftedResolvent::from_pair(&h, c - thr).unwrap();
        let lim = ProjectedLimit::new(g, &|_| 0.0, c).unwrap();
        let gap = gap_norm(&r, &lim, &h.mass, 1e-10).unwrap().norm;
        let second = crate::transverse::dn_eigenvalues_1d(2)[1];
        assert!(
            gap < 1.2 * eps * eps / (second - std::f64::consts::FRAC_PI_2.powi(2)),
            "{gap}"
        );
    }
}
