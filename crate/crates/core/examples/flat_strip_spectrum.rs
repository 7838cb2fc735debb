//! Lowest eigenvalues of the flat strip against the separable closed form.

use std::f64::consts::PI;

use strip_spectra::assembly::{assemble_b, discrete_dirichlet_line, discrete_dn_ground, GridSpec};
use strip_spectra::eigensolve::lowest_eigenpairs;
use strip_spectra::profiles::StripProfile;

fn main() -> strip_spectra::Result<()> {
    let eps = 0.1;
    let half_length = 10.0;
    println!(
        "{:>10} {:>14} {:>14} {:>14}",
        "grid", "lambda_1", "discrete", "error"
    );
    for (cs, ct) in [(100, 10), (200, 20), (400, 40)] {
        let grid = GridSpec::new(half_length, cs + 1, ct + 1)?;
        let pair = assemble_b(&StripProfile::flat(), eps, grid)?;
        let r = lowest_eigenpairs(&pair, 3, 1e-11, 240.0)?;
        let discrete = discrete_dn_ground(grid.n_t) / (eps * eps)
            + discrete_dirichlet_line(1, half_length, grid.n_s);
        let exact = (PI / (2.0 * eps)).powi(2) + (PI / (2.0 * half_length)).powi(2);
        println!(
            "{:>10} {:>14.8} {:>14.8} {:>14.3e}",
            format!("{cs}x{ct}"),
            r.eigenvalues[0],
            discrete,
            r.eigenvalues[0] - exact
        );
    }
    Ok(())
}
