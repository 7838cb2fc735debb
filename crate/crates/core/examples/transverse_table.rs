//! Cross-sectional eigenvalues along a bent strip and the Robin comparison.

use strip_spectra::cli::transverse_table;
use strip_spectra::profiles::{ScalarFamily, StripProfile};
use strip_spectra::transverse::{dn_eigenvalues_1d, find_x0, solve_nu0};

fn main() -> strip_spectra::Result<()> {
    println!("Dirichlet-Neumann eigenvalues: {:?}", dn_eigenvalues_1d(4));
    println!("nu_0(1) = {:.10}", solve_nu0(1.0)?);
    println!("x_0 = {:.10}", find_x0());
    let profile = StripProfile::bent(ScalarFamily::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
    })?;
    println!(
        "{:>6} {:>12} {:>12} {:>10} {:>12}",
        "s", "lambda_0", "nu_0", "alpha", "beta"
    );
    for r in transverse_table(&profile, 0.5, 3.0, 7, 256)? {
        println!(
            "{:>6.2} {:>12.6} {:>12} {:>10.4} {:>12.4e}",
            r.s,
            r.lambda0,
            r.nu0
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
            r.alpha,
            r.beta
        );
    }
    Ok(())
}
