//! A purely twisted strip has an eigenvalue below the threshold: a numerical
//! certificate at two grids plus the analytic trial function.

use strip_spectra::analysis::discrete::{first_negative_cutoff, trial_gap_limit};
use strip_spectra::analysis::{detect_discrete_spectrum, trial_function_certificate, GridPolicy};
use strip_spectra::profiles::{ScalarFamily, StripProfile};

fn main() -> strip_spectra::Result<()> {
    let profile = StripProfile::twisted(ScalarFamily::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
    })?;
    let eps = 0.1;
    let d = detect_discrete_spectrum(&profile, eps, &GridPolicy::auto(20.0, 800), 1e-9)?;
    for s in &d.settings {
        println!(
            "L = {:>5} grid {:>4}x{:<3} lambda_1 = {:.6}  below threshold: {}",
            s.half_length, s.cells_s, s.cells_t, s.lambda1, s.count_below
        );
    }
    println!(
        "threshold {:.6}, margin {:.6}, certified {}",
        d.threshold, d.margin, d.certified
    );
    for n in [1.0, 2.0, 5.0, 20.0] {
        let g = trial_function_certificate(&profile, eps, n)?;
        println!("n = {n:>4}: trial gap {:+.6e}", g.gap);
    }
    println!("limit {:+.6e}", trial_gap_limit(&profile, eps));
    println!(
        "first negative cutoff: {:?}",
        first_negative_cutoff(&profile, eps, 100)?
    );
    Ok(())
}
