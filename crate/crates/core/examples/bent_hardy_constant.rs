//! Hardy constant of a bent strip with nonnegative curvature, and its behaviour
//! under doubling of the truncation length.

use strip_spectra::analysis::{hardy_constant, lemma1_samples, GridPolicy};
use strip_spectra::profiles::{ScalarFamily, StripProfile};

fn main() -> strip_spectra::Result<()> {
    let profile = StripProfile::bent(ScalarFamily::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
    })?;
    let eps = 0.5;
    let samples = lemma1_samples(&profile, eps, 5.0, 11, 256)?;
    for s in &samples {
        println!("s = {:>5.1}  lambda_0 - (pi/2)^2 = {:+.6e}", s.s, s.excess);
    }
    for l in [40.0, 160.0, 640.0] {
        let policy = GridPolicy {
            half_length: l,
            cells_s: (10.0 * l) as usize,
            cells_t: Some(12),
        };
        let h = hardy_constant(&profile, eps, &policy, 1e-9)?;
        println!(
            "L = {l:>5}: c = {:.4}, c(2L) = {:.4}, change {:.3}",
            h.constant, h.constant_doubled, h.relative_change
        );
    }
    Ok(())
}
