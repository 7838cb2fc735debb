//! Dilated twisted strips: the scaled gap tends to the lowest eigenvalue of
//! `-d^2 + kappa - tau^2 / 2`.

use strip_spectra::analysis::sweeps::SweepOptions;
use strip_spectra::analysis::{scaled_strip_sweep, GridPolicy};
use strip_spectra::profiles::{ScalarFamily, StripProfile, Twist};

fn main() -> strip_spectra::Result<()> {
    let profile = StripProfile::new(
        ScalarFamily::GaussianBump {
            amplitude: -0.5,
            width: 1.0,
            center: 0.0,
        },
        Twist::Angle(ScalarFamily::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
        }),
    )?;
    let r = scaled_strip_sweep(
        "scaled",
        &profile,
        &[0.2, 0.1, 0.05],
        &GridPolicy::auto(10.0, 250),
        &SweepOptions::default(),
    )?;
    for rec in &r.records {
        println!(
            "eps {:<6} scaled gap {:+.5}  effective {:+.5}",
            rec.epsilon,
            rec.scaled.unwrap_or(f64::NAN),
            rec.effective.unwrap_or(f64::NAN)
        );
    }
    println!("{}", r.verdict.detail);
    Ok(())
}
