//! Thin-strip sweeps: a bent strip approaches `inf kappa / eps` below the threshold,
//! a twisted one the operator `-d^2 - tau^2 / 2`.

use strip_spectra::analysis::sweeps::SweepOptions;
use strip_spectra::analysis::{thin_strip_sweep, GridPolicy, ThinMode};
use strip_spectra::profiles::{ScalarFamily, StripProfile};

fn main() -> strip_spectra::Result<()> {
    let eps = [0.2, 0.1, 0.05];
    let bent = StripProfile::bent(ScalarFamily::GaussianBump {
        amplitude: -1.0,
        width: 2.0,
        center: 0.0,
    })?;
    let r = thin_strip_sweep(
        "bent",
        &bent,
        &eps,
        &GridPolicy::auto(8.0, 200),
        ThinMode::Bent,
        &SweepOptions::default(),
    )?;
    for rec in &r.records {
        println!(
            "eps {:<6} eps (lambda_1 - threshold) = {:+.5}",
            rec.epsilon,
            rec.scaled.unwrap_or(f64::NAN)
        );
    }
    println!("{}: {}", r.verdict.criterion, r.verdict.detail);

    let twisted = StripProfile::twisted(ScalarFamily::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
    })?;
    let r = thin_strip_sweep(
        "twisted",
        &twisted,
        &eps,
        &GridPolicy::auto(10.0, 250),
        ThinMode::Twisted,
        &SweepOptions::default(),
    )?;
    for rec in &r.records {
        println!(
            "eps {:<6} effective {:+.5}  remainder {:+.3e}",
            rec.epsilon,
            rec.effective.unwrap_or(f64::NAN),
            rec.remainder.unwrap_or(f64::NAN)
        );
    }
    if let Some(f) = r.fit {
        println!(
            "remainder slope {:.3} (residual {:.3})",
            f.exponent, f.residual
        );
    }
    Ok(())
}
