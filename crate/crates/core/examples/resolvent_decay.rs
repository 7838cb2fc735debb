//! Resolvent gap between the flattened strip operator and its decoupled comparison.

use strip_spectra::analysis::sweeps::SweepOptions;
use strip_spectra::analysis::{resolvent_sweep, GridPolicy, ResolventRoute};
use strip_spectra::profiles::{ScalarFamily, StripProfile};

fn main() -> strip_spectra::Result<()> {
    let profile = StripProfile::bent(ScalarFamily::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
        center: 0.0,
    })?;
    let opts = SweepOptions {
        tol: 1e-4,
        ..Default::default()
    };
    let r = resolvent_sweep(
        "gap",
        &profile,
        &[0.2, 0.1, 0.05],
        1.0,
        &GridPolicy::auto(6.0, 120),
        ResolventRoute::Decoupled,
        &opts,
    )?;
    for rec in &r.records {
        println!(
            "eps {:<6} gap norm {:.4e}",
            rec.epsilon,
            rec.gap_norm.unwrap_or(f64::NAN)
        );
    }
    println!("{}", r.verdict.detail);
    Ok(())
}
