//! Relatively parallel frame of a space curve and the twisted strip it carries.

use strip_spectra::frame::{embed, first_fundamental_form, frame_for_profile};
use strip_spectra::profiles::{metric_f, ScalarFamily, StripProfile, Twist};

fn main() -> strip_spectra::Result<()> {
    let profile = StripProfile::new(
        ScalarFamily::GaussianBump {
            amplitude: 0.5,
            width: 1.0,
            center: 0.0,
        },
        Twist::Angle(ScalarFamily::Constant { value: 1.0 }),
    )?;
    let eps = 0.2;
    let track = frame_for_profile(&profile, 2, (-3.0, 3.0), 1e-2)?;
    println!(
        "frame drift {:.2e} over {} samples",
        track.max_drift,
        track.samples.len()
    );
    let emb = embed(&profile, &track, eps, 9)?;
    for i in [100, 300, 500] {
        let g = first_fundamental_form(&emb, i, 4)?;
        let f = metric_f(&profile, eps, emb.s[i], emb.t[4]);
        println!(
            "s = {:+.2}: G = [[{:.6}, {:.1e}], [., {:.6}]], f^2 = {:.6}, eps^2 = {:.6}",
            emb.s[i],
            g[0][0],
            g[0][1],
            g[1][1],
            f * f,
            eps * eps
        );
    }
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    if std::env::args().any(|a| a == "--xyz") {
        emb.write_xyz(&mut out)?;
    }
    Ok(())
}
