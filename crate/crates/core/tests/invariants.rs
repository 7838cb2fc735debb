use std::f64::consts::FRAC_PI_2;
use std::process::Command;

use proptest::prelude::*;
use strip_spectra::analysis::discrete::trial_gap_limit;
use strip_spectra::analysis::{detect_discrete_spectrum, trial_function_certificate, GridPolicy};
use strip_spectra::assembly::{assemble_b, assemble_d, assemble_y_scaled, GridSpec};
use strip_spectra::eigensolve::lowest_eigenpairs_from_guess;
use strip_spectra::profiles::{ScalarFamily, StripProfile, Twist};

fn bump(amplitude: f64, width: f64) -> ScalarFamily {
    ScalarFamily::GaussianBump {
        amplitude,
        width,
        center: 0.0,
    }
}

fn lowest(pair: &strip_spectra::assembly::FormPair, k: usize, guess: f64) -> Vec<f64> {
    let r =
        lowest_eigenpairs_from_guess(&pair.stiffness, &pair.mass, k, 1e-12, guess, 1.0).unwrap();
    assert!(r.converged);
    r.eigenvalues
}

#[test]
fn dilated_form_is_the_thin_form_of_a_stretched_profile() {
    // s -> sqrt(eps) s maps eps y_eps(k, theta') onto eps d_eps(k(s/sqrt eps), theta'(s/sqrt eps)/sqrt eps)
    let eps: f64 = 0.25;
    let r = eps.sqrt();
    let p = StripProfile::new(bump(-0.6, 1.0), Twist::Angle(bump(1.0, 1.5))).unwrap();
    let stretched = StripProfile::new(bump(-0.6, r), Twist::Angle(bump(1.0 / r, 1.5 * r))).unwrap();
    let g = GridSpec::new(6.0, 121, 13).unwrap();
    let gs = GridSpec::new(6.0 * r, 121, 13).unwrap();
    let guess = FRAC_PI_2.powi(2) / eps - 3.0;
    let y = lowest(&assemble_y_scaled(&p, eps, g).unwrap(), 3, guess);
    let d = lowest(&assemble_d(&stretched, eps, gs).unwrap(), 3, guess / eps);
    for (a, b) in y.iter().zip(&d) {
        assert!((a - eps * b).abs() < 1e-9 * a.abs(), "{a} vs {}", eps * b);
    }
}

#[test]
fn b_and_d_forms_share_the_limit() {
    let p = StripProfile::new(bump(0.8, 1.0), Twist::Angle(bump(0.8, 1.0))).unwrap();
    let eps = 0.3;
    let guess = (FRAC_PI_2 / eps).powi(2) - 10.0;
    let diffs: Vec<f64> = [1usize, 2, 4]
        .iter()
        .map(|&k| {
            let g = GridSpec::new(4.0, 40 * k + 1, 8 * k + 1).unwrap();
            let b = lowest(&assemble_b(&p, eps, g).unwrap(), 1, guess)[0];
            let d = lowest(&assemble_d(&p, eps, g).unwrap(), 1, guess)[0];
            (b - d).abs()
        })
        .collect();
    assert!((diffs[1] / diffs[2]).log2() >= 1.9, "{diffs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn nonnegative_curvature_stays_above_threshold(
        amplitude in 0.0f64..1.0,
        width in 0.5f64..2.0,
        eps in 0.2f64..0.6,
    ) {
        let p = StripProfile::bent(bump(amplitude, width)).unwrap();
        let g = GridSpec::new(5.0, 61, 13).unwrap();
        let thr = (FRAC_PI_2 / eps).powi(2);
        let l = lowest(&assemble_b(&p, eps, g).unwrap(), 1, thr - 10.0)[0];
        prop_assert!(l >= thr - 1e-8 * thr, "{} < {}", l, thr);
    }

    #[test]
    fn certificates_are_backed_by_both_settings(amplitude in 0.3f64..1.5, width in 0.5f64..1.5) {
        let p = StripProfile::twisted(bump(amplitude, width)).unwrap();
        let d = detect_discrete_spectrum(&p, 0.3, &GridPolicy { half_length: 6.0, cells_s: 60, cells_t: Some(12) }, 1e-9).unwrap();
        prop_assert_eq!(d.settings.len(), 2);
        if d.certified {
            for s in &d.settings {
                prop_assert!(s.converged && s.lambda1 < d.threshold && s.count_below >= 1);
            }
        }
    }

    #[test]
    fn trial_gap_approaches_its_limit(amplitude in 0.2f64..1.5, width in 0.5f64..2.0) {
        let p = StripProfile::twisted(bump(amplitude, width)).unwrap();
        let limit = trial_gap_limit(&p, 0.1);
        let near = (trial_function_certificate(&p, 0.1, 1e3).unwrap().gap - limit).abs();
        let far = (trial_function_certificate(&p, 0.1, 1e4).unwrap().gap - limit).abs();
        prop_assert!(far <= 0.12 * near + 1e-12, "{} then {}", near, far);
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strip-spectra"))
}

#[test]
fn binary_runs_a_flat_spectrum_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flat.toml");
    std::fs::write(
        &cfg,
        "[[scenario]]\nid = \"flat\"\ntheorem = \"T1\"\nepsilon = [0.5]\n[scenario.grid]\nhalf_length = 4.0\ncells_s = 80\ncells_t = 16\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--no-svg")
        .status()
        .unwrap();
    assert!(st.success());
    assert!(out.join("flat.json").exists() && out.join("flat.csv").exists());
    assert!(!out.join("flat.svg").exists());
}

#[test]
fn binary_rejects_inadmissible_profiles_and_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bent.toml");
    std::fs::write(
        &cfg,
        "[[scenario]]\nid = \"bent\"\ntheorem = \"T5\"\nepsilon = [0.5]\ncurvature = { family = \"constant\", value = 2.5 }\n",
    )
    .unwrap();
    let v = bin()
        .arg("validate")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(v.status.code(), Some(1));
    let s = bin()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&s.stdout).contains("FAIL"));

    std::fs::write(
        &cfg,
        "[[scenario]]\nid = \"x\"\ntheorem = \"T1\"\nepsilon = [-0.1]\n",
    )
    .unwrap();
    let e = bin()
        .arg("spectrum")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(e.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&e.stderr);
    assert!(msg.contains("line 4") && msg.contains("epsilon"), "{msg}");
}

#[test]
fn binary_embeds_and_tabulates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("twist.toml");
    std::fs::write(
        &cfg,
        "[[scenario]]\nid = \"twist\"\ntheorem = \"T6\"\nepsilon = [0.2]\ntwist = { kind = \"angle\", rate = { family = \"constant\", value = 1.0 } }\n[scenario.grid]\nhalf_length = 2.0\n",
    )
    .unwrap();
    let st = bin()
        .arg("embed")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let xyz = std::fs::read_to_string(dir.path().join("twist.xyz")).unwrap();
    assert_eq!(xyz.lines().count(), 401 * 11);
    let st = bin()
        .arg("transverse")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    assert!(dir.path().join("twist.transverse.csv").exists());
}
