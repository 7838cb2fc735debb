//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use strip_spectra::analysis::{GridPolicy, SweepReport};
use strip_spectra::assembly::{
    assemble_b, assemble_d, assemble_decoupled, discrete_dn_ground, tensor_factors, GridSpec,
};
use strip_spectra::cli::{parse_config_str, run, RunOptions, RunSummary, SHIPPED_ACCEPTANCE};
use strip_spectra::eigensolve::{
    dense_gap_norm, gap_norm, lowest_eigenpairs, lowest_eigenpairs_from_guess, ShiftedResolvent,
};
use strip_spectra::frame::{embed, first_fundamental_form, frame_for_profile};
use strip_spectra::profiles::{metric_f, ScalarFamily, StripProfile, Twist};
use strip_spectra::transverse::{dn_eigenvalues_1d, find_x0, r_function, solve_nu0};

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line {
        passed,
        detail: detail.into(),
    }
}

fn bump(amplitude: f64, width: f64) -> ScalarFamily {
    ScalarFamily::GaussianBump {
        amplitude,
        width,
        center: 0.0,
    }
}

fn report<'a>(summary: &'a RunSummary, id: &str) -> Option<(&'a SweepReport, f64)> {
    let o = summary.outcome(id)?;
    o.report.as_ref().map(|r| (r, o.seconds))
}

fn scenario_line(summary: &RunSummary, ids: &[&str], max_seconds: Option<f64>) -> Line {
    let mut passed = true;
    let mut parts = Vec::new();
    for id in ids {
        match summary.outcome(id) {
            Some(o) => {
                passed &= o.passed;
                if let Some(limit) = max_seconds {
                    passed &= o.seconds < limit;
                }
                parts.push(format!("{id}: {} ({:.1}s)", o.detail, o.seconds));
            }
            None => {
                passed = false;
                parts.push(format!("{id}: missing"));
            }
        }
    }
    line(passed, parts.join("; "))
}

fn flat_exactness() -> Line {
    let start = Instant::now();
    let exact = (PI / 0.2).powi(2) + (PI / 20.0).powi(2);
    let mut errors = Vec::new();
    for (cs, ct) in [(200, 10), (400, 20), (800, 40)] {
        let g = GridPolicy {
            half_length: 10.0,
            cells_s: cs,
            cells_t: Some(ct),
        }
        .grid_for(0.1)
        .unwrap();
        let pair = assemble_b(&StripProfile::flat(), 0.1, g).unwrap();
        let r = lowest_eigenpairs(&pair, 1, 1e-11, exact - 5.0).unwrap();
        errors.push((r.eigenvalues[0] - exact).abs());
    }
    let order = (errors[1] / errors[2]).log2();
    let secs = start.elapsed().as_secs_f64();
    let last = errors[2];
    line(
        (order - 2.0).abs() <= 0.1 && last < 5e-3 && secs < 30.0,
        format!("errors {errors:?}, observed order {order:.3}, error at 800x40 {last:.3e} (needs < 5e-3), {secs:.1}s"),
    )
}

fn transverse_spectrum() -> Line {
    let dn = dn_eigenvalues_1d(6);
    let dn_err = dn
        .iter()
        .enumerate()
        .map(|(j, v)| ((v - ((2 * j + 1) as f64 * FRAC_PI_2).powi(2)) / v).abs())
        .fold(0.0, f64::max);
    // fixed point mu = pi - atan(mu / alpha) on (pi/2, pi)
    let mut mu = 0.75 * PI;
    for _ in 0..500 {
        mu = PI - mu.atan();
    }
    let nu = solve_nu0(1.0).unwrap();
    let x0 = find_x0();
    // Newton on x^2 (2 - x) - pi^2 (1 - x)^2 (4 - 5x)
    let p = |x: f64| x * x * (2.0 - x) - PI * PI * (1.0 - x).powi(2) * (4.0 - 5.0 * x);
    let mut x = 0.68;
    for _ in 0..50 {
        let d = (p(x + 1e-7) - p(x - 1e-7)) / 2e-7;
        x -= p(x) / d;
    }
    let res = (r_function(x0).unwrap() - FRAC_PI_2.powi(2)).abs();
    line(
        dn_err < 1e-14 && (nu - 4.1158563).abs() < 1e-6 && (nu - mu * mu).abs() < 1e-10 && res < 1e-12 && (x0 - x).abs() < 1e-12 && (x0 - 0.6796).abs() < 1e-4,
        format!("dn rel err {dn_err:.1e}, nu0(1) = {nu:.9} (oracle {:.9}, |nu0(1) - 4.1158563| = {:.2e} needs <= 1e-6), x0 = {x0:.9} (oracle {x:.9}), |r(x0) - (pi/2)^2| = {res:.1e}", mu * mu, (nu - 4.1158563).abs()),
    )
}

fn discrete_certificate(summary: &RunSummary) -> Line {
    let mut l = scenario_line(summary, &["twisted-discrete"], Some(120.0));
    if let Some((r, _)) = report(summary, "twisted-discrete") {
        let d = r.details.as_ref().unwrap();
        let certified = d["spectra"][0]["certified"].as_bool() == Some(true);
        let settings = d["spectra"][0]["settings"].as_array().map_or(0, Vec::len);
        let n0 = d["trial_cutoffs"][0].as_u64();
        l.passed &= certified && settings == 2 && n0.is_some_and(|n| n <= 100);
    }
    l
}

fn resolvent_oracle() -> (bool, String) {
    let p = StripProfile::bent(bump(1.0, 1.0)).unwrap();
    let eps = 0.3;
    let g = GridSpec::new(3.0, 21, 9).unwrap();
    let d = assemble_d(&p, eps, g).unwrap();
    let h = assemble_decoupled(&p, eps, g).unwrap();
    let c = 1.0 - discrete_dn_ground(g.n_t) / (eps * eps);
    let sparse = gap_norm(
        &ShiftedResolvent::from_pair(&d, c).unwrap(),
        &ShiftedResolvent::from_pair(&h, c).unwrap(),
        &d.mass,
        1e-12,
    )
    .unwrap()
    .norm;
    let dense = dense_gap_norm(
        &d.stiffness.to_dense(),
        &h.stiffness.to_dense(),
        &d.mass.to_dense(),
        c,
    )
    .unwrap();
    let rel = (sparse - dense).abs() / dense;
    (
        rel < 5e-4,
        format!("coarse oracle: sparse {sparse:.6e} vs dense {dense:.6e} (rel {rel:.1e})"),
    )
}

fn resolvent_scaling(summary: &RunSummary) -> Line {
    let mut l = scenario_line(summary, &["bent-resolvent", "twisted-resolvent"], None);
    if let Some((r, _)) = report(summary, "bent-resolvent") {
        l.passed &= r.records.len() >= 4;
    }
    let (ok, detail) = resolvent_oracle();
    l.passed &= ok;
    l.detail = format!("{}; {detail}", l.detail);
    l
}

fn generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let l = b.clone().cholesky().unwrap().l().try_inverse().unwrap();
    let c = &l * a * l.transpose();
    let mut e: Vec<f64> = SymmetricEigen::new((&c + c.transpose()) * 0.5)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

fn structural() -> Line {
    // b and d forms at three refinements
    let p = StripProfile::new(bump(0.8, 1.0), Twist::Angle(bump(0.8, 1.0))).unwrap();
    let eps = 0.3;
    let thr = (FRAC_PI_2 / eps).powi(2);
    let mut diffs = Vec::new();
    for k in [1usize, 2, 4] {
        let g = GridSpec::new(4.0, 40 * k + 1, 8 * k + 1).unwrap();
        let b = assemble_b(&p, eps, g).unwrap();
        let d = assemble_d(&p, eps, g).unwrap();
        let lb =
            lowest_eigenpairs_from_guess(&b.stiffness, &b.mass, 1, 1e-12, thr - 10.0, 1.0).unwrap();
        let ld =
            lowest_eigenpairs_from_guess(&d.stiffness, &d.mass, 1, 1e-12, thr - 10.0, 1.0).unwrap();
        diffs.push((lb.eigenvalues[0] - ld.eigenvalues[0]).abs());
    }
    let bd_order = (diffs[1] / diffs[2]).log2();

    // decoupled spectrum against pairwise sums
    let g = GridSpec::new(4.0, 61, 11).unwrap();
    let bent = StripProfile::bent(bump(-1.0, 1.0)).unwrap();
    let e2 = 0.2;
    let pair = assemble_decoupled(&bent, e2, g).unwrap();
    let f = tensor_factors(g, &|s| bent.kappa(s) / e2);
    let es = generalized(&(&f.stiffness_s + &f.potential_s), &f.mass_s);
    let et = generalized(&f.stiffness_t, &f.mass_t);
    let mut sums: Vec<f64> = es
        .iter()
        .flat_map(|a| et.iter().map(move |b| a + b / (e2 * e2)))
        .collect();
    sums.sort_by(f64::total_cmp);
    let r = lowest_eigenpairs(&pair, 4, 1e-12, sums[0] - 5.0).unwrap();
    let kron = (0..4)
        .map(|j| (r.eigenvalues[j] - sums[j]).abs() / sums[j].abs())
        .fold(0.0, f64::max);

    // frame drift over |s| <= 10
    let track = frame_for_profile(&p, 2, (-10.0, 10.0), 1e-3).unwrap();
    let drift = track.max_drift;

    // first fundamental form against diag(f^2, eps^2)
    let g11 = |step: f64| {
        let track = frame_for_profile(&p, 2, (0.0, 2.0), step).unwrap();
        let emb = embed(&p, &track, eps, 5).unwrap();
        let i = (1.0 / track.step).round() as usize;
        let g = first_fundamental_form(&emb, i, 3).unwrap();
        let exact = metric_f(&p, eps, emb.s[i], emb.t[3]).powi(2);
        (g[0][0] - exact)
            .abs()
            .max(g[0][1].abs())
            .max((g[1][1] - eps * eps).abs())
    };
    let (a, b) = (g11(0.02), g11(0.01));
    let fff_order = (a / b).log2();

    line(
        bd_order >= 1.9 && kron < 1e-9 && drift <= 1e-8 && fff_order >= 1.9,
        format!(
            "b/d differences {diffs:?} order {bd_order:.3}; Kronecker rel err {kron:.1e}; frame drift {drift:.1e}; metric order {fff_order:.3}"
        ),
    )
}

fn read_outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if matches!(p.extension().and_then(|x| x.to_str()), Some("csv" | "json")) {
            out.insert(
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            );
        }
    }
    out
}

fn main() {
    let configs = parse_config_str(SHIPPED_ACCEPTANCE).expect("shipped acceptance config parses");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let opts = |dir: &Path| RunOptions {
        out: dir.to_path_buf(),
        ..Default::default()
    };
    let summary = run(&configs, &opts(first.path())).expect("first run");
    let repeat = run(&configs, &opts(second.path())).expect("second run");

    let (a, b) = (read_outputs(first.path()), read_outputs(second.path()));
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let determinism = line(
        !a.is_empty()
            && a.len() == b.len()
            && differing.is_empty()
            && summary.exit_code() == repeat.exit_code(),
        format!(
            "{} CSV/JSON files compared, differing {differing:?}",
            a.len()
        ),
    );

    let lines = [
        ("flat-strip exactness", flat_exactness()),
        ("transverse spectrum", transverse_spectrum()),
        (
            "discrete spectrum from twisting",
            discrete_certificate(&summary),
        ),
        (
            "cross-section positivity and Hardy constants",
            scenario_line(&summary, &["bent-hardy", "bent-twisted-hardy"], None),
        ),
        (
            "bent thin-strip asymptotics",
            scenario_line(&summary, &["bent-thin"], Some(600.0)),
        ),
        (
            "twisted thin-strip asymptotics",
            scenario_line(&summary, &["twisted-thin"], None),
        ),
        ("resolvent scaling", resolvent_scaling(&summary)),
        (
            "scaled-strip asymptotics",
            scenario_line(&summary, &["scaled-strip"], None),
        ),
        (
            "appendix suite",
            scenario_line(&summary, &["robin-comparison", "coupling-limit"], None),
        ),
        ("structural invariants", structural()),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, l)) in lines.iter().enumerate() {
        println!(
            "[{}] {:>2} {name}: {}",
            if l.passed { "PASS" } else { "FAIL" },
            i + 1,
            l.detail
        );
        failed += usize::from(!l.passed);
    }
    println!(
        "{} of {} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
