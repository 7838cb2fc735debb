//! Parses a scenario configuration and runs it into a temporary directory.

use strip_spectra::cli::{parse_config_str, run, RunOptions};

const CONFIG: &str = r#"
[[scenario]]
id = "flat"
theorem = "T1"
epsilon = [0.2, 0.1]

[[scenario]]
id = "robin"
theorem = "LA1"
instances = 10
"#;

fn main() -> strip_spectra::Result<()> {
    let configs = parse_config_str(CONFIG)?;
    let out = std::env::temp_dir().join("strip-spectra-example");
    let summary = run(
        &configs,
        &RunOptions {
            out: out.clone(),
            ..Default::default()
        },
    )?;
    for o in &summary.outcomes {
        println!(
            "{} {} {}: {}",
            if o.passed { "pass" } else { "FAIL" },
            o.id,
            o.theorem,
            o.detail
        );
    }
    println!("reports in {}", out.display());
    std::process::exit(summary.exit_code());
}
