//! Robin comparison instances and the large-coupling limit of `-d^2 + mu V`.

use strip_spectra::analysis::{kriz_instances, limit_ratio_check};

fn main() -> strip_spectra::Result<()> {
    for i in kriz_instances(5, 7, 256)? {
        println!(
            "alpha {:.3} <= {:.3}: E1 {:.5} <= {:.5}, bound {:.5}",
            i.alpha1, i.alpha2, i.e1, i.e2, i.bound
        );
    }
    let c = limit_ratio_check(&|s| -(-s * s).exp(), -1.0, &[1e2, 1e3, 1e4], 6.0, 6000)?;
    for (mu, r) in c.mu.iter().zip(&c.ratio) {
        println!("mu = {mu:>8}: lambda_1 / mu = {r:.6}");
    }
    println!("monotone approach: {}", c.monotone);
    Ok(())
}
