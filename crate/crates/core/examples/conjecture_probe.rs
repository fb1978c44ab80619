//! Eigenvalue extremizers and the ratio mu1 * mass / sigma1 over random profiles.

use thinspec::experiments::{conjecture_probe, extremizer_study};

fn main() -> thinspec::Result<()> {
    let study = extremizer_study(50, 512)?;
    println!(
        "sigma1 in [{:.6}, {:.6}] (bounds {:.6}, {}), mu1 in [{:.6}, {:.6}] (bounds {:.6}, {:.6})",
        study.sigma_min, study.sigma_max, study.sigma_lower, study.sigma_upper, study.mu_min, study.mu_max, study.mu_lower, study.mu_upper
    );

    let probe = conjecture_probe(50, 512, 7)?;
    println!("ratio range [{:.6}, {:.6}] over {} samples", probe.min_ratio, probe.max_ratio, probe.rows.len());
    println!("largest near-triangle ratio {:.6}, smallest symmetric {:.6}", probe.max_near_triangle, probe.min_symmetric);
    Ok(())
}
