//! First nonzero eigenvalues of the weighted Neumann, Steklov and Hardy
//! problems on a few closed-form profiles.

use thinspec::sl1d::{mu1, sigma1, sigma1_hardy, DEFAULT_N};
use thinspec::Profile;

fn main() -> thinspec::Result<()> {
    let profiles = [
        ("constant", Profile::constant(1.0)?),
        ("T0", Profile::triangle(0.0)),
        ("T0.5", Profile::triangle(0.5)),
        ("parabola", Profile::parabola()),
    ];
    println!("{:<10} {:>20} {:>20} {:>20}", "profile", "mu1", "sigma1", "sigma1 (hardy)");
    for (name, h) in &profiles {
        let m = mu1(h, DEFAULT_N)?;
        let s = sigma1(h, DEFAULT_N)?;
        let w = sigma1_hardy(h, DEFAULT_N)?;
        println!("{name:<10} {:>20.12} {:>20.12} {:>20.12}", m.extrapolated, s.extrapolated, w.extrapolated);
    }
    let r = sigma1(&Profile::triangle(0.0), 256)?;
    println!("T0 on 256 elements: finest {} extrapolated {} (estimate {:.1e})", r.value, r.extrapolated, r.error);
    Ok(())
}
