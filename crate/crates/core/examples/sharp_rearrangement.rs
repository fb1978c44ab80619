//! The sharp rearrangement moves the steep side of a quasi-concave function to
//! the left while keeping its distribution and gradient norms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thinspec::profile::increasing_rearrangement;
use thinspec::rearrange::{comparison_integral, random_quasi_concave, sharp};
use thinspec::Profile;

fn main() -> thinspec::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_quasi_concave(&mut rng, 64, false);
    let s = sharp(&w)?;
    println!("peak of w at {:.4}, peak of w# at {:.4}", w.max().0, s.max().0);
    for p in [1.0, 2.0, f64::INFINITY] {
        println!("L{p} norm: {:.12} vs {:.12}", w.lp_norm(p), s.lp_norm(p));
    }
    for p in [1.0, 2.0] {
        println!("gradient L{p} norm: {:.12} vs {:.12}", w.gradient_norm(p), s.gradient_norm(p));
    }
    let h = Profile::triangle(0.7);
    let star = increasing_rearrangement(&h);
    println!(
        "int w^2/h = {:.8} <= int (w#)^2/h* = {:.8}",
        comparison_integral(&w, &h),
        comparison_integral(&s, &star)
    );
    Ok(())
}
