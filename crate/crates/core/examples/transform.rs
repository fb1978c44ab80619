//! The transform G relating the Neumann and Steklov problems, its pointwise
//! bound and the resulting eigenvalue ratio.

use thinspec::gtransform::{gof, gof_inverse, pointwise_bound, ratio, spectral_identity_check, DEFAULT_TRANSFORM_KNOTS};
use thinspec::Profile;

fn main() -> thinspec::Result<()> {
    let t = Profile::triangle(0.25);
    println!("G(T0.25) = {}", serde_json::to_string(&gof(&t, DEFAULT_TRANSFORM_KNOTS)?).unwrap());

    let p = Profile::parabola();
    let g = gof(&p, DEFAULT_TRANSFORM_KNOTS)?;
    let back = gof_inverse(&g, DEFAULT_TRANSFORM_KNOTS)?;
    println!("parabola round trip error {:.2e}", back.sup_distance(&p));

    let (lhs, rhs) = spectral_identity_check(&p, 1024)?;
    println!("(mass)^2 mu1(h) = {lhs:.10}, sigma1(G(h)) = {rhs:.10}");

    let b = pointwise_bound(&p)?;
    println!("max(G(h) - 2h) = {:.2e}, crossing point {:.6}", b.sup_violation, b.x_bar);

    for (name, h) in [("constant", Profile::constant(1.0)?), ("parabola", p), ("T0", Profile::triangle(0.0))] {
        println!("ratio({name}) = {:.10}", ratio(&h, 1024)?);
    }
    Ok(())
}
