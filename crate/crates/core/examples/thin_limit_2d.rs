//! Planar Neumann and Steklov eigenvalues of thin domains approaching their
//! one-dimensional limits.

use thinspec::fem2d::{limit_check, mesh, ThinDomain};
use thinspec::Profile;

fn main() -> thinspec::Result<()> {
    let m = mesh(&ThinDomain::symmetric(&Profile::triangle(0.0), 0.1)?, 32, 4)?;
    println!("T0 mesh: {} vertices, {} triangles, area {:.6}", m.vertices.len(), m.triangles.len(), m.area());

    for (name, h) in [("constant", Profile::constant(1.0)?), ("parabola", Profile::parabola())] {
        println!("{name}");
        println!("  eps     mu_2d          mu_gap     2 sigma_2d/eps  sigma_gap");
        for r in limit_check(&h, &[0.2, 0.1, 0.05], 128, 4)? {
            println!(
                "  {:<6}  {:<13.8}  {:<9.2e}  {:<14.8}  {:.2e}",
                r.epsilon,
                r.mu_2d,
                r.mu_gap,
                2.0 * r.sigma_2d / r.epsilon,
                r.sigma_gap
            );
        }
    }
    Ok(())
}
