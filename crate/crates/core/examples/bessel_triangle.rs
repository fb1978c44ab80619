//! sigma1 of triangle profiles from the Bessel root against the finite-element solver.

use thinspec::bessel::{first_roots, sigma1_triangle};
use thinspec::experiments::triangle_scan;

fn main() -> thinspec::Result<()> {
    let r = first_roots();
    println!("j01 = {:.15}, j'01 = {:.15}", r.j01, r.j01_prime);
    println!("x0      bessel              solver              difference");
    for row in triangle_scan(11, 1024)? {
        println!(
            "{:<6} {:<19.15} {:<19.15} {:.1e}",
            row.x0,
            row.sigma_bessel,
            row.sigma_fem,
            (row.sigma_bessel - row.sigma_fem).abs()
        );
    }
    println!("minimum at the ends: {}", sigma1_triangle(0.0));
    Ok(())
}
