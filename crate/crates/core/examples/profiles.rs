//! Building profiles, reading and writing them as JSON, and splitting a
//! non-extreme profile into two others.

use thinspec::profile::{decompose_non_extreme, increasing_rearrangement, is_extreme_point, CONCAVITY_TOL};
use thinspec::Profile;

fn main() -> thinspec::Result<()> {
    let trapezoid = Profile::piecewise_linear(vec![[0.0, 0.0], [0.25, 4.0 / 3.0], [0.75, 4.0 / 3.0], [1.0, 0.0]])?;
    println!("mass {} max {:?}", trapezoid.mass(), trapezoid.max());
    println!("{}", serde_json::to_string(&trapezoid).unwrap());

    let parsed: Profile = serde_json::from_str(r#"{"kind":"triangle","x0":0.3}"#).unwrap();
    println!("T(0.3) at 0.3 = {}", parsed.eval(0.3));

    for (name, h) in [("trapezoid", &trapezoid), ("triangle", &parsed)] {
        println!("{name}: extreme = {}", is_extreme_point(h, CONCAVITY_TOL)?);
    }
    let d = decompose_non_extreme(&trapezoid)?;
    println!("trapezoid = {:.3} * {:?} + {:.3} * {:?}", 1.0 - d.t, d.h0.kind(), d.t, d.h1.kind());

    let up = increasing_rearrangement(&Profile::parabola());
    println!("increasing rearrangement of the parabola: {}", serde_json::to_string(&up).unwrap());
    Ok(())
}
