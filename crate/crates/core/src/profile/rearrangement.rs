//! Increasing rearrangement of a concave profile.

use super::{Profile, ProfileKind, DERIVED_CONCAVITY_TOL};

/// Knot count used when a curved profile has no closed-form rearrangement.
pub const REARRANGEMENT_KNOTS: usize = 512;

/// The nondecreasing function `h*` equimeasurable with `h`.
///
/// Exact for constants, triangles, the parabola and piecewise-linear data;
/// other curved profiles are first interpolated on [`REARRANGEMENT_KNOTS`]
/// uniform knots. Level sets use the right-continuous convention
/// `h*(s) = inf {t : |{h > t}| <= 1 - s}`.
pub fn increasing_rearrangement(h: &Profile) -> Profile {
    match h.kind() {
        ProfileKind::Constant { .. } => h.clone(),
        ProfileKind::Triangle { scale, .. } => Profile::scaled_triangle(1.0, *scale),
        ProfileKind::Parabola { scale } => {
            // |{6x(1-x) > t}| = sqrt(1 - 2t/3), so h*(s) = 3s - 3s²/2
            Profile::piecewise_quadratic(vec![[0.0, 0.0], [1.0, 1.5 * scale]], vec![3.0 * scale])
                .expect("closed form is concave")
        }
        ProfileKind::PiecewiseLinear { knots } => rearrange_knots(knots),
        ProfileKind::PiecewiseQuadratic { .. } => {
            let pl = h.to_piecewise_linear(REARRANGEMENT_KNOTS).expect("interpolant of a concave profile");
            match pl.kind() {
                ProfileKind::PiecewiseLinear { knots } => rearrange_knots(knots),
                _ => unreachable!(),
            }
        }
    }
}

fn rearrange_knots(knots: &[[f64; 2]]) -> Profile {
    let n = knots.len() - 1;
    let top = knots.iter().map(|k| k[1]).fold(f64::NEG_INFINITY, f64::max);
    // knots within round-off of the maximum belong to the top plateau
    let near_top = top - 1e-12 * top;
    let first_top = knots.iter().position(|k| k[1] >= near_top).unwrap();
    let last_top = knots.iter().rposition(|k| k[1] >= near_top).unwrap();

    // width of {h > t} for t below the maximum
    let width = |t: f64| {
        let a = if knots[0][1] > t {
            0.0
        } else {
            let k = (0..first_top).find(|&k| knots[k][1] <= t && t < knots[k + 1][1]).unwrap();
            let [x0, y0] = knots[k];
            let [x1, y1] = knots[k + 1];
            x0 + (t - y0) / (y1 - y0) * (x1 - x0)
        };
        let b = if knots[n][1] > t {
            1.0
        } else {
            let k = (last_top..n).find(|&k| knots[k][1] > t && t >= knots[k + 1][1]).unwrap();
            let [x0, y0] = knots[k];
            let [x1, y1] = knots[k + 1];
            x0 + (y0 - t) / (y0 - y1) * (x1 - x0)
        };
        b - a
    };

    let floor = knots[0][1].min(knots[n][1]);
    let mut levels: Vec<f64> = knots.iter().map(|k| k[1]).filter(|&y| y >= floor && y < near_top).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| *a - *b <= 1e-12 * top);

    let mut out: Vec<[f64; 2]> = Vec::with_capacity(levels.len() + 2);
    for &t in &levels {
        let s = (1.0 - width(t)).max(0.0);
        if out.last().map_or(true, |last| s > last[0]) {
            out.push([s, t]);
        }
    }
    let plateau = knots[last_top][0] - knots[first_top][0];
    let s_top = 1.0 - plateau;
    if out.is_empty() {
        out.push([0.0, top]);
    } else if s_top > out.last().unwrap()[0] {
        out.push([s_top, top]);
    } else {
        out.last_mut().unwrap()[1] = top;
    }
    out[0][0] = 0.0;
    if out.last().unwrap()[0] < 1.0 {
        out.push([1.0, top]);
    } else {
        out.last_mut().unwrap()[0] = 1.0;
    }
    Profile::from_kind(ProfileKind::PiecewiseLinear { knots: out }, DERIVED_CONCAVITY_TOL)
        .expect("rearrangement of a concave profile is concave")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangles_rearrange_to_t1() {
        for x0 in [0.0, 0.3, 0.5, 1.0] {
            let r = increasing_rearrangement(&Profile::triangle(x0));
            assert!(r.sup_distance(&Profile::triangle(1.0)) < 1e-15);
        }
        // same via knot data
        let t = Profile::piecewise_linear(vec![[0.0, 0.0], [0.25, 2.0], [1.0, 0.0]]).unwrap();
        assert!(increasing_rearrangement(&t).sup_distance(&Profile::triangle(1.0)) < 1e-15);
    }

    #[test]
    fn constant_is_fixed() {
        let c = Profile::constant(1.0).unwrap();
        assert_eq!(increasing_rearrangement(&c), c);
        let k = Profile::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(increasing_rearrangement(&k).sup_distance(&c) == 0.0);
    }

    #[test]
    fn tent_with_raised_ends_matches_level_sets() {
        let h = Profile::piecewise_linear(vec![[0.0, 0.5], [0.5, 1.5], [1.0, 0.5]]).unwrap();
        let r = increasing_rearrangement(&h);
        assert!((r.mass() - h.mass()).abs() < 1e-12);
        assert!((r.max().1 - 1.5).abs() < 1e-15);
        // brute-force distribution functions on 10^4 levels
        for i in 0..10_000 {
            let t = 0.5 + i as f64 * 1e-4;
            let count = |f: &Profile| (0..20_000).filter(|&j| f.eval((j as f64 + 0.5) / 20_000.0) > t).count();
            let (a, b) = (count(&h) as i64, count(&r) as i64);
            assert!((a - b).abs() <= 2, "level {t}: {a} vs {b}");
            if i % 97 != 0 {
                continue;
            }
        }
    }

    #[test]
    fn parabola_closed_form() {
        let r = increasing_rearrangement(&Profile::parabola());
        let sampled = increasing_rearrangement(&Profile::parabola().to_piecewise_linear(4096).unwrap());
        assert!(r.sup_distance(&sampled) < 1e-5);
        assert!((r.mass() - 1.0).abs() < 1e-15);
        assert!((r.max().1 - 1.5).abs() < 1e-15);
    }
}
