//! The Neumann-to-Steklov transform `G(h) = h² ∘ H⁻¹` and its inverse.
//!
//! With `α = ∫h`, `(dG/dz)(H(x)) = 2α h'(x)`, so `G` maps affine pieces to
//! affine pieces: piecewise-linear profiles are transformed exactly, knot by
//! knot. The inverse `k ↦ sqrt(k ∘ K⁻¹)`, with `K` the normalized primitive of
//! `1/sqrt(k)`, has the same property. Curved profiles are sampled at the
//! images of uniform knots, which clusters samples where `h` is small.

use crate::error::Result;
use crate::profile::{Piece, Profile, ProfileKind, DERIVED_CONCAVITY_TOL};
use crate::quadrature::{integrate, GAUSS8};
use crate::sl1d;

/// Default knot count for sampled transforms.
pub const DEFAULT_TRANSFORM_KNOTS: usize = 1024;

/// Panels per piece for `∫ 1/sqrt(k)` on curved pieces.
const INV_SQRT_PANELS: usize = 8;

/// `G(h)`. Closed forms for constants and triangles, exact knots for
/// piecewise-linear input, otherwise `m + 1` samples (at least 64).
pub fn gof(h: &Profile, m: usize) -> Result<Profile> {
    match h.kind() {
        ProfileKind::Constant { c } => Profile::constant(c * c),
        ProfileKind::Triangle { x0, scale } => Ok(Profile::scaled_triangle(*x0, 2.0 * scale * scale)),
        ProfileKind::PiecewiseLinear { knots } => {
            let big_h = h.integral_function();
            let out = knots.iter().map(|&[x, y]| [big_h.eval(x), y * y]).collect();
            from_knots(out)
        }
        _ => {
            let big_h = h.integral_function();
            let xs = sample_points(h, m);
            let out = xs.iter().map(|&x| [big_h.eval(x), h.eval(x).powi(2)]).collect();
            from_knots(out)
        }
    }
}

/// `G⁻¹(k) = sqrt(k ∘ K⁻¹)`.
pub fn gof_inverse(k: &Profile, m: usize) -> Result<Profile> {
    match k.kind() {
        ProfileKind::Constant { c } => Profile::constant(c.sqrt()),
        ProfileKind::Triangle { x0, scale } => Ok(Profile::scaled_triangle(*x0, (0.5 * scale).sqrt())),
        _ => {
            let xs = match k.kind() {
                ProfileKind::PiecewiseLinear { .. } => k.breakpoints(),
                _ => sample_points(k, m),
            };
            let big_k = inv_sqrt_primitive(k, &xs);
            let beta = *big_k.last().unwrap();
            let out = xs.iter().zip(&big_k).map(|(&x, &kk)| [kk / beta, k.eval(x).sqrt()]).collect();
            from_knots(out)
        }
    }
}

/// `β = ∫₀¹ 1/sqrt(k)`.
pub fn inv_sqrt_mass(k: &Profile) -> f64 {
    *inv_sqrt_primitive(k, &k.breakpoints()).last().unwrap()
}

/// Uniform knots merged with the profile breakpoints.
fn sample_points(h: &Profile, m: usize) -> Vec<f64> {
    let m = m.max(64);
    let mut xs: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    xs.extend(h.breakpoints());
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13);
    *xs.last_mut().unwrap() = 1.0;
    xs
}

fn from_knots(mut knots: Vec<[f64; 2]>) -> Result<Profile> {
    knots[0][0] = 0.0;
    knots.last_mut().unwrap()[0] = 1.0;
    knots.dedup_by(|a, b| a[0] <= b[0]);
    Profile::from_kind(ProfileKind::PiecewiseLinear { knots }, DERIVED_CONCAVITY_TOL)
}

/// `∫₀^{x_j} 1/sqrt(k)` at increasing points `xs` that include all breakpoints.
fn inv_sqrt_primitive(k: &Profile, xs: &[f64]) -> Vec<f64> {
    let pieces = k.pieces();
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let p = &pieces[pieces.partition_point(|p| p.x1 < mid).min(pieces.len() - 1)];
        acc += inv_sqrt_segment(p, a, b);
        out.push(acc);
    }
    out
}

/// `∫_a^b 1/sqrt(p)` for `[a, b]` inside one piece.
fn inv_sqrt_segment(p: &Piece, a: f64, b: f64) -> f64 {
    let (ka, kb) = (p.eval(a).max(0.0), p.eval(b).max(0.0));
    if p.is_affine() {
        // exact: 2 (b - a) / (sqrt(k(a)) + sqrt(k(b)))
        return 2.0 * (b - a) / (ka.sqrt() + kb.sqrt());
    }
    if ka == 0.0 && kb == 0.0 {
        let mid = 0.5 * (a + b);
        return inv_sqrt_segment(p, a, mid) + inv_sqrt_segment(p, mid, b);
    }
    // x = z + s τ² from the smaller end z removes the square-root singularity
    let (z, s) = if ka <= kb { (a, b - a) } else { (b, a - b) };
    let len = b - a;
    let mut acc = 0.0;
    for j in 0..INV_SQRT_PANELS {
        let t0 = j as f64 / INV_SQRT_PANELS as f64;
        let t1 = (j + 1) as f64 / INV_SQRT_PANELS as f64;
        acc += integrate(&GAUSS8, t0, t1, |tau| {
            let x = z + s * tau * tau;
            2.0 * len * tau / p.eval(x).sqrt()
        });
    }
    acc
}

/// `((∫h)² μ₁(h), σ₁(G(h)))`, both extrapolated on meshes up to `n`.
pub fn spectral_identity_check(h: &Profile, n: usize) -> Result<(f64, f64)> {
    let lhs = h.mass().powi(2) * sl1d::mu1(h, n)?.extrapolated;
    let rhs = sl1d::sigma1(&gof(h, DEFAULT_TRANSFORM_KNOTS)?, n)?.extrapolated;
    Ok((lhs, rhs))
}

/// `((∫ 1/sqrt(k))² σ₁(k), μ₁(G⁻¹(k)))`.
pub fn dual_identity_check(k: &Profile, n: usize) -> Result<(f64, f64)> {
    let lhs = inv_sqrt_mass(k).powi(2) * sl1d::sigma1(k, n)?.extrapolated;
    let rhs = sl1d::mu1(&gof_inverse(k, DEFAULT_TRANSFORM_KNOTS)?, n)?.extrapolated;
    Ok((lhs, rhs))
}

/// Outcome of the pointwise comparison of `G(h)` with `2h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointwiseBound {
    /// `max (G(h) - 2h)` over the grid; nonpositive up to round-off.
    pub sup_violation: f64,
    /// The point splitting `{H <= x}` from `{H >= x}`.
    pub x_bar: f64,
}

/// Grid size of the pointwise comparison.
pub const BOUND_GRID: usize = 2001;

/// Checks `G(h) <= 2h` on a 2001-point grid after normalizing `h` to `P₁`.
pub fn pointwise_bound(h: &Profile) -> Result<PointwiseBound> {
    let h = h.normalize()?;
    let big_h = h.integral_function();
    let mut sup = f64::NEG_INFINITY;
    for i in 0..BOUND_GRID {
        let x = i as f64 / (BOUND_GRID - 1) as f64;
        let g = h.eval(big_h.inverse(x)).powi(2);
        sup = sup.max(g - 2.0 * h.eval(x));
    }
    Ok(PointwiseBound { sup_violation: sup, x_bar: fixed_point(&h) })
}

/// The crossing point of `H(x) - x` (negative before, positive after).
fn fixed_point(h: &Profile) -> f64 {
    if let ProfileKind::Constant { .. } = h.kind() {
        return 0.5;
    }
    let big_h = h.integral_function();
    let f = |x: f64| big_h.eval(x) - x;
    let tol = 1e-14;
    let n = BOUND_GRID - 1;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let interior = 1..n;
    if interior.clone().all(|i| vals[i].abs() <= tol) {
        return 0.5;
    }
    if interior.clone().all(|i| vals[i] >= -tol) {
        return 0.0;
    }
    if interior.clone().all(|i| vals[i] <= tol) {
        return 1.0;
    }
    let j = interior.clone().find(|&i| vals[i] > tol && (1..i).any(|k| vals[k] < -tol)).unwrap();
    let i = (1..j).rev().find(|&k| vals[k] < -tol).unwrap();
    if let Some(z) = (i + 1..j).find(|&k| vals[k].abs() <= tol) {
        if j - i == 2 {
            return grid[z];
        }
    }
    let (mut a, mut b) = (grid[i], grid[j]);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `μ₁(h) ∫h / σ₁(h)` on the same mesh, extrapolated.
pub fn ratio(h: &Profile, n: usize) -> Result<f64> {
    let mu = sl1d::mu1(h, n)?.extrapolated;
    let sigma = sl1d::sigma1(h, n)?.extrapolated;
    Ok(mu * h.mass() / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let one = Profile::constant(1.0).unwrap();
        assert_eq!(gof(&one, 64).unwrap(), one);
        assert_eq!(gof_inverse(&one, 64).unwrap(), one);
        let g = gof(&Profile::triangle(0.0), 64).unwrap();
        assert_eq!(g.eval(0.0), 4.0);
        assert_eq!(g, Profile::scaled_triangle(0.0, 2.0));
        let back = gof_inverse(&g, 64).unwrap();
        assert!(back.sup_distance(&Profile::triangle(0.0)) < 1e-15);
        // knot route gives the same triangles
        let t = Profile::piecewise_linear(vec![[0.0, 0.0], [0.3, 2.0], [1.0, 0.0]]).unwrap();
        assert!(gof(&t, 64).unwrap().sup_distance(&Profile::scaled_triangle(0.3, 2.0)) < 1e-14);
        let t2 = Profile::piecewise_linear(vec![[0.0, 4.0], [1.0, 0.0]]).unwrap();
        assert!(gof_inverse(&t2, 64).unwrap().sup_distance(&Profile::triangle(0.0)) < 1e-14);
    }

    #[test]
    fn affine_profile_endpoints() {
        let h = Profile::piecewise_linear(vec![[0.0, 0.5], [1.0, 1.5]]).unwrap();
        let g = gof(&h, 64).unwrap();
        assert!((g.eval(0.0) - 0.25).abs() < 1e-15);
        assert!((g.eval(1.0) - 2.25).abs() < 1e-15);
        // G(h) is affine: slope 2 ∫h h' = 2
        assert!((g.eval(0.5) - 1.25).abs() < 1e-14);
    }

    #[test]
    fn parabola_round_trip() {
        let p = Profile::parabola();
        let g = gof(&p, DEFAULT_TRANSFORM_KNOTS).unwrap();
        let back = gof_inverse(&g, DEFAULT_TRANSFORM_KNOTS).unwrap();
        assert!(back.sup_distance(&p) < 1e-5);
        let k = gof_inverse(&p, DEFAULT_TRANSFORM_KNOTS).unwrap();
        let again = gof(&k, DEFAULT_TRANSFORM_KNOTS).unwrap();
        assert!(again.sup_distance(&p) < 1e-5);
        // β for the parabola: ∫ 1/sqrt(6x(1-x)) = π/sqrt(6)
        assert!((inv_sqrt_mass(&p) - std::f64::consts::PI / 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pointwise_bound_examples() {
        let b = pointwise_bound(&Profile::constant(1.0).unwrap()).unwrap();
        assert!(b.sup_violation <= -1.0 + 1e-15 && b.x_bar == 0.5);
        let b = pointwise_bound(&Profile::triangle(0.5)).unwrap();
        assert!(b.sup_violation.abs() < 1e-12);
        assert!((b.x_bar - 0.5).abs() < 1e-12);
        let b = pointwise_bound(&Profile::triangle(0.3)).unwrap();
        assert!((b.x_bar - 0.3).abs() < 1e-12);
        let p = Profile::parabola();
        let b = pointwise_bound(&p).unwrap();
        assert!(b.sup_violation <= 0.0);
        let mid = p.eval(p.integral_function().inverse(0.5)).powi(2);
        assert!((mid - 2.25).abs() < 1e-13);
        assert!((b.x_bar - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identities_on_named_profiles() {
        let (l, r) = spectral_identity_check(&Profile::constant(1.0).unwrap(), 1024).unwrap();
        assert!((l - r).abs() < 1e-9 && (l - std::f64::consts::PI.powi(2)).abs() < 1e-6);
        let (l, r) = spectral_identity_check(&Profile::triangle(0.0), 1024).unwrap();
        let jp2 = crate::bessel::mu1_triangle_endpoint();
        assert!((l - jp2).abs() < 1e-6 && (r - jp2).abs() < 1e-6);
        let (l, r) = spectral_identity_check(&Profile::parabola(), 2048).unwrap();
        assert!((l - r).abs() < 1e-3);
        let (l, r) = dual_identity_check(&Profile::parabola(), 2048).unwrap();
        assert!((l - r).abs() < 1e-3);
    }

    #[test]
    fn ratio_examples() {
        assert!((ratio(&Profile::constant(1.0).unwrap(), 1024).unwrap() - 1.0).abs() < 1e-12);
        for x0 in [0.0, 0.25, 0.5] {
            assert!((ratio(&Profile::triangle(x0), 1024).unwrap() - 2.0).abs() < 1e-3);
        }
        let r = ratio(&Profile::parabola(), 1024).unwrap();
        assert!(r > 1.0 && r < 2.0);
    }
}
