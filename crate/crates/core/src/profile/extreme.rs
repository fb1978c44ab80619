//! Extreme points of `P₁` (the triangles) and explicit splitting of the rest.

use super::{Piece, Profile, DERIVED_CONCAVITY_TOL};
use crate::error::{Error, Result};

/// Whether `h ∈ P₁` coincides with a triangle `T_{x0}` within `tol` in sup norm.
pub fn is_extreme_point(h: &Profile, tol: f64) -> Result<bool> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized(h.mass()));
    }
    let (x0, top) = h.max();
    if top < 2.0 - tol {
        return Ok(false);
    }
    Ok(h.sup_distance(&Profile::triangle(x0.clamp(0.0, 1.0))) <= tol)
}

/// A convex splitting `h = (1 - t) h0 + t h1` with `h0 ≠ h1` in `P₁`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub h0: Profile,
    pub h1: Profile,
    pub t: f64,
}

/// Splits a non-extreme `h ∈ P₁` into two distinct members of `P₁`.
///
/// A positive endpoint value lets a triangle be peeled off: with `h(0) > 0`
/// the largest admissible multiple `s = h(0)/2` of `T₀` is removed, likewise
/// `T₁` when `h(1) > 0`. Otherwise `h` vanishes at both ends and the measure
/// `-h''` (slope drops at kinks plus curvature density) is split at its median.
pub fn decompose_non_extreme(h: &Profile) -> Result<Decomposition> {
    if is_extreme_point(h, 1e-9)? {
        return Err(Error::IsExtreme);
    }
    let left = h.eval(0.0);
    let right = h.eval(1.0);
    if left > 0.0 || right > 0.0 {
        let (s, apex) = if left > 0.0 { (0.5 * left, 0.0) } else { (0.5 * right, 1.0) };
        let tri = Profile::triangle(apex);
        let rest = Profile::combine(&[(1.0 / (1.0 - s), h), (-s / (1.0 - s), &tri)])?;
        return Ok(Decomposition { h0: rest, h1: tri, t: s });
    }
    split_curvature(h)
}

fn split_curvature(h: &Profile) -> Result<Decomposition> {
    let mut pieces: Vec<Piece> = h.pieces().to_vec();
    let drops = |ps: &[Piece]| -> Vec<f64> {
        let mut d = vec![0.0; ps.len() + 1];
        for k in 1..ps.len() {
            d[k] = (ps[k - 1].slope_at(ps[k - 1].len()) - ps[k].slope_at(0.0)).max(0.0);
        }
        d
    };
    let d = drops(&pieces);
    let total: f64 = d.iter().sum::<f64>() + pieces.iter().map(|p| p.kappa * p.len()).sum::<f64>();
    let half = 0.5 * total;

    // Walk the measure left to right; `split` is the knot index separating the
    // two halves and `atom_left` says whether an atom sitting there goes left.
    let mut acc = 0.0;
    let mut split = None;
    let mut atom_left = false;
    for k in 0..pieces.len() {
        if k > 0 && d[k] > 0.0 {
            if acc + d[k] >= half {
                atom_left = acc == 0.0;
                split = Some(k);
                break;
            }
            acc += d[k];
        }
        let p = pieces[k];
        let mass = p.kappa * p.len();
        if mass > 0.0 && acc + mass >= half {
            let u = ((half - acc) / p.kappa).clamp(0.0, p.len());
            let xm = p.x0 + u;
            if xm <= p.x0 {
                split = Some(k);
            } else if xm >= p.x1 {
                split = Some(k + 1);
                atom_left = true;
            } else {
                let ym = p.at(u);
                pieces[k] = Piece { x0: p.x0, x1: xm, y0: p.y0, y1: ym, kappa: p.kappa };
                pieces.insert(k + 1, Piece { x0: xm, x1: p.x1, y0: ym, y1: p.y1, kappa: p.kappa });
                split = Some(k + 1);
            }
            break;
        }
        acc += mass;
    }
    let split = split.ok_or(Error::IsExtreme)?;
    let d = drops(&pieces);

    // q'' = -(left half of the measure), q(0) = q'(0) = 0; then h1 = q - x q(1)
    let n = pieces.len();
    let mut q = vec![0.0; n + 1];
    let mut kappa1 = vec![0.0; n];
    let mut qs = 0.0;
    for k in 0..n {
        let p = &pieces[k];
        let l = p.len();
        if k < split {
            kappa1[k] = p.kappa;
        }
        q[k + 1] = q[k] + qs * l - 0.5 * kappa1[k] * l * l;
        qs -= kappa1[k] * l;
        let j = k + 1;
        if j < n && (j < split || (j == split && atom_left)) {
            qs -= d[j];
        }
    }
    let xs: Vec<f64> = std::iter::once(pieces[0].x0).chain(pieces.iter().map(|p| p.x1)).collect();
    let ys: Vec<f64> = std::iter::once(pieces[0].y0).chain(pieces.iter().map(|p| p.y1)).collect();
    let top = ys.iter().fold(0.0_f64, |a, &b| a.max(b)) + total;
    let clean = |v: f64| if v < 0.0 && v > -1e-12 * top { 0.0 } else { v };
    let a: Vec<f64> = (0..=n).map(|k| clean(q[k] - xs[k] * q[n])).collect();
    let b: Vec<f64> = (0..=n).map(|k| clean(ys[k] - a[k])).collect();
    let build = |vals: &[f64], curv: &dyn Fn(usize) -> f64| -> Result<Profile> {
        let ps: Vec<Piece> = (0..n)
            .map(|k| Piece { x0: xs[k], x1: xs[k + 1], y0: vals[k], y1: vals[k + 1], kappa: curv(k) })
            .collect();
        Profile::from_pieces(&ps, DERIVED_CONCAVITY_TOL)
    };
    let first = build(&a, &|k| kappa1[k])?;
    let second = build(&b, &|k| pieces[k].kappa - kappa1[k])?;
    let t = second.mass() / (first.mass() + second.mass());
    Ok(Decomposition { h0: first.normalize()?, h1: second.normalize()?, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recombination_error(h: &Profile, d: &Decomposition) -> f64 {
        let mix = Profile::blend(&d.h0, &d.h1, d.t).unwrap();
        h.sup_distance(&mix)
    }

    #[test]
    fn extreme_point_examples() {
        assert!(is_extreme_point(&Profile::triangle(0.3), 1e-12).unwrap());
        assert!(is_extreme_point(&Profile::triangle(0.0), 1e-12).unwrap());
        assert!(!is_extreme_point(&Profile::parabola(), 1e-9).unwrap());
        assert!(!is_extreme_point(&Profile::constant(1.0).unwrap(), 1e-9).unwrap());
        assert_eq!(
            is_extreme_point(&Profile::constant(2.0).unwrap(), 1e-9).unwrap_err(),
            Error::NotNormalized(2.0)
        );
    }

    #[test]
    fn constant_splits_into_end_triangles() {
        for h in [
            Profile::constant(1.0).unwrap(),
            Profile::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap(),
        ] {
            let d = decompose_non_extreme(&h).unwrap();
            assert_eq!(d.t, 0.5);
            assert!(d.h1.sup_distance(&Profile::triangle(0.0)) < 1e-15);
            assert!(d.h0.sup_distance(&Profile::triangle(1.0)) < 1e-15);
            assert!(recombination_error(&h, &d) < 1e-15);
        }
    }

    #[test]
    fn plateau_splits_at_its_kinks() {
        let h = Profile::piecewise_linear(vec![[0.0, 0.0], [1.0 / 3.0, 1.5], [2.0 / 3.0, 1.5], [1.0, 0.0]]).unwrap();
        let d = decompose_non_extreme(&h).unwrap();
        assert!(recombination_error(&h, &d) < 1e-12);
        // each part has a single kink: a triangle
        assert!(d.h0.sup_distance(&Profile::triangle(1.0 / 3.0)) < 1e-12);
        assert!(d.h1.sup_distance(&Profile::triangle(2.0 / 3.0)) < 1e-12);
        assert!((d.t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parabola_splits_its_curvature() {
        let h = Profile::parabola();
        let d = decompose_non_extreme(&h).unwrap();
        assert!(d.t > 0.0 && d.t < 1.0);
        assert!(d.h0.sup_distance(&d.h1) > 0.1);
        assert!(recombination_error(&h, &d) < 1e-12);
        assert!(d.h0.is_normalized() && d.h1.is_normalized());
    }

    #[test]
    fn triangles_are_rejected() {
        assert_eq!(decompose_non_extreme(&Profile::triangle(0.4)).unwrap_err(), Error::IsExtreme);
    }
}
