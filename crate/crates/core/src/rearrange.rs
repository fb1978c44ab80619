//! The `♯`-rearrangement of quasi-concave functions vanishing at both ends.
//!
//! For every level `t` the super-level set `{w > t}` is an interval around the
//! maximum. Its left and right parts shrink at rates `1/|w'|` read off the two
//! branches. `w♯` keeps the same level-set lengths but, level by level, gives
//! the steeper of the two slopes to the left branch, so the mass of `w♯'`
//! concentrates to the left of the new maximum.
//!
//! Functions are piecewise linear, so both branches have constant slope
//! between consecutive node values and the construction is exact.

use rand::Rng;

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quadrature::{affine_ratio_integral, integrate, GAUSS8};

/// A continuous piecewise-linear function on `[0, 1]` given by nodal values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    values: Vec<f64>,
    quasi_concave: bool,
}

/// Builds a function on the uniform grid with `values.len()` nodes.
///
/// End values within `1e-12` of the maximum magnitude are snapped to zero.
pub fn make_sampled(values: Vec<f64>, enforce: bool) -> Result<SampledFunction> {
    let m = values.len().saturating_sub(1);
    if m == 0 {
        return Err(Error::InvalidInput("at least two samples required".into()));
    }
    let xs = (0..=m).map(|i| i as f64 / m as f64).collect();
    SampledFunction::from_nodes(xs, values, enforce)
}

impl SampledFunction {
    /// Builds a function on arbitrary increasing nodes spanning `[0, 1]`.
    pub fn from_nodes(xs: Vec<f64>, mut values: Vec<f64>, enforce: bool) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::InvalidInput("nodes and values must have equal length >= 2".into()));
        }
        if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::UnsortedKnots);
        }
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let last = values.len() - 1;
        for i in [0, last] {
            if values[i].abs() <= 1e-12 * scale {
                values[i] = 0.0;
            } else {
                return Err(Error::BoundaryNotZero);
            }
        }
        let violation = quasi_concavity_violation(&values);
        if enforce {
            if let Some(i) = violation {
                return Err(Error::NotQuasiConcave(i));
            }
        }
        Ok(Self { xs, values, quasi_concave: violation.is_none() })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_quasi_concave(&self) -> bool {
        self.quasi_concave
    }

    /// `(x_M, w_M)`, with `x_M` the first maximizing node.
    pub fn max(&self) -> (f64, f64) {
        let i = self.argmax();
        (self.xs[i], self.values[i])
    }

    fn argmax(&self) -> usize {
        let top = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.values.iter().position(|&v| v == top).unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let k = self.xs.partition_point(|&v| v <= x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `x ↦ w(1 - x)`.
    pub fn reflect(&self) -> Self {
        Self {
            xs: self.xs.iter().rev().map(|x| 1.0 - x).collect(),
            values: self.values.iter().rev().copied().collect(),
            quasi_concave: self.quasi_concave,
        }
    }

    /// `‖w‖_p` for `p ∈ {1, 2, ∞}` (`p = f64::INFINITY`), exact for piecewise-linear `w`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        }
        let mut acc = 0.0;
        for k in 1..self.xs.len() {
            let dx = self.xs[k] - self.xs[k - 1];
            let (a, b) = (self.values[k - 1], self.values[k]);
            acc += if p == 1.0 {
                segment_abs_integral(a, b) * dx
            } else if p == 2.0 {
                dx * (a * a + a * b + b * b) / 3.0
            } else {
                integrate(&GAUSS8, 0.0, 1.0, |t| (a + (b - a) * t).abs().powf(p)) * dx
            };
        }
        if p == 1.0 {
            acc
        } else {
            acc.powf(1.0 / p)
        }
    }

    /// `‖w'‖_p` for finite `p >= 1`.
    pub fn gradient_norm(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.xs.len() {
            let dx = self.xs[k] - self.xs[k - 1];
            let dw = (self.values[k] - self.values[k - 1]).abs();
            acc += dw.powf(p) / dx.powf(p - 1.0);
        }
        acc.powf(1.0 / p)
    }

    /// `|{w > t}|`.
    pub fn level_measure(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.xs.len() {
            let dx = self.xs[k] - self.xs[k - 1];
            let (a, b) = (self.values[k - 1], self.values[k]);
            acc += if a > t && b > t {
                dx
            } else if a > t {
                dx * (a - t) / (a - b)
            } else if b > t {
                dx * (b - t) / (b - a)
            } else {
                0.0
            };
        }
        acc
    }

    /// `∫ w'² / ∫ w²/h`, the Hardy quotient of `w` for the weight `h`.
    pub fn hardy_quotient(&self, h: &Profile) -> f64 {
        self.gradient_norm(2.0).powi(2) / comparison_integral(self, h)
    }
}

fn segment_abs_integral(a: f64, b: f64) -> f64 {
    if (a >= 0.0) == (b >= 0.0) {
        0.5 * (a + b).abs()
    } else {
        0.5 * (a * a + b * b) / (a.abs() + b.abs())
    }
}

/// Index of the first node breaking "nondecreasing then nonincreasing".
fn quasi_concavity_violation(values: &[f64]) -> Option<usize> {
    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tol = 1e-14 * scale;
    let mut descending = false;
    for k in 1..values.len() {
        let d = values[k] - values[k - 1];
        if d < -tol {
            descending = true;
        } else if d > tol && descending {
            return Some(k);
        }
    }
    None
}

/// The distribution functions of `w` and their rearranged versions, tabulated
/// at every level where a branch changes slope.
#[derive(Clone, Debug)]
pub struct DistributionPair {
    /// Increasing levels from `0` to `w_M`.
    pub levels: Vec<f64>,
    /// `η₁(t) = |{w > t} ∩ (0, x_M)|`.
    pub eta1: Vec<f64>,
    /// `η₂(t) = |{w > t} ∩ (x_M, 1)|`, measured from the right end of a peak plateau.
    pub eta2: Vec<f64>,
    pub eta_star1: Vec<f64>,
    pub eta_star2: Vec<f64>,
    /// `(|w'(x_t)|, |w'(y_t)|)` on each band between consecutive levels.
    pub band_slopes: Vec<(f64, f64)>,
    /// Width of the plateau at the maximum (zero when the maximum is a point).
    pub plateau: f64,
    /// Position of the maximum of `w♯` (left end of its plateau).
    pub x_star: f64,
}

/// Tabulates the distribution functions of a quasi-concave `w`.
pub fn distribution(w: &SampledFunction) -> Result<DistributionPair> {
    let v = &w.values;
    let xs = &w.xs;
    let n = v.len() - 1;
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let il = v.iter().position(|&y| y == top).unwrap();
    let ir = v.iter().rposition(|&y| y == top).unwrap();
    if let Some(i) = quasi_concavity_violation(v) {
        return Err(Error::NotQuasiConcave(i));
    }
    // branches must be strictly monotone away from the peak plateau
    for k in 1..=il {
        if !(v[k] > v[k - 1]) {
            return Err(Error::NotQuasiConcave(k));
        }
    }
    for k in ir + 1..=n {
        if !(v[k] < v[k - 1]) {
            return Err(Error::NotQuasiConcave(k));
        }
    }
    if (il..ir).any(|k| v[k] != top) {
        return Err(Error::NotQuasiConcave(il));
    }
    if !(top > 0.0) {
        return Ok(DistributionPair {
            levels: vec![0.0],
            eta1: vec![0.0],
            eta2: vec![0.0],
            eta_star1: vec![0.0],
            eta_star2: vec![0.0],
            band_slopes: vec![],
            plateau: 1.0,
            x_star: 0.0,
        });
    }

    let mut levels: Vec<f64> = v.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    // walk both branches upward in lockstep with the sorted levels
    let xl = xs[il];
    let xr = xs[ir];
    let mut eta1 = Vec::with_capacity(levels.len());
    let mut eta2 = Vec::with_capacity(levels.len());
    let (mut a, mut b) = (0usize, n);
    for &t in &levels {
        while a < il && v[a + 1] <= t {
            a += 1;
        }
        while b > ir && v[b - 1] <= t {
            b -= 1;
        }
        let left = if a >= il {
            xl
        } else {
            xs[a] + (t - v[a]) / (v[a + 1] - v[a]) * (xs[a + 1] - xs[a])
        };
        let right = if b <= ir {
            xr
        } else {
            xs[b] - (t - v[b]) / (v[b - 1] - v[b]) * (xs[b] - xs[b - 1])
        };
        eta1.push(xl - left);
        eta2.push(right - xr);
    }

    let k = levels.len();
    let mut band_slopes = Vec::with_capacity(k - 1);
    let mut eta_star1 = vec![0.0; k];
    let mut eta_star2 = vec![0.0; k];
    for j in (0..k - 1).rev() {
        let dt = levels[j + 1] - levels[j];
        let d1 = eta1[j] - eta1[j + 1];
        let d2 = eta2[j] - eta2[j + 1];
        let s1 = dt / d1;
        let s2 = dt / d2;
        band_slopes.push((s1, s2));
        // steeper slope (shorter lateral run) goes to the left
        let (short, long) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        eta_star1[j] = eta_star1[j + 1] + short;
        eta_star2[j] = eta_star2[j + 1] + long;
    }
    band_slopes.reverse();
    Ok(DistributionPair {
        x_star: eta_star1[0],
        levels,
        eta1,
        eta2,
        eta_star1,
        eta_star2,
        band_slopes,
        plateau: xr - xl,
    })
}

/// The `♯`-rearrangement `w♯`.
///
/// Output nodes sit where `w♯` crosses the node levels of `w`, so the result
/// lives on a nonuniform grid. A plateau at the maximum of `w` is kept with
/// its width, directly to the right of the new maximum point.
pub fn sharp(w: &SampledFunction) -> Result<SampledFunction> {
    let d = distribution(w)?;
    let k = d.levels.len();
    let mut xs = Vec::with_capacity(2 * k + 1);
    let mut values = Vec::with_capacity(2 * k + 1);
    for j in 0..k {
        xs.push(d.x_star - d.eta_star1[j]);
        values.push(d.levels[j]);
    }
    let right_start = d.x_star + d.plateau;
    if d.plateau > 0.0 {
        xs.push(right_start);
        values.push(d.levels[k - 1]);
    }
    for j in (0..k - 1).rev() {
        xs.push(right_start + d.eta_star2[j]);
        values.push(d.levels[j]);
    }
    xs[0] = 0.0;
    *xs.last_mut().unwrap() = 1.0;
    // coincident nodes can only come from round-off in the accumulated runs
    let mut keep_x = vec![xs[0]];
    let mut keep_v = vec![values[0]];
    for i in 1..xs.len() {
        if xs[i] > *keep_x.last().unwrap() {
            keep_x.push(xs[i]);
            keep_v.push(values[i]);
        } else if i == xs.len() - 1 {
            *keep_v.last_mut().unwrap() = values[i];
            *keep_x.last_mut().unwrap() = 1.0;
        }
    }
    SampledFunction::from_nodes(keep_x, keep_v, true)
}

/// `∫₀¹ w² / h`, exact on affine pieces of `h`, 8-point Gauss on curved pieces.
///
/// Subintervals are cut at the nodes of `w` and the breakpoints of `h`; where
/// `h` vanishes at an end, a `w` vanishing there too keeps the integral finite.
pub fn comparison_integral(w: &SampledFunction, h: &Profile) -> f64 {
    let mut cuts: Vec<f64> = w.xs.clone();
    cuts.extend(h.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let pieces = h.pieces();
    let mut acc = 0.0;
    for s in cuts.windows(2) {
        let (c, e) = (s[0], s[1]);
        if !(e > c) {
            continue;
        }
        let (wc, we) = (w.eval(c), w.eval(e));
        if wc == 0.0 && we == 0.0 {
            continue;
        }
        let mid = 0.5 * (c + e);
        let k = pieces.partition_point(|p| p.x1 < mid).min(pieces.len() - 1);
        let piece = &pieces[k];
        acc += if piece.is_affine() {
            affine_ratio_integral(wc, we, piece.eval(c).max(0.0), piece.eval(e).max(0.0)) * (e - c)
        } else {
            integrate(&GAUSS8, c, e, |x| {
                let wx = wc + (we - wc) * (x - c) / (e - c);
                wx * wx / piece.eval(x)
            })
        };
    }
    acc
}

/// A random quasi-concave function on `m + 1` uniform nodes.
///
/// Slopes left of a random peak are sorted decreasing and positive, slopes
/// to its right sorted decreasing and negative and rescaled so that `w(1) = 0`.
/// With `squared` the values are squared, giving a quasi-concave function that
/// is no longer concave.
pub fn random_quasi_concave<R: Rng>(rng: &mut R, m: usize, squared: bool) -> SampledFunction {
    let peak = rng.random_range(m / 8..=7 * m / 8).max(1).min(m - 1);
    let mut left: Vec<f64> = (0..peak).map(|_| rng.random_range(0.05..4.0)).collect();
    left.sort_by(|a, b| b.total_cmp(a));
    let mut right: Vec<f64> = (peak..m).map(|_| -rng.random_range(0.05..4.0)).collect();
    right.sort_by(|a, b| b.total_cmp(a));
    let dx = 1.0 / m as f64;
    let mut values = vec![0.0; m + 1];
    for i in 0..peak {
        values[i + 1] = values[i] + left[i] * dx;
    }
    let top = values[peak];
    let fall: f64 = right.iter().map(|s| -s * dx).sum();
    for i in peak..m {
        values[i + 1] = values[i] + right[i - peak] * dx * top / fall;
    }
    values[m] = 0.0;
    if squared {
        values.iter_mut().for_each(|v| *v *= *v);
    }
    make_sampled(values, true).expect("generator output is quasi-concave")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tent(peak: f64, m: usize) -> SampledFunction {
        let values = (0..=m)
            .map(|i| {
                let x = i as f64 / m as f64;
                (x / peak).min((1.0 - x) / (1.0 - peak))
            })
            .collect();
        make_sampled(values, true).unwrap()
    }

    #[test]
    fn validation_examples() {
        let m = 64;
        let t: Vec<f64> = (0..=m).map(|i| (4.0 * i as f64 / m as f64).min(4.0 / 3.0 * (1.0 - i as f64 / m as f64))).collect();
        assert!(make_sampled(t, true).is_ok());
        let s: Vec<f64> = (0..=m).map(|i| (std::f64::consts::PI * i as f64 / m as f64).sin()).collect();
        assert!(make_sampled(s, true).is_ok());
        let two_humps: Vec<f64> = (0..=m)
            .map(|i| (4.0 * std::f64::consts::PI * i as f64 / m as f64).sin().abs())
            .collect();
        assert!(matches!(make_sampled(two_humps.clone(), true), Err(Error::NotQuasiConcave(_))));
        assert!(!make_sampled(two_humps, false).unwrap().is_quasi_concave());
        assert_eq!(make_sampled(vec![0.0, 1.0, 0.5], true).unwrap_err(), Error::BoundaryNotZero);
    }

    #[test]
    fn steep_side_moves_left() {
        // peak at 3/4: slopes 4/3 and -4 become 4 and -4/3 with peak at 1/4
        let w = tent(0.75, 64);
        let s = sharp(&w).unwrap();
        let (x, top) = s.max();
        assert!((x - 0.25).abs() < 1e-14 && (top - 1.0).abs() < 1e-15);
        let target = tent(0.25, 64);
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!((s.eval(x) - target.eval(x)).abs() < 1e-14);
        }
        // already steep on the left: unchanged
        let s = sharp(&target).unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!((s.eval(x) - target.eval(x)).abs() < 1e-14);
        }
        // symmetric tent: unchanged
        let c = tent(0.5, 64);
        let s = sharp(&c).unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!((s.eval(x) - c.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn distribution_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_quasi_concave(&mut rng, 128, true);
        let d = distribution(&w).unwrap();
        for j in 0..d.levels.len() {
            let total = w.level_measure(d.levels[j]);
            if j + 1 < d.levels.len() {
                assert!((d.eta1[j] + d.eta2[j] + d.plateau - total).abs() < 1e-13);
            }
            assert!((d.eta1[j] + d.eta2[j] - d.eta_star1[j] - d.eta_star2[j]).abs() < 1e-13);
        }
        for (j, &(a, b)) in d.band_slopes.iter().enumerate() {
            let dt = d.levels[j + 1] - d.levels[j];
            let sa = dt / (d.eta_star1[j] - d.eta_star1[j + 1]);
            let sb = dt / (d.eta_star2[j] - d.eta_star2[j + 1]);
            for alpha in [1, 2] {
                let lhs = sa.powi(alpha) + sb.powi(alpha);
                let rhs = a.powi(alpha) + b.powi(alpha);
                assert!((lhs - rhs).abs() <= 1e-9 * rhs);
            }
        }
    }

    #[test]
    fn comparison_integral_examples() {
        // interpolation error of sin(πx) is about (π/m)²/12
        let m = 2048;
        let s: Vec<f64> = (0..=m).map(|i| (std::f64::consts::PI * i as f64 / m as f64).sin()).collect();
        let w = make_sampled(s, true).unwrap();
        let one = Profile::constant(1.0).unwrap();
        assert!((comparison_integral(&w, &one) - 0.5).abs() < 1e-6);
        let zero = make_sampled(vec![0.0; 9], true).unwrap();
        assert_eq!(comparison_integral(&zero, &Profile::triangle(1.0)), 0.0);

        // symmetric tent against T1 = 2x: ∫ w²/(2x), reference by midpoint rule
        let w = tent(0.5, 8);
        let n = 1_000_000;
        let reference: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                let v = w.eval(x);
                v * v / (2.0 * x) / n as f64
            })
            .sum();
        assert!((comparison_integral(&w, &Profile::triangle(1.0)) - reference).abs() < 1e-6);
    }
}
