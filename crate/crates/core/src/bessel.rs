//! `J₀`, its derivative, their first zeros, and triangle-profile eigenvalues.
//!
//! For the tent `T_{x0}` the Steklov-type eigenfunction is a Bessel function of
//! `sqrt(distance to the nearer end)` on each side of the apex, and matching
//! the two branches at `x0` yields the characteristic function [`f`].

/// First positive zeros of `J₀` and of `J₀'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselRoots {
    pub j01: f64,
    pub j01_prime: f64,
}

const SERIES_LIMIT: f64 = 8.0;

/// `J₀(x)` for `x >= 0`.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(x, 0)
    } else {
        miller(x).0
    }
}

/// `J₀'(x) = -J₁(x)`.
pub fn j0_prime(x: f64) -> f64 {
    let ax = x.abs();
    let j1 = if ax <= SERIES_LIMIT { series(ax, 1) } else { miller(ax).1 };
    if x < 0.0 {
        j1
    } else {
        -j1
    }
}

/// Power series of `J_order` for `order ∈ {0, 1}`.
fn series(x: f64, order: u32) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-18 {
            return sum;
        }
        k += 1.0;
    }
}

/// `(J₀(x), J₁(x))` by Miller's backward recurrence, normalized with
/// `J₀ + 2 Σ J_{2k} = 1`.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x as usize + 40) / 2);
    let (mut next, mut cur) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let (mut j0v, mut j1v) = (0.0, 0.0);
    for n in (1..=start).rev() {
        let prev = 2.0 * n as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{n-1}
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * cur;
        }
        if n == 2 {
            j1v = cur;
        }
        if n == 1 {
            j0v = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            j1v *= 1e-250;
        }
    }
    norm += j0v;
    (j0v / norm, j1v / norm)
}

/// Newton iteration guarded by a sign-change bracket.
fn safeguarded_root(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let step = x - fx / df(x);
        x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 || fx.abs() < 1e-17 {
            break;
        }
    }
    x
}

/// `j₀,₁ ≈ 2.4048` bracketed in `(2, 3)`, `j'₀,₁ ≈ 3.8317` in `(3, 4.5)`.
pub fn first_roots() -> BesselRoots {
    let j01 = safeguarded_root(j0, j0_prime, 2.0, 3.0);
    // J₀' = -J₁ and J₁' = J₀ - J₁/x
    let j01_prime = safeguarded_root(j0_prime, |x| -(j0(x) + j0_prime(x) / x), 3.0, 4.5);
    BesselRoots { j01, j01_prime }
}

/// `F(x, s) = J₀(sx) J₀'(s(1-x)) + J₀(s(1-x)) J₀'(sx)`.
pub fn f(x0: f64, s: f64) -> f64 {
    j0(s * x0) * j0_prime(s * (1.0 - x0)) + j0(s * (1.0 - x0)) * j0_prime(s * x0)
}

/// `σ₁(T_{x0}) = s(x0)² / 2` with `s(x0)` the first positive root of `F(x0, ·)`.
pub fn sigma1_triangle(x0: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x0), "apex {x0} outside [0, 1]");
    let x0 = if x0 > 0.5 { 1.0 - x0 } else { x0 };
    let r = first_roots();
    let s = if x0 == 0.0 {
        r.j01_prime
    } else if x0 == 0.5 {
        // F(1/2, s) = 2 J₀(s/2) J₀'(s/2); j₀,₁ comes before j'₀,₁
        2.0 * r.j01
    } else {
        triangle_root(x0, r)
    };
    0.5 * s * s
}

/// Interval containing the first root of `F(x0, ·)` for `x0` in `(0, 1/2)`.
///
/// `F` is negative at the left end and nonnegative at the right end.
pub fn bracket(x0: f64) -> (f64, f64) {
    let r = first_roots();
    (r.j01 / (1.0 - x0), (r.j01 / x0).min(r.j01_prime / (1.0 - x0)))
}

fn triangle_root(x0: f64, r: BesselRoots) -> f64 {
    let g = |s: f64| f(x0, s);
    let lo = r.j01 / (1.0 - x0);
    let hi = (r.j01 / x0).min(r.j01_prime / (1.0 - x0));
    let (mut a, mut b) = (lo, hi);
    let fa = g(a);
    debug_assert!(fa < 0.0 && g(b) >= 0.0, "bracket lost at x0 = {x0}");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (g(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `μ₁(T₀) = μ₁(T₁) = (j'₀,₁)²`.
pub fn mu1_triangle_endpoint() -> f64 {
    first_roots().j01_prime.powi(2)
}

/// `μ₁(T_{1/2}) = 4 j₀,₁²`, the largest value of `μ₁` on `P₁`.
pub fn mu1_triangle_center() -> f64 {
    4.0 * first_roots().j01.powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values of J₀ and J₁ at selected points (17 digits, mpmath)
    const TABLE: [(f64, f64, f64); 6] = [
        (0.5, 0.938_469_807_240_812_9, 0.242_268_457_674_873_9),
        (1.0, 0.765_197_686_557_966_6, 0.440_050_585_744_933_5),
        (5.0, -0.177_596_771_314_338_3, -0.327_579_137_591_465_2),
        (7.9, 0.194_361_844_841_278_24, 0.219_179_399_921_751_2),
        (12.0, 0.047_689_310_796_833_54, -0.223_447_104_490_627_4),
        (19.5, 0.178_853_827_040_172_89, -0.020_877_070_148_097_522),
    ];

    #[test]
    fn reference_values() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j0_prime(0.0), 0.0);
        for &(x, a, b) in &TABLE {
            assert!((j0(x) - a).abs() < 1e-13, "J0({x})");
            assert!((j0_prime(x) + b).abs() < 1e-13, "J1({x})");
        }
        // the two evaluation routes meet at the series limit
        assert!((series(8.0, 0) - miller(8.0).0).abs() < 1e-13);
        assert!((series(8.0, 1) - miller(8.0).1).abs() < 1e-13);
    }

    #[test]
    fn bessel_ode_residual() {
        let d = 1e-5;
        for x in [0.5, 1.0, 2.0, 5.0] {
            let second = (j0_prime(x + d) - j0_prime(x - d)) / (2.0 * d);
            let r = second + j0_prime(x) / x + j0(x);
            assert!(r.abs() < 1e-10, "{x}: {r}");
        }
    }

    #[test]
    fn first_roots_are_ordered_zeros() {
        let r = first_roots();
        assert!(j0(r.j01).abs() <= 1e-13 && j0_prime(r.j01_prime).abs() <= 1e-13);
        assert!((r.j01 - 2.404_825_557_7).abs() < 1e-10);
        assert!((r.j01_prime - 3.831_705_970_2).abs() < 1e-10);
        assert!(r.j01 < r.j01_prime);
        assert!(j0(2.404825557695773).abs() < 1e-12);
        assert!(j0(2.4) > 0.0 && j0(2.41) < 0.0);
    }

    #[test]
    fn characteristic_function_reductions() {
        for s in [0.7, 2.0, 3.3, 6.1] {
            assert!((f(0.0, s) - j0_prime(s)).abs() < 1e-15);
            assert!((f(0.5, s) - 2.0 * j0(0.5 * s) * j0_prime(0.5 * s)).abs() < 1e-15);
        }
        let r = first_roots();
        for x0 in [0.05, 0.2, 0.4] {
            let top = r.j01 / (1.0 - x0);
            for i in 1..=50 {
                assert!(f(x0, top * i as f64 / 50.0) < 0.0);
            }
        }
    }

    #[test]
    fn triangle_eigenvalues() {
        let r = first_roots();
        assert_eq!(sigma1_triangle(0.0), r.j01_prime.powi(2) / 2.0);
        assert!((sigma1_triangle(0.0) - 7.340_985_3).abs() < 1e-7);
        assert!((sigma1_triangle(0.5) - 11.566_371_9).abs() < 1e-7);
        for x0 in [0.1, 0.3] {
            assert_eq!(sigma1_triangle(x0), sigma1_triangle(1.0 - x0));
        }
        // continuity at the special-cased ends
        assert!((sigma1_triangle(1e-9) - sigma1_triangle(0.0)).abs() < 1e-6);
        assert!((sigma1_triangle(0.5 - 1e-9) - sigma1_triangle(0.5)).abs() < 1e-6);
        assert!((mu1_triangle_endpoint() - 14.681_970_6).abs() < 1e-7);
        assert_eq!(mu1_triangle_endpoint(), 2.0 * sigma1_triangle(1.0));
        assert!(mu1_triangle_endpoint() > std::f64::consts::PI.powi(2));
    }

    #[test]
    fn triangle_eigenvalues_match_solver() {
        use crate::{profile::Profile, sl1d};
        for x0 in [0.0, 0.3, 0.5] {
            let fem = sl1d::sigma1(&Profile::triangle(x0), 2048).unwrap().extrapolated;
            assert!((fem - sigma1_triangle(x0)).abs() < 1e-6, "{x0}");
        }
        let mu = sl1d::mu1(&Profile::triangle(1.0), 2048).unwrap().extrapolated;
        assert!((mu - mu1_triangle_endpoint()).abs() < 1e-6);
        let mu = sl1d::mu1(&Profile::triangle(0.5), 2048).unwrap().extrapolated;
        assert!((mu - mu1_triangle_center()).abs() < 1e-6);
    }
}
