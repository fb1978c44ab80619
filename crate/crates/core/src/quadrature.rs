//! Gauss-Legendre rules and closed-form moments of inverse affine weights.

/// 4-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Integrates `f` over `[a, b]` with the given rule.
pub fn integrate(rule: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Moments of `1 / (ha (1 - t) + hb t)` against the quadratic Bernstein basis on
/// `[0, 1]`: returns `[∫(1-t)²/h, ∫t(1-t)/h, ∫t²/h]`.
///
/// Entries that diverge (weight vanishing at an end where the basis function does
/// not) are `f64::INFINITY`. Both values must be nonnegative and not both zero.
pub fn inverse_affine_moments(ha: f64, hb: f64) -> [f64; 3] {
    debug_assert!(ha >= 0.0 && hb >= 0.0 && ha + hb > 0.0);
    if ha > hb {
        let [c, b, a] = inverse_affine_moments(hb, ha);
        return [a, b, c];
    }
    // h(t) = hb (q + c t), maximum at t = 1.
    let q = ha / hb;
    let c = 1.0 - q;
    let (left, mixed, right) = if c <= 1.0 / 3.0 {
        let r = -c / q;
        let (mut sl, mut sm, mut sr) = (0.0, 0.0, 0.0);
        let mut p = 1.0;
        for m in 0..80 {
            let m = m as f64;
            sl += p * 2.0 / ((m + 1.0) * (m + 2.0) * (m + 3.0));
            sm += p / ((m + 2.0) * (m + 3.0));
            sr += p / (m + 3.0);
            p *= r;
            if p.abs() < 1e-18 {
                break;
            }
        }
        (sl / q, sm / q, sr / q)
    } else if q == 0.0 {
        (f64::INFINITY, 0.5, 0.5)
    } else {
        let n0 = -q.ln() / c;
        let n1 = (1.0 - q * n0) / c;
        let n2 = (0.5 - q * n1) / c;
        (n0 - 2.0 * n1 + n2, n1 - n2, n2)
    };
    [left / hb, mixed / hb, right / hb]
}

/// `∫_0^1 (wa (1-t) + wb t)² / (ha (1-t) + hb t) dt`, skipping basis terms with a
/// zero coefficient so that a weight vanishing together with `w` stays finite.
pub fn affine_ratio_integral(wa: f64, wb: f64, ha: f64, hb: f64) -> f64 {
    let [c, b, a] = inverse_affine_moments(ha, hb);
    let mut acc = 0.0;
    if wa != 0.0 {
        acc += wa * wa * c;
    }
    if wa != 0.0 && wb != 0.0 {
        acc += 2.0 * wa * wb * b;
    }
    if wb != 0.0 {
        acc += wb * wb * a;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(ha: f64, hb: f64, p: impl Fn(f64) -> f64) -> f64 {
        // composite 8-point Gauss on 4096 panels
        let n = 4096;
        (0..n)
            .map(|i| {
                let a = i as f64 / n as f64;
                let b = (i + 1) as f64 / n as f64;
                integrate(&GAUSS8, a, b, |t| p(t) / (ha * (1.0 - t) + hb * t))
            })
            .sum()
    }

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(4) + 2.0;
        let exact = 3.0 / 8.0 * (2f64.powi(8) - 1.0) - (2f64.powi(5) - 1.0) / 5.0 + 2.0;
        assert!((integrate(&GAUSS4, 1.0, 2.0, f) - exact).abs() < 1e-12);
        assert!((integrate(&GAUSS8, 1.0, 2.0, f) - exact).abs() < 1e-12);
    }

    #[test]
    fn moments_match_brute_force() {
        for &(ha, hb) in &[(1.0, 1.0), (1.0, 1.2), (0.9, 0.3), (0.3, 2.0), (1e-3, 1.0), (2.0, 0.5)] {
            let m = inverse_affine_moments(ha, hb);
            let e = [
                brute(ha, hb, |t| (1.0 - t) * (1.0 - t)),
                brute(ha, hb, |t| t * (1.0 - t)),
                brute(ha, hb, |t| t * t),
            ];
            for k in 0..3 {
                assert!((m[k] - e[k]).abs() <= 1e-12 * e[k].max(1.0), "{ha} {hb} {k}: {} vs {}", m[k], e[k]);
            }
        }
    }

    #[test]
    fn vanishing_weight_keeps_finite_entries() {
        // h = t: ∫ t²/t = 1/2, ∫ t(1-t)/t = 1/2, ∫ (1-t)²/t = ∞
        let m = inverse_affine_moments(0.0, 1.0);
        assert!(m[0].is_infinite());
        assert!((m[1] - 0.5).abs() < 1e-15 && (m[2] - 0.5).abs() < 1e-15);
        assert_eq!(affine_ratio_integral(0.0, 2.0, 0.0, 4.0), 4.0 * 0.5 / 4.0);
    }
}
