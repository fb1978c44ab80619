use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thinspec::bessel;
use thinspec::experiments::{random_profile, SampleKind};
use thinspec::fem2d::{self, ThinDomain};
use thinspec::gtransform;
use thinspec::profile::{decompose_non_extreme, increasing_rearrangement, is_extreme_point, CONCAVITY_TOL};
use thinspec::rearrange::{make_sampled, sharp};
use thinspec::sl1d;
use thinspec::Profile;

const N: usize = 512;

fn kind() -> impl Strategy<Value = SampleKind> {
    prop_oneof![Just(SampleKind::Generic), Just(SampleKind::Symmetric), Just(SampleKind::NearTriangle)]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn mu(h: &Profile) -> f64 {
    sl1d::mu1(h, N).unwrap().extrapolated
}

fn sigma(h: &Profile) -> f64 {
    sl1d::sigma1(h, N).unwrap().extrapolated
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_invariants(seed in any::<u64>(), kind in kind()) {
        let h = random_profile(seed, kind);
        prop_assert!(h.max().1 <= 2.0 + 1e-12);
        let big_h = h.integral_function();
        for i in 0..=1000 {
            let y = i as f64 / 1000.0;
            prop_assert!((big_h.eval(big_h.inverse(y)) - y).abs() <= 1e-12);
        }
        prop_assert_eq!(h.reflect().reflect(), h.clone());
        let text = serde_json::to_string(&h).unwrap();
        prop_assert_eq!(serde_json::from_str::<Profile>(&text).unwrap(), h.clone());

        let up = increasing_rearrangement(&h);
        prop_assert!((up.mass() - h.mass()).abs() <= 1e-10);
        prop_assert!((up.max().1 - h.max().1).abs() <= 1e-10);
        let bp = up.breakpoints();
        prop_assert!(bp.windows(2).all(|w| up.eval(w[0]) <= up.eval(w[1])));
    }

    #[test]
    fn decomposition_recombines(seed in any::<u64>(), kind in kind()) {
        let h = random_profile(seed, kind);
        if !is_extreme_point(&h, CONCAVITY_TOL).unwrap() {
            let d = decompose_non_extreme(&h).unwrap();
            let back = Profile::blend(&d.h0, &d.h1, d.t).unwrap();
            prop_assert!(back.sup_distance(&h) <= 1e-10);
        }
    }

    #[test]
    fn eigenvalue_scaling_and_symmetry(seed in any::<u64>(), kind in kind()) {
        let h = random_profile(seed, kind);
        let (m, s) = (mu(&h), sigma(&h));
        for alpha in [0.5, 2.0, 10.0] {
            let scaled = h.scaled(alpha).unwrap();
            prop_assert!(rel(mu(&scaled), m) <= 1e-9);
            prop_assert!(rel(sigma(&scaled), alpha * s) <= 1e-9);
        }
        let r = h.reflect();
        prop_assert!(rel(mu(&r), m) <= 1e-9);
        prop_assert!(rel(sigma(&r), s) <= 1e-9);
    }

    #[test]
    fn eigenvalue_bounds(seed in any::<u64>(), kind in kind()) {
        let h = random_profile(seed, kind);
        let pi2 = std::f64::consts::PI.powi(2);
        let (m, s) = (mu(&h), sigma(&h));
        prop_assert!(m >= pi2 - 1e-6 && m <= bessel::mu1_triangle_center() + 1e-6, "mu1 = {}", m);
        prop_assert!(s >= bessel::sigma1_triangle(0.0) - 1e-6 && s <= 12.0 + 1e-6, "sigma1 = {}", s);
    }

    #[test]
    fn sigma_is_monotone_and_concave(a in any::<u64>(), b in any::<u64>(), lift in 0.01f64..1.0) {
        let h0 = random_profile(a, SampleKind::Generic);
        let h1 = random_profile(b, SampleKind::Generic);
        let one = Profile::constant(1.0).unwrap();
        let raised = Profile::combine(&[(1.0, &h0), (lift, &one)]).unwrap();
        prop_assert!(sigma(&h0) <= sigma(&raised) + 1e-9);
        let (s0, s1) = (sigma(&h0), sigma(&h1));
        for t in [0.25, 0.5, 0.75] {
            let mix = Profile::blend(&h0, &h1, t).unwrap();
            prop_assert!(sigma(&mix) >= (1.0 - t) * s0 + t * s1 - 1e-8);
        }
    }

    #[test]
    fn transform_properties(seed in any::<u64>(), kind in kind()) {
        let h = random_profile(seed, kind);
        let g = gtransform::gof(&h, gtransform::DEFAULT_TRANSFORM_KNOTS).unwrap();
        let back = gtransform::gof_inverse(&g, gtransform::DEFAULT_TRANSFORM_KNOTS).unwrap();
        prop_assert!(back.sup_distance(&h) <= 1e-5);
        prop_assert!(gtransform::pointwise_bound(&h).unwrap().sup_violation <= 1e-9);
        let ratio = gtransform::ratio(&h, N).unwrap();
        prop_assert!(ratio <= 2.0 + 5e-3);
        if kind == SampleKind::Symmetric {
            prop_assert!(ratio >= 1.0 - 5e-3);
        }
    }

    #[test]
    fn sharp_lowers_the_hardy_quotient(seed in any::<u64>()) {
        let h = random_profile(seed, SampleKind::Generic);
        let r = sl1d::sigma1_hardy(&h, N).unwrap();
        let w = make_sampled(r.eigenfunction.clone(), true).unwrap();
        let s = sharp(&w).unwrap();
        let q = w.hardy_quotient(&h);
        let q_sharp = s.hardy_quotient(&increasing_rearrangement(&h));
        prop_assert!(q_sharp <= q * (1.0 + 1e-6), "{} > {}", q_sharp, q);
    }

    #[test]
    fn meshes_are_valid(seed in any::<u64>(), kind in kind(), split in 0.0f64..=1.0, eps in 0.01f64..0.5) {
        let h = random_profile(seed, kind);
        let d = ThinDomain::new(h.scaled(split.max(1e-3)).unwrap(), h.scaled((1.0 - split).max(1e-3)).unwrap(), eps).unwrap();
        let m = fem2d::mesh(&d, 16, 2).unwrap();
        m.validate().unwrap();
        m.reflect_x().validate().unwrap();
        let trapezoid: f64 = (0..16)
            .map(|i| {
                let (a, b) = (i as f64 / 16.0, (i + 1) as f64 / 16.0);
                let w = |x: f64| d.top(x) - d.bottom(x);
                0.5 * (w(a) + w(b)) / 16.0
            })
            .sum();
        prop_assert!((m.area() - trapezoid).abs() <= 1e-10);
    }
}

#[test]
fn formulations_agree_on_random_profiles() {
    for seed in 0..50 {
        let h = random_profile(seed, SampleKind::Generic);
        let s = sl1d::sigma1(&h, 2048).unwrap().extrapolated;
        let w = sl1d::sigma1_hardy(&h, 2048).unwrap().extrapolated;
        assert!((s - w).abs() <= 1e-6 * s.max(1.0), "seed {seed}: {s} vs {w}");
    }
}

#[test]
fn interpolated_parabola_converges() {
    let p = Profile::parabola().to_piecewise_linear(512).unwrap();
    assert!((sl1d::sigma1(&p, 2048).unwrap().extrapolated - 12.0).abs() <= 1e-3);
}

#[test]
fn triangle_root_properties() {
    let grid: Vec<f64> = (0..=100).map(|k| bessel::sigma1_triangle(0.5 * k as f64 / 100.0)).collect();
    assert!(grid.windows(2).all(|w| w[1] > w[0]));
    for k in 0..=100 {
        let v = bessel::sigma1_triangle(k as f64 / 100.0);
        assert!((7.3409853 - 1e-6..=12.0).contains(&v));
    }
    for k in 1..50 {
        let x0 = k as f64 / 100.0;
        let (a, b) = bessel::bracket(x0);
        assert!(bessel::f(x0, a) < 0.0 && bessel::f(x0, b) >= 0.0, "x0 = {x0}");
    }
    for x0 in [0.0, 0.1, 0.25, 0.4, 0.5] {
        let fem = sl1d::sigma1(&Profile::triangle(x0), 2048).unwrap().extrapolated;
        assert!((fem - bessel::sigma1_triangle(x0)).abs() <= 1e-4);
    }
}

#[test]
fn transform_output_is_concave_and_dual_identity_holds() {
    for seed in 0..100 {
        // gof validates concavity of its result
        let h = random_profile(seed, SampleKind::ALL[seed as usize % 3]);
        let g = gtransform::gof(&h, gtransform::DEFAULT_TRANSFORM_KNOTS).unwrap();
        if seed < 20 {
            let (lhs, rhs) = gtransform::dual_identity_check(&g, 2048).unwrap();
            assert!((lhs - rhs).abs() / lhs <= 5e-3, "seed {seed}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn planar_zero_modes() {
    for h in [Profile::constant(1.0).unwrap(), Profile::triangle(0.0), Profile::parabola()] {
        let m = fem2d::mesh(&ThinDomain::symmetric(&h, 0.1).unwrap(), 32, 2).unwrap();
        let n = fem2d::neumann_spectrum(&m, 2).unwrap();
        let s = fem2d::steklov_spectrum(&m, 2).unwrap();
        assert!(n[0].abs() <= 1e-8 * n[1]);
        assert!(s[0].abs() <= 1e-8 * s[1]);
    }
}

#[test]
fn random_quasi_concave_sharp_is_stable_under_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let w = thinspec::rearrange::random_quasi_concave(&mut rng, 128, false);
        let a = sharp(&w).unwrap();
        let b = sharp(&w.reflect()).unwrap();
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            assert!((a.eval(x) - b.eval(x)).abs() <= 1e-8);
        }
    }
}
