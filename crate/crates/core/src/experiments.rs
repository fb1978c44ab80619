//! Batch studies over random profiles: eigenvalue extremizers, the ratio
//! `μ₁ ∫h / σ₁` and triangle scans.
//!
//! Every study is deterministic per seed and mesh. Samples are evaluated in
//! parallel on a pool capped by `THINSPEC_THREADS` and reported in seed order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel;
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::sl1d;

/// Number of equal segments in a generic random profile.
pub const SEGMENTS: usize = 16;
/// Weight of the generic component in a near-triangle sample.
pub const NEAR_TRIANGLE_WEIGHT: f64 = 0.05;
/// Peak positions of near-triangle samples lie on this dyadic grid.
pub const PEAK_GRID: u64 = 512;
/// Slack on the upper bounds `σ₁ <= 12` and `ratio <= 2`.
pub const UPPER_SLACK: f64 = 5e-3;
/// Slack on the lower bound `σ₁(h) >= σ₁(T₀)`.
pub const LOWER_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Generic,
    Symmetric,
    NearTriangle,
}

impl SampleKind {
    pub const ALL: [SampleKind; 3] = [SampleKind::Generic, SampleKind::Symmetric, SampleKind::NearTriangle];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleKind::Generic => "generic",
            SampleKind::Symmetric => "symmetric",
            SampleKind::NearTriangle => "near-triangle",
        }
    }
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown sample kind {s:?}")))
    }
}

fn generic(rng: &mut ChaCha8Rng) -> Profile {
    // slopes drop by exponential jumps at a random subset of interior knots
    let mut interior: Vec<usize> = (1..SEGMENTS).collect();
    interior.shuffle(rng);
    let active = rng.random_range(1..SEGMENTS);
    let mut drops = vec![0.0; SEGMENTS];
    for &k in &interior[..active] {
        drops[k] = -(1.0 - rng.random::<f64>()).ln();
    }
    let total: f64 = drops.iter().sum();
    let mut slope = total * rng.random::<f64>();
    let dx = 1.0 / SEGMENTS as f64;
    let mut ys = vec![0.0; SEGMENTS + 1];
    for i in 0..SEGMENTS {
        slope -= drops[i];
        ys[i + 1] = ys[i] + slope * dx;
    }
    let low = ys[0].min(ys[SEGMENTS]);
    let high = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - low;
    // half of the samples vanish at an end, the rest sit on a pedestal
    let lift = if rng.random_bool(0.5) { rng.random_range(0.0..0.5) * high.max(1.0) } else { 0.0 };
    let knots = ys
        .iter()
        .enumerate()
        .map(|(i, y)| [i as f64 * dx, (y - low).max(0.0) + lift])
        .collect();
    Profile::piecewise_linear(knots)
        .and_then(|p| p.normalize())
        .expect("sorted slopes give a concave nonnegative profile")
}

/// A random normalized profile, deterministic in `seed`.
pub fn random_profile(seed: u64, kind: SampleKind) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SampleKind::Generic => generic(&mut rng),
        SampleKind::Symmetric => {
            let h = generic(&mut rng);
            let r = h.reflect();
            Profile::combine(&[(0.5, &h), (0.5, &r)]).expect("average of concave profiles")
        }
        SampleKind::NearTriangle => near_triangle(seed, NEAR_TRIANGLE_WEIGHT),
    }
}

/// `(1 - weight) T_{x0} + weight g` with `x0 = k/512` and `g` generic, both drawn from `seed`.
pub fn near_triangle(seed: u64, weight: f64) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = rng.random_range(0..=PEAK_GRID) as f64 / PEAK_GRID as f64;
    let t = Profile::triangle(x0);
    if weight == 0.0 {
        return t;
    }
    let g = generic(&mut rng);
    Profile::blend(&t, &g, weight).expect("blend of normalized profiles")
}

/// Runs `f` on a pool sized by `THINSPEC_THREADS` (all cores when unset).
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("THINSPEC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub id: String,
    pub mu1: f64,
    pub sigma1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremizerReport {
    pub rows: Vec<StudyRow>,
    /// `σ₁(T₀)` from the Bessel root.
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    pub mu_lower: f64,
    /// `μ₁(T_{1/2}) = 4 j₀,₁²`.
    pub mu_upper: f64,
    /// Solver value of `μ₁(T_{1/2})`, cross-checked against `mu_upper`.
    pub mu_center_solver: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
}

impl ExtremizerReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,mu1,sigma1\n");
        for r in &self.rows {
            out += &format!("{},{},{}\n", r.id, fmt_f64(r.mu1), fmt_f64(r.sigma1));
        }
        out
    }
}

/// Eigenvalue chains over `n_samples` generic profiles plus the named extremizers.
pub fn extremizer_study(n_samples: usize, mesh: usize) -> Result<ExtremizerReport> {
    let mut samples: Vec<(String, Profile)> = vec![
        ("T0".into(), Profile::triangle(0.0)),
        ("T1".into(), Profile::triangle(1.0)),
        ("T0.5".into(), Profile::triangle(0.5)),
        ("parabola".into(), Profile::parabola()),
        ("constant".into(), Profile::constant(1.0)?),
    ];
    samples.extend((0..n_samples as u64).map(|s| (format!("generic-{s}"), random_profile(s, SampleKind::Generic))));
    extremizer_study_on(samples, mesh)
}

/// Checks `σ₁(T₀) <= σ₁(h) <= 12` and `π² <= μ₁(h) <= μ₁(T_{1/2})` on every sample.
pub fn extremizer_study_on(samples: Vec<(String, Profile)>, mesh: usize) -> Result<ExtremizerReport> {
    let rows: Vec<StudyRow> = with_thread_cap(|| {
        samples
            .par_iter()
            .map(|(id, h)| {
                Ok(StudyRow {
                    id: id.clone(),
                    mu1: sl1d::mu1(h, mesh)?.extrapolated,
                    sigma1: sl1d::sigma1(h, mesh)?.extrapolated,
                })
            })
            .collect::<Result<_>>()
    })?;
    let sigma_lower = bessel::sigma1_triangle(0.0);
    let sigma_upper = 12.0;
    let mu_lower = std::f64::consts::PI.powi(2);
    let mu_upper = bessel::mu1_triangle_center();
    let mu_center_solver = sl1d::mu1(&Profile::triangle(0.5), mesh)?.extrapolated;
    if (mu_center_solver - mu_upper).abs() > 1e-3 {
        return Err(Error::AssertionFailure(format!(
            "solver mu1(T_1/2) = {mu_center_solver} disagrees with 4 j01^2 = {mu_upper}"
        )));
    }
    for r in &rows {
        if r.sigma1 < sigma_lower - LOWER_SLACK || r.sigma1 > sigma_upper + UPPER_SLACK {
            return Err(Error::AssertionFailure(format!("{}: sigma1 = {} outside [{sigma_lower}, 12]", r.id, r.sigma1)));
        }
        let tol = 1e-6 * mu_upper;
        if r.mu1 < mu_lower - tol || r.mu1 > mu_upper + tol {
            return Err(Error::AssertionFailure(format!("{}: mu1 = {} outside [pi^2, {mu_upper}]", r.id, r.mu1)));
        }
    }
    let fold = |f: fn(&StudyRow) -> f64, init: f64, pick: fn(f64, f64) -> f64| rows.iter().map(f).fold(init, pick);
    Ok(ExtremizerReport {
        sigma_min: fold(|r| r.sigma1, f64::INFINITY, f64::min),
        sigma_max: fold(|r| r.sigma1, f64::NEG_INFINITY, f64::max),
        mu_min: fold(|r| r.mu1, f64::INFINITY, f64::min),
        mu_max: fold(|r| r.mu1, f64::NEG_INFINITY, f64::max),
        rows,
        sigma_lower,
        sigma_upper,
        mu_lower,
        mu_upper,
        mu_center_solver,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub seed: u64,
    pub kind: SampleKind,
    pub mu1: f64,
    pub sigma1: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest ratio among near-triangle samples.
    pub max_near_triangle: f64,
    /// Smallest ratio among symmetric samples.
    pub min_symmetric: f64,
}

impl ProbeReport {
    pub const CSV_HEADER: &'static str = "seed,kind,mu1,sigma1,ratio";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out += &format!("{},{},{},{},{}\n", r.seed, r.kind, fmt_f64(r.mu1), fmt_f64(r.sigma1), fmt_f64(r.ratio));
        }
        out
    }

    fn extreme(&self, kind: Option<SampleKind>, init: f64, pick: fn(f64, f64) -> f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| kind.is_none_or(|k| r.kind == k))
            .map(|r| r.ratio)
            .fold(init, pick)
    }
}

/// Ratio `μ₁ ∫h / σ₁` over `n_samples` seeds of every sample kind, starting at `seed`.
///
/// Only the proven upper bound `ratio <= 2` is enforced; the minimum is reported.
pub fn conjecture_probe(n_samples: usize, mesh: usize, seed: u64) -> Result<ProbeReport> {
    let jobs: Vec<(u64, SampleKind)> = (0..n_samples as u64)
        .flat_map(|i| SampleKind::ALL.map(|k| (seed + i, k)))
        .collect();
    let rows: Vec<ProbeRow> = with_thread_cap(|| {
        jobs.par_iter()
            .map(|&(s, kind)| {
                let h = random_profile(s, kind);
                let mu1 = sl1d::mu1(&h, mesh)?.extrapolated;
                let sigma1 = sl1d::sigma1(&h, mesh)?.extrapolated;
                Ok(ProbeRow { seed: s, kind, mu1, sigma1, ratio: mu1 * h.mass() / sigma1 })
            })
            .collect::<Result<_>>()
    })?;
    let mut report = ProbeReport { rows, min_ratio: 0.0, max_ratio: 0.0, max_near_triangle: 0.0, min_symmetric: 0.0 };
    report.rows.sort_by_key(|r| (r.seed, r.kind));
    report.min_ratio = report.extreme(None, f64::INFINITY, f64::min);
    report.max_ratio = report.extreme(None, f64::NEG_INFINITY, f64::max);
    report.max_near_triangle = report.extreme(Some(SampleKind::NearTriangle), f64::NEG_INFINITY, f64::max);
    report.min_symmetric = report.extreme(Some(SampleKind::Symmetric), f64::INFINITY, f64::min);
    if let Some(r) = report.rows.iter().find(|r| r.ratio > 2.0 + UPPER_SLACK) {
        return Err(Error::AssertionFailure(format!("seed {} ({}): ratio {} exceeds 2", r.seed, r.kind, r.ratio)));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub id: String,
    pub mu1: f64,
    pub sigma1: f64,
    pub ratio: f64,
}

pub const RATIO_CSV_HEADER: &str = "profile_id,mu1,sigma1,ratio";

/// The closed-form profiles: constant, triangles at 0, 1/4, 1/2 and the parabola.
pub fn named_profiles() -> Vec<(String, Profile)> {
    vec![
        ("constant".into(), Profile::constant(1.0).expect("positive constant")),
        ("T0".into(), Profile::triangle(0.0)),
        ("T0.25".into(), Profile::triangle(0.25)),
        ("T0.5".into(), Profile::triangle(0.5)),
        ("parabola".into(), Profile::parabola()),
    ]
}

pub fn ratio_scan(profiles: &[(String, Profile)], mesh: usize) -> Result<Vec<RatioRow>> {
    with_thread_cap(|| {
        profiles
            .par_iter()
            .map(|(id, h)| {
                let mu1 = sl1d::mu1(h, mesh)?.extrapolated;
                let sigma1 = sl1d::sigma1(h, mesh)?.extrapolated;
                Ok(RatioRow { id: id.clone(), mu1, sigma1, ratio: mu1 * h.mass() / sigma1 })
            })
            .collect()
    })
}

pub fn ratio_csv(rows: &[RatioRow]) -> String {
    let mut out = format!("{RATIO_CSV_HEADER}\n");
    for r in rows {
        out += &format!("{},{},{},{}\n", r.id, fmt_f64(r.mu1), fmt_f64(r.sigma1), fmt_f64(r.ratio));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangleRow {
    pub x0: f64,
    pub sigma_bessel: f64,
    pub sigma_fem: f64,
}

pub const TRIANGLE_CSV_HEADER: &str = "x0,sigma_bessel,sigma_fem";

/// `σ₁(T_{x0})` on `grid` equally spaced peaks in `[0, 1]`, from the Bessel
/// root and from the finite-element solver.
pub fn triangle_scan(grid: usize, mesh: usize) -> Result<Vec<TriangleRow>> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {grid}")));
    }
    with_thread_cap(|| {
        (0..grid)
            .into_par_iter()
            .map(|i| {
                let x0 = i as f64 / (grid - 1) as f64;
                let sigma_fem = sl1d::sigma1(&Profile::triangle(x0), mesh)?.extrapolated;
                Ok(TriangleRow { x0, sigma_bessel: bessel::sigma1_triangle(x0), sigma_fem })
            })
            .collect()
    })
}

pub fn triangle_csv(rows: &[TriangleRow]) -> String {
    let mut out = format!("{TRIANGLE_CSV_HEADER}\n");
    for r in rows {
        out += &format!("{},{},{}\n", fmt_f64(r.x0), fmt_f64(r.sigma_bessel), fmt_f64(r.sigma_fem));
    }
    out
}
