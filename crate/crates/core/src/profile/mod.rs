//! Concave profiles `h` on `[0, 1]`.
//!
//! Every profile is stored as its tagged closed form plus a list of
//! [`Piece`]s, each a quadratic arc with constant curvature `-h''`. The named
//! shapes (constant, triangles, the parabola `6x(1-x)`) and piecewise-linear
//! data all reduce to this form, which keeps integration and inversion exact.

mod extreme;
mod rearrangement;

pub use extreme::{decompose_non_extreme, is_extreme_point, Decomposition};
pub use rearrangement::{increasing_rearrangement, REARRANGEMENT_KNOTS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on slope differences when validating concavity of user data.
pub const CONCAVITY_TOL: f64 = 1e-12;
/// Tolerance used when re-validating profiles produced by numerical transforms.
pub const DERIVED_CONCAVITY_TOL: f64 = 1e-9;
/// Default knot count when a general profile is approximated piecewise-linearly.
pub const DEFAULT_KNOTS: usize = 512;

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

/// Closed-form description of a profile; this is also its JSON encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Constant {
        c: f64,
    },
    /// `scale * T_{x0}`, where `T_{x0}` is the unit-mass tent peaking at `x0`.
    Triangle {
        x0: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    /// `scale * 6x(1-x)`.
    Parabola {
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    /// Knot values plus the constant curvature `-h''` on each segment.
    PiecewiseQuadratic {
        knots: Vec<[f64; 2]>,
        curvature: Vec<f64>,
    },
}

/// A quadratic arc on `[x0, x1]` with end values `y0`, `y1` and `-h'' = kappa`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub kappa: f64,
}

impl Piece {
    #[inline]
    pub fn len(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Value at local offset `u = x - x0`.
    #[inline]
    pub fn at(&self, u: f64) -> f64 {
        let l = self.len();
        if u == l {
            return self.y1;
        }
        self.y0 + (self.y1 - self.y0) * (u / l) + 0.5 * self.kappa * u * (l - u)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.at(x - self.x0)
    }

    /// Derivative at local offset `u`.
    #[inline]
    pub fn slope_at(&self, u: f64) -> f64 {
        let l = self.len();
        (self.y1 - self.y0) / l + 0.5 * self.kappa * (l - 2.0 * u)
    }

    /// `∫_0^u h(x0 + s) ds`.
    #[inline]
    pub fn antiderivative(&self, u: f64) -> f64 {
        let l = self.len();
        self.y0 * u
            + (self.y1 - self.y0) * u * u / (2.0 * l)
            + 0.5 * self.kappa * (0.5 * l * u * u - u * u * u / 3.0)
    }

    #[inline]
    pub fn integral(&self) -> f64 {
        let l = self.len();
        0.5 * (self.y0 + self.y1) * l + self.kappa * l * l * l / 12.0
    }

    pub fn is_affine(&self) -> bool {
        self.kappa == 0.0
    }

    /// Location and value of the maximum on the piece.
    fn max(&self) -> (f64, f64) {
        let mut best = if self.y1 > self.y0 { (self.x1, self.y1) } else { (self.x0, self.y0) };
        if self.kappa > 0.0 {
            let l = self.len();
            let u = 0.5 * l + (self.y1 - self.y0) / (self.kappa * l);
            if u > 0.0 && u < l {
                let v = self.at(u);
                if v > best.1 {
                    best = (self.x0 + u, v);
                }
            }
        }
        best
    }
}

/// A nonnegative concave weight on `[0, 1]` that is not identically zero.
///
/// Immutable once built; the total mass and prefix masses are cached.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProfileKind", into = "ProfileKind")]
pub struct Profile {
    kind: ProfileKind,
    pieces: Vec<Piece>,
    /// `cum[k]` is the mass of pieces `0..k`.
    cum: Vec<f64>,
    mass: f64,
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl TryFrom<ProfileKind> for Profile {
    type Error = Error;

    fn try_from(kind: ProfileKind) -> Result<Self> {
        Profile::from_kind(kind, CONCAVITY_TOL)
    }
}

impl From<Profile> for ProfileKind {
    fn from(p: Profile) -> Self {
        p.kind
    }
}

impl Profile {
    pub fn constant(c: f64) -> Result<Self> {
        Self::from_kind(ProfileKind::Constant { c }, CONCAVITY_TOL)
    }

    /// The unit-mass tent `T_{x0}`; `x0 = 0` gives `2(1-x)` and `x0 = 1` gives `2x`.
    ///
    /// Panics if `x0` is outside `[0, 1]`.
    pub fn triangle(x0: f64) -> Self {
        Self::scaled_triangle(x0, 1.0)
    }

    pub fn scaled_triangle(x0: f64, scale: f64) -> Self {
        Self::from_kind(ProfileKind::Triangle { x0, scale }, CONCAVITY_TOL)
            .expect("triangle apex must lie in [0, 1] with positive scale")
    }

    /// The parabola `6x(1-x)`.
    pub fn parabola() -> Self {
        Self::scaled_parabola(1.0)
    }

    pub fn scaled_parabola(scale: f64) -> Self {
        Self::from_kind(ProfileKind::Parabola { scale }, CONCAVITY_TOL)
            .expect("parabola scale must be positive")
    }

    /// Validates knot data and builds a piecewise-linear profile.
    pub fn piecewise_linear(knots: Vec<[f64; 2]>) -> Result<Self> {
        Self::from_kind(ProfileKind::PiecewiseLinear { knots }, CONCAVITY_TOL)
    }

    pub fn piecewise_quadratic(knots: Vec<[f64; 2]>, curvature: Vec<f64>) -> Result<Self> {
        Self::from_kind(ProfileKind::PiecewiseQuadratic { knots, curvature }, CONCAVITY_TOL)
    }

    /// Builds a profile, checking concavity with the given slope tolerance.
    pub fn from_kind(kind: ProfileKind, tol: f64) -> Result<Self> {
        let pieces = build_pieces(&kind)?;
        validate_pieces(&pieces, tol)?;
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for p in &pieces {
            acc += p.integral();
            cum.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::AllZero);
        }
        Ok(Self { kind, pieces, cum, mass: acc })
    }

    /// Builds a profile directly from pieces, emitting the most specific kind.
    pub(crate) fn from_pieces(pieces: &[Piece], tol: f64) -> Result<Self> {
        let mut knots = Vec::with_capacity(pieces.len() + 1);
        knots.push([pieces[0].x0, pieces[0].y0]);
        for p in pieces {
            knots.push([p.x1, p.y1]);
        }
        let kind = if pieces.iter().all(Piece::is_affine) {
            ProfileKind::PiecewiseLinear { knots }
        } else {
            ProfileKind::PiecewiseQuadratic { knots, curvature: pieces.iter().map(|p| p.kappa).collect() }
        };
        Self::from_kind(kind, tol)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `∫_0^1 h`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.pieces.iter().all(Piece::is_affine)
    }

    /// Whether the total mass is one (class `P_1`).
    pub fn is_normalized(&self) -> bool {
        (self.mass - 1.0).abs() <= 1e-10
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self.pieces.partition_point(|p| p.x1 < x);
        k.min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let p = &self.pieces[self.piece_index(x)];
        p.eval(x).max(0.0)
    }

    /// Right derivative at `x` (left derivative at `x = 1`).
    pub fn slope(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let k = self.pieces.partition_point(|p| p.x1 <= x).min(self.pieces.len() - 1);
        let p = &self.pieces[k];
        p.slope_at(x - p.x0)
    }

    /// Location and value of the maximum.
    pub fn max(&self) -> (f64, f64) {
        self.pieces
            .iter()
            .map(Piece::max)
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }

    /// Knot locations, including both endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pieces.iter().map(|p| p.x0).collect();
        out.push(1.0);
        out
    }

    /// `∫_a^b h` for `0 <= a <= b <= 1`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        self.primitive(b) - self.primitive(a)
    }

    fn primitive(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let k = self.piece_index(x);
        let p = &self.pieces[k];
        self.cum[k] + p.antiderivative(x - p.x0)
    }

    pub fn integral_function(&self) -> IntegralFunction<'_> {
        IntegralFunction { profile: self }
    }

    /// `alpha * h` for `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor {alpha} must be positive")));
        }
        let kind = match &self.kind {
            ProfileKind::Constant { c } => ProfileKind::Constant { c: c * alpha },
            ProfileKind::Triangle { x0, scale } => ProfileKind::Triangle { x0: *x0, scale: scale * alpha },
            ProfileKind::Parabola { scale } => ProfileKind::Parabola { scale: scale * alpha },
            ProfileKind::PiecewiseLinear { knots } => {
                ProfileKind::PiecewiseLinear { knots: knots.iter().map(|&[x, y]| [x, y * alpha]).collect() }
            }
            ProfileKind::PiecewiseQuadratic { knots, curvature } => ProfileKind::PiecewiseQuadratic {
                knots: knots.iter().map(|&[x, y]| [x, y * alpha]).collect(),
                curvature: curvature.iter().map(|k| k * alpha).collect(),
            },
        };
        Self::from_kind(kind, f64::INFINITY)
    }

    /// `h / ∫h`, a member of `P_1`.
    pub fn normalize(&self) -> Result<Self> {
        self.scaled(1.0 / self.mass)
    }

    /// `x ↦ h(1 - x)`.
    pub fn reflect(&self) -> Self {
        let kind = match &self.kind {
            ProfileKind::Triangle { x0, scale } => ProfileKind::Triangle { x0: 1.0 - x0, scale: *scale },
            ProfileKind::PiecewiseLinear { knots } => {
                ProfileKind::PiecewiseLinear { knots: knots.iter().rev().map(|&[x, y]| [1.0 - x, y]).collect() }
            }
            ProfileKind::PiecewiseQuadratic { knots, curvature } => ProfileKind::PiecewiseQuadratic {
                knots: knots.iter().rev().map(|&[x, y]| [1.0 - x, y]).collect(),
                curvature: curvature.iter().rev().copied().collect(),
            },
            other => other.clone(),
        };
        Self::from_kind(kind, f64::INFINITY).expect("reflection preserves validity")
    }

    /// Nonnegative-or-affine linear combination `Σ c_i h_i`, exact on the union
    /// of breakpoints. The result must itself be concave and nonnegative.
    pub fn combine(terms: &[(f64, &Profile)]) -> Result<Self> {
        let mut xs: Vec<f64> = terms.iter().flat_map(|(_, p)| p.breakpoints()).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        *xs.last_mut().unwrap() = 1.0;
        xs[0] = 0.0;
        let value = |x: f64| terms.iter().map(|(c, p)| c * p.eval(x)).sum::<f64>();
        let scale = terms.iter().map(|(c, p)| c.abs() * p.max().1).sum::<f64>();
        let clean = |v: f64| if v < 0.0 && v > -1e-12 * scale { 0.0 } else { v };
        let pieces: Vec<Piece> = xs
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let kappa = terms
                    .iter()
                    .map(|(c, p)| c * p.pieces[p.piece_index(mid)].kappa)
                    .sum::<f64>();
                Piece { x0: w[0], x1: w[1], y0: clean(value(w[0])), y1: clean(value(w[1])), kappa }
            })
            .collect();
        Self::from_pieces(&pieces, DERIVED_CONCAVITY_TOL)
    }

    /// `(1 - t) h0 + t h1`.
    pub fn blend(h0: &Profile, h1: &Profile, t: f64) -> Result<Self> {
        Self::combine(&[(1.0 - t, h0), (t, h1)])
    }

    /// Piecewise-linear interpolant on `n + 1` uniform knots.
    pub fn to_piecewise_linear(&self, n: usize) -> Result<Self> {
        let knots = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                [x, self.eval(x)]
            })
            .collect();
        Self::from_kind(ProfileKind::PiecewiseLinear { knots }, DERIVED_CONCAVITY_TOL)
    }

    /// Sup-norm distance, evaluated on both break sets refined 16-fold.
    pub fn sup_distance(&self, other: &Profile) -> f64 {
        let mut xs: Vec<f64> = self.breakpoints();
        xs.extend(other.breakpoints());
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut worst: f64 = 0.0;
        for w in xs.windows(2) {
            for j in 0..=16 {
                let x = w[0] + (w[1] - w[0]) * j as f64 / 16.0;
                worst = worst.max((self.eval(x) - other.eval(x)).abs());
            }
        }
        worst
    }
}

/// `H(x) = ∫_0^x h / ∫_0^1 h` and its inverse.
#[derive(Clone, Copy, Debug)]
pub struct IntegralFunction<'a> {
    profile: &'a Profile,
}

impl IntegralFunction<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        self.profile.primitive(x) / self.profile.mass
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let p = self.profile;
        if y <= 0.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        let target = y * p.mass;
        let k = (p.cum.partition_point(|&c| c <= target) - 1).min(p.pieces.len() - 1);
        let piece = &p.pieces[k];
        let r = target - p.cum[k];
        let u = invert_piece(piece, r);
        (piece.x0 + u).clamp(0.0, 1.0)
    }
}

/// Solves `∫_0^u h = r` on one piece; the primitive is monotone.
fn invert_piece(p: &Piece, r: f64) -> f64 {
    let l = p.len();
    if r <= 0.0 {
        return 0.0;
    }
    let total = p.integral();
    if r >= total {
        return l;
    }
    // affine part: (y1-y0)/(2l) u² + y0 u = r, in the cancellation-free form
    let a = (p.y1 - p.y0) / l;
    let disc = (p.y0 * p.y0 + 2.0 * a * r).max(0.0);
    let guess = 2.0 * r / (p.y0 + disc.sqrt());
    if p.is_affine() {
        return guess.clamp(0.0, l);
    }
    let (mut lo, mut hi) = (0.0, l);
    let mut u = if guess.is_finite() { guess.clamp(0.0, l) } else { 0.5 * l };
    let tol = 1e-16 * total;
    for _ in 0..200 {
        let f = p.antiderivative(u) - r;
        if f.abs() <= tol {
            return u;
        }
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        if hi - lo <= 4.0 * f64::EPSILON * l {
            break;
        }
        let d = p.at(u);
        let newton = u - f / d;
        u = if d > 0.0 && newton >= lo && newton <= hi { newton } else { 0.5 * (lo + hi) };
    }
    u
}

fn build_pieces(kind: &ProfileKind) -> Result<Vec<Piece>> {
    let affine = |x0, y0, x1, y1| Piece { x0, x1, y0, y1, kappa: 0.0 };
    let finite_pos = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("{what} must be positive and finite, got {v}")))
        }
    };
    Ok(match kind {
        ProfileKind::Constant { c } => {
            finite_pos(*c, "constant value")?;
            vec![affine(0.0, *c, 1.0, *c)]
        }
        ProfileKind::Triangle { x0, scale } => {
            finite_pos(*scale, "triangle scale")?;
            if !(0.0..=1.0).contains(x0) {
                return Err(Error::InvalidProfile(format!("triangle apex {x0} outside [0, 1]")));
            }
            let top = 2.0 * scale;
            if *x0 == 0.0 {
                vec![affine(0.0, top, 1.0, 0.0)]
            } else if *x0 == 1.0 {
                vec![affine(0.0, 0.0, 1.0, top)]
            } else {
                vec![affine(0.0, 0.0, *x0, top), affine(*x0, top, 1.0, 0.0)]
            }
        }
        ProfileKind::Parabola { scale } => {
            finite_pos(*scale, "parabola scale")?;
            vec![Piece { x0: 0.0, x1: 1.0, y0: 0.0, y1: 0.0, kappa: 12.0 * scale }]
        }
        ProfileKind::PiecewiseLinear { knots } => {
            check_knots(knots)?;
            knots.windows(2).map(|w| affine(w[0][0], w[0][1], w[1][0], w[1][1])).collect()
        }
        ProfileKind::PiecewiseQuadratic { knots, curvature } => {
            check_knots(knots)?;
            if curvature.len() + 1 != knots.len() {
                return Err(Error::InvalidProfile("one curvature value per segment required".into()));
            }
            knots
                .windows(2)
                .zip(curvature)
                .map(|(w, &kappa)| {
                    if !(kappa >= 0.0 && kappa.is_finite()) {
                        return Err(Error::NonConcave { index: 0, excess: -kappa });
                    }
                    Ok(Piece { x0: w[0][0], x1: w[1][0], y0: w[0][1], y1: w[1][1], kappa })
                })
                .collect::<Result<_>>()?
        }
    })
}

fn check_knots(knots: &[[f64; 2]]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidProfile("at least two knots required".into()));
    }
    if knots[0][0] != 0.0 || knots[knots.len() - 1][0] != 1.0 {
        return Err(Error::UnsortedKnots);
    }
    if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
        return Err(Error::UnsortedKnots);
    }
    if knots.iter().any(|k| !(k[1] >= 0.0 && k[1].is_finite())) {
        return Err(Error::InvalidProfile("knot values must be nonnegative and finite".into()));
    }
    Ok(())
}

fn validate_pieces(pieces: &[Piece], tol: f64) -> Result<()> {
    if pieces.iter().all(|p| p.y0 == 0.0 && p.y1 == 0.0 && p.kappa == 0.0) {
        return Err(Error::AllZero);
    }
    for (i, w) in pieces.windows(2).enumerate() {
        let left = w[0].slope_at(w[0].len());
        let right = w[1].slope_at(0.0);
        let excess = right - left;
        if excess > tol {
            return Err(Error::NonConcave { index: i + 1, excess });
        }
    }
    Ok(())
}
