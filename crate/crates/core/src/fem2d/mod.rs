//! Planar thin domains `Ω_ε = {0 <= x <= 1, -ε h₋(x) <= y <= ε h₊(x)}`.
//!
//! As `ε → 0`, `μ₁(Ω_ε) → μ₁(h)` and `σ₁(Ω_ε) = ε σ₁(h)/2 + o(ε)` with
//! `h = h₊ + h₋`. This module meshes `Ω_ε` with a structured triangulation and
//! computes both planar eigenvalues with P1 elements.

mod band;
mod eigen;

pub use band::{BandCholesky, BandMatrix};
pub use eigen::{assemble, limit_check, mu1_2d, neumann_spectrum, sigma1_2d, steklov_spectrum, LimitRow, DENSE_LIMIT};

use crate::error::{Error, Result};
use crate::profile::Profile;

/// The region between `-ε h₋` and `ε h₊` over `[0, 1]`.
#[derive(Clone, Debug)]
pub struct ThinDomain {
    pub h_plus: Profile,
    pub h_minus: Profile,
    pub epsilon: f64,
}

impl ThinDomain {
    pub fn new(h_plus: Profile, h_minus: Profile, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::DegenerateDomain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { h_plus, h_minus, epsilon })
    }

    /// Splits `h` evenly above and below the axis.
    pub fn symmetric(h: &Profile, epsilon: f64) -> Result<Self> {
        let half = h.scaled(0.5)?;
        Self::new(half.clone(), half, epsilon)
    }

    pub fn top(&self, x: f64) -> f64 {
        self.epsilon * self.h_plus.eval(x)
    }

    pub fn bottom(&self, x: f64) -> f64 {
        -self.epsilon * self.h_minus.eval(x)
    }
}

/// A triangulation with counter-clockwise triangles and a closed boundary loop.
#[derive(Clone, Debug)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges in loop order; consecutive edges share a vertex.
    pub boundary: Vec<[usize; 2]>,
}

fn signed_area(v: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let [a, b, c] = [v[t[0]], v[t[1]], v[t[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh2D {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| signed_area(&self.vertices, t)).sum()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    /// Arc length of each boundary edge.
    pub fn edge_weights(&self) -> Vec<f64> {
        self.boundary.iter().map(|&[a, b]| edge_length(&self.vertices, a, b)).collect()
    }

    pub fn boundary_length(&self) -> f64 {
        self.edge_weights().iter().sum()
    }

    /// Boundary vertices in loop order.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        self.boundary.iter().map(|e| e[0]).collect()
    }

    /// The mirror image under `x ↦ 1 - x`, with orientation restored.
    pub fn reflect_x(&self) -> Mesh2D {
        Mesh2D {
            vertices: self.vertices.iter().map(|&[x, y]| [1.0 - x, y]).collect(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            boundary: self.boundary.iter().rev().map(|&[a, b]| [b, a]).collect(),
        }
    }

    /// Checks positive areas and a single closed boundary loop.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.triangles.iter().enumerate() {
            if !(signed_area(&self.vertices, t) > 0.0) {
                return Err(Error::DegenerateDomain(format!("triangle {i} has nonpositive area")));
            }
        }
        let b = &self.boundary;
        if b.is_empty() {
            return Err(Error::DegenerateDomain("empty boundary".into()));
        }
        for k in 0..b.len() {
            let next = b[(k + 1) % b.len()];
            if b[k][1] != next[0] || b[k][0] == b[k][1] {
                return Err(Error::DegenerateDomain(format!("boundary loop broken at edge {k}")));
            }
        }
        let mut seen = self.boundary_nodes();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateDomain("boundary loop visits a vertex twice".into()));
        }
        Ok(())
    }
}

fn edge_length(v: &[[f64; 2]], a: usize, b: usize) -> f64 {
    (v[a][0] - v[b][0]).hypot(v[a][1] - v[b][1])
}

/// Structured mesh of `Ω_ε` with `nx + 1` stations and `ny + 1` nodes each.
///
/// Stations where `h₊ + h₋` vanishes collapse to one node joined to the
/// neighbouring station by a fan of triangles.
pub fn mesh(d: &ThinDomain, nx: usize, ny: usize) -> Result<Mesh2D> {
    if nx < 16 || ny < 2 {
        return Err(Error::InvalidInput(format!("need nx >= 16 and ny >= 2, got {nx}, {ny}")));
    }
    let mut vertices = Vec::new();
    // station -> node indices bottom to top
    let mut stations: Vec<Vec<usize>> = Vec::with_capacity(nx + 1);
    for i in 0..=nx {
        let x = i as f64 / nx as f64;
        let (lo, hi) = (d.bottom(x), d.top(x));
        if hi - lo <= 0.0 {
            stations.push(vec![vertices.len()]);
            vertices.push([x, hi]);
        } else {
            let ids = (0..=ny)
                .map(|j| {
                    let y = if j == ny { hi } else { lo + (hi - lo) * j as f64 / ny as f64 };
                    vertices.push([x, y]);
                    vertices.len() - 1
                })
                .collect();
            stations.push(ids);
        }
    }
    let mut triangles = Vec::new();
    for i in 0..nx {
        let (a, b) = (&stations[i], &stations[i + 1]);
        match (a.len(), b.len()) {
            (1, 1) => {
                return Err(Error::DegenerateDomain(format!("profile vanishes on [{}, {}]", i, i + 1)));
            }
            (1, _) => triangles.extend((0..ny).map(|j| [a[0], b[j], b[j + 1]])),
            (_, 1) => triangles.extend((0..ny).map(|j| [a[j], b[0], a[j + 1]])),
            _ => {
                for j in 0..ny {
                    triangles.push([a[j], b[j], b[j + 1]]);
                    triangles.push([a[j], b[j + 1], a[j + 1]]);
                }
            }
        }
    }
    for t in triangles.iter_mut() {
        if signed_area(&vertices, t) < 0.0 {
            t.swap(1, 2);
        }
    }
    // counter-clockwise loop: bottom left to right, right side up, top right
    // to left, left side down; repeated vertices give zero-length edges
    let mut loop_nodes: Vec<usize> = Vec::new();
    for s in &stations {
        loop_nodes.push(s[0]);
    }
    loop_nodes.extend(stations[nx].iter().skip(1));
    for s in stations.iter().rev() {
        loop_nodes.push(*s.last().unwrap());
    }
    loop_nodes.extend(stations[0].iter().rev().skip(1));
    loop_nodes.dedup();
    if loop_nodes.len() > 1 && loop_nodes[0] == *loop_nodes.last().unwrap() {
        loop_nodes.pop();
    }
    let boundary = (0..loop_nodes.len()).map(|k| [loop_nodes[k], loop_nodes[(k + 1) % loop_nodes.len()]]).collect();
    let m = Mesh2D { vertices, triangles, boundary };
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rectangle(eps: f64) -> ThinDomain {
        ThinDomain::symmetric(&Profile::constant(1.0).unwrap(), eps).unwrap()
    }

    #[test]
    fn rectangle_mesh_counts() {
        let m = mesh(&rectangle(0.1), 16, 2).unwrap();
        assert_eq!(m.vertices.len(), 17 * 3);
        assert_eq!(m.triangles.len(), 16 * 2 * 2);
        assert!((m.area() - 0.1).abs() < 1e-12);
        assert!((m.boundary_length() - 2.0 * 1.1).abs() < 1e-12);
        assert_eq!(m.boundary.len(), 2 * 16 + 2 * 2);
    }

    #[test]
    fn triangle_profile_collapses_at_the_end() {
        let d = ThinDomain::symmetric(&Profile::triangle(0.0), 0.1).unwrap();
        let m = mesh(&d, 16, 4).unwrap();
        assert_eq!(m.vertices.len(), 16 * 5 + 1);
        assert!((0..m.triangles.len()).all(|t| m.triangle_area(t) > 0.0));
        // trapezoid rule is exact for the piecewise-linear profile
        assert!((m.area() - 0.1).abs() < 1e-12);
        let d = ThinDomain::symmetric(&Profile::parabola(), 0.05).unwrap();
        let m = mesh(&d, 32, 4).unwrap();
        let trapezoid: f64 = (0..32)
            .map(|i| {
                let (a, b) = (i as f64 / 32.0, (i + 1) as f64 / 32.0);
                0.5 * 0.05 * (Profile::parabola().eval(a) + Profile::parabola().eval(b)) / 32.0
            })
            .sum();
        assert!((m.area() - trapezoid).abs() < 1e-12);
        m.validate().unwrap();
    }

    #[test]
    fn reflection_keeps_validity() {
        let d = ThinDomain::symmetric(&Profile::triangle(0.3), 0.1).unwrap();
        let m = mesh(&d, 20, 3).unwrap().reflect_x();
        m.validate().unwrap();
    }

    #[test]
    fn nonpositive_epsilon_is_rejected() {
        assert!(matches!(rectangle_err(0.0), Err(Error::DegenerateDomain(_))));
    }

    fn rectangle_err(eps: f64) -> Result<ThinDomain> {
        ThinDomain::symmetric(&Profile::constant(1.0).unwrap(), eps)
    }
}
