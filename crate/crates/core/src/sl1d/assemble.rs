//! P1 assembly of the three pencils.

use super::{Boundary, Pencil1D, Tridiagonal};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quadrature::{integrate, inverse_affine_moments, GAUSS4, GAUSS8};

/// Smallest element count accepted by the assemblers.
pub const MIN_ELEMENTS: usize = 2;

fn grid(n: usize) -> Result<Vec<f64>> {
    if n < MIN_ELEMENTS {
        return Err(Error::MeshTooCoarse(n));
    }
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Element `[a, b]` cut at the profile breakpoints strictly inside it.
fn cuts(breaks: &[f64], a: f64, b: f64) -> Vec<f64> {
    let tol = 1e-14;
    let mut out = vec![a];
    let start = breaks.partition_point(|&x| x <= a + tol);
    out.extend(breaks[start..].iter().copied().take_while(|&x| x < b - tol));
    out.push(b);
    out
}

/// `(∫_e h) / L²` per element: the stiffness weights of `∫ h φi' φj'`.
fn weighted_edges(h: &Profile, nodes: &[f64]) -> Vec<f64> {
    nodes
        .windows(2)
        .map(|w| {
            let l = w[1] - w[0];
            h.integrate(w[0], w[1]) / (l * l)
        })
        .collect()
}

fn stiffness_from_edges(edges: &[f64]) -> Tridiagonal {
    let mut k = Tridiagonal::zeros(edges.len() + 1);
    for (e, &w) in edges.iter().enumerate() {
        k.diag[e] += w;
        k.diag[e + 1] += w;
        k.off[e] = -w;
    }
    k
}

fn dirichlet_reduce(t: &Tridiagonal) -> Tridiagonal {
    let n = t.dim();
    Tridiagonal { diag: t.diag[1..n - 1].to_vec(), off: t.off[1..n - 2].to_vec() }
}

/// `K_ij = ∫ h φi' φj'`, `M_ij = ∫ h φi φj`, natural boundary conditions.
///
/// Element integrals are split at the profile breakpoints, where 4-point Gauss
/// is exact (the integrand is a polynomial of degree at most four).
pub fn assemble_neumann(h: &Profile, n: usize) -> Result<Pencil1D> {
    let nodes = grid(n)?;
    let edges = weighted_edges(h, &nodes);
    let breaks = h.breakpoints();
    let mut m = Tridiagonal::zeros(n + 1);
    for e in 0..n {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let l = b - a;
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        for w in cuts(&breaks, a, b).windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[0] + w[1]);
            for &(g, wt) in &GAUSS4 {
                let x = mid + half * g;
                let t = (x - a) / l;
                let hw = h.eval(x) * wt * half;
                m00 += hw * (1.0 - t) * (1.0 - t);
                m01 += hw * t * (1.0 - t);
                m11 += hw * t * t;
            }
        }
        m.diag[e] += m00;
        m.diag[e + 1] += m11;
        m.off[e] += m01;
    }
    Ok(Pencil1D { n, nodes, stiffness: stiffness_from_edges(&edges), mass: m, boundary: Boundary::Natural, edge_weights: edges })
}

/// `K_ij = ∫ h φi' φj'`, `M_ij = ∫ φi φj`, natural boundary conditions.
pub fn assemble_steklov(h: &Profile, n: usize) -> Result<Pencil1D> {
    let nodes = grid(n)?;
    let edges = weighted_edges(h, &nodes);
    let l = 1.0 / n as f64;
    let mut m = Tridiagonal::zeros(n + 1);
    for e in 0..n {
        m.diag[e] += l / 3.0;
        m.diag[e + 1] += l / 3.0;
        m.off[e] = l / 6.0;
    }
    Ok(Pencil1D { n, nodes, stiffness: stiffness_from_edges(&edges), mass: m, boundary: Boundary::Natural, edge_weights: edges })
}

/// `K_ij = ∫ φi' φj'`, `M_ij = ∫ φi φj / h`, end nodes removed.
///
/// On affine pieces of `h` the weight `1/h` is integrated in closed form; on
/// curved pieces by 8-point Gauss. Entries coupling to the removed end nodes
/// are never formed, so a weight vanishing at `x = 0` or `x = 1` is harmless.
pub fn assemble_hardy(h: &Profile, n: usize) -> Result<Pencil1D> {
    let nodes = grid(n)?;
    for (i, &x) in nodes.iter().enumerate().take(n).skip(1) {
        if !(h.eval(x) > 0.0) {
            return Err(Error::SingularWeight(i));
        }
    }
    let l = 1.0 / n as f64;
    let edges = vec![1.0 / l; n];
    let breaks = h.breakpoints();
    let pieces = h.pieces();
    let mut m = Tridiagonal::zeros(n + 1);
    for e in 0..n {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let live = [e != 0, e + 1 != n];
        let mut local = [0.0; 3];
        for w in cuts(&breaks, a, b).windows(2) {
            let (c, d) = (w[0], w[1]);
            let mid = 0.5 * (c + d);
            let k = pieces.partition_point(|p| p.x1 < mid).min(pieces.len() - 1);
            let piece = &pieces[k];
            // basis values (left, right) at the sub-interval ends
            let phi = |x: f64| [(b - x) / l, (x - a) / l];
            let (pc, pd) = (phi(c), phi(d));
            if piece.is_affine() {
                let (hc, hd) = (piece.eval(c).max(0.0), piece.eval(d).max(0.0));
                let mom = inverse_affine_moments(hc, hd);
                let pair = |i: usize, j: usize| {
                    let terms = [
                        (pc[i] * pc[j], mom[0]),
                        (pc[i] * pd[j] + pd[i] * pc[j], mom[1]),
                        (pd[i] * pd[j], mom[2]),
                    ];
                    terms.iter().filter(|(coef, _)| *coef != 0.0).map(|(coef, mv)| coef * mv).sum::<f64>() * (d - c)
                };
                if live[0] {
                    local[0] += pair(0, 0);
                }
                if live[0] && live[1] {
                    local[1] += pair(0, 1);
                }
                if live[1] {
                    local[2] += pair(1, 1);
                }
            } else {
                let f = |i: usize, j: usize| {
                    integrate(&GAUSS8, c, d, |x| {
                        let p = phi(x);
                        p[i] * p[j] / piece.eval(x)
                    })
                };
                if live[0] {
                    local[0] += f(0, 0);
                }
                if live[0] && live[1] {
                    local[1] += f(0, 1);
                }
                if live[1] {
                    local[2] += f(1, 1);
                }
            }
        }
        m.diag[e] += local[0];
        m.off[e] += local[1];
        m.diag[e + 1] += local[2];
    }
    let k = stiffness_from_edges(&edges);
    Ok(Pencil1D {
        n,
        nodes,
        stiffness: dirichlet_reduce(&k),
        mass: dirichlet_reduce(&m),
        boundary: Boundary::Dirichlet,
        edge_weights: edges,
    })
}
