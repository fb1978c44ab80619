//! P1 eigenvalue solvers on a [`Mesh2D`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::band::BandMatrix;
use super::{mesh, Mesh2D, ThinDomain};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::sl1d::{self, ACCEPTANCE_N};

/// Above this many unknowns the Neumann problem switches to shift-invert.
pub const DENSE_LIMIT: usize = 4000;

const SUBSPACE: usize = 6;
const MAX_ITER: usize = 500;

fn bandwidth(m: &Mesh2D) -> usize {
    m.triangles
        .iter()
        .flat_map(|t| [t[0].abs_diff(t[1]), t[1].abs_diff(t[2]), t[0].abs_diff(t[2])])
        .max()
        .unwrap_or(0)
}

/// Stiffness and consistent mass matrices.
pub fn assemble(m: &Mesh2D) -> (BandMatrix, BandMatrix) {
    let n = m.vertices.len();
    let bw = bandwidth(m);
    let mut k = BandMatrix::zeros(n, bw);
    let mut mass = BandMatrix::zeros(n, bw);
    for (e, t) in m.triangles.iter().enumerate() {
        let area = m.triangle_area(e);
        let p = t.map(|i| m.vertices[i]);
        // gradient of the barycentric coordinate of vertex a is the rotated
        // opposite edge divided by twice the area
        let grad: Vec<[f64; 2]> = (0..3)
            .map(|a| {
                let (b, c) = (p[(a + 1) % 3], p[(a + 2) % 3]);
                [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)]
            })
            .collect();
        for a in 0..3 {
            for b in 0..=a {
                let s = area * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
                k.add(t[a], t[b], s);
                let w = if a == b { area / 6.0 } else { area / 12.0 };
                mass.add(t[a], t[b], w);
            }
        }
    }
    (k, mass)
}

fn to_dense(a: &BandMatrix) -> DMatrix<f64> {
    let n = a.dim();
    let bw = a.bandwidth();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(bw)..=i {
            let v = a.get(i, j);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Eigenvalues of `A x = λ B x` in increasing order, `B` positive definite.
fn dense_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::ConvergenceFailure("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let li = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::ConvergenceFailure("mass factor is singular".into()))?;
    let c = &li * a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Lowest `count` Neumann eigenvalues of the mesh, the first being ≈ 0.
pub fn neumann_spectrum(m: &Mesh2D, count: usize) -> Result<Vec<f64>> {
    let (k, mass) = assemble(m);
    if k.dim() <= DENSE_LIMIT {
        let mut v = dense_generalized(&to_dense(&k), &to_dense(&mass))?;
        v.truncate(count);
        return Ok(v);
    }
    shift_invert(&k, &mass, count)
}

/// Block inverse iteration on `(K + M)⁻¹ M` with Rayleigh-Ritz projection.
fn shift_invert(k: &BandMatrix, mass: &BandMatrix, count: usize) -> Result<Vec<f64>> {
    let n = k.dim();
    let p = SUBSPACE.max(count + 2).min(n);
    let shifted = k
        .plus_scaled(1.0, mass)
        .cholesky()
        .ok_or_else(|| Error::ConvergenceFailure("shifted operator is not positive definite".into()))?;
    // deterministic start: low-frequency cosines in the vertex index
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|c| (0..n).map(|i| ((c as f64 + 0.5) * std::f64::consts::PI * i as f64 / n as f64).cos()).collect())
        .collect();
    let mut prev = vec![f64::INFINITY; count];
    for _ in 0..MAX_ITER {
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|v| {
                let mut r = mass.mul(v);
                shifted.solve(&mut r);
                r
            })
            .collect();
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.mul(v)).collect();
        let my: Vec<Vec<f64>> = y.iter().map(|v| mass.mul(v)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(s, t)| s * t).sum::<f64>();
        let kp = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let mp = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));
        let l = mp
            .cholesky()
            .ok_or_else(|| Error::ConvergenceFailure("Ritz basis lost rank".into()))?
            .l();
        let li = l.try_inverse().ok_or_else(|| Error::ConvergenceFailure("Ritz basis lost rank".into()))?;
        let c = &li * kp * li.transpose();
        let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let coeff = li.transpose() * &eig.eigenvectors;
        x = order
            .iter()
            .map(|&c| {
                let q: DVector<f64> = coeff.column(c).into_owned();
                (0..n).map(|i| (0..p).map(|j| q[j] * y[j][i]).sum()).collect()
            })
            .collect();
        let vals: Vec<f64> = order.iter().take(count).map(|&c| eig.eigenvalues[c]).collect();
        let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if vals.iter().zip(&prev).all(|(v, w)| (v - w).abs() <= 1e-13 * scale) {
            return Ok(vals);
        }
        prev = vals;
    }
    Err(Error::ConvergenceFailure(format!("subspace iteration did not settle in {MAX_ITER} steps")))
}

/// First nonzero Neumann eigenvalue of the meshed domain.
pub fn mu1_2d(m: &Mesh2D) -> Result<f64> {
    Ok(neumann_spectrum(m, 2)?[1])
}

/// Lowest `count` Steklov eigenvalues via the Dirichlet-to-Neumann reduction.
pub fn steklov_spectrum(m: &Mesh2D, count: usize) -> Result<Vec<f64>> {
    let (k, _) = assemble(m);
    let n = k.dim();
    let bnodes = m.boundary_nodes();
    let mut slot = vec![usize::MAX; n];
    let mut is_boundary = vec![false; n];
    for (j, &b) in bnodes.iter().enumerate() {
        slot[b] = j;
        is_boundary[b] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&i| !is_boundary[i]).collect();
    for (j, &i) in interior.iter().enumerate() {
        slot[i] = j;
    }
    let (nb, ni) = (bnodes.len(), interior.len());
    let bw = k.bandwidth();

    let mut sigma = DMatrix::zeros(nb, nb);
    for (a, &i) in bnodes.iter().enumerate() {
        for (b, &j) in bnodes.iter().enumerate() {
            if i.abs_diff(j) <= bw {
                sigma[(a, b)] = k.get(i, j);
            }
        }
    }
    if ni > 0 {
        // interior numbering keeps the vertex order, so the band survives
        let (isb, kr) = (&is_boundary, &k);
        let ibw = interior
            .iter()
            .flat_map(|&i| {
                let lo = i.saturating_sub(bw);
                (lo..i).filter(move |&j| !isb[j] && kr.get(i, j) != 0.0).map(move |j| (i, j))
            })
            .map(|(i, j)| slot[i] - slot[j])
            .max()
            .unwrap_or(0);
        let mut kii = BandMatrix::zeros(ni, ibw);
        for &i in &interior {
            for j in i.saturating_sub(bw)..=i {
                if !is_boundary[j] {
                    let v = k.get(i, j);
                    if v != 0.0 {
                        kii.add(slot[i], slot[j], v);
                    }
                }
            }
        }
        let chol = kii.cholesky().ok_or(Error::SingularInterior)?;
        let columns: Vec<Vec<f64>> = bnodes
            .par_iter()
            .map(|&b| {
                let col: Vec<f64> = interior
                    .iter()
                    .map(|&i| if i.abs_diff(b) <= bw { k.get(i, b) } else { 0.0 })
                    .collect();
                let mut x = col.clone();
                chol.solve(&mut x);
                x
            })
            .collect();
        for (a, &bi) in bnodes.iter().enumerate() {
            let near: Vec<(usize, f64)> = interior
                .iter()
                .filter(|&&i| i.abs_diff(bi) <= bw)
                .map(|&i| (slot[i], k.get(i, bi)))
                .filter(|&(_, v)| v != 0.0)
                .collect();
            for (b, x) in columns.iter().enumerate() {
                sigma[(a, b)] -= near.iter().map(|&(s, v)| v * x[s]).sum::<f64>();
            }
        }
    }
    let mut bmass = DMatrix::zeros(nb, nb);
    for (&[a, b], len) in m.boundary.iter().zip(m.edge_weights()) {
        let (a, b) = (slot[a], slot[b]);
        bmass[(a, a)] += len / 3.0;
        bmass[(b, b)] += len / 3.0;
        bmass[(a, b)] += len / 6.0;
        bmass[(b, a)] += len / 6.0;
    }
    let mut v = dense_generalized(&sigma, &bmass)?;
    v.truncate(count);
    Ok(v)
}

/// First nonzero Steklov eigenvalue of the meshed domain.
pub fn sigma1_2d(m: &Mesh2D) -> Result<f64> {
    Ok(steklov_spectrum(m, 2)?[1])
}

/// One row of the thin-limit convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub epsilon: f64,
    pub mu_2d: f64,
    pub sigma_2d: f64,
    pub mu_1d: f64,
    /// `ε σ₁(h) / 2`.
    pub sigma_1d_scaled: f64,
    /// `|μ₁(Ω_ε) - μ₁(h)| / μ₁(h)`.
    pub mu_gap: f64,
    /// `|2σ₁(Ω_ε)/ε - σ₁(h)| / σ₁(h)`.
    pub sigma_gap: f64,
}

/// Planar eigenvalues of `Ω_ε` with `h₊ = h₋ = h/2` against the 1D limits.
pub fn limit_check(h: &Profile, eps_list: &[f64], nx: usize, ny: usize) -> Result<Vec<LimitRow>> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized(h.mass()));
    }
    let mu_1d = sl1d::mu1(h, ACCEPTANCE_N)?.extrapolated;
    let sigma_1d = sl1d::sigma1(h, ACCEPTANCE_N)?.extrapolated;
    eps_list
        .par_iter()
        .map(|&eps| {
            let m = mesh(&ThinDomain::symmetric(h, eps)?, nx, ny)?;
            let mu_2d = mu1_2d(&m)?;
            let sigma_2d = sigma1_2d(&m)?;
            Ok(LimitRow {
                epsilon: eps,
                mu_2d,
                sigma_2d,
                mu_1d,
                sigma_1d_scaled: eps * sigma_1d / 2.0,
                mu_gap: (mu_2d - mu_1d).abs() / mu_1d,
                sigma_gap: (2.0 * sigma_2d / eps - sigma_1d).abs() / sigma_1d,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rect(eps: f64, nx: usize, ny: usize) -> Mesh2D {
        mesh(&ThinDomain::symmetric(&Profile::constant(1.0).unwrap(), eps).unwrap(), nx, ny).unwrap()
    }

    #[test]
    fn rectangle_neumann_matches_separable_value() {
        let m = rect(0.1, 256, 4);
        let v = neumann_spectrum(&m, 2).unwrap();
        assert!(v[0].abs() <= 1e-8 * v[1]);
        assert!((v[1] - PI * PI).abs() / (PI * PI) < 5e-3, "{}", v[1]);
    }

    #[test]
    fn shift_invert_agrees_with_dense() {
        let m = rect(0.2, 32, 3);
        let (k, mass) = assemble(&m);
        let dense = neumann_spectrum(&m, 3).unwrap();
        let iter = shift_invert(&k, &mass, 3).unwrap();
        for i in 1..3 {
            assert!((dense[i] - iter[i]).abs() < 1e-9 * dense[i], "{dense:?} {iter:?}");
        }
    }

    #[test]
    fn rectangle_steklov_matches_side_corrected_limit() {
        // the short sides add 2ε to the boundary mass of cos(πx)
        let m = rect(0.1, 256, 4);
        let v = steklov_spectrum(&m, 2).unwrap();
        assert!(v[0].abs() <= 1e-8 * v[1]);
        let first_order = PI * PI / (1.0 + 2.0 * 0.1);
        assert!((2.0 * v[1] / 0.1 - first_order).abs() / first_order < 0.02, "{}", v[1]);
    }

    #[test]
    fn steklov_is_reflection_invariant() {
        let h = Profile::triangle(0.3);
        let m = mesh(&ThinDomain::symmetric(&h, 0.1).unwrap(), 64, 3).unwrap();
        let a = sigma1_2d(&m).unwrap();
        let b = sigma1_2d(&m.reflect_x()).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
        let p = mesh(&ThinDomain::symmetric(&Profile::parabola(), 0.1).unwrap(), 64, 3).unwrap();
        let reflected = mesh(&ThinDomain::symmetric(&Profile::parabola().reflect(), 0.1).unwrap(), 64, 3).unwrap();
        assert!((sigma1_2d(&p).unwrap() - sigma1_2d(&reflected).unwrap()).abs() < 1e-8);
    }
}
