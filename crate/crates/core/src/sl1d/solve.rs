//! Solvers for the symmetric tridiagonal pencil `K x = λ M x`.
//!
//! The main path locates eigenvalues by Sturm-sequence bisection (inertia of
//! `K - s M` from its LDLᵀ pivots) and recovers vectors by inverse iteration.
//! The reported eigenvalue is the Rayleigh quotient of that vector, evaluated
//! through squared differences so that it keeps full relative accuracy.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::{Pencil1D, Tridiagonal};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;

/// Number of eigenvalues of the pencil strictly below `s`.
fn sturm_count(k: &Tridiagonal, m: &Tridiagonal, s: f64) -> usize {
    let n = k.dim();
    let mut count = 0;
    let mut d = k.diag[0] - s * m.diag[0];
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..n {
        if i > 0 {
            let b = k.off[i - 1] - s * m.off[i - 1];
            d = k.diag[i] - s * m.diag[i] - b * b / d;
        }
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bisection for the `j`-th smallest eigenvalue (0-based).
fn bisect(k: &Tridiagonal, m: &Tridiagonal, j: usize) -> f64 {
    let mut lo = -1.0;
    let mut hi = 1.0;
    while sturm_count(k, m, hi) <= j {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(k, m, mid) <= j {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// LU factorization with partial pivoting of a tridiagonal matrix.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(mut dl: Vec<f64>, mut d: Vec<f64>, mut du: Vec<f64>) -> Self {
        let n = d.len();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = d.iter().chain(&dl).chain(&du).fold(0.0_f64, |a, v| a.max(v.abs()));
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * scale;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * scale;
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn m_normalize(m: &Tridiagonal, x: &mut [f64]) {
    let norm = m.form(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

fn m_orthogonalize(m: &Tridiagonal, x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = m.form(b, x);
        x.iter_mut().zip(b).for_each(|(v, bv)| *v -= c * bv);
    }
}

fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let pivot = if x[0].abs() > 1e-8 * max {
        x[0]
    } else {
        *x.iter().find(|v| v.abs() == max).unwrap()
    };
    if pivot < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The `count` smallest eigenpairs, ascending, with unit `M`-norm vectors.
pub fn solve_pencil(p: &Pencil1D, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let (k, m) = (&p.stiffness, &p.mass);
    let n = k.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidInput(format!("cannot extract {count} eigenpairs of a {n}-dimensional pencil")));
    }
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for j in 0..count {
        let shift = bisect(k, m, j);
        let dl: Vec<f64> = k.off.iter().zip(&m.off).map(|(a, b)| a - shift * b).collect();
        let d: Vec<f64> = k.diag.iter().zip(&m.diag).map(|(a, b)| a - shift * b).collect();
        let lu = TridiagonalLu::factor(dl.clone(), d, dl);
        let basis: Vec<Vec<f64>> = out.iter().map(|(_, v)| v.clone()).collect();

        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.731 + 0.3).sin()).collect();
        m_orthogonalize(m, &mut x, &basis);
        m_normalize(m, &mut x);
        let mut converged = false;
        let mut previous = f64::INFINITY;
        for _ in 0..MAX_ITERATIONS {
            let mut y = m.mul(&x);
            lu.solve(&mut y);
            m_orthogonalize(m, &mut y, &basis);
            m_normalize(m, &mut y);
            let dot = m.form(&x, &y);
            if dot < 0.0 {
                y.iter_mut().for_each(|v| *v = -*v);
            }
            let change = x.iter().zip(&y).fold(0.0_f64, |a, (u, v)| a.max((u - v).abs()));
            let scale = y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            x = y;
            // stop once the update is tiny or has stalled at round-off level
            if change <= 1e-13 * scale || (change <= 1e-8 * scale && change >= 0.5 * previous) {
                converged = true;
                break;
            }
            previous = change;
        }
        if !converged {
            return Err(Error::ConvergenceFailure(format!("inverse iteration for eigenvalue {j}")));
        }
        fix_sign(&mut x);
        out.push((p.rayleigh_quotient(&x), x));
    }
    Ok(out)
}

/// Dense reference solver: Cholesky reduction `L⁻¹ K L⁻ᵀ` and a symmetric
/// eigendecomposition. Intended for cross-checks on meshes up to 4096.
pub fn solve_pencil_dense(p: &Pencil1D, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = p.dim();
    if n > 4097 {
        return Err(Error::InvalidInput(format!("dense solver limited to 4097 unknowns, got {n}")));
    }
    let kd = p.stiffness.to_dense();
    let chol = Cholesky::new(p.mass.to_dense())
        .ok_or_else(|| Error::ConvergenceFailure("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let half = l.solve_lower_triangular(&kd).unwrap();
    let c: DMatrix<f64> = l.solve_lower_triangular(&half.transpose()).unwrap();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    Ok(order
        .into_iter()
        .take(count)
        .map(|i| {
            let z = eig.eigenvectors.column(i).into_owned();
            let x = lt.solve_upper_triangular(&z).unwrap();
            let mut x: Vec<f64> = x.iter().copied().collect();
            m_normalize(&p.mass, &mut x);
            fix_sign(&mut x);
            (eig.eigenvalues[i], x)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::{assemble_hardy, assemble_neumann, assemble_steklov};
    use super::*;
    use crate::profile::Profile;

    #[test]
    fn lu_solves_random_tridiagonal() {
        let n = 9;
        let d: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.3).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 1.0 + 0.2 * i as f64).collect();
        let a = Tridiagonal { diag: d.clone(), off: off.clone() };
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut b = a.mul(&x);
        TridiagonalLu::factor(off.clone(), d, off).solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sturm_count_matches_dense_spectrum() {
        let p = assemble_neumann(&Profile::triangle(0.3), 16).unwrap();
        let dense = solve_pencil_dense(&p, 17).unwrap();
        for (j, (v, _)) in dense.iter().enumerate().skip(1) {
            assert_eq!(sturm_count(&p.stiffness, &p.mass, *v * (1.0 - 1e-6)), j);
        }
    }

    #[test]
    fn bisection_and_dense_agree() {
        let hs = [Profile::constant(1.0).unwrap(), Profile::triangle(0.0), Profile::parabola(), Profile::triangle(0.37)];
        for h in &hs {
            for p in [assemble_neumann(h, 512).unwrap(), assemble_steklov(h, 512).unwrap(), assemble_hardy(h, 512).unwrap()] {
                let a = solve_pencil(&p, 3).unwrap();
                let b = solve_pencil_dense(&p, 3).unwrap();
                let natural = p.boundary == super::super::Boundary::Natural;
                for j in 0..3 {
                    if natural && j == 0 {
                        // zero mode: both at round-off level
                        assert!(a[0].0.abs() < 1e-9 && b[0].0.abs() < 1e-9);
                        continue;
                    }
                    let tol = 1e-10 * a[j].0.max(1.0);
                    assert!((a[j].0 - b[j].0).abs() <= tol, "{:?} {j}: {} vs {}", h.kind(), a[j].0, b[j].0);
                }
            }
        }
    }
}
