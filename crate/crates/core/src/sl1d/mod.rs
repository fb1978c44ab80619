//! One-dimensional weighted eigenvalue problems on `[0, 1]`.
//!
//! * Neumann: `-(h u')' = μ h u`, natural boundary conditions.
//! * Steklov-type: `-(h v')' = σ v`, natural boundary conditions.
//! * Hardy: `-w'' = σ w / h`, `w(0) = w(1) = 0`, which has the same first
//!   eigenvalue as the Steklov-type problem (`w = h v'`).
//!
//! All three are discretized with P1 elements on a uniform grid, giving a
//! symmetric tridiagonal pencil `K x = λ M x`.

mod assemble;
mod solve;

pub use assemble::{assemble_hardy, assemble_neumann, assemble_steklov};
pub use solve::{solve_pencil, solve_pencil_dense};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;

/// Default element count.
pub const DEFAULT_N: usize = 1024;
/// Element count used by the acceptance checks.
pub const ACCEPTANCE_N: usize = 2048;

/// Symmetric tridiagonal matrix: `diag[i] = A[i][i]`, `off[i] = A[i][i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(dim: usize) -> Self {
        Self { diag: vec![0.0; dim], off: vec![0.0; dim.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// `xᵀ A y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Natural,
    Dirichlet,
}

/// A discretized generalized eigenproblem `K x = λ M x` on a uniform grid.
///
/// With Dirichlet conditions the end nodes are removed, so the matrices have
/// `n - 1` rows; otherwise `n + 1`.
#[derive(Clone, Debug)]
pub struct Pencil1D {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub stiffness: Tridiagonal,
    pub mass: Tridiagonal,
    pub boundary: Boundary,
    /// `K = Σ_e edge_weights[e] (e_e - e_{e+1})(e_e - e_{e+1})ᵀ` before any
    /// Dirichlet reduction; used to evaluate `xᵀKx` without cancellation.
    pub edge_weights: Vec<f64>,
}

impl Pencil1D {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Pads a reduced vector with the Dirichlet zeros.
    pub fn full_vector(&self, x: &[f64]) -> Vec<f64> {
        match self.boundary {
            Boundary::Natural => x.to_vec(),
            Boundary::Dirichlet => std::iter::once(0.0).chain(x.iter().copied()).chain(std::iter::once(0.0)).collect(),
        }
    }

    /// `xᵀ K x` as a sum of squared differences.
    pub fn energy(&self, x: &[f64]) -> f64 {
        let full = self.full_vector(x);
        self.edge_weights.iter().enumerate().map(|(e, w)| w * (full[e + 1] - full[e]).powi(2)).sum()
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        self.energy(x) / self.mass.form(x, x)
    }
}

/// An eigenvalue estimate with its discrete eigenfunction and error bar.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenResult {
    /// Eigenvalue on the finest mesh.
    pub value: f64,
    /// Richardson-extrapolated value (equal to `value` when unreliable).
    pub extrapolated: f64,
    /// `|extrapolated - value|`.
    pub error: f64,
    pub n: usize,
    /// Nodal values on the full grid, normalized to unit mass-norm.
    pub eigenfunction: Vec<f64>,
    /// Whether the observed convergence order was close to two.
    #[serde(skip, default)]
    pub reliable: bool,
}

/// First nonzero eigenvalue of the weighted Neumann problem.
pub fn mu1(h: &Profile, n: usize) -> Result<EigenResult> {
    first_nonzero(n, |m| assemble_neumann(h, m))
}

/// First nonzero eigenvalue of `-(h v')' = σ v` with natural conditions.
pub fn sigma1(h: &Profile, n: usize) -> Result<EigenResult> {
    first_nonzero(n, |m| assemble_steklov(h, m))
}

/// First eigenvalue of the Hardy formulation `-w'' = σ w / h`, `w ∈ H¹₀`.
pub fn sigma1_hardy(h: &Profile, n: usize) -> Result<EigenResult> {
    first_nonzero(n, |m| assemble_hardy(h, m))
}

fn first_nonzero(n: usize, assemble: impl Fn(usize) -> Result<Pencil1D>) -> Result<EigenResult> {
    if n % 4 != 0 || n / 4 < 8 {
        return Err(Error::MeshTooCoarse(n));
    }
    let mut values = [0.0; 3];
    let mut finest = None;
    for (slot, m) in [n / 4, n / 2, n].into_iter().enumerate() {
        let pencil = assemble(m)?;
        let (value, vector) = lowest_nonzero(&pencil)?;
        values[slot] = value;
        if m == n {
            finest = Some(pencil.full_vector(&vector));
        }
    }
    let (extrapolated, reliable) = richardson(values);
    Ok(EigenResult {
        value: values[2],
        extrapolated,
        error: (extrapolated - values[2]).abs(),
        n,
        eigenfunction: finest.unwrap(),
        reliable,
    })
}

/// Lowest eigenpair after discarding a zero mode of a natural problem.
pub fn lowest_nonzero(p: &Pencil1D) -> Result<(f64, Vec<f64>)> {
    match p.boundary {
        Boundary::Dirichlet => {
            let mut r = solve_pencil(p, 1)?;
            Ok(r.remove(0))
        }
        Boundary::Natural => {
            let mut r = solve_pencil(p, 2)?;
            if r[0].0 < 1e-6 * r[1].0 {
                Ok(r.remove(1))
            } else {
                Ok(r.remove(0))
            }
        }
    }
}

/// Order-2 Richardson extrapolation of values on meshes `n/4, n/2, n`.
///
/// Returns the finest value unflagged when the observed order strays from two
/// by more than one half.
pub fn richardson(values: [f64; 3]) -> (f64, bool) {
    let d1 = values[0] - values[1];
    let d2 = values[1] - values[2];
    let finest = values[2];
    if d2 == 0.0 {
        return (finest, d1 == 0.0);
    }
    let order = (d1 / d2).log2();
    if !order.is_finite() || (order - 2.0).abs() > 0.5 {
        return (finest, false);
    }
    (finest + (finest - values[1]) / 3.0, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_weight_gives_pi_squared() {
        let one = Profile::constant(1.0).unwrap();
        let r = mu1(&one, 1024).unwrap();
        assert!((r.value - PI * PI).abs() / (PI * PI) < 1e-3);
        assert!((r.extrapolated - PI * PI).abs() < 1e-6);
        assert!(r.reliable);
        let s = sigma1(&one, 1024).unwrap();
        assert!((s.value - r.value).abs() < 1e-12 * r.value);
        let d = sigma1_hardy(&one, 1024).unwrap();
        assert!((d.extrapolated - PI * PI).abs() < 1e-6);
    }

    #[test]
    fn parabola_sigma_is_twelve() {
        let r = sigma1(&Profile::parabola(), 1024).unwrap();
        assert!((r.value - 12.0).abs() < 12e-3);
        assert!((r.extrapolated - 12.0).abs() < 1e-5);
    }

    #[test]
    fn eigen_result_json_fields() {
        let r = mu1(&Profile::constant(1.0).unwrap(), 32).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 5);
        for k in ["value", "extrapolated", "error", "n", "eigenfunction"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(r.eigenfunction.len(), 33);
    }

    #[test]
    fn eigenfunction_invariants() {
        let h = Profile::triangle(0.3);
        for (r, p) in [
            (mu1(&h, 256).unwrap(), assemble_neumann(&h, 256).unwrap()),
            (sigma1(&h, 256).unwrap(), assemble_steklov(&h, 256).unwrap()),
        ] {
            let q = p.rayleigh_quotient(&r.eigenfunction);
            assert!((q - r.value).abs() <= 1e-10 * r.value);
            let ones = vec![1.0; p.dim()];
            let c = p.mass.form(&ones, &r.eigenfunction);
            assert!(c.abs() < 1e-10);
            assert!((p.mass.form(&r.eigenfunction, &r.eigenfunction) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_meshes_are_rejected() {
        let one = Profile::constant(1.0).unwrap();
        assert_eq!(mu1(&one, 16).unwrap_err(), Error::MeshTooCoarse(16));
        assert!(assemble_neumann(&one, 1).is_err());
    }

    #[test]
    fn richardson_flags_wrong_order() {
        let (v, ok) = richardson([1.16, 1.04, 1.01]);
        assert!(ok && (v - 1.0).abs() < 1e-12);
        let (v, ok) = richardson([1.4, 1.2, 1.1]);
        assert!(!ok && v == 1.1);
    }
}
