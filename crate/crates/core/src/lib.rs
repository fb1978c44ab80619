//! Spectral analysis of thinning convex domains.
//!
//! In the thin limit a planar convex domain collapses onto a segment and its
//! first Neumann and Steklov eigenvalues are governed by one-dimensional
//! weighted problems driven by a concave profile `h`:
//!
//! * `μ₁(h)`: `-(h u')' = μ h u` with natural boundary conditions,
//! * `σ₁(h)`: `-(h v')' = σ v` with natural boundary conditions.
//!
//! The crate provides exact profile arithmetic ([`profile`]), finite element
//! solvers for both problems and the Hardy-type Dirichlet reformulation of
//! `σ₁` ([`sl1d`]), Bessel closed forms for triangle profiles ([`bessel`]),
//! the `♯`-rearrangement ([`rearrange`]), the Neumann-to-Steklov transform
//! ([`gtransform`]), planar thin-domain solvers ([`fem2d`]) and batch studies
//! ([`experiments`]). [`verify`] runs the acceptance checks and [`cli`] wires
//! everything to the `thinspec` binary.

pub mod bessel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fem2d;
pub mod gtransform;
pub mod profile;
pub mod quadrature;
pub mod rearrange;
pub mod sl1d;
pub mod verify;

pub use error::{Error, Result};
pub use profile::{IntegralFunction, Profile, ProfileKind};
