//! Spectral collocation on the half line `(0, ∞)`.
//!
//! The crate provides two orthogonal families suited to semi-infinite
//! domains — rational Chebyshev functions (Chebyshev polynomials composed
//! with the algebraic map `(x - L)/(x + L)`) and transformed Hermite
//! functions (normalized Hermite functions composed with the log-sinh map
//! `ln(sinh(kx))`) — together with the collocation grids, quadrature rules,
//! and a damped Newton solver needed to turn a nonlinear ODE on `(0, ∞)`
//! into a square algebraic system.
//!
//! Everything is wired together in [`volterra`], which solves the converted
//! population-growth equation `κ y'' = y' - (y')² - y y'` by collocation in
//! either basis and extracts the population peak `u_max`. An independent
//! adaptive Runge-Kutta integrator in [`oracle`] cross-checks the spectral
//! solutions pointwise.
//!
//! With the default `parallel` feature the finite-difference Jacobian and
//! other embarrassingly parallel inner loops run on rayon; disabling the
//! feature falls back to equivalent sequential code paths (same results,
//! bit for bit).

pub mod basis;
pub mod nodes;
pub mod oracle;
pub mod solver;
pub mod volterra;

pub use basis::{BasisSpec, EvalTriple};
pub use nodes::CollocationGrid;
pub use solver::{NewtonConfig, SolveReport};
pub use volterra::{ModelParams, SpectralSolution};
