//! The converted population-growth model `κ y'' = y' - (y')² - y y'` on
//! `(0, ∞)`, solved by collocation in either half-line basis.
//!
//! `u(t)` is the scaled population and `y(t) = ∫₀ᵗ u` its cumulative toxin
//! integral; converting the original integro-differential equation to the
//! ODE above turns collocation into a square nonlinear system in the
//! expansion coefficients. The population peak has the closed form
//! `u_max = 1 + κ ln(κ/(1 + κ - u₀))`, which every solve is measured
//! against.

pub mod presets;
mod solution;
mod system;
mod umax;

pub use solution::SpectralSolution;
pub use system::{hfc_assemble, hfc_solve, rcc_assemble, rcc_solve, CollocationSystem, SolvedRun};
pub use umax::UmaxEstimate;

use crate::basis::BasisError;
use crate::nodes::GridError;
use crate::solver::SolverError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VolterraError {
    #[error("invalid model parameters: {reason}")]
    InvalidParams { reason: String },
    #[error("time {t} is negative; solutions live on [0, ∞)")]
    NegativeTime { t: f64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Nondimensional model: toxicity parameter `κ` and scaled initial
/// population `u₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    kappa: f64,
    u0: f64,
}

impl ModelParams {
    /// Requires `κ > 0` and `0 < u₀ < 1 + κ` (the domain of the exact-peak
    /// logarithm).
    pub fn new(kappa: f64, u0: f64) -> Result<Self, VolterraError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(VolterraError::InvalidParams {
                reason: format!("kappa must be a positive real, got {kappa}"),
            });
        }
        if !(u0 > 0.0) || !(u0 < 1.0 + kappa) {
            return Err(VolterraError::InvalidParams {
                reason: format!(
                    "u0 must lie in (0, 1 + kappa) = (0, {}), got {u0}",
                    1.0 + kappa
                ),
            });
        }
        Ok(Self { kappa, u0 })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    /// Closed-form population peak `1 + κ ln(κ/(1 + κ - u₀))`.
    pub fn exact_umax(&self) -> f64 {
        1.0 + self.kappa * (self.kappa / (1.0 + self.kappa - self.u0)).ln()
    }
}

/// Dimensional coefficients of the original model: birth rate `a`, crowding
/// `b`, toxicity `c`, initial population `p₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p0: f64,
}

impl DimensionalParams {
    pub fn new(a: f64, b: f64, c: f64, p0: f64) -> Result<Self, VolterraError> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("p0", p0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(VolterraError::InvalidParams {
                    reason: format!("{name} must be a positive real, got {v}"),
                });
            }
        }
        Ok(Self { a, b, c, p0 })
    }
}

/// Scale out dimensions: `κ = c/(a·b)`, `u₀ = p₀·b/a`.
pub fn nondimensionalize(d: &DimensionalParams) -> Result<ModelParams, VolterraError> {
    ModelParams::new(d.c / (d.a * d.b), d.p0 * d.b / d.a)
}

/// Pointwise residual of the converted equation:
/// `κ y'' - y' + (y')² + y y'`, zero exactly where the ODE holds.
pub fn ode_residual(y: f64, dy: f64, d2y: f64, kappa: f64) -> f64 {
    kappa * d2y - dy + dy * dy + y * dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.1, 0.1).is_ok());
        assert!(ModelParams::new(0.0, 0.1).is_err());
        assert!(ModelParams::new(-0.1, 0.1).is_err());
        assert!(ModelParams::new(0.1, 0.0).is_err());
        // u0 must stay below 1 + kappa.
        assert!(ModelParams::new(0.1, 1.05).is_ok());
        assert!(ModelParams::new(0.1, 1.1).is_err());
    }

    #[test]
    fn nondimensionalize_unit_coefficients() {
        let d = DimensionalParams::new(1.0, 1.0, 1.0, 0.1).unwrap();
        let p = nondimensionalize(&d).unwrap();
        assert_eq!(p.kappa(), 1.0);
        assert_eq!(p.u0(), 0.1);
    }

    #[test]
    fn nondimensionalize_direct_substitution() {
        let d = DimensionalParams::new(2.0, 1.0, 0.04, 0.2).unwrap();
        let p = nondimensionalize(&d).unwrap();
        assert_abs_diff_eq!(p.kappa(), 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(p.u0(), 0.1, epsilon = 1e-15);

        let d = DimensionalParams::new(1.0, 2.0, 0.2, 0.05).unwrap();
        let p = nondimensionalize(&d).unwrap();
        assert_abs_diff_eq!(p.kappa(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.u0(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn residual_of_equilibrium_is_zero() {
        for kappa in [0.02, 0.5, 3.0] {
            assert_eq!(ode_residual(0.0, 0.0, 0.0, kappa), 0.0);
        }
    }

    #[test]
    fn residual_of_linear_trial() {
        // y = t substituted: -1 + 1 + t0 = t0.
        for t0 in [0.0, 0.3, 2.0] {
            assert_abs_diff_eq!(ode_residual(t0, 1.0, 0.0, 0.7), t0, epsilon = 1e-15);
        }
    }

    #[test]
    fn residual_of_unit_slope_at_origin() {
        // u ≡ 1 satisfies u - u² - u y at the single point y = 0.
        assert_eq!(ode_residual(0.0, 1.0, 0.0, 0.02), 0.0);
    }

    #[test]
    fn exact_umax_reference_values() {
        // Eight-decimal tabulated peaks. The kappa = 0.5 entry is quoted as
        // 0.48519030 in the comparison literature but the formula gives
        // 0.4851902914, so the last digit there is a rounding slip; 2e-8
        // covers it.
        let cases = [
            (0.02, 0.92342717),
            (0.04, 0.87371998),
            (0.1, 0.76974149),
            (0.2, 0.65905038),
            (0.5, 0.48519030),
        ];
        for (kappa, expected) in cases {
            let p = ModelParams::new(kappa, 0.1).unwrap();
            assert_abs_diff_eq!(p.exact_umax(), expected, epsilon = 2e-8);
        }
        assert_abs_diff_eq!(
            ModelParams::new(0.5, 0.1).unwrap().exact_umax(),
            0.48519029140942,
            epsilon = 1e-13
        );
    }
}
