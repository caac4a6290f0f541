//! Orthogonal basis families and their derivatives.
//!
//! Four families are evaluated here, all by three-term recurrence (explicit
//! power-form expansions are numerically unstable for large degree):
//!
//! * Chebyshev polynomials `T_n(y)` on `[-1, 1]`,
//! * rational Chebyshev functions `R_n(x) = T_n((x - L)/(x + L))` on `[0, ∞)`,
//! * normalized Hermite functions `H̃_n(x)` on the whole real line,
//! * transformed Hermite functions `Ĥ_n(x) = H̃_n(ln sinh(kx))` on `(0, ∞)`.
//!
//! Every evaluation returns the function value together with its first two
//! derivatives with respect to the physical coordinate, computed analytically
//! through the chain rule so that Newton Jacobians built on top of them do
//! not inherit finite-difference noise.

mod chebyshev;
mod hermite;
mod maps;

pub use chebyshev::{chebyshev_eval, rc_eval};
pub use hermite::hermite_function_eval;
pub use maps::{inverse_map, logsinh_map, transformed_hermite_eval};

use thiserror::Error;

/// Errors from basis evaluation and spec construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    /// Chebyshev argument outside `[-1 - tol, 1 + tol]`.
    #[error("chebyshev argument {y} lies outside [-1, 1]")]
    ArgumentOutsideInterval { y: f64 },
    /// Rational Chebyshev abscissa below zero.
    #[error("rational chebyshev abscissa {x} is negative")]
    NegativeAbscissa { x: f64 },
    /// Log-sinh-mapped families are singular at the origin.
    #[error("abscissa {x} is not inside (0, ∞); the log-sinh map is singular at 0")]
    NonPositiveAbscissa { x: f64 },
    /// Invalid basis parameters (degree or map constants).
    #[error("invalid basis spec: {reason}")]
    InvalidSpec { reason: String },
}

/// Slack accepted beyond `|y| = 1` before [`chebyshev_eval`] reports a
/// domain error; absorbs rounding from the algebraic map.
pub(crate) const CHEBYSHEV_ARG_TOL: f64 = 1e-12;

/// Which orthogonal family a [`BasisSpec`] selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RationalChebyshev,
    TransformedHermite,
}

/// A truncated basis: the family, the truncation degree `N`, and the map
/// constant that transplants the family onto the half line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisSpec {
    /// `R_0 … R_N` with algebraic map length scale `L > 0`.
    RationalChebyshev { degree: usize, map_length: f64 },
    /// `Ĥ_0 … Ĥ_N` with log-sinh map steepness `k > 0`.
    TransformedHermite { degree: usize, steepness: f64 },
}

impl BasisSpec {
    pub fn rational_chebyshev(degree: usize, map_length: f64) -> Result<Self, BasisError> {
        if degree < 1 {
            return Err(BasisError::InvalidSpec {
                reason: format!("truncation degree must be at least 1, got {degree}"),
            });
        }
        if !(map_length > 0.0) || !map_length.is_finite() {
            return Err(BasisError::InvalidSpec {
                reason: format!("map length must be a positive real, got {map_length}"),
            });
        }
        Ok(Self::RationalChebyshev { degree, map_length })
    }

    pub fn transformed_hermite(degree: usize, steepness: f64) -> Result<Self, BasisError> {
        if degree < 1 {
            return Err(BasisError::InvalidSpec {
                reason: format!("truncation degree must be at least 1, got {degree}"),
            });
        }
        if !(steepness > 0.0) || !steepness.is_finite() {
            return Err(BasisError::InvalidSpec {
                reason: format!("map steepness must be a positive real, got {steepness}"),
            });
        }
        Ok(Self::TransformedHermite { degree, steepness })
    }

    pub fn family(&self) -> Family {
        match self {
            Self::RationalChebyshev { .. } => Family::RationalChebyshev,
            Self::TransformedHermite { .. } => Family::TransformedHermite,
        }
    }

    /// Truncation degree `N`; the basis spans `N + 1` functions.
    pub fn degree(&self) -> usize {
        match *self {
            Self::RationalChebyshev { degree, .. } => degree,
            Self::TransformedHermite { degree, .. } => degree,
        }
    }

    /// Evaluate basis function `n` of this family at `x` on the half line.
    pub fn eval(&self, n: usize, x: f64) -> Result<EvalTriple, BasisError> {
        match *self {
            Self::RationalChebyshev { map_length, .. } => rc_eval(n, x, map_length),
            Self::TransformedHermite { steepness, .. } => transformed_hermite_eval(n, x, steepness),
        }
    }
}

/// A function value bundled with its first two derivatives with respect to
/// the physical coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalTriple {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl EvalTriple {
    pub(crate) fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_rejects_degenerate_parameters() {
        assert!(BasisSpec::rational_chebyshev(0, 1.0).is_err());
        assert!(BasisSpec::rational_chebyshev(4, 0.0).is_err());
        assert!(BasisSpec::rational_chebyshev(4, -2.0).is_err());
        assert!(BasisSpec::transformed_hermite(4, 0.0).is_err());
        assert!(BasisSpec::transformed_hermite(0, 0.5).is_err());
        assert!(BasisSpec::rational_chebyshev(4, f64::NAN).is_err());
    }

    #[test]
    fn spec_accessors() {
        let rc = BasisSpec::rational_chebyshev(14, 1.0).unwrap();
        assert_eq!(rc.family(), Family::RationalChebyshev);
        assert_eq!(rc.degree(), 14);
        let th = BasisSpec::transformed_hermite(20, 0.5).unwrap();
        assert_eq!(th.family(), Family::TransformedHermite);
        assert_eq!(th.degree(), 20);
    }

    #[test]
    fn spec_eval_dispatches_to_family() {
        let rc = BasisSpec::rational_chebyshev(5, 2.0).unwrap();
        let direct = rc_eval(3, 1.7, 2.0).unwrap();
        assert_eq!(rc.eval(3, 1.7).unwrap(), direct);

        let th = BasisSpec::transformed_hermite(5, 0.7).unwrap();
        let direct = transformed_hermite_eval(2, 1.3, 0.7).unwrap();
        assert_eq!(th.eval(2, 1.3).unwrap(), direct);
    }
}
