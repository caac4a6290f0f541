//! Coefficient records of converged solves, evaluable to `(y, u = y')`.

use super::umax::{golden_section_max, scan_grid, UmaxEstimate};
use super::{ModelParams, VolterraError};
use crate::basis::{BasisSpec, Family};

/// A spectral expansion of `y(t)` bound to its basis spec and model
/// parameters.
///
/// Rational Chebyshev: `y = Σ a_k R_k(t)`. Transformed Hermite:
/// `y = λt² + u₀t + t Σ aᵢ Ĥᵢ(t/l)` with domain scaling `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolution {
    spec: BasisSpec,
    coeffs: Vec<f64>,
    lambda: Option<f64>,
    scale: f64,
    params: ModelParams,
}

impl SpectralSolution {
    pub(crate) fn rational_chebyshev(
        spec: BasisSpec,
        coeffs: Vec<f64>,
        params: ModelParams,
    ) -> Result<Self, VolterraError> {
        Self::validate(&spec, &coeffs)?;
        debug_assert_eq!(spec.family(), Family::RationalChebyshev);
        Ok(Self {
            spec,
            coeffs,
            lambda: None,
            scale: 1.0,
            params,
        })
    }

    pub(crate) fn transformed_hermite(
        spec: BasisSpec,
        coeffs: Vec<f64>,
        lambda: f64,
        scale: f64,
        params: ModelParams,
    ) -> Result<Self, VolterraError> {
        Self::validate(&spec, &coeffs)?;
        debug_assert_eq!(spec.family(), Family::TransformedHermite);
        if !(scale > 0.0) {
            return Err(VolterraError::InvalidParams {
                reason: format!("domain scale must be positive, got {scale}"),
            });
        }
        Ok(Self {
            spec,
            coeffs,
            lambda: Some(lambda),
            scale,
            params,
        })
    }

    fn validate(spec: &BasisSpec, coeffs: &[f64]) -> Result<(), VolterraError> {
        if coeffs.len() != spec.degree() + 1 {
            return Err(VolterraError::InvalidParams {
                reason: format!(
                    "coefficient count {} does not match degree N = {} (need N + 1)",
                    coeffs.len(),
                    spec.degree()
                ),
            });
        }
        Ok(())
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Expansion coefficients `a₀…a_N`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t²` in the polynomial part (transformed Hermite
    /// solutions only).
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// Domain scaling `l` (1 for rational Chebyshev solutions).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Evaluate `(y(t), u(t) = y'(t))` for `t ≥ 0`.
    pub fn evaluate(&self, t: f64) -> Result<(f64, f64), VolterraError> {
        if !(t >= 0.0) {
            return Err(VolterraError::NegativeTime { t });
        }
        match self.spec {
            BasisSpec::RationalChebyshev { degree, map_length } => {
                let mut y = 0.0;
                let mut dy = 0.0;
                for k in 0..=degree {
                    let e = crate::basis::rc_eval(k, t, map_length)?;
                    y += self.coeffs[k] * e.value;
                    dy += self.coeffs[k] * e.d1;
                }
                Ok((y, dy))
            }
            BasisSpec::TransformedHermite { degree, steepness } => {
                let lambda = self
                    .lambda
                    .expect("transformed Hermite solutions carry lambda");
                let u0 = self.params.u0();
                if t == 0.0 {
                    // Basis terms vanish in the t → 0⁺ limit; only the
                    // polynomial part survives.
                    return Ok((0.0, u0));
                }
                let s = t / self.scale;
                let mut basis_sum = 0.0;
                let mut slope_sum = 0.0;
                for i in 0..=degree {
                    let b = crate::basis::transformed_hermite_eval(i, s, steepness)?;
                    basis_sum += self.coeffs[i] * b.value;
                    slope_sum += self.coeffs[i] * (b.value + s * b.d1);
                }
                let y = lambda * t * t + u0 * t + t * basis_sum;
                let u = 2.0 * lambda * t + u0 + slope_sum;
                Ok((y, u))
            }
        }
    }

    /// Locate the population peak: coarse scan of `u` over `(0, 10]`
    /// followed by golden-section refinement.
    pub fn find_umax(&self) -> Result<UmaxEstimate, VolterraError> {
        self.find_umax_in(10.0)
    }

    /// As [`find_umax`](Self::find_umax) with an explicit scan horizon.
    pub fn find_umax_in(&self, t_scan: f64) -> Result<UmaxEstimate, VolterraError> {
        let grid = scan_grid(t_scan, 2000);
        let mut best_idx = 0usize;
        let mut best_u = f64::NEG_INFINITY;
        let mut values = Vec::with_capacity(grid.len());
        for &t in &grid {
            let (_, u) = self.evaluate(t)?;
            values.push(u);
            if u > best_u {
                best_u = u;
                best_idx = values.len() - 1;
            }
        }

        let at_scan_boundary = best_idx == 0 || best_idx == grid.len() - 1;
        if at_scan_boundary {
            return Ok(UmaxEstimate {
                t_max: grid[best_idx],
                u_max: best_u,
                at_scan_boundary,
            });
        }

        let lo = grid[best_idx - 1];
        let hi = grid[best_idx + 1];
        let u_of = |t: f64| self.evaluate(t).map(|(_, u)| u);
        let (t_max, u_max) = golden_section_max(lo, hi, 1e-10, u_of)?;
        Ok(UmaxEstimate {
            t_max,
            u_max,
            at_scan_boundary,
        })
    }
}
