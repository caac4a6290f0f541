//! The log-sinh change of variable `ω = ln(sinh(kz))` and the Hermite
//! functions transplanted through it onto `(0, ∞)`.

use super::{hermite_function_eval, BasisError, EvalTriple};

/// Argument size at which the overflow-safe exponential forms take over
/// from the naive ones; both branches agree to machine precision here.
const SAFE_BRANCH_THRESHOLD: f64 = 30.0;

/// Forward map `ω = ln(sinh(kz))` for `z > 0`.
///
/// For `kz > 30` the equivalent form `kz + ln((1 - e^{-2kz})/2)` is used so
/// the result never overflows.
pub fn logsinh_map(z: f64, steepness: f64) -> Result<f64, BasisError> {
    if !(z > 0.0) {
        return Err(BasisError::NonPositiveAbscissa { x: z });
    }
    if !(steepness > 0.0) {
        return Err(BasisError::InvalidSpec {
            reason: format!("map steepness must be positive, got {steepness}"),
        });
    }
    let kz = steepness * z;
    if kz > SAFE_BRANCH_THRESHOLD {
        Ok(kz + (-(-2.0 * kz).exp_m1()).ln() - std::f64::consts::LN_2)
    } else {
        Ok(kz.sinh().ln())
    }
}

/// Inverse map `z = (1/k) ln(e^ω + √(e^{2ω} + 1})` = `asinh(e^ω)/k`.
///
/// Monotone increasing in `ω` with range `(0, ∞)`; safe for large `|ω|`.
pub fn inverse_map(omega: f64, steepness: f64) -> f64 {
    let k = steepness;
    if omega > SAFE_BRANCH_THRESHOLD {
        // ln(e^ω + √(e^{2ω}+1)) = ω + ln(1 + √(1 + e^{-2ω})).
        (omega + (1.0 + (-2.0 * omega).exp()).sqrt().ln_1p()) / k
    } else {
        omega.exp().asinh() / k
    }
}

/// Evaluate the transformed Hermite function `Ĥ_n(x) = H̃_n(ln sinh(kx))`
/// with physical-coordinate derivatives, for `x > 0`.
///
/// The chain-rule factors are `φ'(x) = k coth(kx)` and
/// `φ''(x) = -k²/sinh²(kx)`, both computed through `expm1` so they stay
/// accurate for small and large `kx` alike. The family is not
/// differentiable at `x = 0`, so non-positive abscissae are rejected.
pub fn transformed_hermite_eval(
    n: usize,
    x: f64,
    steepness: f64,
) -> Result<EvalTriple, BasisError> {
    if !(x > 0.0) {
        return Err(BasisError::NonPositiveAbscissa { x });
    }
    let k = steepness;
    let omega = logsinh_map(x, k)?;
    let h = hermite_function_eval(n, omega);

    // em = 1 - e^{-2kx}, exact near 0 via expm1.
    let em = -(-2.0 * k * x).exp_m1();
    let coth = (2.0 - em) / em;
    let inv_sinh_sq = 4.0 * (1.0 - em) / (em * em);

    let phi_d1 = k * coth;
    let phi_d2 = -k * k * inv_sinh_sq;

    Ok(EvalTriple::new(
        h.value,
        h.d1 * phi_d1,
        h.d2 * phi_d1 * phi_d1 + h.d1 * phi_d2,
    ))
}
