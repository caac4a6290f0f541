//! Chebyshev polynomials and their rational (half-line) composition.

use super::{BasisError, EvalTriple, CHEBYSHEV_ARG_TOL};

/// Evaluate `T_n(y)` and its first two derivatives on `[-1, 1]`.
///
/// Uses the three-term recurrence `T_{k+1} = 2y T_k - T_{k-1}` together
/// with its differentiated forms, so the result is stable for large `n`.
pub fn chebyshev_eval(n: usize, y: f64) -> Result<EvalTriple, BasisError> {
    if !y.is_finite() || y.abs() > 1.0 + CHEBYSHEV_ARG_TOL {
        return Err(BasisError::ArgumentOutsideInterval { y });
    }
    if n == 0 {
        return Ok(EvalTriple::new(1.0, 0.0, 0.0));
    }
    if n == 1 {
        return Ok(EvalTriple::new(y, 1.0, 0.0));
    }

    // (value, first, second) for T_{k-1} and T_k, marched up to T_n.
    let mut prev = (1.0, 0.0, 0.0);
    let mut cur = (y, 1.0, 0.0);
    for _ in 1..n {
        let value = 2.0 * y * cur.0 - prev.0;
        let d1 = 2.0 * cur.0 + 2.0 * y * cur.1 - prev.1;
        let d2 = 4.0 * cur.1 + 2.0 * y * cur.2 - prev.2;
        prev = cur;
        cur = (value, d1, d2);
    }
    Ok(EvalTriple::new(cur.0, cur.1, cur.2))
}

/// Evaluate the rational Chebyshev function `R_n(x) = T_n(φ(x))` with
/// `φ(x) = (x - L)/(x + L)`, plus derivatives in `x`, for `x ≥ 0`.
pub fn rc_eval(n: usize, x: f64, map_length: f64) -> Result<EvalTriple, BasisError> {
    if !(x >= 0.0) {
        return Err(BasisError::NegativeAbscissa { x });
    }
    if !(map_length > 0.0) {
        return Err(BasisError::InvalidSpec {
            reason: format!("map length must be positive, got {map_length}"),
        });
    }
    let l = map_length;
    let y = (x - l) / (x + l);
    let t = chebyshev_eval(n, y)?;

    let denom = x + l;
    let phi_d1 = 2.0 * l / (denom * denom);
    let phi_d2 = -4.0 * l / (denom * denom * denom);

    Ok(EvalTriple::new(
        t.value,
        t.d1 * phi_d1,
        t.d2 * phi_d1 * phi_d1 + t.d1 * phi_d2,
    ))
}
