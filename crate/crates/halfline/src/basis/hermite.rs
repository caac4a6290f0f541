//! Normalized Hermite functions `H̃_n(x) = (2^n n!)^{-1/2} e^{-x²/2} H_n(x)`.
//!
//! The Gaussian factor is folded into the recurrence, so values stay
//! bounded for any degree and overflow-free where the raw polynomials
//! `H_n` would blow up.

use super::EvalTriple;

/// Evaluate `H̃_n(x)` with first and second derivatives.
///
/// Value by the normalized recurrence
/// `H̃_{n+1} = x √(2/(n+1)) H̃_n - √(n/(n+1)) H̃_{n-1}`,
/// derivative by `H̃'_n = √(2n) H̃_{n-1} - x H̃_n`, and second derivative by
/// differentiating once more: `H̃''_n = √(2n) H̃'_{n-1} - H̃_n - x H̃'_n`.
pub fn hermite_function_eval(n: usize, x: f64) -> EvalTriple {
    let gaussian = (-0.5 * x * x).exp();
    let h0 = gaussian;
    let h1 = std::f64::consts::SQRT_2 * x * gaussian;

    // March the recurrence keeping the last three values so both
    // derivative identities can be formed at degree n.
    let (h_nm2, h_nm1, h_n) = match n {
        0 => (0.0, 0.0, h0),
        1 => (0.0, h0, h1),
        _ => {
            let mut prev2 = 0.0;
            let mut prev = h0;
            let mut cur = h1;
            for k in 1..n {
                let kf = k as f64;
                let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
                prev2 = prev;
                prev = cur;
                cur = next;
            }
            (prev2, prev, cur)
        }
    };

    let d1 = if n == 0 {
        -x * h_n
    } else {
        (2.0 * n as f64).sqrt() * h_nm1 - x * h_n
    };

    let d1_nm1 = match n {
        0 => 0.0,
        1 => -x * h_nm1,
        _ => (2.0 * (n - 1) as f64).sqrt() * h_nm2 - x * h_nm1,
    };
    let d2 = if n == 0 {
        -h_n - x * d1
    } else {
        (2.0 * n as f64).sqrt() * d1_nm1 - h_n - x * d1
    };

    EvalTriple::new(h_n, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Raw Hermite polynomial by `H_{n+1} = 2x H_n - 2n H_{n-1}`.
    ///
    /// Test-only oracle, independent of the normalized code path; kept to
    /// small degrees where `2^n n!` is exactly representable.
    fn raw_hermite(n: usize, x: f64) -> f64 {
        assert!(n <= 10, "raw-polynomial oracle overflows past n = 10");
        let mut prev = 1.0;
        let mut cur = 2.0 * x;
        if n == 0 {
            return prev;
        }
        for k in 1..n {
            let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    fn normalized_via_raw(n: usize, x: f64) -> f64 {
        let mut norm = 1.0f64;
        for k in 1..=n {
            norm *= 2.0 * k as f64;
        }
        raw_hermite(n, x) * (-0.5 * x * x).exp() / norm.sqrt()
    }

    #[test]
    fn degree_zero_at_origin_is_one() {
        let h = hermite_function_eval(0, 0.0);
        assert_eq!(h.value, 1.0);
        assert_eq!(h.d1, 0.0);
    }

    #[test]
    fn degree_one_matches_closed_form() {
        // H̃_1(x) = √2 x e^{-x²/2}.
        let h = hermite_function_eval(1, 1.0);
        assert_abs_diff_eq!(
            h.value,
            std::f64::consts::SQRT_2 * (-0.5f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn normalized_recurrence_matches_raw_polynomial_oracle() {
        for n in 0..=10 {
            for &x in &[-2.3, -0.7, 0.0, 0.8, 1.9, 3.4] {
                let got = hermite_function_eval(n, x).value;
                let want = normalized_via_raw(n, x);
                assert_relative_eq!(got, want, max_relative = 1e-12, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn degree_seven_case() {
        let got = hermite_function_eval(7, 0.8).value;
        let want = normalized_via_raw(7, 0.8);
        assert_relative_eq!(got, want, max_relative = 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for n in [0usize, 1, 3, 8, 15] {
            for &x in &[-1.7, 0.4, 2.2] {
                let e = hermite_function_eval(n, x);
                let h = 1e-5;
                let ep = hermite_function_eval(n, x + h);
                let em = hermite_function_eval(n, x - h);
                let fd1 = (ep.value - em.value) / (2.0 * h);
                assert_relative_eq!(e.d1, fd1, max_relative = 1e-6, epsilon = 1e-9);
                let h = 1e-4;
                let ep = hermite_function_eval(n, x + h);
                let em = hermite_function_eval(n, x - h);
                let fd2 = (ep.value - 2.0 * e.value + em.value) / (h * h);
                assert_relative_eq!(e.d2, fd2, max_relative = 1e-4, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn decay_outside_turning_points() {
        // |H̃_n| is negligible beyond |x| = √(2n+1) + 8.
        for n in [0usize, 5, 10, 20] {
            let edge = (2.0 * n as f64 + 1.0).sqrt() + 8.0;
            for &x in &[edge, edge + 1.0, -edge, -(edge + 2.5)] {
                let v = hermite_function_eval(n, x).value.abs();
                assert!(v <= 1e-8, "H̃_{n}({x}) = {v}");
            }
        }
    }

    #[test]
    fn two_derivative_identities_agree() {
        // √(2n) H̃_{n-1} - x H̃_n must equal
        // √(n/2) H̃_{n-1} - √((n+1)/2) H̃_{n+1}.
        for n in 1usize..=15 {
            let mut x = -5.0;
            while x <= 5.0 {
                let hm = hermite_function_eval(n - 1, x).value;
                let hn = hermite_function_eval(n, x).value;
                let hp = hermite_function_eval(n + 1, x).value;
                let lhs = (2.0 * n as f64).sqrt() * hm - x * hn;
                let rhs = (n as f64 / 2.0).sqrt() * hm - ((n as f64 + 1.0) / 2.0).sqrt() * hp;
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                x += 0.25;
            }
        }
    }
}
