//! Peak location: blended scan grid plus golden-section refinement.

use super::VolterraError;

/// Result of a peak search over a finite scan window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmaxEstimate {
    pub t_max: f64,
    pub u_max: f64,
    /// The coarse-scan maximum fell on the first or last grid point,
    /// suggesting the scan horizon is too small.
    pub at_scan_boundary: bool,
}

/// Blend of log-spaced and linearly spaced points over `(0, t_end]`;
/// the log block resolves early peaks, the linear block the tail.
pub(crate) fn scan_grid(t_end: f64, points: usize) -> Vec<f64> {
    assert!(points >= 4 && t_end > 0.0);
    let half = points / 2;
    let mut grid = Vec::with_capacity(points);
    let log_lo = (t_end * 1e-4).ln();
    let log_hi = t_end.ln();
    // Log block stays strictly below t_end; the linear block supplies the
    // endpoint exactly.
    for i in 0..half {
        grid.push((log_lo + (log_hi - log_lo) * i as f64 / half as f64).exp());
    }
    let linear = points - half;
    for i in 1..=linear {
        grid.push(t_end * i as f64 / linear as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, refined
/// until the bracket is narrower than `tol`.
pub(crate) fn golden_section_max<F>(
    lo: f64,
    hi: f64,
    tol: f64,
    f: F,
) -> Result<(f64, f64), VolterraError>
where
    F: Fn(f64) -> Result<f64, VolterraError>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}
