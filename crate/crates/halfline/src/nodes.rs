//! Collocation grids: rational Chebyshev-Gauss-Radau points on `(0, ∞)` and
//! (transformed) Hermite-Gauss nodes with quadrature weights.

use crate::basis::{hermite_function_eval, inverse_map};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least {needed} for its parameter, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("grid parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("tridiagonal eigensolve failed to converge for eigenvalue {index} after {iterations} QL sweeps")]
    EigenNoConvergence { index: usize, iterations: usize },
}

/// Which construction produced a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSource {
    RationalChebyshevRadau { degree: usize, map_length: f64 },
    HermiteGauss { points: usize },
    TransformedHermite { points: usize, steepness: f64 },
}

/// An ordered set of collocation abscissae, with quadrature weights when the
/// construction provides them (Hermite-Gauss only).
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    abscissae: Vec<f64>,
    weights: Option<Vec<f64>>,
    source: GridSource,
}

impl CollocationGrid {
    fn new(abscissae: Vec<f64>, weights: Option<Vec<f64>>, source: GridSource) -> Self {
        let grid = Self {
            abscissae,
            weights,
            source,
        };
        debug_assert!(
            grid.is_well_formed(),
            "malformed grid from {:?}",
            grid.source
        );
        grid
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    /// Modified quadrature weights `w̃_j` (integrate plain `dx` against
    /// functions of Hermite type); `None` for collocation-only grids.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Classical Gauss-Hermite weights `w_j = w̃_j e^{-x_j²}` recovered from
    /// the stored modified weights.
    pub fn classical_weights(&self) -> Option<Vec<f64>> {
        let w = self.weights.as_ref()?;
        Some(
            w.iter()
                .zip(&self.abscissae)
                .map(|(wt, x)| wt * (-x * x).exp())
                .collect(),
        )
    }

    pub fn source(&self) -> GridSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    fn is_well_formed(&self) -> bool {
        let increasing = self
            .abscissae
            .windows(2)
            .all(|w| w[0] < w[1] && w[0].is_finite() && w[1].is_finite());
        let finite = self.abscissae.iter().all(|x| x.is_finite());
        let weights_ok = match &self.weights {
            None => true,
            Some(w) => w.len() == self.abscissae.len() && w.iter().all(|&wi| wi > 0.0),
        };
        increasing && finite && weights_ok
    }
}

/// Reference Chebyshev-Gauss-Radau points `y_j = -cos(2πj/(2N+1))`,
/// `j = 0…N`: the left endpoint `-1` is included, `+1` is not, and the
/// sequence is strictly increasing.
pub fn chebyshev_gauss_radau(n: usize) -> Result<Vec<f64>, GridError> {
    if n < 2 {
        return Err(GridError::TooFewPoints { needed: 2, got: n });
    }
    let count = 2 * n + 1;
    Ok((0..=n)
        .map(|j| {
            if j == 0 {
                -1.0
            } else {
                -(2.0 * std::f64::consts::PI * j as f64 / count as f64).cos()
            }
        })
        .collect())
}

/// Algebraic map from the reference interval to the half line,
/// `t = L (1 + y)/(1 - y)`.
fn radau_to_halfline(y: f64, map_length: f64) -> f64 {
    map_length * (1.0 + y) / (1.0 - y)
}

/// Which of the `N + 1` Radau points the half-line grid keeps.
///
/// `N - 1` residual equations need `N - 1` nodes; both boundary conditions
/// sit at `t = 0`, so the node mapped from `y = -1` is always redundant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadauDropRule {
    /// Drop the `t = 0` image and the largest node (`j = 1…N-1`).
    #[default]
    ZeroAndLargest,
    /// Drop the two smallest (`j = 2…N`), keeping the largest.
    TwoSmallest,
}

/// Interior rational Chebyshev-Gauss-Radau collocation grid on `(0, ∞)`:
/// `N - 1` nodes out of the `N + 1` reference points, mapped through
/// `t = L(1 + y)/(1 - y)`, default drop rule.
pub fn rc_radau_grid(n: usize, map_length: f64) -> Result<CollocationGrid, GridError> {
    rc_radau_grid_with(n, map_length, RadauDropRule::default())
}

pub fn rc_radau_grid_with(
    n: usize,
    map_length: f64,
    rule: RadauDropRule,
) -> Result<CollocationGrid, GridError> {
    if !(map_length > 0.0) {
        return Err(GridError::NonPositiveParameter {
            name: "map length",
            value: map_length,
        });
    }
    let reference = chebyshev_gauss_radau(n)?;
    let range = match rule {
        RadauDropRule::ZeroAndLargest => 1..n,
        RadauDropRule::TwoSmallest => 2..n + 1,
    };
    let abscissae: Vec<f64> = reference[range]
        .iter()
        .map(|&y| radau_to_halfline(y, map_length))
        .collect();
    Ok(CollocationGrid::new(
        abscissae,
        None,
        GridSource::RationalChebyshevRadau {
            degree: n,
            map_length,
        },
    ))
}

/// Hermite-Gauss rule with `m` nodes: abscissae are the roots of the
/// Hermite polynomial `H_m`, weights are the modified
/// `w̃_j = √π / (m H̃²_{m-1}(x_j))`.
///
/// Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi
/// matrix (zero diagonal, off-diagonal `√(i/2)`), each polished by one
/// Newton step on the normalized recurrence and symmetrized about zero.
pub fn hermite_gauss(m: usize) -> Result<CollocationGrid, GridError> {
    if m < 1 {
        return Err(GridError::TooFewPoints { needed: 1, got: m });
    }
    let diag = vec![0.0; m];
    let offdiag: Vec<f64> = (1..m).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let mut nodes = symmetric_tridiagonal_eigenvalues(diag, offdiag)?;

    for x in nodes.iter_mut() {
        let e = hermite_function_eval(m, *x);
        if e.d1 != 0.0 {
            *x -= e.value / e.d1;
        }
    }

    // The spectrum is symmetric; pair opposite eigenvalues exactly.
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    for j in 0..m / 2 {
        let avg = 0.5 * (nodes[j] - nodes[m - 1 - j]);
        nodes[j] = avg;
        nodes[m - 1 - j] = -avg;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    let sqrt_pi = std::f64::consts::PI.sqrt();
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let h = hermite_function_eval(m - 1, x).value;
            sqrt_pi / (m as f64 * h * h)
        })
        .collect();

    Ok(CollocationGrid::new(
        nodes,
        Some(weights),
        GridSource::HermiteGauss { points: m },
    ))
}

/// Hermite-Gauss abscissae pushed through the inverse log-sinh map onto
/// `(0, ∞)`; collocation-only (no weights).
pub fn transformed_hermite_grid(m: usize, steepness: f64) -> Result<CollocationGrid, GridError> {
    if !(steepness > 0.0) {
        return Err(GridError::NonPositiveParameter {
            name: "steepness",
            value: steepness,
        });
    }
    let reference = hermite_gauss(m)?;
    let abscissae: Vec<f64> = reference
        .abscissae()
        .iter()
        .map(|&x| inverse_map(x, steepness))
        .collect();
    Ok(CollocationGrid::new(
        abscissae,
        None,
        GridSource::TransformedHermite {
            points: m,
            steepness,
        },
    ))
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
/// sweep, ascending. `offdiag[i]` couples rows `i` and `i + 1`.
fn symmetric_tridiagonal_eigenvalues(
    mut diag: Vec<f64>,
    offdiag: Vec<f64>,
) -> Result<Vec<f64>, GridError> {
    let n = diag.len();
    if n <= 1 {
        return Ok(diag);
    }
    assert_eq!(offdiag.len(), n - 1);
    let mut e = offdiag;
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            // Look for a negligible off-diagonal entry splitting the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > 50 {
                return Err(GridError::EigenNoConvergence {
                    index: l,
                    iterations: sweeps,
                });
            }

            // Wilkinson-style implicit shift.
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;

            let mut i = m - 1;
            loop {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    diag[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                    break;
                }
                i -= 1;
            }
        }
    }

    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(diag)
}
