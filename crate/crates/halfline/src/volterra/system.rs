//! Assembly of the square collocation systems and their Newton drivers.
//!
//! Both trial forms are linear in the unknowns, so each system is stored as
//! per-node contribution tables: row `j` of the residual only needs three
//! dot products and one call to [`ode_residual`].

use super::solution::SpectralSolution;
use super::{ode_residual, ModelParams, VolterraError};
use crate::basis::{rc_eval, transformed_hermite_eval, BasisSpec, EvalTriple};
use crate::nodes::{rc_radau_grid, transformed_hermite_grid};
use crate::solver::{equilibrated_solve, newton_solve, NewtonConfig, SolveReport, SquareMatrix};

/// Below this `κ` a failed direct solve retries via two-step continuation
/// (solve at `2κ`, reuse the result as the warm start).
const CONTINUATION_KAPPA: f64 = 0.02;

/// One collocation row: physical node, unknown-independent offsets of
/// `(y, y', y'')`, and the per-unknown contribution triples.
struct NodeRow {
    t: f64,
    base: EvalTriple,
    columns: Vec<EvalTriple>,
}

/// A linear boundary-condition row `Σ coeff_m · unknown_m - target`.
struct ConstraintRow {
    coefficients: Vec<f64>,
    target: f64,
}

/// A square nonlinear collocation system `F(unknowns) = 0`: residual rows
/// at the interior nodes followed by any boundary-condition rows.
pub struct CollocationSystem {
    params: ModelParams,
    rows: Vec<NodeRow>,
    constraints: Vec<ConstraintRow>,
    unknowns: usize,
}

impl CollocationSystem {
    pub fn size(&self) -> usize {
        self.unknowns
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Physical collocation nodes (residual rows only).
    pub fn nodes(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// Full residual vector, node rows first, then constraint rows.
    pub fn residual(&self, unknowns: &[f64]) -> Vec<f64> {
        assert_eq!(unknowns.len(), self.unknowns);
        let kappa = self.params.kappa();
        let mut out = Vec::with_capacity(self.unknowns);
        for row in &self.rows {
            let mut y = row.base.value;
            let mut dy = row.base.d1;
            let mut d2y = row.base.d2;
            for (u, col) in unknowns.iter().zip(&row.columns) {
                y += u * col.value;
                dy += u * col.d1;
                d2y += u * col.d2;
            }
            out.push(ode_residual(y, dy, d2y, kappa));
        }
        for c in &self.constraints {
            let lhs: f64 = c
                .coefficients
                .iter()
                .zip(unknowns)
                .map(|(a, u)| a * u)
                .sum();
            out.push(lhs - c.target);
        }
        out
    }

    /// Largest `|ode_residual|` over the collocation nodes (constraint rows
    /// excluded).
    pub fn max_node_residual(&self, unknowns: &[f64]) -> f64 {
        self.residual(unknowns)[..self.rows.len()]
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }

    /// Newton starting point: fit the trial function through a crude
    /// fixed-step RK4 march of the model (value columns at the nodes plus
    /// the constraint rows form a square linear system).
    ///
    /// The collocation systems have spurious roots with near-vanishing
    /// populations; seeding on the physical trajectory keeps Newton in the
    /// physical basin for every tabulated `κ`.
    fn warm_start_guess(&self) -> Result<Vec<f64>, VolterraError> {
        let t_end = self.rows.iter().fold(1.0f64, |m, r| m.max(r.t));
        let warm = warm_start_march(&self.params, t_end);

        let n = self.unknowns;
        let mut matrix = SquareMatrix::zeros(n);
        let mut rhs = vec![0.0; n];
        for (j, row) in self.rows.iter().enumerate() {
            for (m, col) in row.columns.iter().enumerate() {
                matrix[(j, m)] = col.value;
            }
            rhs[j] = warm_y_at(&warm, row.t) - row.base.value;
        }
        for (c, constraint) in self.constraints.iter().enumerate() {
            let j = self.rows.len() + c;
            for (m, coeff) in constraint.coefficients.iter().enumerate() {
                matrix[(j, m)] = *coeff;
            }
            rhs[j] = constraint.target;
        }
        let (guess, _) = equilibrated_solve(&matrix, &rhs)?;
        Ok(guess)
    }
}

/// Classical fixed-step RK4 march of `y' = u`, `u' = (u - u² - uy)/κ`,
/// recording every step. Guess-quality only; the adaptive reference
/// integrator lives elsewhere and shares nothing with this.
fn warm_start_march(params: &ModelParams, t_end: f64) -> Vec<(f64, f64)> {
    let steps = ((t_end / 0.004).ceil() as usize).clamp(4096, 262_144);
    let h = t_end / steps as f64;
    let kappa = params.kappa();
    let rhs = |y: f64, u: f64| (u, (u - u * u - u * y) / kappa);

    let mut table = Vec::with_capacity(steps + 1);
    let mut y = 0.0f64;
    let mut u = params.u0();
    table.push((y, u));
    for _ in 0..steps {
        let (k1y, k1u) = rhs(y, u);
        let (k2y, k2u) = rhs(y + 0.5 * h * k1y, u + 0.5 * h * k1u);
        let (k3y, k3u) = rhs(y + 0.5 * h * k2y, u + 0.5 * h * k2u);
        let (k4y, k4u) = rhs(y + h * k3y, u + h * k3u);
        y += h * (k1y + 2.0 * (k2y + k3y) + k4y) / 6.0;
        u += h * (k1u + 2.0 * (k2u + k3u) + k4u) / 6.0;
        table.push((y, u));
    }
    // Reinterpret as (t implicit by index, y); store h in the first slot's
    // place via closure-free sampling below.
    table
        .into_iter()
        .enumerate()
        .map(|(i, (yv, _))| (h * i as f64, yv))
        .collect()
}

fn warm_y_at(table: &[(f64, f64)], t: f64) -> f64 {
    let h = table[1].0 - table[0].0;
    let idx = (t / h) as usize;
    if idx + 1 >= table.len() {
        return table[table.len() - 1].1;
    }
    let (t0, y0) = table[idx];
    let (_, y1) = table[idx + 1];
    let frac = (t - t0) / h;
    y0 + frac * (y1 - y0)
}

/// Rational Chebyshev collocation system: unknowns `a₀…a_N`, residual rows
/// at the `N - 1` interior Radau images, plus the two initial-condition
/// rows `P_N y(0) = 0` and `(P_N y)'(0) = u₀`.
pub fn rcc_assemble(
    params: &ModelParams,
    n: usize,
    map_length: f64,
) -> Result<CollocationSystem, VolterraError> {
    if n < 2 {
        return Err(VolterraError::InvalidParams {
            reason: format!("RCC needs degree N >= 2, got {n}"),
        });
    }
    if !(map_length > 0.0) {
        return Err(VolterraError::InvalidParams {
            reason: format!("map length must be positive, got {map_length}"),
        });
    }

    let grid = rc_radau_grid(n, map_length)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid.abscissae() {
        let columns = (0..=n)
            .map(|k| rc_eval(k, t, map_length))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(NodeRow {
            t,
            base: EvalTriple::new(0.0, 0.0, 0.0),
            columns,
        });
    }

    let at_origin = (0..=n)
        .map(|k| rc_eval(k, 0.0, map_length))
        .collect::<Result<Vec<_>, _>>()?;
    let constraints = vec![
        ConstraintRow {
            coefficients: at_origin.iter().map(|e| e.value).collect(),
            target: 0.0,
        },
        ConstraintRow {
            coefficients: at_origin.iter().map(|e| e.d1).collect(),
            target: params.u0(),
        },
    ];

    Ok(CollocationSystem {
        params: *params,
        rows,
        constraints,
        unknowns: n + 1,
    })
}

/// Hermite-function collocation system: unknowns `a₀…a_N` and `λ`, trial
/// `ŷ(t) = λt² + u₀t + t Σ aᵢ Ĥᵢ(t/l)`, collocated at `t_j = l·x̃_j` over
/// the `N + 2` transformed Hermite-Gauss nodes. Both initial conditions
/// hold identically, so no constraint rows are needed.
pub fn hfc_assemble(
    params: &ModelParams,
    n: usize,
    steepness: f64,
    scale: f64,
) -> Result<CollocationSystem, VolterraError> {
    if n < 2 {
        return Err(VolterraError::InvalidParams {
            reason: format!("HFC needs degree N >= 2, got {n}"),
        });
    }
    if !(steepness > 0.0) || !(scale > 0.0) {
        return Err(VolterraError::InvalidParams {
            reason: format!(
                "map steepness and domain scale must be positive, got k={steepness}, l={scale}"
            ),
        });
    }

    let grid = transformed_hermite_grid(n + 2, steepness)?;
    let u0 = params.u0();
    let mut rows = Vec::with_capacity(grid.len());
    for &s in grid.abscissae() {
        let t = scale * s;
        let mut columns = Vec::with_capacity(n + 2);
        for i in 0..=n {
            let b = transformed_hermite_eval(i, s, steepness)?;
            columns.push(EvalTriple::new(
                t * b.value,
                b.value + s * b.d1,
                (2.0 * b.d1 + s * b.d2) / scale,
            ));
        }
        // Trailing unknown λ multiplies t².
        columns.push(EvalTriple::new(t * t, 2.0 * t, 2.0));
        rows.push(NodeRow {
            t,
            base: EvalTriple::new(u0 * t, u0, 0.0),
            columns,
        });
    }

    Ok(CollocationSystem {
        params: *params,
        rows,
        constraints: Vec::new(),
        unknowns: n + 2,
    })
}

/// A converged (or best-effort) collocation run.
#[derive(Debug, Clone)]
pub struct SolvedRun {
    pub solution: SpectralSolution,
    pub report: SolveReport,
    /// Whether the κ-continuation fallback was used to reach convergence.
    pub continuation_used: bool,
    /// Largest `|ode_residual|` at the collocation nodes for the returned
    /// coefficients.
    pub max_node_residual: f64,
}

/// Run Newton from `guess`, keeping the result only if it converged.
fn try_converge(
    system: &CollocationSystem,
    guess: &[f64],
    cfg: &NewtonConfig,
) -> Option<(Vec<f64>, SolveReport)> {
    newton_solve(|u| system.residual(u), guess, cfg)
        .ok()
        .filter(|(_, report)| report.converged)
}

/// Degree above which a padded lower-resolution solve is tried as a backup
/// Newton seed (the direct interpolation fit degrades as more basis columns
/// lose support at the outer nodes).
const COARSE_SEED_LIMIT: usize = 48;

/// Solve the model by rational Chebyshev collocation at degree `n` with map
/// length `L`.
pub fn rcc_solve(
    params: &ModelParams,
    n: usize,
    map_length: f64,
    cfg: &NewtonConfig,
) -> Result<SolvedRun, VolterraError> {
    let system = rcc_assemble(params, n, map_length)?;
    let guess = system.warm_start_guess()?;

    let mut continuation_used = false;
    let mut outcome = try_converge(&system, &guess, cfg);

    if outcome.is_none() && params.kappa() <= CONTINUATION_KAPPA {
        if let Ok(relaxed_params) = ModelParams::new(2.0 * params.kappa(), params.u0()) {
            if let Ok(relaxed) = rcc_solve(&relaxed_params, n, map_length, cfg) {
                if relaxed.report.converged {
                    outcome = try_converge(&system, relaxed.solution.coefficients(), cfg);
                    continuation_used = outcome.is_some();
                }
            }
        }
    }

    let (coeffs, report) = match outcome {
        Some(found) => found,
        None => newton_solve(|u| system.residual(u), &guess, cfg)?,
    };

    let max_node_residual = system.max_node_residual(&coeffs);
    let spec = BasisSpec::rational_chebyshev(n, map_length)?;
    Ok(SolvedRun {
        solution: SpectralSolution::rational_chebyshev(spec, coeffs, *params)?,
        report,
        continuation_used,
        max_node_residual,
    })
}

/// Solve the model by transformed Hermite collocation at degree `n` with
/// map steepness `k` and domain scaling `l`.
pub fn hfc_solve(
    params: &ModelParams,
    n: usize,
    steepness: f64,
    scale: f64,
    cfg: &NewtonConfig,
) -> Result<SolvedRun, VolterraError> {
    let system = hfc_assemble(params, n, steepness, scale)?;
    let guess = system.warm_start_guess()?;

    let mut continuation_used = false;
    let mut outcome = try_converge(&system, &guess, cfg);

    // Backup seed: converged lower-resolution expansion padded with zeros.
    if outcome.is_none() && n > COARSE_SEED_LIMIT {
        let coarse_n = (2 * n / 3).max(COARSE_SEED_LIMIT);
        if let Ok(coarse) = hfc_solve(params, coarse_n, steepness, scale, cfg) {
            if coarse.report.converged {
                let mut padded = coarse.solution.coefficients().to_vec();
                padded.resize(n + 1, 0.0);
                padded.push(
                    coarse
                        .solution
                        .lambda()
                        .expect("HFC solutions carry lambda"),
                );
                outcome = try_converge(&system, &padded, cfg);
                continuation_used = outcome.is_some();
            }
        }
    }

    if outcome.is_none() && params.kappa() <= CONTINUATION_KAPPA {
        if let Ok(relaxed_params) = ModelParams::new(2.0 * params.kappa(), params.u0()) {
            if let Ok(relaxed) = hfc_solve(&relaxed_params, n, steepness, scale, cfg) {
                if relaxed.report.converged {
                    let mut warm = relaxed.solution.coefficients().to_vec();
                    warm.push(
                        relaxed
                            .solution
                            .lambda()
                            .expect("HFC solutions carry lambda"),
                    );
                    outcome = try_converge(&system, &warm, cfg);
                    continuation_used = outcome.is_some();
                }
            }
        }
    }

    let (unknowns, report) = match outcome {
        Some(found) => found,
        None => newton_solve(|u| system.residual(u), &guess, cfg)?,
    };

    let max_node_residual = system.max_node_residual(&unknowns);
    let spec = BasisSpec::transformed_hermite(n, steepness)?;
    let (coeffs, lambda) = {
        let mut c = unknowns;
        let lambda = c.pop().expect("system has at least one unknown");
        (c, lambda)
    };
    Ok(SolvedRun {
        solution: SpectralSolution::transformed_hermite(spec, coeffs, lambda, scale, *params)?,
        report,
        continuation_used,
        max_node_residual,
    })
}
