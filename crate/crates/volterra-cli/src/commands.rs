//! The three subcommands: single solves, the comparison table, and
//! coefficient dumps. Data goes to the chosen sink, reports to stderr.

use crate::output::{fmt9, series_json, write_series_csv, Json, SeriesPoint, Sink};
use crate::{CoeffsArgs, Format, Method, SolveArgs, TableArgs};

use halfline::oracle::{oracle_umax, rk_integrate};
use halfline::solver::NewtonConfig;
use halfline::volterra::presets::{
    tuned_map_length, tuned_steepness, ReferenceRow, DEFAULT_MAP_LENGTH, DEFAULT_SCALE,
    DEFAULT_STEEPNESS, REFERENCE_ROWS, REFERENCE_U0,
};
use halfline::volterra::{hfc_solve, rcc_solve, ModelParams, SolvedRun};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed tolerance of the reference integrator behind `--method oracle`.
const ORACLE_TOL: f64 = 1e-10;

pub fn exit_bad_args(msg: &str) -> String {
    msg.to_string()
}

fn linspace(t_end: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| t_end * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Map parameter resolution: explicit flag, then the tuned value for an
/// exact benchmark `(κ, N)` match at `u₀ = 0.1`, then the global default.
fn resolve_map_length(args_value: Option<f64>, kappa: f64, u0: f64, n: usize) -> f64 {
    args_value
        .or_else(|| {
            (u0 == REFERENCE_U0)
                .then(|| tuned_map_length(kappa, n))
                .flatten()
        })
        .unwrap_or(DEFAULT_MAP_LENGTH)
}

fn resolve_steepness(args_value: Option<f64>, kappa: f64, u0: f64, n: usize) -> f64 {
    args_value
        .or_else(|| {
            (u0 == REFERENCE_U0)
                .then(|| tuned_steepness(kappa, n))
                .flatten()
        })
        .unwrap_or(DEFAULT_STEEPNESS)
}

struct SolveOutcome {
    run: SolvedRun,
    t_max: f64,
    u_max: f64,
    map_field: (&'static str, f64),
    scale: Option<f64>,
    degree: usize,
}

fn solve_spectral(
    method: Method,
    params: &ModelParams,
    n: usize,
    map_length: Option<f64>,
    steepness: Option<f64>,
    scale: Option<f64>,
) -> Result<SolveOutcome, String> {
    let cfg = NewtonConfig::default();
    match method {
        Method::Rcc => {
            let l = resolve_map_length(map_length, params.kappa(), params.u0(), n);
            let run = rcc_solve(params, n, l, &cfg).map_err(|e| e.to_string())?;
            let peak = run.solution.find_umax().map_err(|e| e.to_string())?;
            Ok(SolveOutcome {
                run,
                t_max: peak.t_max,
                u_max: peak.u_max,
                map_field: ("map_length", l),
                scale: None,
                degree: n,
            })
        }
        Method::Hfc => {
            let k = resolve_steepness(steepness, params.kappa(), params.u0(), n);
            let l = scale.unwrap_or(DEFAULT_SCALE);
            let run = hfc_solve(params, n, k, l, &cfg).map_err(|e| e.to_string())?;
            let peak = run.solution.find_umax().map_err(|e| e.to_string())?;
            Ok(SolveOutcome {
                run,
                t_max: peak.t_max,
                u_max: peak.u_max,
                map_field: ("steepness", k),
                scale: Some(l),
                degree: n,
            })
        }
        Method::Oracle => unreachable!("oracle handled separately"),
    }
}

fn spectral_report_line(method: Method, params: &ModelParams, o: &SolveOutcome) -> String {
    let exact = params.exact_umax();
    let scale_part = match o.scale {
        Some(l) => format!(" scale={}", fmt9(l)),
        None => String::new(),
    };
    format!(
        "method={} kappa={} u0={} n={} {}={}{} converged={} iterations={} residual_norm={} \
         max_node_residual={} t_max={} u_max={} exact_umax={} abs_error={} continuation={}",
        method.name(),
        fmt9(params.kappa()),
        fmt9(params.u0()),
        o.degree,
        o.map_field.0,
        fmt9(o.map_field.1),
        scale_part,
        o.run.report.converged,
        o.run.report.iterations,
        fmt9(o.run.report.residual_norm),
        fmt9(o.run.max_node_residual),
        fmt9(o.t_max),
        fmt9(o.u_max),
        fmt9(exact),
        fmt9((o.u_max - exact).abs()),
        o.run.continuation_used,
    )
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, String> {
    if args.samples < 2 {
        return Err(exit_bad_args("--samples must be at least 2"));
    }
    if !(args.t_end > 0.0) {
        return Err(exit_bad_args("--t-end must be positive"));
    }
    let params = ModelParams::new(args.kappa, args.u0).map_err(|e| e.to_string())?;
    let grid = linspace(args.t_end, args.samples);
    let sink = match &args.out {
        Some(path) => Sink::File(path.clone()),
        None => Sink::Stdout,
    };

    let (series, report_line, report_json, config_json, exit_code) = match args.method {
        Method::Oracle => {
            let traj = rk_integrate(&params, args.t_end, ORACLE_TOL).map_err(|e| e.to_string())?;
            let u_max = oracle_umax(&params, ORACLE_TOL).map_err(|e| e.to_string())?;
            let t_max = rk_integrate(&params, 10.0, ORACLE_TOL)
                .map_err(|e| e.to_string())?
                .peak()
                .0;
            let last = traj.last();
            let series: Vec<SeriesPoint> = grid
                .iter()
                .map(|&t| {
                    let (y, u) = traj.value_at(t).unwrap_or((last.y, last.u));
                    SeriesPoint { t, u, y }
                })
                .collect();
            let exact = params.exact_umax();
            let steps = traj.samples().len() - 1;
            let line = format!(
                "method=oracle kappa={} u0={} tol={} steps={} t_max={} u_max={} exact_umax={} abs_error={}",
                fmt9(params.kappa()),
                fmt9(params.u0()),
                fmt9(ORACLE_TOL),
                steps,
                fmt9(t_max),
                fmt9(u_max),
                fmt9(exact),
                fmt9((u_max - exact).abs()),
            );
            let report = Json::Obj(vec![
                ("converged", Json::Bool(true)),
                ("iterations", Json::Int(steps as u64)),
                ("residual_norm", Json::Null),
                ("max_node_residual", Json::Null),
                ("continuation", Json::Bool(false)),
                ("t_max", Json::Num(t_max)),
                ("u_max", Json::Num(u_max)),
                ("exact_umax", Json::Num(exact)),
                ("abs_error", Json::Num((u_max - exact).abs())),
            ]);
            let config = config_json(args, None, None, None);
            (series, line, report, config, 0)
        }
        method => {
            let n = args
                .n
                .ok_or_else(|| exit_bad_args("--n is required for rcc and hfc solves"))?;
            let outcome = solve_spectral(
                method,
                &params,
                n,
                args.map_length,
                args.steepness,
                args.scale,
            )?;
            let series: Vec<SeriesPoint> = grid
                .iter()
                .map(|&t| {
                    let (y, u) = outcome
                        .run
                        .solution
                        .evaluate(t)
                        .map_err(|e| e.to_string())?;
                    Ok(SeriesPoint { t, u, y })
                })
                .collect::<Result<_, String>>()?;
            let exact = params.exact_umax();
            let line = spectral_report_line(method, &params, &outcome);
            let report = Json::Obj(vec![
                ("converged", Json::Bool(outcome.run.report.converged)),
                (
                    "iterations",
                    Json::Int(outcome.run.report.iterations as u64),
                ),
                ("residual_norm", Json::Num(outcome.run.report.residual_norm)),
                (
                    "max_node_residual",
                    Json::Num(outcome.run.max_node_residual),
                ),
                ("continuation", Json::Bool(outcome.run.continuation_used)),
                ("t_max", Json::Num(outcome.t_max)),
                ("u_max", Json::Num(outcome.u_max)),
                ("exact_umax", Json::Num(exact)),
                ("abs_error", Json::Num((outcome.u_max - exact).abs())),
            ]);
            let exit_code = if outcome.run.report.converged { 0 } else { 1 };
            let config = config_json(
                args,
                Some(outcome.degree),
                Some(outcome.map_field),
                outcome.scale,
            );
            (series, line, report, config, exit_code)
        }
    };

    let mut out = sink.writer().map_err(|e| e.to_string())?;
    match args.format {
        Format::Csv => write_series_csv(&mut out, &series).map_err(|e| e.to_string())?,
        Format::Json => {
            let doc = Json::Obj(vec![
                ("config", config_json),
                ("report", report_json),
                ("series", series_json(&series)),
            ]);
            doc.write_line(&mut out).map_err(|e| e.to_string())?;
        }
    }
    eprintln!("{report_line}");
    Ok(exit_code)
}

fn config_json(
    args: &SolveArgs,
    degree: Option<usize>,
    map_field: Option<(&'static str, f64)>,
    scale: Option<f64>,
) -> Json {
    let mut fields: Vec<(&'static str, Json)> = vec![
        ("method", Json::Str(args.method.name().to_string())),
        ("kappa", Json::Num(args.kappa)),
        ("u0", Json::Num(args.u0)),
        ("n", degree.map_or(Json::Null, |n| Json::Int(n as u64))),
    ];
    match map_field {
        Some(("map_length", l)) => fields.push(("map_length", Json::Num(l))),
        Some(("steepness", k)) => {
            fields.push(("steepness", Json::Num(k)));
            fields.push(("scale", scale.map_or(Json::Null, Json::Num)));
        }
        _ => {}
    }
    fields.push(("t_end", Json::Num(args.t_end)));
    fields.push(("samples", Json::Int(args.samples as u64)));
    Json::Obj(fields)
}

struct TableCell {
    value: Option<f64>,
    report_line: String,
}

struct TableRowResult {
    row: ReferenceRow,
    hfc: TableCell,
    rcc: TableCell,
}

fn run_table_row(row: &ReferenceRow) -> TableRowResult {
    let params = ModelParams::new(row.kappa, REFERENCE_U0).expect("benchmark rows are valid");

    let run_cell = |method: Method, n: usize| -> TableCell {
        match solve_spectral(method, &params, n, None, None, None) {
            Ok(outcome) if outcome.run.report.converged => TableCell {
                value: Some(outcome.u_max),
                report_line: spectral_report_line(method, &params, &outcome),
            },
            Ok(outcome) => TableCell {
                value: None,
                report_line: spectral_report_line(method, &params, &outcome),
            },
            Err(e) => TableCell {
                value: None,
                report_line: format!(
                    "method={} kappa={} failed: {e}",
                    method.name(),
                    fmt9(row.kappa)
                ),
            },
        }
    };

    TableRowResult {
        row: *row,
        hfc: run_cell(Method::Hfc, row.hfc_degree),
        rcc: run_cell(Method::Rcc, row.rcc_degree),
    }
}

pub fn cmd_table(args: &TableArgs) -> Result<i32, String> {
    #[cfg(feature = "parallel")]
    let results: Vec<TableRowResult> = REFERENCE_ROWS.par_iter().map(run_table_row).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<TableRowResult> = REFERENCE_ROWS.iter().map(run_table_row).collect();

    let sink = match &args.out {
        Some(path) => Sink::File(path.clone()),
        None => Sink::Stdout,
    };
    let mut out = sink.writer().map_err(|e| e.to_string())?;

    let mut any_failed = false;
    let mut emit = |line: String| -> Result<(), String> {
        use std::io::Write;
        writeln!(out, "{line}").map_err(|e| e.to_string())
    };

    emit("kappa,exact,hfc,rcc,err_hfc,err_rcc,sdmm,csf".to_string())?;
    for r in &results {
        let exact = ModelParams::new(r.row.kappa, REFERENCE_U0)
            .expect("benchmark rows are valid")
            .exact_umax();
        let cell = |c: &TableCell| match c.value {
            Some(v) => fmt9(v),
            None => "FAILED".to_string(),
        };
        let err_cell = |c: &TableCell| match c.value {
            Some(v) => fmt9((v - exact).abs()),
            None => "FAILED".to_string(),
        };
        if r.hfc.value.is_none() || r.rcc.value.is_none() {
            any_failed = true;
        }
        emit(format!(
            "{},{},{},{},{},{},{},{}",
            fmt9(r.row.kappa),
            fmt9(exact),
            cell(&r.hfc),
            cell(&r.rcc),
            err_cell(&r.hfc),
            err_cell(&r.rcc),
            fmt9(r.row.sdmm),
            fmt9(r.row.csf),
        ))?;
    }

    for r in &results {
        eprintln!("{}", r.hfc.report_line);
        eprintln!("{}", r.rcc.report_line);
    }
    Ok(if any_failed { 1 } else { 0 })
}

pub fn cmd_coeffs(args: &CoeffsArgs) -> Result<i32, String> {
    if matches!(args.method, Method::Oracle) {
        return Err(exit_bad_args(
            "coeffs requires a spectral method (rcc or hfc)",
        ));
    }
    let params = ModelParams::new(args.kappa, args.u0).map_err(|e| e.to_string())?;
    let n = args
        .n
        .ok_or_else(|| exit_bad_args("--n is required for coeffs"))?;
    let outcome = solve_spectral(
        args.method,
        &params,
        n,
        args.map_length,
        args.steepness,
        args.scale,
    )?;

    let sink = match &args.out {
        Some(path) => Sink::File(path.clone()),
        None => Sink::Stdout,
    };
    let mut out = sink.writer().map_err(|e| e.to_string())?;
    {
        use std::io::Write;
        writeln!(out, "i,abs_coeff").map_err(|e| e.to_string())?;
        for (i, a) in outcome.run.solution.coefficients().iter().enumerate() {
            writeln!(out, "{i},{}", fmt9(a.abs())).map_err(|e| e.to_string())?;
        }
        if let Some(lambda) = outcome.run.solution.lambda() {
            writeln!(out, "lambda,{}", fmt9(lambda)).map_err(|e| e.to_string())?;
        }
    }

    eprintln!("{}", spectral_report_line(args.method, &params, &outcome));
    Ok(if outcome.run.report.converged { 0 } else { 1 })
}
