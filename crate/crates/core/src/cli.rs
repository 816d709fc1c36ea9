//! `fracvar solve | verify | oracle --config <path> [--out <dir>] [--seed <n>]`.
//!
//! Exit codes: 0 success (converged / all checks pass), 1 configuration or
//! I/O error, 2 solver hit `max_iters`, 3 line-search failure, 4 a verify or
//! oracle check failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::Error;
use crate::fracops::Operator;
use crate::grid::{FracOrder, SampledFunction, Side};
use crate::lagrangian::{builtin, BuiltinModel};
use crate::solver::{minimize, quadratic_oracle, SolveResult, SolveStatus};
use crate::space::seminorm;
use crate::verify::{
    check_iterates_floor, operator_error, operator_tolerance, run_lattice, LatticeConfig,
    Tolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_LINE_SEARCH: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Sup-norm relative tolerance of the solver against the quadratic oracle.
pub const ORACLE_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(
    name = "fracvar",
    version,
    about = "Fractional variational problems: solve, verify, oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize the action and write solution.csv and report.json.
    Solve(CommonArgs),
    /// Run the property lattice and write properties.json.
    Verify(CommonArgs),
    /// Compare the solver with the quadratic oracle and the operators with
    /// power-function closed forms; writes oracle.csv, operators.csv and
    /// oracle.json.
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
    }
}

fn load_run_config(a: &CommonArgs) -> Result<(RunConfig, PathBuf), Failure> {
    let mut cfg = RunConfig::load(&a.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &a.out {
        cfg.output_dir = out.clone();
    }
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    Ok((cfg, dir))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn exit_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIters => EXIT_MAX_ITERS,
        SolveStatus::LineSearchFailure => EXIT_LINE_SEARCH,
    }
}

fn solve(
    cfg: &RunConfig,
) -> Result<(SolveResult, Option<crate::lagrangian::HypothesisSpec>), Failure> {
    let (model, spec) = builtin(&cfg.model)?;
    let result = minimize(
        model.as_ref(),
        cfg.params()?,
        cfg.grid()?,
        &cfg.solve_options()?,
    )?;
    Ok((result, spec))
}

fn solution_csv(result: &SolveResult) -> String {
    let u = &result.u_star;
    let v = result.v_star.samples();
    let d = u.dim();
    let mut out = String::from("t");
    for prefix in ["u", "v", "residual"] {
        for k in 1..=d {
            let _ = write!(out, ",{prefix}_{k}");
        }
    }
    out.push('\n');
    let residual = result.el_residual.as_ref().ok().map(|r| &r.residual);
    for i in 0..u.grid().len() {
        out.push_str(&num(u.grid().t(i)));
        for x in u.at(i).iter().chain(v.at(i)) {
            let _ = write!(out, ",{}", num(*x));
        }
        for k in 0..d {
            let r = residual.map_or(f64::NAN, |r| r.at(i)[k]);
            let _ = write!(out, ",{}", num(r));
        }
        out.push('\n');
    }
    out
}

fn cmd_solve(a: &CommonArgs) -> Result<i32, Failure> {
    let (cfg, dir) = load_run_config(a)?;
    let (result, spec) = solve(&cfg)?;
    let floor = spec
        .as_ref()
        .filter(|s| s.has_coercivity())
        .and_then(|s| check_iterates_floor(s, &result, &Tolerances::default()).ok());
    let (res_sup, res_l2, res_err) = match &result.el_residual {
        Ok(r) => (Some(r.sup_norm), Some(r.l2_norm), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let report = json!({
        "toolkit": "fracvar",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "solve",
        "config": cfg,
        "status": result.status,
        "iterations": result.iterations,
        "final_action": result.action_history.last(),
        "final_grad_norm": result.final_grad_norm,
        "el_residual_norm": res_sup,
        "el_residual_l2": res_l2,
        "el_residual_error": res_err,
        "seminorm": seminorm(&result.v_star),
        "u_sup_norm": result.u_star.sup_norm(),
        "action_history": result.action_history,
        "seminorm_history": result.seminorm_history,
        "coercivity_floor": floor,
    });
    fs::write(dir.join("solution.csv"), solution_csv(&result))?;
    write_json(&dir.join("report.json"), &report)?;
    println!(
        "{}: {} after {} iterations, action {:.6e}, |grad| {:.3e}",
        cfg.model.name(),
        result.status.as_str(),
        result.iterations,
        result.action_history.last().copied().unwrap_or(f64::NAN),
        result.final_grad_norm
    );
    Ok(exit_for(result.status))
}

fn load_lattice(a: &CommonArgs) -> Result<(LatticeConfig, PathBuf), Failure> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", a.config.display())))?;
    let mut cfg: LatticeConfig = serde_json::from_str(&text).map_err(|e| {
        Failure::Config(format!(
            "{}: malformed lattice config: {e}",
            a.config.display()
        ))
    })?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok((cfg, dir))
}

fn cmd_verify(a: &CommonArgs) -> Result<i32, Failure> {
    let (cfg, dir) = load_lattice(a)?;
    let reports = run_lattice(&cfg)?;
    write_json(&dir.join("properties.json"), &reports)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        eprintln!(
            "FAIL {:?} alpha={} beta={:?} p={:?} n={} data={} seed={:?}: {:.3e} > {:.3e}",
            r.property, r.alpha, r.beta, r.p, r.n, r.data, r.seed, r.discrepancy, r.tolerance
        );
    }
    println!("{} checks, {} failed", reports.len(), failed.len());
    Ok(if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn rel_sup(a: &SampledFunction, b: &SampledFunction) -> Result<f64, Failure> {
    let err = a.combine(1.0, b, -1.0)?.sup_norm();
    let scale = b.sup_norm();
    Ok(if scale > 0.0 { err / scale } else { err })
}

#[derive(Debug, Serialize)]
struct OperatorRow {
    side: Side,
    op: Operator,
    alpha: f64,
    beta: f64,
    n: usize,
    sup_rel_error: f64,
    tolerance: f64,
    passed: bool,
}

fn cmd_oracle(a: &CommonArgs) -> Result<i32, Failure> {
    let (cfg, dir) = load_run_config(a)?;
    let f = match (&cfg.model, cfg.source_samples()?) {
        (BuiltinModel::PnormLinear { p, .. }, Some(f)) if *p == 2.0 => f,
        _ => {
            return Err(Failure::Config(
                "oracle needs the linear-source model `pnorm_linear` with p = 2".into(),
            ))
        }
    };
    let (result, _) = solve(&cfg)?;
    let oracle = quadratic_oracle(&f, cfg.params()?)?;
    let u_err = rel_sup(&result.u_star, &oracle.u_star)?;
    let v_err = rel_sup(result.v_star.samples(), oracle.v_star.samples())?;

    let grid = cfg.grid()?;
    let mut csv = String::from("t,u_solver,u_oracle,u_abs_err,v_solver,v_oracle,v_abs_err\n");
    for i in 0..grid.len() {
        let (us, uo) = (result.u_star.at(i)[0], oracle.u_star.at(i)[0]);
        let (vs, vo) = (
            result.v_star.samples().at(i)[0],
            oracle.v_star.samples().at(i)[0],
        );
        let row = [grid.t(i), us, uo, (us - uo).abs(), vs, vo, (vs - vo).abs()];
        csv.push_str(&row.iter().map(|x| num(*x)).collect::<Vec<_>>().join(","));
        csv.push('\n');
    }
    fs::write(dir.join("oracle.csv"), csv)?;

    let op_tol = operator_tolerance(grid.n());
    let mut rows = Vec::new();
    for side in [Side::Left, Side::Right] {
        for op in [Operator::Integral, Operator::Derivative] {
            for alpha in [0.3, 0.5, 0.8] {
                for beta in [1.0, 2.0, 2.5] {
                    let e = operator_error(beta, FracOrder::new(alpha)?, side, op, grid)?;
                    rows.push(OperatorRow {
                        side,
                        op,
                        alpha,
                        beta,
                        n: grid.n(),
                        sup_rel_error: e,
                        tolerance: op_tol,
                        passed: e <= op_tol,
                    });
                }
            }
        }
    }
    let mut table = String::from("side,op,alpha,beta,n,sup_rel_error,tolerance,passed\n");
    for r in &rows {
        let side = if r.side == Side::Left {
            "left"
        } else {
            "right"
        };
        let op = if r.op == Operator::Integral {
            "integral"
        } else {
            "derivative"
        };
        let _ = writeln!(
            table,
            "{side},{op},{},{},{},{},{},{}",
            r.alpha,
            r.beta,
            r.n,
            num(r.sup_rel_error),
            num(r.tolerance),
            r.passed
        );
    }
    fs::write(dir.join("operators.csv"), table)?;

    let solver_ok = u_err <= ORACLE_TOL;
    let ops_ok = rows.iter().all(|r| r.passed);
    let summary = json!({
        "toolkit": "fracvar",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "oracle",
        "config": cfg,
        "status": result.status,
        "u_sup_rel_error": u_err,
        "v_sup_rel_error": v_err,
        "tolerance": ORACLE_TOL,
        "operators": rows,
        "passed": solver_ok && ops_ok,
    });
    write_json(&dir.join("oracle.json"), &summary)?;
    println!(
        "solver vs oracle: u {u_err:.3e}, v {v_err:.3e}; operator table {}",
        if ops_ok { "ok" } else { "FAILED" }
    );
    Ok(if solver_ok && ops_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
