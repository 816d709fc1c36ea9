//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are printed and the criteria run one after
//! another (the runtime budgets assume an otherwise idle process).

mod common;

use std::fs;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fracvar::fracops::Operator;
use fracvar::functional::fd_check;
use fracvar::lagrangian::{
    builtin, check_coercivity, check_convexity, constant_field, Bolza, BuiltinModel,
    ConvexityVariant, Dirichlet, Hypothesis, HypothesisSpec, Lagrangian, PNormLinear,
    PNormPotential, Potential, SamplingBox, Source, SourceSpec,
};
use fracvar::solver::{minimize, quadratic_oracle, random_start, SolveOptions, SolveStatus};
use fracvar::space::embedding_constants;
use fracvar::verify::{
    check_coercivity_floor, check_iterates_floor, operator_error, run_lattice, LatticeConfig,
    Property, Tolerances,
};
use fracvar::{FracOrder, Grid, ProblemParams, SampledFunction, Side, VelocityField};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn e(err: fracvar::Error) -> String {
    err.to_string()
}

fn rel_sup(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.combine(1.0, b, -1.0)
        .map(|d| d.sup_norm())
        .unwrap_or(f64::INFINITY)
        / b.sup_norm()
}

/// Operators against Gamma-ratio closed forms: error ≤ 1e-3 at n = 1024,
/// order ≥ 1.5 from 128 to 1024, under 5 s.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut min_order) = (0.0f64, f64::INFINITY);
    let ns = [128, 256, 512, 1024];
    for side in [Side::Left, Side::Right] {
        for op in [Operator::Integral, Operator::Derivative] {
            for alpha in [0.3, 0.5, 0.8] {
                for beta in [1.0, 2.0, 2.5] {
                    let order = FracOrder::new(alpha).map_err(e)?;
                    let errs: Vec<f64> = ns
                        .iter()
                        .map(|&n| operator_error(beta, order, side, op, Grid::unit(n)?))
                        .collect::<fracvar::Result<_>>()
                        .map_err(e)?;
                    let fine = errs[3];
                    ensure(
                        fine <= 1e-3,
                        format!("{side:?} {op:?} alpha={alpha} beta={beta}: {fine:.3e} > 1e-3"),
                    )?;
                    worst = worst.max(fine);
                    // Cases reproduced to roundoff have no measurable order.
                    if errs[0] > 1e-12 {
                        let rate = (errs[0] / fine).log2() / 3.0;
                        ensure(
                            rate >= 1.5,
                            format!("{side:?} {op:?} alpha={alpha} beta={beta}: order {rate:.2}"),
                        )?;
                        min_order = min_order.min(rate);
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(5),
        format!("runtime {elapsed:?} >= 5 s"),
    )?;
    Ok(format!(
        "worst error {worst:.2e} at n=1024, minimum order {min_order:.2}, {elapsed:.2?}"
    ))
}

/// The full property lattice with exact constants, under 60 s.
fn criterion_2() -> Outcome {
    for (alpha, p) in [(0.6, 2.0), (0.75, 3.0), (0.9, 4.0)] {
        let params = ProblemParams::new(alpha, p).map_err(e)?;
        let c = embedding_constants(&params, 0.0, 1.0).map_err(e)?;
        let q = p / (p - 1.0);
        let lp = 1.0 / common::gamma_fn(1.0 + alpha);
        let sup = 1.0 / (common::gamma_fn(alpha) * ((alpha - 1.0) * q + 1.0).powf(1.0 / q));
        ensure(
            (c.lp_bound - lp).abs() <= 1e-12 * lp && (c.sup_bound - sup).abs() <= 1e-12 * sup,
            format!("constants at alpha={alpha}, p={p} differ from the closed forms"),
        )?;
    }
    let start = Instant::now();
    let cfg = LatticeConfig::default();
    let tolerances = Tolerances::default();
    ensure(
        cfg.tolerances == tolerances,
        "lattice does not use the pinned tolerances".into(),
    )?;
    let reports = run_lattice(&cfg).map_err(e)?;
    let elapsed = start.elapsed();
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    if let Some(r) = failed.first() {
        return Err(format!(
            "{} of {} checks failed; first {:?} alpha={} n={} data={}: {:.3e} > {:.3e}",
            failed.len(),
            reports.len(),
            r.property,
            r.alpha,
            r.n,
            r.data,
            r.discrepancy,
            r.tolerance
        ));
    }
    let kinds = [
        Property::Semigroup,
        Property::Composition,
        Property::AcDecomposition,
        Property::LpBound,
        Property::IntegrationByParts,
        Property::SupBound,
        Property::HolderModulus,
    ];
    ensure(
        kinds
            .iter()
            .all(|k| reports.iter().any(|r| r.property == *k)),
        "a property is missing".into(),
    )?;
    ensure(
        elapsed < Duration::from_secs(60),
        format!("runtime {elapsed:?} >= 60 s"),
    )?;
    Ok(format!("{} checks passed in {elapsed:.2?}", reports.len()))
}

/// Gâteaux derivative against central differences, 10 fields at n = 256.
fn criterion_3() -> Outcome {
    let grid = Grid::unit(256).map_err(e)?;
    let dirichlet = Dirichlet::new(2);
    let quartic = PNormPotential::new(2, 4.0, Potential::quadratic(1.0)).map_err(e)?;
    let cases: [(&dyn Lagrangian, f64); 2] = [(&dirichlet, 2.0), (&quartic, 4.0)];
    let mut worst = 0.0f64;
    for (model, p) in cases {
        let params = ProblemParams::new(0.75, p).map_err(e)?;
        for seed in 0..10 {
            let vf = VelocityField::new(random_start(grid, 2, 1.0, seed).map_err(e)?, params);
            let err = fd_check(model, &vf, 10, 1e-5, 1000 + seed).map_err(e)?;
            ensure(
                err <= 1e-6,
                format!("{} seed {seed}: {err:.3e} > 1e-6", model.name()),
            )?;
            worst = worst.max(err);
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

/// Linear-source problem: solver against the closed-form minimizer, and the
/// EL residual under refinement.
fn criterion_4() -> Outcome {
    let params = ProblemParams::new(0.6, 2.0).map_err(e)?;
    let model = PNormLinear::new(2.0, Source::constant(1.0)).map_err(e)?;
    let mut residuals = Vec::new();
    let mut rel_at_512 = f64::NAN;
    for n in [128, 256, 512, 1024] {
        let grid = Grid::unit(n).map_err(e)?;
        let r = minimize(&model, params, grid, &SolveOptions::default()).map_err(e)?;
        ensure(
            r.status == SolveStatus::Converged,
            format!("n={n}: {}", r.status.as_str()),
        )?;
        let res = r
            .el_residual
            .as_ref()
            .map_err(|err| format!("n={n}: residual unavailable: {err}"))?
            .sup_norm;
        residuals.push(res);
        if n == 512 {
            let f = SampledFunction::scalar(grid, |_| 1.0).map_err(e)?;
            let oracle = quadratic_oracle(&f, params).map_err(e)?;
            rel_at_512 = rel_sup(&r.u_star, &oracle.u_star);
            ensure(
                rel_at_512 <= 1e-4,
                format!("sup relative error {rel_at_512:.3e} > 1e-4"),
            )?;
            ensure(res <= 1e-2, format!("EL residual {res:.3e} > 1e-2"))?;
        }
    }
    for w in residuals.windows(2) {
        // 10% slack; residuals already at roundoff count as converged.
        ensure(
            w[1] <= 1.1 * w[0] || w[1] <= 1e-9,
            format!("residual grew: {:.3e} -> {:.3e}", w[0], w[1]),
        )?;
    }
    let listed: Vec<String> = residuals.iter().map(|r| format!("{r:.2e}")).collect();
    Ok(format!(
        "sup relative error {rel_at_512:.2e}, residuals [{}]",
        listed.join(", ")
    ))
}

/// Coercivity floor along every iterate and at 50 seeded random fields.
fn criterion_5() -> Outcome {
    let params = ProblemParams::new(0.6, 2.0).map_err(e)?;
    let grid = Grid::unit(256).map_err(e)?;
    let tol = Tolerances::default();
    let mut checked = 0;
    let models = [
        BuiltinModel::Dirichlet { dim: 1 },
        BuiltinModel::PnormLinear {
            p: 2.0,
            source: SourceSpec::Constant { value: 1.0 },
        },
    ];
    for desc in &models {
        let (model, spec) = builtin(desc).map_err(e)?;
        let spec = spec.ok_or(format!("{} has no hypothesis spec", desc.name()))?;
        let fields: Vec<VelocityField> = (0..50)
            .map(|seed| {
                Ok(VelocityField::new(
                    random_start(grid, 1, 3.0, seed)?,
                    params,
                ))
            })
            .collect::<fracvar::Result<_>>()
            .map_err(e)?;
        let r = check_coercivity_floor(model.as_ref(), &spec, &params, &fields, &tol).map_err(e)?;
        ensure(r.passed, format!("{} random fields: {r:?}", desc.name()))?;
        let opts = SolveOptions {
            initial: Some(random_start(grid, 1, 3.0, 99).map_err(e)?),
            ..SolveOptions::default()
        };
        let solved = minimize(model.as_ref(), params, grid, &opts).map_err(e)?;
        let r = check_iterates_floor(&spec, &solved, &tol).map_err(e)?;
        ensure(r.passed, format!("{} iterates: {r:?}", desc.name()))?;
        checked += fields.len() + solved.action_history.len();
    }
    Ok(format!("{checked} actions above the floor"))
}

/// Two solves of the quadratic problem from independent random starts.
fn criterion_6() -> Outcome {
    let params = ProblemParams::new(0.6, 2.0).map_err(e)?;
    let grid = Grid::unit(512).map_err(e)?;
    let model = PNormLinear::new(2.0, Source::cosine(1.0, 2.0)).map_err(e)?;
    let solve = |seed| {
        let opts = SolveOptions {
            initial: Some(random_start(grid, 1, 2.0, seed)?),
            ..SolveOptions::default()
        };
        minimize(&model, params, grid, &opts)
    };
    let (a, b) = (solve(11).map_err(e)?, solve(12).map_err(e)?);
    for r in [&a, &b] {
        ensure(
            r.status == SolveStatus::Converged,
            format!("status {}", r.status.as_str()),
        )?;
    }
    let gap = a
        .u_star
        .combine(1.0, &b.u_star, -1.0)
        .map_err(e)?
        .sup_norm();
    ensure(gap <= 1e-4, format!("solutions differ by {gap:.3e}"))?;
    Ok(format!("sup distance between minimizers {gap:.2e}"))
}

/// Bolza: non-convex and non-coercive, witnessed within 10³ samples.
fn criterion_7() -> Outcome {
    let params = ProblemParams::new(0.75, 4.0).map_err(e)?;
    let candidate = HypothesisSpec::new().coercivity(
        0.5,
        1.0,
        constant_field(0.5),
        Arc::new(|_| 0.0),
        Arc::new(|_| 0.0),
    );
    let area = SamplingBox::symmetric(2.0, 2.0, 0.0, 1.0).map_err(e)?;
    let seeds = 0..50u64;
    for seed in seeds.clone() {
        let convex =
            check_convexity(&Bolza, ConvexityVariant::H5pp, &area, 1000, seed).map_err(e)?;
        let w = convex
            .verdict(Hypothesis::H5pp)
            .and_then(|v| v.witness())
            .ok_or(format!("seed {seed}: convex"))?;
        ensure(
            w.lhs > w.rhs && w.partner.is_some(),
            format!("seed {seed}: witness {w:?} is not a violation"),
        )?;
        let coercive =
            check_coercivity(&Bolza, &candidate, &params, &area, 1000, seed).map_err(e)?;
        let (h, w) = coercive
            .first_violation()
            .ok_or(format!("seed {seed}: coercive"))?;
        let at_well = w.x == [0.0] && w.y.len() == 1 && w.y[0].abs() == 1.0;
        ensure(
            h == Hypothesis::H4 && at_well,
            format!("seed {seed}: unexpected witness {w:?}"),
        )?;
        ensure(
            Bolza.value(&w.x, &w.y, w.t) < w.lhs,
            format!("seed {seed}: witness does not refute"),
        )?;
    }
    Ok(format!(
        "both hypotheses refuted for {} seeds",
        seeds.count()
    ))
}

/// Byte-identical outputs for repeated `solve` and `verify` runs.
fn criterion_8() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|err| err.to_string())?;
    let solve_cfg = tmp.path().join("solve.json");
    let verify_cfg = tmp.path().join("verify.json");
    fs::write(
        &solve_cfg,
        r#"{"interval": [0.0, 1.0], "n": 128, "alpha": 0.7, "p": 2.0,
            "model": {"name": "pnorm_potential", "potential": {"kind": "quadratic", "scale": 1.0, "center": 1.0}},
            "solver": {"grad_tol": 1e-3, "initial": {"random": {"amplitude": 1.0}}}, "seed": 5}"#,
    )
    .map_err(|err| err.to_string())?;
    fs::write(
        &verify_cfg,
        r#"{"alphas": [0.6, 0.9], "ps": [2.0, 4.0], "ns": [128, 256], "random_fields": 2}"#,
    )
    .map_err(|err| err.to_string())?;
    let out = tmp.path().join("out");
    let mut compared = 0;
    for (verb, cfg, files) in [
        ("solve", &solve_cfg, &["solution.csv", "report.json"][..]),
        ("verify", &verify_cfg, &["properties.json"][..]),
    ] {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let status = Command::new(env!("CARGO_BIN_EXE_fracvar"))
                .args([verb, "--config"])
                .arg(cfg)
                .arg("--out")
                .arg(&out)
                .args(["--seed", "5"])
                .output()
                .map_err(|err| err.to_string())?
                .status;
            ensure(status.success(), format!("{verb} exited with {status}"))?;
            let bytes: Vec<Vec<u8>> = files
                .iter()
                .map(|f| fs::read(out.join(f)))
                .collect::<Result<_, _>>()
                .map_err(|err| err.to_string())?;
            runs.push(bytes);
        }
        ensure(
            runs[0] == runs[1],
            format!("{verb} outputs differ between runs"),
        )?;
        compared += files.len();
    }
    Ok(format!(
        "{compared} output files byte-identical across reruns"
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("operator oracle equivalence", criterion_1),
        ("property suite", criterion_2),
        ("Gateaux correctness", criterion_3),
        ("solver vs oracle", criterion_4),
        ("coercivity floor", criterion_5),
        ("uniqueness under strict convexity", criterion_6),
        ("counterexample detection", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
