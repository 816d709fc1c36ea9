//! Numerical checks of the operator identities and embedding inequalities,
//! each producing a serializable [`PropertyReport`], and a driver that runs
//! them over a parameter lattice.

mod fields;
mod lattice;
mod tolerances;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{
    frac_derivative, frac_integral, frac_integral_order, power_closed_form, Operator,
};
use crate::functional::action;
use crate::grid::{euclidean, FracOrder, Grid, SampledFunction, Side};
use crate::lagrangian::{HypothesisSpec, Lagrangian};
use crate::solver::SolveResult;
use crate::space::{
    embedding_constants, seminorm, EmbeddingConstants, ProblemParams, VelocityField,
};
use crate::special::gamma;

pub use fields::{piecewise_linear_field, smooth_field, vanishing_polynomial};
pub use lattice::{run_lattice, LatticeConfig};
pub use tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Semigroup,
    Composition,
    AcDecomposition,
    LpBound,
    IntegrationByParts,
    SupBound,
    HolderModulus,
    CoercivityFloor,
}

/// Where a check was worst.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PropertyWitness {
    Node {
        index: usize,
        t: f64,
    },
    NodePair {
        i: usize,
        j: usize,
    },
    /// The whole integral; used by scalar identities.
    Integral,
    /// Index into the supplied sample fields or iterates.
    Sample {
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub seed: Option<u64>,
    /// Free-form description of the test data.
    pub data: String,
    /// For identities the scaled error; for inequalities the scaled excess
    /// `lhs − bound` (negative when the bound holds with room).
    pub discrepancy: f64,
    pub tolerance: f64,
    /// `lhs / bound` for inequality checks.
    pub ratio: Option<f64>,
    pub passed: bool,
    /// Worst location; present on every failure.
    pub witness: Option<PropertyWitness>,
}

impl PropertyReport {
    fn new(property: Property, alpha: f64, n: usize, discrepancy: f64, tolerance: f64) -> Self {
        Self {
            property,
            alpha,
            beta: None,
            p: None,
            n,
            seed: None,
            data: String::new(),
            discrepancy,
            tolerance,
            ratio: None,
            passed: discrepancy <= tolerance,
            witness: None,
        }
    }

    /// Label the test data and the seed that produced it.
    pub fn with_data(mut self, data: impl Into<String>, seed: Option<u64>) -> Self {
        self.data = data.into();
        self.seed = seed;
        self
    }
}

/// Largest pointwise distance over `range`, scaled.
fn worst_node(
    a: &SampledFunction,
    b: &SampledFunction,
    range: std::ops::Range<usize>,
) -> (f64, usize) {
    let mut worst = (0.0, range.start);
    for i in range {
        let e = a
            .at(i)
            .iter()
            .zip(b.at(i))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if e > worst.0 {
            worst = (e, i);
        }
    }
    worst
}

fn scaled(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn node(grid: &Grid, index: usize) -> Option<PropertyWitness> {
    Some(PropertyWitness::Node {
        index,
        t: grid.t(index),
    })
}

/// Semigroup: `I^α_- I^β_- f = I^{α+β}_- f`, sup over nodes, relative to
/// `‖f‖_∞`.
pub fn check_semigroup(
    alpha: f64,
    beta: f64,
    f: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let inner = frac_integral_order(f, beta, Side::Left)?;
    let lhs = frac_integral_order(&inner, alpha, Side::Left)?;
    let rhs = frac_integral_order(f, alpha + beta, Side::Left)?;
    let (err, at) = worst_node(&lhs, &rhs, 0..f.grid().len());
    let mut r = PropertyReport::new(
        Property::Semigroup,
        alpha,
        f.grid().n(),
        scaled(err, f.sup_norm()),
        tol.semigroup_at(f.grid().n(), alpha, beta),
    );
    r.beta = Some(beta);
    r.witness = node(f.grid(), at);
    Ok(r)
}

/// `D^α_- I^α_- f = f` on interior nodes, relative to `‖f‖_∞`.
pub fn check_composition(
    alpha: FracOrder,
    f: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let back = frac_derivative(&frac_integral(f, alpha, Side::Left)?, alpha, Side::Left)?;
    let n = f.grid().n();
    let (err, at) = worst_node(&back, f, 1..n);
    let mut r = PropertyReport::new(
        Property::Composition,
        alpha.value(),
        n,
        scaled(err, f.sup_norm()),
        tol.composition_at(n),
    );
    r.witness = node(f.grid(), at);
    Ok(r)
}

/// `D^α_- f = I^{1−α}_- ḟ` for `f(a) = 0`, interior nodes, relative to
/// `‖I^{1−α} ḟ‖_∞`.
pub fn check_ac_decomposition(
    alpha: FracOrder,
    f: &SampledFunction,
    fdot: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    f.check_compatible(fdot)?;
    let lhs = frac_derivative(f, alpha, Side::Left)?;
    let rhs = frac_integral(fdot, alpha.complement(), Side::Left)?;
    let n = f.grid().n();
    let (err, at) = worst_node(&lhs, &rhs, 1..n);
    let mut r = PropertyReport::new(
        Property::AcDecomposition,
        alpha.value(),
        n,
        scaled(err, rhs.sup_norm()),
        tol.ac_decomposition_at(n),
    );
    r.witness = node(f.grid(), at);
    Ok(r)
}

fn inequality(
    property: Property,
    params: &ProblemParams,
    n: usize,
    lhs: f64,
    bound: f64,
    norm: f64,
    slack: f64,
) -> PropertyReport {
    let mut r = PropertyReport::new(
        property,
        params.alpha().value(),
        n,
        scaled(lhs - bound, norm),
        slack,
    );
    r.p = Some(params.p());
    r.ratio = (bound > 0.0).then(|| lhs / bound);
    if norm == 0.0 {
        r.passed = lhs <= bound;
    }
    r
}

/// `L^p` bound: `‖I^α_- f‖_{L^p} ≤ (b−a)^α / Γ(1+α) ‖f‖_{L^p}`.
pub fn check_lp_bound(
    params: &ProblemParams,
    f: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let g = *f.grid();
    let c: EmbeddingConstants = embedding_constants(params, g.a(), g.b())?;
    let norm = f.lp_norm(params.p());
    let lhs = frac_integral(f, params.alpha(), Side::Left)?.lp_norm(params.p());
    let mut r = inequality(
        Property::LpBound,
        params,
        g.n(),
        lhs,
        c.lp_bound * norm,
        norm,
        tol.lp_slack,
    );
    if !r.passed {
        r.witness = Some(PropertyWitness::Integral);
    }
    Ok(r)
}

/// Integration by parts: `∫ I^α_- f · g = ∫ f · I^α_+ g` with `f ∈ L^{p_f}`,
/// `g ∈ L^{q_g}`. Exponent pairs with `1/p_f + 1/q_g ≥ 1 + α` are rejected.
/// The error is relative to `‖f‖_{L^{p_f}} ‖g‖_{L^{q_g}}`.
pub fn check_ibp(
    alpha: FracOrder,
    f: &SampledFunction,
    g: &SampledFunction,
    p_f: f64,
    q_g: f64,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    if !(p_f >= 1.0 && q_g >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "exponents must be >= 1, got ({p_f}, {q_g})"
        )));
    }
    if 1.0 / p_f + 1.0 / q_g >= 1.0 + alpha.value() {
        return Err(Error::InvalidParams(format!(
            "integration by parts needs 1/p + 1/q < 1 + alpha, got 1/{p_f} + 1/{q_g} with alpha = {}",
            alpha.value()
        )));
    }
    f.check_compatible(g)?;
    let lhs = frac_integral(f, alpha, Side::Left)?.inner(g)?;
    let rhs = f.inner(&frac_integral(g, alpha, Side::Right)?)?;
    let scale = f.lp_norm(p_f) * g.lp_norm(q_g);
    let mut r = PropertyReport::new(
        Property::IntegrationByParts,
        alpha.value(),
        f.grid().n(),
        scaled((lhs - rhs).abs(), scale),
        tol.ibp_at(f.grid().n()),
    );
    r.p = Some(p_f);
    r.witness = Some(PropertyWitness::Integral);
    Ok(r)
}

/// Sup bound: `‖I^α_- f‖_∞ ≤ sup_bound ‖f‖_{L^p}` and `I^α_- f(a) = 0`.
pub fn check_sup_bound(
    params: &ProblemParams,
    f: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let g = *f.grid();
    let c = embedding_constants(params, g.a(), g.b())?;
    let norm = f.lp_norm(params.p());
    let u = frac_integral(f, params.alpha(), Side::Left)?;
    let norms = u.pointwise_norms();
    let (at, lhs) = norms
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc });
    let mut r = inequality(
        Property::SupBound,
        params,
        g.n(),
        lhs,
        c.sup_bound * norm,
        norm,
        tol.sup_slack,
    );
    if norms[0] != 0.0 {
        r.passed = false;
        r.witness = node(&g, 0);
    } else if !r.passed {
        r.witness = node(&g, at);
    }
    Ok(r)
}

/// Hölder modulus of `I^α_- f` over every node pair `t_i < t_j`:
/// `‖I f(t_j) − I f(t_i)‖ ≤ C ‖f‖_{L^p} (t_j − t_i)^{α−1/p}` with
/// `C = 2 / (Γ(α) ((α−1)q+1)^{1/q})`. The discrepancy is the worst excess;
/// the ratio is the worst `lhs / rhs`.
pub fn check_holder_modulus(
    params: &ProblemParams,
    f: &SampledFunction,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let g = *f.grid();
    let n = g.n();
    let norm = f.lp_norm(params.p());
    let c = EmbeddingConstants::holder(params) * norm;
    let exponent = params.alpha().value() - 1.0 / params.p();
    let u = frac_integral(f, params.alpha(), Side::Left)?;
    let rhs: Vec<f64> = (0..=n)
        .map(|k| c * (k as f64 * g.h()).powf(exponent))
        .collect();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_ratio: f64 = 0.0;
    let mut pair = (0, 1);
    let d = u.dim();
    let mut diff = vec![0.0; d];
    for j in 1..=n {
        for i in 0..j {
            for (k, slot) in diff.iter_mut().enumerate() {
                *slot = u.at(j)[k] - u.at(i)[k];
            }
            let lhs = euclidean(&diff);
            let bound = rhs[j - i];
            if lhs - bound > worst_excess {
                worst_excess = lhs - bound;
                pair = (i, j);
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(lhs / bound);
            }
        }
    }
    let mut r = PropertyReport::new(
        Property::HolderModulus,
        params.alpha().value(),
        n,
        scaled(worst_excess, norm),
        tol.holder_slack,
    );
    r.p = Some(params.p());
    r.ratio = Some(worst_ratio);
    if norm == 0.0 {
        r.passed = worst_excess <= 0.0;
    }
    if !r.passed {
        r.witness = Some(PropertyWitness::NodePair {
            i: pair.0,
            j: pair.1,
        });
    }
    Ok(r)
}

/// Pass threshold for [`operator_error`]: `1e-3` at `n = 1024`, scaled
/// with the minimum convergence order `1.5` of both operators.
pub fn operator_tolerance(n: usize) -> f64 {
    1e-3 * (1024.0 / n as f64).powf(1.5)
}

/// Sup-node relative error `max_i |err_i| / max_i |exact_i|` of the
/// discrete operator applied to `(t-a)^β` (left) or `(b-t)^β` (right).
pub fn operator_error(
    beta: f64,
    alpha: FracOrder,
    side: Side,
    op: Operator,
    grid: Grid,
) -> Result<f64> {
    let exact = power_closed_form(beta, alpha, side, op, grid)?;
    let f = SampledFunction::scalar(grid, |t| match side {
        Side::Left => (t - grid.a()).powf(beta),
        Side::Right => (grid.b() - t).powf(beta),
    })?;
    let approx = match op {
        Operator::Integral => frac_integral(&f, alpha, side)?,
        Operator::Derivative => frac_derivative(&f, alpha, side)?,
    };
    Ok(scaled(
        approx.combine(1.0, &exact, -1.0)?.sup_norm(),
        exact.sup_norm(),
    ))
}

/// Right-hand side of the coercivity estimate at seminorm `s`:
/// `γ s^p − ‖c₂‖_∞ (b−a)^{α+1−d₄/p} / Γ(α+1) · s^{d₄} − (b−a) ‖c₃‖_∞`,
/// with the sup norms of `c₂` and `c₃` taken over the grid nodes.
pub fn coercivity_floor(
    spec: &HypothesisSpec,
    params: &ProblemParams,
    grid: &Grid,
    s: f64,
) -> Result<f64> {
    spec.validate(params.p())?;
    let (gamma_, d4) = match (spec.gamma(), spec.d4()) {
        (Some(g), Some(d)) => (g, d),
        _ => {
            return Err(Error::InvalidHypothesis(
                "no coercivity envelope attached".into(),
            ))
        }
    };
    let nodes = grid.nodes();
    let sup = |f: &dyn Fn(f64) -> Option<f64>| {
        nodes
            .iter()
            .map(|&t| f(t).unwrap_or(0.0).abs())
            .fold(0.0, f64::max)
    };
    let c2 = sup(&|t| spec.c2(t));
    let c3 = sup(&|t| spec.c3(t));
    let (alpha, p, len) = (params.alpha().value(), params.p(), grid.length());
    Ok(gamma_ * s.powf(p)
        - c2 * len.powf(alpha + 1.0 - d4 / p) / gamma(alpha + 1.0) * s.powf(d4)
        - len * c3)
}

fn floor_report(
    spec: &HypothesisSpec,
    params: &ProblemParams,
    grid: &Grid,
    samples: impl Iterator<Item = (f64, f64)>,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut passed = true;
    let mut witness = None;
    let mut count = 0;
    for (index, (value, s)) in samples.enumerate() {
        count += 1;
        let floor = coercivity_floor(spec, params, grid, s)?;
        let excess = scaled(floor - value, floor.abs().max(value.abs()));
        if excess > worst {
            worst = excess;
            if excess > tol.coercivity_slack {
                passed = false;
                witness = Some(PropertyWitness::Sample { index });
            }
        }
    }
    if count == 0 {
        return Err(Error::InvalidParams(
            "no samples for the coercivity floor".into(),
        ));
    }
    let mut r = PropertyReport::new(
        Property::CoercivityFloor,
        params.alpha().value(),
        grid.n(),
        worst,
        tol.coercivity_slack,
    );
    r.p = Some(params.p());
    r.passed = passed;
    r.witness = witness;
    Ok(r)
}

/// The coercivity lower bound ([`coercivity_floor`]) on the action at each
/// supplied field.
pub fn check_coercivity_floor(
    model: &dyn Lagrangian,
    spec: &HypothesisSpec,
    params: &ProblemParams,
    fields: &[VelocityField],
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let grid = match fields.first() {
        Some(f) => *f.samples().grid(),
        None => return Err(Error::InvalidParams("no sample fields supplied".into())),
    };
    let mut samples = Vec::with_capacity(fields.len());
    for vf in fields {
        if *vf.samples().grid() != grid {
            return Err(Error::ShapeMismatch(
                "sample fields live on different grids".into(),
            ));
        }
        samples.push((action(model, vf)?.value, seminorm(vf)));
    }
    floor_report(spec, params, &grid, samples.into_iter(), tol)
}

/// The same bound along every accepted iterate of a solve.
pub fn check_iterates_floor(
    spec: &HypothesisSpec,
    result: &SolveResult,
    tol: &Tolerances,
) -> Result<PropertyReport> {
    let params = *result.v_star.params();
    let grid = *result.u_star.grid();
    let pairs = result
        .action_history
        .iter()
        .copied()
        .zip(result.seminorm_history.iter().copied());
    floor_report(spec, &params, &grid, pairs, tol)
}
