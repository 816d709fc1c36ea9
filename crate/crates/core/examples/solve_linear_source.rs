//! Minimize `½ y² + f x` with `f ≡ 1` and compare with the closed-form
//! minimizer `v* = −I^α_+ f`.

use fracvar::lagrangian::{PNormLinear, Source};
use fracvar::solver::{minimize, quadratic_oracle, SolveOptions, SolveResult};
use fracvar::{Grid, ProblemParams, SampledFunction};

/// Solver result and its sup-norm relative distance to the oracle state.
pub fn run() -> fracvar::Result<(SolveResult, f64)> {
    let params = ProblemParams::new(0.6, 2.0)?;
    let grid = Grid::unit(512)?;
    let model = PNormLinear::new(2.0, Source::constant(1.0))?;
    let result = minimize(&model, params, grid, &SolveOptions::default())?;
    let f = SampledFunction::scalar(grid, |_| 1.0)?;
    let oracle = quadratic_oracle(&f, params)?;
    let rel =
        result.u_star.combine(1.0, &oracle.u_star, -1.0)?.sup_norm() / oracle.u_star.sup_norm();
    println!(
        "{} in {} iterations; action {:.8}; |u - u*| / |u*| = {rel:.2e}; EL residual {:?}",
        result.status.as_str(),
        result.iterations,
        result.action_history.last().copied().unwrap_or(f64::NAN),
        result.el_residual_norm()
    );
    Ok((result, rel))
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
