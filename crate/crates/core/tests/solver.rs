mod common;

use fracvar::functional::action;
use fracvar::lagrangian::{Dirichlet, PNormLinear, PNormPotential, Potential, Source};
use fracvar::solver::{
    el_residual, minimize, quadratic_oracle, random_start, SolveOptions, SolveStatus,
};
use fracvar::{Error, Grid, ProblemParams, SampledFunction, VelocityField};

fn rel_sup(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.combine(1.0, b, -1.0).unwrap().sup_norm() / b.sup_norm()
}

#[test]
fn oracle_endpoint_value() {
    // u*(1) = −I^α_- I^α_+ 1 at t = 1, which is −1/(2Γ(α+1)²) for α = 1/2.
    let params = ProblemParams::new(0.5, 3.0).unwrap();
    let grid = Grid::unit(1024).unwrap();
    let f = SampledFunction::scalar(grid, |_| 1.0).unwrap();
    let o = quadratic_oracle(&f, params).unwrap();
    let exact = -1.0 / (2.0 * common::gamma_fn(1.5).powi(2));
    assert!((exact + 2.0 / std::f64::consts::PI).abs() < 1e-12);
    let brute = -common::left_integral(
        &|s: f64| common::right_integral(&|_| 1.0, 0.5, s, 1.0),
        0.5,
        0.0,
        1.0,
    );
    assert!((brute - exact).abs() < 1e-6, "{brute} vs {exact}");
    assert!((o.u_star.at(1024)[0] - exact).abs() < 1e-3);
    assert_eq!(o.v_star.samples().at(1024), &[0.0]);
}

#[test]
fn zero_source_gives_zero_minimizer() {
    let params = ProblemParams::new(0.6, 2.0).unwrap();
    let grid = Grid::unit(64).unwrap();
    let o = quadratic_oracle(&SampledFunction::zeros(grid, 1), params).unwrap();
    assert!(o
        .u_star
        .values()
        .iter()
        .chain(o.v_star.samples().values())
        .all(|&v| v == 0.0));
    let r = minimize(&Dirichlet::new(1), params, grid, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert_eq!(r.action_history, vec![0.0]);
    assert_eq!(r.iterations, 0);
}

#[test]
fn linear_source_matches_oracle_for_non_constant_source() {
    let params = ProblemParams::new(0.75, 2.0).unwrap();
    let grid = Grid::unit(256).unwrap();
    let source = Source::polynomial(vec![1.0, -2.0, 0.5]);
    let f = SampledFunction::scalar(grid, |t| source.value(t)).unwrap();
    let model = PNormLinear::new(2.0, source).unwrap();
    let r = minimize(&model, params, grid, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    let o = quadratic_oracle(&f, params).unwrap();
    assert!(rel_sup(&r.u_star, &o.u_star) < 1e-8);
    assert!(r.el_residual_norm().unwrap() < 1e-2);
}

#[test]
fn history_strictly_decreases_from_random_start() {
    let params = ProblemParams::new(0.7, 2.0).unwrap();
    let grid = Grid::unit(128).unwrap();
    let model = PNormPotential::new(1, 2.0, Potential::quadratic_about(1.0, 1.0)).unwrap();
    let opts = SolveOptions {
        initial: Some(random_start(grid, 1, 2.0, 5).unwrap()),
        grad_tol: 1e-3,
        max_iters: 3000,
        ..SolveOptions::default()
    };
    let r = minimize(&model, params, grid, &opts).unwrap();
    assert_eq!(r.status, SolveStatus::Converged, "{:?}", r.final_grad_norm);
    assert!(r.action_history.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(r.action_history.len(), r.iterations + 1);
    assert_eq!(r.seminorm_history.len(), r.action_history.len());
    let last = action(&model, &r.v_star).unwrap().value;
    assert_eq!(last, *r.action_history.last().unwrap());
}

#[test]
fn max_iters_reported() {
    let params = ProblemParams::new(0.7, 2.0).unwrap();
    let grid = Grid::unit(64).unwrap();
    let model = PNormPotential::new(1, 2.0, Potential::quadratic_about(1.0, 1.0)).unwrap();
    let opts = SolveOptions {
        max_iters: 2,
        grad_tol: 1e-14,
        ..SolveOptions::default()
    };
    let r = minimize(&model, params, grid, &opts).unwrap();
    assert_eq!(r.status, SolveStatus::MaxIters);
    assert_eq!(r.iterations, 2);
}

#[test]
fn invalid_options_rejected() {
    let params = ProblemParams::new(0.7, 2.0).unwrap();
    let grid = Grid::unit(16).unwrap();
    for opts in [
        SolveOptions {
            backtrack: 1.0,
            ..SolveOptions::default()
        },
        SolveOptions {
            grad_tol: 0.0,
            ..SolveOptions::default()
        },
        SolveOptions {
            initial: Some(SampledFunction::zeros(Grid::unit(8).unwrap(), 1)),
            ..SolveOptions::default()
        },
    ] {
        assert!(minimize(&Dirichlet::new(1), params, grid, &opts).is_err());
    }
}

#[test]
fn residual_needs_vanishing_momentum_at_b() {
    let params = ProblemParams::new(0.7, 2.0).unwrap();
    let grid = Grid::unit(32).unwrap();
    let vf = VelocityField::new(SampledFunction::scalar(grid, |_| 1.0).unwrap(), params);
    assert!(matches!(
        el_residual(&Dirichlet::new(1), &vf),
        Err(Error::SingularBoundary { .. })
    ));
}
