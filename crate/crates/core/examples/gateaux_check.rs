//! Compare the analytic directional derivative of the action with central
//! differences along random directions.

use fracvar::functional::{fd_check, gradient};
use fracvar::lagrangian::{Dirichlet, PNormPotential, Potential};
use fracvar::solver::random_start;
use fracvar::{Grid, ProblemParams, VelocityField};

/// Worst relative error per model.
pub fn run() -> fracvar::Result<Vec<(String, f64)>> {
    let params = ProblemParams::new(0.7, 4.0)?;
    let grid = Grid::unit(256)?;
    let dirichlet = Dirichlet::new(2);
    let quartic = PNormPotential::new(2, 4.0, Potential::quadratic(1.0))?;
    let vf = VelocityField::new(random_start(grid, 2, 1.0, 3)?, params);
    let mut out = Vec::new();
    for (name, model) in [
        (
            "dirichlet",
            &dirichlet as &dyn fracvar::lagrangian::Lagrangian,
        ),
        ("pnorm_potential", &quartic),
    ] {
        let err = fd_check(model, &vf, 10, 1e-5, 11)?;
        let g = gradient(model, &vf)?;
        println!(
            "{name}: fd error {err:.2e}, gradient sup {:.3e}",
            g.samples().sup_norm()
        );
        out.push((name.to_string(), err));
    }
    Ok(out)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
