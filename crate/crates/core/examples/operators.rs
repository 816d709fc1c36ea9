//! Fractional integrals and derivatives of power functions against their
//! Gamma-ratio closed forms, with the observed convergence order.

use fracvar::fracops::Operator;
use fracvar::verify::operator_error;
use fracvar::{FracOrder, Grid, Side};

pub struct Row {
    pub beta: f64,
    pub alpha: f64,
    pub op: Operator,
    /// Sup-node relative errors at n = 128 and n = 1024.
    pub coarse: f64,
    pub fine: f64,
    pub order: f64,
}

/// Every left-sided case.
pub fn run() -> fracvar::Result<Vec<Row>> {
    let mut rows = Vec::new();
    for op in [Operator::Integral, Operator::Derivative] {
        for alpha in [0.3, 0.5, 0.8] {
            for beta in [1.0, 2.0, 2.5] {
                let order = FracOrder::new(alpha)?;
                let coarse = operator_error(beta, order, Side::Left, op, Grid::unit(128)?)?;
                let fine = operator_error(beta, order, Side::Left, op, Grid::unit(1024)?)?;
                // Cases the schemes reproduce exactly have no meaningful order.
                let rate = if coarse > 1e-12 {
                    (coarse / fine).log2() / 3.0
                } else {
                    f64::INFINITY
                };
                println!(
                    "{op:?} alpha={alpha} beta={beta}: {coarse:.2e} -> {fine:.2e}, order {rate:.2}"
                );
                rows.push(Row {
                    beta,
                    alpha,
                    op,
                    coarse,
                    fine,
                    order: rate,
                });
            }
        }
    }
    Ok(rows)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
