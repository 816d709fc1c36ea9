//! The Bolza Lagrangian `(y² − 1)² + x⁴` is neither convex in `y` nor
//! coercive; both checks return an explicit witness. The coercivity
//! candidate is `L ≥ ½ |y|⁴`, which fails in the well `y = ±1, x = 0`.

use std::sync::Arc;

use fracvar::lagrangian::{
    check_coercivity, check_convexity, constant_field, Bolza, ConvexityVariant, HypothesisSpec,
    SamplingBox, Witness,
};
use fracvar::{Error, ProblemParams};

pub fn run() -> fracvar::Result<(Witness, Witness)> {
    let params = ProblemParams::new(0.75, 4.0)?;
    let spec = HypothesisSpec::new().coercivity(
        0.5,
        1.0,
        constant_field(0.5),
        Arc::new(|_| 0.0),
        Arc::new(|_| 0.0),
    );
    let area = SamplingBox::symmetric(2.0, 2.0, 0.0, 1.0)?;
    let convex = check_convexity(&Bolza, ConvexityVariant::H5pp, &area, 1000, 0)?;
    let coercive = check_coercivity(&Bolza, &spec, &params, &area, 1000, 0)?;
    let missing = || Error::InvalidParams("expected a violation".into());
    let (h1, w1) = convex.first_violation().ok_or_else(missing)?;
    let (h2, w2) = coercive.first_violation().ok_or_else(missing)?;
    println!(
        "{h1:?}: x={:?} y={:?} partner={:?}: midpoint {} > mean {}",
        w1.x, w1.y, w1.partner, w1.lhs, w1.rhs
    );
    println!(
        "{h2:?}: x={:?} y={:?}: floor {} > L = {}",
        w2.x, w2.y, w2.lhs, w2.rhs
    );
    Ok((w1.clone(), w2.clone()))
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
