//! Sample the growth, coercivity and convexity hypotheses of a well-posed
//! model. Sampling can only refute, so a clean report means "no violation
//! seen".

use fracvar::lagrangian::{
    check_coercivity, check_convexity, check_growth, estimate_x_modulus, ConvexityVariant,
    HypothesisReport, PNormPotential, Potential, SamplingBox,
};
use fracvar::ProblemParams;

pub fn run() -> fracvar::Result<Vec<HypothesisReport>> {
    let params = ProblemParams::new(0.6, 2.0)?;
    let model = PNormPotential::new(2, 2.0, Potential::quadratic(1.0))?;
    let spec = model.hypothesis_spec();
    let area = SamplingBox::symmetric(3.0, 3.0, 0.0, 1.0)?;
    let reports = vec![
        check_growth(&model, &spec, &params, &area, 2000, 7)?,
        check_coercivity(&model, &spec, &params, &area, 2000, 7)?,
        check_convexity(&model, ConvexityVariant::H5, &area, 2000, 7)?,
    ];
    for r in &reports {
        for (h, v) in &r.verdicts {
            println!(
                "{h:?}: {}",
                if v.is_violated() {
                    "violated"
                } else {
                    "satisfied on samples"
                }
            );
        }
    }
    for (delta, modulus) in estimate_x_modulus(&model, &area, &[0.1, 0.01], 500, 7)? {
        println!("x-modulus at delta={delta}: {modulus:.4}");
    }
    Ok(reports)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
