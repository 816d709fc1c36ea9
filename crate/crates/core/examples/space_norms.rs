//! A velocity field, its state `u = I^α v`, the norms of the space and the
//! embedding constants that bound `u` by `v`.

use fracvar::space::{
    embedding_constants, full_norm, reconstruct_state, seminorm, EmbeddingConstants,
};
use fracvar::{Grid, ProblemParams, SampledFunction, VelocityField};

/// Returns `(seminorm, full norm, sup of u, constants)`.
pub fn run() -> fracvar::Result<(f64, f64, f64, EmbeddingConstants)> {
    let params = ProblemParams::new(0.75, 2.0)?;
    let grid = Grid::unit(512)?;
    let v = SampledFunction::scalar(grid, |t| (3.0 * t).cos())?;
    let vf = VelocityField::new(v, params);
    let u = reconstruct_state(&vf)?;
    let c = embedding_constants(&params, grid.a(), grid.b())?;
    let (semi, full) = (seminorm(&vf), full_norm(&vf)?);
    println!("|u|_alpha,p = {semi:.6}, ||u||_alpha,p = {full:.6}");
    println!("sup |u| = {:.6} <= {:.6}", u.sup_norm(), c.sup_bound * semi);
    println!(
        "||u||_p = {:.6} <= {:.6}",
        u.lp_norm(2.0),
        c.lp_bound * semi
    );
    Ok((semi, full, u.sup_norm(), c))
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
