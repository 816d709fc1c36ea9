//! Seeded test data for the property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{Grid, SampledFunction};

fn unit_time(grid: &Grid, t: f64) -> f64 {
    (t - grid.a()) / grid.length()
}

/// Trigonometric polynomial of degree 5 with coefficients `O(1/(1+m))`.
pub fn smooth_field(grid: Grid, seed: u64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (0..6)
        .map(|m| {
            let w = 1.0 / (1.0 + m as f64);
            (w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    SampledFunction::scalar(grid, |t| {
        let s = std::f64::consts::PI * unit_time(&grid, t);
        coeffs
            .iter()
            .enumerate()
            .map(|(m, (a, b))| a * (m as f64 * s).cos() + b * (m as f64 * s).sin())
            .sum()
    })
}

/// Continuous piecewise-linear function through `pieces + 1` random values
/// in `[-1, 1]` at equispaced breakpoints.
pub fn piecewise_linear_field(grid: Grid, pieces: usize, seed: u64) -> Result<SampledFunction> {
    let pieces = pieces.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let knots: Vec<f64> = (0..=pieces).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SampledFunction::scalar(grid, |t| {
        let x = unit_time(&grid, t).clamp(0.0, 1.0) * pieces as f64;
        let k = (x.floor() as usize).min(pieces - 1);
        let w = x - k as f64;
        (1.0 - w) * knots[k] + w * knots[k + 1]
    })
}

/// `f(t) = Σ_{m=1}^{4} c_m s^m` with `s = (t−a)/(b−a)`, so `f(a) = 0`,
/// returned with its exact derivative.
pub fn vanishing_polynomial(grid: Grid, seed: u64) -> Result<(SampledFunction, SampledFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = SampledFunction::scalar(grid, |t| {
        let s = unit_time(&grid, t);
        c.iter()
            .enumerate()
            .map(|(m, c)| c * s.powi(m as i32 + 1))
            .sum()
    })?;
    let fdot = SampledFunction::scalar(grid, |t| {
        let s = unit_time(&grid, t);
        c.iter()
            .enumerate()
            .map(|(m, c)| c * (m as f64 + 1.0) * s.powi(m as i32))
            .sum::<f64>()
            / grid.length()
    })?;
    Ok((f, fdot))
}
