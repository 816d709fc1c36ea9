//! Lagrangians `L(x, y, t)` with analytic partial derivatives, the built-in
//! example models, and sampled checkers for the growth, coercivity and
//! convexity hypotheses.

mod builtin;
mod hypotheses;
mod sampling;

use std::fmt;
use std::sync::Arc;

pub use builtin::{
    builtin, Bolza, BuiltinModel, Dirichlet, PNormLinear, PNormPotential, Potential, PotentialSpec,
    Source, SourceSpec,
};
pub use hypotheses::{
    check_coercivity, check_convexity, check_growth, constant_field, estimate_x_modulus,
    ConvexityVariant, Hypothesis, HypothesisReport, HypothesisSpec, SamplingBox, Verdict, Witness,
};

/// `(x, t) ↦ R`, used for envelopes and potentials.
pub type FieldFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// `t ↦ R`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A `C¹` Lagrangian on `R^d × R^d × [a, b]`.
pub trait Lagrangian: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64], y: &[f64], t: f64) -> f64;

    /// `∂L/∂x` written into `out`.
    fn grad_x(&self, x: &[f64], y: &[f64], t: f64, out: &mut [f64]);

    /// `∂L/∂y` written into `out`.
    fn grad_y(&self, x: &[f64], y: &[f64], t: f64, out: &mut [f64]);
}

impl fmt::Debug for dyn Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("name", &self.name())
            .field("dim", &self.dim())
            .finish()
    }
}

/// Largest relative mismatch between the analytic gradients and central
/// differences of `value` at `(x, y, t)`.
///
/// The step is `rel_step * max(1, |z_k|)` per coordinate; the error is
/// measured relative to `max(1, ‖∇L‖)`.
pub fn gradient_mismatch(
    model: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    t: f64,
    rel_step: f64,
) -> f64 {
    let d = model.dim();
    let mut gx = vec![0.0; d];
    let mut gy = vec![0.0; d];
    model.grad_x(x, y, t, &mut gx);
    model.grad_y(x, y, t, &mut gy);
    let scale = gx
        .iter()
        .chain(&gy)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    let mut worst: f64 = 0.0;
    let mut xp = x.to_vec();
    let mut yp = y.to_vec();
    for k in 0..d {
        let step = rel_step * x[k].abs().max(1.0);
        xp[k] = x[k] + step;
        let fp = model.value(&xp, y, t);
        xp[k] = x[k] - step;
        let fm = model.value(&xp, y, t);
        xp[k] = x[k];
        worst = worst.max(((fp - fm) / (2.0 * step) - gx[k]).abs() / scale);

        let step = rel_step * y[k].abs().max(1.0);
        yp[k] = y[k] + step;
        let fp = model.value(x, &yp, t);
        yp[k] = y[k] - step;
        let fm = model.value(x, &yp, t);
        yp[k] = y[k];
        worst = worst.max(((fp - fm) / (2.0 * step) - gy[k]).abs() / scale);
    }
    worst
}
