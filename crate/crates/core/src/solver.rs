//! Direct-method minimization of the discretized action over velocity
//! coordinates, the fractional Euler–Lagrange residual, and the closed-form
//! minimizer of the quadratic model `½‖y‖² + f(t)·x`.
//!
//! The descent direction is the continuous-form gradient
//! `I^α_+[∂L/∂x] + ∂L/∂y`, whose zeros are the discrete solutions of the
//! Euler–Lagrange equation with `∂L/∂y` vanishing at `b`. The Armijo test
//! uses the trapezoid pairing `⟨g, g⟩`. For models whose `∂L/∂x` depends on
//! the state the direction differs from the exact gradient of the discrete
//! action by a consistency error that shrinks with `h`; once the gradient
//! reaches that floor the line search stops with `LineSearchFailure`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{frac_derivative, frac_integral};
use crate::functional::{evaluate, gradient_from_partials, partials, weighted_sq_norm};
use crate::grid::{Grid, SampledFunction, Side};
use crate::lagrangian::Lagrangian;
use crate::space::{reconstruct_state, seminorm, ProblemParams, VelocityField};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Stop once the sup norm of the gradient is at most this.
    pub grad_tol: f64,
    /// Sufficient-decrease constant `c` in `A(v - s g) ≤ A(v) - c s ⟨g, g⟩`.
    pub armijo: f64,
    /// Step multiplier on rejection, in `(0, 1)`.
    pub backtrack: f64,
    pub initial_step: f64,
    /// Steps below this end the line search.
    pub min_step: f64,
    /// Starting velocity; `v ≡ 0` when absent.
    pub initial: Option<SampledFunction>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
            armijo: 1e-4,
            backtrack: 0.5,
            initial_step: 1.0,
            min_step: 1e-12,
            initial: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidOptions(format!(
                    "{name} must be positive, got {x}"
                )))
            }
        };
        positive("grad_tol", self.grad_tol)?;
        positive("initial_step", self.initial_step)?;
        positive("min_step", self.min_step)?;
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::InvalidOptions(format!(
                "armijo constant must lie in (0, 1), got {}",
                self.armijo
            )));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidOptions(format!(
                "backtracking factor must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        Ok(())
    }
}

/// Seeded random start: a cosine series with coefficients in `[-amplitude, amplitude]`.
pub fn random_start(grid: Grid, dim: usize, amplitude: f64, seed: u64) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<[f64; 5]> = (0..dim)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-amplitude..=amplitude)))
        .collect();
    SampledFunction::from_fn(grid, dim, |t, out| {
        let s = (t - grid.a()) / grid.length();
        for (o, c) in out.iter_mut().zip(&coeffs) {
            *o = c
                .iter()
                .enumerate()
                .map(|(m, c)| c * (m as f64 * std::f64::consts::PI * s).cos())
                .sum();
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    LineSearchFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIters => "max_iters",
            Self::LineSearchFailure => "line_search_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    /// Residual at every node, endpoints included.
    pub residual: SampledFunction,
    /// Norms over the interior nodes only.
    pub sup_norm: f64,
    pub l2_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub v_star: VelocityField,
    pub u_star: SampledFunction,
    /// Action at every accepted iterate, starting with the initial point.
    pub action_history: Vec<f64>,
    /// `|u|_{α,p}` at the same iterates.
    pub seminorm_history: Vec<f64>,
    pub final_grad_norm: f64,
    /// `Err` carries the reason the residual could not be formed (for
    /// instance `∂L/∂y` not vanishing at `b`).
    pub el_residual: std::result::Result<ElResidual, Error>,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SolveResult {
    pub fn el_residual_norm(&self) -> Option<f64> {
        self.el_residual.as_ref().ok().map(|r| r.sup_norm)
    }
}

/// Gradient descent with Armijo backtracking. The action history is strictly
/// decreasing.
pub fn minimize(
    model: &dyn Lagrangian,
    params: ProblemParams,
    grid: Grid,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let d = model.dim();
    let v0 = match &opts.initial {
        Some(v) => {
            if *v.grid() != grid || v.dim() != d {
                return Err(Error::ShapeMismatch(format!(
                    "initial point has {} nodes x {} components, expected {} x {d}",
                    v.grid().len(),
                    v.dim(),
                    grid.len()
                )));
            }
            v.clone()
        }
        None => SampledFunction::zeros(grid, d),
    };
    let mut vf = VelocityField::new(v0, params);
    let (mut a, lx, ly) = evaluate(model, &vf)?;
    let mut g = gradient_from_partials(&vf, &lx, &ly)?;
    let mut action_history = vec![a.value];
    let mut seminorm_history = vec![seminorm(&vf)];
    let mut iterations = 0;
    let status = loop {
        if g.samples().sup_norm() <= opts.grad_tol {
            break SolveStatus::Converged;
        }
        if iterations >= opts.max_iters {
            break SolveStatus::MaxIters;
        }
        let gg = weighted_sq_norm(g.samples());
        let mut s = opts.initial_step;
        let accepted = loop {
            if s < opts.min_step {
                break None;
            }
            let trial = vf.with_samples(vf.samples().combine(1.0, g.samples(), -s)?);
            // A blow-up of the model along the ray counts as a rejected step.
            if let Ok((at, lx, ly)) = evaluate(model, &trial) {
                if at.value < a.value && at.value <= a.value - opts.armijo * s * gg {
                    break Some((trial, at, lx, ly));
                }
            }
            s *= opts.backtrack;
        };
        let Some((trial, at, lx, ly)) = accepted else {
            break SolveStatus::LineSearchFailure;
        };
        vf = trial;
        a = at;
        g = gradient_from_partials(&vf, &lx, &ly)?;
        action_history.push(a.value);
        seminorm_history.push(seminorm(&vf));
        iterations += 1;
    };
    let u_star = reconstruct_state(&vf)?;
    Ok(SolveResult {
        el_residual: el_residual(model, &vf),
        final_grad_norm: g.samples().sup_norm(),
        v_star: vf,
        u_star,
        action_history,
        seminorm_history,
        iterations,
        status,
    })
}

/// `∂L/∂x(u, v, t) + D^α_+[∂L/∂y(u, v, ·)](t)`, scored on interior nodes.
pub fn el_residual(model: &dyn Lagrangian, vf: &VelocityField) -> Result<ElResidual> {
    let (lx, ly) = partials(model, vf)?;
    let dy = frac_derivative(&ly, vf.params().alpha(), Side::Right)?;
    let residual = lx.combine(1.0, &dy, 1.0)?;
    let grid = *residual.grid();
    let norms = residual.pointwise_norms();
    let interior = &norms[1..grid.n()];
    let sup_norm = interior.iter().copied().fold(0.0, f64::max);
    let l2_norm = (grid.h() * interior.iter().map(|r| r * r).sum::<f64>()).sqrt();
    Ok(ElResidual {
        residual,
        sup_norm,
        l2_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOracle {
    pub v_star: VelocityField,
    pub u_star: SampledFunction,
}

/// Minimizer of `∫ ½‖v‖² + f·I^α_- v`: after integration by parts the
/// integrand is minimized pointwise by `v* = −I^α_+ f`.
pub fn quadratic_oracle(f: &SampledFunction, params: ProblemParams) -> Result<QuadraticOracle> {
    let v = frac_integral(f, params.alpha(), Side::Right)?.scaled(-1.0)?;
    let v_star = VelocityField::new(v, params);
    let u_star = reconstruct_state(&v_star)?;
    Ok(QuadraticOracle { v_star, u_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::action;
    use crate::lagrangian::{Dirichlet, PNormLinear, Source};

    fn params(alpha: f64) -> ProblemParams {
        ProblemParams::new(alpha, 2.0).unwrap()
    }

    #[test]
    fn options_validation() {
        let bad = SolveOptions {
            backtrack: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolveOptions {
            grad_tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidOptions(_))));
        assert!(SolveOptions::default().validate().is_ok());
    }

    #[test]
    fn dirichlet_converges_immediately() {
        let g = Grid::unit(64).unwrap();
        let r = minimize(&Dirichlet::new(1), params(0.6), g, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.action_history, vec![0.0]);
        assert_eq!(r.el_residual_norm(), Some(0.0));
    }

    #[test]
    fn dirichlet_from_random_start_descends() {
        let g = Grid::unit(64).unwrap();
        let opts = SolveOptions {
            initial: Some(random_start(g, 1, 1.0, 3).unwrap()),
            ..Default::default()
        };
        let r = minimize(&Dirichlet::new(1), params(0.6), g, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.action_history.windows(2).all(|w| w[1] < w[0]));
        assert!(r.v_star.samples().sup_norm() <= 1e-8);
    }

    #[test]
    fn quadratic_problem_one_step() {
        let g = Grid::unit(128).unwrap();
        let m = PNormLinear::new(2.0, Source::constant(1.0)).unwrap();
        let r = minimize(&m, params(0.6), g, &SolveOptions::default()).unwrap();
        let f = SampledFunction::scalar(g, |_| 1.0).unwrap();
        let o = quadratic_oracle(&f, params(0.6)).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        let diff = r.u_star.combine(1.0, &o.u_star, -1.0).unwrap().sup_norm();
        assert!(diff <= 1e-12 * o.u_star.sup_norm(), "{diff:e}");
    }

    #[test]
    fn oracle_of_zero_source() {
        let g = Grid::unit(32).unwrap();
        let o = quadratic_oracle(&SampledFunction::zeros(g, 2), params(0.7)).unwrap();
        assert_eq!(o.u_star.sup_norm(), 0.0);
        assert_eq!(o.v_star.samples().sup_norm(), 0.0);
    }

    #[test]
    fn residual_of_singular_data_is_an_error() {
        let g = Grid::unit(64).unwrap();
        let vf = VelocityField::new(SampledFunction::scalar(g, |_| 1.0).unwrap(), params(0.6));
        assert!(matches!(
            el_residual(&Dirichlet::new(1), &vf),
            Err(Error::SingularBoundary { .. })
        ));
    }

    #[test]
    fn oracle_beats_perturbations() {
        let g = Grid::unit(64).unwrap();
        let m = PNormLinear::new(2.0, Source::cosine(1.0, 3.0)).unwrap();
        let f = SampledFunction::scalar(g, |t| (3.0 * t).cos()).unwrap();
        let o = quadratic_oracle(&f, params(0.75)).unwrap();
        let best = action(&m, &o.v_star).unwrap().value;
        for seed in 0..20 {
            let dv = random_start(g, 1, 0.1, seed).unwrap();
            let vf = o
                .v_star
                .with_samples(o.v_star.samples().combine(1.0, &dv, 1.0).unwrap());
            assert!(action(&m, &vf).unwrap().value >= best - 1e-6);
        }
    }
}
