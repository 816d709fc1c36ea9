//! The action `𝓛(u) = ∫ L(u, D^α_- u, t) dt` in velocity coordinates, its
//! Gâteaux derivative and gradient representers.
//!
//! Everything is assembled with the trapezoid rule on the grid nodes, so
//! [`gateaux`] is the exact derivative of the discrete [`action`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fracops::{frac_integral, IntegralWeights};
use crate::grid::{dot, SampledFunction, Side};
use crate::lagrangian::Lagrangian;
use crate::space::{reconstruct_state, VelocityField};

#[derive(Debug, Clone, PartialEq)]
pub struct ActionValue {
    pub value: f64,
    /// `t_i ↦ L(u(t_i), v(t_i), t_i)`.
    pub integrand: SampledFunction,
}

fn check_dim(model: &dyn Lagrangian, vf: &VelocityField) -> Result<()> {
    if model.dim() != vf.dim() {
        return Err(Error::ShapeMismatch(format!(
            "model `{}` has dimension {}, field has {}",
            model.name(),
            model.dim(),
            vf.dim()
        )));
    }
    Ok(())
}

fn non_finite(vf: &VelocityField, node: usize) -> Error {
    Error::NonFiniteIntegrand {
        node,
        t: vf.samples().grid().t(node),
    }
}

/// Evaluate the action at `u = I^α_- v`.
pub fn action(model: &dyn Lagrangian, vf: &VelocityField) -> Result<ActionValue> {
    check_dim(model, vf)?;
    let u = reconstruct_state(vf)?;
    action_at(model, vf, &u)
}

fn action_at(
    model: &dyn Lagrangian,
    vf: &VelocityField,
    u: &SampledFunction,
) -> Result<ActionValue> {
    let v = vf.samples();
    let grid = *v.grid();
    let mut vals = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let l = model.value(u.at(i), v.at(i), grid.t(i));
        if !l.is_finite() {
            return Err(non_finite(vf, i));
        }
        vals.push(l);
    }
    let value = grid.trapezoid(&vals);
    Ok(ActionValue {
        value,
        integrand: SampledFunction::new(grid, 1, vals)?,
    })
}

/// `(∂L/∂x, ∂L/∂y)` sampled along `(u, v)`.
pub fn partials(
    model: &dyn Lagrangian,
    vf: &VelocityField,
) -> Result<(SampledFunction, SampledFunction)> {
    check_dim(model, vf)?;
    let u = reconstruct_state(vf)?;
    partials_at(model, vf, &u)
}

fn partials_at(
    model: &dyn Lagrangian,
    vf: &VelocityField,
    u: &SampledFunction,
) -> Result<(SampledFunction, SampledFunction)> {
    let v = vf.samples();
    let grid = *v.grid();
    let d = v.dim();
    let mut lx = vec![0.0; grid.len() * d];
    let mut ly = vec![0.0; grid.len() * d];
    for i in 0..grid.len() {
        let t = grid.t(i);
        let (gx, gy) = (&mut lx[i * d..(i + 1) * d], &mut ly[i * d..(i + 1) * d]);
        model.grad_x(u.at(i), v.at(i), t, gx);
        model.grad_y(u.at(i), v.at(i), t, gy);
        if !gx.iter().chain(gy.iter()).all(|x| x.is_finite()) {
            return Err(non_finite(vf, i));
        }
    }
    Ok((
        SampledFunction::new(grid, d, lx)?,
        SampledFunction::new(grid, d, ly)?,
    ))
}

/// `D𝓛(u)(w) = ∫ ∂L/∂x · I^α_- w + ∂L/∂y · w` for the direction `w` given
/// in velocity coordinates.
pub fn gateaux(model: &dyn Lagrangian, vf_u: &VelocityField, vf_w: &VelocityField) -> Result<f64> {
    check_dim(model, vf_u)?;
    vf_u.samples().check_compatible(vf_w.samples())?;
    let (lx, ly) = partials(model, vf_u)?;
    let w_state = reconstruct_state(vf_w)?;
    Ok(lx.inner(&w_state)? + ly.inner(vf_w.samples())?)
}

/// Continuous-form representer `g = I^α_+[∂L/∂x] + ∂L/∂y`, obtained by
/// moving `I^α_-` off the direction with fractional integration by parts.
///
/// `⟨g, w⟩` reproduces [`gateaux`] up to the quadrature error of the
/// integration by parts; use [`discrete_gradient`] for the exact transpose.
pub fn gradient(model: &dyn Lagrangian, vf: &VelocityField) -> Result<VelocityField> {
    let (lx, ly) = partials(model, vf)?;
    gradient_from_partials(vf, &lx, &ly)
}

pub(crate) fn gradient_from_partials(
    vf: &VelocityField,
    lx: &SampledFunction,
    ly: &SampledFunction,
) -> Result<VelocityField> {
    let pulled = frac_integral(lx, vf.params().alpha(), Side::Right)?;
    Ok(vf.with_samples(pulled.combine(1.0, ly, 1.0)?))
}

/// Exact representer of the discrete Gâteaux derivative in the trapezoid
/// inner product: `G = W⁻¹ Mᵀ W ∂L/∂x + ∂L/∂y`, where `M` is the matrix of
/// the discrete `I^α_-` and `W` the trapezoid weights.
pub fn discrete_gradient(model: &dyn Lagrangian, vf: &VelocityField) -> Result<VelocityField> {
    let (lx, ly) = partials(model, vf)?;
    let grid = *vf.samples().grid();
    let w = grid.trapezoid_weights();
    let m = IntegralWeights::new(grid.n(), vf.params().alpha().value(), grid.h());
    let comps: Vec<Vec<f64>> = (0..vf.dim())
        .map(|k| {
            let weighted: Vec<f64> = lx.component(k).iter().zip(&w).map(|(x, w)| x * w).collect();
            let pulled = m.apply_transpose(&weighted);
            pulled
                .iter()
                .zip(&w)
                .zip(ly.component(k))
                .map(|((p, w), y)| p / w + y)
                .collect()
        })
        .collect();
    Ok(vf.with_samples(SampledFunction::from_components(grid, &comps)?))
}

/// Seeded smooth direction: a short random cosine series per component,
/// normalized to unit `L²` norm.
pub fn random_direction(vf: &VelocityField, rng: &mut impl Rng) -> Result<VelocityField> {
    let grid = *vf.samples().grid();
    let d = vf.dim();
    let coeffs: Vec<[f64; 4]> = (0..d)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
        .collect();
    let raw = SampledFunction::from_fn(grid, d, |t, out| {
        let s = (t - grid.a()) / grid.length();
        for (o, c) in out.iter_mut().zip(&coeffs) {
            *o = c
                .iter()
                .enumerate()
                .map(|(m, c)| c * (m as f64 * std::f64::consts::PI * s).cos())
                .sum();
        }
    })?;
    let norm = raw.lp_norm(2.0);
    let dir = if norm > 0.0 {
        raw.scaled(1.0 / norm)?
    } else {
        raw
    };
    Ok(vf.with_samples(dir))
}

/// Worst relative error between [`gateaux`] and the central difference of
/// [`action`] over `n_directions` seeded random directions. Directions with
/// both quantities zero count as exact.
pub fn fd_check(
    model: &dyn Lagrangian,
    vf: &VelocityField,
    n_directions: usize,
    step: f64,
    seed: u64,
) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    check_dim(model, vf)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_directions {
        let w = random_direction(vf, &mut rng)?;
        worst = worst.max(direction_error(model, vf, &w, step)?);
    }
    Ok(worst)
}

/// Relative mismatch between the Gâteaux derivative along `w` and the
/// central difference with the given step.
pub fn direction_error(
    model: &dyn Lagrangian,
    vf: &VelocityField,
    w: &VelocityField,
    step: f64,
) -> Result<f64> {
    let exact = gateaux(model, vf, w)?;
    let plus = vf.with_samples(vf.samples().combine(1.0, w.samples(), step)?);
    let minus = vf.with_samples(vf.samples().combine(1.0, w.samples(), -step)?);
    let fd = (action(model, &plus)?.value - action(model, &minus)?.value) / (2.0 * step);
    let scale = exact.abs().max(fd.abs());
    Ok(if scale == 0.0 {
        0.0
    } else {
        (exact - fd).abs() / scale
    })
}

/// `⟨g, w⟩` in the trapezoid inner product, summed over components.
pub fn pairing(g: &VelocityField, w: &VelocityField) -> Result<f64> {
    g.samples().inner(w.samples())
}

pub(crate) fn weighted_sq_norm(g: &SampledFunction) -> f64 {
    let d = g.dim();
    let sq: Vec<f64> = g.values().chunks(d).map(|c| dot(c, c)).collect();
    g.grid().trapezoid(&sq)
}

/// Action and both partials from one state reconstruction.
pub(crate) fn evaluate(
    model: &dyn Lagrangian,
    vf: &VelocityField,
) -> Result<(ActionValue, SampledFunction, SampledFunction)> {
    check_dim(model, vf)?;
    let u = reconstruct_state(vf)?;
    let a = action_at(model, vf, &u)?;
    let (lx, ly) = partials_at(model, vf, &u)?;
    Ok((a, lx, ly))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::lagrangian::{Dirichlet, PNormLinear, Source};
    use crate::space::ProblemParams;

    fn field(n: usize, alpha: f64, f: impl Fn(f64) -> f64) -> VelocityField {
        let g = Grid::unit(n).unwrap();
        VelocityField::new(
            SampledFunction::scalar(g, f).unwrap(),
            ProblemParams::new(alpha, 3.0).unwrap(),
        )
    }

    #[test]
    fn dirichlet_action_examples() {
        let m = Dirichlet::new(1);
        assert_eq!(action(&m, &field(16, 0.6, |_| 0.0)).unwrap().value, 0.0);
        assert!((action(&m, &field(16, 0.6, |_| 1.0)).unwrap().value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            action(&Dirichlet::new(2), &field(8, 0.6, |_| 0.0)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        struct Blowup;
        impl Lagrangian for Blowup {
            fn name(&self) -> &str {
                "blowup"
            }
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _x: &[f64], _y: &[f64], t: f64) -> f64 {
                1.0 / (t - 0.5)
            }
            fn grad_x(&self, _x: &[f64], _y: &[f64], _t: f64, out: &mut [f64]) {
                out[0] = 0.0;
            }
            fn grad_y(&self, _x: &[f64], _y: &[f64], _t: f64, out: &mut [f64]) {
                out[0] = 0.0;
            }
        }
        let err = action(&Blowup, &field(8, 0.6, |_| 0.0)).unwrap_err();
        assert_eq!(err, Error::NonFiniteIntegrand { node: 4, t: 0.5 });
    }

    #[test]
    fn dirichlet_gateaux_of_ones() {
        let vf = field(32, 0.6, |_| 1.0);
        assert!((gateaux(&Dirichlet::new(1), &vf, &vf).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn discrete_gradient_is_exact_adjoint() {
        let m = PNormLinear::new(3.0, Source::cosine(1.0, 2.0)).unwrap();
        let vf = field(200, 0.6, |t| (3.0 * t).sin());
        let g = discrete_gradient(&m, &vf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let w = random_direction(&vf, &mut rng).unwrap();
            let exact = gateaux(&m, &vf, &w).unwrap();
            assert!((pairing(&g, &w).unwrap() - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn fd_check_rejects_bad_step() {
        assert!(fd_check(&Dirichlet::new(1), &field(8, 0.6, |_| 0.0), 3, 0.0, 0).is_err());
    }

    #[test]
    fn zero_directions_report_zero() {
        assert_eq!(
            fd_check(&Dirichlet::new(1), &field(8, 0.6, |_| 1.0), 0, 1e-3, 0).unwrap(),
            0.0
        );
    }
}
