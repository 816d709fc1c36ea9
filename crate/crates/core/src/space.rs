//! The function space of states with `L^p` fractional velocity, coordinatized
//! by the velocity `v = D^α_- u`; the state is recovered as `u = I^α_- v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::frac_integral;
use crate::grid::{FracOrder, SampledFunction, Side};
use crate::special::gamma;

/// `(α, p, q)` with `0 < 1/p < α < 1` and `q = p / (p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    alpha: FracOrder,
    p: f64,
    q: f64,
}

impl ProblemParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        let alpha = FracOrder::new(alpha)?;
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParams(format!("p must be > 1, got {p}")));
        }
        if 1.0 / p >= alpha.value() {
            return Err(Error::InvalidParams(format!(
                "need 1/p < alpha, got 1/p = {} and alpha = {}",
                1.0 / p,
                alpha.value()
            )));
        }
        Ok(Self {
            alpha,
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent.
    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Samples of the fractional velocity together with the problem parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    v: SampledFunction,
    params: ProblemParams,
}

impl VelocityField {
    pub fn new(v: SampledFunction, params: ProblemParams) -> Self {
        Self { v, params }
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.v
    }

    pub fn into_samples(self) -> SampledFunction {
        self.v
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// Same parameters, new samples.
    pub fn with_samples(&self, v: SampledFunction) -> Self {
        Self {
            v,
            params: self.params,
        }
    }
}

/// `u = I^α_- v`. `u(a) = 0` exactly.
pub fn reconstruct_state(vf: &VelocityField) -> Result<SampledFunction> {
    frac_integral(vf.samples(), vf.params.alpha, Side::Left)
}

/// `|u|_{α,p} = ‖v‖_{L^p}`.
pub fn seminorm(vf: &VelocityField) -> f64 {
    vf.samples().lp_norm(vf.params.p)
}

/// `(‖u‖_{L^p}^p + ‖v‖_{L^p}^p)^{1/p}`.
pub fn full_norm(vf: &VelocityField) -> Result<f64> {
    let p = vf.params.p;
    let u = reconstruct_state(vf)?;
    Ok((u.lp_norm(p).powf(p) + seminorm(vf).powf(p)).powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConstants {
    /// `(b-a)^α / Γ(1+α)`: `‖I^α f‖_{L^p} ≤ lp_bound ‖f‖_{L^p}`.
    pub lp_bound: f64,
    /// `(b-a)^{α-1/p} / (Γ(α) ((α-1)q+1)^{1/q})`:
    /// `‖I^α f‖_∞ ≤ sup_bound ‖f‖_{L^p}`.
    pub sup_bound: f64,
}

impl EmbeddingConstants {
    /// Hölder constant for `I^α f`: twice `sup_bound / (b-a)^{α-1/p}`, so that
    /// `‖I^α f(t₂) − I^α f(t₁)‖ ≤ holder ‖f‖_{L^p} (t₂ − t₁)^{α−1/p}`.
    pub fn holder(params: &ProblemParams) -> f64 {
        let (a, q) = (params.alpha.value(), params.q);
        2.0 / (gamma(a) * ((a - 1.0) * q + 1.0).powf(1.0 / q))
    }
}

pub fn embedding_constants(params: &ProblemParams, a: f64, b: f64) -> Result<EmbeddingConstants> {
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
    }
    let alpha = params.alpha.value();
    let (p, q) = (params.p, params.q);
    let len = b - a;
    Ok(EmbeddingConstants {
        lp_bound: len.powf(alpha) / gamma(1.0 + alpha),
        sup_bound: len.powf(alpha - 1.0 / p)
            / (gamma(alpha) * ((alpha - 1.0) * q + 1.0).powf(1.0 / q)),
    })
}
