use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FieldFn, HypothesisSpec, Lagrangian, ScalarFn};
use crate::error::{Error, Result};
use crate::grid::euclidean;

type GradFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

/// `a(x, t) ≥ 0` with its `x`-gradient.
#[derive(Clone)]
pub struct Potential {
    name: String,
    value: FieldFn,
    grad: GradFn,
}

impl Potential {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", |_, _| 0.0, |_, _, out| out.fill(0.0))
    }

    /// `k ‖x‖²`.
    pub fn quadratic(k: f64) -> Self {
        Self::new(
            format!("{k}|x|^2"),
            move |x, _| k * x.iter().map(|v| v * v).sum::<f64>(),
            move |x, _, out| {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = 2.0 * k * v;
                }
            },
        )
    }

    /// `k ‖x − c·1‖²`.
    pub fn quadratic_about(k: f64, c: f64) -> Self {
        Self::new(
            format!("{k}|x-{c}|^2"),
            move |x, _| k * x.iter().map(|v| (v - c) * (v - c)).sum::<f64>(),
            move |x, _, out| {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = 2.0 * k * (v - c);
                }
            },
        )
    }

    /// `k ‖x‖⁴`.
    pub fn quartic(k: f64) -> Self {
        Self::new(
            format!("{k}|x|^4"),
            move |x, _| k * x.iter().map(|v| v * v).sum::<f64>().powi(2),
            move |x, _, out| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                for (o, v) in out.iter_mut().zip(x) {
                    *o = 4.0 * k * r2 * v;
                }
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        (self.value)(x, t)
    }

    pub fn grad(&self, x: &[f64], t: f64, out: &mut [f64]) {
        (self.grad)(x, t, out)
    }
}

/// Scalar source term `f(t)`.
#[derive(Clone)]
pub struct Source {
    name: String,
    value: ScalarFn,
}

impl Source {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    /// `Σ c_k t^k`.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let name = format!("poly{coeffs:?}");
        Self::new(name, move |t| {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
        })
    }

    /// `amplitude · cos(frequency · t)`.
    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Self::new(format!("{amplitude}cos({frequency}t)"), move |t| {
            amplitude * (frequency * t).cos()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub(crate) fn as_fn(&self) -> ScalarFn {
        self.value.clone()
    }
}

/// `½‖y‖²`.
#[derive(Debug, Clone, Copy)]
pub struct Dirichlet {
    dim: usize,
}

impl Dirichlet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim }
    }
}

impl Lagrangian for Dirichlet {
    fn name(&self) -> &str {
        "dirichlet"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64], y: &[f64], _t: f64) -> f64 {
        0.5 * y.iter().map(|v| v * v).sum::<f64>()
    }

    fn grad_x(&self, _x: &[f64], _y: &[f64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], _t: f64, out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

/// `(1/p)‖y‖^p` and its gradient `‖y‖^{p-2} y`.
fn pnorm_value(y: &[f64], p: f64) -> f64 {
    euclidean(y).powf(p) / p
}

fn pnorm_grad(y: &[f64], p: f64, out: &mut [f64]) {
    let r = euclidean(y);
    let factor = if r == 0.0 { 0.0 } else { r.powf(p - 2.0) };
    for (o, v) in out.iter_mut().zip(y) {
        *o = factor * v;
    }
}

/// `(1/p)‖y‖^p + a(x, t)`.
#[derive(Clone)]
pub struct PNormPotential {
    dim: usize,
    p: f64,
    potential: Potential,
}

impl PNormPotential {
    pub fn new(dim: usize, p: f64, potential: Potential) -> Result<Self> {
        check_p(p)?;
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        Ok(Self { dim, p, potential })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// H1–H4 envelopes; H4 holds with `c₁ = 1/p` because `a ≥ 0`.
    pub fn hypothesis_spec(&self) -> HypothesisSpec {
        let p = self.p;
        let pot = self.potential.clone();
        let dim = self.dim;
        HypothesisSpec::new()
            .growth(1, p, Arc::new(move |_, _| 1.0 / p), zero_field())
            .growth(
                2,
                0.0,
                zero_field(),
                Arc::new(move |x, t| {
                    let mut g = vec![0.0; dim];
                    pot.grad(x, t, &mut g);
                    euclidean(&g)
                }),
            )
            .growth(3, p - 1.0, Arc::new(|_, _| 1.0), zero_field())
            .coercivity(
                1.0 / p,
                1.0,
                Arc::new(move |_, _| 1.0 / p),
                Arc::new(|_| 0.0),
                Arc::new(|_| 0.0),
            )
    }
}

impl Lagrangian for PNormPotential {
    fn name(&self) -> &str {
        "pnorm_potential"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        pnorm_value(y, self.p) + self.potential.value(x, t)
    }

    fn grad_x(&self, x: &[f64], _y: &[f64], t: f64, out: &mut [f64]) {
        self.potential.grad(x, t, out);
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], _t: f64, out: &mut [f64]) {
        pnorm_grad(y, self.p, out);
    }
}

/// `(1/p)|y|^p + f(t) x` in dimension one.
#[derive(Clone)]
pub struct PNormLinear {
    p: f64,
    source: Source,
}

impl PNormLinear {
    pub fn new(p: f64, source: Source) -> Result<Self> {
        check_p(p)?;
        Ok(Self { p, source })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// H1–H4 envelopes; H4 uses `c₂(t) = -|f(t)|` with `d₄ = 1`.
    pub fn hypothesis_spec(&self) -> HypothesisSpec {
        let p = self.p;
        let f = self.source.as_fn();
        let f2 = f.clone();
        HypothesisSpec::new()
            .growth(1, p, Arc::new(move |_, _| 1.0 / p), zero_field())
            .growth(2, 0.0, zero_field(), Arc::new(move |_, t| f(t).abs()))
            .growth(3, p - 1.0, Arc::new(|_, _| 1.0), zero_field())
            .coercivity(
                1.0 / p,
                1.0,
                Arc::new(move |_, _| 1.0 / p),
                Arc::new(move |t| -f2(t).abs()),
                Arc::new(|_| 0.0),
            )
    }
}

impl Lagrangian for PNormLinear {
    fn name(&self) -> &str {
        "pnorm_linear"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        pnorm_value(y, self.p) + self.source.value(t) * x[0]
    }

    fn grad_x(&self, _x: &[f64], _y: &[f64], t: f64, out: &mut [f64]) {
        out[0] = self.source.value(t);
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], _t: f64, out: &mut [f64]) {
        pnorm_grad(y, self.p, out);
    }
}

/// `(y² - 1)² + x⁴`: neither coercive in the required sense nor convex in `y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bolza;

impl Lagrangian for Bolza {
    fn name(&self) -> &str {
        "bolza"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64], y: &[f64], _t: f64) -> f64 {
        (y[0] * y[0] - 1.0).powi(2) + x[0].powi(4)
    }

    fn grad_x(&self, x: &[f64], _y: &[f64], _t: f64, out: &mut [f64]) {
        out[0] = 4.0 * x[0].powi(3);
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], _t: f64, out: &mut [f64]) {
        out[0] = 4.0 * y[0] * (y[0] * y[0] - 1.0);
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("p must be > 1, got {p}")))
    }
}

fn zero_field() -> FieldFn {
    Arc::new(|_, _| 0.0)
}

/// Serializable description of a potential `a(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Quadratic {
        scale: f64,
        #[serde(default)]
        center: f64,
    },
    Quartic {
        scale: f64,
    },
}

impl PotentialSpec {
    fn build(&self) -> Result<Potential> {
        match *self {
            Self::Zero => Ok(Potential::zero()),
            Self::Quadratic { scale, .. } | Self::Quartic { scale }
                if !(scale >= 0.0 && scale.is_finite()) =>
            {
                Err(Error::InvalidParams(format!(
                    "potential scale must be >= 0 (a ≥ 0), got {scale}"
                )))
            }
            Self::Quadratic { scale, center } => Ok(if center == 0.0 {
                Potential::quadratic(scale)
            } else {
                Potential::quadratic_about(scale, center)
            }),
            Self::Quartic { scale } => Ok(Potential::quartic(scale)),
        }
    }
}

/// Serializable description of a source `f(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Constant { value: f64 },
    Polynomial { coeffs: Vec<f64> },
    Cosine { amplitude: f64, frequency: f64 },
}

impl SourceSpec {
    pub fn build(&self) -> Source {
        match self {
            Self::Constant { value } => Source::constant(*value),
            Self::Polynomial { coeffs } => Source::polynomial(coeffs.clone()),
            Self::Cosine {
                amplitude,
                frequency,
            } => Source::cosine(*amplitude, *frequency),
        }
    }
}

fn one() -> usize {
    1
}

fn two() -> f64 {
    2.0
}

/// The built-in models by name, with their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinModel {
    Dirichlet {
        #[serde(default = "one")]
        dim: usize,
    },
    PnormPotential {
        #[serde(default = "two")]
        p: f64,
        #[serde(default = "one")]
        dim: usize,
        potential: PotentialSpec,
    },
    PnormLinear {
        #[serde(default = "two")]
        p: f64,
        source: SourceSpec,
    },
    Bolza {},
}

impl BuiltinModel {
    /// Model by name with default parameters (`p = 2`, `a = 0`, `f = 1`).
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "dirichlet" => Ok(Self::Dirichlet { dim: 1 }),
            "pnorm_potential" => Ok(Self::PnormPotential {
                p: 2.0,
                dim: 1,
                potential: PotentialSpec::Zero,
            }),
            "pnorm_linear" => Ok(Self::PnormLinear {
                p: 2.0,
                source: SourceSpec::Constant { value: 1.0 },
            }),
            "bolza" => Ok(Self::Bolza {}),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dirichlet { .. } => "dirichlet",
            Self::PnormPotential { .. } => "pnorm_potential",
            Self::PnormLinear { .. } => "pnorm_linear",
            Self::Bolza {} => "bolza",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dirichlet { dim } | Self::PnormPotential { dim, .. } => *dim,
            Self::PnormLinear { .. } | Self::Bolza {} => 1,
        }
    }
}

/// Build a model and, where the model is known to satisfy them, its
/// hypothesis envelopes.
pub fn builtin(model: &BuiltinModel) -> Result<(Arc<dyn Lagrangian>, Option<HypothesisSpec>)> {
    match model {
        BuiltinModel::Dirichlet { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidParams("dimension must be positive".into()));
            }
            let spec = HypothesisSpec::new()
                .growth(1, 2.0, Arc::new(|_, _| 0.5), zero_field())
                .growth(2, 0.0, zero_field(), zero_field())
                .growth(3, 1.0, Arc::new(|_, _| 1.0), zero_field())
                .coercivity(
                    0.5,
                    1.0,
                    Arc::new(|_, _| 0.5),
                    Arc::new(|_| 0.0),
                    Arc::new(|_| 0.0),
                );
            Ok((Arc::new(Dirichlet::new(*dim)), Some(spec)))
        }
        BuiltinModel::PnormPotential { p, dim, potential } => {
            let m = PNormPotential::new(*dim, *p, potential.build()?)?;
            let spec = m.hypothesis_spec();
            Ok((Arc::new(m), Some(spec)))
        }
        BuiltinModel::PnormLinear { p, source } => {
            let m = PNormLinear::new(*p, source.build())?;
            let spec = m.hypothesis_spec();
            Ok((Arc::new(m), Some(spec)))
        }
        BuiltinModel::Bolza {} => Ok((Arc::new(Bolza), None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::gradient_mismatch;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dirichlet_example() {
        let m = Dirichlet::new(2);
        let (x, y) = ([7.0, -1.0], [3.0, 4.0]);
        assert_eq!(m.value(&x, &y, 0.3), 12.5);
        let mut g = [0.0; 2];
        m.grad_y(&x, &y, 0.3, &mut g);
        assert_eq!(g, [3.0, 4.0]);
        m.grad_x(&x, &y, 0.3, &mut g);
        assert_eq!(g, [0.0, 0.0]);
    }

    #[test]
    fn pnorm_linear_example() {
        let m = PNormLinear::new(2.0, Source::constant(1.0)).unwrap();
        assert_eq!(m.value(&[2.0], &[3.0], 0.5), 6.5);
        let mut g = [0.0];
        m.grad_x(&[2.0], &[3.0], 0.5, &mut g);
        assert_eq!(g, [1.0]);
        m.grad_y(&[2.0], &[3.0], 0.5, &mut g);
        assert_eq!(g, [3.0]);
    }

    #[test]
    fn bolza_well() {
        let mut g = [1.0];
        assert_eq!(Bolza.value(&[0.0], &[1.0], 0.2), 0.0);
        Bolza.grad_y(&[0.0], &[1.0], 0.2, &mut g);
        assert_eq!(g, [0.0]);
        Bolza.grad_x(&[0.0], &[1.0], 0.2, &mut g);
        assert_eq!(g, [0.0]);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            BuiltinModel::from_name("brachistochrone"),
            Err(Error::UnknownModel("brachistochrone".into()))
        );
        for name in ["dirichlet", "pnorm_potential", "pnorm_linear", "bolza"] {
            assert_eq!(BuiltinModel::from_name(name).unwrap().name(), name);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let models: Vec<Arc<dyn Lagrangian>> = vec![
            Arc::new(Dirichlet::new(3)),
            Arc::new(PNormPotential::new(2, 4.0, Potential::quadratic(1.5)).unwrap()),
            Arc::new(PNormPotential::new(1, 3.0, Potential::quartic(0.5)).unwrap()),
            Arc::new(PNormLinear::new(3.0, Source::cosine(2.0, 3.0)).unwrap()),
            Arc::new(Bolza),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for m in &models {
            let d = m.dim();
            for _ in 0..1000 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let t = rng.gen_range(0.0..1.0);
                let err = gradient_mismatch(m.as_ref(), &x, &y, t, 1e-5);
                assert!(
                    err <= 1e-5,
                    "{}: mismatch {err:e} at x={x:?} y={y:?}",
                    m.name()
                );
            }
        }
    }

    #[test]
    fn model_descriptions_parse() {
        let m: BuiltinModel = serde_json::from_str(
            r#"{"name":"pnorm_linear","source":{"kind":"constant","value":1.0}}"#,
        )
        .unwrap();
        assert_eq!(
            m,
            BuiltinModel::PnormLinear {
                p: 2.0,
                source: SourceSpec::Constant { value: 1.0 }
            }
        );
        assert!(serde_json::from_str::<BuiltinModel>(r#"{"name":"nope"}"#).is_err());
        let bad = BuiltinModel::PnormPotential {
            p: 2.0,
            dim: 1,
            potential: PotentialSpec::Quadratic {
                scale: -1.0,
                center: 0.0,
            },
        };
        assert!(builtin(&bad).is_err());
    }

    #[test]
    fn polynomial_source_horner() {
        let s = Source::polynomial(vec![1.0, -2.0, 3.0]);
        assert_eq!(s.value(2.0), 1.0 - 4.0 + 12.0);
    }
}
