//! Sampled refutation tests for the growth (H1–H3), coercivity (H4) and
//! convexity (H5, H5″) hypotheses, plus a modulus-of-continuity estimate
//! standing in for the equicontinuity part of H5′.
//!
//! A `Violated` verdict is a certificate; `SatisfiedOnSamples` is evidence
//! only.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sampling::HaltonStream;
use super::{FieldFn, Lagrangian, ScalarFn};
use crate::error::{Error, Result};
use crate::grid::euclidean;
use crate::space::ProblemParams;

/// Roundoff allowance on every sampled inequality, relative to the size of
/// the terms being compared.
const ROUNDOFF: f64 = 1e-12;

#[derive(Clone)]
struct Envelope {
    d: f64,
    r: FieldFn,
    s: FieldFn,
}

#[derive(Clone)]
struct Coercivity {
    gamma: f64,
    d4: f64,
    c1: FieldFn,
    c2: ScalarFn,
    c3: ScalarFn,
}

/// Growth envelopes `r_i ‖y‖^{d_i} + s_i` for H1–H3 and the coercivity floor
/// `c₁‖y‖^p + c₂‖x‖^{d₄} + c₃` for H4. Any part may be left unset.
#[derive(Clone, Default)]
pub struct HypothesisSpec {
    growth: [Option<Envelope>; 3],
    coercivity: Option<Coercivity>,
}

impl fmt::Debug for HypothesisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<Option<f64>> = self
            .growth
            .iter()
            .map(|e| e.as_ref().map(|e| e.d))
            .collect();
        f.debug_struct("HypothesisSpec")
            .field("d", &d)
            .field("gamma", &self.coercivity.as_ref().map(|c| c.gamma))
            .field("d4", &self.coercivity.as_ref().map(|c| c.d4))
            .finish()
    }
}

impl HypothesisSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Envelope for H`index` (1, 2 or 3).
    pub fn growth(mut self, index: usize, d: f64, r: FieldFn, s: FieldFn) -> Self {
        assert!(
            (1..=3).contains(&index),
            "growth hypotheses are H1..H3, got H{index}"
        );
        self.growth[index - 1] = Some(Envelope { d, r, s });
        self
    }

    pub fn coercivity(
        mut self,
        gamma: f64,
        d4: f64,
        c1: FieldFn,
        c2: ScalarFn,
        c3: ScalarFn,
    ) -> Self {
        self.coercivity = Some(Coercivity {
            gamma,
            d4,
            c1,
            c2,
            c3,
        });
        self
    }

    pub fn exponent(&self, index: usize) -> Option<f64> {
        self.growth
            .get(index.wrapping_sub(1))?
            .as_ref()
            .map(|e| e.d)
    }

    pub fn gamma(&self) -> Option<f64> {
        self.coercivity.as_ref().map(|c| c.gamma)
    }

    pub fn d4(&self) -> Option<f64> {
        self.coercivity.as_ref().map(|c| c.d4)
    }

    pub fn has_coercivity(&self) -> bool {
        self.coercivity.is_some()
    }

    /// `c₂(t)`, if H4 is attached.
    pub fn c2(&self, t: f64) -> Option<f64> {
        self.coercivity.as_ref().map(|c| (c.c2)(t))
    }

    /// `c₃(t)`, if H4 is attached.
    pub fn c3(&self, t: f64) -> Option<f64> {
        self.coercivity.as_ref().map(|c| (c.c3)(t))
    }

    /// Exponent ranges: `0 ≤ d₁, d₂ ≤ p`, `0 ≤ d₃ ≤ p − 1`, `1 ≤ d₄ < p`,
    /// `γ > 0`.
    pub fn validate(&self, p: f64) -> Result<()> {
        let caps = [p, p, p - 1.0];
        for (k, (env, cap)) in self.growth.iter().zip(caps).enumerate() {
            if let Some(e) = env {
                if !(0.0..=cap).contains(&e.d) {
                    return Err(Error::InvalidHypothesis(format!(
                        "d{} = {} outside [0, {cap}]",
                        k + 1,
                        e.d
                    )));
                }
            }
        }
        if let Some(c) = &self.coercivity {
            if !(c.gamma > 0.0 && c.gamma.is_finite()) {
                return Err(Error::InvalidHypothesis(format!(
                    "gamma must be > 0, got {}",
                    c.gamma
                )));
            }
            if !(c.d4 >= 1.0 && c.d4 < p) {
                return Err(Error::InvalidHypothesis(format!(
                    "d4 = {} outside [1, {p})",
                    c.d4
                )));
            }
        }
        Ok(())
    }
}

/// Ranges for every coordinate of `x`, of `y`, and for `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub t: (f64, f64),
}

impl SamplingBox {
    pub fn new(x: (f64, f64), y: (f64, f64), t: (f64, f64)) -> Result<Self> {
        let b = Self { x, y, t };
        b.check()?;
        Ok(b)
    }

    /// `[-r, r]` for `x` and `y`, `[a, b]` for `t`.
    pub fn symmetric(rx: f64, ry: f64, a: f64, b: f64) -> Result<Self> {
        Self::new((-rx, rx), (-ry, ry), (a, b))
    }

    fn check(&self) -> Result<()> {
        for (name, (lo, hi)) in [("x", self.x), ("y", self.y), ("t", self.t)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::EmptyBox(format!("{name} range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn contains(&self, x: &[f64], y: &[f64], t: f64) -> bool {
        let inside = |v: f64, (lo, hi): (f64, f64)| lo <= v && v <= hi;
        x.iter().all(|&v| inside(v, self.x))
            && y.iter().all(|&v| inside(v, self.y))
            && inside(t, self.t)
    }
}

fn lerp((lo, hi): (f64, f64), u: f64) -> f64 {
    lo + (hi - lo) * u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
    H4,
    H5,
    H5p,
    H5pp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityVariant {
    /// Joint convexity in `(x, y)`.
    H5,
    /// Convexity in `y` at fixed `(x, t)`.
    H5pp,
}

/// The point where an inequality `lhs ≤ rhs` failed. For convexity checks
/// `(x, y)` and `partner` are the two ends of the segment, `lhs` is the
/// midpoint value and `rhs` the average of the ends plus slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub partner: Option<(Vec<f64>, Vec<f64>)>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "witness")]
pub enum Verdict {
    SatisfiedOnSamples,
    Violated(Witness),
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Self::Violated(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Self::Violated(w) => Some(w),
            Self::SatisfiedOnSamples => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub verdicts: Vec<(Hypothesis, Verdict)>,
    pub sample_count: usize,
    pub sampling_box: SamplingBox,
    pub seed: u64,
}

impl HypothesisReport {
    pub fn verdict(&self, h: Hypothesis) -> Option<&Verdict> {
        self.verdicts.iter().find(|(k, _)| *k == h).map(|(_, v)| v)
    }

    pub fn all_satisfied(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| !v.is_violated())
    }

    pub fn first_violation(&self) -> Option<(Hypothesis, &Witness)> {
        self.verdicts
            .iter()
            .find_map(|(h, v)| v.witness().map(|w| (*h, w)))
    }
}

struct Point {
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
}

fn unit(d: usize, k: usize, scale: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = scale;
    e
}

/// Axis probes, the well `y = ±e₁`, and the box extremes, filtered to the box.
fn point_probes(d: usize, b: &SamplingBox) -> Vec<Point> {
    let t = b.t.0;
    let zero = vec![0.0; d];
    let mut probes = vec![
        Point {
            x: zero.clone(),
            y: unit(d, 0, 1.0),
            t,
        },
        Point {
            x: zero.clone(),
            y: unit(d, 0, -1.0),
            t,
        },
        Point {
            x: zero.clone(),
            y: zero.clone(),
            t,
        },
    ];
    for &ey in &[b.y.0, b.y.1] {
        probes.push(Point {
            x: zero.clone(),
            y: unit(d, 0, ey),
            t,
        });
        probes.push(Point {
            x: zero.clone(),
            y: vec![ey; d],
            t,
        });
    }
    for &ex in &[b.x.0, b.x.1] {
        probes.push(Point {
            x: vec![ex; d],
            y: zero.clone(),
            t,
        });
        probes.push(Point {
            x: vec![ex; d],
            y: vec![b.y.1; d],
            t: b.t.1,
        });
    }
    probes.retain(|p| b.contains(&p.x, &p.y, p.t));
    probes
}

fn check_dims(dims: usize) -> Result<()> {
    if dims > 24 {
        return Err(Error::InvalidParams(format!(
            "sampling dimension {dims} too large; reduce the model dimension"
        )));
    }
    Ok(())
}

/// Deterministic probes followed by Halton points, `n_samples` in total.
fn sample_points(d: usize, b: &SamplingBox, n_samples: usize, seed: u64) -> Result<Vec<Point>> {
    check_dims(2 * d + 1)?;
    let mut pts = point_probes(d, b);
    pts.truncate(n_samples);
    let mut halton = HaltonStream::new(2 * d + 1, seed);
    while pts.len() < n_samples {
        let u = halton.next_point();
        pts.push(Point {
            x: u[..d].iter().map(|&v| lerp(b.x, v)).collect(),
            y: u[d..2 * d].iter().map(|&v| lerp(b.y, v)).collect(),
            t: lerp(b.t, u[2 * d]),
        });
    }
    Ok(pts)
}

fn holds(lhs: f64, rhs: f64, scale: f64) -> bool {
    lhs <= rhs + ROUNDOFF * (1.0 + scale)
}

fn preflight(model: &dyn Lagrangian, b: &SamplingBox, n_samples: usize) -> Result<()> {
    b.check()?;
    if n_samples == 0 {
        return Err(Error::InvalidParams("n_samples must be positive".into()));
    }
    if model.dim() == 0 {
        return Err(Error::InvalidParams(
            "model dimension must be positive".into(),
        ));
    }
    Ok(())
}

/// H1–H3 for every envelope attached to `spec`.
pub fn check_growth(
    model: &dyn Lagrangian,
    spec: &HypothesisSpec,
    params: &ProblemParams,
    sampling_box: &SamplingBox,
    n_samples: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    preflight(model, sampling_box, n_samples)?;
    spec.validate(params.p())?;
    if spec.growth.iter().all(Option::is_none) {
        return Err(Error::InvalidHypothesis(
            "no growth envelope attached".into(),
        ));
    }
    let d = model.dim();
    let pts = sample_points(d, sampling_box, n_samples, seed)?;
    let zero = vec![0.0; d];
    let mut g = vec![0.0; d];
    let hyps = [Hypothesis::H1, Hypothesis::H2, Hypothesis::H3];
    let mut verdicts = Vec::new();
    for (k, env) in spec.growth.iter().enumerate() {
        let Some(env) = env else { continue };
        let mut verdict = Verdict::SatisfiedOnSamples;
        for p in &pts {
            let lhs = match k {
                0 => (model.value(&p.x, &p.y, p.t) - model.value(&p.x, &zero, p.t)).abs(),
                1 => {
                    model.grad_x(&p.x, &p.y, p.t, &mut g);
                    euclidean(&g)
                }
                _ => {
                    model.grad_y(&p.x, &p.y, p.t, &mut g);
                    euclidean(&g)
                }
            };
            let rhs = (env.r)(&p.x, p.t) * euclidean(&p.y).powf(env.d) + (env.s)(&p.x, p.t);
            if !holds(lhs, rhs, lhs.abs().max(rhs.abs())) {
                verdict = Verdict::Violated(Witness {
                    x: p.x.clone(),
                    y: p.y.clone(),
                    t: p.t,
                    partner: None,
                    lhs,
                    rhs,
                });
                break;
            }
        }
        verdicts.push((hyps[k], verdict));
    }
    Ok(HypothesisReport {
        verdicts,
        sample_count: pts.len(),
        sampling_box: *sampling_box,
        seed,
    })
}

/// H4: `L ≥ c₁‖y‖^p + c₂‖x‖^{d₄} + c₃` together with `c₁ ≥ γ`.
pub fn check_coercivity(
    model: &dyn Lagrangian,
    spec: &HypothesisSpec,
    params: &ProblemParams,
    sampling_box: &SamplingBox,
    n_samples: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    preflight(model, sampling_box, n_samples)?;
    spec.validate(params.p())?;
    let c = spec
        .coercivity
        .as_ref()
        .ok_or_else(|| Error::InvalidHypothesis("no coercivity envelope attached".into()))?;
    let p = params.p();
    let pts = sample_points(model.dim(), sampling_box, n_samples, seed)?;
    let mut verdict = Verdict::SatisfiedOnSamples;
    for pt in &pts {
        let c1 = (c.c1)(&pt.x, pt.t);
        if !holds(c.gamma, c1, c1.abs()) {
            verdict = Verdict::Violated(Witness {
                x: pt.x.clone(),
                y: pt.y.clone(),
                t: pt.t,
                partner: None,
                lhs: c.gamma,
                rhs: c1,
            });
            break;
        }
        let floor = c1 * euclidean(&pt.y).powf(p)
            + (c.c2)(pt.t) * euclidean(&pt.x).powf(c.d4)
            + (c.c3)(pt.t);
        let l = model.value(&pt.x, &pt.y, pt.t);
        if !holds(floor, l, floor.abs().max(l.abs())) {
            verdict = Verdict::Violated(Witness {
                x: pt.x.clone(),
                y: pt.y.clone(),
                t: pt.t,
                partner: None,
                lhs: floor,
                rhs: l,
            });
            break;
        }
    }
    Ok(HypothesisReport {
        verdicts: vec![(Hypothesis::H4, verdict)],
        sample_count: pts.len(),
        sampling_box: *sampling_box,
        seed,
    })
}

struct Pair {
    x1: Vec<f64>,
    y1: Vec<f64>,
    x2: Vec<f64>,
    y2: Vec<f64>,
    t: f64,
}

fn pair_probes(d: usize, b: &SamplingBox, variant: ConvexityVariant) -> Vec<Pair> {
    let t = b.t.0;
    let zero = vec![0.0; d];
    let mut probes = vec![
        Pair {
            x1: zero.clone(),
            y1: unit(d, 0, -1.0),
            x2: zero.clone(),
            y2: unit(d, 0, 1.0),
            t,
        },
        Pair {
            x1: zero.clone(),
            y1: unit(d, 0, b.y.0),
            x2: zero.clone(),
            y2: unit(d, 0, b.y.1),
            t,
        },
    ];
    if variant == ConvexityVariant::H5 {
        probes.push(Pair {
            x1: vec![b.x.0; d],
            y1: zero.clone(),
            x2: vec![b.x.1; d],
            y2: zero.clone(),
            t,
        });
        probes.push(Pair {
            x1: vec![b.x.0; d],
            y1: vec![b.y.0; d],
            x2: vec![b.x.1; d],
            y2: vec![b.y.1; d],
            t,
        });
    }
    probes.retain(|p| b.contains(&p.x1, &p.y1, p.t) && b.contains(&p.x2, &p.y2, p.t));
    probes
}

/// Midpoint convexity on sampled segments: jointly in `(x, y)` for H5, in `y`
/// at fixed `(x, t)` for H5″. The first sample is the pair `y = ±e₁` at
/// `x = 0` whenever it lies in the box.
pub fn check_convexity(
    model: &dyn Lagrangian,
    variant: ConvexityVariant,
    sampling_box: &SamplingBox,
    n_samples: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    preflight(model, sampling_box, n_samples)?;
    let d = model.dim();
    let b = sampling_box;
    let dims = match variant {
        ConvexityVariant::H5 => 4 * d + 1,
        ConvexityVariant::H5pp => 3 * d + 1,
    };
    check_dims(dims)?;
    let mut pairs = pair_probes(d, b, variant);
    pairs.truncate(n_samples);
    let mut halton = HaltonStream::new(dims, seed);
    while pairs.len() < n_samples {
        let u = halton.next_point();
        let scale = |range, s: &[f64]| s.iter().map(|&v| lerp(range, v)).collect::<Vec<_>>();
        let pair = match variant {
            ConvexityVariant::H5 => Pair {
                x1: scale(b.x, &u[..d]),
                y1: scale(b.y, &u[d..2 * d]),
                x2: scale(b.x, &u[2 * d..3 * d]),
                y2: scale(b.y, &u[3 * d..4 * d]),
                t: lerp(b.t, u[4 * d]),
            },
            ConvexityVariant::H5pp => {
                let x = scale(b.x, &u[..d]);
                Pair {
                    x1: x.clone(),
                    y1: scale(b.y, &u[d..2 * d]),
                    x2: x,
                    y2: scale(b.y, &u[2 * d..3 * d]),
                    t: lerp(b.t, u[3 * d]),
                }
            }
        };
        pairs.push(pair);
    }

    let mid = |a: &[f64], c: &[f64]| {
        a.iter()
            .zip(c)
            .map(|(u, v)| 0.5 * (u + v))
            .collect::<Vec<_>>()
    };
    let mut verdict = Verdict::SatisfiedOnSamples;
    for pr in &pairs {
        let l1 = model.value(&pr.x1, &pr.y1, pr.t);
        let l2 = model.value(&pr.x2, &pr.y2, pr.t);
        let lm = model.value(&mid(&pr.x1, &pr.x2), &mid(&pr.y1, &pr.y2), pr.t);
        let rhs = 0.5 * (l1 + l2) + ROUNDOFF * (1.0 + l1.abs() + l2.abs());
        if lm > rhs {
            verdict = Verdict::Violated(Witness {
                x: pr.x1.clone(),
                y: pr.y1.clone(),
                t: pr.t,
                partner: Some((pr.x2.clone(), pr.y2.clone())),
                lhs: lm,
                rhs,
            });
            break;
        }
    }
    let h = match variant {
        ConvexityVariant::H5 => Hypothesis::H5,
        ConvexityVariant::H5pp => Hypothesis::H5pp,
    };
    Ok(HypothesisReport {
        verdicts: vec![(h, verdict)],
        sample_count: pairs.len(),
        sampling_box: *b,
        seed,
    })
}

/// Sampled modulus of continuity of `x ↦ L(x, y, t)` over the box: for each
/// `δ`, the largest `|L(x + δe, y, t) − L(x, y, t)|` seen over sampled
/// `(x, y, t)` and unit directions `e`. Both ends of each segment stay in
/// the box. A modulus that does not shrink with `δ` is evidence against the
/// equicontinuity in H5′; a shrinking one certifies nothing outside the box.
pub fn estimate_x_modulus(
    model: &dyn Lagrangian,
    sampling_box: &SamplingBox,
    deltas: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    preflight(model, sampling_box, n_samples)?;
    let d = model.dim();
    let b = sampling_box;
    let dims = 3 * d + 1;
    check_dims(dims)?;
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta must be positive, got {delta}"
            )));
        }
        let mut halton = HaltonStream::new(dims, seed);
        let mut worst: f64 = 0.0;
        for _ in 0..n_samples {
            let u = halton.next_point();
            let x1: Vec<f64> = u[..d].iter().map(|&v| lerp(b.x, v)).collect();
            let y: Vec<f64> = u[d..2 * d].iter().map(|&v| lerp(b.y, v)).collect();
            let mut e: Vec<f64> = u[2 * d..3 * d].iter().map(|&v| 2.0 * v - 1.0).collect();
            let norm = euclidean(&e);
            if norm == 0.0 {
                continue;
            }
            e.iter_mut().for_each(|v| *v /= norm);
            let t = lerp(b.t, u[3 * d]);
            let x2: Vec<f64> = x1.iter().zip(&e).map(|(x, e)| x + delta * e).collect();
            if !b.contains(&x2, &y, t) {
                continue;
            }
            worst = worst.max((model.value(&x2, &y, t) - model.value(&x1, &y, t)).abs());
        }
        out.push((delta, worst));
    }
    Ok(out)
}

/// A constant envelope function.
pub fn constant_field(c: f64) -> FieldFn {
    Arc::new(move |_, _| c)
}
