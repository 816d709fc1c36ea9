//! Riemann–Liouville fractional integrals and derivatives on uniform grids.
//!
//! Integrals use product quadrature: the kernel `(t - ξ)^{γ-1} / Γ(γ)` is
//! integrated in closed form against the piecewise-linear interpolant of the
//! samples, so no quadrature node ever touches the singularity. The resulting
//! weights are
//!
//! ```text
//! I^γ f(t_i) = h^γ / Γ(γ+2) · [ b_i f_0 + Σ_{j=1}^{i-1} a_{i-j} f_j + f_i ]
//! a_k = (k+1)^{γ+1} - 2 k^{γ+1} + (k-1)^{γ+1}
//! b_i = (i-1)^{γ+1} - (i-1-γ) i^γ
//! ```
//!
//! Derivatives follow the definition `D^α f = d/dt I^{1-α} f`: the derivative
//! of `I^{1-α}` applied to an interpolant is taken exactly, with the linear
//! interpolant on the first interval and the quadratic through the previous
//! node on every later one. Starting weights on nodes 1 to 4 then make the
//! scheme exact on `(t-a)^γ` for `γ ∈ {α, 1, 1+α, 2}`, the leading terms of
//! `I^α g` for regular `g`.
//!
//! Right-sided operators are the left ones conjugated by `t ↦ a + b - t`.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FracOrder, Grid, SampledFunction, Side};
use crate::special::gamma;

/// Boundary values below this fraction of the sup norm count as zero for
/// [`frac_derivative`].
pub const BOUNDARY_ZERO_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Integral,
    Derivative,
}

/// `I^α_∓ f` for `α ∈ (0, 1)`.
pub fn frac_integral(f: &SampledFunction, alpha: FracOrder, side: Side) -> Result<SampledFunction> {
    frac_integral_order(f, alpha.value(), side)
}

/// Fractional integral of any positive order (the semigroup checks need
/// orders up to 2).
pub fn frac_integral_order(f: &SampledFunction, order: f64, side: Side) -> Result<SampledFunction> {
    if !(order.is_finite() && order > 0.0) {
        return Err(Error::InvalidIntegrationOrder(order));
    }
    let weights = IntegralWeights::new(f.grid().n(), order, f.grid().h());
    map_components(f, side, |series| weights.apply(series))
}

/// `D^α_∓ f`, computed as `±d/dt I^{1-α}_∓ f`.
///
/// The data must vanish at the anchoring endpoint (`a` for left, `b` for
/// right): otherwise the derivative carries a `(t-a)^{-α}` singularity.
/// Values within [`BOUNDARY_ZERO_TOL`] of zero (relative to the sup norm)
/// are projected out rather than rejected.
pub fn frac_derivative(
    f: &SampledFunction,
    alpha: FracOrder,
    side: Side,
) -> Result<SampledFunction> {
    let n = f.grid().n();
    if n < 4 {
        return Err(Error::StencilTooSmall(n));
    }
    let base = match side {
        Side::Left => 0,
        Side::Right => n,
    };
    let scale = f.sup_norm();
    let boundary = crate::grid::euclidean(f.at(base));
    if boundary > BOUNDARY_ZERO_TOL * scale {
        return Err(Error::SingularBoundary {
            endpoint: match side {
                Side::Left => "left",
                Side::Right => "right",
            },
            value: boundary,
        });
    }
    let stencil = DerivativeStencil::new(n, alpha.value(), f.grid().h());
    map_components(f, side, |series| stencil.apply(series))
}

/// Exact samples of `I^α` or `D^α` applied to `(t-a)^β` (left) or `(b-t)^β`
/// (right).
pub fn power_closed_form(
    beta: f64,
    alpha: FracOrder,
    side: Side,
    op: Operator,
    grid: Grid,
) -> Result<SampledFunction> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "power exponent must be >= 0, got {beta}"
        )));
    }
    let a = alpha.value();
    let (coef, exponent) = match op {
        Operator::Integral => (gamma(beta + 1.0) / gamma(beta + 1.0 + a), beta + a),
        Operator::Derivative => {
            if beta < a {
                return Err(Error::SingularClosedForm(format!(
                    "D^{a} of a power {beta} < {a} blows up at the anchoring endpoint"
                )));
            }
            (gamma(beta + 1.0) / gamma(beta + 1.0 - a), beta - a)
        }
    };
    SampledFunction::scalar(grid, |t| {
        let tau = match side {
            Side::Left => t - grid.a(),
            Side::Right => grid.b() - t,
        };
        coef * tau.max(0.0).powf(exponent)
    })
}

fn map_components(
    f: &SampledFunction,
    side: Side,
    op: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<SampledFunction> {
    let comps: Vec<Vec<f64>> = (0..f.dim())
        .map(|k| {
            let mut series = f.component(k);
            if side == Side::Right {
                series.reverse();
            }
            let mut out = op(&series);
            if side == Side::Right {
                out.reverse();
            }
            out
        })
        .collect();
    SampledFunction::from_components(*f.grid(), &comps)
}

/// `s ↦ (1+x)^s - 1` without cancellation for small `x`.
fn pow1p_m1(x: f64, s: f64) -> f64 {
    (s * x.ln_1p()).exp_m1()
}

/// Product-trapezoid weights for the left integral of a fixed order.
#[derive(Debug, Clone)]
pub(crate) struct IntegralWeights {
    scale: f64,
    /// `a_k`, `k = 0..=n` (`a_0 = 1` is the diagonal weight).
    interior: Vec<f64>,
    /// `b_i`, `i = 0..=n` (`b_0` unused).
    first: Vec<f64>,
}

impl IntegralWeights {
    pub(crate) fn new(n: usize, order: f64, h: f64) -> Self {
        let s = order + 1.0;
        let mut interior = vec![0.0; n + 1];
        let mut first = vec![0.0; n + 1];
        interior[0] = 1.0;
        for k in 1..=n {
            let kf = k as f64;
            let x = 1.0 / kf;
            // k^s [ (1+x)^s - 2 + (1-x)^s ]
            interior[k] = kf.powf(s) * (pow1p_m1(x, s) + pow1p_m1(-x, s));
            // i^γ [ (i-1)((1-1/i)^γ - 1) + γ ]
            let m1 = if k == 1 {
                0.0
            } else {
                (kf - 1.0) * pow1p_m1(-x, order)
            };
            first[k] = kf.powf(order) * (m1 + order);
        }
        Self {
            scale: h.powf(order) / gamma(order + 2.0),
            interior,
            first,
        }
    }

    /// Left integral of one scalar series.
    pub(crate) fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let mut out = vec![0.0; n + 1];
        for i in 1..=n {
            let mut acc = self.first[i] * f[0] + f[i];
            for j in 1..i {
                acc += self.interior[i - j] * f[j];
            }
            out[i] = self.scale * acc;
        }
        out
    }

    /// Transpose of [`Self::apply`]: `(Mᵀ y)_j = Σ_i M_ij y_i`.
    pub(crate) fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len() - 1;
        let mut out = vec![0.0; n + 1];
        out[0] = self.scale * (1..=n).map(|i| self.first[i] * y[i]).sum::<f64>();
        for (j, slot) in out.iter_mut().enumerate().skip(1) {
            let mut acc = y[j];
            for i in (j + 1)..=n {
                acc += self.interior[i - j] * y[i];
            }
            *slot = self.scale * acc;
        }
        out
    }
}

/// Exponents whose powers `τ^γ` the derivative stencil reproduces exactly.
fn exact_exponents(alpha: f64) -> [f64; START] {
    [alpha, 1.0, 1.0 + alpha, 2.0]
}

/// Number of starting nodes (and exactness conditions).
const START: usize = 4;

/// Product scheme for `d/dt I^{1-α}`: linear interpolant on the first
/// interval, quadratic through the previous node on every later one, plus
/// starting weights on nodes `1..=4` fitted to [`exact_exponents`].
#[derive(Debug, Clone)]
struct DerivativeStencil {
    /// `h^{-α} / Γ(2-α)`.
    scale: f64,
    /// Linear-part weights `(k+1)^{1-α} - k^{1-α}`.
    l1: Vec<f64>,
    /// Curvature weights `(1-α) ∫_k^{k+1} u^{-α} (k + 1/2 - u) du`.
    quad: Vec<f64>,
    /// Starting weights per target node, in units of `scale`.
    start: Vec<[f64; START]>,
    /// Maps node values `1..=4` to the coefficient of `τ^α`, for node 0.
    anchor: [f64; START],
}

impl DerivativeStencil {
    fn new(n: usize, alpha: f64, h: f64) -> Self {
        let beta = 1.0 - alpha;
        let mut l1 = vec![0.0; n + 1];
        l1[0] = 1.0;
        for (k, w) in l1.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            *w = kf.powf(beta) * pow1p_m1(1.0 / kf, beta);
        }
        let quad = (0..=n).map(|k| curvature_weight(k, alpha)).collect();
        let mut st = Self {
            scale: h.powf(-alpha) / gamma(2.0 - alpha),
            l1,
            quad,
            start: Vec::new(),
            anchor: [0.0; START],
        };

        let g2 = gamma(2.0 - alpha);
        let exps = exact_exponents(alpha);
        // basis[s][m] = (m+1)^γ_s.
        let basis: [[f64; START]; START] =
            std::array::from_fn(|s| std::array::from_fn(|m| ((m + 1) as f64).powf(exps[s])));
        let residuals: Vec<Vec<f64>> = exps
            .iter()
            .map(|&e| {
                let phi: Vec<f64> = (0..=n).map(|i| (i as f64).powf(e)).collect();
                let c = gamma(e + 1.0) / gamma(e + 1.0 - alpha) * g2;
                st.raw(&phi)
                    .iter()
                    .enumerate()
                    .map(|(i, v)| c * (i as f64).powf(e - alpha) - v)
                    .collect()
            })
            .collect();
        st.start = (0..=n)
            .map(|i| {
                if i == 0 {
                    return [0.0; START];
                }
                solve_small(basis, std::array::from_fn(|s| residuals[s][i]))
            })
            .collect();
        // Row of basis⁻¹ picking the τ^α coefficient.
        st.anchor = std::array::from_fn(|m| {
            let mut e = [0.0; START];
            e[m] = 1.0;
            solve_transposed_first(basis, e)
        });
        st.anchor
            .iter_mut()
            .for_each(|w| *w *= gamma(1.0 + alpha) * g2);
        st
    }

    /// Unscaled scheme without the starting weights.
    fn raw(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let diffs: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        let mut out = vec![0.0; n + 1];
        for i in 1..=n {
            let mut acc = 0.0;
            for j in 0..i {
                acc += self.l1[i - 1 - j] * diffs[j];
                if j > 0 {
                    acc += self.quad[i - 1 - j] * (diffs[j] - diffs[j - 1]);
                }
            }
            out[i] = acc;
        }
        out
    }

    fn apply(&self, raw: &[f64]) -> Vec<f64> {
        let f0 = raw[0];
        let f: Vec<f64> = raw.iter().map(|v| v - f0).collect();
        let mut out = self.raw(&f);
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            *slot += self.start[i]
                .iter()
                .zip(&f[1..=START])
                .map(|(w, v)| w * v)
                .sum::<f64>();
        }
        // D τ^γ vanishes at τ = 0 for γ > α, so the anchor only sees τ^α.
        out[0] = self
            .anchor
            .iter()
            .zip(&f[1..=START])
            .map(|(w, v)| w * v)
            .sum();
        out.iter_mut().for_each(|v| *v *= self.scale);
        out
    }
}

/// `(1-α) ∫_k^{k+1} u^{-α} (k + 1/2 - u) du`.
fn curvature_weight(k: usize, alpha: f64) -> f64 {
    let kf = k as f64;
    if k < 16 {
        let (b1, b2) = (1.0 - alpha, 2.0 - alpha);
        let p1 = (kf + 1.0).powf(b1) - kf.powf(b1);
        let p2 = (kf + 1.0).powf(b2) - kf.powf(b2);
        (kf + 0.5) * p1 - b1 / b2 * p2
    } else {
        // The power differences cancel badly here; the integrand is smooth.
        const NODES: [f64; 4] = [
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_3,
        ];
        const WEIGHTS: [f64; 4] = [
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        let mid = kf + 0.5;
        let sum: f64 = NODES
            .iter()
            .zip(WEIGHTS)
            .map(|(&x, w)| {
                let d = 0.5 * x;
                // Odd integrand about the midpoint: pair ±d.
                w * 0.5 * (-d) * ((mid + d).powf(-alpha) - (mid - d).powf(-alpha))
            })
            .sum();
        (1.0 - alpha) * sum
    }
}

/// Gaussian elimination with partial pivoting on a `START × START` system.
fn solve_small(mut a: [[f64; START]; START], mut b: [f64; START]) -> [f64; START] {
    for c in 0..START {
        let piv = (c..START)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        a.swap(c, piv);
        b.swap(c, piv);
        for r in (c + 1)..START {
            let m = a[r][c] / a[c][c];
            for k in c..START {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = [0.0; START];
    for r in (0..START).rev() {
        let tail: f64 = ((r + 1)..START).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x
}

/// Component 0 of `x` solving `Σ_s x_s basis[s][m] = e_m`, i.e. the
/// coefficient of the first basis function in the interpolant of `e`.
fn solve_transposed_first(basis: [[f64; START]; START], e: [f64; START]) -> f64 {
    let t: [[f64; START]; START] = std::array::from_fn(|m| std::array::from_fn(|s| basis[s][m]));
    solve_small(t, e)[0]
}
