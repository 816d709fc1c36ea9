//! Uniform grids and vector-valued samples on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[a, b]` into `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need n >= 2 subintervals, got {n}"
            )));
        }
        Ok(Self { a, b, n })
    }

    /// `[0, 1]` with `n` subintervals.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Node `t_i = a + i h`; the last node is exactly `b`.
    pub fn t(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.t(i)).collect()
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.n + 1];
        w[0] = 0.5 * h;
        w[self.n] = 0.5 * h;
        w
    }

    /// Composite trapezoid rule applied to nodal values.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let inner: f64 = values[1..self.n].iter().sum();
        self.h() * (inner + 0.5 * (values[0] + values[self.n]))
    }
}

/// Which endpoint of the interval an operator is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Lower limit `a` (the `_-` operators).
    Left,
    /// Upper limit `b` (the `_+` operators).
    Right,
}

/// Fractional order strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - alpha`, itself a valid order.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<FracOrder> for f64 {
    fn from(value: FracOrder) -> Self {
        value.0
    }
}

/// Samples of an `R^d`-valued function at every node of a grid, stored
/// node-major (`values[i * dim + k]` is component `k` at node `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ShapeMismatch("dimension must be positive".into()));
        }
        if values.len() != grid.len() * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values ({} nodes x dim {}), got {}",
                grid.len() * dim,
                grid.len(),
                dim,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: pos / dim,
                component: pos % dim,
            });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            grid,
            dim,
            values: vec![0.0; grid.len() * dim],
        }
    }

    /// Scalar samples of `f` at the nodes.
    pub fn scalar(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, 1, grid.nodes().into_iter().map(f).collect())
    }

    /// Vector samples; `f(t, out)` fills the `dim` components at `t`.
    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Result<Self> {
        let mut values = vec![0.0; grid.len() * dim.max(1)];
        if dim > 0 {
            for (i, chunk) in values.chunks_mut(dim).enumerate() {
                f(grid.t(i), chunk);
            }
        }
        Self::new(grid, dim, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Vector at node `i`.
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Component `k` as a nodal series.
    pub fn component(&self, k: usize) -> Vec<f64> {
        assert!(k < self.dim);
        self.values
            .iter()
            .skip(k)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    /// Rebuild from per-component series (each of length `n + 1`).
    pub fn from_components(grid: Grid, components: &[Vec<f64>]) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::ShapeMismatch("no components".into()));
        }
        let len = grid.len();
        if components.iter().any(|c| c.len() != len) {
            return Err(Error::ShapeMismatch(format!(
                "every component needs {len} samples"
            )));
        }
        let mut values = vec![0.0; len * dim];
        for (k, comp) in components.iter().enumerate() {
            for (i, &v) in comp.iter().enumerate() {
                values[i * dim + k] = v;
            }
        }
        Self::new(grid, dim, values)
    }

    /// Euclidean norm at every node.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        self.values.chunks(self.dim).map(euclidean).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.pointwise_norms().into_iter().fold(0.0, f64::max)
    }

    /// `(∫ ‖f‖^p dt)^{1/p}` by the trapezoid rule on `‖f(t_i)‖^p`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let powered: Vec<f64> = self
            .pointwise_norms()
            .into_iter()
            .map(|x| x.powf(p))
            .collect();
        self.grid.trapezoid(&powered).powf(1.0 / p)
    }

    /// Trapezoid quadrature of the pointwise inner product with `other`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let dots: Vec<f64> = self
            .values
            .chunks(self.dim)
            .zip(other.values.chunks(self.dim))
            .map(|(x, y)| dot(x, y))
            .collect();
        Ok(self.grid.trapezoid(&dots))
    }

    /// `c1 * self + c2 * other`.
    pub fn combine(&self, c1: f64, other: &Self, c2: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| c1 * x + c2 * y)
            .collect();
        Self::new(self.grid, self.dim, values)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.grid,
            self.dim,
            self.values.iter().map(|x| c * x).collect(),
        )
    }

    /// `t ↦ f(a + b - t)`.
    pub fn reflected(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for chunk in self.values.chunks(self.dim).rev() {
            values.extend_from_slice(chunk);
        }
        Self {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch(
                "functions live on different grids".into(),
            ));
        }
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "dimension {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

pub(crate) fn euclidean(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
