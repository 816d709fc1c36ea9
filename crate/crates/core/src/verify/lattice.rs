use serde::{Deserialize, Serialize};

use super::{
    check_ac_decomposition, check_composition, check_holder_modulus, check_ibp, check_lp_bound,
    check_semigroup, check_sup_bound, piecewise_linear_field, smooth_field, vanishing_polynomial,
    PropertyReport, Tolerances,
};
use crate::error::{Error, Result};
use crate::grid::{FracOrder, Grid, SampledFunction};
use crate::space::ProblemParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub alphas: Vec<f64>,
    pub ps: Vec<f64>,
    pub ns: Vec<usize>,
    /// Interval `[a, b]`.
    pub interval: (f64, f64),
    pub seed: u64,
    /// Random fields per check, on top of the fixed closed-form ones.
    pub random_fields: usize,
    pub tolerances: Tolerances,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.3, 0.5, 0.6, 0.75, 0.9],
            ps: vec![2.0, 3.0, 4.0],
            ns: vec![256, 512, 1024],
            interval: (0.0, 1.0),
            seed: 0,
            random_fields: 5,
            tolerances: Tolerances::default(),
        }
    }
}

impl LatticeConfig {
    /// `(α, p)` pairs satisfying `1/p < α`.
    pub fn admissible(&self) -> Vec<ProblemParams> {
        self.alphas
            .iter()
            .flat_map(|&a| {
                self.ps
                    .iter()
                    .filter_map(move |&p| ProblemParams::new(a, p).ok())
            })
            .collect()
    }
}

fn labelled(r: Result<PropertyReport>, data: &str, seed: Option<u64>) -> Result<PropertyReport> {
    r.map(|r| r.with_data(data, seed))
}

/// Every check at every admissible lattice point, in a fixed order.
pub fn run_lattice(cfg: &LatticeConfig) -> Result<Vec<PropertyReport>> {
    if cfg.alphas.is_empty() || cfg.ps.is_empty() || cfg.ns.is_empty() {
        return Err(Error::InvalidParams("lattice has an empty axis".into()));
    }
    let params = cfg.admissible();
    if params.is_empty() {
        return Err(Error::InvalidParams(
            "no (alpha, p) pair satisfies 1/p < alpha".into(),
        ));
    }
    let tol = &cfg.tolerances;
    let seeds: Vec<u64> = (0..cfg.random_fields as u64)
        .map(|k| cfg.seed.wrapping_add(k))
        .collect();
    let mut alphas: Vec<f64> = Vec::new();
    for p in &params {
        let a = p.alpha().value();
        if !alphas.contains(&a) {
            alphas.push(a);
        }
    }

    let mut out = Vec::new();
    for &n in &cfg.ns {
        let grid = Grid::new(cfg.interval.0, cfg.interval.1, n)?;
        let (a, len) = (grid.a(), grid.length());
        let power = |k: i32| SampledFunction::scalar(grid, move |t| ((t - a) / len).powi(k));
        let one = power(0)?;

        for &alpha in &alphas {
            let order = FracOrder::new(alpha)?;
            for beta in [0.25, alpha] {
                out.push(labelled(
                    check_semigroup(alpha, beta, &one, tol),
                    "1",
                    None,
                )?);
                out.push(labelled(
                    check_semigroup(alpha, beta, &power(1)?, tol),
                    "s",
                    None,
                )?);
                for &s in &seeds {
                    out.push(labelled(
                        check_semigroup(alpha, beta, &smooth_field(grid, s)?, tol),
                        "smooth",
                        Some(s),
                    )?);
                }
            }

            out.push(labelled(check_composition(order, &one, tol), "1", None)?);
            out.push(labelled(
                check_composition(order, &power(2)?, tol),
                "s^2",
                None,
            )?);
            for &s in &seeds {
                out.push(labelled(
                    check_composition(order, &smooth_field(grid, s)?, tol),
                    "smooth",
                    Some(s),
                )?);
            }

            let lin_dot = SampledFunction::scalar(grid, |_| 1.0 / len)?;
            out.push(labelled(
                check_ac_decomposition(order, &power(1)?, &lin_dot, tol),
                "s",
                None,
            )?);
            let cub_dot = SampledFunction::scalar(grid, |t| 3.0 * ((t - a) / len).powi(2) / len)?;
            out.push(labelled(
                check_ac_decomposition(order, &power(3)?, &cub_dot, tol),
                "s^3",
                None,
            )?);
            for &s in &seeds {
                let (f, fd) = vanishing_polynomial(grid, s)?;
                out.push(labelled(
                    check_ac_decomposition(order, &f, &fd, tol),
                    "polynomial",
                    Some(s),
                )?);
            }
        }

        for p in params.iter() {
            let order = p.alpha();
            let (pf, qg) = (p.p(), p.q());
            out.push(labelled(
                check_ibp(order, &one, &one, pf, qg, tol),
                "1,1",
                None,
            )?);
            for &s in &seeds {
                let f = smooth_field(grid, s)?;
                let g = smooth_field(grid, s.wrapping_add(1 << 32))?;
                out.push(labelled(
                    check_ibp(order, &f, &g, pf, qg, tol),
                    "smooth,smooth",
                    Some(s),
                )?);
            }
            out.push(labelled(check_lp_bound(p, &one, tol), "1", None)?);
            out.push(labelled(check_sup_bound(p, &one, tol), "1", None)?);
            out.push(labelled(check_holder_modulus(p, &one, tol), "1", None)?);
            for &s in &seeds {
                let f = piecewise_linear_field(grid, 8, s)?;
                out.push(labelled(
                    check_lp_bound(p, &f, tol),
                    "piecewise_linear",
                    Some(s),
                )?);
                out.push(labelled(
                    check_sup_bound(p, &f, tol),
                    "piecewise_linear",
                    Some(s),
                )?);
                out.push(labelled(
                    check_holder_modulus(p, &f, tol),
                    "piecewise_linear",
                    Some(s),
                )?);
            }
        }
    }
    Ok(out)
}
