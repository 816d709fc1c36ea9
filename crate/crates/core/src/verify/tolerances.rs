use serde::{Deserialize, Serialize};

/// Pass thresholds for the property checks.
///
/// Identity checks use `tol(n) = C · n^{-r}` with the rate `r` of the
/// discretization error of the scheme being checked and a coefficient `C`
/// pinned at roughly twice the worst value of `error · n^r` measured over
/// the default lattice (α ∈ {0.3, 0.5, 0.6, 0.75, 0.9}, p ∈ {2, 3, 4},
/// n ∈ {256, 512, 1024}, 5 random fields; `examples/property_lattice.rs`).
///
/// Inequality checks accept only an additive slack proportional to the
/// norm on the right-hand side, never a factor on the constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `sup |I^α I^β f − I^{α+β} f| / ‖f‖_∞`, rate `min(α+β, 1)`: the inner
    /// integral behaves like `(t−a)^β` and the outer product trapezoid
    /// is off by `O(h^{α+β})` at the first node. Measured `C ≤ 0.31`.
    pub semigroup: f64,
    /// Interior `sup |D^α I^α f − f| / ‖f‖_∞`, rate 2. Measured `C ≤ 15.6`.
    pub composition: f64,
    /// Interior `sup |D^α f − I^{1−α} ḟ| / ‖I^{1−α} ḟ‖_∞`, rate 2.
    /// Measured `C ≤ 2.3`.
    pub ac_decomposition: f64,
    /// `|∫ I^α_- f · g − ∫ f · I^α_+ g| / (‖f‖ ‖g‖)`, rate 1. Measured
    /// `C ≤ 0.17`.
    pub ibp: f64,
    /// Slack on the `L^p` bound as a multiple of `‖f‖_{L^p}`.
    pub lp_slack: f64,
    /// Slack on the sup bound as a multiple of `‖f‖_{L^p}`.
    pub sup_slack: f64,
    /// Slack on the Hölder modulus as a multiple of `‖f‖_{L^p}`.
    pub holder_slack: f64,
    /// Relative slack on the coercivity floor.
    pub coercivity_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            semigroup: 0.5,
            composition: 32.0,
            ac_decomposition: 5.0,
            ibp: 0.5,
            lp_slack: 1e-8,
            sup_slack: 1e-8,
            holder_slack: 1e-8,
            coercivity_slack: 1e-6,
        }
    }
}

fn rate(c: f64, n: usize, r: f64) -> f64 {
    c * (n as f64).powf(-r)
}

impl Tolerances {
    pub fn semigroup_at(&self, n: usize, alpha: f64, beta: f64) -> f64 {
        rate(self.semigroup, n, (alpha + beta).min(1.0))
    }

    pub fn composition_at(&self, n: usize) -> f64 {
        rate(self.composition, n, 2.0)
    }

    pub fn ac_decomposition_at(&self, n: usize) -> f64 {
        rate(self.ac_decomposition, n, 2.0)
    }

    pub fn ibp_at(&self, n: usize) -> f64 {
        rate(self.ibp, n, 1.0)
    }
}
