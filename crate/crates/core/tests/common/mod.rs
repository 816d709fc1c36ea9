//! Brute-force reference values, independent of the crate's quadrature and
//! gamma function.

#![allow(dead_code)]

use statrs::function::gamma::gamma;

/// Adaptive Simpson on `[lo, hi]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if hi <= lo {
        return 0.0;
    }
    let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, lo, hi, fa, fm, fb, whole, tol, 40)
}

/// Left integral `I^α_- f(t)` on `[a, t]` via `s = (t − ξ)^α`, which
/// removes the kernel singularity:
/// `I^α f(t) = 1/Γ(α+1) ∫_0^{(t−a)^α} f(t − s^{1/α}) ds`.
pub fn left_integral(f: &dyn Fn(f64) -> f64, alpha: f64, a: f64, t: f64) -> f64 {
    if t <= a {
        return 0.0;
    }
    let top = (t - a).powf(alpha);
    let g = |s: f64| f(t - s.powf(1.0 / alpha));
    simpson(&g, 0.0, top, 1e-13) / gamma(alpha + 1.0)
}

/// Right integral `I^α_+ f(t)` on `[t, b]`.
pub fn right_integral(f: &dyn Fn(f64) -> f64, alpha: f64, t: f64, b: f64) -> f64 {
    if t >= b {
        return 0.0;
    }
    let top = (b - t).powf(alpha);
    let g = |s: f64| f(t + s.powf(1.0 / alpha));
    simpson(&g, 0.0, top, 1e-13) / gamma(alpha + 1.0)
}

/// Left derivative of `f` with `f(a) = 0`, as `I^{1−α}_- f'`.
pub fn left_derivative(fdot: &dyn Fn(f64) -> f64, alpha: f64, a: f64, t: f64) -> f64 {
    left_integral(fdot, 1.0 - alpha, a, t)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}
