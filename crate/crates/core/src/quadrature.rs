//! Deterministic one-dimensional quadrature and Gaussian order statistics.

use std::f64::consts::SQRT_2;

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 − Φ(x)`, accurate in the upper tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
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
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]` split into unit-width panels, each adaptively.
fn panelled(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panels = (b - a).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    (0..panels).map(|k| adaptive_simpson(f, a + k as f64 * h, a + (k + 1) as f64 * h, tol / panels as f64)).sum()
}

/// `p^n` for `p = 1 − q`, computed through `ln(1 − q)` to keep precision
/// when `n` is large and `q` is tiny.
fn pow_one_minus(q: f64, n: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    (n * (-q).ln_1p()).exp()
}

/// Integration cutoff; the neglected tails are below `n·φ(10)/10 ≈ n·8e-24`.
const CUTOFF: f64 = 10.0;

/// `E[max of n iid N(0,1)] = ∫₀^∞ (1 − Φⁿ) − ∫_{−∞}^0 Φⁿ`.
pub fn expected_max_gaussian(n: u64) -> f64 {
    assert!(n >= 1, "need at least one variable");
    let n = n as f64;
    let upper = |x: f64| 1.0 - pow_one_minus(normal_sf(x), n);
    let lower = |x: f64| normal_cdf(x).powf(n);
    panelled(&upper, 0.0, CUTOFF, 1e-10) - panelled(&lower, -CUTOFF, 0.0, 1e-10)
}

/// `E[max_{i≤n} |g_i|] = ∫₀^∞ (1 − (2Φ(x) − 1)ⁿ) dx`.
pub fn expected_max_abs_gaussian(n: u64) -> f64 {
    assert!(n >= 1, "need at least one variable");
    let n = n as f64;
    let f = |x: f64| 1.0 - pow_one_minus(libm::erfc(x / SQRT_2), n);
    panelled(&f, 0.0, CUTOFF, 1e-10)
}
