//! Adaptive Gauss–Legendre quadrature and Cauchy principal values on the half line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::{Error, Result};

const GL_ORDER: usize = 20;

/// Upper truncation point of half-line integrals, in units of the caller's
/// decay scale.
pub const TRUNCATION_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of equal panels the range is split into before adapting.
    pub initial_pieces: usize,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            initial_pieces: 4,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    gl_panel_with_abs(f, a, b).0
}

/// Rule applied to `f` and to `|f|`.
fn gl_panel_with_abs<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (mut sum, mut abs) = (0.0, 0.0);
    for &(x, w) in gauss_legendre() {
        let v = f(mid + half * x);
        sum += w * v;
        abs += w * v.abs();
    }
    (half * sum, half.abs() * abs)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let m = 0.5 * (a + b);
        let coarse = gl_panel(f, a, b);
        let (left, left_abs) = gl_panel_with_abs(f, a, m);
        let (right, right_abs) = gl_panel_with_abs(f, m, b);
        let value = left + right;
        Panel { a, b, value, abs_value: left_abs + right_abs, error: (coarse - value).abs() }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive quadrature of `f` over `[a, b]`: the panel with the
/// largest error estimate is bisected until the total estimate meets the
/// tolerance. The tolerance never drops below the rounding floor set by
/// `∫|f|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", format!("[{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let pieces = opts.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap: BinaryHeap<Panel> = (0..pieces)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == pieces { b } else { lo + width };
            Panel::new(&f, lo, hi)
        })
        .collect();
    let mut subdivisions = 0;
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let abs_value: f64 = heap.iter().map(|p| p.abs_value).sum();
        if !value.is_finite() {
            return Err(Error::invalid("integrand", "produced a non-finite value"));
        }
        let tol = opts
            .abs_tol
            .max(opts.rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * abs_value);
        if error <= tol {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureNoConvergence { subdivisions, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // panel cannot be split further in floating point
            return Err(Error::QuadratureNoConvergence { subdivisions, error });
        }
        heap.push(Panel::new(&f, worst.a, m));
        heap.push(Panel::new(&f, m, worst.b));
        subdivisions += 1;
    }
}

/// Cauchy principal value of `∫_0^∞ g(ω) / (ω - pole) dω` for smooth `g`.
///
/// `upper_scale` is the decay length of `g`; the integral is truncated at
/// [`TRUNCATION_FACTOR`] times the larger of `upper_scale` and `pole`. A
/// symmetric window of half-width `min(pole, upper_scale)/2` around the pole
/// is integrated as `∫_0^h (g(p+u) - g(p-u))/u du`, on which the PV of the
/// subtracted constant `g(pole)` vanishes identically.
pub fn pv_integral<G: Fn(f64) -> f64>(numerator: G, pole: f64, upper_scale: f64) -> Result<f64> {
    pv_integral_with(numerator, pole, upper_scale, &QuadratureOptions::default())
}

pub fn pv_integral_with<G: Fn(f64) -> f64>(
    numerator: G,
    pole: f64,
    upper_scale: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if !(pole > 0.0 && pole.is_finite()) {
        return Err(Error::invalid("pole", format!("must be positive, got {pole}")));
    }
    if !(upper_scale > 0.0 && upper_scale.is_finite()) {
        return Err(Error::invalid("upper_scale", format!("must be positive, got {upper_scale}")));
    }
    let h = 0.5 * pole.min(upper_scale);
    let upper = TRUNCATION_FACTOR * upper_scale.max(pole);
    let outside = |w: f64| numerator(w) / (w - pole);

    let below = integrate(outside, 0.0, pole - h, opts)?;
    let window = integrate(
        |u: f64| (numerator(pole + u) - numerator(pole - u)) / u,
        0.0,
        h,
        opts,
    )?;
    let above = integrate(outside, pole + h, upper, opts)?;
    let value = below.value + window.value + above.value;

    let tail = outside(upper).abs() * upper_scale;
    if !(tail <= 1e-14 * value.abs().max(1.0)) {
        return Err(Error::invalid(
            "upper_scale",
            format!("integrand has not decayed at the truncation point (tail ≈ {tail:e})"),
        ));
    }
    Ok(value)
}

/// Plain (non-singular) integral over `[0, ∞)`, truncated like [`pv_integral`].
pub fn half_line_integral<F: Fn(f64) -> f64>(f: F, upper_scale: f64) -> Result<f64> {
    if !(upper_scale > 0.0 && upper_scale.is_finite()) {
        return Err(Error::invalid("upper_scale", format!("must be positive, got {upper_scale}")));
    }
    let upper = TRUNCATION_FACTOR * upper_scale;
    let opts = QuadratureOptions { initial_pieces: 16, ..Default::default() };
    let est = integrate(&f, 0.0, upper, &opts)?;
    let tail = f(upper).abs() * upper_scale;
    if !(tail <= 1e-14 * est.value.abs().max(1.0)) {
        return Err(Error::invalid(
            "upper_scale",
            format!("integrand has not decayed at the truncation point (tail ≈ {tail:e})"),
        ));
    }
    Ok(est.value)
}
