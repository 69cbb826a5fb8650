//! Exponential integrals `Ei(x)` and `E₁(x)`.

use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Positive zero of Ei, split into a double-double pair.
const EI_ROOT_HI: f64 = 0.372_507_410_781_366_6;
const EI_ROOT_LO: f64 = 1.314_018_341_438_602_8e-17;

const ROOT_WINDOW: f64 = 0.1;
const ASYMPTOTIC_FROM: f64 = 40.0;
const MAX_TERMS: usize = 500;

/// Exponential integral `Ei(x) = -PV ∫_{-x}^∞ e^{-t}/t dt`.
///
/// For negative arguments this is `-E₁(-x)`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::invalid("x", "NaN"));
    }
    if x == 0.0 {
        return Err(Error::SingularArgument);
    }
    if x < 0.0 {
        return Ok(-e1_positive(-x));
    }
    let v = if (x - EI_ROOT_HI).abs() < ROOT_WINDOW {
        ei_near_root(x)
    } else if x <= ASYMPTOTIC_FROM {
        ei_series(x)
    } else {
        ei_asymptotic(x)
    };
    Ok(v)
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid("x", format!("E1 needs x > 0, got {x}")));
    }
    if x == 0.0 {
        return Err(Error::SingularArgument);
    }
    Ok(e1_positive(x))
}

/// `e^{x} E₁(x)` for `x > 0`, finite for arguments where `e^{x}` alone overflows.
pub fn scaled_e1(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid("x", format!("E1 needs x > 0, got {x}")));
    }
    if x == 0.0 {
        return Err(Error::SingularArgument);
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_positive(x))
    } else {
        Ok(e1_continued_fraction(x))
    }
}

/// `e^{-x} Ei(x)` for `x > 0`.
pub fn scaled_ei(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid("x", format!("scaled Ei needs x > 0, got {x}")));
    }
    if x == 0.0 {
        return Err(Error::SingularArgument);
    }
    if x > ASYMPTOTIC_FROM {
        Ok(asymptotic_sum(x) / x)
    } else {
        Ok((-x).exp() * exp_integral_ei(x)?)
    }
}

fn e1_positive(x: f64) -> f64 {
    if x <= 1.0 {
        // -γ - ln x - Σ (-x)^k / (k k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_TERMS {
            let kf = k as f64;
            term *= -x / kf;
            let add = term / kf;
            sum += add;
            if add.abs() < f64::EPSILON * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        e1_continued_fraction(x) * (-x).exp()
    }
}

// e^{x} E₁(x) by modified Lentz evaluation of the continued fraction, x > 1
fn e1_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

fn ei_series(x: f64) -> f64 {
    // γ + ln x + Σ x^k / (k k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add < f64::EPSILON * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

fn ei_near_root(x: f64) -> f64 {
    // Ei(x) - Ei(x0) = ln(x/x0) + Σ (x^k - x0^k) / (k k!), every piece ∝ x - x0.
    let d = (x - EI_ROOT_HI) - EI_ROOT_LO;
    let mut diff_pow = d; // x^k - x0^k
    let mut root_pow = 1.0; // x0^(k-1)
    let mut fact = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        if k > 1 {
            root_pow *= EI_ROOT_HI;
            diff_pow = x * diff_pow + root_pow * d;
            fact *= kf;
        }
        let add = diff_pow / (kf * fact);
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    (d / EI_ROOT_HI).ln_1p() + sum
}

fn ei_asymptotic(x: f64) -> f64 {
    // split e^x to keep the x ≈ 709 end finite as long as the result is
    let half = (0.5 * x).exp();
    half * (half / x) * asymptotic_sum(x)
}

// Σ k! / x^k truncated at the smallest term
fn asymptotic_sum(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let next = term * k as f64 / x;
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 40-digit arbitrary-precision evaluation.
    #[allow(clippy::excessive_precision)]
    const REFERENCE: &[(f64, f64)] = &[
        (1.0, 1.895117816355936755466521),
        (0.04, -2.601256577572826165502796),
        (-0.04, -2.681263689025279899755414),
        (1e-6, -13.23829389306249128869781),
        (-1e-6, -13.23829589306249128880884),
        (1e-3, -6.329539364025038196720833),
        (-1e-3, -6.331539364136149311206911),
        (0.2, -0.8217605879024002478518376),
        (-0.2, -1.222650544183893042886086),
        (0.37, -0.009790148500068083418157881),
        (0.3725, -0.00002887418318874596455979852),
        (0.375, 0.009691377209341999483044039),
        (0.5, 0.4542199048631735799205238),
        (2.0, 4.954234356001890163379505),
        (-2.0, -0.04890051070806111956723984),
        (-1.0, -0.2193839343955202736771638),
        (-0.3, -0.905676651675846739846109),
        (5.0, 40.18527535580317745509142),
        (-5.0, -0.001148295591275325797330562),
        (10.0, 2492.22897624187775913844),
        (-10.0, -0.00000415696892968532427740286),
        (30.0, 368973209407.2741970640063),
        (-30.0, -3.021552010688812544815825e-15),
        (50.0, 105856368971316909630.6154),
        (-50.0, -3.783264029550459018698968e-24),
        (100.0, 2.715552744853879821914015e+41),
        (300.0, 6.496482508088665789025692e+127),
        (700.0, 1.450978736052560852620883e+301),
        (-700.0, -1.406518766234032922774411e-307),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, expected) in REFERENCE {
            let got = exp_integral_ei(x).unwrap();
            let rel = ((got - expected) / expected).abs();
            assert!(rel <= 1e-12, "Ei({x}) = {got}, expected {expected}, rel {rel:e}");
        }
    }

    #[test]
    fn ei_of_one() {
        assert!((exp_integral_ei(1.0).unwrap() - 1.895117816).abs() < 1e-9);
    }

    #[test]
    fn negative_branch_is_minus_e1() {
        let a = exp_integral_ei(-0.04).unwrap();
        let b = -exp_integral_e1(0.04).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn small_argument_expansion() {
        let x: f64 = 1e-6;
        let leading = x.ln() + EULER_GAMMA + x;
        assert!((exp_integral_ei(x).unwrap() - leading).abs() < 1e-9);
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(exp_integral_ei(0.0), Err(Error::SingularArgument));
        assert_eq!(exp_integral_e1(0.0), Err(Error::SingularArgument));
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(exp_integral_ei(f64::NAN).is_err());
    }

    #[test]
    fn continuous_across_branch_switches() {
        for edge in [
            ASYMPTOTIC_FROM,
            EI_ROOT_HI - ROOT_WINDOW,
            EI_ROOT_HI + ROOT_WINDOW,
            -1.0,
        ] {
            let below = exp_integral_ei(edge * (1.0 - 1e-12)).unwrap();
            let above = exp_integral_ei(edge * (1.0 + 1e-12)).unwrap();
            let scale = below.abs().max(1.0);
            assert!((below - above).abs() / scale < 1e-9, "edge {edge}");
        }
    }

    #[test]
    fn scaled_forms_agree_with_plain() {
        for x in [0.01, 0.5, 1.0, 3.0, 39.0, 41.0, 200.0] {
            let e1 = exp_integral_e1(x).unwrap() * f64::exp(x);
            assert!((scaled_e1(x).unwrap() - e1).abs() / e1 < 1e-13, "x = {x}");
            let ei = exp_integral_ei(x).unwrap() * f64::exp(-x);
            assert!((scaled_ei(x).unwrap() - ei).abs() / ei.abs() < 1e-13, "x = {x}");
        }
        // beyond the overflow point of e^x
        assert!((scaled_e1(1000.0).unwrap() * 1000.0 - 1.0).abs() < 1e-3);
        assert!((scaled_ei(1000.0).unwrap() * 1000.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn derivative_is_exp_over_x() {
        for x in [-20.0, -3.0, -0.5, 0.05, 0.3725, 0.9, 7.0, 45.0] {
            let h = 1e-5 * f64::abs(x);
            let fd = (exp_integral_ei(x + h).unwrap() - exp_integral_ei(x - h).unwrap()) / (2.0 * h);
            let exact = f64::exp(x) / x;
            assert!(((fd - exact) / exact).abs() < 1e-7, "x = {x}");
        }
    }
}
