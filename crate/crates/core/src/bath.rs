//! Ohmic bath: spectral function and the complex rates `Γ`, `Γ_c`, `Γ_s`.
//!
//! With `ρ(ω) = 2αω e^{-ω/ω_c}` and `x = Δ/ω_c`, the principal-value integrals
//! reduce to exponential integrals:
//!
//! ```text
//! ∫  ω e^{-ω/ω_c} / (ω + Δ) dω = ω_c - Δ e^{x} E₁(x)
//! PV∫ ω e^{-ω/ω_c} / (ω - Δ) dω = ω_c - Δ e^{-x} Ei(x)
//! ```
//!
//! which gives `Im Γ_c` at any temperature and `Re Γ_s` at zero temperature in
//! closed form. `Re Γ_s` at finite temperature is evaluated by quadrature.
//!
//! All quadratures run at unit coupling and are scaled by `α` afterwards, so
//! every rate is exactly linear in `α`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::quadrature::pv_integral;
use crate::special::{scaled_e1, scaled_ei};
use crate::spin::SystemParams;
use crate::{Error, Result, C64};

/// Above this coupling the weak-coupling expansion is not trustworthy.
pub const WEAK_COUPLING_LIMIT: f64 = 0.1;

/// Ohmic bath with exponential cutoff. `temperature == 0` is exact zero
/// temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub alpha: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be ≥ 0, got {alpha}")));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::invalid("omega_c", format!("must be > 0, got {omega_c}")));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::invalid(
                "temperature",
                format!("must be ≥ 0, got {temperature}"),
            ));
        }
        Ok(BathSpec { alpha, omega_c, temperature })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        BathSpec::new(alpha, self.omega_c, self.temperature)
    }

    pub fn outside_weak_coupling(&self) -> bool {
        self.alpha > WEAK_COUPLING_LIMIT
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.temperature == 0.0
    }
}

/// Bath rates evaluated at level spacing `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma: C64,
    pub gamma_c: C64,
    pub gamma_s: C64,
    pub delta: f64,
}

impl RateSet {
    pub fn zero(delta: f64) -> Self {
        RateSet { gamma: C64::default(), gamma_c: C64::default(), gamma_s: C64::default(), delta }
    }
}

/// `ρ(ω) = 2αω e^{-ω/ω_c}`.
pub fn spectral_density(omega: f64, bath: &BathSpec) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::invalid("omega", format!("must be ≥ 0, got {omega}")));
    }
    Ok(unit_spectral(omega, bath.omega_c) * bath.alpha)
}

fn unit_spectral(omega: f64, omega_c: f64) -> f64 {
    2.0 * omega * (-omega / omega_c).exp()
}

/// `coth(ω / 2T)`, identically 1 at zero temperature.
pub fn coth_factor(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 1.0;
    }
    let x = omega / (2.0 * temperature);
    if x > 20.0 {
        1.0
    } else if x < 1e-4 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// `ω coth(ω / 2T)`, finite (→ 2T) as ω → 0.
fn omega_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return omega;
    }
    let x = omega / (2.0 * temperature);
    if x > 20.0 {
        omega
    } else if x < 1e-4 {
        2.0 * temperature * (1.0 + x * x / 3.0)
    } else {
        omega / x.tanh()
    }
}

/// `ρ(ω) coth(ω/2T)` at unit coupling, with its finite `ω → 0` limit `4T`.
pub(crate) fn unit_thermal_spectral(omega: f64, bath: &BathSpec) -> f64 {
    2.0 * (-omega / bath.omega_c).exp() * omega_coth(omega, bath.temperature)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(
            "delta",
            format!("must be > 0, got {delta} (use compute_gamma for the Δ → 0 limit)"),
        ));
    }
    Ok(())
}

/// Unit-coupling `∫ ρ(ω)/(ω + Δ)` and `PV∫ ρ(ω)/(ω - Δ)` in closed form.
pub(crate) fn unit_ohmic_pair(delta: f64, omega_c: f64) -> Result<(f64, f64)> {
    let x = delta / omega_c;
    let plus = 2.0 * (omega_c - delta * scaled_e1(x)?);
    let minus = 2.0 * (omega_c - delta * scaled_ei(x)?);
    Ok((plus, minus))
}

/// `Im Γ_c = -(1/2) PV∫ ρ(ω) [1/(ω+Δ) + 1/(ω-Δ)] dω` via exponential integrals.
pub fn im_gamma_c_closed_form(delta: f64, bath: &BathSpec) -> Result<f64> {
    check_delta(delta)?;
    let (plus, minus) = unit_ohmic_pair(delta, bath.omega_c)?;
    Ok(-0.5 * bath.alpha * (plus + minus))
}

/// `Im Γ_c` by principal-value quadrature.
pub fn im_gamma_c_quadrature(delta: f64, bath: &BathSpec) -> Result<f64> {
    check_delta(delta)?;
    let wc = bath.omega_c;
    // -(1/2) ρ(ω) [1/(ω+Δ) + 1/(ω-Δ)] = -ρ(ω) ω / (ω+Δ) · 1/(ω-Δ)
    let numerator = |w: f64| -unit_spectral(w, wc) * w / (w + delta);
    Ok(bath.alpha * pv_integral(numerator, delta, wc)?)
}

/// Zero-temperature `Re Γ_s = (1/2) PV∫ ρ(ω) [1/(ω+Δ) - 1/(ω-Δ)] dω` via
/// exponential integrals.
pub fn re_gamma_s_closed_form(delta: f64, bath: &BathSpec) -> Result<f64> {
    check_delta(delta)?;
    if !bath.is_zero_temperature() {
        return Err(Error::OutsideValidity(
            "Re Γ_s has no closed form at finite temperature".into(),
        ));
    }
    let (plus, minus) = unit_ohmic_pair(delta, bath.omega_c)?;
    Ok(0.5 * bath.alpha * (plus - minus))
}

/// `Re Γ_s` by principal-value quadrature, at any temperature.
pub fn re_gamma_s_quadrature(delta: f64, bath: &BathSpec) -> Result<f64> {
    check_delta(delta)?;
    // (1/2) ρ coth [1/(ω+Δ) - 1/(ω-Δ)] = -Δ ρ coth / (ω+Δ) · 1/(ω-Δ)
    let numerator = |w: f64| -delta * unit_thermal_spectral(w, bath) / (w + delta);
    Ok(bath.alpha * pv_integral(numerator, delta, bath.omega_c)?)
}

/// `Γ_c(Δ)`: real part `(π/2) ρ(Δ) coth(Δ/2T)`, imaginary part in closed form.
pub fn compute_gamma_c(delta: f64, bath: &BathSpec) -> Result<C64> {
    check_delta(delta)?;
    let re = FRAC_PI_2 * spectral_density(delta, bath)? * coth_factor(delta, bath.temperature);
    Ok(C64::new(re, im_gamma_c_closed_form(delta, bath)?))
}

/// `Γ_s(Δ)`: imaginary part `-(π/2) ρ(Δ)`; real part in closed form at zero
/// temperature and by quadrature otherwise.
pub fn compute_gamma_s(delta: f64, bath: &BathSpec) -> Result<C64> {
    check_delta(delta)?;
    let im = -FRAC_PI_2 * spectral_density(delta, bath)?;
    let re = if bath.is_zero_temperature() {
        re_gamma_s_closed_form(delta, bath)?
    } else {
        re_gamma_s_quadrature(delta, bath)?
    };
    Ok(C64::new(re, im))
}

/// `Γ = Γ_c(Δ → 0) = 2παT - 2iαω_c`.
pub fn compute_gamma(bath: &BathSpec) -> C64 {
    C64::new(2.0 * PI * bath.alpha * bath.temperature, -2.0 * bath.alpha * bath.omega_c)
}

pub fn compute_rates(params: &SystemParams, bath: &BathSpec) -> Result<RateSet> {
    let delta = params.delta();
    Ok(RateSet {
        gamma: compute_gamma(bath),
        gamma_c: compute_gamma_c(delta, bath)?,
        gamma_s: compute_gamma_s(delta, bath)?,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::SpinSize;
    use proptest::prelude::*;

    fn bath(alpha: f64, wc: f64, t: f64) -> BathSpec {
        BathSpec::new(alpha, wc, t).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn spectral_density_values() {
        let b = bath(0.05, 50.0, 0.0);
        assert_eq!(spectral_density(0.0, &b).unwrap(), 0.0);
        assert_eq!(spectral_density(3.0, &bath(0.0, 50.0, 1.0)).unwrap(), 0.0);
        let v = spectral_density(2.0, &b).unwrap();
        assert!((v - 0.2 * (-0.04f64).exp()).abs() < 1e-15);
        assert!((v - 0.192158).abs() < 1e-6);
        assert!(spectral_density(-1.0, &b).is_err());
    }

    #[test]
    fn bath_validation() {
        assert!(BathSpec::new(-0.1, 50.0, 0.0).is_err());
        assert!(BathSpec::new(0.1, 0.0, 0.0).is_err());
        assert!(BathSpec::new(0.1, 50.0, -1.0).is_err());
        assert!(!bath(0.1, 50.0, 0.0).outside_weak_coupling());
        assert!(bath(0.2, 50.0, 0.0).outside_weak_coupling());
    }

    #[test]
    fn coth_branches() {
        assert_eq!(coth_factor(3.0, 0.0), 1.0);
        assert_eq!(coth_factor(100.0, 1.0), 1.0);
        let x: f64 = 1e-5;
        assert!(rel(coth_factor(2.0 * x, 1.0), 1.0 / x.tanh()) < 1e-12);
        assert!(rel(coth_factor(1.0, 1.0), 1.0 / 0.5f64.tanh()) < 1e-15);
    }

    #[test]
    fn zero_temperature_real_part_has_no_coth() {
        let b = bath(0.05, 50.0, 0.0);
        let g = compute_gamma_c(2.0, &b).unwrap();
        assert_eq!(g.re, FRAC_PI_2 * spectral_density(2.0, &b).unwrap());
    }

    #[test]
    fn decoupled_bath_gives_zero_rates() {
        let params = SystemParams::new(SpinSize::HALF, 1.0, 1.0).unwrap();
        for t in [0.0, 2.0] {
            let r = compute_rates(&params, &bath(0.0, 50.0, t)).unwrap();
            assert_eq!(r.gamma.norm() + r.gamma_c.norm() + r.gamma_s.norm(), 0.0);
        }
    }

    #[test]
    fn gamma_c_dual_path() {
        let b = bath(0.005, 50.0, 1.0);
        let delta = 104f64.sqrt();
        let a = im_gamma_c_closed_form(delta, &b).unwrap();
        let q = im_gamma_c_quadrature(delta, &b).unwrap();
        assert!((a - q).abs() < 1e-8, "{a} vs {q}");
    }

    #[test]
    fn gamma_s_dual_path_zero_temperature() {
        let b = bath(0.0025, 50.0, 0.0);
        let a = re_gamma_s_closed_form(2.0, &b).unwrap();
        let q = re_gamma_s_quadrature(2.0, &b).unwrap();
        assert!((a - q).abs() < 1e-8, "{a} vs {q}");
        assert!(re_gamma_s_closed_form(2.0, &bath(0.0025, 50.0, 1.0)).is_err());
    }

    #[test]
    fn gamma_s_imaginary_part_is_resonant_density() {
        for t in [0.0, 0.5, 3.0] {
            let b = bath(0.03, 40.0, t);
            let g = compute_gamma_s(3.0, &b).unwrap();
            assert_eq!(g.im, -FRAC_PI_2 * spectral_density(3.0, &b).unwrap());
        }
    }

    #[test]
    fn gamma_limits() {
        let cold = bath(0.05, 50.0, 0.0);
        let g = compute_gamma(&cold);
        assert_eq!(g, C64::new(0.0, -2.0 * 0.05 * 50.0));
        let near = compute_gamma_c(1e-8, &cold).unwrap();
        assert!((near - g).norm() < 1e-6);

        let warm = bath(0.05, 50.0, 2.0);
        let g = compute_gamma(&warm);
        assert!((g.re - 2.0 * PI * 0.05 * 2.0).abs() < 1e-15);
        let near = compute_gamma_c(1e-8, &warm).unwrap();
        assert!((near - g).norm() < 1e-6);
        assert_eq!(compute_gamma(&bath(0.0, 50.0, 2.0)), C64::default());
    }

    #[test]
    fn gamma_c_is_continuous_at_small_delta() {
        let b = bath(0.05, 50.0, 2.0);
        let near = compute_gamma_c(1e-6, &b).unwrap();
        assert!((near - compute_gamma(&b)).norm() < 1e-4);
    }

    #[test]
    fn rejects_nonpositive_delta() {
        let b = bath(0.05, 50.0, 2.0);
        assert!(compute_gamma_c(0.0, &b).is_err());
        assert!(compute_gamma_s(-1.0, &b).is_err());
    }

    #[test]
    fn figure_one_a_rates_are_sane() {
        let params = SystemParams::new(SpinSize::HALF, 1.0, 1.0).unwrap();
        let r = compute_rates(&params, &bath(0.05, 50.0, 2.0)).unwrap();
        for v in [r.gamma, r.gamma_c, r.gamma_s] {
            assert!(v.re.is_finite() && v.im.is_finite());
        }
        assert!(r.gamma_c.re > 0.0);
        assert_eq!(r.delta, 5f64.sqrt());
    }

    #[test]
    fn thermal_integrand_is_regular_at_origin() {
        let b = bath(1.0, 50.0, 0.7);
        let delta = 2.0;
        let w = 1e-12;
        let integrand = unit_thermal_spectral(w, &b) * 0.5 * (1.0 / (w + delta) - 1.0 / (w - delta));
        let limit = 4.0 * b.temperature * 0.5 * (1.0 / (w + delta) - 1.0 / (w - delta));
        assert!((integrand - limit).abs() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rates_are_linear_in_alpha(
            alpha in 1e-3f64..0.1,
            wc in 10.0f64..100.0,
            eps in 0.0f64..10.0,
            t in prop_oneof![Just(0.0), 0.1f64..5.0],
        ) {
            let params = SystemParams::new(SpinSize::HALF, eps, 1.0).unwrap();
            let one = compute_rates(&params, &bath(alpha, wc, t)).unwrap();
            let two = compute_rates(&params, &bath(2.0 * alpha, wc, t)).unwrap();
            for (a, b) in [(one.gamma, two.gamma), (one.gamma_c, two.gamma_c), (one.gamma_s, two.gamma_s)] {
                prop_assert!((a * 2.0 - b).norm() <= 1e-12 * b.norm().max(1.0));
            }
        }

        #[test]
        fn sign_structure(
            alpha in 0.0f64..0.1,
            wc in 10.0f64..100.0,
            delta in 0.5f64..20.0,
            t in prop_oneof![Just(0.0), 0.1f64..5.0],
        ) {
            let b = bath(alpha, wc, t);
            prop_assert!(compute_gamma_c(delta, &b).unwrap().re >= 0.0);
            prop_assert!(compute_gamma_s(delta, &b).unwrap().im <= 0.0);
        }
    }
}
