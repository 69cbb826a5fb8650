//! Closed-form equilibria, the perturbative beat predictor and trajectory
//! post-processing.

use crate::bath::{unit_ohmic_pair, BathSpec, RateSet};
use crate::dynamics::Trajectory;
use crate::quadrature::{half_line_integral, pv_integral};
use crate::special::exp_integral_ei;
use crate::spin::{SpinSize, SystemParams};
use crate::{Error, Result};

/// Long-time expectation values of a spin 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumValues {
    pub jx_inf: f64,
    pub jy_inf: f64,
    pub jz_inf: f64,
}

fn require_spin_half(params: &SystemParams) -> Result<()> {
    if params.spin != SpinSize::HALF {
        return Err(Error::RequiresSpinHalf { two_j: params.spin.two_j() });
    }
    Ok(())
}

/// Stationary point of the Bloch equations.
pub fn equilibrium_bloch(params: &SystemParams, rates: &RateSet) -> Result<EquilibriumValues> {
    require_spin_half(params)?;
    let (eps, tc, delta) = (params.epsilon, params.tc, params.delta());
    let (g, gc, gs) = (rates.gamma, rates.gamma_c, rates.gamma_s);
    // Re{ε²Γ + 4T_c²Γ_c} and Γ - Γ_c
    let relax = eps * eps * g.re + 4.0 * tc * tc * gc.re;
    let diff = g - gc;
    let shifted = delta + gs.re;

    let den = delta * relax * shifted - eps * eps * delta * delta * diff.re;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateEquilibrium);
    }
    let jz = (eps * relax * diff.im + eps * delta.powi(3) * gs.im) / (2.0 * den);
    let jx = (tc * delta * delta * gs.im * shifted + eps * eps * tc * diff.re * diff.im) / den;
    Ok(EquilibriumValues { jx_inf: jx, jy_inf: 0.0, jz_inf: jz })
}

/// Thermal equilibrium of the uncoupled spin 1/2.
pub fn equilibrium_thermodynamic(params: &SystemParams, temperature: f64) -> Result<EquilibriumValues> {
    require_spin_half(params)?;
    if !(temperature >= 0.0) {
        return Err(Error::invalid("temperature", format!("must be ≥ 0, got {temperature}")));
    }
    let delta = params.delta();
    let tanh = if temperature == 0.0 {
        1.0
    } else {
        (delta / (2.0 * temperature)).tanh()
    };
    Ok(EquilibriumValues {
        jx_inf: -params.tc / delta * tanh,
        jy_inf: 0.0,
        jz_inf: -params.epsilon / (2.0 * delta) * tanh,
    })
}

/// Second-order level shifts of the unbiased spin 1 and the resulting beat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatPrediction {
    /// Carrier angular frequency.
    pub omega_0: f64,
    /// Envelope angular frequency.
    pub omega_b: f64,
    pub e2_plus: f64,
    pub e2_minus: f64,
    pub e2_zero: f64,
}

impl BeatPrediction {
    fn from_shifts(tc: f64, e2_plus: f64, e2_minus: f64) -> Self {
        let e2_zero = e2_plus + e2_minus;
        BeatPrediction {
            omega_0: 2.0 * tc + 0.5 * (e2_plus - e2_minus),
            omega_b: -0.5 * e2_zero,
            e2_plus,
            e2_minus,
            e2_zero,
        }
    }
}

fn check_beat_validity(params: &SystemParams, bath: &BathSpec) -> Result<()> {
    if params.spin.two_j() != 2 {
        return Err(Error::OutsideValidity(format!(
            "beat prediction is derived for spin 1, got {}",
            params.spin
        )));
    }
    if params.epsilon != 0.0 {
        return Err(Error::OutsideValidity(format!(
            "beat prediction needs zero bias, got ε = {}",
            params.epsilon
        )));
    }
    if !bath.is_zero_temperature() {
        return Err(Error::OutsideValidity(format!(
            "beat prediction needs zero temperature, got {}",
            bath.temperature
        )));
    }
    Ok(())
}

/// Level shifts `E±⁽²⁾ = -(1/2) PV∫ ρ(ω) / (ω ∓ 2T_c) dω` in closed form.
pub fn beat_prediction(params: &SystemParams, bath: &BathSpec) -> Result<BeatPrediction> {
    check_beat_validity(params, bath)?;
    let (plus, minus) = unit_ohmic_pair(2.0 * params.tc, bath.omega_c)?;
    Ok(BeatPrediction::from_shifts(
        params.tc,
        -0.5 * bath.alpha * minus,
        -0.5 * bath.alpha * plus,
    ))
}

/// Same shifts, each integrated numerically.
pub fn beat_prediction_by_quadrature(params: &SystemParams, bath: &BathSpec) -> Result<BeatPrediction> {
    check_beat_validity(params, bath)?;
    let two_tc = 2.0 * params.tc;
    let wc = bath.omega_c;
    let rho = |w: f64| 2.0 * bath.alpha * w * (-w / wc).exp();
    let e2_plus = -0.5 * pv_integral(rho, two_tc, wc)?;
    let e2_minus = -0.5 * half_line_integral(|w| rho(w) / (w + two_tc), wc)?;
    Ok(BeatPrediction::from_shifts(params.tc, e2_plus, e2_minus))
}

/// `ω_b = αω_c + αT_c [e^{2T_c/ω_c} Ei(-2T_c/ω_c) - e^{-2T_c/ω_c} Ei(2T_c/ω_c)]`.
pub fn beat_frequency_closed_form(tc: f64, bath: &BathSpec) -> Result<f64> {
    let x = 2.0 * tc / bath.omega_c;
    let bracket = x.exp() * exp_integral_ei(-x)? - (-x).exp() * exp_integral_ei(x)?;
    Ok(bath.alpha * bath.omega_c + bath.alpha * tc * bracket)
}

/// Undamped beat `cos(ω₀t) cos(ω_b t)`.
pub fn predicted_beat_trace(pred: &BeatPrediction, times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| (pred.omega_0 * t).cos() * (pred.omega_b * t).cos())
        .collect()
}

/// `⟨J_z⟩/J` level lying `1/e` of the way from the final to the initial value.
pub fn decay_level_one_over_e(traj: &Trajectory) -> Option<f64> {
    let y = traj.normalized_jz();
    let (first, last) = (*y.first()?, *y.last()?);
    Some(last + (first - last) / std::f64::consts::E)
}

/// First time the linearly interpolated `⟨J_z⟩/J` falls through `level`.
pub fn extract_decay_time(traj: &Trajectory, level: f64) -> Result<f64> {
    let y = traj.normalized_jz();
    for k in 1..y.len() {
        if y[k - 1] > level && y[k] <= level {
            let (t0, t1) = (traj.times[k - 1], traj.times[k]);
            return Ok(t0 + (t1 - t0) * (y[k - 1] - level) / (y[k - 1] - y[k]));
        }
    }
    Err(Error::NoCrossing { level })
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return (x[1], y[1]);
    }
    // y = y0 + d1 (x - x0) + curv (x - x0)(x - x1)
    let xv = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
    let xv = xv.clamp(x[0], x[2]);
    let yv = y[0] + d1 * (xv - x[0]) + curv * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

/// Peaks of `|⟨J_z⟩|`, one per carrier half-period.
fn carrier_envelope(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let mut t_env = Vec::new();
    let mut e_env = Vec::new();
    for k in 1..r.len().saturating_sub(1) {
        if r[k] >= r[k - 1] && r[k] > r[k + 1] {
            let (t, e) = parabola_vertex(
                [times[k - 1], times[k], times[k + 1]],
                [r[k - 1], r[k], r[k + 1]],
            );
            t_env.push(t);
            e_env.push(e.max(r[k]));
        }
    }
    (t_env, e_env)
}

/// Local minima of `e` whose prominence is at least half the surrounding peaks.
fn prominent_minima(e: &[f64]) -> Vec<usize> {
    let mut nodes = Vec::new();
    for k in 1..e.len().saturating_sub(1) {
        if !(e[k] < e[k - 1] && e[k] <= e[k + 1]) {
            continue;
        }
        let mut left = e[k];
        for &v in e[..k].iter().rev() {
            if v < e[k] {
                break;
            }
            left = left.max(v);
        }
        let mut right = e[k];
        for &v in &e[k + 1..] {
            if v < e[k] {
                break;
            }
            right = right.max(v);
        }
        if e[k] <= 0.5 * left.min(right) {
            nodes.push(k);
        }
    }
    nodes
}

/// Least-squares decay rate of `ln e` through the envelope maxima between
/// nodes; zero when fewer than two maxima are available.
fn envelope_decay_rate(t: &[f64], e: &[f64], nodes: &[usize]) -> f64 {
    let mut bounds = vec![0];
    bounds.extend(nodes.iter().copied());
    bounds.push(e.len());
    let peaks: Vec<(f64, f64)> = bounds
        .windows(2)
        .filter(|w| w[1] > w[0])
        .filter_map(|w| {
            (w[0]..w[1])
                .max_by(|&a, &b| e[a].total_cmp(&e[b]))
                .filter(|&k| e[k] > 0.0)
                .map(|k| (t[k], e[k].ln()))
        })
        .collect();
    if peaks.len() < 2 {
        return 0.0;
    }
    let n = peaks.len() as f64;
    let mean_t = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        -sxy / sxx
    }
}

/// Times of the beat nodes of `⟨J_z⟩`.
///
/// The rectified signal is reduced to its carrier peaks; the peak envelope is
/// divided by a fitted exponential, and each prominent minimum of its square
/// is located by a parabola through the neighbouring peaks.
pub fn beat_nodes(traj: &Trajectory) -> Vec<f64> {
    let (t, e) = carrier_envelope(&traj.times, &traj.jz);
    let nodes = prominent_minima(&e);
    let rate = envelope_decay_rate(&t, &e, &nodes);
    let flat: Vec<f64> = t.iter().zip(&e).map(|(t, e)| e * (rate * t).exp()).collect();
    let q: Vec<f64> = flat.iter().map(|v| v * v).collect();
    prominent_minima(&flat)
        .into_iter()
        .map(|k| parabola_vertex([t[k - 1], t[k], t[k + 1]], [q[k - 1], q[k], q[k + 1]]).0)
        .collect()
}

/// Envelope angular frequency `π / ⟨node spacing⟩`.
pub fn extract_beat_frequency(traj: &Trajectory) -> Result<f64> {
    let nodes = beat_nodes(traj);
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes { found: nodes.len() });
    }
    let spacing = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    Ok(std::f64::consts::PI / spacing)
}
