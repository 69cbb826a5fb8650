//! Integrates the jobs of a run and collects the derived quantities.

use largespin::analysis::{
    beat_frequency_closed_form, beat_prediction, decay_level_one_over_e, equilibrium_bloch,
    equilibrium_thermodynamic, extract_beat_frequency, extract_decay_time, BeatPrediction,
    EquilibriumValues,
};
use largespin::bath::{compute_rates, RateSet};
use largespin::dynamics::{
    initial_state_spin_up, initial_state_x_up, BlochEquations, BlochVector, DensityMatrix,
    MasterEquation, Trajectory,
};
use largespin::spin::{SpinOperators, SpinSize};
use rayon::prelude::*;

use crate::config::{InitialState, Job, ResolvedRun};
use crate::error::CliError;

/// Everything derived from one job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    pub job: Job,
    pub rates: RateSet,
    pub trajectory: Trajectory,
    /// Bloch-equation solution for spin 1/2 jobs.
    pub bloch: Option<Trajectory>,
    pub analysis: Analysis,
    pub warnings: Vec<String>,
}

/// Predictions and measurements that may be unavailable for a job; the
/// `Err` side carries the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub equilibrium: Result<EquilibriumValues, String>,
    pub thermodynamic: Result<EquilibriumValues, String>,
    pub beat: Result<BeatPrediction, String>,
    pub beat_closed_form: Result<f64, String>,
    pub decay_time: Result<f64, String>,
    pub decay_time_one_over_e: Result<f64, String>,
    pub beat_frequency: Result<f64, String>,
    pub bloch_master_max_dev: Option<f64>,
}

fn reason<T>(r: largespin::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn initial_density(state: InitialState, spin: SpinSize, ops: &SpinOperators) -> Result<DensityMatrix, CliError> {
    Ok(match state {
        InitialState::ZUp => initial_state_spin_up(spin),
        InitialState::XUp => initial_state_x_up(spin, ops)?,
    })
}

/// Largest pointwise gap between the expectation values of two trajectories
/// on the same grid.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    let pairs = [(&a.jx, &b.jx), (&a.jy, &b.jy), (&a.jz, &b.jz)];
    pairs
        .iter()
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Predictions that need no integration.
pub fn predict(job: &Job) -> Result<(RateSet, Analysis), CliError> {
    let rates = compute_rates(&job.params, &job.bath)?;
    let analysis = Analysis {
        equilibrium: reason(equilibrium_bloch(&job.params, &rates)),
        thermodynamic: reason(equilibrium_thermodynamic(&job.params, job.bath.temperature)),
        beat: reason(beat_prediction(&job.params, &job.bath)),
        beat_closed_form: reason(beat_prediction(&job.params, &job.bath))
            .and_then(|_| reason(beat_frequency_closed_form(job.params.tc, &job.bath))),
        decay_time: Err("not integrated".into()),
        decay_time_one_over_e: Err("not integrated".into()),
        beat_frequency: Err("not integrated".into()),
        bloch_master_max_dev: None,
    };
    Ok((rates, analysis))
}

pub fn run_job(job: &Job) -> Result<JobResult, CliError> {
    let (rates, mut analysis) = predict(job)?;
    let spin = job.params.spin;
    let ops = SpinOperators::new(spin);
    let rho0 = initial_density(job.initial_state, spin, &ops)?;

    let trajectory = MasterEquation::new(&job.params, &ops, &rates)?.run(&rho0, &job.grid)?;

    let bloch = if spin == SpinSize::HALF {
        let v0 = BlochVector::from_density(&rho0, &ops)?;
        let traj = BlochEquations::new(&job.params, &rates)?.run(v0, &job.grid)?;
        analysis.bloch_master_max_dev = Some(max_deviation(&trajectory, &traj));
        Some(traj)
    } else {
        None
    };

    analysis.decay_time = reason(extract_decay_time(&trajectory, 0.0));
    analysis.decay_time_one_over_e = match decay_level_one_over_e(&trajectory) {
        Some(level) => reason(extract_decay_time(&trajectory, level)),
        None => Err("empty trajectory".into()),
    };
    analysis.beat_frequency = if spin == SpinSize::HALF {
        Err("a spin 1/2 has a single transition frequency".into())
    } else {
        reason(extract_beat_frequency(&trajectory))
    };

    let mut warnings = Vec::new();
    if job.bath.outside_weak_coupling() {
        warnings.push(format!(
            "alpha = {} is outside the weak-coupling regime the master equation assumes",
            job.bath.alpha
        ));
    }
    warnings.extend(trajectory.warnings.iter().cloned());
    let warnings = warnings.into_iter().map(|w| format!("[{}] {w}", job.label)).collect();

    Ok(JobResult { job: job.clone(), rates, trajectory, bloch, analysis, warnings })
}

/// Runs every job concurrently; results keep the job order.
pub fn run_all(run: &ResolvedRun) -> Result<Vec<JobResult>, CliError> {
    run.jobs.par_iter().map(run_job).collect()
}
