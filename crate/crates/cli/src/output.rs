//! CSV trajectories, the key-value summary and the gnuplot script.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use largespin::dynamics::{Sample, Trajectory};
use largespin::spin::SpinSize;

use crate::config::{ResolvedRun, Scenario};
use crate::error::CliError;
use crate::runner::{Analysis, JobResult};

pub const CSV_HEADER: [&str; 7] = ["t", "jx", "jy", "jz", "trace_err", "herm_err", "min_eig"];

/// Fifteen significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
        }
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    ensure_parent(path)?;
    let csv_err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for k in 0..traj.len() {
        let row = [
            traj.times[k],
            traj.jx[k],
            traj.jy[k],
            traj.jz[k],
            traj.trace_err[k],
            traj.herm_err[k],
            traj.min_eig[k],
        ];
        w.write_record(row.iter().map(|&v| format_float(v))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a trajectory written by [`write_csv`]. The spin size is not stored
/// in the file.
pub fn read_csv(path: &Path, spin: SpinSize) -> Result<Trajectory, CliError> {
    let csv_err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let malformed = |reason: String| CliError::Malformed { path: path.to_path_buf(), reason };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let mut traj = Trajectory::new(spin);
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let mut v = [0.0; 7];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|e| malformed(format!("row {}: {field:?}: {e}", line + 2)))?;
        }
        if record.len() != 7 {
            return Err(malformed(format!("row {} has {} fields", line + 2, record.len())));
        }
        traj.push(
            v[0],
            Sample { jx: v[1], jy: v[2], jz: v[3], trace_err: v[4], herm_err: v[5], min_eig: v[6] },
        );
    }
    Ok(traj)
}

fn value(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn entry<T>(out: &mut String, key: &str, r: &Result<T, String>, show: impl Fn(&T) -> String) {
    match r {
        Ok(v) => writeln!(out, "{key} = {}", show(v)).unwrap(),
        Err(why) => writeln!(out, "{key} = {}", quoted(&format!("unavailable: {why}"))).unwrap(),
    }
}

fn write_analysis(out: &mut String, a: &Analysis) {
    entry(out, "equilibrium_jz", &a.equilibrium, |e| value(e.jz_inf));
    entry(out, "equilibrium_jx", &a.equilibrium, |e| value(e.jx_inf));
    entry(out, "thermodynamic_jz", &a.thermodynamic, |e| value(e.jz_inf));
    entry(out, "thermodynamic_jx", &a.thermodynamic, |e| value(e.jx_inf));
    entry(out, "predicted_omega_0", &a.beat, |b| value(b.omega_0));
    entry(out, "predicted_omega_b", &a.beat, |b| value(b.omega_b));
    entry(out, "predicted_omega_b_ei", &a.beat_closed_form, |w| value(*w));
    entry(out, "e2_plus", &a.beat, |b| value(b.e2_plus));
    entry(out, "e2_minus", &a.beat, |b| value(b.e2_minus));
    entry(out, "e2_zero", &a.beat, |b| value(b.e2_zero));
    entry(out, "decay_time", &a.decay_time, |t| value(*t));
    entry(out, "decay_time_one_over_e", &a.decay_time_one_over_e, |t| value(*t));
    entry(out, "beat_frequency", &a.beat_frequency, |w| value(*w));
    if let Some(d) = a.bloch_master_max_dev {
        writeln!(out, "bloch_master_max_dev = {}", value(d)).unwrap();
    }
}

fn write_job_header(out: &mut String, run: &ResolvedRun, r: &JobResult) {
    let job = &r.job;
    let p = &job.params;
    writeln!(out, "\n[job.{}]", quoted(&job.label)).unwrap();
    writeln!(out, "csv = {}", quoted(&run.csv_path(job).display().to_string())).unwrap();
    writeln!(out, "spin = {}", quoted(&p.spin.to_string())).unwrap();
    writeln!(out, "epsilon = {}", value(p.epsilon)).unwrap();
    writeln!(out, "tc = {}", value(p.tc)).unwrap();
    writeln!(out, "delta = {}", value(p.delta())).unwrap();
    writeln!(out, "alpha = {}", value(job.bath.alpha)).unwrap();
    writeln!(out, "omega_c = {}", value(job.bath.omega_c)).unwrap();
    writeln!(out, "temperature = {}", value(job.bath.temperature)).unwrap();
    writeln!(out, "initial_state = {}", quoted(job.initial_state.name())).unwrap();
    writeln!(out, "dt = {}", value(job.grid.dt)).unwrap();
    writeln!(out, "t_end = {}", value(job.grid.t_end())).unwrap();
    let rates = &r.rates;
    for (name, z) in [("gamma", rates.gamma), ("gamma_c", rates.gamma_c), ("gamma_s", rates.gamma_s)] {
        writeln!(out, "{name}_re = {}", value(z.re)).unwrap();
        writeln!(out, "{name}_im = {}", value(z.im)).unwrap();
    }
}

/// Structured key-value text, one table per job.
pub fn render_summary(run: &ResolvedRun, results: &[JobResult]) -> String {
    let mut out = String::new();
    writeln!(out, "scenario = {}", quoted(run.scenario.name())).unwrap();
    writeln!(out, "jobs = {}", results.len()).unwrap();
    for r in results {
        write_job_header(&mut out, run, r);
        let t = &r.trajectory;
        writeln!(out, "samples = {}", t.len()).unwrap();
        writeln!(out, "max_trace_err = {}", value(t.max_trace_error())).unwrap();
        writeln!(out, "max_herm_err = {}", value(t.max_hermiticity_error())).unwrap();
        writeln!(out, "min_eig = {}", value(t.min_eigenvalue())).unwrap();
        writeln!(out, "final_jx = {}", value(*t.jx.last().unwrap_or(&f64::NAN))).unwrap();
        writeln!(out, "final_jz = {}", value(*t.jz.last().unwrap_or(&f64::NAN))).unwrap();
        write_analysis(&mut out, &r.analysis);
        writeln!(out, "warnings = {}", r.warnings.len()).unwrap();
    }
    out
}

fn plot_title(run: &ResolvedRun) -> &'static str {
    match run.scenario {
        Scenario::FreeRun => "free evolution",
        Scenario::Figure1a => "biased spin 1/2, k_BT = 2 T_c",
        Scenario::Figure1c => "unbiased spin 1/2, k_BT = 0",
        Scenario::Figure2 => "decay of J_z/J for several spin sizes",
        Scenario::Figure3 => "quantum beats of a spin 1",
    }
}

/// Gnuplot script reading the CSVs of `run`.
pub fn render_plot_script(run: &ResolvedRun) -> String {
    let mut out = String::new();
    let png = run.output.with_extension("png");
    let file_name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    writeln!(out, "# gnuplot {}", file_name(&run.plot_path())).unwrap();
    writeln!(out, "set datafile separator ','").unwrap();
    writeln!(out, "set key autotitle columnhead").unwrap();
    let panels = if run.scenario == Scenario::Figure3 { run.jobs.len() } else { 2 };
    writeln!(out, "set terminal pngcairo size 900,{}", 300 * panels).unwrap();
    writeln!(out, "set output '{}'", file_name(&png)).unwrap();
    writeln!(out, "set xlabel 't T_c'").unwrap();
    writeln!(out, "set multiplot layout {panels},1 title '{}'", plot_title(run)).unwrap();

    let csv = |k: usize| file_name(&run.csv_path(&run.jobs[k]));
    if run.scenario == Scenario::Figure3 {
        for (k, job) in run.jobs.iter().enumerate() {
            writeln!(out, "set title 'alpha = {}'", job.bath.alpha).unwrap();
            writeln!(
                out,
                "plot '{0}' using 1:4 with lines lc rgb 'black' title '<J_z>', \\\n     '{0}' using 1:2 with lines lc rgb 'gray' title '<J_x>'",
                csv(k)
            )
            .unwrap();
        }
    } else {
        for (col, name) in [(4, "J_z"), (2, "J_x")] {
            writeln!(out, "set title '<{name}>/J'").unwrap();
            let curves: Vec<String> = run
                .jobs
                .iter()
                .enumerate()
                .map(|(k, job)| {
                    let j = job.params.spin.j();
                    format!("'{}' using 1:(${col}/{j}) with lines title 'J = {}'", csv(k), job.params.spin)
                })
                .collect();
            writeln!(out, "plot {}", curves.join(", \\\n     ")).unwrap();
        }
    }
    writeln!(out, "unset multiplot").unwrap();
    out
}

/// Writes every CSV, then the summary and the plot script.
pub fn write_outputs(run: &ResolvedRun, results: &[JobResult]) -> Result<(), CliError> {
    for r in results {
        write_csv(&run.csv_path(&r.job), &r.trajectory)?;
    }
    write_text(&run.summary_path(), &render_summary(run, results))?;
    write_text(&run.plot_path(), &render_plot_script(run))
}

/// Closed-form predictions of a run, without integrating.
pub fn render_prediction(run: &ResolvedRun) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "scenario = {}", quoted(run.scenario.name())).unwrap();
    for job in &run.jobs {
        let (rates, analysis) = crate::runner::predict(job)?;
        let r = JobResult {
            job: job.clone(),
            rates,
            trajectory: Trajectory::new(job.params.spin),
            bloch: None,
            analysis,
            warnings: Vec::new(),
        };
        write_job_header(&mut out, run, &r);
        let a = &r.analysis;
        entry(&mut out, "equilibrium_jz", &a.equilibrium, |e| value(e.jz_inf));
        entry(&mut out, "equilibrium_jx", &a.equilibrium, |e| value(e.jx_inf));
        entry(&mut out, "thermodynamic_jz", &a.thermodynamic, |e| value(e.jz_inf));
        entry(&mut out, "thermodynamic_jx", &a.thermodynamic, |e| value(e.jx_inf));
        entry(&mut out, "predicted_omega_0", &a.beat, |b| value(b.omega_0));
        entry(&mut out, "predicted_omega_b", &a.beat, |b| value(b.omega_b));
        entry(&mut out, "predicted_omega_b_ei", &a.beat_closed_form, |w| value(*w));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(format_float(0.5), "5.00000000000000e-1");
        assert_eq!(format_float(-1.0 / 3.0), "-3.33333333333333e-1");
        assert_eq!(format_float(0.0), "0.00000000000000e0");
        let x = std::f64::consts::PI * 1e-7;
        let back: f64 = format_float(x).parse().unwrap();
        assert!(((back - x) / x).abs() < 1e-14);
    }

    #[test]
    fn summary_values_are_toml_numbers() {
        for x in [0.0, 1.5, 1e-9, -3e8, 0.005, f64::NAN] {
            let text = format!("v = {}", value(x));
            let parsed: toml::Table = text.parse().unwrap();
            let back = parsed["v"].as_float().or(parsed["v"].as_integer().map(|i| i as f64)).unwrap();
            assert!(back == x || (x.is_nan() && back.is_nan()), "{text}");
        }
    }
}
