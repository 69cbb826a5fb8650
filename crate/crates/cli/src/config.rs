//! Run configuration, scenario presets and their resolution into jobs.
//!
//! All physical quantities are in units of the tunnelling element `T_c`
//! (`ħ = k_B = 1`), so the presets assume `tc = 1`.

use std::fmt;
use std::path::{Path, PathBuf};

use largespin::bath::BathSpec;
use largespin::dynamics::TimeGrid;
use largespin::spin::{SpinSize, SystemParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    FreeRun,
    Figure1a,
    Figure1c,
    Figure2,
    Figure3,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::FreeRun,
        Scenario::Figure1a,
        Scenario::Figure1c,
        Scenario::Figure2,
        Scenario::Figure3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FreeRun => "free-run",
            Scenario::Figure1a => "figure1a",
            Scenario::Figure1c => "figure1c",
            Scenario::Figure2 => "figure2",
            Scenario::Figure3 => "figure3",
        }
    }

    pub fn preset(self) -> &'static Preset {
        PRESETS.iter().find(|p| p.scenario == self).expect("every scenario has a preset")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `|J, M = J⟩`, so `⟨J_z⟩₀ = J`.
    ZUp,
    /// Fully polarized along x, `⟨J_x⟩₀ = J`.
    XUp,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::ZUp => "z-up",
            InitialState::XUp => "x-up",
        }
    }
}

/// Fixed parameter set of a scenario. Sweeps list more than one spin or
/// coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub scenario: Scenario,
    pub source: &'static str,
    pub two_js: &'static [u32],
    pub epsilon: f64,
    pub alphas: &'static [f64],
    pub omega_c: f64,
    pub temperature: f64,
    pub t_end: f64,
    pub dt: f64,
    pub initial_state: InitialState,
}

pub const PRESETS: [Preset; 5] = [
    Preset {
        scenario: Scenario::FreeRun,
        source: "uncoupled spin 1/2",
        two_js: &[1],
        epsilon: 0.0,
        alphas: &[0.0],
        omega_c: 50.0,
        temperature: 0.0,
        t_end: 20.0,
        dt: 0.002,
        initial_state: InitialState::ZUp,
    },
    Preset {
        scenario: Scenario::Figure1a,
        source: "Fig. 1a/b, biased spin 1/2 at finite temperature",
        two_js: &[1],
        epsilon: 1.0,
        alphas: &[0.05],
        omega_c: 50.0,
        temperature: 2.0,
        t_end: 20.0,
        dt: 0.002,
        initial_state: InitialState::ZUp,
    },
    Preset {
        scenario: Scenario::Figure1c,
        source: "Fig. 1c/d, unbiased spin 1/2 at zero temperature",
        two_js: &[1],
        epsilon: 0.0,
        alphas: &[0.05],
        omega_c: 50.0,
        temperature: 0.0,
        t_end: 20.0,
        dt: 0.002,
        initial_state: InitialState::ZUp,
    },
    Preset {
        scenario: Scenario::Figure2,
        source: "Fig. 2, superradiant decay of J_z/J",
        two_js: &[1, 4, 10, 20],
        epsilon: 10.0,
        alphas: &[0.005],
        omega_c: 50.0,
        temperature: 1.0,
        t_end: 150.0,
        dt: 0.002,
        initial_state: InitialState::ZUp,
    },
    Preset {
        scenario: Scenario::Figure3,
        source: "Fig. 3, quantum beats of an unbiased spin 1",
        two_js: &[2],
        epsilon: 0.0,
        alphas: &[0.0025, 0.005, 0.01, 0.025],
        omega_c: 50.0,
        temperature: 0.0,
        t_end: 100.0,
        dt: 0.001,
        initial_state: InitialState::ZUp,
    },
];

/// Spin size as written in a config file: `"1/2"`, `"2.5"` or a bare number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpinField {
    Text(String),
    Integer(u32),
    Float(f64),
}

impl SpinField {
    fn parse(&self) -> Result<SpinSize, CliError> {
        let text = match self {
            SpinField::Text(s) => s.clone(),
            SpinField::Integer(n) => n.to_string(),
            SpinField::Float(x) => x.to_string(),
        };
        SpinSize::parse(&text).map_err(|e| CliError::config(format!("spin: {e}")))
    }
}

/// Partial configuration. Unset fields fall back to the scenario preset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub spin: Option<SpinField>,
    pub epsilon: Option<f64>,
    pub tc: Option<f64>,
    pub alpha: Option<f64>,
    pub omega_c: Option<f64>,
    pub temperature: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub sample_every: Option<usize>,
    pub initial_state: Option<InitialState>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn overridden_by(self, other: RunConfig) -> RunConfig {
        RunConfig {
            scenario: other.scenario.or(self.scenario),
            spin: other.spin.or(self.spin),
            epsilon: other.epsilon.or(self.epsilon),
            tc: other.tc.or(self.tc),
            alpha: other.alpha.or(self.alpha),
            omega_c: other.omega_c.or(self.omega_c),
            temperature: other.temperature.or(self.temperature),
            t_end: other.t_end.or(self.t_end),
            dt: other.dt.or(self.dt),
            sample_every: other.sample_every.or(self.sample_every),
            initial_state: other.initial_state.or(self.initial_state),
            output: other.output.or(self.output),
        }
    }

    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let scenario = self.scenario.unwrap_or(Scenario::FreeRun);
        let preset = scenario.preset();

        let spins = match &self.spin {
            Some(field) => vec![field.parse()?],
            None => preset
                .two_js
                .iter()
                .map(|&n| SpinSize::from_two_j(n))
                .collect::<largespin::Result<_>>()?,
        };
        let alphas = match self.alpha {
            Some(a) => vec![a],
            None => preset.alphas.to_vec(),
        };
        let tc = self.tc.unwrap_or(1.0);
        let epsilon = self.epsilon.unwrap_or(preset.epsilon);
        let omega_c = self.omega_c.unwrap_or(preset.omega_c);
        let temperature = self.temperature.unwrap_or(preset.temperature);
        let t_end = self.t_end.unwrap_or(preset.t_end);
        let dt = self.dt.unwrap_or(preset.dt);
        let initial_state = self.initial_state.unwrap_or(preset.initial_state);
        let grid = TimeGrid::new(t_end, dt, self.sample_every)?;

        let mut jobs = Vec::new();
        for &spin in &spins {
            for &alpha in &alphas {
                let params = SystemParams::new(spin, epsilon, tc)?;
                let bath = BathSpec::new(alpha, omega_c, temperature)?;
                grid.check_resolution(params.delta())?;
                let label = match (spins.len() > 1, alphas.len() > 1) {
                    (true, _) => format!("J{}", spin.to_string().replace('/', "_")),
                    (false, true) => format!("alpha{alpha}"),
                    (false, false) => "run".to_string(),
                };
                jobs.push(Job { label, params, bath, grid, initial_state });
            }
        }

        let output = self
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(scenario.name()));
        Ok(ResolvedRun { scenario, jobs, output })
    }
}

/// One trajectory to integrate.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub label: String,
    pub params: SystemParams,
    pub bath: BathSpec,
    pub grid: TimeGrid,
    pub initial_state: InitialState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub jobs: Vec<Job>,
    /// Prefix every output path derives from.
    pub output: PathBuf,
}

impl ResolvedRun {
    fn with_suffix(&self, suffix: &str) -> PathBuf {
        let mut name = self.output.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(suffix);
        self.output.with_file_name(name)
    }

    pub fn csv_path(&self, job: &Job) -> PathBuf {
        self.with_suffix(&format!("_{}.csv", job.label))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.with_suffix("_summary.txt")
    }

    pub fn plot_path(&self) -> PathBuf {
        self.with_suffix(".gp")
    }
}

/// Human-readable table of every preset.
pub fn list_scenarios() -> String {
    let mut out = String::new();
    for p in &PRESETS {
        let spins: Vec<String> = p
            .two_js
            .iter()
            .map(|&n| SpinSize::from_two_j(n).map(|s| s.to_string()).unwrap_or_default())
            .collect();
        let alphas: Vec<String> = p.alphas.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("{}\n", p.scenario));
        out.push_str(&format!("  source        {}\n", p.source));
        out.push_str(&format!("  J             {}\n", spins.join(", ")));
        out.push_str(&format!("  epsilon       {} T_c\n", p.epsilon));
        out.push_str(&format!("  alpha         {}\n", alphas.join(", ")));
        out.push_str(&format!("  omega_c       {} T_c\n", p.omega_c));
        out.push_str(&format!("  temperature   {} T_c\n", p.temperature));
        out.push_str(&format!("  t_end         {} / T_c\n", p.t_end));
        out.push_str(&format!("  dt            {} / T_c\n", p.dt));
        out.push_str(&format!("  initial       {}\n", p.initial_state.name()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure2_sweeps_spins() {
        let cfg = RunConfig { scenario: Some(Scenario::Figure2), ..Default::default() };
        let run = cfg.resolve().unwrap();
        let two_js: Vec<u32> = run.jobs.iter().map(|j| j.params.spin.two_j()).collect();
        assert_eq!(two_js, [1, 4, 10, 20]);
        for job in &run.jobs {
            assert_eq!(job.params.epsilon, 10.0);
            assert_eq!(job.bath.alpha, 0.005);
            assert_eq!(job.bath.omega_c, 50.0);
            assert_eq!(job.bath.temperature, 1.0);
        }
        assert_eq!(run.jobs[0].label, "J1_2");
    }

    #[test]
    fn figure3_sweeps_alpha_unless_set() {
        let cfg = RunConfig { scenario: Some(Scenario::Figure3), ..Default::default() };
        let alphas: Vec<f64> = cfg.resolve().unwrap().jobs.iter().map(|j| j.bath.alpha).collect();
        assert_eq!(alphas, [0.0025, 0.005, 0.01, 0.025]);
        let cfg = RunConfig { alpha: Some(0.01), ..cfg };
        let run = cfg.resolve().unwrap();
        assert_eq!(run.jobs.len(), 1);
        assert_eq!(run.jobs[0].bath.alpha, 0.01);
        assert_eq!(run.jobs[0].params.spin.two_j(), 2);
    }

    #[test]
    fn negative_alpha_names_the_field() {
        let cfg = RunConfig { alpha: Some(-0.1), ..Default::default() };
        let err = cfg.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml_str("scenario = \"figure2\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn spin_accepts_several_spellings() {
        for (text, two_j) in [("spin = \"1/2\"", 1), ("spin = 2", 4), ("spin = 2.5", 5), ("spin = \"10\"", 20)] {
            let cfg = RunConfig::from_toml_str(text).unwrap();
            assert_eq!(cfg.resolve().unwrap().jobs[0].params.spin.two_j(), two_j, "{text}");
        }
    }

    #[test]
    fn explicit_fields_override_file() {
        let file = RunConfig::from_toml_str("scenario = \"figure1a\"\nalpha = 0.2\n").unwrap();
        let flags = RunConfig { alpha: Some(0.01), ..Default::default() };
        let run = file.overridden_by(flags).resolve().unwrap();
        assert_eq!(run.scenario, Scenario::Figure1a);
        assert_eq!(run.jobs[0].bath.alpha, 0.01);
        assert_eq!(run.jobs[0].bath.temperature, 2.0);
    }

    #[test]
    fn paths_derive_from_prefix() {
        let cfg = RunConfig {
            scenario: Some(Scenario::Figure2),
            output: Some(PathBuf::from("res/fig2")),
            ..Default::default()
        };
        let run = cfg.resolve().unwrap();
        assert_eq!(run.csv_path(&run.jobs[3]), PathBuf::from("res/fig2_J10.csv"));
        assert_eq!(run.summary_path(), PathBuf::from("res/fig2_summary.txt"));
        assert_eq!(run.plot_path(), PathBuf::from("res/fig2.gp"));
    }

    #[test]
    fn coarse_step_is_rejected() {
        let cfg = RunConfig { scenario: Some(Scenario::Figure2), dt: Some(0.05), ..Default::default() };
        assert!(cfg.resolve().unwrap_err().to_string().contains("dt"));
    }

    #[test]
    fn listing_is_stable_and_complete() {
        let a = list_scenarios();
        assert_eq!(a, list_scenarios());
        for s in Scenario::ALL {
            assert!(a.contains(s.name()));
        }
        let fig1c = &a[a.find("figure1c").unwrap()..a.find("figure2").unwrap()];
        assert!(fig1c.contains("epsilon       0 T_c"));
        assert!(fig1c.contains("temperature   0 T_c"));
        let fig2 = &a[a.find("figure2").unwrap()..a.find("figure3").unwrap()];
        assert!(fig2.contains("epsilon       10 T_c"));
    }
}
