//! Experiment configuration: flat key-value files (TOML syntax), strict
//! about unknown keys, with per-task defaults following the benchmark
//! parameter set (Delta = 3e-3 a.u., beta = 1/Delta, omega_c ten times
//! the typical Bohr frequency, tau = 1000 a.u.).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::crab::OptimizerConfig;
use crate::dynamics::TimeGrid;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskId {
    /// Two-level state transfer `rho_{-x} -> rho_{+x}`.
    Transfer2,
    /// Single-qubit Hadamard gate.
    Hadamard,
    /// Two-qubit controlled-Z gate.
    Cz,
}

impl TaskId {
    pub fn dim(self) -> usize {
        match self {
            TaskId::Transfer2 | TaskId::Hadamard => 2,
            TaskId::Cz => 4,
        }
    }

    /// Typical Bohr frequency of the bare drift, setting the bath cutoff.
    pub fn bohr_scale(self, delta: f64) -> f64 {
        match self {
            TaskId::Transfer2 | TaskId::Hadamard => delta,
            // Drift Delta sz (x) sz has levels {+-Delta}; gap 2 Delta.
            TaskId::Cz => 2.0 * delta,
        }
    }

    pub fn default_c_weight(self) -> f64 {
        match self {
            TaskId::Transfer2 | TaskId::Hadamard => 1e-2,
            TaskId::Cz => 2e-3,
        }
    }

    /// Default CRAB coefficient range, tied to the bath cutoff so random
    /// starts actually reach the strongly dissipative frequency band.
    /// (The CZ controls carry no 1/2 factor and there are four of them,
    /// hence the smaller factor.)
    pub fn default_init_amplitude(self, omega_c: f64) -> f64 {
        match self {
            TaskId::Transfer2 | TaskId::Hadamard => 2.0 * omega_c,
            TaskId::Cz => 0.5 * omega_c,
        }
    }

    pub fn default_max_iterations(self) -> usize {
        match self {
            TaskId::Transfer2 | TaskId::Hadamard => 200,
            TaskId::Cz => 60,
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskId::Transfer2 => "transfer2",
            TaskId::Hadamard => "hadamard",
            TaskId::Cz => "cz",
        })
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "transfer2" => Ok(TaskId::Transfer2),
            "hadamard" => Ok(TaskId::Hadamard),
            "cz" => Ok(TaskId::Cz),
            other => Err(Error::Config(format!(
                "unknown task '{other}' (expected transfer2, hadamard, or cz)"
            ))),
        }
    }
}

/// Raw config file: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: Option<String>,
    /// Drift energy splitting, a.u.
    delta: Option<f64>,
    /// Inverse temperature, a.u.
    beta: Option<f64>,
    /// Bath cutoff frequency, a.u.
    omega_c: Option<f64>,
    /// Protocol duration, a.u.
    tau: Option<f64>,
    n_steps: Option<usize>,
    /// Robustness weight for the robust strategy.
    c_weight: Option<f64>,
    lambda_max: Option<f64>,
    n_lambda: Option<usize>,
    ensemble_size: Option<usize>,
    seed: Option<u64>,
    n_restarts: Option<usize>,
    max_iterations: Option<usize>,
    init_amplitude: Option<f64>,
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: TaskId,
    pub delta: f64,
    pub beta: f64,
    pub omega_c: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub c_weight: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    pub n_restarts: usize,
    pub max_iterations: usize,
    pub init_amplitude: f64,
}

impl ExperimentConfig {
    pub fn defaults(task: TaskId) -> Self {
        let delta = 3e-3;
        let omega_c = 10.0 * task.bohr_scale(delta);
        Self {
            task,
            delta,
            beta: 1.0 / delta,
            omega_c,
            tau: 1000.0,
            n_steps: 500,
            c_weight: task.default_c_weight(),
            lambda_max: 0.1,
            n_lambda: 21,
            ensemble_size: 20,
            seed: 2024,
            n_restarts: 4,
            max_iterations: task.default_max_iterations(),
            init_amplitude: task.default_init_amplitude(omega_c),
        }
    }

    /// Parse a flat key-value config on top of the task defaults.
    /// Unknown keys and a conflicting in-file `task` are errors; a
    /// `Some(seed)` override wins over the file.
    pub fn from_str(text: &str, task: TaskId, seed_override: Option<u64>) -> Result<Self, Error> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        if let Some(file_task) = &raw.task {
            let parsed: TaskId = file_task.parse()?;
            if parsed != task {
                return Err(Error::Config(format!(
                    "config file sets task = {parsed} but {task} was requested"
                )));
            }
        }
        let mut cfg = Self::defaults(task);
        if let Some(delta) = raw.delta {
            cfg.delta = delta;
            // Dependent defaults re-derive unless explicitly set below.
            cfg.beta = 1.0 / delta;
            cfg.omega_c = 10.0 * task.bohr_scale(delta);
        }
        if let Some(v) = raw.beta {
            cfg.beta = v;
        }
        if let Some(v) = raw.omega_c {
            cfg.omega_c = v;
        }
        cfg.init_amplitude = task.default_init_amplitude(cfg.omega_c);
        if let Some(v) = raw.tau {
            cfg.tau = v;
        }
        if let Some(v) = raw.n_steps {
            cfg.n_steps = v;
        }
        if let Some(v) = raw.c_weight {
            cfg.c_weight = v;
        }
        if let Some(v) = raw.lambda_max {
            cfg.lambda_max = v;
        }
        if let Some(v) = raw.n_lambda {
            cfg.n_lambda = v;
        }
        if let Some(v) = raw.ensemble_size {
            cfg.ensemble_size = v;
        }
        if let Some(v) = raw.seed {
            cfg.seed = v;
        }
        if let Some(v) = raw.n_restarts {
            cfg.n_restarts = v;
        }
        if let Some(v) = raw.max_iterations {
            cfg.max_iterations = v;
        }
        if let Some(v) = raw.init_amplitude {
            cfg.init_amplitude = v;
        }
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, task: TaskId, seed_override: Option<u64>) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_str(&text, task, seed_override)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positives = [
            ("delta", self.delta),
            ("beta", self.beta),
            ("omega_c", self.omega_c),
            ("tau", self.tau),
            ("init_amplitude", self.init_amplitude),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive and finite")));
            }
        }
        if !(self.c_weight >= 0.0 && self.c_weight.is_finite()) {
            return Err(Error::Config(format!(
                "c_weight = {} must be nonnegative",
                self.c_weight
            )));
        }
        if !(self.lambda_max >= 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::Config(format!(
                "lambda_max = {} must be nonnegative",
                self.lambda_max
            )));
        }
        if self.n_steps == 0 || self.n_lambda == 0 || self.n_restarts == 0 {
            return Err(Error::Config(
                "n_steps, n_lambda, and n_restarts must all be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Ascending coupling-strength grid `[0, lambda_max]`.
    pub fn lambda_grid(&self) -> Vec<f64> {
        if self.n_lambda == 1 {
            return vec![0.0];
        }
        (0..self.n_lambda)
            .map(|i| self.lambda_max * i as f64 / (self.n_lambda - 1) as f64)
            .collect()
    }

    pub fn bath(&self) -> Result<BathSpec, Error> {
        BathSpec::for_drift_scale(self.omega_c, self.beta, self.task.bohr_scale(self.delta))
    }

    pub fn grid(&self) -> Result<TimeGrid, Error> {
        TimeGrid::new(self.tau, self.n_steps)
    }

    pub fn optimizer(&self, seed_offset: u64) -> OptimizerConfig {
        let mut opt = OptimizerConfig::defaults_for(self.tau);
        opt.n_restarts = self.n_restarts;
        opt.max_iterations = self.max_iterations;
        opt.init_amplitude = self.init_amplitude;
        opt.gradient_step = 1e-4 * self.init_amplitude;
        opt.seed = self.seed.wrapping_add(seed_offset);
        opt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_benchmark_parameters() {
        let cfg = ExperimentConfig::defaults(TaskId::Transfer2);
        assert_eq!(cfg.delta, 3e-3);
        assert_eq!(cfg.beta, 1.0 / 3e-3);
        assert_eq!(cfg.omega_c, 3e-2);
        assert_eq!(cfg.tau, 1000.0);
        assert_eq!(cfg.n_steps, 500);
        assert_eq!(cfg.c_weight, 1e-2);
        assert_eq!(cfg.ensemble_size, 20);
        let cz = ExperimentConfig::defaults(TaskId::Cz);
        assert_eq!(cz.c_weight, 2e-3);
        assert_eq!(cz.omega_c, 10.0 * 2.0 * 3e-3);
    }

    #[test]
    fn parses_flat_keys_and_rejects_unknown() {
        let cfg =
            ExperimentConfig::from_str("tau = 800.0\nn_steps = 250\nseed = 7\n", TaskId::Hadamard, None)
                .unwrap();
        assert_eq!(cfg.tau, 800.0);
        assert_eq!(cfg.n_steps, 250);
        assert_eq!(cfg.seed, 7);
        let err = ExperimentConfig::from_str("taau = 800.0\n", TaskId::Hadamard, None);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn task_key_must_agree_and_seed_override_wins() {
        assert!(ExperimentConfig::from_str("task = \"cz\"\n", TaskId::Hadamard, None).is_err());
        let cfg =
            ExperimentConfig::from_str("task = \"cz\"\nseed = 3\n", TaskId::Cz, Some(99)).unwrap();
        assert_eq!(cfg.seed, 99);
    }

    #[test]
    fn delta_rederives_dependent_defaults() {
        let cfg = ExperimentConfig::from_str("delta = 1e-2\n", TaskId::Transfer2, None).unwrap();
        assert_eq!(cfg.beta, 100.0);
        assert_eq!(cfg.omega_c, 0.1);
        // Explicit values win over the derivation.
        let cfg =
            ExperimentConfig::from_str("delta = 1e-2\nbeta = 5.0\n", TaskId::Transfer2, None).unwrap();
        assert_eq!(cfg.beta, 5.0);
    }

    #[test]
    fn lambda_grid_is_ascending_and_bracketed() {
        let cfg = ExperimentConfig::defaults(TaskId::Transfer2);
        let grid = cfg.lambda_grid();
        assert_eq!(grid.len(), 21);
        assert_eq!(grid[0], 0.0);
        assert_eq!(*grid.last().unwrap(), 0.1);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation_rejects_nonpositive_parameters() {
        let mut cfg = ExperimentConfig::defaults(TaskId::Transfer2);
        cfg.tau = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::defaults(TaskId::Transfer2);
        cfg.n_lambda = 0;
        assert!(cfg.validate().is_err());
    }
}
