//! Serializable run artifacts: everything needed to re-plot the
//! benchmark figures without re-running the experiment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

use super::config::{ExperimentConfig, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Fidelity-only objective, `c = 0`.
    TargetOnly,
    /// Composite objective `J_0 + c D_eff`, `c > 0`.
    Robust,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::TargetOnly => "target-only",
            Strategy::Robust => "robust",
        })
    }
}

/// Which strategies a run should optimize and evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategySelection {
    TargetOnly,
    Robust,
    Both,
}

impl StrategySelection {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategySelection::TargetOnly => vec![Strategy::TargetOnly],
            StrategySelection::Robust => vec![Strategy::Robust],
            StrategySelection::Both => vec![Strategy::TargetOnly, Strategy::Robust],
        }
    }
}

impl FromStr for StrategySelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "target-only" => Ok(StrategySelection::TargetOnly),
            "robust" => Ok(StrategySelection::Robust),
            "both" => Ok(StrategySelection::Both),
            other => Err(Error::Config(format!(
                "unknown strategy '{other}' (expected target-only, robust, or both)"
            ))),
        }
    }
}

/// One optimized strategy: objective breakdown and the pulse data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub c_weight: f64,
    /// Best composite objective `J = J_0 + c D_eff` found.
    pub objective: f64,
    pub j0: f64,
    /// Sensitivity of the final pulses (computed even when `c = 0`).
    pub d_eff: f64,
    pub noise_free_fidelity: f64,
    pub restart_index: usize,
    pub n_evaluations: usize,
    pub optimizer_seed: u64,
    pub wall_time_s: f64,
    pub max_amplitude: f64,
    /// CRAB coefficients, one row per control line.
    pub pulse_coeffs: Vec<Vec<f64>>,
    /// Pulse values on the time grid: rows `[t, u_1, ..., u_n]`.
    pub pulse_samples: Vec<Vec<f64>>,
    /// Monotone best-objective-so-far trace.
    pub trace: Vec<f64>,
}

/// One noisy-fidelity evaluation. `realization` 0 is the specific
/// (deterministic) coupling; 1..ensemble_size index the random draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub lambda: f64,
    pub strategy: Strategy,
    pub noise_kind: NoiseKind,
    pub realization: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Specific,
    Random,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::Specific => "specific",
            NoiseKind::Random => "random",
        })
    }
}

/// One point of a Bloch-sphere trajectory (two-level tasks only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochSample {
    pub t: f64,
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
    pub strategy: Strategy,
}

/// Complete result of one `run` invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub task: TaskId,
    pub config: ExperimentConfig,
    pub crate_version: String,
    pub strategies: Vec<StrategyReport>,
    pub fidelity_rows: Vec<FidelityRow>,
    pub bloch: Vec<BlochSample>,
    /// `(1 - F_target_only) / (1 - F_robust)` for the specific channel at
    /// `lambda_max`; present only when both strategies ran.
    pub infidelity_ratio_at_lambda_max: Option<f64>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn strategy(&self, s: Strategy) -> Option<&StrategyReport> {
        self.strategies.iter().find(|r| r.strategy == s)
    }

    /// All fidelity rows matching the given filters.
    pub fn rows_at(&self, lambda: f64, strategy: Strategy, kind: NoiseKind) -> Vec<&FidelityRow> {
        self.fidelity_rows
            .iter()
            .filter(|r| r.strategy == strategy && r.noise_kind == kind && r.lambda == lambda)
            .collect()
    }

    pub fn mean_fidelity_at(&self, lambda: f64, strategy: Strategy, kind: NoiseKind) -> f64 {
        let rows = self.rows_at(lambda, strategy, kind);
        rows.iter().map(|r| r.fidelity).sum::<f64>() / rows.len().max(1) as f64
    }

    /// Finiteness sweep over every numeric field holding physics output.
    pub fn all_finite(&self) -> bool {
        self.strategies.iter().all(|s| {
            s.objective.is_finite()
                && s.j0.is_finite()
                && s.d_eff.is_finite()
                && s.noise_free_fidelity.is_finite()
                && s.pulse_coeffs.iter().flatten().all(|v| v.is_finite())
                && s.pulse_samples.iter().flatten().all(|v| v.is_finite())
        }) && self.fidelity_rows.iter().all(|r| r.fidelity.is_finite())
            && self
                .bloch
                .iter()
                .all(|b| b.rx.is_finite() && b.ry.is_finite() && b.rz.is_finite())
    }
}
