//! CRAB pulse parameterization and the quasi-Newton outer loop.
//!
//! Pulses are a fixed Gaussian envelope times a truncated sine series,
//! `u_i(t) = exp(-[(t - tau/2)/(2 sigma)]^2) * sum_k c_{i,k} sin(k pi t / tau)`,
//! which vanishes exactly at both endpoints. Only the coefficients are
//! optimized; frequencies are fixed at `nu_k = k pi / tau`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Shared CRAB shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrabParams {
    pub tau: f64,
    pub sigma: f64,
    pub n_modes: usize,
}

impl CrabParams {
    /// Standard shape: `sigma = tau/4`, `M = 10`.
    pub fn standard(tau: f64) -> Self {
        Self { tau, sigma: tau / 4.0, n_modes: 10 }
    }
}

/// CRAB coefficients for every control line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPulseSet {
    pub params: CrabParams,
    /// `coeffs[i][k-1]` is `c_{i,k}`.
    pub coeffs: Vec<Vec<f64>>,
}

impl ControlPulseSet {
    pub fn new(params: CrabParams, coeffs: Vec<Vec<f64>>) -> Result<Self, Error> {
        for line in &coeffs {
            if line.len() != params.n_modes {
                return Err(Error::InvalidParameter(format!(
                    "expected {} coefficients per line, got {}",
                    params.n_modes,
                    line.len()
                )));
            }
        }
        Ok(Self { params, coeffs })
    }

    pub fn zero(params: CrabParams, n_lines: usize) -> Self {
        let coeffs = vec![vec![0.0; params.n_modes]; n_lines];
        Self { params, coeffs }
    }

    pub fn n_lines(&self) -> usize {
        self.coeffs.len()
    }

    /// Pulse amplitude of control line `i` at time `t in [0, tau]`.
    pub fn value(&self, line: usize, t: f64) -> Result<f64, Error> {
        if !(0.0..=self.params.tau).contains(&t) {
            return Err(Error::PulseOutOfRange(t));
        }
        let p = &self.params;
        let env = (-((t - p.tau / 2.0) / (2.0 * p.sigma)).powi(2)).exp();
        let series: f64 = self.coeffs[line]
            .iter()
            .enumerate()
            .map(|(k, &ck)| ck * ((k + 1) as f64 * std::f64::consts::PI * t / p.tau).sin())
            .sum();
        Ok(env * series)
    }

    /// All line amplitudes at time `t`.
    pub fn values(&self, t: f64) -> Result<Vec<f64>, Error> {
        (0..self.n_lines()).map(|i| self.value(i, t)).collect()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.coeffs.iter().flatten().copied().collect()
    }

    pub fn from_flat(params: CrabParams, n_lines: usize, flat: &[f64]) -> Self {
        assert_eq!(flat.len(), n_lines * params.n_modes);
        let coeffs = flat
            .chunks(params.n_modes)
            .map(|ch| ch.to_vec())
            .collect();
        Self { params, coeffs }
    }

    /// Largest sampled amplitude over a grid of `n_samples` points.
    pub fn max_amplitude(&self, n_samples: usize) -> f64 {
        let mut best = 0.0_f64;
        for k in 0..=n_samples {
            let t = self.params.tau * k as f64 / n_samples as f64;
            for i in 0..self.n_lines() {
                best = best.max(self.value(i, t).unwrap().abs());
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub n_restarts: usize,
    /// Coefficients start uniform in `(-init_amplitude, +init_amplitude)`.
    pub init_amplitude: f64,
    pub max_iterations: usize,
    /// Central finite-difference step for gradients.
    pub gradient_step: f64,
    /// Stop when the objective improves by less than this between iterations.
    pub convergence_tol: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults scaled to the pulse duration: one Rabi-cycle amplitude.
    pub fn defaults_for(tau: f64) -> Self {
        let init = std::f64::consts::PI / tau;
        Self {
            n_restarts: 10,
            init_amplitude: init,
            max_iterations: 500,
            gradient_step: 1e-4 * init,
            convergence_tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub pulses: ControlPulseSet,
    pub objective: f64,
    pub j0: f64,
    pub d_eff: f64,
    pub c_weight: f64,
    /// Best-so-far objective after each iteration of the winning restart.
    pub trace: Vec<f64>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub restart_index: usize,
    pub max_amplitude: f64,
    pub n_evaluations: usize,
}

/// Central finite-difference gradient of `f` at `x`.
pub fn finite_difference_gradient<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(step > 0.0, "gradient step must be positive");
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += step;
            xm[i] -= step;
            (f(&xp) - f(&xm)) / (2.0 * step)
        })
        .collect()
}

/// One quasi-Newton (inverse-BFGS) descent from `x0`.
///
/// Returns `(x, f(x), best-so-far trace, evaluation count)`.
pub fn bfgs_minimize<F>(
    f: &F,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> (Vec<f64>, f64, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let p = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1usize;
    let mut trace = vec![fx];
    if !fx.is_finite() {
        return (x, fx, trace, evals);
    }
    let mut g = finite_difference_gradient(f, &x, cfg.gradient_step);
    evals += 2 * p;
    if g.iter().any(|v| !v.is_finite()) {
        // Objective is infinite in the FD neighborhood; nothing to do.
        return (x, fx, trace, evals);
    }
    // Inverse Hessian approximation.
    let mut h = vec![vec![0.0; p]; p];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let mut first_update = true;
    for _ in 0..cfg.max_iterations {
        // d = -H g
        let mut d = vec![0.0; p];
        for i in 0..p {
            let mut s = 0.0;
            for j in 0..p {
                s += h[i][j] * g[j];
            }
            d[i] = -s;
        }
        let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if gd >= 0.0 {
            // Not a descent direction; reset to steepest descent.
            for i in 0..p {
                d[i] = -g[i];
                for (j, row) in h.iter_mut().enumerate() {
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = if j == k { 1.0 } else { 0.0 };
                    }
                }
            }
        }
        let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();

        // Backtracking Armijo line search.
        // Cap the first trial step to the coefficient scale; with H = I
        // the raw Newton step can be wildly out of range before the
        // curvature estimate kicks in.
        let d_norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let step_cap = cfg.init_amplitude * (p as f64).sqrt();
        let mut alpha = if d_norm > step_cap { step_cap / d_norm } else { 1.0 };
        let mut accepted = false;
        let (mut x_new, mut f_new) = (x.clone(), fx);
        for _ in 0..30 {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let fc = f(&cand);
            evals += 1;
            if fc.is_finite() && fc <= fx + 1e-4 * alpha * gd {
                x_new = cand;
                f_new = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            trace.push(fx);
            break;
        }

        let g_new = finite_difference_gradient(f, &x_new, cfg.gradient_step);
        evals += 2 * p;
        if g_new.iter().any(|v| !v.is_finite()) {
            x = x_new;
            fx = f_new;
            trace.push(fx);
            break;
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            if first_update {
                // Shanno scaling of the initial inverse Hessian: brings
                // H to the right order of magnitude in one shot.
                let yy: f64 = y.iter().map(|v| v * v).sum();
                let scale = sy / yy;
                if scale.is_finite() && scale > 0.0 {
                    for (i, row) in h.iter_mut().enumerate() {
                        for (j, v) in row.iter_mut().enumerate() {
                            *v = if i == j { scale } else { 0.0 };
                        }
                    }
                }
                first_update = false;
            }
            // Inverse BFGS update: H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            let r = 1.0 / sy;
            let mut hy = vec![0.0; p];
            for i in 0..p {
                for j in 0..p {
                    hy[i] += h[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..p {
                for j in 0..p {
                    h[i][j] += -r * (s[i] * hy[j] + hy[i] * s[j])
                        + r * r * yhy * s[i] * s[j]
                        + r * s[i] * s[j];
                }
            }
        }

        let improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        trace.push(fx);
        if improvement.abs() < cfg.convergence_tol {
            break;
        }
    }
    (x, fx, trace, evals)
}

/// Multi-start quasi-Newton minimization of an objective over flat CRAB
/// coefficient vectors.
///
/// `objective` maps a coefficient vector to `(J, J0, D_eff)`. Restart `r`
/// draws its start point from a ChaCha stream seeded with `seed + r`, so
/// results are independent of evaluation order and reproducible.
pub fn optimize_pulses<F>(
    params: CrabParams,
    n_lines: usize,
    objective: &F,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult, Error>
where
    F: Fn(&ControlPulseSet) -> (f64, f64, f64) + Sync,
{
    let start = std::time::Instant::now();
    let dim = n_lines * params.n_modes;
    let scalar = |flat: &[f64]| -> f64 {
        let pulses = ControlPulseSet::from_flat(params, n_lines, flat);
        objective(&pulses).0
    };

    let runs: Vec<(usize, Vec<f64>, f64, Vec<f64>, usize)> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            // Restart ladder: cycle through decreasing amplitude scales
            // so the multi-start explores qualitatively different pulse
            // regimes, not just different phases of one regime.
            let scale = cfg.init_amplitude / 4f64.powi((r % 4) as i32);
            let x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-scale..scale)).collect();
            let (x, fx, trace, evals) = bfgs_minimize(&scalar, &x0, cfg);
            (r, x, fx, trace, evals)
        })
        .collect();

    let total_evals: usize = runs.iter().map(|r| r.4).sum();
    let best = runs
        .into_iter()
        .filter(|(_, _, fx, _, _)| fx.is_finite())
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.0.cmp(&b.0)))
        .ok_or_else(|| {
            Error::OptimizationFailed("all restarts produced non-finite objectives".into())
        })?;

    let (restart_index, x, _, raw_trace, _) = best;
    let pulses = ControlPulseSet::from_flat(params, n_lines, &x);
    let (j, j0, d_eff) = objective(&pulses);
    // Best-so-far is non-increasing by construction of the descent loop,
    // but enforce monotone reporting against line-search rejections.
    let mut trace = Vec::with_capacity(raw_trace.len());
    let mut best_so_far = f64::INFINITY;
    for v in raw_trace {
        best_so_far = best_so_far.min(v);
        trace.push(best_so_far);
    }
    let max_amplitude = pulses.max_amplitude(1000);
    Ok(OptimizationResult {
        pulses,
        objective: j,
        j0,
        d_eff,
        c_weight: if d_eff > 0.0 { (j - j0) / d_eff } else { 0.0 },
        trace,
        wall_time_s: start.elapsed().as_secs_f64(),
        seed: cfg.seed,
        restart_index,
        max_amplitude,
        n_evaluations: total_evals,
    })
}
