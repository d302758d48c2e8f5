//! Noise-free propagator on a time grid, continuous eigensystem tracking
//! with phase unwrapping, and the per-step jump-channel table.
//!
//! The propagator obeys `i dU/dt = H_S(t) U` with `U(0) = I`, integrated
//! piecewise-constant with midpoint-sampled controls. Its instantaneous
//! eigenstates `U |u_n> = exp(-i eps_n) |u_n>` define the jump channels
//! `F_(n,m) = |u_n><u_m|` with phases `phi = eps_n - eps_m` and Bohr
//! frequencies `omega = d phi / dt`.

use num_complex::Complex64;

use crate::crab::ControlPulseSet;
use crate::error::Error;
use crate::linalg::{c, eig_unitary, expm_hermitian, frobenius_norm, identity, CMat, CVec};

/// Uniform time grid over `[0, tau]` with `n_steps` steps
/// (`n_steps + 1` grid points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub tau: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, n_steps: usize) -> Result<Self, Error> {
        if !(tau > 0.0) || n_steps == 0 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs tau > 0 and n_steps > 0 (got tau = {tau}, n_steps = {n_steps})"
            )));
        }
        Ok(Self { tau, n_steps })
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.n_steps as f64
    }

    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        // Clamp against accumulated rounding at the last point.
        (k as f64 * self.dt()).min(self.tau)
    }
}

/// Drift plus control operators, all Hermitian and of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSystem {
    h0: CMat,
    controls: Vec<CMat>,
}

impl ControlSystem {
    pub fn new(h0: CMat, controls: Vec<CMat>) -> Result<Self, Error> {
        let n = h0.nrows();
        for m in std::iter::once(&h0).chain(controls.iter()) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.nrows().max(m.ncols()) });
            }
            let defect = crate::linalg::hermiticity_defect(m);
            if defect >= crate::linalg::HERMITICITY_TOL {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(Self { h0, controls })
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn drift(&self) -> &CMat {
        &self.h0
    }

    /// `H_S(t) = H_0 + sum_i u_i(t) H_i`.
    pub fn hamiltonian(&self, pulses: &ControlPulseSet, t: f64) -> Result<CMat, Error> {
        if pulses.n_lines() != self.controls.len() {
            return Err(Error::InvalidParameter(format!(
                "pulse set has {} lines but system has {} controls",
                pulses.n_lines(),
                self.controls.len()
            )));
        }
        let mut h = self.h0.clone();
        for (hi, line) in self.controls.iter().zip(0..) {
            let u = pulses.value(line, t)?;
            h += hi.map(|z| z * u);
        }
        Ok(h)
    }

    /// Midpoint-sampled Hamiltonians `H_S(t_k + dt/2)` for every step.
    pub fn midpoint_hamiltonians(
        &self,
        pulses: &ControlPulseSet,
        grid: &TimeGrid,
    ) -> Result<Vec<CMat>, Error> {
        let dt = grid.dt();
        (0..grid.n_steps)
            .map(|k| self.hamiltonian(pulses, (k as f64 + 0.5) * dt))
            .collect()
    }
}

/// A degenerate overlap encountered during eigenvector matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyWarning {
    pub step: usize,
    pub track_index: usize,
    pub overlap_gap: f64,
}

#[derive(Debug, Clone)]
pub struct EigenTrack {
    /// `eps[k][n]`: unwrapped eigenphase of track `n` at grid point `k`.
    pub eps: Vec<Vec<f64>>,
    /// `vecs[k][n]`: eigenvector of track `n` at grid point `k`.
    pub vecs: Vec<Vec<CVec>>,
    pub warnings: Vec<DegeneracyWarning>,
}

/// Propagator samples on a time grid, optionally with a tracked
/// eigensystem.
#[derive(Debug, Clone)]
pub struct PropagatorTrack {
    pub grid: TimeGrid,
    /// `us[k] = U_S(t_k)`, `us[0] = I`.
    pub us: Vec<CMat>,
    pub eigen: Option<EigenTrack>,
}

impl PropagatorTrack {
    pub fn dim(&self) -> usize {
        self.us[0].nrows()
    }

    pub fn final_unitary(&self) -> &CMat {
        self.us.last().unwrap()
    }

    pub fn eigen(&self) -> &EigenTrack {
        self.eigen.as_ref().expect("eigensystem not tracked; call track_eigensystem")
    }
}

/// Propagate `U_0 = I`, `U_{k+1} = exp(-i H(t_{k+1/2}) dt) U_k`.
///
/// Fails if `dt * max ||H||` reaches 0.5 (step-accuracy guard).
pub fn propagate_unitary(
    sys: &ControlSystem,
    pulses: &ControlPulseSet,
    grid: &TimeGrid,
) -> Result<PropagatorTrack, Error> {
    let hs = sys.midpoint_hamiltonians(pulses, grid)?;
    propagate_from_hamiltonians(&hs, grid)
}

pub(crate) fn propagate_from_hamiltonians(
    hs: &[CMat],
    grid: &TimeGrid,
) -> Result<PropagatorTrack, Error> {
    let dt = grid.dt();
    let n = hs[0].nrows();
    let max_norm = hs.iter().map(frobenius_norm).fold(0.0, f64::max);
    // Written as a negated `<` so NaN norms are rejected too.
    if !(dt * max_norm < 0.5) {
        return Err(Error::GridAccuracy(dt * max_norm));
    }
    let mut us = Vec::with_capacity(grid.n_points());
    us.push(identity(n));
    for h in hs {
        let step = expm_hermitian(h, c(0.0, -dt));
        us.push(&step * us.last().unwrap());
    }
    Ok(PropagatorTrack { grid: *grid, us, eigen: None })
}

const DEGENERACY_GAP: f64 = 1e-6;

/// Diagonalize every propagator sample and stitch the eigensystems into
/// continuous tracks.
///
/// Eigenvectors at step `k+1` are matched to step `k` by greedy maximal
/// overlap; eigenphases are unwrapped so `|d eps| < pi` per step; the
/// global phase of each eigenvector is fixed so consecutive overlaps are
/// real and nonnegative. The fully degenerate point `U(0) = I` takes its
/// basis from step 1.
pub fn track_eigensystem(track: &mut PropagatorTrack) -> Result<(), Error> {
    let n_pts = track.us.len();
    let dim = track.dim();
    let mut eps: Vec<Vec<f64>> = vec![vec![0.0; dim]; n_pts];
    let mut vecs: Vec<Vec<CVec>> = Vec::with_capacity(n_pts);
    let mut warnings = Vec::new();

    // Step 1 seeds the labeling (step 0 is fully degenerate).
    let (vals1, mut vecs1) = eig_unitary(&track.us[1])?;
    let mut phases1: Vec<f64> = vals1.iter().map(|l| -l.arg()).collect();
    // Deterministic initial order: ascending phase.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| phases1[a].partial_cmp(&phases1[b]).unwrap());
    phases1 = order.iter().map(|&i| phases1[i]).collect();
    vecs1 = order.iter().map(|&i| vecs1[i].clone()).collect();

    vecs.push(vecs1.clone()); // step 0: back-propagated basis, eps = 0
    vecs.push(vecs1);
    eps[1] = phases1;

    for k in 2..n_pts {
        let (vals, new_vecs) = eig_unitary(&track.us[k])?;
        let new_phases: Vec<f64> = vals.iter().map(|l| -l.arg()).collect();
        let prev = &vecs[k - 1];

        let mut used = vec![false; dim];
        let mut matched_vecs: Vec<CVec> = Vec::with_capacity(dim);
        let mut matched_eps = vec![0.0; dim];
        for n in 0..dim {
            // Greedy best-overlap assignment with lowest-index tie-break.
            let overlaps: Vec<(usize, f64)> = new_vecs
                .iter()
                .enumerate()
                .filter(|(m, _)| !used[*m])
                .map(|(m, v)| (m, prev[n].dotc(v).norm()))
                .collect();
            if overlaps.is_empty() {
                return Err(Error::EigFailure);
            }
            let top = overlaps.iter().map(|&(_, ov)| ov).fold(-1.0, f64::max);
            // Lowest index among candidates within the ambiguity gap.
            let best_m = overlaps
                .iter()
                .filter(|&&(_, ov)| top - ov < DEGENERACY_GAP)
                .map(|&(m, _)| m)
                .min()
                .unwrap();
            let second = overlaps
                .iter()
                .filter(|&&(m, _)| m != best_m)
                .map(|&(_, ov)| ov)
                .fold(-1.0, f64::max);
            if second >= 0.0 && top - second < DEGENERACY_GAP {
                warnings.push(DegeneracyWarning {
                    step: k,
                    track_index: n,
                    overlap_gap: top - second,
                });
            }
            used[best_m] = true;

            // Unwrap the phase to within pi of the previous value.
            let prev_eps = eps[k - 1][n];
            let theta = new_phases[best_m];
            let wraps = ((prev_eps - theta) / std::f64::consts::TAU).round();
            matched_eps[n] = theta + std::f64::consts::TAU * wraps;

            // Fix the global phase: consecutive overlap real nonnegative.
            let z = prev[n].dotc(&new_vecs[best_m]);
            let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { c(1.0, 0.0) };
            matched_vecs.push(new_vecs[best_m].map(|x| x * phase));
        }
        eps[k] = matched_eps;
        vecs.push(matched_vecs);
    }

    track.eigen = Some(EigenTrack { eps, vecs, warnings });
    Ok(())
}

/// One jump channel at one grid point: `F = |u_n><u_m|`, its phase
/// `phi = eps_n - eps_m` and Bohr frequency `omega = d phi / dt`.
#[derive(Debug, Clone)]
pub struct ChannelEntry {
    pub n: usize,
    pub m: usize,
    pub f: CMat,
    pub phi: f64,
    pub omega: f64,
}

/// All `N^2` ordered-pair channels at every grid point.
#[derive(Debug, Clone)]
pub struct JumpChannelTable {
    pub dim: usize,
    pub grid: TimeGrid,
    /// `steps[k][n * dim + m]`.
    pub steps: Vec<Vec<ChannelEntry>>,
}

impl JumpChannelTable {
    pub fn channel(&self, k: usize, n: usize, m: usize) -> &ChannelEntry {
        &self.steps[k][n * self.dim + m]
    }
}

/// Build the jump-channel table from a tracked propagator.
///
/// `omega` is a second-order finite difference of the unwrapped phases:
/// central in the interior, one-sided (three-point) at the endpoints.
pub fn build_jump_channels(
    track: &PropagatorTrack,
    grid: &TimeGrid,
) -> Result<JumpChannelTable, Error> {
    if track.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let eigen = track
        .eigen
        .as_ref()
        .ok_or(Error::InvalidParameter("eigensystem not tracked".into()))?;
    let dim = track.dim();
    let n_pts = grid.n_points();
    let dt = grid.dt();

    // phi[k] for pair (n, m), then differentiate.
    let phi_at = |k: usize, n: usize, m: usize| eigen.eps[k][n] - eigen.eps[k][m];
    let omega_at = |k: usize, n: usize, m: usize| -> f64 {
        if n_pts < 3 {
            return (phi_at(n_pts - 1, n, m) - phi_at(0, n, m)) / ((n_pts - 1) as f64 * dt);
        }
        if k == 0 {
            (-3.0 * phi_at(0, n, m) + 4.0 * phi_at(1, n, m) - phi_at(2, n, m)) / (2.0 * dt)
        } else if k == n_pts - 1 {
            (3.0 * phi_at(k, n, m) - 4.0 * phi_at(k - 1, n, m) + phi_at(k - 2, n, m))
                / (2.0 * dt)
        } else {
            (phi_at(k + 1, n, m) - phi_at(k - 1, n, m)) / (2.0 * dt)
        }
    };

    let mut steps = Vec::with_capacity(n_pts);
    for k in 0..n_pts {
        let mut entries = Vec::with_capacity(dim * dim);
        for n in 0..dim {
            for m in 0..dim {
                let un = &eigen.vecs[k][n];
                let um = &eigen.vecs[k][m];
                let f = CMat::from_fn(dim, dim, |i, j| un[i] * um[j].conj());
                entries.push(ChannelEntry {
                    n,
                    m,
                    f,
                    phi: phi_at(k, n, m),
                    omega: omega_at(k, n, m),
                });
            }
        }
        steps.push(entries);
    }
    Ok(JumpChannelTable { dim, grid: *grid, steps })
}

/// Reconstruct `U_k` from the tracked eigensystem (diagnostic).
pub fn eigen_reconstruction(track: &PropagatorTrack, k: usize) -> CMat {
    let eigen = track.eigen();
    let dim = track.dim();
    let mut rec = CMat::zeros(dim, dim);
    for n in 0..dim {
        let lam = Complex64::from_polar(1.0, -eigen.eps[k][n]);
        let v = &eigen.vecs[k][n];
        for i in 0..dim {
            for j in 0..dim {
                rec[(i, j)] += lam * v[i] * v[j].conj();
            }
        }
    }
    rec
}
