//! The universal noise-sensitivity metric: the Frobenius norm of the
//! time-integrated, rate-weighted, interaction-frame channel
//! superoperators. It depends only on the control-dressed channel
//! structure, never on the system-bath coupling operator.
//!
//! For the eigenoperator channels `F = |u_n><u_m|` the interaction-frame
//! transform `U_s^dag F_super U_s` (with `U_s = U (x) U^*`) acts as the
//! identity: `U^dag F U = exp(i phi) F` and the phases cancel inside the
//! sandwich and anticommutator blocks. The accumulation below uses that
//! closed form; the equivalence with the explicit similarity transform is
//! asserted in the tests.

use crate::bath::{rate_gamma, BathSpec};
use crate::dynamics::{JumpChannelTable, PropagatorTrack, TimeGrid};
use crate::error::Error;
use crate::linalg::{frobenius_norm, CMat};
use crate::lindblad::dissipator_superop;

/// Output of [`compute_d_eff`].
#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub d_eff: f64,
    /// The accumulated channel integral for the (single) bath
    /// correlation function; `d_eff = ||f_matrix||`.
    pub f_matrix: CMat,
    /// `|| sum_j gamma_j F_super_j ||` at each grid point.
    pub integrand_norms: Vec<f64>,
}

/// Similarity transform into the interaction frame of the vectorized
/// unitary propagator: `U_super^dag F_super U_super`.
pub fn interaction_frame_channel(u_super: &CMat, f_super: &CMat) -> Result<CMat, Error> {
    if u_super.nrows() != f_super.nrows() || u_super.ncols() != f_super.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u_super.nrows(),
            got: f_super.nrows(),
        });
    }
    Ok(u_super.adjoint() * f_super * u_super)
}

/// Effective noise sensitivity from the channel table: trapezoidal
/// integral over the grid of the rate-weighted channel superoperators.
pub fn compute_d_eff(
    table: &JumpChannelTable,
    track: &PropagatorTrack,
    bath: &BathSpec,
    grid: &TimeGrid,
) -> Result<SensitivityReport, Error> {
    if track.grid != *grid || table.grid != *grid {
        return Err(Error::GridMismatch);
    }
    if track.dim() != table.dim {
        return Err(Error::DimensionMismatch { expected: table.dim, got: track.dim() });
    }
    compute_d_eff_with_rate(table, grid, |omega| rate_gamma(omega, bath))
}

/// Accumulation core, parameterized over the rate function (exposed for
/// linearity checks in tests).
pub fn compute_d_eff_with_rate<R>(
    table: &JumpChannelTable,
    grid: &TimeGrid,
    rate: R,
) -> Result<SensitivityReport, Error>
where
    R: Fn(f64) -> f64,
{
    let n2 = table.dim * table.dim;
    let dt = grid.dt();
    let n_pts = grid.n_points();
    let mut f_matrix = CMat::zeros(n2, n2);
    let mut integrand_norms = Vec::with_capacity(n_pts);
    for (k, entries) in table.steps.iter().enumerate() {
        let mut integrand = CMat::zeros(n2, n2);
        for e in entries {
            let gamma = rate(e.omega);
            if gamma == 0.0 {
                continue;
            }
            integrand += dissipator_superop(&e.f).map(|z| z * gamma);
        }
        integrand_norms.push(frobenius_norm(&integrand));
        let w = if k == 0 || k == n_pts - 1 { 0.5 } else { 1.0 };
        f_matrix += integrand.map(|z| z * (w * dt));
    }
    let d_eff = frobenius_norm(&f_matrix);
    Ok(SensitivityReport { d_eff, f_matrix, integrand_norms })
}

/// Both sides of the first-order universal error bound.
#[derive(Debug, Clone)]
pub struct BoundCheckReport {
    /// Finite-difference `|| d U_err / d lambda ||` at `lambda -> 0`.
    pub error_derivative_norm: f64,
    /// `Tr[A^dag A] * D_eff`.
    pub bound: f64,
    pub d_eff: f64,
    pub coupling_trace: f64,
    pub delta_lambda: f64,
}

impl BoundCheckReport {
    pub fn holds_within(&self, rel_tol: f64) -> bool {
        self.error_derivative_norm <= self.bound * (1.0 + rel_tol) + 1e-12
    }

    /// `lhs / rhs`; below 1 means slack.
    pub fn slack_ratio(&self) -> f64 {
        if self.bound == 0.0 {
            if self.error_derivative_norm == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.error_derivative_norm / self.bound
        }
    }
}

/// Check the first-order error bound for a concrete coupling operator.
///
/// The error part of the full evolution is isolated as
/// `U_err(tau) = U_super(tau)^dag V(tau)` and differentiated by finite
/// differences in `lambda`; the result must not exceed
/// `Tr[A^dag A] * D_eff` up to `O(delta_lambda)`.
pub fn verify_first_order_bound(
    sys: &crate::dynamics::ControlSystem,
    pulses: &crate::crab::ControlPulseSet,
    noise: &crate::lindblad::NoiseChannel,
    bath: &BathSpec,
    grid: &TimeGrid,
    delta_lambda: f64,
) -> Result<BoundCheckReport, Error> {
    if !(delta_lambda > 0.0 && delta_lambda <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "delta_lambda = {delta_lambda} must lie in (0, 1e-3]"
        )));
    }
    let mut track = crate::dynamics::propagate_unitary(sys, pulses, grid)?;
    crate::dynamics::track_eigensystem(&mut track)?;
    let table = crate::dynamics::build_jump_channels(&track, grid)?;
    let hs = sys.midpoint_hamiltonians(pulses, grid)?;
    let report = compute_d_eff(&table, &track, bath, grid)?;

    let u_super = crate::linalg::conjugation_superop(track.final_unitary());
    let v_at = |lambda: f64| -> Result<CMat, Error> {
        let channel = crate::lindblad::NoiseChannel::new(noise.a_op().clone(), lambda)?;
        let l = crate::lindblad::build_liouvillian(&table, &hs, &channel, bath)?;
        crate::lindblad::total_superop(&l, grid)
    };
    let u_err_0 = u_super.adjoint() * v_at(0.0)?;
    let u_err_d = u_super.adjoint() * v_at(delta_lambda)?;
    let lhs = frobenius_norm(&(u_err_d - u_err_0)) / delta_lambda;
    if !lhs.is_finite() {
        return Err(Error::NonFinite("finite-difference error derivative"));
    }
    let coupling_trace = noise.coupling_trace();
    Ok(BoundCheckReport {
        error_derivative_norm: lhs,
        bound: coupling_trace * report.d_eff,
        d_eff: report.d_eff,
        coupling_trace,
        delta_lambda,
    })
}
