//! Task fidelities and the composite objective `J = J_0 + c * D_eff`.
//!
//! State fidelity is the trace overlap `Tr[rho_f rho_tar]` (exact for
//! pure targets); gate fidelity averages it over a complete set of
//! `N^2 - 1` pure initial states. Optimization-time `J_0` uses noise-free
//! unitary evolution; the full master equation enters only at evaluation
//! time through [`noisy_task_fidelity`].

use num_complex::Complex64;

use crate::bath::BathSpec;
use crate::crab::ControlPulseSet;
use crate::dynamics::{ControlSystem, TimeGrid};
use crate::error::Error;
use crate::linalg::{
    devectorize, frobenius_norm, identity, vectorize, CMat, CVec, DensityMatrix,
};
use crate::lindblad::NoiseChannel;

const UNITARITY_TOL: f64 = 1e-10;
const IMAG_RESIDUE_TOL: f64 = 1e-10;
const PURITY_WARN_TOL: f64 = 1e-8;

/// What the control is asked to do.
#[derive(Debug, Clone)]
pub enum ControlTask {
    /// Steer one fixed initial state; fidelity is the single trace overlap.
    StateTransfer { rho_initial: DensityMatrix },
    /// Implement a unitary; fidelity averages over the initial-state basis.
    Gate,
}

/// Task definition: the target unitary, the task flavour, and the
/// robustness weight `c` multiplying `D_eff` in the total objective.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    pub task: ControlTask,
    pub u_target: CMat,
    pub c_weight: f64,
}

/// `|| U^dag U - I ||_F`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    frobenius_norm(&(u.adjoint() * u - identity(u.nrows())))
}

impl ObjectiveSpec {
    pub fn state_transfer(
        rho_initial: DensityMatrix,
        u_target: CMat,
        c_weight: f64,
    ) -> Result<Self, Error> {
        let spec = Self { task: ControlTask::StateTransfer { rho_initial }, u_target, c_weight };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gate(u_target: CMat, c_weight: f64) -> Result<Self, Error> {
        let spec = Self { task: ControlTask::Gate, u_target, c_weight };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.u_target.nrows() != self.u_target.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.u_target.nrows(),
                got: self.u_target.ncols(),
            });
        }
        let defect = unitarity_defect(&self.u_target);
        if defect > UNITARITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "u_target is not unitary (defect {defect:.3e})"
            )));
        }
        if !(self.c_weight >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c_weight = {} must be nonnegative",
                self.c_weight
            )));
        }
        if let ControlTask::StateTransfer { rho_initial } = &self.task {
            if rho_initial.dim() != self.u_target.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: self.u_target.nrows(),
                    got: rho_initial.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.u_target.nrows()
    }

    /// The initial states the task fidelity averages over: the single
    /// transfer state, or the full `N^2 - 1` basis for a gate.
    pub fn initial_states(&self) -> Vec<DensityMatrix> {
        match &self.task {
            ControlTask::StateTransfer { rho_initial } => vec![rho_initial.clone()],
            ControlTask::Gate => initial_state_basis(self.dim()),
        }
    }

    /// Noise-free task fidelity of a realized final unitary.
    pub fn unitary_fidelity(&self, u_final: &CMat) -> Result<f64, Error> {
        match &self.task {
            ControlTask::StateTransfer { rho_initial } => {
                let rho_f = conjugate_state(u_final, rho_initial);
                let rho_tar = conjugate_state(&self.u_target, rho_initial);
                state_fidelity(&rho_f, &rho_tar)
            }
            ControlTask::Gate => gate_fidelity(u_final, &self.u_target),
        }
    }
}

fn conjugate_state(u: &CMat, rho: &DensityMatrix) -> DensityMatrix {
    let m = u * rho.matrix() * u.adjoint();
    DensityMatrix::new_relaxed(m, 1e-10, 1e-10, -1e-10)
        .expect("unitary conjugation preserves density-matrix structure")
}

/// Trace-overlap state fidelity `Tr[rho_f rho_tar]`.
///
/// Exact fidelity only for pure targets; an impure target is tolerated
/// but flagged on stderr.
pub fn state_fidelity(rho_f: &DensityMatrix, rho_tar: &DensityMatrix) -> Result<f64, Error> {
    if rho_f.dim() != rho_tar.dim() {
        return Err(Error::DimensionMismatch { expected: rho_tar.dim(), got: rho_f.dim() });
    }
    if (rho_tar.purity() - 1.0).abs() > PURITY_WARN_TOL {
        eprintln!(
            "warning: trace-overlap fidelity against impure target (purity {:.6})",
            rho_tar.purity()
        );
    }
    let overlap: Complex64 = (rho_f.matrix() * rho_tar.matrix()).trace();
    if overlap.im.abs() >= IMAG_RESIDUE_TOL {
        return Err(Error::NonFinite("state fidelity has a non-real trace overlap"));
    }
    Ok(overlap.re.clamp(0.0, 1.0))
}

/// A complete set of `N^2 - 1` pure initial states: the first `N - 1`
/// computational projectors plus the `(|j> + |k>)/sqrt(2)` and
/// `(|j> + i|k>)/sqrt(2)` superpositions for all `j < k`. Together with
/// `I/N` they span the Hermitian matrices.
pub fn initial_state_basis(n: usize) -> Vec<DensityMatrix> {
    assert!(n >= 2, "initial_state_basis requires dimension >= 2");
    let mut states = Vec::with_capacity(n * n - 1);
    for j in 0..n - 1 {
        let mut psi = CVec::zeros(n);
        psi[j] = Complex64::new(1.0, 0.0);
        states.push(DensityMatrix::pure(&psi));
    }
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for j in 0..n {
        for k in j + 1..n {
            for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut psi = CVec::zeros(n);
                psi[j] = inv_sqrt2;
                psi[k] = inv_sqrt2 * phase;
                states.push(DensityMatrix::pure(&psi));
            }
        }
    }
    debug_assert_eq!(states.len(), n * n - 1);
    states
}

/// Gate fidelity: mean trace overlap over the initial-state basis,
/// `(1/(N^2-1)) sum_n Tr[U rho_n U^dag  U_tar rho_n U_tar^dag]`.
pub fn gate_fidelity(u_real: &CMat, u_target: &CMat) -> Result<f64, Error> {
    if u_real.nrows() != u_target.nrows() {
        return Err(Error::DimensionMismatch { expected: u_target.nrows(), got: u_real.nrows() });
    }
    let basis = initial_state_basis(u_real.nrows());
    let mut acc = 0.0;
    for rho in &basis {
        let rho_f = conjugate_state(u_real, rho);
        let rho_tar = conjugate_state(u_target, rho);
        acc += state_fidelity(&rho_f, &rho_tar)?;
    }
    Ok(acc / basis.len() as f64)
}

/// Evaluation-time fidelity under the full master equation: each initial
/// state is pushed through the noisy propagator and compared against its
/// unitary-target image.
pub fn noisy_task_fidelity(
    pulses: &ControlPulseSet,
    sys: &ControlSystem,
    objective: &ObjectiveSpec,
    noise: &NoiseChannel,
    bath: &BathSpec,
    grid: &TimeGrid,
) -> Result<f64, Error> {
    let mut track = crate::dynamics::propagate_unitary(sys, pulses, grid)?;
    crate::dynamics::track_eigensystem(&mut track)?;
    let table = crate::dynamics::build_jump_channels(&track, grid)?;
    let hs = sys.midpoint_hamiltonians(pulses, grid)?;
    let liouville = crate::lindblad::build_liouvillian(&table, &hs, noise, bath)?;
    let v_total = crate::lindblad::total_superop(&liouville, grid)?;

    let n = objective.dim();
    let states = objective.initial_states();
    let mut acc = 0.0;
    for rho0 in &states {
        let rho_f_mat = devectorize(&(&v_total * vectorize(rho0.matrix())), n);
        let rho_f = DensityMatrix::new_relaxed(rho_f_mat, 1e-8, 1e-8, -1e-7)
            .map_err(|e| Error::IntegrationAccuracy(format!("noisy final state invalid: {e}")))?;
        let rho_tar = conjugate_state(&objective.u_target, rho0);
        acc += state_fidelity(&rho_f, &rho_tar)?;
    }
    Ok(acc / states.len() as f64)
}

/// `J = J_0 + c * D_eff`.
pub fn total_objective(j0: f64, d_eff: f64, c: f64) -> f64 {
    j0 + c * d_eff
}
