//! Full GKLS propagation of a driven qubit under a thermal sigma_x
//! coupling: trace preservation, purity loss, and relaxation toward the
//! Gibbs state.
//!
//! Run with: cargo run --example master_equation

use robustqoc::linalg::{c, expm_hermitian, sigma_x, sigma_z, CMat, DensityMatrix};
use robustqoc::{
    build_jump_channels, build_liouvillian, evolve_master, propagate_unitary, track_eigensystem,
    BathSpec, ControlPulseSet, ControlSystem, CrabParams, NoiseChannel, TimeGrid,
};

fn main() {
    let delta = 3e-3;
    let tau = 20000.0;
    let grid = TimeGrid::new(tau, 400).unwrap();
    let sys = ControlSystem::new(sigma_z().map(|z| z * (delta / 2.0)), vec![]).unwrap();
    let bath = BathSpec::for_drift_scale(10.0 * delta, 1.0 / delta, delta).unwrap();
    let noise = NoiseChannel::new(sigma_x(), 1.0).unwrap();

    let pulses = ControlPulseSet::zero(CrabParams::standard(tau), 0);
    let mut track = propagate_unitary(&sys, &pulses, &grid).unwrap();
    track_eigensystem(&mut track).unwrap();
    let table = build_jump_channels(&track, &grid).unwrap();
    let hs = sys.midpoint_hamiltonians(&pulses, &grid).unwrap();
    let liouville = build_liouvillian(&table, &hs, &noise, &bath).unwrap();

    // Start in the excited drift eigenstate.
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = c(1.0, 0.0);
    let rho0 = DensityMatrix::new(m).unwrap();
    let states = evolve_master(&rho0, &liouville, &grid).unwrap();

    // Gibbs target for H = (Delta/2) sz at inverse temperature beta.
    let gibbs_raw = expm_hermitian(
        &sigma_z().map(|z| z * (delta / 2.0)),
        c(-bath.beta, 0.0),
    );
    let z = gibbs_raw.trace().re;
    let gibbs = gibbs_raw.map(|v| v / z);

    println!("{:>10} {:>14} {:>12} {:>16}", "t", "Tr rho - 1", "purity", "dist to Gibbs");
    for k in (0..states.len()).step_by(40) {
        let rho = &states[k];
        let dist = (rho.matrix() - &gibbs).norm();
        println!(
            "{:10.0} {:14.2e} {:12.6} {:16.6e}",
            grid.time(k),
            rho.matrix().trace().re - 1.0,
            rho.purity(),
            dist
        );
    }
    let final_dist = (states.last().unwrap().matrix() - &gibbs).norm();
    println!("\nfinal distance to the Gibbs state: {final_dist:.3e}");
}
