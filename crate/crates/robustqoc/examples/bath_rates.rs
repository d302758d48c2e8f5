//! Super-Ohmic bath rates: spectral density, thermal occupation, and the
//! one-sided rate gamma(omega), with a detailed-balance check.
//!
//! Run with: cargo run --example bath_rates

use robustqoc::{occupation, rate_gamma, spectral_density, BathSpec};

fn main() {
    let delta = 3e-3;
    let bath = BathSpec::for_drift_scale(10.0 * delta, 1.0 / delta, delta).unwrap();
    println!(
        "bath: omega_c = {:.3e}, beta = {:.3e}, zero band = {:.1e}",
        bath.omega_c, bath.beta, bath.omega_tol
    );
    println!("{:>12} {:>12} {:>12} {:>14} {:>14}", "omega", "J", "N", "gamma(+w)", "gamma(-w)");
    for k in 0..8 {
        let w = delta * 2f64.powi(k);
        println!(
            "{:12.4e} {:12.4e} {:12.4e} {:14.6e} {:14.6e}",
            w,
            spectral_density(w, &bath).unwrap(),
            occupation(w, &bath).unwrap(),
            rate_gamma(w, &bath),
            rate_gamma(-w, &bath),
        );
    }
    // gamma(+w) / gamma(-w) = exp(-beta w): absorption is Boltzmann
    // suppressed against emission.
    let w = 2.0 * delta;
    let ratio = rate_gamma(w, &bath) / rate_gamma(-w, &bath);
    println!(
        "\ndetailed balance at omega = {w:.1e}: ratio = {ratio:.12e}, exp(-beta w) = {:.12e}",
        (-bath.beta * w).exp()
    );
}
