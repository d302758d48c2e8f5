//! Super-Ohmic thermal bath: spectral density, Bose-Einstein occupation,
//! and the one-sided rate function `gamma(omega)` feeding the dissipator
//! and the sensitivity metric.
//!
//! Sign convention: negative frequencies carry the emission weight
//! `2 pi J(|w|) (N(|w|) + 1)` and positive frequencies the absorption
//! weight `2 pi J(w) N(w)`. Under the propagator phase convention
//! `U |u_n> = exp(-i eps_n) |u_n>` the decay channel of an excited level
//! has negative Bohr frequency, so this assignment makes the Gibbs state
//! stationary (pinned by the thermal fixed-point test in `lindblad`).

use std::f64::consts::TAU;

use crate::error::Error;

/// Super-Ohmic bath parameters, atomic units with `k_B = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Cutoff frequency of the spectral density.
    pub omega_c: f64,
    /// Inverse temperature.
    pub beta: f64,
    /// Frequencies with `|omega| <= omega_tol` are treated as zero,
    /// separating genuine dephasing channels from finite-difference noise.
    pub omega_tol: f64,
}

impl BathSpec {
    pub fn new(omega_c: f64, beta: f64, omega_tol: f64) -> Result<Self, Error> {
        if !(omega_c > 0.0) {
            return Err(Error::InvalidParameter(format!("omega_c = {omega_c} must be positive")));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
        }
        if !(omega_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("omega_tol = {omega_tol} must be nonnegative")));
        }
        Ok(Self { omega_c, beta, omega_tol })
    }

    /// Standard construction for a system with drift energy scale
    /// `delta_ref`: zero-frequency tolerance `1e-6 * delta_ref`.
    pub fn for_drift_scale(omega_c: f64, beta: f64, delta_ref: f64) -> Result<Self, Error> {
        Self::new(omega_c, beta, 1e-6 * delta_ref)
    }
}

/// Super-Ohmic spectral density `J(w) = w^3 / w_c^2 * exp(-w / w_c)`.
pub fn spectral_density(omega: f64, spec: &BathSpec) -> Result<f64, Error> {
    if omega < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "spectral_density requires omega >= 0, got {omega}"
        )));
    }
    Ok(omega.powi(3) / (spec.omega_c * spec.omega_c) * (-omega / spec.omega_c).exp())
}

/// Bose-Einstein occupation `N(w) = 1 / (exp(beta w) - 1)` for `w > 0`.
pub fn occupation(omega: f64, spec: &BathSpec) -> Result<f64, Error> {
    if omega <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "occupation requires omega > 0, got {omega}"
        )));
    }
    Ok(1.0 / ((spec.beta * omega).exp_m1()))
}

/// One-sided decoherence rate.
///
/// `gamma(w) = 2 pi J(|w|) (N(|w|) + 1)` for `w < -omega_tol` (emission),
/// `gamma(w) = 2 pi J(w) N(w)` for `w > omega_tol` (absorption), and zero
/// inside the tolerance band (the super-Ohmic `J N -> 0` limit).
pub fn rate_gamma(omega: f64, spec: &BathSpec) -> f64 {
    if omega.abs() <= spec.omega_tol {
        return 0.0;
    }
    let w = omega.abs();
    let j = w.powi(3) / (spec.omega_c * spec.omega_c) * (-w / spec.omega_c).exp();
    let n = 1.0 / ((spec.beta * w).exp_m1());
    if omega < 0.0 {
        TAU * j * (n + 1.0)
    } else {
        TAU * j * n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> BathSpec {
        // Benchmark regime: Delta = 3e-3, omega_c = 10 Delta, beta = 1/Delta.
        let delta = 3e-3;
        BathSpec::for_drift_scale(10.0 * delta, 1.0 / delta, delta).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(BathSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(BathSpec::new(1.0, -1.0, 0.0).is_err());
        assert!(BathSpec::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn spectral_density_values() {
        let s = spec();
        assert_eq!(spectral_density(0.0, &s).unwrap(), 0.0);
        let wc = s.omega_c;
        assert_abs_diff_eq!(
            spectral_density(wc, &s).unwrap(),
            wc * (-1.0_f64).exp(),
            epsilon = 1e-15
        );
        assert!(spectral_density(-1.0, &s).is_err());
    }

    #[test]
    fn spectral_density_peaks_at_three_omega_c() {
        // dJ/dw = 0 oracle: scan a fine grid for the argmax.
        let s = spec();
        let mut best = (0.0, 0.0);
        let mut w = 0.0;
        while w < 10.0 * s.omega_c {
            let j = spectral_density(w, &s).unwrap();
            if j > best.1 {
                best = (w, j);
            }
            w += 1e-3 * s.omega_c;
        }
        assert_abs_diff_eq!(best.0, 3.0 * s.omega_c, epsilon = 2e-3 * s.omega_c);
    }

    #[test]
    fn occupation_values() {
        let s = spec();
        // beta w = ln 2  =>  N = 1
        let w = 2.0_f64.ln() / s.beta;
        assert_abs_diff_eq!(occupation(w, &s).unwrap(), 1.0, epsilon = 1e-12);
        // beta w = 10  =>  N ~ e^-10
        let w = 10.0 / s.beta;
        let n = occupation(w, &s).unwrap();
        assert!((n - (-10.0_f64).exp()).abs() / n < 1e-4);
        // beta w -> 0+: N * beta w -> 1
        let w = 1e-4 / s.beta;
        assert_abs_diff_eq!(occupation(w, &s).unwrap() * s.beta * w, 1.0, epsilon = 1e-4);
        assert!(occupation(0.0, &s).is_err());
    }

    #[test]
    fn rate_gamma_emission_side() {
        let delta = 3e-3;
        let s = spec();
        let j = spectral_density(delta, &s).unwrap();
        let n = occupation(delta, &s).unwrap();
        assert_abs_diff_eq!(rate_gamma(-delta, &s), TAU * j * (n + 1.0), epsilon = 1e-18);
        assert_abs_diff_eq!(rate_gamma(delta, &s), TAU * j * n, epsilon = 1e-18);
    }

    #[test]
    fn rate_gamma_zero_at_zero() {
        let s = spec();
        assert_eq!(rate_gamma(0.0, &s), 0.0);
        assert_eq!(rate_gamma(0.5 * s.omega_tol, &s), 0.0);
        assert_eq!(rate_gamma(-0.5 * s.omega_tol, &s), 0.0);
    }

    #[test]
    fn detailed_balance() {
        let s = spec();
        let delta = 3e-3;
        let ratio = rate_gamma(delta, &s) / rate_gamma(-delta, &s);
        assert_abs_diff_eq!(ratio, (-s.beta * delta).exp(), epsilon = 1e-12);
        // log-spaced grid
        for k in -8..4 {
            let w = 3e-3 * 10f64.powi(k) as f64;
            if w <= s.omega_tol {
                continue;
            }
            let r = rate_gamma(w, &s) / rate_gamma(-w, &s);
            assert!((r - (-s.beta * w).exp()).abs() < 1e-12 * (1.0 + r));
        }
    }

    #[test]
    fn rate_gamma_nonnegative_and_continuous_at_tolerance() {
        let s = spec();
        for k in -40..40 {
            let w = 1e-2 * k as f64 * s.omega_c;
            assert!(rate_gamma(w, &s) >= 0.0);
        }
        // Jump across the tolerance band is bounded by the emission rate there.
        let eps = s.omega_tol;
        let jump = rate_gamma(-1.000001 * eps, &s);
        let bound = TAU * spectral_density(eps * 1.000001, &s).unwrap()
            * (occupation(eps * 1.000001, &s).unwrap() + 1.0);
        assert!(jump <= bound * (1.0 + 1e-12));
    }
}
