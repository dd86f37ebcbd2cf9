//! Closed forms for the harmonic transverse problem: ground width, the
//! self-overlap eta_T, mode overlaps ⟨ξ_n|ξ₀³⟩ and the coupling Upsilon_T.
//!
//! The `reduced_*` functions work in trap units (rho0 = hbar omega_T = 1),
//! the others return SI values.

use std::f64::consts::PI;

use crate::special::laguerre;
use crate::units::{AtomSpecies, TrapConfig, HBAR};

fn check_dims(dims: u8) {
    assert!(
        dims == 1 || dims == 2,
        "transverse dimension must be 1 or 2, got {dims}"
    );
}

/// rho0 = sqrt(hbar / M omega_T), m.
pub fn transverse_ground_width(species: &AtomSpecies, trap: &TrapConfig) -> f64 {
    (HBAR / (species.mass * trap.omega_t)).sqrt()
}

/// eta_T = (2 pi)^(-D/2) in units of rho0^-D.
pub fn reduced_eta_t(dims: u8) -> f64 {
    check_dims(dims);
    (2.0 * PI).powf(-(dims as f64) / 2.0)
}

/// eta_T = ∫ d^D rho ξ₀⁴, m^-D.
pub fn eta_t(species: &AtomSpecies, trap: &TrapConfig) -> f64 {
    let rho0 = transverse_ground_width(species, trap);
    reduced_eta_t(trap.transverse_dims) * rho0.powi(-(trap.transverse_dims as i32))
}

/// ⟨ξ_n|ξ₀³⟩ / eta_T.
///
/// For D = 2 `n` is the radial index of the m = 0 Laguerre-Gaussian mode and
/// the overlap is 2^-n. For D = 1 `n` labels Hermite functions; odd modes
/// vanish by parity and even ones follow
/// `t_{n+2} = -½ sqrt((n+1)/(n+2)) t_n`, `t_0 = 1`.
pub fn transverse_overlap(n: usize, dims: u8) -> f64 {
    check_dims(dims);
    if dims == 2 {
        return 0.5f64.powi(n as i32);
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut t = 1.0;
    let mut m = 0;
    while m < n {
        t *= -0.5 * ((m as f64 + 1.0) / (m as f64 + 2.0)).sqrt();
        m += 2;
    }
    t
}

/// E_n - E_0 in units of hbar omega_T.
pub fn transverse_excitation(n: usize, dims: u8) -> f64 {
    check_dims(dims);
    if dims == 2 {
        2.0 * n as f64
    } else {
        n as f64
    }
}

/// Upsilon_T in units of rho0^-2D / (hbar omega_T).
pub fn reduced_upsilon_t(dims: u8) -> f64 {
    let eta = reduced_eta_t(dims);
    if dims == 2 {
        eta * eta * (4.0f64 / 3.0).ln() / 2.0
    } else {
        eta * eta * (8.0 - 4.0 * 3f64.sqrt()).ln()
    }
}

/// Upsilon_T, m^-2D J^-1.
pub fn upsilon_t(species: &AtomSpecies, trap: &TrapConfig) -> f64 {
    let rho0 = transverse_ground_width(species, trap);
    let d = trap.transverse_dims as i32;
    reduced_upsilon_t(trap.transverse_dims) * rho0.powi(-2 * d) / (HBAR * trap.omega_t)
}

/// Partial spectral sum Σ_{n=1}^{terms} ⟨ξ_n|ξ₀³⟩² / (E_n - E_0), trap units.
pub fn upsilon_t_partial(dims: u8, terms: usize) -> f64 {
    let eta = reduced_eta_t(dims);
    let sum: f64 = (1..=terms)
        .map(|n| {
            let t = transverse_overlap(n, dims);
            t * t / transverse_excitation(n, dims)
        })
        .sum();
    eta * eta * sum
}

/// Spectral sum truncated once a term drops below 1e-14 of the running sum.
pub fn upsilon_t_spectral(dims: u8) -> f64 {
    let eta = reduced_eta_t(dims);
    let mut sum = 0.0;
    let mut n = 1;
    loop {
        let t = transverse_overlap(n, dims);
        let term = t * t / transverse_excitation(n, dims);
        sum += term;
        if term != 0.0 && term < 1e-14 * sum {
            break;
        }
        n += 1;
    }
    eta * eta * sum
}

/// ⟨-½∇²_T⟩ of the transverse ground state, units of hbar omega_T.
pub fn transverse_kinetic_energy(dims: u8) -> f64 {
    check_dims(dims);
    dims as f64 / 4.0
}

/// m = 0 Laguerre-Gaussian eigenfunction ξ_{n0}(rho) = e^{-rho²/2} L_n(rho²)/sqrt(pi),
/// normalized with the measure 2 pi rho drho.
pub fn laguerre_gaussian(n: usize, rho: f64) -> f64 {
    let x = rho * rho;
    (-0.5 * x).exp() * laguerre(n, x) / PI.sqrt()
}
