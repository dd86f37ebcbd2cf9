//! Physical constants, atomic species, trap geometry and the reduced
//! (trap-unit) description used internally by every solver.
//!
//! Internally all computation uses harmonic trap units: lengths in units of
//! the transverse oscillator length `rho0 = sqrt(hbar / (M omega_T))`,
//! energies in units of `hbar omega_T`, so that `hbar = M = omega_T = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transverse;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Atomic mass constant, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass and s-wave scattering length of the condensed species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    /// kg
    pub mass: f64,
    /// m; repulsive interactions only
    pub scattering_length: f64,
}

impl AtomSpecies {
    pub fn new(mass: f64, scattering_length: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !(scattering_length.is_finite() && scattering_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scattering length must be positive, got {scattering_length}"
            )));
        }
        Ok(Self {
            mass,
            scattering_length,
        })
    }

    /// ⁸⁷Rb in |F=1, m_F=-1>, a = 100.4 a₀.
    pub fn rb87() -> Self {
        Self {
            mass: 86.909_180_527 * ATOMIC_MASS_UNIT,
            scattering_length: 100.4 * BOHR_RADIUS,
        }
    }

    /// Contact coupling g = 4 pi hbar² a / M, J m³.
    pub fn coupling(&self) -> f64 {
        4.0 * PI * HBAR * HBAR * self.scattering_length / self.mass
    }
}

/// Harmonic transverse confinement plus a longitudinal power law,
/// `V = ½ (M omega_T² rho² + k z^q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Transverse angular frequency, rad/s.
    pub omega_t: f64,
    /// Longitudinal power, even and positive.
    pub q: u32,
    /// Longitudinal stiffness, J m^-q.
    pub k: f64,
    /// Number of tightly confined dimensions (2 = cigar, 1 = pancake).
    pub transverse_dims: u8,
}

impl TrapConfig {
    pub fn new(omega_t: f64, q: u32, k: f64, transverse_dims: u8) -> Result<Self> {
        if !(omega_t.is_finite() && omega_t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_T must be positive, got {omega_t}"
            )));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stiffness must be positive, got {k}"
            )));
        }
        if q == 0 || !q.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "q must be an even positive integer, got {q}"
            )));
        }
        if !(transverse_dims == 1 || transverse_dims == 2) {
            return Err(Error::InvalidParameter(format!(
                "transverse dimensions must be 1 or 2, got {transverse_dims}"
            )));
        }
        Ok(Self {
            omega_t,
            q,
            k,
            transverse_dims,
        })
    }

    /// Cigar trap from ordinary frequencies: `omega = 2 pi nu`.
    pub fn cigar(nu_t_hz: f64, q: u32, k: f64) -> Result<Self> {
        Self::new(2.0 * PI * nu_t_hz, q, k, 2)
    }

    /// Fully harmonic cigar, `k = M omega_L²`.
    pub fn harmonic_cigar(species: &AtomSpecies, nu_t_hz: f64, nu_l_hz: f64) -> Result<Self> {
        let omega_l = 2.0 * PI * nu_l_hz;
        Self::cigar(nu_t_hz, 2, species.mass * omega_l * omega_l)
    }

    pub fn longitudinal_dims(&self) -> u8 {
        3 - self.transverse_dims
    }

    /// Same trap with a different longitudinal power and stiffness.
    pub fn with_longitudinal(&self, q: u32, k: f64) -> Result<Self> {
        Self::new(self.omega_t, q, k, self.transverse_dims)
    }

    /// Full potential in J at cylindrical radius `rho` and axial position `z` (m).
    pub fn potential(&self, species: &AtomSpecies, rho: f64, z: f64) -> f64 {
        0.5 * (species.mass * self.omega_t * self.omega_t * rho * rho
            + self.k * z.abs().powi(self.q as i32))
    }
}

/// Conversion factors between SI and trap units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// rho0 = sqrt(hbar / M omega_T), m
    pub length: f64,
    /// hbar omega_T, J
    pub energy: f64,
    /// z0 = (hbar² / M k)^(1/(q+2)), m
    pub z0: f64,
}

impl UnitSystem {
    pub fn new(species: &AtomSpecies, trap: &TrapConfig) -> Self {
        let length = transverse::transverse_ground_width(species, trap);
        let z0 = (HBAR * HBAR / (species.mass * trap.k)).powf(1.0 / (trap.q as f64 + 2.0));
        Self {
            length,
            energy: HBAR * trap.omega_t,
            z0,
        }
    }

    /// Aspect ratio z0 / rho0 of the bare trap.
    pub fn aspect_ratio(&self) -> f64 {
        self.z0 / self.length
    }
}

/// Interaction constants for `N` atoms, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    /// g (N-1), J m³
    pub g_tilde: f64,
    /// m^-D
    pub eta_t: f64,
    /// m^-2D / J
    pub upsilon_t: f64,
    /// g eta_T (N-1)
    pub cubic: f64,
    /// 3 g² Upsilon_T (N-1)²
    pub quintic: f64,
}

impl CouplingConstants {
    pub fn new(species: &AtomSpecies, trap: &TrapConfig, atoms: f64) -> Result<Self> {
        check_atoms(atoms)?;
        let g = species.coupling();
        let eta_t = transverse::eta_t(species, trap);
        let upsilon_t = transverse::upsilon_t(species, trap);
        let g_tilde = g * (atoms - 1.0);
        Ok(Self {
            g_tilde,
            eta_t,
            upsilon_t,
            cubic: g_tilde * eta_t,
            quintic: 3.0 * g_tilde * g_tilde * upsilon_t,
        })
    }
}

fn check_atoms(atoms: f64) -> Result<()> {
    if !(atoms.is_finite() && atoms >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "atom number must be >= 1, got {atoms}"
        )));
    }
    Ok(())
}

/// A cigar-trapped condensate reduced to trap units. This is what the
/// solvers, the Schmidt construction and the analysis layer consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condensate {
    /// Atom number N.
    pub atoms: f64,
    /// a / rho0
    pub scattering_length: f64,
    /// k rho0^q / (hbar omega_T)
    pub stiffness: f64,
    /// Longitudinal power q.
    pub power: u32,
}

impl Condensate {
    pub fn new(species: &AtomSpecies, trap: &TrapConfig, atoms: f64) -> Result<Self> {
        check_atoms(atoms)?;
        if trap.transverse_dims != 2 {
            return Err(Error::InvalidParameter(
                "only cigar traps (two transverse dimensions) can be solved numerically".into(),
            ));
        }
        let units = UnitSystem::new(species, trap);
        Ok(Self {
            atoms,
            scattering_length: species.scattering_length / units.length,
            stiffness: trap.k * units.length.powi(trap.q as i32) / units.energy,
            power: trap.q,
        })
    }

    /// Directly in trap units.
    pub fn reduced(atoms: f64, scattering_length: f64, stiffness: f64, power: u32) -> Result<Self> {
        check_atoms(atoms)?;
        if !(scattering_length >= 0.0 && scattering_length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scattering length {scattering_length}"
            )));
        }
        if !(stiffness > 0.0 && stiffness.is_finite()) {
            return Err(Error::InvalidParameter(format!("stiffness {stiffness}")));
        }
        if power == 0 || !power.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "q must be an even positive integer, got {power}"
            )));
        }
        Ok(Self {
            atoms,
            scattering_length,
            stiffness,
            power,
        })
    }

    /// Power-q cigar with length scale `z0`, i.e. k = z0^-(q+2), for
    /// `species` in a transverse trap of `nu_t_hz`.
    pub fn cigar(species: &AtomSpecies, nu_t_hz: f64, atoms: f64, q: u32, z0: f64) -> Result<Self> {
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "z0 must be positive, got {z0}"
            )));
        }
        let trap = TrapConfig::cigar(nu_t_hz, q, 1.0)?;
        let a = species.scattering_length / UnitSystem::new(species, &trap).length;
        Self::reduced(atoms, a, z0.powi(-(q as i32 + 2)), q)
    }

    pub fn with_atoms(&self, atoms: f64) -> Result<Self> {
        check_atoms(atoms)?;
        Ok(Self { atoms, ..*self })
    }

    /// g (N-1) = 4 pi a (N-1).
    pub fn g_tilde(&self) -> f64 {
        4.0 * PI * self.scattering_length * (self.atoms - 1.0)
    }

    /// Cubic coefficient g~ eta_T of the longitudinal equations (= 2a(N-1)).
    pub fn cubic(&self) -> f64 {
        self.g_tilde() * transverse::reduced_eta_t(2)
    }

    /// Quintic coefficient 3 g~² Upsilon_T (= 6 a² ln(4/3) (N-1)²).
    pub fn quintic(&self) -> f64 {
        3.0 * self.g_tilde().powi(2) * transverse::reduced_upsilon_t(2)
    }

    /// ½ k |z|^q
    pub fn longitudinal_potential(&self, z: f64) -> f64 {
        0.5 * self.stiffness * z.abs().powi(self.power as i32)
    }

    /// Bare longitudinal width z0 in units of rho0.
    pub fn z0(&self) -> f64 {
        self.stiffness.powf(-1.0 / (self.power as f64 + 2.0))
    }

    /// Chemical potential of the longitudinal Thomas-Fermi profile for the
    /// cubic equation, or `None` for the non-interacting case.
    pub fn thomas_fermi_mu(&self) -> Option<f64> {
        let c = self.cubic();
        if c <= 0.0 {
            return None;
        }
        // norm: (2 mu / c) R q/(q+1) = 1 with R = (2 mu / k)^(1/q)
        let q = self.power as f64;
        let p = 1.0 + 1.0 / q;
        let coeff = (2.0 / c) * (2.0 / self.stiffness).powf(1.0 / q) * q / (q + 1.0);
        Some(coeff.powf(-1.0 / p))
    }

    /// Thomas-Fermi half-length of the longitudinal profile.
    pub fn thomas_fermi_radius(&self) -> Option<f64> {
        self.thomas_fermi_mu()
            .map(|mu| (2.0 * mu / self.stiffness).powf(1.0 / self.power as f64))
    }
}
