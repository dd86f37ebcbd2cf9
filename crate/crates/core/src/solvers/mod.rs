//! Ground-state solvers for the quasi-1D cubic equation, the cubic-quintic
//! equation and the azimuthally symmetric 3D Gross-Pitaevskii equation.
//!
//! All three minimize their energy functional by a normalized gradient
//! flow in imaginary time. Each step is preconditioned with a shifted
//! linearization of the Hamiltonian and the step length is chosen by a
//! backtracking line search, so the energy never increases.

mod cylindrical;
mod longitudinal;
mod tridiag;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Condensate, UnitSystem};

pub use cylindrical::{chemical_potential_3d, energy_3d, solve_gp3d, GroundState3D};
pub use longitudinal::{
    chemical_potential_1d, solve_gp1d, solve_longitudinal, solve_quintic, solve_quintic_from,
    GroundState1D, LongitudinalHamiltonian,
};

/// Starting point of the flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    Gaussian,
    /// Longitudinal Thomas-Fermi profile; falls back to a Gaussian when the
    /// Thomas-Fermi radius is below two grid spacings.
    ThomasFermi,
    /// Samples on the axial grid (n_z values), or for 3D solves either that
    /// or a full `[rho, z]` row-major array.
    Provided(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveSettings {
    /// Largest imaginary-time step of the preconditioned flow.
    pub dt: f64,
    /// Convergence threshold on ‖(H - mu) phi‖, the rate at which the state
    /// still changes per unit imaginary time.
    pub tol_mu: f64,
    pub max_steps: usize,
    pub initial_guess: InitialGuess,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            dt: 1.0,
            tol_mu: 1e-10,
            max_steps: 5000,
            initial_guess: InitialGuess::ThomasFermi,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.tol_mu.is_finite() && self.tol_mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol_mu must be positive, got {}",
                self.tol_mu
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter(
                "max_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_guess(&self, guess: InitialGuess) -> Self {
        Self {
            initial_guess: guess,
            ..self.clone()
        }
    }
}

/// Nonlinearity of a longitudinal solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Linear,
    Cubic,
    Quintic,
}

/// Relative slack allowed in the line-search energy test.
const ENERGY_SLACK: f64 = 1e-14;
/// Positivity margin of the shifted preconditioner.
const SHIFT_MARGIN: f64 = 1e-3;
const MIN_STEP: f64 = 1e-12;

/// Converts a trap-unit energy to joules.
pub fn energy_to_si(energy: f64, units: &UnitSystem) -> f64 {
    energy * units.energy
}

fn thomas_fermi_profile(cond: &Condensate, z: &[f64], dz: f64) -> Option<Vec<f64>> {
    let radius = cond.thomas_fermi_radius()?;
    if radius < 2.0 * dz {
        return None;
    }
    let mu = cond.thomas_fermi_mu()?;
    let c = cond.cubic();
    Some(
        z.iter()
            .map(|z| ((mu - cond.longitudinal_potential(*z)).max(0.0) / c).sqrt())
            .collect(),
    )
}

fn gaussian_profile(cond: &Condensate, z: &[f64]) -> Vec<f64> {
    let z0 = cond.z0();
    z.iter().map(|z| (-0.5 * (z / z0).powi(2)).exp()).collect()
}

/// Longitudinal starting profile (unnormalized) on the given nodes.
fn longitudinal_guess(
    cond: &Condensate,
    guess: &InitialGuess,
    z: &[f64],
    dz: f64,
) -> Result<Vec<f64>> {
    match guess {
        InitialGuess::Gaussian => Ok(gaussian_profile(cond, z)),
        InitialGuess::ThomasFermi => {
            Ok(thomas_fermi_profile(cond, z, dz).unwrap_or_else(|| gaussian_profile(cond, z)))
        }
        InitialGuess::Provided(v) => {
            if v.len() != z.len() {
                return Err(Error::GridMismatch(
                    "provided initial guess does not match the axial grid",
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(
                    "initial guess contains non-finite values".into(),
                ));
            }
            Ok(v.clone())
        }
    }
}
