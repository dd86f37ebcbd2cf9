//! Atom number at which the quasi-1D interaction energy per particle
//! reaches the transverse kinetic energy, and traps of other powers
//! matched to the same value.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::AxialGrid;
use crate::grids::DEFAULT_TAIL_ACTION;
use crate::roots::brent;
use crate::schmidt::longitudinal_moments;
use crate::solvers::{solve_gp1d, SolveSettings};
use crate::transverse::{reduced_eta_t, transverse_kinetic_energy};
use crate::units::Condensate;

const MAX_ATOMS: f64 = 1e9;
const MAX_BRACKET_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAtomNumber {
    pub atoms: f64,
    pub eta_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessMatch {
    pub q: u32,
    pub stiffness: f64,
    /// k^(-1/(q+2)), the longitudinal length in units of rho0.
    pub z0: f64,
    pub aspect_ratio: f64,
    pub critical: CriticalAtomNumber,
}

/// (g/2)(N-1) eta_T eta_L(N) - D/4, positive once interactions dominate.
pub fn critical_condition(
    cond: &Condensate,
    n_z: usize,
    settings: &SolveSettings,
) -> Result<(f64, f64)> {
    let grid = AxialGrid::for_condensate(cond, n_z, DEFAULT_TAIL_ACTION)?;
    let gs = solve_gp1d(cond, &grid, settings)?;
    let eta_l = longitudinal_moments(&gs.phi)?.eta_l;
    let f = 0.5 * cond.g_tilde() * reduced_eta_t(2) * eta_l - transverse_kinetic_energy(2);
    Ok((f, eta_l))
}

/// N_T at a fixed longitudinal self-average: 1 + (D/4) / ((g/2) eta_T eta_L).
pub fn critical_atoms_fixed_eta(scattering_length: f64, eta_l: f64) -> f64 {
    1.0 + transverse_kinetic_energy(2) / (2.0 * PI * scattering_length * reduced_eta_t(2) * eta_l)
}

/// Solves the critical condition in N for the trap of `template`.
pub fn critical_atom_number(
    template: &Condensate,
    n_z: usize,
    settings: &SolveSettings,
) -> Result<CriticalAtomNumber> {
    let eval = |n: f64| -> Result<f64> {
        Ok(critical_condition(&template.with_atoms(n)?, n_z, settings)?.0)
    };
    let lo = 2.0;
    if eval(lo)? > 0.0 {
        return Err(Error::NotBracketed { lo, hi: lo });
    }
    let mut hi = 1e3;
    while eval(hi)? < 0.0 {
        hi *= 2.0;
        if hi > MAX_ATOMS {
            return Err(Error::NotBracketed { lo, hi });
        }
    }
    let atoms = brent(eval, lo, hi, 1e-3, 200)?;
    let eta_l = critical_condition(&template.with_atoms(atoms)?, n_z, settings)?.1;
    Ok(CriticalAtomNumber { atoms, eta_l })
}

/// Finds k = z0^-(q+2) for which the power-q trap has critical number
/// `target`. The scattering length is taken from `template`.
pub fn match_stiffness(
    template: &Condensate,
    q: u32,
    target: f64,
    n_z: usize,
    settings: &SolveSettings,
) -> Result<StiffnessMatch> {
    if !(target.is_finite() && target > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "target atom number must exceed 2, got {target}"
        )));
    }
    let cond_at = |z0: f64| {
        Condensate::reduced(
            target,
            template.scattering_length,
            z0.powi(-(q as i32 + 2)),
            q,
        )
    };
    // N_T grows with z0, so the condition at fixed N falls with it.
    let eval = |z0: f64| -> Result<f64> { Ok(critical_condition(&cond_at(z0)?, n_z, settings)?.0) };
    let (mut lo, mut hi) = (2.0, 20.0);
    let mut steps = 0;
    while eval(lo)? < 0.0 {
        lo /= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::NotBracketed { lo, hi });
        }
    }
    while eval(hi)? > 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::NotBracketed { lo, hi });
        }
    }
    let z0 = brent(eval, lo, hi, 1e-7 * hi, 200)?;
    let stiffness = z0.powi(-(q as i32 + 2));
    let cond = cond_at(z0)?;
    let critical = critical_atom_number(&cond, n_z, settings)?;
    Ok(StiffnessMatch {
        q,
        stiffness,
        z0,
        aspect_ratio: z0,
        critical,
    })
}
