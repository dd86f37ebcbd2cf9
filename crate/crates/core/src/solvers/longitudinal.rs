use serde::{Deserialize, Serialize};

use super::{
    longitudinal_guess, tridiag, InitialGuess, Model, SolveSettings, ENERGY_SLACK, MIN_STEP,
    SHIFT_MARGIN,
};
use crate::error::{Error, Result};
use crate::grids::{AxialGrid, Field, Field1D};
use crate::units::Condensate;

/// `H = -½ d²/dz² + ½ k |z|^q + cubic φ² - quintic φ⁴`, trap units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalHamiltonian {
    pub power: u32,
    pub stiffness: f64,
    pub cubic: f64,
    pub quintic: f64,
}

impl LongitudinalHamiltonian {
    pub fn new(cond: &Condensate, model: Model) -> Self {
        let (cubic, quintic) = match model {
            Model::Linear => (0.0, 0.0),
            Model::Cubic => (cond.cubic(), 0.0),
            Model::Quintic => (cond.cubic(), cond.quintic()),
        };
        Self {
            power: cond.power,
            stiffness: cond.stiffness,
            cubic,
            quintic,
        }
    }

    pub fn potential(&self, z: f64) -> f64 {
        0.5 * self.stiffness * z.abs().powi(self.power as i32)
    }

    pub fn model(&self) -> Model {
        if self.quintic != 0.0 {
            Model::Quintic
        } else if self.cubic != 0.0 {
            Model::Cubic
        } else {
            Model::Linear
        }
    }

    fn apply(&self, grid: &AxialGrid, v: &[f64], phi: &[f64]) -> Vec<f64> {
        let lap = grid.laplacian(phi);
        let n = phi.len();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            let p2 = phi[i] * phi[i];
            out[i] = -0.5 * lap[i] + (v[i] + self.cubic * p2 - self.quintic * p2 * p2) * phi[i];
        }
        out
    }

    /// E = ∫ φ(-½φ'' + Vφ) + cubic/2 φ⁴ - quintic/3 φ⁶.
    fn energy(&self, grid: &AxialGrid, v: &[f64], phi: &[f64]) -> f64 {
        let lap = grid.laplacian(phi);
        let dz = grid.dz();
        let mut e = 0.0;
        for i in 1..phi.len() - 1 {
            let p2 = phi[i] * phi[i];
            e += phi[i] * (-0.5 * lap[i] + v[i] * phi[i]) + 0.5 * self.cubic * p2 * p2
                - self.quintic / 3.0 * p2 * p2 * p2;
        }
        e * dz
    }
}

/// Converged longitudinal state. Energies in units of hbar omega_T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState1D {
    pub phi: Field1D,
    pub mu: f64,
    pub model: Model,
    pub residual: f64,
    pub iterations: usize,
    pub energy_history: Vec<f64>,
}

impl GroundState1D {
    pub fn energy(&self) -> f64 {
        *self.energy_history.last().expect("at least one energy")
    }
}

/// ⟨φ|H|φ⟩ for a normalized field.
pub fn chemical_potential_1d(phi: &Field1D, h: &LongitudinalHamiltonian) -> Result<f64> {
    phi.check_normalized()?;
    let v: Vec<f64> = phi.grid.points().iter().map(|z| h.potential(*z)).collect();
    let hp = h.apply(&phi.grid, &v, &phi.values);
    Ok(phi
        .grid
        .weights()
        .iter()
        .zip(&phi.values)
        .zip(&hp)
        .map(|((w, a), b)| w * a * b)
        .sum())
}

fn dot(a: &[f64], b: &[f64], dz: f64) -> f64 {
    // interior nodes only; endpoints are pinned to zero
    a[1..a.len() - 1]
        .iter()
        .zip(&b[1..b.len() - 1])
        .map(|(x, y)| x * y)
        .sum::<f64>()
        * dz
}

fn normalize_in_place(phi: &mut [f64], dz: f64) -> Result<()> {
    let n = dot(phi, phi, dz);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::ZeroNorm);
    }
    let s = 1.0 / n.sqrt();
    phi.iter_mut().for_each(|v| *v *= s);
    Ok(())
}

/// Minimizes the energy of `h` on `grid`.
///
/// `collapse_floor`: abort with [`Error::PerturbativeBreakdown`] once the
/// chemical potential falls below this value.
pub fn solve_longitudinal(
    h: &LongitudinalHamiltonian,
    grid: &AxialGrid,
    start: &[f64],
    settings: &SolveSettings,
    collapse_floor: Option<f64>,
) -> Result<GroundState1D> {
    settings.validate()?;
    let n = grid.n_z;
    if start.len() != n {
        return Err(Error::GridMismatch(
            "initial state does not match the axial grid",
        ));
    }
    let dz = grid.dz();
    let v: Vec<f64> = grid.points().iter().map(|z| h.potential(*z)).collect();
    let off = -0.5 / (dz * dz);

    let mut phi = start.to_vec();
    phi[0] = 0.0;
    phi[n - 1] = 0.0;
    normalize_in_place(&mut phi, dz)?;

    let mut energy = h.energy(grid, &v, &phi);
    let mut history = vec![energy];
    let mut tau = settings.dt;
    let mut residual = f64::INFINITY;

    for step in 0..settings.max_steps {
        let hp = h.apply(grid, &v, &phi);
        let mu = dot(&phi, &hp, dz);
        let r: Vec<f64> = hp.iter().zip(&phi).map(|(a, p)| a - mu * p).collect();
        residual = dot(&r, &r, dz).sqrt();
        if let Some(floor) = collapse_floor {
            if mu < floor {
                return Err(Error::PerturbativeBreakdown { mu, limit: floor });
            }
        }
        if residual < settings.tol_mu {
            return Ok(finish(grid, phi, mu, h.model(), residual, step, history));
        }

        // shifted linearization, kept positive definite
        let diag: Vec<f64> = (1..n - 1)
            .map(|i| {
                let p2 = phi[i] * phi[i];
                -2.0 * off + v[i] + 3.0 * h.cubic * p2 - 5.0 * h.quintic * p2 * p2
            })
            .collect();
        let lam = tridiag::min_eigenvalue(&diag, off, 1e-9 * (1.0 + mu.abs()));
        let sigma = mu.min(lam) - SHIFT_MARGIN;
        let shifted: Vec<f64> = diag.iter().map(|d| d - sigma).collect();
        let inner = tridiag::solve(&shifted, off, &r[1..n - 1]);
        let mut s = vec![0.0; n];
        s[1..n - 1].copy_from_slice(&inner);
        let along = dot(&s, &phi, dz);
        s.iter_mut().zip(&phi).for_each(|(a, p)| *a -= along * p);

        tau = (2.0 * tau).min(settings.dt);
        let accepted = loop {
            let mut trial: Vec<f64> = phi.iter().zip(&s).map(|(p, d)| p - tau * d).collect();
            normalize_in_place(&mut trial, dz)?;
            let e = h.energy(grid, &v, &trial);
            if e <= energy + ENERGY_SLACK * energy.abs() {
                break Some((trial, e));
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((trial, e)) => {
                phi = trial;
                energy = e;
                history.push(e);
            }
            None => {
                // stalled at round-off level
                if residual <= 10.0 * settings.tol_mu {
                    return Ok(finish(grid, phi, mu, h.model(), residual, step, history));
                }
                return Err(Error::NonConvergence {
                    steps: step,
                    residual,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        steps: settings.max_steps,
        residual,
    })
}

fn finish(
    grid: &AxialGrid,
    mut phi: Vec<f64>,
    mu: f64,
    model: Model,
    residual: f64,
    iterations: usize,
    energy_history: Vec<f64>,
) -> GroundState1D {
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|v| *v = -*v);
    }
    let phi = Field1D {
        grid: *grid,
        values: phi,
        normalized: true,
    };
    GroundState1D {
        phi,
        mu,
        model,
        residual,
        iterations,
        energy_history,
    }
}

/// φ₀₀ and mu₁ of the quasi-1D cubic equation.
pub fn solve_gp1d(
    cond: &Condensate,
    grid: &AxialGrid,
    settings: &SolveSettings,
) -> Result<GroundState1D> {
    let h = LongitudinalHamiltonian::new(cond, Model::Cubic);
    let start = longitudinal_guess(cond, &settings.initial_guess, &grid.points(), grid.dz())?;
    solve_longitudinal(&h, grid, &start, settings, None)
}

/// φ₀ and the longitudinal chemical potential of the cubic-quintic equation.
///
/// The quintic functional is unbounded below, so the flow starts from the
/// cubic ground state (computed here unless a guess is provided).
pub fn solve_quintic(
    cond: &Condensate,
    grid: &AxialGrid,
    settings: &SolveSettings,
) -> Result<GroundState1D> {
    let cubic = solve_gp1d(cond, grid, &settings.with_guess(InitialGuess::ThomasFermi))?;
    match &settings.initial_guess {
        InitialGuess::Provided(v) => {
            let h = LongitudinalHamiltonian::new(cond, Model::Quintic);
            if v.len() != grid.n_z {
                return Err(Error::GridMismatch(
                    "provided initial guess does not match the axial grid",
                ));
            }
            solve_longitudinal(&h, grid, v, settings, Some(-10.0 * cubic.mu.abs()))
        }
        _ => solve_quintic_from(cond, &cubic, settings),
    }
}

/// Cubic-quintic solve warm-started from a converged cubic state.
pub fn solve_quintic_from(
    cond: &Condensate,
    cubic: &GroundState1D,
    settings: &SolveSettings,
) -> Result<GroundState1D> {
    let h = LongitudinalHamiltonian::new(cond, Model::Quintic);
    solve_longitudinal(
        &h,
        &cubic.phi.grid,
        &cubic.phi.values,
        settings,
        Some(-10.0 * cubic.mu.abs()),
    )
}
