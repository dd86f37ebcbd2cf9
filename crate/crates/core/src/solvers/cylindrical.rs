use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{s, Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::{
    longitudinal_guess, InitialGuess, SolveSettings, ENERGY_SLACK, MIN_STEP, SHIFT_MARGIN,
};
use crate::error::{Error, Result};
use crate::grids::{CylGrid, Field, FieldRZ};
use crate::transverse::{laguerre_gaussian, reduced_eta_t};
use crate::units::Condensate;

/// Largest tolerated density at the outermost interior nodes, relative to the peak.
pub const BOUNDARY_DENSITY_LIMIT: f64 = 1e-10;
/// Iterations between rebuilds of the axial preconditioner factor.
const REBUILD_EVERY: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState3D {
    pub psi: FieldRZ,
    /// Units of hbar omega_T.
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
    pub energy_history: Vec<f64>,
}

impl GroundState3D {
    pub fn energy(&self) -> f64 {
        *self.energy_history.last().expect("at least one energy")
    }
}

/// Discrete operators shared by every iteration.
struct Operators {
    grid: CylGrid,
    wr: Array1<f64>,
    sqrt_wr: Array1<f64>,
    stencil: Vec<(f64, f64, f64)>,
    v: Array2<f64>,
    inv_dz2: f64,
    dz: f64,
    g_tilde: f64,
}

impl Operators {
    fn new(grid: &CylGrid, cond: &Condensate) -> Self {
        let wr = Array1::from(grid.radial.weights());
        let rho = grid.radial.points();
        let z = grid.axial.points();
        let v = Array2::from_shape_fn(grid.shape(), |(i, j)| {
            0.5 * rho[i] * rho[i] + cond.longitudinal_potential(z[j])
        });
        let dz = grid.axial.dz();
        Self {
            grid: *grid,
            sqrt_wr: wr.mapv(f64::sqrt),
            wr,
            stencil: grid.radial.stencil(),
            v,
            inv_dz2: 1.0 / (dz * dz),
            dz,
            g_tilde: cond.g_tilde(),
        }
    }

    /// (-½∇² + V) f, zero on the Dirichlet columns.
    fn linear(&self, f: &Array2<f64>) -> Array2<f64> {
        let (nr, nz) = f.dim();
        let mut out = Array2::zeros((nr, nz));
        for i in 0..nr {
            let (lo, diag, hi) = self.stencil[i];
            for j in 1..nz - 1 {
                let mut lap = diag * f[[i, j]]
                    + (f[[i, j + 1]] - 2.0 * f[[i, j]] + f[[i, j - 1]]) * self.inv_dz2;
                if i > 0 {
                    lap += lo * f[[i - 1, j]];
                }
                if i + 1 < nr {
                    lap += hi * f[[i + 1, j]];
                }
                out[[i, j]] = -0.5 * lap + self.v[[i, j]] * f[[i, j]];
            }
        }
        out
    }

    fn dot(&self, a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        let mut s = 0.0;
        for (i, (ra, rb)) in a.outer_iter().zip(b.outer_iter()).enumerate() {
            s += self.wr[i] * ra.iter().zip(rb.iter()).map(|(x, y)| x * y).sum::<f64>();
        }
        s * self.dz
    }

    fn quartic(&self, f: &Array2<f64>) -> f64 {
        let mut s = 0.0;
        for (i, row) in f.outer_iter().enumerate() {
            s += self.wr[i] * row.iter().map(|x| x.powi(4)).sum::<f64>();
        }
        s * self.dz
    }

    fn energy(&self, f: &Array2<f64>) -> f64 {
        self.dot(f, &self.linear(f)) + 0.5 * self.g_tilde * self.quartic(f)
    }

    fn normalize(&self, f: &mut Array2<f64>) -> Result<()> {
        let n = self.dot(f, f);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        *f *= 1.0 / n.sqrt();
        Ok(())
    }
}

/// Separable preconditioner (A_rho ⊗ 1 + 1 ⊗ A_z - sigma)^-1 applied in the
/// joint eigenbasis. A_rho = -½L_rho + ½rho²; A_z is the axial operator with
/// a mean-field term 3 g~ eta_T n_L(z) that tracks the current state.
struct Preconditioner {
    u_rho: Array2<f64>,
    lam_rho: Array1<f64>,
    u_z: Array2<f64>,
    lam_z: Array1<f64>,
}

fn symmetric_eigen(m: DMatrix<f64>) -> (Array2<f64>, Array1<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let vecs = Array2::from_shape_fn((n, n), |(i, k)| eig.eigenvectors[(i, order[k])]);
    let vals = Array1::from_iter(order.iter().map(|k| eig.eigenvalues[*k]));
    (vecs, vals)
}

impl Preconditioner {
    fn new(ops: &Operators) -> Self {
        let nr = ops.grid.radial.n_rho;
        let rho = ops.grid.radial.points();
        // W^{1/2} A W^{-1/2} is symmetric
        let mut a = DMatrix::zeros(nr, nr);
        for i in 0..nr {
            let (lo, diag, hi) = ops.stencil[i];
            a[(i, i)] = -0.5 * diag + 0.5 * rho[i] * rho[i];
            if i > 0 {
                a[(i, i - 1)] = -0.5 * lo * ops.sqrt_wr[i] / ops.sqrt_wr[i - 1];
            }
            if i + 1 < nr {
                a[(i, i + 1)] = -0.5 * hi * ops.sqrt_wr[i] / ops.sqrt_wr[i + 1];
            }
        }
        let a = (&a + a.transpose()) * 0.5;
        let (u_rho, lam_rho) = symmetric_eigen(a);
        Self {
            u_rho,
            lam_rho,
            u_z: Array2::zeros((0, 0)),
            lam_z: Array1::zeros(0),
        }
    }

    fn rebuild_axial(&mut self, ops: &Operators, psi: &Array2<f64>, cond: &Condensate) {
        let nz = ops.grid.axial.n_z;
        let m = nz - 2;
        let n_l = psi.mapv(|x| x * x).t().dot(&ops.wr);
        let mean_field = ops.g_tilde * reduced_eta_t(2);
        let z = ops.grid.axial.points();
        let off = -0.5 * ops.inv_dz2;
        let mut a = DMatrix::zeros(m, m);
        for k in 0..m {
            let j = k + 1;
            a[(k, k)] = ops.inv_dz2 + cond.longitudinal_potential(z[j]) + 3.0 * mean_field * n_l[j];
            if k > 0 {
                a[(k, k - 1)] = off;
                a[(k - 1, k)] = off;
            }
        }
        let (u_z, lam_z) = symmetric_eigen(a);
        self.u_z = u_z;
        self.lam_z = lam_z;
    }

    fn lowest(&self) -> f64 {
        self.lam_rho[0] + self.lam_z[0]
    }

    fn apply(&self, ops: &Operators, r: &Array2<f64>, sigma: f64) -> Array2<f64> {
        let nz = r.ncols();
        let interior = r.slice(s![.., 1..nz - 1]);
        let x = &interior * &ops.sqrt_wr.view().insert_axis(Axis(1));
        let mut y = self.u_rho.t().dot(&x).dot(&self.u_z);
        for ((i, k), v) in y.indexed_iter_mut() {
            *v /= self.lam_rho[i] + self.lam_z[k] - sigma;
        }
        let back = self.u_rho.dot(&y).dot(&self.u_z.t());
        let mut out = Array2::zeros(r.dim());
        out.slice_mut(s![.., 1..nz - 1])
            .assign(&(&back / &ops.sqrt_wr.view().insert_axis(Axis(1))));
        out
    }
}

fn initial_state(cond: &Condensate, grid: &CylGrid, guess: &InitialGuess) -> Result<Array2<f64>> {
    let (nr, nz) = grid.shape();
    let chi: Vec<f64> = grid
        .radial
        .points()
        .iter()
        .map(|r| laguerre_gaussian(0, *r))
        .collect();
    if let InitialGuess::Provided(v) = guess {
        if v.len() == nr * nz {
            return Array2::from_shape_vec((nr, nz), v.clone())
                .map_err(|e| Error::Format(e.to_string()));
        }
    }
    let phi = longitudinal_guess(cond, guess, &grid.axial.points(), grid.axial.dz())?;
    Ok(Array2::from_shape_fn((nr, nz), |(i, j)| chi[i] * phi[j]))
}

/// (-½∇² + V + g~|psi|²) expectation for a normalized field.
pub fn chemical_potential_3d(psi: &FieldRZ, cond: &Condensate) -> Result<f64> {
    psi.check_normalized()?;
    let ops = Operators::new(&psi.grid, cond);
    let h = ops.linear(&psi.values);
    Ok(ops.dot(&psi.values, &h) + ops.g_tilde * ops.quartic(&psi.values))
}

/// Energy functional ⟨psi|-½∇² + V|psi⟩ + g~/2 ∫psi⁴.
pub fn energy_3d(psi: &FieldRZ, cond: &Condensate) -> f64 {
    Operators::new(&psi.grid, cond).energy(&psi.values)
}

/// Azimuthally symmetric ground state of the full equation.
pub fn solve_gp3d(
    cond: &Condensate,
    grid: &CylGrid,
    settings: &SolveSettings,
) -> Result<GroundState3D> {
    settings.validate()?;
    let ops = Operators::new(grid, cond);
    let (_, nz) = grid.shape();
    let mut psi = initial_state(cond, grid, &settings.initial_guess)?;
    psi.column_mut(0).fill(0.0);
    psi.column_mut(nz - 1).fill(0.0);
    ops.normalize(&mut psi)?;

    let mut pre = Preconditioner::new(&ops);
    let mut energy = ops.energy(&psi);
    let mut history = vec![energy];
    let mut tau = settings.dt;
    let mut residual = f64::INFINITY;

    for step in 0..settings.max_steps {
        let h = ops.linear(&psi) + &(psi.mapv(|x| x * x * x) * ops.g_tilde);
        let mu = ops.dot(&psi, &h);
        let r = &h - &(&psi * mu);
        residual = ops.dot(&r, &r).sqrt();
        if residual < settings.tol_mu {
            return finish(grid, psi, mu, residual, step, history);
        }
        if step % REBUILD_EVERY == 0 {
            pre.rebuild_axial(&ops, &psi, cond);
        }
        let sigma = mu.min(pre.lowest()) - SHIFT_MARGIN;
        let mut dir = pre.apply(&ops, &r, sigma);
        let along = ops.dot(&dir, &psi);
        dir.scaled_add(-along, &psi);

        tau = (2.0 * tau).min(settings.dt);
        let accepted = loop {
            let mut trial = &psi - &(&dir * tau);
            ops.normalize(&mut trial)?;
            let e = ops.energy(&trial);
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
                psi = trial;
                energy = e;
                history.push(e);
            }
            None => {
                if residual <= 10.0 * settings.tol_mu {
                    return finish(grid, psi, mu, residual, step, history);
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
    grid: &CylGrid,
    mut psi: Array2<f64>,
    mu: f64,
    residual: f64,
    iterations: usize,
    energy_history: Vec<f64>,
) -> Result<GroundState3D> {
    if psi.sum() < 0.0 {
        psi.mapv_inplace(|x| -x);
    }
    let (nr, nz) = grid.shape();
    let peak = psi.iter().fold(0.0f64, |m, x| m.max(x * x));
    let edge = psi
        .column(1)
        .iter()
        .chain(psi.column(nz - 2).iter())
        .chain(psi.row(nr - 1).iter())
        .fold(0.0f64, |m, x| m.max(x * x));
    let ratio = edge / peak;
    if ratio > BOUNDARY_DENSITY_LIMIT {
        return Err(Error::GridTooSmall { ratio });
    }
    let psi = FieldRZ {
        grid: *grid,
        values: psi,
        normalized: true,
    };
    Ok(GroundState3D {
        psi,
        mu,
        residual,
        iterations,
        energy_history,
    })
}
