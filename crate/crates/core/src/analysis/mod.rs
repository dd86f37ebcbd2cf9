//! Observables comparing the perturbative model with the full solution:
//! marginal densities, Schmidt projections, probability deficit,
//! concurrence and average density.

mod critical;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{Field, Field1D, FieldRZ, RadialField};
use crate::schmidt::{li2_quarter, LongitudinalMoments, SchmidtModel};
use crate::solvers::{GroundState1D, GroundState3D};
use crate::transverse::{laguerre_gaussian, reduced_eta_t};
use crate::units::Condensate;

pub use critical::{
    critical_atom_number, critical_atoms_fixed_eta, critical_condition, match_stiffness,
    CriticalAtomNumber, StiffnessMatch,
};

/// n_L(z) = ∫ d²rho |psi|².
pub fn marginal_longitudinal(psi: &FieldRZ) -> Result<Field1D> {
    psi.check_normalized()?;
    let wr = psi.grid.radial.weights();
    let n = psi
        .values
        .mapv(|x| x * x)
        .t()
        .dot(&ndarray::Array1::from(wr));
    Field1D::new(psi.grid.axial, n.to_vec())
}

/// n_T(rho) = ∫ dz |psi|².
pub fn marginal_transverse(psi: &FieldRZ) -> Result<RadialField> {
    psi.check_normalized()?;
    let wz = psi.grid.axial.weights();
    let n = psi.values.mapv(|x| x * x).dot(&ndarray::Array1::from(wz));
    RadialField::new(psi.grid.radial, n.to_vec())
}

/// (c~₀, c~₁): overlaps of psi with the normalized products chi₀φ₀ and
/// chi₁₀φ₁₀, signs folded to be non-negative. A homogeneous model has
/// c~₁ = 0.
pub fn schmidt_projections(psi: &FieldRZ, model: &SchmidtModel) -> Result<(f64, f64)> {
    let c0 = psi.project_separable(&model.chi0, &model.phi0)?
        / (model.chi0.norm_sq() * model.phi0.norm_sq()).sqrt();
    let n1 = model.chi10.norm_sq() * model.phi10.norm_sq();
    let c1 = if model.entanglement_absent || n1 == 0.0 {
        0.0
    } else {
        psi.project_separable(&model.chi10, &model.phi10)? / n1.sqrt()
    };
    Ok((c0.abs(), c1.abs()))
}

/// P_D = 1 - c~₀² - c~₁².
pub fn probability_deficit(c0: f64, c1: f64) -> f64 {
    1.0 - c0 * c0 - c1 * c1
}

/// C = 2 c₀ c₁ for a two-term Schmidt state.
pub fn concurrence(c0: f64, c1: f64) -> Result<f64> {
    for c in [c0, c1] {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain {
                value: c,
                domain: "[0, 1]",
            });
        }
    }
    Ok((2.0 * c0 * c1).min(1.0))
}

/// 2 sqrt(Li₂(1/4)) (N-1) a delta_eta_L.
pub fn perturbative_concurrence(cond: &Condensate, moments: &LongitudinalMoments) -> f64 {
    2.0 * li2_quarter().sqrt() * (cond.atoms - 1.0) * cond.scattering_length * moments.delta_eta_l
}

/// N ∫|psi|⁴ for a normalized field.
pub fn average_density(psi: &FieldRZ, atoms: f64) -> Result<f64> {
    psi.check_normalized()?;
    let q = psi.values.mapv(|x| x * x);
    Ok(atoms * psi.grid.integrate_product(&q, &q))
}

/// N eta_T eta_L.
pub fn quasi1d_average_density(moments: &LongitudinalMoments, atoms: f64) -> f64 {
    atoms * reduced_eta_t(2) * moments.eta_l
}

/// Singular values of the weighted matrix sqrt(w_rho) psi sqrt(w_z), i.e.
/// the full numerical Schmidt coefficients. Diagnostic only.
pub fn schmidt_spectrum(psi: &FieldRZ) -> Vec<f64> {
    let wr = psi.grid.radial.weights();
    let wz = psi.grid.axial.weights();
    let (nr, nz) = psi.grid.shape();
    let m = DMatrix::from_fn(nr, nz, |i, j| {
        wr[i].sqrt() * psi.values[[i, j]] * wz[j].sqrt()
    });
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Σ w |a - b|.
pub fn l1_distance<F: Field>(a: &F, b: &F) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(
            "distance between fields on different grids",
        ));
    }
    Ok(a.weights()
        .iter()
        .zip(a.values())
        .zip(b.values())
        .map(|((w, x), y)| w * (x - y).abs())
        .sum())
}

fn density<F: Field>(f: &F) -> F {
    let n = f.norm_sq();
    let mut d = f.clone();
    d.values_mut().iter_mut().for_each(|v| *v = *v * *v / n);
    d.set_normalized(false);
    d
}

/// L¹ distances of the numerical marginals from the model profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileDistances {
    /// ‖n_L - φ₀²‖₁
    pub longitudinal_schmidt: f64,
    /// ‖n_L - φ₀₀²‖₁
    pub longitudinal_bare: f64,
    /// ‖n_T - chi₀²‖₁ (chi₀ normalized)
    pub transverse_schmidt: f64,
    /// ‖n_T - ξ₀₀²‖₁
    pub transverse_bare: f64,
}

/// Everything compared for one (q, N) point. Energies in hbar omega_T,
/// densities in rho0^-3 and multiplied by N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(rename = "N")]
    pub atoms: f64,
    pub q: u32,
    pub mu_3d: f64,
    pub mu_tilde: f64,
    pub mu_1d: f64,
    pub mu_pert: f64,
    pub mu1: f64,
    pub mu2: f64,
    #[serde(rename = "P_D")]
    pub p_d: f64,
    #[serde(rename = "C_pert")]
    pub c_pert: f64,
    #[serde(rename = "C_exact")]
    pub c_exact: f64,
    pub avg_density_3d: f64,
    pub avg_density_pert: f64,
    pub avg_density_dominant: f64,
    pub avg_density_quasi1d: f64,
    pub c_tilde0: f64,
    pub c_tilde1: f64,
    pub eta_l: f64,
    pub delta_eta_l: f64,
    pub profiles: ProfileDistances,
    #[serde(rename = "marginal_nL")]
    pub marginal_nl: Field1D,
    #[serde(rename = "marginal_nT")]
    pub marginal_nt: RadialField,
}

impl AnalysisReport {
    pub fn build(
        cond: &Condensate,
        cubic: &GroundState1D,
        full: &GroundState3D,
        model: &SchmidtModel,
    ) -> Result<Self> {
        let psi = &full.psi;
        let (c0, c1) = schmidt_projections(psi, model)?;
        let n_l = marginal_longitudinal(psi)?;
        let n_t = marginal_transverse(psi)?;
        let xi = RadialField::from_fn(psi.grid.radial, |r| laguerre_gaussian(0, r));
        let profiles = ProfileDistances {
            longitudinal_schmidt: l1_distance(&n_l, &density(&model.phi0))?,
            longitudinal_bare: l1_distance(&n_l, &density(&model.phi00))?,
            transverse_schmidt: l1_distance(&n_t, &density(&model.chi0))?,
            transverse_bare: l1_distance(&n_t, &density(&xi))?,
        };
        let atoms = cond.atoms;
        Ok(Self {
            atoms,
            q: cond.power,
            mu_3d: full.mu,
            mu_tilde: model.mu_tilde,
            mu_1d: 1.0 + cubic.mu,
            mu_pert: model.mu_perturbative(),
            mu1: model.mu1,
            mu2: model.mu2,
            p_d: probability_deficit(c0, c1),
            c_pert: perturbative_concurrence(cond, &model.moments),
            c_exact: concurrence(c0.min(1.0), c1.min(1.0))?,
            avg_density_3d: average_density(psi, atoms)?,
            avg_density_pert: average_density(&model.psi1()?, atoms)?,
            avg_density_dominant: average_density(&model.dominant_term()?, atoms)?,
            avg_density_quasi1d: quasi1d_average_density(&model.moments, atoms),
            c_tilde0: c0,
            c_tilde1: c1,
            eta_l: model.moments.eta_l,
            delta_eta_l: model.moments.delta_eta_l,
            profiles,
            marginal_nl: n_l,
            marginal_nt: n_t,
        })
    }
}
