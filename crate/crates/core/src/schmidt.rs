//! Two-term perturbative Schmidt decomposition
//! `psi₁ = chi₀(rho) phi₀(z) + chi₁₀(rho) phi₁₀(z)` built from the cubic and
//! cubic-quintic longitudinal solutions. Trap units throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{inner_product, normalize, Field, Field1D, FieldRZ, RadialField, RadialGrid};
use crate::solvers::GroundState1D;
use crate::special::{laguerre_all, polylog2};
use crate::transverse::{reduced_eta_t, reduced_upsilon_t};
use crate::units::Condensate;

/// Relative size below which the variance of φ₀₀² counts as zero.
const VARIANCE_TOL: f64 = 1e-12;
/// Truncation of the Laguerre-Gaussian sums, relative to the running sum.
const SERIES_TOL: f64 = 1e-14;

/// eta_L = ⟨φ₀₀|φ₀₀³⟩, its spread delta_eta_L and the sixth moment ∫φ₀₀⁶.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalMoments {
    pub eta_l: f64,
    pub delta_eta_l: f64,
    pub sixth_moment: f64,
}

impl LongitudinalMoments {
    /// Homogeneous profile: no first-order entanglement.
    pub fn is_homogeneous(&self) -> bool {
        self.delta_eta_l == 0.0
    }
}

pub fn longitudinal_moments(phi00: &Field1D) -> Result<LongitudinalMoments> {
    phi00.check_normalized()?;
    let w = phi00.grid.weights();
    let (mut eta, mut six) = (0.0, 0.0);
    for (w, p) in w.iter().zip(&phi00.values) {
        let p2 = p * p;
        eta += w * p2 * p2;
        six += w * p2 * p2 * p2;
    }
    let radicand = six - eta * eta;
    let tol = VARIANCE_TOL * six;
    let delta = if radicand.abs() <= tol {
        0.0
    } else if radicand < 0.0 {
        return Err(Error::NegativeVariance(radicand));
    } else {
        radicand.sqrt()
    };
    Ok(LongitudinalMoments {
        eta_l: eta,
        delta_eta_l: delta,
        sixth_moment: six,
    })
}

/// φ₁₀ = (φ₀₀² - eta_L) φ₀₀ / delta_eta_L; the zero field for a homogeneous profile.
pub fn phi10(phi00: &Field1D, moments: &LongitudinalMoments) -> Field1D {
    if moments.is_homogeneous() {
        return Field1D::zeros(phi00.grid);
    }
    let mut f = phi00.map(|p| (p * p - moments.eta_l) * p / moments.delta_eta_l);
    f.normalized = true;
    f
}

/// S(rho) = Σ_{n≥1} ξ_{n0}(rho) / (2^n n), truncated per [`SERIES_TOL`].
pub fn laguerre_gaussian_series(grid: &RadialGrid) -> RadialField {
    let terms = series_terms();
    RadialField::from_fn(*grid, |rho| {
        let x = rho * rho;
        let lag = laguerre_all(terms, x);
        let mut coeff = 1.0;
        let mut s = 0.0;
        for (n, l) in lag.iter().enumerate().skip(1) {
            coeff *= 0.5;
            s += coeff / n as f64 * l;
        }
        s * (-0.5 * x).exp() / std::f64::consts::PI.sqrt()
    })
}

fn series_terms() -> usize {
    let mut sum = 0.0;
    let mut n = 0;
    loop {
        n += 1;
        let c = 0.5f64.powi(n as i32) / n as f64;
        sum += c;
        if c < SERIES_TOL * sum {
            return n;
        }
    }
}

/// (chi₀, chi₁₀) on `grid`:
/// chi₀ = ξ₀₀ - a eta_L (N-1) S and chi₁₀ = -a delta_eta_L (N-1) S.
pub fn transverse_corrections(
    cond: &Condensate,
    moments: &LongitudinalMoments,
    grid: &RadialGrid,
) -> (RadialField, RadialField) {
    let s = laguerre_gaussian_series(grid);
    let scale = cond.scattering_length * (cond.atoms - 1.0);
    let xi = RadialField::from_fn(*grid, |rho| crate::transverse::laguerre_gaussian(0, rho));
    let mut chi0 = xi.clone();
    chi0.values
        .iter_mut()
        .zip(&s.values)
        .for_each(|(c, s)| *c -= scale * moments.eta_l * s);
    let chi10 = s.map(|s| -scale * moments.delta_eta_l * s);
    (chi0, chi10)
}

/// chi₀₁ = chi₀ - ξ₀₀.
pub fn chi01(cond: &Condensate, moments: &LongitudinalMoments, grid: &RadialGrid) -> RadialField {
    let scale = cond.scattering_length * (cond.atoms - 1.0) * moments.eta_l;
    laguerre_gaussian_series(grid).map(|s| -scale * s)
}

/// c₁ = sqrt(Li₂(1/4)) (N-1) a delta_eta_L.
pub fn schmidt_c1(cond: &Condensate, moments: &LongitudinalMoments) -> f64 {
    li2_quarter().sqrt() * (cond.atoms - 1.0) * cond.scattering_length * moments.delta_eta_l
}

pub(crate) fn li2_quarter() -> f64 {
    polylog2(0.25).expect("1/4 lies in the domain")
}

/// φ₀ - φ₀₀ with its φ₀₀ component removed.
pub fn phi01(phi00: &Field1D, phi0: &Field1D) -> Result<Field1D> {
    let sign = if inner_product(phi0, phi00)? < 0.0 {
        -1.0
    } else {
        1.0
    };
    let diff = phi0.zip_with(phi00, |a, b| sign * a - b)?;
    let along = inner_product(&diff, phi00)?;
    diff.zip_with(phi00, |d, p| d - along * p)
}

/// mu₂ = 2 g~ eta_T ⟨φ₀₁|φ₀₀³⟩ - 3 g~² Upsilon_T (eta_L² + delta_eta_L²).
pub fn mu2(
    phi00: &Field1D,
    phi01: &Field1D,
    moments: &LongitudinalMoments,
    cond: &Condensate,
) -> Result<f64> {
    let cube = phi00.map(|p| p * p * p);
    let overlap = inner_product(phi01, &cube)?;
    let g = cond.g_tilde();
    Ok(2.0 * g * reduced_eta_t(2) * overlap
        - 3.0
            * g
            * g
            * reduced_upsilon_t(2)
            * (moments.eta_l.powi(2) + moments.delta_eta_l.powi(2)))
}

/// chi₀ φ₀ + chi₁₀ φ₁₀ before normalization.
pub fn assemble_psi1_raw(
    chi0: &RadialField,
    phi0: &Field1D,
    chi10: &RadialField,
    phi10: &Field1D,
) -> Result<FieldRZ> {
    if chi0.grid != chi10.grid || phi0.grid != phi10.grid {
        return Err(Error::GridMismatch(
            "Schmidt components live on different grids",
        ));
    }
    let mut psi = FieldRZ::product(chi0, phi0)?;
    let second = FieldRZ::product(chi10, phi10)?;
    psi.values += &second.values;
    Ok(psi)
}

/// Normalized psi₁.
pub fn assemble_psi1(
    chi0: &RadialField,
    phi0: &Field1D,
    chi10: &RadialField,
    phi10: &Field1D,
) -> Result<FieldRZ> {
    normalize(&assemble_psi1_raw(chi0, phi0, chi10, phi10)?)
}

/// All perturbative objects for one condensate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtModel {
    pub moments: LongitudinalMoments,
    pub eta_t: f64,
    pub upsilon_t: f64,
    pub phi00: Field1D,
    pub phi0: Field1D,
    pub phi01: Field1D,
    pub phi10: Field1D,
    pub chi0: RadialField,
    pub chi10: RadialField,
    pub c0: f64,
    pub c1: f64,
    pub mu1: f64,
    /// Longitudinal chemical potential of the cubic-quintic solve.
    pub mu_tilde_l: f64,
    pub mu2: f64,
    /// hbar omega_T + mu_tilde_l.
    pub mu_tilde: f64,
    pub entanglement_absent: bool,
}

/// Scalars of a [`SchmidtModel`] for JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSummary {
    pub c1: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu_tilde: f64,
    pub eta_l: f64,
    pub delta_eta_l: f64,
    pub eta_t: f64,
    pub upsilon_t: f64,
    pub entanglement_absent: bool,
}

impl SchmidtModel {
    pub fn build(
        cond: &Condensate,
        cubic: &GroundState1D,
        quintic: &GroundState1D,
        radial: &RadialGrid,
    ) -> Result<Self> {
        let phi00 = cubic.phi.clone();
        let mut phi0 = quintic.phi.clone();
        if inner_product(&phi0, &phi00)? < 0.0 {
            phi0.scale(-1.0);
            phi0.normalized = true;
        }
        let moments = longitudinal_moments(&phi00)?;
        let p10 = phi10(&phi00, &moments);
        let p01 = phi01(&phi00, &phi0)?;
        let m2 = mu2(&phi00, &p01, &moments, cond)?;
        let (chi0, chi10) = transverse_corrections(cond, &moments, radial);
        Ok(Self {
            moments,
            eta_t: reduced_eta_t(2),
            upsilon_t: reduced_upsilon_t(2),
            c0: 1.0,
            c1: schmidt_c1(cond, &moments),
            mu1: cubic.mu,
            mu_tilde_l: quintic.mu,
            mu2: m2,
            mu_tilde: 1.0 + quintic.mu,
            entanglement_absent: moments.is_homogeneous(),
            phi00,
            phi0,
            phi01: p01,
            phi10: p10,
            chi0,
            chi10,
        })
    }

    /// hbar omega_T + mu₁ + mu₂.
    pub fn mu_perturbative(&self) -> f64 {
        1.0 + self.mu1 + self.mu2
    }

    pub fn psi1(&self) -> Result<FieldRZ> {
        assemble_psi1(&self.chi0, &self.phi0, &self.chi10, &self.phi10)
    }

    /// chi₀ φ₀, normalized.
    pub fn dominant_term(&self) -> Result<FieldRZ> {
        normalize(&FieldRZ::product(&self.chi0, &self.phi0)?)
    }

    pub fn summary(&self) -> SchmidtSummary {
        SchmidtSummary {
            c1: self.c1,
            mu1: self.mu1,
            mu2: self.mu2,
            mu_tilde: self.mu_tilde,
            eta_l: self.moments.eta_l,
            delta_eta_l: self.moments.delta_eta_l,
            eta_t: self.eta_t,
            upsilon_t: self.upsilon_t,
            entanglement_absent: self.entanglement_absent,
        }
    }
}
