//! Axial and cylindrical grids, quadrature weights and finite-difference
//! Laplacians.
//!
//! The axial grid is uniform and symmetric with Dirichlet endpoints. The
//! radial grid is cell centered (first node at drho/2) and uses a
//! finite-volume stencil, which is regular at the axis and symmetric under
//! the radial quadrature.

mod field;
mod io;

use std::f64::consts::PI;

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Condensate;

pub use field::{inner_product, normalize, Field, Field1D, FieldRZ, RadialField};

/// Default WKB tail action beyond the classical turning point. A decay
/// factor e^{-16} in amplitude leaves the boundary density below 1e-13.
pub const DEFAULT_TAIL_ACTION: f64 = 16.0;

/// Uniform grid on `[-z_max, z_max]`. Both endpoints are Dirichlet nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
}

impl AxialGrid {
    pub fn new(z_max: f64, n_z: usize) -> Result<Self> {
        if !(z_max.is_finite() && z_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "z_max must be positive, got {z_max}"
            )));
        }
        if n_z < 16 {
            return Err(Error::InvalidParameter(format!(
                "n_z must be at least 16, got {n_z}"
            )));
        }
        Ok(Self {
            z_min: -z_max,
            z_max,
            n_z,
        })
    }

    /// Extent chosen so that the WKB tail past the turning point of the
    /// estimated chemical potential accumulates `tail_action`.
    pub fn for_condensate(cond: &Condensate, n_z: usize, tail_action: f64) -> Result<Self> {
        Self::new(wkb_extent(cond, tail_action), n_z)
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        // exactly antisymmetric: z_i = -z_{n-1-i}
        let last = self.n_z - 1;
        if i == 0 {
            self.z_min
        } else if i == last {
            self.z_max
        } else {
            (2 * i as i64 - last as i64) as f64 * (self.z_max / last as f64)
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_z).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let dz = self.dz();
        let mut w = vec![dz; self.n_z];
        w[0] = 0.5 * dz;
        w[self.n_z - 1] = 0.5 * dz;
        w
    }

    /// Second difference with homogeneous Dirichlet data; the boundary rows are zero.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_z;
        assert_eq!(f.len(), n);
        let inv = 1.0 / (self.dz() * self.dz());
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
        }
        out
    }

    /// Same grid refined by `factor` (node count scaled, extent kept).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let n = ((self.n_z - 1) as f64 * factor).round() as usize + 1;
        Self::new(self.z_max, n)
    }
}

fn wkb_extent(cond: &Condensate, tail_action: f64) -> f64 {
    let z0 = cond.z0();
    let mu = cond.thomas_fermi_mu().unwrap_or(0.0) + 0.5 / (z0 * z0);
    let q = cond.power as f64;
    let turning = (2.0 * mu / cond.stiffness).powf(1.0 / q);
    let h = turning.min(z0) / 400.0;
    let kinetic = |z: f64| {
        (2.0 * (cond.longitudinal_potential(z) - mu))
            .max(0.0)
            .sqrt()
    };
    let mut z = turning;
    let mut action = 0.0;
    let mut prev = kinetic(z);
    while action < tail_action {
        let next = kinetic(z + h);
        action += 0.5 * h * (prev + next);
        prev = next;
        z += h;
    }
    z
}

/// Cell-centered radial grid on `[0, rho_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub rho_max: f64,
    pub n_rho: usize,
}

impl RadialGrid {
    pub fn new(rho_max: f64, n_rho: usize) -> Result<Self> {
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_max must be positive, got {rho_max}"
            )));
        }
        if n_rho < 16 {
            return Err(Error::InvalidParameter(format!(
                "n_rho must be at least 16, got {n_rho}"
            )));
        }
        Ok(Self { rho_max, n_rho })
    }

    pub fn drho(&self) -> f64 {
        self.rho_max / self.n_rho as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.drho()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_rho).map(|i| self.point(i)).collect()
    }

    /// Outer face of cell `i`.
    pub fn face(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.drho()
    }

    /// Annulus weights 2 pi rho_i drho, with the first two cells corrected
    /// to cancel the h² and h⁴ Euler-Maclaurin terms at the axis. Smooth
    /// even integrands are then integrated to sixth order.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.drho();
        let mut w: Vec<f64> = (0..self.n_rho)
            .map(|i| 2.0 * PI * self.point(i) * h)
            .collect();
        w[0] = PI * h * h * (863.0 / 960.0);
        w[1] = PI * h * h * (2897.0 / 960.0);
        w
    }

    /// Finite-volume (1/rho) d/drho (rho d/drho). Flux through the axis is
    /// zero and the node past rho_max is a Dirichlet zero.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_rho;
        assert_eq!(f.len(), n);
        let coeffs = self.stencil();
        (0..n)
            .map(|i| {
                let (lo, diag, hi) = coeffs[i];
                let mut v = diag * f[i];
                if i > 0 {
                    v += lo * f[i - 1];
                }
                if i + 1 < n {
                    v += hi * f[i + 1];
                }
                v
            })
            .collect()
    }

    /// (sub, diagonal, super) coefficients of the radial Laplacian per row.
    pub fn stencil(&self) -> Vec<(f64, f64, f64)> {
        let h = self.drho();
        let w = self.weights();
        (0..self.n_rho)
            .map(|i| {
                let c = 2.0 * PI / (w[i] * h);
                let outer = c * self.face(i);
                let inner = if i > 0 { c * self.face(i - 1) } else { 0.0 };
                (inner, -(inner + outer), outer)
            })
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rho_max, (self.n_rho as f64 * factor).round() as usize)
    }
}

/// Product grid for azimuthally symmetric fields, indexed `[rho, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylGrid {
    pub radial: RadialGrid,
    pub axial: AxialGrid,
}

impl CylGrid {
    pub fn new(radial: RadialGrid, axial: AxialGrid) -> Result<Self> {
        if radial.rho_max < 8.0 {
            return Err(Error::InvalidParameter(format!(
                "rho_max must be at least 8 oscillator lengths, got {}",
                radial.rho_max
            )));
        }
        Ok(Self { radial, axial })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.radial.n_rho, self.axial.n_z)
    }

    pub fn weights(&self) -> Array2<f64> {
        let wr = self.radial.weights();
        let wz = self.axial.weights();
        Array2::from_shape_fn(self.shape(), |(i, j)| wr[i] * wz[j])
    }

    /// Cylindrical Laplacian (1/rho) d_rho(rho d_rho f) + d_z² f.
    pub fn laplacian(&self, f: &Array2<f64>) -> Array2<f64> {
        assert_eq!(f.dim(), self.shape());
        let (nr, nz) = self.shape();
        let inv = 1.0 / (self.axial.dz() * self.axial.dz());
        let stencil = self.radial.stencil();
        let mut out = Array2::zeros((nr, nz));
        for j in 1..nz - 1 {
            for i in 0..nr {
                let (lo, diag, hi) = stencil[i];
                let mut v = diag * f[[i, j]];
                if i > 0 {
                    v += lo * f[[i - 1, j]];
                }
                if i + 1 < nr {
                    v += hi * f[[i + 1, j]];
                }
                v += (f[[i, j + 1]] - 2.0 * f[[i, j]] + f[[i, j - 1]]) * inv;
                out[[i, j]] = v;
            }
        }
        out
    }

    /// Weighted sum Σ w f g.
    pub fn integrate_product(&self, f: &Array2<f64>, g: &Array2<f64>) -> f64 {
        let wr = self.radial.weights();
        let wz = self.axial.weights();
        let mut s = 0.0;
        Zip::indexed(f)
            .and(g)
            .for_each(|(i, j), a, b| s += wr[i] * wz[j] * a * b);
        s
    }
}

/// Grid resolution plus extent rules, used to build grids per condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n_rho: usize,
    pub rho_max: f64,
    pub n_z: usize,
    pub tail_action: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_rho: 128,
            rho_max: 8.0,
            n_z: 512,
            tail_action: DEFAULT_TAIL_ACTION,
        }
    }
}

impl GridSpec {
    /// Uniform refinement: both node counts multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid scale must be positive, got {factor}"
            )));
        }
        Ok(Self {
            n_rho: (self.n_rho as f64 * factor).round() as usize,
            n_z: ((self.n_z - 1) as f64 * factor).round() as usize + 1,
            ..*self
        })
    }

    /// Checks everything that does not depend on the condensate.
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_action.is_finite() && self.tail_action > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail action must be positive, got {}",
                self.tail_action
            )));
        }
        CylGrid::new(self.radial()?, AxialGrid::new(1.0, self.n_z)?).map(|_| ())
    }

    pub fn axial(&self, cond: &Condensate) -> Result<AxialGrid> {
        AxialGrid::for_condensate(cond, self.n_z, self.tail_action)
    }

    pub fn radial(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.rho_max, self.n_rho)
    }

    pub fn cylindrical(&self, cond: &Condensate) -> Result<CylGrid> {
        CylGrid::new(self.radial()?, self.axial(cond)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gaussian_quadrature(n: usize) -> f64 {
        let g = RadialGrid::new(8.0, n).unwrap();
        let w = g.weights();
        g.points()
            .iter()
            .zip(&w)
            .map(|(r, w)| w * (-r * r).exp())
            .sum()
    }

    #[test]
    fn axial_grid_is_symmetric() {
        let g = AxialGrid::new(13.7, 101).unwrap();
        let z = g.points();
        assert_eq!(z[0], -13.7);
        assert_eq!(z[100], 13.7);
        assert_eq!(z[50], 0.0);
        for i in 0..101 {
            assert_eq!(z[i], -z[100 - i]);
        }
        assert_relative_eq!(g.weights().iter().sum::<f64>(), 27.4, max_relative = 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(AxialGrid::new(1.0, 15).is_err());
        assert!(AxialGrid::new(-1.0, 64).is_err());
        assert!(RadialGrid::new(8.0, 8).is_err());
        let small = RadialGrid::new(6.0, 64).unwrap();
        assert!(CylGrid::new(small, AxialGrid::new(1.0, 64).unwrap()).is_err());
    }

    #[test]
    fn radial_quadrature_of_gaussian() {
        // ∫ 2 pi rho e^{-rho²} = pi
        assert_relative_eq!(gaussian_quadrature(256), PI, max_relative = 1e-6);
        // sixth order: error ratio ≈ 64 per halving
        let e1 = (gaussian_quadrature(64) / PI - 1.0).abs();
        let e2 = (gaussian_quadrature(128) / PI - 1.0).abs();
        assert!(e1 / e2 > 40.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn laplacians_annihilate_constants() {
        let g = AxialGrid::new(5.0, 64).unwrap();
        let lap = g.laplacian(&vec![3.0; 64]);
        assert!(lap[1..63].iter().all(|v| v.abs() < 1e-10));
        let r = RadialGrid::new(8.0, 64).unwrap();
        let lap = r.laplacian(&vec![2.0; 64]);
        // only the last cell sees the Dirichlet ghost
        assert!(lap[..63].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn radial_laplacian_of_quadratic() {
        // ∇² rho² = 4 away from the two corrected axis cells
        let r = RadialGrid::new(8.0, 64).unwrap();
        let f: Vec<f64> = r.points().iter().map(|p| p * p).collect();
        let lap = r.laplacian(&f);
        for v in &lap[2..63] {
            assert_relative_eq!(*v, 4.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn transverse_kinetic_energy_of_gaussian() {
        // ⟨-½∇²_T⟩ = ½ for e^{-rho²/2}/sqrt(pi)
        let mut errs = vec![];
        for n in [64, 128, 256] {
            let r = RadialGrid::new(10.0, n).unwrap();
            let f: Vec<f64> = r.points().iter().map(|p| (-0.5 * p * p).exp()).collect();
            let w = r.weights();
            let lap = r.laplacian(&f);
            let num: f64 = (0..n).map(|i| -0.5 * w[i] * f[i] * lap[i]).sum();
            let den: f64 = (0..n).map(|i| w[i] * f[i] * f[i]).sum();
            errs.push((num / den - 0.5).abs());
        }
        assert!(errs[2] < 1e-4);
        assert!(
            errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5,
            "{errs:?}"
        );
    }

    #[test]
    fn axial_box_mode_eigenvalue() {
        // cos(pi z / L) on [-L/2, L/2] is the Dirichlet ground mode, eigenvalue -(pi/L)²
        let len = 6.0;
        let exact = -(PI / len).powi(2);
        let mut errs = vec![];
        for n in [65, 129, 257] {
            let g = AxialGrid::new(len / 2.0, n).unwrap();
            let f: Vec<f64> = g.points().iter().map(|z| (PI * z / len).cos()).collect();
            let lap = g.laplacian(&f);
            let w = g.weights();
            let num: f64 = (0..n).map(|i| w[i] * f[i] * lap[i]).sum();
            let den: f64 = (0..n).map(|i| w[i] * f[i] * f[i]).sum();
            errs.push((num / den - exact).abs());
        }
        assert!(errs[2] < 1e-4 * exact.abs());
        assert!(
            errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5,
            "{errs:?}"
        );
    }

    #[test]
    fn wkb_extent_keeps_tails_small() {
        let cond = Condensate::reduced(1.0, 0.0092, 1e-4, 2).unwrap();
        let g = AxialGrid::for_condensate(&cond, 512, DEFAULT_TAIL_ACTION).unwrap();
        // harmonic ground state e^{-z²/2z0²}: density ratio at the edge
        let ratio = (-(g.z_max / 10.0).powi(2)).exp();
        assert!(ratio < 1e-12, "{} {}", g.z_max, ratio);
        assert!(g.z_max < 100.0);
        let dense = Condensate::reduced(5000.0, 0.0092, 1e-4, 2).unwrap();
        let r_tf = dense.thomas_fermi_radius().unwrap();
        let gd = AxialGrid::for_condensate(&dense, 512, DEFAULT_TAIL_ACTION).unwrap();
        assert!(gd.z_max > r_tf && gd.z_max < 2.0 * r_tf);
    }

    #[test]
    fn grid_spec_scaling() {
        let s = GridSpec::default().scaled(2.0).unwrap();
        assert_eq!(s.n_rho, 256);
        assert_eq!(s.n_z, 1023);
        assert!(GridSpec::default().scaled(0.0).is_err());
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::default().validate().is_ok());
        assert!(GridSpec {
            rho_max: 4.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GridSpec {
            n_z: 2,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GridSpec {
            tail_action: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    fn interior_field(n: usize, seed: &[f64]) -> Vec<f64> {
        let mut f: Vec<f64> = (0..n)
            .map(|i| seed[i % seed.len()] * (1.0 + (i as f64 * 0.37).sin()))
            .collect();
        f[0] = 0.0;
        f[n - 1] = 0.0;
        f
    }

    proptest! {
        #[test]
        fn axial_laplacian_is_symmetric(seed in proptest::collection::vec(-1.0f64..1.0, 7), seed2 in proptest::collection::vec(-1.0f64..1.0, 5)) {
            let g = AxialGrid::new(4.0, 40).unwrap();
            let f = interior_field(40, &seed);
            let h = interior_field(40, &seed2);
            let w = g.weights();
            let (lf, lh) = (g.laplacian(&f), g.laplacian(&h));
            let a: f64 = (0..40).map(|i| w[i] * f[i] * lh[i]).sum();
            let b: f64 = (0..40).map(|i| w[i] * lf[i] * h[i]).sum();
            prop_assert!((a - b).abs() <= 1e-8 * (a.abs().max(b.abs()) + 1e-12) + 1e-12);
        }

        #[test]
        fn cylindrical_laplacian_is_symmetric(seed in proptest::collection::vec(-1.0f64..1.0, 11), seed2 in proptest::collection::vec(-1.0f64..1.0, 13)) {
            let g = CylGrid::new(RadialGrid::new(8.0, 20).unwrap(), AxialGrid::new(3.0, 24).unwrap()).unwrap();
            let mk = |s: &[f64]| {
                let mut f = Array2::from_shape_fn(g.shape(), |(i, j)| s[(i * 7 + j * 3) % s.len()]);
                f.column_mut(0).fill(0.0);
                f.column_mut(23).fill(0.0);
                f
            };
            let (f, h) = (mk(&seed), mk(&seed2));
            let a = g.integrate_product(&f, &g.laplacian(&h));
            let b = g.integrate_product(&g.laplacian(&f), &h);
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()) + 1e-10);
        }

        #[test]
        fn radial_weights_integrate_polynomials(p in 0u32..3) {
            // ∫₀^R 2 pi rho rho^{2p} drho with the corrected rule, smooth even integrand
            let g = RadialGrid::new(8.0, 128).unwrap();
            let w = g.weights();
            let sum: f64 = g.points().iter().zip(&w).map(|(r, w)| w * r.powi(2 * p as i32)).sum();
            let exact = 2.0 * PI * 8f64.powi(2 * p as i32 + 2) / (2 * p + 2) as f64;
            // the outer end contributes the usual midpoint h² error
            prop_assert!((sum / exact - 1.0).abs() < 1e-3);
        }
    }
}
