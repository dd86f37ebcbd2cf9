use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{AxialGrid, CylGrid, RadialGrid};
use crate::error::{Error, Result};

#[cfg(test)]
const NORM_TOL: f64 = 1e-10;

/// Real field sampled on a grid with quadrature weights.
pub trait Field: Clone {
    fn values(&self) -> &[f64];
    fn values_mut(&mut self) -> &mut [f64];
    fn weights(&self) -> Vec<f64>;
    fn same_grid(&self, other: &Self) -> bool;
    fn is_normalized(&self) -> bool;
    fn set_normalized(&mut self, flag: bool);

    fn norm_sq(&self) -> f64 {
        self.weights()
            .iter()
            .zip(self.values())
            .map(|(w, f)| w * f * f)
            .sum()
    }

    /// Errors unless the field carries the normalized flag or its norm is
    /// within tolerance of one.
    fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sq();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm: n.sqrt() });
        }
        Ok(())
    }

    fn scale(&mut self, s: f64) {
        self.values_mut().iter_mut().for_each(|v| *v *= s);
        self.set_normalized(false);
    }
}

/// Quadrature of f g with the grid weights.
pub fn inner_product<F: Field>(f: &F, g: &F) -> Result<f64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch(
            "inner product of fields on different grids",
        ));
    }
    Ok(f.weights()
        .iter()
        .zip(f.values())
        .zip(g.values())
        .map(|((w, a), b)| w * a * b)
        .sum())
}

/// f / sqrt(⟨f|f⟩).
pub fn normalize<F: Field>(f: &F) -> Result<F> {
    let n = f.norm_sq();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut out = f.clone();
    let s = 1.0 / n.sqrt();
    out.values_mut().iter_mut().for_each(|v| *v *= s);
    out.set_normalized(true);
    Ok(out)
}

fn check_values(values: &[f64], len: usize) -> Result<()> {
    if values.len() != len {
        return Err(Error::GridMismatch("value count does not match the grid"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "field contains non-finite values".into(),
        ));
    }
    Ok(())
}

/// Function of z on an [`AxialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field1D {
    pub grid: AxialGrid,
    pub values: Vec<f64>,
    #[serde(default)]
    pub normalized: bool,
}

impl Field1D {
    pub fn new(grid: AxialGrid, values: Vec<f64>) -> Result<Self> {
        check_values(&values, grid.n_z)?;
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    pub fn from_fn(grid: AxialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.points().into_iter().map(f).collect(),
            normalized: false,
        }
    }

    pub fn zeros(grid: AxialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_z],
            normalized: false,
        }
    }

    /// Σ w f.
    pub fn integrate(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, f)| w * f)
            .sum()
    }

    pub fn laplacian(&self) -> Field1D {
        Field1D {
            grid: self.grid,
            values: self.grid.laplacian(&self.values),
            normalized: false,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field1D {
        Field1D {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
            normalized: false,
        }
    }

    /// Pointwise f(a, b) of two fields on the same grid.
    pub fn zip_with(&self, other: &Field1D, f: impl Fn(f64, f64) -> f64) -> Result<Field1D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "pointwise operation on different axial grids",
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(Field1D {
            grid: self.grid,
            values,
            normalized: false,
        })
    }
}

impl Field for Field1D {
    fn values(&self) -> &[f64] {
        &self.values
    }
    fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    fn weights(&self) -> Vec<f64> {
        self.grid.weights()
    }
    fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
    fn is_normalized(&self) -> bool {
        self.normalized
    }
    fn set_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }
}

/// Function of rho on a [`RadialGrid`] with the measure 2 pi rho drho.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    #[serde(default)]
    pub normalized: bool,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_values(&values, grid.n_rho)?;
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.points().into_iter().map(f).collect(),
            normalized: false,
        }
    }

    pub fn integrate(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, f)| w * f)
            .sum()
    }

    pub fn laplacian(&self) -> RadialField {
        RadialField {
            grid: self.grid,
            values: self.grid.laplacian(&self.values),
            normalized: false,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RadialField {
        RadialField {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
            normalized: false,
        }
    }
}

impl Field for RadialField {
    fn values(&self) -> &[f64] {
        &self.values
    }
    fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    fn weights(&self) -> Vec<f64> {
        self.grid.weights()
    }
    fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
    fn is_normalized(&self) -> bool {
        self.normalized
    }
    fn set_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }
}

/// Azimuthally symmetric psi(rho, z), stored `[rho, z]` in standard layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRZ {
    pub grid: CylGrid,
    pub values: Array2<f64>,
    #[serde(default)]
    pub normalized: bool,
}

impl FieldRZ {
    pub fn new(grid: CylGrid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch(
                "array shape does not match the cylindrical grid",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "field contains non-finite values".into(),
            ));
        }
        let values = values.as_standard_layout().into_owned();
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    pub fn from_fn(grid: CylGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let rho = grid.radial.points();
        let z = grid.axial.points();
        let values = Array2::from_shape_fn(grid.shape(), |(i, j)| f(rho[i], z[j]));
        Self {
            grid,
            values,
            normalized: false,
        }
    }

    /// chi(rho) phi(z).
    pub fn product(chi: &RadialField, phi: &Field1D) -> Result<Self> {
        let grid = CylGrid::new(chi.grid, phi.grid)?;
        let values = Array2::from_shape_fn(grid.shape(), |(i, j)| chi.values[i] * phi.values[j]);
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    pub fn laplacian(&self) -> FieldRZ {
        FieldRZ {
            grid: self.grid,
            values: self.grid.laplacian(&self.values),
            normalized: false,
        }
    }

    pub fn integrate(&self) -> f64 {
        let ones = Array2::ones(self.grid.shape());
        self.grid.integrate_product(&self.values, &ones)
    }

    /// ⟨chi phi | self⟩ without forming the product.
    pub fn project_separable(&self, chi: &RadialField, phi: &Field1D) -> Result<f64> {
        if chi.grid != self.grid.radial || phi.grid != self.grid.axial {
            return Err(Error::GridMismatch(
                "separable projection on a different grid",
            ));
        }
        let wr = self.grid.radial.weights();
        let wz = self.grid.axial.weights();
        let mut s = 0.0;
        for (i, row) in self.values.outer_iter().enumerate() {
            let a = wr[i] * chi.values[i];
            let inner: f64 = row
                .iter()
                .zip(&wz)
                .zip(&phi.values)
                .map(|((v, w), p)| v * w * p)
                .sum();
            s += a * inner;
        }
        Ok(s)
    }
}

impl Field for FieldRZ {
    fn values(&self) -> &[f64] {
        self.values.as_slice().expect("standard layout")
    }
    fn values_mut(&mut self) -> &mut [f64] {
        self.values.as_slice_mut().expect("standard layout")
    }
    fn weights(&self) -> Vec<f64> {
        self.grid.weights().into_raw_vec_and_offset().0
    }
    fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
    fn is_normalized(&self) -> bool {
        self.normalized
    }
    fn set_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transverse::{laguerre_gaussian, reduced_eta_t};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cyl(n_rho: usize) -> CylGrid {
        CylGrid::new(
            RadialGrid::new(8.0, n_rho).unwrap(),
            AxialGrid::new(6.0, 97).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_gives_unit_norm() {
        let g = AxialGrid::new(5.0, 101).unwrap();
        let f = Field1D::from_fn(g, |z| (-z * z).exp());
        let n = normalize(&f).unwrap();
        assert!(n.normalized);
        assert_relative_eq!(inner_product(&n, &n).unwrap(), 1.0, max_relative = 1e-14);
        let again = normalize(&n).unwrap();
        for (a, b) in again.values.iter().zip(&n.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut big = f.clone();
        big.scale(7.0);
        let nb = normalize(&big).unwrap();
        for (a, b) in nb.values.iter().zip(&n.values) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_norm_rejected() {
        let g = AxialGrid::new(5.0, 33).unwrap();
        assert!(matches!(
            normalize(&Field1D::zeros(g)),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = Field1D::zeros(AxialGrid::new(5.0, 33).unwrap());
        let b = Field1D::zeros(AxialGrid::new(5.0, 34).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch(_))));
        assert!(Field1D::new(AxialGrid::new(5.0, 33).unwrap(), vec![0.0; 3]).is_err());
        assert!(Field1D::new(AxialGrid::new(5.0, 16).unwrap(), vec![f64::NAN; 16]).is_err());
    }

    #[test]
    fn eta_t_from_sampled_gaussian() {
        // ⟨χ₀₀|χ₀₀³⟩ on a grid with spacing 1/32 and extent 8
        let g = RadialGrid::new(8.0, 256).unwrap();
        let chi = RadialField::from_fn(g, |r| laguerre_gaussian(0, r));
        let cube = chi.map(|v| v * v * v);
        assert_relative_eq!(
            inner_product(&chi, &cube).unwrap(),
            reduced_eta_t(2),
            max_relative = 1e-8
        );
    }

    #[test]
    fn laguerre_gaussians_orthogonal_on_grid() {
        let g = RadialGrid::new(8.0, 128).unwrap();
        let a = RadialField::from_fn(g, |r| laguerre_gaussian(0, r));
        let b = RadialField::from_fn(g, |r| laguerre_gaussian(1, r));
        assert!(inner_product(&a, &b).unwrap().abs() < 1e-6);
    }

    #[test]
    fn product_field_projection() {
        let g = cyl(64);
        let chi = normalize(&RadialField::from_fn(g.radial, |r| laguerre_gaussian(0, r))).unwrap();
        let phi = normalize(&Field1D::from_fn(g.axial, |z| (-z * z / 2.0).exp())).unwrap();
        let psi = FieldRZ::product(&chi, &phi).unwrap();
        assert_relative_eq!(psi.norm_sq(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            psi.project_separable(&chi, &phi).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            inner_product(&psi, &psi).unwrap(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn check_normalized_flags_bad_norm() {
        let g = AxialGrid::new(5.0, 101).unwrap();
        let f = Field1D::from_fn(g, |z| 2.0 * (-z * z).exp());
        assert!(matches!(
            f.check_normalized(),
            Err(Error::NotNormalized { .. })
        ));
        assert!(normalize(&f).unwrap().check_normalized().is_ok());
    }

    proptest! {
        #[test]
        fn random_positive_field_normalizes(vals in proptest::collection::vec(0.01f64..10.0, 40)) {
            let g = AxialGrid::new(3.0, 40).unwrap();
            let f = Field1D::new(g, vals).unwrap();
            let n = normalize(&f).unwrap();
            prop_assert!((n.norm_sq() - 1.0).abs() < NORM_TOL);
        }

        #[test]
        fn inner_product_is_bilinear(a in -3.0f64..3.0, vals in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let g = RadialGrid::new(8.0, 32).unwrap();
            let f = RadialField::new(g, vals.clone()).unwrap();
            let h = RadialField::from_fn(g, |r| (-r).exp());
            let mut fa = f.clone();
            fa.scale(a);
            let lhs = inner_product(&fa, &h).unwrap();
            let rhs = a * inner_product(&f, &h).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
            prop_assert!((inner_product(&f, &h).unwrap() - inner_product(&h, &f).unwrap()).abs() < 1e-14);
        }
    }
}
