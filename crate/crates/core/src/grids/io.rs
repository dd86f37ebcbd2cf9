//! CSV and binary serialization of sampled fields.
//!
//! Binary layout (little endian): magic `BECF`, u32 version, u8 kind
//! (1 axial, 2 radial, 3 cylindrical), u8 normalized flag, grid descriptor
//! as (f64 extent, u64 count) pairs, then the f64 payload. Cylindrical
//! payloads are row-major in `[rho, z]`.

use std::io::{BufRead, Write};

use ndarray::Array2;

use super::{AxialGrid, CylGrid, Field1D, FieldRZ, RadialField, RadialGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"BECF";
const VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Axial = 1,
    Radial = 2,
    Cylindrical = 3,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("truncated binary field".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn payload(&mut self, n: usize) -> Result<Vec<f64>> {
        let v = (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        if self.pos != self.buf.len() {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(v)
    }
}

fn header(kind: Kind, normalized: bool, desc: &[(f64, usize)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind as u8);
    out.push(normalized as u8);
    for (extent, count) in desc {
        out.extend_from_slice(&extent.to_le_bytes());
        out.extend_from_slice(&(*count as u64).to_le_bytes());
    }
    out
}

fn open(bytes: &[u8], kind: Kind) -> Result<(Reader<'_>, bool)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    if r.u8()? != kind as u8 {
        return Err(Error::Format("field kind does not match".into()));
    }
    let normalized = r.u8()? != 0;
    Ok((r, normalized))
}

fn push_payload(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn parse_rows(reader: impl BufRead, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if k == 0 || line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != columns {
            return Err(Error::Format(format!(
                "line {}: expected {columns} columns",
                k + 1
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn check_coordinate(expected: f64, found: f64, scale: f64) -> Result<()> {
    if (expected - found).abs() > 1e-9 * scale {
        return Err(Error::Format(format!(
            "coordinate {found} does not lie on a uniform grid"
        )));
    }
    Ok(())
}

impl Field1D {
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = header(
            Kind::Axial,
            self.normalized,
            &[(self.grid.z_max, self.grid.n_z)],
        );
        push_payload(&mut out, &self.values);
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let (mut r, normalized) = open(bytes, Kind::Axial)?;
        let grid = AxialGrid::new(r.f64()?, r.u64()? as usize)?;
        let values = r.payload(grid.n_z)?;
        Ok(Self {
            normalized,
            ..Self::new(grid, values)?
        })
    }

    /// Columns `z,value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "z,value")?;
        for (z, v) in self.grid.points().iter().zip(&self.values) {
            writeln!(w, "{z:e},{v:e}")?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let rows = parse_rows(r, 2)?;
        let n = rows.len();
        let z_max = rows.last().map(|row| row[0]).unwrap_or(0.0);
        let grid = AxialGrid::new(z_max, n)?;
        for (z, row) in grid.points().iter().zip(&rows) {
            check_coordinate(*z, row[0], z_max)?;
        }
        Self::new(grid, rows.iter().map(|row| row[1]).collect())
    }
}

impl RadialField {
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = header(
            Kind::Radial,
            self.normalized,
            &[(self.grid.rho_max, self.grid.n_rho)],
        );
        push_payload(&mut out, &self.values);
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let (mut r, normalized) = open(bytes, Kind::Radial)?;
        let grid = RadialGrid::new(r.f64()?, r.u64()? as usize)?;
        let values = r.payload(grid.n_rho)?;
        Ok(Self {
            normalized,
            ..Self::new(grid, values)?
        })
    }

    /// Columns `rho,value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "rho,value")?;
        for (rho, v) in self.grid.points().iter().zip(&self.values) {
            writeln!(w, "{rho:e},{v:e}")?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let rows = parse_rows(r, 2)?;
        let n = rows.len();
        if n == 0 {
            return Err(Error::Format("empty radial field".into()));
        }
        // cell centers: rho_max = 2 n rho_0
        let grid = RadialGrid::new(2.0 * n as f64 * rows[0][0], n)?;
        for (rho, row) in grid.points().iter().zip(&rows) {
            check_coordinate(*rho, row[0], grid.rho_max)?;
        }
        Self::new(grid, rows.iter().map(|row| row[1]).collect())
    }
}

impl FieldRZ {
    pub fn to_binary(&self) -> Vec<u8> {
        let g = &self.grid;
        let mut out = header(
            Kind::Cylindrical,
            self.normalized,
            &[
                (g.radial.rho_max, g.radial.n_rho),
                (g.axial.z_max, g.axial.n_z),
            ],
        );
        push_payload(&mut out, self.values.as_slice().expect("standard layout"));
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let (mut r, normalized) = open(bytes, Kind::Cylindrical)?;
        let radial = RadialGrid::new(r.f64()?, r.u64()? as usize)?;
        let axial = AxialGrid::new(r.f64()?, r.u64()? as usize)?;
        let grid = CylGrid::new(radial, axial)?;
        let values = r.payload(radial.n_rho * axial.n_z)?;
        let values = Array2::from_shape_vec(grid.shape(), values)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(Self {
            normalized,
            ..Self::new(grid, values)?
        })
    }

    /// Columns `rho,z,value`, rho-major.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "rho,z,value")?;
        let rho = self.grid.radial.points();
        let z = self.grid.axial.points();
        for ((i, j), v) in self.values.indexed_iter() {
            writeln!(w, "{:e},{:e},{v:e}", rho[i], z[j])?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let rows = parse_rows(r, 3)?;
        if rows.is_empty() {
            return Err(Error::Format("empty cylindrical field".into()));
        }
        let n_z = rows.iter().take_while(|row| row[0] == rows[0][0]).count();
        if rows.len() % n_z != 0 {
            return Err(Error::Format("ragged cylindrical field".into()));
        }
        let n_rho = rows.len() / n_z;
        let radial = RadialGrid::new(2.0 * n_rho as f64 * rows[0][0], n_rho)?;
        let axial = AxialGrid::new(rows[n_z - 1][1], n_z)?;
        let grid = CylGrid::new(radial, axial)?;
        let rho = radial.points();
        let z = axial.points();
        for (k, row) in rows.iter().enumerate() {
            check_coordinate(rho[k / n_z], row[0], radial.rho_max)?;
            check_coordinate(z[k % n_z], row[1], axial.z_max)?;
        }
        let values = Array2::from_shape_vec(grid.shape(), rows.iter().map(|row| row[2]).collect())
            .map_err(|e| Error::Format(e.to_string()))?;
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::normalize;
    use proptest::prelude::*;

    fn cyl() -> CylGrid {
        CylGrid::new(
            RadialGrid::new(8.0, 16).unwrap(),
            AxialGrid::new(3.5, 20).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn axial_round_trips() {
        let g = AxialGrid::new(7.25, 33).unwrap();
        let f = normalize(&Field1D::from_fn(g, |z| (-z * z / 3.0).exp())).unwrap();
        assert_eq!(Field1D::from_binary(&f.to_binary()).unwrap(), f);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let back = Field1D::read_csv(csv.as_slice()).unwrap();
        assert_eq!(back.values, f.values);
        assert_eq!(back.grid, f.grid);
    }

    #[test]
    fn radial_round_trips() {
        let g = RadialGrid::new(8.0, 24).unwrap();
        let f = RadialField::from_fn(g, |r| (-r * r).exp());
        assert_eq!(RadialField::from_binary(&f.to_binary()).unwrap(), f);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let back = RadialField::read_csv(csv.as_slice()).unwrap();
        assert_eq!(back.values, f.values);
        assert_eq!(back.grid.n_rho, 24);
        assert!((back.grid.rho_max - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cylindrical_round_trips() {
        let f = FieldRZ::from_fn(cyl(), |r, z| (-r * r - z * z).exp() * (1.0 + 0.1 * z));
        assert_eq!(FieldRZ::from_binary(&f.to_binary()).unwrap(), f);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let back = FieldRZ::read_csv(csv.as_slice()).unwrap();
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn rejects_corrupt_input() {
        let f = Field1D::zeros(AxialGrid::new(1.0, 16).unwrap());
        let mut bytes = f.to_binary();
        assert!(RadialField::from_binary(&bytes).is_err());
        bytes.pop();
        assert!(Field1D::from_binary(&bytes).is_err());
        bytes[0] = b'X';
        assert!(Field1D::from_binary(&bytes).is_err());
        assert!(Field1D::read_csv("z,value\n0,1,2\n".as_bytes()).is_err());
        assert!(Field1D::read_csv("z,value\n0,abc\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_exact(vals in proptest::collection::vec(-1e3f64..1e3, 16..64), zmax in 0.5f64..500.0) {
            let g = AxialGrid::new(zmax, vals.len()).unwrap();
            let f = Field1D::new(g, vals).unwrap();
            prop_assert_eq!(Field1D::from_binary(&f.to_binary()).unwrap(), f);
        }
    }
}
