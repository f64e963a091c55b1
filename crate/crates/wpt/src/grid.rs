//! Uniform Cartesian grids with node classification and the binary
//! snapshot format.

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::expr::Expr;
use std::io::{Read, Write};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"WPTGRID1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeClass {
    Interior = 0,
    Boundary = 1,
    Exterior = 2,
}

/// Grid values over the bounding box of a domain; exterior nodes carry a
/// value slot but are never read by the solver.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub dims: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub values: Vec<f64>,
    pub classes: Vec<NodeClass>,
}

impl GridFunction {
    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row-major linear index (last axis fastest).
    pub fn index(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for (c, d) in coords.iter().zip(&self.dims) {
            idx = idx * d + c;
        }
        idx
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            c[axis] = idx % self.dims[axis];
            idx /= self.dims[axis];
        }
        c
    }

    pub fn point(&self, coords: &[usize]) -> Vec<f64> {
        coords
            .iter()
            .zip(&self.origin)
            .zip(&self.spacing)
            .map(|((&c, &o), &h)| o + c as f64 * h)
            .collect()
    }

    pub fn point_of_index(&self, idx: usize) -> Vec<f64> {
        self.point(&self.coords(idx))
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.classes[i] == NodeClass::Interior)
            .collect()
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.classes[i] == NodeClass::Boundary)
            .collect()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Trilinear (bilinear in 2D) interpolation of the values; exterior
    /// corners fall back to the nearest non-exterior corner value.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let t = (x[a] - self.origin[a]) / self.spacing[a];
            let i = t.floor().clamp(0.0, (self.dims[a] - 2) as f64) as usize;
            base[a] = i;
            frac[a] = (t - i as f64).clamp(0.0, 1.0);
        }
        let corners = 1usize << d;
        let mut acc = 0.0;
        let mut wsum = 0.0;
        let mut fallback = 0.0;
        let mut fallback_w = -1.0;
        for c in 0..corners {
            let mut coords = base.clone();
            let mut w = 1.0;
            for a in 0..d {
                if c & (1 << a) != 0 {
                    coords[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            let idx = self.index(&coords);
            if self.classes[idx] != NodeClass::Exterior {
                acc += w * self.values[idx];
                wsum += w;
            }
            if w > fallback_w {
                fallback_w = w;
                fallback = self.values[idx];
            }
        }
        if wsum > 0.0 {
            acc / wsum
        } else {
            fallback
        }
    }

    /// Writes the little-endian binary snapshot.
    pub fn write_snapshot<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        for &d in &self.dims {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        for &o in &self.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        for &h in &self.spacing {
            w.write_all(&h.to_le_bytes())?;
        }
        for &v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        let classes: Vec<u8> = self.classes.iter().map(|&c| c as u8).collect();
        w.write_all(&classes)?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Grid("bad snapshot magic".into()));
        }
        let dim = read_u32(r)? as usize;
        if !(1..=3).contains(&dim) {
            return Err(Error::Grid(format!("bad snapshot dimension {dim}")));
        }
        let mut dims = Vec::with_capacity(dim);
        for _ in 0..dim {
            dims.push(read_u32(r)? as usize);
        }
        let mut origin = Vec::with_capacity(dim);
        for _ in 0..dim {
            origin.push(read_f64(r)?);
        }
        let mut spacing = Vec::with_capacity(dim);
        for _ in 0..dim {
            spacing.push(read_f64(r)?);
        }
        let count: usize = dims.iter().product();
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(read_f64(r)?);
        }
        let mut raw = vec![0u8; count];
        r.read_exact(&mut raw)?;
        let classes: Result<Vec<NodeClass>> = raw
            .into_iter()
            .map(|b| match b {
                0 => Ok(NodeClass::Interior),
                1 => Ok(NodeClass::Boundary),
                2 => Ok(NodeClass::Exterior),
                other => Err(Error::Grid(format!("bad node class {other}"))),
            })
            .collect();
        Ok(Self { dims, origin, spacing, values, classes: classes? })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Builds the grid skeleton for a domain at target spacing h: nodes within
/// h/2 of the boundary surface become boundary nodes carrying `g` evaluated
/// at the nearest boundary point; nodes strictly inside become interior.
pub fn build_grid(domain: &DomainSpec, h: f64, g: &Expr) -> Result<GridFunction> {
    if !(h > 0.0) {
        return Err(Error::Grid("spacing must be positive".into()));
    }
    let bbox = domain.bounding_box();
    let mut dims = Vec::new();
    let mut origin = Vec::new();
    let mut spacing = Vec::new();
    for &(lo, hi) in &bbox {
        let cells = ((hi - lo) / h).round().max(1.0) as usize;
        dims.push(cells + 1);
        origin.push(lo);
        spacing.push((hi - lo) / cells as f64);
    }
    if dims.iter().any(|&d| d < 4) {
        return Err(Error::Grid(format!(
            "grid too coarse for the domain: dims {dims:?}"
        )));
    }
    let count: usize = dims.iter().product();
    let mut grid = GridFunction {
        dims,
        origin,
        spacing,
        values: vec![0.0; count],
        classes: vec![NodeClass::Exterior; count],
    };
    let band = 0.5 * grid.min_spacing();
    let mut interior = 0usize;
    for idx in 0..count {
        let x = grid.point_of_index(idx);
        let d = domain.boundary_distance(&x);
        if d <= band {
            grid.classes[idx] = NodeClass::Boundary;
            grid.values[idx] = g.eval(&domain.nearest_boundary_point(&x));
        } else if domain.contains(&x) {
            grid.classes[idx] = NodeClass::Interior;
            interior += 1;
        }
    }
    if interior == 0 {
        return Err(Error::Grid("grid too coarse: no interior nodes".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let d = DomainSpec::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let g = build_grid(&d, 0.25, &Expr::Zero).unwrap();
        assert_eq!(g.dims, vec![5, 5]);
        assert_eq!(g.interior_indices().len(), 9);
        assert_eq!(g.boundary_indices().len(), 16);
    }

    #[test]
    fn coarse_annulus_rejected() {
        let d = DomainSpec::annulus(&[0.0, 0.0], 0.5, 1.0).unwrap();
        assert!(build_grid(&d, 0.45, &Expr::Zero).is_err());
    }

    #[test]
    fn ball_interior_matches_enumeration() {
        let d = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        let h = 0.1;
        let g = build_grid(&d, h, &Expr::Zero).unwrap();
        // independent enumeration oracle: interior nodes are exactly those
        // with |x| < 1 - h/2
        let mut expected = 0;
        for i in 0..g.dims[0] {
            for j in 0..g.dims[1] {
                let x = g.point(&[i, j]);
                if (x[0] * x[0] + x[1] * x[1]).sqrt() < 1.0 - h / 2.0 {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.interior_indices().len(), expected);
    }

    #[test]
    fn boundary_values_snapped() {
        let d = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        let g = build_grid(&d, 0.25, &Expr::custom(|x| x[0])).unwrap();
        for idx in g.boundary_indices() {
            let x = g.point_of_index(idx);
            let p = d.nearest_boundary_point(&x);
            assert!((g.values[idx] - p[0]).abs() < 1e-14);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let d = DomainSpec::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let mut g = build_grid(&d, 0.25, &Expr::Zero).unwrap();
        for (i, v) in g.values.iter_mut().enumerate() {
            *v = i as f64 * 0.125;
        }
        let mut buf = Vec::new();
        g.write_snapshot(&mut buf).unwrap();
        let back = GridFunction::read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(back.dims, g.dims);
        assert_eq!(back.values, g.values);
        assert_eq!(back.classes, g.classes);
        assert_eq!(
            buf.len(),
            8 + 4 + 2 * 4 + 2 * 8 + 2 * 8 + 25 * 8 + 25
        );
    }

    #[test]
    fn interpolation_reproduces_linear() {
        let d = DomainSpec::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let mut g = build_grid(&d, 0.125, &Expr::Zero).unwrap();
        for idx in 0..g.len() {
            let x = g.point_of_index(idx);
            g.values[idx] = 2.0 * x[0] - x[1];
        }
        let v = g.interpolate(&[0.31, 0.77]);
        assert!((v - (2.0 * 0.31 - 0.77)).abs() < 1e-12);
    }
}
