//! Computational domains: axis-aligned boxes, balls and annuli in 2D/3D,
//! with the geometric queries the grid builder and the wide-stencil clipping
//! need.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned box with per-axis bounds (lo, hi).
    Box { bounds: Vec<(f64, f64)> },
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_inner: f64, r_outer: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    shape: Shape,
    dim: usize,
}

impl DomainSpec {
    pub fn boxed(bounds: &[(f64, f64)]) -> Result<Self> {
        let dim = bounds.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidDomain("dimension must be 2 or 3".into()));
        }
        for &(lo, hi) in bounds {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidDomain("degenerate box".into()));
            }
        }
        Ok(Self { shape: Shape::Box { bounds: bounds.to_vec() }, dim })
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        let dim = center.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidDomain("dimension must be 2 or 3".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain("radius must be positive".into()));
        }
        Ok(Self { shape: Shape::Ball { center: center.to_vec(), radius }, dim })
    }

    pub fn annulus(center: &[f64], r_inner: f64, r_outer: f64) -> Result<Self> {
        let dim = center.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidDomain("dimension must be 2 or 3".into()));
        }
        if !(r_inner > 0.0 && r_outer > r_inner) {
            return Err(Error::InvalidDomain(
                "annulus needs 0 < r_inner < r_outer".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Annulus { center: center.to_vec(), r_inner, r_outer },
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Box { bounds } => bounds.clone(),
            Shape::Ball { center, radius } => {
                center.iter().map(|&c| (c - radius, c + radius)).collect()
            }
            Shape::Annulus { center, r_outer, .. } => {
                center.iter().map(|&c| (c - r_outer, c + r_outer)).collect()
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Box { bounds } => bounds
                .iter()
                .map(|(lo, hi)| (hi - lo) * (hi - lo))
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Annulus { r_outer, .. } => 2.0 * r_outer,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { bounds } => x
                .iter()
                .zip(bounds)
                .all(|(&xi, &(lo, hi))| xi >= lo && xi <= hi),
            Shape::Ball { center, radius } => dist(x, center) <= *radius,
            Shape::Annulus { center, r_inner, r_outer } => {
                let r = dist(x, center);
                r >= *r_inner && r <= *r_outer
            }
        }
    }

    /// Signed distance is not needed; this is the unsigned distance from x
    /// to the boundary surface.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Box { bounds } => x
                .iter()
                .zip(bounds)
                .map(|(&xi, &(lo, hi))| (xi - lo).abs().min((hi - xi).abs()))
                .fold(f64::INFINITY, f64::min),
            Shape::Ball { center, radius } => (dist(x, center) - radius).abs(),
            Shape::Annulus { center, r_inner, r_outer } => {
                let r = dist(x, center);
                (r - r_inner).abs().min((r - r_outer).abs())
            }
        }
    }

    /// Nearest point of the boundary surface; used to snap boundary-band
    /// grid nodes before evaluating Dirichlet data.
    pub fn nearest_boundary_point(&self, x: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Box { bounds } => {
                // project onto the closest face
                let mut best_axis = 0;
                let mut best_val = 0.0;
                let mut best_dist = f64::INFINITY;
                for (i, (&xi, &(lo, hi))) in x.iter().zip(bounds).enumerate() {
                    let (d, v) = if (xi - lo).abs() <= (hi - xi).abs() {
                        ((xi - lo).abs(), lo)
                    } else {
                        ((hi - xi).abs(), hi)
                    };
                    if d < best_dist {
                        best_dist = d;
                        best_axis = i;
                        best_val = v;
                    }
                }
                let mut p: Vec<f64> = x
                    .iter()
                    .zip(bounds)
                    .map(|(&xi, &(lo, hi))| xi.clamp(lo, hi))
                    .collect();
                p[best_axis] = best_val;
                p
            }
            Shape::Ball { center, radius } => radial_snap(x, center, *radius),
            Shape::Annulus { center, r_inner, r_outer } => {
                let r = dist(x, center);
                let target = if (r - r_inner).abs() <= (r - r_outer).abs() {
                    *r_inner
                } else {
                    *r_outer
                };
                radial_snap(x, center, target)
            }
        }
    }

    /// Smallest `t` in (0, 1] at which the segment `x + t d` crosses the
    /// boundary, for `x` inside the domain. Returns `None` when the whole
    /// segment stays inside.
    pub fn clip_exit(&self, x: &[f64], d: &[f64]) -> Option<f64> {
        let t = match &self.shape {
            Shape::Box { bounds } => {
                let mut t_exit = f64::INFINITY;
                for (i, &(lo, hi)) in bounds.iter().enumerate() {
                    if d[i] > 0.0 {
                        t_exit = t_exit.min((hi - x[i]) / d[i]);
                    } else if d[i] < 0.0 {
                        t_exit = t_exit.min((lo - x[i]) / d[i]);
                    }
                }
                t_exit
            }
            Shape::Ball { center, radius } => {
                sphere_exit(x, d, center, *radius).unwrap_or(f64::INFINITY)
            }
            Shape::Annulus { center, r_inner, r_outer } => {
                let outer = sphere_exit(x, d, center, *r_outer).unwrap_or(f64::INFINITY);
                let inner = sphere_entry(x, d, center, *r_inner).unwrap_or(f64::INFINITY);
                outer.min(inner)
            }
        };
        if t.is_finite() && t > 0.0 && t <= 1.0 {
            Some(t)
        } else {
            None
        }
    }
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn radial_snap(x: &[f64], center: &[f64], target: f64) -> Vec<f64> {
    let r = dist(x, center);
    if r < 1e-14 {
        // arbitrary but deterministic direction from a degenerate center hit
        let mut p = center.to_vec();
        p[0] += target;
        return p;
    }
    x.iter()
        .zip(center)
        .map(|(&xi, &ci)| ci + (xi - ci) * target / r)
        .collect()
}

/// Positive root of |x - c + t d| = radius, for x inside the sphere.
fn sphere_exit(x: &[f64], d: &[f64], c: &[f64], radius: f64) -> Option<f64> {
    let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    let a: f64 = d.iter().map(|v| v * v).sum();
    if a == 0.0 {
        return None;
    }
    let b: f64 = y.iter().zip(d).map(|(p, q)| p * q).sum();
    let c0: f64 = y.iter().map(|v| v * v).sum::<f64>() - radius * radius;
    let disc = b * b - a * c0;
    if disc < 0.0 {
        return None;
    }
    let t = (-b + disc.sqrt()) / a;
    if t > 0.0 {
        Some(t)
    } else {
        None
    }
}

/// Smallest positive root of |x - c + t d| = radius, for x outside the
/// sphere (entering it).
fn sphere_entry(x: &[f64], d: &[f64], c: &[f64], radius: f64) -> Option<f64> {
    let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    let a: f64 = d.iter().map(|v| v * v).sum();
    if a == 0.0 {
        return None;
    }
    let b: f64 = y.iter().zip(d).map(|(p, q)| p * q).sum();
    let c0: f64 = y.iter().map(|v| v * v).sum::<f64>() - radius * radius;
    let disc = b * b - a * c0;
    if disc < 0.0 {
        return None;
    }
    let t = (-b - disc.sqrt()) / a;
    if t > 0.0 {
        Some(t)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_queries() {
        let d = DomainSpec::boxed(&[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        assert!(d.contains(&[0.5, 1.0]));
        assert!(!d.contains(&[1.5, 1.0]));
        assert!((d.boundary_distance(&[0.25, 1.0]) - 0.25).abs() < 1e-15);
        assert!((d.diameter() - 5f64.sqrt()).abs() < 1e-15);
        let t = d.clip_exit(&[0.9, 1.0], &[0.2, 0.0]).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ball_snap_and_clip() {
        let d = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        let p = d.nearest_boundary_point(&[0.3, 0.4]);
        assert!((p[0] - 0.6).abs() < 1e-12 && (p[1] - 0.8).abs() < 1e-12);
        let t = d.clip_exit(&[0.5, 0.0], &[1.0, 0.0]).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn annulus_clips_both_spheres() {
        let d = DomainSpec::annulus(&[0.0, 0.0, 0.0], 0.5, 1.0).unwrap();
        // heading outward
        let t_out = d.clip_exit(&[0.8, 0.0, 0.0], &[0.5, 0.0, 0.0]).unwrap();
        assert!((t_out - 0.4).abs() < 1e-12);
        // heading into the hole
        let t_in = d.clip_exit(&[0.8, 0.0, 0.0], &[-0.5, 0.0, 0.0]).unwrap();
        assert!((t_in - 0.6).abs() < 1e-12);
        // tangential short step stays inside
        assert!(d.clip_exit(&[0.8, 0.0, 0.0], &[0.0, 0.05, 0.0]).is_none());
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(DomainSpec::boxed(&[(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(DomainSpec::annulus(&[0.0, 0.0], 1.0, 0.5).is_err());
        assert!(DomainSpec::ball(&[0.0, 0.0], -1.0).is_err());
    }
}
