//! Deterministic direction and frame sampling on the unit sphere.
//!
//! 2D uses uniformly spaced angles, 3D a Fibonacci lattice, and higher
//! dimensions a seeded Gaussian draw. The coordinate frame is always
//! included so eigenvector-aligned test cases resolve exactly.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_ANGLE: f64 = 2.399963229728653; // pi * (3 - sqrt 5)

/// Seed used whenever a sampler needs randomness but the caller did not
/// provide any; keeps the one-sided estimates reproducible.
pub const DEFAULT_SAMPLING_SEED: u64 = 0x77c0_51de;

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}

/// `count` unit directions in dimension `n`, coordinate axes first.
pub fn unit_directions(n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count < n {
        return Err(Error::Sampling(format!(
            "need at least {n} directions, got {count}"
        )));
    }
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(count);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e);
    }
    let extra = count - n;
    match n {
        2 => {
            for k in 0..extra {
                // angles in [0, pi): directions are used up to sign
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / extra.max(1) as f64;
                dirs.push(vec![theta.cos(), theta.sin()]);
            }
        }
        3 => {
            for k in 0..extra {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / extra.max(1) as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = GOLDEN_ANGLE * k as f64;
                dirs.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while dirs.len() < count {
                let mut v: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
                if normalize(&mut v) {
                    dirs.push(v);
                }
            }
        }
    }
    Ok(dirs)
}

/// One standard normal via Box-Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// An orthonormal basis of the hyperplane orthogonal to `xi`, by
/// Gram-Schmidt over the coordinate axes (the axis most parallel to `xi`
/// is dropped).
pub fn orthogonal_complement(xi: &[f64]) -> Vec<Vec<f64>> {
    let n = xi.len();
    let skip = (0..n)
        .max_by(|&a, &b| xi[a].abs().partial_cmp(&xi[b].abs()).unwrap())
        .unwrap();
    let mut basis: Vec<Vec<f64>> = vec![xi.to_vec()];
    for i in 0..n {
        if i == skip {
            continue;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        if normalize(&mut v) {
            basis.push(v);
        }
    }
    basis.remove(0);
    basis
}

/// A set of orthonormal k-frames in dimension n, always containing the
/// coordinate k-frame; the rest come from QR of seeded Gaussian draws.
#[derive(Debug, Clone)]
pub struct FrameSet {
    pub n: usize,
    pub k: usize,
    pub frames: Vec<Vec<Vec<f64>>>,
}

impl FrameSet {
    pub fn sample(n: usize, k: usize, count: usize, seed: u64) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::Sampling(format!("k={k} out of range 1..={n}")));
        }
        if count == 0 {
            return Err(Error::Sampling("empty frame set".into()));
        }
        let mut frames = Vec::with_capacity(count);
        let coord: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        frames.push(coord);
        if k == 1 {
            // directions double as 1-frames
            let dirs = unit_directions(n, (count - 1).max(n), seed)?;
            for d in dirs.into_iter().take(count - 1) {
                frames.push(vec![d]);
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while frames.len() < count {
                if let Some(f) = random_frame(n, k, &mut rng) {
                    frames.push(f);
                }
            }
        }
        Ok(Self { n, k, frames })
    }

    /// Adds the eigenframe columns of an explicit orthonormal basis, e.g.
    /// from a spectral decomposition (row-major `n x n`, columns taken
    /// `which`).
    pub fn push_columns(&mut self, basis: &[f64], which: &[usize]) {
        let n = self.n;
        let frame: Vec<Vec<f64>> = which
            .iter()
            .map(|&c| (0..n).map(|r| basis[r * n + c]).collect())
            .collect();
        self.frames.push(frame);
    }
}

fn random_frame<R: Rng>(n: usize, k: usize, rng: &mut R) -> Option<Vec<Vec<f64>>> {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        for b in &frame {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        if !normalize(&mut v) {
            return None;
        }
        frame.push(v);
    }
    Some(frame)
}

/// A random n x n orthogonal matrix (row-major), for rotation-invariance
/// checks.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        if let Some(frame) = random_frame(n, n, rng) {
            let mut m = vec![0.0; n * n];
            for (col, v) in frame.iter().enumerate() {
                for row in 0..n {
                    m[row * n + col] = v[row];
                }
            }
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_start_with_axes() {
        let dirs = unit_directions(3, 50, 1).unwrap();
        assert_eq!(dirs.len(), 50);
        assert_eq!(dirs[0], vec![1.0, 0.0, 0.0]);
        for d in &dirs {
            let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_directions_rejected() {
        assert!(unit_directions(3, 2, 0).is_err());
    }

    #[test]
    fn complement_is_orthonormal() {
        let xi = {
            let mut v = vec![1.0, 2.0, -0.5, 0.25];
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            v
        };
        let basis = orthogonal_complement(&xi);
        assert_eq!(basis.len(), 3);
        for (i, b) in basis.iter().enumerate() {
            let dot_xi: f64 = b.iter().zip(&xi).map(|(x, y)| x * y).sum();
            assert!(dot_xi.abs() < 1e-12);
            for b2 in basis.iter().skip(i + 1) {
                let dot: f64 = b.iter().zip(b2).map(|(x, y)| x * y).sum();
                assert!(dot.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frames_orthonormal() {
        let fs = FrameSet::sample(4, 2, 20, 7).unwrap();
        assert_eq!(fs.frames.len(), 20);
        for f in &fs.frames {
            for i in 0..2 {
                for j in 0..2 {
                    let dot: f64 = f[i].iter().zip(&f[j]).map(|(x, y)| x * y).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn orthogonal_matrix_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let q = random_orthogonal(n, &mut rng);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| q[k * n + i] * q[k * n + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }
}
