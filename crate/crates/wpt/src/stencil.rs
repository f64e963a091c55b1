//! Wide-stencil direction sets: integer lattice directions with coprime
//! components up to a max-norm order p, plus the orthogonal frames built
//! from them. Directions discretize the unit sphere in the min/max
//! representation of the operators.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct StencilSet {
    dim: usize,
    order: usize,
    /// Lattice directions up to sign, coordinate axes first.
    directions: Vec<Vec<i64>>,
    /// Index tuples into `directions` forming mutually orthogonal k-frames,
    /// keyed by k-1. The coordinate frame is always frames[k-1][0].
    frames: Vec<Vec<Vec<usize>>>,
}

impl StencilSet {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Grid("stencil dimension must be 2 or 3".into()));
        }
        if order < 1 {
            return Err(Error::Grid("stencil order must be >= 1".into()));
        }
        let directions = enumerate_directions(dim, order as i64);
        let frames = build_frames(dim, &directions);
        Ok(Self { dim, order, directions, frames })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn directions(&self) -> &[Vec<i64>] {
        &self.directions
    }

    /// Mutually orthogonal k-tuples of direction indices.
    pub fn frames(&self, k: usize) -> &[Vec<usize>] {
        &self.frames[k - 1]
    }

    pub fn norm_sq(&self, idx: usize) -> f64 {
        self.directions[idx].iter().map(|&c| (c * c) as f64).sum()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn enumerate_directions(dim: usize, p: i64) -> Vec<Vec<i64>> {
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    // axes first so the coordinate frame is at known indices
    for i in 0..dim {
        let mut e = vec![0i64; dim];
        e[i] = 1;
        dirs.push(e);
    }
    let mut push = |v: Vec<i64>| {
        let g = v.iter().fold(0, |acc, &c| gcd(acc, c));
        if g != 1 {
            return;
        }
        // canonical sign: first nonzero component positive
        let canonical = match v.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => v.iter().map(|&x| -x).collect(),
            _ => v.clone(),
        };
        if !dirs.contains(&canonical) {
            dirs.push(canonical);
        }
    };
    match dim {
        2 => {
            for a in -p..=p {
                for b in -p..=p {
                    if a != 0 || b != 0 {
                        push(vec![a, b]);
                    }
                }
            }
        }
        3 => {
            for a in -p..=p {
                for b in -p..=p {
                    for c in -p..=p {
                        if a != 0 || b != 0 || c != 0 {
                            push(vec![a, b, c]);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    dirs
}

fn orthogonal(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() == 0
}

fn build_frames(dim: usize, dirs: &[Vec<i64>]) -> Vec<Vec<Vec<usize>>> {
    let m = dirs.len();
    let singles: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut pairs: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if orthogonal(&dirs[i], &dirs[j]) {
                pairs.push(vec![i, j]);
            }
        }
    }
    if dim == 2 {
        return vec![singles, pairs];
    }
    let mut triples: Vec<Vec<usize>> = Vec::new();
    for pair in &pairs {
        let (i, j) = (pair[0], pair[1]);
        for k in (j + 1)..m {
            if orthogonal(&dirs[i], &dirs[k]) && orthogonal(&dirs[j], &dirs[k]) {
                triples.push(vec![i, j, k]);
            }
        }
    }
    vec![singles, pairs, triples]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_2d() {
        let s = StencilSet::new(2, 1).unwrap();
        // axes, diagonal, antidiagonal
        assert_eq!(s.directions().len(), 4);
        assert_eq!(s.directions()[0], vec![1, 0]);
        assert_eq!(s.directions()[1], vec![0, 1]);
    }

    #[test]
    fn coprime_filter_2d() {
        let s = StencilSet::new(2, 2).unwrap();
        assert!(!s.directions().iter().any(|d| d == &vec![2, 2]));
        assert!(s.directions().iter().any(|d| d == &vec![2, 1]));
        // (7^2-1)/2 = 24 up to sign, minus 4 non-coprime at order 2:
        // total = 4 axes/diagonals + (2,1),(1,2),(2,-1)... = 8
        assert_eq!(s.directions().len(), 8);
    }

    #[test]
    fn coordinate_frame_is_first() {
        let s = StencilSet::new(3, 2).unwrap();
        assert_eq!(s.frames(3)[0], vec![0, 1, 2]);
        assert_eq!(s.frames(2)[0], vec![0, 1]);
        for f in s.frames(3) {
            let d = s.directions();
            assert!(orthogonal(&d[f[0]], &d[f[1]]));
            assert!(orthogonal(&d[f[0]], &d[f[2]]));
            assert!(orthogonal(&d[f[1]], &d[f[2]]));
        }
    }

    #[test]
    fn direction_counts_grow_with_order() {
        let c1 = StencilSet::new(3, 1).unwrap().directions().len();
        let c2 = StencilSet::new(3, 2).unwrap().directions().len();
        let c3 = StencilSet::new(3, 3).unwrap().directions().len();
        assert!(c1 < c2 && c2 < c3);
    }
}
