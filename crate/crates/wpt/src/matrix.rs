//! Dense real symmetric matrices at small fixed sizes (n = 2..5) with a
//! cyclic-Jacobi spectral decomposition.
//!
//! The eigenvalue list is always returned in ascending order, which is the
//! ordering every operator in this crate is defined against.

use crate::error::{Error, Result};

/// Relative asymmetry tolerated on construction before an input is rejected.
const SYM_REL_TOL: f64 = 1e-12;

/// An n-by-n real symmetric matrix, stored row-major.
///
/// Inputs are symmetrized as `(X + X^T)/2` on construction; discrete Hessians
/// are only symmetric up to rounding, so a small asymmetry is repaired rather
/// than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from row-major entries.
    ///
    /// Rejects non-finite entries and asymmetry beyond `1e-12` relative to
    /// the max-norm of the input.
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidMatrix("dimension must be >= 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let scale = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (entries[i * n + j] - entries[j * n + i]).abs();
                if d > SYM_REL_TOL * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetry {:e} at ({i},{j}) beyond tolerance",
                        d
                    )));
                }
            }
        }
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
            }
        }
        Ok(Self { n, entries: e })
    }

    /// Diagonal matrix from its diagonal entries.
    pub fn diag(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut e = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            e[i * n + i] = *v;
        }
        Self::new(n, &e)
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n]).expect("identity is valid")
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![0.0; n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Max-norm of the entries.
    pub fn norm_max(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Entrywise linear combination `alpha*self + beta*other`.
    pub fn lin_comb(&self, alpha: f64, other: &SymMatrix, beta: f64) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let e: Vec<f64> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(SymMatrix { n: self.n, entries: e })
    }

    pub fn scale(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Quadratic form `<Xv, v>`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.entries[i * n + j] * v[j];
            }
            s += row * v[i];
        }
        s
    }

    /// Congruence `R^T X R` for a (not necessarily orthogonal) square R,
    /// row-major.
    pub fn congruence(&self, r: &[f64]) -> Result<SymMatrix> {
        let n = self.n;
        if r.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: r.len() });
        }
        // t = X R
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.entries[i * n + k] * r[k * n + j];
                }
                t[i * n + j] = s;
            }
        }
        // e = R^T t, symmetrized against rounding
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += r[k * n + i] * t[k * n + j];
                }
                e[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (e[i * n + j] + e[j * n + i]);
                e[i * n + j] = avg;
                e[j * n + i] = avg;
            }
        }
        Ok(SymMatrix { n, entries: e })
    }

    /// Ascending eigenvalues via cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen_decomposition().0
    }

    /// Ascending eigenvalues together with the matching orthonormal
    /// eigenvectors (column `k` of the returned row-major matrix pairs with
    /// eigenvalue `k`).
    pub fn eigen_decomposition(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        jacobi_sweep(n, &mut a, &mut v);
        let mut order: Vec<usize> = (0..n).collect();
        let lam: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        order.sort_by(|&i, &j| lam[i].partial_cmp(&lam[j]).unwrap());
        let sorted: Vec<f64> = order.iter().map(|&i| lam[i]).collect();
        let mut vecs = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vecs[row * n + col] = v[row * n + src];
            }
        }
        (sorted, vecs)
    }

    /// Positive and negative parts `X = X+ - X-` with `X+ X- = 0`, via the
    /// spectral decomposition with eigenvalues clamped at zero.
    pub fn split_pos_neg(&self) -> (SymMatrix, SymMatrix) {
        let n = self.n;
        let (lam, q) = self.eigen_decomposition();
        let mut pos = vec![0.0; n * n];
        let mut neg = vec![0.0; n * n];
        for k in 0..n {
            let lp = lam[k].max(0.0);
            let ln = (-lam[k]).max(0.0);
            for i in 0..n {
                for j in 0..n {
                    let outer = q[i * n + k] * q[j * n + k];
                    pos[i * n + j] += lp * outer;
                    neg[i * n + j] += ln * outer;
                }
            }
        }
        (SymMatrix { n, entries: pos }, SymMatrix { n, entries: neg })
    }

    /// Serializes to one CSV line per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let row: Vec<String> =
                (0..self.n).map(|j| format!("{:.16e}", self.get(i, j))).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses a matrix from CSV text (one row per line).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::InvalidMatrix(format!("csv parse: {e}")))?);
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("csv matrix is not square".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(n, &entries)
    }
}

/// In-place cyclic Jacobi diagonalization; `a` ends diagonal, `v` accumulates
/// the rotations. Foolproof for symmetric matrices of these tiny sizes.
fn jacobi_sweep(n: usize, a: &mut [f64], v: &mut [f64]) {
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        let scale = (0..n).fold(0.0_f64, |m, i| m.max(a[i * n + i].abs())).max(1.0);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-angle root, per the classical recipe
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    // scrub rounding residue off the diagonal
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[i * n + j] = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_ascending() {
        let x = SymMatrix::diag(&[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(x.eigenvalues(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn identity_eigenvalues() {
        let x = SymMatrix::identity(3);
        assert_eq!(x.eigenvalues(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(SymMatrix::new(2, &[1.0, f64::NAN, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(SymMatrix::new(2, &[1.0, 2.0, 3.0, 1.0]).is_err());
    }

    #[test]
    fn eigen_sum_matches_trace() {
        let x = SymMatrix::new(
            3,
            &[2.0, -1.0, 0.5, -1.0, 3.0, 0.25, 0.5, 0.25, -1.0],
        )
        .unwrap();
        let sum: f64 = x.eigenvalues().iter().sum();
        assert!((sum - x.trace()).abs() <= 1e-10 * x.norm_max());
    }

    #[test]
    fn decomposition_reconstructs_matrix() {
        let x = SymMatrix::new(
            4,
            &[
                1.0, 0.3, -0.2, 0.7, 0.3, -2.0, 0.1, 0.0, -0.2, 0.1, 0.5, -0.9, 0.7,
                0.0, -0.9, 2.5,
            ],
        )
        .unwrap();
        let (lam, q) = x.eigen_decomposition();
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += q[i * n + k] * lam[k] * q[j * n + k];
                }
                assert!(
                    (s - x.get(i, j)).abs() <= 1e-10 * x.norm_max(),
                    "entry ({i},{j})"
                );
            }
        }
    }

    // Independent oracle for the random-4x4 example: bisection on the
    // characteristic polynomial det(X - tI), evaluated by Gaussian
    // elimination, bracketed by the Gershgorin bound.
    fn char_poly_roots(x: &SymMatrix) -> Vec<f64> {
        let n = x.dim();
        let det = |t: f64| -> f64 {
            let mut m: Vec<f64> = x.entries().to_vec();
            for i in 0..n {
                m[i * n + i] -= t;
            }
            let mut d = 1.0;
            for col in 0..n {
                let piv = (col..n)
                    .max_by(|&a, &b| {
                        m[a * n + col].abs().partial_cmp(&m[b * n + col].abs()).unwrap()
                    })
                    .unwrap();
                if m[piv * n + col].abs() < 1e-300 {
                    return 0.0;
                }
                if piv != col {
                    for k in 0..n {
                        m.swap(col * n + k, piv * n + k);
                    }
                    d = -d;
                }
                d *= m[col * n + col];
                for row in (col + 1)..n {
                    let f = m[row * n + col] / m[col * n + col];
                    for k in col..n {
                        m[row * n + k] -= f * m[col * n + k];
                    }
                }
            }
            d
        };
        let radius = 1.0
            + (0..n)
                .map(|i| (0..n).map(|j| x.get(i, j).abs()).sum::<f64>())
                .fold(0.0_f64, f64::max);
        // scan for sign changes, then bisect
        let steps = 20000;
        let mut roots = Vec::new();
        let mut prev_t = -radius;
        let mut prev_v = det(prev_t);
        for s in 1..=steps {
            let t = -radius + 2.0 * radius * (s as f64) / (steps as f64);
            let v = det(t);
            if prev_v == 0.0 {
                roots.push(prev_t);
            } else if prev_v * v < 0.0 {
                let (mut lo, mut hi) = (prev_t, t);
                let mut flo = prev_v;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = det(mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev_v = v;
        }
        roots
    }

    #[test]
    fn random_4x4_matches_char_poly_oracle() {
        let x = SymMatrix::new(
            4,
            &[
                0.8, -0.3, 0.6, 0.1, -0.3, 1.7, -0.5, 0.9, 0.6, -0.5, -1.1, 0.4, 0.1,
                0.9, 0.4, 0.2,
            ],
        )
        .unwrap();
        let lam = x.eigenvalues();
        let roots = char_poly_roots(&x);
        assert_eq!(roots.len(), 4, "oracle found all simple roots");
        for (l, r) in lam.iter().zip(&roots) {
            assert!((l - r).abs() < 1e-8, "jacobi {l} vs oracle {r}");
        }
    }

    #[test]
    fn pos_neg_split_properties() {
        let x = SymMatrix::new(3, &[1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, 0.25]).unwrap();
        let (p, m) = x.split_pos_neg();
        let back = p.sub(&m).unwrap();
        for (a, b) in back.entries().iter().zip(x.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(p.eigenvalues().iter().all(|&l| l >= -1e-12));
        assert!(m.eigenvalues().iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn csv_round_trip() {
        let x = SymMatrix::new(2, &[1.0, 0.125, 0.125, -3.5]).unwrap();
        let y = SymMatrix::from_csv(&x.to_csv()).unwrap();
        assert_eq!(x, y);
    }
}
