//! Weight vectors for the operators `M_a(X) = sum_i a_i lambda_i(X)` and the
//! classes they fall into.

use crate::error::{Error, Result};

/// Comparisons like `a_1 = a_hat_1` are meant exactly; a relative slack of
/// this size absorbs rounding in derived quantities.
const EQ_REL_TOL: f64 = 1e-12;

/// A vector of n non-negative eigenvalue weights, at least one positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    a: Vec<f64>,
}

impl Weights {
    pub fn new(a: &[f64]) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidWeights("dimension must be >= 2".into()));
        }
        if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights(
                "weights must be finite and non-negative".into(),
            ));
        }
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidWeights("all-zero weights".into()));
        }
        Ok(Self { a: a.to_vec() })
    }

    /// The min-max weights `(a1, 0, ..., 0, an)` in dimension n.
    pub fn minmax(a1: f64, an: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidWeights("dimension must be >= 2".into()));
        }
        let mut a = vec![0.0; n];
        a[0] = a1;
        a[n - 1] = an;
        Self::new(&a)
    }

    /// Lower partial trace weights: k ones in front.
    pub fn partial_trace_lower(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidWeights(format!("k={k} out of range 1..={n}")));
        }
        let mut a = vec![0.0; n];
        for w in a.iter_mut().take(k) {
            *w = 1.0;
        }
        Self::new(&a)
    }

    /// Upper partial trace weights: k ones at the back.
    pub fn partial_trace_upper(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidWeights(format!("k={k} out of range 1..={n}")));
        }
        let mut a = vec![0.0; n];
        for w in a.iter_mut().skip(n - k) {
            *w = 1.0;
        }
        Self::new(&a)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.a
    }

    /// `|a| = a_1 + ... + a_n`.
    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    /// `a~ = |a|/n`, the arithmetic mean.
    pub fn mean(&self) -> f64 {
        self.total() / self.a.len() as f64
    }

    /// `a* = min(a_1, a_n)`.
    pub fn a_star(&self) -> f64 {
        self.a[0].min(self.a[self.a.len() - 1])
    }

    /// Complementary weight `a^_j = |a| - a_j` (1-based j).
    pub fn hat(&self, j: usize) -> f64 {
        self.total() - self.a[j - 1]
    }

    pub fn min_coeff(&self) -> f64 {
        self.a.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_coeff(&self) -> f64 {
        self.a.iter().cloned().fold(0.0, f64::max)
    }

    /// Reversed weight vector `a' = (a_n, ..., a_1)`, the dual weights.
    pub fn reversed(&self) -> Weights {
        let mut a = self.a.clone();
        a.reverse();
        Weights { a }
    }

    pub fn first(&self) -> f64 {
        self.a[0]
    }

    pub fn last(&self) -> f64 {
        self.a[self.a.len() - 1]
    }

    /// True when `x` and `y` agree up to rounding at the scale of the weights.
    pub fn roughly_equal(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= EQ_REL_TOL * self.total().max(1.0)
    }

    pub fn classify(&self) -> ClassTag {
        let n = self.a.len();
        let a1_pos = self.a[0] > 0.0;
        let an_pos = self.a[n - 1] > 0.0;
        let underline = self.min_coeff() > 0.0;
        ClassTag {
            in_a_bar: true,
            in_a1: a1_pos,
            in_an: an_pos,
            in_a: a1_pos && an_pos,
            in_underline_a: underline,
            ellipticity: if underline {
                Some((self.min_coeff(), self.max_coeff()))
            } else {
                None
            },
        }
    }
}

/// Membership flags for the operator classes, plus ellipticity constants in
/// the uniformly elliptic case.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTag {
    /// Always true for a valid weight vector.
    pub in_a_bar: bool,
    /// `a_1 > 0`.
    pub in_a1: bool,
    /// `a_n > 0`.
    pub in_an: bool,
    /// `a_1 > 0` and `a_n > 0`.
    pub in_a: bool,
    /// All weights positive: uniformly elliptic.
    pub in_underline_a: bool,
    /// `(min a_i, max a_i)` when uniformly elliptic.
    pub ellipticity: Option<(f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let w = Weights::new(&[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(w.total(), 3.0);
        assert_eq!(w.mean(), 1.0);
        assert_eq!(w.a_star(), 1.0);
        assert_eq!(w.hat(1), 1.0);
        assert_eq!(w.hat(3), 2.0);
        assert_eq!(w.reversed().coeffs(), &[1.0, 0.0, 2.0]);
    }

    #[test]
    fn rejects_all_zero_and_negative() {
        assert!(Weights::new(&[0.0, 0.0]).is_err());
        assert!(Weights::new(&[1.0, -0.1]).is_err());
    }

    #[test]
    fn minmax_is_in_class_a_not_underline() {
        let tag = Weights::new(&[1.0, 0.0, 1.0]).unwrap().classify();
        assert!(tag.in_a && tag.in_a1 && tag.in_an);
        assert!(!tag.in_underline_a);
        assert!(tag.ellipticity.is_none());
    }

    #[test]
    fn lower_partial_trace_in_a1_not_a() {
        // P2^- weights in n=3
        let tag = Weights::new(&[1.0, 1.0, 0.0]).unwrap().classify();
        assert!(tag.in_a1);
        assert!(!tag.in_an && !tag.in_a);
    }

    #[test]
    fn laplacian_uniformly_elliptic() {
        let tag = Weights::new(&[1.0, 1.0, 1.0]).unwrap().classify();
        assert!(tag.in_underline_a);
        assert_eq!(tag.ellipticity, Some((1.0, 1.0)));
    }
}
