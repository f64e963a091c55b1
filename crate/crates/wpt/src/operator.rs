//! The operator family: weighted eigenvalue sums, Pucci extremal operators,
//! partial traces and the min-max operator, plus their duals and the sampled
//! Isaacs / Bellman representations.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::sampling::{orthogonal_complement, unit_directions, FrameSet, DEFAULT_SAMPLING_SEED};
use crate::weights::Weights;

/// Which tail of the spectrum a partial trace sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// `P_k^-`: the k smallest eigenvalues.
    Lower,
    /// `P_k^+`: the k largest eigenvalues.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `M_a(X) = sum_i a_i lambda_i(X)`.
    Weighted(Weights),
    /// Maximal Pucci operator `M+_{lambda,Lambda}`.
    PucciPlus { lambda: f64, big_lambda: f64 },
    /// Minimal Pucci operator `M-_{lambda,Lambda}`.
    PucciMinus { lambda: f64, big_lambda: f64 },
    /// Partial trace `P_k^{+/-}`.
    PartialTrace { k: usize, sign: Sign },
    /// `a1 lambda_1 + an lambda_n`, the Isaacs prototype.
    MinMax { a1: f64, an: f64 },
}

impl OperatorSpec {
    pub fn weighted(a: &[f64]) -> Result<Self> {
        Ok(Self::Weighted(Weights::new(a)?))
    }

    pub fn pucci_plus(lambda: f64, big_lambda: f64) -> Result<Self> {
        check_pucci(lambda, big_lambda)?;
        Ok(Self::PucciPlus { lambda, big_lambda })
    }

    pub fn pucci_minus(lambda: f64, big_lambda: f64) -> Result<Self> {
        check_pucci(lambda, big_lambda)?;
        Ok(Self::PucciMinus { lambda, big_lambda })
    }

    pub fn partial_trace(k: usize, sign: Sign) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOperator("partial trace requires k >= 1".into()));
        }
        Ok(Self::PartialTrace { k, sign })
    }

    pub fn minmax(a1: f64, an: f64) -> Result<Self> {
        if !(a1 >= 0.0 && an >= 0.0) || a1 + an <= 0.0 {
            return Err(Error::InvalidOperator(
                "minmax weights must be non-negative, not both zero".into(),
            ));
        }
        Ok(Self::MinMax { a1, an })
    }

    /// The dual operator `F~(X) = -F(-X)`.
    pub fn dual(&self) -> OperatorSpec {
        match self {
            Self::Weighted(w) => Self::Weighted(w.reversed()),
            Self::PucciPlus { lambda, big_lambda } => Self::PucciMinus {
                lambda: *lambda,
                big_lambda: *big_lambda,
            },
            Self::PucciMinus { lambda, big_lambda } => Self::PucciPlus {
                lambda: *lambda,
                big_lambda: *big_lambda,
            },
            Self::PartialTrace { k, sign } => Self::PartialTrace {
                k: *k,
                sign: match sign {
                    Sign::Lower => Sign::Upper,
                    Sign::Upper => Sign::Lower,
                },
            },
            Self::MinMax { a1, an } => Self::MinMax { a1: *an, an: *a1 },
        }
    }

    /// Evaluates the operator on a symmetric matrix.
    pub fn eval(&self, x: &SymMatrix) -> Result<f64> {
        let lam = x.eigenvalues();
        self.eval_on_sorted(&lam)
    }

    /// Evaluates the operator on an already ascending eigenvalue list.
    pub fn eval_on_sorted(&self, lam: &[f64]) -> Result<f64> {
        let n = lam.len();
        match self {
            Self::Weighted(w) => {
                if w.dim() != n {
                    return Err(Error::DimensionMismatch { expected: w.dim(), got: n });
                }
                Ok(w.coeffs().iter().zip(lam).map(|(a, l)| a * l).sum())
            }
            Self::PucciPlus { lambda, big_lambda } => {
                let (tp, tm) = trace_parts(lam);
                Ok(big_lambda * tp - lambda * tm)
            }
            Self::PucciMinus { lambda, big_lambda } => {
                let (tp, tm) = trace_parts(lam);
                Ok(lambda * tp - big_lambda * tm)
            }
            Self::PartialTrace { k, sign } => {
                if *k > n {
                    return Err(Error::InvalidOperator(format!(
                        "partial trace k={k} exceeds dimension {n}"
                    )));
                }
                Ok(match sign {
                    Sign::Lower => lam[..*k].iter().sum(),
                    Sign::Upper => lam[n - *k..].iter().sum(),
                })
            }
            Self::MinMax { a1, an } => Ok(a1 * lam[0] + an * lam[n - 1]),
        }
    }

    /// Sum of the weight magnitudes the operator applies to eigenvalues;
    /// the Lipschitz constant with respect to the trace norm.
    pub fn weight_bound(&self, n: usize) -> f64 {
        match self {
            Self::Weighted(w) => w.total(),
            Self::PucciPlus { big_lambda, .. } | Self::PucciMinus { big_lambda, .. } => {
                n as f64 * big_lambda
            }
            Self::PartialTrace { k, .. } => *k as f64,
            Self::MinMax { a1, an } => a1 + an,
        }
    }

    /// The weight vector in dimension n, when the operator is a weighted
    /// eigenvalue sum (everything except Pucci).
    pub fn as_weights(&self, n: usize) -> Option<Weights> {
        match self {
            Self::Weighted(w) => {
                if w.dim() == n {
                    Some(w.clone())
                } else {
                    None
                }
            }
            Self::MinMax { a1, an } => Weights::minmax(*a1, *an, n).ok(),
            Self::PartialTrace { k, sign } => match sign {
                Sign::Lower => Weights::partial_trace_lower(*k, n).ok(),
                Sign::Upper => Weights::partial_trace_upper(*k, n).ok(),
            },
            Self::PucciPlus { .. } | Self::PucciMinus { .. } => None,
        }
    }
}

fn check_pucci(lambda: f64, big_lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && big_lambda >= lambda) {
        return Err(Error::InvalidOperator(
            "pucci requires 0 < lambda <= Lambda".into(),
        ));
    }
    Ok(())
}

/// `(Tr X+, Tr X-)` from the eigenvalues; both non-negative.
fn trace_parts(lam: &[f64]) -> (f64, f64) {
    let tp: f64 = lam.iter().filter(|&&l| l > 0.0).sum();
    let tm: f64 = lam.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    (tp, tm)
}

/// Two-sided sampled Isaacs estimate of the min-max operator
/// `M(X) = lambda_1 + lambda_n`.
///
/// For each sampled direction `xi` the inner optimization over `eta _|_ xi`
/// is done exactly on the restriction of X to the orthogonal hyperplane, so
/// the sup-inf sweep stays a true lower bound and the inf-sup sweep a true
/// upper bound; both tighten monotonically as directions are added.
pub fn isaacs_estimate(x: &SymMatrix, samples: usize) -> Result<(f64, f64)> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::Sampling("need dimension >= 2".into()));
    }
    let dirs = unit_directions(n, samples, DEFAULT_SAMPLING_SEED)?;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for xi in &dirs {
        let basis = orthogonal_complement(xi);
        let m = basis.len();
        let mut restricted = vec![0.0; m * m];
        // B_pq = <X b_p, b_q>
        for p in 0..m {
            for q in p..m {
                let mut s = 0.0;
                for i in 0..n {
                    let mut row = 0.0;
                    for j in 0..n {
                        row += x.get(i, j) * basis[p][j];
                    }
                    s += row * basis[q][i];
                }
                restricted[p * m + q] = s;
                restricted[q * m + p] = s;
            }
        }
        let rl = SymMatrix::new(m, &restricted)?.eigenvalues();
        let head = x.quad_form(xi);
        lower = lower.max(head + rl[0]);
        upper = upper.min(head + rl[m - 1]);
    }
    Ok((lower, upper))
}

/// One-sided sampled Bellman estimate of the partial trace `P_k^{+/-}`:
/// the best frame trace over the supplied k-frames. For `Sign::Upper` this
/// converges to `P_k^+` from below, for `Sign::Lower` to `P_k^-` from above.
pub fn bellman_estimate(k: usize, sign: Sign, x: &SymMatrix, frames: &FrameSet) -> Result<f64> {
    if frames.frames.is_empty() {
        return Err(Error::Sampling("empty frame set".into()));
    }
    if frames.k != k || frames.n != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: frames.n });
    }
    let values = frames.frames.iter().map(|f| {
        f.iter().map(|v| x.quad_form(v)).sum::<f64>()
    });
    Ok(match sign {
        Sign::Upper => values.fold(f64::NEG_INFINITY, f64::max),
        Sign::Lower => values.fold(f64::INFINITY, f64::min),
    })
}
