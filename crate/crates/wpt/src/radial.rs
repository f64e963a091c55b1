//! Exact radial solutions of `M_a(D^2 u) = 0` on the punctured space.
//!
//! A radial profile `u(x) = v(|x|)` has Hessian eigenvalues `v''(r)` (once,
//! radial direction) and `v'(r)/r` (n-1 times, tangential), so evaluating
//! the operator reduces to weighting the sorted two-value multiset. The
//! nontrivial solutions are power or logarithmic branches selected by the
//! sign of `a_1 - a^_1` and `a_n - a^_n`.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::weights::Weights;

/// Which closed-form branch solves `M_a(D^2 u) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// `|x|^{-gamma_n}` with `gamma_n = a^_n/a_n - 1 > 0` (requires `a^_n > a_n`).
    PowerNegative { gamma_n: f64 },
    /// `-log|x|` (requires `a^_n = a_n`).
    LogNegative,
    /// `|x|^{gamma_1}` with `gamma_1 = 1 - a^_1/a_1` in (0,1) (requires `a_1 > a^_1`).
    PowerPositive { gamma_1: f64 },
    /// `log|x|` (requires `a_1 = a^_1`).
    LogPositive,
}

/// A selected radial solution branch for a fixed weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    branch: Branch,
    dim: usize,
}

impl RadialSolution {
    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Profile value v(r).
    pub fn profile(&self, r: f64) -> f64 {
        match self.branch {
            Branch::PowerNegative { gamma_n } => r.powf(-gamma_n),
            Branch::LogNegative => -r.ln(),
            Branch::PowerPositive { gamma_1 } => r.powf(gamma_1),
            Branch::LogPositive => r.ln(),
        }
    }

    /// First derivative v'(r).
    pub fn profile_d1(&self, r: f64) -> f64 {
        match self.branch {
            Branch::PowerNegative { gamma_n } => -gamma_n * r.powf(-gamma_n - 1.0),
            Branch::LogNegative => -1.0 / r,
            Branch::PowerPositive { gamma_1 } => gamma_1 * r.powf(gamma_1 - 1.0),
            Branch::LogPositive => 1.0 / r,
        }
    }

    /// Second derivative v''(r).
    pub fn profile_d2(&self, r: f64) -> f64 {
        match self.branch {
            Branch::PowerNegative { gamma_n } => {
                gamma_n * (gamma_n + 1.0) * r.powf(-gamma_n - 2.0)
            }
            Branch::LogNegative => 1.0 / (r * r),
            Branch::PowerPositive { gamma_1 } => {
                gamma_1 * (gamma_1 - 1.0) * r.powf(gamma_1 - 2.0)
            }
            Branch::LogPositive => -1.0 / (r * r),
        }
    }

    /// Value at a point; the origin is outside every branch's domain.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.profile(self.radius(x)?))
    }

    /// Gradient `v'(r) x/|x|`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = self.radius(x)?;
        let vp = self.profile_d1(r);
        Ok(x.iter().map(|xi| vp * xi / r).collect())
    }

    /// Hessian `v'' P + (v'/r)(I - P)` with `P` the radial projector.
    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        let r = self.radius(x)?;
        let n = x.len();
        let vpp = self.profile_d2(r);
        let vp_r = self.profile_d1(r) / r;
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let p = x[i] * x[j] / (r * r);
                e[i * n + j] = vpp * p + vp_r * (if i == j { 1.0 } else { 0.0 } - p);
            }
        }
        SymMatrix::new(n, &e)
    }

    fn radius(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= 0.0 {
            return Err(Error::InvalidDomain(
                "radial branches are singular at the origin".into(),
            ));
        }
        Ok(r)
    }
}

/// `M_a` applied to the radial Hessian with second derivative `vpp` and
/// tangential curvature `vp_over_r`: the eigenvalue multiset
/// `{vpp, vp_over_r x (n-1)}` is sorted ascending before weighting.
pub fn radial_operator_value(w: &Weights, vpp: f64, vp_over_r: f64) -> f64 {
    let n = w.dim();
    let mut lam = vec![vp_over_r; n];
    lam[0] = vpp;
    lam.sort_by(|a, b| a.partial_cmp(b).unwrap());
    w.coeffs().iter().zip(&lam).map(|(a, l)| a * l).sum()
}

/// The primary radial solution branch for a weight vector, or `None` when no
/// listed sign condition holds.
///
/// When both an increasing and a decreasing branch apply (e.g. the n=2
/// Laplacian), the increasing one is primary; the other is reachable via
/// [`secondary_radial_solution`].
pub fn exact_radial_solution(w: &Weights) -> Option<RadialSolution> {
    increasing_branch(w).or_else(|| decreasing_branch(w))
}

/// The decreasing branch when it coexists with an increasing primary one.
pub fn secondary_radial_solution(w: &Weights) -> Option<RadialSolution> {
    match (increasing_branch(w), decreasing_branch(w)) {
        (Some(_), dec) => dec,
        _ => None,
    }
}

fn increasing_branch(w: &Weights) -> Option<RadialSolution> {
    let a1 = w.first();
    let hat1 = w.hat(1);
    if a1 > 0.0 && w.roughly_equal(a1, hat1) {
        Some(RadialSolution { branch: Branch::LogPositive, dim: w.dim() })
    } else if a1 > hat1 {
        Some(RadialSolution {
            branch: Branch::PowerPositive { gamma_1: 1.0 - hat1 / a1 },
            dim: w.dim(),
        })
    } else {
        None
    }
}

fn decreasing_branch(w: &Weights) -> Option<RadialSolution> {
    let an = w.last();
    let hatn = w.hat(w.dim());
    if an > 0.0 && w.roughly_equal(an, hatn) {
        Some(RadialSolution { branch: Branch::LogNegative, dim: w.dim() })
    } else if hatn > an && an > 0.0 {
        Some(RadialSolution {
            branch: Branch::PowerNegative { gamma_n: hatn / an - 1.0 },
            dim: w.dim(),
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_profile_solves_minmax() {
        // v = log r: vpp = -1/r^2, vp/r = 1/r^2
        let w = Weights::minmax(1.0, 1.0, 3).unwrap();
        for r in [0.1, 1.0, 7.5] {
            let v = radial_operator_value(&w, -1.0 / (r * r), 1.0 / (r * r));
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn trace_weights_give_laplacian() {
        let w = Weights::new(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let (vpp, vp_r) = (0.7, -0.3);
        let v = radial_operator_value(&w, vpp, vp_r);
        assert!((v - (vpp + 3.0 * vp_r)).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_weights_cube_root_profile() {
        // a = (3,1,1), v = r^{1/3} at r=1: vpp = -2/9, vp/r = 1/3
        let w = Weights::new(&[3.0, 1.0, 1.0]).unwrap();
        let v = radial_operator_value(&w, -2.0 / 9.0, 1.0 / 3.0);
        assert!(v.abs() < 1e-14, "got {v}");
    }

    #[test]
    fn branch_selection() {
        let log_pos = exact_radial_solution(&Weights::new(&[1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(log_pos.branch(), Branch::LogPositive);

        // 3D Laplacian: fundamental-solution decay r^{-1}
        let fund = exact_radial_solution(&Weights::new(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(fund.branch(), Branch::PowerNegative { gamma_n: 1.0 });

        let pow = exact_radial_solution(&Weights::new(&[3.0, 1.0, 1.0]).unwrap()).unwrap();
        match pow.branch() {
            Branch::PowerPositive { gamma_1 } => assert!((gamma_1 - 1.0 / 3.0).abs() < 1e-15),
            b => panic!("unexpected branch {b:?}"),
        }
    }

    #[test]
    fn laplacian_2d_has_both_branches() {
        let w = Weights::new(&[1.0, 1.0]).unwrap();
        let primary = exact_radial_solution(&w).unwrap();
        assert_eq!(primary.branch(), Branch::LogPositive);
        let secondary = secondary_radial_solution(&w).unwrap();
        assert_eq!(secondary.branch(), Branch::LogNegative);
    }

    #[test]
    fn eval_examples() {
        let log_pos = exact_radial_solution(&Weights::new(&[1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(log_pos.eval(&[1.0, 0.0, 0.0]).unwrap(), 0.0);

        let fund = exact_radial_solution(&Weights::new(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((fund.eval(&[0.5, 0.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);

        let pow = exact_radial_solution(&Weights::new(&[3.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((pow.eval(&[0.125, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn origin_rejected() {
        let sol = exact_radial_solution(&Weights::new(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(sol.eval(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn residual_vanishes_on_branches() {
        for a in [
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![3.0, 1.0, 1.0],
            vec![0.5, 2.0, 0.5],
            vec![1.0, 1.0],
        ] {
            let w = Weights::new(&a).unwrap();
            let Some(sol) = exact_radial_solution(&w) else { continue };
            for i in 0..100 {
                let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
                let vpp = sol.profile_d2(r);
                let vp_r = sol.profile_d1(r) / r;
                let scale = vpp.abs().max(vp_r.abs()).max(1e-300);
                let res = radial_operator_value(&w, vpp, vp_r) / scale;
                assert!(res.abs() < 1e-10, "weights {a:?} r={r}: {res}");
            }
        }
    }

    #[test]
    fn hessian_matches_profile_eigenvalues() {
        let sol = exact_radial_solution(&Weights::new(&[3.0, 1.0, 1.0]).unwrap()).unwrap();
        let x = [0.3, -0.4, 0.5];
        let r = 0.5_f64 * 2f64.sqrt();
        let h = sol.hessian(&x).unwrap();
        let lam = h.eigenvalues();
        let vpp = sol.profile_d2(r);
        let vp_r = sol.profile_d1(r) / r;
        let mut expect = vec![vpp, vp_r, vp_r];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (l, e) in lam.iter().zip(&expect) {
            assert!((l - e).abs() < 1e-10);
        }
    }
}
