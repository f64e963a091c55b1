//! Property tests for the operator family and the discrete scheme.

use proptest::prelude::*;
use wpt::domain::DomainSpec;
use wpt::expr::Expr;
use wpt::grid::build_grid;
use wpt::matrix::SymMatrix;
use wpt::operator::{OperatorSpec, Sign};
use wpt::scheme::{Backend, Discretization};
use wpt::weights::Weights;

fn sym(n: usize, upper: Vec<f64>) -> SymMatrix {
    let mut e = vec![0.0; n * n];
    let mut it = upper.into_iter();
    for i in 0..n {
        for j in i..n {
            let v = it.next().unwrap();
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    SymMatrix::new(n, &e).unwrap()
}

fn sym3() -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-10.0..10.0f64, 6).prop_map(|v| sym(3, v))
}

fn psd3() -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0..2.0f64, 9).prop_map(|g| SymMatrix::identity(3).congruence(&g).unwrap())
}

fn weights3() -> impl Strategy<Value = Weights> {
    prop::collection::vec(0.0..3.0f64, 3)
        .prop_filter("not all zero", |a| a.iter().sum::<f64>() > 0.1)
        .prop_map(|a| Weights::new(&a).unwrap())
}

fn operators3() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        weights3().prop_map(OperatorSpec::Weighted),
        (0.1..1.0f64, 1.0..3.0f64).prop_map(|(l, b)| OperatorSpec::pucci_plus(l, b).unwrap()),
        (0.1..1.0f64, 1.0..3.0f64).prop_map(|(l, b)| OperatorSpec::pucci_minus(l, b).unwrap()),
        (1usize..=3).prop_map(|k| OperatorSpec::partial_trace(k, Sign::Lower).unwrap()),
        (1usize..=3).prop_map(|k| OperatorSpec::partial_trace(k, Sign::Upper).unwrap()),
        (0.0..2.0f64, 0.0..2.0f64)
            .prop_filter("not both zero", |(a, b)| a + b > 0.1)
            .prop_map(|(a1, an)| OperatorSpec::minmax(a1, an).unwrap()),
    ]
}

proptest! {
    #[test]
    fn degenerate_ellipticity(op in operators3(), x in sym3(), p in psd3()) {
        let fx = op.eval(&x).unwrap();
        let fxp = op.eval(&x.add(&p).unwrap()).unwrap();
        prop_assert!(fxp >= fx - 1e-9, "{fx} vs {fxp}");
    }

    #[test]
    fn positive_homogeneity(op in operators3(), x in sym3(), kappa in 0.01..20.0f64) {
        let lhs = op.eval(&x.scale(kappa)).unwrap();
        let rhs = kappa * op.eval(&x).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() / scale < 1e-10);
    }

    #[test]
    fn duality_identity(op in operators3(), x in sym3()) {
        let lhs = op.dual().eval(&x.scale(-1.0)).unwrap();
        let rhs = -op.eval(&x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn dual_is_involutive(op in operators3(), x in sym3()) {
        let lhs = op.dual().dual().eval(&x).unwrap();
        let rhs = op.eval(&x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn weighted_two_sided_bounds(w in weights3(), x in sym3()) {
        let lam = x.eigenvalues();
        let v = OperatorSpec::Weighted(w.clone()).eval(&x).unwrap();
        let tol = 1e-9 * (1.0 + v.abs());
        prop_assert!(w.total() * lam[0] <= v + tol);
        prop_assert!(v <= w.total() * lam[2] + tol);
    }

    #[test]
    fn pucci_sandwich_class_a(w in weights3(), x in sym3()) {
        // only class A weights admit the sandwich with constants (a*/n, |a|)
        prop_assume!(w.a_star() > 1e-3);
        let v = OperatorSpec::Weighted(w.clone()).eval(&x).unwrap();
        let lo = OperatorSpec::pucci_minus(w.a_star() / 3.0, w.total()).unwrap().eval(&x).unwrap();
        let hi = OperatorSpec::pucci_plus(w.a_star() / 3.0, w.total()).unwrap().eval(&x).unwrap();
        let tol = 1e-9 * (1.0 + v.abs());
        prop_assert!(lo <= v + tol && v <= hi + tol);
    }

    #[test]
    fn eigenvalue_sub_superadditivity(x in sym3(), y in sym3()) {
        let lx = x.eigenvalues();
        let ly = y.eigenvalues();
        let lxy = x.add(&y).unwrap().eigenvalues();
        prop_assert!(lxy[0] >= lx[0] + ly[0] - 1e-9);
        prop_assert!(lxy[2] <= lx[2] + ly[2] + 1e-9);
    }

    #[test]
    fn partial_trace_duality_swaps_sign(k in 1usize..=3, x in sym3()) {
        let p_minus = OperatorSpec::partial_trace(k, Sign::Lower).unwrap();
        let p_plus = OperatorSpec::partial_trace(k, Sign::Upper).unwrap();
        let lhs = p_minus.eval(&x).unwrap();
        let rhs = -p_plus.eval(&x.scale(-1.0)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
    }
}

fn monotone_ops() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        (0.0..2.0f64, 0.0..2.0f64)
            .prop_filter("not both zero", |(a, b)| a + b > 0.1)
            .prop_map(|(a1, an)| OperatorSpec::minmax(a1, an).unwrap()),
        (1usize..=2).prop_map(|k| OperatorSpec::partial_trace(k, Sign::Lower).unwrap()),
        (1usize..=2).prop_map(|k| OperatorSpec::partial_trace(k, Sign::Upper).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The discrete operator never decreases when a neighbor grows and
    /// never increases when the center grows: the scheme analog of
    /// degenerate ellipticity.
    #[test]
    fn monotone_backend_is_monotone(
        op in monotone_ops(),
        values in prop::collection::vec(-1.0..1.0f64, 81),
        bump_idx in 0usize..81,
        bump in 0.0..0.5f64,
    ) {
        let d = DomainSpec::boxed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let grid = build_grid(&d, 0.125, &Expr::Zero).unwrap();
        let disc = Discretization::new(&d, &grid, &op, Backend::Monotone, 2, &Expr::Zero).unwrap();
        let center = grid.index(&[4, 4]);
        let base = disc.apply_at_node(&values, center);
        let mut bumped = values.clone();
        bumped[bump_idx] += bump;
        let after = disc.apply_at_node(&bumped, center);
        if bump_idx == center {
            prop_assert!(after <= base + 1e-12);
        } else {
            prop_assert!(after >= base - 1e-12);
        }
    }
}
