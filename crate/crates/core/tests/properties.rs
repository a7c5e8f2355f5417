use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use decaylab::bessel::{coeff_tables, f_deriv, f_eval};
use decaylab::cantor::{build_cantor, fourier_transform, CantorSpec};
use decaylab::decay::{
    dual_parameter_set, pair, DistributionRep, DistributionSpec, FamilyTarget, GaussianTest, ParameterPair,
    SampledFunction, TestFamily, TestFunction,
};
use decaylab::decay::Derivative;
use decaylab::fbi::{alpha_form, associated_function, fbi_constant, fbi_numeric, japanese_bracket, WeightSequence};
use decaylab::index::MultiIndex;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // Insert n-1 at each position; moving it left by k positions flips the sign k times.
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let flips = p.len() - pos;
            out.push((q, if flips % 2 == 0 { s } else { -s }));
        }
    }
    out
}

fn leibniz_det(m: &[Vec<Complex64>]) -> Complex64 {
    permutations(m.len())
        .into_iter()
        .map(|(p, s)| p.iter().enumerate().fold(c(s, 0.0), |acc, (i, &j)| acc * m[i][j]))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_quotient_derivative_identity(m in 0.0f64..3.0, r in 0.0f64..40.0) {
        // f_m' = -r f_{m+1}
        let table = coeff_tables(2).unwrap();
        let lhs = f_deriv(m, 1, r, &table).unwrap();
        let rhs = -r * f_eval(m + 1.0, r).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn cantor_transform_bounded_and_hermitian(seed in 0u64..1000, xi in -1e4f64..1e4) {
        let mu = build_cantor(&CantorSpec::random_half(2, seed)).unwrap();
        let v = fourier_transform(&mu, &[xi, -xi]);
        prop_assert!(v[0].norm() <= 1.0 + 1e-12);
        prop_assert!((v[0] - v[1].conj()).norm() < 1e-12);
    }

    #[test]
    fn pairing_is_linear_in_the_distribution(
        re in -3.0f64..3.0, im in -3.0f64..3.0, x0 in -1.0f64..1.0, a in 0.3f64..3.0,
    ) {
        let t = DistributionRep::PointMassDerivative {
            location: vec![x0, 0.5],
            gamma: MultiIndex::new(vec![1, 1]).unwrap(),
            scale: c(1.0, 0.0),
        };
        let s = t.scaled(c(re, im)).unwrap();
        let phi = GaussianTest { d: 2, a };
        let alpha = MultiIndex::new(vec![1, 0]).unwrap();
        let beta = MultiIndex::new(vec![0, 2]).unwrap();
        let base = pair(&t, &alpha, &beta, &phi).unwrap();
        let scaled = pair(&s, &alpha, &beta, &phi).unwrap();
        prop_assert!((scaled - base * c(re, im)).norm() <= 1e-10 * (1.0 + scaled.norm()));
    }

    #[test]
    fn dual_parameter_set_is_an_involution(q in 1.05f64..20.0, n in 0u32..3) {
        let p = ParameterPair::total_order(2, n, q).unwrap();
        let back = dual_parameter_set(&dual_parameter_set(&p).unwrap()).unwrap();
        prop_assert!((back.q - p.q).abs() <= 1e-12 * p.q);
        prop_assert_eq!(back.entries, p.entries);
    }

    #[test]
    fn associated_function_is_monotone_and_convex(s in 1.0f64..3.0, t in 0.5f64..50.0, h in 0.01f64..0.5) {
        let w = WeightSequence::gevrey(s, 400).unwrap();
        let m = |t: f64| associated_function(&w, t, 399).unwrap().0;
        let (lo, mid, hi) = (m(t * (-h).exp()), m(t), m(t * h.exp()));
        prop_assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12);
        // Convex in ln t.
        prop_assert!(mid <= 0.5 * (lo + hi) + 1e-9);
    }

    #[test]
    fn alpha_form_matches_leibniz_determinant(
        d in 1usize..=3,
        x in prop::collection::vec(-5.0f64..5.0, 3),
        xi in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        let (x, xi) = (&x[..d], &xi[..d]);
        let br = japanese_bracket(xi);
        let m: Vec<Vec<Complex64>> = (0..d)
            .map(|i| (0..d).map(|j| c(if i == j { 1.0 } else { 0.0 }, x[i] * xi[j] / br)).collect())
            .collect();
        let want = leibniz_det(&m);
        let got = alpha_form(x, xi).unwrap();
        prop_assert!((got - want).norm() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn fbi_constant_never_vanishes(
        d in 1usize..=2,
        x in prop::collection::vec(-50.0f64..50.0, 2),
        xi in prop::collection::vec(-50.0f64..50.0, 2),
    ) {
        let v = fbi_constant(&x[..d], &xi[..d]).unwrap();
        prop_assert!(v.norm() > 0.0 && v.norm().is_finite());
    }
}

#[test]
fn derivative_transfers_to_the_test_function() {
    let gaussian = DistributionSpec::SampledGaussian {
        d: 2,
        n: 41,
        step: 0.4,
        width: 1.0,
    }
    .build()
    .unwrap();
    let delta = DistributionRep::PointMassDerivative {
        location: vec![0.3, -0.2],
        gamma: MultiIndex::new(vec![0, 1]).unwrap(),
        scale: c(0.0, 2.0),
    };
    let circle = DistributionSpec::SurfaceMeasure { d: 2, resolution: 64 }.build().unwrap();
    let phi: Arc<dyn TestFunction> = Arc::new(GaussianTest { d: 2, a: 0.7 });
    let zero = MultiIndex::zero(2);
    for t in [&gaussian, &delta, &circle] {
        for alpha in [vec![1, 0], vec![1, 1], vec![0, 2]] {
            let alpha = MultiIndex::new(alpha).unwrap();
            let lhs = pair(t, &alpha, &zero, phi.as_ref()).unwrap();
            let moved = Derivative {
                inner: phi.clone(),
                alpha: alpha.clone(),
            };
            let sign = if alpha.order().is_multiple_of(2) { 1.0 } else { -1.0 };
            let rhs = pair(t, &zero, &zero, &moved).unwrap() * sign;
            assert!(
                (lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()),
                "{} alpha {alpha}: {lhs} vs {rhs}",
                t.name()
            );
        }
    }
}

#[test]
fn cone_ladder_norms_increase() {
    let fam = TestFamily::standard(2, FamilyTarget::Direction(vec![1.0, 0.0]), 0.5).unwrap();
    assert!(fam.ladder.windows(2).all(|w| w[1] > w[0]));
    for p in [1.0, 2.0, 4.0] {
        let norms: Vec<f64> = fam.ladder.iter().map(|&l| fam.member_norm(l, 1.0, p)).collect();
        assert!(norms.windows(2).all(|w| w[1] > w[0]));
    }
    let ball = TestFamily::standard(2, FamilyTarget::Zero, 0.5).unwrap();
    let norms: Vec<f64> = ball.ladder.iter().map(|&l| ball.member_norm(l, 1.0, 2.0)).collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn fbi_numeric_is_linear() {
    let f = SampledFunction::from_fn(1, 401, 0.1, |x| c((-x[0] * x[0]).exp(), x[0])).unwrap();
    let g = SampledFunction::from_fn(1, 401, 0.1, |x| c(x[0].cos(), 0.0)).unwrap();
    let (a, b) = (c(2.0, -1.0), c(-0.5, 3.0));
    let h = SampledFunction::new(
        vec![-20.0],
        0.1,
        vec![401],
        f.values().iter().zip(g.values()).map(|(u, v)| a * u + b * v).collect(),
    )
    .unwrap();
    for (x, xi) in [(0.0, 1.0), (1.5, -3.0), (-2.0, 0.5)] {
        let lhs = fbi_numeric(&h, &[x], &[xi], 5.0).unwrap();
        let rhs = a * fbi_numeric(&f, &[x], &[xi], 5.0).unwrap() + b * fbi_numeric(&g, &[x], &[xi], 5.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}
