use rffb_core::bounds::svm_error_propagation;
use rffb_core::downstream::*;
use rffb_core::rff::{sample_frequencies, FrequencyBasis};
use rffb_core::rng::Stream;
use rffb_core::Error;

fn random_regression(stream: &mut Stream, n: usize, d: usize) -> Dataset {
    let points = sample_ball(n, d, 2.0, stream);
    let targets = (0..n).map(|_| stream.standard_normal()).collect();
    Dataset::new(points, targets).unwrap()
}

#[test]
fn krr_scalar_case() {
    for &lambda in &[0.1, 1.0, 7.5] {
        let data = Dataset::new(vec![vec![0.3, -1.2]], vec![1.0]).unwrap();
        let model = krr_fit(&data, lambda, KernelMode::Exact).unwrap();
        assert!((model.dual_coefficients()[0] - 1.0 / (1.0 + lambda)).abs() < 1e-15);
        let h = krr_predict(&model, &[0.3, -1.2]).unwrap();
        assert!((h - 1.0 / (1.0 + lambda)).abs() < 1e-15);
    }
}

#[test]
fn krr_ridge_limit() {
    let data = smooth_regression(20, 2, 1.0, 0.1, 3).unwrap();
    let model = krr_fit(&data, 1e12, KernelMode::Exact).unwrap();
    for x in data.points() {
        assert!(krr_predict(&model, x).unwrap().abs() < 1e-10);
    }
}

#[test]
fn krr_residuals_on_random_instances() {
    let mut stream = Stream::new(99, 0);
    for i in 0..100 {
        let n = 1 + (i * 7) % 50;
        let d = 1 + i % 4;
        let data = random_regression(&mut stream, n, d);
        let lambda = 0.01 + (i as f64) / 20.0;
        let model = krr_fit(&data, lambda, KernelMode::Exact).unwrap();
        // Independent substitution check.
        let a = model.dual_coefficients();
        let mut res = 0.0;
        let mut norm = 0.0;
        for (j, xj) in data.points().iter().enumerate() {
            let row: f64 = data
                .points()
                .iter()
                .zip(a)
                .map(|(xk, ak)| {
                    let sq: f64 = xj.iter().zip(xk).map(|(p, q)| (p - q) * (p - q)).sum();
                    (-0.5 * sq).exp() * ak
                })
                .sum::<f64>()
                + lambda * a[j];
            res += (row - data.targets()[j]).powi(2);
            norm += data.targets()[j].powi(2);
        }
        assert!(res.sqrt() <= 1e-10 * norm.sqrt(), "instance {i}");
        assert!(model.relative_residual() <= 1e-10);
    }
}

#[test]
fn krr_far_point_and_linearity() {
    let data = smooth_regression(15, 2, 1.0, 0.1, 8).unwrap();
    let model = krr_fit(&data, 0.3, KernelMode::Exact).unwrap();
    let far = [40.0, -40.0];
    let a_norm: f64 = model
        .dual_coefficients()
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt();
    let dist: f64 = 40.0 * 2f64.sqrt() - 1.0;
    assert!(krr_predict(&model, &far).unwrap().abs() <= 15.0 * (-dist * dist / 2.0).exp() * a_norm);

    let doubled = Dataset::new(
        data.points().to_vec(),
        data.targets().iter().map(|y| 2.0 * y).collect(),
    )
    .unwrap();
    let model2 = krr_fit(&doubled, 0.3, KernelMode::Exact).unwrap();
    let basis = sample_frequencies(2, 64, 5).unwrap();
    let r1 = krr_fit(&data, 0.3, KernelMode::Rff(&basis)).unwrap();
    let r2 = krr_fit(&doubled, 0.3, KernelMode::Rff(&basis)).unwrap();
    for x in [[0.1, 0.2], [-0.5, 0.7]] {
        assert_eq!(
            krr_predict(&model2, &x).unwrap(),
            2.0 * krr_predict(&model, &x).unwrap()
        );
        assert_eq!(
            krr_predict(&r2, &x).unwrap(),
            2.0 * krr_predict(&r1, &x).unwrap()
        );
    }
}

#[test]
fn krr_rff_converges_at_large_d() {
    let data = smooth_regression(10, 2, 1.0, 0.1, 21).unwrap();
    let basis = sample_frequencies(2, 1_000_000, 21).unwrap();
    let exact = krr_fit(&data, 0.5, KernelMode::Exact).unwrap();
    let approx = krr_fit(&data, 0.5, KernelMode::Rff(&basis)).unwrap();
    for x in sample_ball(5, 2, 1.0, &mut Stream::new(21, 9)) {
        let gap = (krr_predict(&exact, &x).unwrap() - krr_predict(&approx, &x).unwrap()).abs();
        assert!(gap < 1e-2, "gap {gap}");
    }
}

#[test]
fn krr_predictions_are_permutation_invariant() {
    let data = smooth_regression(12, 3, 1.0, 0.1, 4).unwrap();
    let mut order: Vec<usize> = (0..12).rev().collect();
    order.swap(2, 7);
    let shuffled = Dataset::new(
        order.iter().map(|&i| data.points()[i].clone()).collect(),
        order.iter().map(|&i| data.targets()[i]).collect(),
    )
    .unwrap();
    let a = krr_fit(&data, 0.2, KernelMode::Exact).unwrap();
    let b = krr_fit(&shuffled, 0.2, KernelMode::Exact).unwrap();
    let x = [0.2, -0.1, 0.4];
    assert!((krr_predict(&a, &x).unwrap() - krr_predict(&b, &x).unwrap()).abs() < 1e-12);
}

#[test]
fn krr_gap_zero_for_exact_kernel_entries() {
    // Zero frequencies give ŝ ≡ 1 up to rounding, exact for coincident points.
    let basis = FrequencyBasis::from_vectors(1, &[vec![0.0], vec![0.0]]).unwrap();
    let data = Dataset::new(vec![vec![0.5], vec![0.5]], vec![1.0, 3.0]).unwrap();
    let check = krr_gap_check(&data, 0.5, &basis, &[vec![0.5]]).unwrap();
    assert!(check.u < 1e-15);
    assert!(check.gap < 1e-14);
    assert_eq!(check.m, 1.0);
    assert!(check.bound.unwrap() < 1e-14);

    let constant = Dataset::new(vec![vec![0.5], vec![0.1]], vec![2.0, 2.0]).unwrap();
    let check = krr_gap_check(&constant, 0.5, &basis, &[vec![0.5]]).unwrap();
    assert_eq!(check.bound, None);
    assert_eq!(check.holds, None);
}

#[test]
fn krr_gap_bound_monotone_in_lambda() {
    let mut prev = 0.0;
    for &lambda in &[4.0, 2.0, 1.0, 0.5, 0.25] {
        let b = krr_gap_bound(lambda, 0.8, 0.01);
        assert!(b > prev);
        prev = b;
    }
    let ratio = krr_gap_bound(0.25, 1.0, 0.01) / krr_gap_bound(0.5, 1.0, 0.01);
    assert!((ratio - (1.25 / 0.0625) / (1.5 / 0.25)).abs() < 1e-12);
}

#[test]
fn krr_gap_holds_on_a_few_seeds() {
    for seed in 0..5 {
        let data = smooth_regression(30, 3, 1.5, 0.1, seed).unwrap();
        let basis = FrequencyBasis::sample_stream(3, 2048, seed, 1).unwrap();
        let probes = sample_ball(20, 3, 1.5, &mut Stream::new(seed, 2));
        let check = krr_gap_check(&data, 0.5, &basis, &probes).unwrap();
        assert_eq!(check.holds, Some(true));
        assert!(check.residual_exact <= 1e-10 && check.residual_rff <= 1e-10);
    }
}

#[test]
fn svm_two_point_closed_form() {
    for &(dist, c0) in &[(6.0, 1.0), (2.0, 1.0), (2.0, 5.0), (9.0, 0.5)] {
        let data = Dataset::new(vec![vec![0.0], vec![dist]], vec![1.0, -1.0]).unwrap();
        let model = svm_fit(&data, c0, KernelMode::Exact, 1e-12).unwrap();
        let kappa = (-dist * dist / 2.0f64).exp();
        // Q = [[1, −κ], [−κ, 1]]; the unconstrained optimum 1/(1−κ) is
        // clipped to the box [0, C₀/2].
        let expected = (1.0 / (1.0 - kappa)).min(c0 / 2.0);
        for &a in model.dual() {
            assert!((a - expected).abs() < 1e-9, "{a} vs {expected}");
        }
        let h = svm_decision(&model, &[0.0]).unwrap();
        assert!((h - expected * (1.0 - kappa)).abs() < 1e-9);
    }
}

#[test]
fn svm_vanishing_regularization_weight() {
    let data = gaussian_blobs(20, 2, 2.0, 0.5, 1).unwrap();
    let model = svm_fit(&data, 1e-12, KernelMode::Exact, 1e-8).unwrap();
    for x in data.points() {
        assert!(svm_decision(&model, x).unwrap().abs() < 1e-12);
    }
}

#[test]
fn svm_rejects_bad_input() {
    let data = Dataset::new(vec![vec![0.0], vec![1.0]], vec![1.0, 0.5]).unwrap();
    assert!(matches!(
        svm_fit(&data, 1.0, KernelMode::Exact, 1e-8),
        Err(Error::InvalidArgument(_))
    ));
    let data = gaussian_blobs(40, 2, 0.5, 1.0, 2).unwrap();
    assert!(matches!(
        svm_fit_with_budget(&data, 100.0, KernelMode::Exact, 1e-14, 1),
        Err(Error::Convergence { .. })
    ));
}

#[test]
fn svm_gaps_are_certified_in_both_modes() {
    let data = gaussian_blobs(40, 2, 1.0, 1.0, 6).unwrap();
    let basis = sample_frequencies(2, 512, 6).unwrap();
    for mode in [KernelMode::Exact, KernelMode::Rff(&basis)] {
        let model = svm_fit(&data, 10.0, mode, 1e-8).unwrap();
        assert!(model.solver_gap() <= 1e-8);
        let cap = 10.0 / 40.0;
        assert!(model.dual().iter().all(|&a| (0.0..=cap).contains(&a)));
    }
    let rff = svm_fit(&data, 10.0, KernelMode::Rff(&basis), 1e-8).unwrap();
    assert_eq!(rff.weight_vector().unwrap().len(), 1024);
}

#[test]
fn svm_gap_holds_on_a_few_seeds() {
    for seed in 0..5 {
        let data = gaussian_blobs(60, 2, 3.0, 0.7, seed).unwrap();
        let basis = FrequencyBasis::sample_stream(2, 4096, seed, 1).unwrap();
        let probes = sample_ball(20, 2, 3.0, &mut Stream::new(seed, 2));
        let check = svm_gap_check(&data, 1.0, &basis, &probes, 1e-8).unwrap();
        assert!(check.holds);
        assert_eq!(check.propagation, svm_error_propagation(1.0, 60, check.u));
    }
}

#[test]
fn svm_bound_with_root_n_weight_shrinks_with_n() {
    let u = 0.01;
    let bounds: Vec<f64> = [30u64, 60, 120]
        .iter()
        .map(|&n| svm_error_propagation(1.0 / (n as f64).sqrt(), n, u))
        .collect();
    assert!(bounds[0] > bounds[1] && bounds[1] > bounds[2]);
}
