mod common;

use pgwt::imggraph::laplacian;
use pgwt::sgwt::{
    chebyshev_coeffs, chebyshev_eval, forward_chebyshev, forward_exact, kernel_g, per_scale_quadratic_forms,
    ChebyshevApprox, KernelSpec, Sgwt,
};
use pgwt::spectral::{eigendecompose, estimate_lambda_max, gft, igft, quadratic_form, quadratic_form_spectral};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn eigenbasis_reconstructs_laplacian() {
    let mut r = common::rng(21);
    for _ in 0..10 {
        let g = common::random_graph(&mut r, 8, 0.5);
        let l = laplacian(&g);
        let basis = eigendecompose(&l, 100).unwrap();
        let x = basis.eigenvectors();
        let lam = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(basis.eigenvalues()));
        let rebuilt = x * lam * x.transpose();
        assert!((rebuilt - l.to_dense()).abs().max() < 1e-9);
        let gram = x.transpose() * x;
        assert!((gram - nalgebra::DMatrix::identity(8, 8)).abs().max() < 1e-9);
    }
}

#[test]
fn quadratic_form_matches_edge_sum() {
    let mut r = common::rng(22);
    for _ in 0..20 {
        let g = common::random_graph(&mut r, 15, 0.3);
        let f = common::random_signal(&mut r, 15);
        let edge_sum: f64 = g.edges().iter().map(|e| e.w * (f[e.a] - f[e.b]).powi(2)).sum();
        assert!((quadratic_form(&f, &laplacian(&g)).unwrap() - edge_sum.sqrt()).abs() < 1e-9);
    }
}

#[test]
fn lambda_max_bound_brackets_exact_value() {
    let mut r = common::rng(23);
    for _ in 0..20 {
        let g = common::random_connected_graph(&mut r, 10, 0.3);
        let l = laplacian(&g);
        let exact = eigendecompose(&l, 100).unwrap().lambda_max();
        let bound = estimate_lambda_max(&l);
        assert!(bound >= exact - 1e-12 && bound <= 1.05 * exact, "{bound} vs {exact}");
    }
}

#[test]
fn single_mode_planes_and_quadratic_forms() {
    let mut r = common::rng(24);
    let g = common::random_connected_graph(&mut r, 12, 0.3);
    let l = laplacian(&g);
    let basis = eigendecompose(&l, 100).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
    for idx in 0..12 {
        let chi = basis.eigenvector(idx);
        let lambda = basis.eigenvalues()[idx];
        let c = forward_exact(&chi, &basis, &spec).unwrap();
        let q = per_scale_quadratic_forms(&c, &l).unwrap();
        for (j, &t) in spec.scales.iter().enumerate() {
            let gain = kernel_g(t * lambda);
            let expected: Vec<f64> = chi.iter().map(|v| gain * v).collect();
            assert!(common::max_abs_diff(&c.planes[j + 1], &expected) < 1e-9);
            assert!((q[j + 1] - gain * lambda.sqrt()).abs() < 1e-8);
        }
    }
}

#[test]
fn per_scale_forms_match_spectral_evaluation() {
    let mut r = common::rng(25);
    let g = common::random_connected_graph(&mut r, 20, 0.2);
    let l = laplacian(&g);
    let basis = eigendecompose(&l, 100).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
    let f = common::random_signal(&mut r, 20);
    let c = forward_exact(&f, &basis, &spec).unwrap();
    let q = per_scale_quadratic_forms(&c, &l).unwrap();
    let f_hat = gft(&f, &basis).unwrap();
    assert_eq!(q.len(), spec.plane_count());
    for (tau, &q_tau) in q.iter().enumerate() {
        let spectral: f64 = f_hat
            .iter()
            .zip(basis.eigenvalues())
            .map(|(c, &lam)| (spec.plane_kernel(tau, lam) * c).powi(2) * lam)
            .sum();
        assert!((q_tau - spectral.sqrt()).abs() < 1e-8);
    }
}

#[test]
fn constant_signal_has_empty_wavelet_planes() {
    let mut r = common::rng(26);
    let g = common::random_connected_graph(&mut r, 16, 0.2);
    let basis = eigendecompose(&laplacian(&g), 100).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 4).unwrap();
    let c = forward_exact(&[3.5; 16], &basis, &spec).unwrap();
    for plane in c.wavelets() {
        assert!(plane.iter().all(|v| v.abs() < 1e-8));
    }
}

#[test]
fn frame_has_no_spectral_hole() {
    let mut r = common::rng(27);
    for _ in 0..10 {
        let g = common::random_connected_graph(&mut r, 15, 0.3);
        let basis = eigendecompose(&laplacian(&g), 100).unwrap();
        let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
        assert!(basis.eigenvalues().iter().all(|&l| spec.frame_density(l) > 0.0));
    }
}

#[test]
fn chebyshev_path_filters_with_the_approximating_polynomials() {
    let mut r = common::rng(28);
    let g = common::random_connected_graph(&mut r, 8, 0.4);
    let l = laplacian(&g);
    let basis = eigendecompose(&l, 100).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
    let bound = estimate_lambda_max(&l);
    let f = common::random_signal(&mut r, 8);
    let exact = forward_exact(&f, &basis, &spec).unwrap();
    let mut trend = Vec::new();
    for m in [10, 20, 40, 60] {
        let approx = ChebyshevApprox::new(&spec, m, bound).unwrap();
        let c = forward_chebyshev(&f, &l, bound, &spec, m).unwrap();
        let mut deviation = 0.0f64;
        for t in 0..c.planes.len() {
            let filtered = basis.filter(&f, |x| approx.eval(t, x)).unwrap();
            assert!(common::max_abs_diff(&c.planes[t], &filtered) < 1e-10);
            // |sum_l e(l) f_hat(l) chi_l(n)| <= max_l |e(l)| * |f|.
            let kernel_error = basis
                .eigenvalues()
                .iter()
                .map(|&x| (approx.eval(t, x) - spec.plane_kernel(t, x)).abs())
                .fold(0.0, f64::max);
            let d = common::max_abs_diff(&c.planes[t], &exact.planes[t]);
            assert!(d <= kernel_error * common::norm(&f) + 1e-12);
            deviation = deviation.max(d);
        }
        trend.push(deviation);
    }
    assert!(trend.windows(2).all(|w| w[1] <= w[0]), "{trend:?}");
}

#[test]
fn chebyshev_series_of_g_is_accurate() {
    // On the spline's own span [0, x2]; wider intervals converge more slowly.
    let mut previous = 0.0;
    for (upper, tolerance) in [(2.0, 1e-3), (4.0, 2e-3), (8.0, 4e-3)] {
        let coeffs = chebyshev_coeffs(kernel_g, 50, upper).unwrap();
        let sup = (0..1000)
            .map(|i| upper * i as f64 / 999.0)
            .map(|x| (chebyshev_eval(&coeffs, x, upper) - kernel_g(x)).abs())
            .fold(0.0, f64::max);
        assert!(sup < tolerance && sup > previous, "[0, {upper}]: {sup}");
        previous = sup;
    }
}

#[test]
fn round_trips() {
    let mut r = common::rng(29);
    let g = common::random_connected_graph(&mut r, 8, 0.4);
    let l = laplacian(&g);
    let basis = eigendecompose(&l, 100).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
    let exact = Sgwt::exact(basis, spec.clone());
    let cheb = Sgwt::chebyshev(l.clone(), estimate_lambda_max(&l), spec, 50).unwrap();
    for _ in 0..10 {
        let f = common::random_signal(&mut r, 8);
        let back = exact.inverse(&exact.forward(&f).unwrap()).unwrap();
        assert!(common::relative_error(&back, &f) < 1e-6);
        let back = cheb.inverse(&cheb.forward(&f).unwrap()).unwrap();
        assert!(common::relative_error(&back, &f) < 1e-3);
    }
    let zero = exact.forward(&[0.0; 8]).unwrap();
    assert!(exact.inverse(&zero).unwrap().iter().all(|&v| v == 0.0));
}

proptest! {
    #[test]
    fn parseval_and_quadratic_form_identity(seed in 0u64..500) {
        let mut r = common::rng(seed);
        let n = r.random_range(2..=30);
        let g = common::random_graph(&mut r, n, 0.3);
        let l = laplacian(&g);
        let basis = eigendecompose(&l, 100).unwrap();
        let f = common::random_signal(&mut r, n);
        let f_hat = gft(&f, &basis).unwrap();
        prop_assert!((common::norm(&f_hat) - common::norm(&f)).abs() < 1e-9);
        prop_assert!(common::max_abs_diff(&igft(&f_hat, &basis).unwrap(), &f) < 1e-9);
        let q = quadratic_form(&f, &l).unwrap();
        prop_assert!((q - quadratic_form_spectral(&f_hat, &basis).unwrap()).abs() < 1e-8);
        let scaled: Vec<f64> = f.iter().map(|v| -2.5 * v).collect();
        prop_assert!((quadratic_form(&scaled, &l).unwrap() - 2.5 * q).abs() < 1e-9);
    }

    #[test]
    fn forward_is_linear(seed in 0u64..200, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let mut r = common::rng(seed);
        let g = common::random_connected_graph(&mut r, 10, 0.3);
        let basis = eigendecompose(&laplacian(&g), 100).unwrap();
        let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
        let f = common::random_signal(&mut r, 10);
        let h = common::random_signal(&mut r, 10);
        let mix: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let (cf, ch, cm) = (
            forward_exact(&f, &basis, &spec).unwrap(),
            forward_exact(&h, &basis, &spec).unwrap(),
            forward_exact(&mix, &basis, &spec).unwrap(),
        );
        for t in 0..cm.planes.len() {
            let expected: Vec<f64> = cf.planes[t].iter().zip(&ch.planes[t]).map(|(x, y)| a * x + b * y).collect();
            prop_assert!(common::max_abs_diff(&cm.planes[t], &expected) < 1e-9);
        }
    }
}
