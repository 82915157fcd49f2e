use num_complex::Complex64;
use proptest::prelude::*;
use qg_core::quad::*;

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for k in 1..=20 {
        let (x, w) = gauss_legendre(k);
        for deg in 0..2 * k {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "k={k} deg={deg}");
        }
    }
}

#[test]
fn adaptive_integration_known_values() {
    let (v, _) = integrate_real(|x| (-x * x).exp(), -10.0, 10.0, 1e-15, 1e-14).unwrap();
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    let (v, _) = integrate(|x| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI, 1e-15, 1e-14).unwrap();
    assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    assert!(matches!(
        integrate_real(|x| 1.0 / x.abs().sqrt().max(1e-300), -1.0, 1.0, 1e-300, 1e-300),
        Err(qg_core::Error::NoConvergence { .. })
    ));
}

#[test]
fn slope_of_a_line() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = [1.0, 3.0, 5.0, 7.0];
    assert!((ls_slope(&x, &y) - 2.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn pairwise_sum_matches_naive_sum(xs in prop::collection::vec(-1e3f64..1e3, 0..200)) {
        let naive: f64 = xs.iter().sum();
        prop_assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
