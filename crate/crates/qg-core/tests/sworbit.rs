use num_complex::Complex64;
use proptest::prelude::*;
use qg_core::pw::BandFn;
use qg_core::repgroup::*;
use qg_core::sworbit::*;
use qg_core::Error;

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn rand_matrix(d: usize, seed: u64) -> CMat {
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    CMat::from_fn(d, d, |_, _| c(next(), next()))
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[test]
fn coherent_vectors_and_momentum() {
    let two_j = 5;
    let (b, a) = (0.7, -1.2);
    let v = orbit_coherent(two_j, b, a);
    assert!((v.norm() - 1.0).abs() < 1e-14);
    let m = momentum_map(two_j, &v);
    let n = direction(b, a);
    for k in 0..3 {
        assert!((m[k] - 2.5 * n[k]).abs() < 1e-13);
    }
    let (b2, a2) = polar_angles(&[3.0 * n[0], 3.0 * n[1], 3.0 * n[2]]);
    assert!((b2 - b).abs() < 1e-14 && (a2 - a).abs() < 1e-14);
    assert_eq!(polar_angles(&[0.0, 0.0, -2.0]), (std::f64::consts::PI, 0.0));
}

#[test]
fn coherent_overlap_is_half_angle_power() {
    for &two_j in &[1, 4, 7] {
        let (v, w) = (orbit_coherent(two_j, 0.4, 0.3), orbit_coherent(two_j, 1.9, -2.2));
        let (n1, n2) = (direction(0.4, 0.3), direction(1.9, -2.2));
        let cosg = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2];
        let want = ((1.0 + cosg) / 2.0).powi(two_j as i32);
        assert!((v.dotc(&w).norm_sqr() - want).abs() < 1e-14);
    }
}

#[test]
fn kernel_spectrum_factorial_form() {
    for &two_j in &[0, 1, 6, 12] {
        let ks = sw_kernel_spectrum(two_j);
        assert_eq!(ks.len(), two_j as usize + 1);
        for (l, k) in ks.iter().enumerate() {
            let l = l as i64;
            let want = factorial(two_j) * factorial(two_j + 1) / (factorial(two_j - l) * factorial(two_j + 1 + l));
            assert!((k - want).abs() < 1e-14 * want.max(1e-300));
        }
    }
}

#[test]
fn direct_kernel_acts_on_degree_one_by_k1() {
    let two_j = 6;
    let k1 = sw_kernel_spectrum(two_j)[1];
    assert!((k1 - 6.0 / 8.0).abs() < 1e-15);
    let pts = [direction(0.3, 0.1), direction(2.0, 1.0), [0.0, 0.0, 1.0]];
    let out = kernel_apply_direct(two_j, |x| x[2], &pts);
    for (o, p) in out.iter().zip(&pts) {
        assert!((o - k1 * p[2]).abs() < 1e-13);
    }
}

#[test]
fn sphere_quadrature_and_harmonics() {
    let spec = OrbitSpec::new(4).unwrap();
    assert!((spec.weights.iter().sum::<f64>() - 5.0).abs() < 1e-13);
    assert!(spec.orthonormality_residual() < 1e-13);
    let y = spherical_harmonics(1, 0.6, 0.2);
    assert!((y[harmonic_index(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((y[harmonic_index(1, 0)].re - 3f64.sqrt() * 0.6f64.cos()).abs() < 1e-14);
}

#[test]
fn pauli_form_at_spin_half() {
    let spec = OrbitSpec::new(1).unwrap();
    let delta = sw_operator(&spec).unwrap();
    let s3 = 3f64.sqrt();
    for (v, d) in spec.coherent.iter().zip(&delta.values) {
        let p = v * v.adjoint();
        // Δ = (1 + √3 (2P - 1)) / 2.
        let want = (CMat::identity(2, 2) * c(1.0 - s3, 0.0) + p * c(2.0 * s3, 0.0)) * c(0.5, 0.0);
        assert!(max_abs(&(d - want)) < 1e-13);
    }
    assert!(delta.identity_residual() < 1e-13);
    assert!(delta.hermiticity_residual() < 1e-14);
}

#[test]
fn lower_symbol_of_jz() {
    let spec = OrbitSpec::new(3).unwrap();
    let jz = angular_momentum(3)[2].clone();
    let l = lower_symbol(&spec, &jz).unwrap();
    for (k, x) in l.values.iter().enumerate() {
        assert!((x.re - 1.5 * spec.direction(k)[2]).abs() < 1e-13 && x.im.abs() < 1e-13);
    }
    let u = upper_symbol(&spec, &jz).unwrap();
    let k1 = sw_kernel_spectrum(3)[1];
    assert!(u.max_abs_diff(&l.scale(c(1.0 / k1, 0.0))) < 1e-12);
    assert!(matches!(lower_symbol(&spec, &CMat::identity(2, 2)), Err(Error::InvalidInput(_))));
}

#[test]
fn stratonovich_weyl_axioms() {
    for &two_j in &[1, 4, 8] {
        let spec = OrbitSpec::new(two_j).unwrap();
        let delta = sw_operator(&spec).unwrap();
        let d = spec.dim();
        let (a, b) = (rand_matrix(d, 1), rand_matrix(d, 2));
        let (wa, wb) = (sw_symbol(&delta, &a).unwrap(), sw_symbol(&delta, &b).unwrap());
        let (back, lost) = sw_quantize(&delta, &wa);
        assert!(max_abs(&(back - &a)) < 1e-10 && lost.abs() < 1e-10);
        // W_{A*} = conj W_A.
        assert!(sw_symbol(&delta, &a.adjoint()).unwrap().max_abs_diff(&wa.conj()) < 1e-10);
        // ∫ W_A W_B dμ = tr(AB).
        let pair = wa.conj().inner(&wb, &spec);
        assert!((pair - (&a * &b).trace()).norm() < 1e-10);
        assert!(sw_twisted_product(&delta, &wa, &wb).max_abs_diff(&sw_symbol(&delta, &(&a * &b)).unwrap()) < 1e-10);
        let one = OrbitField::constant(&spec, c(1.0, 0.0));
        assert!(max_abs(&(sw_quantize(&delta, &one).0 - CMat::identity(d, d))) < 1e-10);
        assert!(berezin_relation_residual(&delta, &wa).unwrap() < 1e-10);
    }
}

#[test]
fn off_grid_evaluation() {
    let spec = OrbitSpec::new(3).unwrap();
    let delta = sw_operator(&spec).unwrap();
    let a = rand_matrix(4, 9);
    let w = sw_symbol(&delta, &a).unwrap();
    let dir = direction(1.1, 2.3);
    assert!((w.eval_at(&spec, &dir) - (delta.at(&dir) * &a).trace()).norm() < 1e-12);
    let g = Quat::from_uniform(0.2, 0.4, 0.9);
    let e = e_kernel(&delta, &g);
    assert!((e.eval_at(&spec, &dir) - e_kernel_at(&delta, &g, &dir)).norm() < 1e-12);
    let l = lower_symbol(&spec, &a).unwrap();
    assert!((l.eval_at(&spec, &dir) - lower_symbol_at(3, &a, &dir)).norm() < 1e-12);
}

#[test]
fn conditioning_and_resource_limits() {
    assert!(matches!(OrbitSpec::new(MAX_TWO_J + 1), Err(Error::Resource { .. })));
    assert!(OrbitSpec::new(-1).is_err());
    let spec = OrbitSpec::new(MAX_TWO_J).unwrap();
    assert!(matches!(sw_operator(&spec), Err(Error::Conditioning { .. })));
    let f = OrbitField::constant(&spec, c(1.0, 0.0));
    assert!(matches!(kernel_power(&spec, &f, -0.5), Err(Error::Conditioning { .. })));
    assert!(kernel_power(&spec, &f, 0.5).is_ok());
}

#[test]
fn swf_transform_roundtrip_and_parseval() {
    let band = 4;
    let t = SwfTransform::new(band).unwrap();
    let mut psi = BandFn::zero(Group::SU2, band);
    let m = rand_matrix(psi.coeffs.len(), 4);
    for (k, a) in psi.coeffs.iter_mut().enumerate() {
        *a = m[(k, 0)];
    }
    let fields = t.forward(&psi).unwrap();
    let back = t.inverse(&fields).unwrap();
    assert!(back.coeffs.iter().zip(&psi.coeffs).all(|(a, b)| (a - b).norm() < 1e-12));
    assert!((t.norm_sq(&fields) - psi.norm_l2().powi(2)).abs() < 1e-11);
    let g = Quat::from_uniform(0.3, 0.5, 0.1);
    assert!((t.inverse_at(&fields, &g) - psi.eval(&GroupElement::SU2(g))).norm() < 1e-11);
    assert!(matches!(t.forward(&BandFn::zero(Group::U1, 2)), Err(Error::InvalidInput(_))));
    let mut wide = BandFn::zero(Group::SU2, band + 1);
    let last = wide.coeffs.len() - 1;
    wide.coeffs[last] = c(1.0, 0.0);
    assert!(matches!(t.forward(&wide), Err(Error::BandOverflow { .. })));
    assert!(t.forward(&psi.widen(band + 2)).is_ok());
    assert!(SwfTransform::new(0).is_err());
}

#[test]
fn momentum_scaled_transform() {
    let t = SwfTransform::new(5).unwrap();
    let psi = BandFn::project(Group::SU2, 3, |g| rep_matrix(&IrrepLabel::su2(3), g)[(1, 2)]);
    let direct = t.forward(&psi).unwrap();
    let scaled = momentum_scaled_swf(&t, &psi, 3, 1.0).unwrap();
    assert!(scaled.max_abs_diff(&direct[2]) < 1e-14);
    assert!(matches!(momentum_scaled_swf(&t, &psi, 2, 0.3), Err(Error::InvalidInput(_))));
    assert!(matches!(momentum_scaled_swf(&t, &psi, 3, 0.25), Err(Error::BandOverflow { .. })));
    assert!(momentum_scaled_swf(&t, &psi, 2, 0.0).is_err());
}

#[test]
fn rescale_reports_discarded_mass() {
    let spec = OrbitSpec::new(2).unwrap();
    let f = OrbitField::from_fn(&spec, |x| c(x[2] * x[2], 0.0));
    let (g, lost) = f.rescale(&spec, &[1.0, 1.0]);
    // z² = 1/3 + (2/3) P₂(z); the P₂ part has mean square (2/3)² / 5.
    assert!((lost - 4.0 / 45.0).abs() < 1e-13);
    assert!((g.values[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-13);
    assert!(f.max_imag() < 1e-15);
}

proptest! {
    #[test]
    fn cartan_powers(a in 0.0f64..1.0, b in 0.0f64..1.0, d in 0.0f64..1.0, two_j in 1i64..6, k in 2u32..4) {
        prop_assert!(cartan_power_residual(two_j, k, &Quat::from_uniform(a, b, d)) < 1e-12);
    }

    #[test]
    fn sw_operator_covariance(a in 0.0f64..1.0, b in 0.0f64..1.0, d in 0.0f64..1.0) {
        // Δ(g·θ) = π(g) Δ(θ) π(g)*.
        let spec = OrbitSpec::new(3).unwrap();
        let delta = sw_operator(&spec).unwrap();
        let g = Quat::from_uniform(a, b, d);
        let p = wigner_d(3, &g);
        let n = direction(0.8, 0.5);
        let moved = delta.at(&g.rotate(&n));
        prop_assert!(max_abs(&(moved - &p * delta.at(&n) * p.adjoint())) < 1e-11);
    }
}
