use num_complex::Complex64;
use proptest::prelude::*;
use qg_core::pw::*;
use qg_core::repgroup::*;

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn su2(u: (f64, f64, f64)) -> GroupElement {
    GroupElement::SU2(Quat::from_uniform(u.0, u.1, u.2))
}

/// Deterministic band function with coefficients in `[-0.5, 0.5]²`.
fn band_fn(group: Group, band: i64, seed: u64) -> BandFn {
    let mut f = BandFn::zero(group, band);
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for a in f.coeffs.iter_mut() {
        *a = c(next(), next());
    }
    f
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a: f64, z| a.max(z.norm()))
}

#[test]
fn basis_layout() {
    let b = PwBasis::new(Group::SU2, 3);
    assert_eq!(b.len, 1 + 4 + 9);
    assert_eq!(b.offsets, vec![0, 1, 5]);
    assert_eq!(b.index(&IrrepLabel::su2(3), 1, 2), Some(5 + 3 + 2));
    assert_eq!(b.index(&IrrepLabel::su2(4), 0, 0), None);
    let u = PwBasis::new(Group::U1, 2);
    assert_eq!(u.len, 5);
    let order: Vec<_> = [0, 1, -1, 2, -2].iter().map(|&j| u.irrep_index(&IrrepLabel::u1(j)).unwrap()).collect();
    assert_eq!(order, vec![0, 1, 2, 3, 4]);
    assert_eq!(u.irrep_index(&IrrepLabel::su2(1)), None);
}

#[test]
fn basis_is_orthonormal() {
    for &(group, band) in &[(Group::U1, 5), (Group::SU2, 4)] {
        let basis = PwBasis::new(group, band);
        let q = Quadrature::exact_for(group, 2 * basis.unit());
        let b = basis.sample(&q);
        let mut wb = b.clone();
        for k in 0..q.len() {
            for j in 0..basis.len {
                wb[(k, j)] *= q.weights[k];
            }
        }
        let gram = b.adjoint() * wb;
        assert!(max_abs(&(gram - CMat::identity(basis.len, basis.len))) < 1e-12);
    }
}

#[test]
fn project_recovers_coefficients() {
    for &(group, band) in &[(Group::U1, 6), (Group::SU2, 4)] {
        let f = band_fn(group, band, 3);
        let p = BandFn::project(group, band, |g| f.eval(g));
        let err = f.coeffs.iter().zip(&p.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}

#[test]
fn constant_and_widen() {
    let one = BandFn::constant(Group::SU2, c(2.0, 0.0));
    assert!((one.eval(&su2((0.1, 0.2, 0.3))) - c(2.0, 0.0)).norm() < 1e-15);
    let f = band_fn(Group::SU2, 2, 7);
    let w = f.widen(4);
    let g = su2((0.4, 0.8, 0.15));
    assert_eq!(w.band(), 4);
    assert!((w.eval(&g) - f.eval(&g)).norm() < 1e-14);
    assert!(BandFn::zero(Group::U1, 3).is_zero());
    assert!((f.scale(c(0.0, 2.0)).norm_l2() - 2.0 * f.norm_l2()).abs() < 1e-14);
}

#[test]
fn l2_norm_matches_quadrature() {
    let f = band_fn(Group::SU2, 3, 11);
    let q = Quadrature::exact_for(Group::SU2, 2 * f.basis.unit());
    let direct: f64 = q.nodes.iter().zip(&q.weights).map(|(g, w)| w * f.eval(g).norm_sqr()).sum();
    assert!((direct.sqrt() - f.norm_l2()).abs() < 1e-13);
}

#[test]
fn convolution_matches_quadrature() {
    for &group in &[Group::U1, Group::SU2] {
        let band = if group == Group::U1 { 4 } else { 3 };
        let (a, b) = (band_fn(group, band, 1), band_fn(group, band, 2));
        let conv = a.convolve(&b);
        let q = Quadrature::exact_for(group, 2 * a.basis.unit());
        let g = match group {
            Group::U1 => GroupElement::u1(0.77),
            Group::SU2 => su2((0.3, 0.6, 0.9)),
        };
        let direct: Complex64 = q.nodes.iter().zip(&q.weights).map(|(h, w)| a.eval(h) * b.eval(&h.inv().mul(&g)) * *w).sum();
        assert!((conv.eval(&g) - direct).norm() < 1e-12);
    }
}

#[test]
fn shifts_and_derivatives() {
    let f = band_fn(Group::SU2, 3, 5);
    let (k, g) = (su2((0.2, 0.5, 0.7)), su2((0.9, 0.1, 0.4)));
    assert!((f.left_shift(&k).eval(&g) - f.eval(&k.mul(&g))).norm() < 1e-13);
    let basis = &f.basis;
    let apply = |m: &CMat| BandFn { basis: basis.clone(), coeffs: (m * CMat::from_column_slice(basis.len, 1, &f.coeffs)).iter().copied().collect() };
    assert!((apply(&basis.left_shift(&k)).eval(&g) - f.eval(&k.mul(&g))).norm() < 1e-13);
    assert!((apply(&basis.right_shift(&k)).eval(&g) - f.eval(&g.mul(&k))).norm() < 1e-13);
    let x = [0.3, -0.2, 0.5];
    let h = 1e-5;
    let shifted = |s: f64| f.eval(&GroupElement::exp(Group::SU2, &[s * x[0], s * x[1], s * x[2]]).mul(&g));
    let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    assert!((f.derivative(&x).eval(&g) - fd).norm() < 1e-8);
    assert!((apply(&basis.derivative(&x)).eval(&g) - fd).norm() < 1e-8);
    let v = [0.1, 0.4, -0.3];
    let moved = |s: f64| f.eval(&GroupElement::exp(Group::SU2, &[x[0] + s * v[0], x[1] + s * v[1], x[2] + s * v[2]]).mul(&g));
    let fd = (moved(h) - moved(-h)) / (2.0 * h);
    assert!((f.left_shift_deriv(&x, &v).eval(&g) - fd).norm() < 1e-8);
    assert!((apply(&basis.left_shift_deriv(&x, &v)).eval(&g) - fd).norm() < 1e-8);
}

#[test]
fn dexp_right_matches_finite_difference() {
    let v = [0.2, -0.7, 0.4];
    for x in [[0.0, 0.0, 0.0], [1e-5, 2e-5, -1e-5], [0.4, 1.1, -0.6]] {
        let w = dexp_right(Group::SU2, &x, &v);
        let h = 1e-6;
        let xinv = GroupElement::exp(Group::SU2, &x).inv();
        let rel = |s: f64| xinv.mul(&GroupElement::exp(Group::SU2, &[x[0] + s * v[0], x[1] + s * v[1], x[2] + s * v[2]])).log();
        let (p, m) = (rel(h), rel(-h));
        for i in 0..3 {
            assert!((w[i] - (p[i] - m[i]) / (2.0 * h)).abs() < 1e-8);
        }
    }
}

#[test]
fn multiplication_operator_matches_pointwise_product() {
    let basis = PwBasis::new(Group::U1, 3);
    let q = Quadrature::exact_for(Group::U1, 12);
    let m = basis.multiplication(&q, |g| {
        let phi = g.log()[0];
        c(phi.cos(), 0.0)
    });
    assert!((m[(0, 1)] - c(0.5, 0.0)).norm() < 1e-14);
    assert!(max_abs(&(m.adjoint() - &m)) < 1e-14);
    assert_eq!(cross(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
}

proptest! {
    #[test]
    fn product_is_pointwise(s in 0u64..1000, a in 0.0f64..1.0, b in 0.0f64..1.0, d in 0.0f64..1.0) {
        let (f, h) = (band_fn(Group::SU2, 2, s), band_fn(Group::SU2, 2, s + 1));
        let g = su2((a, b, d));
        let p = f.mul(&h);
        prop_assert_eq!(p.band(), 3);
        prop_assert!((p.eval(&g) - f.eval(&g) * h.eval(&g)).norm() < 1e-12);
        prop_assert!((f.conj().eval(&g) - f.eval(&g).conj()).norm() < 1e-12);
        prop_assert!((f.add(&h).eval(&g) - f.eval(&g) - h.eval(&g)).norm() < 1e-13);
    }

    #[test]
    fn left_shift_is_isometric(s in 0u64..1000, a in 0.0f64..1.0, b in 0.0f64..1.0, d in 0.0f64..1.0) {
        let f = band_fn(Group::SU2, 3, s);
        prop_assert!((f.left_shift(&su2((a, b, d))).norm_l2() - f.norm_l2()).abs() < 1e-12);
    }
}
