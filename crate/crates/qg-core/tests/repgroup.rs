use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qg_core::repgroup::*;

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn amax(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a: f64, z| a.max(z.norm()))
}

/// Taylor-series matrix exponential; the oracle for `π(exp X) = exp(dπ(X))`.
fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut term = CMat::identity(n, n);
    let mut sum = term.clone();
    for k in 1..60 {
        term = &term * a * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    sum
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (n, m) = (a.nrows(), b.nrows());
    CMat::from_fn(n * m, n * m, |r, s| a[(r / m, s / m)] * b[(r % m, s % m)])
}

/// `⟨j1 m1; j2 m2 | j3 m3⟩²` from the total-spin projector on the tensor product.
fn cg_abs_oracle(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64) -> f64 {
    let (a, b) = (angular_momentum(tj1), angular_momentum(tj2));
    let (d1, d2) = ((tj1 + 1) as usize, (tj2 + 1) as usize);
    let (i1, i2) = (CMat::identity(d1, d1), CMat::identity(d2, d2));
    let mut j2 = CMat::zeros(d1 * d2, d1 * d2);
    for k in 0..3 {
        let t = kron(&a[k], &i2) + kron(&i1, &b[k]);
        j2 += &t * &t;
    }
    let n = d1 * d2;
    let mut p = CMat::identity(n, n);
    let target = tj3 as f64 / 2.0 * (tj3 as f64 / 2.0 + 1.0);
    let mut tj = (tj1 - tj2).abs();
    while tj <= tj1 + tj2 {
        if tj != tj3 {
            let v = tj as f64 / 2.0 * (tj as f64 / 2.0 + 1.0);
            p = p * (&j2 - CMat::identity(n, n) * c(v, 0.0)) * c(1.0 / (target - v), 0.0);
        }
        tj += 2;
    }
    let r1 = ((tj1 - tm1) / 2) as usize;
    let r2 = ((tj2 - tm2) / 2) as usize;
    let idx = r1 * d2 + r2;
    p[(idx, idx)].re
}

fn quat() -> impl Strategy<Value = Quat> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, d)| Quat::from_uniform(a, b, d))
}

#[test]
fn irrep_dimension_and_casimir() {
    for j in -3..=3 {
        assert_eq!(IrrepLabel::u1(j).dim(), 1);
        assert_eq!(IrrepLabel::u1(j).casimir(), (j * j) as f64);
    }
    for n in 1..=6 {
        assert_eq!(IrrepLabel::su2(n).dim(), n as usize);
        assert!((IrrepLabel::su2(n).casimir() - ((n * n - 1) as f64) / 4.0).abs() < 1e-15);
    }
    assert!(IrrepLabel::new(Group::SU2, 0).is_err());
}

#[test]
fn rep_matrix_examples() {
    let m = rep_matrix(&IrrepLabel::u1(2), &GroupElement::u1(PI / 2.0));
    assert!((m[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    let id = rep_matrix(&IrrepLabel::su2(2), &GroupElement::identity(Group::SU2));
    assert!(amax(&(id - CMat::identity(2, 2))) < 1e-15);
    let th = 0.7;
    let rz = rep_matrix(&IrrepLabel::su2(3), &GroupElement::exp(Group::SU2, &[0.0, 0.0, th]));
    let want = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, -th).exp(), c(1.0, 0.0), c(0.0, th).exp()]));
    assert!(amax(&(rz - want)) < 1e-14);
}

#[test]
fn rep_matrix_is_exponential_of_derivative() {
    for n in 1..=5 {
        let pi = IrrepLabel::su2(n);
        let x = [0.3, -1.1, 0.8];
        let lhs = rep_matrix(&pi, &GroupElement::exp(Group::SU2, &x));
        assert!(amax(&(lhs - expm(&dpi(&pi, &x)))) < 1e-12, "n = {n}");
    }
}

#[test]
fn character_examples() {
    let phi = 0.37;
    for n in 1..=5 {
        assert!((character(&IrrepLabel::su2(n), &GroupElement::identity(Group::SU2)) - c(n as f64, 0.0)).norm() < 1e-14);
    }
    assert!((character(&IrrepLabel::u1(3), &GroupElement::u1(phi)) - c(0.0, 3.0 * phi).exp()).norm() < 1e-15);
    // χ_n at half trace cosh 2p is sinh(2np)/sinh(2p); n = 2 gives 2 cosh 2p.
    let p: f64 = 0.45;
    assert!((character_su2_c(2, c((2.0 * p).cosh(), 0.0)).re - 2.0 * (2.0 * p).cosh()).abs() < 1e-14);
    for n in 1..=6 {
        let want = (2.0 * n as f64 * p).sinh() / (2.0 * p).sinh();
        assert!((character_su2_c(n, c((2.0 * p).cosh(), 0.0)).re - want).abs() < 1e-12 * want);
    }
}

#[test]
fn clebsch_gordan_examples() {
    assert!((clebsch_gordan(0.5, 0.5, 0.0, 0.5, -0.5, 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((clebsch_gordan(0.5, 0.5, 0.0, -0.5, 0.5, 0.0).unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
    assert!((clebsch_gordan(1.0, 1.0, 2.0, 1.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(clebsch_gordan(1.0, 1.0, 2.0, 1.0, 0.0, 0.0).unwrap(), 0.0);
    assert!(clebsch_gordan(0.3, 0.5, 0.5, 0.0, 0.5, 0.5).is_err());
}

#[test]
fn clebsch_gordan_matches_projector_oracle() {
    for tj1 in 0..=3i64 {
        for tj2 in 0..=3i64 {
            let mut tj3 = (tj1 - tj2).abs();
            while tj3 <= tj1 + tj2 {
                for tm1 in (-tj1..=tj1).step_by(2) {
                    for tm2 in (-tj2..=tj2).step_by(2) {
                        if (tm1 + tm2).abs() > tj3 {
                            continue;
                        }
                        let got = clebsch_gordan_2(tj1, tj2, tj3, tm1, tm2, tm1 + tm2).unwrap();
                        let want = cg_abs_oracle(tj1, tj2, tj3, tm1, tm2);
                        assert!((got * got - want).abs() < 1e-12, "{tj1} {tj2} {tj3} {tm1} {tm2}: {got} vs {want}");
                    }
                }
                tj3 += 2;
            }
        }
    }
}

#[test]
fn quadrature_examples() {
    let q = group_quadrature(Group::U1, 5).unwrap();
    assert_eq!(q.len(), 11);
    for j in -5..=5i64 {
        for jp in -5..=5i64 {
            let s: Complex64 = q
                .nodes
                .iter()
                .zip(&q.weights)
                .map(|(g, w)| character(&IrrepLabel::u1(j), g) * character(&IrrepLabel::u1(jp), g).conj() * *w)
                .sum();
            let want = if j == jp { 1.0 } else { 0.0 };
            assert!((s - c(want, 0.0)).norm() < 1e-14);
        }
    }
    assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
}

#[test]
fn su2_quadrature_schur_orthogonality() {
    let q = group_quadrature(Group::SU2, 4).unwrap();
    assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for np in 1..=4 {
            let (pi, pp) = (IrrepLabel::su2(n), IrrepLabel::su2(np));
            let (d, dp) = (n as usize, np as usize);
            let mut acc = vec![c(0.0, 0.0); d * d * dp * dp];
            for (g, w) in q.nodes.iter().zip(&q.weights) {
                let (a, b) = (rep_matrix(&pi, g), rep_matrix(&pp, g));
                let mut k = 0;
                for i in 0..d {
                    for j in 0..d {
                        for ip in 0..dp {
                            for jp in 0..dp {
                                acc[k] += a[(i, j)] * b[(ip, jp)].conj() * *w;
                                k += 1;
                            }
                        }
                    }
                }
            }
            let mut k = 0;
            for i in 0..d {
                for j in 0..d {
                    for ip in 0..dp {
                        for jp in 0..dp {
                            let e = if n == np && i == ip && j == jp { 1.0 / d as f64 } else { 0.0 };
                            worst = worst.max((acc[k] - e).norm());
                            k += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(worst < 1e-12, "{worst}");
    assert!(group_quadrature(Group::SU2, 0).is_err());
    assert!(matches!(group_quadrature(Group::SU2, MAX_SU2_DEGREE + 1), Err(qg_core::Error::Resource { .. })));
}

#[test]
fn verma_norms() {
    assert_eq!(verma_norm_sq(2.0, 0), 1.0);
    assert_eq!(verma_norm_sq(2.0, 3), 0.0);
    assert!(verma_norm_sq(2.0, 4) < 0.0 || verma_norm_sq(2.0, 4) == 0.0);
    assert!(verma_norm_sq(2.5, 4) < 0.0);
    assert!(verma_norm_sq(2.0, 2) > 0.0);
}

#[test]
fn band_units_round_trip() {
    for g in [Group::U1, Group::SU2] {
        for u in 0..10 {
            assert_eq!(band_unit(g, band_label(g, u)), u);
        }
    }
    assert_eq!(irreps_up_to(Group::U1, 2).len(), 5);
    assert_eq!(irreps_up_to(Group::SU2, 3).len(), 3);
}

proptest! {
    #[test]
    fn wigner_d_is_a_unitary_homomorphism(g in quat(), h in quat(), tj in 0i64..7) {
        let (a, b) = (wigner_d(tj, &g), wigner_d(tj, &h));
        let d = (tj + 1) as usize;
        prop_assert!(amax(&(&a * &b - wigner_d(tj, &g.mul(&h)))) < 1e-12);
        prop_assert!(amax(&(a.adjoint() * &a - CMat::identity(d, d))) < 1e-12);
    }

    #[test]
    fn quaternion_log_inverts_exp(v in prop::array::uniform3(-1.5f64..1.5)) {
        let w = Quat::exp(&v).log();
        for k in 0..3 {
            prop_assert!((w[k] - v[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn characters_are_class_functions(g in quat(), h in quat(), n in 1i64..7) {
        let pi = IrrepLabel::su2(n);
        let conj = GroupElement::SU2(h.mul(&g).mul(&h.inv()));
        let a = character(&pi, &GroupElement::SU2(g));
        prop_assert!((a - character(&pi, &conj)).norm() < 1e-11);
        prop_assert!((a - rep_matrix(&pi, &GroupElement::SU2(g)).trace()).norm() < 1e-11);
    }
}

#[test]
fn wigner_d_column_matches_full_matrix() {
    let q = Quat::from_uniform(0.31, 0.72, 0.05);
    for tj in [0, 1, 4, 9] {
        let full = wigner_d(tj, &q);
        for col in 0..=tj as usize {
            let diff = full.column(col) - wigner_d_column(tj, &q, col);
            assert!(diff.iter().all(|z| z.norm() < 1e-15));
        }
    }
}
