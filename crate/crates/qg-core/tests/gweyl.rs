use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qg_core::gweyl::local::*;
use qg_core::gweyl::*;
use qg_core::pw::{BandFn, PwBasis};
use qg_core::repgroup::*;
use qg_core::Error;

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a: f64, z| a.max(z.norm()))
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn cnum(&mut self) -> Complex64 {
        c(self.next() - 0.5, self.next() - 0.5)
    }

    fn element(&mut self, group: Group) -> GroupElement {
        match group {
            Group::U1 => GroupElement::u1(2.0 * std::f64::consts::PI * self.next()),
            Group::SU2 => GroupElement::SU2(Quat::from_uniform(self.next(), self.next(), self.next())),
        }
    }

    fn band_fn(&mut self, group: Group, band: i64) -> BandFn {
        let mut f = BandFn::zero(group, band);
        for a in f.coeffs.iter_mut() {
            *a = self.cnum();
        }
        f
    }
}

/// Symbol `σ(π, g) = Σ_l C_{π,l} b_l(g)` with random matrices `C` and `g`-band `g_band`.
fn random_symbol(group: Group, band: i64, g_band: i64, grid: Arc<Quadrature>, r: &mut Lcg) -> MatrixSymbol {
    let gb = PwBasis::new(group, g_band);
    let cs: Vec<Vec<CMat>> = irreps_up_to(group, band)
        .iter()
        .map(|pi| (0..gb.len).map(|_| CMat::from_fn(pi.dim(), pi.dim(), |_, _| r.cnum())).collect())
        .collect();
    let pw = PwBasis::new(group, band);
    MatrixSymbol::from_fn(group, band, g_band, grid, |pi, g| {
        let k = pw.irrep_index(pi).unwrap();
        gb.eval_all(g).iter().zip(&cs[k]).fold(CMat::zeros(pi.dim(), pi.dim()), |acc, (b, m)| acc + m * *b)
    })
}

fn apply(op: &TruncatedOperator, f: &BandFn) -> BandFn {
    let w = f.widen(op.band);
    let v = &op.matrix * CMat::from_column_slice(w.coeffs.len(), 1, &w.coeffs);
    BandFn { basis: op.basis(), coeffs: v.iter().copied().collect() }
}


/// `(AΨ)(g) = Σ_π d_π tr(π(g)* σ(π,g) Ψ̂(π))` with `Ψ̂(π) = ∫ Ψ π` by quadrature.
fn kn_apply_oracle(sigma: &MatrixSymbol, f: &BandFn, g: &GroupElement) -> Complex64 {
    let q = Quadrature::exact_for(sigma.group, 2 * f.basis.unit() + 2);
    let s = sigma.interpolant().unwrap();
    let mut acc = c(0.0, 0.0);
    for pi in sigma.irreps() {
        let d = pi.dim();
        let mut hat = CMat::zeros(d, d);
        for (h, w) in q.nodes.iter().zip(&q.weights) {
            hat += rep_matrix(&pi, h) * (f.eval(h) * *w);
        }
        acc += (rep_matrix(&pi, g).adjoint() * s.eval(&pi, g).unwrap() * hat).trace() * d as f64;
    }
    acc
}

#[test]
fn kn_action_matches_fourier_formula() {
    let mut r = Lcg(17);
    for &(group, band, g_band) in &[(Group::U1, 4, 2), (Group::SU2, 3, 2)] {
        let op_band = band_label(group, band_unit(group, band) + band_unit(group, g_band));
        let grid = symbol_grid(group, op_band, g_band);
        let s = random_symbol(group, band, g_band, grid, &mut r);
        let a = kn_quantize(&s, op_band).unwrap();
        let f = r.band_fn(group, band);
        for _ in 0..3 {
            let g = r.element(group);
            let want = kn_apply_oracle(&s, &f, &g);
            assert!((apply(&a, &f).eval(&g) - want).norm() < 1e-11 * want.norm().max(1.0));
        }
    }
}

#[test]
fn elementary_symbols() {
    let (group, band) = (Group::SU2, 3);
    let grid = symbol_grid(group, 4, 2);
    let id = kn_quantize(&MatrixSymbol::identity(group, band, grid.clone()), 4).unwrap();
    let n = PwBasis::new(group, band).len;
    assert!(max_abs(&(id.columns_up_to(band) - TruncatedOperator::identity(group, 4).columns_up_to(band))) < 1e-12);
    assert_eq!(id.columns_up_to(band).ncols(), n);

    // f(g) = Re of the (0,0) entry of the spin-1/2 matrix lies in band 2.
    let f = |g: &GroupElement| rep_matrix(&IrrepLabel::su2(2), g)[(0, 0)];
    let m = kn_quantize(&MatrixSymbol::multiplication(group, band, 2, grid.clone(), f), 4).unwrap();
    let direct = PwBasis::new(group, 4).multiplication(&Quadrature::exact_for(group, 8), f);
    assert!(max_abs(&(m.columns_up_to(band) - direct.columns(0, n))) < 1e-12);

    let x = [0.3, -0.1, 0.7];
    let eps = 0.2;
    let p = kn_quantize(&MatrixSymbol::momentum(group, band, grid, &x, eps), band).unwrap();
    let want = PwBasis::new(group, band).derivative(&x) * c(0.0, -eps);
    assert!(max_abs(&(p.matrix - want)) < 1e-12);
}

#[test]
fn symbol_roundtrip_and_interpolation() {
    let mut r = Lcg(3);
    let group = Group::SU2;
    let grid = symbol_grid(group, 4, 2);
    let s = random_symbol(group, 2, 2, grid.clone(), &mut r);
    let a = kn_quantize(&s, 4).unwrap();
    assert!(s.max_abs_diff(&kn_symbol(&a, grid.clone())) < 1e-12);
    let fine = Arc::new(Quadrature::exact_for(group, 14));
    let t = s.resample(fine.clone()).unwrap();
    let it = s.interpolant().unwrap();
    let g = r.element(group);
    let pi = IrrepLabel::su2(2);
    assert!(max_abs(&(it.eval(&pi, &g).unwrap() - t.eval(&pi, &g).unwrap())) < 1e-12);
    for (x, v) in fine.nodes.iter().zip(&t.values[1]) {
        assert!(max_abs(&(it.eval(&pi, x).unwrap() - v)) < 1e-12);
    }
    assert!(matches!(it.eval(&IrrepLabel::su2(5), &g), Err(Error::BandOverflow { .. })));
}

#[test]
fn composition_and_adjoint_match_operators() {
    let mut r = Lcg(29);
    let group = Group::U1;
    let (band, g_band) = (3, 2);
    let big = band + 2 * g_band;
    let grid = symbol_grid(group, big, 2 * g_band + 2 * band);
    let sa = random_symbol(group, band, g_band, grid.clone(), &mut r);
    let sb = random_symbol(group, band, g_band, grid.clone(), &mut r);
    let ab = kn_quantize(&sa, big).unwrap().compose(&kn_quantize(&sb, big).unwrap());
    let cm = kn_compose(&sa, &sb).unwrap();
    assert!(cm.max_abs_diff(&kn_symbol(&ab, grid.clone())) < 1e-11);
    let adj = kn_adjoint(&sa).unwrap();
    let a = kn_quantize(&sa, big).unwrap();
    assert!(adj.max_abs_diff(&kn_symbol(&a.adjoint(), grid)) < 1e-11);
    let tr = (a.matrix.adjoint() * kn_quantize(&sb, big).unwrap().matrix).trace();
    assert!((tr - sa.hs_pairing(&sb)).norm() < 1e-11 * tr.norm());
}

#[test]
fn band_overflow_errors() {
    let grid = symbol_grid(Group::SU2, 3, 2);
    let s = MatrixSymbol::identity(Group::SU2, 3, grid.clone());
    let m = MatrixSymbol::multiplication(Group::SU2, 3, 2, grid, |_| c(1.0, 0.0));
    assert!(matches!(kn_quantize(&m, 3), Err(Error::BandOverflow { .. })));
    assert!(kn_quantize(&s, 3).is_ok());
    let coarse = Arc::new(Quadrature::exact_for(Group::SU2, 2));
    let s = MatrixSymbol::identity(Group::SU2, 3, coarse.clone());
    assert!(matches!(kn_quantize(&s, 3), Err(Error::BandOverflow { .. })));
    let other = MatrixSymbol::identity(Group::SU2, 3, symbol_grid(Group::SU2, 3, 2));
    assert!(matches!(kn_compose(&s, &other), Err(Error::InvalidInput(_))));
}

#[test]
fn weyl_quantization_is_real() {
    let mut r = Lcg(5);
    for &(group, band) in &[(Group::U1, 5), (Group::SU2, 2)] {
        let op_band = band_label(group, band_unit(group, band) + band_unit(group, 2));
        let grid = symbol_grid(group, op_band, 2);
        let s = random_symbol(group, band, 2, grid, &mut r);
        let w = weyl_quantize(&s, op_band).unwrap();
        let ws = weyl_quantize(&s.adjoint_pointwise(), op_band).unwrap();
        assert!(max_abs(&(w.adjoint().matrix - ws.matrix)) < 1e-11);
        // Symbols constant in g quantize to the same operator under KN and Weyl.
        let k = weyl_deform(&MatrixSymbol::identity(group, band, symbol_grid(group, op_band, 1))).unwrap();
        let g = r.element(group);
        let h = r.element(group);
        let kn = ConvolutionKernel::kn(&MatrixSymbol::identity(group, band, symbol_grid(group, op_band, 1))).unwrap();
        assert!((k.eval(&h, &g) - kn.eval(&h, &g)).norm() < 1e-12);
    }
}

#[test]
fn weyl_elements_are_orthogonal_on_finite_subgroups() {
    for &(group, n) in &[(Group::U1, 12), (Group::SU2, 0)] {
        let els = finite_subgroup(group, n);
        assert_eq!(els.len(), if group == Group::U1 { 12 } else { 120 });
        let pi = match group {
            Group::U1 => IrrepLabel::u1(1),
            Group::SU2 => IrrepLabel::su2(2),
        };
        let (h1, h2) = (els[1], els[2]);
        let w11 = weyl_element_operator(&els, &pi, 0, 0, &h1);
        let w12 = weyl_element_operator(&els, &pi, 0, 0, &h2);
        assert!(finite_trace_pairing(&w11, &w12).norm() < 1e-12);
        assert!(finite_trace_pairing(&w11, &w11).re > 0.0);
    }
}

#[test]
fn local_function_and_momentum_quantize_exactly() {
    let mut r = Lcg(9);
    for &group in &[Group::U1, Group::SU2] {
        let band = if group == Group::U1 { 3 } else { 2 };
        let f = r.band_fn(group, band);
        let op_band = band_label(group, 2 * band_unit(group, band));
        let sym = LocalSymbol::function(f.clone(), 1.0).unwrap();
        let q = Quadrature::exact_for(group, 5 * band_unit(group, band));
        let want = PwBasis::new(group, op_band).multiplication(&q, |g| f.eval(g));
        for v in [Variant::KN, Variant::Weyl] {
            let a = local_quantize(&sym, 0.1, v, op_band).unwrap();
            assert!(max_abs(&(a.matrix - &want)) < 1e-12);
        }
        let x = [0.4, -0.3, 0.2];
        let eps = 0.05;
        let p = local_quantize(&LocalSymbol::momentum(group, &x, 1.0).unwrap(), eps, Variant::KN, op_band).unwrap();
        let xr = if group == Group::U1 { [x[0], 0.0, 0.0] } else { x };
        let want = PwBasis::new(group, op_band).derivative(&xr) * c(0.0, -eps);
        assert!(max_abs(&(p.matrix - want)) < 1e-12);
    }
}

#[test]
fn local_frequency_term_is_a_weighted_translation() {
    let mut r = Lcg(41);
    let group = Group::SU2;
    let mut sym = LocalSymbol::new(group, 0.5).unwrap();
    let cf = r.band_fn(group, 2);
    sym.add_term([1, 2, 0], Poly::Const, cf.clone()).unwrap();
    let eps = 0.3;
    let y = [0.5 * eps, 1.0 * eps, 0.0];
    let a = local_quantize(&sym, eps, Variant::KN, 5).unwrap();
    let psi = r.band_fn(group, 3);
    let out = apply(&a, &psi);
    let (j2, _) = exp_jacobian(group, &y);
    let s = (0.5 * (y[0] * y[0] + y[1] * y[1]).sqrt()).sin() / (0.5 * (y[0] * y[0] + y[1] * y[1]).sqrt());
    assert!((j2 - s * s).abs() < 1e-15);
    let g = r.element(group);
    let shift = GroupElement::exp(group, &[-y[0], -y[1], -y[2]]);
    let want = cf.eval(&g) * psi.eval(&shift.mul(&g)) * j2;
    assert!((out.eval(&g) - want).norm() < 1e-11);
    assert!(matches!(local_quantize(&sym, 20.0, Variant::KN, 5), Err(Error::Support { .. })));
    assert!(local_quantize(&sym, -1.0, Variant::KN, 5).is_err());
}

#[test]
fn local_symbol_algebra() {
    let mut r = Lcg(2);
    let group = Group::U1;
    assert!(LocalSymbol::new(group, 0.0).is_err());
    let f = r.band_fn(group, 2);
    let mut s = LocalSymbol::new(group, 1.0).unwrap();
    assert!(s.add_term([0, 1, 0], Poly::Const, f.clone()).is_err());
    assert!(s.add_term([0; 3], Poly::Theta(1), f.clone()).is_err());
    s.add_term([1, 0, 0], Poly::Const, f.clone()).unwrap();
    let mom = LocalSymbol::momentum(group, &[1.0, 0.0, 0.0], 1.0).unwrap();
    let g = r.element(group);
    let theta = [0.7, 0.0, 0.0];
    let prod = s.mul(&mom).unwrap();
    assert!((prod.eval(&theta, &g) - s.eval(&theta, &g) * 0.7).norm() < 1e-13);
    assert!(prod.mul(&mom).is_err());
    assert!((s.conj().eval(&theta, &g) - s.eval(&theta, &g).conj()).norm() < 1e-13);
    // {θ, f} = R f on U(1).
    let b = poisson_bracket(&mom, &LocalSymbol::function(f.clone(), 1.0).unwrap()).unwrap();
    assert!((b.eval(&theta, &g) - f.derivative(&[1.0, 0.0, 0.0]).eval(&g)).norm() < 1e-12);
    let h = 1e-6;
    let fd = (s.eval(&[0.7 + h, 0.0, 0.0], &g) - s.eval(&[0.7 - h, 0.0, 0.0], &g)) / (2.0 * h);
    assert!((s.theta_derivative(0).eval(&theta, &g) - fd).norm() < 1e-8);
    assert!((s.scale_momentum(3).eval(&theta, &g) - s.eval(&[2.1, 0.0, 0.0], &g)).norm() < 1e-12);
    let same = kernel_cutoff(|_| (c(1.0, 0.0), [c(0.0, 0.0); 3]), &s);
    assert!(same.max_coeff_diff(&s) < 1e-15);
    assert_eq!(s.support_radius(), 1.0);
    assert_eq!(prod.theta_degree(), 1);
}

#[test]
fn su2_bracket_is_lie_poisson() {
    // {θ(X), θ(Y)} = -θ([X, Y]).
    let (x, y) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let b = poisson_bracket(&LocalSymbol::momentum(Group::SU2, &x, 1.0).unwrap(), &LocalSymbol::momentum(Group::SU2, &y, 1.0).unwrap()).unwrap();
    let theta = [0.3, -0.8, 1.7];
    let g = GroupElement::identity(Group::SU2);
    assert!((b.eval(&theta, &g) - c(-1.7, 0.0)).norm() < 1e-13);
}

#[test]
fn midpoint_and_op_norm() {
    let mut r = Lcg(8);
    let f = r.band_fn(Group::SU2, 3);
    let pairs: Vec<_> = (0..20)
        .map(|_| {
            let k = r.element(Group::SU2);
            let x = [0.5 * (r.next() - 0.5), 0.5 * (r.next() - 0.5), 0.5 * (r.next() - 0.5)];
            (GroupElement::exp(Group::SU2, &x).mul(&k), k)
        })
        .collect();
    assert!(midpoint_residual(&f, &pairs) < 1e-12);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, -3.0)]));
    assert!((op_norm(&d) - 3.0).abs() < 1e-14);
    assert_eq!(op_norm(&CMat::zeros(0, 0)), 0.0);
}

#[test]
fn order_fit_needs_three_scales() {
    let s = LocalSymbol::function(BandFn::constant(Group::U1, c(1.0, 0.0)), 1.0).unwrap();
    assert!(semiclassical_order_fit(&s, &s, &[0.1, 0.05], Variant::Weyl, 2).is_err());
}

proptest! {
    #[test]
    fn kn_extraction_inverts_quantization(seed in 0u64..10_000) {
        let mut r = Lcg(seed);
        let grid = symbol_grid(Group::U1, 5, 2);
        let s = random_symbol(Group::U1, 3, 2, grid.clone(), &mut r);
        let a = kn_quantize(&s, 5).unwrap();
        prop_assert!(s.max_abs_diff(&kn_symbol(&a, grid)) < 1e-12);
    }
}
