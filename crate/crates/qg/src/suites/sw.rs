//! Stratonovich-Weyl calculus on SU(2) coadjoint orbits.

use num_complex::Complex64;
use qg_core::pw::BandFn;
use qg_core::repgroup::{group_quadrature, wigner_d, CMat, Group, GroupElement, Vec3};
use qg_core::sworbit::{
    berezin_relation_residual, cartan_power_residual, e_kernel, e_kernel_at, k_rate_fit, max_abs, sw_operator,
    sw_quantize, sw_symbol, sw_twisted_product, OrbitSpec, SwfTransform,
};
use rand_chacha::ChaCha8Rng;

use super::{crand, random_band_fn, random_quat, rng};
use crate::config::RunConfig;
use crate::report::{num, Check, Report};

/// Default largest spin.
pub const DEFAULT_TWO_J: i64 = 8;

/// Spins of the `K_j f → f` rate fit, `j ∈ {4, 8, 16, 32}`.
pub const RATE_TWO_JS: [i64; 4] = [8, 16, 32, 64];

fn random_matrix(d: usize, r: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| crand(r))
}

fn random_dir(r: &mut ChaCha8Rng) -> Vec3 {
    random_quat(r).rotate(&[0.0, 0.0, 1.0])
}

/// Worst residual of each orbit identity over the spins tested.
#[derive(Debug, Clone, Default)]
pub struct OrbitResiduals {
    pub rows: Vec<(&'static str, f64)>,
}

impl OrbitResiduals {
    fn put(&mut self, name: &'static str, v: f64) {
        match self.rows.iter_mut().find(|(n, _)| *n == name) {
            Some(row) => row.1 = row.1.max(v),
            None => self.rows.push((name, v)),
        }
    }
}

/// All orbit identities at spin `two_j / 2`.
pub fn orbit_identities(two_j: i64, r: &mut ChaCha8Rng, out: &mut OrbitResiduals) -> qg_core::Result<()> {
    let spec = OrbitSpec::new(two_j)?;
    let delta = sw_operator(&spec)?;
    let d = spec.dim();
    out.put("W1 normalization", delta.identity_residual());
    out.put("reality", delta.hermiticity_residual());

    let a = random_matrix(d, r);
    let b = random_matrix(d, r);
    let wa = sw_symbol(&delta, &a)?;
    let wb = sw_symbol(&delta, &b)?;
    let tr = (a.adjoint() * &b).trace();
    out.put("tracial", (tr - wa.inner(&wb, &spec)).norm());
    let (back, _) = sw_quantize(&delta, &wa);
    out.put("roundtrip", max_abs(&(back - &a)));
    out.put("twisted product", sw_twisted_product(&delta, &wa, &wb).max_abs_diff(&sw_symbol(&delta, &(&a * &b))?));
    out.put("berezin relation", berezin_relation_residual(&delta, &wa)?);

    let g = random_quat(r);
    let h = random_quat(r);
    let dir = random_dir(r);
    let pg = wigner_d(two_j, &g);
    let moved = ((delta.at(&dir)) * &pg * &a * pg.adjoint()).trace();
    out.put("covariance", (moved - (delta.at(&g.inv().rotate(&dir)) * &a).trace()).norm());

    let eg = e_kernel(&delta, &g);
    out.put("E1 conjugation", eg.conj().max_abs_diff(&e_kernel(&delta, &g.inv())));
    let e2 = e_kernel_at(&delta, &h.mul(&g).mul(&h.inv()), &dir) - e_kernel_at(&delta, &g, &h.inv().rotate(&dir));
    out.put("E2 covariance", e2.norm());
    let chi = pg.trace();
    out.put("E3 character", (spec.integrate(&eg.values) - chi).norm());
    let q = group_quadrature(Group::SU2, d)?;
    let dir2 = random_dir(r);
    let (d1, d2) = (delta.at(&dir), delta.at(&dir2));
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, w) in q.nodes.iter().zip(&q.weights) {
        let GroupElement::SU2(x) = node else { unreachable!("SU(2) quadrature") };
        let p = wigner_d(two_j, x);
        acc += (&d1 * &p).trace() * (&d2 * &p).trace().conj() * *w;
    }
    out.put("E4 orthogonality", (acc - (&d1 * &d2).trace() / d as f64).norm());
    out.put("E6 homomorphism", sw_twisted_product(&delta, &eg, &e_kernel(&delta, &h)).max_abs_diff(&e_kernel(&delta, &g.mul(&h))));
    Ok(())
}

/// Transform identities for SU(2) functions of band `band`.
pub fn swf_identities(band: i64, r: &mut ChaCha8Rng, out: &mut OrbitResiduals) -> qg_core::Result<()> {
    let t = SwfTransform::new(band)?;
    let psi = random_band_fn(Group::SU2, band, r);
    let phi = random_band_fn(Group::SU2, band, r);
    let f = t.forward(&psi)?;
    let back = t.inverse(&f)?;
    out.put("SWF inversion", coeff_diff(&back, &psi));
    out.put("SWF parseval", (psi.norm_l2().powi(2) - t.norm_sq(&f)).abs());
    let g = random_quat(r);
    out.put("SWF pointwise inversion", (t.inverse_at(&f, &g) - psi.eval(&GroupElement::SU2(g))).norm());
    let conv = t.forward(&psi.convolve(&phi))?;
    let prod = t.product(&f, &t.forward(&phi)?);
    out.put("SWF convolution", conv.iter().zip(&prod).fold(0.0, |m: f64, (a, b)| m.max(a.max_abs_diff(b))));
    let shifted = t.forward(&psi.left_shift(&GroupElement::SU2(g.inv())))?;
    let acted: Vec<_> = t.orbits.iter().zip(&f).map(|(delta, x)| sw_twisted_product(delta, &e_kernel(delta, &g), x)).collect();
    out.put("E5 intertwining", shifted.iter().zip(&acted).fold(0.0, |m: f64, (a, b)| m.max(a.max_abs_diff(b))));
    Ok(())
}

fn coeff_diff(a: &BandFn, b: &BandFn) -> f64 {
    a.coeffs.iter().zip(&b.coeffs).fold(0.0, |m: f64, (x, y)| m.max((x - y).norm()))
}

/// Orbit and transform identities for `j ≤ --j` (default 4), Cartan powers and the
/// `K_j` convergence rate.
pub fn sw_props(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("sw_props", cfg.seed);
    let tol = cfg.tol_or(1e-9);
    let two_j_max = cfg.two_j_or(DEFAULT_TWO_J);
    rep.param("j_max", num(two_j_max as f64 / 2.0));
    let mut res = OrbitResiduals::default();
    let mut r = rng(cfg.seed, 1000);
    for two_j in 0..=two_j_max {
        if let Err(e) = orbit_identities(two_j, &mut r, &mut res) {
            rep.errors.push(format!("2j={two_j}: {e}"));
        }
    }
    if let Err(e) = swf_identities(two_j_max + 1, &mut r, &mut res) {
        rep.errors.push(format!("SWF: {e}"));
    }
    for (name, v) in &res.rows {
        rep.check(Check::below(*name, *v, tol));
    }
    let mut cartan: f64 = 0.0;
    for two_j in 1..=two_j_max {
        let g = random_quat(&mut r);
        for k in 2..=3 {
            cartan = cartan.max(cartan_power_residual(two_j, k, &g));
        }
    }
    rep.check(Check::below("cartan powers", cartan, 1e-12));
    let pts: Vec<Vec3> = (0..20)
        .map(|i| {
            let b = std::f64::consts::PI * i as f64 / 19.0;
            [b.sin(), 0.0, b.cos()]
        })
        .collect();
    rep.try_check(
        k_rate_fit(|n| 1.5 * n[2] * n[2] - 0.5, &RATE_TWO_JS, &pts).map(|f| Check::within("K_j rate slope", f.slope, 1.0, 0.2)),
    );
    rep
}

