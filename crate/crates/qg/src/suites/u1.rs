//! Berezin quantization on `T*U(1)`: Fourier modes, Wick monomials, KN lower symbols and
//! Weyl elements.

use num_complex::Complex64;
use qg_core::bohrcalc::{
    annihilation_residual, heat_multiplier, u1_berezin_mode_exact, u1_berezin_smoothing, u1_kn_lower_symbol_direct,
    u1_kn_lower_symbol_gauss, u1_weyl_orthogonality_residual, u1_wick_lower_symbol, CylinderPoly, OverlapQuad,
};

use crate::config::RunConfig;
use crate::report::{num, Check, Report};

/// Default heat time; the heat-multiplier identity holds to `O(e^{-π²/t})`.
pub const DEFAULT_T: f64 = 0.25;
/// Equivariance offset `j₀`.
pub const J0: f64 = 0.3;

/// Modes `(m, κ)` of `e^{i(mφ + κl)}`.
pub const MODES: [(i64, f64); 6] = [(0, 0.0), (1, 0.0), (-1, 0.0), (2, 0.5), (-1, 1.3), (3, -2.0)];
/// Evaluation points `(φ, l)`.
pub const POINTS: [(f64, f64); 3] = [(0.4, 0.6), (2.0, -0.8), (5.1, 1.7)];

/// `(overlap vs heat, wick vs heat, overlap vs closed form)` over [`MODES`] and [`POINTS`].
pub fn mode_residuals(t: f64) -> qg_core::Result<(f64, f64, f64)> {
    let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
    for &(m, k) in &MODES {
        let f: CylinderPoly = vec![(m, k, Complex64::new(1.0, 0.0))];
        for &(phi, l) in &POINTS {
            let r = u1_berezin_smoothing(&f, t, J0, phi, l, OverlapQuad::default())?;
            let heat = Complex64::new(0.0, m as f64 * phi + k * l).exp() * heat_multiplier(t, m as f64, k);
            a = a.max((r.overlap - heat).norm());
            b = b.max((r.wick - heat).norm());
            c = c.max((r.overlap - u1_berezin_mode_exact(t, J0, m, k, phi, l)?).norm());
        }
    }
    Ok((a, b, c))
}

/// Relative deviation of the lower symbol of `X^a (X*)^b` from `e^{2tab} ξ^a ξ̄^b`.
pub fn wick_monomial_residual(t: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b) in [(1u32, 0u32), (0, 1), (1, 1), (2, 1), (0, 2), (2, 2)] {
        for &(phi, l) in &POINTS {
            let xi = Complex64::new(-l, phi).exp();
            let want = (2.0 * t * (a * b) as f64).exp() * xi.powu(a) * xi.conj().powu(b);
            worst = worst.max((u1_wick_lower_symbol(t, J0, a, b, phi, l) - want).norm() / want.norm());
        }
    }
    worst
}

/// Berezin smoothing by both routes, Wick monomials, the coherent-state eigenrelation, the
/// two KN lower-symbol forms and Weyl-element orthogonality.
pub fn berezin_u1(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("berezin_u1", cfg.seed);
    let tol = cfg.tol_or(1e-9);
    let t = cfg.t.unwrap_or(DEFAULT_T);
    rep.param("t", num(t));
    rep.param("j0", num(J0));
    match mode_residuals(t) {
        Ok((a, b, c)) => {
            rep.check(Check::below("modes: overlap integral vs heat multiplier", a, tol));
            rep.check(Check::below("modes: wick continuation vs heat multiplier", b, tol));
            rep.check(Check::below("modes: overlap integral vs closed form", c, 1e-12));
        }
        Err(e) => rep.errors.push(e.to_string()),
    }
    if cfg.t.is_none() {
        match mode_residuals(0.5) {
            Ok((a, _, _)) => rep.check(Check::below("modes at t=0.5: theta correction", a, tol).known_deviation()),
            Err(e) => rep.errors.push(e.to_string()),
        }
    }
    rep.check(Check::below("wick monomials", wick_monomial_residual(t), 1e-10));
    let eig = POINTS.iter().fold(0.0f64, |m, &(phi, l)| m.max(annihilation_residual(t, J0, phi, l)));
    rep.check(Check::below("eigenrelation X xi = xi xi", eig, 1e-10));
    let sigma = |p: f64, k: i64| {
        Complex64::new((2.0 * p).cos() * 0.1 * k as f64, 0.0)
            + Complex64::new(0.0, p).exp() * (1.0 / (1.0 + (k * k) as f64))
    };
    let mut kn: f64 = 0.0;
    for &(phi, l) in &POINTS {
        let d = u1_kn_lower_symbol_direct(sigma, t, J0, phi, l, 16);
        match u1_kn_lower_symbol_gauss(sigma, t, J0, phi, l, 200) {
            Ok(g) => kn = kn.max((d - g).norm()),
            Err(e) => rep.errors.push(e.to_string()),
        }
    }
    rep.check(Check::below("KN lower symbol: direct vs gaussian form", kn, 1e-10));
    rep.check(Check::below("weyl element orthogonality", u1_weyl_orthogonality_residual(t, J0, 3, &[-1, 0, 2]), 1e-10));
    rep
}
