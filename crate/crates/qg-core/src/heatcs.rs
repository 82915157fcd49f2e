//! Heat kernels, Jacobi theta functions, coherent-state overlaps and the
//! resolution-of-unity integrals on U(1) and SU(2).
//!
//! Heat times follow the character series `ρ_t = Σ d_π e^{-tλ_π/2} χ_π` with
//! `vol(G) = 1`. Coherent states are labelled by polar points `z = g e^{iX}`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate};
use crate::repgroup::{
    c, chebyshev_u, character, rep_matrix, wigner_d, CMat, Group, GroupElement, IrrepLabel, Quat,
    Vec3,
};

/// Below this `Im τ` the theta series is summed in the `-1/τ` frame.
const MODULAR_SWITCH: f64 = 1.0;

fn theta3_direct(z: Complex64, tau: Complex64, deriv: bool) -> Complex64 {
    // |term_n| = exp(-π Im τ n² - 2π n Im z): a Gaussian in n centred at -Im z / Im τ.
    let (a, b) = (PI * tau.im, 2.0 * PI * z.im);
    let centre = (-b / (2.0 * a)).round() as i64;
    let term = |n: i64| -> Complex64 {
        let nf = n as f64;
        let e = (c(0.0, PI) * tau * nf * nf + c(0.0, 2.0 * PI) * z * nf).exp();
        if deriv {
            e * c(0.0, 2.0 * PI * nf)
        } else {
            e
        }
    };
    let mut acc = term(centre);
    let peak = (-(a * (centre as f64).powi(2)) - b * centre as f64).max(-700.0);
    for dir in [1i64, -1] {
        let mut k = 1i64;
        loop {
            let n = centre + dir * k;
            let nf = n as f64;
            let logmag = -a * nf * nf - b * nf;
            acc += term(n);
            if logmag < peak - 45.0 && k > 2 {
                break;
            }
            k += 1;
        }
    }
    acc
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput("theta3 requires Im(tau) > 0"));
    }
    Ok(())
}

/// Third Jacobi theta function `ϑ₃(z|τ) = Σ_n e^{iπτn² + 2πinz}`.
///
/// For `Im τ < 1` the series is summed in the frame
/// `ϑ₃(z|τ) = (-iτ)^{-1/2} e^{-iπz²/τ} ϑ₃(z/τ | -1/τ)`.
pub fn theta3(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    if tau.im >= MODULAR_SWITCH {
        return Ok(theta3_direct(z, tau, false));
    }
    let (w, tp) = (z / tau, -tau.inv());
    let pref = (c(0.0, -1.0) * tau).sqrt().inv() * (c(0.0, -PI) * z * z / tau).exp();
    Ok(pref * theta3_direct(w, tp, false))
}

/// `ϑ₃` summed in the direct frame regardless of `τ`; used as an oracle.
pub fn theta3_series(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    Ok(theta3_direct(z, tau, false))
}

/// `∂_z ϑ₃(z|τ)`, term-wise differentiated in whichever frame `theta3` uses.
pub fn theta3_dz(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    if tau.im >= MODULAR_SWITCH {
        return Ok(theta3_direct(z, tau, true));
    }
    let (w, tp) = (z / tau, -tau.inv());
    let pref = (c(0.0, -1.0) * tau).sqrt().inv() * (c(0.0, -PI) * z * z / tau).exp();
    let th = theta3_direct(w, tp, false);
    let dth = theta3_direct(w, tp, true);
    Ok(pref * (c(0.0, -2.0 * PI) * z / tau * th + dth / tau))
}

/// Heat time and character-series truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatParams {
    pub group: Group,
    pub t: f64,
    /// Largest irrep label kept (U(1): `|j| ≤ Λ`; SU(2): `n ≤ Λ`).
    pub truncation: i64,
}

impl HeatParams {
    /// Chooses the smallest `Λ` with `d_Λ e^{-tλ_Λ/2} (Λ+1) < 1e-16`.
    pub fn new(group: Group, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput("heat time must be positive"));
        }
        let mut lam = 1i64;
        loop {
            let pi = IrrepLabel { group, label: lam };
            let tail = pi.dim() as f64 * (-t * pi.casimir() / 2.0).exp() * (lam + 1) as f64;
            if tail < 1e-16 {
                break;
            }
            lam += 1;
            if lam > 1_000_000 {
                return Err(Error::Resource {
                    what: "heat kernel truncation",
                    requested: lam as usize,
                    max: 1_000_000,
                });
            }
        }
        Ok(Self { group, t, truncation: lam })
    }
}

/// Heat kernel `ρ_t(g)`.
pub fn heat_kernel(p: &HeatParams, g: &GroupElement) -> f64 {
    let mut acc = 0.0;
    match p.group {
        Group::U1 => {
            for j in -p.truncation..=p.truncation {
                let pi = IrrepLabel::u1(j);
                acc += (-p.t * pi.casimir() / 2.0).exp() * character(&pi, g).re;
            }
        }
        Group::SU2 => {
            for n in 1..=p.truncation {
                let pi = IrrepLabel::su2(n);
                acc += n as f64 * (-p.t * pi.casimir() / 2.0).exp() * character(&pi, g).re;
            }
        }
    }
    acc
}

/// Point `Φ(g, X) = g e^{iX}` of the complexified group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub g: GroupElement,
    pub x: Vec3,
}

type M2 = [[Complex64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

fn quat_m2(q: &Quat) -> M2 {
    let (a, b) = q.cayley_klein();
    [[a, b], [-b.conj(), a.conj()]]
}

/// `e^{s·iX}` for `s = ±1`: `cosh(r/2) + s sinh(r/2) n·σ`.
fn exp_ix(x: &Vec3, s: f64) -> M2 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let ch = (0.5 * r).cosh();
    let shr = if r < 1e-300 { 0.0 } else { s * (0.5 * r).sinh() / r };
    let (nx, ny, nz) = (shr * x[0], shr * x[1], shr * x[2]);
    [[c(ch + nz, 0.0), c(nx, -ny)], [c(nx, ny), c(ch - nz, 0.0)]]
}

impl PolarPoint {
    /// `z̄ = g e^{-iX}` as a 2×2 matrix (SU(2) only).
    fn conj_m2(&self) -> M2 {
        match self.g {
            GroupElement::SU2(q) => m2_mul(&quat_m2(&q), &exp_ix(&self.x, -1.0)),
            _ => unreachable!(),
        }
    }

    /// `z⁻¹ = e^{-iX} g⁻¹` (SU(2) only).
    fn inv_m2(&self) -> M2 {
        match self.g {
            GroupElement::SU2(q) => m2_mul(&exp_ix(&self.x, -1.0), &quat_m2(&q.inv())),
            _ => unreachable!(),
        }
    }
}

/// `Σ_n n e^{-s(n²-1)/4} U_{n-1}(w)`: the SU(2) heat kernel `ρ_{2s}` at half trace `w`.
///
/// The sum is continued past the peak of `|term|` (which moves to `n ≈ 2 acosh|w| / s`
/// off the real group) until the terms are negligible.
pub fn su2_heat_series_c(s: f64, w: Complex64) -> Complex64 {
    // |U_{n-1}(w)| <= n ρ^{n-1} with ρ = |w| + sqrt(|w|² + 1); the envelope bounds the tail.
    let rho = w.norm() + (w.norm_sqr() + 1.0).sqrt();
    let mut u0 = c(0.0, 0.0);
    let mut u1 = c(1.0, 0.0);
    let mut acc = c(0.0, 0.0);
    let mut best: f64 = 0.0;
    let mut n = 1i64;
    loop {
        let nf = n as f64;
        let term = u1 * (nf * (-s * (nf * nf - 1.0) / 4.0).exp());
        acc += term;
        best = best.max(term.norm());
        let env_log = 2.0 * nf.ln() - s * (nf * nf - 1.0) / 4.0 + (nf - 1.0) * rho.ln();
        let past_peak = s * nf / 2.0 > rho.ln() + 2.0 / nf;
        if past_peak && env_log < best.max(1e-300).ln() - 42.0 {
            break;
        }
        let u2 = w * 2.0 * u1 - u0;
        u0 = u1;
        u1 = u2;
        n += 1;
    }
    acc
}

/// Coherent-state overlap `(Ψ_z, Ψ_{z'}) = ρ_{2t}(z'⁻¹ z̄)`.
pub fn coherent_overlap(p: &HeatParams, z: &PolarPoint, zp: &PolarPoint) -> Complex64 {
    match p.group {
        Group::U1 => {
            let (phi, l) = (z.g.log()[0], z.x[0]);
            let (phip, lp) = (zp.g.log()[0], zp.x[0]);
            // Σ_j e^{-t j²} e^{j(l+l') + i j(φ-φ')} = ϑ₃(((φ-φ') - i(l+l'))/2π | it/π).
            let arg = c((phi - phip) / (2.0 * PI), -(l + lp) / (2.0 * PI));
            theta3(arg, c(0.0, p.t / PI)).expect("Im tau > 0")
        }
        Group::SU2 => {
            let m = m2_mul(&zp.inv_m2(), &z.conj_m2());
            su2_heat_series_c(p.t, (m[0][0] + m[1][1]) * 0.5)
        }
    }
}

/// Squared norm `‖Ψ_z‖²`; depends only on `X`.
pub fn coherent_norm_sq(p: &HeatParams, z: &PolarPoint) -> f64 {
    coherent_overlap(p, z, z).re
}

/// Closed form of the SU(2) norm at `X = p τ_z`:
/// `e^{t/4} / (2 sinh p) · ϑ₃'(p/2πi | it/4π) / (2πi)`.
pub fn su2_norm_theta_form(t: f64, p: f64) -> Result<f64> {
    if p.abs() < 1e-8 {
        return Err(Error::InvalidInput("theta form needs p != 0"));
    }
    let d = theta3_dz(c(0.0, -p / (2.0 * PI)), c(0.0, t / (4.0 * PI)))?;
    let sum = d / c(0.0, 2.0 * PI);
    Ok((t / 4.0).exp() / (2.0 * p.sinh()) * sum.re)
}

/// Integrand of `C_t⁻¹` in the reduced frame: `√(t/π) e^{-(l+s)²/t} / ϑ₃((l+s)/t | iπ/t)`.
fn u1_resolution_integrand(t: f64, l: f64) -> f64 {
    let th = theta3(c(l / t, 0.0), c(0.0, PI / t)).expect("Im tau > 0").re;
    (t / PI).sqrt() * (-l * l / t).exp() / th
}

/// `C_t⁻¹ = ∫_ℝ dl / ϑ₃(il/π | it/π)` for U(1); the integrand is evaluated in the
/// frame `iπ/t` and truncated at `|l| ≤ 12√t`.
pub fn resolution_constant_u1(t: f64) -> Result<f64> {
    resolution_constant_u1_shifted(t, 0.0)
}

/// Same integral after substituting `l → l + shift`; the result must not depend on `shift`.
pub fn resolution_constant_u1_shifted(t: f64, shift: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time must be positive"));
    }
    let w = 12.0 * t.sqrt();
    let (v, _) = integrate(
        |l| c(u1_resolution_integrand(t, l + shift), 0.0),
        -w - shift,
        w - shift,
        1e-14,
        1e-12,
    )?;
    Ok(v.re)
}

/// Value and imaginary residual of `I(t, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub imag_residual: f64,
}

/// `I(t,n) = 2πi ∫ p² e^{-(p-tn/2)²/t} (e^{-p²/t} ϑ₃'(p/2πi | it/4π))⁻¹ dp`.
///
/// The window is `|p - tn/2| ≤ 12√t`, split at the removable point `p = 0`.
pub fn resolution_integral_su2(t: f64, n: i64) -> Result<IntegralValue> {
    if !(t > 0.0) || n < 1 {
        return Err(Error::InvalidInput("need t > 0 and n >= 1"));
    }
    let centre = t * n as f64 / 2.0;
    let w = 12.0 * t.sqrt();
    let tau = c(0.0, t / (4.0 * PI));
    let nf = n as f64;
    let f = |p: f64| -> Complex64 {
        let d = theta3_dz(c(0.0, -p / (2.0 * PI)), tau).expect("Im tau > 0");
        // e^{-(p-tn/2)²/t} / e^{-p²/t} = e^{pn - tn²/4}.
        c(0.0, 2.0 * PI) * (p * p * (p * nf - t * nf * nf / 4.0).exp()) / d
    };
    let (a, b) = (centre - w, centre + w);
    let mut total = c(0.0, 0.0);
    let pieces: Vec<(f64, f64)> =
        if a < 0.0 && b > 0.0 { alloc::vec![(a, 0.0), (0.0, b)] } else { alloc::vec![(a, b)] };
    for (lo, hi) in pieces {
        let (v, _) = integrate(f, lo, hi, 1e-13, 1e-12)?;
        total += v;
    }
    Ok(IntegralValue { value: total.re, imag_residual: total.im.abs() })
}

/// `I(t, n)` with a fixed `nodes`-point Gauss-Legendre rule on each side of `p = 0`; a
/// coarse rule shows up as a deficit against the adaptive value.
pub fn resolution_integral_su2_fixed(t: f64, n: i64, nodes: usize) -> Result<IntegralValue> {
    if !(t > 0.0) || n < 1 || nodes == 0 {
        return Err(Error::InvalidInput("need t > 0, n >= 1 and at least one node"));
    }
    let centre = t * n as f64 / 2.0;
    let w = 12.0 * t.sqrt();
    let tau = c(0.0, t / (4.0 * PI));
    let nf = n as f64;
    let (xs, ws) = gauss_legendre(nodes);
    let (a, b) = (centre - w, centre + w);
    let pieces: Vec<(f64, f64)> =
        if a < 0.0 && b > 0.0 { alloc::vec![(a, 0.0), (0.0, b)] } else { alloc::vec![(a, b)] };
    let mut total = c(0.0, 0.0);
    for (lo, hi) in pieces {
        let (h, m) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        for (x, wx) in xs.iter().zip(&ws) {
            let p = m + h * x;
            let d = theta3_dz(c(0.0, -p / (2.0 * PI)), tau)?;
            total += c(0.0, 2.0 * PI) * (p * p * (p * nf - t * nf * nf / 4.0).exp()) / d * (h * wx);
        }
    }
    Ok(IntegralValue { value: total.re, imag_residual: total.im.abs() })
}

/// Closed-form law `I(t,n) = t³ n / 8`.
pub fn resolution_integral_su2_law(t: f64, n: i64) -> f64 {
    t * t * t * n as f64 / 8.0
}

/// Radial integrand of `tr A^t_π`: `ρ_{2t}(e^{2iX})⁻¹ e^{-tλ_n} χ_n(e^{2iX})` at `|X| = r`.
fn schur_radial(t: f64, n: i64, r: f64) -> f64 {
    // Both series share the prefactor e^{t/4}/(2 sinh r); cancel it analytically.
    let nf = n as f64;
    let num = (nf * r - t * nf * nf / 4.0).exp() - (-nf * r - t * nf * nf / 4.0).exp();
    let mut den = 0.0;
    let centre = (2.0 * r / t).round() as i64;
    let span = (12.0 * 2.0 / t.sqrt()).ceil() as i64 + 4;
    for m in (centre - span).min(-span)..=(centre + span).max(span) {
        let mf = m as f64;
        den += mf * (-t * mf * mf / 4.0 + mf * r - (r * r / t)).exp();
    }
    num * (-(r * r) / t).exp() / den
}

/// Result of [`schur_residual_su2`].
#[derive(Debug, Clone)]
pub struct SchurResult {
    pub matrix: CMat,
    pub residual: f64,
    pub trace: Complex64,
}

/// Quadrature on `su(2) ≅ ℝ³` for the Schur-property integral: Gauss-Legendre in `r`,
/// Gauss-Legendre in `cos β` and uniform in `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraQuad {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for AlgebraQuad {
    fn default() -> Self {
        Self { radial: 160, polar: 12, azimuthal: 24 }
    }
}

/// `A^t_π = ∫_𝔤 ρ_{2t}(e^{2iX})⁻¹ e^{-tλ_π} π(e^{2iX}) dX` with `dX` the Lebesgue measure
/// divided by `16π²` (so that `dg = j(X)² dX`), and its Schur residual
/// `‖A - tr(A)/d · 1‖_F / |tr A|`.
pub fn schur_residual_su2(t: f64, n: i64, q: &AlgebraQuad) -> Result<SchurResult> {
    if !(t > 0.0) || n < 1 {
        return Err(Error::InvalidInput("need t > 0 and n >= 1"));
    }
    let d = n as usize;
    let tj = n - 1;
    let rmax = t * n as f64 / 2.0 + 8.0 * t.sqrt() + 1.0;
    let (xr, wr) = gauss_legendre(q.radial);
    let (xb, wb) = gauss_legendre(q.polar);
    // π(e^{2iX}) = D(R) diag(e^{2 m r}) D(R)† where R rotates e_z to X/|X|.
    let mut rots: Vec<(CMat, f64)> = Vec::new();
    for (cb, wbeta) in xb.iter().zip(&wb) {
        let beta = cb.acos();
        for ia in 0..q.azimuthal {
            let alpha = 2.0 * PI * ia as f64 / q.azimuthal as f64;
            let dm = wigner_d(tj, &Quat::from_euler_zyz(alpha, beta, 0.0));
            rots.push((dm, 0.5 * wbeta / q.azimuthal as f64));
        }
    }
    let mut acc = CMat::zeros(d, d);
    for (x, w) in xr.iter().zip(&wr) {
        let r = 0.5 * rmax * (x + 1.0);
        let radial_w = 0.5 * rmax * w * 4.0 * PI * r * r / (16.0 * PI * PI);
        let f = schur_radial(t, n, r);
        // χ_n appears through the diagonal; divide it back out of the radial weight.
        let chi: f64 = (0..d).map(|k| (2.0 * r * (tj as f64 / 2.0 - k as f64)).exp()).sum();
        let scale = radial_w * f / chi;
        let diag = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c((2.0 * r * (tj as f64 / 2.0 - i as f64)).exp(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        for (dm, ws) in &rots {
            acc += (dm * &diag * dm.adjoint()) * c(scale * ws, 0.0);
        }
    }
    let tr = acc.trace();
    let resid = &acc - CMat::identity(d, d) * (tr / d as f64);
    Ok(SchurResult { residual: resid.norm() / tr.norm(), trace: tr, matrix: acc })
}

/// `tr A^t_π` from the one-dimensional radial integral `∫ 4πr² (…) dr / 16π²`.
pub fn schur_trace_radial(t: f64, n: i64) -> Result<f64> {
    let rmax = t * n as f64 / 2.0 + 12.0 * t.sqrt() + 1.0;
    let (v, _) = integrate(
        |r| c(4.0 * PI * r * r * schur_radial(t, n, r) / (16.0 * PI * PI), 0.0),
        0.0,
        rmax,
        1e-15,
        1e-12,
    )?;
    Ok(v.re)
}

/// `(2πt)³ ‖Ψ_{Φ(g,X)}‖² / 16π² · ν_t(X) σ(X)` for SU(2), with
/// `ν_t σ = (πt)^{-3/2} e^{-t/4} e^{-|X|²/t} sinh|X| / |X|`.
///
/// The `16π²` converts the unit-volume Haar normalization to the Riemannian one.
pub fn measure_equiv_ratio(t: f64, x: &Vec3) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time must be positive"));
    }
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let p = HeatParams::new(Group::SU2, t)?;
    let z = PolarPoint { g: GroupElement::identity(Group::SU2), x: *x };
    // Work in logs: ‖Ψ‖² grows like e^{r²/t}.
    let norm = coherent_norm_sq(&p, &z);
    let eta = if r < 1e-8 { 1.0 + r * r / 6.0 } else { r.sinh() / r };
    let log_val = 3.0 * (2.0 * PI * t).ln() + norm.ln() - (16.0 * PI * PI).ln() - 1.5 * (PI * t).ln()
        - t / 4.0
        - r * r / t
        + eta.ln();
    Ok(log_val.exp())
}

/// The same ratio from the Poisson-resummed lattice sum
/// `1 + 2 Σ_{k≥1} e^{-4π²k²/t} [cos(4πkr/t) - (2πk/r) sin(4πkr/t)]`.
pub fn measure_equiv_ratio_poisson(t: f64, r: f64) -> f64 {
    let mut s = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let g = (-4.0 * PI * PI * kf * kf / t).exp();
        if g < 1e-300 {
            break;
        }
        let th = 4.0 * PI * kf * r / t;
        let sinc = if r.abs() < 1e-10 {
            2.0 * PI * kf * 4.0 * PI * kf / t
        } else {
            2.0 * PI * kf / r * th.sin()
        };
        s += 2.0 * g * (th.cos() - sinc);
    }
    s
}

/// Matrix `π(g)` of the complexified element `e^{iX}` for SU(2): `exp(X·J)` restricted to
/// the spin-`(n-1)/2` irrep, built from the eigen-decomposition along `X/|X|`.
pub fn rep_matrix_imag(n: i64, x: &Vec3) -> CMat {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let d = n as usize;
    if r < 1e-300 {
        return CMat::identity(d, d);
    }
    let beta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let alpha = x[1].atan2(x[0]);
    let dm = rep_matrix(&IrrepLabel::su2(n), &GroupElement::SU2(Quat::from_euler_zyz(alpha, beta, 0.0)));
    let tj = (n - 1) as f64;
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            c((r * (tj / 2.0 - i as f64)).exp(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    &dm * diag * dm.adjoint()
}

/// `Σ_m m e^{-tm²/4 + mp}` via the Chebyshev recurrence; oracle for the theta form.
pub fn su2_weighted_gauss_sum(t: f64, p: f64) -> f64 {
    (-t / 4.0).exp() * 2.0 * p.sinh() * su2_heat_series_c(t, c(p.cosh(), 0.0)).re
}

/// `U_{n-1}` re-exported for the analytic character at a complex half trace.
pub fn character_c(n: i64, half_trace: Complex64) -> Complex64 {
    chebyshev_u(n, half_trace)
}
