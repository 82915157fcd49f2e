//! Stratonovich-Weyl calculus on the coadjoint orbits of SU(2).
//!
//! The orbit of spin `j` is the sphere of radius `j` in `𝔤* ≅ ℝ³`, parametrized by polar
//! angles `(β, α)` with section `g_θ = e^{-iαJ_z} e^{-iβJ_y}`. The coherent vector
//! `v_θ = π(g_θ) e_j` has momentum `⟨v_θ, J v_θ⟩ = j n̂(θ)`, with `J_a = i dπ(τ_a)`. The orbit
//! measure is `μ = (2j+1) dΩ/4π`, so `μ(O) = d_π`.
//!
//! The smoothing kernel `K(θ,θ') = |⟨v_θ, v_θ'⟩|²` is rotation invariant and acts on degree-`l`
//! harmonics by `k_l`. Lower symbols `L_A = tr(P_θ A)` satisfy `L = K U` for upper symbols
//! `U`, and the Stratonovich-Weyl operator is `Δ(θ) = K^{-1/2} P_θ` (positive root), so
//! `W_A = K^{-1/2} L_A` and `Q^SW(f) = Q^B(K^{-1/2} f)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DVector;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pw::BandFn;
use crate::quad::{gauss_legendre, ls_slope};
use crate::repgroup::{c, wigner_d, wigner_d_column, CMat, Group, Quat, Vec3};

/// Largest `2j` for which [`OrbitSpec`] tabulates harmonics.
pub const MAX_TWO_J: i64 = 32;
/// Floor on `k_l` below which `K^{-1/2}` is refused.
pub const CONDITIONING_FLOOR: f64 = 1e-13;

/// Section `g_θ` for polar angles `(β, α)`.
pub fn section(beta: f64, alpha: f64) -> Quat {
    Quat::from_euler_zyz(alpha, beta, 0.0)
}

/// Unit vector `n̂(θ) = Ad_{g_θ} ẑ`.
pub fn direction(beta: f64, alpha: f64) -> Vec3 {
    [beta.sin() * alpha.cos(), beta.sin() * alpha.sin(), beta.cos()]
}

/// Polar angles of a nonzero vector; `α = 0` on the axis.
pub fn polar_angles(v: &Vec3) -> (f64, f64) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let beta = (v[2] / r).max(-1.0).min(1.0).acos();
    let alpha = if v[0].abs() + v[1].abs() < 1e-300 { 0.0 } else { v[1].atan2(v[0]) };
    (beta, alpha)
}

/// Coherent vector `v_θ = π(g_θ) e_j` in the weight basis `m = j..-j`.
pub fn orbit_coherent(two_j: i64, beta: f64, alpha: f64) -> DVector<Complex64> {
    wigner_d_column(two_j, &section(beta, alpha), 0)
}

/// Momentum `(⟨v, J_a v⟩)_a`; equals `j n̂(θ)` on coherent vectors.
pub fn momentum_map(two_j: i64, v: &DVector<Complex64>) -> Vec3 {
    let js = crate::repgroup::angular_momentum(two_j);
    let mut out = [0.0; 3];
    for (o, ja) in out.iter_mut().zip(js.iter()) {
        *o = (v.adjoint() * ja * v)[(0, 0)].re;
    }
    out
}

/// Position of `Y_{lm}` in a harmonic coefficient vector.
pub fn harmonic_index(l: usize, m: i64) -> usize {
    l * l + (l as i64 - m) as usize
}

/// `y_{lm}(θ) = √(2l+1) conj D^l_{m0}(g_θ)` for `l ≤ lmax`, orthonormal for `dΩ/4π`.
pub fn spherical_harmonics(lmax: usize, beta: f64, alpha: f64) -> Vec<Complex64> {
    let g = section(beta, alpha);
    let mut out = Vec::with_capacity((lmax + 1) * (lmax + 1));
    for l in 0..=lmax {
        let d = wigner_d_column(2 * l as i64, &g, l);
        let s = ((2 * l + 1) as f64).sqrt();
        out.extend(d.iter().map(|z| z.conj() * s));
    }
    out
}

/// Gauss-Legendre × uniform sphere grid exact for harmonic degree `degree` products.
///
/// Returns `(β, α)` nodes and weights summing to `total`.
pub fn sphere_grid(degree: usize, total: f64) -> (Vec<(f64, f64)>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(degree / 2 + 1);
    let na = degree + 1;
    let mut nodes = Vec::with_capacity(xs.len() * na);
    let mut weights = Vec::with_capacity(xs.len() * na);
    for (x, w) in xs.iter().zip(&ws) {
        let beta = x.max(-1.0).min(1.0).acos();
        for i in 0..na {
            nodes.push((beta, 2.0 * PI * i as f64 / na as f64));
            weights.push(total * 0.5 * w / na as f64);
        }
    }
    (nodes, weights)
}

/// Spin-`j` orbit with its quadrature, coherent vectors and harmonic table.
#[derive(Debug, Clone)]
pub struct OrbitSpec {
    pub two_j: i64,
    /// Harmonic degree integrated exactly, `4j + 2`.
    pub degree: usize,
    /// `(β, α)` per node.
    pub nodes: Vec<(f64, f64)>,
    /// Orbit measure weights, summing to `2j + 1`.
    pub weights: Vec<f64>,
    pub coherent: Vec<DVector<Complex64>>,
    /// `y_{lm}` at each node for `l ≤ 2j + 1`.
    pub harmonics: Vec<Vec<Complex64>>,
}

impl OrbitSpec {
    pub fn new(two_j: i64) -> Result<Self> {
        if two_j < 0 {
            return Err(Error::InvalidInput("spin must be non-negative"));
        }
        if two_j > MAX_TWO_J {
            return Err(Error::Resource { what: "orbit 2j", requested: two_j as usize, max: MAX_TWO_J as usize });
        }
        let degree = 2 * two_j as usize + 2;
        let (nodes, weights) = sphere_grid(degree, (two_j + 1) as f64);
        let coherent = nodes.iter().map(|&(b, a)| orbit_coherent(two_j, b, a)).collect();
        let lmax = two_j as usize + 1;
        let harmonics = nodes.iter().map(|&(b, a)| spherical_harmonics(lmax, b, a)).collect();
        Ok(Self { two_j, degree, nodes, weights, coherent, harmonics })
    }

    pub fn dim(&self) -> usize {
        (self.two_j + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest tabulated harmonic degree.
    pub fn lmax(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn direction(&self, k: usize) -> Vec3 {
        direction(self.nodes[k].0, self.nodes[k].1)
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    /// Largest `|⟨y_lm, y_l'm'⟩ - δ|` over tabulated degrees.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = (self.lmax() + 1) * (self.lmax() + 1);
        let norm = 1.0 / (self.two_j + 1) as f64;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let s: Complex64 = self
                    .harmonics
                    .iter()
                    .zip(&self.weights)
                    .map(|(y, w)| y[a].conj() * y[b] * *w)
                    .sum::<Complex64>()
                    * norm;
                let t = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - c(t, 0.0)).norm());
            }
        }
        worst
    }
}

/// Complex values on the nodes of an [`OrbitSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitField {
    pub two_j: i64,
    pub values: Vec<Complex64>,
}

impl OrbitField {
    pub fn from_fn<F: FnMut(&Vec3) -> Complex64>(spec: &OrbitSpec, mut f: F) -> Self {
        let values = (0..spec.len()).map(|k| f(&spec.direction(k))).collect();
        Self { two_j: spec.two_j, values }
    }

    pub fn constant(spec: &OrbitSpec, v: Complex64) -> Self {
        Self { two_j: spec.two_j, values: alloc::vec![v; spec.len()] }
    }

    /// Coefficients `f_lm = ∫ f conj(y_lm) dΩ/4π` for `l ≤ lmax ≤ spec.lmax()`.
    ///
    /// Exact when `f` has harmonic degree at most `spec.degree - lmax`.
    pub fn harmonics(&self, spec: &OrbitSpec, lmax: usize) -> Vec<Complex64> {
        let n = (lmax + 1) * (lmax + 1);
        let norm = 1.0 / (spec.two_j + 1) as f64;
        let mut out = alloc::vec![c(0.0, 0.0); n];
        for ((y, w), v) in spec.harmonics.iter().zip(&spec.weights).zip(&self.values) {
            let s = v * (*w * norm);
            for (o, yy) in out.iter_mut().zip(y.iter()) {
                *o += yy.conj() * s;
            }
        }
        out
    }

    /// `Σ_l s_l f_l` for the degree-`l` components, `l < factors.len()`.
    ///
    /// Returns the rescaled field and the discarded mass `‖f‖² - Σ |f_lm|²` (`dΩ/4π` norm).
    pub fn rescale(&self, spec: &OrbitSpec, factors: &[f64]) -> (OrbitField, f64) {
        let lmax = factors.len() - 1;
        let h = self.harmonics(spec, lmax);
        let kept: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        let discarded = (self.norm_sq(spec) / (spec.two_j + 1) as f64 - kept).max(0.0);
        let values = spec
            .harmonics
            .iter()
            .map(|y| {
                let mut s = c(0.0, 0.0);
                for (l, f) in factors.iter().enumerate() {
                    for idx in l * l..(l + 1) * (l + 1) {
                        s += h[idx] * y[idx] * *f;
                    }
                }
                s
            })
            .collect();
        (OrbitField { two_j: self.two_j, values }, discarded)
    }

    /// Value at an arbitrary direction by harmonic synthesis up to `l = 2j`.
    pub fn eval_at(&self, spec: &OrbitSpec, dir: &Vec3) -> Complex64 {
        let lmax = spec.two_j as usize;
        let h = self.harmonics(spec, lmax);
        let (b, a) = polar_angles(dir);
        spherical_harmonics(lmax, b, a).iter().zip(&h).map(|(y, f)| y * f).sum()
    }

    pub fn conj(&self) -> Self {
        Self { two_j: self.two_j, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn add(&self, o: &OrbitField) -> Self {
        Self { two_j: self.two_j, values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { two_j: self.two_j, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `∫ |f|² dμ`.
    pub fn norm_sq(&self, spec: &OrbitSpec) -> f64 {
        self.values.iter().zip(&spec.weights).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    /// `∫ conj(f) g dμ`.
    pub fn inner(&self, o: &OrbitField, spec: &OrbitSpec) -> Complex64 {
        self.values.iter().zip(&o.values).zip(&spec.weights).map(|((a, b), w)| a.conj() * b * *w).sum()
    }

    pub fn max_abs_diff(&self, o: &OrbitField) -> f64 {
        self.values.iter().zip(&o.values).fold(0.0, |m: f64, (a, b)| m.max((a - b).norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.im.abs()))
    }
}

fn check_dim(spec: &OrbitSpec, a: &CMat) -> Result<()> {
    if a.nrows() != spec.dim() || a.ncols() != spec.dim() {
        return Err(Error::InvalidInput("matrix size does not match the orbit"));
    }
    Ok(())
}

/// `L_A(θ) = ⟨v_θ, A v_θ⟩`.
pub fn lower_symbol(spec: &OrbitSpec, a: &CMat) -> Result<OrbitField> {
    check_dim(spec, a)?;
    let values = spec.coherent.iter().map(|v| (v.adjoint() * a * v)[(0, 0)]).collect();
    Ok(OrbitField { two_j: spec.two_j, values })
}

/// `L_A` at an arbitrary direction.
pub fn lower_symbol_at(two_j: i64, a: &CMat, dir: &Vec3) -> Complex64 {
    let (b, al) = polar_angles(dir);
    let v = orbit_coherent(two_j, b, al);
    (v.adjoint() * a * &v)[(0, 0)]
}

/// `k_l = (2j)!(2j+1)! / ((2j-l)!(2j+1+l)!)` for `0 ≤ l ≤ 2j`, by the stable product form.
pub fn sw_kernel_spectrum(two_j: i64) -> Vec<f64> {
    let n = two_j as f64;
    let mut out = Vec::with_capacity(two_j as usize + 1);
    let mut k = 1.0;
    out.push(k);
    for l in 1..=two_j {
        let l = l as f64;
        k *= (n + 1.0 - l) / (n + 1.0 + l);
        out.push(k);
    }
    out
}

/// `U_A = K^{-1} L_A`.
pub fn upper_symbol(spec: &OrbitSpec, a: &CMat) -> Result<OrbitField> {
    let f: Vec<f64> = sw_kernel_spectrum(spec.two_j).iter().map(|k| 1.0 / k).collect();
    Ok(lower_symbol(spec, a)?.rescale(spec, &f).0)
}

/// `K f` by harmonic rescaling.
pub fn kernel_apply(spec: &OrbitSpec, f: &OrbitField) -> OrbitField {
    f.rescale(spec, &sw_kernel_spectrum(spec.two_j)).0
}

/// `K^{s} f` for real `s`; components above `l = 2j` are dropped.
pub fn kernel_power(spec: &OrbitSpec, f: &OrbitField, s: f64) -> Result<(OrbitField, f64)> {
    let ks = sw_kernel_spectrum(spec.two_j);
    if s < 0.0 {
        if let Some(&k) = ks.iter().find(|&&k| k < CONDITIONING_FLOOR) {
            return Err(Error::Conditioning { value: k });
        }
    }
    let f2: Vec<f64> = ks.iter().map(|k| k.powf(s)).collect();
    Ok(f.rescale(spec, &f2))
}

/// `Δ(θ)` on the grid, with the matrix harmonic coefficients used for off-grid evaluation.
#[derive(Debug, Clone)]
pub struct SwOperatorField {
    pub spec: OrbitSpec,
    pub spectrum: Vec<f64>,
    /// `Δ` at each node.
    pub values: Vec<CMat>,
    /// `k_l^{-1/2} ∫ P_θ conj(y_lm) dΩ/4π`, indexed by [`harmonic_index`].
    pub coeffs: Vec<CMat>,
}

/// Builds `Δ = K^{-1/2} P_θ`; fails if some `k_l` is below [`CONDITIONING_FLOOR`].
pub fn sw_operator(spec: &OrbitSpec) -> Result<SwOperatorField> {
    let spectrum = sw_kernel_spectrum(spec.two_j);
    if let Some(&k) = spectrum.iter().find(|&&k| k < CONDITIONING_FLOOR) {
        return Err(Error::Conditioning { value: k });
    }
    let d = spec.dim();
    let lmax = spec.two_j as usize;
    let norm = 1.0 / d as f64;
    let mut coeffs = alloc::vec![CMat::zeros(d, d); (lmax + 1) * (lmax + 1)];
    for ((v, y), w) in spec.coherent.iter().zip(&spec.harmonics).zip(&spec.weights) {
        let p = v * v.adjoint();
        for (cm, yy) in coeffs.iter_mut().zip(y.iter()) {
            *cm += &p * (yy.conj() * (*w * norm));
        }
    }
    for l in 0..=lmax {
        let s = 1.0 / spectrum[l].sqrt();
        for idx in l * l..(l + 1) * (l + 1) {
            coeffs[idx] *= c(s, 0.0);
        }
    }
    let values = spec.harmonics.iter().map(|y| synth(&coeffs, y, d)).collect();
    Ok(SwOperatorField { spec: spec.clone(), spectrum, values, coeffs })
}

fn synth(coeffs: &[CMat], y: &[Complex64], d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for (cm, yy) in coeffs.iter().zip(y.iter()) {
        m += cm * *yy;
    }
    m
}

impl SwOperatorField {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `Δ` at an arbitrary direction.
    pub fn at(&self, dir: &Vec3) -> CMat {
        let (b, a) = polar_angles(dir);
        let y = spherical_harmonics(self.spec.two_j as usize, b, a);
        synth(&self.coeffs, &y, self.dim())
    }

    /// `‖∫ Δ dμ - 1‖_max`.
    pub fn identity_residual(&self) -> f64 {
        let d = self.dim();
        let mut s = CMat::zeros(d, d);
        for (m, w) in self.values.iter().zip(&self.spec.weights) {
            s += m * c(*w, 0.0);
        }
        max_abs(&(s - CMat::identity(d, d)))
    }

    /// Largest `‖Δ(θ)* - Δ(θ)‖_max` over the grid.
    pub fn hermiticity_residual(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, x| m.max(max_abs(&(x.adjoint() - x))))
    }
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a: f64, z| a.max(z.norm()))
}

/// `W_A(θ) = tr(Δ(θ) A)`.
pub fn sw_symbol(delta: &SwOperatorField, a: &CMat) -> Result<OrbitField> {
    check_dim(&delta.spec, a)?;
    let values = delta.values.iter().map(|m| (m * a).trace()).collect();
    Ok(OrbitField { two_j: delta.spec.two_j, values })
}

/// `A = ∫ W Δ dμ`, with the mass of `W` above `l = 2j` reported (it does not reach `A`).
pub fn sw_quantize(delta: &SwOperatorField, w: &OrbitField) -> (CMat, f64) {
    let d = delta.dim();
    let mut a = CMat::zeros(d, d);
    for ((m, v), wt) in delta.values.iter().zip(&w.values).zip(&delta.spec.weights) {
        a += m * (v * *wt);
    }
    let ones = alloc::vec![1.0; delta.spec.two_j as usize + 1];
    let (_, discarded) = w.rescale(&delta.spec, &ones);
    (a, discarded)
}

/// `(W_A ⋆ W_B)(θ) = ∫∫ tr(Δ(θ)Δ(θ')Δ(θ'')) W_A(θ') W_B(θ'') dμ' dμ''`.
///
/// The `θ''` integral is carried out first, giving `M_B = ∫ W_B Δ dμ`.
pub fn sw_twisted_product(delta: &SwOperatorField, wa: &OrbitField, wb: &OrbitField) -> OrbitField {
    let (mb, _) = sw_quantize(delta, wb);
    let inner: Vec<CMat> = delta.values.iter().map(|d1| d1 * &mb).collect();
    let values = delta
        .values
        .iter()
        .map(|d0| {
            let mut s = c(0.0, 0.0);
            for ((d1mb, a), w) in inner.iter().zip(&wa.values).zip(&delta.spec.weights) {
                s += (d0 * d1mb).trace() * a * *w;
            }
            s
        })
        .collect();
    OrbitField { two_j: delta.spec.two_j, values }
}

/// `E(g; θ) = tr(Δ(θ) π(g))`.
pub fn e_kernel(delta: &SwOperatorField, g: &Quat) -> OrbitField {
    let p = wigner_d(delta.spec.two_j, g);
    sw_symbol(delta, &p).expect("dimension fixed by the orbit")
}

/// `E(g; θ)` at an arbitrary direction.
pub fn e_kernel_at(delta: &SwOperatorField, g: &Quat, dir: &Vec3) -> Complex64 {
    (delta.at(dir) * wigner_d(delta.spec.two_j, g)).trace()
}

/// Stratonovich-Weyl-Fourier transform for SU(2) functions band-limited at `band`.
#[derive(Debug, Clone)]
pub struct SwfTransform {
    pub band: i64,
    /// `Δ` for irrep dimensions `1..=band`.
    pub orbits: Vec<SwOperatorField>,
}

impl SwfTransform {
    pub fn new(band: i64) -> Result<Self> {
        if band < 1 {
            return Err(Error::InvalidInput("band must be at least 1"));
        }
        let orbits = (1..=band).map(|n| OrbitSpec::new(n - 1).and_then(|s| sw_operator(&s))).collect::<Result<_>>()?;
        Ok(Self { band, orbits })
    }

    fn check(&self, psi: &BandFn) -> Result<()> {
        if psi.group() != Group::SU2 {
            return Err(Error::InvalidInput("transform is defined on SU(2)"));
        }
        if psi.band() > self.band {
            let top = (1..=psi.band()).rev().find(|&n| {
                let off = psi.basis.offsets[(n - 1) as usize];
                let d = (n * n) as usize;
                psi.coeffs[off..off + d].iter().any(|z| z.norm() > 0.0)
            });
            if let Some(n) = top {
                if n > self.band {
                    return Err(Error::BandOverflow { label: n, max: self.band });
                }
            }
        }
        Ok(())
    }

    /// `Ψ̂(π) = C_π / √d` for the irrep of dimension `n`, zero outside the band of `Ψ`.
    fn fourier(psi: &BandFn, n: i64) -> CMat {
        let d = n as usize;
        if n > psi.band() {
            return CMat::zeros(d, d);
        }
        let off = psi.basis.offsets[(n - 1) as usize];
        let s = 1.0 / (d as f64).sqrt();
        CMat::from_fn(d, d, |m, k| psi.coeffs[off + m * d + k] * s)
    }

    /// `F_SW[Ψ](π, θ) = ∫ Ψ(g) E(g; π, θ) dg = W_{Ψ̂(π)}(θ)`, one field per irrep.
    pub fn forward(&self, psi: &BandFn) -> Result<Vec<OrbitField>> {
        self.check(psi)?;
        self.orbits
            .iter()
            .enumerate()
            .map(|(k, delta)| sw_symbol(delta, &Self::fourier(psi, k as i64 + 1)))
            .collect()
    }

    /// Inverse transform: `Ψ̂(π) = ∫ F(π, θ) Δ(θ) dμ`.
    pub fn inverse(&self, fields: &[OrbitField]) -> Result<BandFn> {
        if fields.len() != self.orbits.len() {
            return Err(Error::InvalidInput("one field per irrep is required"));
        }
        let mut out = BandFn::zero(Group::SU2, self.band);
        for (k, (delta, f)) in self.orbits.iter().zip(fields).enumerate() {
            let (a, _) = sw_quantize(delta, f);
            let d = k + 1;
            let off = out.basis.offsets[k];
            let s = (d as f64).sqrt();
            for m in 0..d {
                for n in 0..d {
                    out.coeffs[off + m * d + n] = a[(m, n)] * s;
                }
            }
        }
        Ok(out)
    }

    /// `Ψ(g) = Σ_π d_π ∫ conj E(g; π, θ) F(π, θ) dμ`.
    pub fn inverse_at(&self, fields: &[OrbitField], g: &Quat) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for (k, (delta, f)) in self.orbits.iter().zip(fields).enumerate() {
            let e = e_kernel(delta, g);
            s += e.inner(f, &delta.spec) * (k + 1) as f64;
        }
        s
    }

    /// `Σ_π d_π ∫ |F(π, θ)|² dμ`.
    pub fn norm_sq(&self, fields: &[OrbitField]) -> f64 {
        self.orbits
            .iter()
            .zip(fields)
            .enumerate()
            .map(|(k, (delta, f))| (k + 1) as f64 * f.norm_sq(&delta.spec))
            .sum()
    }

    /// Twisted product per irrep.
    pub fn product(&self, a: &[OrbitField], b: &[OrbitField]) -> Vec<OrbitField> {
        self.orbits.iter().zip(a.iter().zip(b)).map(|(d, (x, y))| sw_twisted_product(d, x, y)).collect()
    }
}

/// `F_{SW,ε}[Ψ](π, ·) = F_SW[Ψ](ε⁻¹π, ·)` for the irrep of dimension `n`.
///
/// `ε⁻¹` must be a positive integer and the scaled irrep must lie in the transform band.
pub fn momentum_scaled_swf(t: &SwfTransform, psi: &BandFn, n: i64, eps: f64) -> Result<OrbitField> {
    if !(eps > 0.0) || n < 1 {
        return Err(Error::InvalidInput("ε and the irrep dimension must be positive"));
    }
    let inv = 1.0 / eps;
    let k = inv.round();
    if (inv - k).abs() > 1e-9 * inv.max(1.0) {
        return Err(Error::InvalidInput("ε⁻¹ must be an integer"));
    }
    let two_j = k as i64 * (n - 1);
    if two_j + 1 > t.band {
        return Err(Error::BandOverflow { label: two_j + 1, max: t.band });
    }
    t.check(psi)?;
    sw_symbol(&t.orbits[two_j as usize], &SwfTransform::fourier(psi, two_j + 1))
}

/// `|(v_{kλ}, π_{kλ}(g) v_{kλ}) - (v_λ, π_λ(g) v_λ)^k|`; integer powers need no branch.
pub fn cartan_power_residual(two_j: i64, k: u32, g: &Quat) -> f64 {
    let lhs = wigner_d(two_j * k as i64, g)[(0, 0)];
    let rhs = wigner_d(two_j, g)[(0, 0)].powu(k);
    (lhs - rhs).norm()
}

/// `Q^B(f) = ∫ f(θ) P_θ dμ`.
pub fn berezin_quantize(spec: &OrbitSpec, f: &OrbitField) -> CMat {
    let d = spec.dim();
    let mut a = CMat::zeros(d, d);
    for ((v, x), w) in spec.coherent.iter().zip(&f.values).zip(&spec.weights) {
        a += v * v.adjoint() * (x * *w);
    }
    a
}

/// `‖Q^SW(f) - Q^B(K^{-1/2} f)‖_max`.
pub fn berezin_relation_residual(delta: &SwOperatorField, f: &OrbitField) -> Result<f64> {
    let (sw, _) = sw_quantize(delta, f);
    let (g, _) = kernel_power(&delta.spec, f, -0.5)?;
    Ok(max_abs(&(sw - berezin_quantize(&delta.spec, &g))))
}

/// `(K f)(θ) = ∫ |⟨v_θ, v_θ'⟩|² f(θ') dμ'` at the given directions, by direct quadrature.
pub fn kernel_apply_direct<F: FnMut(&Vec3) -> f64>(two_j: i64, mut f: F, points: &[Vec3]) -> Vec<f64> {
    let degree = 2 * two_j as usize + 2;
    let (nodes, weights) = sphere_grid(degree, (two_j + 1) as f64);
    let fv: Vec<f64> = nodes.iter().map(|&(b, a)| f(&direction(b, a))).collect();
    let vs: Vec<_> = nodes.iter().map(|&(b, a)| orbit_coherent(two_j, b, a)).collect();
    points
        .iter()
        .map(|p| {
            let (b, a) = polar_angles(p);
            let v0 = orbit_coherent(two_j, b, a);
            vs.iter()
                .zip(&fv)
                .zip(&weights)
                .map(|((v, x), w)| v0.dotc(v).norm_sqr() * x * w)
                .sum()
        })
        .collect()
}

/// Sup-norm residuals `‖K_j f - f‖` and their slope against `log(1/j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub two_js: Vec<i64>,
    pub residuals: Vec<f64>,
    pub slope: f64,
}

/// Fits the rate of `K_j f → f`, the sup norm taken over `points`.
pub fn k_rate_fit<F: FnMut(&Vec3) -> f64>(mut f: F, two_js: &[i64], points: &[Vec3]) -> Result<RateFit> {
    if two_js.len() < 2 || two_js.iter().any(|&t| t < 1) {
        return Err(Error::InvalidInput("need at least two positive spins"));
    }
    let mut residuals = Vec::with_capacity(two_js.len());
    for &tj in two_js {
        let kf = kernel_apply_direct(tj, &mut f, points);
        let r = kf.iter().zip(points).fold(0.0, |m: f64, (k, p)| m.max((k - f(p)).abs()));
        residuals.push(r);
    }
    let x: Vec<f64> = two_js.iter().map(|&t| (2.0 / t as f64).ln()).collect();
    let y: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    Ok(RateFit { two_js: two_js.to_vec(), residuals, slope: ls_slope(&x, &y) })
}
