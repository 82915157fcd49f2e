//! ε-scaled local calculus on `T*G ≅ G × 𝔤*`.
//!
//! A [`LocalSymbol`] is a finite sum `σ(θ, g) = Σ c(g) P(θ) e^{-iθ(Y)}` with `c` band-limited,
//! `P ∈ {1, θ_a}` and `Y` on a cubic lattice in `𝔤`. Its inverse Fourier transform `σ̌¹` is a
//! finite combination of point masses and their first derivatives, so the kernel
//! `F^ε(h, g) = ε^{-n} σ̌¹(ε⁻¹ X_h, g)` integrates in closed form against the Riemannian
//! measure: `e^{-iθ(Y)}` contributes `j²(εY) c(g) Ψ(exp(-εY) g)` with `j²` the exp-chart
//! Jacobian, and `θ_a e^{-iθ(Y)} = i ∂_{Y_a} e^{-iθ(Y)}` contributes the `Y_a`-derivative of
//! that operator. The Weyl variant evaluates `c` at the geodesic midpoint `exp(-εY/2) g`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use super::TruncatedOperator;
use crate::error::{Error, Result};
use crate::pw::{cross, BandFn, PwBasis};
use crate::quad::ls_slope;
use crate::repgroup::{band_label, band_unit, c, CMat, Group, GroupElement, Quadrature, Vec3};

/// Polynomial factor of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Poly {
    Const,
    /// `θ_a`, `a < dim G`.
    Theta(u8),
}

/// Which kernel the local symbol is quantized with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `F^ε_σ(h, g)`.
    KN,
    /// `F^ε_σ(h, √h⁻¹ g)`.
    Weyl,
}

/// `Σ c(g) P(θ) e^{-iθ(h·idx)}` keyed by `(idx, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSymbol {
    pub group: Group,
    /// Lattice spacing `h` of the frequency points `Y = h·idx`.
    pub spacing: f64,
    pub terms: BTreeMap<([i64; 3], Poly), BandFn>,
}

fn vscale(s: f64, v: &Vec3) -> Vec3 {
    [s * v[0], s * v[1], s * v[2]]
}

fn vnorm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn unit_vec(a: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[a] = 1.0;
    e
}

/// Jacobian `j²(X)` of the exp chart (Riemannian measure) and its gradient.
pub fn exp_jacobian(group: Group, x: &Vec3) -> (f64, Vec3) {
    match group {
        Group::U1 => (1.0, [0.0; 3]),
        Group::SU2 => {
            let r = vnorm(x);
            // j² = (sin(r/2) / (r/2))²; series below r = 1e-4.
            let (f, df) = if r < 1e-4 {
                (1.0 - r * r / 12.0, -r / 6.0)
            } else {
                let s = 0.5 * r;
                let q = s.sin() / s;
                (q * q, q * (s * s.cos() - s.sin()) / (s * s))
            };
            let g = if r < 1e-300 { [0.0; 3] } else { vscale(df / r, x) };
            (f, g)
        }
    }
}

impl LocalSymbol {
    pub fn new(group: Group, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidInput("lattice spacing must be positive"));
        }
        Ok(Self { group, spacing, terms: BTreeMap::new() })
    }

    /// Adds `c(g) P(θ) e^{-iθ(h·idx)}` to the symbol.
    pub fn add_term(&mut self, idx: [i64; 3], poly: Poly, coeff: BandFn) -> Result<()> {
        if coeff.group() != self.group {
            return Err(Error::InvalidInput("coefficient group differs from symbol group"));
        }
        let dim = self.group.dim();
        if idx[dim..].iter().any(|&k| k != 0) {
            return Err(Error::InvalidInput("lattice index has components beyond dim G"));
        }
        if let Poly::Theta(a) = poly {
            if a as usize >= dim {
                return Err(Error::InvalidInput("theta index beyond dim G"));
            }
        }
        let key = (idx, poly);
        let v = match self.terms.remove(&key) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
        Ok(())
    }

    /// `σ(θ, g) = f(g)`.
    pub fn function(f: BandFn, spacing: f64) -> Result<Self> {
        let mut s = Self::new(f.group(), spacing)?;
        s.add_term([0; 3], Poly::Const, f)?;
        Ok(s)
    }

    /// `σ(θ, g) = θ(X)`.
    pub fn momentum(group: Group, x: &Vec3, spacing: f64) -> Result<Self> {
        let mut s = Self::new(group, spacing)?;
        for a in 0..group.dim() {
            if x[a] != 0.0 {
                s.add_term([0; 3], Poly::Theta(a as u8), BandFn::constant(group, c(x[a], 0.0)))?;
            }
        }
        Ok(s)
    }

    /// Frequency point `Y = h·idx`.
    pub fn point(&self, idx: &[i64; 3]) -> Vec3 {
        [self.spacing * idx[0] as f64, self.spacing * idx[1] as f64, self.spacing * idx[2] as f64]
    }

    /// Largest band unit among the coefficients.
    pub fn g_unit(&self) -> usize {
        self.terms.values().map(|f| f.basis.unit()).max().unwrap_or(0)
    }

    pub fn theta_degree(&self) -> usize {
        self.terms.keys().map(|(_, p)| usize::from(*p != Poly::Const)).max().unwrap_or(0)
    }

    /// Largest `|Y|` over the terms.
    pub fn support_radius(&self) -> f64 {
        self.terms.keys().map(|(i, _)| vnorm(&self.point(i))).fold(0.0, f64::max)
    }

    fn compatible(&self, o: &LocalSymbol) -> Result<()> {
        if self.group != o.group || self.spacing != o.spacing {
            return Err(Error::InvalidInput("local symbols must share group and lattice spacing"));
        }
        Ok(())
    }

    pub fn add(&self, o: &LocalSymbol) -> Result<LocalSymbol> {
        self.compatible(o)?;
        let mut out = self.clone();
        for ((i, p), f) in &o.terms {
            out.add_term(*i, *p, f.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> LocalSymbol {
        let mut out = self.clone();
        for f in out.terms.values_mut() {
            *f = f.scale(s);
        }
        out
    }

    /// Pointwise product; the total `θ`-degree must stay at most 1.
    pub fn mul(&self, o: &LocalSymbol) -> Result<LocalSymbol> {
        self.compatible(o)?;
        let mut out = LocalSymbol::new(self.group, self.spacing)?;
        for ((i, p), f) in &self.terms {
            for ((j, q), g) in &o.terms {
                let poly = match (p, q) {
                    (Poly::Const, x) | (x, Poly::Const) => *x,
                    _ => return Err(Error::InvalidInput("product of local symbols exceeds theta-degree 1")),
                };
                let k = [i[0] + j[0], i[1] + j[1], i[2] + j[2]];
                out.add_term(k, poly, f.mul(g))?;
            }
        }
        Ok(out)
    }

    /// Complex conjugate: `conj(c) P(θ) e^{+iθ(Y)}`.
    pub fn conj(&self) -> LocalSymbol {
        let mut out = LocalSymbol { group: self.group, spacing: self.spacing, terms: BTreeMap::new() };
        for ((i, p), f) in &self.terms {
            out.terms.insert(([-i[0], -i[1], -i[2]], *p), f.conj());
        }
        out
    }

    /// `∂σ/∂θ_a`.
    pub fn theta_derivative(&self, a: usize) -> LocalSymbol {
        let mut out = LocalSymbol { group: self.group, spacing: self.spacing, terms: BTreeMap::new() };
        for ((i, p), f) in &self.terms {
            let y = self.point(i);
            if y[a] != 0.0 {
                out.add_term(*i, *p, f.scale(c(0.0, -y[a]))).expect("same group");
            }
            if *p == Poly::Theta(a as u8) {
                out.add_term(*i, Poly::Const, f.clone()).expect("same group");
            }
        }
        out
    }

    /// `R_X σ` acting on the `g`-variable.
    pub fn derivative(&self, x: &Vec3) -> LocalSymbol {
        let mut out = LocalSymbol { group: self.group, spacing: self.spacing, terms: BTreeMap::new() };
        for (k, f) in &self.terms {
            out.add_term(k.0, k.1, f.derivative(x)).expect("same group");
        }
        out
    }

    /// Multiplies the `θ_c`-free part by `θ_c`; only valid on `θ`-degree 0.
    fn times_theta(&self, a: usize) -> Result<LocalSymbol> {
        let mut out = LocalSymbol { group: self.group, spacing: self.spacing, terms: BTreeMap::new() };
        for ((i, p), f) in &self.terms {
            if *p != Poly::Const {
                return Err(Error::InvalidInput("product of local symbols exceeds theta-degree 1"));
            }
            out.add_term(*i, Poly::Theta(a as u8), f.clone())?;
        }
        Ok(out)
    }

    /// `σ(θ, g)` at a covector `θ` (components in the dual `τ` basis).
    pub fn eval(&self, theta: &Vec3, g: &GroupElement) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for ((i, p), f) in &self.terms {
            let y = self.point(i);
            let phase = c(0.0, -(theta[0] * y[0] + theta[1] * y[1] + theta[2] * y[2])).exp();
            let pv = match p {
                Poly::Const => 1.0,
                Poly::Theta(a) => theta[*a as usize],
            };
            acc += f.eval(g) * phase * pv;
        }
        acc
    }

    /// `θ ↦ σ(kθ)`.
    pub fn scale_momentum(&self, k: i64) -> LocalSymbol {
        let mut out = LocalSymbol { group: self.group, spacing: self.spacing, terms: BTreeMap::new() };
        for ((i, p), f) in &self.terms {
            let f = if *p == Poly::Const { f.clone() } else { f.scale(c(k as f64, 0.0)) };
            out.add_term([k * i[0], k * i[1], k * i[2]], *p, f).expect("same group");
        }
        out
    }

    /// Largest coefficient norm difference over all terms.
    pub fn max_coeff_diff(&self, o: &LocalSymbol) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, f) in &self.terms {
            let d = match o.terms.get(k) {
                Some(g) => f.add(&g.scale(c(-1.0, 0.0))).norm_l2(),
                None => f.norm_l2(),
            };
            worst = worst.max(d);
        }
        for (k, g) in &o.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(g.norm_l2());
            }
        }
        worst
    }
}

/// Quantizes `σ` at scale `ε` on the Peter-Weyl space of band `op_band`.
///
/// Columns of band `Λ` are exact whenever `op_band` covers `Λ` plus the coefficient band.
/// Fails with [`Error::Support`] if some `|εY|` reaches the injectivity radius.
pub fn local_quantize(sigma: &LocalSymbol, eps: f64, variant: Variant, op_band: i64) -> Result<TruncatedOperator> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive"));
    }
    let group = sigma.group;
    let limit = group.injectivity_radius();
    let radius = eps * sigma.support_radius();
    if radius >= limit {
        return Err(Error::Support { radius, limit });
    }
    let basis = PwBasis::new(group, op_band);
    let q = Quadrature::exact_for(group, 2 * basis.unit() + sigma.g_unit());
    let b = basis.sample(&q);
    let bh = b.adjoint();
    // M_f = B† diag(w f) B.
    let mult = |f: &BandFn| -> CMat {
        let mut wb = b.clone();
        for (k, g) in q.nodes.iter().enumerate() {
            let s = f.eval(g) * q.weights[k];
            for j in 0..basis.len {
                wb[(k, j)] *= s;
            }
        }
        &bh * wb
    };
    let half = match variant {
        Variant::KN => 0.0,
        Variant::Weyl => 0.5,
    };
    let mut out = CMat::zeros(basis.len, basis.len);
    for ((idx, poly), f) in &sigma.terms {
        let x = vscale(eps, &sigma.point(idx));
        let shift = GroupElement::exp(group, &vscale(-1.0, &x));
        let t = basis.left_shift(&shift);
        let cy = if half == 0.0 { f.clone() } else { f.left_shift(&GroupElement::exp(group, &vscale(-half, &x))) };
        let (j2, dj2) = exp_jacobian(group, &x);
        match poly {
            Poly::Const => out += mult(&cy) * t * c(j2, 0.0),
            Poly::Theta(a) => {
                let a = *a as usize;
                let ea = unit_vec(a);
                let mc = mult(&cy);
                // i ∂_{Y_a} [ j²(εY) M_{c(exp(-s εY)·)} T(exp(-εY)) ].
                let dt = basis.left_shift_deriv(&vscale(-1.0, &x), &vscale(-eps, &ea));
                let mut d = &mc * dt * c(j2, 0.0) + &mc * &t * c(eps * dj2[a], 0.0);
                if half != 0.0 {
                    let dc = f.left_shift_deriv(&vscale(-half, &x), &vscale(-half * eps, &ea));
                    d += mult(&dc) * &t * c(j2, 0.0);
                }
                out += d * c(0.0, 1.0);
            }
        }
    }
    Ok(TruncatedOperator { group, band: op_band, matrix: out })
}

/// Poisson bracket `{σ,τ} = Σ_a ∂_{θ_a}σ R_aτ - R_aσ ∂_{θ_a}τ + {σ,τ}_-`, where on SU(2)
/// the Lie-Poisson part is `{σ,τ}_-(θ) = -θ([∂_θσ, ∂_θτ])`; it vanishes on U(1).
pub fn poisson_bracket(sigma: &LocalSymbol, tau: &LocalSymbol) -> Result<LocalSymbol> {
    sigma.compatible(tau)?;
    let group = sigma.group;
    let dim = group.dim();
    let mut out = LocalSymbol::new(group, sigma.spacing)?;
    let ds: Vec<LocalSymbol> = (0..dim).map(|a| sigma.theta_derivative(a)).collect();
    let dt: Vec<LocalSymbol> = (0..dim).map(|a| tau.theta_derivative(a)).collect();
    for a in 0..dim {
        let ea = unit_vec(a);
        out = out.add(&ds[a].mul(&tau.derivative(&ea))?)?;
        out = out.add(&sigma.derivative(&ea).mul(&dt[a])?.scale(c(-1.0, 0.0)))?;
    }
    if group == Group::SU2 {
        // -θ([∂σ, ∂τ]) = -Σ_{a,b} ∂_aσ ∂_bτ θ(e_a × e_b).
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let cc = cross(&unit_vec(a), &unit_vec(b));
                let k = (0..3).find(|&k| cc[k] != 0.0).expect("distinct axes");
                let p = ds[a].mul(&dt[b])?.times_theta(k)?;
                out = out.add(&p.scale(c(-cc[k], 0.0)))?;
            }
        }
    }
    Ok(out)
}

/// Kernel cut-off `H(φ)σ = (σ̌¹ φ)^`. `phi` returns `(φ(Y), ∇φ(Y))` at lattice points `Y`.
///
/// A point mass at `Y` is scaled by `φ(Y)`; the derivative mass behind `θ_a e^{-iθ(Y)}`
/// also picks up `i ∂_aφ(Y) e^{-iθ(Y)}`.
pub fn kernel_cutoff<F: FnMut(&Vec3) -> (Complex64, [Complex64; 3])>(mut phi: F, sigma: &LocalSymbol) -> LocalSymbol {
    let mut out = LocalSymbol { group: sigma.group, spacing: sigma.spacing, terms: BTreeMap::new() };
    for ((i, p), f) in &sigma.terms {
        let (v, grad) = phi(&sigma.point(i));
        out.add_term(*i, *p, f.scale(v)).expect("same group");
        if let Poly::Theta(a) = p {
            out.add_term(*i, Poly::Const, f.scale(grad[*a as usize] * c(0.0, 1.0))).expect("same group");
        }
    }
    out
}

/// Largest gap between the Weyl kernel evaluated through the principal square root,
/// `c(√h⁻¹ g)` with `h = g k⁻¹`, and through the geodesic midpoint `c(exp(X_h/2) k)`.
pub fn midpoint_residual(f: &BandFn, pairs: &[(GroupElement, GroupElement)]) -> f64 {
    let group = f.group();
    let mut worst: f64 = 0.0;
    for (g, k) in pairs {
        let h = g.mul(&k.inv());
        let via_sqrt = f.eval(&h.sqrt().inv().mul(g));
        let x = h.log();
        let via_mid = f.eval(&GroupElement::exp(group, &vscale(0.5, &x)).mul(k));
        worst = worst.max((via_sqrt - via_mid).norm());
    }
    worst
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a: f64, &b| a.max(b))
}

/// Residuals of the first-order expansion per `ε` and their log-log slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub eps: Vec<f64>,
    /// `‖Q(σ)Q(τ) - Q(στ - (iε/2){σ,τ})‖`.
    pub moyal: Vec<f64>,
    /// `‖(i/ε)[Q(σ),Q(τ)] - Q({σ,τ})‖`.
    pub dirac: Vec<f64>,
    /// `‖(Q(σ)Q(τ) + Q(τ)Q(σ))/2 - Q(στ)‖`.
    pub von_neumann: Vec<f64>,
    pub moyal_slope: f64,
    pub dirac_slope: f64,
    pub von_neumann_slope: f64,
}

/// Measures the first-order product expansion on the columns of band `in_band`.
///
/// Operators live on the band `in_band` plus both coefficient bands, so every column used
/// is exact. Norms are largest singular values of the restricted residuals.
pub fn semiclassical_order_fit(
    sigma: &LocalSymbol,
    tau: &LocalSymbol,
    eps_list: &[f64],
    variant: Variant,
    in_band: i64,
) -> Result<OrderFit> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidInput("semiclassical fit needs at least 3 eps values"));
    }
    sigma.compatible(tau)?;
    let group = sigma.group;
    let op_unit = band_unit(group, in_band) + sigma.g_unit() + tau.g_unit();
    let op_band = band_label(group, op_unit);
    let ncols = PwBasis::new(group, in_band).len;
    let prod = sigma.mul(tau)?;
    let bracket = poisson_bracket(sigma, tau)?;
    let mut fit = OrderFit {
        eps: eps_list.to_vec(),
        moyal: Vec::new(),
        dirac: Vec::new(),
        von_neumann: Vec::new(),
        moyal_slope: 0.0,
        dirac_slope: 0.0,
        von_neumann_slope: 0.0,
    };
    for &eps in eps_list {
        let a = local_quantize(sigma, eps, variant, op_band)?.matrix;
        let b = local_quantize(tau, eps, variant, op_band)?.matrix;
        let qp = local_quantize(&prod, eps, variant, op_band)?.matrix;
        let qb = local_quantize(&bracket, eps, variant, op_band)?.matrix;
        let ab = &a * &b;
        let ba = &b * &a;
        let moyal = &ab - &qp + &qb * c(0.0, 0.5 * eps);
        let dirac = (&ab - &ba) * c(0.0, 1.0 / eps) - &qb;
        let vn = (&ab + &ba) * c(0.5, 0.0) - &qp;
        fit.moyal.push(op_norm(&moyal.columns(0, ncols).into_owned()));
        fit.dirac.push(op_norm(&dirac.columns(0, ncols).into_owned()));
        fit.von_neumann.push(op_norm(&vn.columns(0, ncols).into_owned()));
    }
    let lx: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let slope = |v: &[f64]| ls_slope(&lx, &v.iter().map(|r| r.max(1e-300).ln()).collect::<Vec<_>>());
    fit.moyal_slope = slope(&fit.moyal);
    fit.dirac_slope = slope(&fit.dirac);
    fit.von_neumann_slope = slope(&fit.von_neumann);
    Ok(fit)
}
