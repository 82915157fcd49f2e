//! Bohr-lattice pseudo-differential calculus and U(1)-equivariant smoothing identities.
//!
//! Operators act on finitely supported functions `Φ: ℝ → ℂ` (the volume representation). A
//! symbol `σ(x, λ) = Σ_ν c_ν(λ) e^{iνx}` has partial transform `σ̂¹(μ, λ) = c_{-μ}(λ)` (Bohr
//! mean against `e_μ`) and acts by
//! `(A_σ Φ)(λ) = Σ_{λ'} σ̂¹((λ - λ')/ε, (λ + λ')/2) Φ(λ')`, so frequency `ν` moves support
//! from `λ'` to `λ' - εν`.
//!
//! Support points are `f64` keys; two keys are identified when they differ by at most
//! [`KEY_TOL`] relative to `max(1, |λ|)`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::heatcs::theta3;
use crate::quad::gauss_legendre;
use crate::repgroup::{c, CMat};

/// Tolerance for identifying support points.
pub const KEY_TOL: f64 = 1e-12;
/// Largest denominator accepted when recognizing a rational lattice ratio.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

fn same_key(a: f64, b: f64) -> bool {
    (a - b).abs() <= KEY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `⟨λ⟩ = (1 + λ²)^{1/2}`.
pub fn japanese(l: f64) -> f64 {
    (1.0 + l * l).sqrt()
}

/// Finitely supported `Φ: ℝ → ℂ`, kept sorted by key with no zero entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSupportFn {
    entries: Vec<(f64, Complex64)>,
}

/// A trigonometric polynomial `Σ a_λ e_λ`, stored by its frequencies.
pub type TrigPoly = FiniteSupportFn;

impl FiniteSupportFn {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn delta(l: f64, v: Complex64) -> Self {
        let mut f = Self::new();
        f.add_at(l, v);
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (f64, Complex64)>>(it: I) -> Self {
        let mut f = Self::new();
        for (l, v) in it {
            f.add_at(l, v);
        }
        f
    }

    fn position(&self, l: f64) -> core::result::Result<usize, usize> {
        let i = self.entries.partition_point(|(k, _)| *k < l);
        for j in [i.wrapping_sub(1), i] {
            if j < self.entries.len() && same_key(self.entries[j].0, l) {
                return Ok(j);
            }
        }
        Err(i)
    }

    /// `Φ(l) += v`, merging with an existing key within tolerance.
    pub fn add_at(&mut self, l: f64, v: Complex64) {
        match self.position(l) {
            Ok(j) => {
                self.entries[j].1 += v;
                if self.entries[j].1 == c(0.0, 0.0) {
                    self.entries.remove(j);
                }
            }
            Err(i) => {
                if v != c(0.0, 0.0) {
                    self.entries.insert(i, (l, v));
                }
            }
        }
    }

    pub fn get(&self, l: f64) -> Complex64 {
        self.position(l).map(|j| self.entries[j].1).unwrap_or(c(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, Complex64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_pairs(self.entries.iter().map(|&(l, v)| (l, v * s)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for &(l, v) in &o.entries {
            out.add_at(l, v);
        }
        out
    }

    /// `ℓ²` inner product `Σ conj(Φ₁) Φ₂`.
    pub fn inner(&self, o: &Self) -> Complex64 {
        self.entries.iter().map(|&(l, v)| v.conj() * o.get(l)).sum()
    }

    /// Largest pointwise difference over both supports.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let d = self.add(&o.scale(c(-1.0, 0.0)));
        d.entries.iter().fold(0.0, |m: f64, e| m.max(e.1.norm()))
    }
}

/// `(f, f')_Bohr = Σ_λ conj(a_λ) a'_λ`, exact for trigonometric polynomials.
pub fn bohr_mean(f: &TrigPoly, g: &TrigPoly) -> Complex64 {
    f.inner(g)
}

/// `‖Φ‖_{(s,p)} = (Σ (⟨λ⟩^s |Φ(λ)|)^p)^{1/p}`; `p = ∞` gives the weighted sup.
pub fn sobolev_norm(phi: &FiniteSupportFn, s: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput("p must lie in [1, ∞]"));
    }
    let w = phi.iter().map(|&(l, v)| japanese(l).powf(s) * v.norm());
    if p.is_infinite() {
        return Ok(w.fold(0.0, f64::max));
    }
    Ok(w.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Best rational approximation `p/q` of `x` within `tol·max(1,|x|)`, `q ≤ max_den`.
pub fn rational_ratio(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = y - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// `ℤ^{j₀}_{λ₀} = λ₀(ℤ + j₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalLattice {
    pub spacing: f64,
    pub offset: f64,
}

impl RationalLattice {
    pub fn new(spacing: f64, offset: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidInput("lattice spacing must be positive"));
        }
        let o = offset - offset.floor();
        Ok(Self { spacing, offset: if same_key(o, 1.0) { 0.0 } else { o } })
    }

    /// Integer `n` with `λ = λ₀(n + j₀)`, if `λ` lies on the lattice.
    pub fn index(&self, l: f64) -> Option<i64> {
        let y = l / self.spacing - self.offset;
        let n = y.round();
        if (y - n).abs() <= KEY_TOL * y.abs().max(1.0) * 10.0 {
            Some(n as i64)
        } else {
            None
        }
    }

    pub fn contains(&self, l: f64) -> bool {
        self.index(l).is_some()
    }

    pub fn point(&self, n: i64) -> f64 {
        self.spacing * (n as f64 + self.offset)
    }

    /// Lattice containing `self + other`: `λ₀/q` with offset `(q j₀ + p j₀') mod 1` where
    /// `λ₀'/λ₀ = p/q` in lowest terms. Fails for relatively irrational spacings.
    pub fn sum(&self, o: &RationalLattice) -> Result<RationalLattice> {
        let (p, q) = rational_ratio(o.spacing / self.spacing, MAX_DENOMINATOR)
            .ok_or(Error::InvalidInput("lattice spacings are not relatively rational"))?;
        RationalLattice::new(self.spacing / q as f64, q as f64 * self.offset + p as f64 * o.offset)
    }

    /// `-ℤ^{j₀}_{λ₀} = ℤ^{1-j₀}_{λ₀}`.
    pub fn neg(&self) -> RationalLattice {
        RationalLattice::new(self.spacing, -self.offset).expect("spacing already validated")
    }

    /// `s·ℤ^{j₀}_{λ₀}` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<RationalLattice> {
        RationalLattice::new(self.spacing * s, self.offset)
    }
}

/// Coefficient function `λ ↦ c_ν(λ)`.
pub type Coeff = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Order data `(m, ρ, δ)` of a symbol class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolOrder {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
}

/// `σ(x, λ) = Σ_ν c_ν(λ) e^{iνx}` with finitely many frequencies.
#[derive(Clone, Default)]
pub struct BohrSymbol {
    pub terms: Vec<(f64, Coeff)>,
    /// Lattice carrying the `μ`-support of `σ̂¹` (i.e. `-ν`), for equivariant symbols.
    pub lattice: Option<RationalLattice>,
    pub order: Option<SymbolOrder>,
}

impl core::fmt::Debug for BohrSymbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BohrSymbol")
            .field("frequencies", &self.frequencies())
            .field("lattice", &self.lattice)
            .field("order", &self.order)
            .finish()
    }
}

impl BohrSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c(λ) e^{iνx}`, merging with an existing frequency within tolerance.
    pub fn with_term<F: Fn(f64) -> Complex64 + Send + Sync + 'static>(mut self, nu: f64, f: F) -> Self {
        self.push_term(nu, Arc::new(f));
        self
    }

    pub fn push_term(&mut self, nu: f64, f: Coeff) {
        if let Some(k) = self.terms.iter().position(|(n, _)| same_key(*n, nu)) {
            let g = self.terms[k].1.clone();
            self.terms[k].1 = Arc::new(move |l| g(l) + f(l));
        } else {
            self.terms.push((nu, f));
        }
    }

    pub fn with_lattice(mut self, l: RationalLattice) -> Self {
        self.lattice = Some(l);
        self
    }

    pub fn with_order(mut self, o: SymbolOrder) -> Self {
        self.order = Some(o);
        self
    }

    /// The symbol `σ(x, λ) = f(λ)` with zero frequency only.
    pub fn multiplier<F: Fn(f64) -> Complex64 + Send + Sync + 'static>(f: F) -> Self {
        Self::new().with_term(0.0, f)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    /// `σ̂¹(μ, λ) = c_{-μ}(λ)`.
    pub fn hat(&self, mu: f64, l: f64) -> Complex64 {
        self.terms.iter().filter(|(n, _)| same_key(*n, -mu)).map(|(_, f)| f(l)).sum()
    }

    /// `σ(x, λ)`.
    pub fn eval(&self, x: f64, l: f64) -> Complex64 {
        self.terms.iter().map(|(n, f)| f(l) * c(0.0, n * x).exp()).sum()
    }

    /// Coefficients sampled on a window: rows `(ν, λ, c_ν(λ))`.
    pub fn sample_table(&self, window: &[f64]) -> Vec<(f64, f64, Complex64)> {
        let mut out = Vec::with_capacity(self.terms.len() * window.len());
        for (n, f) in &self.terms {
            for &l in window {
                out.push((*n, l, f(l)));
            }
        }
        out
    }

    /// Largest `|ĥ_σ(μ, λ) - ĥ_τ(μ, λ)|` over both frequency sets and the sample points.
    pub fn max_hat_diff(&self, o: &BohrSymbol, samples: &[f64]) -> f64 {
        let mut nus = self.frequencies();
        for n in o.frequencies() {
            if !nus.iter().any(|m| same_key(*m, n)) {
                nus.push(n);
            }
        }
        let mut worst: f64 = 0.0;
        for n in nus {
            for &l in samples {
                worst = worst.max((self.hat(-n, l) - o.hat(-n, l)).norm());
            }
        }
        worst
    }
}

/// `(A_σ Φ)(λ) = Σ_{λ'} σ̂¹((λ - λ')/ε, (λ + λ')/2) Φ(λ')`.
pub fn apply_symbol(sigma: &BohrSymbol, phi: &FiniteSupportFn, eps: f64) -> FiniteSupportFn {
    let mut out = FiniteSupportFn::new();
    for &(lp, v) in phi.iter() {
        for (nu, f) in &sigma.terms {
            let l = lp - eps * nu;
            out.add_at(l, f(0.5 * (l + lp)) * v);
        }
    }
    out
}

/// Symbol of the formal adjoint: `σ̄`, i.e. `c*_ν = conj(c_{-ν})`.
pub fn formal_adjoint(sigma: &BohrSymbol) -> BohrSymbol {
    let mut out = BohrSymbol::new();
    for (nu, f) in &sigma.terms {
        let g = f.clone();
        out.push_term(-nu, Arc::new(move |l| g(l).conj()));
    }
    out.lattice = sigma.lattice.map(|l| l.neg());
    out.order = sigma.order;
    out
}

/// `σ ⋆_ε τ` with `A_{σ⋆τ} = A_σ A_τ`:
/// `c^ρ_ν(λ) = Σ_{ν_σ + ν_τ = ν} c^σ_{ν_σ}(λ - (ε/2)ν_τ) c^τ_{ν_τ}(λ + (ε/2)ν_σ)`.
pub fn twisted_product(sigma: &BohrSymbol, tau: &BohrSymbol, eps: f64) -> BohrSymbol {
    let mut out = BohrSymbol::new();
    for (ns, fs) in &sigma.terms {
        for (nt, ft) in &tau.terms {
            let (fs, ft, ns, nt) = (fs.clone(), ft.clone(), *ns, *nt);
            out.push_term(ns + nt, Arc::new(move |l| fs(l - 0.5 * eps * nt) * ft(l + 0.5 * eps * ns)));
        }
    }
    out.lattice = match (sigma.lattice, tau.lattice) {
        (Some(a), Some(b)) => a.sum(&b).ok(),
        _ => None,
    };
    out
}

/// Generalized binomial `n(n-1)…(n-k+1)/k!` for integer `n`.
pub fn binom_int(n: i64, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i as i64) as f64 / (i + 1) as f64;
    }
    r
}

/// Falling factorial `n(n-1)…(n-k+1)`.
pub fn falling(n: i64, k: usize) -> f64 {
    (0..k).fold(1.0, |a, i| a * (n - i as i64) as f64)
}

/// `(Δ^k_h f)(λ) = Σ_i (-1)^{k-i} C(k,i) f(λ + i h)`.
pub fn forward_difference<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, l: f64, h: f64, k: usize) -> Complex64 {
    let mut s = c(0.0, 0.0);
    let mut b = 1.0;
    for i in 0..=k {
        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        s += f(l + i as f64 * h) * (sign * b);
        b = b * (k - i) as f64 / (i + 1) as f64;
    }
    s
}

/// Truncated Newton series at `λ + λ'` with its remainder and bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonExpansion {
    /// `Σ_{n ≤ N} C(k, n) Δ^n_h Φ(λ)` with `λ' = k h`.
    pub value: Complex64,
    /// `Φ(λ + λ') - value`.
    pub remainder: Complex64,
    /// `max_{|j| ≤ |k|} |k^{(N+1)} Δ^{N+1}_h Φ(λ + j h)|`.
    pub bound: f64,
}

/// Discrete Taylor expansion on the step lattice `hℤ`; `λ'` must be a multiple of `h`.
pub fn discrete_taylor<F: Fn(f64) -> Complex64>(phi: F, l: f64, lp: f64, h: f64, n: usize) -> Result<NewtonExpansion> {
    if !(h != 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput("step must be nonzero"));
    }
    let kf = lp / h;
    let k = kf.round();
    if (kf - k).abs() > 1e-9 * kf.abs().max(1.0) {
        return Err(Error::InvalidInput("λ' is not a multiple of the step"));
    }
    let k = k as i64;
    let value: Complex64 = (0..=n).map(|i| forward_difference(&phi, l, h, i) * binom_int(k, i)).sum();
    let ff = falling(k, n + 1).abs();
    let bound = (-k.abs()..=k.abs())
        .map(|j| ff * forward_difference(&phi, l + j as f64 * h, h, n + 1).norm())
        .fold(0.0, f64::max);
    Ok(NewtonExpansion { value, remainder: phi(l + lp) - value, bound })
}

/// Order-`N` partial sum of the lattice expansion of `σ ⋆_ε τ`.
///
/// With `-ν_σ = λ_σ(n_σ + j_σ)` and `-ν_τ = λ_τ(n_τ + j_τ)`, each shifted coefficient is
/// Newton-expanded around the offset-shifted point; pairs of orders `a + b ≤ N` are kept.
pub fn asymptotic_product(sigma: &BohrSymbol, tau: &BohrSymbol, eps: f64, order: usize) -> Result<BohrSymbol> {
    let (ls, lt) = match (sigma.lattice, tau.lattice) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("both symbols must be equivariant")),
    };
    let combined = ls.sum(&lt)?;
    let mut out = BohrSymbol::new().with_lattice(combined);
    for (ns, fs) in &sigma.terms {
        let ks = ls.index(-ns).ok_or(Error::InvalidInput("σ frequency off its lattice"))?;
        for (nt, ft) in &tau.terms {
            let kt = lt.index(-nt).ok_or(Error::InvalidInput("τ frequency off its lattice"))?;
            let (fs, ft) = (fs.clone(), ft.clone());
            let hs = 0.5 * eps * lt.spacing;
            let ht = -0.5 * eps * ls.spacing;
            let (bs, bt) = (0.5 * eps * lt.spacing * lt.offset, -0.5 * eps * ls.spacing * ls.offset);
            out.push_term(
                ns + nt,
                Arc::new(move |l| {
                    let mut s = c(0.0, 0.0);
                    for a in 0..=order {
                        let da = forward_difference(&*fs, l + bs, hs, a) * binom_int(kt, a);
                        if da == c(0.0, 0.0) {
                            continue;
                        }
                        for b in 0..=order - a {
                            s += da * forward_difference(&*ft, l + bt, ht, b) * binom_int(ks, b);
                        }
                    }
                    s
                }),
            );
        }
    }
    Ok(out)
}

/// Finitely supported kernel `h(λ, λ')`.
pub type Kernel = Vec<(f64, f64, Complex64)>;

/// `(K_h Φ)(λ) = Σ_{λ'} h(λ, λ') Φ(λ')`.
pub fn apply_kernel(h: &Kernel, phi: &FiniteSupportFn) -> FiniteSupportFn {
    let mut out = FiniteSupportFn::new();
    for &(l, lp, v) in h {
        let x = phi.get(lp);
        if x != c(0.0, 0.0) {
            out.add_at(l, v * x);
        }
    }
    out
}

/// `(C₁, C₂)`: largest row sum `sup_λ Σ_{λ'} |h|` and largest column sum `sup_{λ'} Σ_λ |h|`.
pub fn young_bound(h: &Kernel) -> (f64, f64) {
    let mut rows = FiniteSupportFn::new();
    let mut cols = FiniteSupportFn::new();
    for &(l, lp, v) in h {
        rows.add_at(l, c(v.norm(), 0.0));
        cols.add_at(lp, c(v.norm(), 0.0));
    }
    let m = |f: &FiniteSupportFn| f.iter().fold(0.0, |a: f64, e| a.max(e.1.re));
    (m(&rows), m(&cols))
}

/// Schur-test operator bound on `ℓ^p`: `C₁^{1/q} C₂^{1/p}` with `1/p + 1/q = 1`.
pub fn young_constant(c1: f64, c2: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return c1;
    }
    let ip = 1.0 / p;
    c1.powf(1.0 - ip) * c2.powf(ip)
}

/// `(‖K_h Φ‖_{(0,p)}, C₁^{1/q} C₂^{1/p} ‖Φ‖_{(0,p)})`.
pub fn apply_kernel_norm_check(h: &Kernel, phi: &FiniteSupportFn, p: f64) -> Result<(f64, f64)> {
    let (c1, c2) = young_bound(h);
    let lhs = sobolev_norm(&apply_kernel(h, phi), 0.0, p)?;
    Ok((lhs, young_constant(c1, c2, p) * sobolev_norm(phi, 0.0, p)?))
}

/// Smallest `r ≥ 0` with `δr ≤ t - m` and `(1-δ)r > |m| - 1 + |t| + |s-t|`, if any.
pub fn sobolev_feasible_r(o: &SymbolOrder, s: f64, t: f64) -> Option<f64> {
    if o.delta >= 1.0 || t < o.m {
        return None;
    }
    let need = (o.m.abs() - 1.0 + t.abs() + (s - t).abs()).max(-1.0);
    let r = if need < 0.0 { 0.0 } else { need / (1.0 - o.delta) + 1e-9 };
    if o.delta * r <= t - o.m + 1e-15 {
        Some(r)
    } else {
        None
    }
}

/// Outcome of [`sobolev_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevReport {
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    /// `2^{|s-t|} C₁^{1/q} C₂^{1/p}` from the sampled kernel.
    pub theoretical: f64,
    /// Largest `‖A_σ Φ‖_{(s-t,p)} / ‖Φ‖_{(s,p)}` over the states.
    pub empirical: f64,
}

/// Checks `‖A_σ Φ‖_{(s-t,p)} ≤ 2^{|s-t|} C₁^{1/q} C₂^{1/p} ‖Φ‖_{(s,p)}` for states supported on
/// `window`, with `C₁, C₂` the Young sums of
/// `h(λ'', λ') = ⟨λ''-λ'⟩^{|s-t|} ⟨λ'⟩^{-t} σ̂¹((λ''-λ')/ε, (λ''+λ')/2)` restricted to `window`.
pub fn sobolev_bound_check(
    sigma: &BohrSymbol,
    eps: f64,
    s: f64,
    t: f64,
    p: f64,
    window: &[f64],
    states: &[FiniteSupportFn],
) -> Result<SobolevReport> {
    let order = sigma.order.ok_or(Error::InvalidInput("symbol carries no order data"))?;
    let r = sobolev_feasible_r(&order, s, t).ok_or(Error::InvalidInput(
        "(s, t) admit no r ≥ 0 with δr ≤ t - m and (1-δ)r > |m| - 1 + |t| + |s-t|",
    ))?;
    let st = (s - t).abs();
    let mut h: Kernel = Vec::new();
    for &lp in window {
        for (nu, f) in &sigma.terms {
            let l = lp - eps * nu;
            let v = f(0.5 * (l + lp)) * japanese(l - lp).powf(st) * japanese(lp).powf(-t);
            h.push((l, lp, v));
        }
    }
    let (c1, c2) = young_bound(&h);
    let theoretical = 2f64.powf(st) * young_constant(c1, c2, p);
    let mut empirical: f64 = 0.0;
    for phi in states {
        if phi.iter().any(|(l, _)| !window.iter().any(|w| same_key(*w, *l))) {
            return Err(Error::InvalidInput("state leaves the sampled window"));
        }
        let den = sobolev_norm(phi, s, p)?;
        if den > 0.0 {
            empirical = empirical.max(sobolev_norm(&apply_symbol(sigma, phi, eps), s - t, p)? / den);
        }
    }
    Ok(SobolevReport { r, c1, c2, theoretical, empirical })
}

/// A vector of `ℋ_{j₀}` in the basis `e^{i(j+j₀)φ}`, `j ∈ [lo, lo + len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantU1State {
    pub j0: f64,
    pub lo: i64,
    pub coeffs: Vec<Complex64>,
}

impl EquivariantU1State {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, o: &Self) -> Complex64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Index window wide enough for the coherent state at `l` (tails below `e^{-50}`).
pub fn u1_window(t: f64, j0: f64, l: f64) -> (i64, usize) {
    let centre = (l - t * j0) / t;
    let half = (100.0 / t).sqrt() + 4.0;
    let lo = (centre - half).floor() as i64;
    let hi = (centre + half).ceil() as i64;
    (lo, (hi - lo + 1) as usize)
}

/// `|ξ, j₀⟩_t` with `ξ = e^{-l + iφ}`: coefficients `(ξ e^{t j₀})^{-j} e^{-t j²/2}`.
pub fn u1_coherent(t: f64, j0: f64, phi: f64, l: f64, lo: i64, len: usize) -> EquivariantU1State {
    let coeffs = (0..len)
        .map(|i| {
            let j = (lo + i as i64) as f64;
            c(j * (l - t * j0) - 0.5 * t * j * j, -j * phi).exp()
        })
        .collect();
    EquivariantU1State { j0, lo, coeffs }
}

/// `X_t = e^{-t/2} U(1) e^{-tJ}`: `|j⟩ ↦ e^{-t/2 - t(j+j₀)} |j+1⟩` (top index dropped).
pub fn u1_annihilate(t: f64, v: &EquivariantU1State) -> EquivariantU1State {
    let mut out = alloc::vec![c(0.0, 0.0); v.coeffs.len()];
    for i in 0..v.coeffs.len().saturating_sub(1) {
        let j = (v.lo + i as i64) as f64;
        out[i + 1] = v.coeffs[i] * (-0.5 * t - t * (j + v.j0)).exp();
    }
    EquivariantU1State { j0: v.j0, lo: v.lo, coeffs: out }
}

/// `X_t*`: `|j⟩ ↦ e^{-t/2 - t(j-1+j₀)} |j-1⟩` (bottom index dropped).
pub fn u1_create(t: f64, v: &EquivariantU1State) -> EquivariantU1State {
    let mut out = alloc::vec![c(0.0, 0.0); v.coeffs.len()];
    for i in 1..v.coeffs.len() {
        let j = (v.lo + i as i64) as f64;
        out[i - 1] = v.coeffs[i] * (-0.5 * t - t * (j - 1.0 + v.j0)).exp();
    }
    EquivariantU1State { j0: v.j0, lo: v.lo, coeffs: out }
}

/// `‖X_t v - ξ v‖ / ‖v‖` for the coherent vector at `(φ, l)`.
pub fn annihilation_residual(t: f64, j0: f64, phi: f64, l: f64) -> f64 {
    let (lo, len) = u1_window(t, j0, l);
    let v = u1_coherent(t, j0, phi, l, lo, len);
    let xv = u1_annihilate(t, &v);
    let xi = c(-l, phi).exp();
    let d: f64 = xv.coeffs.iter().zip(&v.coeffs).map(|(a, b)| (a - b * xi).norm_sqr()).sum();
    (d / v.norm_sq()).sqrt()
}

/// `⟨Φ(e^{iφ}, l), j₀ | Φ(e^{iφ'}, l'), j₀⟩_t` as a `ϑ₃` value.
pub fn u1_overlap(t: f64, j0: f64, phi: f64, l: f64, phip: f64, lp: f64) -> Result<Complex64> {
    let z = c((phi - phip) / (2.0 * PI), -(l + lp - 2.0 * j0 * t) / (2.0 * PI));
    theta3(z, c(0.0, t / PI))
}

/// Quadrature sizes for the overlap-kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapQuad {
    pub angles: usize,
    pub radial: usize,
}

impl Default for OverlapQuad {
    fn default() -> Self {
        Self { angles: 96, radial: 160 }
    }
}

/// Lower symbol of `Q^B_t(f)` at `(φ, l)` by the overlap-kernel integral
/// `∫∫ dφ'dl'/(2π√(πt)) f(φ',l') e^{-(l'-j₀t)²/t} |⟨ξ|ξ'⟩|² / ⟨ξ|ξ⟩`.
pub fn u1_berezin_lower_symbol<F: FnMut(f64, f64) -> Complex64>(
    mut f: F,
    t: f64,
    j0: f64,
    phi: f64,
    l: f64,
    q: OverlapQuad,
) -> Result<Complex64> {
    let norm = u1_overlap(t, j0, phi, l, phi, l)?.re;
    let half = (120.0 * t).sqrt() + 2.0;
    let (xs, ws) = gauss_legendre(q.radial);
    let mut acc = c(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        let lp = l + half * x;
        let gauss = (-(lp - j0 * t).powi(2) / t).exp();
        let mut inner = c(0.0, 0.0);
        for a in 0..q.angles {
            let pp = 2.0 * PI * a as f64 / q.angles as f64;
            let ov = u1_overlap(t, j0, phi, l, pp, lp)?;
            inner += f(pp, lp) * ov.norm_sqr();
        }
        acc += inner * (gauss * w * half * 2.0 * PI / q.angles as f64);
    }
    Ok(acc / (2.0 * PI * (PI * t).sqrt() * norm))
}

/// Heat multiplier `e^{-t(m² + κ²)/2}` of the mode `e^{i(mφ + κl)}`.
pub fn heat_multiplier(t: f64, m: f64, kappa: f64) -> f64 {
    (-0.5 * t * (m * m + kappa * kappa)).exp()
}

/// Wick factor `e^{2t a b}` taking the anti-Wick coefficient of `ξ^a ξ̄^b` to the Wick one;
/// complex exponents give the continuation to Fourier modes.
pub fn wick_factor(t: f64, a: Complex64, b: Complex64) -> Complex64 {
    (a * b * 2.0 * t).exp()
}

/// Exponents `(a, b)` with `ξ^a ξ̄^b = e^{i(mφ + κl)}` for `ξ = e^{-l+iφ}`.
pub fn mode_exponents(m: f64, kappa: f64) -> (Complex64, Complex64) {
    (c(0.5 * m, -0.5 * kappa), c(-0.5 * m, -0.5 * kappa))
}

/// Closed form of the overlap-integral lower symbol of `e^{i(mφ + κl)}`:
/// `e^{i(mφ+κl)} e^{-t(m²+κ²)/2} ϑ₃(u/t - m/2 + iκ/2 | iπ/t) / ϑ₃(u/t | iπ/t)`, `u = l - j₀t`,
/// for integer `m`. The theta ratio is `1 + O(e^{-π²/t})`, so the heat multiplier is exact only
/// up to that correction unless `m` is even and `κ = 0`.
pub fn u1_berezin_mode_exact(t: f64, j0: f64, m: i64, kappa: f64, phi: f64, l: f64) -> Result<Complex64> {
    let u = l - j0 * t;
    let tau = c(0.0, PI / t);
    let num = theta3(c(u / t - 0.5 * m as f64, 0.5 * kappa), tau)?;
    let den = theta3(c(u / t, 0.0), tau)?;
    let mode = c(0.0, m as f64 * phi + kappa * l).exp();
    Ok(mode * heat_multiplier(t, m as f64, kappa) * num / den)
}

/// A trigonometric polynomial `Σ a_{m,κ} e^{i(mφ + κl)}` on `T*U(1)`.
pub type CylinderPoly = Vec<(i64, f64, Complex64)>;

pub fn eval_cylinder(f: &CylinderPoly, phi: f64, l: f64) -> Complex64 {
    f.iter().map(|&(m, k, a)| a * c(0.0, m as f64 * phi + k * l).exp()).sum()
}

/// Lower symbol of `Q^B_t(f)` at `(φ, l)` by the two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinSmoothing {
    /// Overlap-kernel integral with `ϑ₃` weights.
    pub overlap: Complex64,
    /// Wick factors on the (continued) anti-Wick exponents, i.e. `e^{(t/2)Δ} f`.
    pub wick: Complex64,
}

pub fn u1_berezin_smoothing(f: &CylinderPoly, t: f64, j0: f64, phi: f64, l: f64, q: OverlapQuad) -> Result<BerezinSmoothing> {
    let overlap = u1_berezin_lower_symbol(|p, lp| eval_cylinder(f, p, lp), t, j0, phi, l, q)?;
    let wick = f
        .iter()
        .map(|&(m, k, a)| {
            let (x, y) = mode_exponents(m as f64, k);
            a * c(0.0, m as f64 * phi + k * l).exp() * wick_factor(t, x, y)
        })
        .sum();
    Ok(BerezinSmoothing { overlap, wick })
}

/// Lower symbol of the operator `X^a (X*)^b` (`a, b ≥ 0`) at `(φ, l)` on a truncated basis.
pub fn u1_wick_lower_symbol(t: f64, j0: f64, a: u32, b: u32, phi: f64, l: f64) -> Complex64 {
    let (lo0, len0) = u1_window(t, j0, l);
    let pad = (a + b) as i64 + 2;
    let (lo, len) = (lo0 - pad, len0 + 2 * pad as usize);
    let v = u1_coherent(t, j0, phi, l, lo, len);
    let mut w = v.clone();
    for _ in 0..b {
        w = u1_create(t, &w);
    }
    for _ in 0..a {
        w = u1_annihilate(t, &w);
    }
    v.inner(&w) / v.norm_sq()
}

/// Lower symbol of the equivariant KN operator `|k⟩ ↦ Σ_q ŝ_q(k) |k+q⟩` at `(φ, l)`.
///
/// `sigma(φ, k)` must be a trigonometric polynomial in `φ` of degree below `angles / 2`.
pub fn u1_kn_lower_symbol_direct<F: FnMut(f64, i64) -> Complex64>(
    mut sigma: F,
    t: f64,
    j0: f64,
    phi: f64,
    l: f64,
    angles: usize,
) -> Complex64 {
    let (lo, len) = u1_window(t, j0, l);
    let v = u1_coherent(t, j0, phi, l, lo, len);
    let qmax = (angles / 2) as i64 - 1;
    let mut s = c(0.0, 0.0);
    for i in 0..len {
        let k = lo + i as i64;
        let samples: Vec<Complex64> =
            (0..angles).map(|a| sigma(2.0 * PI * a as f64 / angles as f64, k)).collect();
        for q in -qmax..=qmax {
            let target = i as i64 + q;
            if target < 0 || target >= len as i64 {
                continue;
            }
            let sq: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(a, x)| x * c(0.0, -(q as f64) * 2.0 * PI * a as f64 / angles as f64).exp())
                .sum::<Complex64>()
                / angles as f64;
            s += v.coeffs[target as usize].conj() * sq * v.coeffs[i];
        }
    }
    s / v.norm_sq()
}

/// The Gaussian-sum form of the KN lower symbol:
/// `√2/(2π ϑ₃(l/t - j₀ | iπ/t)) Σ_k ∫_ℝ dφ' σ(φ',k) e^{-(L² + (φ-φ')²)/2t} e^{i(φ-φ')L/t}`,
/// `L = l - t(k + j₀)`, with the `φ'` integral by Gauss-Legendre.
pub fn u1_kn_lower_symbol_gauss<F: FnMut(f64, i64) -> Complex64>(
    mut sigma: F,
    t: f64,
    j0: f64,
    phi: f64,
    l: f64,
    nodes: usize,
) -> Result<Complex64> {
    let th = theta3(c(l / t - j0, 0.0), c(0.0, PI / t))?;
    let (lo, len) = u1_window(t, j0, l);
    let half = (120.0 * t).sqrt() + 2.0;
    let (xs, ws) = gauss_legendre(nodes);
    let mut s = c(0.0, 0.0);
    for i in 0..len {
        let k = lo + i as i64;
        let big_l = l - t * (k as f64 + j0);
        for (x, w) in xs.iter().zip(&ws) {
            let d = half * x;
            let e = c(-(big_l * big_l + d * d) / (2.0 * t), d * big_l / t).exp();
            s += sigma(phi - d, k) * e * (w * half);
        }
    }
    Ok(s * (2f64.sqrt() / (2.0 * PI * th.re)))
}

/// `W^{j₀}_t(φ, k) = (t/2π) Σ_{|m| ≤ M} ∫_0^{2π/t} dβ e^{-i(mφ + tβ(k+j₀))} U(m) V_t(β)` on
/// the basis `j ∈ [lo, lo + len)`; the `β` integral uses the trapezoid rule, exact here.
pub fn u1_weyl_element(t: f64, j0: f64, phi: f64, k: i64, m_cut: i64, lo: i64, len: usize) -> CMat {
    let nb = (2 * len).max(8);
    let mut w = CMat::zeros(len, len);
    for col in 0..len {
        let n = lo + col as i64;
        // (t/2π) ∫ dβ e^{iβ t (n - k)} by the trapezoid rule.
        let mut beta_int = c(0.0, 0.0);
        for b in 0..nb {
            let beta = 2.0 * PI / t * b as f64 / nb as f64;
            beta_int += c(0.0, beta * t * ((n as f64 + j0) - (k as f64 + j0))).exp();
        }
        beta_int /= nb as f64;
        if beta_int.norm() < 1e-14 {
            continue;
        }
        for m in -m_cut..=m_cut {
            let row = col as i64 + m;
            if row >= 0 && row < len as i64 {
                w[(row as usize, col)] += beta_int * c(0.0, -(m as f64) * phi).exp();
            }
        }
    }
    w
}

/// Largest deviation of `tr(W(φ_a,k)* W(φ_b,k'))` from `N δ_{ab} δ_{kk'}` on the grid
/// `φ_a = 2πa/N`, `N = 2M + 1`, which is the discrete form of `2π Σ_m δ(φ-φ'-2πm) δ_{kk'}`.
pub fn u1_weyl_orthogonality_residual(t: f64, j0: f64, m_cut: i64, ks: &[i64]) -> f64 {
    let n = (2 * m_cut + 1) as usize;
    let kmin = ks.iter().copied().min().unwrap_or(0);
    let kmax = ks.iter().copied().max().unwrap_or(0);
    let lo = kmin - m_cut;
    let len = (kmax - kmin + 2 * m_cut + 1) as usize;
    let mut mats = Vec::new();
    for &k in ks {
        for a in 0..n {
            let phi = 2.0 * PI * a as f64 / n as f64;
            mats.push((k, a, u1_weyl_element(t, j0, phi, k, m_cut, lo, len)));
        }
    }
    let mut worst: f64 = 0.0;
    for (k1, a1, w1) in &mats {
        for (k2, a2, w2) in &mats {
            let tr = (w1.adjoint() * w2).trace();
            let expect = if k1 == k2 && a1 == a2 { n as f64 } else { 0.0 };
            worst = worst.max((tr - c(expect, 0.0)).norm());
        }
    }
    worst
}
