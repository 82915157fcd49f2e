//! Peter-Weyl basis, band-limited functions and the elementary operators on them.
//!
//! The orthonormal basis of `L²(G)` is `b_{π,m,n}(g) = √d_π conj(π(g)_{mn})`. A function
//! `Ψ = Σ C_{π,m,n} b_{π,m,n}` has Fourier coefficient `Ψ̂(π) = ∫ Ψ π dg = C_π / √d_π`.
//! Within a block the index is `m·d + n`, and blocks follow [`irreps_up_to`].

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::repgroup::{
    band_unit, c, dpi, irreps_up_to, rep_matrix, CMat, Group, GroupElement, IrrepLabel, Quadrature,
    Vec3,
};

/// Peter-Weyl basis of all irreps up to a band limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PwBasis {
    pub group: Group,
    pub band: i64,
    pub irreps: Vec<IrrepLabel>,
    pub offsets: Vec<usize>,
    pub len: usize,
}

impl PwBasis {
    pub fn new(group: Group, band: i64) -> Self {
        let irreps = irreps_up_to(group, band);
        let mut offsets = Vec::with_capacity(irreps.len());
        let mut len = 0;
        for pi in &irreps {
            offsets.push(len);
            len += pi.dim() * pi.dim();
        }
        Self { group, band, irreps, offsets, len }
    }

    /// Position of `π` in the block list, if inside the band.
    pub fn irrep_index(&self, pi: &IrrepLabel) -> Option<usize> {
        if pi.group != self.group {
            return None;
        }
        match self.group {
            Group::U1 => {
                let j = pi.label;
                if j.abs() > self.band {
                    None
                } else if j == 0 {
                    Some(0)
                } else if j > 0 {
                    Some(2 * j as usize - 1)
                } else {
                    Some(2 * (-j) as usize)
                }
            }
            Group::SU2 => {
                if pi.label >= 1 && pi.label <= self.band {
                    Some(pi.label as usize - 1)
                } else {
                    None
                }
            }
        }
    }

    pub fn index(&self, pi: &IrrepLabel, m: usize, n: usize) -> Option<usize> {
        self.irrep_index(pi).map(|k| self.offsets[k] + m * pi.dim() + n)
    }

    /// Band unit of the largest irrep in the basis.
    pub fn unit(&self) -> usize {
        band_unit(self.group, self.band)
    }

    /// All `b_β(g)`.
    pub fn eval_all(&self, g: &GroupElement) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len);
        for pi in &self.irreps {
            let d = pi.dim();
            let sd = (d as f64).sqrt();
            let m = rep_matrix(pi, g);
            for i in 0..d {
                for j in 0..d {
                    out.push(m[(i, j)].conj() * sd);
                }
            }
        }
        out
    }

    /// Matrix `B[k][β] = b_β(g_k)` on quadrature nodes.
    pub fn sample(&self, q: &Quadrature) -> CMat {
        let mut b = CMat::zeros(q.len(), self.len);
        for (k, g) in q.nodes.iter().enumerate() {
            for (j, v) in self.eval_all(g).into_iter().enumerate() {
                b[(k, j)] = v;
            }
        }
        b
    }

    /// Block-diagonal operator acting on each coefficient block `C_π` by `C ↦ L_π C R_π`.
    pub fn block_operator<F: FnMut(&IrrepLabel) -> (CMat, CMat)>(&self, mut f: F) -> CMat {
        let mut out = CMat::zeros(self.len, self.len);
        for (k, pi) in self.irreps.iter().enumerate() {
            let d = pi.dim();
            let off = self.offsets[k];
            let (l, r) = f(pi);
            // vec(L C R) in row-major order is (L ⊗ Rᵀ) vec(C).
            for m in 0..d {
                for n in 0..d {
                    for mp in 0..d {
                        for np in 0..d {
                            let v = l[(m, mp)] * r[(np, n)];
                            if v != c(0.0, 0.0) {
                                out[(off + m * d + n, off + mp * d + np)] += v;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `Ψ ↦ Ψ(k g)`: on coefficients `C_π ↦ π(k)† C_π`.
    pub fn left_shift(&self, k: &GroupElement) -> CMat {
        self.block_operator(|pi| {
            let d = pi.dim();
            (rep_matrix(pi, k).adjoint(), CMat::identity(d, d))
        })
    }

    /// `Ψ ↦ Ψ(g h)`: on coefficients `C_π ↦ C_π π(h)†`.
    pub fn right_shift(&self, h: &GroupElement) -> CMat {
        self.block_operator(|pi| {
            let d = pi.dim();
            (CMat::identity(d, d), rep_matrix(pi, h).adjoint())
        })
    }

    /// `Ψ ↦ d/ds Ψ(exp(X + sV) g)|₀` via the derivative of `exp` (see [`dexp_right`]).
    pub fn left_shift_deriv(&self, x: &Vec3, v: &Vec3) -> CMat {
        let w = dexp_right(self.group, x, v);
        let e = GroupElement::exp(self.group, x);
        self.block_operator(|pi| {
            let d = pi.dim();
            ((rep_matrix(pi, &e) * dpi(pi, &w)).adjoint(), CMat::identity(d, d))
        })
    }

    /// `R_X Ψ(g) = d/dt Ψ(exp(tX) g)`.
    pub fn derivative(&self, x: &Vec3) -> CMat {
        self.block_operator(|pi| {
            let d = pi.dim();
            (dpi(pi, x).adjoint(), CMat::identity(d, d))
        })
    }

    /// Multiplication by `f` on this basis, integrated with `q`.
    pub fn multiplication<F: FnMut(&GroupElement) -> Complex64>(&self, q: &Quadrature, mut f: F) -> CMat {
        let b = self.sample(q);
        let mut wb = b.clone();
        for (k, g) in q.nodes.iter().enumerate() {
            let s = f(g) * q.weights[k];
            for j in 0..self.len {
                wb[(k, j)] *= s;
            }
        }
        b.adjoint() * wb
    }
}

/// `W` with `d/ds exp(X + sV)|₀ = exp(X) W`, i.e. `W = ((1 - e^{-ad X}) / ad X) V`.
pub fn dexp_right(group: Group, x: &Vec3, v: &Vec3) -> Vec3 {
    match group {
        Group::U1 => *v,
        Group::SU2 => {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let r = r2.sqrt();
            // Coefficients of [X,V] and [X,[X,V]]; series below r = 1e-4.
            let (a, b) = if r < 1e-4 {
                (0.5 - r2 / 24.0, 1.0 / 6.0 - r2 / 120.0)
            } else {
                ((1.0 - r.cos()) / r2, (r - r.sin()) / (r2 * r))
            };
            let xv = cross(x, v);
            let xxv = cross(x, &xv);
            [v[0] - a * xv[0] + b * xxv[0], v[1] - a * xv[1] + b * xxv[1], v[2] - a * xv[2] + b * xxv[2]]
        }
    }
}

/// `[X, Y]` in the `τ` basis, `[τ_a, τ_b] = ε_abc τ_c`.
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Band-limited function `Σ a_β b_β` on U(1) or SU(2).
#[derive(Debug, Clone, PartialEq)]
pub struct BandFn {
    pub basis: PwBasis,
    pub coeffs: Vec<Complex64>,
}

impl BandFn {
    pub fn zero(group: Group, band: i64) -> Self {
        let basis = PwBasis::new(group, band);
        let coeffs = alloc::vec![c(0.0, 0.0); basis.len];
        Self { basis, coeffs }
    }

    pub fn constant(group: Group, v: Complex64) -> Self {
        let mut f = Self::zero(group, if group == Group::U1 { 0 } else { 1 });
        f.coeffs[0] = v;
        f
    }

    pub fn group(&self) -> Group {
        self.basis.group
    }

    pub fn band(&self) -> i64 {
        self.basis.band
    }

    /// Orthogonal projection of `f` onto the band, exact when `f` lies in it.
    pub fn project<F: FnMut(&GroupElement) -> Complex64>(group: Group, band: i64, mut f: F) -> Self {
        let basis = PwBasis::new(group, band);
        let q = Quadrature::exact_for(group, 2 * basis.unit());
        let mut coeffs = alloc::vec![c(0.0, 0.0); basis.len];
        for (g, w) in q.nodes.iter().zip(&q.weights) {
            let fv = f(g) * *w;
            for (a, b) in coeffs.iter_mut().zip(basis.eval_all(g)) {
                *a += b.conj() * fv;
            }
        }
        Self { basis, coeffs }
    }

    pub fn eval(&self, g: &GroupElement) -> Complex64 {
        self.basis.eval_all(g).iter().zip(&self.coeffs).map(|(b, a)| b * a).sum()
    }

    /// Re-expresses the function on a larger (or equal) band.
    pub fn widen(&self, band: i64) -> Self {
        let mut out = Self::zero(self.group(), band.max(self.band()));
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        out
    }

    pub fn add(&self, o: &BandFn) -> BandFn {
        let band = self.band().max(o.band());
        let mut out = self.widen(band);
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> BandFn {
        BandFn { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm() == 0.0)
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> BandFn {
        let f = self.clone();
        BandFn::project(self.group(), self.band(), |g| f.eval(g).conj())
    }

    /// Pointwise product; the band units add.
    pub fn mul(&self, o: &BandFn) -> BandFn {
        let group = self.group();
        let unit = self.basis.unit() + o.basis.unit();
        let band = crate::repgroup::band_label(group, unit);
        BandFn::project(group, band, |g| self.eval(g) * o.eval(g))
    }

    /// Convolution `(Ψ ∗ Φ)(g) = ∫ Ψ(h) Φ(h⁻¹ g) dh`: `Ψ̂ Φ̂` per irrep, so
    /// `C_π ↦ C^Ψ_π C^Φ_π / √d_π`.
    pub fn convolve(&self, o: &BandFn) -> BandFn {
        let mut out = BandFn::zero(self.group(), self.band().min(o.band()));
        for (k, pi) in out.basis.irreps.clone().iter().enumerate() {
            let d = pi.dim();
            let (ka, kb) = match (self.basis.irrep_index(pi), o.basis.irrep_index(pi)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let blk = |f: &BandFn, i: usize| {
                let off = f.basis.offsets[i];
                DMatrix::from_fn(d, d, |m, n| f.coeffs[off + m * d + n])
            };
            let p = blk(self, ka) * blk(o, kb) / c((d as f64).sqrt(), 0.0);
            let off = out.basis.offsets[k];
            for m in 0..d {
                for n in 0..d {
                    out.coeffs[off + m * d + n] = p[(m, n)];
                }
            }
        }
        out
    }

    fn map_blocks<F: FnMut(&IrrepLabel) -> CMat>(&self, mut f: F) -> BandFn {
        let mut out = self.clone();
        for (k, pi) in self.basis.irreps.iter().enumerate() {
            let d = pi.dim();
            let off = self.basis.offsets[k];
            let blk = DMatrix::from_fn(d, d, |m, n| self.coeffs[off + m * d + n]);
            let l = f(pi);
            let nb = l * blk;
            for m in 0..d {
                for n in 0..d {
                    out.coeffs[off + m * d + n] = nb[(m, n)];
                }
            }
        }
        out
    }

    /// `g ↦ f(k g)`.
    pub fn left_shift(&self, k: &GroupElement) -> BandFn {
        self.map_blocks(|pi| rep_matrix(pi, k).adjoint())
    }

    /// `g ↦ d/ds f(exp(X + sV) g)|₀`.
    pub fn left_shift_deriv(&self, x: &Vec3, v: &Vec3) -> BandFn {
        let group = self.group();
        let w = dexp_right(group, x, v);
        let e = GroupElement::exp(group, x);
        self.map_blocks(|pi| (rep_matrix(pi, &e) * dpi(pi, &w)).adjoint())
    }

    /// `R_X f(g) = d/dt f(exp(tX) g)|₀`.
    pub fn derivative(&self, x: &Vec3) -> BandFn {
        self.map_blocks(|pi| dpi(pi, x).adjoint())
    }
}
