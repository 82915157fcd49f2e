//! Global Kohn-Nirenberg and Weyl calculi on U(1) and SU(2) for band-limited symbols,
//! plus the ε-scaled local calculus in [`local`].
//!
//! A KN symbol `σ(π, g)` acts by `(AΨ)(g) = Σ_π d_π tr(π(g)* σ(π,g) Ψ̂(π))`. Symbols are
//! zero above their band limit, so `A b_{π,m,n} = √d (π(g)*σ(π,g))_{nm}` stays inside a
//! finite Peter-Weyl space whenever the operator band covers `band + g_band`.

pub mod local;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pw::PwBasis;
use crate::repgroup::{
    band_label, band_unit, c, dpi, irreps_up_to, rep_matrix, CMat, Group, GroupElement,
    IrrepLabel, Quadrature, Quat, Vec3,
};

/// Distance to `-1` below which a kernel sample counts as touching the branch locus.
pub const BRANCH_TOL: f64 = 1e-9;

/// `σ(π, g)` for all `π` up to `band`, sampled on the nodes of `grid`.
#[derive(Debug, Clone)]
pub struct MatrixSymbol {
    pub group: Group,
    pub band: i64,
    /// Peter-Weyl band of the `g`-dependence (U(1): max `|k|`; SU(2): max dimension).
    pub g_band: i64,
    pub grid: Arc<Quadrature>,
    /// `values[irrep][node]`, irreps ordered as in [`irreps_up_to`].
    pub values: Vec<Vec<CMat>>,
}

/// Quadrature exact for KN matrix elements on an operator band `op_band` with symbols of
/// `g`-band `g_band`.
pub fn symbol_grid(group: Group, op_band: i64, g_band: i64) -> Arc<Quadrature> {
    let unit = 2 * band_unit(group, op_band) + band_unit(group, g_band);
    Arc::new(Quadrature::exact_for(group, unit))
}

impl MatrixSymbol {
    pub fn from_fn<F: FnMut(&IrrepLabel, &GroupElement) -> CMat>(
        group: Group,
        band: i64,
        g_band: i64,
        grid: Arc<Quadrature>,
        mut f: F,
    ) -> Self {
        let values = irreps_up_to(group, band)
            .iter()
            .map(|pi| grid.nodes.iter().map(|g| f(pi, g)).collect())
            .collect();
        Self { group, band, g_band, grid, values }
    }

    /// `σ ≡ 1`: the identity operator on the band.
    pub fn identity(group: Group, band: i64, grid: Arc<Quadrature>) -> Self {
        Self::from_fn(group, band, band_label(group, 0), grid, |pi, _| {
            CMat::identity(pi.dim(), pi.dim())
        })
    }

    /// `σ_f(π, g) = f(g) 1`.
    pub fn multiplication<F: FnMut(&GroupElement) -> Complex64>(
        group: Group,
        band: i64,
        g_band: i64,
        grid: Arc<Quadrature>,
        mut f: F,
    ) -> Self {
        Self::from_fn(group, band, g_band, grid, |pi, g| CMat::identity(pi.dim(), pi.dim()) * f(g))
    }

    /// `σ_{P_X}(π, g) = iε dπ(X)`, the symbol of `-iε R_X`.
    pub fn momentum(group: Group, band: i64, grid: Arc<Quadrature>, x: &Vec3, eps: f64) -> Self {
        Self::from_fn(group, band, band_label(group, 0), grid, |pi, _| dpi(pi, x) * c(0.0, eps))
    }

    pub fn irreps(&self) -> Vec<IrrepLabel> {
        irreps_up_to(self.group, self.band)
    }

    /// Pointwise adjoint `σ*(π, g) = σ(π, g)*`.
    pub fn adjoint_pointwise(&self) -> Self {
        let mut out = self.clone();
        for row in out.values.iter_mut() {
            for m in row.iter_mut() {
                *m = m.adjoint();
            }
        }
        out
    }

    /// Largest entry-wise difference over common irreps; irreps present in only one
    /// symbol are compared with zero.
    pub fn max_abs_diff(&self, o: &MatrixSymbol) -> f64 {
        let n = self.values.len().max(o.values.len());
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for node in 0..self.grid.len() {
                let a = self.values.get(k).map(|r| &r[node]);
                let b = o.values.get(k).map(|r| &r[node]);
                let d = match (a, b) {
                    (Some(a), Some(b)) => (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm())),
                    (Some(a), None) | (None, Some(a)) => a.iter().fold(0.0f64, |m, z| m.max(z.norm())),
                    _ => 0.0,
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(σ_A, σ_B) = Σ_π d_π ∫ tr(σ_A(π,g)* σ_B(π,g)) dg`.
    pub fn hs_pairing(&self, o: &MatrixSymbol) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for (k, pi) in self.irreps().iter().enumerate() {
            if k >= o.values.len() {
                break;
            }
            for (node, w) in self.grid.weights.iter().enumerate() {
                let t = (self.values[k][node].adjoint() * &o.values[k][node]).trace();
                acc += t * (pi.dim() as f64 * w);
            }
        }
        acc
    }

    /// Fourier coefficients of each entry in the `g`-variable: `coeff[irrep][β]` is the
    /// matrix multiplying `b_β(g)`.
    pub fn g_coefficients(&self) -> Result<(PwBasis, Vec<Vec<CMat>>)> {
        let gb = PwBasis::new(self.group, self.g_band);
        let need = 2 * gb.unit();
        if self.grid.content < need {
            return Err(Error::BandOverflow { label: band_label(self.group, need), max: band_label(self.group, self.grid.content) });
        }
        let mut coeffs = Vec::with_capacity(self.values.len());
        for row in &self.values {
            let d = row[0].nrows();
            let mut cs = alloc::vec![CMat::zeros(d, d); gb.len];
            for (node, g) in self.grid.nodes.iter().enumerate() {
                let w = self.grid.weights[node];
                for (b, cm) in gb.eval_all(g).iter().zip(cs.iter_mut()) {
                    *cm += &row[node] * (b.conj() * w);
                }
            }
            coeffs.push(cs);
        }
        Ok((gb, coeffs))
    }

    /// Evaluates `σ(π, x)` at an arbitrary point by Fourier interpolation in `g`.
    ///
    /// Each call redoes the coefficient pass; use [`MatrixSymbol::interpolant`] for many points.
    pub fn eval(&self, pi: &IrrepLabel, x: &GroupElement) -> Result<CMat> {
        self.interpolant()?.eval(pi, x)
    }

    pub fn interpolant(&self) -> Result<SymbolInterpolant> {
        let (gb, coeffs) = self.g_coefficients()?;
        Ok(SymbolInterpolant { symbol_basis: PwBasis::new(self.group, self.band), gb, coeffs })
    }

    /// The same symbol sampled on `grid`.
    pub fn resample(&self, grid: Arc<Quadrature>) -> Result<MatrixSymbol> {
        let f = self.interpolant()?;
        let values = self
            .irreps()
            .iter()
            .enumerate()
            .map(|(k, _)| grid.nodes.iter().map(|g| eval_coeffs(&f.gb, &f.coeffs[k], g)).collect())
            .collect();
        Ok(MatrixSymbol { group: self.group, band: self.band, g_band: self.g_band, grid, values })
    }
}

/// Fourier interpolant of a symbol in the `g`-variable.
#[derive(Debug, Clone)]
pub struct SymbolInterpolant {
    symbol_basis: PwBasis,
    gb: PwBasis,
    coeffs: Vec<Vec<CMat>>,
}

impl SymbolInterpolant {
    pub fn eval(&self, pi: &IrrepLabel, x: &GroupElement) -> Result<CMat> {
        let k = self
            .symbol_basis
            .irrep_index(pi)
            .ok_or(Error::BandOverflow { label: pi.label, max: self.symbol_basis.band })?;
        Ok(eval_coeffs(&self.gb, &self.coeffs[k], x))
    }
}

fn eval_coeffs(gb: &PwBasis, cs: &[CMat], x: &GroupElement) -> CMat {
    let d = cs[0].nrows();
    let mut out = CMat::zeros(d, d);
    for (b, cm) in gb.eval_all(x).iter().zip(cs) {
        out += cm * *b;
    }
    out
}

/// Dense operator on the Peter-Weyl space of band `band` ([`PwBasis`] ordering).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub group: Group,
    pub band: i64,
    pub matrix: CMat,
}

impl TruncatedOperator {
    pub fn basis(&self) -> PwBasis {
        PwBasis::new(self.group, self.band)
    }

    pub fn identity(group: Group, band: i64) -> Self {
        let n = PwBasis::new(group, band).len;
        Self { group, band, matrix: CMat::identity(n, n) }
    }

    pub fn adjoint(&self) -> Self {
        Self { group: self.group, band: self.band, matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, o: &TruncatedOperator) -> Self {
        Self { group: self.group, band: self.band, matrix: &self.matrix * &o.matrix }
    }

    /// Columns of the first `band` irreps: the part of the operator acting on `band`.
    pub fn columns_up_to(&self, band: i64) -> CMat {
        let n = PwBasis::new(self.group, band.min(self.band)).len;
        self.matrix.columns(0, n).into_owned()
    }
}

fn check_grid(group: Group, grid: &Quadrature, need: usize) -> Result<()> {
    if grid.content < need {
        return Err(Error::BandOverflow {
            label: band_label(group, need),
            max: band_label(group, grid.content),
        });
    }
    Ok(())
}

/// KN quantization onto the Peter-Weyl space of band `op_band`.
///
/// Fails with [`Error::BandOverflow`] when `op_band` cannot hold `A b_π` for every `π` in
/// the symbol band, or when the symbol grid is too coarse to integrate exactly.
pub fn kn_quantize(sigma: &MatrixSymbol, op_band: i64) -> Result<TruncatedOperator> {
    let group = sigma.group;
    let reach = band_unit(group, sigma.band) + band_unit(group, sigma.g_band);
    if band_unit(group, op_band) < reach {
        return Err(Error::BandOverflow { label: band_label(group, reach), max: op_band });
    }
    let grid = &sigma.grid;
    check_grid(group, grid, 2 * band_unit(group, op_band) + band_unit(group, sigma.g_band))?;
    let basis = PwBasis::new(group, op_band);
    let b = basis.sample(grid);
    let m = grid.len();
    let mut v = CMat::zeros(m, basis.len);
    for (k, pi) in sigma.irreps().iter().enumerate() {
        let d = pi.dim();
        let sd = (d as f64).sqrt();
        let off = basis.offsets[basis.irrep_index(pi).expect("symbol band inside op band")];
        for (node, g) in grid.nodes.iter().enumerate() {
            let p = rep_matrix(pi, g).adjoint() * &sigma.values[k][node];
            let w = grid.weights[node] * sd;
            for mm in 0..d {
                for nn in 0..d {
                    v[(node, off + mm * d + nn)] = p[(nn, mm)] * w;
                }
            }
        }
    }
    Ok(TruncatedOperator { group, band: op_band, matrix: b.adjoint() * v })
}

/// Symbol extraction `σ_A(π, g) = π(g) (A π*)(g)` on the nodes of `grid`.
pub fn kn_symbol(a: &TruncatedOperator, grid: Arc<Quadrature>) -> MatrixSymbol {
    let group = a.group;
    let basis = a.basis();
    let b = basis.sample(&grid);
    let g_band = band_label(group, 2 * basis.unit());
    let mut values = Vec::with_capacity(basis.irreps.len());
    for (k, pi) in basis.irreps.iter().enumerate() {
        let d = pi.dim();
        let off = basis.offsets[k];
        // Column (π, l, k) of A is A b_{π,l,k}; (π*)_{kl} = b_{π,l,k} / √d.
        let cols = a.matrix.columns(off, d * d);
        let vals = &b * cols; // [node][l*d + k]
        let sd = (d as f64).sqrt();
        let mut row = Vec::with_capacity(grid.len());
        for (node, g) in grid.nodes.iter().enumerate() {
            let vm = DMatrix::from_fn(d, d, |kk, l| vals[(node, l * d + kk)] / sd);
            row.push(rep_matrix(pi, g) * vm);
        }
        values.push(row);
    }
    MatrixSymbol { group, band: a.band, g_band, grid, values }
}

/// `T[node][(π',a,b)] = d' (π'(g)* σ(π',g))_{ab}` and `R[(π',a,b)][node] = π'(g)_{ba}`, so
/// that the KN kernel is `K(g,k) = (T R)[g][k] = Σ d' tr(π'(g)* σ(π',g) π'(k))`.
fn kernel_matrix(sigma: &MatrixSymbol) -> CMat {
    let grid = &sigma.grid;
    let irreps = sigma.irreps();
    let width: usize = irreps.iter().map(|p| p.dim() * p.dim()).sum();
    let m = grid.len();
    let mut t = CMat::zeros(m, width);
    let mut r = CMat::zeros(width, m);
    let mut off = 0;
    for (k, pi) in irreps.iter().enumerate() {
        let d = pi.dim();
        for (node, g) in grid.nodes.iter().enumerate() {
            let rep = rep_matrix(pi, g);
            let tm = rep.adjoint() * &sigma.values[k][node];
            for a in 0..d {
                for bb in 0..d {
                    t[(node, off + a * d + bb)] = tm[(a, bb)] * d as f64;
                    r[(off + a * d + bb, node)] = rep[(bb, a)];
                }
            }
        }
        off += d * d;
    }
    t * r
}

/// Symbol of `op(σ) op(τ)` from the kernel formula
/// `σ_AB(π,g) = π(g) ∫ K_A(g,k) π(k)* σ_B(π,k) dk`.
pub fn kn_compose(sigma: &MatrixSymbol, tau: &MatrixSymbol) -> Result<MatrixSymbol> {
    let group = sigma.group;
    if tau.group != group || tau.grid.nodes != sigma.grid.nodes {
        return Err(Error::InvalidInput("symbols must share group and grid"));
    }
    let need = band_unit(group, sigma.band) + band_unit(group, tau.band) + band_unit(group, tau.g_band);
    check_grid(group, &sigma.grid, need)?;
    let grid = sigma.grid.clone();
    let kmat = kernel_matrix(sigma);
    let mut values = Vec::with_capacity(tau.values.len());
    for (k, pi) in tau.irreps().iter().enumerate() {
        let d = pi.dim();
        let mut gmat = CMat::zeros(grid.len(), d * d);
        for (node, g) in grid.nodes.iter().enumerate() {
            let p = rep_matrix(pi, g).adjoint() * &tau.values[k][node] * c(grid.weights[node], 0.0);
            for a in 0..d {
                for b in 0..d {
                    gmat[(node, a * d + b)] = p[(a, b)];
                }
            }
        }
        let s = &kmat * gmat;
        let row = grid
            .nodes
            .iter()
            .enumerate()
            .map(|(node, g)| rep_matrix(pi, g) * DMatrix::from_fn(d, d, |a, b| s[(node, a * d + b)]))
            .collect();
        values.push(row);
    }
    let g_unit = match group {
        Group::U1 => band_unit(group, sigma.g_band) + band_unit(group, tau.g_band),
        Group::SU2 => {
            2 * band_unit(group, tau.band) + band_unit(group, sigma.g_band) + band_unit(group, tau.g_band)
        }
    };
    Ok(MatrixSymbol { group, band: tau.band, g_band: band_label(group, g_unit), grid, values })
}

/// Symbol of the adjoint operator, `σ_{A*}(π,g) = π(g) ∫ conj(K_A(k,g)) π(k)* dk`.
pub fn kn_adjoint(sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    let group = sigma.group;
    let reach = band_unit(group, sigma.band) + band_unit(group, sigma.g_band);
    check_grid(group, &sigma.grid, 2 * reach)?;
    let grid = sigma.grid.clone();
    let kmat = kernel_matrix(sigma);
    let band = band_label(group, reach);
    let mut values = Vec::new();
    for pi in irreps_up_to(group, band) {
        let d = pi.dim();
        let reps: Vec<CMat> = grid.nodes.iter().map(|g| rep_matrix(&pi, g)).collect();
        let mut row = Vec::with_capacity(grid.len());
        for node in 0..grid.len() {
            let mut acc = CMat::zeros(d, d);
            for k in 0..grid.len() {
                acc += reps[k].adjoint() * (kmat[(k, node)].conj() * grid.weights[k]);
            }
            row.push(&reps[node] * acc);
        }
        values.push(row);
    }
    Ok(MatrixSymbol { group, band, g_band: band_label(group, 2 * reach), grid, values })
}

/// Convolution kernel `F(h, g) = Σ_π d_π tr(π(h)* σ(π, x(h,g)))` with `x = g` (KN) or
/// `x = √h⁻¹ g` (Weyl deformation).
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    pub symbol: MatrixSymbol,
    pub weyl: bool,
    g_basis: PwBasis,
    coeffs: Vec<Vec<CMat>>,
}

impl ConvolutionKernel {
    pub fn kn(sigma: &MatrixSymbol) -> Result<Self> {
        let (g_basis, coeffs) = sigma.g_coefficients()?;
        Ok(Self { symbol: sigma.clone(), weyl: false, g_basis, coeffs })
    }

    pub fn eval(&self, h: &GroupElement, g: &GroupElement) -> Complex64 {
        let x = if self.weyl { h.sqrt().inv().mul(g) } else { *g };
        let gb = self.g_basis.eval_all(&x);
        let mut acc = c(0.0, 0.0);
        for (k, pi) in self.symbol.irreps().iter().enumerate() {
            let d = pi.dim();
            let mut s = CMat::zeros(d, d);
            for (b, cm) in gb.iter().zip(&self.coeffs[k]) {
                s += cm * *b;
            }
            acc += (rep_matrix(pi, h).adjoint() * s).trace() * d as f64;
        }
        acc
    }

    /// Kernel matrix `K(g_i, g_k) = F(g_i g_k⁻¹, g_i)`; reports mass on the branch locus.
    fn node_matrix(&self) -> Result<CMat> {
        let grid = &self.symbol.grid;
        let m = grid.len();
        let mut k = CMat::zeros(m, m);
        let mut bad = 0.0;
        for i in 0..m {
            for j in 0..m {
                let h = grid.nodes[i].mul(&grid.nodes[j].inv());
                let v = self.eval(&h, &grid.nodes[i]);
                if self.weyl && h.branch_distance() < BRANCH_TOL {
                    bad += v.norm() * grid.weights[i] * grid.weights[j];
                }
                k[(i, j)] = v;
            }
        }
        if bad > 1e-12 {
            return Err(Error::BranchLocus { mass: bad });
        }
        Ok(k)
    }

    /// Operator `(AΨ)(g) = ∫ F(h,g) Ψ(h⁻¹g) dh` as the discrete form `B† W K W B` on the
    /// symbol grid; adjoint pairs `(g,k)`, `(k,g)` share one midpoint, so reality is exact.
    pub fn quantize(&self, op_band: i64) -> Result<TruncatedOperator> {
        let grid = &self.symbol.grid;
        let group = self.symbol.group;
        let basis = PwBasis::new(group, op_band);
        let b = basis.sample(grid);
        let mut k = self.node_matrix()?;
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                k[(i, j)] *= grid.weights[i] * grid.weights[j];
            }
        }
        Ok(TruncatedOperator { group, band: op_band, matrix: b.adjoint() * k * b })
    }
}

/// `F^W_σ(h, g) = F^R_σ(h, √h⁻¹ g)` with the principal square root.
pub fn weyl_deform(sigma: &MatrixSymbol) -> Result<ConvolutionKernel> {
    let mut k = ConvolutionKernel::kn(sigma)?;
    k.weyl = true;
    Ok(k)
}

/// Weyl quantization `ρ_L(F^W_σ)` on the band `op_band`.
pub fn weyl_quantize(sigma: &MatrixSymbol, op_band: i64) -> Result<TruncatedOperator> {
    weyl_deform(sigma)?.quantize(op_band)
}

/// Finite subgroup of `G` on which Weyl elements are orthogonal: the `n`-th roots of unity
/// for U(1), the binary icosahedral group (order 120) for SU(2).
pub fn finite_subgroup(group: Group, n: usize) -> Vec<GroupElement> {
    match group {
        Group::U1 => (0..n).map(|k| GroupElement::u1(2.0 * PI * k as f64 / n as f64)).collect(),
        Group::SU2 => binary_icosahedral().into_iter().map(GroupElement::SU2).collect(),
    }
}

fn binary_icosahedral() -> Vec<Quat> {
    let phi = 0.5 * (1.0 + 5.0f64.sqrt());
    let gens = [
        Quat { w: 0.5, x: 0.5, y: 0.5, z: 0.5 },
        Quat { w: 0.5 * phi, x: 0.5 / phi, y: 0.5, z: 0.0 },
    ];
    let close = |a: &Quat, b: &Quat| {
        (a.w - b.w).abs() + (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs() < 1e-9
    };
    let mut els = alloc::vec![Quat::IDENTITY];
    let mut frontier = els.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in &gens {
                let p = a.mul(g);
                if !els.iter().any(|e| close(e, &p)) {
                    els.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    els
}

/// Operator of the Weyl element `W_{π,m,n;h}`: `(WΨ)(g) = π(√h⁻¹ g)_{mn} Ψ(h⁻¹ g)` on
/// `L²(H)` for a finite subgroup `H` (normalized counting measure).
pub fn weyl_element_operator(elems: &[GroupElement], pi: &IrrepLabel, m: usize, n: usize, h: &GroupElement) -> CMat {
    let len = elems.len();
    let find = |x: &GroupElement| -> usize {
        elems
            .iter()
            .position(|e| match (e, x) {
                (GroupElement::U1(a), GroupElement::U1(b)) => {
                    let d = (a - b).abs();
                    d < 1e-9 || (2.0 * PI - d) < 1e-9
                }
                (GroupElement::SU2(a), GroupElement::SU2(b)) => {
                    (a.w - b.w).abs() + (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs() < 1e-9
                }
                _ => false,
            })
            .expect("subgroup closed under products")
    };
    let sqrt_inv = h.sqrt().inv();
    let hinv = h.inv();
    let mut w = CMat::zeros(len, len);
    for (i, g) in elems.iter().enumerate() {
        let j = find(&hinv.mul(g));
        w[(i, j)] = rep_matrix(pi, &sqrt_inv.mul(g))[(m, n)];
    }
    w
}

/// Normalized trace pairing `tr(A* B) / |H|`.
pub fn finite_trace_pairing(a: &CMat, b: &CMat) -> Complex64 {
    (a.adjoint() * b).trace() / a.nrows() as f64
}
