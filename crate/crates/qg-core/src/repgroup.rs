//! Representation-theoretic kernel for U(1) and SU(2).
//!
//! Conventions used throughout the crate:
//! * Haar measure has total mass 1 ([`HAAR_VOLUME`]).
//! * SU(2) elements are unit quaternions `w + x i + y j + z k`, identified with
//!   the matrix `w 1 - i (x σ_x + y σ_y + z σ_z)`.
//! * The Lie algebra basis is `τ_a = -i σ_a / 2`, orthonormal for
//!   `<X, Y> = -2 tr(XY)`; `exp(θ n·τ)` is the rotation by `θ` about `n`.
//! * Irrep matrices use the weight basis ordered `m = j, j-1, ..., -j`, so
//!   index 0 is the highest weight vector and `dπ(τ_a) = -i J_a`.
//! * U(1) has basis `1` of `u(1) ≅ ℝ`, `exp(X) = e^{iX}`, `dπ_j(X) = i j X`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

pub type CMat = DMatrix<Complex64>;
pub type Vec3 = [f64; 3];

/// Total Haar mass of either group under the crate-wide convention.
pub const HAAR_VOLUME: f64 = 1.0;
/// Riemannian volume of SU(2) for the metric `<X,Y> = -2 tr(XY)` (a 3-sphere of radius 2).
pub const SU2_RIEMANNIAN_VOLUME: f64 = 16.0 * PI * PI;
/// Riemannian volume of U(1) for the unit-norm generator.
pub const U1_RIEMANNIAN_VOLUME: f64 = 2.0 * PI;
/// Largest SU(2) quadrature exactness degree accepted by [`group_quadrature`].
pub const MAX_SU2_DEGREE: usize = 160;
/// Largest U(1) quadrature exactness degree accepted by [`group_quadrature`].
pub const MAX_U1_DEGREE: usize = 1 << 16;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    U1,
    SU2,
}

impl Group {
    /// Real dimension of the group manifold.
    pub fn dim(self) -> usize {
        match self {
            Group::U1 => 1,
            Group::SU2 => 3,
        }
    }

    /// Radius of the ball in `g` mapped injectively onto `G \ {-1}`.
    pub fn injectivity_radius(self) -> f64 {
        match self {
            Group::U1 => PI,
            Group::SU2 => 2.0 * PI,
        }
    }

    /// Riemannian volume; used to restate Lebesgue-normalized formulas under vol = 1.
    pub fn riemannian_volume(self) -> f64 {
        match self {
            Group::U1 => U1_RIEMANNIAN_VOLUME,
            Group::SU2 => SU2_RIEMANNIAN_VOLUME,
        }
    }
}

/// A unitary irrep: U(1) charge `j ∈ ℤ` or SU(2) dimension `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IrrepLabel {
    pub group: Group,
    pub label: i64,
}

impl IrrepLabel {
    pub fn new(group: Group, label: i64) -> Result<Self> {
        if group == Group::SU2 && label < 1 {
            return Err(Error::InvalidInput("SU(2) irrep dimension must be >= 1"));
        }
        Ok(Self { group, label })
    }

    pub fn u1(j: i64) -> Self {
        Self { group: Group::U1, label: j }
    }

    /// SU(2) irrep of dimension `n`. Panics if `n == 0`.
    pub fn su2(n: i64) -> Self {
        assert!(n >= 1, "SU(2) irrep dimension must be >= 1");
        Self { group: Group::SU2, label: n }
    }

    pub fn dim(&self) -> usize {
        match self.group {
            Group::U1 => 1,
            Group::SU2 => self.label as usize,
        }
    }

    /// Eigenvalue of the Casimir (minus the Laplacian).
    pub fn casimir(&self) -> f64 {
        let l = self.label as f64;
        match self.group {
            Group::U1 => l * l,
            Group::SU2 => (l * l - 1.0) / 4.0,
        }
    }

    /// Twice the spin, `n - 1`; for U(1) the charge itself.
    pub fn two_j(&self) -> i64 {
        match self.group {
            Group::U1 => self.label,
            Group::SU2 => self.label - 1,
        }
    }
}

/// All irreps with label at most `lambda`.
///
/// U(1) is ordered `0, 1, -1, 2, -2, ...` and SU(2) `1, 2, ..., λ`, so a smaller band is
/// always a prefix of a larger one.
pub fn irreps_up_to(group: Group, lambda: i64) -> Vec<IrrepLabel> {
    match group {
        Group::U1 => {
            let mut v = alloc::vec![IrrepLabel::u1(0)];
            for j in 1..=lambda {
                v.push(IrrepLabel::u1(j));
                v.push(IrrepLabel::u1(-j));
            }
            v
        }
        Group::SU2 => (1..=lambda).map(IrrepLabel::su2).collect(),
    }
}

/// Additive band unit: products of functions with units `u₁, u₂` have unit `≤ u₁ + u₂`.
/// U(1): the absolute frequency; SU(2): twice the spin, `n - 1`.
pub fn band_unit(group: Group, label: i64) -> usize {
    match group {
        Group::U1 => label.unsigned_abs() as usize,
        Group::SU2 => (label - 1).max(0) as usize,
    }
}

/// Inverse of [`band_unit`] for non-negative labels.
pub fn band_label(group: Group, unit: usize) -> i64 {
    match group {
        Group::U1 => unit as i64,
        Group::SU2 => unit as i64 + 1,
    }
}

/// Unit quaternion; `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes; the norm must be within 1e-6 of 1.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput("quaternion norm must be 1"));
        }
        Ok(Quat { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn mul(&self, o: &Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    pub fn inv(&self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// `exp(X)` for `X = Σ X_a τ_a`.
    pub fn exp(v: &Vec3) -> Quat {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r < 1e-300 {
            return Quat::IDENTITY;
        }
        let s = (0.5 * r).sin() / r;
        Quat { w: (0.5 * r).cos(), x: s * v[0], y: s * v[1], z: s * v[2] }
    }

    /// Principal logarithm, `|X| ∈ [0, 2π]`; the branch locus is `-1`.
    pub fn log(&self) -> Vec3 {
        let sv = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        let r = 2.0 * sv.atan2(self.w);
        if sv < 1e-300 {
            return [0.0; 3];
        }
        let f = r / sv;
        [f * self.x, f * self.y, f * self.z]
    }

    /// Rotation angle in `[0, 2π]`, equal to `|log g|`.
    pub fn angle(&self) -> f64 {
        let sv = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        2.0 * sv.atan2(self.w)
    }

    /// Principal square root `exp(log(g)/2)`.
    pub fn sqrt(&self) -> Quat {
        let l = self.log();
        Quat::exp(&[0.5 * l[0], 0.5 * l[1], 0.5 * l[2]])
    }

    /// `e^{-iα J_z} e^{-iβ J_y} e^{-iγ J_z}`.
    pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Quat {
        let qa = Quat { w: (0.5 * alpha).cos(), x: 0.0, y: 0.0, z: (0.5 * alpha).sin() };
        let qb = Quat { w: (0.5 * beta).cos(), x: 0.0, y: (0.5 * beta).sin(), z: 0.0 };
        let qg = Quat { w: (0.5 * gamma).cos(), x: 0.0, y: 0.0, z: (0.5 * gamma).sin() };
        qa.mul(&qb).mul(&qg)
    }

    /// ZYZ Euler angles `(α, β, γ)` with `α, γ` determined mod 4π jointly.
    ///
    /// At the poles (`β = 0` or `β = π`) the split is ambiguous; `γ = 0` is chosen.
    pub fn to_euler_zyz(&self) -> (f64, f64, f64) {
        let (a, b) = self.cayley_klein();
        let beta = 2.0 * b.norm().atan2(a.norm());
        let sum = if a.norm() > 1e-14 { -2.0 * a.arg() } else { 0.0 };
        let diff = if b.norm() > 1e-14 { -2.0 * (-b).arg() } else { 0.0 };
        if b.norm() <= 1e-14 {
            return (sum, beta, 0.0);
        }
        if a.norm() <= 1e-14 {
            return (diff, beta, 0.0);
        }
        (0.5 * (sum + diff), beta, 0.5 * (sum - diff))
    }

    /// `(a, b)` with `U = [[a, b], [-conj b, conj a]]`.
    pub fn cayley_klein(&self) -> (Complex64, Complex64) {
        (c(self.w, -self.z), c(-self.y, -self.x))
    }

    /// Fundamental 2×2 matrix.
    pub fn to_matrix(&self) -> CMat {
        let (a, b) = self.cayley_klein();
        DMatrix::from_row_slice(2, 2, &[a, b, -b.conj(), a.conj()])
    }

    /// Haar-uniform element from three uniforms in [0, 1) (Shoemake).
    pub fn from_uniform(u1: f64, u2: f64, u3: f64) -> Quat {
        let r1 = (1.0 - u1).sqrt();
        let r2 = u1.sqrt();
        let (t1, t2) = (2.0 * PI * u2, 2.0 * PI * u3);
        Quat { w: r2 * t2.cos(), x: r1 * t1.sin(), y: r1 * t1.cos(), z: r2 * t2.sin() }
    }

    /// Applies the rotation `Ad_g` to a vector of `g ≅ ℝ³`.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        let p = Quat { w: 0.0, x: v[0], y: v[1], z: v[2] };
        let r = self.mul(&p).mul(&self.inv());
        [r.x, r.y, r.z]
    }
}

/// A point of U(1) (angle reduced to [0, 2π)) or SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    U1(f64),
    SU2(Quat),
}

pub fn wrap_angle(phi: f64) -> f64 {
    let r = phi - 2.0 * PI * (phi / (2.0 * PI)).floor();
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Signed representative in `(-π, π]`.
pub fn principal_angle(phi: f64) -> f64 {
    let r = wrap_angle(phi);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

impl GroupElement {
    pub fn identity(group: Group) -> Self {
        match group {
            Group::U1 => GroupElement::U1(0.0),
            Group::SU2 => GroupElement::SU2(Quat::IDENTITY),
        }
    }

    pub fn group(&self) -> Group {
        match self {
            GroupElement::U1(_) => Group::U1,
            GroupElement::SU2(_) => Group::SU2,
        }
    }

    pub fn u1(phi: f64) -> Self {
        GroupElement::U1(wrap_angle(phi))
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        match (self, o) {
            (GroupElement::U1(a), GroupElement::U1(b)) => GroupElement::u1(a + b),
            (GroupElement::SU2(a), GroupElement::SU2(b)) => GroupElement::SU2(a.mul(b)),
            _ => panic!("mixed group product"),
        }
    }

    pub fn inv(&self) -> GroupElement {
        match self {
            GroupElement::U1(a) => GroupElement::u1(-a),
            GroupElement::SU2(q) => GroupElement::SU2(q.inv()),
        }
    }

    /// `exp(X)`; for U(1) only `X[0]` is used.
    pub fn exp(group: Group, v: &Vec3) -> GroupElement {
        match group {
            Group::U1 => GroupElement::u1(v[0]),
            Group::SU2 => GroupElement::SU2(Quat::exp(v)),
        }
    }

    /// Principal logarithm (U(1): angle in `(-π, π]`).
    pub fn log(&self) -> Vec3 {
        match self {
            GroupElement::U1(a) => [principal_angle(*a), 0.0, 0.0],
            GroupElement::SU2(q) => q.log(),
        }
    }

    /// Distance of the principal log to the branch locus `|X| = injectivity radius`.
    pub fn branch_distance(&self) -> f64 {
        let l = self.log();
        let r = (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]).sqrt();
        self.group().injectivity_radius() - r
    }

    /// Principal square root `exp(log(g)/2)`.
    pub fn sqrt(&self) -> GroupElement {
        let l = self.log();
        GroupElement::exp(self.group(), &[0.5 * l[0], 0.5 * l[1], 0.5 * l[2]])
    }
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        t.push(acc);
    }
    t
}

/// Wigner small-d element from `cos(β/2)`, `sin(β/2)` and doubled quantum numbers.
fn small_d(tj: i64, tmp: i64, tm: i64, cb: f64, sb: f64, lf: &[f64]) -> f64 {
    let jpm = ((tj + tm) / 2) as usize;
    let jmm = ((tj - tm) / 2) as usize;
    let jpmp = ((tj + tmp) / 2) as usize;
    let jmmp = ((tj - tmp) / 2) as usize;
    let dm = (tmp - tm) / 2;
    let pref = 0.5 * (lf[jpm] + lf[jmm] + lf[jpmp] + lf[jmmp]);
    let smin = 0.max(-dm);
    let smax = (jpm as i64).min(jmmp as i64);
    let mut acc = 0.0;
    for s in smin..=smax {
        let den = lf[(jpm as i64 - s) as usize]
            + lf[s as usize]
            + lf[(dm + s) as usize]
            + lf[(jmmp as i64 - s) as usize];
        let pcos = (tj - dm - 2 * s) as i32;
        let psin = (dm + 2 * s) as i32;
        let sign = if (dm + s).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        acc += sign * (pref - den).exp() * cb.powi(pcos) * sb.powi(psin);
    }
    acc
}

fn unit_phase(z: Complex64) -> Complex64 {
    let n = z.norm();
    if n < 1e-300 {
        c(1.0, 0.0)
    } else {
        z / n
    }
}

fn cpowi(z: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        z.powi(k as i32)
    } else {
        z.conj().powi((-k) as i32)
    }
}

/// Wigner-D matrix of spin `tj/2`, computed from the Cayley-Klein parameters.
///
/// `D_{m'm} = â^{m'+m} (-b̂)^{m'-m} d_{m'm}(β)` with `â = a/|a|`; all exponents are integers,
/// so no Euler-angle branch has to be chosen.
pub fn wigner_d(tj: i64, q: &Quat) -> CMat {
    let (a, b) = q.cayley_klein();
    let (cb, sb) = (a.norm(), b.norm());
    let (ah, bh) = (unit_phase(a), unit_phase(-b));
    let d = (tj + 1) as usize;
    let lf = ln_factorials(tj as usize + 1);
    let mut m = CMat::zeros(d, d);
    for r in 0..d {
        let tmp = tj - 2 * r as i64;
        for col in 0..d {
            let tm = tj - 2 * col as i64;
            let dv = small_d(tj, tmp, tm, cb, sb, &lf);
            if dv == 0.0 {
                continue;
            }
            let ph = cpowi(ah, (tmp + tm) / 2) * cpowi(bh, (tmp - tm) / 2);
            m[(r, col)] = ph * dv;
        }
    }
    m
}

/// Column `col` of [`wigner_d`], at `O(d²)` instead of `O(d³)`.
pub fn wigner_d_column(tj: i64, q: &Quat, col: usize) -> DVector<Complex64> {
    let (a, b) = q.cayley_klein();
    let (cb, sb) = (a.norm(), b.norm());
    let (ah, bh) = (unit_phase(a), unit_phase(-b));
    let d = (tj + 1) as usize;
    let lf = ln_factorials(tj as usize + 1);
    let tm = tj - 2 * col as i64;
    DVector::from_fn(d, |r, _| {
        let tmp = tj - 2 * r as i64;
        let dv = small_d(tj, tmp, tm, cb, sb, &lf);
        if dv == 0.0 {
            c(0.0, 0.0)
        } else {
            cpowi(ah, (tmp + tm) / 2) * cpowi(bh, (tmp - tm) / 2) * dv
        }
    })
}

/// Wigner small-d matrix `d^j(β)` in the weight basis.
pub fn wigner_small_d(tj: i64, beta: f64) -> DMatrix<f64> {
    let d = (tj + 1) as usize;
    let lf = ln_factorials(tj as usize + 1);
    let (cb, sb) = ((0.5 * beta).cos(), (0.5 * beta).sin());
    DMatrix::from_fn(d, d, |r, col| {
        small_d(tj, tj - 2 * r as i64, tj - 2 * col as i64, cb, sb, &lf)
    })
}

/// `π(g)`; unitary, `π(gh) = π(g)π(h)`.
pub fn rep_matrix(pi: &IrrepLabel, g: &GroupElement) -> CMat {
    match (pi.group, g) {
        (Group::U1, GroupElement::U1(phi)) => {
            let th = pi.label as f64 * phi;
            CMat::from_element(1, 1, c(th.cos(), th.sin()))
        }
        (Group::SU2, GroupElement::SU2(q)) => wigner_d(pi.two_j(), q),
        _ => panic!("irrep and element belong to different groups"),
    }
}

/// Angular momentum matrices `(J_x, J_y, J_z)` for spin `tj/2` (Condon-Shortley).
pub fn angular_momentum(tj: i64) -> [CMat; 3] {
    let d = (tj + 1) as usize;
    let j = tj as f64 / 2.0;
    let mut jp = CMat::zeros(d, d);
    let mut jz = CMat::zeros(d, d);
    for r in 0..d {
        let m = j - r as f64;
        jz[(r, r)] = c(m, 0.0);
        if r >= 1 {
            // <m+1| J_+ |m>, row r-1 has weight m+1.
            jp[(r - 1, r)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    [jx, jy, jz]
}

/// `dπ(X)` (anti-Hermitian).
pub fn dpi(pi: &IrrepLabel, x: &Vec3) -> CMat {
    match pi.group {
        Group::U1 => CMat::from_element(1, 1, c(0.0, pi.label as f64 * x[0])),
        Group::SU2 => {
            let [jx, jy, jz] = angular_momentum(pi.two_j());
            (jx * c(x[0], 0.0) + jy * c(x[1], 0.0) + jz * c(x[2], 0.0)) * c(0.0, -1.0)
        }
    }
}

/// Chebyshev `U_{n-1}(w) = sin(nψ)/sin ψ` with `w = cos ψ`; entire in `w`.
pub fn chebyshev_u(n: i64, w: Complex64) -> Complex64 {
    if n <= 0 {
        return c(0.0, 0.0);
    }
    let mut u0 = c(1.0, 0.0);
    if n == 1 {
        return u0;
    }
    let mut u1 = w * 2.0;
    for _ in 2..n {
        let u2 = w * 2.0 * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// Character `χ_π(g) = tr π(g)`.
pub fn character(pi: &IrrepLabel, g: &GroupElement) -> Complex64 {
    match (pi.group, g) {
        (Group::U1, GroupElement::U1(phi)) => {
            let th = pi.label as f64 * phi;
            c(th.cos(), th.sin())
        }
        (Group::SU2, GroupElement::SU2(q)) => chebyshev_u(pi.label, c(q.w, 0.0)),
        _ => panic!("irrep and element belong to different groups"),
    }
}

/// Analytic continuation of an SU(2) character to `SL(2,ℂ)`, given the half trace
/// `w = tr(M)/2 = cos ψ`: `χ_n = sin(nψ)/sin ψ`. The removable singularity at `sin ψ = 0`
/// is absent because the Chebyshev recurrence is polynomial in `w`.
pub fn character_su2_c(n: i64, half_trace: Complex64) -> Complex64 {
    chebyshev_u(n, half_trace)
}

/// `χ_n(e^{2iH})` for `H = p τ_z`-type imaginary arguments; equals `sinh(np)/sinh(p)` with `p = |H|`... in
/// the crate's normalization the half trace is `cosh p`.
pub fn character_su2_imag(n: i64, p: f64) -> f64 {
    chebyshev_u(n, c(p.cosh(), 0.0)).re
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j3 m3>` (Condon-Shortley) for half-integer arguments.
pub fn clebsch_gordan(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    let dbl = |x: f64| -> Result<i64> {
        let t = 2.0 * x;
        if (t - t.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput("quantum numbers must be half-integers"));
        }
        Ok(t.round() as i64)
    };
    clebsch_gordan_2(dbl(j1)?, dbl(j2)?, dbl(j3)?, dbl(m1)?, dbl(m2)?, dbl(m3)?)
}

/// Clebsch-Gordan coefficient with doubled arguments (`tj = 2j`, `tm = 2m`).
pub fn clebsch_gordan_2(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, tm3: i64) -> Result<f64> {
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tj < 0 || tm.abs() > tj || (tj + tm) % 2 != 0 {
            return Err(Error::InvalidInput("invalid (j, m) pair"));
        }
    }
    if tm3 != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() || (tj1 + tj2 + tj3) % 2 != 0 {
        return Ok(0.0);
    }
    let h = |x: i64| (x / 2) as usize;
    let lf = ln_factorials(((tj1 + tj2 + tj3) / 2 + 1) as usize);
    let a = h(tj1 + tj2 - tj3);
    let b = h(tj1 - tj2 + tj3);
    let cc = h(-tj1 + tj2 + tj3);
    let tri = lf[a] + lf[b] + lf[cc] - lf[h(tj1 + tj2 + tj3) + 1];
    let pre = 0.5
        * (((tj3 + 1) as f64).ln()
            + tri
            + lf[h(tj1 + tm1)]
            + lf[h(tj1 - tm1)]
            + lf[h(tj2 + tm2)]
            + lf[h(tj2 - tm2)]
            + lf[h(tj3 + tm3)]
            + lf[h(tj3 - tm3)]);
    let kmin = 0.max((tj2 - tj3 - tm1) / 2).max((tj1 - tj3 + tm2) / 2);
    let kmax = (a as i64).min(h(tj1 - tm1) as i64).min(h(tj2 + tm2) as i64);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = lf[k as usize]
            + lf[(a as i64 - k) as usize]
            + lf[(h(tj1 - tm1) as i64 - k) as usize]
            + lf[(h(tj2 + tm2) as i64 - k) as usize]
            + lf[((tj3 - tj2 + tm1) / 2 + k) as usize]
            + lf[((tj3 - tj1 - tm2) / 2 + k) as usize];
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (pre - den).exp();
    }
    Ok(sum)
}

/// Haar quadrature on U(1) or SU(2) with unit total mass.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub group: Group,
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
    /// U(1): exact for `e^{ikφ}`, `|k| ≤ 2·degree`; SU(2): exact for every matrix element of
    /// `π ⊗ π̄'` with `n, n' ≤ degree`.
    pub exactness_degree: usize,
    /// Exact for every function whose Peter-Weyl content has [`band_unit`] at most this.
    pub content: usize,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// U(1) grid with `n` uniform nodes; exact for frequencies `|k| < n`.
    pub fn u1_uniform(n: usize) -> Quadrature {
        let nodes = (0..n).map(|k| GroupElement::U1(2.0 * PI * k as f64 / n as f64)).collect();
        Quadrature {
            group: Group::U1,
            nodes,
            weights: alloc::vec![1.0 / n as f64; n],
            exactness_degree: (n - 1) / 2,
            content: n - 1,
        }
    }

    /// SU(2) product rule exact for all functions whose Peter-Weyl content has spin
    /// `≤ two_j_total / 2`.
    ///
    /// Nodes are Hopf coordinates `a = cos(β/2) e^{iu}`, `-b = sin(β/2) e^{iv}` in which
    /// `D^j_{m'm} = e^{i(m'+m)u} e^{i(m'-m)v} d^j_{m'm}(β)` has integer frequencies.
    pub fn su2_for_spin(two_j_total: usize) -> Quadrature {
        let nu = two_j_total + 1;
        let kb = two_j_total / 4 + 1;
        let (xs, ws) = gauss_legendre(kb);
        let mut nodes = Vec::with_capacity(kb * nu * nu);
        let mut weights = Vec::with_capacity(kb * nu * nu);
        for (x, wx) in xs.iter().zip(&ws) {
            let cb = (0.5 * (1.0 + x)).sqrt();
            let sb = (0.5 * (1.0 - x)).sqrt();
            for iu in 0..nu {
                let u = 2.0 * PI * iu as f64 / nu as f64;
                for iv in 0..nu {
                    let v = 2.0 * PI * iv as f64 / nu as f64;
                    let a = c(cb * u.cos(), cb * u.sin());
                    let b = -c(sb * v.cos(), sb * v.sin());
                    // a = w - i z, b = -y - i x.
                    let q = Quat { w: a.re, x: -b.im, y: -b.re, z: -a.im };
                    nodes.push(GroupElement::SU2(q));
                    weights.push(0.5 * wx / (nu * nu) as f64);
                }
            }
        }
        Quadrature {
            group: Group::SU2,
            nodes,
            weights,
            exactness_degree: two_j_total / 2 + 1,
            content: two_j_total,
        }
    }

    /// Smallest rule of this crate that is exact for content `unit` (see [`band_unit`]).
    ///
    /// The content is rounded up to even, which makes the number of uniform angles odd;
    /// then no two nodes differ by the central element `-1`.
    pub fn exact_for(group: Group, unit: usize) -> Quadrature {
        let unit = unit + unit % 2;
        match group {
            Group::U1 => Quadrature::u1_uniform(unit + 1),
            Group::SU2 => Quadrature::su2_for_spin(unit),
        }
    }
}

/// Haar quadrature exact to the given degree (see [`Quadrature::exactness_degree`]).
pub fn group_quadrature(group: Group, degree: usize) -> Result<Quadrature> {
    if degree < 1 {
        return Err(Error::InvalidInput("quadrature degree must be >= 1"));
    }
    match group {
        Group::U1 => {
            if degree > MAX_U1_DEGREE {
                return Err(Error::Resource {
                    what: "U(1) quadrature degree",
                    requested: degree,
                    max: MAX_U1_DEGREE,
                });
            }
            Ok(Quadrature::u1_uniform(2 * degree + 1))
        }
        Group::SU2 => {
            if degree > MAX_SU2_DEGREE {
                return Err(Error::Resource {
                    what: "SU(2) quadrature degree",
                    requested: degree,
                    max: MAX_SU2_DEGREE,
                });
            }
            let mut q = Quadrature::su2_for_spin(2 * (degree - 1));
            q.exactness_degree = degree;
            Ok(q)
        }
    }
}

/// `∏_{l=1}^{k} l(λ + 1 - l)`: squared norm of `f^k v_λ` in the sl₂ Verma module.
pub fn verma_norm_sq(lambda: f64, k: u32) -> f64 {
    (1..=k).map(|l| l as f64 * (lambda + 1.0 - l as f64)).product()
}
