//! One-dimensional quadrature: Gauss-Legendre nodes and adaptive Gauss-Kronrod.

use alloc::vec::Vec;
use num_complex::Complex64;
// Needed for float methods without std; unused when feature unification links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials of degree 2k-1.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; k];
    let mut w = alloc::vec![0.0; k];
    let kf = k as f64;
    for i in 0..(k + 1) / 2 {
        // Tricomi initial guess, then Newton on P_k.
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(k, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_pair(k, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    if k % 2 == 1 {
        x[k / 2] = 0.0;
    }
    (x, w)
}

/// (P_k(z), P_k'(z)) by the three-term recurrence.
fn legendre_pair(k: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += s * WGK[j];
        if j % 2 == 1 {
            rg += s * WG[j / 2];
        }
    }
    ((rk * h), ((rk - rg) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) integral of a complex integrand over [a, b].
///
/// Subintervals are bisected until the Kronrod-Gauss difference falls below
/// `max(abs_tol, rel_tol |I|)`; the nodes never include the endpoints.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    let (whole, err0) = gk15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, Complex64, f64)> = alloc::vec![(a, b, whole, err0)];
    for _ in 0..4000 {
        let total: Complex64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (l, r, _, _) = parts.swap_remove(idx);
        let m = 0.5 * (l + r);
        let (v1, e1) = gk15(&mut f, l, m);
        let (v2, e2) = gk15(&mut f, m, r);
        parts.push((l, m, v1, e1));
        parts.push((m, r, v2, e2));
    }
    let total: Complex64 = parts.iter().map(|p| p.2).sum();
    let err: f64 = parts.iter().map(|p| p.3).sum();
    Err(Error::NoConvergence { achieved: err, target: abs_tol.max(rel_tol * total.norm()) })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol).map(|(v, e)| (v.re, e))
}

/// Pairwise summation; order-deterministic and O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let m = xs.len() / 2;
    pairwise_sum(&xs[..m]) + pairwise_sum(&xs[m..])
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
