//! Calculus of equivariant symbols on the Bohr compactification of ℝ.

use num_complex::Complex64;
use qg_core::bohrcalc::{
    apply_kernel_norm_check, apply_symbol, asymptotic_product, discrete_taylor, formal_adjoint, sobolev_bound_check,
    twisted_product, BohrSymbol, FiniteSupportFn, Kernel, RationalLattice, SymbolOrder,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{crand, rng};
use crate::config::RunConfig;
use crate::report::{Check, Report};

/// Random pairs for the product, adjoint and lattice checks.
pub const PAIRS: usize = 20;
/// Random states for the Young and Sobolev bounds.
pub const STATES: usize = 50;

/// Semiclassical parameter of the exact checks (a power of two, so lattice shifts stay exact).
pub const EPS: f64 = 0.125;

/// `p/q` spacing with `p, q ≤ 4` and an offset `k/5`.
pub fn random_lattice(r: &mut ChaCha8Rng) -> RationalLattice {
    let p = r.gen_range(1..=4) as f64;
    let q = r.gen_range(1..=4) as f64;
    let k = r.gen_range(0..5) as f64;
    RationalLattice::new(p / q, k / 5.0).expect("positive spacing")
}

/// Three terms on `lattice` with quadratic coefficients `a + bλ + cλ²`.
pub fn random_symbol(lattice: RationalLattice, r: &mut ChaCha8Rng) -> BohrSymbol {
    let mut s = BohrSymbol::new().with_lattice(lattice);
    let mut used = Vec::new();
    while used.len() < 3 {
        let n = r.gen_range(-3..=3);
        if used.contains(&n) {
            continue;
        }
        used.push(n);
        let (a, b, c) = (crand(r), crand(r), crand(r));
        s = s.with_term(-lattice.point(n), move |l| a + b * l + c * l * l);
    }
    s
}

/// Random state on nine consecutive points of `lattice`.
pub fn random_state(lattice: RationalLattice, r: &mut ChaCha8Rng) -> FiniteSupportFn {
    let lo = r.gen_range(-6..=-2);
    FiniteSupportFn::from_pairs((lo..lo + 9).map(|n| (lattice.point(n), crand(r))))
}

fn sup(f: &FiniteSupportFn) -> f64 {
    f.iter().fold(0.0, |m: f64, (_, v)| m.max(v.norm()))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `(product, adjoint, lattice)` residuals for one random pair; `lattice` is 0 when every
/// arithmetic identity holds and 1 otherwise.
fn pair_checks(r: &mut ChaCha8Rng) -> qg_core::Result<(f64, f64, f64, f64)> {
    let (ls, lt, lphi) = (random_lattice(r), random_lattice(r), random_lattice(r));
    let (s, t) = (random_symbol(ls, r), random_symbol(lt, r));
    let phi = random_state(lphi, r);

    let lhs = apply_symbol(&twisted_product(&s, &t, EPS), &phi, EPS);
    let rhs = apply_symbol(&s, &apply_symbol(&t, &phi, EPS), EPS);
    let product = lhs.max_abs_diff(&rhs) / sup(&rhs).max(1.0);

    let a_phi = apply_symbol(&s, &phi, EPS);
    let psi = a_phi.add(&random_state(lphi, r));
    let x = a_phi.inner(&psi);
    let y = phi.inner(&apply_symbol(&formal_adjoint(&s), &psi, EPS));
    let adjoint = (x - y).norm() / x.norm().max(1.0);

    let samples = [-1.5, -0.25, 0.0, 0.6, 1.75];
    let asym = asymptotic_product(&s, &t, EPS, 4)?;
    let exact = twisted_product(&s, &t, EPS);
    let scale = samples.iter().fold(1.0f64, |m, &l| exact.terms.iter().fold(m, |m, (_, f)| m.max(f(l).norm())));
    let newton = asym.max_hat_diff(&exact, &samples) / scale;

    let sum = ls.sum(&lt)?;
    let mut ok = true;
    let mut g = 0;
    let base = sum.index(ls.point(0) + lt.point(0));
    for n in -5..=5 {
        for m in -5..=5 {
            match (sum.index(ls.point(n) + lt.point(m)), base) {
                (Some(k), Some(b)) => g = gcd(g, k - b),
                _ => ok = false,
            }
        }
    }
    ok &= g == 1;
    // λ = λ' - εν with -ν ∈ L_σ, so the output lives on L_Φ + εL_σ.
    let support = lphi.sum(&ls.scaled(EPS)?)?;
    ok &= a_phi.support().iter().all(|&l| support.contains(l));
    let freq = ls.sum(&lt)?;
    ok &= exact.frequencies().iter().all(|&nu| freq.contains(-nu));
    Ok((product, adjoint, newton, if ok { 0.0 } else { 1.0 }))
}

/// Worst `‖K_h Φ‖_p / (C₁^{1/q} C₂^{1/p} ‖Φ‖_p)` over one random kernel and state.
fn young_ratio(r: &mut ChaCha8Rng) -> qg_core::Result<f64> {
    let lat = random_lattice(r);
    let mut h: Kernel = Vec::new();
    for _ in 0..30 {
        h.push((lat.point(r.gen_range(-8..=8)), lat.point(r.gen_range(-8..=8)), crand(r)));
    }
    let phi = FiniteSupportFn::from_pairs((-8..=8).map(|n| (lat.point(n), crand(r))));
    let mut worst: f64 = 0.0;
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        let (lhs, rhs) = apply_kernel_norm_check(&h, &phi, p)?;
        worst = worst.max(lhs / rhs);
    }
    Ok(worst)
}

/// Smooth order-0 symbol with Gaussian coefficients.
fn sobolev_symbol(lat: RationalLattice, r: &mut ChaCha8Rng) -> BohrSymbol {
    let mut s = BohrSymbol::new().with_lattice(lat).with_order(SymbolOrder { m: 0.0, rho: 1.0, delta: 0.0 });
    for n in -2..=2 {
        let (a, c) = (crand(r), r.gen_range(-2.0..2.0));
        s = s.with_term(-lat.point(n), move |l: f64| a * (-(l - c) * (l - c) / 4.0).exp());
    }
    s
}

/// Newton-series checks: exactness on cubics, and the excess of the `sin` remainder over its
/// bound (the bound vanishes for `|k| ≤ N`, where the series is exact).
fn newton_checks(r: &mut ChaCha8Rng) -> qg_core::Result<(f64, f64)> {
    let (a, b, c, d) = (crand(r), crand(r), crand(r), crand(r));
    let cubic = move |l: f64| a + b * l + c * l * l + d * l * l * l;
    let h = 0.5 / r.gen_range(1..=4) as f64;
    let k = r.gen_range(-6..=6) as f64;
    let l = r.gen_range(-1.0..1.0);
    let e = discrete_taylor(cubic, l, k * h, h, 3)?;
    let exact = e.remainder.norm() / cubic(l + k * h).norm().max(1.0);
    let s = discrete_taylor(|x| Complex64::new(x.sin(), 0.0), l, k * h, h, 2)?;
    Ok((exact, s.remainder.norm() - s.bound))
}

/// Exact identities of the calculus, lattice arithmetic and the `L^p` bounds.
pub fn bohr_props(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("bohr_props", cfg.seed);
    let tol = cfg.tol_or(1e-13);
    rep.param("eps", crate::report::num(EPS));
    let mut r = rng(cfg.seed, 2000);
    let (mut product, mut adjoint, mut newton, mut lattice, mut exact) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut rem = f64::NEG_INFINITY;
    for _ in 0..PAIRS {
        match pair_checks(&mut r).and_then(|p| newton_checks(&mut r).map(|n| (p, n))) {
            Ok(((a, b, c, d), (e, f))) => {
                product = product.max(a);
                adjoint = adjoint.max(b);
                newton = newton.max(c);
                lattice = lattice.max(d);
                exact = exact.max(e);
                rem = rem.max(f);
            }
            Err(e) => rep.errors.push(e.to_string()),
        }
    }
    rep.check(Check::below("twisted product vs composition", product, tol));
    rep.check(Check::below("formal adjoint", adjoint, tol));
    rep.check(Check::below("newton series exact on cubics", exact, 1e-12));
    rep.check(Check::below("newton remainder minus bound", rem, 1e-12));
    rep.check(Check::below("asymptotic product exact on quadratics", newton, 1e-12));
    rep.check(Check::below("lattice arithmetic failures", lattice, 0.5));
    let mut young: f64 = 0.0;
    let mut sob: f64 = 0.0;
    for _ in 0..STATES {
        match young_ratio(&mut r) {
            Ok(v) => young = young.max(v),
            Err(e) => rep.errors.push(e.to_string()),
        }
        let lat = random_lattice(&mut r);
        let s = sobolev_symbol(lat, &mut r);
        let window: Vec<f64> = (-20..=20).map(|n| lat.point(n)).collect();
        let state = FiniteSupportFn::from_pairs(window.iter().map(|&l| (l, crand(&mut r))));
        for p in [1.0, 2.0, f64::INFINITY] {
            match sobolev_bound_check(&s, EPS, 1.0, 0.5, p, &window, std::slice::from_ref(&state)) {
                Ok(v) => sob = sob.max(v.empirical / v.theoretical),
                Err(e) => rep.errors.push(e.to_string()),
            }
        }
    }
    rep.check(Check::below("young ratio", young, 1.0 + 1e-12));
    rep.check(Check::below("sobolev ratio", sob, 1.0 + 1e-12));
    rep
}
