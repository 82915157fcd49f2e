//! KN calculus properties, Weyl reality and the semiclassical order fit.

use std::sync::Arc;

use qg_core::gweyl::local::{semiclassical_order_fit, LocalSymbol, Poly, Variant};
use qg_core::gweyl::{kn_adjoint, kn_compose, kn_quantize, kn_symbol, symbol_grid, weyl_quantize, MatrixSymbol};
use qg_core::pw::PwBasis;
use qg_core::repgroup::{band_label, band_unit, irreps_up_to, CMat, Group, Quadrature};
use rand_chacha::ChaCha8Rng;

use super::{crand, random_band_fn, random_element, rng};
use crate::config::RunConfig;
use crate::report::{num, Check, Report};

/// Number of random pairs per group.
pub const PAIRS: usize = 20;

/// Symbol band per group: U(1) `|j| ≤ 16`, SU(2) dimension `≤ 4`.
pub fn default_band(group: Group) -> i64 {
    match group {
        Group::U1 => 16,
        Group::SU2 => 4,
    }
}

/// `g`-band of the random symbols.
pub const G_BAND: i64 = 2;

fn group_name(g: Group) -> &'static str {
    match g {
        Group::U1 => "U1",
        Group::SU2 => "SU2",
    }
}

/// Random symbol with `g`-dependence in band [`G_BAND`].
pub fn random_symbol(group: Group, band: i64, grid: Arc<Quadrature>, r: &mut ChaCha8Rng) -> MatrixSymbol {
    let gb = PwBasis::new(group, G_BAND);
    let cs: Vec<Vec<_>> = irreps_up_to(group, band)
        .iter()
        .map(|pi| (0..pi.dim() * pi.dim() * gb.len).map(|_| crand(r)).collect())
        .collect();
    let pw = PwBasis::new(group, band);
    MatrixSymbol::from_fn(group, band, G_BAND, grid, |pi, g| {
        let k = pw.irrep_index(pi).expect("irrep in band");
        let d = pi.dim();
        let bv = gb.eval_all(g);
        CMat::from_fn(d, d, |a, b| (0..gb.len).map(|l| cs[k][(a * d + b) * gb.len + l] * bv[l]).sum())
    })
}

fn amax(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Residuals of the seven KN properties for one random pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct KnResiduals {
    pub identity: f64,
    pub adjoint: f64,
    pub left_cov: f64,
    pub right_cov: f64,
    pub hs_pairing: f64,
    pub compose: f64,
    pub extraction: f64,
}

impl KnResiduals {
    fn max(self, o: KnResiduals) -> KnResiduals {
        KnResiduals {
            identity: self.identity.max(o.identity),
            adjoint: self.adjoint.max(o.adjoint),
            left_cov: self.left_cov.max(o.left_cov),
            right_cov: self.right_cov.max(o.right_cov),
            hs_pairing: self.hs_pairing.max(o.hs_pairing),
            compose: self.compose.max(o.compose),
            extraction: self.extraction.max(o.extraction),
        }
    }
}

/// All seven KN properties on one random pair.
pub fn kn_pair(group: Group, band: i64, r: &mut ChaCha8Rng) -> qg_core::Result<KnResiduals> {
    let op_band = band_label(group, band_unit(group, band) + band_unit(group, G_BAND));
    let grid = symbol_grid(group, op_band, G_BAND);
    let sa = random_symbol(group, band, grid.clone(), r);
    let sb = random_symbol(group, band, grid.clone(), r);
    let a = kn_quantize(&sa, op_band)?;
    let b = kn_quantize(&sb, op_band)?;
    let mut out = KnResiduals::default();

    let id = kn_quantize(&MatrixSymbol::identity(group, band, grid.clone()), op_band)?;
    let nb = PwBasis::new(group, band).len;
    let mut proj = CMat::zeros(id.matrix.nrows(), id.matrix.ncols());
    for i in 0..nb {
        proj[(i, i)] = 1.0.into();
    }
    out.identity = amax(&(&id.matrix - proj));

    out.extraction = sa.max_abs_diff(&kn_symbol(&a, grid.clone()));
    out.adjoint = kn_adjoint(&sa)?.max_abs_diff(&kn_symbol(&a.adjoint(), grid.clone()));

    let basis = PwBasis::new(group, op_band);
    let k = random_element(group, r);
    let t = basis.left_shift(&k);
    let ti = basis.left_shift(&k.inv());
    let moved = kn_symbol(&qg_core::gweyl::TruncatedOperator { group, band: op_band, matrix: &t * &a.matrix * &ti }, grid.clone());
    let fa = sa.interpolant()?;
    let pred = MatrixSymbol::from_fn(group, band, G_BAND, grid.clone(), |pi, g| {
        let p = qg_core::repgroup::rep_matrix(pi, &k);
        p.adjoint() * fa.eval(pi, &k.mul(g)).expect("grid checked") * p
    });
    out.left_cov = pred.max_abs_diff(&moved);

    let h = random_element(group, r);
    let rs = basis.right_shift(&h);
    let rsi = basis.right_shift(&h.inv());
    let moved = kn_symbol(&qg_core::gweyl::TruncatedOperator { group, band: op_band, matrix: &rs * &a.matrix * &rsi }, grid.clone());
    let pred = MatrixSymbol::from_fn(group, band, G_BAND, grid.clone(), |pi, g| fa.eval(pi, &g.mul(&h)).expect("grid checked"));
    out.right_cov = pred.max_abs_diff(&moved);

    let tr = (a.matrix.adjoint() * &b.matrix).trace();
    out.hs_pairing = (tr - sa.hs_pairing(&sb)).norm() / tr.norm().max(1.0);

    let big = band_label(group, band_unit(group, band) + 2 * band_unit(group, G_BAND));
    let grid2 = symbol_grid(group, big, band_label(group, 2 * band_unit(group, G_BAND) + 2 * band_unit(group, band)));
    let (sa2, sb2) = (sa.resample(grid2.clone())?, sb.resample(grid2.clone())?);
    let cm = kn_compose(&sa2, &sb2)?;
    let ab = kn_quantize(&sa2, big)?.compose(&kn_quantize(&sb2, big)?);
    out.compose = cm.max_abs_diff(&kn_symbol(&ab, grid2));
    Ok(out)
}

/// Seven KN properties on [`PAIRS`] random pairs for U(1) and SU(2).
pub fn kn_props(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("kn_props", cfg.seed);
    let tol = cfg.tol_or(1e-9);
    rep.param("pairs", PAIRS.into());
    rep.param("g_band", G_BAND.into());
    for (gi, group) in [Group::U1, Group::SU2].into_iter().enumerate() {
        let band = match (group, cfg.n) {
            (Group::SU2, Some(n)) => n,
            _ => default_band(group),
        };
        rep.param(&format!("band_{}", group_name(group)), band.into());
        let res: Vec<_> = {
            use rayon::prelude::*;
            (0..PAIRS)
                .into_par_iter()
                .map(|i| kn_pair(group, band, &mut rng(cfg.seed, 100 + 100 * gi as u64 + i as u64)))
                .collect()
        };
        let mut worst = KnResiduals::default();
        for r in res {
            match r {
                Ok(r) => worst = worst.max(r),
                Err(e) => rep.errors.push(format!("{}: {e}", group_name(group))),
            }
        }
        let g = group_name(group);
        rep.check(Check::below(format!("{g} identity"), worst.identity, tol));
        rep.check(Check::below(format!("{g} adjoint"), worst.adjoint, tol));
        rep.check(Check::below(format!("{g} left covariance"), worst.left_cov, tol));
        rep.check(Check::below(format!("{g} right covariance"), worst.right_cov, tol));
        rep.check(Check::below(format!("{g} HS pairing"), worst.hs_pairing, tol));
        rep.check(Check::below(format!("{g} composition"), worst.compose, tol));
        rep.check(Check::below(format!("{g} extraction"), worst.extraction, tol));
    }
    rep
}

/// `Op^W(σ)* = Op^W(σ*)` on [`PAIRS`] random symbols per group.
pub fn weyl_reality(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("weyl_reality", cfg.seed);
    let tol = cfg.tol_or(1e-9);
    for (gi, group) in [Group::U1, Group::SU2].into_iter().enumerate() {
        let band = match group {
            Group::U1 => 8,
            Group::SU2 => 3,
        };
        rep.param(&format!("band_{}", group_name(group)), band.into());
        let op_band = band_label(group, band_unit(group, band) + band_unit(group, G_BAND));
        let grid = symbol_grid(group, op_band, G_BAND);
        let res: Vec<_> = {
            use rayon::prelude::*;
            (0..PAIRS)
                .into_par_iter()
                .map(|i| {
                    let s = random_symbol(group, band, grid.clone(), &mut rng(cfg.seed, 500 + 100 * gi as u64 + i as u64));
                    let w = weyl_quantize(&s, op_band)?;
                    let ws = weyl_quantize(&s.adjoint_pointwise(), op_band)?;
                    Ok::<f64, qg_core::Error>(amax(&(w.adjoint().matrix - ws.matrix)))
                })
                .collect()
        };
        let mut worst: f64 = 0.0;
        for r in res {
            match r {
                Ok(v) => worst = worst.max(v),
                Err(e) => rep.errors.push(format!("{}: {e}", group_name(group))),
            }
        }
        rep.check(Check::below(format!("{} weyl reality", group_name(group)), worst, tol));
    }
    rep
}

/// Real `g`-band-2 constant term plus conjugate-paired lattice momenta.
pub fn test_local_symbol(group: Group, r: &mut ChaCha8Rng) -> qg_core::Result<LocalSymbol> {
    let mut sym = LocalSymbol::new(group, 1.0)?;
    let f = random_band_fn(group, 2, r);
    sym.add_term([0; 3], Poly::Const, f.add(&f.conj()).scale(0.5.into()))?;
    let dirs: Vec<[i64; 3]> = match group {
        Group::U1 => vec![[1, 0, 0], [2, 0, 0]],
        Group::SU2 => vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    };
    for d in dirs {
        let f = random_band_fn(group, 2, r);
        sym.add_term(d, Poly::Const, f.clone())?;
        sym.add_term([-d[0], -d[1], -d[2]], Poly::Const, f.conj())?;
    }
    Ok(sym)
}

/// Default `ε` ladder.
pub const EPS_LIST: [f64; 4] = [0.25, 0.125, 0.0625, 0.03125];

/// Log-log slopes of the Moyal (`O(ε²)`) and Dirac (`O(ε)`) residuals under Weyl quantization.
///
/// The Dirac residual of the Weyl calculus is `O(ε²)`, so its slope check is reported as a
/// known deviation and does not fail the report.
pub fn moyal_fit(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("moyal_fit", cfg.seed);
    let eps = cfg.eps_list.clone().unwrap_or_else(|| EPS_LIST.to_vec());
    rep.param("eps", serde_json::Value::Array(eps.iter().map(|&e| num(e)).collect()));
    for (gi, group) in [Group::U1, Group::SU2].into_iter().enumerate() {
        let mut r = rng(cfg.seed, 900 + gi as u64);
        let in_band = match group {
            Group::U1 => 4,
            Group::SU2 => 2,
        };
        let fit = test_local_symbol(group, &mut r)
            .and_then(|s| test_local_symbol(group, &mut r).map(|t| (s, t)))
            .and_then(|(s, t)| semiclassical_order_fit(&s, &t, &eps, Variant::Weyl, in_band));
        let g = group_name(group);
        match fit {
            Ok(f) => {
                rep.check(Check::within(format!("{g} moyal slope"), f.moyal_slope, 2.0, 0.2));
                rep.check(Check::within(format!("{g} dirac slope"), f.dirac_slope, 1.0, 0.2).known_deviation());
            }
            Err(e) => rep.errors.push(format!("{g}: {e}")),
        }
    }
    rep
}
