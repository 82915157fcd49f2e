//! Resolution-of-unity integrals, the Schur property and theta-function identities.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use qg_core::heatcs::{
    resolution_constant_u1, resolution_constant_u1_shifted, resolution_integral_su2,
    resolution_integral_su2_fixed, resolution_integral_su2_law, schur_residual_su2, schur_trace_radial,
    theta3_dz, theta3_series, AlgebraQuad,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{num, Check, Report, Table};

/// Heat times of the published `I(t, n)` table.
pub const TABLE1_T: [f64; 5] = [1.0, 2.0, E, PI, 4.0];

/// Published `I(t, n)` for `n = 1..=5`, rows in the order of [`TABLE1_T`].
pub const TABLE1: [[f64; 5]; 5] = [
    [0.125, 0.25, 0.375, 0.5, 0.625],
    [1.0, 2.0, 3.0, 4.0, 5.0],
    [2.51069, 5.02138, 7.53208, 10.0428, 12.5535],
    [3.87578, 7.75157, 11.6274, 15.5031, 19.3789],
    [8.0, 16.0, 24.0, 32.0, 40.0],
];

/// Rows whose published values are exact rather than rounded (`t = 1, 2, 4`).
pub const TABLE1_EXACT_ROWS: [usize; 3] = [0, 1, 4];

/// Tolerance for exact-looking cells.
pub const EXACT_CELL_TOL: f64 = 1e-6;

fn label_t(t: f64) -> String {
    if t == E {
        "e".into()
    } else if t == PI {
        "pi".into()
    } else {
        format!("{t}")
    }
}

/// `I(t, n)` against the published table (or the law `t³n/8` off the table grid).
///
/// Columns: `t, n, I, expected, rel_err, tol`.
pub fn table1(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("table1", cfg.seed);
    let tol = cfg.tol_or(2e-3);
    let mut cells: Vec<(f64, i64, Option<(usize, usize)>)> = Vec::new();
    for (ti, &t) in TABLE1_T.iter().enumerate() {
        for n in 1..=5 {
            cells.push((t, n, Some((ti, n as usize - 1))));
        }
    }
    if cfg.t.is_some() || cfg.n.is_some() {
        let t = cfg.t.unwrap_or(1.0);
        let n = cfg.n.unwrap_or(1);
        let hit = TABLE1_T.iter().position(|&x| (x - t).abs() < 1e-12).filter(|_| (1..=5).contains(&n));
        cells = vec![(t, n, hit.map(|ti| (ti, n as usize - 1)))];
    }
    rep.param("tol", num(tol));
    rep.param("exact_cell_tol", num(EXACT_CELL_TOL));
    match cfg.quad_degree {
        Some(q) => rep.param("quadrature", serde_json::json!({ "gauss_legendre_nodes": q })),
        None => rep.param("quadrature", serde_json::json!("adaptive")),
    }
    let values: Vec<_> = cells
        .par_iter()
        .map(|&(t, n, _)| match cfg.quad_degree {
            Some(q) => resolution_integral_su2_fixed(t, n, q),
            None => resolution_integral_su2(t, n),
        })
        .collect();
    let mut rows = Vec::new();
    for (&(t, n, cell), v) in cells.iter().zip(values) {
        let v = match v {
            Ok(v) => v.value,
            Err(e) => {
                rep.errors.push(format!("I({}, {n}): {e}", label_t(t)));
                continue;
            }
        };
        let (expected, cell_tol) = match cell {
            Some((ti, ni)) => {
                let exact = TABLE1_EXACT_ROWS.contains(&ti);
                (TABLE1[ti][ni], if exact { tol.min(EXACT_CELL_TOL) } else { tol })
            }
            None => (resolution_integral_su2_law(t, n), tol),
        };
        let rel = ((v - expected) / expected).abs();
        rep.check(Check::below(format!("I({}, {n}) rel_err", label_t(t)), rel, cell_tol));
        rows.push(vec![t, n as f64, v, expected, rel, cell_tol]);
    }
    rep.tables.push(Table {
        name: "table1".into(),
        columns: ["t", "n", "I", "expected", "rel_err", "tol"].iter().map(|s| s.to_string()).collect(),
        rows,
    });
    rep
}

/// Relative deviation of `I(t, n)` from `t³n/8` over the table grid.
pub fn closed_form_law(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("closed_form_law", cfg.seed);
    let tol = cfg.tol_or(1e-4);
    let cells: Vec<(f64, i64)> = TABLE1_T.iter().flat_map(|&t| (1..=5).map(move |n| (t, n))).collect();
    let vals: Vec<_> = cells.par_iter().map(|&(t, n)| resolution_integral_su2(t, n)).collect();
    for (&(t, n), v) in cells.iter().zip(vals) {
        rep.try_check(v.map(|v| {
            let law = resolution_integral_su2_law(t, n);
            Check::below(format!("I({}, {n}) vs t^3 n/8", label_t(t)), ((v.value - law) / law).abs(), tol)
        }));
    }
    rep
}

/// `C_t⁻¹ = t` for U(1), and independence of the integration shift.
pub fn resolution_u1(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("resolution_u1", cfg.seed);
    let tol = cfg.tol_or(1e-4);
    let ts = cfg.t.map_or(vec![0.5, 1.0, 2.0], |t| vec![t]);
    rep.param("t", serde_json::Value::Array(ts.iter().map(|&t| num(t)).collect()));
    for &t in &ts {
        rep.try_check(resolution_constant_u1(t).map(|c| Check::below(format!("C_t^-1 / t - 1 at t={t}"), (c / t - 1.0).abs(), tol)));
        let pair = resolution_constant_u1(t).and_then(|a| resolution_constant_u1_shifted(t, 0.37 * t).map(|b| (a, b)));
        rep.try_check(pair.map(|(a, b)| Check::below(format!("shift invariance at t={t}"), (a - b).abs() / a, 1e-10)));
    }
    rep
}

/// Schur residual of `A^t_π` and its trace against the radial integral.
pub fn schur(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("schur", cfg.seed);
    let tol = cfg.tol_or(1e-6);
    let t = cfg.t.unwrap_or(1.0);
    let ns = cfg.n.map_or(vec![2, 3], |n| vec![n]);
    let mut q = AlgebraQuad::default();
    if let Some(d) = cfg.quad_degree {
        q.radial = d;
    }
    rep.param("t", num(t));
    rep.param("radial_nodes", serde_json::Value::from(q.radial));
    let res: Vec<_> = ns.par_iter().map(|&n| schur_residual_su2(t, n, &q).and_then(|s| schur_trace_radial(t, n).map(|r| (s, r)))).collect();
    for (&n, r) in ns.iter().zip(res) {
        match r {
            Ok((s, radial)) => {
                rep.check(Check::below(format!("schur residual n={n}"), s.residual, tol));
                rep.check(Check::below(format!("trace vs radial n={n}"), (s.trace.re - radial).abs() / radial.abs(), tol));
            }
            Err(e) => rep.errors.push(format!("n={n}: {e}")),
        }
    }
    rep
}

/// `ϑ₃(il/π | it/π) = √(π/t) e^{l²/t} ϑ₃(l/t | iπ/t)` on a 10×10 grid (both sides summed
/// directly in their own frame), and `∂_z ϑ₃` against a central difference.
pub fn theta(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("theta", cfg.seed);
    let tol = cfg.tol_or(1e-10);
    let ls: Vec<f64> = (0..10).map(|i| -2.0 + 4.0 * i as f64 / 9.0).collect();
    let ts: Vec<f64> = (0..10).map(|i| 0.2 + 2.8 * i as f64 / 9.0).collect();
    let mut worst: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for &l in &ls {
        for &t in &ts {
            let lhs = theta3_series(Complex64::new(0.0, l / PI), Complex64::new(0.0, t / PI));
            let rhs = theta3_series(Complex64::new(l / t, 0.0), Complex64::new(0.0, PI / t));
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => {
                    let b = b * (PI / t).sqrt() * (l * l / t).exp();
                    worst = worst.max((a - b).norm() / a.norm());
                }
                (Err(e), _) | (_, Err(e)) => rep.errors.push(e.to_string()),
            }
            let z = Complex64::new(0.1 * l, 0.05 * l);
            let tau = Complex64::new(0.1, t / PI);
            let h = 1e-5;
            let d = theta3_dz(z, tau);
            let p = theta3_series(z + h, tau);
            let m = theta3_series(z - h, tau);
            match (d, p, m) {
                (Ok(d), Ok(p), Ok(m)) => {
                    let num_d = (p - m) / (2.0 * h);
                    fd = fd.max((d - num_d).norm() / d.norm().max(1.0));
                }
                _ => rep.errors.push("theta evaluation failed".into()),
            }
        }
    }
    rep.check(Check::below("modular identity max rel residual", worst, tol));
    rep.check(Check::below("theta3' vs central difference", fd, 1e-8));
    rep
}
