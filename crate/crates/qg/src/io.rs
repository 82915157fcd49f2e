//! JSON and CSV formats. Floats are written with 17 significant digits, so every format
//! round-trips `f64` values bit for bit.

use std::sync::Arc;

use num_complex::Complex64;
use qg_core::bohrcalc::{BohrSymbol, FiniteSupportFn, RationalLattice, SymbolOrder};
use qg_core::gweyl::MatrixSymbol;
use qg_core::repgroup::{irreps_up_to, CMat, Group, GroupElement, Quadrature};
use qg_core::sworbit::{harmonic_index, OrbitField, OrbitSpec};
use serde_json::{json, Map, Value};

use crate::report::{fmt17, num};

/// Parse and shape errors of the formats.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn err<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

fn get<'a>(v: &'a Value, k: &str) -> Result<&'a Value, FormatError> {
    v.get(k).ok_or_else(|| FormatError(format!("missing field {k:?}")))
}

fn as_f64(v: &Value) -> Result<f64, FormatError> {
    v.as_f64().ok_or_else(|| FormatError(format!("expected a number, got {v}")))
}

fn as_i64(v: &Value) -> Result<i64, FormatError> {
    v.as_i64().ok_or_else(|| FormatError(format!("expected an integer, got {v}")))
}

fn as_array(v: &Value) -> Result<&Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| FormatError(format!("expected an array, got {v}")))
}

fn parse_f64(s: &str) -> Result<f64, FormatError> {
    s.trim().parse::<f64>().map_err(|_| FormatError(format!("bad number {s:?}")))
}

fn group_name(g: Group) -> &'static str {
    match g {
        Group::U1 => "U1",
        Group::SU2 => "SU2",
    }
}

fn parse_group(v: &Value) -> Result<Group, FormatError> {
    match v.as_str() {
        Some("U1") => Ok(Group::U1),
        Some("SU2") => Ok(Group::SU2),
        _ => err(format!("unknown group {v}")),
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// `{group, band, g_band, grid: {group, content}, irreps: [{label, dim, values}]}` where
/// `values[node]` is the row-major matrix with re/im interleaved. The grid must be a
/// [`Quadrature::exact_for`] rule so that it can be rebuilt from its content.
pub fn symbol_to_json(s: &MatrixSymbol) -> String {
    let irreps: Vec<Value> = irreps_up_to(s.group, s.band)
        .iter()
        .zip(&s.values)
        .map(|(pi, row)| {
            let nodes: Vec<Value> = row
                .iter()
                .map(|m| {
                    let d = m.nrows();
                    let mut flat = Vec::with_capacity(2 * d * d);
                    for a in 0..d {
                        for b in 0..d {
                            flat.push(num(m[(a, b)].re));
                            flat.push(num(m[(a, b)].im));
                        }
                    }
                    Value::Array(flat)
                })
                .collect();
            json!({ "label": pi.label, "dim": pi.dim(), "values": nodes })
        })
        .collect();
    to_pretty(&json!({
        "group": group_name(s.group),
        "band": s.band,
        "g_band": s.g_band,
        "grid": { "group": group_name(s.grid.group), "content": s.grid.content, "nodes": s.grid.len() },
        "irreps": irreps,
    }))
}

pub fn symbol_from_json(text: &str) -> Result<MatrixSymbol, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))?;
    let group = parse_group(get(&v, "group")?)?;
    let band = as_i64(get(&v, "band")?)?;
    let g_band = as_i64(get(&v, "g_band")?)?;
    let gv = get(&v, "grid")?;
    let content = as_i64(get(gv, "content")?)? as usize;
    let grid = Quadrature::exact_for(parse_group(get(gv, "group")?)?, content);
    if grid.content != content || grid.len() as i64 != as_i64(get(gv, "nodes")?)? {
        return err("grid is not an exact_for rule");
    }
    let irreps = as_array(get(&v, "irreps")?)?;
    let expected = irreps_up_to(group, band);
    if irreps.len() != expected.len() {
        return err("irrep count does not match the band");
    }
    let mut values = Vec::with_capacity(irreps.len());
    for (iv, pi) in irreps.iter().zip(&expected) {
        if as_i64(get(iv, "label")?)? != pi.label {
            return err("irreps out of order");
        }
        let d = pi.dim();
        let nodes = as_array(get(iv, "values")?)?;
        if nodes.len() != grid.len() {
            return err("node count does not match the grid");
        }
        let mut row = Vec::with_capacity(nodes.len());
        for nv in nodes {
            let flat = as_array(nv)?;
            if flat.len() != 2 * d * d {
                return err("matrix size does not match the irrep");
            }
            let xs = flat.iter().map(as_f64).collect::<Result<Vec<_>, _>>()?;
            row.push(CMat::from_fn(d, d, |a, b| Complex64::new(xs[2 * (a * d + b)], xs[2 * (a * d + b) + 1])));
        }
        values.push(row);
    }
    Ok(MatrixSymbol { group, band, g_band, grid: Arc::new(grid), values })
}

/// `[[λ, re, im], …]` in increasing `λ`.
pub fn finite_support_to_json(f: &FiniteSupportFn) -> String {
    to_pretty(&Value::Array(f.iter().map(|&(l, z)| json!([num(l), num(z.re), num(z.im)])).collect()))
}

pub fn finite_support_from_json(text: &str) -> Result<FiniteSupportFn, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))?;
    let mut out = FiniteSupportFn::new();
    for e in as_array(&v)? {
        let t = as_array(e)?;
        if t.len() != 3 {
            return err("entries are [λ, re, im]");
        }
        out.add_at(as_f64(&t[0])?, Complex64::new(as_f64(&t[1])?, as_f64(&t[2])?));
    }
    Ok(out)
}

/// `{frequencies, window, table: [[ν, λ, re, im]], order, lattice}` with the coefficients
/// sampled on `window`.
pub fn bohr_symbol_to_json(s: &BohrSymbol, window: &[f64]) -> String {
    let table: Vec<Value> =
        s.sample_table(window).iter().map(|&(n, l, z)| json!([num(n), num(l), num(z.re), num(z.im)])).collect();
    let order = s.order.map_or(Value::Null, |o| json!({ "m": num(o.m), "rho": num(o.rho), "delta": num(o.delta) }));
    let lattice = s.lattice.map_or(Value::Null, |l| json!({ "spacing": num(l.spacing), "offset": num(l.offset) }));
    to_pretty(&json!({
        "frequencies": s.frequencies().into_iter().map(num).collect::<Vec<_>>(),
        "window": window.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "table": table,
        "order": order,
        "lattice": lattice,
    }))
}

/// Rebuilds a symbol whose coefficients are the sampled table; off the window they are NaN.
pub fn bohr_symbol_from_json(text: &str) -> Result<BohrSymbol, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))?;
    let freqs = as_array(get(&v, "frequencies")?)?.iter().map(as_f64).collect::<Result<Vec<_>, _>>()?;
    let mut cols: Vec<Vec<(f64, Complex64)>> = vec![Vec::new(); freqs.len()];
    for e in as_array(get(&v, "table")?)? {
        let t = as_array(e)?;
        if t.len() != 4 {
            return err("table rows are [ν, λ, re, im]");
        }
        let nu = as_f64(&t[0])?;
        let k = freqs.iter().position(|&f| f == nu).ok_or_else(|| FormatError("table frequency not declared".into()))?;
        cols[k].push((as_f64(&t[1])?, Complex64::new(as_f64(&t[2])?, as_f64(&t[3])?)));
    }
    let mut s = BohrSymbol::new();
    for (nu, col) in freqs.into_iter().zip(cols) {
        s = s.with_term(nu, move |l| {
            col.iter().find(|(x, _)| *x == l).map_or(Complex64::new(f64::NAN, f64::NAN), |e| e.1)
        });
    }
    let order = get(&v, "order")?;
    if !order.is_null() {
        s.order = Some(SymbolOrder {
            m: as_f64(get(order, "m")?)?,
            rho: as_f64(get(order, "rho")?)?,
            delta: as_f64(get(order, "delta")?)?,
        });
    }
    let lat = get(&v, "lattice")?;
    if !lat.is_null() {
        s.lattice = Some(
            RationalLattice::new(as_f64(get(lat, "spacing")?)?, as_f64(get(lat, "offset")?)?)
                .map_err(|e| FormatError(e.to_string()))?,
        );
    }
    Ok(s)
}

/// Orbit field as CSV rows `β, α, re, im` on the grid of `spec`.
pub fn orbit_field_to_csv(spec: &OrbitSpec, f: &OrbitField) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["beta", "alpha", "re", "im"]).expect("in-memory write");
    for (&(b, a), z) in spec.nodes.iter().zip(&f.values) {
        w.write_record([fmt17(b), fmt17(a), fmt17(z.re), fmt17(z.im)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Reads a field written by [`orbit_field_to_csv`]; the nodes must be those of `spec`.
pub fn orbit_field_from_csv(spec: &OrbitSpec, text: &str) -> Result<OrbitField, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut values = Vec::with_capacity(spec.len());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| FormatError(e.to_string()))?;
        if rec.len() != 4 || k >= spec.len() {
            return err("rows are beta, alpha, re, im on the orbit grid");
        }
        let (b, a) = (parse_f64(&rec[0])?, parse_f64(&rec[1])?);
        if (b, a) != spec.nodes[k] {
            return err(format!("row {k} is not on the orbit grid"));
        }
        values.push(Complex64::new(parse_f64(&rec[2])?, parse_f64(&rec[3])?));
    }
    if values.len() != spec.len() {
        return err("row count does not match the orbit grid");
    }
    Ok(OrbitField { two_j: spec.two_j, values })
}

/// `{two_j, lmax, coeffs: [[l, m, re, im]]}`.
pub fn harmonics_to_json(two_j: i64, lmax: usize, coeffs: &[Complex64]) -> String {
    let mut rows = Vec::with_capacity(coeffs.len());
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let z = coeffs[harmonic_index(l, m)];
            rows.push(json!([l, m, num(z.re), num(z.im)]));
        }
    }
    let mut m = Map::new();
    m.insert("two_j".into(), Value::from(two_j));
    m.insert("lmax".into(), Value::from(lmax));
    m.insert("coeffs".into(), Value::Array(rows));
    to_pretty(&Value::Object(m))
}

pub fn harmonics_from_json(text: &str) -> Result<(i64, usize, Vec<Complex64>), FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))?;
    let two_j = as_i64(get(&v, "two_j")?)?;
    let lmax = as_i64(get(&v, "lmax")?)? as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    for e in as_array(get(&v, "coeffs")?)? {
        let t = as_array(e)?;
        if t.len() != 4 {
            return err("rows are [l, m, re, im]");
        }
        let (l, m) = (as_i64(&t[0])?, as_i64(&t[1])?);
        if l < 0 || l as usize > lmax || m.abs() > l {
            return err("harmonic index out of range");
        }
        out[harmonic_index(l as usize, m)] = Complex64::new(as_f64(&t[2])?, as_f64(&t[3])?);
    }
    Ok((two_j, lmax, out))
}

/// Quadrature nodes and weights: `phi, weight` (U(1)) or `w, x, y, z, weight` (SU(2)).
pub fn quadrature_to_csv(q: &Quadrature) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    match q.group {
        Group::U1 => w.write_record(["phi", "weight"]),
        Group::SU2 => w.write_record(["w", "x", "y", "z", "weight"]),
    }
    .expect("in-memory write");
    for (g, wt) in q.nodes.iter().zip(&q.weights) {
        match g {
            GroupElement::U1(p) => w.write_record([fmt17(*p), fmt17(*wt)]),
            GroupElement::SU2(h) => w.write_record([fmt17(h.w), fmt17(h.x), fmt17(h.y), fmt17(h.z), fmt17(*wt)]),
        }
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}
