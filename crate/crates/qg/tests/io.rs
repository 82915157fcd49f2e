//! Format roundtrips are bit-exact; malformed input is rejected with `FormatError`.

use num_complex::Complex64;
use qg::io::*;
use qg_core::bohrcalc::{BohrSymbol, FiniteSupportFn, RationalLattice, SymbolOrder};
use qg_core::gweyl::{symbol_grid, MatrixSymbol};
use qg_core::repgroup::{CMat, Group, GroupElement, Quadrature};
use qg_core::sworbit::{OrbitField, OrbitSpec};

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn same_bits(a: Complex64, b: Complex64) -> bool {
    a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
}

fn awkward(k: usize) -> Complex64 {
    let x = k as f64 + 1.0;
    c(x.sqrt() / 3.0 - 0.1, -std::f64::consts::PI / x * 1e-7)
}

fn sample_symbol(group: Group) -> MatrixSymbol {
    let grid = symbol_grid(group, 3, 2);
    let mut k = 0;
    MatrixSymbol::from_fn(group, 3, 2, grid, |pi, g| {
        let phase = match g {
            GroupElement::U1(p) => *p,
            GroupElement::SU2(q) => q.w + 0.3 * q.z,
        };
        CMat::from_fn(pi.dim(), pi.dim(), |a, b| {
            k += 1;
            awkward(k + a + 2 * b) * phase.cos()
        })
    })
}

#[test]
fn matrix_symbol_roundtrip_is_bit_exact() {
    for group in [Group::U1, Group::SU2] {
        let s = sample_symbol(group);
        let text = symbol_to_json(&s);
        let back = symbol_from_json(&text).unwrap();
        assert_eq!((back.group, back.band, back.g_band), (s.group, s.band, s.g_band));
        assert_eq!(back.grid.nodes, s.grid.nodes);
        for (ra, rb) in s.values.iter().zip(&back.values) {
            for (ma, mb) in ra.iter().zip(rb) {
                assert!(ma.iter().zip(mb.iter()).all(|(x, y)| same_bits(*x, *y)));
            }
        }
        assert_eq!(symbol_to_json(&back), text);
    }
}

#[test]
fn matrix_symbol_rejects_malformed_input() {
    let text = symbol_to_json(&sample_symbol(Group::U1));
    assert!(symbol_from_json("not json").is_err());
    assert!(symbol_from_json(&text.replace("\"U1\"", "\"SO3\"")).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["band"] = serde_json::json!(5);
    assert!(symbol_from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["grid"]["nodes"] = serde_json::json!(1);
    assert!(symbol_from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["irreps"][0]["values"][0].as_array_mut().unwrap().pop();
    assert!(symbol_from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("g_band");
    let e = symbol_from_json(&v.to_string()).unwrap_err();
    assert!(e.0.contains("g_band"), "{e}");
}

#[test]
fn finite_support_roundtrip_is_bit_exact() {
    let f = FiniteSupportFn::from_pairs((0..9).map(|k| (0.1 * k as f64 - 0.35, awkward(k))));
    let text = finite_support_to_json(&f);
    let back = finite_support_from_json(&text).unwrap();
    assert_eq!(back.len(), f.len());
    for (a, b) in f.iter().zip(back.iter()) {
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert!(same_bits(a.1, b.1));
    }
    assert!(finite_support_from_json("[[1.0, 2.0]]").is_err());
    assert!(finite_support_from_json("{}").is_err());
    assert!(finite_support_from_json("[[1.0, \"x\", 0.0]]").is_err());
}

#[test]
fn bohr_symbol_roundtrip_on_window() {
    let lat = RationalLattice::new(0.5, 0.25).unwrap();
    let s = BohrSymbol::new()
        .with_term(0.0, |l| c(l * l / 7.0, 0.0))
        .with_term(0.5, |l| c(0.0, (l / 3.0).sin()))
        .with_term(-1.0 / 3.0, |_| c(0.1, 0.2))
        .with_lattice(lat)
        .with_order(SymbolOrder { m: 2.0, rho: 1.0, delta: 0.0 });
    let window: Vec<f64> = (-4..=4).map(|k| lat.point(k)).collect();
    let text = bohr_symbol_to_json(&s, &window);
    let back = bohr_symbol_from_json(&text).unwrap();
    assert_eq!(back.frequencies(), s.frequencies());
    for &nu in &s.frequencies() {
        for &l in &window {
            assert!(same_bits(back.hat(-nu, l), s.hat(-nu, l)));
        }
        assert!(back.hat(-nu, 0.3).re.is_nan());
    }
    let o = back.order.unwrap();
    assert_eq!((o.m, o.rho, o.delta), (2.0, 1.0, 0.0));
    let l2 = back.lattice.unwrap();
    assert_eq!((l2.spacing, l2.offset), (lat.spacing, lat.offset));
    assert_eq!(bohr_symbol_to_json(&back, &window), text);

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["table"][0][0] = serde_json::json!(9.0);
    assert!(bohr_symbol_from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["lattice"]["spacing"] = serde_json::json!(0.0);
    assert!(bohr_symbol_from_json(&v.to_string()).is_err());
}

#[test]
fn orbit_field_roundtrip_is_bit_exact() {
    let spec = OrbitSpec::new(3).unwrap();
    let f = OrbitField::from_fn(&spec, |n| c(n[0] * n[1] + 1.0 / 3.0, n[2].exp()));
    let text = orbit_field_to_csv(&spec, &f);
    assert!(text.starts_with("beta,alpha,re,im\n"));
    let back = orbit_field_from_csv(&spec, &text).unwrap();
    assert!(f.values.iter().zip(&back.values).all(|(a, b)| same_bits(*a, *b)));

    let other = OrbitSpec::new(5).unwrap();
    assert!(orbit_field_from_csv(&other, &text).is_err());
    let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    assert!(orbit_field_from_csv(&spec, &truncated).is_err());
    let bad = text.replacen(",re,im\n", ",re,im\n0.5,", 1);
    assert!(orbit_field_from_csv(&spec, &bad).is_err());
}

#[test]
fn harmonics_roundtrip_is_bit_exact() {
    let lmax = 4;
    let coeffs: Vec<Complex64> = (0..(lmax + 1) * (lmax + 1)).map(awkward).collect();
    let text = harmonics_to_json(6, lmax, &coeffs);
    let (two_j, l2, back) = harmonics_from_json(&text).unwrap();
    assert_eq!((two_j, l2), (6, lmax));
    assert!(coeffs.iter().zip(&back).all(|(a, b)| same_bits(*a, *b)));
    assert!(harmonics_from_json(r#"{"two_j": 2, "lmax": 1, "coeffs": [[1, 2, 0.0, 0.0]]}"#).is_err());
    assert!(harmonics_from_json(r#"{"two_j": 2, "lmax": 1, "coeffs": [[1, 0, 0.0]]}"#).is_err());
}

#[test]
fn quadrature_csv_lists_nodes_and_weights() {
    let q = Quadrature::exact_for(Group::U1, 6);
    let text = quadrature_to_csv(&q);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,weight"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), q.len());
    assert!((rows.iter().map(|r| r[1]).sum::<f64>() - 1.0).abs() < 1e-14);

    let q = Quadrature::exact_for(Group::SU2, 4);
    let text = quadrature_to_csv(&q);
    assert!(text.starts_with("w,x,y,z,weight\n"));
    assert_eq!(text.lines().count(), q.len() + 1);
}
