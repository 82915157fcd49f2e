//! Runs all eleven acceptance criteria and prints one line per criterion.
//!
//! Criterion 7 is a documented deviation: the Dirac residual of the Weyl calculus decays at
//! rate 2, not 1, so it must print FAIL while its Moyal half passes.

use std::io::Write;

use qg::acceptance::evaluate;
use qg::config::DEFAULT_SEED;

#[test]
fn acceptance_criteria() {
    let results = evaluate(DEFAULT_SEED, None);
    // Direct handle writes bypass libtest capture, so the lines show on every run.
    let mut err = std::io::stderr().lock();
    for c in &results {
        writeln!(err, "{}", c.line()).unwrap();
    }
    drop(err);
    assert_eq!(results.iter().map(|c| c.id).collect::<Vec<_>>(), (1..=11).collect::<Vec<_>>());
    for c in &results {
        if c.id == 7 {
            assert!(!c.pass && c.known_deviation, "{}", c.line());
            for name in ["U1 moyal slope", "SU2 moyal slope"] {
                assert!(c.report.find(name).expect(name).pass(), "{}", c.line());
            }
            for name in ["U1 dirac slope", "SU2 dirac slope"] {
                let slope = c.report.find(name).expect(name).value;
                assert!((slope - 2.0).abs() < 0.2, "{name} {slope}");
            }
        } else {
            assert!(c.pass, "{}", c.line());
        }
    }
}

#[test]
fn restricted_evaluation_is_deterministic() {
    let a = evaluate(7, Some(&[2, 11]));
    let b = evaluate(7, Some(&[2, 11]));
    assert_eq!(a.iter().map(|c| c.id).collect::<Vec<_>>(), vec![2, 11]);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.report.to_json_string(), y.report.to_json_string());
        assert!(x.pass);
    }
}
