//! The eleven acceptance criteria, each evaluated from its suite and timed.

use std::time::Instant;

use crate::config::{Command, RunConfig};
use crate::report::{Check, Report};
use crate::suites::{bohr, gweyl, heat, sw, u1};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    /// Failing criterion with a documented analysis; still printed as FAIL.
    pub known_deviation: bool,
    pub detail: String,
    pub seconds: f64,
    pub report: Report,
}

impl Criterion {
    /// `criterion  N PASS title (t s): detail`.
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let note = if self.known_deviation && !self.pass { " [known deviation]" } else { "" };
        format!("criterion {:>2} {verdict} {} ({:.1} s){note}: {}", self.id, self.title, self.seconds, self.detail)
    }
}

fn worst(rep: &Report) -> String {
    match rep.first_failure() {
        Some(f) => f,
        None => {
            let n = rep.checks.len();
            format!("{n} checks within bounds")
        }
    }
}

fn timed(cmd: Command, seed: u64, f: fn(&RunConfig) -> Report) -> (Report, f64) {
    let mut cfg = RunConfig::new(cmd);
    cfg.seed = seed;
    let t0 = Instant::now();
    let r = f(&cfg);
    (r, t0.elapsed().as_secs_f64())
}

fn simple(id: u32, title: &'static str, (report, seconds): (Report, f64), limit: Option<f64>) -> Criterion {
    let mut pass = report.passed();
    let mut detail = worst(&report);
    if let Some(l) = limit {
        if seconds >= l {
            pass = false;
            detail = format!("runtime {seconds:.1} s exceeds {l} s; {detail}");
        }
    }
    Criterion { id, title, pass, known_deviation: false, detail, seconds, report }
}

fn slope(rep: &Report, name: &str) -> String {
    rep.find(name).map_or("n/a".into(), |c| format!("{:.3}", c.value))
}

/// Evaluates criteria in order; `only` restricts to the listed ids.
pub fn evaluate(seed: u64, only: Option<&[u32]>) -> Vec<Criterion> {
    let want = |id: u32| only.map_or(true, |o| o.contains(&id));
    let mut out = Vec::new();
    if want(1) {
        out.push(simple(1, "I(t, n) table reproduction", timed(Command::Table1, seed, heat::table1), Some(60.0)));
    }
    if want(2) {
        out.push(simple(2, "U(1) resolution constant C_t^-1 = t", timed(Command::ResolutionU1, seed, heat::resolution_u1), None));
    }
    if want(3) {
        out.push(simple(3, "closed form I = t^3 n / 8", timed(Command::Table1, seed, heat::closed_form_law), None));
    }
    if want(4) {
        out.push(simple(4, "SU(2) Schur property", timed(Command::Schur, seed, heat::schur), Some(120.0)));
    }
    if want(5) {
        out.push(simple(5, "KN calculus properties", timed(Command::KnProps, seed, gweyl::kn_props), None));
    }
    if want(6) {
        out.push(simple(6, "Weyl reality", timed(Command::WeylReality, seed, gweyl::weyl_reality), None));
    }
    if want(7) {
        let (report, seconds) = timed(Command::MoyalFit, seed, gweyl::moyal_fit);
        let pass = report.errors.is_empty() && report.checks.iter().all(Check::pass);
        let detail = format!(
            "moyal slope U1 {} SU2 {} (target 2 +- 0.2); dirac slope U1 {} SU2 {} (target 1 +- 0.2)",
            slope(&report, "U1 moyal slope"),
            slope(&report, "SU2 moyal slope"),
            slope(&report, "U1 dirac slope"),
            slope(&report, "SU2 dirac slope"),
        );
        let known_deviation = report.passed() && !pass;
        out.push(Criterion { id: 7, title: "semiclassical order fit", pass, known_deviation, detail, seconds, report });
    }
    if want(8) {
        out.push(simple(8, "Stratonovich-Weyl suite", timed(Command::SwProps, seed, sw::sw_props), None));
    }
    if want(9) {
        out.push(simple(9, "Bohr calculus", timed(Command::BohrProps, seed, bohr::bohr_props), None));
    }
    if want(10) {
        out.push(simple(10, "U(1) Berezin smoothing", timed(Command::BerezinU1, seed, u1::berezin_u1), None));
    }
    if want(11) {
        out.push(simple(11, "theta modular identity", timed(Command::Theta, seed, heat::theta), None));
    }
    out
}

/// All criteria as one report: one check per criterion (`value` 0 on pass, 1 on fail), with
/// documented deviations flagged. Runtimes are left out so the report is deterministic.
pub fn report(cfg: &RunConfig) -> Report {
    let mut rep = Report::new("acceptance", cfg.seed);
    for c in evaluate(cfg.seed, None) {
        let mut check = Check::below(format!("criterion {} {}", c.id, c.title), if c.pass { 0.0 } else { 1.0 }, 0.5);
        if c.known_deviation {
            check = check.known_deviation();
        }
        rep.check(check);
        for inner in c.report.checks {
            rep.check(Check { name: format!("  {}: {}", c.id, inner.name), ..inner });
        }
        rep.errors.extend(c.report.errors.into_iter().map(|e| format!("criterion {}: {e}", c.id)));
    }
    rep
}
