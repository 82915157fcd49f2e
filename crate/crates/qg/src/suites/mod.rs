//! Deterministic property suites, one per command. Every randomized suite draws from a
//! ChaCha stream derived from the configured seed, so reports are byte-identical per seed.

pub mod bohr;
pub mod gweyl;
pub mod heat;
pub mod sw;
pub mod u1;

use num_complex::Complex64;
use qg_core::pw::BandFn;
use qg_core::repgroup::{Group, GroupElement, Quat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, RunConfig};
use crate::report::Report;

/// Independent random stream `stream` for `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) fn crand(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5))
}

pub(crate) fn random_element(group: Group, r: &mut ChaCha8Rng) -> GroupElement {
    match group {
        Group::U1 => GroupElement::U1(r.gen_range(0.0..std::f64::consts::TAU)),
        Group::SU2 => GroupElement::SU2(random_quat(r)),
    }
}

pub(crate) fn random_quat(r: &mut ChaCha8Rng) -> Quat {
    Quat::from_uniform(r.gen(), r.gen(), r.gen())
}

pub(crate) fn random_band_fn(group: Group, band: i64, r: &mut ChaCha8Rng) -> BandFn {
    let mut f = BandFn::zero(group, band);
    for a in f.coeffs.iter_mut() {
        *a = crand(r);
    }
    f
}

/// Runs the command's suite.
pub fn run(cfg: &RunConfig) -> Report {
    match cfg.cmd {
        Command::Table1 => heat::table1(cfg),
        Command::ResolutionU1 => heat::resolution_u1(cfg),
        Command::Schur => heat::schur(cfg),
        Command::KnProps => gweyl::kn_props(cfg),
        Command::WeylReality => gweyl::weyl_reality(cfg),
        Command::MoyalFit => gweyl::moyal_fit(cfg),
        Command::SwProps => sw::sw_props(cfg),
        Command::BohrProps => bohr::bohr_props(cfg),
        Command::BerezinU1 => u1::berezin_u1(cfg),
        Command::Theta => heat::theta(cfg),
        Command::Acceptance => crate::acceptance::report(cfg),
    }
}
