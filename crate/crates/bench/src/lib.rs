//! Shared fixtures for the benchmarks: small spaces whose groups are cheap
//! enough to rebuild inside a timing loop.

use odd_unitary::endo::EndoContext;
use odd_unitary::harness::ExperimentConfig;
use odd_unitary::levels::LevelSpace;

/// `F_2`, `l = 3`, no odd part, minimal parameter: `|EU(P)| = 20160`.
pub fn small_level_space() -> LevelSpace {
    level_space(2, 3, 0, "minimal")
}

pub fn level_space(n: u32, l: usize, r0: usize, param: &str) -> LevelSpace {
    let prep = ExperimentConfig::standard(n, 1, l, r0, param).prepare().expect("fixture config is valid");
    LevelSpace::new(&EndoContext::new(&prep.space).expect("context")).expect("level space")
}
