#![allow(dead_code)]

pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specflow_core::forms::{IndexSet, Momentum, TrigPolyForm};
use specflow_core::linalg::CMat;
use specflow_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All strictly increasing `degree`-subsets of `0..n`.
pub fn index_sets(n: usize, degree: usize) -> Vec<IndexSet> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == degree)
        .map(|m| IndexSet::from_indices(&(0..n).filter(|j| m & (1 << j) != 0).collect::<Vec<_>>()).unwrap())
        .collect()
}

pub fn random_matrix(fiber: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(fiber, fiber, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random form with `terms` modes of momentum in `[-radius, radius]^n`.
pub fn random_form(n: usize, degree: usize, fiber: usize, terms: usize, radius: i32, rng: &mut ChaCha8Rng) -> TrigPolyForm {
    let sets = index_sets(n, degree);
    let mut f = TrigPolyForm::zero(n, degree, fiber);
    for _ in 0..terms {
        let k = Momentum((0..n).map(|_| rng.gen_range(-radius..=radius)).collect());
        let idx = sets[rng.gen_range(0..sets.len())];
        f.insert(k, idx, random_matrix(fiber, rng)).unwrap();
    }
    f
}

/// Random `u(fiber)`-valued 1-form without zero mode.
pub fn random_skew_one_form(n: usize, fiber: usize, terms: usize, radius: i32, rng: &mut ChaCha8Rng) -> TrigPolyForm {
    let f = random_form(n, 1, fiber, terms, radius, rng).oscillatory_part();
    f.sub(&f.fiber_adjoint()).unwrap().scale_real(0.5)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
