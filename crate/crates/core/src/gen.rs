//! Seeded random structures.
//!
//! The generator uses ChaCha8 seeded with `seed_from_u64(seed)`, so output
//! is identical across platforms for a given seed. Draw order: for each
//! state in order, one coin per atom (probability 1/2) for its label; then,
//! for each state in order, one uniform forced successor followed by one
//! coin per remaining target state (probability `density`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kripke::{KripkeStructure, Label, StateId};

pub fn gen_random(states: usize, aps: usize, density: f64, seed: u64) -> Result<KripkeStructure> {
    if states == 0 {
        return Err(Error::Argument("a structure needs at least one state".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Argument(format!("density {density} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<String> = (0..aps).map(|i| format!("p{i}")).collect();
    let labels: Vec<Label> = (0..states)
        .map(|_| atoms.iter().filter(|_| rng.random_bool(0.5)).cloned().collect())
        .collect();
    let mut edges = Vec::new();
    for s in 0..states {
        let forced = rng.random_range(0..states);
        for t in 0..states {
            if t == forced || rng.random_bool(density) {
                edges.push((StateId(s), StateId(t)));
            }
        }
    }
    KripkeStructure::new(
        (0..states).map(|i| format!("s{i}")).collect(),
        atoms.into_iter().collect(),
        labels,
        edges,
        StateId(0),
    )
}
