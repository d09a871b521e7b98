#![allow(dead_code)]

use pch::aiger::{Aig, Literal};
use pch::builder::AigBuilder;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random sequential circuit, as indices into the growing literal pool
/// `[FALSE, inputs.., latches.., gates..]`.
#[derive(Debug, Clone)]
pub struct Recipe {
    pub inputs: usize,
    pub resets: Vec<bool>,
    pub gates: Vec<(usize, bool, usize, bool)>,
    pub nexts: Vec<(usize, bool)>,
    pub outputs: Vec<(usize, bool)>,
    pub bad: Option<(usize, bool)>,
}

impl Recipe {
    pub fn build(&self) -> Aig {
        let mut b = AigBuilder::new();
        let mut pool = vec![Literal::FALSE];
        pool.extend(b.inputs(self.inputs));
        let latches: Vec<Literal> = self.resets.iter().map(|&r| b.latch(r)).collect();
        pool.extend(&latches);
        for &(x, nx, y, ny) in &self.gates {
            let a = pool[x % pool.len()].negate_if(nx);
            let c = pool[y % pool.len()].negate_if(ny);
            let g = b.and(a, c);
            pool.push(g);
        }
        let pick = |(i, n): (usize, bool)| pool[i % pool.len()].negate_if(n);
        for (l, &n) in latches.iter().zip(&self.nexts) {
            b.set_next(*l, pick(n));
        }
        for &o in &self.outputs {
            b.output(pick(o));
        }
        if let Some(bad) = self.bad {
            b.bad(pick(bad));
        }
        b.finish()
    }
}

fn pick() -> impl Strategy<Value = (usize, bool)> {
    (0usize..64, any::<bool>())
}

pub fn recipe(max_inputs: usize, max_latches: usize, max_gates: usize) -> impl Strategy<Value = Recipe> {
    (0..=max_inputs, 1..=max_latches, 0..=max_gates, 1usize..=2).prop_flat_map(|(inputs, latches, gates, outputs)| {
        (
            Just(inputs),
            prop::collection::vec(any::<bool>(), latches),
            prop::collection::vec((0usize..64, any::<bool>(), 0usize..64, any::<bool>()), gates),
            prop::collection::vec(pick(), latches),
            prop::collection::vec(pick(), outputs),
            prop::option::of(pick()),
        )
            .prop_map(|(inputs, resets, gates, nexts, outputs, bad)| Recipe { inputs, resets, gates, nexts, outputs, bad })
    })
}

/// Input vectors for `steps` steps from a seed.
pub fn input_trace(aig: &Aig, steps: usize, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..steps).map(|_| (0..aig.inputs.len()).map(|_| rng.gen()).collect()).collect()
}
