//! Sequential checkers: the equivalence miter and safety-bit selection.

use thiserror::Error;

use crate::aiger::{Aig, Literal};
use crate::builder::AigBuilder;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MiterError {
    #[error("input counts differ: specification has {spec}, implementation has {implementation}")]
    InputCountMismatch { spec: usize, implementation: usize },
    #[error("output counts differ: specification has {spec}, implementation has {implementation}")]
    OutputCountMismatch { spec: usize, implementation: usize },
    #[error("no safety bit with index {index} (circuit has {available})")]
    NoSuchSafetyBit { index: usize, available: usize },
}

/// Copies `aig` into `b`, driving its inputs from `inputs`. Returns the
/// copied outputs.
fn instantiate(b: &mut AigBuilder, aig: &Aig, inputs: &[Literal]) -> Vec<Literal> {
    let mut map = vec![Literal::FALSE; aig.max_var as usize + 1];
    let tr = |map: &[Literal], l: Literal| map[l.var() as usize].negate_if(l.is_negated());
    for (x, &i) in aig.inputs.iter().zip(inputs) {
        map[x.var() as usize] = i;
    }
    for l in &aig.latches {
        let new = b.latch(l.init_value());
        b.set_reset(new, l.reset);
        map[l.lit.var() as usize] = new;
    }
    let order = aig.topological_order().expect("validated circuit");
    for g in order {
        let g = aig.ands[g];
        let out = b.and(tr(&map, g.rhs0), tr(&map, g.rhs1));
        map[g.lhs.var() as usize] = out;
    }
    for l in &aig.latches {
        b.set_next(map[l.lit.var() as usize], tr(&map, l.next));
    }
    aig.outputs.iter().map(|&o| tr(&map, o)).collect()
}

/// Builds the sequential miter of two circuits: shared inputs, disjoint
/// latches, and a single output that is 1 whenever any output pair differs
/// in the current step.
pub fn build_equivalence_miter(spec: &Aig, implementation: &Aig) -> Result<Aig, MiterError> {
    if spec.inputs.len() != implementation.inputs.len() {
        return Err(MiterError::InputCountMismatch {
            spec: spec.inputs.len(),
            implementation: implementation.inputs.len(),
        });
    }
    if spec.outputs.len() != implementation.outputs.len() {
        return Err(MiterError::OutputCountMismatch {
            spec: spec.outputs.len(),
            implementation: implementation.outputs.len(),
        });
    }
    let mut b = AigBuilder::new();
    let inputs = b.inputs(spec.inputs.len());
    let outs_spec = instantiate(&mut b, spec, &inputs);
    let outs_impl = instantiate(&mut b, implementation, &inputs);
    let diffs: Vec<Literal> = outs_spec.iter().zip(&outs_impl).map(|(&x, &y)| b.xor(x, y)).collect();
    let bad = b.or_all(&diffs);
    b.output(bad);
    Ok(b.finish())
}

/// Which bit of a circuit the encoder treats as the error bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SafetyBit {
    pub index: usize,
    pub literal: Literal,
    /// True when taken from the outputs because the circuit has no bad section.
    pub from_outputs: bool,
}

pub fn select_safety(aig: &Aig, index: usize) -> Result<SafetyBit, MiterError> {
    let bits = aig.safety_bits();
    let literal = *bits.get(index).ok_or(MiterError::NoSuchSafetyBit { index, available: bits.len() })?;
    Ok(SafetyBit { index, literal, from_outputs: aig.bads.is_empty() })
}
