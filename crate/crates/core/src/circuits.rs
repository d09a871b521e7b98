//! Benchmark generators and seeded tamper mutators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aiger::{Aig, AndGate, Literal, Reset};
use crate::builder::AigBuilder;
use crate::certificate::Certificate;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("width must be at least {min}, got {width}")]
    WidthTooSmall { width: usize, min: usize },
    #[error("bad value {value} does not fit in {width} bits")]
    BadValueOutOfRange { value: u64, width: usize },
    #[error("cannot mutate an empty certificate")]
    EmptyCertificate,
    #[error("circuit has nothing to mutate")]
    NoMutationSite,
}

/// Free-running `width`-bit up-counter from 0. The state bits are the
/// outputs; the single bad bit fires when the state equals `bad_value`
/// (constant FALSE when none is given).
pub fn gen_counter(width: usize, bad_value: Option<u64>) -> Result<Aig, GenError> {
    if width == 0 {
        return Err(GenError::WidthTooSmall { width, min: 1 });
    }
    if let Some(v) = bad_value {
        if width < 64 && v >> width != 0 {
            return Err(GenError::BadValueOutOfRange { value: v, width });
        }
    }
    let mut b = AigBuilder::new();
    let state = b.latches(width);
    let zero = vec![Literal::FALSE; width];
    let (next, _) = b.add(&state, &zero, Literal::TRUE);
    for (&s, &n) in state.iter().zip(&next) {
        b.set_next(s, n);
        b.output(s);
    }
    let bad = match bad_value {
        Some(v) => b.equals_const(&state, v),
        None => Literal::FALSE,
    };
    b.bad(bad);
    Ok(b.finish())
}

fn counter_bits(width: usize) -> usize {
    // values 0 ..= width + 1
    (usize::BITS - (width + 1).leading_zeros()) as usize
}

/// Shared control: step counter that loads at 0, computes at 1..=width and
/// saturates at width + 1 (done).
struct Control {
    load: Literal,
    active: Literal,
    done: Literal,
}

fn control(b: &mut AigBuilder, width: usize) -> Control {
    let count = b.latches(counter_bits(width));
    let load = b.equals_const(&count, 0);
    let done = b.equals_const(&count, width as u64 + 1);
    let zero = vec![Literal::FALSE; count.len()];
    let (inc, _) = b.add(&count, &zero, !done);
    for (&c, &n) in count.iter().zip(&inc) {
        b.set_next(c, n);
    }
    let active = b.and(!load, !done);
    Control { load, active, done }
}

fn gated_outputs(b: &mut AigBuilder, bits: &[Literal], done: Literal) {
    for &x in bits {
        let o = b.and(x, done);
        b.output(o);
    }
    b.output(done);
}

/// Two sequential shift-add multipliers computing `a * b` for `width`-bit
/// operands. Inputs are `a` then `b` (LSB first), sampled at step 0. Outputs
/// are the `2 * width` product bits gated by `done`, then `done` itself,
/// which rises at step `width + 1` and stays high.
///
/// The specification shifts the multiplicand left into a fixed accumulator;
/// the implementation adds into the upper half of a product register and
/// shifts the whole register right.
pub fn gen_multiplier_pair(width: usize) -> Result<(Aig, Aig), GenError> {
    if width < 2 {
        return Err(GenError::WidthTooSmall { width, min: 2 });
    }
    Ok((multiplier_shift_multiplicand(width), multiplier_shift_product(width)))
}

fn multiplier_shift_multiplicand(w: usize) -> Aig {
    let mut b = AigBuilder::new();
    let a = b.inputs(w);
    let m = b.inputs(w);
    let ctl = control(&mut b, w);
    let mcand = b.latches(2 * w - 1);
    let mplier = b.latches(w);
    let acc = b.latches(2 * w);

    // mcand: load a, shift left while active
    for i in 0..mcand.len() {
        let shifted = if i == 0 { Literal::FALSE } else { mcand[i - 1] };
        let loaded = if i < w { a[i] } else { Literal::FALSE };
        let hold = b.mux(ctl.active, shifted, mcand[i]);
        let n = b.mux(ctl.load, loaded, hold);
        b.set_next(mcand[i], n);
    }
    // mplier: load b, shift right while active
    for i in 0..w {
        let shifted = if i + 1 < w { mplier[i + 1] } else { Literal::FALSE };
        let hold = b.mux(ctl.active, shifted, mplier[i]);
        let n = b.mux(ctl.load, m[i], hold);
        b.set_next(mplier[i], n);
    }
    // acc += mcand when the current multiplier bit is set
    let add_en = b.and(ctl.active, mplier[0]);
    let addend: Vec<Literal> = (0..2 * w)
        .map(|i| {
            let x = mcand.get(i).copied().unwrap_or(Literal::FALSE);
            b.and(x, add_en)
        })
        .collect();
    let (sum, _) = b.add(&acc, &addend, Literal::FALSE);
    for i in 0..2 * w {
        let n = b.and(!ctl.load, sum[i]);
        b.set_next(acc[i], n);
    }
    gated_outputs(&mut b, &acc, ctl.done);
    b.finish()
}

fn multiplier_shift_product(w: usize) -> Aig {
    let mut b = AigBuilder::new();
    let a = b.inputs(w);
    let m = b.inputs(w);
    let ctl = control(&mut b, w);
    let mcand = b.latches(w);
    let prod = b.latches(2 * w);

    for i in 0..w {
        let n = b.mux(ctl.load, a[i], mcand[i]);
        b.set_next(mcand[i], n);
    }
    let add_en = b.and(ctl.active, prod[0]);
    let addend: Vec<Literal> = mcand.iter().map(|&x| b.and(x, add_en)).collect();
    let (sum, carry) = b.add(&prod[w..], &addend, Literal::FALSE);
    // {carry, sum, prod_low} >> 1
    let mut shifted = Vec::with_capacity(2 * w);
    shifted.extend_from_slice(&prod[1..w]);
    shifted.extend_from_slice(&sum);
    shifted.push(carry);
    for i in 0..2 * w {
        let loaded = if i < w { m[i] } else { Literal::FALSE };
        let hold = b.mux(ctl.active, shifted[i], prod[i]);
        let n = b.mux(ctl.load, loaded, hold);
        b.set_next(prod[i], n);
    }
    gated_outputs(&mut b, &prod, ctl.done);
    b.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertMutation {
    FlipLiteral,
    DeleteClause,
    AddClause,
    SwapVariable,
}

impl CertMutation {
    pub const ALL: [CertMutation; 4] =
        [CertMutation::FlipLiteral, CertMutation::DeleteClause, CertMutation::AddClause, CertMutation::SwapVariable];
}

fn cert_vars(cert: &Certificate) -> Vec<u32> {
    let mut vars: Vec<u32> = cert.clauses.iter().flatten().map(|l| l.var()).collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

fn swap_sites(cert: &Certificate, vars: &[u32]) -> Vec<(usize, usize, u32)> {
    let mut sites = Vec::new();
    for (ci, clause) in cert.clauses.iter().enumerate() {
        for li in 0..clause.len() {
            for &v in vars {
                if clause.iter().all(|l| l.var() != v) {
                    sites.push((ci, li, v));
                }
            }
        }
    }
    sites
}

/// Applies one seeded mutation. Draw order: the mutation kind uniformly over
/// the kinds applicable to `cert`, then the site uniformly.
///
/// Variables are drawn from those already present in the certificate, so
/// every mutant still references latches only.
pub fn mutate_certificate(cert: &Certificate, seed: u64) -> Result<(Certificate, CertMutation), GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = cert_vars(cert);
    let literal_count = cert.clauses.iter().map(Vec::len).sum::<usize>();
    if cert.clauses.is_empty() {
        return Err(GenError::EmptyCertificate);
    }
    let kinds: Vec<CertMutation> = CertMutation::ALL
        .into_iter()
        .filter(|k| match k {
            CertMutation::FlipLiteral => literal_count > 0,
            CertMutation::DeleteClause => true,
            CertMutation::AddClause => !vars.is_empty(),
            CertMutation::SwapVariable => !swap_sites(cert, &vars).is_empty(),
        })
        .collect();
    let kind = *kinds.choose(&mut rng).expect("delete is always applicable");
    Ok((apply_cert_mutation(cert, kind, &mut rng), kind))
}

pub fn apply_cert_mutation<R: Rng>(cert: &Certificate, kind: CertMutation, rng: &mut R) -> Certificate {
    let mut out = cert.clone();
    let vars = cert_vars(cert);
    match kind {
        CertMutation::FlipLiteral => {
            let sites: Vec<(usize, usize)> =
                cert.clauses.iter().enumerate().flat_map(|(c, cl)| (0..cl.len()).map(move |l| (c, l))).collect();
            let &(c, l) = sites.choose(rng).expect("a literal");
            out.clauses[c][l] = !out.clauses[c][l];
        }
        CertMutation::DeleteClause => {
            let c = rng.gen_range(0..cert.clauses.len());
            out.clauses.remove(c);
        }
        CertMutation::AddClause => {
            let size = rng.gen_range(1..=vars.len().min(3));
            let chosen: Vec<u32> = vars.choose_multiple(rng, size).copied().collect();
            let clause = chosen.into_iter().map(|v| Literal::from_var(v, rng.gen())).collect();
            out.clauses.push(clause);
        }
        CertMutation::SwapVariable => {
            let sites = swap_sites(cert, &vars);
            let &(c, l, v) = sites.choose(rng).expect("a swap site");
            let old = out.clauses[c][l];
            out.clauses[c][l] = Literal::from_var(v, old.is_negated());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitMutation {
    FlipAndOperand,
    RewireAndOperand,
    FlipLatchReset,
    FlipOutput,
}

impl CircuitMutation {
    pub const ALL: [CircuitMutation; 4] = [
        CircuitMutation::FlipAndOperand,
        CircuitMutation::RewireAndOperand,
        CircuitMutation::FlipLatchReset,
        CircuitMutation::FlipOutput,
    ];

    fn applicable(self, aig: &Aig) -> bool {
        match self {
            CircuitMutation::FlipAndOperand | CircuitMutation::RewireAndOperand => !aig.ands.is_empty(),
            CircuitMutation::FlipLatchReset => !aig.latches.is_empty(),
            CircuitMutation::FlipOutput => !aig.outputs.is_empty() || !aig.bads.is_empty(),
        }
    }
}

/// Applies one seeded, semantics-changing but well-formed mutation. Draw
/// order: kind uniformly over applicable kinds, then the site. The circuit
/// is canonicalized first so that rewiring to any lower variable keeps the
/// logic acyclic.
pub fn mutate_circuit(aig: &Aig, seed: u64) -> Result<(Aig, CircuitMutation), GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds: Vec<CircuitMutation> = CircuitMutation::ALL.into_iter().filter(|k| k.applicable(aig)).collect();
    let &kind = kinds.choose(&mut rng).ok_or(GenError::NoMutationSite)?;
    Ok((apply_circuit_mutation(aig, kind, &mut rng), kind))
}

pub fn apply_circuit_mutation<R: Rng>(aig: &Aig, kind: CircuitMutation, rng: &mut R) -> Aig {
    let mut out = aig.canonicalize().expect("validated circuit");
    match kind {
        CircuitMutation::FlipAndOperand => {
            let g = rng.gen_range(0..out.ands.len());
            let gate = out.ands[g];
            let flipped = if rng.gen() { AndGate::new(gate.lhs, !gate.rhs0, gate.rhs1) } else { AndGate::new(gate.lhs, gate.rhs0, !gate.rhs1) };
            out.ands[g] = flipped;
        }
        CircuitMutation::RewireAndOperand => {
            let g = rng.gen_range(0..out.ands.len());
            let gate = out.ands[g];
            let old = if rng.gen() { gate.rhs0 } else { gate.rhs1 };
            let other = if old == gate.rhs0 { gate.rhs1 } else { gate.rhs0 };
            // any variable numbered below the gate, including the constant
            let candidates: Vec<u32> = (0..gate.lhs.var()).filter(|&v| v != old.var()).collect();
            let v = candidates.choose(rng).copied().unwrap_or(0);
            let lit = Literal::from_var(v, rng.gen());
            out.ands[g] = AndGate::new(gate.lhs, lit, other);
        }
        CircuitMutation::FlipLatchReset => {
            let l = rng.gen_range(0..out.latches.len());
            let latch = &mut out.latches[l];
            latch.reset = if latch.init_value() { Reset::Zero } else { Reset::One };
        }
        CircuitMutation::FlipOutput => {
            let n = out.outputs.len() + out.bads.len();
            let k = rng.gen_range(0..n);
            if k < out.outputs.len() {
                out.outputs[k] = !out.outputs[k];
            } else {
                let k = k - out.outputs.len();
                out.bads[k] = !out.bads[k];
            }
        }
    }
    out
}
