//! Consumer-side validation of shipped certificates.
//!
//! A certificate `F` is accepted when the three queries
//!
//! * initiation `I ∧ ¬F`,
//! * consecution `F ∧ T ∧ ¬F'`,
//! * strengthening `F ∧ defs(bad) ∧ bad`
//!
//! are all unsatisfiable. Each query runs in its own solver session.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::aiger::{lit_word, Aig, Evaluator, Reset};
use crate::certificate::{bind, Certificate};
use crate::encoder::{encode, negate_tseitin, Cnf, Signal, TransitionSystem};
use crate::sat::{clause_satisfied, lit_value, Answer, Lit, SatBackend, Solver};
use crate::witness::Counterexample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// One assumption-based check per certificate clause.
    #[default]
    Split,
    /// One check per query with `¬F` encoded via selector variables.
    Tseitin,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "split" => Ok(Strategy::Split),
            "tseitin" => Ok(Strategy::Tseitin),
            _ => Err(format!("unknown strategy {s:?} (expected split or tseitin)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Query {
    Initiation,
    Consecution,
    Strengthening,
}

impl Query {
    pub const ALL: [Query; 3] = [Query::Initiation, Query::Consecution, Query::Strengthening];

    pub fn name(self) -> &'static str {
        match self {
            Query::Initiation => "initiation",
            Query::Consecution => "consecution",
            Query::Strengthening => "strengthening",
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryReport {
    pub query: Query,
    /// Satisfying assignment over the transition system's variables, if any.
    pub witness: Option<Vec<bool>>,
    pub duration: Duration,
}

impl QueryReport {
    pub fn is_sat(&self) -> bool {
        self.witness.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Valid,
    Invalid { query: Query, witness: Vec<bool> },
    Rejected(String),
}

impl Outcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, Outcome::Valid)
    }

    /// Valid/Invalid/Rejected plus the failing query, for comparing verdicts.
    pub fn kind(&self) -> (&'static str, Option<Query>) {
        match self {
            Outcome::Valid => ("valid", None),
            Outcome::Invalid { query, .. } => ("invalid", Some(*query)),
            Outcome::Rejected(_) => ("rejected", None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub queries: Vec<QueryReport>,
    /// Encoding and certificate binding.
    pub setup: Duration,
}

impl Verdict {
    /// Sum of the three query durations.
    pub fn query_time(&self) -> Duration {
        self.queries.iter().map(|q| q.duration).sum()
    }

    /// One line per query: name, SAT/UNSAT, microseconds.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for q in &self.queries {
            out.push_str(&format!(
                "{} {} {}\n",
                q.query,
                if q.is_sat() { "SAT" } else { "UNSAT" },
                q.duration.as_micros()
            ));
        }
        out.push_str(&match &self.outcome {
            Outcome::Valid => "verdict valid\n".to_string(),
            Outcome::Invalid { query, .. } => format!("verdict invalid {query}\n"),
            Outcome::Rejected(why) => format!("verdict rejected {why}\n"),
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub strategy: Strategy,
    pub check_digest: bool,
    /// Run the three queries on separate threads.
    pub parallel: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { strategy: Strategy::Split, check_digest: true, parallel: false }
    }
}

pub fn validate(aig: &Aig, safety_index: usize, cert: &Certificate, opts: &CheckOptions) -> Verdict {
    let start = Instant::now();
    let ts = match encode(aig, safety_index) {
        Ok(ts) => ts,
        Err(e) => return rejected(e.to_string(), start),
    };
    let f = match bind(cert, aig, &ts.varmap, opts.check_digest) {
        Ok(f) => f,
        Err(e) => return rejected(e.to_string(), start),
    };
    let setup = start.elapsed();
    let queries = run_queries(&ts, &f, opts.strategy, opts.parallel);
    let outcome = match queries.iter().find(|q| q.is_sat()) {
        None => Outcome::Valid,
        Some(q) => Outcome::Invalid { query: q.query, witness: q.witness.clone().unwrap() },
    };
    Verdict { outcome, queries, setup }
}

fn rejected(reason: String, start: Instant) -> Verdict {
    Verdict { outcome: Outcome::Rejected(reason), queries: Vec::new(), setup: start.elapsed() }
}

/// Runs all three queries for an already-bound certificate.
pub fn run_queries(ts: &TransitionSystem, f: &Cnf, strategy: Strategy, parallel: bool) -> Vec<QueryReport> {
    if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = Query::ALL.iter().map(|&q| s.spawn(move || run_query(ts, f, q, strategy))).collect();
            handles.into_iter().map(|h| h.join().expect("query thread")).collect()
        })
    } else {
        Query::ALL.iter().map(|&q| run_query(ts, f, q, strategy)).collect()
    }
}

fn session(ts: &TransitionSystem, parts: &[&Cnf]) -> Solver {
    let mut s = Solver::new();
    s.ensure_vars(ts.num_vars());
    for p in parts {
        p.load_into(&mut s).expect("encoder variables are allocated");
    }
    s
}

fn truncate(mut model: Vec<bool>, n: usize) -> Vec<bool> {
    model.truncate(n);
    model
}

pub fn run_query(ts: &TransitionSystem, f: &Cnf, query: Query, strategy: Strategy) -> QueryReport {
    let start = Instant::now();
    let n = ts.num_vars();
    let witness = match query {
        Query::Initiation | Query::Consecution => {
            let base: Vec<&Cnf> = if query == Query::Initiation { vec![&ts.init] } else { vec![f, &ts.trans] };
            let targets: Vec<Vec<Lit>> = if query == Query::Initiation {
                f.clauses.clone()
            } else {
                f.clauses.iter().map(|c| ts.prime(c).expect("bound certificate ranges over latches")).collect()
            };
            let mut s = session(ts, &base);
            match strategy {
                Strategy::Split => targets.iter().find_map(|c| {
                    let assumptions: Vec<Lit> = c.iter().map(|&l| !l).collect();
                    match s.check(&assumptions) {
                        Answer::Sat(m) => Some(truncate(m, n)),
                        _ => None,
                    }
                }),
                Strategy::Tseitin => {
                    let neg = negate_tseitin(&Cnf { clauses: targets }, n as u32);
                    s.ensure_vars(neg.next_free as usize);
                    neg.clauses.load_into(&mut s).expect("fresh variables are allocated");
                    match s.check(&[neg.activation]) {
                        Answer::Sat(m) => Some(truncate(m, n)),
                        _ => None,
                    }
                }
            }
        }
        Query::Strengthening => match ts.bad {
            Signal::Const(false) => None,
            bad => {
                let mut s = session(ts, &[f, &ts.prop_defs]);
                let assumptions: Vec<Lit> = match bad {
                    Signal::Lit(b) => vec![b],
                    _ => vec![],
                };
                match s.check(&assumptions) {
                    Answer::Sat(m) => Some(truncate(m, n)),
                    _ => None,
                }
            }
        },
    };
    QueryReport { query, witness, duration: start.elapsed() }
}

/// Checks a witness against the failed query's formula by direct evaluation,
/// without a SAT solver.
pub fn witness_satisfies(ts: &TransitionSystem, f: &Cnf, query: Query, witness: &[bool]) -> bool {
    match query {
        Query::Initiation => {
            ts.init.satisfied_by(witness) && f.clauses.iter().any(|c| !clause_satisfied(c, witness))
        }
        Query::Consecution => {
            f.satisfied_by(witness)
                && ts.trans.satisfied_by(witness)
                && f.clauses.iter().any(|c| {
                    let primed = ts.prime(c).expect("latch clause");
                    !primed.iter().any(|&l| lit_value(l, witness))
                })
        }
        Query::Strengthening => {
            f.satisfied_by(witness) && ts.prop_defs.satisfied_by(witness) && ts.bad.eval(witness)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    Safe { states: usize },
    Unsafe(Counterexample),
}

impl Reachability {
    pub fn is_safe(&self) -> bool {
        matches!(self, Reachability::Safe { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("{found} state bits exceed the limit of {limit}")]
    TooManyStateBits { found: usize, limit: usize },
    #[error("{found} input bits exceed the limit of {limit}")]
    TooManyInputBits { found: usize, limit: usize },
    #[error("more than {0} reachable states")]
    TooManyStates(usize),
    #[error("no safety bit with index {0}")]
    NoSuchSafetyBit(usize),
    #[error("latch {0} has an undefined reset value")]
    UndefinedReset(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub state_bits: usize,
    pub input_bits: usize,
    pub states: usize,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits { state_bits: 16, input_bits: 16, states: 1 << 22 }
    }
}

impl BruteForceLimits {
    pub fn with_state_bits(state_bits: usize) -> Self {
        BruteForceLimits { state_bits, ..Default::default() }
    }
}

type State = Box<[u64]>;

fn state_bit(state: &[u64], i: usize) -> bool {
    state[i / 64] >> (i % 64) & 1 == 1
}

/// Exact breadth-first reachability over the explicit state graph, with all
/// input combinations enumerated at every state. Returns a shortest trace to
/// the bad bit when one exists.
pub fn reach_bruteforce(aig: &Aig, safety_index: usize, limits: &BruteForceLimits) -> Result<Reachability, BruteForceError> {
    let bad = *aig.safety_bits().get(safety_index).ok_or(BruteForceError::NoSuchSafetyBit(safety_index))?;
    if let Some(i) = aig.latches.iter().position(|l| l.reset == Reset::Undefined) {
        return Err(BruteForceError::UndefinedReset(i));
    }
    let nl = aig.latches.len();
    let ni = aig.inputs.len();
    if nl > limits.state_bits {
        return Err(BruteForceError::TooManyStateBits { found: nl, limit: limits.state_bits });
    }
    if ni > limits.input_bits {
        return Err(BruteForceError::TooManyInputBits { found: ni, limit: limits.input_bits });
    }
    let ev = Evaluator::new(aig).expect("validated circuit");
    let words = nl.div_ceil(64).max(1);
    let mut init: State = vec![0u64; words].into_boxed_slice();
    for (i, l) in aig.latches.iter().enumerate() {
        if l.init_value() {
            init[i / 64] |= 1 << (i % 64);
        }
    }

    // parent[state] = (predecessor, input pattern)
    let mut parent: HashMap<State, Option<(State, u64)>> = HashMap::new();
    parent.insert(init.clone(), None);
    let mut queue = VecDeque::from([init.clone()]);
    let patterns: u64 = 1u64 << ni;
    let mut values = Vec::new();
    while let Some(state) = queue.pop_front() {
        let state_words: Vec<u64> = (0..nl).map(|i| if state_bit(&state, i) { u64::MAX } else { 0 }).collect();
        let mut base = 0u64;
        while base < patterns {
            let chunk = (patterns - base).min(64);
            let input_words: Vec<u64> = (0..ni)
                .map(|j| (0..chunk).fold(0u64, |w, k| w | (((base + k) >> j) & 1) << k))
                .collect();
            ev.eval(&input_words, &state_words, &mut values);
            let mask = if chunk == 64 { u64::MAX } else { (1u64 << chunk) - 1 };
            let hits = lit_word(&values, bad) & mask;
            if hits != 0 {
                let pattern = base + u64::from(hits.trailing_zeros());
                return Ok(Reachability::Unsafe(build_trace(&parent, &state, pattern, nl, ni, safety_index)));
            }
            let next = ev.next_state(&values);
            for k in 0..chunk {
                let mut succ: State = vec![0u64; words].into_boxed_slice();
                for (i, w) in next.iter().enumerate() {
                    if w >> k & 1 == 1 {
                        succ[i / 64] |= 1 << (i % 64);
                    }
                }
                if !parent.contains_key(&succ) {
                    if parent.len() >= limits.states {
                        return Err(BruteForceError::TooManyStates(limits.states));
                    }
                    parent.insert(succ.clone(), Some((state.clone(), base + k)));
                    queue.push_back(succ);
                }
            }
            base += chunk;
        }
    }
    Ok(Reachability::Safe { states: parent.len() })
}

fn build_trace(
    parent: &HashMap<State, Option<(State, u64)>>,
    last: &State,
    last_pattern: u64,
    nl: usize,
    ni: usize,
    safety_index: usize,
) -> Counterexample {
    let bits = |p: u64| (0..ni).map(|j| p >> j & 1 == 1).collect::<Vec<bool>>();
    let mut inputs = vec![bits(last_pattern)];
    let mut cur = last.clone();
    while let Some(Some((prev, p))) = parent.get(&cur) {
        inputs.push(bits(*p));
        cur = prev.clone();
    }
    inputs.reverse();
    Counterexample { safety_index, init: (0..nl).map(|i| state_bit(&cur, i)).collect(), inputs }
}
