//! IC3 proof generation.
//!
//! Frames are kept delta-encoded: `deltas[j]` holds the cubes blocked at
//! level `j` exactly, and frame `F_i` (for `i >= 1`) is the conjunction of
//! the negations of all cubes in `deltas[i..]`. `F_0` is the initial state.
//! Solver `i` holds `T` plus the clauses of `F_i`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::certificate::{from_solver_clauses, Certificate};
use crate::encoder::{Signal, TransitionSystem};
use crate::sat::{Lit, SatBackend, SolveResult, Solver};
use crate::witness::Counterexample;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Ic3Error {
    #[error("resource limit exceeded")]
    ResourceLimit,
    #[error("frames {0} and {1} are not equal")]
    NotAFixpoint(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Ic3Options {
    pub time_limit: Option<Duration>,
    /// Total SAT conflicts over the whole run.
    pub conflict_limit: Option<u64>,
    /// Re-check the frame invariants with fresh solvers after every
    /// iteration; panics on violation. Expensive, for tests.
    pub check_invariants: bool,
    /// Ship only the clauses of the fixpoint frame that the property
    /// transitively depends on.
    pub shrink_certificate: bool,
    pub generalization: Generalization,
}

/// How blocked cubes are shrunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generalization {
    /// One pass of single-literal drops.
    #[default]
    SinglePass,
    /// Literal drops that first try to block the counterexamples to
    /// generalization they run into, and otherwise join with them.
    Ctg,
}

impl Default for Ic3Options {
    fn default() -> Self {
        Ic3Options { time_limit: None, conflict_limit: None, check_invariants: false, shrink_certificate: true, generalization: Generalization::default() }
    }
}

struct Budget {
    deadline: Option<Instant>,
    conflict_limit: Option<u64>,
    conflicts_done: u64,
    queries: u64,
}

impl Budget {
    fn solve(&mut self, solver: &mut Solver, assumptions: &[Lit]) -> Result<bool, Ic3Error> {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Ic3Error::ResourceLimit);
        }
        let remaining = match self.conflict_limit {
            Some(limit) if self.conflicts_done >= limit => return Err(Ic3Error::ResourceLimit),
            Some(limit) => Some(limit - self.conflicts_done),
            None => None,
        };
        solver.set_conflict_budget(remaining);
        solver.set_deadline(self.deadline);
        let before = solver.stats.conflicts;
        let r = solver.solve(assumptions);
        self.conflicts_done += solver.stats.conflicts - before;
        self.queries += 1;
        match r {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Unknown => Err(Ic3Error::ResourceLimit),
        }
    }
}

/// Conjunction of current-state latch literals, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube(Vec<Lit>);

impl Cube {
    pub fn new(mut lits: Vec<Lit>) -> Self {
        lits.sort_unstable();
        lits.dedup();
        Cube(lits)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The blocking clause `¬cube`.
    pub fn negation(&self) -> Vec<Lit> {
        self.0.iter().map(|&l| !l).collect()
    }

    /// `self ⊆ other`: the clause of `self` subsumes the clause of `other`.
    pub fn subset_of(&self, other: &Cube) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|l| it.any(|m| m == l))
    }

    fn without(&self, lit: Lit) -> Cube {
        Cube(self.0.iter().copied().filter(|&l| l != lit).collect())
    }
}

/// IC3's over-approximation frames.
#[derive(Debug, Clone, Default)]
pub struct FrameSequence {
    deltas: Vec<Vec<Cube>>,
}

impl FrameSequence {
    /// Index of the last frame.
    pub fn depth(&self) -> usize {
        self.deltas.len() - 1
    }

    /// Blocked cubes of `F_i` (`i >= 1`).
    pub fn cubes(&self, i: usize) -> Vec<&Cube> {
        self.deltas[i..].iter().flatten().collect()
    }

    /// Clauses of `F_i` (`i >= 1`).
    pub fn clauses(&self, i: usize) -> Vec<Vec<Lit>> {
        self.cubes(i).into_iter().map(Cube::negation).collect()
    }

    pub fn delta(&self, i: usize) -> &[Cube] {
        &self.deltas[i]
    }

    /// `F_i` and `F_{i+1}` have equal clause sets.
    pub fn is_fixpoint(&self, i: usize) -> bool {
        i >= 1 && i < self.depth() && self.deltas[i].is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum ProveOutcome {
    Proved(Certificate),
    Counterexample(Counterexample),
}

#[derive(Debug, Clone, Default)]
pub struct Ic3Stats {
    pub queries: u64,
    pub obligations: u64,
    pub blocked_cubes: u64,
    pub frames: usize,
}

enum RelInd {
    /// Blocked; the cube shrunk by the unsat core.
    Unsat(Cube),
    /// Predecessor state and the inputs of the transition.
    Sat(Cube, Vec<bool>),
}

struct Obligation {
    cube: Cube,
    /// Inputs applied at this state: towards the parent, or the ones firing
    /// the bad bit for a root.
    inputs: Vec<bool>,
    parent: Option<usize>,
}

/// Solvers carry at most this many retired activation variables before
/// being rebuilt.
const MAX_RETIRED_ACTIVATIONS: usize = 300;

const MAX_CTGS: usize = 3;
const MAX_CTG_DEPTH: usize = 1;

pub struct Ic3<'a> {
    ts: &'a TransitionSystem,
    frames: FrameSequence,
    solvers: Vec<Solver>,
    retired: Vec<usize>,
    /// `T` alone, for lifting predecessors.
    lifter: Solver,
    lifter_retired: usize,
    activity: Vec<f64>,
    opts: Ic3Options,
    budget: Budget,
    obligations: Vec<Obligation>,
    pub stats: Ic3Stats,
}

impl<'a> Ic3<'a> {
    /// Engine with frames `F_0 = I` and an unconstrained `F_1`.
    pub fn new(ts: &'a TransitionSystem, opts: Ic3Options) -> Self {
        let mut engine = Ic3 {
            ts,
            frames: FrameSequence { deltas: vec![Vec::new()] },
            solvers: Vec::new(),
            retired: Vec::new(),
            lifter: Solver::new(),
            lifter_retired: 0,
            activity: vec![0.0; ts.num_latches()],
            budget: Budget {
                deadline: opts.time_limit.map(|d| Instant::now() + d),
                conflict_limit: opts.conflict_limit,
                conflicts_done: 0,
                queries: 0,
            },
            opts,
            obligations: Vec::new(),
            stats: Ic3Stats::default(),
        };
        engine.lifter = engine.transition_solver();
        let s0 = engine.fresh_solver(0);
        engine.solvers.push(s0);
        engine.retired.push(0);
        engine.extend();
        engine
    }

    pub fn frames(&self) -> &FrameSequence {
        &self.frames
    }

    /// Current frontier `k`.
    pub fn frontier(&self) -> usize {
        self.frames.depth()
    }

    fn transition_solver(&self) -> Solver {
        let mut s = Solver::new();
        s.ensure_vars(self.ts.num_vars());
        self.ts.trans.load_into(&mut s).expect("encoder variables");
        s
    }

    fn fresh_solver(&self, frame: usize) -> Solver {
        let mut s = self.transition_solver();
        if frame == 0 {
            self.ts.init.load_into(&mut s).expect("encoder variables");
        } else {
            for c in self.frames.clauses(frame) {
                s.add_clause(&c).expect("latch variables");
            }
        }
        s
    }

    /// Appends an empty frame.
    pub fn extend(&mut self) {
        self.frames.deltas.push(Vec::new());
        let k = self.frames.depth();
        let s = self.fresh_solver(k);
        self.solvers.push(s);
        self.retired.push(0);
        self.stats.frames = k;
    }

    fn solve(&mut self, frame: usize, assumptions: &[Lit]) -> Result<bool, Ic3Error> {
        let r = self.budget.solve(&mut self.solvers[frame], assumptions);
        self.stats.queries = self.budget.queries;
        r
    }

    fn state_cube(&self, frame: usize) -> Cube {
        let s = &self.solvers[frame];
        Cube::new(self.ts.varmap.current.iter().map(|v| v.lit(!s.model_value(v.pos()))).collect())
    }

    fn model_inputs(&self, frame: usize) -> Vec<bool> {
        let s = &self.solvers[frame];
        self.ts.varmap.inputs.iter().map(|v| s.model_value(v.pos())).collect()
    }

    fn input_lits(&self, inputs: &[bool]) -> Vec<Lit> {
        self.ts.varmap.inputs.iter().zip(inputs).map(|(v, &b)| v.lit(!b)).collect()
    }

    /// Shrinks the full state `state` to the latches that, under `inputs`,
    /// already force the step into `target` (or fire the bad bit when
    /// `target` is `None`).
    fn lift(&mut self, state: &Cube, inputs: &[bool], target: Option<&Cube>) -> Result<Cube, Ic3Error> {
        if self.lifter_retired >= MAX_RETIRED_ACTIVATIONS {
            self.lifter = self.transition_solver();
            self.lifter_retired = 0;
        }
        let mut assumptions = Vec::new();
        let mut act = None;
        match target {
            Some(c) => {
                let a = self.lifter.new_var();
                let mut clause: Vec<Lit> = self.primed(c).iter().map(|&l| !l).collect();
                clause.push(a.neg());
                self.lifter.add_clause(&clause).expect("allocated");
                assumptions.push(a.pos());
                act = Some(a);
            }
            None => match self.ts.bad {
                Signal::Lit(b) => assumptions.push(!b),
                Signal::Const(_) => return Ok(Cube::new(Vec::new())),
            },
        }
        assumptions.extend(self.input_lits(inputs));
        assumptions.extend_from_slice(state.lits());
        let sat = self.budget.solve(&mut self.lifter, &assumptions);
        let result = match sat {
            Ok(true) => panic!("transition relation is not functional"),
            Ok(false) => {
                let core: HashSet<Lit> = self.lifter.core().iter().copied().collect();
                Ok(Cube::new(state.lits().iter().copied().filter(|l| core.contains(l)).collect()))
            }
            Err(e) => Err(e),
        };
        if let Some(a) = act {
            self.lifter.add_clause(&[a.neg()]).expect("allocated");
            self.lifter_retired += 1;
        }
        result
    }

    fn primed(&self, cube: &Cube) -> Vec<Lit> {
        self.ts.prime(cube.lits()).expect("cubes range over latches")
    }

    /// A state of `F_frame` that fires the bad bit, with the inputs doing so.
    fn bad_state(&mut self, frame: usize) -> Result<Option<(Cube, Vec<bool>)>, Ic3Error> {
        let assumptions = match self.ts.bad {
            Signal::Const(false) => return Ok(None),
            Signal::Const(true) => vec![],
            Signal::Lit(b) => vec![b],
        };
        if self.solve(frame, &assumptions)? {
            let (state, inputs) = (self.state_cube(frame), self.model_inputs(frame));
            Ok(Some((self.lift(&state, &inputs, None)?, inputs)))
        } else {
            Ok(None)
        }
    }

    /// Relative induction: is `F_{frame-1} ∧ ¬cube ∧ T ∧ cube'` unsatisfiable?
    fn relative_induction(&mut self, cube: &Cube, frame: usize) -> Result<RelInd, Ic3Error> {
        let below = frame - 1;
        if self.retired[below] >= MAX_RETIRED_ACTIVATIONS {
            self.solvers[below] = self.fresh_solver(below);
            self.retired[below] = 0;
        }
        let act = self.solvers[below].new_var();
        let mut clause = cube.negation();
        clause.push(act.neg());
        self.solvers[below].add_clause(&clause).expect("allocated");
        let primed = self.primed(cube);
        let mut assumptions = vec![act.pos()];
        assumptions.extend_from_slice(&primed);
        let sat = self.solve(below, &assumptions);
        let result = match sat {
            Ok(true) => Ok(RelInd::Sat(self.state_cube(below), self.model_inputs(below))),
            Ok(false) => {
                let core: HashSet<Lit> = self.solvers[below].core().iter().copied().collect();
                let kept: Vec<Lit> =
                    cube.lits().iter().zip(&primed).filter(|(_, p)| core.contains(p)).map(|(&l, _)| l).collect();
                Ok(RelInd::Unsat(self.fix_initiation(Cube::new(kept), cube)))
            }
            Err(e) => Err(e),
        };
        self.solvers[below].add_clause(&[act.neg()]).expect("allocated");
        self.retired[below] += 1;
        result
    }

    /// If `cube` contains the initial state, adds back a literal of
    /// `original` that excludes it.
    fn fix_initiation(&self, cube: Cube, original: &Cube) -> Cube {
        if !self.ts.cube_intersects_init(cube.lits()) {
            return cube;
        }
        let l = *original
            .lits()
            .iter()
            .find(|l| !self.ts.cube_intersects_init(&[**l]))
            .expect("obligations never contain the initial state");
        let mut lits = cube.0;
        lits.push(l);
        Cube::new(lits)
    }

    fn latch(&self, lit: Lit) -> usize {
        self.ts.varmap.latch_of_current(lit.var()).expect("latch literal")
    }

    fn literal_order(&self, cube: &Cube) -> Vec<Lit> {
        let mut order: Vec<Lit> = cube.lits().to_vec();
        order.sort_by(|&a, &b| {
            let (x, y) = (self.activity[self.latch(a)], self.activity[self.latch(b)]);
            y.partial_cmp(&x).unwrap().then(a.cmp(&b))
        });
        order
    }

    /// Drops literals one at a time, most active latch first, keeping each
    /// drop that leaves the cube outside `I` and inductive relative to
    /// `F_{frame-1}`.
    pub fn generalize(&mut self, cube: Cube, frame: usize) -> Result<Cube, Ic3Error> {
        match self.opts.generalization {
            Generalization::SinglePass => self.drop_literals(cube, frame),
            Generalization::Ctg => self.mic(cube, frame, 0),
        }
    }

    fn drop_literals(&mut self, mut cube: Cube, frame: usize) -> Result<Cube, Ic3Error> {
        for lit in self.literal_order(&cube) {
            if cube.len() <= 1 || !cube.lits().contains(&lit) {
                continue;
            }
            let candidate = cube.without(lit);
            if self.ts.cube_intersects_init(candidate.lits()) {
                continue;
            }
            if let RelInd::Unsat(smaller) = self.relative_induction(&candidate, frame)? {
                cube = smaller;
            }
        }
        Ok(cube)
    }

    fn mic(&mut self, mut cube: Cube, frame: usize, depth: usize) -> Result<Cube, Ic3Error> {
        let mut required: Vec<Lit> = Vec::new();
        for lit in self.literal_order(&cube) {
            if cube.len() <= 1 || !cube.lits().contains(&lit) {
                continue;
            }
            match self.ctg_down(cube.without(lit), frame, depth, &required)? {
                Some(smaller) => cube = smaller,
                None => required.push(lit),
            }
        }
        Ok(cube)
    }

    /// Searches for an inductive sub-cube of `cube` (keeping `required`),
    /// blocking up to a few counterexamples to generalization on the way.
    fn ctg_down(&mut self, mut cube: Cube, frame: usize, depth: usize, required: &[Lit]) -> Result<Option<Cube>, Ic3Error> {
        let mut ctgs = 0;
        loop {
            if self.ts.cube_intersects_init(cube.lits()) {
                return Ok(None);
            }
            let state = match self.relative_induction(&cube, frame)? {
                RelInd::Unsat(core) => return Ok(Some(core)),
                RelInd::Sat(state, _) => state,
            };
            if depth > MAX_CTG_DEPTH {
                return Ok(None);
            }
            if ctgs < MAX_CTGS && frame > 1 && !self.ts.cube_intersects_init(state.lits()) {
                if let RelInd::Unsat(core) = self.relative_induction(&state, frame - 1)? {
                    ctgs += 1;
                    let k = self.frontier();
                    let (mut g, mut level) = (core, frame - 1);
                    while level < k {
                        match self.relative_induction(&g, level + 1)? {
                            RelInd::Unsat(smaller) => {
                                g = smaller;
                                level += 1;
                            }
                            RelInd::Sat(..) => break,
                        }
                    }
                    let g = self.mic(g, level, depth + 1)?;
                    self.add_blocked(g, level);
                    continue;
                }
            }
            ctgs = 0;
            let joined: Vec<Lit> = cube.lits().iter().copied().filter(|l| state.lits().contains(l)).collect();
            if required.iter().any(|l| !joined.contains(l)) {
                return Ok(None);
            }
            cube = Cube(joined);
        }
    }

    fn is_blocked(&self, cube: &Cube, frame: usize) -> bool {
        self.frames.deltas[frame..].iter().flatten().any(|d| d.subset_of(cube))
    }

    /// Records `¬cube` in `F_1 .. F_level`.
    pub fn add_blocked(&mut self, cube: Cube, level: usize) {
        for d in self.frames.deltas[1..=level].iter_mut() {
            d.retain(|c| !cube.subset_of(c));
        }
        let clause = cube.negation();
        for s in &mut self.solvers[1..=level] {
            s.add_clause(&clause).expect("latch variables");
        }
        for &l in cube.lits() {
            let i = self.latch(l);
            self.activity[i] += 1.0;
        }
        for a in self.activity.iter_mut() {
            *a *= 0.98;
        }
        self.frames.deltas[level].push(cube);
        self.stats.blocked_cubes += 1;
    }

    fn push_obligation(
        &self,
        queue: &mut BinaryHeap<Reverse<(usize, usize, u64, usize)>>,
        seq: &mut u64,
        frame: usize,
        id: usize,
    ) {
        *seq += 1;
        queue.push(Reverse((frame, self.obligations[id].cube.len(), *seq, id)));
    }

    /// The trace from the initial state through obligation `node` and its
    /// ancestors, taking `first` as the inputs of step 0.
    fn trace_from(&self, first: Vec<bool>, mut node: usize) -> Counterexample {
        let mut cex = Counterexample { safety_index: 0, init: self.ts.resets.clone(), inputs: vec![first] };
        loop {
            let ob = &self.obligations[node];
            cex.inputs.push(ob.inputs.clone());
            match ob.parent {
                Some(p) => node = p,
                None => return cex,
            }
        }
    }

    /// Discharges the obligation to exclude a bad state from the frontier.
    fn block(&mut self, cube: Cube, inputs: Vec<bool>) -> Result<Option<Counterexample>, Ic3Error> {
        let k = self.frontier();
        let mut queue = BinaryHeap::new();
        let mut seq = 0u64;
        self.obligations.clear();
        self.obligations.push(Obligation { cube, inputs, parent: None });
        self.push_obligation(&mut queue, &mut seq, k, 0);
        while let Some(Reverse((frame, _, _, id))) = queue.pop() {
            self.stats.obligations += 1;
            if frame > k {
                continue;
            }
            let cube = self.obligations[id].cube.clone();
            if self.is_blocked(&cube, frame) {
                if frame < k {
                    self.push_obligation(&mut queue, &mut seq, frame + 1, id);
                }
                continue;
            }
            match self.relative_induction(&cube, frame)? {
                RelInd::Unsat(core) => {
                    let mut g = self.generalize(core, frame)?;
                    let mut level = frame;
                    while level < k {
                        match self.relative_induction(&g, level + 1)? {
                            RelInd::Unsat(smaller) => {
                                g = smaller;
                                level += 1;
                            }
                            RelInd::Sat(..) => break,
                        }
                    }
                    self.add_blocked(g, level);
                    if level < k {
                        self.push_obligation(&mut queue, &mut seq, level + 1, id);
                    }
                }
                RelInd::Sat(state, pred_inputs) => {
                    let pred = self.lift(&state, &pred_inputs, Some(&cube))?;
                    if frame == 1 || self.ts.cube_intersects_init(pred.lits()) {
                        return Ok(Some(self.trace_from(pred_inputs, id)));
                    }
                    self.obligations.push(Obligation { cube: pred, inputs: pred_inputs, parent: Some(id) });
                    let pid = self.obligations.len() - 1;
                    self.push_obligation(&mut queue, &mut seq, frame - 1, pid);
                    self.push_obligation(&mut queue, &mut seq, frame, id);
                }
            }
        }
        Ok(None)
    }

    /// Pushes every clause of `F_i` that is inductive relative to `F_i` into
    /// `F_{i+1}`, for `1 <= i < k`. Returns the first `i` with `F_i = F_{i+1}`.
    pub fn propagate(&mut self) -> Result<Option<usize>, Ic3Error> {
        let k = self.frontier();
        for i in 1..k {
            if self.frames.deltas[i].is_empty() {
                return Ok(Some(i));
            }
            let cubes = self.frames.deltas[i].clone();
            for cube in cubes {
                if !self.frames.deltas[i].contains(&cube) {
                    continue;
                }
                let primed = self.primed(&cube);
                if !self.solve(i, &primed)? {
                    self.frames.deltas[i].retain(|c| c != &cube);
                    self.frames.deltas[i + 1].retain(|c| !cube.subset_of(c));
                    self.solvers[i + 1].add_clause(&cube.negation()).expect("latch variables");
                    self.frames.deltas[i + 1].push(cube);
                }
            }
            if self.frames.deltas[i].is_empty() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// The clauses of the fixpoint frame `F_i`, in AIGER literals.
    pub fn extract_certificate(&self, fixpoint: usize) -> Result<Certificate, Ic3Error> {
        if !self.frames.is_fixpoint(fixpoint) {
            return Err(Ic3Error::NotAFixpoint(fixpoint, fixpoint + 1));
        }
        Ok(from_solver_clauses(&self.frames.clauses(fixpoint), &self.ts.varmap))
    }

    /// The subset of the inductive invariant `clauses` reachable from the
    /// property through unsat cores: it is itself inductive and still
    /// excludes the bad states.
    pub fn shrink(&mut self, clauses: Vec<Vec<Lit>>) -> Result<Vec<Vec<Lit>>, Ic3Error> {
        let b = match self.ts.bad {
            Signal::Lit(b) => b,
            Signal::Const(_) => return Ok(Vec::new()),
        };
        let mut s = self.transition_solver();
        let selectors: Vec<Lit> = clauses
            .iter()
            .map(|c| {
                let sel = s.new_var();
                let mut guarded = c.clone();
                guarded.push(sel.neg());
                s.add_clause(&guarded).expect("allocated");
                sel.pos()
            })
            .collect();
        let index: std::collections::HashMap<Lit, usize> =
            selectors.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut needed = vec![false; clauses.len()];
        let mut order: Vec<usize> = Vec::new();
        let mut queue: Vec<usize> = Vec::new();
        let mut target = vec![b];
        loop {
            let mut assumptions: Vec<Lit> = order.iter().map(|&i| selectors[i]).collect();
            assumptions.extend((0..clauses.len()).filter(|&i| !needed[i]).map(|i| selectors[i]));
            assumptions.extend_from_slice(&target);
            if self.budget.solve(&mut s, &assumptions)? {
                panic!("certificate clauses are not an inductive strengthening");
            }
            for l in s.core() {
                if let Some(&i) = index.get(l) {
                    if !needed[i] {
                        needed[i] = true;
                        order.push(i);
                        queue.push(i);
                    }
                }
            }
            match queue.pop() {
                Some(i) => target = clauses[i].iter().map(|&l| !l).collect::<Vec<_>>(),
                None => break,
            }
            target = self.ts.prime(&target).expect("latch literals");
        }
        order.sort_unstable();
        Ok(order.into_iter().map(|i| clauses[i].clone()).collect())
    }

    /// Re-checks the frame invariants from scratch: consecution between
    /// adjacent frames and safety of every frame below the frontier.
    pub fn check_invariants(&self) -> Result<(), String> {
        let k = self.frontier();
        let frame_cnf = |i: usize| -> Vec<Vec<Lit>> {
            if i == 0 {
                self.ts.init.clauses.clone()
            } else {
                self.frames.clauses(i)
            }
        };
        for i in 0..k {
            let mut s = Solver::new();
            s.ensure_vars(self.ts.num_vars());
            self.ts.trans.load_into(&mut s).unwrap();
            for c in frame_cnf(i) {
                s.add_clause(&c).unwrap();
            }
            for cube in self.frames.cubes(i + 1) {
                if s.solve(&self.primed(cube)) != SolveResult::Unsat {
                    return Err(format!("consecution fails between F{i} and F{}", i + 1));
                }
            }
            if let Signal::Lit(b) = self.ts.bad {
                if s.solve(&[b]) != SolveResult::Unsat {
                    return Err(format!("F{i} intersects the bad states"));
                }
            }
        }
        Ok(())
    }

    /// Runs IC3 to completion.
    pub fn run(&mut self) -> Result<ProveOutcome, Ic3Error> {
        // Initial states violating the property.
        if let Some((_, inputs)) = self.bad_state(0)? {
            return Ok(ProveOutcome::Counterexample(Counterexample {
                safety_index: 0,
                init: self.ts.resets.clone(),
                inputs: vec![inputs],
            }));
        }
        loop {
            let k = self.frontier();
            while let Some((cube, inputs)) = self.bad_state(k)? {
                if let Some(cex) = self.block(cube, inputs)? {
                    return Ok(ProveOutcome::Counterexample(cex));
                }
            }
            self.extend();
            if self.opts.check_invariants {
                self.check_invariants().expect("IC3 frame invariant");
            }
            if let Some(i) = self.propagate()? {
                let mut clauses = self.frames.clauses(i);
                if self.opts.shrink_certificate {
                    clauses = self.shrink(clauses)?;
                }
                return Ok(ProveOutcome::Proved(from_solver_clauses(&clauses, &self.ts.varmap)));
            }
        }
    }
}

/// Proves the property of `ts` or finds a counterexample. The returned
/// certificate carries no digest and the trace has safety index 0; callers
/// that know the circuit fill these in.
pub fn prove(ts: &TransitionSystem, opts: &Ic3Options) -> Result<ProveOutcome, Ic3Error> {
    Ic3::new(ts, opts.clone()).run()
}
