//! CNF encoding of a circuit as a transition system: initial states,
//! transition relation, and the safety literal with its defining clauses.
//!
//! Solver variables are numbered inputs first, then current-state latches,
//! then AND gates in circuit order, then next-state latches.

use thiserror::Error;

use crate::aiger::{Aig, Literal, Reset};
use crate::sat::{Lit, SatBackend, SatError, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("no safety bit with index {index} (circuit has {available})")]
    NoSuchSafetyBit { index: usize, available: usize },
    #[error("latch {0} has an undefined reset value")]
    UndefinedReset(usize),
    #[error("literal {0:?} is not a current-state latch variable")]
    NonStateVariable(Lit),
}

/// A circuit signal after constant folding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Const(bool),
    Lit(Lit),
}

impl std::ops::Not for Signal {
    type Output = Signal;
    fn not(self) -> Signal {
        match self {
            Signal::Const(b) => Signal::Const(!b),
            Signal::Lit(l) => Signal::Lit(!l),
        }
    }
}

impl Signal {
    pub fn eval(self, model: &[bool]) -> bool {
        match self {
            Signal::Const(b) => b,
            Signal::Lit(l) => crate::sat::lit_value(l, model),
        }
    }
}

/// A list of clauses over solver literals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Adds a clause after removing duplicate literals; tautologies are dropped.
    pub fn push(&mut self, mut clause: Vec<Lit>) {
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        self.clauses.push(clause);
    }

    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| crate::sat::clause_satisfied(c, model))
    }

    pub fn load_into<S: SatBackend + ?Sized>(&self, solver: &mut S) -> Result<(), SatError> {
        for c in &self.clauses {
            solver.add_clause(c)?;
        }
        Ok(())
    }
}

/// Correspondence between circuit variables and solver variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    pub inputs: Vec<Var>,
    pub current: Vec<Var>,
    pub next: Vec<Var>,
    /// Indexed by circuit variable; `None` for the constant.
    aiger_to_solver: Vec<Option<Var>>,
    /// Circuit variable of each latch, by latch index.
    latch_aiger_vars: Vec<u32>,
    num_vars: usize,
}

impl VarMap {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_latches(&self) -> usize {
        self.current.len()
    }

    /// Solver variable of a circuit variable (input, latch or gate).
    pub fn solver_var(&self, aiger_var: u32) -> Option<Var> {
        self.aiger_to_solver.get(aiger_var as usize).copied().flatten()
    }

    pub fn signal(&self, lit: Literal) -> Signal {
        if lit.is_constant() {
            return Signal::Const(lit == Literal::TRUE);
        }
        let v = self.solver_var(lit.var()).expect("literal of a validated circuit");
        Signal::Lit(v.lit(lit.is_negated()))
    }

    /// Latch index of a current-state solver variable.
    pub fn latch_of_current(&self, var: Var) -> Option<usize> {
        let first = self.current.first()?.0;
        (var.0 >= first && var.0 < first + self.current.len() as u32).then(|| (var.0 - first) as usize)
    }

    /// Current-state solver literal for an AIGER latch literal.
    pub fn current_from_aiger(&self, lit: Literal) -> Option<Lit> {
        let var = self.solver_var(lit.var())?;
        self.latch_of_current(var)?;
        Some(var.lit(lit.is_negated()))
    }

    /// AIGER literal for a current-state solver literal.
    pub fn aiger_from_current(&self, lit: Lit) -> Option<Literal> {
        let idx = self.latch_of_current(lit.var())?;
        Some(Literal::from_var(self.latch_aiger_vars[idx], lit.is_negated()))
    }

    pub fn latch_aiger_var(&self, latch: usize) -> u32 {
        self.latch_aiger_vars[latch]
    }
}

/// Initial states `I`, transition relation `T`, and safety property `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub varmap: VarMap,
    pub init: Cnf,
    pub trans: Cnf,
    /// The selected bad bit; the property is its negation.
    pub bad: Signal,
    pub prop_defs: Cnf,
    pub resets: Vec<bool>,
}

impl TransitionSystem {
    /// The property literal `P`.
    pub fn prop(&self) -> Signal {
        !self.bad
    }

    pub fn num_vars(&self) -> usize {
        self.varmap.num_vars
    }

    pub fn num_latches(&self) -> usize {
        self.varmap.current.len()
    }

    /// Maps a clause over current-state variables to next-state variables.
    pub fn prime(&self, clause: &[Lit]) -> Result<Vec<Lit>, EncodeError> {
        prime(clause, &self.varmap)
    }

    /// Does the state cube (current-state literals) contain an initial state?
    pub fn cube_intersects_init(&self, cube: &[Lit]) -> bool {
        cube.iter().all(|l| match self.varmap.latch_of_current(l.var()) {
            Some(i) => self.resets[i] != l.is_negated(),
            None => true,
        })
    }
}

pub fn prime(clause: &[Lit], varmap: &VarMap) -> Result<Vec<Lit>, EncodeError> {
    clause
        .iter()
        .map(|&l| match varmap.latch_of_current(l.var()) {
            Some(i) => Ok(varmap.next[i].lit(l.is_negated())),
            None => Err(EncodeError::NonStateVariable(l)),
        })
        .collect()
}

fn and_clauses(out: &mut Cnf, g: Var, a: Signal, b: Signal) {
    match (a, b) {
        (Signal::Const(false), _) | (_, Signal::Const(false)) => out.push(vec![g.neg()]),
        (Signal::Const(true), Signal::Const(true)) => out.push(vec![g.pos()]),
        (Signal::Const(true), Signal::Lit(x)) | (Signal::Lit(x), Signal::Const(true)) => {
            out.push(vec![g.neg(), x]);
            out.push(vec![g.pos(), !x]);
        }
        (Signal::Lit(x), Signal::Lit(y)) => {
            out.push(vec![g.neg(), x]);
            out.push(vec![g.neg(), y]);
            out.push(vec![g.pos(), !x, !y]);
        }
    }
}

pub fn encode(aig: &Aig, safety_index: usize) -> Result<TransitionSystem, EncodeError> {
    let bits = aig.safety_bits();
    let bad_lit = *bits
        .get(safety_index)
        .ok_or(EncodeError::NoSuchSafetyBit { index: safety_index, available: bits.len() })?;
    if let Some(i) = aig.latches.iter().position(|l| l.reset == Reset::Undefined) {
        return Err(EncodeError::UndefinedReset(i));
    }

    let mut aiger_to_solver = vec![None; aig.max_var as usize + 1];
    let mut counter = 0u32;
    let mut fresh = || {
        let v = Var(counter);
        counter += 1;
        v
    };
    let inputs: Vec<Var> = aig
        .inputs
        .iter()
        .map(|l| {
            let v = fresh();
            aiger_to_solver[l.var() as usize] = Some(v);
            v
        })
        .collect();
    let current: Vec<Var> = aig
        .latches
        .iter()
        .map(|l| {
            let v = fresh();
            aiger_to_solver[l.lit.var() as usize] = Some(v);
            v
        })
        .collect();
    for g in &aig.ands {
        aiger_to_solver[g.lhs.var() as usize] = Some(fresh());
    }
    let next: Vec<Var> = aig.latches.iter().map(|_| fresh()).collect();
    let varmap = VarMap {
        inputs,
        current,
        next,
        aiger_to_solver,
        latch_aiger_vars: aig.latches.iter().map(|l| l.lit.var()).collect(),
        num_vars: counter as usize,
    };

    let mut init = Cnf::default();
    for (i, l) in aig.latches.iter().enumerate() {
        init.push(vec![varmap.current[i].lit(!l.init_value())]);
    }

    let mut trans = Cnf::default();
    let mut gate_clauses: Vec<Cnf> = Vec::with_capacity(aig.ands.len());
    for g in &aig.ands {
        let mut c = Cnf::default();
        let out = varmap.solver_var(g.lhs.var()).unwrap();
        and_clauses(&mut c, out, varmap.signal(g.rhs0), varmap.signal(g.rhs1));
        trans.clauses.extend(c.clauses.iter().cloned());
        gate_clauses.push(c);
    }
    for (i, l) in aig.latches.iter().enumerate() {
        let y = varmap.next[i];
        match varmap.signal(l.next) {
            Signal::Const(b) => trans.push(vec![y.lit(!b)]),
            Signal::Lit(x) => {
                trans.push(vec![y.neg(), x]);
                trans.push(vec![y.pos(), !x]);
            }
        }
    }

    // Cone of influence of the bad bit, kept in circuit order.
    let gate_index: std::collections::HashMap<u32, usize> =
        aig.ands.iter().enumerate().map(|(k, g)| (g.lhs.var(), k)).collect();
    let mut in_cone = vec![false; aig.ands.len()];
    let mut stack = vec![bad_lit.var()];
    while let Some(v) = stack.pop() {
        if let Some(&k) = gate_index.get(&v) {
            if !in_cone[k] {
                in_cone[k] = true;
                stack.push(aig.ands[k].rhs0.var());
                stack.push(aig.ands[k].rhs1.var());
            }
        }
    }
    let mut prop_defs = Cnf::default();
    for (k, c) in gate_clauses.into_iter().enumerate() {
        if in_cone[k] {
            prop_defs.clauses.extend(c.clauses);
        }
    }

    Ok(TransitionSystem {
        bad: varmap.signal(bad_lit),
        varmap,
        init,
        trans,
        prop_defs,
        resets: aig.latches.iter().map(|l| l.init_value()).collect(),
    })
}

/// Negation of a CNF via selector variables, guarded by an activation literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegatedCnf {
    pub clauses: Cnf,
    pub selectors: Vec<Var>,
    /// Assert (or assume) this literal to enable `¬f`.
    pub activation: Lit,
    /// First variable index not used by the encoding.
    pub next_free: u32,
}

/// Encodes `¬f` over fresh variables starting at `first_free`: selector `t_i`
/// implies clause `i` is falsified, and the activation literal implies some
/// selector holds. For an empty `f` this is just `¬activation`.
pub fn negate_tseitin(f: &Cnf, first_free: u32) -> NegatedCnf {
    let activation = Var(first_free);
    let selectors: Vec<Var> = (0..f.clauses.len() as u32).map(|i| Var(first_free + 1 + i)).collect();
    let mut clauses = Cnf::default();
    for (c, t) in f.clauses.iter().zip(&selectors) {
        for &l in c {
            clauses.clauses.push(vec![t.neg(), !l]);
        }
    }
    let mut top = vec![activation.neg()];
    top.extend(selectors.iter().map(|t| t.pos()));
    clauses.clauses.push(top);
    NegatedCnf { clauses, activation: activation.pos(), next_free: first_free + 1 + selectors.len() as u32, selectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_ascii;
    use crate::sat::{SolveResult, Solver};

    fn ts(text: &str) -> TransitionSystem {
        encode(&parse_ascii(text.as_bytes()).unwrap(), 0).unwrap()
    }

    #[test]
    fn constant_zero_latch() {
        let t = ts("aag 1 0 1 1 0\n2 2\n2\n");
        let x = Var(0);
        let y = Var(1);
        assert_eq!(t.init.clauses, vec![vec![x.neg()]]);
        assert_eq!(t.trans.clauses, vec![vec![x.pos(), y.neg()], vec![x.neg(), y.pos()]]);
        assert_eq!(t.prop(), Signal::Lit(x.neg()));
        assert!(t.prop_defs.is_empty());
        // Truth table: I ∧ ¬P is unsat, and T relates only equal states.
        for xv in [false, true] {
            let init_ok = t.init.satisfied_by(&[xv]);
            assert!(!(init_ok && xv));
            for yv in [false, true] {
                assert_eq!(t.trans.satisfied_by(&[xv, yv]), xv == yv);
            }
        }
    }

    #[test]
    fn constant_false_bad() {
        let t = ts("aag 0 0 0 1 0\n0\n");
        assert_eq!(t.prop(), Signal::Const(true));
        assert!(t.init.is_empty() && t.trans.is_empty());
    }

    #[test]
    fn and_gate_cone() {
        let t = ts("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
        assert_eq!(t.prop_defs.len(), 3);
        assert_eq!(t.bad, Signal::Lit(Var(2).pos()));
    }

    #[test]
    fn cone_excludes_unrelated_gates() {
        // bad = 6 = i0 & i1; gate 8 = i0 & !i1 is outside the cone.
        let t = ts("aag 4 2 0 2 2\n2\n4\n6\n8\n6 4 2\n8 5 2\n");
        assert_eq!(t.prop_defs.len(), 3);
        assert_eq!(t.trans.len(), 6);
    }

    #[test]
    fn errors() {
        let aig = parse_ascii(b"aag 1 1 0 1 0\n2\n2\n").unwrap();
        assert_eq!(encode(&aig, 5), Err(EncodeError::NoSuchSafetyBit { index: 5, available: 1 }));
        let aig = parse_ascii(b"aag 1 0 1 1 0\n2 2 2\n2\n").unwrap();
        assert_eq!(encode(&aig, 0), Err(EncodeError::UndefinedReset(0)));
    }

    #[test]
    fn prime_clause() {
        let t = ts("aag 2 0 2 0 0 1\n2 2\n4 4\n2\n");
        let (x0, x1) = (t.varmap.current[0], t.varmap.current[1]);
        let (y0, y1) = (t.varmap.next[0], t.varmap.next[1]);
        assert_eq!(t.prime(&[x0.neg(), x1.pos()]).unwrap(), vec![y0.neg(), y1.pos()]);
        assert_eq!(t.prime(&[]).unwrap(), vec![]);
        let t = ts("aag 2 1 1 1 0\n2\n4 2\n4\n");
        let input = t.varmap.inputs[0];
        assert_eq!(t.prime(&[input.pos()]), Err(EncodeError::NonStateVariable(input.pos())));
    }

    fn solve_with(ctx: &Cnf, f: &Cnf, nvars: u32) -> SolveResult {
        let neg = negate_tseitin(f, nvars);
        let mut s = Solver::new();
        s.ensure_vars(neg.next_free as usize);
        ctx.load_into(&mut s).unwrap();
        neg.clauses.load_into(&mut s).unwrap();
        s.solve(&[neg.activation])
    }

    #[test]
    fn tseitin_single_literal() {
        let x = Var(0);
        let f = Cnf { clauses: vec![vec![x.pos()]] };
        let neg = negate_tseitin(&f, 1);
        let t1 = neg.selectors[0];
        assert_eq!(neg.clauses.clauses, vec![vec![t1.neg(), x.neg()], vec![neg.activation.var().neg(), t1.pos()]]);
        let with = |v: bool| Cnf { clauses: vec![vec![x.lit(!v)]] };
        assert_eq!(solve_with(&with(false), &f, 1), SolveResult::Sat);
        assert_eq!(solve_with(&with(true), &f, 1), SolveResult::Unsat);
    }

    #[test]
    fn tseitin_of_contradiction_is_tautology() {
        let x = Var(0);
        let f = Cnf { clauses: vec![vec![x.pos()], vec![x.neg()]] };
        for v in [false, true] {
            let ctx = Cnf { clauses: vec![vec![x.lit(!v)]] };
            assert_eq!(solve_with(&ctx, &f, 1), SolveResult::Sat);
        }
    }

    #[test]
    fn tseitin_with_context() {
        let (x, y) = (Var(0), Var(1));
        let f = Cnf { clauses: vec![vec![x.pos(), y.pos()], vec![x.neg(), y.pos()]] };
        let ctx = Cnf { clauses: vec![vec![y.pos()]] };
        // Oracle: with y true, both clauses hold for every x.
        let brute = (0..4).any(|m: u32| {
            let model = [m & 1 == 1, m & 2 == 2];
            ctx.satisfied_by(&model) && !f.satisfied_by(&model)
        });
        assert!(!brute);
        assert_eq!(solve_with(&ctx, &f, 2), SolveResult::Unsat);
        assert_eq!(solve_with(&Cnf::default(), &f, 2), SolveResult::Sat);
    }

    #[test]
    fn tseitin_of_empty_formula_is_false() {
        assert_eq!(solve_with(&Cnf::default(), &Cnf::default(), 0), SolveResult::Unsat);
    }

    #[test]
    fn deterministic() {
        let aig = parse_ascii(b"aag 4 2 0 2 2\n2\n4\n6\n8\n6 4 2\n8 5 2\n").unwrap();
        assert_eq!(encode(&aig, 1).unwrap(), encode(&aig, 1).unwrap());
    }
}
