//! Incremental SAT solving.
//!
//! [`SatBackend`] is the contract the rest of the crate programs against;
//! [`Solver`] is the bundled CDCL implementation and the reference for
//! deterministic behaviour.

mod cdcl;
pub mod dimacs;

use std::fmt;
use std::time::Instant;

pub use cdcl::{Solver, Stats};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, negated: bool) -> Lit {
        Lit::new(self, negated)
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[inline]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

/// A signed solver literal, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, negated: bool) -> Self {
        Lit(var.0 << 1 | negated as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn negate_if(self, cond: bool) -> Lit {
        Lit(self.0 ^ cond as u32)
    }

    /// DIMACS integer form (variables are 1-based there).
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 || x.unsigned_abs() > u64::from(u32::MAX >> 1) {
            return None;
        }
        Some(Lit::new(Var(x.unsigned_abs() as u32 - 1), x < 0))
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// A conflict or time budget ran out.
    Unknown,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("literal {0:?} references an unallocated variable")]
    UnallocatedVariable(Lit),
}

/// Owned result of a query, for callers that do not want to hold a session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Sat(Vec<bool>),
    Unsat(Vec<Lit>),
    Unknown,
}

/// Minimal incremental SAT interface.
pub trait SatBackend {
    fn new_var(&mut self) -> Var;

    fn num_vars(&self) -> usize;

    /// Adds a permanent clause.
    fn add_clause(&mut self, clause: &[Lit]) -> Result<(), SatError>;

    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult;

    /// Value of `lit` in the last model. Only meaningful after `Sat`.
    fn model_value(&self, lit: Lit) -> bool;

    /// After `Unsat`: a subset of the assumptions that is already
    /// unsatisfiable together with the clause database.
    fn core(&self) -> &[Lit];

    /// Limits the number of conflicts per `solve` call.
    fn set_conflict_budget(&mut self, budget: Option<u64>);

    fn set_deadline(&mut self, deadline: Option<Instant>);

    fn ensure_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    fn model(&self) -> Vec<bool> {
        (0..self.num_vars() as u32).map(|v| self.model_value(Var(v).pos())).collect()
    }

    fn check(&mut self, assumptions: &[Lit]) -> Answer {
        match self.solve(assumptions) {
            SolveResult::Sat => Answer::Sat(self.model()),
            SolveResult::Unsat => Answer::Unsat(self.core().to_vec()),
            SolveResult::Unknown => Answer::Unknown,
        }
    }
}

/// Evaluates a clause under a total assignment.
pub fn clause_satisfied(clause: &[Lit], model: &[bool]) -> bool {
    clause.iter().any(|l| lit_value(*l, model))
}

#[inline]
pub fn lit_value(lit: Lit, model: &[bool]) -> bool {
    model.get(lit.var().index()).copied().unwrap_or(false) ^ lit.is_negated()
}
