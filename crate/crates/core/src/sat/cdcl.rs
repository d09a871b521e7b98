use std::time::Instant;

use super::{Lit, SatBackend, SatError, SolveResult, Var};

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;
/// Learned clauses are never deleted while fewer than this many exist.
const MIN_LEARNT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub solves: u64,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

/// Binary max-heap over variables keyed by activity.
#[derive(Debug, Default, Clone)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, NOT_IN_HEAP);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != NOT_IN_HEAP
    }

    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as u32;
        self.up(i, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

/// Conflict-driven clause-learning solver: two-watched-literal propagation,
/// first-UIP learning, VSIDS decisions with phase saving, geometric restarts.
///
/// Everything is deterministic: the same sequence of calls yields the same
/// answers, models and cores.
#[derive(Debug, Clone)]
pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    core: Vec<Lit>,
    learnts: usize,
    learnt_limit: usize,
    conflict_budget: Option<u64>,
    deadline: Option<Instant>,
    pub stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            core: Vec::new(),
            learnts: 0,
            learnt_limit: MIN_LEARNT_LIMIT,
            conflict_budget: None,
            deadline: None,
            stats: Stats::default(),
        }
    }

    /// False once the clause database is unsatisfiable without assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.deleted && !c.learnt).count()
    }

    #[inline]
    fn value(&self, lit: Lit) -> i8 {
        let v = self.assigns[lit.var().index()];
        if lit.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Value fixed at decision level 0, if any.
    pub fn fixed_value(&self, lit: Lit) -> Option<bool> {
        let v = lit.var().index();
        if v < self.assigns.len() && self.assigns[v] != UNDEF && self.level[v] == 0 {
            Some(self.value(lit) == TRUE)
        } else {
            None
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, lit: Lit, reason: u32) {
        let v = lit.var().index();
        self.assigns[v] = if lit.is_negated() { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var().index();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = lit.is_negated();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(lim);
    }

    fn attach(&mut self, idx: u32) {
        let c = &self.clauses[idx as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[(!a).code()].push(Watcher { clause: idx, blocker: b });
        self.watches[(!b).code()].push(Watcher { clause: idx, blocker: a });
    }

    /// Unit propagation. Returns the index of a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let false_lit = !p;
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cidx = w.clause as usize;
                if self.clauses[cidx].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cidx].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cidx].lits[0];
                let nw = Watcher { clause: w.clause, blocker: first };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cidx].lits.len();
                let mut found = false;
                for k in 2..len {
                    let l = self.clauses[cidx].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cidx].lits.swap(1, k);
                        self.watches[(!l).code()].push(nw);
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.clause);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, idx: usize) {
        let c = &mut self.clauses[idx];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learned clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::new(Var(0), false)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl as usize);
            }
            let start = if p.is_some() { 1 } else { 0 };
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var().index()];
            self.seen[lit.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // Drop literals implied by other literals of the clause.
        let before = learnt.clone();
        let mut kept = 1;
        for i in 1..learnt.len() {
            let v = learnt[i].var().index();
            let r = self.reason[v];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let u = q.var().index();
                    self.seen[u] || self.level[u] == 0
                });
            if !redundant {
                learnt[kept] = learnt[i];
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in &before {
            self.seen[l.var().index()] = false;
        }

        let level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, level)
    }

    /// Collects the assumptions responsible for `p` being false.
    fn analyze_final(&mut self, p: Lit) {
        self.core.clear();
        self.core.push(!p);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[p.var().index()] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i].var().index();
            if !self.seen[x] {
                continue;
            }
            let r = self.reason[x];
            if r == NO_REASON {
                if self.level[x] > 0 {
                    self.core.push(self.trail[i]);
                }
            } else {
                let lits = &self.clauses[r as usize].lits;
                for q in &lits[1..] {
                    if self.level[q.var().index()] > 0 {
                        self.seen[q.var().index()] = true;
                    }
                }
            }
            self.seen[x] = false;
        }
        self.seen[p.var().index()] = false;
        self.core.dedup();
    }

    fn reduce_db(&mut self) {
        let mut learnt: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2
            })
            .collect();
        learnt.sort_by(|&a, &b| {
            self.clauses[a].activity.partial_cmp(&self.clauses[b].activity).unwrap().then(a.cmp(&b))
        });
        let half = learnt.len() / 2;
        for &i in &learnt[..half] {
            let locked = {
                let first = self.clauses[i].lits[0];
                self.value(first) == TRUE && self.reason[first.var().index()] == i as u32
            };
            if !locked {
                self.clauses[i].deleted = true;
                self.clauses[i].lits.shrink_to_fit();
                self.learnts -= 1;
            }
        }
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !self.clauses[w.clause as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.polarity[v as usize]));
            }
        }
        None
    }

    fn out_of_budget(&self, conflicts_at_start: u64) -> bool {
        if let Some(b) = self.conflict_budget {
            if self.stats.conflicts - conflicts_at_start >= b {
                return true;
            }
        }
        if let Some(d) = self.deadline {
            if self.stats.conflicts % 64 == 0 && Instant::now() >= d {
                return true;
            }
        }
        false
    }

    fn search(&mut self, assumptions: &[Lit], restart_after: u64, conflicts_at_start: u64) -> Option<SolveResult> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.core.clear();
                    return Some(SolveResult::Unsat);
                }
                let (learnt, level) = self.analyze(confl);
                self.cancel_until(level);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let idx = self.clauses.len() as u32;
                    let first = learnt[0];
                    self.clauses.push(Clause { lits: learnt, learnt: true, deleted: false, activity: 0.0 });
                    self.attach(idx);
                    self.bump_clause(idx as usize);
                    self.learnts += 1;
                    self.enqueue(first, idx);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.out_of_budget(conflicts_at_start) {
                    return Some(SolveResult::Unknown);
                }
            } else {
                if conflicts >= restart_after {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts >= self.learnt_limit + self.trail.len() {
                    self.reduce_db();
                    self.learnt_limit += self.learnt_limit / 10;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let p = assumptions[self.decision_level() as usize];
                    match self.value(p) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            self.analyze_final(!p);
                            return Some(SolveResult::Unsat);
                        }
                        _ => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let decision = match next {
                    Some(p) => p,
                    None => match self.pick_branch() {
                        Some(l) => {
                            self.stats.decisions += 1;
                            l
                        }
                        None => return Some(SolveResult::Sat),
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(decision, NO_REASON);
            }
        }
    }
}

impl SatBackend for Solver {
    fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.polarity.push(true);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        Var(v)
    }

    fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    fn add_clause(&mut self, clause: &[Lit]) -> Result<(), SatError> {
        if let Some(&bad) = clause.iter().find(|l| l.var().index() >= self.num_vars()) {
            return Err(SatError::UnallocatedVariable(bad));
        }
        if !self.ok {
            return Ok(());
        }
        self.cancel_until(0);
        let mut lits = clause.to_vec();
        lits.sort_unstable();
        lits.dedup();
        let mut out = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            if i + 1 < lits.len() && lits[i + 1] == !l {
                return Ok(());
            }
            match self.value(l) {
                TRUE => return Ok(()),
                FALSE => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(out[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let idx = self.clauses.len() as u32;
                self.clauses.push(Clause { lits: out, learnt: false, deleted: false, activity: 0.0 });
                self.attach(idx);
            }
        }
        Ok(())
    }

    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.stats.solves += 1;
        self.core.clear();
        self.model.clear();
        if !self.ok {
            return SolveResult::Unsat;
        }
        if assumptions.iter().any(|l| l.var().index() >= self.num_vars()) {
            // Unknown variables cannot be constrained; treat as fresh.
            let max = assumptions.iter().map(|l| l.var().index()).max().unwrap();
            self.ensure_vars(max + 1);
        }
        self.cancel_until(0);
        let start = self.stats.conflicts;
        let mut restart_after = 100.0f64;
        let result = loop {
            if let Some(r) = self.search(assumptions, restart_after as u64, start) {
                break r;
            }
            self.stats.restarts += 1;
            restart_after *= 1.5;
        };
        if result == SolveResult::Sat {
            self.model = self.assigns.iter().map(|&a| a == TRUE).collect();
        }
        self.cancel_until(0);
        result
    }

    fn model_value(&self, lit: Lit) -> bool {
        self.model.get(lit.var().index()).copied().unwrap_or(false) ^ lit.is_negated()
    }

    fn core(&self) -> &[Lit] {
        &self.core
    }

    fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }
}
