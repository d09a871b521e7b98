//! Incremental AIG construction with constant folding and structural hashing.

use std::collections::HashMap;

use crate::aiger::{Aig, AndGate, Latch, Literal, Reset};

#[derive(Debug, Default, Clone)]
pub struct AigBuilder {
    next_var: u32,
    inputs: Vec<Literal>,
    latches: Vec<Latch>,
    outputs: Vec<Literal>,
    bads: Vec<Literal>,
    ands: Vec<AndGate>,
    strash: HashMap<(Literal, Literal), Literal>,
}

impl AigBuilder {
    pub fn new() -> Self {
        AigBuilder { next_var: 1, ..Default::default() }
    }

    fn fresh(&mut self) -> Literal {
        let l = Literal::from_var(self.next_var, false);
        self.next_var += 1;
        l
    }

    pub fn input(&mut self) -> Literal {
        let l = self.fresh();
        self.inputs.push(l);
        l
    }

    pub fn inputs(&mut self, n: usize) -> Vec<Literal> {
        (0..n).map(|_| self.input()).collect()
    }

    /// New latch with next-state FALSE; set it later with [`set_next`](Self::set_next).
    pub fn latch(&mut self, reset: bool) -> Literal {
        let lit = self.fresh();
        self.latches.push(Latch { lit, next: Literal::FALSE, reset: if reset { Reset::One } else { Reset::Zero } });
        lit
    }

    pub fn latches(&mut self, n: usize) -> Vec<Literal> {
        (0..n).map(|_| self.latch(false)).collect()
    }

    pub fn set_next(&mut self, latch: Literal, next: Literal) {
        let l = self.latches.iter_mut().find(|l| l.lit == latch).expect("latch literal");
        l.next = next;
    }

    pub fn set_reset(&mut self, latch: Literal, reset: Reset) {
        let l = self.latches.iter_mut().find(|l| l.lit == latch).expect("latch literal");
        l.reset = reset;
    }

    pub fn output(&mut self, lit: Literal) {
        self.outputs.push(lit);
    }

    pub fn bad(&mut self, lit: Literal) {
        self.bads.push(lit);
    }

    pub fn and(&mut self, a: Literal, b: Literal) -> Literal {
        if a == Literal::FALSE || b == Literal::FALSE || a == !b {
            return Literal::FALSE;
        }
        if a == Literal::TRUE || a == b {
            return b;
        }
        if b == Literal::TRUE {
            return a;
        }
        let key = if a >= b { (a, b) } else { (b, a) };
        if let Some(&g) = self.strash.get(&key) {
            return g;
        }
        let g = self.fresh();
        self.ands.push(AndGate::new(g, a, b));
        self.strash.insert(key, g);
        g
    }

    pub fn or(&mut self, a: Literal, b: Literal) -> Literal {
        !self.and(!a, !b)
    }

    /// `(a ∧ ¬b) ∨ (¬a ∧ b)`, three AND gates.
    pub fn xor(&mut self, a: Literal, b: Literal) -> Literal {
        let x = self.and(a, !b);
        let y = self.and(!a, b);
        self.or(x, y)
    }

    pub fn xnor(&mut self, a: Literal, b: Literal) -> Literal {
        !self.xor(a, b)
    }

    /// `sel ? t : e`
    pub fn mux(&mut self, sel: Literal, t: Literal, e: Literal) -> Literal {
        let x = self.and(sel, t);
        let y = self.and(!sel, e);
        self.or(x, y)
    }

    pub fn and_all(&mut self, lits: &[Literal]) -> Literal {
        self.reduce(lits, Literal::TRUE, Self::and)
    }

    /// Balanced OR tree.
    pub fn or_all(&mut self, lits: &[Literal]) -> Literal {
        self.reduce(lits, Literal::FALSE, Self::or)
    }

    fn reduce(&mut self, lits: &[Literal], unit: Literal, op: fn(&mut Self, Literal, Literal) -> Literal) -> Literal {
        match lits.len() {
            0 => unit,
            1 => lits[0],
            n => {
                let (l, r) = lits.split_at(n / 2);
                let a = self.reduce(l, unit, op);
                let b = self.reduce(r, unit, op);
                op(self, a, b)
            }
        }
    }

    /// Equality of a bit-vector with a constant.
    pub fn equals_const(&mut self, bits: &[Literal], value: u64) -> Literal {
        let terms: Vec<Literal> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if value >> i & 1 == 1 { b } else { !b })
            .collect();
        self.and_all(&terms)
    }

    /// Ripple-carry addition; returns the sum bits and the carry out.
    pub fn add(&mut self, a: &[Literal], b: &[Literal], carry_in: Literal) -> (Vec<Literal>, Literal) {
        assert_eq!(a.len(), b.len());
        let mut carry = carry_in;
        let mut sum = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let p = self.xor(x, y);
            sum.push(self.xor(p, carry));
            let g = self.and(x, y);
            let c = self.and(p, carry);
            carry = self.or(g, c);
        }
        (sum, carry)
    }

    pub fn finish(self) -> Aig {
        let aig = Aig {
            max_var: self.next_var - 1,
            inputs: self.inputs,
            latches: self.latches,
            outputs: self.outputs,
            bads: self.bads,
            ands: self.ands,
            symbols: Vec::new(),
            comments: Vec::new(),
        };
        aig.canonicalize().expect("builder output is acyclic")
    }
}
