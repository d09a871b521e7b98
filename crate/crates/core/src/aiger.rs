//! And-inverter graphs and the AIGER file format (ASCII `aag` and binary `aig`).
//!
//! Only the `M I L O A [B]` subset is supported. Constraint, justice and
//! fairness sections are rejected when non-empty.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// An AIGER literal: `2 * var + negated`. `0` is FALSE, `1` is TRUE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(pub u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn from_var(var: u32, negated: bool) -> Self {
        Literal(var * 2 + negated as u32)
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn is_constant(self) -> bool {
        self.0 < 2
    }

    /// The positive literal of the same variable.
    #[inline]
    pub fn positive(self) -> Literal {
        Literal(self.0 & !1)
    }

    #[inline]
    pub fn negate(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    /// Flips the literal when `cond` holds.
    #[inline]
    pub fn negate_if(self, cond: bool) -> Literal {
        Literal(self.0 ^ cond as u32)
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reset {
    Zero,
    One,
    /// The latch is uninitialized (AIGER writes the latch's own literal).
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub lit: Literal,
    pub next: Literal,
    pub reset: Reset,
}

impl Latch {
    /// Initial value, with undefined resets read as 0.
    pub fn init_value(&self) -> bool {
        self.reset == Reset::One
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    pub lhs: Literal,
    pub rhs0: Literal,
    pub rhs1: Literal,
}

impl AndGate {
    /// Builds a gate with operands in normalized order (`rhs0 >= rhs1`).
    pub fn new(lhs: Literal, a: Literal, b: Literal) -> Self {
        let (rhs0, rhs1) = if a >= b { (a, b) } else { (b, a) };
        AndGate { lhs, rhs0, rhs1 }
    }
}

/// An and-inverter graph with latches, outputs and bad-state properties.
///
/// Symbol table lines and the comment section are kept verbatim and never
/// interpreted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Aig {
    pub max_var: u32,
    pub inputs: Vec<Literal>,
    pub latches: Vec<Latch>,
    pub outputs: Vec<Literal>,
    pub bads: Vec<Literal>,
    pub ands: Vec<AndGate>,
    pub symbols: Vec<String>,
    pub comments: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AigerError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("variable {0} is defined more than once")]
    DuplicateDefinition(u32),
    #[error("literal {0} references an undefined variable")]
    UndefinedVariableReference(u32),
    #[error("{section} section: header declares {declared}, found {found}")]
    CountMismatch { section: &'static str, declared: usize, found: usize },
    #[error("combinational cycle through variable {0}")]
    CombinationalCycle(u32),
    #[error("unsupported AIGER feature: {0}")]
    Unsupported(String),
    #[error("binary AND section ends early")]
    TruncatedDeltaStream,
    #[error("binary AND gate {index}: operand is not below its output")]
    NonMonotoneAndIndex { index: usize },
    #[error("expected {expected} input bits, got {found} at step {step}")]
    InputArityMismatch { step: usize, expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Def {
    Input,
    Latch(usize),
    And(usize),
}

impl Aig {
    /// The bits treated as safety properties: the bad section when present,
    /// otherwise the outputs (pre-1.9 convention).
    pub fn safety_bits(&self) -> &[Literal] {
        if self.bads.is_empty() {
            &self.outputs
        } else {
            &self.bads
        }
    }

    pub fn latch_index_of_var(&self, var: u32) -> Option<usize> {
        self.latches.iter().position(|l| l.lit.var() == var)
    }

    fn definitions(&self) -> Result<HashMap<u32, Def>, AigerError> {
        let mut defs = HashMap::with_capacity(self.max_var as usize);
        let mut define = |lit: Literal, def: Def| -> Result<(), AigerError> {
            if lit.is_negated() || lit.is_constant() {
                return Err(AigerError::Malformed { line: 0, msg: format!("cannot define literal {lit}") });
            }
            if lit.var() > self.max_var {
                return Err(AigerError::UndefinedVariableReference(lit.0));
            }
            if defs.insert(lit.var(), def).is_some() {
                return Err(AigerError::DuplicateDefinition(lit.var()));
            }
            Ok(())
        };
        for &i in &self.inputs {
            define(i, Def::Input)?;
        }
        for (k, l) in self.latches.iter().enumerate() {
            define(l.lit, Def::Latch(k))?;
        }
        for (k, a) in self.ands.iter().enumerate() {
            define(a.lhs, Def::And(k))?;
        }
        Ok(defs)
    }

    /// AND gate indices in an order where operands precede their users.
    pub fn topological_order(&self) -> Result<Vec<usize>, AigerError> {
        let defs = self.definitions()?;
        let mut state = vec![0u8; self.ands.len()]; // 0 new, 1 on stack, 2 done
        let mut order = Vec::with_capacity(self.ands.len());
        for root in 0..self.ands.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0u8)];
            state[root] = 1;
            while let Some(&mut (g, ref mut child)) = stack.last_mut() {
                if *child < 2 {
                    let op = if *child == 0 { self.ands[g].rhs0 } else { self.ands[g].rhs1 };
                    *child += 1;
                    if op.is_constant() {
                        continue;
                    }
                    match defs.get(&op.var()) {
                        None => return Err(AigerError::UndefinedVariableReference(op.0)),
                        Some(Def::And(h)) => match state[*h] {
                            0 => {
                                state[*h] = 1;
                                stack.push((*h, 0));
                            }
                            1 => return Err(AigerError::CombinationalCycle(op.var())),
                            _ => {}
                        },
                        Some(_) => {}
                    }
                } else {
                    state[g] = 2;
                    order.push(g);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), AigerError> {
        let defs = self.definitions()?;
        let defined = defs.len() as u32;
        if defined != self.max_var {
            return Err(AigerError::CountMismatch {
                section: "variables",
                declared: self.max_var as usize,
                found: defined as usize,
            });
        }
        let check = |lit: Literal| -> Result<(), AigerError> {
            if lit.is_constant() || defs.contains_key(&lit.var()) {
                Ok(())
            } else {
                Err(AigerError::UndefinedVariableReference(lit.0))
            }
        };
        for l in &self.latches {
            check(l.next)?;
        }
        for &o in self.outputs.iter().chain(&self.bads) {
            check(o)?;
        }
        for a in &self.ands {
            if a.rhs0 < a.rhs1 {
                return Err(AigerError::Malformed { line: 0, msg: format!("AND {} operands not normalized", a.lhs) });
            }
        }
        self.topological_order()?;
        Ok(())
    }

    /// True when numbering follows the binary-format layout: inputs, then
    /// latches, then AND gates in increasing order with operands below outputs.
    pub fn is_canonical(&self) -> bool {
        let i = self.inputs.len() as u32;
        let l = self.latches.len() as u32;
        self.max_var == i + l + self.ands.len() as u32
            && self.inputs.iter().enumerate().all(|(k, x)| x.0 == 2 * (k as u32 + 1))
            && self.latches.iter().enumerate().all(|(k, x)| x.lit.0 == 2 * (i + k as u32 + 1))
            && self.ands.iter().enumerate().all(|(k, a)| {
                a.lhs.0 == 2 * (i + l + k as u32 + 1) && a.rhs0 < a.lhs && a.rhs1 <= a.rhs0
            })
    }

    /// Renumbers variables into the binary-format layout. Behaviour (and the
    /// order of inputs, latches, outputs and bads) is unchanged.
    pub fn canonicalize(&self) -> Result<Aig, AigerError> {
        if self.is_canonical() {
            return Ok(self.clone());
        }
        let order = self.topological_order()?;
        let mut map = vec![0u32; self.max_var as usize + 1];
        let mut next = 1u32;
        for x in &self.inputs {
            map[x.var() as usize] = next;
            next += 1;
        }
        for l in &self.latches {
            map[l.lit.var() as usize] = next;
            next += 1;
        }
        for &g in &order {
            map[self.ands[g].lhs.var() as usize] = next;
            next += 1;
        }
        let m = |lit: Literal| Literal(map[lit.var() as usize] * 2 + (lit.0 & 1));
        Ok(Aig {
            max_var: next - 1,
            inputs: self.inputs.iter().map(|&x| m(x)).collect(),
            latches: self
                .latches
                .iter()
                .map(|l| Latch { lit: m(l.lit), next: m(l.next), reset: l.reset })
                .collect(),
            outputs: self.outputs.iter().map(|&x| m(x)).collect(),
            bads: self.bads.iter().map(|&x| m(x)).collect(),
            ands: order
                .iter()
                .map(|&g| {
                    let a = self.ands[g];
                    AndGate::new(m(a.lhs), m(a.rhs0), m(a.rhs1))
                })
                .collect(),
            symbols: self.symbols.clone(),
            comments: self.comments.clone(),
        })
    }

    /// Copy of the circuit without symbol table or comments.
    pub fn without_metadata(&self) -> Aig {
        Aig { symbols: Vec::new(), comments: Vec::new(), ..self.clone() }
    }
}

struct Header {
    counts: [usize; 5],
    bads: usize,
}

fn parse_header(line: &str, magic: &str) -> Result<Header, AigerError> {
    let mut parts = line.split_ascii_whitespace();
    if parts.next() != Some(magic) {
        return Err(AigerError::MalformedHeader(format!("expected '{magic}' in {line:?}")));
    }
    let nums: Vec<usize> = parts
        .map(|p| p.parse::<usize>().map_err(|_| AigerError::MalformedHeader(format!("bad count {p:?}"))))
        .collect::<Result<_, _>>()?;
    if nums.len() < 5 || nums.len() > 9 {
        return Err(AigerError::MalformedHeader(format!("expected 5 to 9 counts, got {}", nums.len())));
    }
    for (k, name) in [(6, "constraint"), (7, "justice"), (8, "fairness")] {
        if nums.get(k).copied().unwrap_or(0) != 0 {
            return Err(AigerError::Unsupported(format!("{name} section")));
        }
    }
    if nums[0] > u32::MAX as usize / 2 - 1 {
        return Err(AigerError::MalformedHeader("maximum variable index too large".into()));
    }
    Ok(Header { counts: [nums[0], nums[1], nums[2], nums[3], nums[4]], bads: nums.get(5).copied().unwrap_or(0) })
}

struct Lines<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a [u8]) -> Self {
        Lines { text, pos: 0, line: 0 }
    }

    fn next_line(&mut self) -> Option<&'a str> {
        if self.pos >= self.text.len() {
            return None;
        }
        let rest = &self.text[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        self.line += 1;
        let raw = &rest[..end];
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        Some(std::str::from_utf8(raw).unwrap_or("\u{fffd}"))
    }

    fn section_line(&mut self, section: &'static str, declared: usize, found: usize) -> Result<&'a str, AigerError> {
        self.next_line().ok_or(AigerError::CountMismatch { section, declared, found })
    }

    fn literals(&self, line: &str, expected: &[usize]) -> Result<Vec<Literal>, AigerError> {
        let lits: Vec<Literal> = line
            .split_ascii_whitespace()
            .map(|p| {
                p.parse::<u32>()
                    .map(Literal)
                    .map_err(|_| AigerError::Malformed { line: self.line, msg: format!("not a literal: {p:?}") })
            })
            .collect::<Result<_, _>>()?;
        if !expected.contains(&lits.len()) {
            return Err(AigerError::Malformed {
                line: self.line,
                msg: format!("expected {expected:?} literals, found {}", lits.len()),
            });
        }
        Ok(lits)
    }
}

fn parse_reset(latch: Literal, value: Option<Literal>, line: usize) -> Result<Reset, AigerError> {
    match value {
        None | Some(Literal(0)) => Ok(Reset::Zero),
        Some(Literal(1)) => Ok(Reset::One),
        Some(v) if v == latch => Ok(Reset::Undefined),
        Some(v) => Err(AigerError::Malformed { line, msg: format!("invalid reset value {v}") }),
    }
}

fn parse_trailer(lines: &mut Lines<'_>, aig: &mut Aig) {
    while let Some(line) = lines.next_line() {
        if line == "c" {
            while let Some(c) = lines.next_line() {
                aig.comments.push(c.to_string());
            }
            break;
        }
        if !line.is_empty() {
            aig.symbols.push(line.to_string());
        }
    }
}

fn check_bounds(aig: &Aig) -> Result<(), AigerError> {
    let limit = 2 * aig.max_var + 1;
    let lits = aig
        .inputs
        .iter()
        .chain(aig.outputs.iter())
        .chain(aig.bads.iter())
        .chain(aig.latches.iter().flat_map(|l| [&l.lit, &l.next]))
        .chain(aig.ands.iter().flat_map(|a| [&a.lhs, &a.rhs0, &a.rhs1]));
    for l in lits {
        if l.0 > limit {
            return Err(AigerError::UndefinedVariableReference(l.0));
        }
    }
    Ok(())
}

/// Parses an ASCII (`aag`) circuit.
pub fn parse_ascii(text: &[u8]) -> Result<Aig, AigerError> {
    let mut lines = Lines::new(text);
    let header = parse_header(lines.next_line().unwrap_or(""), "aag")?;
    let [m, i, l, o, a] = header.counts;
    if i + l + a > m {
        return Err(AigerError::MalformedHeader(format!("M={m} is smaller than I+L+A={}", i + l + a)));
    }
    let mut aig = Aig { max_var: m as u32, ..Default::default() };
    for k in 0..i {
        let line = lines.section_line("input", i, k)?;
        aig.inputs.push(lines.literals(line, &[1])?[0]);
    }
    for k in 0..l {
        let line = lines.section_line("latch", l, k)?;
        let lits = lines.literals(line, &[2, 3])?;
        let reset = parse_reset(lits[0], lits.get(2).copied(), lines.line)?;
        aig.latches.push(Latch { lit: lits[0], next: lits[1], reset });
    }
    for k in 0..o {
        let line = lines.section_line("output", o, k)?;
        aig.outputs.push(lines.literals(line, &[1])?[0]);
    }
    for k in 0..header.bads {
        let line = lines.section_line("bad", header.bads, k)?;
        aig.bads.push(lines.literals(line, &[1])?[0]);
    }
    for k in 0..a {
        let line = lines.section_line("and", a, k)?;
        let lits = lines.literals(line, &[3])?;
        aig.ands.push(AndGate::new(lits[0], lits[1], lits[2]));
    }
    parse_trailer(&mut lines, &mut aig);
    check_bounds(&aig)?;
    if (i + l + a) as u32 != aig.max_var {
        // Some variable in 1..=M is never defined; report the first one.
        let defs = aig.definitions()?;
        let missing = (1..=aig.max_var).find(|v| !defs.contains_key(v)).unwrap_or(0);
        return Err(AigerError::UndefinedVariableReference(2 * missing));
    }
    aig.validate()?;
    Ok(aig)
}

fn decode_delta(bytes: &[u8], pos: &mut usize) -> Result<u32, AigerError> {
    let mut value: u64 = 0;
    let mut shift = 0;
    loop {
        let &b = bytes.get(*pos).ok_or(AigerError::TruncatedDeltaStream)?;
        *pos += 1;
        value |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            break;
        }
        shift += 7;
        if shift > 35 {
            return Err(AigerError::Malformed { line: 0, msg: "delta value overflows".into() });
        }
    }
    u32::try_from(value).map_err(|_| AigerError::Malformed { line: 0, msg: "delta value overflows".into() })
}

fn encode_delta(out: &mut Vec<u8>, mut value: u32) {
    while value >= 0x80 {
        out.push((value as u8 & 0x7f) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Parses a binary (`aig`) circuit.
pub fn parse_binary(bytes: &[u8]) -> Result<Aig, AigerError> {
    let mut lines = Lines::new(bytes);
    let header = parse_header(lines.next_line().unwrap_or(""), "aig")?;
    let [m, i, l, o, a] = header.counts;
    if i + l + a != m {
        return Err(AigerError::MalformedHeader(format!("binary format requires M = I+L+A, got {m} vs {}", i + l + a)));
    }
    let mut aig = Aig { max_var: m as u32, ..Default::default() };
    aig.inputs = (1..=i as u32).map(|v| Literal(2 * v)).collect();
    for k in 0..l {
        let line = lines.section_line("latch", l, k)?;
        let lits = lines.literals(line, &[1, 2])?;
        let lit = Literal(2 * (i + k + 1) as u32);
        let reset = parse_reset(lit, lits.get(1).copied(), lines.line)?;
        aig.latches.push(Latch { lit, next: lits[0], reset });
    }
    for k in 0..o {
        let line = lines.section_line("output", o, k)?;
        aig.outputs.push(lines.literals(line, &[1])?[0]);
    }
    for k in 0..header.bads {
        let line = lines.section_line("bad", header.bads, k)?;
        aig.bads.push(lines.literals(line, &[1])?[0]);
    }
    let mut pos = lines.pos;
    for k in 0..a {
        let lhs = 2 * (i + l + k + 1) as u32;
        let d0 = decode_delta(bytes, &mut pos)?;
        let d1 = decode_delta(bytes, &mut pos)?;
        if d0 == 0 || d0 > lhs {
            return Err(AigerError::NonMonotoneAndIndex { index: k });
        }
        let rhs0 = lhs - d0;
        if d1 > rhs0 {
            return Err(AigerError::NonMonotoneAndIndex { index: k });
        }
        aig.ands.push(AndGate { lhs: Literal(lhs), rhs0: Literal(rhs0), rhs1: Literal(rhs0 - d1) });
    }
    let mut rest = Lines::new(&bytes[pos.min(bytes.len())..]);
    parse_trailer(&mut rest, &mut aig);
    check_bounds(&aig)?;
    aig.validate()?;
    Ok(aig)
}

/// Parses either format, dispatching on the header magic.
pub fn parse(bytes: &[u8]) -> Result<Aig, AigerError> {
    if bytes.starts_with(b"aig") {
        parse_binary(bytes)
    } else {
        parse_ascii(bytes)
    }
}

fn write_reset(out: &mut String, latch: &Latch) {
    match latch.reset {
        Reset::Zero => {}
        Reset::One => out.push_str(" 1"),
        Reset::Undefined => out.push_str(&format!(" {}", latch.lit)),
    }
}

fn write_trailer(out: &mut Vec<u8>, aig: &Aig) {
    for s in &aig.symbols {
        out.extend_from_slice(s.as_bytes());
        out.push(b'\n');
    }
    if !aig.comments.is_empty() {
        out.extend_from_slice(b"c\n");
        for c in &aig.comments {
            out.extend_from_slice(c.as_bytes());
            out.push(b'\n');
        }
    }
}

fn header_line(magic: &str, aig: &Aig) -> String {
    let mut s = format!(
        "{magic} {} {} {} {} {}",
        aig.max_var,
        aig.inputs.len(),
        aig.latches.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    if !aig.bads.is_empty() {
        s.push_str(&format!(" {}", aig.bads.len()));
    }
    s.push('\n');
    s
}

pub fn serialize_ascii(aig: &Aig) -> Vec<u8> {
    let mut s = header_line("aag", aig);
    for x in &aig.inputs {
        s.push_str(&format!("{x}\n"));
    }
    for l in &aig.latches {
        s.push_str(&format!("{} {}", l.lit, l.next));
        write_reset(&mut s, l);
        s.push('\n');
    }
    for x in aig.outputs.iter().chain(&aig.bads) {
        s.push_str(&format!("{x}\n"));
    }
    for a in &aig.ands {
        s.push_str(&format!("{} {} {}\n", a.lhs, a.rhs0, a.rhs1));
    }
    let mut out = s.into_bytes();
    write_trailer(&mut out, aig);
    out
}

/// Serializes to the binary format, renumbering first if the circuit is not
/// already in canonical layout.
pub fn serialize_binary(aig: &Aig) -> Result<Vec<u8>, AigerError> {
    let aig = aig.canonicalize()?;
    let mut s = header_line("aig", &aig);
    for l in &aig.latches {
        s.push_str(&l.next.to_string());
        write_reset(&mut s, l);
        s.push('\n');
    }
    for x in aig.outputs.iter().chain(&aig.bads) {
        s.push_str(&format!("{x}\n"));
    }
    let mut out = s.into_bytes();
    for a in &aig.ands {
        encode_delta(&mut out, a.lhs.0 - a.rhs0.0);
        encode_delta(&mut out, a.rhs0.0 - a.rhs1.0);
    }
    write_trailer(&mut out, &aig);
    Ok(out)
}

/// Per-step values of outputs and bad bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub outputs: Vec<Vec<bool>>,
    pub bads: Vec<Vec<bool>>,
}

/// Compiled combinational evaluator. Evaluates 64 independent patterns at a
/// time, one per bit of a `u64` word.
#[derive(Debug, Clone)]
pub struct Evaluator {
    order: Vec<AndGate>,
    inputs: Vec<u32>,
    latches: Vec<Latch>,
    num_vars: usize,
}

impl Evaluator {
    pub fn new(aig: &Aig) -> Result<Self, AigerError> {
        let order = aig.topological_order()?.into_iter().map(|g| aig.ands[g]).collect();
        Ok(Evaluator {
            order,
            inputs: aig.inputs.iter().map(|l| l.var()).collect(),
            latches: aig.latches.clone(),
            num_vars: aig.max_var as usize + 1,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    /// Evaluates all AND gates given per-input and per-latch words. The
    /// returned table is indexed by variable.
    pub fn eval(&self, inputs: &[u64], state: &[u64], values: &mut Vec<u64>) {
        values.clear();
        values.resize(self.num_vars, 0);
        for (v, &w) in self.inputs.iter().zip(inputs) {
            values[*v as usize] = w;
        }
        for (l, &w) in self.latches.iter().zip(state) {
            values[l.lit.var() as usize] = w;
        }
        for g in &self.order {
            values[g.lhs.var() as usize] = lit_word(values, g.rhs0) & lit_word(values, g.rhs1);
        }
    }

    /// Next-state words, one per latch.
    pub fn next_state(&self, values: &[u64]) -> Vec<u64> {
        self.latches.iter().map(|l| lit_word(values, l.next)).collect()
    }
}

#[inline]
pub fn lit_word(values: &[u64], lit: Literal) -> u64 {
    let w = if lit.var() == 0 { 0 } else { values[lit.var() as usize] };
    if lit.is_negated() {
        !w
    } else {
        w
    }
}

fn broadcast(b: bool) -> u64 {
    if b {
        u64::MAX
    } else {
        0
    }
}

/// Runs the circuit from its reset state. Undefined resets start at 0.
pub fn simulate(aig: &Aig, inputs: &[Vec<bool>]) -> Result<Trace, AigerError> {
    let init: Vec<bool> = aig.latches.iter().map(Latch::init_value).collect();
    simulate_from(aig, &init, inputs)
}

/// Runs the circuit from an explicit initial latch valuation.
pub fn simulate_from(aig: &Aig, init: &[bool], inputs: &[Vec<bool>]) -> Result<Trace, AigerError> {
    let ev = Evaluator::new(aig)?;
    if init.len() != aig.latches.len() {
        return Err(AigerError::InputArityMismatch { step: 0, expected: aig.latches.len(), found: init.len() });
    }
    let mut state: Vec<u64> = init.iter().map(|&b| broadcast(b)).collect();
    let mut trace = Trace::default();
    let mut values = Vec::new();
    for (step, vec) in inputs.iter().enumerate() {
        if vec.len() != aig.inputs.len() {
            return Err(AigerError::InputArityMismatch { step, expected: aig.inputs.len(), found: vec.len() });
        }
        let words: Vec<u64> = vec.iter().map(|&b| broadcast(b)).collect();
        ev.eval(&words, &state, &mut values);
        trace.outputs.push(aig.outputs.iter().map(|&o| lit_word(&values, o) & 1 == 1).collect());
        trace.bads.push(aig.bads.iter().map(|&o| lit_word(&values, o) & 1 == 1).collect());
        state = ev.next_state(&values);
    }
    Ok(trace)
}

impl Trace {
    /// Values of the bit the checker treats as the safety property `index`.
    pub fn safety_bit(&self, aig: &Aig, index: usize) -> Vec<bool> {
        let rows = if aig.bads.is_empty() { &self.outputs } else { &self.bads };
        rows.iter().map(|r| r[index]).collect()
    }
}
