//! DIMACS CNF import/export, mostly for dumping queries while debugging.

use thiserror::Error;

use super::Lit;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing or malformed 'p cnf' header")]
    MalformedHeader,
    #[error("not a literal: {0:?}")]
    NonNumericLiteral(String),
    #[error("literal {0} exceeds the declared variable count")]
    VariableOutOfRange(i64),
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

pub fn parse(text: &str) -> Result<Cnf, DimacsError> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_ascii_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                return Err(DimacsError::MalformedHeader);
            }
            let v = parts[2].parse::<usize>().map_err(|_| DimacsError::MalformedHeader)?;
            let c = parts[3].parse::<usize>().map_err(|_| DimacsError::MalformedHeader)?;
            header = Some((v, c));
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MalformedHeader)?;
        for tok in line.split_ascii_whitespace() {
            let x: i64 = tok.parse().map_err(|_| DimacsError::NonNumericLiteral(tok.to_string()))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > num_vars {
                    return Err(DimacsError::VariableOutOfRange(x));
                }
                current.push(Lit::from_dimacs(x).ok_or(DimacsError::VariableOutOfRange(x))?);
            }
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MalformedHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch { declared, found: clauses.len() });
    }
    Ok(Cnf { num_vars, clauses })
}

pub fn write(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
