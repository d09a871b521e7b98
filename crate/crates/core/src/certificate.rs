//! The shippable proof: a CNF over latch literals in AIGER numbering.
//!
//! ```text
//! c <free comment>
//! c circuit-sha256 <64 hex digits>
//! p pch <number of clauses>
//! <literal> ... 0
//! ```
//!
//! Literals follow the circuit file: even is the latch output, odd its
//! negation. The digest is SHA-256 over the circuit's ASCII serialization
//! without symbols or comments.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::aiger::{serialize_ascii, Aig, Literal};
use crate::encoder::{Cnf, VarMap};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub clauses: Vec<Vec<Literal>>,
    pub digest: Option<String>,
    pub comments: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("line {line}: not a literal: {token:?}")]
    NonNumericLiteral { line: usize, token: String },
    #[error("line {line}: clause must end with a single 0")]
    UnterminatedClause { line: usize },
    #[error("line {line}: variable {var} occurs twice in a clause")]
    RepeatedVariable { line: usize, var: u32 },
    #[error("line {line}: malformed circuit digest")]
    MalformedDigest { line: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BindError {
    #[error("literal {0} is not a latch of the circuit")]
    NonLatchVariable(u32),
    #[error("certificate was issued for a different circuit")]
    DigestMismatch,
}

const DIGEST_PREFIX: &str = "circuit-sha256 ";

/// Hex SHA-256 of the circuit's canonical ASCII form.
pub fn circuit_digest(aig: &Aig) -> String {
    hex::encode(Sha256::digest(serialize_ascii(&aig.without_metadata())))
}

impl Certificate {
    pub fn new(clauses: Vec<Vec<Literal>>) -> Self {
        Certificate { clauses, ..Default::default() }
    }

    pub fn with_digest_of(mut self, aig: &Aig) -> Self {
        self.digest = Some(circuit_digest(aig));
        self
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

pub fn write_certificate(cert: &Certificate) -> Vec<u8> {
    let mut out = String::new();
    for c in &cert.comments {
        out.push_str("c ");
        out.push_str(c);
        out.push('\n');
    }
    if let Some(d) = &cert.digest {
        out.push_str("c ");
        out.push_str(DIGEST_PREFIX);
        out.push_str(d);
        out.push('\n');
    }
    out.push_str(&format!("p pch {}\n", cert.clauses.len()));
    for clause in &cert.clauses {
        for l in clause {
            out.push_str(&l.0.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out.into_bytes()
}

fn parse_digest(s: &str, line: usize) -> Result<String, CertificateError> {
    let s = s.trim();
    if s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit()) {
        Ok(s.to_ascii_lowercase())
    } else {
        Err(CertificateError::MalformedDigest { line })
    }
}

pub fn read_certificate(bytes: &[u8]) -> Result<Certificate, CertificateError> {
    let text = String::from_utf8_lossy(bytes);
    let mut cert = Certificate::default();
    let mut declared = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim_end_matches('\r');
        if declared.is_none() {
            if raw == "c" || raw.starts_with("c ") {
                let body = raw.get(2..).unwrap_or("");
                match body.strip_prefix(DIGEST_PREFIX) {
                    Some(d) => cert.digest = Some(parse_digest(d, line)?),
                    None => cert.comments.push(body.to_string()),
                }
                continue;
            }
            let parts: Vec<&str> = raw.split_ascii_whitespace().collect();
            match parts.as_slice() {
                ["p", "pch", n] => {
                    declared = Some(n.parse::<usize>().map_err(|_| CertificateError::MalformedHeader { line })?);
                }
                _ => return Err(CertificateError::MalformedHeader { line }),
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        let mut clause = Vec::new();
        let mut terminated = false;
        for tok in raw.split_ascii_whitespace() {
            if terminated {
                return Err(CertificateError::UnterminatedClause { line });
            }
            let v: u32 = tok
                .parse()
                .map_err(|_| CertificateError::NonNumericLiteral { line, token: tok.to_string() })?;
            if v == 0 {
                terminated = true;
            } else {
                let lit = Literal(v);
                if clause.iter().any(|l: &Literal| l.var() == lit.var()) {
                    return Err(CertificateError::RepeatedVariable { line, var: lit.var() });
                }
                clause.push(lit);
            }
        }
        if !terminated {
            return Err(CertificateError::UnterminatedClause { line });
        }
        cert.clauses.push(clause);
    }
    let declared = declared.ok_or(CertificateError::MalformedHeader { line: text.lines().count() + 1 })?;
    if declared != cert.clauses.len() {
        return Err(CertificateError::ClauseCountMismatch { declared, found: cert.clauses.len() });
    }
    Ok(cert)
}

/// Maps a certificate onto the encoder's current-state variables. When the
/// certificate carries a digest and `check_digest` is set, the digest must
/// match `aig`.
pub fn bind(cert: &Certificate, aig: &Aig, varmap: &VarMap, check_digest: bool) -> Result<Cnf, BindError> {
    if check_digest {
        if let Some(d) = &cert.digest {
            if *d != circuit_digest(aig) {
                return Err(BindError::DigestMismatch);
            }
        }
    }
    let mut cnf = Cnf::default();
    for clause in &cert.clauses {
        let lits = clause
            .iter()
            .map(|&l| varmap.current_from_aiger(l).ok_or(BindError::NonLatchVariable(l.0)))
            .collect::<Result<Vec<_>, _>>()?;
        cnf.clauses.push(lits);
    }
    Ok(cnf)
}

/// Inverse of [`bind`] for clauses over current-state solver literals.
pub fn from_solver_clauses(clauses: &[Vec<crate::sat::Lit>], varmap: &VarMap) -> Certificate {
    Certificate::new(
        clauses
            .iter()
            .map(|c| c.iter().map(|&l| varmap.aiger_from_current(l).expect("current-state literal")).collect())
            .collect(),
    )
}
