//! Counterexample traces and the AIGER witness format.

use thiserror::Error;

use crate::aiger::{simulate_from, Aig, AigerError};

/// An input trace from an initial state to a bad state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub safety_index: usize,
    /// Latch values at step 0.
    pub init: Vec<bool>,
    /// One input vector per step; the bad bit fires at the last step.
    pub inputs: Vec<Vec<bool>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

impl Counterexample {
    /// Number of transitions taken.
    pub fn len(&self) -> usize {
        self.inputs.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.len() <= 1
    }

    /// Replays the trace; true if the selected bit is 1 at the final step.
    pub fn replay(&self, aig: &Aig) -> Result<bool, AigerError> {
        if self.inputs.is_empty() {
            return Ok(false);
        }
        let trace = simulate_from(aig, &self.init, &self.inputs)?;
        let bits = trace.safety_bit(aig, self.safety_index);
        Ok(bits.last().copied().unwrap_or(false))
    }

    pub fn to_witness(&self) -> String {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        let mut out = format!("1\nb{}\n{}\n", self.safety_index, bits(&self.init));
        for step in &self.inputs {
            out.push_str(&bits(step));
            out.push('\n');
        }
        out.push_str(".\n");
        out
    }

    pub fn parse_witness(text: &str) -> Result<Self, WitnessError> {
        let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
        let err = |line: usize, msg: &str| WitnessError::Malformed { line: line + 1, msg: msg.to_string() };
        let bits = |line: usize, s: &str| -> Result<Vec<bool>, WitnessError> {
            s.chars()
                .map(|c| match c {
                    '0' | 'x' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(err(line, "expected a bit string")),
                })
                .collect()
        };
        if lines.first() != Some(&"1") {
            return Err(err(0, "expected status line '1'"));
        }
        let prop = lines.get(1).ok_or_else(|| err(1, "missing property line"))?;
        let safety_index = prop
            .strip_prefix('b')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(1, "expected property 'b<index>'"))?;
        let init = bits(2, lines.get(2).ok_or_else(|| err(2, "missing initial state"))?)?;
        let mut inputs = Vec::new();
        for (k, line) in lines.iter().enumerate().skip(3) {
            if *line == "." {
                return Ok(Counterexample { safety_index, init, inputs });
            }
            inputs.push(bits(k, line)?);
        }
        Err(err(lines.len(), "missing terminating '.'"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_ascii;

    #[test]
    fn witness_round_trip() {
        let cex = Counterexample { safety_index: 0, init: vec![false, true], inputs: vec![vec![true], vec![false]] };
        let text = cex.to_witness();
        assert_eq!(text, "1\nb0\n01\n1\n0\n.\n");
        assert_eq!(Counterexample::parse_witness(&text).unwrap(), cex);
        assert_eq!(cex.len(), 1);
    }

    #[test]
    fn replay_detects_bad() {
        // bad = latch, latch' = input
        let aig = parse_ascii(b"aag 2 1 1 0 0 1\n2\n4 2\n4\n").unwrap();
        let hit = Counterexample { safety_index: 0, init: vec![false], inputs: vec![vec![true], vec![false]] };
        assert!(hit.replay(&aig).unwrap());
        let miss = Counterexample { safety_index: 0, init: vec![false], inputs: vec![vec![false], vec![false]] };
        assert!(!miss.replay(&aig).unwrap());
    }

    #[test]
    fn malformed() {
        assert!(Counterexample::parse_witness("0\n").is_err());
        assert!(Counterexample::parse_witness("1\nb0\n0\n1\n").is_err());
        assert!(Counterexample::parse_witness("1\nb0\n0\n2\n.\n").is_err());
    }
}
