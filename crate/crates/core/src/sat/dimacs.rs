use super::SatError;
use crate::cnf::{Clause, Cnf, Lit, ReasonTag, Strength, VarRegistry, VarTag};

/// Reads a DIMACS CNF file into a formula over free variables `x1..xN`.
pub fn parse_dimacs(text: &str) -> Result<Cnf, SatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let err = |line: usize, message: &str| SatError::Dimacs {
        line,
        message: message.to_string(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| err(i + 1, "bad variable count"))?;
                    let c = c.parse().map_err(|_| err(i + 1, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(err(i + 1, "malformed header")),
            }
            continue;
        }
        let (vars, _) = header.ok_or_else(|| err(i + 1, "clause before header"))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| err(i + 1, "bad literal"))?;
            if v == 0 {
                let lits = std::mem::take(&mut current);
                let mut sorted = lits.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.windows(2).any(|w| w[0] == !w[1]) {
                    // tautologies carry no information
                    continue;
                }
                clauses.push(Clause::new(sorted, ReasonTag::Derived));
            } else {
                if v.unsigned_abs() as usize > vars {
                    return Err(err(i + 1, "literal exceeds declared variable count"));
                }
                current.push(Lit::from_dimacs(v).unwrap());
            }
        }
    }
    let (vars, _) = header.ok_or_else(|| err(0, "missing header"))?;
    if !current.is_empty() {
        clauses.push(Clause::new(current, ReasonTag::Derived));
    }
    let mut reg = VarRegistry::default();
    for v in 0..vars {
        reg.register(VarTag::Free(v as u32 + 1));
    }
    Ok(Cnf::from_clauses(reg, clauses, Strength::Weak))
}
