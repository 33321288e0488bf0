//! Reader for proof text.

use thiserror::Error;

use super::{CellLit, ProofClause, ProofNode};
use crate::grid::CellRef;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofSyntaxError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unbound binding {0}")]
    UnboundBinding(String),
    #[error("bad variable name {0:?}")]
    BadVariableName(String),
}

fn syntax(position: usize, message: impl Into<String>) -> ProofSyntaxError {
    ProofSyntaxError::Syntax {
        position,
        message: message.into(),
    }
}

#[derive(Debug)]
enum Sexp<'a> {
    Atom(&'a str, usize),
    List(Vec<Sexp<'a>>, usize),
}

impl Sexp<'_> {
    fn position(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn read_sexp(text: &str) -> Result<Sexp<'_>, ProofSyntaxError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if done.is_some() {
            return Err(syntax(i, "trailing input"));
        }
        match b {
            b'(' => {
                stack.push((Vec::new(), i));
                i += 1;
            }
            b')' => {
                let (items, start) = stack.pop().ok_or_else(|| syntax(i, "unbalanced ')'"))?;
                let list = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => done = Some(list),
                }
                i += 1;
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                let atom = Sexp::Atom(&text[start..i], start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(atom),
                    None => done = Some(atom),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(syntax(*start, "unclosed '('"));
    }
    done.ok_or_else(|| syntax(0, "empty input"))
}

fn parse_var(name: &str) -> Result<CellRef, ProofSyntaxError> {
    let bad = || ProofSyntaxError::BadVariableName(name.to_string());
    let b = name.as_bytes();
    if b.len() != 6 || b[0] != b'c' || b[3] != b'_' {
        return Err(bad());
    }
    let digits = [b[1], b[2], b[4], b[5]];
    if !digits.iter().all(u8::is_ascii_digit) {
        return Err(bad());
    }
    let row = usize::from(b[1] - b'0') * 10 + usize::from(b[2] - b'0');
    let col = usize::from(b[4] - b'0') * 10 + usize::from(b[5] - b'0');
    if row == 0 || col == 0 {
        return Err(bad());
    }
    Ok(CellRef::new(row - 1, col - 1))
}

fn head<'a>(items: &'a [Sexp<'a>]) -> Option<&'a str> {
    match items.first() {
        Some(Sexp::Atom(a, _)) => Some(a),
        _ => None,
    }
}

fn parse_litname(s: &Sexp) -> Result<CellLit, ProofSyntaxError> {
    match s {
        Sexp::Atom(a, _) => Ok(CellLit::new(parse_var(a)?, true)),
        Sexp::List(items, pos) => match (head(items), items.len()) {
            (Some("not"), 2) => match &items[1] {
                Sexp::Atom(a, _) => Ok(CellLit::new(parse_var(a)?, false)),
                other => Err(syntax(other.position(), "expected a variable after 'not'")),
            },
            _ => Err(syntax(*pos, "expected a literal")),
        },
    }
}

fn parse_clause(s: &Sexp) -> Result<ProofClause, ProofSyntaxError> {
    if let Sexp::List(items, pos) = s {
        if head(items) == Some("or") {
            if items.len() < 2 {
                return Err(syntax(*pos, "'or' needs at least one literal"));
            }
            return items[1..]
                .iter()
                .map(parse_litname)
                .collect::<Result<Vec<_>, _>>()
                .map(ProofClause);
        }
    }
    parse_litname(s).map(ProofClause::unit)
}

fn parse_conclusion(s: &Sexp) -> Result<ProofClause, ProofSyntaxError> {
    match s {
        Sexp::Atom("false", _) => Ok(ProofClause::default()),
        other => parse_clause(other),
    }
}

fn parse_bindname(a: &str) -> Option<u32> {
    let digits = a.strip_prefix("a!")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn parse_expr(s: &Sexp, scope: &mut Vec<u32>) -> Result<ProofNode, ProofSyntaxError> {
    match s {
        Sexp::Atom(a, pos) => {
            if a.starts_with("a!") {
                let n = parse_bindname(a).ok_or_else(|| syntax(*pos, "bad binding name"))?;
                if !scope.contains(&n) {
                    return Err(ProofSyntaxError::UnboundBinding(a.to_string()));
                }
                Ok(ProofNode::Ref(n))
            } else if *a == "false" {
                Err(syntax(*pos, "'false' is only allowed as a conclusion"))
            } else {
                Ok(ProofNode::Fact(CellLit::new(parse_var(a)?, true)))
            }
        }
        Sexp::List(items, pos) => match head(items) {
            Some("not") => parse_litname(s).map(ProofNode::Fact),
            Some("asserted") => {
                if items.len() != 2 {
                    return Err(syntax(*pos, "'asserted' takes one clause"));
                }
                parse_clause(&items[1]).map(ProofNode::Asserted)
            }
            Some("unit-resolution") => {
                if items.len() < 4 {
                    return Err(syntax(
                        *pos,
                        "'unit-resolution' needs a main proof, at least one unit, and a conclusion",
                    ));
                }
                let main = parse_expr(&items[1], scope)?;
                let units = items[2..items.len() - 1]
                    .iter()
                    .map(|u| parse_expr(u, scope))
                    .collect::<Result<Vec<_>, _>>()?;
                let conclusion = parse_conclusion(&items[items.len() - 1])?;
                Ok(ProofNode::UnitResolution {
                    main: Box::new(main),
                    units,
                    conclusion,
                })
            }
            Some("let") => {
                if items.len() != 3 {
                    return Err(syntax(*pos, "'let' takes a binding list and a body"));
                }
                let Sexp::List(binds, bpos) = &items[1] else {
                    return Err(syntax(items[1].position(), "expected a binding list"));
                };
                if binds.is_empty() {
                    return Err(syntax(*bpos, "empty binding list"));
                }
                let depth = scope.len();
                let mut bindings = Vec::with_capacity(binds.len());
                for b in binds {
                    let Sexp::List(pair, ppos) = b else {
                        return Err(syntax(b.position(), "expected (name expr)"));
                    };
                    let [Sexp::Atom(name, npos), expr] = pair.as_slice() else {
                        return Err(syntax(*ppos, "expected (name expr)"));
                    };
                    let n =
                        parse_bindname(name).ok_or_else(|| syntax(*npos, "bad binding name"))?;
                    let e = parse_expr(expr, scope)?;
                    scope.push(n);
                    bindings.push((n, e));
                }
                let body = parse_expr(&items[2], scope);
                scope.truncate(depth);
                Ok(ProofNode::Let {
                    bindings,
                    body: Box::new(body?),
                })
            }
            _ => Err(syntax(
                *pos,
                "expected let, unit-resolution, asserted, or a literal",
            )),
        },
    }
}

pub fn parse_proof(text: &str) -> Result<ProofNode, ProofSyntaxError> {
    let sexp = read_sexp(text)?;
    parse_expr(&sexp, &mut Vec::new())
}

/// Collapses whitespace runs to one space and drops spaces next to parentheses.
pub fn canonical_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && ch != ')' && !out.is_empty() && !out.ends_with('(') {
            out.push(' ');
        }
        pending_space = false;
        out.push(ch);
    }
    out
}
