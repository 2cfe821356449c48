use std::fmt;

use super::{atom, fact};
use crate::syntax::{Literal, MappingKind, P2PSystem, PeerRule};

/// A CNF formula; literal `k` is variable `|k|`, negated when `k < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        let f = CnfFormula { num_vars, clauses };
        debug_assert!(f.is_valid());
        f
    }

    pub fn is_valid(&self) -> bool {
        self.clauses.iter().all(|c| !c.is_empty() && c.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars))
    }

    /// Truth under an assignment; bit `i` is variable `i+1`.
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| (assignment >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
    }

    /// Brute-force satisfiability.
    pub fn satisfiable(&self) -> bool {
        (0..1u64 << self.num_vars).any(|a| self.eval(a))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("DIMACS line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// Reads DIMACS CNF: `c` comments, a `p cnf V C` header, `0`-terminated clauses.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let err = |line: usize, message: String| DimacsError { line, message };
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, _] => num_vars = Some(v.parse::<usize>().map_err(|e| err(i + 1, e.to_string()))?),
                _ => return Err(err(i + 1, "expected `p cnf <vars> <clauses>`".into())),
            }
            continue;
        }
        let n = num_vars.ok_or_else(|| err(i + 1, "clause before the `p cnf` header".into()))?;
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| err(i + 1, format!("bad literal `{tok}`")))?;
            if l == 0 {
                if cur.is_empty() {
                    return Err(err(i + 1, "empty clause".into()));
                }
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() as usize > n {
                return Err(err(i + 1, format!("variable {} out of range 1..{n}", l.unsigned_abs())));
            } else {
                cur.push(l);
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    let num_vars = num_vars.ok_or_else(|| err(0, "missing `p cnf` header".into()))?;
    Ok(CnfFormula { num_vars, clauses })
}

/// The two-peer system whose no-import model is max-min weak iff `f` is unsatisfiable.
pub fn encode_sat(f: &CnfFormula) -> P2PSystem {
    let mut sys = P2PSystem::new();
    let var = |i: usize| format!("x{i}");
    let p1 = sys.peer_mut(1);
    for i in 1..=f.num_vars {
        p1.database.insert(fact(1, "variable", &[&var(i)]));
    }
    p1.database.insert(fact(1, "truthValue", &["true"]));
    p1.database.insert(fact(1, "truthValue", &["false"]));

    let p2 = sys.peer_mut(2);
    for i in 1..=f.num_vars {
        p2.database.insert(fact(2, "variable", &[&var(i)]));
    }
    for (k, c) in f.clauses.iter().enumerate() {
        let cname = format!("c{}", k + 1);
        for &l in c {
            let pred = if l > 0 { "positive" } else { "negated" };
            p2.database.insert(fact(2, pred, &[&var(l.unsigned_abs() as usize), &cname]));
        }
    }
    p2.mapping_rules.push(PeerRule::mapping(
        MappingKind::Max,
        atom(2, "assign", &["X", "V"]),
        vec![atom(1, "variable", &["X"]), atom(1, "truthValue", &["V"])],
        vec![],
    ));
    let pos = |p: &str, a: &[&str]| Literal::pos(atom(2, p, a));
    let neg = |p: &str, a: &[&str]| Literal::neg(atom(2, p, a));
    let std = |h: &str, ha: &[&str], body: Vec<Literal>| PeerRule::standard(atom(2, h, ha), body, vec![]);
    p2.standard_rules = vec![
        std("clause", &["C"], vec![pos("positive", &["X", "C"])]),
        std("clause", &["C"], vec![pos("negated", &["X", "C"])]),
        std("holds", &["C"], vec![pos("positive", &["X", "C"]), pos("assign", &["X", "true"])]),
        std("holds", &["C"], vec![pos("negated", &["X", "C"]), pos("assign", &["X", "false"])]),
        std("assignment", &[], vec![pos("assign", &["X", "V"])]),
    ];
    p2.constraints = vec![
        PeerRule::constraint(vec![pos("assign", &["X", "true"]), pos("assign", &["X", "false"])], vec![]),
        PeerRule::constraint(vec![pos("clause", &["C"]), neg("holds", &["C"]), pos("assignment", &[])], vec![]),
        PeerRule::constraint(
            vec![
                pos("variable", &["X"]),
                neg("assign", &["X", "true"]),
                neg("assign", &["X", "false"]),
                pos("assignment", &[]),
            ],
            vec![],
        ),
    ];
    sys
}
