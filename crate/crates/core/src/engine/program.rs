//! Non-ground logic programs over peer atoms, as produced by the rewritings.

use std::fmt;

use super::EngineError;
use crate::syntax::{BuiltinAtom, PeerAtom};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Body {
    pub pos: Vec<PeerAtom>,
    pub neg: Vec<PeerAtom>,
    pub builtins: Vec<BuiltinAtom>,
}

impl Body {
    pub fn new(pos: Vec<PeerAtom>, neg: Vec<PeerAtom>, builtins: Vec<BuiltinAtom>) -> Self {
        Body { pos, neg, builtins }
    }
    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty() && self.builtins.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    /// Disjunction of atoms; empty means constraint, one atom means a normal rule.
    Atoms(Vec<PeerAtom>),
    /// Exclusive disjunction `A ⊕ A'`.
    Xor(PeerAtom, PeerAtom),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Body,
}

impl Rule {
    pub fn fact(a: PeerAtom) -> Self {
        Rule { head: Head::Atoms(vec![a]), body: Body::default() }
    }
    pub fn normal(h: PeerAtom, body: Body) -> Self {
        Rule { head: Head::Atoms(vec![h]), body }
    }
    pub fn disjunctive(heads: Vec<PeerAtom>, body: Body) -> Self {
        Rule { head: Head::Atoms(heads), body }
    }
    pub fn constraint(body: Body) -> Self {
        Rule { head: Head::Atoms(Vec::new()), body }
    }
    pub fn head_atoms(&self) -> Vec<&PeerAtom> {
        match &self.head {
            Head::Atoms(v) => v.iter().collect(),
            Head::Xor(a, b) => vec![a, b],
        }
    }
}

/// `A ⊕ A' ← B` becomes `A ← B, not A'`, `A' ← B, not A` and `← A, A'`.
pub fn expand_xor(rule: &Rule) -> Result<[Rule; 3], EngineError> {
    let Head::Xor(a, b) = &rule.head else {
        return Err(EngineError::NotXor);
    };
    let with_neg = |h: &PeerAtom, n: &PeerAtom| {
        let mut body = rule.body.clone();
        body.neg.push(n.clone());
        Rule::normal(h.clone(), body)
    };
    Ok([
        with_neg(a, b),
        with_neg(b, a),
        Rule::constraint(Body::new(vec![a.clone(), b.clone()], vec![], vec![])),
    ])
}

/// A non-ground program; rules keep their insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn push(&mut self, r: Rule) {
        self.rules.push(r);
    }
    /// Replaces every ⊕ rule by its three-rule expansion.
    pub fn expand_xor(&self) -> Program {
        let mut out = Program::new();
        for r in &self.rules {
            match r.head {
                Head::Xor(..) => out.rules.extend(expand_xor(r).expect("xor head")),
                Head::Atoms(_) => out.rules.push(r.clone()),
            }
        }
        out
    }
    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(|r| matches!(&r.head, Head::Atoms(v) if v.len() <= 1))
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.pos.iter().map(|a| a.to_string()).collect();
        parts.extend(self.neg.iter().map(|a| format!("not {a}")));
        parts.extend(self.builtins.iter().map(|b| format!("{} {} {}", b.left, b.op.symbol(), b.right)));
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Atoms(v) => {
                let hs: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                f.write_str(&hs.join(" | "))?;
            }
            Head::Xor(a, b) => write!(f, "{a} (+) {b}")?,
        }
        if self.body.is_empty() {
            if matches!(&self.head, Head::Atoms(v) if v.is_empty()) {
                f.write_str(":- .")
            } else {
                f.write_str(".")
            }
        } else if matches!(&self.head, Head::Atoms(v) if v.is_empty()) {
            write!(f, ":- {}.", self.body)
        } else {
            write!(f, " :- {}.", self.body)
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    #[test]
    fn xor_expansion_is_verbatim() {
        let p = PeerAtom::new(1, "p", vec![Term::var("X")]);
        let pp = PeerAtom::new(1, "p__not", vec![Term::var("X")]);
        let q = PeerAtom::new(2, "q", vec![Term::var("X")]);
        let r = Rule { head: Head::Xor(p.clone(), pp.clone()), body: Body::new(vec![q.clone()], vec![], vec![]) };
        let [a, b, c] = expand_xor(&r).unwrap();
        assert_eq!(a, Rule::normal(p.clone(), Body::new(vec![q.clone()], vec![pp.clone()], vec![])));
        assert_eq!(b, Rule::normal(pp.clone(), Body::new(vec![q], vec![p.clone()], vec![])));
        assert_eq!(c, Rule::constraint(Body::new(vec![p, pp], vec![], vec![])));
        assert_eq!(a.to_string(), "1:p(X) :- 2:q(X), not 1:p'(X).");
    }

    #[test]
    fn non_xor_is_rejected() {
        assert_eq!(expand_xor(&Rule::constraint(Body::default())).unwrap_err(), EngineError::NotXor);
    }
}
