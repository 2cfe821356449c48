//! Ground programs over interned atoms.

use std::collections::HashMap;
use std::fmt;

use crate::interp::Interpretation;
use crate::syntax::GroundAtom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

/// Bidirectional map between ground atoms and dense ids.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl AtomTable {
    pub fn intern(&mut self, a: &GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(a) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(a.clone());
        self.index.insert(a.clone(), id);
        id
    }
    pub fn get(&self, a: &GroundAtom) -> Option<AtomId> {
        self.index.get(a).copied()
    }
    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.ix()]
    }
    pub fn len(&self) -> usize {
        self.atoms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &GroundAtom)> {
        self.atoms.iter().enumerate().map(|(i, a)| (AtomId(i as u32), a))
    }
    /// Converts a truth vector into an interpretation.
    pub fn interpretation(&self, truth: &[bool]) -> Interpretation {
        truth.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| self.atoms[i].clone()).collect()
    }
    pub fn interpretation_of(&self, ids: impl IntoIterator<Item = AtomId>) -> Interpretation {
        ids.into_iter().map(|i| self.atoms[i.ix()].clone()).collect()
    }
    /// Truth vector of `m`; atoms unknown to the table are ignored.
    pub fn truth_of(&self, m: &Interpretation) -> Vec<bool> {
        let mut v = vec![false; self.len()];
        for a in m {
            if let Some(id) = self.get(a) {
                v[id.ix()] = true;
            }
        }
        v
    }
}

/// Rule with at most one head atom; no head means constraint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalRule {
    pub head: Option<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisjunctiveRule {
    pub head: Vec<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

fn dedup(mut v: Vec<AtomId>) -> Vec<AtomId> {
    v.sort();
    v.dedup();
    v
}

/// Ground normal program; facts are bodyless rules, constraints headless rules.
#[derive(Clone, Debug, Default)]
pub struct NormalProgram {
    pub atoms: AtomTable,
    pub rules: Vec<NormalRule>,
}

impl NormalProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_rule<'a>(
        &mut self,
        head: Option<&GroundAtom>,
        pos: impl IntoIterator<Item = &'a GroundAtom>,
        neg: impl IntoIterator<Item = &'a GroundAtom>,
    ) -> usize {
        let head = head.map(|h| self.atoms.intern(h));
        let pos = dedup(pos.into_iter().map(|a| self.atoms.intern(a)).collect());
        let neg = dedup(neg.into_iter().map(|a| self.atoms.intern(a)).collect());
        self.rules.push(NormalRule { head, pos, neg });
        self.rules.len() - 1
    }

    pub fn add_fact(&mut self, a: &GroundAtom) -> usize {
        self.add_rule(Some(a), [], [])
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(|r| r.neg.is_empty())
    }
    pub fn has_constraints(&self) -> bool {
        self.rules.iter().any(|r| r.head.is_none())
    }

    pub(crate) fn fmt_rule(&self, r: &NormalRule) -> String {
        let mut s = String::new();
        if let Some(h) = r.head {
            s.push_str(&self.atoms.atom(h).to_string());
        }
        let mut body: Vec<String> = r.pos.iter().map(|&a| self.atoms.atom(a).to_string()).collect();
        body.extend(r.neg.iter().map(|&a| format!("not {}", self.atoms.atom(a))));
        if body.is_empty() {
            s.push('.');
        } else {
            if r.head.is_some() {
                s.push(' ');
            }
            s.push_str(":- ");
            s.push_str(&body.join(", "));
            s.push('.');
        }
        s
    }
}

impl fmt::Display for NormalProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", self.fmt_rule(r))?;
        }
        Ok(())
    }
}

/// Ground disjunctive program.
#[derive(Clone, Debug, Default)]
pub struct DisjunctiveProgram {
    pub atoms: AtomTable,
    pub rules: Vec<DisjunctiveRule>,
}

impl DisjunctiveProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_rule<'a>(
        &mut self,
        head: impl IntoIterator<Item = &'a GroundAtom>,
        pos: impl IntoIterator<Item = &'a GroundAtom>,
        neg: impl IntoIterator<Item = &'a GroundAtom>,
    ) -> usize {
        let head = dedup(head.into_iter().map(|a| self.atoms.intern(a)).collect());
        let pos = dedup(pos.into_iter().map(|a| self.atoms.intern(a)).collect());
        let neg = dedup(neg.into_iter().map(|a| self.atoms.intern(a)).collect());
        self.rules.push(DisjunctiveRule { head, pos, neg });
        self.rules.len() - 1
    }

    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(|r| r.head.len() <= 1)
    }

    /// Reinterprets a program with at most one head atom per rule.
    pub fn to_normal(&self) -> Option<NormalProgram> {
        if !self.is_normal() {
            return None;
        }
        let rules = self
            .rules
            .iter()
            .map(|r| NormalRule { head: r.head.first().copied(), pos: r.pos.clone(), neg: r.neg.clone() })
            .collect();
        Some(NormalProgram { atoms: self.atoms.clone(), rules })
    }
}

impl fmt::Display for DisjunctiveProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            let hs: Vec<String> = r.head.iter().map(|&a| self.atoms.atom(a).to_string()).collect();
            let mut body: Vec<String> = r.pos.iter().map(|&a| self.atoms.atom(a).to_string()).collect();
            body.extend(r.neg.iter().map(|&a| format!("not {}", self.atoms.atom(a))));
            let head = hs.join(" | ");
            if body.is_empty() {
                writeln!(f, "{head}.")?;
            } else if head.is_empty() {
                writeln!(f, ":- {}.", body.join(", "))?;
            } else {
                writeln!(f, "{head} :- {}.", body.join(", "))?;
            }
        }
        Ok(())
    }
}
