//! Least models, constraint checks and stable-model search for normal programs.

use super::store::{AtomId, NormalProgram, NormalRule};
use super::EngineError;
use crate::interp::{Interpretation, ModelSet};

/// Occurrence index for linear-time least-model computation.
pub(crate) struct Horn<'a> {
    rules: &'a [NormalRule],
    n_atoms: usize,
    watch: Vec<Vec<u32>>,
}

impl<'a> Horn<'a> {
    pub fn new(n_atoms: usize, rules: &'a [NormalRule]) -> Self {
        let mut watch = vec![Vec::new(); n_atoms];
        for (i, r) in rules.iter().enumerate() {
            for &a in &r.pos {
                watch[a.ix()].push(i as u32);
            }
        }
        Horn { rules, n_atoms, watch }
    }

    /// Least model of the positive parts of the headed rules accepted by `enabled`.
    pub fn least(&self, enabled: impl Fn(usize, &NormalRule) -> bool) -> Vec<bool> {
        let mut remaining: Vec<u32> = self.rules.iter().map(|r| r.pos.len() as u32).collect();
        let on: Vec<bool> = self.rules.iter().enumerate().map(|(i, r)| r.head.is_some() && enabled(i, r)).collect();
        let mut val = vec![false; self.n_atoms];
        let mut queue: Vec<AtomId> = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if on[i] && remaining[i] == 0 {
                let h = r.head.expect("headed");
                if !val[h.ix()] {
                    val[h.ix()] = true;
                    queue.push(h);
                }
            }
        }
        while let Some(a) = queue.pop() {
            for &ri in &self.watch[a.ix()] {
                let ri = ri as usize;
                remaining[ri] -= 1;
                if remaining[ri] == 0 && on[ri] {
                    let h = self.rules[ri].head.expect("headed");
                    if !val[h.ix()] {
                        val[h.ix()] = true;
                        queue.push(h);
                    }
                }
            }
        }
        val
    }
}

/// Least fixpoint of T_P for a negation-free, constraint-free program.
pub fn minimal_model_positive(p: &NormalProgram) -> Result<Interpretation, EngineError> {
    if !p.is_positive() {
        return Err(EngineError::NotPositive("negative literal present".into()));
    }
    if p.has_constraints() {
        return Err(EngineError::NotPositive("constraint present".into()));
    }
    let horn = Horn::new(p.atoms.len(), &p.rules);
    Ok(p.atoms.interpretation(&horn.least(|_, _| true)))
}

/// Whether `truth` satisfies the body of `r` (negation as failure w.r.t. `truth`).
pub(crate) fn body_true(r: &NormalRule, truth: &[bool]) -> bool {
    r.pos.iter().all(|a| truth[a.ix()]) && r.neg.iter().all(|a| !truth[a.ix()])
}

/// First violated constraint of `p` under `m` in canonical order, rendered as text.
pub fn check_constraints(m: &Interpretation, p: &NormalProgram) -> Option<String> {
    let truth = p.atoms.truth_of(m);
    let mut violated: Vec<String> = Vec::new();
    for r in p.rules.iter().filter(|r| r.head.is_none()) {
        // atoms of the constraint outside the table cannot occur; unknown atoms in m are ignored
        if body_true(r, &truth) {
            let mut pos: Vec<_> = r.pos.iter().map(|&a| p.atoms.atom(a).clone()).collect();
            pos.sort();
            let mut neg: Vec<_> = r.neg.iter().map(|&a| p.atoms.atom(a).clone()).collect();
            neg.sort();
            let mut parts: Vec<String> = pos.iter().map(|a| a.to_string()).collect();
            parts.extend(neg.iter().map(|a| format!("not {a}")));
            violated.push(format!(":- {}.", parts.join(", ")));
        }
    }
    violated.sort();
    violated.into_iter().next()
}

/// Stable models as truth vectors over the program's atom table, sorted canonically.
pub(crate) fn stable_truths(p: &NormalProgram) -> Vec<Vec<bool>> {
    let n = p.atoms.len();
    let horn = Horn::new(n, &p.rules);
    let mut in_head = vec![false; n];
    for r in &p.rules {
        if let Some(h) = r.head {
            in_head[h.ix()] = true;
        }
    }
    let mut assign: Vec<Option<bool>> = vec![None; n];
    let mut branch_atoms: Vec<AtomId> = Vec::new();
    let mut seen = vec![false; n];
    for r in &p.rules {
        for &a in &r.neg {
            if !seen[a.ix()] {
                seen[a.ix()] = true;
                if in_head[a.ix()] {
                    branch_atoms.push(a);
                } else {
                    assign[a.ix()] = Some(false);
                }
            }
        }
    }
    branch_atoms.sort_by(|a, b| p.atoms.atom(*a).cmp(p.atoms.atom(*b)));
    let search = Search { p, horn, branch_atoms };
    let mut out = Vec::new();
    search.run(assign, &mut out);
    let mut keyed: Vec<(Interpretation, Vec<bool>)> = out.into_iter().map(|t| (p.atoms.interpretation(&t), t)).collect();
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, t)| t).collect()
}

struct Search<'a> {
    p: &'a NormalProgram,
    horn: Horn<'a>,
    branch_atoms: Vec<AtomId>,
}

impl Search<'_> {
    fn run(&self, mut assign: Vec<Option<bool>>, out: &mut Vec<Vec<bool>>) {
        let lower = loop {
            let lower = self.horn.least(|_, r| r.neg.iter().all(|n| assign[n.ix()] == Some(false)));
            let upper = self.horn.least(|_, r| r.neg.iter().all(|n| assign[n.ix()] != Some(true) && !lower[n.ix()]));
            let mut changed = false;
            for &a in &self.branch_atoms {
                match assign[a.ix()] {
                    Some(true) if !upper[a.ix()] => return,
                    Some(false) if lower[a.ix()] => return,
                    None if lower[a.ix()] => {
                        assign[a.ix()] = Some(true);
                        changed = true;
                    }
                    None if !upper[a.ix()] => {
                        assign[a.ix()] = Some(false);
                        changed = true;
                    }
                    _ => {}
                }
            }
            let violated = self.p.rules.iter().filter(|r| r.head.is_none()).any(|r| {
                r.pos.iter().all(|a| lower[a.ix()]) && r.neg.iter().all(|n| !upper[n.ix()] || assign[n.ix()] == Some(false))
            });
            if violated {
                return;
            }
            if !changed {
                break lower;
            }
        };
        match self.branch_atoms.iter().find(|a| assign[a.ix()].is_none()) {
            Some(&a) => {
                let mut t = assign.clone();
                t[a.ix()] = Some(true);
                self.run(t, out);
                assign[a.ix()] = Some(false);
                self.run(assign, out);
            }
            None => {
                if self.p.rules.iter().filter(|r| r.head.is_none()).all(|r| !body_true(r, &lower)) {
                    out.push(lower);
                }
            }
        }
    }
}

/// All stable models of a ground normal program; constraints filter models.
pub fn stable_models_normal(p: &NormalProgram) -> ModelSet {
    stable_truths(p).iter().map(|t| p.atoms.interpretation(t)).collect()
}

/// Gelfond–Lifschitz check: `m` is the least model of the reduct and satisfies the constraints.
pub fn is_stable_model(p: &NormalProgram, m: &Interpretation) -> bool {
    if m.iter().any(|a| p.atoms.get(a).is_none()) {
        return false;
    }
    let truth = p.atoms.truth_of(m);
    let horn = Horn::new(p.atoms.len(), &p.rules);
    let least = horn.least(|_, r| r.neg.iter().all(|n| !truth[n.ix()]));
    least == truth && p.rules.iter().filter(|r| r.head.is_none()).all(|r| !body_true(r, &truth))
}
