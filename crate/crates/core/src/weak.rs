//! Reducts, weak models and the max / min / max-min selections.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::engine::{stable_truths, AtomId, Body, Horn, NormalProgram, NormalRule, Program, Rule};
use crate::ground::{GroundKind, GroundRule, GroundSystem};
use crate::interp::{project_lenient, Interpretation, ModelSet, RoleFilter};
use crate::syntax::{GroundAtom, P2PSystem, PeerId, Roles};
use crate::Error;

/// Default bound on the number of candidate mapping atoms.
pub const DEFAULT_MAX_CANDIDATES: usize = 24;

/// Which preference selects among weak models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selection {
    None,
    Max,
    Min,
    MaxMin,
    GMaxMin,
}

/// All weak models with the selected subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakModelSet {
    pub all: ModelSet,
    pub selected: ModelSet,
    pub selection: Selection,
}

/// A positive ground program: facts, definite rules and positive constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reduct {
    pub rules: Vec<GroundRule>,
}

impl Reduct {
    pub fn definite(&self) -> impl Iterator<Item = &GroundRule> {
        self.rules.iter().filter(|r| r.head.is_some())
    }
    pub fn constraints(&self) -> impl Iterator<Item = &GroundRule> {
        self.rules.iter().filter(|r| r.head.is_none())
    }

    /// Least model of the definite part by naive iteration.
    pub fn least_model(&self) -> Interpretation {
        let mut n: BTreeSet<GroundAtom> = BTreeSet::new();
        loop {
            let mut changed = false;
            for r in self.definite() {
                let h = r.head.as_ref().expect("definite");
                if !n.contains(h) && r.pos.iter().all(|a| n.contains(a)) {
                    n.insert(h.clone());
                    changed = true;
                }
            }
            if !changed {
                return n.into_iter().collect();
            }
        }
    }

    pub fn satisfies_constraints(&self, m: &Interpretation) -> bool {
        self.constraints().all(|c| !c.pos.iter().all(|a| m.contains(a)))
    }
}

impl fmt::Display for Reduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn as_standard(r: &GroundRule) -> GroundRule {
    let kind = if r.is_mapping() { GroundKind::Standard } else { r.kind };
    GroundRule { kind, head: r.head.clone(), pos: r.pos.clone(), neg: vec![] }
}

/// St(PS^M): drops rules with a negated atom in M, strips negation, keeps mapping rules with head in M as standard rules.
pub fn reduct_full(gs: &GroundSystem, m: &Interpretation) -> Reduct {
    let rules = gs
        .rules
        .iter()
        .filter(|r| !r.neg.iter().any(|a| m.contains(a)))
        .filter(|r| !r.is_mapping() || r.head.as_ref().is_some_and(|h| m.contains(h)))
        .map(as_standard)
        .collect();
    Reduct { rules }
}

/// St(PS_M): only mapping rules are reduced; the rest is kept verbatim (requires negation-free LP).
pub fn reduct_pos(gs: &GroundSystem, m: &Interpretation) -> Result<Vec<GroundRule>, Error> {
    if gs.rules.iter().any(|r| r.kind == GroundKind::Standard && !r.neg.is_empty()) {
        return Err(Error::Scope("the simpler reduct requires negation-free standard rules".into()));
    }
    Ok(gs
        .rules
        .iter()
        .filter(|r| !r.is_mapping() || r.head.as_ref().is_some_and(|h| m.contains(h)))
        .map(|r| if r.is_mapping() { as_standard(r) } else { r.clone() })
        .collect())
}

/// `{M} = MM(St(PS^M))`: the least model of the reduct's definite part equals M and satisfies its constraints.
pub fn is_weak_model(gs: &GroundSystem, m: &Interpretation) -> bool {
    let red = reduct_full(gs, m);
    let n = red.least_model();
    &n == m && red.satisfies_constraints(&n)
}

/// Weak-model test through PS_M; constraints keep their negative literals, read under M.
pub fn is_weak_model_pos_lp(gs: &GroundSystem, m: &Interpretation) -> Result<bool, Error> {
    let rules = reduct_pos(gs, m)?;
    let red = Reduct { rules: rules.iter().filter(|r| r.head.is_some()).cloned().collect() };
    let n = red.least_model();
    let ok = rules
        .iter()
        .filter(|r| r.head.is_none())
        .all(|c| !(c.pos.iter().all(|a| n.contains(a)) && c.neg.iter().all(|a| !n.contains(a))));
    Ok(&n == m && ok)
}

/// Tuning for [`enumerate_weak_models_with`].
#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub max_candidates: usize,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_candidates: DEFAULT_MAX_CANDIDATES, parallel: false }
    }
}

pub fn enumerate_weak_models(gs: &GroundSystem) -> Result<ModelSet, Error> {
    enumerate_weak_models_with(gs, EnumOptions::default())
}

struct Compiled {
    prog: NormalProgram,
    /// Index of the candidate that heads each rule, if it is a mapping rule.
    owner: Vec<Option<usize>>,
    cand_ids: Vec<AtomId>,
    positive: bool,
}

fn compile(gs: &GroundSystem) -> Compiled {
    let cands: Vec<&GroundAtom> = gs.candidates.iter().collect();
    let pos_of: HashMap<&GroundAtom, usize> = cands.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut prog = NormalProgram::new();
    let mut owner = Vec::new();
    for r in &gs.rules {
        prog.add_rule(r.head.as_ref(), &r.pos, &r.neg);
        owner.push(if r.is_mapping() { r.head.as_ref().map(|h| pos_of[h]) } else { None });
    }
    let cand_ids = cands.iter().map(|a| prog.atoms.intern(a)).collect();
    let positive = gs.rules.iter().all(|r| r.head.is_none() || r.neg.is_empty());
    Compiled { prog, owner, cand_ids, positive }
}

fn models_for_subset(c: &Compiled, gs: &GroundSystem, subset: u64) -> Vec<Interpretation> {
    let enabled = |i: usize| c.owner[i].is_none_or(|k| subset >> k & 1 == 1);
    let matches_subset = |truth: &[bool]| c.cand_ids.iter().enumerate().all(|(k, id)| truth[id.ix()] == (subset >> k & 1 == 1));
    let mut out = Vec::new();
    if c.positive {
        let horn = Horn::new(c.prog.atoms.len(), &c.prog.rules);
        let truth = horn.least(|i, _| enabled(i));
        let ok = matches_subset(&truth)
            && c.prog.rules.iter().all(|r| r.head.is_some() || !crate::engine::body_true(r, &truth));
        if ok {
            out.push(c.prog.atoms.interpretation(&truth));
        }
    } else {
        let rules: Vec<NormalRule> =
            c.prog.rules.iter().enumerate().filter(|(i, _)| enabled(*i)).map(|(_, r)| r.clone()).collect();
        let sub = NormalProgram { atoms: c.prog.atoms.clone(), rules };
        for truth in stable_truths(&sub) {
            if matches_subset(&truth) {
                out.push(c.prog.atoms.interpretation(&truth));
            }
        }
    }
    out.retain(|m| {
        let ok = is_weak_model(gs, m);
        debug_assert!(ok, "enumeration produced a non-weak model {m}");
        ok
    });
    out
}

/// WM(PS): one reduct per subset of candidate mapping atoms.
pub fn enumerate_weak_models_with(gs: &GroundSystem, opts: EnumOptions) -> Result<ModelSet, Error> {
    let k = gs.candidates.len();
    if k > opts.max_candidates || k > 62 {
        return Err(Error::TooManyCandidates { count: k, cap: opts.max_candidates });
    }
    let c = compile(gs);
    let total: u64 = 1 << k;
    let models: Vec<Interpretation> = if opts.parallel {
        (0..total).into_par_iter().flat_map_iter(|s| models_for_subset(&c, gs, s)).collect()
    } else {
        (0..total).flat_map(|s| models_for_subset(&c, gs, s)).collect()
    };
    Ok(models.into_iter().collect())
}

fn mp(m: &Interpretation, roles: &Roles, f: RoleFilter) -> Interpretation {
    project_lenient(m, f, roles)
}

/// Keeps models not strictly dominated under the preorder `ge`.
pub fn non_dominated<K>(wm: &ModelSet, key: impl Fn(&Interpretation) -> K, ge: impl Fn(&K, &K) -> bool) -> ModelSet {
    let keyed: Vec<(&Interpretation, K)> = wm.iter().map(|m| (m, key(m))).collect();
    keyed
        .iter()
        .filter(|(_, km)| !keyed.iter().any(|(_, kn)| ge(kn, km) && !ge(km, kn)))
        .map(|(m, _)| (*m).clone())
        .collect()
}

/// M ⊒_Max N: M[MP] ⊇ N[MP].
pub fn ge_max(m: &Interpretation, n: &Interpretation, roles: &Roles) -> bool {
    mp(n, roles, RoleFilter::MP).is_subset(&mp(m, roles, RoleFilter::MP))
}

/// M ⊒_Min N: M[MP] ⊆ N[MP].
pub fn ge_min(m: &Interpretation, n: &Interpretation, roles: &Roles) -> bool {
    mp(m, roles, RoleFilter::MP).is_subset(&mp(n, roles, RoleFilter::MP))
}

fn ge_maxmin_keys(m: &(Interpretation, Interpretation), n: &(Interpretation, Interpretation)) -> bool {
    let strict_sup = n.0.is_subset(&m.0) && n.0 != m.0;
    strict_sup || (m.0 == n.0 && m.1.is_subset(&n.1))
}

/// M ⊒ N: M[MPmax] ⊃ N[MPmax], or equal MPmax parts and M[MPmin] ⊆ N[MPmin].
pub fn ge_maxmin(m: &Interpretation, n: &Interpretation, roles: &Roles) -> bool {
    let k = |x: &Interpretation| (mp(x, roles, RoleFilter::MPmax), mp(x, roles, RoleFilter::MPmin));
    ge_maxmin_keys(&k(m), &k(n))
}

pub fn select_max(wm: &ModelSet, roles: &Roles) -> Result<ModelSet, Error> {
    if roles.has_min() {
        return Err(Error::WrongSemantics("max semantics requires a system without minimal mapping rules".into()));
    }
    Ok(non_dominated(wm, |m| mp(m, roles, RoleFilter::MP), |a, b| b.is_subset(a)))
}

pub fn select_min(wm: &ModelSet, roles: &Roles) -> Result<ModelSet, Error> {
    if roles.has_max() {
        return Err(Error::WrongSemantics("min semantics requires a system without maximal mapping rules".into()));
    }
    Ok(non_dominated(wm, |m| mp(m, roles, RoleFilter::MP), |a, b| a.is_subset(b)))
}

pub fn select_maxmin(wm: &ModelSet, roles: &Roles) -> ModelSet {
    non_dominated(wm, |m| (mp(m, roles, RoleFilter::MPmax), mp(m, roles, RoleFilter::MPmin)), ge_maxmin_keys)
}

/// Applies a selection to a model set; `GMaxMin` is handled by the split module.
pub fn select(wm: &ModelSet, roles: &Roles, sel: Selection) -> Result<ModelSet, Error> {
    match sel {
        Selection::None => Ok(wm.clone()),
        Selection::Max => select_max(wm, roles),
        Selection::Min => select_min(wm, roles),
        Selection::MaxMin => Ok(select_maxmin(wm, roles)),
        Selection::GMaxMin => Err(Error::WrongSemantics("generalized selection needs the split system".into())),
    }
}

/// Weak models of a ground system with a selection applied; fresh normalization atoms are removed.
pub fn weak_models(gs: &GroundSystem, sel: Selection, opts: EnumOptions) -> Result<WeakModelSet, Error> {
    let all = enumerate_weak_models_with(gs, opts)?;
    let selected = select(&all, &gs.roles, sel)?;
    Ok(WeakModelSet { all: all.map(|m| gs.strip_fresh(m)), selected: selected.map(|m| gs.strip_fresh(m)), selection: sel })
}

/// Per peer: does `D_i ∪ LP_i ∪ IC_i` have a stable model? Mapping atoms count as false.
pub fn local_consistency(sys: &P2PSystem) -> BTreeMap<PeerId, bool> {
    let mut out = BTreeMap::new();
    for (id, peer) in &sys.peers {
        let mut prog = Program::new();
        for f in &peer.database {
            prog.push(Rule::fact(f.to_atom()));
        }
        for r in peer.standard_rules.iter().chain(&peer.constraints) {
            let body = Body::new(r.positive_atoms().cloned().collect(), r.negative_atoms().cloned().collect(), r.builtins.clone());
            prog.push(match &r.head {
                Some(h) => Rule::normal(h.clone(), body),
                None => Rule::constraint(body),
            });
        }
        let p = crate::ground::ground_program_lenient(&prog).to_normal().expect("normal rules only");
        out.insert(*id, !stable_truths(&p).is_empty());
    }
    out
}

/// Each mapping atom of M is the head of a ground mapping rule whose body holds in M.
pub fn is_supported(gs: &GroundSystem, m: &Interpretation) -> bool {
    m.iter().filter(|a| gs.roles.is_mapping(&a.key())).all(|a| {
        gs.mapping_rules().any(|r| r.head.as_ref() == Some(a) && r.pos.iter().all(|b| m.contains(b)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_system;
    use crate::parser::parse_system;

    const EX_MAX: &str = "peer 2 { fact q(a). fact q(b). }\npeer 1 { maxmap p(X) <~ 2:q(X). ic :- p(X), p(Y), X != Y. }";

    fn ga(p: u32, n: &str, a: &[&str]) -> GroundAtom {
        GroundAtom::idents(p, n, a)
    }

    #[test]
    fn local_consistency_ignores_imports() {
        let inc = parse_system(
            "peer 2 { fact q(a). fact q(b). }
             peer 1 { fact r(a). fact r(b). minmap p(X) <- 2:q(X). ic :- r(X), r(Y), X != Y. ic :- r(X), not p(X). }",
        )
        .unwrap();
        let lc = local_consistency(&inc);
        assert!(!lc[&PeerId(1)]);
        assert!(lc[&PeerId(2)]);
        // Constraints over mapping atoms alone never make a peer locally inconsistent.
        assert!(local_consistency(&parse_system(EX_MAX).unwrap()).values().all(|&ok| ok));
    }

    fn gs(src: &str) -> GroundSystem {
        ground_system(&parse_system(src).unwrap()).unwrap()
    }

    #[test]
    fn reduct_keeps_only_imported_mapping_rules() {
        let g = gs(EX_MAX);
        let m: Interpretation = [ga(2, "q", &["a"]), ga(2, "q", &["b"]), ga(1, "p", &["a"])].into_iter().collect();
        let text = reduct_full(&g, &m).to_string();
        assert!(text.contains("1:p(a) :- 2:q(a)."), "{text}");
        assert!(!text.contains("1:p(b) :-"), "{text}");
        let base: Interpretation = [ga(2, "q", &["a"]), ga(2, "q", &["b"])].into_iter().collect();
        assert!(reduct_full(&g, &base).rules.iter().all(|r| r.head.as_ref().is_none_or(|h| h.peer.0 == 2)));
    }

    #[test]
    fn weak_model_checks() {
        let g = gs(EX_MAX);
        let q: Vec<GroundAtom> = vec![ga(2, "q", &["a"]), ga(2, "q", &["b"])];
        let m2: Interpretation = q.iter().cloned().chain([ga(1, "p", &["a"])]).collect();
        let both: Interpretation = q.iter().cloned().chain([ga(1, "p", &["a"]), ga(1, "p", &["b"])]).collect();
        let partial: Interpretation = [ga(2, "q", &["a"])].into_iter().collect();
        for (m, exp) in [(&m2, true), (&both, false), (&partial, false)] {
            assert_eq!(is_weak_model(&g, m), exp, "{m}");
            assert_eq!(is_weak_model_pos_lp(&g, m).unwrap(), exp, "{m}");
        }
    }

    #[test]
    fn ex_max_models_and_selection() {
        let g = gs(EX_MAX);
        let wm = enumerate_weak_models(&g).unwrap();
        assert_eq!(wm.len(), 3);
        let max = select_max(&wm, &g.roles).unwrap();
        assert_eq!(max.len(), 2);
        assert_eq!(select_maxmin(&wm, &g.roles), max);
        assert!(select_min(&wm, &g.roles).is_err());
        let par = enumerate_weak_models_with(&g, EnumOptions { parallel: true, ..Default::default() }).unwrap();
        assert_eq!(par, wm);
    }

    #[test]
    fn negation_in_lp_uses_stable_models() {
        let g = gs("peer 1 { rule p :- not q. rule q :- not p. }");
        let wm = enumerate_weak_models(&g).unwrap();
        assert_eq!(wm.len(), 2);
        let ms: Vec<&Interpretation> = wm.iter().collect();
        assert!(ge_max(ms[0], ms[1], &g.roles) && ge_max(ms[1], ms[0], &g.roles));
    }

    #[test]
    fn candidate_cap() {
        let g = gs(EX_MAX);
        let r = enumerate_weak_models_with(&g, EnumOptions { max_candidates: 1, parallel: false });
        assert!(matches!(r, Err(Error::TooManyCandidates { count: 2, cap: 1 })));
    }

    #[test]
    fn singleton_selection_is_identity() {
        let g = gs("peer 2 { fact q(a). } peer 1 { maxmap p(X) <~ 2:q(X). }");
        let wm = enumerate_weak_models(&g).unwrap();
        let max = select_max(&wm, &g.roles).unwrap();
        assert_eq!(max.len(), 1);
        assert_eq!(select_max(&max, &g.roles).unwrap(), max);
        assert!(max.iter().all(|m| is_supported(&g, m)));
    }
}
