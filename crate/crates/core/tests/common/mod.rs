//! Brute-force oracles shared by the integration tests.
//!
//! Everything here works from the definitions directly: naive grounding over the
//! constants of the system, weak models by guessing the imported atoms and the
//! atoms negated in standard rules, and selections as plain set comparisons.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use p2pdl::syntax::{Const, GroundAtom, MappingKind, P2PSystem, PeerAtom, PeerRule, PredKey, RuleKind, Symbol, Term};

pub type Atoms = BTreeSet<GroundAtom>;
pub type Models = BTreeSet<Atoms>;

pub fn fixture(name: &str) -> P2PSystem {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.p2p"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    p2pdl::parse_system(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const FIXTURES: [&str; 6] = ["ex_max", "ex_min", "ex_mm", "ex_glob", "ex_inc", "ex_neglp"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Standard,
    Mapping(MappingKind),
    Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ORule {
    pub kind: Kind,
    pub head: Option<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
}

fn vars_of(r: &PeerRule) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::new();
    let mut push = |t: &Term| {
        if let Term::Var(v) = t {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    };
    for a in r.atoms() {
        a.args.iter().for_each(&mut push);
    }
    for b in &r.builtins {
        push(&b.left);
        push(&b.right);
    }
    out
}

fn inst_term(t: &Term, s: &BTreeMap<Symbol, Const>) -> Const {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => s[v].clone(),
    }
}

fn inst(a: &PeerAtom, s: &BTreeMap<Symbol, Const>) -> GroundAtom {
    GroundAtom { peer: a.peer, pred: a.pred.clone(), args: a.args.iter().map(|t| inst_term(t, s)).collect() }
}

/// Every substitution over the constants of the system, builtins evaluated.
pub fn ground(sys: &P2PSystem) -> (Atoms, Vec<ORule>) {
    let consts: Vec<Const> = sys.constants().into_iter().collect();
    let facts: Atoms = sys.facts().cloned().collect();
    let mut rules = BTreeSet::new();
    for r in sys.rules() {
        let vars = vars_of(r);
        let total = consts.len().pow(vars.len() as u32);
        for mut code in 0..total {
            let mut s = BTreeMap::new();
            for v in &vars {
                s.insert(v.clone(), consts[code % consts.len()].clone());
                code /= consts.len();
            }
            if !r.builtins.iter().all(|b| b.op.eval(&inst_term(&b.left, &s), &inst_term(&b.right, &s))) {
                continue;
            }
            let kind = match r.kind {
                RuleKind::Standard => Kind::Standard,
                RuleKind::Constraint => Kind::Constraint,
                RuleKind::Mapping(k) => Kind::Mapping(k),
            };
            rules.insert(ORule {
                kind,
                head: r.head.as_ref().map(|h| inst(h, &s)),
                pos: r.positive_atoms().map(|a| inst(a, &s)).collect(),
                neg: r.negative_atoms().map(|a| inst(a, &s)).collect(),
            });
        }
    }
    (facts, rules.into_iter().collect())
}

fn least(facts: &Atoms, rules: &[&ORule]) -> Atoms {
    let mut m = facts.clone();
    loop {
        let before = m.len();
        for r in rules {
            if r.pos.iter().all(|a| m.contains(a)) {
                m.insert(r.head.clone().unwrap());
            }
        }
        if m.len() == before {
            return m;
        }
    }
}

/// `M = MM(St(PS^M))`, straight from the definition.
pub fn is_weak(facts: &Atoms, rules: &[ORule], m: &Atoms) -> bool {
    let reduct: Vec<&ORule> = rules
        .iter()
        .filter(|r| r.neg.iter().all(|a| !m.contains(a)))
        .filter(|r| !matches!(r.kind, Kind::Mapping(_)) || m.contains(r.head.as_ref().unwrap()))
        .collect();
    let definite: Vec<&ORule> = reduct.iter().copied().filter(|r| r.head.is_some()).collect();
    let mm = least(facts, &definite);
    mm == *m && reduct.iter().filter(|r| r.head.is_none()).all(|r| !r.pos.iter().all(|a| mm.contains(a)))
}

fn subsets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..1u64 << items.len()).map(move |bits| items.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
}

/// WM(PS) by guessing imported atoms and the atoms negated in standard rules.
pub fn oracle_weak_models(sys: &P2PSystem) -> Models {
    let (facts, rules) = ground(sys);
    let heads: Vec<GroundAtom> =
        rules.iter().filter(|r| matches!(r.kind, Kind::Mapping(_))).map(|r| r.head.clone().unwrap()).collect::<Atoms>().into_iter().collect();
    let negs: Vec<GroundAtom> =
        rules.iter().filter(|r| r.kind == Kind::Standard).flat_map(|r| r.neg.iter().cloned()).collect::<Atoms>().into_iter().collect();
    assert!(heads.len() + negs.len() <= 20, "oracle guess space too large");
    let mut out = Models::new();
    for s in subsets(&heads) {
        let s: Atoms = s.into_iter().collect();
        for g in subsets(&negs) {
            let g: Atoms = g.into_iter().collect();
            let active: Vec<&ORule> = rules
                .iter()
                .filter(|r| r.head.is_some())
                .filter(|r| r.neg.iter().all(|a| !g.contains(a)))
                .filter(|r| !matches!(r.kind, Kind::Mapping(_)) || s.contains(r.head.as_ref().unwrap()))
                .collect();
            let m = least(&facts, &active);
            if is_weak(&facts, &rules, &m) {
                out.insert(m);
            }
        }
    }
    out
}

/// Mapping predicates of the system as written, split by kind.
pub fn mapping_preds(sys: &P2PSystem) -> (BTreeSet<PredKey>, BTreeSet<PredKey>) {
    let mut max = BTreeSet::new();
    let mut min = BTreeSet::new();
    for r in sys.mapping_rules() {
        let k = r.head.as_ref().unwrap().key();
        match r.mapping_kind().unwrap() {
            MappingKind::Max => max.insert(k),
            MappingKind::Min => min.insert(k),
        };
    }
    (max, min)
}

fn part(m: &Atoms, keys: &BTreeSet<PredKey>) -> Atoms {
    m.iter().filter(|a| keys.contains(&a.key())).cloned().collect()
}

fn strict_sup(a: &Atoms, b: &Atoms) -> bool {
    a.is_superset(b) && a != b
}

pub fn oracle_max(wm: &Models, sys: &P2PSystem) -> Models {
    let (max, min) = mapping_preds(sys);
    let all: BTreeSet<PredKey> = max.union(&min).cloned().collect();
    wm.iter().filter(|m| !wm.iter().any(|n| strict_sup(&part(n, &all), &part(m, &all)))).cloned().collect()
}

pub fn oracle_min(wm: &Models, sys: &P2PSystem) -> Models {
    let (max, min) = mapping_preds(sys);
    let all: BTreeSet<PredKey> = max.union(&min).cloned().collect();
    wm.iter().filter(|m| !wm.iter().any(|n| strict_sup(&part(m, &all), &part(n, &all)))).cloned().collect()
}

/// Lexicographic: larger max part first, then smaller min part.
pub fn oracle_maxmin(wm: &Models, sys: &P2PSystem) -> Models {
    let (max, min) = mapping_preds(sys);
    let better = |n: &Atoms, m: &Atoms| {
        let (nx, mx) = (part(n, &max), part(m, &max));
        strict_sup(&nx, &mx) || (nx == mx && strict_sup(&part(m, &min), &part(n, &min)))
    };
    wm.iter().filter(|m| !wm.iter().any(|n| better(n, m))).cloned().collect()
}

pub fn to_models(ms: &p2pdl::ModelSet) -> Models {
    ms.iter().map(|m| m.iter().cloned().collect()).collect()
}

pub fn atoms(list: &[&str]) -> Atoms {
    list.iter().map(|s| parse_ground(s)).collect()
}

pub fn parse_ground(s: &str) -> GroundAtom {
    p2pdl::parse_query(s).unwrap().to_ground().unwrap()
}

/// Stable models of a ground normal program by guess-and-check.
pub fn stable_models(facts: &Atoms, rules: &[ORule]) -> Models {
    let mut base: Atoms = facts.clone();
    for r in rules {
        base.extend(r.head.iter().cloned());
    }
    let base: Vec<GroundAtom> = base.into_iter().collect();
    let mut out = Models::new();
    for g in subsets(&base) {
        let m: Atoms = g.into_iter().collect();
        let reduct: Vec<&ORule> = rules.iter().filter(|r| r.head.is_some() && r.neg.iter().all(|a| !m.contains(a))).collect();
        if least(facts, &reduct) == m
            && rules.iter().filter(|r| r.head.is_none()).all(|r| !(r.pos.iter().all(|a| m.contains(a)) && r.neg.iter().all(|a| !m.contains(a))))
        {
            out.insert(m);
        }
    }
    out
}
