//! Mapping normalization, Herbrand universe and grounding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::engine::{DisjunctiveProgram, Program};
use crate::interp::Interpretation;
use crate::syntax::{
    sym, BuiltinAtom, CmpOp, Const, GroundAtom, Literal, MappingKind, P2PSystem, PeerAtom, PeerRule, PredKey,
    Roles, RuleKind, Symbol, Term,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("empty Herbrand universe: rule `{0}` has variables but the system mentions no constants")]
    EmptyUniverse(String),
    #[error("normalization of {0} would reuse the existing predicate {1}")]
    NameCollision(PredKey, String),
}

/// Kind of a ground rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundKind {
    Fact,
    Standard,
    Constraint,
    Mapping(MappingKind),
}

/// A ground, builtin-free peer rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub kind: GroundKind,
    pub head: Option<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
}

impl GroundRule {
    pub fn is_mapping(&self) -> bool {
        matches!(self.kind, GroundKind::Mapping(_))
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        if self.kind == GroundKind::Fact {
            return f.write_str(".");
        }
        let arrow = match self.kind {
            GroundKind::Mapping(MappingKind::Max) => "<~",
            GroundKind::Mapping(MappingKind::Min) => "<-",
            _ => ":-",
        };
        if self.head.is_some() {
            f.write_str(" ")?;
        }
        write!(f, "{arrow} ")?;
        let mut parts: Vec<String> = self.pos.iter().map(|a| a.to_string()).collect();
        parts.extend(self.neg.iter().map(|a| format!("not {a}")));
        write!(f, "{}.", parts.join(", "))
    }
}

/// How ground instances are enumerated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Instances whose positive bodies can hold in some model, found by joins.
    #[default]
    Join,
    /// Every substitution over the Herbrand universe.
    Naive,
}

/// The ground program of a normalized system.
#[derive(Clone, Debug)]
pub struct GroundSystem {
    /// The normalized system the rules were instantiated from.
    pub origin: P2PSystem,
    pub roles: Roles,
    /// Canonically sorted, duplicate-free.
    pub rules: Vec<GroundRule>,
    pub herbrand: BTreeSet<Const>,
    pub candidates: BTreeSet<GroundAtom>,
    /// Mapping predicates introduced by normalization.
    pub fresh: BTreeSet<PredKey>,
}

impl GroundSystem {
    pub fn facts(&self) -> impl Iterator<Item = &GroundAtom> {
        self.rules.iter().filter(|r| r.kind == GroundKind::Fact).filter_map(|r| r.head.as_ref())
    }
    pub fn mapping_rules(&self) -> impl Iterator<Item = &GroundRule> {
        self.rules.iter().filter(|r| r.is_mapping())
    }
    pub fn constraints(&self) -> impl Iterator<Item = &GroundRule> {
        self.rules.iter().filter(|r| r.kind == GroundKind::Constraint)
    }
    /// Removes atoms of fresh normalization predicates.
    pub fn strip_fresh(&self, m: &Interpretation) -> Interpretation {
        if self.fresh.is_empty() {
            return m.clone();
        }
        m.filter(|a| !self.fresh.contains(&a.key()))
    }

    /// The ground program rendered in the input grammar.
    pub fn to_text(&self) -> String {
        let mut sys = P2PSystem::new();
        for p in self.origin.peers.keys() {
            sys.peer_mut(p.0);
        }
        for r in &self.rules {
            let lits = |pos: &[GroundAtom], neg: &[GroundAtom]| -> Vec<Literal> {
                pos.iter()
                    .map(|a| Literal::pos(a.to_atom()))
                    .chain(neg.iter().map(|a| Literal::neg(a.to_atom())))
                    .collect()
            };
            match r.kind {
                GroundKind::Fact => {
                    let h = r.head.clone().expect("fact head");
                    sys.peer_mut(h.peer.0).database.insert(h);
                }
                GroundKind::Standard => {
                    let h = r.head.as_ref().expect("rule head").to_atom();
                    let peer = h.peer.0;
                    sys.peer_mut(peer).standard_rules.push(PeerRule::standard(h, lits(&r.pos, &r.neg), vec![]));
                }
                GroundKind::Constraint => {
                    let peer = r.pos.first().or(r.neg.first()).map_or(1, |a| a.peer.0);
                    sys.peer_mut(peer).constraints.push(PeerRule::constraint(lits(&r.pos, &r.neg), vec![]));
                }
                GroundKind::Mapping(k) => {
                    let h = r.head.as_ref().expect("mapping head").to_atom();
                    let peer = h.peer.0;
                    let body = r.pos.iter().map(|a| a.to_atom()).collect();
                    sys.peer_mut(peer).mapping_rules.push(PeerRule::mapping(k, h, body, vec![]));
                }
            }
        }
        crate::parser::print_system(&sys)
    }
}

/// Splits every mapping predicate defined by several rules into fresh `p__k` predicates.
pub fn normalize_mappings(sys: &P2PSystem) -> Result<P2PSystem, GroundError> {
    Ok(normalize_with_fresh(sys)?.0)
}

pub(crate) fn normalize_with_fresh(sys: &P2PSystem) -> Result<(P2PSystem, BTreeSet<PredKey>), GroundError> {
    let existing: BTreeSet<PredKey> = sys.arities().into_keys().collect();
    let mut out = sys.clone();
    let mut fresh = BTreeSet::new();
    for peer in out.peers.values_mut() {
        let mut groups: BTreeMap<PredKey, usize> = BTreeMap::new();
        for r in &peer.mapping_rules {
            *groups.entry(r.head.as_ref().expect("mapping head").key()).or_default() += 1;
        }
        if groups.values().all(|&n| n <= 1) {
            continue;
        }
        let mut counters: BTreeMap<PredKey, usize> = BTreeMap::new();
        let mut rules = Vec::new();
        for r in std::mem::take(&mut peer.mapping_rules) {
            let head = r.head.clone().expect("mapping head");
            let key = head.key();
            if groups[&key] <= 1 {
                rules.push(r);
                continue;
            }
            let k = counters.entry(key.clone()).or_default();
            *k += 1;
            let name = format!("{}__{}", head.pred, k);
            let new_key = PredKey { peer: head.peer, name: sym(&name) };
            if existing.contains(&new_key) {
                return Err(GroundError::NameCollision(key, name));
            }
            fresh.insert(new_key);
            let fresh_head = head.renamed(sym(&name));
            peer.standard_rules.push(PeerRule::standard(head, vec![Literal::pos(fresh_head.clone())], vec![]));
            rules.push(PeerRule { head: Some(fresh_head), ..r });
        }
        peer.mapping_rules = rules;
    }
    Ok((out, fresh))
}

/// Comparison of two constants under the canonical total order.
pub fn eval_builtin(op: CmpOp, left: &Const, right: &Const) -> bool {
    op.eval(left, right)
}

type Subst = HashMap<Symbol, Const>;

fn resolve(t: &Term, s: &Subst) -> Option<Const> {
    match t {
        Term::Const(c) => Some(c.clone()),
        Term::Var(v) => s.get(v).cloned(),
    }
}

fn instantiate(a: &PeerAtom, s: &Subst) -> GroundAtom {
    GroundAtom {
        peer: a.peer,
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| resolve(t, s).expect("safe rule")).collect(),
    }
}

/// Builtins with both sides bound are checked; unbound ones are deferred.
fn builtins_ok(bs: &[BuiltinAtom], s: &Subst) -> bool {
    bs.iter().all(|b| match (resolve(&b.left, s), resolve(&b.right, s)) {
        (Some(l), Some(r)) => eval_builtin(b.op, &l, &r),
        _ => true,
    })
}

fn unify(a: &PeerAtom, g: &GroundAtom, s: &mut Subst, bound: &mut Vec<Symbol>) -> bool {
    for (t, c) in a.args.iter().zip(&g.args) {
        match t {
            Term::Const(k) => {
                if k != c {
                    return false;
                }
            }
            Term::Var(v) => match s.get(v) {
                Some(x) if x != c => return false,
                Some(_) => {}
                None => {
                    s.insert(v.clone(), c.clone());
                    bound.push(v.clone());
                }
            },
        }
    }
    true
}

type Index = HashMap<PredKey, Vec<GroundAtom>>;

/// All substitutions making every positive body atom a member of `index` and every builtin true.
fn join(pos: &[&PeerAtom], builtins: &[BuiltinAtom], index: &Index, s: &mut Subst, out: &mut Vec<Subst>) {
    let Some((first, rest)) = pos.split_first() else {
        if builtins_ok(builtins, s) {
            out.push(s.clone());
        }
        return;
    };
    let Some(cands) = index.get(&first.key()) else { return };
    for g in cands {
        if g.args.len() != first.args.len() {
            continue;
        }
        let mut bound = Vec::new();
        if unify(first, g, s, &mut bound) && builtins_ok(builtins, s) {
            join(rest, builtins, index, s, out);
        }
        for v in bound {
            s.remove(&v);
        }
    }
}

fn rule_vars(r: &PeerRule) -> BTreeSet<Symbol> {
    let mut vs: BTreeSet<Symbol> = r.atoms().flat_map(|a| a.vars().cloned()).collect();
    vs.extend(r.builtins.iter().flat_map(|b| b.vars().cloned()));
    vs
}

fn all_substs(vars: &[Symbol], universe: &[Const], builtins: &[BuiltinAtom], s: &mut Subst, out: &mut Vec<Subst>) {
    let Some((v, rest)) = vars.split_first() else {
        out.push(s.clone());
        return;
    };
    for c in universe {
        s.insert(v.clone(), c.clone());
        if builtins_ok(builtins, s) {
            all_substs(rest, universe, builtins, s, out);
        }
    }
    s.remove(v);
}

fn make_rule(r: &PeerRule, s: &Subst) -> GroundRule {
    let kind = match r.kind {
        RuleKind::Standard => GroundKind::Standard,
        RuleKind::Constraint => GroundKind::Constraint,
        RuleKind::Mapping(k) => GroundKind::Mapping(k),
    };
    let mut pos: Vec<GroundAtom> = r.positive_atoms().map(|a| instantiate(a, s)).collect();
    let mut neg: Vec<GroundAtom> = r.negative_atoms().map(|a| instantiate(a, s)).collect();
    pos.sort();
    pos.dedup();
    neg.sort();
    neg.dedup();
    GroundRule { kind, head: r.head.as_ref().map(|h| instantiate(h, s)), pos, neg }
}

/// Normalizes and grounds with the default join strategy.
pub fn ground_system(sys: &P2PSystem) -> Result<GroundSystem, GroundError> {
    ground_system_with(sys, Strategy::Join)
}

pub fn ground_system_with(sys: &P2PSystem, strategy: Strategy) -> Result<GroundSystem, GroundError> {
    let (norm, fresh) = normalize_with_fresh(sys)?;
    let herbrand = norm.constants();
    if herbrand.is_empty() {
        if let Some(r) = norm.rules().find(|r| !rule_vars(r).is_empty()) {
            return Err(GroundError::EmptyUniverse(r.to_string()));
        }
    }
    let rules: Vec<&PeerRule> = norm.rules().collect();
    let mut ground: BTreeSet<GroundRule> = norm
        .facts()
        .map(|f| GroundRule { kind: GroundKind::Fact, head: Some(f.clone()), pos: vec![], neg: vec![] })
        .collect();
    match strategy {
        Strategy::Join => {
            let domain = possible_atoms(&norm, &rules);
            let mut index: Index = HashMap::new();
            for a in domain {
                index.entry(a.key()).or_default().push(a);
            }
            for r in &rules {
                let pos: Vec<&PeerAtom> = r.positive_atoms().collect();
                let mut out = Vec::new();
                join(&pos, &r.builtins, &index, &mut Subst::new(), &mut out);
                ground.extend(out.iter().map(|s| make_rule(r, s)));
            }
        }
        Strategy::Naive => {
            let universe: Vec<Const> = herbrand.iter().cloned().collect();
            for r in &rules {
                let vars: Vec<Symbol> = rule_vars(r).into_iter().collect();
                let mut out = Vec::new();
                all_substs(&vars, &universe, &r.builtins, &mut Subst::new(), &mut out);
                ground.extend(out.iter().map(|s| make_rule(r, s)));
            }
        }
    }
    let rules: Vec<GroundRule> = ground.into_iter().collect();
    let candidates = rules.iter().filter(|r| r.is_mapping()).filter_map(|r| r.head.clone()).collect();
    Ok(GroundSystem { roles: norm.roles(), origin: norm, rules, herbrand, candidates, fresh })
}

/// Grounds a non-ground program (⊕ heads expanded first) by joins over its possibly-true atoms.
pub fn ground_program(p: &Program) -> Result<DisjunctiveProgram, GroundError> {
    ground_program_inner(p, true)
}

/// As [`ground_program`] without the empty-universe check; safe rules then ground to nothing.
pub(crate) fn ground_program_lenient(p: &Program) -> DisjunctiveProgram {
    ground_program_inner(p, false).expect("lenient grounding does not fail")
}

fn ground_program_inner(p: &Program, strict: bool) -> Result<DisjunctiveProgram, GroundError> {
    let p = p.expand_xor();
    let mut consts: BTreeSet<Const> = BTreeSet::new();
    let mut has_vars = None;
    for r in &p.rules {
        let atoms = r.head_atoms().into_iter().chain(&r.body.pos).chain(&r.body.neg);
        for a in atoms {
            consts.extend(a.args.iter().filter_map(|t| t.as_const().cloned()));
            if !a.is_ground() && has_vars.is_none() {
                has_vars = Some(r.to_string());
            }
        }
        for b in &r.body.builtins {
            consts.extend([&b.left, &b.right].into_iter().filter_map(|t| t.as_const().cloned()));
        }
    }
    if let (true, true, Some(r)) = (strict, consts.is_empty(), has_vars) {
        return Err(GroundError::EmptyUniverse(r));
    }
    let mut domain: BTreeSet<GroundAtom> = BTreeSet::new();
    loop {
        let mut index: Index = HashMap::new();
        for a in &domain {
            index.entry(a.key()).or_default().push(a.clone());
        }
        let before = domain.len();
        for r in &p.rules {
            let pos: Vec<&PeerAtom> = r.body.pos.iter().collect();
            let mut out = Vec::new();
            join(&pos, &r.body.builtins, &index, &mut Subst::new(), &mut out);
            for s in &out {
                domain.extend(r.head_atoms().into_iter().map(|h| instantiate(h, s)));
            }
        }
        if domain.len() == before {
            break;
        }
    }
    let mut index: Index = HashMap::new();
    for a in &domain {
        index.entry(a.key()).or_default().push(a.clone());
    }
    let mut seen = BTreeSet::new();
    let mut out = DisjunctiveProgram::new();
    for r in &p.rules {
        let pos: Vec<&PeerAtom> = r.body.pos.iter().collect();
        let mut substs = Vec::new();
        join(&pos, &r.body.builtins, &index, &mut Subst::new(), &mut substs);
        for s in &substs {
            let mut head: Vec<GroundAtom> = r.head_atoms().into_iter().map(|h| instantiate(h, s)).collect();
            let mut pos: Vec<GroundAtom> = r.body.pos.iter().map(|a| instantiate(a, s)).collect();
            let mut neg: Vec<GroundAtom> = r.body.neg.iter().map(|a| instantiate(a, s)).collect();
            for v in [&mut head, &mut pos, &mut neg] {
                v.sort();
                v.dedup();
            }
            if seen.insert((head.clone(), pos.clone(), neg.clone())) {
                out.add_rule(&head, &pos, &neg);
            }
        }
    }
    Ok(out)
}

/// Over-approximation of every atom that can be true: fixpoint ignoring negation and constraints.
fn possible_atoms(sys: &P2PSystem, rules: &[&PeerRule]) -> BTreeSet<GroundAtom> {
    let mut domain: BTreeSet<GroundAtom> = sys.facts().cloned().collect();
    loop {
        let mut index: Index = HashMap::new();
        for a in &domain {
            index.entry(a.key()).or_default().push(a.clone());
        }
        let before = domain.len();
        for r in rules.iter().filter(|r| r.head.is_some()) {
            let pos: Vec<&PeerAtom> = r.positive_atoms().collect();
            let mut out = Vec::new();
            join(&pos, &r.builtins, &index, &mut Subst::new(), &mut out);
            let h = r.head.as_ref().expect("headed");
            domain.extend(out.iter().map(|s| instantiate(h, s)));
        }
        if domain.len() == before {
            return domain;
        }
    }
}
