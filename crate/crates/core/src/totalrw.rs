//! Testing/violating-atom rewriting, total stable models and the well-founded model.

use std::fmt;

use crate::engine::{self, stable_models_disjunctive_hcf, Body, Head, NormalProgram, Program, Rule};
use crate::ground::{ground_program, normalize_with_fresh};
use crate::interp::{Interpretation, ModelSet};
use crate::syntax::{GroundAtom, P2PSystem, Peer, PeerAtom, PeerRule, Roles, TEST_SUFFIX, VIOL_SUFFIX};
use crate::Error;

/// Three-valued model; atoms of the ground base outside both sets are false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThreeValuedModel {
    pub true_set: Interpretation,
    pub undefined: Interpretation,
    pub false_set: Interpretation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    True,
    Undefined,
    False,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::Undefined => "undefined",
            Truth::False => "false",
        })
    }
}

impl ThreeValuedModel {
    pub fn status(&self, a: &GroundAtom) -> Truth {
        if self.true_set.contains(a) {
            Truth::True
        } else if self.undefined.contains(a) {
            Truth::Undefined
        } else {
            Truth::False
        }
    }

    /// Keeps only atoms of one peer.
    pub fn restrict_to_peer(&self, p: crate::syntax::PeerId) -> ThreeValuedModel {
        ThreeValuedModel {
            true_set: self.true_set.restrict_to_peer(p),
            undefined: self.undefined.restrict_to_peer(p),
            false_set: self.false_set.restrict_to_peer(p),
        }
    }
}

impl fmt::Display for ThreeValuedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "true: {} undefined: {} false: <implicit>", self.true_set, self.undefined)
    }
}

/// Well-founded model with diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFounded {
    pub model: ThreeValuedModel,
    /// Alternating-fixpoint rounds.
    pub iterations: usize,
    /// Ground atoms of the normalized rewriting.
    pub ground_atoms: usize,
    /// Headless rules whose bodies hold in the model.
    pub warnings: Vec<String>,
}

/// How disjunctive heads are turned into normal rules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalizationScheme {
    /// One rule per head atom, with the sibling head atoms negated in the body.
    #[default]
    Shift,
    /// One rule per head atom with the body unchanged.
    PlainSplit,
}

fn check_scope(sys: &P2PSystem) -> Result<(), Error> {
    if !sys.is_maximal() {
        return Err(Error::Scope("the testing/violating rewriting requires a maximal system".into()));
    }
    if sys.lp_has_negation() {
        return Err(Error::Scope("the testing/violating rewriting requires negation-free standard rules".into()));
    }
    Ok(())
}

fn is_aux(a: &GroundAtom) -> bool {
    a.pred.ends_with(TEST_SUFFIX) || a.pred.ends_with(VIOL_SUFFIX)
}

/// Roles of one peer's own predicates, read from its rules only.
fn local_roles(peer: &Peer) -> Roles {
    crate::syntax::P2PSystem::with_peers([peer.clone()]).roles()
}

fn tested(a: &PeerAtom, roles: &Roles) -> bool {
    roles.is_mapping(&a.key()) || roles.is_derived(&a.key())
}

/// `B^t`: mapping and derived atoms get `^t`, base atoms and builtins stay.
fn body_t(r: &PeerRule, roles: &Roles) -> Body {
    let t = |a: &PeerAtom| if tested(a, roles) { a.with_suffix(TEST_SUFFIX) } else { a.clone() };
    Body::new(r.positive_atoms().map(t).collect(), r.negative_atoms().map(t).collect(), r.builtins.clone())
}

fn violating_heads(r: &PeerRule, roles: &Roles) -> Vec<PeerAtom> {
    let mut out: Vec<PeerAtom> = Vec::new();
    for a in r.positive_atoms().filter(|a| tested(a, roles)) {
        let v = a.with_suffix(VIOL_SUFFIX);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn plain_body(r: &PeerRule) -> Body {
    Body::new(r.positive_atoms().cloned().collect(), r.negative_atoms().cloned().collect(), r.builtins.clone())
}

/// Rewriting of a single peer; reads nothing but the peer itself.
pub fn rew_t_peer(peer: &Peer) -> Program {
    let roles = local_roles(peer);
    let mut p = Program::new();
    for f in &peer.database {
        p.push(Rule::fact(f.to_atom()));
    }
    for r in &peer.standard_rules {
        let h = r.head.clone().expect("standard head");
        p.push(Rule::normal(h.clone(), plain_body(r)));
        p.push(Rule::normal(h.with_suffix(TEST_SUFFIX), body_t(r, &roles)));
        let mut b = body_t(r, &roles);
        b.pos.push(h.with_suffix(VIOL_SUFFIX));
        p.push(Rule::disjunctive(violating_heads(r, &roles), b));
    }
    for r in &peer.mapping_rules {
        let h = r.head.clone().expect("mapping head");
        p.push(Rule::normal(h.with_suffix(TEST_SUFFIX), plain_body(r)));
        p.push(Rule::normal(
            h.clone(),
            Body::new(vec![h.with_suffix(TEST_SUFFIX)], vec![h.with_suffix(VIOL_SUFFIX)], vec![]),
        ));
    }
    for r in &peer.constraints {
        p.push(Rule::disjunctive(violating_heads(r, &roles), body_t(r, &roles)));
    }
    p
}

/// `D ∪ Rew_t(LP) ∪ Rew_t(MP) ∪ Rew_t(IC)` of the normalized system.
pub fn rew_t(sys: &P2PSystem) -> Result<Program, Error> {
    check_scope(sys)?;
    let (norm, _) = normalize_with_fresh(sys)?;
    let mut p = Program::new();
    for peer in norm.peers.values() {
        p.rules.extend(rew_t_peer(peer).rules);
    }
    Ok(p)
}

/// Normal form of a disjunctive program under the given scheme.
pub fn normalize_program(p: &Program, scheme: NormalizationScheme) -> Program {
    let mut out = Program::new();
    for r in &p.rules {
        match &r.head {
            Head::Atoms(hs) if hs.len() > 1 => {
                for (i, h) in hs.iter().enumerate() {
                    let mut body = r.body.clone();
                    if scheme == NormalizationScheme::Shift {
                        body.neg.extend(hs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a.clone()));
                    }
                    out.push(Rule::normal(h.clone(), body));
                }
            }
            _ => out.push(r.clone()),
        }
    }
    out
}

pub fn rew_w(sys: &P2PSystem) -> Result<Program, Error> {
    rew_w_with(sys, NormalizationScheme::Shift)
}

pub fn rew_w_with(sys: &P2PSystem, scheme: NormalizationScheme) -> Result<Program, Error> {
    Ok(normalize_program(&rew_t(sys)?, scheme))
}

fn user_view(sys: &P2PSystem, m: &Interpretation) -> Result<Interpretation, Error> {
    let (_, fresh) = normalize_with_fresh(sys)?;
    Ok(m.filter(|a| !is_aux(a) && !fresh.contains(&a.key())))
}

/// Stable models of the ground rewriting, with auxiliary atoms kept.
pub fn rew_t_stable_models(sys: &P2PSystem) -> Result<ModelSet, Error> {
    let g = ground_program(&rew_t(sys)?)?;
    Ok(stable_models_disjunctive_hcf(&g)?)
}

/// TSM(PS): stable models of the rewriting without testing, violating and normalization atoms.
pub fn total_stable_models(sys: &P2PSystem) -> Result<ModelSet, Error> {
    let sm = rew_t_stable_models(sys)?;
    let mut out = ModelSet::new();
    for m in &sm {
        out.insert(user_view(sys, m)?);
    }
    Ok(out)
}

/// Ground normal program of `Rew_w` under a scheme.
pub fn ground_rew_w(sys: &P2PSystem, scheme: NormalizationScheme) -> Result<NormalProgram, Error> {
    let g = ground_program(&rew_w_with(sys, scheme)?)?;
    Ok(g.to_normal().expect("normalized rewriting has single-atom heads"))
}

/// Three-valued view of a ground normal program with auxiliary atoms dropped.
pub(crate) fn three_valued(p: &NormalProgram, keep: impl Fn(&GroundAtom) -> bool) -> WellFounded {
    let w = engine::well_founded(p);
    WellFounded {
        model: ThreeValuedModel {
            true_set: w.true_atoms.filter(|a| !is_aux(a) && keep(a)),
            undefined: w.undefined.filter(|a| !is_aux(a) && keep(a)),
            false_set: w.false_atoms.filter(|a| !is_aux(a) && keep(a)),
        },
        iterations: w.iterations,
        ground_atoms: p.atoms.len(),
        warnings: w.violated_constraints,
    }
}

/// Well-founded model of `Rew_w(PS)` with the default scheme.
pub fn well_founded(sys: &P2PSystem) -> Result<ThreeValuedModel, Error> {
    Ok(well_founded_traced(sys, NormalizationScheme::Shift)?.model)
}

pub fn well_founded_traced(sys: &P2PSystem, scheme: NormalizationScheme) -> Result<WellFounded, Error> {
    let (_, fresh) = normalize_with_fresh(sys)?;
    let p = ground_rew_w(sys, scheme)?;
    Ok(three_valued(&p, |a| !fresh.contains(&a.key())))
}
