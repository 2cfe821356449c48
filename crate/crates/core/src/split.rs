//! Split transformation and the generalized max-min weak models.
//!
//! Every peer `i` of a system with `n = max peer id` gets a twin `i+n` holding its
//! database; peer `i` imports the facts back through maximal mapping rules, so that
//! dropping an import simulates deleting a fact.

use std::collections::{BTreeMap, BTreeSet};

use crate::ground::ground_system;
use crate::interp::{project_lenient, Interpretation, ModelSet, RoleFilter};
use crate::syntax::{MappingKind, P2PSystem, Peer, PeerAtom, PeerId, PeerRule, PredKey, Roles, Term};
use crate::weak::{enumerate_weak_models_with, EnumOptions};
use crate::Error;

/// `Split(PS)` together with the added rules and the original roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSystem {
    pub system: P2PSystem,
    /// The added maximal mapping rules `MP-hat_i`, per original peer.
    pub mp_hat: BTreeMap<PeerId, Vec<PeerRule>>,
    /// Largest original peer id.
    pub n: u32,
    /// Roles of the original system.
    pub original_roles: Roles,
}

impl SplitSystem {
    /// Predicates defined by the added rules.
    pub fn hat_keys(&self) -> BTreeSet<PredKey> {
        self.mp_hat.values().flatten().filter_map(|r| r.head.as_ref().map(PeerAtom::key)).collect()
    }

    /// Drops atoms of auxiliary peers.
    pub fn project(&self, m: &Interpretation) -> Interpretation {
        m.restrict_peers(self.n)
    }
}

pub fn split(sys: &P2PSystem) -> Result<SplitSystem, Error> {
    let n = sys.max_peer_id();
    n.checked_mul(2).ok_or(Error::PeerOverflow)?;
    let mut out = P2PSystem::new();
    let mut mp_hat = BTreeMap::new();
    for (id, peer) in &sys.peers {
        let twin_id = id.0 + n;
        let mut twin = Peer::new(twin_id);
        let mut hat = Vec::new();
        let mut arity: BTreeMap<PredKey, usize> = BTreeMap::new();
        for f in &peer.database {
            let mut g = f.clone();
            g.peer = PeerId(twin_id);
            twin.database.insert(g);
            arity.entry(f.key()).or_insert(f.args.len());
        }
        for (key, k) in arity {
            let args: Vec<Term> = (1..=k).map(|i| Term::var(&format!("X{i}"))).collect();
            let head = PeerAtom { peer: *id, pred: key.name.clone(), args: args.clone() };
            let body = PeerAtom { peer: PeerId(twin_id), pred: key.name, args };
            hat.push(PeerRule::mapping(MappingKind::Max, head, vec![body], vec![]));
        }
        let mut p = peer.clone();
        p.database.clear();
        p.mapping_rules.extend(hat.iter().cloned());
        out.peers.insert(*id, p);
        out.peers.insert(PeerId(twin_id), twin);
        mp_hat.insert(*id, hat);
    }
    Ok(SplitSystem { system: out, mp_hat, n, original_roles: sys.roles() })
}

/// Weak models of `Split(PS)` before projection.
pub fn split_weak_models(sp: &SplitSystem, opts: EnumOptions) -> Result<ModelSet, Error> {
    let gs = ground_system(&sp.system)?;
    Ok(enumerate_weak_models_with(&gs, opts)?.map(|m| gs.strip_fresh(m)))
}

/// GWM(PS): weak models of the split system without the auxiliary peers.
pub fn generalized_weak_models(sys: &P2PSystem) -> Result<ModelSet, Error> {
    generalized_weak_models_with(sys, EnumOptions::default())
}

pub fn generalized_weak_models_with(sys: &P2PSystem, opts: EnumOptions) -> Result<ModelSet, Error> {
    let sp = split(sys)?;
    Ok(split_weak_models(&sp, opts)?.map(|m| sp.project(m)))
}

type GKey = (Interpretation, Interpretation, Interpretation);

fn g_key(m: &Interpretation, sp: &SplitSystem, hat: &BTreeSet<PredKey>) -> GKey {
    (
        m.filter(|a| hat.contains(&a.key())),
        project_lenient(m, RoleFilter::MPmax, &sp.original_roles),
        project_lenient(m, RoleFilter::MPmin, &sp.original_roles),
    )
}

fn strict_sup(a: &Interpretation, b: &Interpretation) -> bool {
    b.is_subset(a) && a != b
}

/// M ⊒_G N on the split keys.
pub fn ge_g(m: &GKey, n: &GKey) -> bool {
    strict_sup(&m.0, &n.0)
        || (m.0 == n.0 && strict_sup(&m.1, &n.1))
        || (m.0 == n.0 && m.1 == n.1 && m.2.is_subset(&n.2))
}

/// Selects under ⊒_G on unprojected split models, then projects.
pub fn select_g_maxmin(split_models: &ModelSet, sp: &SplitSystem) -> ModelSet {
    let hat = sp.hat_keys();
    crate::weak::non_dominated(split_models, |m| g_key(m, sp, &hat), ge_g).map(|m| sp.project(m))
}

/// Generalized max-min weak models.
pub fn g_maxmin_models(sys: &P2PSystem, opts: EnumOptions) -> Result<(ModelSet, ModelSet), Error> {
    let sp = split(sys)?;
    let raw = split_weak_models(&sp, opts)?;
    let all = raw.map(|m| sp.project(m));
    Ok((all, select_g_maxmin(&raw, &sp)))
}
