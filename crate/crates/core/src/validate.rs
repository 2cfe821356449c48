//! Structural invariants of a P2P system.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{is_reserved_name, P2PSystem, PeerId, PeerRule, PredKey, PredRole, RuleKind};

/// Which item of a peer a diagnostic refers to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Peer,
    Fact(crate::syntax::GroundAtom),
    Standard(usize),
    Mapping(usize),
    Constraint(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub peer: PeerId,
    pub item: Item,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub loc: Location,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "peer {}: {}", self.loc.peer, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid system: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError(pub Vec<Violation>);

type ItemAt = fn(usize) -> Item;

/// Checks every core invariant and returns all violations found.
pub fn violations(sys: &P2PSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |peer: PeerId, item: Item, message: String| out.push(Violation { loc: Location { peer, item }, message });

    // Arity consistency, reported at the first clashing occurrence.
    let mut arity: BTreeMap<PredKey, usize> = BTreeMap::new();
    let mut check_arity = |key: PredKey, n: usize, peer: PeerId, item: Item, push: &mut dyn FnMut(PeerId, Item, String)| {
        match arity.get(&key) {
            Some(&m) if m != n => push(peer, item, format!("arity clash: {key} used with {m} and {n} arguments")),
            Some(_) => {}
            None => {
                arity.insert(key, n);
            }
        }
    };

    let roles = sys.roles();
    for (&pid, peer) in &sys.peers {
        if pid.0 == 0 {
            push(pid, Item::Peer, "peer identifiers must be positive".into());
        }
        for f in peer.database.iter() {
            if f.peer != pid {
                push(pid, Item::Fact(f.clone()), format!("fact {f} does not belong to peer {pid}"));
            }
            check_arity(f.key(), f.args.len(), pid, Item::Fact(f.clone()), &mut push);
            if is_reserved_name(&f.pred) {
                push(pid, Item::Fact(f.clone()), format!("predicate name {} uses a reserved suffix", f.pred));
            }
            match roles.get(&f.key()) {
                Some(PredRole::Derived) => {
                    push(pid, Item::Fact(f.clone()), format!("predicate {} used with two roles: fact of a derived predicate", f.key()))
                }
                Some(PredRole::Mapping { .. }) => {
                    push(pid, Item::Fact(f.clone()), format!("predicate {} used with two roles: fact of a mapping predicate", f.key()))
                }
                _ => {}
            }
        }
        let groups: [(&[PeerRule], ItemAt); 3] = [
            (&peer.standard_rules, Item::Standard),
            (&peer.mapping_rules, Item::Mapping),
            (&peer.constraints, Item::Constraint),
        ];
        for (rules, mk) in groups {
            for (i, r) in rules.iter().enumerate() {
                let item = mk(i);
                for a in r.atoms() {
                    check_arity(a.key(), a.args.len(), pid, item.clone(), &mut push);
                    if is_reserved_name(&a.pred) {
                        push(pid, item.clone(), format!("predicate name {} uses a reserved suffix", a.pred));
                    }
                }
                check_rule(sys, pid, r, item, &mut push);
            }
        }
    }

    // Derived and mapping roles must not overlap.
    let mut derived: BTreeMap<PredKey, Location> = BTreeMap::new();
    for (&pid, peer) in &sys.peers {
        for (i, r) in peer.standard_rules.iter().enumerate() {
            if let Some(h) = &r.head {
                derived.entry(h.key()).or_insert(Location { peer: pid, item: Item::Standard(i) });
            }
        }
    }
    for (&pid, peer) in &sys.peers {
        for (i, r) in peer.mapping_rules.iter().enumerate() {
            if let Some(h) = &r.head {
                if derived.contains_key(&h.key()) {
                    push(pid, Item::Mapping(i), format!("predicate {} used with two roles: derived and mapping", h.key()));
                }
            }
        }
    }
    out
}

fn check_rule(sys: &P2PSystem, pid: PeerId, r: &PeerRule, item: Item, push: &mut dyn FnMut(PeerId, Item, String)) {
    let unsafe_vars = r.unsafe_vars();
    if !unsafe_vars.is_empty() {
        let names: Vec<&str> = unsafe_vars.iter().map(|v| &**v).collect();
        push(pid, item.clone(), format!("unsafe rule: variable(s) {} not bound by a positive body atom", names.join(", ")));
    }
    match r.kind {
        RuleKind::Standard => {
            let h = r.head.as_ref().expect("standard rule head");
            if h.peer != pid {
                push(pid, item.clone(), format!("head {h} does not belong to peer {pid}"));
            }
            if r.body.is_empty() {
                push(pid, item.clone(), "standard rule with empty body".into());
            }
            for l in &r.body {
                if l.atom.peer != pid {
                    push(pid, item.clone(), format!("head/body peer mismatch in a standard rule: {} is not an atom of peer {pid}", l.atom));
                }
            }
        }
        RuleKind::Constraint => {
            if r.body.is_empty() {
                push(pid, item.clone(), "integrity constraint with empty body".into());
            }
            for l in &r.body {
                if l.atom.peer != pid {
                    push(pid, item.clone(), format!("constraint atom {} is not an atom of peer {pid}", l.atom));
                }
            }
        }
        RuleKind::Mapping(_) => {
            let h = r.head.as_ref().expect("mapping rule head");
            if h.peer != pid {
                push(pid, item.clone(), format!("head {h} does not belong to peer {pid}"));
            }
            if r.body.is_empty() {
                push(pid, item.clone(), "mapping rule with empty body".into());
            }
            if r.has_negation() {
                push(pid, item.clone(), "mapping rule with negative body".into());
            }
            let mut sources: Vec<PeerId> = r.body.iter().map(|l| l.atom.peer).collect();
            sources.sort();
            sources.dedup();
            if sources.len() > 1 {
                push(pid, item.clone(), "mapping rule body mixes atoms of several peers".into());
            }
            for j in sources {
                if j == pid {
                    push(pid, item.clone(), "mapping rule body refers to its own peer".into());
                } else if !sys.peers.contains_key(&j) {
                    push(pid, item.clone(), format!("source peer {j} out of range"));
                }
            }
        }
    }
}

/// Returns `Ok(())` when the system satisfies every invariant.
pub fn validate(sys: &P2PSystem) -> Result<(), ValidationError> {
    let v = violations(sys);
    if v.is_empty() {
        Ok(())
    } else {
        Err(ValidationError(v))
    }
}
