use rand::seq::SliceRandom;
use rand::Rng;

use super::{atom, fact};
use crate::syntax::{BuiltinAtom, CmpOp, Literal, MappingKind, P2PSystem, PeerAtom, PeerRule, Term};

/// Which kinds of mapping rules a random system may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MappingClass {
    Max,
    Min,
    Mixed,
}

/// Knobs of [`random_system`].
#[derive(Clone, Debug)]
pub struct RandomParams {
    /// Upper bound on the number of peers (at least 2 are generated when ≥ 2).
    pub peers: u32,
    /// Number of constants, `a`, `b`, ...
    pub constants: usize,
    /// Bound on ground mapping-rule heads after normalization.
    pub max_candidates: usize,
    pub max_constraints: usize,
    pub class: MappingClass,
    pub lp_negation: bool,
    pub constraint_negation: bool,
    /// Peers only import from peers with larger ids.
    pub acyclic: bool,
    /// Mapping bodies may read derived and mapping predicates of the source.
    pub multi_hop: bool,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            peers: 3,
            constants: 2,
            max_candidates: 10,
            max_constraints: 4,
            class: MappingClass::Max,
            lp_negation: false,
            constraint_negation: true,
            acyclic: true,
            multi_hop: true,
        }
    }
}

struct Plan {
    mapping: Vec<String>,
    derived: Vec<String>,
}

const BASE: [&str; 2] = ["b0", "b1"];

fn unary(peer: u32, pred: &str, v: &str) -> PeerAtom {
    atom(peer, pred, &[v])
}

/// A valid, safe, non-recursive random system with unary predicates.
pub fn random_system<R: Rng>(rng: &mut R, params: &RandomParams) -> P2PSystem {
    let k = if params.peers >= 2 { rng.gen_range(2..=params.peers) } else { 1 };
    let consts: Vec<String> = (0..params.constants.max(1)).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut rule_budget = params.max_candidates / consts.len();

    // Predicate plan first, so mapping bodies may refer to any peer.
    let mut plans: Vec<Plan> = Vec::new();
    for i in 1..=k {
        let can_import = if params.acyclic { i < k } else { k > 1 };
        let nm = if can_import { rng.gen_range(0..=2usize).min(rule_budget) } else { 0 };
        rule_budget -= nm;
        let nd = rng.gen_range(0..=2usize);
        plans.push(Plan {
            mapping: (0..nm).map(|j| format!("m{j}")).collect(),
            derived: (0..nd).map(|j| format!("d{j}")).collect(),
        });
    }

    let mut sys = P2PSystem::new();
    for i in 1..=k {
        let p = sys.peer_mut(i);
        for b in BASE {
            for c in &consts {
                if rng.gen_bool(0.6) {
                    p.database.insert(fact(i, b, &[c]));
                }
            }
        }
    }
    // Every constant occurs somewhere, so the Herbrand universe is never empty.
    for c in &consts {
        if !sys.facts().any(|f| f.args.iter().any(|a| a.to_string() == *c)) {
            let i = rng.gen_range(1..=k);
            sys.peer_mut(i).database.insert(fact(i, BASE[0], &[c]));
        }
    }

    let mut constraints_left = params.max_constraints;
    for i in 1..=k {
        let plan = &plans[(i - 1) as usize];
        let sources: Vec<u32> = (1..=k).filter(|&s| s != i && (!params.acyclic || s > i)).collect();
        let mut mapping_rules = Vec::new();
        for m in &plan.mapping {
            let src = *sources.choose(rng).expect("importing peer has a source");
            let sp = &plans[(src - 1) as usize];
            let mut readable: Vec<&str> = BASE.to_vec();
            if params.multi_hop {
                readable.extend(sp.mapping.iter().map(String::as_str));
                readable.extend(sp.derived.iter().map(String::as_str));
            }
            let mut body = vec![unary(src, readable.choose(rng).unwrap(), "X")];
            if rng.gen_bool(0.25) {
                body.push(unary(src, readable.choose(rng).unwrap(), "X"));
            }
            let kind = match params.class {
                MappingClass::Max => MappingKind::Max,
                MappingClass::Min => MappingKind::Min,
                MappingClass::Mixed => {
                    if rng.gen_bool(0.5) {
                        MappingKind::Max
                    } else {
                        MappingKind::Min
                    }
                }
            };
            mapping_rules.push(PeerRule::mapping(kind, unary(i, m, "X"), body, vec![]));
        }

        let mut local: Vec<&str> = BASE.to_vec();
        local.extend(plan.mapping.iter().map(String::as_str));
        let mut standard = Vec::new();
        for (j, d) in plan.derived.iter().enumerate() {
            // Bodies read base, mapping and lower derived predicates only.
            let mut readable = local.clone();
            readable.extend(plan.derived[..j].iter().map(String::as_str));
            let nrules = rng.gen_range(1..=2);
            for _ in 0..nrules {
                let mut body = vec![Literal::pos(unary(i, readable.choose(rng).unwrap(), "X"))];
                if rng.gen_bool(0.4) {
                    let a = unary(i, readable.choose(rng).unwrap(), "X");
                    body.push(if params.lp_negation && rng.gen_bool(0.5) { Literal::neg(a) } else { Literal::pos(a) });
                }
                standard.push(PeerRule::standard(unary(i, d, "X"), body, vec![]));
            }
        }

        let mut all_local = local.clone();
        all_local.extend(plan.derived.iter().map(String::as_str));
        let mut constraints = Vec::new();
        let want = rng.gen_range(0..=2usize).min(constraints_left);
        constraints_left -= want;
        for _ in 0..want {
            let prefer_mapping = !plan.mapping.is_empty() && rng.gen_bool(0.7);
            let first = if prefer_mapping { plan.mapping.choose(rng).unwrap().as_str() } else { all_local.choose(rng).unwrap() };
            let second = all_local.choose(rng).unwrap();
            let shape = rng.gen_range(0..3);
            let c = match shape {
                0 => PeerRule::constraint(vec![Literal::pos(unary(i, first, "X")), Literal::pos(unary(i, second, "X"))], vec![]),
                1 => PeerRule::constraint(
                    vec![Literal::pos(unary(i, first, "X")), Literal::pos(unary(i, second, "Y"))],
                    vec![BuiltinAtom::new(Term::var("X"), CmpOp::Ne, Term::var("Y"))],
                ),
                _ if params.constraint_negation => {
                    PeerRule::constraint(vec![Literal::pos(unary(i, second, "X")), Literal::neg(unary(i, first, "X"))], vec![])
                }
                _ => PeerRule::constraint(vec![Literal::pos(unary(i, first, "X"))], vec![]),
            };
            constraints.push(c);
        }

        let p = sys.peer_mut(i);
        p.mapping_rules = mapping_rules;
        p.standard_rules = standard;
        p.constraints = constraints;
    }
    sys
}
