//! Head-cycle-free disjunctive programs via shifting.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::solve::stable_models_normal;
use super::store::{DisjunctiveProgram, NormalProgram, NormalRule};
use super::EngineError;
use crate::interp::ModelSet;

/// Returns the first pair of head atoms that share a positive dependency cycle, if any.
pub fn head_cycle(p: &DisjunctiveProgram) -> Option<(String, String)> {
    let n = p.atoms.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for r in &p.rules {
        for &b in &r.pos {
            for &h in &r.head {
                g.add_edge(nodes[b.ix()], nodes[h.ix()], ());
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    for (ci, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for v in scc {
            comp[v.index()] = ci;
        }
    }
    for r in &p.rules {
        for (i, &x) in r.head.iter().enumerate() {
            for &y in &r.head[i + 1..] {
                if comp[x.ix()] == comp[y.ix()] {
                    return Some((p.atoms.atom(x).to_string(), p.atoms.atom(y).to_string()));
                }
            }
        }
    }
    None
}

/// Each k-ary head yields k rules, each with the other head atoms negated in the body.
pub fn shift(p: &DisjunctiveProgram) -> NormalProgram {
    let mut rules = Vec::new();
    for r in &p.rules {
        if r.head.is_empty() {
            rules.push(NormalRule { head: None, pos: r.pos.clone(), neg: r.neg.clone() });
        }
        for &h in &r.head {
            let mut neg = r.neg.clone();
            neg.extend(r.head.iter().copied().filter(|&o| o != h));
            neg.sort();
            neg.dedup();
            rules.push(NormalRule { head: Some(h), pos: r.pos.clone(), neg });
        }
    }
    NormalProgram { atoms: p.atoms.clone(), rules }
}

/// Stable models of a head-cycle-free disjunctive program.
pub fn stable_models_disjunctive_hcf(p: &DisjunctiveProgram) -> Result<ModelSet, EngineError> {
    if let Some((a, b)) = head_cycle(p) {
        return Err(EngineError::NotHcf(a, b));
    }
    Ok(stable_models_normal(&shift(p)))
}
