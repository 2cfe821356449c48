use super::{atom, fact};
use crate::syntax::{BuiltinAtom, CmpOp, Literal, MappingKind, P2PSystem, PeerRule, Term};
use crate::Error;

/// Peer 1 holds nodes and colors, peer 2 the edges and the coloring import.
pub fn encode_three_col(nodes: &[&str], colors: &[&str], edges: &[(&str, &str)]) -> Result<P2PSystem, Error> {
    if colors.is_empty() {
        return Err(Error::Scope("at least one color is required".into()));
    }
    let mut sys = P2PSystem::new();
    let p1 = sys.peer_mut(1);
    for n in nodes {
        p1.database.insert(fact(1, "node", &[n]));
    }
    for c in colors {
        p1.database.insert(fact(1, "color", &[c]));
    }
    let p2 = sys.peer_mut(2);
    for (x, y) in edges {
        p2.database.insert(fact(2, "edge", &[x, y]));
    }
    p2.mapping_rules.push(PeerRule::mapping(
        MappingKind::Max,
        atom(2, "colored", &["X", "C"]),
        vec![atom(1, "node", &["X"]), atom(1, "color", &["C"])],
        vec![],
    ));
    let col = |x: &str, c: &str| Literal::pos(atom(2, "colored", &[x, c]));
    p2.constraints.push(PeerRule::constraint(
        vec![col("X", "C1"), col("X", "C2")],
        vec![BuiltinAtom::new(Term::var("C1"), CmpOp::Ne, Term::var("C2"))],
    ));
    p2.constraints.push(PeerRule::constraint(
        vec![Literal::pos(atom(2, "edge", &["X", "Y"])), col("X", "C"), col("Y", "C")],
        vec![],
    ));
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let sys = encode_three_col(&["n1", "n2"], &["red"], &[("n1", "n2")]).unwrap();
        assert_eq!(sys.facts().count(), 4);
        assert_eq!(sys.constraints().count(), 2);
        assert!(crate::validate::violations(&sys).is_empty());
        assert!(encode_three_col(&["n1"], &[], &[]).is_err());
    }
}
