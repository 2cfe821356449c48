use std::fmt::Write;

use crate::syntax::{Literal, MappingKind, P2PSystem, PeerAtom, PeerId, PeerRule, RuleKind};

fn atom_in_peer(out: &mut String, a: &PeerAtom, pid: PeerId, qualify: bool) {
    if qualify || a.peer != pid {
        let _ = write!(out, "{}:", a.peer);
    }
    out.push_str(&a.pred);
    if !a.args.is_empty() {
        out.push('(');
        for (i, t) in a.args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{t}");
        }
        out.push(')');
    }
}

fn body(out: &mut String, lits: &[Literal], builtins: &[crate::syntax::BuiltinAtom], pid: PeerId, qualify: bool) {
    let mut first = true;
    for l in lits {
        if !first {
            out.push_str(", ");
        }
        first = false;
        if !l.positive {
            out.push_str("not ");
        }
        atom_in_peer(out, &l.atom, pid, qualify);
    }
    for b in builtins {
        if !first {
            out.push_str(", ");
        }
        first = false;
        let _ = write!(out, "{} {} {}", b.left, b.op.symbol(), b.right);
    }
}

/// One rule as it appears inside the block of peer `pid`.
pub fn print_rule_in_peer(r: &PeerRule, pid: PeerId) -> String {
    let mut out = String::new();
    match r.kind {
        RuleKind::Standard => {
            out.push_str("rule ");
            atom_in_peer(&mut out, r.head.as_ref().expect("head"), pid, false);
            out.push_str(" :- ");
            body(&mut out, &r.body, &r.builtins, pid, false);
        }
        RuleKind::Constraint => {
            out.push_str("ic :- ");
            body(&mut out, &r.body, &r.builtins, pid, false);
        }
        RuleKind::Mapping(kind) => {
            out.push_str(if kind == MappingKind::Max { "maxmap " } else { "minmap " });
            atom_in_peer(&mut out, r.head.as_ref().expect("head"), pid, false);
            out.push_str(if kind == MappingKind::Max { " <~ " } else { " <- " });
            body(&mut out, &r.body, &r.builtins, pid, true);
        }
    }
    out.push('.');
    out
}

/// Renders a system in the input grammar; `parse_system` reads it back unchanged.
pub fn print_system(sys: &P2PSystem) -> String {
    let mut out = String::new();
    for (i, (pid, peer)) in sys.peers.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "peer {pid} {{");
        for f in &peer.database {
            out.push_str("  fact ");
            atom_in_peer(&mut out, &f.to_atom(), *pid, false);
            out.push_str(".\n");
        }
        for r in peer.standard_rules.iter().chain(&peer.constraints).chain(&peer.mapping_rules) {
            let _ = writeln!(out, "  {}", print_rule_in_peer(r, *pid));
        }
        out.push_str("}\n");
    }
    out
}
