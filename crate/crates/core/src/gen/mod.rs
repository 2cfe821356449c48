//! Instance generators: SAT and three-coloring encodings, and random systems.

mod color;
mod random;
mod sat;

pub use color::encode_three_col;
pub use random::{random_system, MappingClass, RandomParams};
pub use sat::{encode_sat, parse_dimacs, CnfFormula, DimacsError};

use crate::syntax::{Const, GroundAtom, PeerAtom, Term};

fn fact(peer: u32, pred: &str, args: &[&str]) -> GroundAtom {
    GroundAtom::new(peer, pred, args.iter().map(|a| Const::ident(a)).collect())
}

fn atom(peer: u32, pred: &str, args: &[&str]) -> PeerAtom {
    let term = |a: &&str| if a.starts_with(|c: char| c.is_ascii_uppercase()) { Term::var(a) } else { Term::ident(a) };
    PeerAtom::new(peer, pred, args.iter().map(term).collect())
}
