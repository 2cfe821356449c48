//! Well-founded model by the alternating fixpoint.

use super::solve::Horn;
use super::store::NormalProgram;
use crate::interp::Interpretation;

/// Three-valued result over the atoms of a ground program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFoundedResult {
    pub true_atoms: Interpretation,
    pub undefined: Interpretation,
    pub false_atoms: Interpretation,
    /// Number of Γ² applications until the fixpoint.
    pub iterations: usize,
    /// Headless rules whose bodies are true in the model.
    pub violated_constraints: Vec<String>,
}

/// Alternating fixpoint; constraints do not take part and are reported afterwards.
pub fn well_founded(p: &NormalProgram) -> WellFoundedResult {
    let n = p.atoms.len();
    let horn = Horn::new(n, &p.rules);
    let gamma = |assumed: &[bool]| horn.least(|_, r| r.neg.iter().all(|a| !assumed[a.ix()]));
    let mut k = vec![false; n];
    let mut iterations = 0;
    let u = loop {
        let u = gamma(&k);
        let k2 = gamma(&u);
        iterations += 1;
        debug_assert!(k.iter().zip(&k2).all(|(a, b)| !a || *b), "true set must grow");
        if k2 == k {
            break u;
        }
        k = k2;
    };
    let mut violated = Vec::new();
    for r in p.rules.iter().filter(|r| r.head.is_none()) {
        if r.pos.iter().all(|a| k[a.ix()]) && r.neg.iter().all(|a| !u[a.ix()]) {
            violated.push(p.fmt_rule(r));
        }
    }
    violated.sort();
    let undefined: Vec<bool> = (0..n).map(|i| u[i] && !k[i]).collect();
    let false_: Vec<bool> = (0..n).map(|i| !u[i]).collect();
    WellFoundedResult {
        true_atoms: p.atoms.interpretation(&k),
        undefined: p.atoms.interpretation(&undefined),
        false_atoms: p.atoms.interpretation(&false_),
        iterations,
        violated_constraints: violated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::GroundAtom;

    fn a(n: &str) -> GroundAtom {
        GroundAtom::idents(1, n, &[])
    }

    #[test]
    fn even_loop_is_undefined_and_stratified_part_is_decided() {
        let mut p = NormalProgram::new();
        p.add_rule(Some(&a("p")), [], [&a("q")]);
        p.add_rule(Some(&a("q")), [], [&a("p")]);
        p.add_fact(&a("r"));
        p.add_rule(Some(&a("s")), [&a("r")], [&a("t")]);
        p.add_rule(Some(&a("t")), [&a("z")], []);
        let w = well_founded(&p);
        assert_eq!(w.true_atoms, [a("r"), a("s")].into_iter().collect());
        assert_eq!(w.undefined, [a("p"), a("q")].into_iter().collect());
        assert_eq!(w.false_atoms, [a("t"), a("z")].into_iter().collect());
        assert!(w.iterations <= p.atoms.len() + 1);
    }

    #[test]
    fn constraints_reported() {
        let mut p = NormalProgram::new();
        p.add_fact(&a("r"));
        p.add_rule(None, [&a("r")], []);
        let w = well_founded(&p);
        assert_eq!(w.violated_constraints, vec![":- 1:r.".to_string()]);
    }
}
