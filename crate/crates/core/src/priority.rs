//! Prioritized logic programs and the rewritings of mapping rules into them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::engine::{stable_truths, Body, Head, Program, Rule};
use crate::ground::{ground_program, normalize_with_fresh};
use crate::interp::{Interpretation, ModelSet};
use crate::syntax::{GroundAtom, MappingKind, P2PSystem, PeerAtom, PeerRule, Term, PRIME_SUFFIX};
use crate::Error;

/// `higher ⪰ lower`, possibly non-ground with shared variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PriorityStatement {
    pub higher: PeerAtom,
    pub lower: PeerAtom,
}

impl fmt::Display for PriorityStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} >= {}.", self.higher, self.lower)
    }
}

/// `(P, Φ1, ..., Φn)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrioritizedProgram {
    pub program: Program,
    pub layers: Vec<Vec<PriorityStatement>>,
}

impl fmt::Display for PrioritizedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.program.fmt(f)?;
        for (k, layer) in self.layers.iter().enumerate() {
            for s in layer {
                writeln!(f, "priority[{}]: {s}", k + 1)?;
            }
        }
        Ok(())
    }
}

/// Reflexive-transitive closure of ground priorities, indexed densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityClosure {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, usize>,
    /// `ge[i]` has bit j set iff atoms[i] ⪰ atoms[j].
    ge: Vec<Vec<bool>>,
}

impl PriorityClosure {
    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }
    pub fn contains(&self, e1: &GroundAtom, e2: &GroundAtom) -> bool {
        match (self.index.get(e1), self.index.get(e2)) {
            (Some(&i), Some(&j)) => self.ge[i][j],
            _ => false,
        }
    }
    /// `e1 ≻ e2`: `e1 ⪰ e2` holds and `e2 ⪰ e1` does not.
    pub fn strictly(&self, e1: &GroundAtom, e2: &GroundAtom) -> bool {
        self.contains(e1, e2) && !self.contains(e2, e1)
    }
    pub fn pairs(&self) -> BTreeSet<(GroundAtom, GroundAtom)> {
        let mut out = BTreeSet::new();
        for (i, row) in self.ge.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b {
                    out.insert((self.atoms[i].clone(), self.atoms[j].clone()));
                }
            }
        }
        out
    }
}

fn match_atom(pat: &PeerAtom, g: &GroundAtom, s: &mut BTreeMap<String, crate::syntax::Const>) -> bool {
    if pat.peer != g.peer || pat.pred != g.pred || pat.args.len() != g.args.len() {
        return false;
    }
    for (t, c) in pat.args.iter().zip(&g.args) {
        match t {
            Term::Const(k) if k != c => return false,
            Term::Const(_) => {}
            Term::Var(v) => match s.get(v.as_ref()) {
                Some(x) if x != c => return false,
                Some(_) => {}
                None => {
                    s.insert(v.to_string(), c.clone());
                }
            },
        }
    }
    true
}

/// Grounds `phi` against `universe`, adds reflexive pairs for mentioned atoms and closes transitively.
pub fn close(phi: &[PriorityStatement], universe: &BTreeSet<GroundAtom>) -> Result<PriorityClosure, Error> {
    let mut by_key: HashMap<_, Vec<&GroundAtom>> = HashMap::new();
    for a in universe {
        by_key.entry(a.key()).or_default().push(a);
    }
    let mut pairs: BTreeSet<(GroundAtom, GroundAtom)> = BTreeSet::new();
    for st in phi {
        for &g1 in by_key.get(&st.higher.key()).map_or(&[][..], |v| v.as_slice()) {
            let mut s = BTreeMap::new();
            if !match_atom(&st.higher, g1, &mut s) {
                continue;
            }
            for &g2 in by_key.get(&st.lower.key()).map_or(&[][..], |v| v.as_slice()) {
                let mut s2 = s.clone();
                if match_atom(&st.lower, g2, &mut s2) {
                    if g1 == g2 {
                        return Err(Error::IllFormedPriority(format!("{st} has the ground instance {g1} >= {g2}")));
                    }
                    pairs.insert((g1.clone(), g2.clone()));
                }
            }
        }
    }
    let atoms: Vec<GroundAtom> =
        pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<GroundAtom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let n = atoms.len();
    let mut ge = vec![vec![false; n]; n];
    for (i, row) in ge.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &pairs {
        ge[index[a]][index[b]] = true;
    }
    for k in 0..n {
        let rk = ge[k].clone();
        for row in ge.iter_mut() {
            if row[k] {
                for (x, &y) in row.iter_mut().zip(&rk) {
                    *x |= y;
                }
            }
        }
    }
    Ok(PriorityClosure { atoms, index, ge })
}

type Mask = Vec<u64>;

fn mask_of(m: &Interpretation, cl: &PriorityClosure) -> Mask {
    let mut v = vec![0u64; cl.atoms.len().div_ceil(64).max(1)];
    for (i, a) in cl.atoms.iter().enumerate() {
        if m.contains(a) {
            v[i / 64] |= 1 << (i % 64);
        }
    }
    v
}

fn bits(m: &[u64]) -> impl Iterator<Item = usize> + '_ {
    m.iter().enumerate().flat_map(|(w, &x)| (0..64).filter(move |b| x >> b & 1 == 1).map(move |b| w * 64 + b))
}

fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Rows of ⪰ and columns of ≻ as masks over the closure atoms.
struct Tables {
    ge_row: Vec<Mask>,
    strict_col: Vec<Mask>,
}

impl Tables {
    fn new(cl: &PriorityClosure) -> Self {
        let n = cl.atoms.len();
        let words = n.div_ceil(64).max(1);
        let mut ge_row = vec![vec![0u64; words]; n];
        let mut strict_col = vec![vec![0u64; words]; n];
        for i in 0..n {
            for j in 0..n {
                if cl.ge[i][j] {
                    ge_row[i][j / 64] |= 1 << (j % 64);
                    if !cl.ge[j][i] {
                        strict_col[j][i / 64] |= 1 << (i % 64);
                    }
                }
            }
        }
        Tables { ge_row, strict_col }
    }

    fn prefers(&self, m1: &[u64], m2: &[u64]) -> bool {
        let d1: Mask = m1.iter().zip(m2).map(|(a, b)| a & !b).collect();
        let d2: Mask = m2.iter().zip(m1).map(|(a, b)| a & !b).collect();
        let found = bits(&d1).any(|e1| intersects(&self.ge_row[e1], &d2) && !intersects(&self.strict_col[e1], &d2));
        found
    }
}

/// Base preference: equal sets, or some `e1 ∈ M1∖M2` with `e1 ⪰ e2` for an `e2 ∈ M2∖M1`
/// and no `e3 ∈ M2∖M1` with `e3 ≻ e1`.
pub fn prefers(m1: &Interpretation, m2: &Interpretation, cl: &PriorityClosure) -> bool {
    m1 == m2 || Tables::new(cl).prefers(&mask_of(m1, cl), &mask_of(m2, cl))
}

/// How the base relation is lifted to a dominance relation over the model class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dominance {
    /// Pairwise base relation.
    #[default]
    Base,
    /// Transitive closure of the base relation within the class.
    Closure,
}

/// Models with no strict dominator under the lifted preference.
pub fn preferred_sets(models: &ModelSet, cl: &PriorityClosure, mode: Dominance) -> ModelSet {
    let ms: Vec<&Interpretation> = models.iter().collect();
    let n = ms.len();
    let words = n.div_ceil(64).max(1);
    let tables = Tables::new(cl);
    let masks: Vec<Mask> = ms.iter().map(|m| mask_of(m, cl)).collect();
    let mut ge: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in 0..n {
                if i == j || tables.prefers(&masks[i], &masks[j]) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    if mode == Dominance::Closure {
        for k in 0..n {
            let rk = ge[k].clone();
            for row in ge.iter_mut() {
                if row[k / 64] >> (k % 64) & 1 == 1 {
                    for (w, x) in row.iter_mut().zip(&rk) {
                        *w |= x;
                    }
                }
            }
        }
    }
    let bit = |i: usize, j: usize| ge[i][j / 64] >> (j % 64) & 1 == 1;
    (0..n).filter(|&i| !(0..n).any(|j| bit(j, i) && !bit(i, j))).map(|i| ms[i].clone()).collect()
}

/// Grounds `phi` over the atoms of `models` plus `universe` and applies [`preferred_sets`].
pub fn preferred_sets_for(
    models: &ModelSet,
    phi: &[PriorityStatement],
    universe: &BTreeSet<GroundAtom>,
    mode: Dominance,
) -> Result<ModelSet, Error> {
    let mut u = universe.clone();
    u.extend(models.union_all());
    Ok(preferred_sets(models, &close(phi, &u)?, mode))
}

/// Preferred stable models: stable models of the program filtered by each layer in order.
pub fn psm(plp: &PrioritizedProgram, mode: Dominance) -> Result<ModelSet, Error> {
    let ground = ground_program(&plp.program)?;
    let normal = ground.to_normal().ok_or_else(|| Error::Scope("prioritized program must be normal after ⊕ expansion".into()))?;
    let mut models: ModelSet = stable_truths(&normal).iter().map(|t| normal.atoms.interpretation(t)).collect();
    let universe: BTreeSet<GroundAtom> = normal.atoms.iter().map(|(_, a)| a.clone()).collect();
    for layer in &plp.layers {
        let cl = close(layer, &universe)?;
        models = preferred_sets(&models, &cl, mode);
    }
    Ok(models)
}

fn primed(a: &PeerAtom) -> PeerAtom {
    a.with_suffix(PRIME_SUFFIX)
}

fn body_of(r: &PeerRule) -> Body {
    Body::new(
        r.positive_atoms().cloned().collect(),
        r.negative_atoms().cloned().collect(),
        r.builtins.clone(),
    )
}

/// Rewrites a system into a prioritized program: `H ⊕ H' ← B` per mapping rule, with
/// `H ⪰ H'` for maximal rules and `H' ⪰ H` for minimal ones, max layer first.
pub fn rew_prioritized(sys: &P2PSystem) -> Result<PrioritizedProgram, Error> {
    let (norm, _) = normalize_with_fresh(sys)?;
    let keys = norm.arities();
    for r in norm.mapping_rules() {
        let h = r.head.as_ref().expect("mapping head");
        let p = primed(h);
        if keys.contains_key(&p.key()) {
            return Err(Error::Rewriting(format!("primed predicate {} already exists", p.key())));
        }
    }
    let mut program = Program::new();
    for f in norm.facts() {
        program.push(Rule::fact(f.to_atom()));
    }
    for r in norm.standard_rules() {
        program.push(Rule::normal(r.head.clone().expect("head"), body_of(r)));
    }
    let (mut max_layer, mut min_layer) = (Vec::new(), Vec::new());
    for r in norm.mapping_rules() {
        let h = r.head.clone().expect("mapping head");
        let p = primed(&h);
        program.push(Rule { head: Head::Xor(h.clone(), p.clone()), body: body_of(r) });
        match r.mapping_kind().expect("mapping") {
            MappingKind::Max => max_layer.push(PriorityStatement { higher: h, lower: p }),
            MappingKind::Min => min_layer.push(PriorityStatement { higher: p, lower: h }),
        }
    }
    for r in norm.constraints() {
        program.push(Rule::constraint(body_of(r)));
    }
    let layers = [max_layer, min_layer].into_iter().filter(|l| !l.is_empty()).collect();
    Ok(PrioritizedProgram { program, layers })
}

/// Removes primed atoms.
pub fn strip_primes(m: &Interpretation) -> Interpretation {
    m.filter(|a| !a.pred.ends_with(PRIME_SUFFIX))
}

/// `St(PSM(Rew(PS)))` with normalization atoms removed.
pub fn preferred_weak_models(sys: &P2PSystem, mode: Dominance) -> Result<ModelSet, Error> {
    let (_, fresh) = normalize_with_fresh(sys)?;
    let plp = rew_prioritized(sys)?;
    Ok(psm(&plp, mode)?.map(|m| strip_primes(m).filter(|a| !fresh.contains(&a.key()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_system;

    fn g(n: &str) -> GroundAtom {
        GroundAtom::idents(1, n, &[])
    }
    fn st(a: &str, b: &str) -> PriorityStatement {
        PriorityStatement { higher: g(a).to_atom(), lower: g(b).to_atom() }
    }
    fn set(ns: &[&str]) -> Interpretation {
        ns.iter().map(|n| g(n)).collect()
    }
    fn uni(ns: &[&str]) -> BTreeSet<GroundAtom> {
        ns.iter().map(|n| g(n)).collect()
    }

    #[test]
    fn closure_is_reflexive_and_transitive() {
        let cl = close(&[st("a", "b")], &uni(&["a", "b"])).unwrap();
        let exp: BTreeSet<_> = [(g("a"), g("a")), (g("b"), g("b")), (g("a"), g("b"))].into();
        assert_eq!(cl.pairs(), exp);
        let cl = close(&[st("a", "b"), st("b", "c")], &uni(&["a", "b", "c"])).unwrap();
        assert!(cl.contains(&g("a"), &g("c")));
        assert!(cl.strictly(&g("a"), &g("c")));
    }

    #[test]
    fn self_priority_is_ill_formed() {
        assert!(matches!(close(&[st("a", "a")], &uni(&["a"])), Err(Error::IllFormedPriority(_))));
    }

    #[test]
    fn base_preference() {
        let cl = close(&[st("a", "b")], &uni(&["a", "b"])).unwrap();
        assert!(prefers(&set(&["a"]), &set(&["b"]), &cl));
        assert!(!prefers(&set(&["b"]), &set(&["a"]), &cl));
        assert!(prefers(&set(&["b"]), &set(&["b"]), &cl));
    }

    #[test]
    fn preferred_sets_basics() {
        let models: ModelSet = [set(&["a"]), set(&["b"])].into_iter().collect();
        let cl = close(&[st("a", "b")], &uni(&["a", "b"])).unwrap();
        assert_eq!(preferred_sets(&models, &cl, Dominance::Base), [set(&["a"])].into_iter().collect());
        let empty = close(&[], &uni(&["a", "b"])).unwrap();
        assert_eq!(preferred_sets(&models, &empty, Dominance::Base), models);
        let one: ModelSet = [set(&["b"])].into_iter().collect();
        assert_eq!(preferred_sets(&one, &cl, Dominance::Closure), one);
    }

    #[test]
    fn ex_max_rewriting() {
        let sys = parse_system("peer 2 { fact q(a). fact q(b). }\npeer 1 { maxmap p(X) <~ 2:q(X). ic :- p(X), p(Y), X != Y. }").unwrap();
        let plp = rew_prioritized(&sys).unwrap();
        assert_eq!(plp.layers.len(), 1);
        assert_eq!(plp.layers[0][0].to_string(), "1:p(X) >= 1:p'(X).");
        let text = plp.to_string();
        assert!(text.contains("1:p(X) (+) 1:p'(X) :- 2:q(X)."), "{text}");
        assert!(text.contains("priority[1]: 1:p(X) >= 1:p'(X)."), "{text}");
        let sm = psm(&PrioritizedProgram { program: plp.program.clone(), layers: vec![] }, Dominance::Base).unwrap();
        assert_eq!(sm.len(), 3);
        let pw = psm(&plp, Dominance::Base).unwrap();
        assert_eq!(pw.len(), 2);
        let universe: BTreeSet<GroundAtom> = sm.union_all().into_iter().collect();
        let cl = close(&plp.layers[0], &universe).unwrap();
        assert_eq!(cl.pairs().len(), 2 + 4);
    }

    #[test]
    fn strip_primes_filters() {
        let m: Interpretation = [GroundAtom::idents(2, "q", &["a"]), GroundAtom::idents(1, "p__not", &["a"]), GroundAtom::idents(1, "p", &["b"])]
            .into_iter()
            .collect();
        let exp: Interpretation = [GroundAtom::idents(2, "q", &["a"]), GroundAtom::idents(1, "p", &["b"])].into_iter().collect();
        assert_eq!(strip_primes(&m), exp);
        assert_eq!(strip_primes(&exp), exp);
    }

    #[test]
    fn idempotent_on_example() {
        let models: ModelSet = [set(&["a"]), set(&["b"]), set(&["c"]), set(&["b", "c"])].into_iter().collect();
        let cl = close(&[st("a", "b"), st("a", "c")], &uni(&["a", "b", "c"])).unwrap();
        for mode in [Dominance::Base, Dominance::Closure] {
            let once = preferred_sets(&models, &cl, mode);
            assert_eq!(preferred_sets(&once, &cl, mode), once);
        }
    }
}
