//! Invariants checked on fixtures and seeded random systems against the brute-force oracles.

mod common;

use common::*;
use p2pdl::gen::{encode_three_col, random_system, MappingClass, RandomParams};
use p2pdl::ground::{ground_system, normalize_mappings};
use p2pdl::priority::{close, preferred_sets, rew_prioritized, Dominance};
use p2pdl::query::{answer, fol_models, Mode, Semantics};
use p2pdl::split::{g_maxmin_models, split, split_weak_models};
use p2pdl::syntax::{P2PSystem, PeerAtom, PeerId, Term};
use p2pdl::totalrw::{total_stable_models, well_founded_traced, NormalizationScheme};
use p2pdl::weak::{is_weak_model, local_consistency, weak_models, EnumOptions, Selection};
use p2pdl::{print_system, ModelSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn selected(sys: &P2PSystem, sel: Selection) -> Models {
    let gs = ground_system(sys).unwrap();
    to_models(&weak_models(&gs, sel, EnumOptions::default()).unwrap().selected)
}

/// Renames peer-local mapping predicate `m1` to `m0`, so `m0` gets two defining rules.
/// With `same_kind`, only peers whose two rules are both maximal or both minimal.
fn merge_mapping_heads(sys: &P2PSystem, same_kind: bool) -> Option<P2PSystem> {
    let mut out = sys.clone();
    let mut merged = false;
    let targets: Vec<PeerId> = sys
        .peers
        .values()
        .filter(|p| {
            let rules: Vec<_> =
                p.mapping_rules.iter().filter(|r| matches!(r.head.as_ref().unwrap().pred.as_ref(), "m0" | "m1")).collect();
            rules.len() == 2 && (!same_kind || rules[0].mapping_kind() == rules[1].mapping_kind())
        })
        .map(|p| p.id)
        .collect();
    let rename = |a: &mut PeerAtom| {
        if targets.contains(&a.peer) && a.pred.as_ref() == "m1" {
            *a = a.renamed("m0".into());
        }
    };
    for peer in out.peers.values_mut() {
        for r in peer.mapping_rules.iter_mut().chain(&mut peer.standard_rules).chain(&mut peer.constraints) {
            if let Some(h) = r.head.as_mut() {
                if targets.contains(&h.peer) && h.pred.as_ref() == "m1" {
                    merged = true;
                }
                rename(h);
            }
            for l in &mut r.body {
                rename(&mut l.atom);
            }
        }
    }
    merged.then_some(out)
}

#[test]
fn normalization_preserves_maxmin_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(241);
    let mut checked = 0;
    for i in 0..600 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        let p = RandomParams { class, constants: rng.gen_range(1..=2), multi_hop: false, ..Default::default() };
        let Some(sys) = merge_mapping_heads(&random_system(&mut rng, &p), true) else { continue };
        let norm = normalize_mappings(&sys).unwrap();
        assert_ne!(norm, sys);
        let oracle = oracle_maxmin(&oracle_weak_models(&sys), &sys);
        assert_eq!(selected(&sys, Selection::MaxMin), oracle, "{}", print_system(&sys));
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} systems with merged heads");
}

/// A predicate with one maximal and one minimal rule is both kinds before normalization,
/// so the lexicographic order maximizes the minimal import too; after normalization the
/// fresh predicates keep the two imports apart.
#[test]
fn mixed_kind_heads_diverge_from_the_unnormalized_order() {
    let sys = p2pdl::parse_system(
        "peer 3 { fact b0(b). } peer 2 { fact b0(a). }
         peer 1 { maxmap m0(X) <~ 3:b0(X). minmap m0(X) <- 2:b0(X). }",
    )
    .unwrap();
    let before = oracle_maxmin(&oracle_weak_models(&sys), &sys);
    let after = selected(&sys, Selection::MaxMin);
    let base = ["2:b0(a)", "3:b0(b)"];
    assert_eq!(after, [atoms(&[base[0], base[1], "1:m0(b)"])].into());
    assert_eq!(before, [atoms(&[base[0], base[1], "1:m0(a)", "1:m0(b)"])].into());
}

#[test]
fn weak_models_match_oracle_with_multi_rule_heads() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..300 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        let p = RandomParams { class, constants: rng.gen_range(1..=2), multi_hop: false, ..Default::default() };
        let Some(sys) = merge_mapping_heads(&random_system(&mut rng, &p), false) else { continue };
        assert_eq!(selected(&sys, Selection::None), oracle_weak_models(&sys), "{}", print_system(&sys));
    }
}

#[test]
fn split_models_are_weak_models_of_the_split_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut systems: Vec<P2PSystem> = FIXTURES.iter().map(|f| fixture(f)).collect();
    for i in 0..60 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        systems.push(random_system(&mut rng, &RandomParams { class, constants: 1, ..Default::default() }));
    }
    for sys in systems {
        let sp = split(&sys).unwrap();
        let gs = ground_system(&sp.system).unwrap();
        if gs.candidates.len() > 16 {
            continue;
        }
        for m in &split_weak_models(&sp, EnumOptions::default()).unwrap() {
            assert!(is_weak_model(&gs, m), "{m} in\n{}", print_system(&sp.system));
        }
    }
}

#[test]
fn split_is_conservative_on_locally_consistent_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut checked = 0;
    for i in 0..240 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        let p = RandomParams { class, constants: rng.gen_range(1..=2), ..Default::default() };
        let sys = random_system(&mut rng, &p);
        if !local_consistency(&sys).values().all(|&ok| ok) {
            continue;
        }
        let sp = split(&sys).unwrap();
        if ground_system(&sp.system).unwrap().candidates.len() > 18 {
            continue;
        }
        let (_, g) = g_maxmin_models(&sys, EnumOptions::default()).unwrap();
        let direct = oracle_maxmin(&oracle_weak_models(&sys), &sys);
        assert_eq!(to_models(&g), direct, "{}", print_system(&sys));
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} systems checked");
}

#[test]
fn split_repairs_keep_exactly_one_fact() {
    let (_, g) = g_maxmin_models(&fixture("ex_inc"), EnumOptions::default()).unwrap();
    assert_eq!(g.len(), 2);
    for m in &g {
        assert_eq!(m.iter().filter(|a| a.pred.as_ref() == "r").count(), 1, "{m}");
    }
}

fn colorable(n: usize, edges: &[(usize, usize)]) -> bool {
    (0..3usize.pow(n as u32)).any(|code| {
        let c: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        edges.iter().all(|&(x, y)| c[x] != c[y])
    })
}

#[test]
fn three_coloring_matches_brute_force() {
    let names = ["a", "b", "c", "d"];
    let graphs: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (1, vec![]),
        (2, vec![(0, 1)]),
        (3, vec![(0, 1), (1, 2), (0, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    ];
    for (n, edges) in graphs {
        let e: Vec<(&str, &str)> = edges.iter().map(|&(x, y)| (names[x], names[y])).collect();
        let sys = encode_three_col(&names[..n], &["r", "g", "b"], &e).unwrap();
        let max = selected(&sys, Selection::Max);
        assert!(!max.is_empty());
        let mut full = false;
        for m in &max {
            let col: Vec<(String, String)> = m
                .iter()
                .filter(|a| a.pred.as_ref() == "colored")
                .map(|a| (a.args[0].to_string(), a.args[1].to_string()))
                .collect();
            // Proper partial coloring: one color per node, endpoints differ.
            for (x, cx) in &col {
                assert_eq!(col.iter().filter(|(y, _)| y == x).count(), 1);
                for (y, cy) in &col {
                    if e.iter().any(|&(u, v)| (u == x && v == y) || (u == y && v == x)) {
                        assert_ne!(cx, cy);
                    }
                }
            }
            full |= col.len() == n;
        }
        assert_eq!(full, colorable(n, &edges), "n={n} edges={edges:?}");
    }
}

#[test]
fn query_answer_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut systems: Vec<P2PSystem> = FIXTURES.iter().map(|f| fixture(f)).collect();
    for i in 0..60 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        systems.push(random_system(&mut rng, &RandomParams { class, constants: 2, ..Default::default() }));
    }
    let opts = EnumOptions::default();
    for sys in &systems {
        let roles = sys.roles();
        for (key, _) in roles.iter() {
            let arity = sys.arities()[key];
            let args = (0..arity).map(|k| Term::var(&format!("X{k}"))).collect();
            let q = PeerAtom { peer: key.peer, pred: key.name.clone(), args };
            for sem in [Semantics::Weak, Semantics::MaxMin, Semantics::GMaxMin, Semantics::Fol] {
                let b = answer(sys, &q, Mode::Brave, sem, opts).unwrap();
                let c = answer(sys, &q, Mode::Cautious, sem, opts).unwrap();
                assert!(c.answers.is_subset(&b.answers), "{sem} {q}");
            }
            let weak = answer(sys, &q, Mode::Brave, Semantics::Weak, opts).unwrap();
            let mm = answer(sys, &q, Mode::Brave, Semantics::MaxMin, opts).unwrap();
            assert!(mm.answers.is_subset(&weak.answers), "{q}\n{}", print_system(sys));
        }
    }
}

#[test]
fn fol_flags_global_inconsistency_on_imported_conflicts() {
    assert!(fol_models(&fixture("ex_max")).unwrap().is_empty());
    // No conflicting import: FOL coincides with the single weak model.
    let sys = p2pdl::parse_system("peer 2 { fact q(a). } peer 1 { maxmap p(X) <~ 2:q(X). }").unwrap();
    assert_eq!(to_models(&fol_models(&sys).unwrap()), selected(&sys, Selection::Max));
}

#[test]
fn preferred_sets_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..80 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        let sys = random_system(&mut rng, &RandomParams { class, constants: 2, ..Default::default() });
        let plp = rew_prioritized(&sys).unwrap();
        let gs = ground_system(&sys).unwrap();
        let all: ModelSet = weak_models(&gs, Selection::None, EnumOptions::default()).unwrap().all;
        for layer in &plp.layers {
            let cl = close(layer, &all.union_all().atoms().clone()).unwrap();
            for mode in [Dominance::Base, Dominance::Closure] {
                let once = preferred_sets(&all, &cl, mode);
                assert_eq!(preferred_sets(&once, &cl, mode), once);
            }
        }
    }
}

#[test]
fn well_founded_iterations_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..80 {
        let sys = random_system(&mut rng, &RandomParams { constants: 2, ..Default::default() });
        let w = well_founded_traced(&sys, NormalizationScheme::Shift).unwrap();
        assert!(w.iterations <= w.ground_atoms + 1, "{} > {}", w.iterations, w.ground_atoms);
    }
}

/// Both normalization schemes against TSM on systems where a mapping predicate has several rules.
#[test]
fn shift_normalization_is_sound_where_plain_split_is_not() {
    let ex = fixture("ex_max");
    let shift = well_founded_traced(&ex, NormalizationScheme::Shift).unwrap().model;
    let plain = well_founded_traced(&ex, NormalizationScheme::PlainSplit).unwrap().model;
    let p_a = parse_ground("1:p(a)");
    assert_eq!(shift.status(&p_a), p2pdl::totalrw::Truth::Undefined);
    assert_ne!(plain.status(&p_a), p2pdl::totalrw::Truth::Undefined);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let sys = random_system(&mut rng, &RandomParams { constants: 2, ..Default::default() });
        let tsm = total_stable_models(&sys).unwrap();
        if tsm.is_empty() {
            continue;
        }
        let w = well_founded_traced(&sys, NormalizationScheme::Shift).unwrap().model;
        assert!(w.true_set.is_subset(&tsm.intersection_all()), "{}", print_system(&sys));
        assert!(w.false_set.intersection(&tsm.union_all()).is_empty(), "{}", print_system(&sys));
    }
}

#[test]
fn negation_free_reduct_agrees_with_full_reduct() {
    use p2pdl::weak::is_weak_model_pos_lp;
    use p2pdl::Interpretation;
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for i in 0..80 {
        let class = [MappingClass::Max, MappingClass::Min, MappingClass::Mixed][i % 3];
        let sys = random_system(&mut rng, &RandomParams { class, constants: 2, ..Default::default() });
        let gs = ground_system(&sys).unwrap();
        for m in oracle_weak_models(&sys) {
            let m: Interpretation = m.into_iter().collect();
            let mut probes = vec![m.clone()];
            probes.extend(m.iter().map(|a| m.filter(|b| b != a)));
            probes.extend(gs.candidates.iter().filter(|c| !m.contains(c)).map(|c| {
                let mut n = m.clone();
                n.insert(c.clone());
                n
            }));
            for p in probes {
                assert_eq!(is_weak_model_pos_lp(&gs, &p).unwrap(), is_weak_model(&gs, &p), "{p}\n{}", print_system(&sys));
            }
        }
    }
}
