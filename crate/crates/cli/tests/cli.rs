use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.p2p")).display().to_string()
}

fn p2pdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p2pdl")).args(args).env_remove("P2PDL_MAX_CANDIDATES").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn models_ex_max_prints_two_lines() {
    let o = p2pdl(&["models", &fixture("ex_max"), "--semantics", "max"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "{1:p(a), 2:q(a), 2:q(b)}\n{1:p(b), 2:q(a), 2:q(b)}\n");
}

#[test]
fn check_reports_local_inconsistency() {
    let o = p2pdl(&["check", &fixture("ex_inc")]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("peer 1: locally inconsistent"), "{s}");
    assert!(s.contains("peer 2: locally consistent"), "{s}");
    assert_eq!(code(&p2pdl(&["check", &fixture("ex_max")])), 0);
}

#[test]
fn json_models_round_trip() {
    let o = p2pdl(&["models", &fixture("ex_mm"), "--semantics", "maxmin", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Vec<Vec<String>> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.len(), 2);
    for atom in v.iter().flatten() {
        let parsed = p2pdl::parser::parse_ground_atom(atom).unwrap();
        assert_eq!(&parsed.to_string(), atom);
    }
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    for (fx, sem) in [("ex_mm", "maxmin"), ("ex_inc", "gmaxmin"), ("ex_min", "min")] {
        let f = fixture(fx);
        let a = p2pdl(&["models", &f, "-s", sem]);
        let b = p2pdl(&["models", &f, "-s", sem]);
        let c = p2pdl(&["models", &f, "-s", sem, "--threads", "4"]);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout, c.stdout);
    }
}

#[test]
fn rewriting_route_matches_direct_selection() {
    let f = fixture("ex_mm");
    let direct = p2pdl(&["models", &f, "-s", "maxmin"]);
    let plp = p2pdl(&["models", &f, "-s", "maxmin", "--via", "plp"]);
    assert_eq!(direct.stdout, plp.stdout);
    let f = fixture("ex_max");
    let tsm = p2pdl(&["models", &f, "-s", "max", "--via", "tsm"]);
    assert_eq!(p2pdl(&["models", &f, "-s", "max"]).stdout, tsm.stdout);
}

#[test]
fn query_exit_code_mirrors_truth() {
    let f = fixture("ex_max");
    assert_eq!(code(&p2pdl(&["query", &f, "-q", "1:p(a)", "--mode", "brave", "--semantics", "max"])), 0);
    assert_eq!(code(&p2pdl(&["query", &f, "-q", "1:p(a)", "--mode", "cautious", "--semantics", "max"])), 1);
    let o = p2pdl(&["query", &f, "-q", "1:p(X)", "--mode", "brave", "-s", "max", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["models"], 2);
    assert_eq!(v["answers"], serde_json::json!(["1:p(a)", "1:p(b)"]));
}

#[test]
fn wf_query_reports_status() {
    let o = p2pdl(&["query", &fixture("ex_max"), "-q", "1:p(a)", "-s", "wf", "--mode", "brave", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"]["1:p(a)"], "undefined");
}

#[test]
fn error_exit_codes() {
    // Max on a system with minimal mapping rules.
    assert_eq!(code(&p2pdl(&["models", &fixture("ex_min"), "-s", "max"])), 2);
    assert_eq!(code(&p2pdl(&["models", &fixture("ex_max"), "-s", "nonsense"])), 2);
    assert_eq!(code(&p2pdl(&["models", &fixture("ex_max"), "--json", "--dump-plp"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.p2p");
    std::fs::write(&bad, "peer 1 { fact p(a) }").unwrap();
    let o = p2pdl(&["models", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&p2pdl(&["models", "/nonexistent/x.p2p"])), 3);

    assert_eq!(code(&p2pdl(&["models", &fixture("ex_max"), "-s", "max", "--max-candidates", "1"])), 4);
    let o = Command::new(env!("CARGO_BIN_EXE_p2pdl"))
        .args(["models", &fixture("ex_max"), "-s", "max"])
        .env("P2PDL_MAX_CANDIDATES", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn empty_model_set_exits_one() {
    let o = p2pdl(&["models", &fixture("ex_max"), "-s", "fol"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "");
}

#[test]
fn dumps_go_to_stdout() {
    let f = fixture("ex_max");
    let o = p2pdl(&["models", &f, "-s", "max", "--dump-ground", "--dump-plp", "--dump-split", "--dump-total", "--dump-normal"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for h in ["% ground program", "% prioritized rewriting", "% split system", "% total rewriting", "% normalized rewriting"] {
        assert!(s.contains(h), "missing {h} in {s}");
    }
    assert!(s.contains("priority[1]: 1:p(X) >= 1:p'(X)."), "{s}");
    let wf = p2pdl(&["models", &f, "-s", "wf"]);
    assert_eq!(stdout(&wf), "true: {2:q(a), 2:q(b)} undefined: {1:p(a), 1:p(b)} false: <implicit>\n");
}

#[test]
fn rewrite_and_split_outputs_parse_back() {
    let f = fixture("ex_inc");
    let o = p2pdl(&["split", &f]);
    assert_eq!(code(&o), 0);
    let sys = p2pdl::parse_system(&stdout(&o)).unwrap();
    assert_eq!(sys.peers.len(), 4);
    let g = p2pdl(&["rewrite", &fixture("ex_max"), "--kind", "ground"]);
    p2pdl::parse_system(&stdout(&g)).unwrap();
    for k in ["plp", "total", "normal"] {
        assert_eq!(code(&p2pdl(&["rewrite", &fixture("ex_max"), "--kind", k])), 0, "{k}");
    }
}

#[test]
fn gen_sat_and_3col_emit_loadable_systems() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    std::fs::write(&cnf, "c tiny\np cnf 2 2\n1 -2 0\n2 0\n").unwrap();
    let o = p2pdl(&["gen", "sat", "--dimacs", cnf.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let sat = dir.path().join("sat.p2p");
    std::fs::write(&sat, stdout(&o)).unwrap();
    assert_eq!(code(&p2pdl(&["models", sat.to_str().unwrap(), "-s", "maxmin"])), 0);

    let o = p2pdl(&["gen", "3col", "--nodes", "a,b,c", "--edges", "a-b,b-c,a-c"]);
    assert_eq!(code(&o), 0);
    let col = dir.path().join("col.p2p");
    std::fs::write(&col, stdout(&o)).unwrap();
    let m = p2pdl(&["models", col.to_str().unwrap(), "-s", "max", "--json"]);
    let v: Vec<Vec<String>> = serde_json::from_str(&stdout(&m)).unwrap();
    // A triangle has 3! proper colorings.
    assert_eq!(v.len(), 6);

    assert_eq!(code(&p2pdl(&["gen", "3col", "--nodes", "a", "--edges", "a-z"])), 2);
    std::fs::write(&cnf, "p cnf 1 1\n5 0\n").unwrap();
    assert_eq!(code(&p2pdl(&["gen", "sat", "--dimacs", cnf.to_str().unwrap()])), 3);
}

#[test]
fn gen_random_is_seeded() {
    let a = p2pdl(&["gen", "random", "--seed", "9", "--class", "mixed"]);
    let b = p2pdl(&["gen", "random", "--seed", "9", "--class", "mixed"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    p2pdl::parse_system(&stdout(&a)).unwrap();
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = p2pdl(&["simulate", &fixture("ex_max"), "-q", "1:p(a)", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("1:p(a): undefined"));
    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    for l in &lines {
        for k in ["t", "kind", "from", "to", "request_id", "predicate"] {
            assert!(l.get(k).is_some(), "{k} missing in {l}");
        }
    }
    let o = p2pdl(&["simulate", &fixture("ex_max"), "-q", "2:q(a)"]);
    assert_eq!(code(&o), 0);
    // Minimal mapping rules are outside the distributed fragment.
    assert_eq!(code(&p2pdl(&["simulate", &fixture("ex_min"), "-q", "1:p(a)"])), 2);
}
