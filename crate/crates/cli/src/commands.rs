use std::fmt::Write as _;
use std::path::Path;

use p2pdl::gen::{encode_sat, encode_three_col, parse_dimacs, random_system, MappingClass, RandomParams};
use p2pdl::ground::ground_system;
use p2pdl::netsim::simulate_query;
use p2pdl::priority::{preferred_weak_models, rew_prioritized, Dominance};
use p2pdl::query::{answer, check_applicable, model_set, Semantics};
use p2pdl::split::split;
use p2pdl::totalrw::{rew_t, rew_w, total_stable_models, well_founded, Truth};
use p2pdl::weak::{local_consistency, EnumOptions};
use p2pdl::{Error, ModelSet, P2PSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{Class, Cli, Command, Dumps, EvalOpts, GenCommand, RewriteKind, Via};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ERROR: u8 = 3;
pub const EXIT_CAP: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
    fn error(message: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooManyCandidates { .. } => EXIT_CAP,
            Error::WrongSemantics(_) | Error::Scope(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        };
        Failure { code, message: e.to_string() }
    }
}

type Res<T> = Result<T, Failure>;

fn load(path: &Path) -> Res<P2PSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    p2pdl::parse_system_named(&text, &path.display().to_string()).map_err(|e| Failure::error(e.to_string()))
}

fn flag(b: bool) -> u8 {
    if b {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

pub fn run(cli: Cli, out: &mut String) -> Res<u8> {
    match cli.command {
        Command::Models(a) => {
            let sys = load(&a.file)?;
            setup(&a.opts)?;
            dumps(&sys, &a.opts.dumps, out)?;
            models(&sys, &a.opts, out)
        }
        Command::Query(a) => {
            let sys = load(&a.file)?;
            setup(&a.opts)?;
            if a.opts.via.is_some() {
                return Err(Failure::usage("--via applies to `models` only"));
            }
            let q = p2pdl::parse_query(&a.query).map_err(|e| Failure::error(format!("query: {e}")))?;
            dumps(&sys, &a.opts.dumps, out)?;
            let r = answer(&sys, &q, a.mode, a.opts.semantics, enum_opts(&a.opts))?;
            if a.opts.json {
                let mut v = json!({
                    "answers": r.answers.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "models": r.model_count,
                });
                if let Some(st) = &r.status {
                    v["status"] = st.iter().map(|(k, t)| (k.to_string(), json!(t.to_string()))).collect();
                }
                writeln!(out, "{v}").unwrap();
            } else {
                writeln!(out, "{}", if r.is_true() { "true" } else { "false" }).unwrap();
                for x in &r.answers {
                    writeln!(out, "{x}").unwrap();
                }
                if let Some(st) = &r.status {
                    for (k, t) in st {
                        writeln!(out, "% {k}: {t}").unwrap();
                    }
                }
            }
            Ok(flag(r.is_true()))
        }
        Command::Rewrite(a) => {
            let sys = load(&a.file)?;
            let d = Dumps {
                dump_ground: a.kind == RewriteKind::Ground,
                dump_plp: a.kind == RewriteKind::Plp,
                dump_split: a.kind == RewriteKind::Split,
                dump_total: a.kind == RewriteKind::Total,
                dump_normal: a.kind == RewriteKind::Normal,
            };
            write_dumps(&sys, &d, out, false)?;
            Ok(EXIT_OK)
        }
        Command::Split(a) => {
            let sys = load(&a.file)?;
            out.push_str(&p2pdl::print_system(&split(&sys)?.system));
            Ok(EXIT_OK)
        }
        Command::Gen(g) => {
            out.push_str(&p2pdl::print_system(&generate(g)?));
            Ok(EXIT_OK)
        }
        Command::Simulate(a) => {
            let sys = load(&a.file)?;
            let q = p2pdl::parse_query(&a.query).map_err(|e| Failure::error(format!("query: {e}")))?;
            let r = simulate_query(&sys, &q)?;
            if let Some(path) = &a.trace {
                let f = std::fs::File::create(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
                r.trace.write_jsonl(std::io::BufWriter::new(f)).map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
            }
            let matching = |m: &p2pdl::Interpretation| -> Vec<String> {
                m.iter().filter(|x| p2pdl::query::matches(&q, x)).map(|x| x.to_string()).collect()
            };
            let (t, u) = (matching(&r.fragment.true_set), matching(&r.fragment.undefined));
            if a.json {
                let v = json!({
                    "true": t,
                    "undefined": u,
                    "status": r.status.map(|s| s.to_string()),
                    "messages": r.trace.events.len(),
                });
                writeln!(out, "{v}").unwrap();
            } else {
                writeln!(out, "true: {{{}}} undefined: {{{}}} false: <implicit>", t.join(", "), u.join(", ")).unwrap();
                if let Some(s) = r.status {
                    writeln!(out, "{q}: {s}").unwrap();
                }
            }
            Ok(match r.status {
                Some(s) => flag(s == Truth::True),
                None => flag(!t.is_empty()),
            })
        }
        Command::Check(a) => {
            let sys = load(&a.file)?;
            let lc = local_consistency(&sys);
            if a.json {
                let v: serde_json::Map<String, serde_json::Value> =
                    lc.iter().map(|(p, ok)| (p.to_string(), json!(if *ok { "consistent" } else { "inconsistent" }))).collect();
                writeln!(out, "{}", serde_json::Value::Object(v)).unwrap();
            } else {
                for (p, ok) in &lc {
                    writeln!(out, "peer {p}: locally {}", if *ok { "consistent" } else { "inconsistent" }).unwrap();
                }
            }
            Ok(flag(lc.values().all(|&ok| ok)))
        }
    }
}

fn setup(opts: &EvalOpts) -> Res<()> {
    if opts.json && opts.dumps.any() {
        return Err(Failure::usage("dump flags cannot be combined with --json"));
    }
    if opts.threads == 0 {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    if opts.threads > 1 {
        // A second initialisation in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build_global();
    }
    Ok(())
}

fn enum_opts(opts: &EvalOpts) -> EnumOptions {
    EnumOptions { max_candidates: opts.max_candidates, parallel: opts.threads > 1 }
}

fn dumps(sys: &P2PSystem, d: &Dumps, out: &mut String) -> Res<()> {
    write_dumps(sys, d, out, true)
}

fn write_dumps(sys: &P2PSystem, d: &Dumps, out: &mut String, headers: bool) -> Res<()> {
    let mut section = |name: &str, body: String| {
        if headers {
            writeln!(out, "% {name}").unwrap();
        }
        out.push_str(&body);
        if !body.ends_with('\n') {
            out.push('\n');
        }
    };
    if d.dump_ground {
        section("ground program", ground_system(sys).map_err(Error::from)?.to_text());
    }
    if d.dump_plp {
        section("prioritized rewriting", rew_prioritized(sys)?.to_string());
    }
    if d.dump_split {
        section("split system", p2pdl::print_system(&split(sys)?.system));
    }
    if d.dump_total {
        section("total rewriting", rew_t(sys)?.to_string());
    }
    if d.dump_normal {
        section("normalized rewriting", rew_w(sys)?.to_string());
    }
    Ok(())
}

fn models(sys: &P2PSystem, opts: &EvalOpts, out: &mut String) -> Res<u8> {
    if opts.semantics == Semantics::Wf {
        if opts.via.is_some() {
            return Err(Failure::usage("--via does not apply to wf"));
        }
        let w = well_founded(sys)?;
        if opts.json {
            let list = |m: &p2pdl::Interpretation| m.iter().map(|a| a.to_string()).collect::<Vec<_>>();
            writeln!(out, "{}", json!({ "true": list(&w.true_set), "undefined": list(&w.undefined) })).unwrap();
        } else {
            writeln!(out, "{w}").unwrap();
        }
        return Ok(EXIT_OK);
    }
    let ms: ModelSet = match opts.via {
        None => model_set(sys, opts.semantics, enum_opts(opts))?,
        Some(Via::Plp) => {
            if !matches!(opts.semantics, Semantics::Max | Semantics::Min | Semantics::MaxMin) {
                return Err(Failure::usage("--via plp needs --semantics max, min or maxmin"));
            }
            check_applicable(sys, opts.semantics)?;
            preferred_weak_models(sys, Dominance::Base)?
        }
        Some(Via::Tsm) => {
            if opts.semantics != Semantics::Max {
                return Err(Failure::usage("--via tsm needs --semantics max"));
            }
            total_stable_models(sys)?
        }
    };
    if opts.json {
        let v: Vec<Vec<String>> = ms.iter().map(|m| m.iter().map(|a| a.to_string()).collect()).collect();
        writeln!(out, "{}", json!(v)).unwrap();
    } else {
        out.push_str(&ms.to_string());
    }
    Ok(flag(!ms.is_empty()))
}

fn generate(g: GenCommand) -> Res<P2PSystem> {
    match g {
        GenCommand::Sat { dimacs } => {
            let text = std::fs::read_to_string(&dimacs).map_err(|e| Failure::error(format!("{}: {e}", dimacs.display())))?;
            let f = parse_dimacs(&text).map_err(|e| Failure::error(format!("{}: {e}", dimacs.display())))?;
            Ok(encode_sat(&f))
        }
        GenCommand::ThreeCol { nodes, edges, colors } => {
            let mut pairs = Vec::new();
            for e in &edges {
                let Some((x, y)) = e.split_once('-') else {
                    return Err(Failure::usage(format!("edge `{e}` is not of the form x-y")));
                };
                for n in [x, y] {
                    if !nodes.iter().any(|m| m == n) {
                        return Err(Failure::usage(format!("edge `{e}` mentions unknown node `{n}`")));
                    }
                }
                pairs.push((x, y));
            }
            let nodes: Vec<&str> = nodes.iter().map(String::as_str).collect();
            let colors: Vec<&str> = colors.iter().map(String::as_str).collect();
            let sys = encode_three_col(&nodes, &colors, &pairs)?;
            p2pdl::validate::validate(&sys).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(sys)
        }
        GenCommand::Random { seed, peers, constants, class, negation, cyclic } => {
            if peers == 0 || constants == 0 || constants > 26 {
                return Err(Failure::usage("need at least one peer and between 1 and 26 constants"));
            }
            let class = match class {
                Class::Max => MappingClass::Max,
                Class::Min => MappingClass::Min,
                Class::Mixed => MappingClass::Mixed,
            };
            let params = RandomParams { peers, constants, class, lp_negation: negation, acyclic: !cyclic, ..Default::default() };
            Ok(random_system(&mut ChaCha8Rng::seed_from_u64(seed), &params))
        }
    }
}
