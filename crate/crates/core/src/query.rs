//! Brave and cautious query answering.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::engine::stable_models_normal;
use crate::engine::NormalProgram;
use crate::ground::ground_system;
use crate::interp::{Interpretation, ModelSet, RoleResolutionError};
use crate::split::g_maxmin_models;
use crate::syntax::{Const, GroundAtom, P2PSystem, PeerAtom, Symbol, Term};
use crate::totalrw::{well_founded, Truth};
use crate::weak::{weak_models, EnumOptions, Selection};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Brave,
    Cautious,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Semantics {
    Fol,
    Weak,
    Max,
    Min,
    MaxMin,
    GMaxMin,
    Wf,
}

impl Semantics {
    pub const ALL: [Semantics; 7] =
        [Semantics::Fol, Semantics::Weak, Semantics::Max, Semantics::Min, Semantics::MaxMin, Semantics::GMaxMin, Semantics::Wf];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Fol => "fol",
            Semantics::Weak => "weak",
            Semantics::Max => "max",
            Semantics::Min => "min",
            Semantics::MaxMin => "maxmin",
            Semantics::GMaxMin => "gmaxmin",
            Semantics::Wf => "wf",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Semantics::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown semantics `{s}` (expected one of fol, weak, max, min, maxmin, gmaxmin, wf)"))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Brave => "brave",
            Mode::Cautious => "cautious",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "brave" => Ok(Mode::Brave),
            "cautious" => Ok(Mode::Cautious),
            _ => Err(format!("unknown mode `{s}` (expected brave or cautious)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub mode: Mode,
    pub semantics: Semantics,
    pub answers: BTreeSet<GroundAtom>,
    pub model_count: usize,
    /// Three-valued status of every matching atom; only for `wf`.
    pub status: Option<BTreeMap<GroundAtom, Truth>>,
}

impl QueryResult {
    pub fn is_true(&self) -> bool {
        !self.answers.is_empty()
    }
}

/// Minimal models of `D ∪ LP ∪ St(MP) ∪ IC`; stable models when LP has negation.
pub fn fol_models(sys: &P2PSystem) -> Result<ModelSet, Error> {
    let gs = ground_system(sys)?;
    let mut p = NormalProgram::new();
    for r in &gs.rules {
        p.add_rule(r.head.as_ref(), &r.pos, &r.neg);
    }
    Ok(stable_models_normal(&p).map(|m| gs.strip_fresh(m)))
}

/// The model set of a semantics; `wf` has none.
pub fn model_set(sys: &P2PSystem, sem: Semantics, opts: EnumOptions) -> Result<ModelSet, Error> {
    let sel = match sem {
        Semantics::Fol => return fol_models(sys),
        Semantics::GMaxMin => return Ok(g_maxmin_models(sys, opts)?.1),
        Semantics::Wf => return Err(Error::WrongSemantics("the well-founded model is three-valued, not a model set".into())),
        Semantics::Weak => Selection::None,
        Semantics::Max => Selection::Max,
        Semantics::Min => Selection::Min,
        Semantics::MaxMin => Selection::MaxMin,
    };
    check_applicable(sys, sem)?;
    let gs = ground_system(sys)?;
    Ok(weak_models(&gs, sel, opts)?.selected)
}

/// Rejects max on systems with minimal mapping rules and min on systems with maximal ones.
pub fn check_applicable(sys: &P2PSystem, sem: Semantics) -> Result<(), Error> {
    match sem {
        Semantics::Max if !sys.is_maximal() => {
            Err(Error::WrongSemantics("max semantics requires a system without minimal mapping rules".into()))
        }
        Semantics::Min if !sys.is_minimal() => {
            Err(Error::WrongSemantics("min semantics requires a system without maximal mapping rules".into()))
        }
        _ => Ok(()),
    }
}

/// Does a ground atom instantiate the pattern? Repeated variables must agree.
pub fn matches(pattern: &PeerAtom, a: &GroundAtom) -> bool {
    if pattern.peer != a.peer || pattern.pred != a.pred || pattern.args.len() != a.args.len() {
        return false;
    }
    let mut bind: HashMap<&Symbol, &Const> = HashMap::new();
    pattern.args.iter().zip(&a.args).all(|(t, c)| match t {
        Term::Const(k) => k == c,
        Term::Var(v) => *bind.entry(v).or_insert(c) == c,
    })
}

fn matching(m: &Interpretation, q: &PeerAtom) -> BTreeSet<GroundAtom> {
    m.iter().filter(|a| matches(q, a)).cloned().collect()
}

pub fn answer(sys: &P2PSystem, query: &PeerAtom, mode: Mode, sem: Semantics, opts: EnumOptions) -> Result<QueryResult, Error> {
    if sys.roles().get(&query.key()).is_none() {
        return Err(RoleResolutionError(query.key()).into());
    }
    if sem == Semantics::Wf {
        let w = well_founded(sys)?;
        let t = matching(&w.true_set, query);
        let u = matching(&w.undefined, query);
        let mut status: BTreeMap<GroundAtom, Truth> =
            t.iter().map(|a| (a.clone(), Truth::True)).chain(u.iter().map(|a| (a.clone(), Truth::Undefined))).collect();
        if let Some(g) = query.to_ground() {
            status.entry(g).or_insert(Truth::False);
        }
        let answers = match mode {
            Mode::Cautious => t,
            Mode::Brave => t.union(&u).cloned().collect(),
        };
        return Ok(QueryResult { mode, semantics: sem, answers, model_count: 1, status: Some(status) });
    }
    let models = model_set(sys, sem, opts)?;
    let mut per_model = models.iter().map(|m| matching(m, query));
    let answers = match mode {
        Mode::Brave => per_model.flatten().collect(),
        Mode::Cautious => match per_model.next() {
            None => BTreeSet::new(),
            Some(first) => per_model.fold(first, |acc, s| acc.intersection(&s).cloned().collect()),
        },
    };
    Ok(QueryResult { mode, semantics: sem, answers, model_count: models.len(), status: None })
}
