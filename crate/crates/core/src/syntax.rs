//! Terms, peer atoms, peer rules, peers and systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-by-refcount name used for predicates, identifiers and variables.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Peer identifier; always at least 1 in a valid system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeerId(pub u32);

impl fmt::Display for PeerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A constant. The derived order puts integers before identifiers before strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Const {
    Int(i64),
    Ident(Symbol),
    Str(Symbol),
}

impl Const {
    pub fn ident(s: &str) -> Self {
        Const::Ident(sym(s))
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(i) => write!(f, "{i}"),
            Const::Ident(s) => write!(f, "{s}"),
            Const::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Const),
    Var(Symbol),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(sym(name))
    }
    pub fn ident(name: &str) -> Self {
        Term::Const(Const::ident(name))
    }
    pub fn as_const(&self) -> Option<&Const> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => f.write_str(v),
        }
    }
}

/// Internal suffixes for predicates introduced by rewritings.
pub const PRIME_SUFFIX: &str = "__not";
pub const TEST_SUFFIX: &str = "__t";
pub const VIOL_SUFFIX: &str = "__v";

/// Whether a user-supplied predicate name collides with a rewriting suffix.
pub fn is_reserved_name(name: &str) -> bool {
    [PRIME_SUFFIX, TEST_SUFFIX, VIOL_SUFFIX]
        .iter()
        .any(|s| name.len() > s.len() && name.ends_with(s))
}

/// Renders internal rewriting names in their mathematical form (`p'`, `p^t`, `p^v`).
pub fn display_pred(name: &str) -> String {
    if let Some(base) = name.strip_suffix(PRIME_SUFFIX) {
        format!("{base}'")
    } else if let Some(base) = name.strip_suffix(TEST_SUFFIX) {
        format!("{base}^t")
    } else if let Some(base) = name.strip_suffix(VIOL_SUFFIX) {
        format!("{base}^v")
    } else {
        name.to_string()
    }
}

fn fmt_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        a.fmt(f)?;
    }
    f.write_str(")")
}

/// Predicate identity: a name is local to its peer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredKey {
    pub peer: PeerId,
    pub name: Symbol,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.peer, display_pred(&self.name))
    }
}

/// A possibly non-ground atom `i:p(t1,...,tk)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeerAtom {
    pub peer: PeerId,
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl PeerAtom {
    pub fn new(peer: u32, pred: &str, args: Vec<Term>) -> Self {
        PeerAtom { peer: PeerId(peer), pred: sym(pred), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { peer: self.peer, name: self.pred.clone() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self.args.iter().map(|t| t.as_const().cloned()).collect::<Option<Vec<_>>>()?;
        Some(GroundAtom { peer: self.peer, pred: self.pred.clone(), args })
    }

    pub fn vars(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    /// Same atom with the predicate name replaced.
    pub fn renamed(&self, pred: Symbol) -> Self {
        PeerAtom { peer: self.peer, pred, args: self.args.clone() }
    }

    pub fn with_suffix(&self, suffix: &str) -> Self {
        self.renamed(sym(&format!("{}{}", self.pred, suffix)))
    }
}

impl fmt::Display for PeerAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.peer, display_pred(&self.pred))?;
        fmt_args(f, &self.args)
    }
}

/// A ground atom. The derived order is the canonical order: peer, predicate, arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub peer: PeerId,
    pub pred: Symbol,
    pub args: Vec<Const>,
}

impl GroundAtom {
    pub fn new(peer: u32, pred: &str, args: Vec<Const>) -> Self {
        GroundAtom { peer: PeerId(peer), pred: sym(pred), args }
    }

    /// Convenience constructor where every argument is an identifier.
    pub fn idents(peer: u32, pred: &str, args: &[&str]) -> Self {
        Self::new(peer, pred, args.iter().map(|a| Const::ident(a)).collect())
    }

    pub fn key(&self) -> PredKey {
        PredKey { peer: self.peer, name: self.pred.clone() }
    }

    pub fn to_atom(&self) -> PeerAtom {
        PeerAtom {
            peer: self.peer,
            pred: self.pred.clone(),
            args: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }

    pub fn renamed(&self, pred: Symbol) -> Self {
        GroundAtom { peer: self.peer, pred, args: self.args.clone() }
    }

    pub fn with_suffix(&self, suffix: &str) -> Self {
        self.renamed(sym(&format!("{}{}", self.pred, suffix)))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.peer, display_pred(&self.pred))?;
        fmt_args(f, &self.args)
    }
}

/// Total canonical order on ground atoms.
pub fn canonical_order(a: &GroundAtom, b: &GroundAtom) -> std::cmp::Ordering {
    a.cmp(b)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: PeerAtom,
}

impl Literal {
    pub fn pos(atom: PeerAtom) -> Self {
        Literal { positive: true, atom }
    }
    pub fn neg(atom: PeerAtom) -> Self {
        Literal { positive: false, atom }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        self.atom.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn eval(self, l: &Const, r: &Const) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Gt => l > r,
            CmpOp::Le => l <= r,
            CmpOp::Ge => l >= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BuiltinAtom {
    pub op: CmpOp,
    pub left: Term,
    pub right: Term,
}

impl BuiltinAtom {
    pub fn new(left: Term, op: CmpOp, right: Term) -> Self {
        BuiltinAtom { op, left, right }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Symbol> {
        [&self.left, &self.right].into_iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for BuiltinAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.left, self.op.symbol(), self.right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MappingKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Standard,
    Constraint,
    Mapping(MappingKind),
}

/// One of the four peer-rule kinds; `head` is `None` exactly for constraints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeerRule {
    pub kind: RuleKind,
    pub head: Option<PeerAtom>,
    pub body: Vec<Literal>,
    pub builtins: Vec<BuiltinAtom>,
}

impl PeerRule {
    pub fn standard(head: PeerAtom, body: Vec<Literal>, builtins: Vec<BuiltinAtom>) -> Self {
        PeerRule { kind: RuleKind::Standard, head: Some(head), body, builtins }
    }
    pub fn constraint(body: Vec<Literal>, builtins: Vec<BuiltinAtom>) -> Self {
        PeerRule { kind: RuleKind::Constraint, head: None, body, builtins }
    }
    pub fn mapping(kind: MappingKind, head: PeerAtom, body: Vec<PeerAtom>, builtins: Vec<BuiltinAtom>) -> Self {
        PeerRule {
            kind: RuleKind::Mapping(kind),
            head: Some(head),
            body: body.into_iter().map(Literal::pos).collect(),
            builtins,
        }
    }

    pub fn positive_atoms(&self) -> impl Iterator<Item = &PeerAtom> {
        self.body.iter().filter(|l| l.positive).map(|l| &l.atom)
    }
    pub fn negative_atoms(&self) -> impl Iterator<Item = &PeerAtom> {
        self.body.iter().filter(|l| !l.positive).map(|l| &l.atom)
    }
    pub fn has_negation(&self) -> bool {
        self.body.iter().any(|l| !l.positive)
    }
    pub fn mapping_kind(&self) -> Option<MappingKind> {
        match self.kind {
            RuleKind::Mapping(k) => Some(k),
            _ => None,
        }
    }

    /// Variables that violate safety.
    pub fn unsafe_vars(&self) -> BTreeSet<Symbol> {
        let bound: BTreeSet<&Symbol> = self.positive_atoms().flat_map(|a| a.vars()).collect();
        let mut needed: Vec<&Symbol> = Vec::new();
        if let Some(h) = &self.head {
            needed.extend(h.vars());
        }
        needed.extend(self.negative_atoms().flat_map(|a| a.vars()));
        needed.extend(self.builtins.iter().flat_map(|b| b.vars()));
        needed.into_iter().filter(|v| !bound.contains(v)).cloned().collect()
    }

    /// All atoms of the rule, head first.
    pub fn atoms(&self) -> impl Iterator<Item = &PeerAtom> {
        self.head.iter().chain(self.body.iter().map(|l| &l.atom))
    }
}

impl fmt::Display for PeerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            h.fmt(f)?;
        }
        let arrow = match self.kind {
            RuleKind::Standard | RuleKind::Constraint => " <- ",
            RuleKind::Mapping(MappingKind::Max) => " <~ ",
            RuleKind::Mapping(MappingKind::Min) => " <- ",
        };
        f.write_str(if self.head.is_some() { arrow } else { "<- " })?;
        let mut first = true;
        for l in &self.body {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            l.fmt(f)?;
        }
        for b in &self.builtins {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            b.fmt(f)?;
        }
        f.write_str(".")
    }
}

/// A peer `<D_i, LP_i, MP_i, IC_i>`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Peer {
    pub id: PeerId,
    pub database: BTreeSet<GroundAtom>,
    pub standard_rules: Vec<PeerRule>,
    pub mapping_rules: Vec<PeerRule>,
    pub constraints: Vec<PeerRule>,
}

impl Default for PeerId {
    fn default() -> Self {
        PeerId(1)
    }
}

impl Peer {
    pub fn new(id: u32) -> Self {
        Peer { id: PeerId(id), ..Default::default() }
    }

    pub fn rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.standard_rules.iter().chain(&self.mapping_rules).chain(&self.constraints)
    }

    /// Source peers referenced by this peer's mapping rules.
    pub fn sources(&self) -> BTreeSet<PeerId> {
        self.mapping_rules.iter().flat_map(|r| r.body.iter().map(|l| l.atom.peer)).collect()
    }
}

/// Role of a predicate in the base / derived / mapping partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredRole {
    Base,
    Derived,
    /// Mapping predicate; the flags record which kinds of mapping rules define it.
    Mapping { max: bool, min: bool },
}

/// Roles of every predicate mentioned in a system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Roles {
    map: BTreeMap<PredKey, PredRole>,
}

impl Roles {
    pub fn get(&self, key: &PredKey) -> Option<PredRole> {
        self.map.get(key).copied()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&PredKey, &PredRole)> {
        self.map.iter()
    }
    pub fn is_mapping(&self, key: &PredKey) -> bool {
        matches!(self.get(key), Some(PredRole::Mapping { .. }))
    }
    pub fn is_derived(&self, key: &PredKey) -> bool {
        matches!(self.get(key), Some(PredRole::Derived))
    }
    pub fn has_max(&self) -> bool {
        self.map.values().any(|r| matches!(r, PredRole::Mapping { max: true, .. }))
    }
    pub fn has_min(&self) -> bool {
        self.map.values().any(|r| matches!(r, PredRole::Mapping { min: true, .. }))
    }
    pub fn insert(&mut self, key: PredKey, role: PredRole) {
        self.map.insert(key, role);
    }
}

/// A set of peers keyed by id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct P2PSystem {
    pub peers: BTreeMap<PeerId, Peer>,
}

impl P2PSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_peers(peers: impl IntoIterator<Item = Peer>) -> Self {
        P2PSystem { peers: peers.into_iter().map(|p| (p.id, p)).collect() }
    }

    pub fn peer(&self, id: PeerId) -> Option<&Peer> {
        self.peers.get(&id)
    }

    pub fn peer_mut(&mut self, id: u32) -> &mut Peer {
        self.peers.entry(PeerId(id)).or_insert_with(|| Peer::new(id))
    }

    pub fn max_peer_id(&self) -> u32 {
        self.peers.keys().next_back().map_or(0, |p| p.0)
    }

    pub fn facts(&self) -> impl Iterator<Item = &GroundAtom> {
        self.peers.values().flat_map(|p| p.database.iter())
    }
    pub fn standard_rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.peers.values().flat_map(|p| p.standard_rules.iter())
    }
    pub fn mapping_rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.peers.values().flat_map(|p| p.mapping_rules.iter())
    }
    pub fn max_mapping_rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.mapping_rules().filter(|r| r.mapping_kind() == Some(MappingKind::Max))
    }
    pub fn min_mapping_rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.mapping_rules().filter(|r| r.mapping_kind() == Some(MappingKind::Min))
    }
    pub fn constraints(&self) -> impl Iterator<Item = &PeerRule> {
        self.peers.values().flat_map(|p| p.constraints.iter())
    }
    pub fn rules(&self) -> impl Iterator<Item = &PeerRule> {
        self.peers.values().flat_map(|p| p.rules())
    }

    pub fn is_maximal(&self) -> bool {
        self.min_mapping_rules().next().is_none()
    }
    pub fn is_minimal(&self) -> bool {
        self.max_mapping_rules().next().is_none()
    }
    pub fn lp_has_negation(&self) -> bool {
        self.standard_rules().any(|r| r.has_negation())
    }

    /// The base / derived / mapping partition inferred from rule heads.
    pub fn roles(&self) -> Roles {
        let mut roles = Roles::default();
        for f in self.facts() {
            roles.map.entry(f.key()).or_insert(PredRole::Base);
        }
        for r in self.rules() {
            for a in r.atoms() {
                roles.map.entry(a.key()).or_insert(PredRole::Base);
            }
        }
        for r in self.standard_rules() {
            if let Some(h) = &r.head {
                roles.map.insert(h.key(), PredRole::Derived);
            }
        }
        for r in self.mapping_rules() {
            let h = r.head.as_ref().expect("mapping rule has a head");
            let kind = r.mapping_kind().expect("mapping rule");
            let e = roles.map.entry(h.key()).or_insert(PredRole::Mapping { max: false, min: false });
            let (mut max, mut min) = match *e {
                PredRole::Mapping { max, min } => (max, min),
                _ => (false, false),
            };
            match kind {
                MappingKind::Max => max = true,
                MappingKind::Min => min = true,
            }
            *e = PredRole::Mapping { max, min };
        }
        roles
    }

    /// Every constant mentioned anywhere in the system.
    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out: BTreeSet<Const> = self.facts().flat_map(|f| f.args.iter().cloned()).collect();
        for r in self.rules() {
            for a in r.atoms() {
                out.extend(a.args.iter().filter_map(|t| t.as_const().cloned()));
            }
            for b in &r.builtins {
                out.extend([&b.left, &b.right].into_iter().filter_map(|t| t.as_const().cloned()));
            }
        }
        out
    }

    /// Arity of every predicate, first occurrence wins.
    pub fn arities(&self) -> BTreeMap<PredKey, usize> {
        let mut out = BTreeMap::new();
        for f in self.facts() {
            out.entry(f.key()).or_insert(f.args.len());
        }
        for r in self.rules() {
            for a in r.atoms() {
                out.entry(a.key()).or_insert(a.args.len());
            }
        }
        out
    }
}
