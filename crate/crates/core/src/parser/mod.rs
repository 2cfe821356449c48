//! Text format for peer programs and queries.

mod lexer;
mod print;

use std::collections::HashMap;
use std::fmt;

pub use print::{print_rule_in_peer, print_system};

use crate::syntax::{
    sym, BuiltinAtom, CmpOp, Const, GroundAtom, Literal, MappingKind, P2PSystem, Peer, PeerAtom, PeerId, PeerRule,
    Term,
};
use crate::validate::{violations, Item, Location};
use lexer::{lex, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    fn at(file: &str, line: usize, column: usize) -> Self {
        SourceSpan { file: file.to_string(), line, column }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    Lexical,
    Syntactic,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntactic => "syntax error",
            ErrorKind::Semantic => "semantic error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, kind: ErrorKind, message: impl Into<String>) -> Self {
        ParseError { span, kind, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}: {}", self.span.file, self.span.line, self.span.column, self.kind, self.message)
    }
}

/// All diagnostics produced by one parse.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            e.fmt(f)?;
        }
        Ok(())
    }
}

const DEFAULT_FILE: &str = "<input>";

/// Parses a system; on failure returns every diagnostic found.
pub fn parse_system(text: &str) -> Result<P2PSystem, ParseErrors> {
    parse_system_named(text, DEFAULT_FILE)
}

/// As [`parse_system`], reporting spans against `file`.
pub fn parse_system_named(text: &str, file: &str) -> Result<P2PSystem, ParseErrors> {
    let mut errors = Vec::new();
    let tokens = lex(text, file, &mut errors);
    let mut p = Parser { toks: tokens, pos: 0, file, errors, spans: HashMap::new() };
    let sys = p.system();
    let Parser { mut errors, spans, .. } = p;
    if errors.iter().all(|e| e.kind == ErrorKind::Semantic) {
        for v in violations(&sys) {
            let span = spans.get(&v.loc).or_else(|| spans.get(&Location { peer: v.loc.peer, item: Item::Peer })).cloned();
            let span = span.unwrap_or_else(|| SourceSpan::at(file, 1, 1));
            errors.push(ParseError::new(span, ErrorKind::Semantic, v.message));
        }
    }
    if errors.is_empty() {
        Ok(sys)
    } else {
        errors.sort_by(|a, b| a.span.cmp(&b.span));
        Err(ParseErrors(errors))
    }
}

/// Parses a query atom `i:p(t1,...,tk)`; variables make it a pattern.
pub fn parse_query(text: &str) -> Result<PeerAtom, ParseErrors> {
    let mut errors = Vec::new();
    let tokens = lex(text, DEFAULT_FILE, &mut errors);
    if !errors.is_empty() {
        return Err(ParseErrors(errors));
    }
    let mut p = Parser { toks: tokens, pos: 0, file: DEFAULT_FILE, errors, spans: HashMap::new() };
    let res = (|| {
        if !matches!(p.peek(), Tok::Int(_)) {
            return Err(p.err_here("missing peer id: expected `i:` before the atom"));
        }
        let atom = p.qatom()?;
        p.expect(&Tok::Eof, "end of query")?;
        Ok(atom)
    })();
    match res {
        Ok(a) => Ok(a),
        Err(e) => Err(ParseErrors(vec![e])),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    errors: Vec<ParseError>,
    spans: HashMap<Location, SourceSpan>,
}

type PResult<T> = Result<T, ParseError>;

enum BodyElem {
    Lit(Literal),
    Builtin(BuiltinAtom),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }
    fn span(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan::at(self.file, t.line, t.col)
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), ErrorKind::Syntactic, msg)
    }
    fn expect(&mut self, t: &Tok, what: &str) -> PResult<()> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}, found {}", self.peek().describe())))
        }
    }
    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn system(&mut self) -> P2PSystem {
        let mut sys = P2PSystem::new();
        while *self.peek() != Tok::Eof {
            if !self.is_kw("peer") {
                let e = self.err_here(format!("expected `peer`, found {}", self.peek().describe()));
                self.errors.push(e);
                self.bump();
                while *self.peek() != Tok::Eof && !self.is_kw("peer") {
                    self.bump();
                }
                continue;
            }
            let span = self.span();
            self.bump();
            let id = match self.peek().clone() {
                Tok::Int(i) if i >= 1 && i <= u32::MAX as i64 => {
                    self.bump();
                    i as u32
                }
                Tok::Int(_) => {
                    let e = ParseError::new(self.span(), ErrorKind::Semantic, "peer identifiers must be positive");
                    self.errors.push(e);
                    self.bump();
                    0
                }
                _ => {
                    let e = self.err_here(format!("expected peer id, found {}", self.peek().describe()));
                    self.errors.push(e);
                    0
                }
            };
            if let Err(e) = self.expect(&Tok::LBrace, "`{`") {
                self.errors.push(e);
                while !matches!(self.peek(), Tok::Eof | Tok::RBrace) && !self.is_kw("peer") {
                    self.bump();
                }
                if *self.peek() == Tok::RBrace {
                    self.bump();
                }
                continue;
            }
            let mut peer = Peer::new(id.max(1));
            peer.id = PeerId(id);
            let pid = PeerId(id);
            self.spans.entry(Location { peer: pid, item: Item::Peer }).or_insert(span.clone());
            while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                if self.is_kw("peer") {
                    break;
                }
                if let Err(e) = self.item(&mut peer) {
                    self.errors.push(e);
                    self.recover_item();
                }
            }
            if let Err(e) = self.expect(&Tok::RBrace, "`}`") {
                self.errors.push(e);
            }
            if id == 0 {
                continue;
            }
            if sys.peers.contains_key(&pid) {
                self.errors.push(ParseError::new(span, ErrorKind::Semantic, format!("duplicate peer block {id}")));
                continue;
            }
            sys.peers.insert(pid, peer);
        }
        sys
    }

    fn recover_item(&mut self) {
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.bump();
                    return;
                }
                Tok::RBrace | Tok::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn item(&mut self, peer: &mut Peer) -> PResult<()> {
        let pid = peer.id;
        let span = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            t => return Err(self.err_here(format!("expected an item keyword, found {}", t.describe()))),
        };
        self.bump();
        match kw.as_str() {
            "fact" => {
                let a = self.atom(pid)?;
                self.expect(&Tok::Dot, "`.`")?;
                match a.to_ground() {
                    Some(g) => {
                        self.spans.entry(Location { peer: pid, item: Item::Fact(g.clone()) }).or_insert(span);
                        peer.database.insert(g);
                    }
                    None => self.errors.push(ParseError::new(span, ErrorKind::Semantic, format!("fact {a} must be ground"))),
                }
            }
            "rule" => {
                let head = self.atom(pid)?;
                self.expect(&Tok::If, "`:-`")?;
                let (body, builtins) = self.body(pid, false)?;
                self.expect(&Tok::Dot, "`.`")?;
                self.spans.insert(Location { peer: pid, item: Item::Standard(peer.standard_rules.len()) }, span);
                peer.standard_rules.push(PeerRule::standard(head, body, builtins));
            }
            "ic" => {
                self.expect(&Tok::If, "`:-`")?;
                let (body, builtins) = self.body(pid, false)?;
                self.expect(&Tok::Dot, "`.`")?;
                self.spans.insert(Location { peer: pid, item: Item::Constraint(peer.constraints.len()) }, span);
                peer.constraints.push(PeerRule::constraint(body, builtins));
            }
            "maxmap" | "minmap" => {
                let kind = if kw == "maxmap" { MappingKind::Max } else { MappingKind::Min };
                let head = self.atom(pid)?;
                let arrow = if kind == MappingKind::Max { Tok::MaxArrow } else { Tok::MinArrow };
                let what = if kind == MappingKind::Max { "`<~`" } else { "`<-`" };
                self.expect(&arrow, what)?;
                let (body, builtins) = self.body(pid, true)?;
                self.expect(&Tok::Dot, "`.`")?;
                self.spans.insert(Location { peer: pid, item: Item::Mapping(peer.mapping_rules.len()) }, span);
                peer.mapping_rules.push(PeerRule { kind: crate::syntax::RuleKind::Mapping(kind), head: Some(head), body, builtins });
            }
            other => return Err(ParseError::new(span, ErrorKind::Syntactic, format!("unknown item keyword `{other}`"))),
        }
        Ok(())
    }

    fn body(&mut self, pid: PeerId, qualified: bool) -> PResult<(Vec<Literal>, Vec<BuiltinAtom>)> {
        let mut lits = Vec::new();
        let mut builtins = Vec::new();
        loop {
            match self.body_elem(pid, qualified)? {
                BodyElem::Lit(l) => lits.push(l),
                BodyElem::Builtin(b) => builtins.push(b),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok((lits, builtins))
    }

    fn body_elem(&mut self, pid: PeerId, qualified: bool) -> PResult<BodyElem> {
        if self.is_kw("not") && !matches!(self.peek_at(1), Tok::LParen | Tok::Comma | Tok::Dot) && !is_cmp(self.peek_at(1)) {
            self.bump();
            let a = if qualified { self.qatom()? } else { self.atom(pid)? };
            return Ok(BodyElem::Lit(Literal::neg(a)));
        }
        let starts_builtin = match (self.peek(), self.peek_at(1)) {
            (Tok::Var(_) | Tok::Str(_), _) => true,
            (Tok::Int(_), Tok::Colon) => false,
            (Tok::Int(_), _) => true,
            (Tok::Ident(_), t) => is_cmp(t),
            _ => false,
        };
        if starts_builtin {
            let left = self.term()?;
            let op = match self.peek() {
                Tok::Lt => CmpOp::Lt,
                Tok::Gt => CmpOp::Gt,
                Tok::Le => CmpOp::Le,
                Tok::Ge => CmpOp::Ge,
                Tok::Eq => CmpOp::Eq,
                Tok::Ne => CmpOp::Ne,
                t => return Err(self.err_here(format!("expected a comparison operator, found {}", t.describe()))),
            };
            self.bump();
            let right = self.term()?;
            return Ok(BodyElem::Builtin(BuiltinAtom::new(left, op, right)));
        }
        if qualified {
            if !matches!(self.peek(), Tok::Int(_)) {
                return Err(self.err_here("mapping-rule body atoms must be qualified with a source peer id"));
            }
            Ok(BodyElem::Lit(Literal::pos(self.qatom()?)))
        } else {
            Ok(BodyElem::Lit(Literal::pos(self.atom(pid)?)))
        }
    }

    /// `INT ":" atom`
    fn qatom(&mut self) -> PResult<PeerAtom> {
        let peer = match self.peek().clone() {
            Tok::Int(i) if i >= 1 && i <= u32::MAX as i64 => {
                self.bump();
                PeerId(i as u32)
            }
            t => return Err(self.err_here(format!("expected peer id, found {}", t.describe()))),
        };
        self.expect(&Tok::Colon, "`:`")?;
        self.bare_atom(peer)
    }

    /// Optionally qualified atom; unqualified atoms belong to `pid`.
    fn atom(&mut self, pid: PeerId) -> PResult<PeerAtom> {
        if matches!(self.peek(), Tok::Int(_)) && *self.peek_at(1) == Tok::Colon {
            return self.qatom();
        }
        self.bare_atom(pid)
    }

    fn bare_atom(&mut self, peer: PeerId) -> PResult<PeerAtom> {
        let name = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                s
            }
            t => return Err(self.err_here(format!("expected a predicate name, found {}", t.describe()))),
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    t => return Err(self.err_here(format!("expected `,` or `)`, found {}", t.describe()))),
                }
            }
        }
        Ok(PeerAtom { peer, pred: sym(&name), args })
    }

    fn term(&mut self) -> PResult<Term> {
        let t = match self.peek().clone() {
            Tok::Int(i) => Term::Const(Const::Int(i)),
            Tok::Ident(s) => Term::Const(Const::Ident(sym(&s))),
            Tok::Str(s) => Term::Const(Const::Str(sym(&s))),
            Tok::Var(v) => Term::Var(sym(&v)),
            t => return Err(self.err_here(format!("expected a term, found {}", t.describe()))),
        };
        self.bump();
        Ok(t)
    }
}

fn is_cmp(t: &Tok) -> bool {
    matches!(t, Tok::Lt | Tok::Gt | Tok::Le | Tok::Ge | Tok::Eq | Tok::Ne)
}

/// Parses a ground atom in canonical text form, e.g. `2:q(a)`.
pub fn parse_ground_atom(text: &str) -> Result<GroundAtom, ParseErrors> {
    let a = parse_query(text)?;
    a.to_ground().ok_or_else(|| {
        ParseErrors(vec![ParseError::new(SourceSpan::at(DEFAULT_FILE, 1, 1), ErrorKind::Syntactic, "expected a ground atom")])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX_MAX: &str = "peer 2 { fact q(a). fact q(b). }\npeer 1 {\n  maxmap p(X) <~ 2:q(X).\n  ic :- p(X), p(Y), X != Y.\n}\n";

    #[test]
    fn parses_ex_max() {
        let sys = parse_system(EX_MAX).unwrap();
        assert_eq!(sys.peers.len(), 2);
        assert_eq!(sys.max_mapping_rules().count(), 1);
        assert_eq!(sys.constraints().count(), 1);
        assert_eq!(sys.facts().count(), 2);
    }

    #[test]
    fn unsafe_rule_is_reported() {
        let e = parse_system("peer 1 { rule p(X) :- not q(X). }").unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].kind, ErrorKind::Semantic);
        assert!(e.0[0].message.contains("unsafe"), "{}", e.0[0].message);
        assert_eq!((e.0[0].span.line, e.0[0].span.column), (1, 10));
    }

    #[test]
    fn source_peer_out_of_range() {
        let e = parse_system("peer 1 { maxmap p(X) <~ 2:q(X). }").unwrap_err();
        assert!(e.0.iter().any(|d| d.message.contains("out of range")));
    }

    #[test]
    fn other_semantic_errors() {
        let cases = [
            ("peer 1 { fact q(a). } peer 2 { maxmap p(X) <~ 1:q(X), not 1:r(X). }", "negative body"),
            ("peer 1 { rule p(X) :- 2:q(X). } peer 2 { fact q(a). }", "peer mismatch"),
            ("peer 1 { fact q(a). } peer 2 { rule p(X) :- r(X). maxmap p(X) <~ 1:q(X). }", "two roles"),
            ("peer 1 { fact q(a). fact q(a,b). }", "arity clash"),
            ("peer 1 { fact q(X). }", "ground"),
            ("peer 1 { } peer 1 { }", "duplicate"),
            ("peer 1 { fact p__not(a). }", "reserved"),
        ];
        for (src, needle) in cases {
            let e = parse_system(src).unwrap_err();
            assert!(e.0.iter().any(|d| d.message.contains(needle)), "{src}: {e}");
        }
    }

    #[test]
    fn collects_independent_errors() {
        let src = "peer 1 {\n rule p(X) :- not q(X).\n rule r(Y) :- not s(Y).\n fact t(Z).\n}\npeer 2 { maxmap u(X) <~ 9:v(X). }";
        let e = parse_system(src).unwrap_err();
        assert!(e.0.len() >= 4, "{e}");
    }

    #[test]
    fn syntax_error_recovery() {
        let src = "peer 1 { rule p(X :- q(X). fact a. rule b :- . }";
        let e = parse_system(src).unwrap_err();
        assert!(e.0.len() >= 2, "{e}");
        assert!(e.0.iter().all(|d| d.kind == ErrorKind::Syntactic));
    }

    #[test]
    fn query_forms() {
        let q = parse_query("3:order(laptop)").unwrap();
        assert_eq!(q, PeerAtom::new(3, "order", vec![Term::ident("laptop")]));
        let q = parse_query("1:p(X)").unwrap();
        assert!(!q.is_ground());
        let e = parse_query("order(laptop)").unwrap_err();
        assert_eq!(e.0[0].kind, ErrorKind::Syntactic);
        assert!(e.0[0].message.contains("missing peer id"));
    }

    #[test]
    fn comments_strings_and_builtins() {
        let src = "% header\npeer 1 { fact s(\"x y\", -3). % trailing\n rule t(A) :- s(A, B), B < 0, A != \"z\". }";
        let sys = parse_system(src).unwrap();
        let r = &sys.standard_rules().next().unwrap();
        assert_eq!(r.builtins.len(), 2);
        assert_eq!(sys.facts().next().unwrap().args[1], Const::Int(-3));
    }

    #[test]
    fn diagnostics_format() {
        let e = parse_system_named("peer 1 { fact q(X). }", "f.p2p").unwrap_err();
        assert_eq!(e.to_string(), "f.p2p:1:10: semantic error: fact 1:q(X) must be ground");
    }
}
