use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    Var(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    If,     // :-
    MaxArrow, // <~
    MinArrow, // <-
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("integer {i}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::If => "`:-`".into(),
            Tok::MaxArrow => "`<~`".into(),
            Tok::MinArrow => "`<-`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits `src` into tokens; lexical errors are collected and the offending character skipped.
pub fn lex(src: &str, file: &str, errors: &mut Vec<ParseError>) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |line, column| SourceSpan { file: file.to_string(), line, column };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let simple = match (c, next) {
            (':', Some('-')) => Some((Tok::If, 2)),
            (':', _) => Some((Tok::Colon, 1)),
            ('<', Some('~')) => Some((Tok::MaxArrow, 2)),
            ('<', Some('-')) => Some((Tok::MinArrow, 2)),
            ('<', Some('=')) => Some((Tok::Le, 2)),
            ('<', _) => Some((Tok::Lt, 1)),
            ('>', Some('=')) => Some((Tok::Ge, 2)),
            ('>', _) => Some((Tok::Gt, 1)),
            ('!', Some('=')) => Some((Tok::Ne, 2)),
            ('=', _) => Some((Tok::Eq, 1)),
            ('{', _) => Some((Tok::LBrace, 1)),
            ('}', _) => Some((Tok::RBrace, 1)),
            ('(', _) => Some((Tok::LParen, 1)),
            (')', _) => Some((Tok::RParen, 1)),
            (',', _) => Some((Tok::Comma, 1)),
            ('.', _) => Some((Tok::Dot, 1)),
            _ => None,
        };
        if let Some((tok, n)) = simple {
            out.push(Token { tok, line: tl, col: tc });
            advance(n, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            advance(1, &mut i, &mut col);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            match text.parse::<i64>() {
                Ok(v) => out.push(Token { tok: Tok::Int(v), line: tl, col: tc }),
                Err(_) => errors.push(ParseError::new(span(tl, tc), ErrorKind::Lexical, format!("integer literal {text} out of range"))),
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(text) } else { Tok::Ident(text) };
            out.push(Token { tok, line: tl, col: tc });
            continue;
        }
        if c == '"' {
            advance(1, &mut i, &mut col);
            let mut s = String::new();
            let mut closed = false;
            while i < chars.len() {
                let d = chars[i];
                if d == '"' {
                    advance(1, &mut i, &mut col);
                    closed = true;
                    break;
                }
                if d == '\n' {
                    break;
                }
                if d == '\\' {
                    let e = chars.get(i + 1).copied();
                    let mapped = match e {
                        Some('"') => Some('"'),
                        Some('\\') => Some('\\'),
                        Some('n') => Some('\n'),
                        Some('t') => Some('\t'),
                        _ => None,
                    };
                    match mapped {
                        Some(m) => {
                            s.push(m);
                            advance(2, &mut i, &mut col);
                        }
                        None => {
                            errors.push(ParseError::new(span(line, col), ErrorKind::Lexical, "invalid escape sequence in string"));
                            advance(1, &mut i, &mut col);
                        }
                    }
                    continue;
                }
                s.push(d);
                advance(1, &mut i, &mut col);
            }
            if closed {
                out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            } else {
                errors.push(ParseError::new(span(tl, tc), ErrorKind::Lexical, "unterminated string literal"));
            }
            continue;
        }
        errors.push(ParseError::new(span(tl, tc), ErrorKind::Lexical, format!("unexpected character `{c}`")));
        advance(1, &mut i, &mut col);
    }
    out.push(Token { tok: Tok::Eof, line, col });
    out
}
