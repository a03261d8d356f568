//! Text parser for the formula grammar.
//!
//! ```text
//! formula := 'exists' var '.' formula | 'forall' var '.' formula | imp
//! imp     := or ('->' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | '(' formula ')' | 'true' | 'false' | atom
//! atom    := term '<=' term | term '=' term | term 'in' 'alt' '^' nat
//! term    := ident | '"' letters '"'
//! ```
//!
//! Implications desugar to `!a | b` during parsing. Bound variables that
//! shadow an enclosing binder of the same name are renamed apart; reusing a
//! name in disjoint scopes is left alone.

use super::{BoundMap, FoFormula, Rel, Term};
use crate::words::Alphabet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    StrLit(String),
    Nat(usize),
    LParen,
    RParen,
    Dot,
    Amp,
    Pipe,
    Arrow,
    Bang,
    LessEq,
    Equals,
    Caret,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            if self.peek() == Some(b'#') {
                while !matches!(self.peek(), None | Some(b'\n')) {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b'&' => {
                    self.bump();
                    Tok::Amp
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'!' => {
                    self.bump();
                    Tok::Bang
                }
                b'=' => {
                    self.bump();
                    Tok::Equals
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::LessEq
                    } else {
                        return Err(self.error("expected '<='"));
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(self.error("expected '->'"));
                    }
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(c) if c != b'\n' => s.push(c as char),
                            _ => return Err(self.error("unterminated string literal")),
                        }
                    }
                    Tok::StrLit(s)
                }
                c if c.is_ascii_digit() => {
                    let mut n = 0usize;
                    while let Some(c) = self.peek() {
                        if !c.is_ascii_digit() {
                            break;
                        }
                        n = n * 10 + (c - b'0') as usize;
                        self.bump();
                    }
                    Tok::Nat(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if !(c.is_ascii_alphanumeric() || c == b'_') {
                            break;
                        }
                        s.push(c as char);
                        self.bump();
                    }
                    Tok::Ident(s)
                }
                other => return Err(self.error(format!("unexpected character {:?}", other as char))),
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn error_at(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .or_else(|| self.toks.last().map(|(_, l, c)| (*l, *c + 1)))
            .unwrap_or((1, 1));
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_at(format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<FoFormula, ParseError> {
        if let Some(Tok::Ident(kw)) = self.peek() {
            if kw == "exists" || kw == "forall" {
                let universal = kw == "forall";
                self.pos += 1;
                let var = match self.next() {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(self.error_at("expected a variable name")),
                };
                self.expect(Tok::Dot, "'.' after the quantified variable")?;
                let body = self.formula()?;
                return Ok(if universal {
                    FoFormula::forall(var, body)
                } else {
                    FoFormula::exists(var, body)
                });
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<FoFormula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(FoFormula::or(vec![FoFormula::not(lhs), rhs]));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<FoFormula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FoFormula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<FoFormula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FoFormula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<FoFormula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(FoFormula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Ident(kw)) if kw == "true" => {
                self.pos += 1;
                Ok(FoFormula::True)
            }
            Some(Tok::Ident(kw)) if kw == "false" => {
                self.pos += 1;
                Ok(FoFormula::False)
            }
            Some(Tok::Ident(kw)) if kw == "exists" || kw == "forall" => self.formula(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<FoFormula, ParseError> {
        let lhs = self.term()?;
        match self.next() {
            Some(Tok::LessEq) => Ok(FoFormula::atom(lhs, Rel::Sub, self.term()?)),
            Some(Tok::Equals) => Ok(FoFormula::atom(lhs, Rel::Eq, self.term()?)),
            Some(Tok::Ident(kw)) if kw == "in" => {
                match self.next() {
                    Some(Tok::Ident(a)) if a == "alt" => {}
                    _ => return Err(self.error_at("expected 'alt' after 'in'")),
                }
                self.expect(Tok::Caret, "'^' after 'alt'")?;
                match self.next() {
                    Some(Tok::Nat(n)) => Ok(FoFormula::in_class(lhs, n)),
                    _ => Err(self.error_at("expected a round count")),
                }
            }
            _ => Err(self.error_at("expected '<=', '=' or 'in' after a term")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Ident(v)) => Ok(Term::Var(v)),
            Some(Tok::StrLit(s)) => {
                let word = self.alphabet.word(&s).map_err(|e| {
                    let mut err = self.error_at(e.to_string());
                    err.col = err.col.saturating_sub(1);
                    err
                })?;
                Ok(Term::Const(word))
            }
            _ => Err(self.error_at("expected a term")),
        }
    }
}

/// Renames quantified variables that shadow an enclosing binder of the same
/// name. Fresh names take the form `base_2`, `base_3`, ... avoiding every
/// name already used in the formula.
fn unshadow(f: &FoFormula) -> FoFormula {
    fn freshen(base: &str, used: &mut Vec<String>) -> String {
        let mut k = 2usize;
        loop {
            let cand = format!("{base}_{k}");
            if !used.contains(&cand) {
                used.push(cand.clone());
                return cand;
            }
            k += 1;
        }
    }
    fn go(f: &FoFormula, scope: &mut Vec<(String, String)>, used: &mut Vec<String>) -> FoFormula {
        let rename_term = |t: &Term, scope: &Vec<(String, String)>| match t {
            Term::Var(v) => {
                let name = scope
                    .iter()
                    .rev()
                    .find(|(orig, _)| orig == v)
                    .map(|(_, fresh)| fresh.clone())
                    .unwrap_or_else(|| v.clone());
                Term::Var(name)
            }
            c => c.clone(),
        };
        match f {
            FoFormula::True => FoFormula::True,
            FoFormula::False => FoFormula::False,
            FoFormula::Atom { lhs, rel, rhs } => FoFormula::Atom {
                lhs: rename_term(lhs, scope),
                rel: *rel,
                rhs: rename_term(rhs, scope),
            },
            FoFormula::InClass { term, rounds } => FoFormula::InClass {
                term: rename_term(term, scope),
                rounds: *rounds,
            },
            FoFormula::Not(p) => FoFormula::Not(Box::new(go(p, scope, used))),
            FoFormula::And(ps) => FoFormula::And(ps.iter().map(|p| go(p, scope, used)).collect()),
            FoFormula::Or(ps) => FoFormula::Or(ps.iter().map(|p| go(p, scope, used)).collect()),
            FoFormula::Exists(v, p) | FoFormula::Forall(v, p) => {
                let shadowed = scope.iter().any(|(orig, _)| orig == v);
                let fresh = if shadowed {
                    freshen(v, used)
                } else {
                    v.clone()
                };
                scope.push((v.clone(), fresh.clone()));
                let body = go(p, scope, used);
                scope.pop();
                if matches!(f, FoFormula::Exists(..)) {
                    FoFormula::Exists(fresh, Box::new(body))
                } else {
                    FoFormula::Forall(fresh, Box::new(body))
                }
            }
        }
    }
    let mut used = f.all_vars();
    go(f, &mut Vec::new(), &mut used)
}

/// Parses a formula. The returned bound map lists every variable with the
/// default infinite bound; callers overlay finite bounds from file headers.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<(FoFormula, BoundMap), ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.error_at("trailing input after formula"));
    }
    let f = unshadow(&f);
    let mut bounds = BoundMap::new();
    for v in f.all_vars() {
        bounds.set(v, super::Bound::Infinite);
    }
    Ok((f, bounds))
}

#[cfg(test)]
mod tests {
    use super::super::{classify, Bound};
    use super::*;

    #[test]
    fn parses_the_motivating_sentence() {
        let a = Alphabet::of("abcde");
        let (f, bounds) = parse(
            r#"exists x . "abcd" <= x & "bcde" <= x & !("abcde" <= x)"#,
            &a,
        )
        .unwrap();
        assert_eq!(bounds.get("x"), Bound::Infinite);
        let info = classify(&f, &bounds);
        assert_eq!(info.sigma_rank, 1);
        assert_eq!(info.unbounded, 1);
        match &f {
            FoFormula::Exists(v, body) => {
                assert_eq!(v, "x");
                assert!(matches!(body.as_ref(), FoFormula::And(ps) if ps.len() == 3));
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn parses_closed_atoms_and_implication() {
        let a = Alphabet::of("ab");
        let (f, _) = parse(r#""a" <= "aa""#, &a).unwrap();
        assert!(matches!(f, FoFormula::Atom { .. }));
        assert!(f.free_vars().is_empty());

        let (f, _) = parse("x <= y -> y <= x", &a).unwrap();
        assert_eq!(
            f,
            FoFormula::or(vec![
                FoFormula::not_sub(Term::var("x"), Term::var("y")),
                FoFormula::sub(Term::var("y"), Term::var("x")),
            ])
        );
    }

    #[test]
    fn shadowed_binders_are_renamed() {
        let a = Alphabet::of("ab");
        let (f, _) = parse(r#"exists x . exists x . x <= "a""#, &a).unwrap();
        match &f {
            FoFormula::Exists(outer, body) => {
                assert_eq!(outer, "x");
                match body.as_ref() {
                    FoFormula::Exists(inner, atom) => {
                        assert_eq!(inner, "x_2");
                        assert_eq!(
                            atom.as_ref(),
                            &FoFormula::sub(
                                Term::var("x_2"),
                                Term::constant(a.word("a").unwrap())
                            )
                        );
                    }
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parallel_reuse_is_not_renamed() {
        let a = Alphabet::of("ab");
        let (f, _) = parse(r#"(exists x . x <= y) & (exists x . y <= x)"#, &a).unwrap();
        assert_eq!(f.all_vars(), vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn reports_positions() {
        let a = Alphabet::of("ab");
        let err = parse("exists x .\n x <= \"c\"", &a).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("not in the alphabet"));
    }

    #[test]
    fn in_class_atoms_parse() {
        let a = Alphabet::of("ab");
        let (f, _) = parse("exists x . x in alt^2 & \"a\" <= x", &a).unwrap();
        match f {
            FoFormula::Exists(_, body) => match *body {
                FoFormula::And(ps) => {
                    assert_eq!(ps[0], FoFormula::in_class(Term::var("x"), 2));
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn print_parse_print_is_identity() {
        let a = Alphabet::of("ab");
        let inputs = [
            r#"exists x . "ab" <= x | (forall y . y <= x & x in alt^3)"#,
            r#"!(x = y) & "" <= x"#,
            r#"x <= y -> (y <= x | exists z . z = "aba")"#,
        ];
        for input in inputs {
            let (f1, _) = parse(input, &a).unwrap();
            let printed = f1.to_text(&a);
            let (f2, _) = parse(&printed, &a).unwrap();
            assert_eq!(printed, f2.to_text(&a), "not a fixed point for {input}");
        }
    }
}
