//! Line-oriented text format for rewrite systems.
//!
//! ```text
//! signature
//!   0 : constructor 0;0
//!   s : constructor 0;1
//!   f : defined lex 1;1
//! precedence
//!   f > g
//!   f = f2
//! rules
//!   f(s(; x); y) -> h(x; y, f(x; p(x; y)))
//! ```
//!
//! `#` starts a comment. Identifiers not declared in the signature are
//! variables. Inside a term the semicolon separates normal from safe
//! arguments; when it is omitted the declared split is applied to the flat
//! argument list. Whitespace inside terms is insignificant.

use std::fmt::Write as _;

use thiserror::Error;

use crate::term::{FunctionSymbol, Signature, SymbolKind, Term};
use crate::trs::{Precedence, Rule, Trs, TrsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] TrsError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrintError {
    #[error("symbol `{0}` has a non-prefix separation, which the text format cannot express")]
    NonPrefixSeparation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Gt,
    Eq,
    Arrow,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub(crate) tok: Tok,
    pub(crate) col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                toks.push(Token { tok: Tok::LParen, col });
            }
            ')' => {
                chars.next();
                toks.push(Token { tok: Tok::RParen, col });
            }
            ',' => {
                chars.next();
                toks.push(Token { tok: Tok::Comma, col });
            }
            ';' => {
                chars.next();
                toks.push(Token { tok: Tok::Semi, col });
            }
            ':' => {
                chars.next();
                toks.push(Token { tok: Tok::Colon, col });
            }
            '>' => {
                chars.next();
                toks.push(Token { tok: Tok::Gt, col });
            }
            '=' => {
                chars.next();
                toks.push(Token { tok: Tok::Eq, col });
            }
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        toks.push(Token { tok: Tok::Arrow, col });
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            line: lineno,
                            col,
                            message: "expected `->`".into(),
                        })
                    }
                }
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if is_ident_char(c) {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Token {
                    tok: Tok::Ident(name),
                    col,
                });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: lineno,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or_else(|| self.toks.last().map(|t| t.col + 1).unwrap_or(1))
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            col: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.next();
                Ok(())
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Token {
                    tok: Tok::Ident(name),
                    ..
                }) = self.next()
                else {
                    unreachable!()
                };
                Ok((name.clone(), col))
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

fn parse_term_tokens(cur: &mut Cursor, sig: &Signature) -> Result<Term, ParseError> {
    let (name, col) = cur.expect_ident("a term")?;
    let applied = cur.peek() == Some(&Tok::LParen);
    let mut normals: Vec<Term> = Vec::new();
    let mut safes: Vec<Term> = Vec::new();
    let mut seen_semi = false;
    if applied {
        cur.next();
        loop {
            match cur.peek() {
                Some(Tok::RParen) => {
                    cur.next();
                    break;
                }
                Some(Tok::Semi) => {
                    if seen_semi {
                        return cur.err("a term may contain at most one `;` argument separator");
                    }
                    seen_semi = true;
                    cur.next();
                }
                Some(_) => {
                    let t = parse_term_tokens(cur, sig)?;
                    if seen_semi {
                        safes.push(t);
                    } else {
                        normals.push(t);
                    }
                    match cur.peek() {
                        Some(Tok::Comma) => {
                            cur.next();
                            match cur.peek() {
                                Some(Tok::RParen) | Some(Tok::Semi) | None => {
                                    return cur.err("expected a term after `,`")
                                }
                                _ => {}
                            }
                        }
                        Some(Tok::Semi) | Some(Tok::RParen) => {}
                        _ => return cur.err("expected `,`, `;` or `)`"),
                    }
                }
                None => return cur.err("unclosed `(`"),
            }
        }
    }

    match sig.id_of(&name) {
        None => {
            if applied {
                Err(ParseError::Syntax {
                    line: cur.line,
                    col,
                    message: format!("undeclared symbol `{name}` used with arguments"),
                })
            } else {
                Ok(Term::var(name))
            }
        }
        Some(id) => {
            let sym = sig.symbol(id);
            let (k, l) = (sym.normal_arity(), sym.safe_arity());
            if !seen_semi && !normals.is_empty() {
                // Flat argument list: apply the declared split.
                if normals.len() != k + l {
                    return Err(ParseError::Syntax {
                        line: cur.line,
                        col,
                        message: format!(
                            "symbol `{name}` has arity {};{}, got {} arguments",
                            k,
                            l,
                            normals.len()
                        ),
                    });
                }
                safes = normals.split_off(k);
            } else if normals.len() != k || safes.len() != l {
                return Err(ParseError::Syntax {
                    line: cur.line,
                    col,
                    message: format!(
                        "symbol `{name}` has arity {};{}, got {};{}",
                        k,
                        l,
                        normals.len(),
                        safes.len()
                    ),
                });
            }
            // Rebuild source order from the display lists via the mask.
            let mut args = Vec::with_capacity(k + l);
            let mut ni = normals.into_iter();
            let mut si = safes.into_iter();
            for pos in 0..sym.arity() {
                if sym.is_normal_position(pos) {
                    args.push(ni.next().expect("normal count checked"));
                } else {
                    args.push(si.next().expect("safe count checked"));
                }
            }
            Ok(Term::app(id, args))
        }
    }
}

/// Parses a single term against an existing signature. Undeclared
/// identifiers become variables.
pub fn parse_term(sig: &Signature, text: &str) -> Result<Term, ParseError> {
    let toks = tokenize(text, 1)?;
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        line: 1,
    };
    let t = parse_term_tokens(&mut cur, sig)?;
    if !cur.at_end() {
        return cur.err("trailing input after term");
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Signature,
    Precedence,
    Rules,
}

/// Parses a complete system from the text format and validates it.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    let mut sig = Signature::new();
    let mut prec = Precedence::default();
    let mut rules: Vec<Rule> = Vec::new();
    let mut section = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        // Section headers are a single bare identifier.
        if toks.len() == 1 {
            if let Tok::Ident(word) = &toks[0].tok {
                match word.as_str() {
                    "signature" => {
                        section = Section::Signature;
                        continue;
                    }
                    "precedence" => {
                        section = Section::Precedence;
                        continue;
                    }
                    "rules" => {
                        section = Section::Rules;
                        continue;
                    }
                    _ => {}
                }
            }
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: lineno,
        };
        match section {
            Section::None => {
                return cur.err("expected a `signature`, `precedence` or `rules` section header")
            }
            Section::Signature => {
                let (name, _) = cur.expect_ident("a symbol name")?;
                cur.expect(Tok::Colon, "`:`")?;
                let (kind_word, kcol) = cur.expect_ident("`constructor` or `defined`")?;
                let kind = match kind_word.as_str() {
                    "constructor" => SymbolKind::Constructor,
                    "defined" => SymbolKind::Defined,
                    other => {
                        return Err(ParseError::Syntax {
                            line: lineno,
                            col: kcol,
                            message: format!(
                                "expected `constructor` or `defined`, found `{other}`"
                            ),
                        })
                    }
                };
                let mut lex = false;
                if let Some(Tok::Ident(w)) = cur.peek() {
                    if w == "lex" {
                        lex = true;
                        cur.next();
                    }
                }
                let normal = parse_nat(&mut cur, "normal arity")?;
                cur.expect(Tok::Semi, "`;` between arities")?;
                let safe = parse_nat(&mut cur, "safe arity")?;
                if !cur.at_end() {
                    return cur.err("trailing input after signature entry");
                }
                sig.add(FunctionSymbol::new(name, kind, lex, normal, safe))
                    .map_err(TrsError::from)?;
            }
            Section::Precedence => {
                let (a, acol) = cur.expect_ident("a symbol name")?;
                let strict = match cur.peek() {
                    Some(Tok::Gt) => true,
                    Some(Tok::Eq) => false,
                    _ => return cur.err("expected `>` or `=`"),
                };
                cur.next();
                let (b, bcol) = cur.expect_ident("a symbol name")?;
                if !cur.at_end() {
                    return cur.err("trailing input after precedence entry");
                }
                let aid = sig.id_of(&a).ok_or_else(|| ParseError::Syntax {
                    line: lineno,
                    col: acol,
                    message: format!("undeclared symbol `{a}` in precedence"),
                })?;
                let bid = sig.id_of(&b).ok_or_else(|| ParseError::Syntax {
                    line: lineno,
                    col: bcol,
                    message: format!("undeclared symbol `{b}` in precedence"),
                })?;
                if strict {
                    prec.strict.push((aid, bid));
                } else {
                    prec.equal.push((aid, bid));
                }
            }
            Section::Rules => {
                let lhs = parse_term_tokens(&mut cur, &sig)?;
                cur.expect(Tok::Arrow, "`->`")?;
                let rhs = parse_term_tokens(&mut cur, &sig)?;
                if !cur.at_end() {
                    return cur.err("trailing input after rule");
                }
                rules.push(Rule { lhs, rhs });
            }
        }
    }

    Ok(Trs::new(sig, prec, rules)?)
}

fn parse_nat(cur: &mut Cursor, what: &str) -> Result<usize, ParseError> {
    let (word, col) = cur.expect_ident(what)?;
    word.parse::<usize>().map_err(|_| ParseError::Syntax {
        line: cur.line,
        col,
        message: format!("expected a natural number for {what}, found `{word}`"),
    })
}

/// Prints a system back into the text format. Fails if some symbol's
/// separation is not a prefix split, since the format only carries counts.
pub fn print_trs(trs: &Trs) -> Result<String, PrintError> {
    let sig = &trs.signature;
    let mut out = String::new();
    out.push_str("signature\n");
    for (_, sym) in sig.iter() {
        if !sym.has_prefix_mask() {
            return Err(PrintError::NonPrefixSeparation(sym.name.clone()));
        }
        let kind = match sym.kind {
            SymbolKind::Constructor => "constructor",
            SymbolKind::Defined => "defined",
        };
        let lex = if sym.lex { " lex" } else { "" };
        writeln!(
            out,
            "  {} : {}{} {};{}",
            sym.name,
            kind,
            lex,
            sym.normal_arity(),
            sym.safe_arity()
        )
        .expect("write to string");
    }
    if !trs.precedence.strict.is_empty() || !trs.precedence.equal.is_empty() {
        out.push_str("precedence\n");
        for &(a, b) in &trs.precedence.strict {
            writeln!(out, "  {} > {}", sig.name(a), sig.name(b)).expect("write to string");
        }
        for &(a, b) in &trs.precedence.equal {
            writeln!(out, "  {} = {}", sig.name(a), sig.name(b)).expect("write to string");
        }
    }
    out.push_str("rules\n");
    for rule in &trs.rules {
        writeln!(
            out,
            "  {} -> {}",
            rule.lhs.display(sig),
            rule.rhs.display(sig)
        )
        .expect("write to string");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R_PR: &str = "\
# two-rule recursion over unary numerals
signature
  0 : constructor 0;0
  s : constructor 0;1
  f : defined 0;2
  g : defined 0;1
  h : defined 0;3
precedence
  f > g
  f > h
rules
  f(; 0, y) -> g(; y)
  f(; s(; x), y) -> h(; x, y, f(; x, y))
";

    #[test]
    fn parses_r_pr() {
        let trs = parse_trs(R_PR).unwrap();
        assert_eq!(trs.rules.len(), 2);
        for (_, sym) in trs.signature.iter() {
            assert_eq!(sym.normal_arity(), 0, "all positions safe in this system");
        }
        let ranks = trs.canonical_ranks();
        let f = trs.signature.id_of("f").unwrap();
        let g = trs.signature.id_of("g").unwrap();
        assert!(ranks[f.0] > ranks[g.0]);
    }

    #[test]
    fn empty_rules_section() {
        let trs = parse_trs("signature\n  0 : constructor 0;0\nrules\n").unwrap();
        assert_eq!(trs.rules.len(), 0);
        let trs2 = parse_trs("signature\n  0 : constructor 0;0\n").unwrap();
        assert_eq!(trs2.rules.len(), 0);
    }

    #[test]
    fn strict_cycle_is_an_error() {
        let text = "\
signature
  0 : constructor 0;0
  f : defined 0;1
  g : defined 0;1
precedence
  f > g
  g > f
rules
";
        assert!(matches!(
            parse_trs(text),
            Err(ParseError::Invalid(TrsError::PrecedenceCycle(_)))
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_trs("signature\n  0 : constructor 0;0\nrules\n  f( -> 0\n").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 4);
                assert!(col > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn arity_and_variable_application_errors() {
        let base = "signature\n  0 : constructor 0;0\n  f : defined 1;1\nrules\n";
        let bad_arity = format!("{base}  f(0; 0, 0) -> 0\n");
        assert!(matches!(
            parse_trs(&bad_arity),
            Err(ParseError::Syntax { .. })
        ));
        let var_app = format!("{base}  f(x(0); y) -> 0\n");
        let err = parse_trs(&var_app).unwrap_err();
        match err {
            ParseError::Syntax { message, .. } => {
                assert!(message.contains("undeclared symbol `x`"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flat_argument_lists_use_declared_split() {
        let text = "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  a : defined 2;0
rules
  a(0, y) -> s(y)
";
        let trs = parse_trs(text).unwrap();
        let printed = print_trs(&trs).unwrap();
        assert!(printed.contains("a(0, y;) -> s(; y)"));
    }

    #[test]
    fn print_parse_round_trip() {
        let trs = parse_trs(R_PR).unwrap();
        let printed = print_trs(&trs).unwrap();
        let reparsed = parse_trs(&printed).unwrap();
        assert_eq!(trs, reparsed);
    }
}
