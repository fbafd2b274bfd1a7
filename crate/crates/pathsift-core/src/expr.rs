//! Lexical utilities for C condition expressions.
//!
//! Conditions travel through the pipeline as source text; nothing here
//! evaluates C semantics. This module provides the small amount of
//! structure the rest of the crate needs: tokenization, whitespace
//! normalization (the identity used for de-duplicating feasible-path
//! expressions), the Boolean skeleton of an expression (`&&`/`||`/`!`
//! over opaque atoms), and extraction of variable and call atoms.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One lexical token of a C expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Number(String),
    StrLit(String),
    CharLit(String),
    /// Any operator or punctuation, longest-match first (`&&`, `->`, `<=`, ...).
    Punct(String),
}

impl Token {
    pub fn text(&self) -> &str {
        match self {
            Token::Ident(s) | Token::Number(s) | Token::StrLit(s) | Token::CharLit(s)
            | Token::Punct(s) => s,
        }
    }
}

const PUNCT2: &[&str] = &[
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "->", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=",
];

/// Tokenize a C expression. Unterminated literals are closed at end of
/// input rather than rejected; warning text is not always well-formed.
pub fn tokenize(src: &str) -> Vec<Token> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token::Ident(src[start..i].to_string()));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'.' || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push(Token::Number(src[start..i].to_string()));
        } else if c == '"' || c == '\'' {
            let quote = bytes[i];
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i] != quote {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 1).min(bytes.len());
            let lit = src[start..i].to_string();
            if quote == b'"' {
                out.push(Token::StrLit(lit));
            } else {
                out.push(Token::CharLit(lit));
            }
        } else {
            let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
            if PUNCT2.contains(&two) {
                out.push(Token::Punct(two.to_string()));
                i += 2;
            } else {
                out.push(Token::Punct(c.to_string()));
                i += 1;
            }
        }
    }
    out
}

/// Canonical single-spaced rendering; the textual identity used when
/// de-duplicating condition expressions.
pub fn normalize(src: &str) -> String {
    let toks = tokenize(src);
    let mut out = String::new();
    for (k, t) in toks.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(t.text());
    }
    out
}

/// C keywords that are never variable atoms.
const KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "NULL", "true", "false",
];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

/// A call atom: callee name plus the raw argument texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallAtom {
    pub callee: String,
    pub args: Vec<String>,
    /// The whole call expression, normalized.
    pub text: String,
}

/// Free variables and calls of an expression, in order of first occurrence.
///
/// `a->b` and `a.b` count as a use of `a`; the member name is not a
/// variable. An identifier directly followed by `(` is a call.
pub fn atoms(src: &str) -> (Vec<String>, Vec<CallAtom>) {
    let toks = tokenize(src);
    let mut vars: Vec<String> = Vec::new();
    let mut calls: Vec<CallAtom> = Vec::new();
    let mut seen_vars: BTreeSet<String> = BTreeSet::new();
    let mut seen_calls: BTreeSet<String> = BTreeSet::new();
    let mut i = 0;
    while i < toks.len() {
        if let Token::Ident(name) = &toks[i] {
            let after_member = i > 0
                && matches!(&toks[i - 1], Token::Punct(p) if p == "." || p == "->");
            let is_call = matches!(toks.get(i + 1), Some(Token::Punct(p)) if p == "(");
            if is_call && !is_keyword(name) && !after_member {
                let (args, end) = collect_args(&toks, i + 1);
                let text = normalize_tokens(&toks[i..end]);
                if seen_calls.insert(text.clone()) {
                    calls.push(CallAtom { callee: name.clone(), args, text });
                }
                // Argument identifiers are also variable uses; keep walking
                // inside the call rather than skipping it.
                i += 2;
                continue;
            }
            if !is_call && !is_keyword(name) && !after_member && seen_vars.insert(name.clone()) {
                vars.push(name.clone());
            }
        }
        i += 1;
    }
    (vars, calls)
}

fn normalize_tokens(toks: &[Token]) -> String {
    let mut out = String::new();
    for (k, t) in toks.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(t.text());
    }
    out
}

/// Collect top-level argument texts of a call whose `(` is at `open`.
/// Returns the args and the token index one past the closing `)`.
fn collect_args(toks: &[Token], open: usize) -> (Vec<String>, usize) {
    let mut depth = 0usize;
    let mut args = Vec::new();
    let mut cur: Vec<Token> = Vec::new();
    let mut i = open;
    while i < toks.len() {
        match &toks[i] {
            Token::Punct(p) if p == "(" => {
                depth += 1;
                if depth > 1 {
                    cur.push(toks[i].clone());
                }
            }
            Token::Punct(p) if p == ")" => {
                depth -= 1;
                if depth == 0 {
                    if !cur.is_empty() {
                        args.push(normalize_tokens(&cur));
                    }
                    return (args, i + 1);
                }
                cur.push(toks[i].clone());
            }
            Token::Punct(p) if p == "," && depth == 1 => {
                args.push(normalize_tokens(&cur));
                cur.clear();
            }
            t => cur.push(t.clone()),
        }
        i += 1;
    }
    (args, i)
}

/// Boolean skeleton of a C condition: `&&`/`||`/`!` over opaque leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    /// Anything that is not a Boolean connective, normalized.
    Atom(String),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    /// Distinct leaf atoms, sorted.
    pub fn atom_set(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set
    }

    fn collect_atoms(&self, set: &mut BTreeSet<String>) {
        match self {
            BoolExpr::Atom(a) => {
                set.insert(a.clone());
            }
            BoolExpr::Not(inner) => inner.collect_atoms(set),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => {
                for x in xs {
                    x.collect_atoms(set);
                }
            }
        }
    }

    /// Evaluate under a truth assignment of leaf atoms. Atoms missing from
    /// the assignment default to false.
    pub fn eval(&self, assign: &dyn Fn(&str) -> bool) -> bool {
        match self {
            BoolExpr::Atom(a) => assign(a),
            BoolExpr::Not(inner) => !inner.eval(assign),
            BoolExpr::And(xs) => xs.iter().all(|x| x.eval(assign)),
            BoolExpr::Or(xs) => xs.iter().any(|x| x.eval(assign)),
        }
    }
}

/// Parse the Boolean skeleton of a C condition. Relational and arithmetic
/// subexpressions become opaque atoms; only `&&`, `||`, `!` and
/// parenthesization are interpreted.
pub fn parse_bool(src: &str) -> BoolExpr {
    let toks = tokenize(src);
    let mut p = BoolParser { toks: &toks, pos: 0 };
    let e = p.parse_or();
    if p.pos < p.toks.len() {
        // Trailing garbage: treat the whole thing as one atom.
        return BoolExpr::Atom(normalize(src));
    }
    e
}

struct BoolParser<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> BoolParser<'a> {
    fn peek_punct(&self) -> Option<&str> {
        match self.toks.get(self.pos) {
            Some(Token::Punct(p)) => Some(p.as_str()),
            _ => None,
        }
    }

    fn parse_or(&mut self) -> BoolExpr {
        let mut parts = vec![self.parse_and()];
        while self.peek_punct() == Some("||") {
            self.pos += 1;
            parts.push(self.parse_and());
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BoolExpr::Or(parts)
        }
    }

    fn parse_and(&mut self) -> BoolExpr {
        let mut parts = vec![self.parse_unary()];
        while self.peek_punct() == Some("&&") {
            self.pos += 1;
            parts.push(self.parse_unary());
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BoolExpr::And(parts)
        }
    }

    fn parse_unary(&mut self) -> BoolExpr {
        if self.peek_punct() == Some("!") {
            self.pos += 1;
            return BoolExpr::Not(Box::new(self.parse_unary()));
        }
        self.parse_atom()
    }

    /// A parenthesized group, or a run of tokens up to the next top-level
    /// Boolean connective.
    fn parse_atom(&mut self) -> BoolExpr {
        if self.peek_punct() == Some("(") {
            // Look ahead: if the parenthesized group is immediately followed
            // by more atom tokens (a cast or call tail), fall through to the
            // opaque-run scan below.
            let close = self.matching_paren(self.pos);
            let next_is_connective = match close.and_then(|c| self.toks.get(c + 1)) {
                None => true,
                Some(Token::Punct(p)) => p == "&&" || p == "||" || p == ")",
                _ => false,
            };
            if let (Some(close), true) = (close, next_is_connective) {
                let save = self.pos;
                self.pos += 1;
                let inner = self.parse_or();
                if self.pos == close {
                    self.pos += 1;
                    return inner;
                }
                self.pos = save;
            }
        }
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(t) = self.toks.get(self.pos) {
            if let Token::Punct(p) = t {
                match p.as_str() {
                    "(" | "[" => depth += 1,
                    ")" | "]" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    "&&" | "||" if depth == 0 => break,
                    _ => {}
                }
            }
            self.pos += 1;
        }
        BoolExpr::Atom(normalize_tokens(&self.toks[start..self.pos]))
    }

    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        for (k, t) in self.toks.iter().enumerate().skip(open) {
            if let Token::Punct(p) = t {
                if p == "(" {
                    depth += 1;
                } else if p == ")" {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
            }
        }
        None
    }
}

/// Identifiers occurring anywhere in `src`, keywords excluded.
pub fn identifiers(src: &str) -> BTreeSet<String> {
    tokenize(src)
        .into_iter()
        .filter_map(|t| match t {
            Token::Ident(s) if !is_keyword(&s) => Some(s),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_whitespace() {
        assert_eq!(normalize("a  &&\tb"), "a && b");
        assert_eq!(normalize("!( p )"), "! ( p )");
    }

    #[test]
    fn atoms_split_vars_and_calls() {
        let (vars, calls) = atoms("!skb_unref(skb) && len > 0");
        assert_eq!(vars, vec!["skb".to_string(), "len".to_string()]);
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].callee, "skb_unref");
        assert_eq!(calls[0].args, vec!["skb".to_string()]);
    }

    #[test]
    fn member_access_is_not_a_variable() {
        let (vars, calls) = atoms("tun->flags & 0x1");
        assert_eq!(vars, vec!["tun".to_string()]);
        assert!(calls.is_empty());
    }

    #[test]
    fn bool_skeleton_structure() {
        let e = parse_bool("connected && md");
        assert_eq!(
            e,
            BoolExpr::And(vec![
                BoolExpr::Atom("connected".into()),
                BoolExpr::Atom("md".into())
            ])
        );
        let e = parse_bool("!(a || b < 3)");
        match e {
            BoolExpr::Not(inner) => match *inner {
                BoolExpr::Or(parts) => {
                    assert_eq!(parts[1], BoolExpr::Atom("b < 3".into()));
                }
                other => panic!("expected Or, got {other:?}"),
            },
            other => panic!("expected Not, got {other:?}"),
        }
    }

    #[test]
    fn relational_expr_is_opaque() {
        let e = parse_bool("x + 1 >= limit");
        assert_eq!(e, BoolExpr::Atom("x + 1 >= limit".into()));
    }

    #[test]
    fn eval_respects_structure() {
        let e = parse_bool("a && !b");
        assert!(e.eval(&|name| name == "a"));
        assert!(!e.eval(&|_| true));
    }

    #[test]
    fn cast_call_tail_stays_one_atom() {
        let e = parse_bool("(unsigned)x > 3 && y");
        match e {
            BoolExpr::And(parts) => {
                assert_eq!(parts[0], BoolExpr::Atom("( unsigned ) x > 3".into()))
            }
            other => panic!("expected And, got {other:?}"),
        }
    }
}
