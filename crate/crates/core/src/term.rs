//! First-order terms over a finite signature, with a deterministic total
//! order, a signature-driven parser, and a canonical printer.
//!
//! Variable names starting with `_` are reserved for internally generated
//! fresh variables; the parser rejects them, so freshly generated names can
//! never collide with anything a user wrote.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A function symbol: name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol { name: name.into(), arity }
    }
}

/// A finite first-order signature. Symbol names are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut arities = BTreeMap::new();
        for s in symbols {
            arities.insert(s.name, s.arity);
        }
        Signature { arities }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.arities.iter().map(|(n, a)| Symbol::new(n.clone(), *a))
    }

    /// Checks that every application in `t` uses a declared symbol with the
    /// declared arity.
    pub fn check(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                match self.arity(f) {
                    None => Err(Error::Signature(format!("unknown symbol {f}"))),
                    Some(a) if a != args.len() => Err(Error::Signature(format!(
                        "symbol {f} has arity {a}, applied to {} arguments",
                        args.len()
                    ))),
                    Some(_) => args.iter().try_for_each(|s| self.check(s)),
                }
            }
        }
    }
}

/// A first-order term. The derived `Ord` puts variables before applications,
/// orders variables by name, and orders applications by symbol name and then
/// lexicographically by argument list; every canonical form in the crate
/// sorts with this order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Set of variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Height of the term tree; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| 1 + a.depth()).max().unwrap_or(0),
        }
    }

    /// All subterms, root first.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        if let Term::App(_, args) = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) => {
                write!(f, "{s}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `input` against `sig`. Identifiers not in the signature are
/// variables; identifiers in the signature must be applied with the declared
/// arity (nullary symbols appear bare). Names starting with `_` are rejected.
pub fn parse_term(input: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser { chars: input.char_indices().peekable(), input, sig };
    let t = p.term()?;
    p.skip_ws();
    match p.chars.peek() {
        None => Ok(t),
        Some((i, c)) => Err(Error::Parse(format!("unexpected `{c}` at byte {i} in `{input}`"))),
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    input: &'a str,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let mut name = String::new();
        match self.chars.peek() {
            Some((_, c)) if c.is_ascii_alphanumeric() => {}
            Some((i, '_')) => {
                return Err(Error::Parse(format!(
                    "names starting with `_` are reserved (byte {i} in `{}`)",
                    self.input
                )))
            }
            other => {
                return Err(Error::Parse(format!(
                    "expected identifier, found {:?} in `{}`",
                    other.map(|(_, c)| c),
                    self.input
                )))
            }
        }
        while let Some((_, c)) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || *c == '_' {
                name.push(*c);
                self.chars.next();
            } else {
                break;
            }
        }
        Ok(name)
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident()?;
        self.skip_ws();
        let applied = matches!(self.chars.peek(), Some((_, '(')));
        if applied {
            self.chars.next();
            let mut args = Vec::new();
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.chars.next() {
                    Some((_, ',')) => continue,
                    Some((_, ')')) => break,
                    other => {
                        return Err(Error::Parse(format!(
                            "expected `,` or `)`, found {:?} in `{}`",
                            other.map(|(_, c)| c),
                            self.input
                        )))
                    }
                }
            }
            match self.sig.arity(&name) {
                None => Err(Error::Signature(format!("unknown symbol {name}"))),
                Some(a) if a != args.len() => Err(Error::Signature(format!(
                    "symbol {name} has arity {a}, applied to {} arguments",
                    args.len()
                ))),
                Some(_) => Ok(Term::App(name, args)),
            }
        } else if self.sig.contains(&name) {
            match self.sig.arity(&name) {
                Some(0) => Ok(Term::App(name, Vec::new())),
                Some(a) => Err(Error::Signature(format!(
                    "symbol {name} has arity {a}, used without arguments"
                ))),
                None => unreachable!(),
            }
        } else {
            Ok(Term::Var(name))
        }
    }
}
