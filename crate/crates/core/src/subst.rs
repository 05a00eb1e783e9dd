//! Substitutions with finite domain, permutations (variable renamings with
//! closed support), and the generator for reserved fresh variable names.
//!
//! Composition follows the applicative convention: `lambda.compose(&sigma)`
//! is the substitution applying `sigma` first and `lambda` second.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::term::{parse_term, Signature, Term};

/// A substitution with finite domain. Identity bindings are pruned on entry,
/// so `domain()` is exactly the set of variables moved.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Term)>) -> Self {
        let mut s = Substitution::default();
        for (x, t) in pairs {
            s.bind(x, t);
        }
        s
    }

    /// Binds `x` to `t`; binding a variable to itself removes the entry.
    pub fn bind(&mut self, x: impl Into<String>, t: Term) {
        let x = x.into();
        if Term::Var(x.clone()) == t {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn lookup(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    /// Image of a single variable; variables outside the domain map to themselves.
    pub fn image_of(&self, x: &str) -> Term {
        self.map.get(x).cloned().unwrap_or_else(|| Term::var(x))
    }

    pub fn domain(&self) -> BTreeSet<String> {
        self.map.keys().cloned().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    /// Variables occurring in terms of the range.
    pub fn var_range(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            out.extend(t.vars());
        }
        out
    }

    /// `Dom ∪ VRan`, the variables this substitution touches.
    pub fn footprint(&self) -> BTreeSet<String> {
        let mut out = self.domain();
        out.extend(self.var_range());
        out
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.image_of(v),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// Composition `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::default();
        for (x, t) in &other.map {
            out.bind(x.clone(), self.apply(t));
        }
        for (x, t) in &self.map {
            if !other.map.contains_key(x) {
                out.bind(x.clone(), t.clone());
            }
        }
        out
    }

    /// Restriction to a variable set.
    pub fn restrict(&self, vars: &BTreeSet<String>) -> Substitution {
        Substitution {
            map: self.map.iter().filter(|(x, _)| vars.contains(*x)).map(|(x, t)| (x.clone(), t.clone())).collect(),
        }
    }

    /// True when applying the substitution twice is the same as applying it
    /// once, i.e. no domain variable occurs in the range.
    pub fn is_idempotent(&self) -> bool {
        self.var_range().is_disjoint(&self.domain())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} := {t}")?;
        }
        write!(f, "}}")
    }
}

/// Parses a substitution in the `x := term` line format. Blank lines and
/// `#` comment lines are ignored.
pub fn parse_substitution(input: &str, sig: &Signature) -> Result<Substitution> {
    let mut subst = Substitution::default();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line
            .split_once(":=")
            .ok_or_else(|| Error::Parse(format!("line {}: expected `x := term`", lineno + 1)))?;
        let lhs = lhs.trim();
        let ok_var = !lhs.is_empty()
            && !lhs.starts_with('_')
            && lhs.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !sig.contains(lhs);
        if !ok_var {
            return Err(Error::Parse(format!("line {}: `{lhs}` is not a bindable variable", lineno + 1)));
        }
        if subst.map.contains_key(lhs) {
            return Err(Error::Parse(format!("line {}: variable `{lhs}` bound twice", lineno + 1)));
        }
        subst.bind(lhs.to_string(), parse_term(rhs, sig)?);
    }
    Ok(subst)
}

/// A permutation of variables with finite, closed support: the set of moved
/// variables equals the set of their images.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Permutation {
    map: BTreeMap<String, String>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    /// Builds a permutation from explicit pairs; fails unless the map is a
    /// bijection whose key set equals its value set.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let map: BTreeMap<String, String> = pairs.into_iter().filter(|(a, b)| a != b).collect();
        let keys: BTreeSet<&String> = map.keys().collect();
        let vals: BTreeSet<&String> = map.values().collect();
        if vals.len() != map.len() {
            return Err(Error::Invalid("permutation images must be distinct".into()));
        }
        if keys != vals {
            return Err(Error::Invalid("permutation support must be closed".into()));
        }
        Ok(Permutation { map })
    }

    /// Swap of two variables.
    pub fn transposition(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Permutation::identity();
        }
        Permutation { map: [(a.clone(), b.clone()), (b, a)].into_iter().collect() }
    }

    /// Extends an injective variable-to-variable map to a permutation that
    /// agrees with it on its domain: every maximal chain `a → τ(a) → …`
    /// ending outside the domain is closed into a cycle.
    pub fn from_renaming(renaming: &BTreeMap<String, String>) -> Result<Self> {
        let moved: BTreeMap<String, String> =
            renaming.iter().filter(|(a, b)| a != b).map(|(a, b)| (a.clone(), b.clone())).collect();
        let vals: BTreeSet<&String> = moved.values().collect();
        if vals.len() != moved.len() {
            return Err(Error::Invalid("renaming is not injective".into()));
        }
        let mut map = moved.clone();
        // Chain starts are keys that are not images; follow each chain to its
        // end and close the cycle back to the start.
        for start in moved.keys().filter(|k| !vals.contains(*k)) {
            let mut end = &moved[start];
            while let Some(next) = moved.get(end) {
                end = next;
            }
            map.insert(end.clone(), start.clone());
        }
        Permutation::from_pairs(map)
    }

    pub fn apply_var(&self, x: &str) -> String {
        self.map.get(x).cloned().unwrap_or_else(|| x.to_string())
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }

    pub fn support(&self) -> BTreeSet<String> {
        self.map.keys().cloned().collect()
    }

    pub fn as_substitution(&self) -> Substitution {
        Substitution {
            map: self.map.iter().map(|(a, b)| (a.clone(), Term::var(b.clone()))).collect(),
        }
    }
}

/// Generator for reserved fresh variable names `_w0, _w1, …`. Seeding with
/// every name already in play keeps the sequence disjoint from names produced
/// by earlier internal steps; parsed user names can never collide because the
/// parser rejects the `_` prefix.
#[derive(Debug, Clone, Default)]
pub struct FreshVarGen {
    next: usize,
}

impl FreshVarGen {
    pub fn new() -> Self {
        FreshVarGen { next: 0 }
    }

    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a String>) -> Self {
        let mut next = 0;
        for n in names {
            if let Some(direct) = n.strip_prefix("_w") {
                if let Ok(i) = direct.parse::<usize>() {
                    next = next.max(i + 1);
                }
            }
        }
        FreshVarGen { next }
    }

    pub fn fresh(&mut self) -> String {
        let name = format!("_w{}", self.next);
        self.next += 1;
        name
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Symbol;

    fn sig() -> Signature {
        Signature::new([Symbol::new("f", 2), Symbol::new("g", 1)])
    }

    fn t(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    #[test]
    fn identity_bindings_are_pruned() {
        let s = Substitution::from_pairs([("x".into(), Term::var("x")), ("y".into(), t("g(x)"))]);
        assert_eq!(s.domain(), ["y".to_string()].into_iter().collect());
    }

    #[test]
    fn compose_applies_right_argument_first() {
        // {y := g(y)} ∘ {x := y, y := f(y,y)} maps x to g(y) and y to f(g(y),g(y)).
        let lambda = Substitution::from_pairs([("y".into(), t("g(y)"))]);
        let sigma = Substitution::from_pairs([("x".into(), t("y")), ("y".into(), t("f(y,y)"))]);
        let rho = lambda.compose(&sigma);
        assert_eq!(rho.image_of("x"), t("g(y)"));
        assert_eq!(rho.image_of("y"), t("f(g(y),g(y))"));
    }

    #[test]
    fn compose_prunes_new_identities() {
        // {x := y} ∘ {y := x} maps y to y (pruned) and x to y.
        let lambda = Substitution::from_pairs([("x".into(), t("y"))]);
        let sigma = Substitution::from_pairs([("y".into(), t("x"))]);
        let rho = lambda.compose(&sigma);
        assert_eq!(rho, Substitution::from_pairs([("x".into(), t("y"))]));
    }

    #[test]
    fn substitution_text_round_trip() {
        let s = parse_substitution("x := f(y,g(z))\n# comment\ny := z\n", &sig()).unwrap();
        assert_eq!(s.image_of("x"), t("f(y,g(z))"));
        assert_eq!(s.image_of("y"), t("z"));
        assert_eq!(s.to_string(), "{x := f(y,g(z)), y := z}");
    }

    #[test]
    fn renaming_extends_to_permutation() {
        // x → y with y free must close into the swap (x y).
        let ren: BTreeMap<String, String> = [("x".into(), "y".into())].into_iter().collect();
        let p = Permutation::from_renaming(&ren).unwrap();
        assert_eq!(p.apply_var("x"), "y");
        assert_eq!(p.apply_var("y"), "x");
        // Chains close at the far end: x → y, y → z becomes the 3-cycle (x y z).
        let ren: BTreeMap<String, String> =
            [("x".into(), "y".into()), ("y".into(), "z".into())].into_iter().collect();
        let p = Permutation::from_renaming(&ren).unwrap();
        assert_eq!(p.apply_var("z"), "x");
        let inv = p.inverse();
        for v in ["x", "y", "z"] {
            assert_eq!(inv.apply_var(&p.apply_var(v)), v);
        }
    }

    #[test]
    fn fresh_names_avoid_existing_reserved_names() {
        let names = vec!["_w3".to_string(), "x".to_string()];
        let mut gen = FreshVarGen::avoiding(&names);
        assert_eq!(gen.fresh(), "_w4");
        assert_eq!(gen.fresh(), "_w5");
    }
}
