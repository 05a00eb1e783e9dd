//! The theory menu: identifiers, signatures, and the known property flags
//! (regularity, finite equivalence families, local finiteness, semiring
//! models, restrictive preorders) together with the known unification types
//! under the restricted and the unrestricted instantiation preorder.
//!
//! Flags are tri-state on purpose: a theory where a property has not been
//! established stays `Unknown` rather than being guessed.

use std::fmt;

use crate::error::{Error, Result};
use crate::term::{Signature, Symbol};

/// Answer for a structural property of a theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Yes,
    No,
    Unknown,
}

impl Flag {
    pub fn is_yes(self) -> bool {
        self == Flag::Yes
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::Yes => write!(f, "yes"),
            Flag::No => write!(f, "no"),
            Flag::Unknown => write!(f, "unknown"),
        }
    }
}

/// Unification type, ordered from best to worst: unitary < finitary <
/// infinitary < zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnifType {
    Unitary,
    Finitary,
    Infinitary,
    Zero,
}

impl fmt::Display for UnifType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnifType::Unitary => write!(f, "unitary"),
            UnifType::Finitary => write!(f, "finitary"),
            UnifType::Infinitary => write!(f, "infinitary"),
            UnifType::Zero => write!(f, "zero"),
        }
    }
}

/// Identifier of a supported equational theory. The binary symbol is `f`
/// except for two-sided distributivity (`m`, `p`) and the description-logic
/// conjunction (`and`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoryId {
    /// Syntactic equality; terms over the free symbols `f/2`, `g/1`.
    Empty,
    /// Commutativity of `f`.
    C,
    /// Associativity of `f`.
    A,
    /// Idempotency of `f`.
    I,
    /// Associativity + commutativity.
    AC,
    /// AC + unit `0`.
    ACU,
    /// AC + idempotency.
    ACI,
    /// AC + unit + idempotency.
    ACUI,
    /// Associativity + idempotency (free bands).
    AI,
    /// Two-sided distributivity of `m` over `p`.
    D,
    /// One inverse-like axiom `f(g(x)) = x` over unary `f`, `g`.
    FG,
    /// ACU plus `k` commuting homomorphisms (`h` for k = 1, else `h1..hk`).
    ACUh { k: usize },
    /// ACUI plus `k` non-commuting homomorphisms, the value-restriction
    /// fragment (`r` for k = 1, else `r1..rk`).
    FL0 { k: usize },
    /// Description-logic conjunctions with existential restrictions over the
    /// given role names (symbols `and/2`, `top/0`, `some_<role>/1`).
    EL { roles: Vec<String> },
}

impl TheoryId {
    /// Parses a case-insensitive theory name such as `ac`, `acuh:2`, `fl0:1`
    /// or `el:r,s`.
    pub fn parse(input: &str) -> Result<TheoryId> {
        let lower = input.trim().to_ascii_lowercase();
        let (head, param) = match lower.split_once(':') {
            Some((h, p)) => (h.trim().to_string(), Some(p.trim().to_string())),
            None => (lower.clone(), None),
        };
        let no_param = |id: TheoryId| -> Result<TheoryId> {
            match param {
                Some(_) => Err(Error::Parse(format!("theory {head} takes no parameter"))),
                None => Ok(id),
            }
        };
        match head.as_str() {
            "empty" | "free" | "syntactic" => no_param(TheoryId::Empty),
            "c" => no_param(TheoryId::C),
            "a" => no_param(TheoryId::A),
            "i" => no_param(TheoryId::I),
            "ac" => no_param(TheoryId::AC),
            "acu" => no_param(TheoryId::ACU),
            "aci" => no_param(TheoryId::ACI),
            "acui" => no_param(TheoryId::ACUI),
            "ai" => no_param(TheoryId::AI),
            "d" => no_param(TheoryId::D),
            "fg" => no_param(TheoryId::FG),
            "acuh" => {
                let k: usize = param
                    .as_deref()
                    .unwrap_or("1")
                    .parse()
                    .map_err(|_| Error::Parse("acuh takes a homomorphism count, e.g. acuh:1".into()))?;
                if k == 0 {
                    return Err(Error::Parse("acuh needs at least one homomorphism".into()));
                }
                Ok(TheoryId::ACUh { k })
            }
            "fl0" => {
                let k: usize = param
                    .as_deref()
                    .unwrap_or("1")
                    .parse()
                    .map_err(|_| Error::Parse("fl0 takes a role count, e.g. fl0:1".into()))?;
                if k == 0 {
                    return Err(Error::Parse("fl0 needs at least one role".into()));
                }
                Ok(TheoryId::FL0 { k })
            }
            "el" => {
                let roles: Vec<String> = param
                    .as_deref()
                    .unwrap_or("r")
                    .split(',')
                    .map(|r| r.trim().to_string())
                    .filter(|r| !r.is_empty())
                    .collect();
                if roles.is_empty() {
                    return Err(Error::Parse("el needs at least one role name, e.g. el:r".into()));
                }
                let ok = |r: &String| {
                    !r.starts_with('_') && r.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                };
                if !roles.iter().all(ok) {
                    return Err(Error::Parse("role names must be alphanumeric".into()));
                }
                Ok(TheoryId::EL { roles })
            }
            other => Err(Error::Parse(format!("unknown theory `{other}`"))),
        }
    }

    /// Names of the unary homomorphism/role symbols, where applicable.
    pub fn hom_symbols(&self) -> Vec<String> {
        match self {
            TheoryId::ACUh { k } => {
                if *k == 1 {
                    vec!["h".into()]
                } else {
                    (1..=*k).map(|i| format!("h{i}")).collect()
                }
            }
            TheoryId::FL0 { k } => {
                if *k == 1 {
                    vec!["r".into()]
                } else {
                    (1..=*k).map(|i| format!("r{i}")).collect()
                }
            }
            TheoryId::EL { roles } => roles.iter().map(|r| format!("some_{r}")).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryId::Empty => write!(f, "empty"),
            TheoryId::C => write!(f, "c"),
            TheoryId::A => write!(f, "a"),
            TheoryId::I => write!(f, "i"),
            TheoryId::AC => write!(f, "ac"),
            TheoryId::ACU => write!(f, "acu"),
            TheoryId::ACI => write!(f, "aci"),
            TheoryId::ACUI => write!(f, "acui"),
            TheoryId::AI => write!(f, "ai"),
            TheoryId::D => write!(f, "d"),
            TheoryId::FG => write!(f, "fg"),
            TheoryId::ACUh { k } => write!(f, "acuh:{k}"),
            TheoryId::FL0 { k } => write!(f, "fl0:{k}"),
            TheoryId::EL { roles } => write!(f, "el:{}", roles.join(",")),
        }
    }
}

/// Everything the workbench knows about a theory up front.
#[derive(Debug, Clone)]
pub struct TheoryInfo {
    pub id: TheoryId,
    pub signature: Signature,
    /// Both sides of every axiom have the same variables; equal terms then
    /// always have equal variable sets.
    pub regular: Flag,
    /// Every equivalence class is finite.
    pub finite_family: Flag,
    /// Finitely many classes over every finite variable set.
    pub locally_finite: Flag,
    /// The theory has a faithful semiring model for terms and substitutions.
    pub monoidal: Flag,
    /// The semiring model carries a restrictive preorder.
    pub restrictive: Flag,
    pub restricted_type: Option<UnifType>,
    pub unrestricted_type: Option<UnifType>,
}

/// Returns the signature and property table for a theory.
pub fn theory_info(id: &TheoryId) -> TheoryInfo {
    use Flag::*;
    let sym = |n: &str, a: usize| Symbol::new(n, a);
    let (signature, regular, finite_family, locally_finite, monoidal, restrictive, rt, ut) = match id {
        TheoryId::Empty => (
            Signature::new([sym("f", 2), sym("g", 1)]),
            Yes, Yes, No, No, No,
            Some(UnifType::Unitary), Some(UnifType::Unitary),
        ),
        TheoryId::C => (
            Signature::new([sym("f", 2)]),
            Yes, Yes, No, No, No,
            Some(UnifType::Finitary), Some(UnifType::Finitary),
        ),
        TheoryId::A => (
            Signature::new([sym("f", 2)]),
            Yes, Yes, No, No, No,
            Some(UnifType::Infinitary), Some(UnifType::Infinitary),
        ),
        TheoryId::I => (
            Signature::new([sym("f", 2)]),
            Yes, No, No, No, No,
            Some(UnifType::Finitary), Some(UnifType::Finitary),
        ),
        TheoryId::AC => (
            Signature::new([sym("f", 2)]),
            Yes, Yes, No, No, No,
            Some(UnifType::Finitary), Some(UnifType::Infinitary),
        ),
        TheoryId::ACU => (
            Signature::new([sym("f", 2), sym("0", 0)]),
            Yes, No, No, Yes, Yes,
            Some(UnifType::Unitary), Some(UnifType::Infinitary),
        ),
        TheoryId::ACI => (
            Signature::new([sym("f", 2)]),
            Yes, No, Yes, No, No,
            Some(UnifType::Finitary), Some(UnifType::Infinitary),
        ),
        TheoryId::ACUI => (
            Signature::new([sym("f", 2), sym("0", 0)]),
            Yes, No, Yes, Yes, Yes,
            Some(UnifType::Unitary), Some(UnifType::Infinitary),
        ),
        TheoryId::AI => (
            Signature::new([sym("f", 2)]),
            Yes, No, Yes, No, No,
            Some(UnifType::Zero), Some(UnifType::Infinitary),
        ),
        TheoryId::D => (
            Signature::new([sym("m", 2), sym("p", 2)]),
            Yes, Yes, No, No, No,
            Some(UnifType::Infinitary), Some(UnifType::Infinitary),
        ),
        TheoryId::FG => (
            Signature::new([sym("f", 1), sym("g", 1)]),
            Yes, Unknown, Unknown, Unknown, Unknown,
            None, None,
        ),
        TheoryId::ACUh { .. } => {
            let mut syms = vec![sym("f", 2), sym("0", 0)];
            syms.extend(id.hom_symbols().iter().map(|h| sym(h, 1)));
            (
                Signature::new(syms),
                Yes, No, No, Yes, Yes,
                Some(UnifType::Zero), Some(UnifType::Infinitary),
            )
        }
        TheoryId::FL0 { .. } => {
            let mut syms = vec![sym("f", 2), sym("0", 0)];
            syms.extend(id.hom_symbols().iter().map(|h| sym(h, 1)));
            (
                Signature::new(syms),
                Yes, No, No, Yes, Yes,
                Some(UnifType::Zero), Some(UnifType::Infinitary),
            )
        }
        TheoryId::EL { .. } => {
            let mut syms = vec![sym("and", 2), sym("top", 0)];
            syms.extend(id.hom_symbols().iter().map(|h| sym(h, 1)));
            (
                Signature::new(syms),
                Yes, No, No, No, No,
                Some(UnifType::Zero), Some(UnifType::Infinitary),
            )
        }
    };
    TheoryInfo {
        id: id.clone(),
        signature,
        regular,
        finite_family,
        locally_finite,
        monoidal,
        restrictive,
        restricted_type: rt,
        unrestricted_type: ut,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips_and_is_case_insensitive() {
        for name in ["empty", "c", "a", "i", "ac", "acu", "aci", "acui", "ai", "d", "fg", "acuh:2", "fl0:3", "el:r,s"] {
            let id = TheoryId::parse(name).unwrap();
            assert_eq!(id.to_string(), name);
            assert_eq!(TheoryId::parse(&name.to_uppercase()).unwrap(), id);
        }
        assert!(TheoryId::parse("acux").is_err());
        assert!(TheoryId::parse("acuh:0").is_err());
    }

    #[test]
    fn type_order_is_unitary_finitary_infinitary_zero() {
        assert!(UnifType::Unitary < UnifType::Finitary);
        assert!(UnifType::Finitary < UnifType::Infinitary);
        assert!(UnifType::Infinitary < UnifType::Zero);
    }

    #[test]
    fn finite_families_are_regular() {
        for name in ["empty", "c", "a", "i", "ac", "acu", "aci", "acui", "ai", "d", "fg", "acuh:1", "fl0:1", "el:r"] {
            let info = theory_info(&TheoryId::parse(name).unwrap());
            if info.finite_family == Flag::Yes {
                assert_eq!(info.regular, Flag::Yes, "{name}: finite family forces regularity");
            }
        }
    }

    #[test]
    fn type_columns_match_the_known_table() {
        let cases = [
            ("empty", UnifType::Unitary, UnifType::Unitary),
            ("c", UnifType::Finitary, UnifType::Finitary),
            ("i", UnifType::Finitary, UnifType::Finitary),
            ("acu", UnifType::Unitary, UnifType::Infinitary),
            ("acui", UnifType::Unitary, UnifType::Infinitary),
            ("ac", UnifType::Finitary, UnifType::Infinitary),
            ("aci", UnifType::Finitary, UnifType::Infinitary),
            ("a", UnifType::Infinitary, UnifType::Infinitary),
            ("d", UnifType::Infinitary, UnifType::Infinitary),
            ("el:r", UnifType::Zero, UnifType::Infinitary),
            ("ai", UnifType::Zero, UnifType::Infinitary),
            ("fl0:1", UnifType::Zero, UnifType::Infinitary),
            ("acuh:1", UnifType::Zero, UnifType::Infinitary),
        ];
        for (name, restricted, unrestricted) in cases {
            let info = theory_info(&TheoryId::parse(name).unwrap());
            assert_eq!(info.restricted_type, Some(restricted), "{name} restricted");
            assert_eq!(info.unrestricted_type, Some(unrestricted), "{name} unrestricted");
            // Because every unrestricted instance is a restricted instance, a
            // unitary or finitary unrestricted type rules out a worse
            // restricted one; the other direction can go both ways (the type
            // improves from zero to infinitary for el, ai, fl0, acuh).
            if unrestricted <= UnifType::Finitary {
                assert!(restricted <= unrestricted, "{name} order");
            }
        }
        let fg = theory_info(&TheoryId::FG);
        assert_eq!(fg.regular, Flag::Yes);
        assert_eq!(fg.finite_family, Flag::Unknown);
        assert_eq!(fg.restricted_type, None);
    }

    #[test]
    fn hom_symbol_naming() {
        assert_eq!(TheoryId::ACUh { k: 1 }.hom_symbols(), vec!["h"]);
        assert_eq!(TheoryId::ACUh { k: 2 }.hom_symbols(), vec!["h1", "h2"]);
        assert_eq!(TheoryId::FL0 { k: 1 }.hom_symbols(), vec!["r"]);
        let el = TheoryId::EL { roles: vec!["r".into(), "s".into()] };
        assert_eq!(el.hom_symbols(), vec!["some_r", "some_s"]);
    }
}
