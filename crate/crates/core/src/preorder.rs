//! The instantiation preorders. `sigma <= theta` at a scope when some
//! substitution sends every scoped image of `sigma` to the corresponding
//! image of `theta` modulo the theory; the scope is either a fixed variable
//! set (comparison on the problem variables) or all variables at once.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Result;
use crate::matching::{match_modulo, MatchOutcome, MatchProblem};
use crate::subst::Substitution;
use crate::term::Term;
use crate::theory::{Flag, TheoryId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    /// Compare on exactly these variables.
    VarSet(BTreeSet<String>),
    /// Compare on every variable.
    AllVars,
}

impl Scope {
    pub fn vars(vars: impl IntoIterator<Item = impl Into<String>>) -> Scope {
        Scope::VarSet(vars.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::AllVars => write!(f, "all-vars"),
            Scope::VarSet(vs) => {
                write!(f, "vars {{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceDecision {
    /// The relation holds, witnessed by the connecting substitution.
    Holds(Substitution),
    DoesNotHold,
    Undecided,
}

impl InstanceDecision {
    pub fn holds(&self) -> Flag {
        match self {
            InstanceDecision::Holds(_) => Flag::Yes,
            InstanceDecision::DoesNotHold => Flag::No,
            InstanceDecision::Undecided => Flag::Unknown,
        }
    }

    pub fn witness(&self) -> Option<&Substitution> {
        match self {
            InstanceDecision::Holds(w) => Some(w),
            _ => None,
        }
    }
}

/// Decides `sigma <= theta` at the scope. The all-variables case reduces to
/// finitely many equations: comparing on the domains of both substitutions,
/// with every other variable of a compared image constrained to stay fixed.
/// Off those variables both sides are untouched, so the identity extension of
/// any witness covers them, and a witness that moves a constrained variable
/// within its class can be rewritten to fix it; the reduction is exact.
pub fn decide_instance(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    scope: &Scope,
) -> Result<InstanceDecision> {
    let problem = match scope {
        Scope::VarSet(vars) => MatchProblem::new(
            vars.iter().map(|x| (sigma.image_of(x), theta.image_of(x))).collect(),
        ),
        Scope::AllVars => {
            let mut compared: BTreeSet<String> = sigma.domain();
            compared.extend(theta.domain());
            let equations: Vec<(Term, Term)> =
                compared.iter().map(|x| (sigma.image_of(x), theta.image_of(x))).collect();
            let mut pinned: BTreeSet<String> = BTreeSet::new();
            for (p, _) in &equations {
                pinned.extend(p.vars());
            }
            pinned.retain(|v| !compared.contains(v));
            MatchProblem::new(equations).with_identity_constrained(pinned)
        }
    };
    Ok(match match_modulo(id, &problem)? {
        MatchOutcome::Witness(w) => InstanceDecision::Holds(w),
        MatchOutcome::NoMatch => InstanceDecision::DoesNotHold,
        MatchOutcome::Undecided => InstanceDecision::Undecided,
    })
}

/// Both directions of the preorder at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// `sigma <= theta`: sigma is at least as general.
    pub leq: InstanceDecision,
    /// `theta <= sigma`.
    pub geq: InstanceDecision,
}

impl Comparison {
    pub fn equivalent(&self) -> Flag {
        match (self.leq.holds(), self.geq.holds()) {
            (Flag::Yes, Flag::Yes) => Flag::Yes,
            (Flag::No, _) | (_, Flag::No) => Flag::No,
            _ => Flag::Unknown,
        }
    }

    /// `sigma` strictly below `theta`: as general, and not the other way.
    pub fn strictly_more_general(&self) -> Flag {
        match (self.leq.holds(), self.geq.holds()) {
            (Flag::Yes, Flag::No) => Flag::Yes,
            (Flag::No, _) | (_, Flag::Yes) => Flag::No,
            _ => Flag::Unknown,
        }
    }

    pub fn incomparable(&self) -> Flag {
        match (self.leq.holds(), self.geq.holds()) {
            (Flag::No, Flag::No) => Flag::Yes,
            (Flag::Yes, _) | (_, Flag::Yes) => Flag::No,
            _ => Flag::Unknown,
        }
    }
}

pub fn compare(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    scope: &Scope,
) -> Result<Comparison> {
    Ok(Comparison {
        leq: decide_instance(id, sigma, theta, scope)?,
        geq: decide_instance(id, theta, sigma, scope)?,
    })
}

pub fn equivalent(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    scope: &Scope,
) -> Result<Flag> {
    Ok(compare(id, sigma, theta, scope)?.equivalent())
}

pub fn strictly_more_general(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    scope: &Scope,
) -> Result<Flag> {
    Ok(compare(id, sigma, theta, scope)?.strictly_more_general())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;
    use crate::theory::theory_info;

    fn sub(id: &TheoryId, pairs: &[(&str, &str)]) -> Substitution {
        let sig = theory_info(id).signature;
        Substitution::from_pairs(
            pairs.iter().map(|(x, t)| (x.to_string(), parse_term(t, &sig).unwrap())),
        )
    }

    #[test]
    fn scopes_can_disagree() {
        // On {x} a renaming stays more general than a proper instance, but
        // comparing everywhere pins the range variable down.
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "y")]);
        let theta = sub(&id, &[("x", "g(y)")]);
        let scope = Scope::vars(["x"]);
        let d = decide_instance(&id, &sigma, &theta, &scope).unwrap();
        assert_eq!(d.witness().unwrap().image_of("y"), parse_term("g(y)", &theory_info(&id).signature).unwrap());
        let d = decide_instance(&id, &sigma, &theta, &Scope::AllVars).unwrap();
        assert_eq!(d, InstanceDecision::DoesNotHold);
    }

    #[test]
    fn renamed_bindings_are_incomparable_everywhere() {
        // {x := y} and {x := z} are equivalent on {x} yet incomparable under
        // the all-variables preorder: a witness would have to move y (or z)
        // while also keeping it fixed.
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "y")]);
        let theta = sub(&id, &[("x", "z")]);
        let on_x = compare(&id, &sigma, &theta, &Scope::vars(["x"])).unwrap();
        assert_eq!(on_x.equivalent(), Flag::Yes);
        let everywhere = compare(&id, &sigma, &theta, &Scope::AllVars).unwrap();
        assert_eq!(everywhere.incomparable(), Flag::Yes);
    }

    #[test]
    fn cancellation_witness_found_everywhere() {
        // sigma maps x to y and y one step down; theta maps x to g(y). The
        // witness y := g(y) reconciles both images at every variable.
        let id = TheoryId::FG;
        let sigma = sub(&id, &[("x", "y"), ("y", "f(y)")]);
        let theta = sub(&id, &[("x", "g(y)")]);
        let d = decide_instance(&id, &sigma, &theta, &Scope::AllVars).unwrap();
        let w = d.witness().unwrap();
        assert_eq!(w.image_of("y"), parse_term("g(y)", &theory_info(&id).signature).unwrap());
    }

    #[test]
    fn strictness_and_equivalence() {
        let id = TheoryId::C;
        let sigma = sub(&id, &[("x", "f(y,z)")]);
        let theta = sub(&id, &[("x", "f(z,y)")]);
        let cmp = compare(&id, &sigma, &theta, &Scope::vars(["x"])).unwrap();
        assert_eq!(cmp.equivalent(), Flag::Yes);
        assert_eq!(cmp.strictly_more_general(), Flag::No);
        let inst = sub(&id, &[("x", "f(y,y)")]);
        let cmp = compare(&id, &sigma, &inst, &Scope::vars(["x"])).unwrap();
        assert_eq!(cmp.strictly_more_general(), Flag::Yes);
    }

    #[test]
    fn identity_is_most_general() {
        let id = TheoryId::AC;
        let theta = sub(&id, &[("x", "f(y,f(y,z))")]);
        let identity = Substitution::identity();
        let cmp = compare(&id, &identity, &theta, &Scope::AllVars).unwrap();
        assert_eq!(cmp.strictly_more_general(), Flag::Yes);
    }
}
