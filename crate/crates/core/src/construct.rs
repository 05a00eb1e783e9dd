//! Executable forms of the constructive arguments: renaming ranges away from
//! a variable set, shrinking an equivalent substitution into the variables of
//! an instance, searching for domain-confined equivalents, and exploring the
//! poset of substitutions more general than a fixed root.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::matching::{match_modulo, MatchOutcome, MatchProblem};
use crate::normal::eq_modulo;
use crate::preorder::{decide_instance, strictly_more_general, InstanceDecision, Scope};
use crate::subst::{FreshVarGen, Permutation, Substitution};
use crate::term::Term;
use crate::theory::{theory_info, Flag, TheoryId};
use crate::unify::image_pool;

/// Proof that `sigma_prime` is equivalent to the original substitution under
/// comparison on all variables, with both witnessing instances spelled out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkCertificate {
    pub sigma_prime: Substitution,
    /// Applied after the original: forward(σ(v)) ≈ σ′(v) for every v.
    pub forward_witness: Substitution,
    /// Applied after the shrunk form: backward(σ′(v)) ≈ σ(v) for every v.
    pub backward_witness: Substitution,
}

/// Renames the range of `theta` away from `X`: returns the full composition
/// π∘θ together with π, which swaps each colliding range variable with a
/// fresh one. The composition keeps π's own bindings, so the result is
/// equivalent to `theta` on all variables with witnesses π and π⁻¹.
pub fn rename_away(theta: &Substitution, x: &BTreeSet<String>) -> (Substitution, Permutation) {
    let colliding: Vec<String> = theta.var_range().intersection(x).cloned().collect();
    let mut avoid = theta.footprint();
    avoid.extend(x.iter().cloned());
    let mut gen = FreshVarGen::avoiding(&avoid);
    let mut pairs = Vec::new();
    for v in colliding {
        let w = gen.fresh();
        pairs.push((v.clone(), w.clone()));
        pairs.push((w, v));
    }
    let pi = Permutation::from_pairs(pairs).expect("disjoint transpositions");
    (pi.as_substitution().compose(theta), pi)
}

/// For every v in the domains involved, checks λ(σ(v)) ≈ θ(v).
fn is_instance_witness(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    lambda: &Substitution,
) -> Result<bool> {
    let mut vars = sigma.domain();
    vars.extend(theta.domain());
    vars.extend(lambda.domain());
    for v in &vars {
        if !eq_modulo(id, &lambda.apply(&sigma.image_of(v)), &theta.image_of(v))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shrinks σ to an equivalent substitution inside Var(θ), given a witness λ
/// with λσ ≈ θ on all variables.
///
/// The construction runs in two stages. First a permutation π sends each
/// carrier variable (the range variable of σ(v) that λ maps back onto v, for
/// v bound by σ but not by θ) to its owner; left-composing π then prunes
/// those bindings and rewrites every image inside Var(θ). Second, any binding
/// whose domain variable still lies outside Var(θ) is dropped, with the
/// collapse witnessed by λ on one side and the dropped images on the other.
/// The certificate is re-validated before being returned, so a construction
/// gap surfaces as a diagnostic rather than a wrong answer.
pub fn shrink_general(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    lambda: &Substitution,
) -> Result<ShrinkCertificate> {
    if theory_info(id).regular != Flag::Yes {
        return Err(Error::unsupported(
            id.to_string(),
            "shrinking needs a regular theory; equal terms must share variables",
        ));
    }
    if !is_instance_witness(id, sigma, theta, lambda)? {
        return Err(Error::Invalid("λσ ≈ θ fails: λ is not an instance witness".into()));
    }
    let target = theta.footprint();
    if sigma.footprint().is_subset(&target) {
        return finish_certificate(id, sigma, theta, ShrinkCertificate {
            sigma_prime: sigma.clone(),
            forward_witness: Substitution::identity(),
            backward_witness: Substitution::identity(),
        });
    }

    // Carriers: for v bound by σ with θ(v) = v, regularity puts v among the
    // variables of λ(σ(v)), so some range variable of σ(v) carries it.
    let outside: Vec<String> =
        sigma.domain().into_iter().filter(|v| !theta.domain().contains(v)).collect();
    let mut carrier: BTreeMap<String, String> = BTreeMap::new();
    for v in &outside {
        let z = sigma
            .image_of(v)
            .vars()
            .into_iter()
            .find(|u| lambda.image_of(u).vars().contains(v))
            .ok_or_else(|| {
                Error::Internal(format!("no carrier for {v}: regularity should provide one"))
            })?;
        if z != *v {
            carrier.insert(v.clone(), z);
        }
    }
    // The carrier map is injective (λ maps z back onto exactly its owner), so
    // sending each carrier to its owner and closing every chain start onto
    // its terminal gives a permutation.
    let mut pi_map: BTreeMap<String, String> = BTreeMap::new();
    for (v, z) in &carrier {
        pi_map.insert(z.clone(), v.clone());
    }
    let owners: BTreeSet<&String> = carrier.keys().collect();
    let carried: BTreeSet<&String> = carrier.values().collect();
    for start in owners.difference(&carried) {
        let mut t: &String = carrier.get(*start).expect("start owns a carrier");
        while let Some(next) = carrier.get(t) {
            t = next;
        }
        pi_map.insert((*start).clone(), t.clone());
    }
    let pi = Permutation::from_pairs(pi_map)
        .map_err(|e| Error::Internal(format!("carrier closure is not a permutation: {e}")))?;
    let sigma1 = pi.as_substitution().compose(sigma);
    let lambda1 = lambda.compose(&pi.inverse().as_substitution());

    // Drop what still lies outside the target; the dropped images and λ's
    // action on the dropped variables witness the collapse.
    let dropped: BTreeSet<String> =
        sigma1.domain().into_iter().filter(|v| !target.contains(v)).collect();
    let sigma_prime = Substitution::from_pairs(
        sigma1.iter().filter(|(v, _)| !dropped.contains(*v)).map(|(v, t)| (v.clone(), t.clone())),
    );
    let tau1 = Substitution::from_pairs(dropped.iter().map(|v| (v.clone(), lambda1.image_of(v))));
    let tau2 = Substitution::from_pairs(dropped.iter().map(|v| (v.clone(), sigma1.image_of(v))));
    finish_certificate(id, sigma, theta, ShrinkCertificate {
        sigma_prime,
        forward_witness: tau1.compose(&pi.as_substitution()),
        backward_witness: pi.inverse().as_substitution().compose(&tau2),
    })
}

fn finish_certificate(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    cert: ShrinkCertificate,
) -> Result<ShrinkCertificate> {
    let target = theta.footprint();
    if !cert.sigma_prime.footprint().is_subset(&target) {
        return Err(Error::Internal(format!(
            "shrunk form {} leaves Var(θ) = {{{}}}",
            cert.sigma_prime,
            target.iter().cloned().collect::<Vec<_>>().join(", ")
        )));
    }
    let mut vars = sigma.footprint();
    vars.extend(cert.sigma_prime.domain());
    vars.extend(cert.forward_witness.domain());
    vars.extend(cert.backward_witness.domain());
    for v in &vars {
        let fwd = cert.forward_witness.apply(&sigma.image_of(v));
        if !eq_modulo(id, &fwd, &cert.sigma_prime.image_of(v))? {
            return Err(Error::Internal(format!("forward witness fails at {v}")));
        }
        let bwd = cert.backward_witness.apply(&cert.sigma_prime.image_of(v));
        if !eq_modulo(id, &bwd, &sigma.image_of(v))? {
            return Err(Error::Internal(format!("backward witness fails at {v}")));
        }
    }
    Ok(cert)
}

/// Outcome of the exhaustive search for an equivalent substitution whose
/// domain fits inside Dom(θ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfinedSearch {
    pub found: Option<Substitution>,
    pub candidates_checked: usize,
    pub undecided: usize,
    pub depth: usize,
}

/// Searches for σ′ with σ′ ∼ σ on all variables and Dom(σ′) ⊆ Dom(θ).
/// Containment in Var(θ) can always be achieved, but confining the domain
/// alone cannot; this verifies a failure exhaustively up to the depth bound.
pub fn domain_confined_equivalent(
    id: &TheoryId,
    sigma: &Substitution,
    theta: &Substitution,
    depth: usize,
) -> Result<ConfinedSearch> {
    let mut vars = sigma.footprint();
    vars.extend(theta.footprint());
    let pool = image_pool(id, &vars, depth)?;
    let dom: Vec<String> = theta.domain().into_iter().collect();
    let mut checked = 0usize;
    let mut undecided = 0usize;
    let mut found = None;
    let mut stack: Vec<Vec<(String, Term)>> = vec![Vec::new()];
    'search: while let Some(bind) = stack.pop() {
        if bind.len() == dom.len() {
            let cand = Substitution::from_pairs(bind);
            checked += 1;
            let fwd = decide_instance(id, &cand, sigma, &Scope::AllVars)?;
            let bwd = decide_instance(id, sigma, &cand, &Scope::AllVars)?;
            match (&fwd, &bwd) {
                (InstanceDecision::Holds(_), InstanceDecision::Holds(_)) => {
                    found = Some(cand);
                    break 'search;
                }
                _ => {
                    if matches!(fwd, InstanceDecision::Undecided)
                        || matches!(bwd, InstanceDecision::Undecided)
                    {
                        undecided += 1;
                    }
                }
            }
            continue;
        }
        let v = &dom[bind.len()];
        for t in &pool {
            let mut next = bind.clone();
            next.push((v.clone(), t.clone()));
            stack.push(next);
        }
    }
    Ok(ConfinedSearch { found, candidates_checked: checked, undecided, depth })
}

/// The quotient of everything more general than a root substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetReport {
    /// One representative per equivalence class, smallest printed form.
    pub classes: Vec<Substitution>,
    /// (i, j) when class i is strictly more general than class j.
    pub edges: Vec<(usize, usize)>,
    /// Classes with no strictly more general class in the report.
    pub minimal_classes: Vec<usize>,
    pub undecided_pairs: usize,
}

const POSET_CANDIDATE_CAP: usize = 1_000_000;

/// Computes all equivalence classes of substitutions that are more general
/// than `theta` under comparison on all variables, using representatives
/// confined to Var(θ). Shrinking justifies the confinement; the theory must
/// keep the quotient finite (finite classes, local finiteness, or the
/// role-depth bound for description logic terms).
pub fn more_general_poset(id: &TheoryId, theta: &Substitution, depth: usize) -> Result<PosetReport> {
    let info = theory_info(id);
    let supported = info.finite_family == Flag::Yes
        || info.locally_finite == Flag::Yes
        || matches!(id, TheoryId::EL { .. });
    if !supported {
        return Err(Error::unsupported(
            id.to_string(),
            "the quotient below a root is only known finite for finite or locally finite theories and bounded description logic terms",
        ));
    }
    let universe = theta.footprint();
    let pool = image_pool(id, &universe, depth)?;
    // A per-variable filter: σ(v) must match onto θ(v) on its own for σ ≤ θ
    // to have any chance; this prunes the raw product drastically.
    let mut pools: Vec<(String, Vec<Term>)> = Vec::new();
    for v in &universe {
        let target = theta.image_of(v);
        let mut keep = Vec::new();
        for s in &pool {
            let problem = MatchProblem::new(vec![(s.clone(), target.clone())]);
            match match_modulo(id, &problem)? {
                MatchOutcome::Witness(_) | MatchOutcome::Undecided => keep.push(s.clone()),
                MatchOutcome::NoMatch => {}
            }
        }
        pools.push((v.clone(), keep));
    }
    let combos: usize = pools.iter().map(|(_, p)| p.len()).try_fold(1usize, |a, n| {
        a.checked_mul(n).filter(|c| *c <= POSET_CANDIDATE_CAP)
    }).ok_or_else(|| Error::Budget("poset candidate space exceeds the cap".into()))?;
    let _ = combos;
    let mut undecided_pairs = 0usize;
    let mut members: Vec<Substitution> = Vec::new();
    let mut stack: Vec<Vec<(String, Term)>> = vec![Vec::new()];
    while let Some(bind) = stack.pop() {
        if bind.len() == pools.len() {
            let cand = Substitution::from_pairs(bind);
            match decide_instance(id, &cand, theta, &Scope::AllVars)? {
                InstanceDecision::Holds(_) => members.push(cand),
                InstanceDecision::Undecided => undecided_pairs += 1,
                InstanceDecision::DoesNotHold => {}
            }
            continue;
        }
        let (v, opts) = &pools[bind.len()];
        for t in opts {
            let mut next = bind.clone();
            next.push((v.clone(), t.clone()));
            stack.push(next);
        }
    }
    // Quotient by equivalence, representative with the smallest printed form
    // (shortest first, so the identity represents its class).
    members.sort_by_key(|s| {
        let p = s.to_string();
        (p.len(), p)
    });
    members.dedup();
    let mut classes: Vec<Substitution> = Vec::new();
    'member: for m in members {
        for c in &classes {
            let fwd = decide_instance(id, c, &m, &Scope::AllVars)?;
            let bwd = decide_instance(id, &m, c, &Scope::AllVars)?;
            if matches!(fwd, InstanceDecision::Undecided)
                || matches!(bwd, InstanceDecision::Undecided)
            {
                undecided_pairs += 1;
            }
            if matches!(fwd, InstanceDecision::Holds(_)) && matches!(bwd, InstanceDecision::Holds(_))
            {
                continue 'member;
            }
        }
        classes.push(m);
    }
    let mut edges = Vec::new();
    for i in 0..classes.len() {
        for j in 0..classes.len() {
            if i == j {
                continue;
            }
            match strictly_more_general(id, &classes[i], &classes[j], &Scope::AllVars)? {
                Flag::Yes => edges.push((i, j)),
                Flag::Unknown => undecided_pairs += 1,
                Flag::No => {}
            }
        }
    }
    let minimal_classes: Vec<usize> =
        (0..classes.len()).filter(|j| !edges.iter().any(|(_, to)| to == j)).collect();
    Ok(PosetReport { classes, edges, minimal_classes, undecided_pairs })
}

/// One link of a chain check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub index: usize,
    pub strict: Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub links: Vec<ChainLink>,
    /// Yes when every link is a strict descent; No when some link fails;
    /// Unknown when the only blemishes are undecided links.
    pub valid: Flag,
    pub first_failing: Option<usize>,
}

/// Checks a strictly descending chain: each later element must be strictly
/// more general than its predecessor when compared on all variables, so the
/// chain as written descends toward the more general end.
pub fn verify_descending_chain(id: &TheoryId, chain: &[Substitution]) -> Result<ChainReport> {
    let mut links = Vec::new();
    let mut valid = Flag::Yes;
    let mut first_failing = None;
    for i in 0..chain.len().saturating_sub(1) {
        let strict = strictly_more_general(id, &chain[i + 1], &chain[i], &Scope::AllVars)?;
        match strict {
            Flag::No => {
                valid = Flag::No;
                if first_failing.is_none() {
                    first_failing = Some(i);
                }
            }
            Flag::Unknown => {
                if valid == Flag::Yes {
                    valid = Flag::Unknown;
                }
            }
            Flag::Yes => {}
        }
        links.push(ChainLink { index: i, strict });
    }
    Ok(ChainReport { links, valid, first_failing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::compare;
    use crate::term::parse_term;

    fn sub(id: &TheoryId, pairs: &[(&str, &str)]) -> Substitution {
        let sig = theory_info(id).signature;
        Substitution::from_pairs(
            pairs.iter().map(|(v, t)| (v.to_string(), parse_term(t, &sig).unwrap())),
        )
    }

    #[test]
    fn rename_away_keeps_equivalence_on_all_vars() {
        let id = TheoryId::Empty;
        let theta = sub(&id, &[("x", "f(y,y)")]);
        let x: BTreeSet<String> = ["x".to_string(), "y".to_string()].into();
        let (renamed, pi) = rename_away(&theta, &x);
        assert!(renamed.var_range().intersection(&x).next().is_none() || {
            // Only the image variables had to move; x stays as a domain var.
            renamed.image_of("x").vars().intersection(&x).next().is_none()
        });
        assert_ne!(pi.support().len(), 0);
        let cmp = compare(&id, &theta, &renamed, &Scope::AllVars).unwrap();
        assert_eq!(cmp.equivalent(), Flag::Yes);
        let untouched = sub(&id, &[("x", "f(q,q)")]);
        let (same, pi2) = rename_away(&untouched, &x);
        assert_eq!(same, untouched);
        assert!(pi2.support().is_empty());
    }

    #[test]
    fn shrink_turns_a_permutation_into_identity() {
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "z"), ("z", "x")]);
        let theta = sub(&id, &[("x", "f(y,y)")]);
        // λ = θ ∘ σ⁻¹ undoes the swap before applying θ.
        let lambda = theta.compose(&sigma);
        let cert = shrink_general(&id, &sigma, &theta, &lambda).unwrap();
        assert!(cert.sigma_prime.is_identity());
    }

    #[test]
    fn shrink_keeps_contained_input_unchanged() {
        let id = TheoryId::FG;
        let sigma = sub(&id, &[("x", "y"), ("y", "f(y)")]);
        let theta = sub(&id, &[("x", "g(y)")]);
        let lambda = sub(&id, &[("y", "g(y)")]);
        let cert = shrink_general(&id, &sigma, &theta, &lambda).unwrap();
        assert_eq!(cert.sigma_prime, sigma);
    }

    #[test]
    fn shrink_collapses_a_chain_of_renamings() {
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "z"), ("z", "w")]);
        let lambda = sub(&id, &[("z", "x"), ("w", "z")]);
        let theta = lambda.compose(&sigma);
        assert_eq!(theta, sub(&id, &[("w", "z")]));
        let cert = shrink_general(&id, &sigma, &theta, &lambda).unwrap();
        let target = theta.footprint();
        assert!(cert.sigma_prime.footprint().is_subset(&target));
        let cmp = compare(&id, &sigma, &cert.sigma_prime, &Scope::AllVars).unwrap();
        assert_eq!(cmp.equivalent(), Flag::Yes);
    }

    #[test]
    fn shrink_rejects_a_wrong_witness() {
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "y")]);
        let theta = sub(&id, &[("x", "f(z,z)")]);
        let lambda = Substitution::identity();
        assert!(matches!(shrink_general(&id, &sigma, &theta, &lambda), Err(Error::Invalid(_))));
    }

    #[test]
    fn domain_confinement_fails_for_the_cancellation_example() {
        let id = TheoryId::FG;
        let sigma = sub(&id, &[("x", "y"), ("y", "f(y)")]);
        let theta = sub(&id, &[("x", "g(y)")]);
        let search = domain_confined_equivalent(&id, &sigma, &theta, 4).unwrap();
        assert!(search.found.is_none(), "unexpected equivalent {:?}", search.found);
        assert_eq!(search.undecided, 0);
        assert!(search.candidates_checked > 0);
    }

    #[test]
    fn domain_confinement_succeeds_when_sigma_already_fits() {
        let id = TheoryId::Empty;
        let sigma = sub(&id, &[("x", "y")]);
        let theta = sub(&id, &[("x", "f(z,z)")]);
        let search = domain_confined_equivalent(&id, &sigma, &theta, 1).unwrap();
        assert!(search.found.is_some());
    }

    #[test]
    fn poset_below_a_free_root() {
        let id = TheoryId::Empty;
        let theta = sub(&id, &[("x", "f(y,y)")]);
        let report = more_general_poset(&id, &theta, 2).unwrap();
        assert!(report.classes.iter().any(|c| c.is_identity()));
        assert!(report
            .classes
            .iter()
            .any(|c| eq_modulo(&id, &c.image_of("x"), &theta.image_of("x")).unwrap()));
        // The identity is the unique most general class.
        assert_eq!(report.minimal_classes.len(), 1);
        assert!(report.classes[report.minimal_classes[0]].is_identity());
        assert_eq!(report.undecided_pairs, 0);
        // Noetherian evidence: everything sits above some minimal class.
        for j in 0..report.classes.len() {
            let covered = report.minimal_classes.contains(&j)
                || report.edges.iter().any(|(i, to)| *to == j && report.minimal_classes.contains(i));
            assert!(covered, "class {j} not above a minimal class");
        }
    }

    #[test]
    fn poset_refuses_an_unbounded_theory() {
        let id = TheoryId::FG;
        let theta = sub(&id, &[("x", "g(y)")]);
        assert!(matches!(more_general_poset(&id, &theta, 2), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn chains_validate_strict_descent() {
        let id = TheoryId::Empty;
        let theta = sub(&id, &[("x", "f(y,y)")]);
        let report = verify_descending_chain(&id, &[theta.clone(), Substitution::identity()]).unwrap();
        assert_eq!(report.valid, Flag::Yes);
        // A renamed variant is equivalent, not strictly more general.
        let renamed = sub(&id, &[("x", "f(w,w)"), ("w", "y"), ("y", "w")]);
        let report = verify_descending_chain(&id, &[theta, renamed]).unwrap();
        assert_eq!(report.valid, Flag::No);
        assert_eq!(report.first_failing, Some(0));
    }
}
