//! Unifier computation and analysis: per-theory complete sets, bounded
//! universes of unifiers, minimization, completeness checks, type probes, and
//! the swap-variant family that separates the restricted preorder from the
//! unrestricted one.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::dio::{hilbert_basis, DioSystem};
use crate::error::{Error, Result};
use crate::normal::{ac_atom_counts, eq_modulo, normal_form, rebuild};
use crate::preorder::{compare, decide_instance, InstanceDecision, Scope};
use crate::subst::{FreshVarGen, Substitution};
use crate::term::{parse_term, Term};
use crate::theory::{theory_info, Flag, TheoryId};

/// An elementary unification problem: equations over the theory's own
/// signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnificationProblem {
    pub theory: TheoryId,
    pub equations: Vec<(Term, Term)>,
}

impl UnificationProblem {
    pub fn new(theory: TheoryId, equations: Vec<(Term, Term)>) -> Result<Self> {
        let sig = theory_info(&theory).signature;
        for (s, t) in &equations {
            sig.check(s)?;
            sig.check(t)?;
        }
        Ok(UnificationProblem { theory, equations })
    }

    /// The problem variables Var(Γ).
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (s, t) in &self.equations {
            out.extend(s.vars());
            out.extend(t.vars());
        }
        out
    }

    /// The scope that compares on exactly the problem variables.
    pub fn restricted_scope(&self) -> Scope {
        Scope::VarSet(self.vars())
    }

    pub fn is_unifier(&self, sigma: &Substitution) -> Result<bool> {
        for (s, t) in &self.equations {
            if !eq_modulo(&self.theory, &sigma.apply(s), &sigma.apply(t))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Parses a problem file: a `theory:` header line, then one `s = t` equation
/// per line. Blank lines and `#` comments are skipped.
pub fn parse_problem(input: &str) -> Result<UnificationProblem> {
    let mut theory: Option<TheoryId> = None;
    let mut equations = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("theory:") {
            if theory.is_some() {
                return Err(err("duplicate theory header".into()));
            }
            theory = Some(TheoryId::parse(rest)?);
            continue;
        }
        let id = theory
            .as_ref()
            .ok_or_else(|| err("the theory header must come before equations".into()))?;
        let sig = theory_info(id).signature;
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| err("expected an equation `s = t`".into()))?;
        equations.push((
            parse_term(lhs, &sig).map_err(|e| err(e.to_string()))?,
            parse_term(rhs, &sig).map_err(|e| err(e.to_string()))?,
        ));
    }
    let theory = theory.ok_or_else(|| Error::Parse("missing `theory:` header".into()))?;
    UnificationProblem::new(theory, equations)
}

/// How far a unifier set's completeness claim reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetStatus {
    Complete,
    CompleteWithinUniverse { fresh_vars: usize, depth: usize },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifierSet {
    pub unifiers: Vec<Substitution>,
    pub scope: Scope,
    pub status: SetStatus,
    pub minimal: bool,
}

// ---------------------------------------------------------------------------
// Syntactic unification

/// Most general syntactic unifier: decompose, bind with occurs check. The
/// result is idempotent and uses only problem variables.
pub fn mgu_syntactic(equations: &[(Term, Term)]) -> Option<Substitution> {
    let mut work: Vec<(Term, Term)> = equations.to_vec();
    let mut sub = Substitution::identity();
    while let Some((s, t)) = work.pop() {
        let s = sub.apply(&s);
        let t = sub.apply(&t);
        if s == t {
            continue;
        }
        match (s, t) {
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t.vars().contains(&v) {
                    return None;
                }
                let single = Substitution::from_pairs([(v, t)]);
                sub = single.compose(&sub);
            }
            (Term::App(f, fs), Term::App(g, gs)) => {
                if f != g || fs.len() != gs.len() {
                    return None;
                }
                work.extend(fs.into_iter().zip(gs));
            }
        }
    }
    Some(sub)
}

// ---------------------------------------------------------------------------
// Per-theory complete sets

const SUBSET_CAP: usize = 20;
const NARROW_NODE_CAP: usize = 200_000;

/// Computes a complete set of unifiers w.r.t. the restricted preorder for the
/// theories with known finitary or unitary restricted type. Other theories
/// are refused; bounded evidence is available through the type probes.
pub fn unify_theory(gamma: &UnificationProblem) -> Result<UnifierSet> {
    let id = &gamma.theory;
    let scope = gamma.restricted_scope();
    let raw: Vec<Substitution> = match id {
        TheoryId::Empty => mgu_syntactic(&gamma.equations).into_iter().collect(),
        TheoryId::C => unify_commutative(gamma)?,
        TheoryId::I => unify_idempotent(gamma)?,
        TheoryId::AC | TheoryId::ACU => unify_counting(gamma)?,
        TheoryId::ACUI | TheoryId::ACI => unify_sets(gamma)?,
        _ => {
            return Err(Error::unsupported(
                id.to_string(),
                "no complete-set routine; use the bounded type probe instead",
            ))
        }
    };
    for sigma in &raw {
        if !gamma.is_unifier(sigma)? {
            return Err(Error::Internal(format!("produced a non-unifier {sigma}")));
        }
    }
    let unifiers = minimize_substitutions(id, &raw, &scope)?;
    Ok(UnifierSet { unifiers, scope, status: SetStatus::Complete, minimal: true })
}

/// Commutative unification: syntactic decomposition that branches on the two
/// argument alignments of every `f` pair.
fn unify_commutative(gamma: &UnificationProblem) -> Result<Vec<Substitution>> {
    fn dfs(
        mut work: Vec<(Term, Term)>,
        sub: Substitution,
        out: &mut Vec<Substitution>,
        nodes: &mut usize,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > NARROW_NODE_CAP {
            return Err(Error::Budget("commutative branching exceeded the node cap".into()));
        }
        while let Some((s, t)) = work.pop() {
            let s = sub.apply(&s);
            let t = sub.apply(&t);
            if s == t {
                continue;
            }
            match (s, t) {
                (Term::Var(v), t) | (t, Term::Var(v)) => {
                    if t.vars().contains(&v) {
                        return Ok(());
                    }
                    let single = Substitution::from_pairs([(v, t)]);
                    return dfs(work, single.compose(&sub), out, nodes);
                }
                (Term::App(_, fs), Term::App(_, gs)) => {
                    let (a1, a2) = (fs[0].clone(), fs[1].clone());
                    let (b1, b2) = (gs[0].clone(), gs[1].clone());
                    let mut flipped = work.clone();
                    flipped.push((a1.clone(), b2.clone()));
                    flipped.push((a2.clone(), b1.clone()));
                    dfs(flipped, sub.clone(), out, nodes)?;
                    work.push((a1, b1));
                    work.push((a2, b2));
                }
            }
        }
        out.push(sub);
        Ok(())
    }
    let mut out = Vec::new();
    let mut nodes = 0;
    dfs(gamma.equations.clone(), Substitution::identity(), &mut out, &mut nodes)?;
    Ok(out)
}

/// Idempotent unification by narrowing with the collapse rule: pick an `f`
/// subterm, unify its arguments, replace it by the merged argument, and also
/// try to close the goal syntactically at every state. Each step removes one
/// `f` node, so the search tree is finite.
fn unify_idempotent(gamma: &UnificationProblem) -> Result<Vec<Substitution>> {
    let vars = gamma.vars();
    fn positions(t: &Term) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let Term::App(_, args) = t {
                out.push(path.clone());
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    go(a, path, out);
                    path.pop();
                }
            }
        }
        go(t, &mut Vec::new(), &mut out);
        out
    }
    fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> &'a Term {
        path.iter().fold(t, |t, &i| match t {
            Term::App(_, args) => &args[i],
            Term::Var(_) => unreachable!("path into a variable"),
        })
    }
    fn replace_at(t: &Term, path: &[usize], with: &Term) -> Term {
        match path.split_first() {
            None => with.clone(),
            Some((&i, rest)) => match t {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i] = replace_at(&args[i], rest, with);
                    Term::App(f.clone(), args)
                }
                Term::Var(_) => unreachable!("path into a variable"),
            },
        }
    }
    fn dfs(
        goal: &[(Term, Term)],
        acc: &Substitution,
        out: &mut Vec<Substitution>,
        nodes: &mut usize,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > NARROW_NODE_CAP {
            return Err(Error::Budget("narrowing exceeded the node cap".into()));
        }
        if let Some(mgu) = mgu_syntactic(goal) {
            out.push(mgu.compose(acc));
        }
        for (e, (s, t)) in goal.iter().enumerate() {
            for (side, term) in [(0, s), (1, t)] {
                for path in positions(term) {
                    let Term::App(_, args) = subterm_at(term, &path) else { unreachable!() };
                    let Some(mu) = mgu_syntactic(&[(args[0].clone(), args[1].clone())]) else {
                        continue;
                    };
                    let collapsed = replace_at(term, &path, &mu.apply(&args[0]));
                    let mut next: Vec<(Term, Term)> = goal.to_vec();
                    next[e] = if side == 0 {
                        (collapsed, t.clone())
                    } else {
                        (s.clone(), collapsed)
                    };
                    let next: Vec<(Term, Term)> =
                        next.iter().map(|(a, b)| (mu.apply(a), mu.apply(b))).collect();
                    dfs(&next, &mu.compose(acc), out, nodes)?;
                }
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    let mut nodes = 0;
    dfs(&gamma.equations, &Substitution::identity(), &mut out, &mut nodes)?;
    // Complete sets for this theory stay within the problem variables.
    Ok(out.into_iter().map(|s| s.restrict(&vars)).collect())
}

/// The per-variable count-difference system of an AC-family problem: one row
/// per equation, one column per problem variable.
fn counting_system(gamma: &UnificationProblem) -> Result<DioSystem> {
    let vars: Vec<String> = gamma.vars().into_iter().collect();
    let mut rows = Vec::new();
    for (s, t) in &gamma.equations {
        let left = ac_atom_counts(&gamma.theory, s)?;
        let right = ac_atom_counts(&gamma.theory, t)?;
        let mut row = Vec::new();
        for v in &vars {
            let atom = Term::var(v.clone());
            let l = left.get(&atom).copied().unwrap_or(0) as i64;
            let r = right.get(&atom).copied().unwrap_or(0) as i64;
            row.push(l - r);
        }
        rows.push(row);
    }
    let rhs = vec![0; rows.len()];
    Ok(DioSystem { unknowns: vars, rows, rhs })
}

/// AC and ACU unification from the basis of the count-difference system: one
/// fresh variable per basis vector. With a unit the whole basis gives the
/// single most general unifier; without one, every basis subset whose support
/// covers all problem variables gives a unifier.
fn unify_counting(gamma: &UnificationProblem) -> Result<Vec<Substitution>> {
    let with_unit = matches!(gamma.theory, TheoryId::ACU);
    let vars = gamma.vars();
    if vars.is_empty() {
        return Ok(vec![Substitution::identity()]);
    }
    let system = counting_system(gamma)?;
    let basis = hilbert_basis(&system)?.vectors;
    let mut gen = FreshVarGen::avoiding(&vars);
    let fresh: Vec<String> = basis.iter().map(|_| gen.fresh()).collect();
    let build = |chosen: &[usize]| -> Result<Substitution> {
        let mut pairs = Vec::new();
        for (k, v) in system.unknowns.iter().enumerate() {
            let mut atoms = Vec::new();
            for &b in chosen {
                let copies = u64::try_from(&basis[b][k])
                    .map_err(|_| Error::Internal("oversized basis entry".into()))?;
                atoms.extend(std::iter::repeat(Term::var(fresh[b].clone())).take(copies as usize));
            }
            atoms.sort();
            pairs.push((v.clone(), rebuild("f", atoms, if with_unit { Some("0") } else { None })));
        }
        Ok(Substitution::from_pairs(pairs))
    };
    if with_unit {
        let all: Vec<usize> = (0..basis.len()).collect();
        return Ok(vec![build(&all)?]);
    }
    if basis.len() > SUBSET_CAP {
        return Err(Error::Budget(format!("basis of size {} is too large to sweep", basis.len())));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << basis.len()) {
        let chosen: Vec<usize> = (0..basis.len()).filter(|b| mask & (1 << b) != 0).collect();
        let covers = (0..system.unknowns.len())
            .all(|k| chosen.iter().any(|&b| !basis[b][k].is_zero()));
        if covers {
            out.push(build(&chosen)?);
        }
    }
    Ok(out)
}

/// The nonempty variable subsets compatible with every equation read as a
/// set equation: a subset meets the left side iff it meets the right side.
fn consistent_subsets(gamma: &UnificationProblem) -> Result<Vec<BTreeSet<String>>> {
    let vars: Vec<String> = gamma.vars().into_iter().collect();
    if vars.len() > SUBSET_CAP {
        return Err(Error::Budget(format!("{} variables are too many to sweep", vars.len())));
    }
    let mut sides = Vec::new();
    for (s, t) in &gamma.equations {
        let left: BTreeSet<Term> = ac_atom_counts(&gamma.theory, s)?.into_keys().collect();
        let right: BTreeSet<Term> = ac_atom_counts(&gamma.theory, t)?.into_keys().collect();
        sides.push((left, right));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << vars.len()) {
        let m: BTreeSet<String> =
            vars.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v.clone()).collect();
        let consistent = sides.iter().all(|(left, right)| {
            let hits_left = m.iter().any(|v| left.contains(&Term::var(v.clone())));
            let hits_right = m.iter().any(|v| right.contains(&Term::var(v.clone())));
            hits_left == hits_right
        });
        if consistent {
            out.push(m);
        }
    }
    Ok(out)
}

/// ACUI and ACI unification by the consistent-subset construction: one fresh
/// variable per consistent subset, each problem variable mapped to the join
/// of the subsets containing it. With a unit the full family is the single
/// most general unifier; without one, every subfamily that still covers all
/// variables gives a unifier with nonempty images.
fn unify_sets(gamma: &UnificationProblem) -> Result<Vec<Substitution>> {
    let with_unit = matches!(gamma.theory, TheoryId::ACUI);
    let vars = gamma.vars();
    if vars.is_empty() {
        return Ok(vec![Substitution::identity()]);
    }
    let subsets = consistent_subsets(gamma)?;
    let mut gen = FreshVarGen::avoiding(&vars);
    let fresh: Vec<String> = subsets.iter().map(|_| gen.fresh()).collect();
    let build = |chosen: &[usize]| -> Substitution {
        let mut pairs = Vec::new();
        for v in &vars {
            let atoms: Vec<Term> = chosen
                .iter()
                .filter(|&&m| subsets[m].contains(v))
                .map(|&m| Term::var(fresh[m].clone()))
                .collect();
            pairs.push((v.clone(), rebuild("f", atoms, if with_unit { Some("0") } else { None })));
        }
        Substitution::from_pairs(pairs)
    };
    if with_unit {
        let all: Vec<usize> = (0..subsets.len()).collect();
        return Ok(vec![build(&all)]);
    }
    if subsets.len() > SUBSET_CAP {
        return Err(Error::Budget(format!("{} consistent subsets are too many to sweep", subsets.len())));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << subsets.len()) {
        let chosen: Vec<usize> = (0..subsets.len()).filter(|m| mask & (1 << m) != 0).collect();
        let covers = vars.iter().all(|v| chosen.iter().any(|&m| subsets[m].contains(v)));
        if covers {
            out.push(build(&chosen));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Minimization and completeness

/// Keeps one representative per equivalence class and drops everything that
/// some kept element is strictly below. Undecided comparisons keep their
/// element conservatively. Representatives are chosen by printed form, so the
/// result is deterministic.
pub fn minimize_substitutions(
    id: &TheoryId,
    candidates: &[Substitution],
    scope: &Scope,
) -> Result<Vec<Substitution>> {
    let mut sorted: Vec<Substitution> = candidates.to_vec();
    sorted.sort_by_key(|s| {
        let p = s.to_string();
        (p.len(), p)
    });
    sorted.dedup();
    let n = sorted.len();
    let mut holds = vec![vec![Flag::Unknown; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                holds[i][j] = decide_instance(id, &sorted[i], &sorted[j], scope)?.holds();
            }
        }
    }
    let mut kept = Vec::new();
    for j in 0..n {
        let dominated = (0..n).any(|i| {
            i != j
                && holds[i][j] == Flag::Yes
                && (holds[j][i] == Flag::No || (holds[j][i] == Flag::Yes && i < j))
        });
        if !dominated {
            kept.push(sorted[j].clone());
        }
    }
    Ok(kept)
}

pub fn minimize_set(id: &TheoryId, set: &UnifierSet, scope: &Scope) -> Result<UnifierSet> {
    Ok(UnifierSet {
        unifiers: minimize_substitutions(id, &set.unifiers, scope)?,
        scope: scope.clone(),
        status: set.status.clone(),
        minimal: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessCheck {
    pub complete: bool,
    /// Universe members no candidate is decidedly below.
    pub uncovered: Vec<Substitution>,
    /// Pairs whose comparison came back undecided.
    pub undecided: Vec<(Substitution, Substitution)>,
}

/// True iff every universe member lies above some candidate under the scope.
/// Undecided comparisons count against completeness and are reported.
pub fn is_complete_within(
    id: &TheoryId,
    candidate: &[Substitution],
    universe: &[Substitution],
    scope: &Scope,
) -> Result<CompletenessCheck> {
    let mut uncovered = Vec::new();
    let mut undecided = Vec::new();
    for member in universe {
        let mut covered = false;
        for cand in candidate {
            match decide_instance(id, cand, member, scope)? {
                InstanceDecision::Holds(_) => {
                    covered = true;
                    break;
                }
                InstanceDecision::Undecided => {
                    undecided.push((cand.clone(), member.clone()));
                }
                InstanceDecision::DoesNotHold => {}
            }
        }
        if !covered {
            uncovered.push(member.clone());
        }
    }
    Ok(CompletenessCheck { complete: uncovered.is_empty(), uncovered, undecided })
}

// ---------------------------------------------------------------------------
// Bounded universes

const POOL_CAP: usize = 20_000;
const ASSIGN_NODE_CAP: usize = 5_000_000;

/// Canonical image pool: all class representatives of terms over `vars` up to
/// the depth bound. The merge theories compose canonical forms level by
/// level, which reaches every class; the remaining theories enumerate raw
/// terms and deduplicate by normal form.
pub(crate) fn image_pool(id: &TheoryId, vars: &BTreeSet<String>, depth: usize) -> Result<Vec<Term>> {
    let sig = theory_info(id).signature;
    let compose_canonical = matches!(
        id,
        TheoryId::AC
            | TheoryId::ACU
            | TheoryId::ACI
            | TheoryId::ACUI
            | TheoryId::ACUh { .. }
            | TheoryId::FL0 { .. }
            | TheoryId::EL { .. }
    );
    let mut pool: BTreeSet<Term> = vars.iter().map(Term::var).collect();
    for sym in sig.symbols() {
        if sym.arity == 0 {
            pool.insert(Term::constant(sym.name.clone()));
        }
    }
    if compose_canonical {
        for t in std::mem::take(&mut pool) {
            pool.insert(normal_form(id, &t)?);
        }
    }
    for _ in 0..depth {
        let prev: Vec<Term> = pool.iter().cloned().collect();
        for sym in sig.symbols() {
            match sym.arity {
                0 => {}
                1 => {
                    for a in &prev {
                        let t = Term::App(sym.name.clone(), vec![a.clone()]);
                        insert_bounded(id, &mut pool, t, depth, compose_canonical)?;
                    }
                }
                2 => {
                    for a in &prev {
                        for b in &prev {
                            let t = Term::App(sym.name.clone(), vec![a.clone(), b.clone()]);
                            insert_bounded(id, &mut pool, t, depth, compose_canonical)?;
                        }
                    }
                }
                n => return Err(Error::Internal(format!("unexpected arity {n} in {id}"))),
            }
            if pool.len() > POOL_CAP {
                return Err(Error::Budget(format!(
                    "image pool exceeded {POOL_CAP} members at depth {depth}"
                )));
            }
        }
    }
    Ok(pool.into_iter().collect())
}

fn insert_bounded(
    id: &TheoryId,
    pool: &mut BTreeSet<Term>,
    t: Term,
    depth: usize,
    canonical: bool,
) -> Result<()> {
    let t = if canonical { normal_form(id, &t)? } else { t };
    if t.depth() <= depth {
        pool.insert(t);
    }
    Ok(())
}

/// All unifiers with domain inside the problem variables and images drawn
/// from the bounded pool over problem plus fresh variables, before any
/// deduplication.
fn enumerate_raw(
    gamma: &UnificationProblem,
    fresh_vars: usize,
    depth: usize,
) -> Result<Vec<Substitution>> {
    let vars = gamma.vars();
    let mut gen = FreshVarGen::avoiding(&vars);
    let mut all_vars = vars.clone();
    for _ in 0..fresh_vars {
        all_vars.insert(gen.fresh());
    }
    let pool = image_pool(&gamma.theory, &all_vars, depth)?;
    let order: Vec<String> = vars.iter().cloned().collect();
    // Equations become checkable once their last variable is assigned.
    let ready_at: Vec<Vec<usize>> = (0..order.len())
        .map(|d| {
            gamma
                .equations
                .iter()
                .enumerate()
                .filter(|(_, (s, t))| {
                    let mut evs = s.vars();
                    evs.extend(t.vars());
                    order.iter().rposition(|v| evs.contains(v)) == Some(d)
                })
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut nodes = 0usize;
    fn dfs(
        gamma: &UnificationProblem,
        order: &[String],
        pool: &[Term],
        ready_at: &[Vec<usize>],
        depth_idx: usize,
        bind: &mut Vec<(String, Term)>,
        out: &mut Vec<Substitution>,
        nodes: &mut usize,
    ) -> Result<()> {
        if depth_idx == order.len() {
            out.push(Substitution::from_pairs(bind.iter().cloned()));
            return Ok(());
        }
        'cand: for cand in pool {
            *nodes += 1;
            if *nodes > ASSIGN_NODE_CAP {
                return Err(Error::Budget("unifier enumeration exceeded the node cap".into()));
            }
            bind.push((order[depth_idx].clone(), cand.clone()));
            let sub = Substitution::from_pairs(bind.iter().cloned());
            for &e in &ready_at[depth_idx] {
                let (s, t) = &gamma.equations[e];
                if !eq_modulo(&gamma.theory, &sub.apply(s), &sub.apply(t))? {
                    bind.pop();
                    continue 'cand;
                }
            }
            dfs(gamma, order, pool, ready_at, depth_idx + 1, bind, out, nodes)?;
            bind.pop();
        }
        Ok(())
    }
    if order.is_empty() {
        // No variables: every substitution works iff the ground equations hold.
        let holds = gamma
            .equations
            .iter()
            .map(|(s, t)| eq_modulo(&gamma.theory, s, t))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        return Ok(if holds { vec![Substitution::identity()] } else { Vec::new() });
    }
    dfs(gamma, &order, &pool, &ready_at, 0, &mut Vec::new(), &mut out, &mut nodes)?;
    Ok(out)
}

/// Groups a list of substitutions into equivalence classes for the scope and
/// keeps the representative with the smallest printed form. Undecided
/// equivalences keep both elements.
fn dedupe_classes(
    id: &TheoryId,
    subs: &[Substitution],
    scope: &Scope,
) -> Result<Vec<Substitution>> {
    let mut sorted: Vec<Substitution> = subs.to_vec();
    sorted.sort_by_key(|s| {
        let p = s.to_string();
        (p.len(), p)
    });
    sorted.dedup();
    let mut reps: Vec<Substitution> = Vec::new();
    'next: for s in sorted {
        for r in &reps {
            if compare(id, r, &s, scope)?.equivalent() == Flag::Yes {
                continue 'next;
            }
        }
        reps.push(s);
    }
    Ok(reps)
}

/// All unifiers within the bounds, deduplicated up to equivalence for the
/// scope.
pub fn enumerate_unifiers_bounded(
    gamma: &UnificationProblem,
    fresh_vars: usize,
    depth: usize,
    scope: &Scope,
) -> Result<UnifierSet> {
    let raw = enumerate_raw(gamma, fresh_vars, depth)?;
    let unifiers = dedupe_classes(&gamma.theory, &raw, scope)?;
    Ok(UnifierSet {
        unifiers,
        scope: scope.clone(),
        status: SetStatus::CompleteWithinUniverse { fresh_vars, depth },
        minimal: false,
    })
}

// ---------------------------------------------------------------------------
// Type probes

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictHint {
    UnitaryEvidence,
    FinitaryEvidence,
    /// Reserved for cross-bound growth comparisons; a single probe never
    /// claims it.
    InfinitaryEvidence,
    ZeroEvidence,
    Unknown,
}

impl std::fmt::Display for VerdictHint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VerdictHint::UnitaryEvidence => "unitary-evidence",
            VerdictHint::FinitaryEvidence => "finitary-evidence",
            VerdictHint::InfinitaryEvidence => "infinitary-evidence",
            VerdictHint::ZeroEvidence => "zero-evidence",
            VerdictHint::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeProbe {
    pub scope: Scope,
    pub unifier_count: usize,
    pub class_count: usize,
    pub minimal_class_count: usize,
    pub complete_within_universe: bool,
    pub verdict_hint: VerdictHint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeProbeReport {
    pub fresh_vars: usize,
    pub depth: usize,
    pub restricted: ScopeProbe,
    pub unrestricted: ScopeProbe,
}

/// Probes one scope: builds the bounded universe, quotients it, finds the
/// minimal classes, and checks they cover everything. The verdict hint never
/// claims more than the universe supports: a member with no decided minimal
/// class below it is evidence toward type zero, completeness plus a class
/// count is evidence toward unitary or finitary.
pub fn probe_scope(
    gamma: &UnificationProblem,
    fresh_vars: usize,
    depth: usize,
    scope: &Scope,
) -> Result<ScopeProbe> {
    let raw = enumerate_raw(gamma, fresh_vars, depth)?;
    let classes = dedupe_classes(&gamma.theory, &raw, scope)?;
    let minimal = minimize_substitutions(&gamma.theory, &classes, scope)?;
    let coverage = is_complete_within(&gamma.theory, &minimal, &classes, scope)?;
    let verdict = if classes.is_empty() {
        VerdictHint::Unknown
    } else if coverage.complete {
        if minimal.len() == 1 {
            VerdictHint::UnitaryEvidence
        } else {
            VerdictHint::FinitaryEvidence
        }
    } else {
        // A concrete member with no decided minimal class below it.
        VerdictHint::ZeroEvidence
    };
    Ok(ScopeProbe {
        scope: scope.clone(),
        unifier_count: raw.len(),
        class_count: classes.len(),
        minimal_class_count: minimal.len(),
        complete_within_universe: coverage.complete,
        verdict_hint: verdict,
    })
}

pub fn probe_type(
    gamma: &UnificationProblem,
    fresh_vars: usize,
    depth: usize,
) -> Result<TypeProbeReport> {
    Ok(TypeProbeReport {
        fresh_vars,
        depth,
        restricted: probe_scope(gamma, fresh_vars, depth, &gamma.restricted_scope())?,
        unrestricted: probe_scope(gamma, fresh_vars, depth, &Scope::AllVars)?,
    })
}

// ---------------------------------------------------------------------------
// Membership in every complete set, and the swap-variant family

/// True iff every variable in the range occurs in the images of two distinct
/// variables, counting untouched variables as their own image. Such a
/// substitution cannot be a proper instance of any other unifier on those
/// variables, so it belongs to every complete set of unifiers.
pub fn in_every_complete_set(sigma: &Substitution) -> bool {
    let dom = sigma.domain();
    sigma.var_range().iter().all(|y| {
        let mut count = dom.iter().filter(|x| sigma.image_of(x).vars().contains(y)).count();
        if !dom.contains(y) {
            count += 1;
        }
        count >= 2
    })
}

/// The family of swap variants: compose with the transposition of `x0` and
/// `z` for each `z`. For admissible `z` (fresh for the substitution, or `x0`
/// itself) the variant stays equivalent on the problem variables while being
/// incomparable to its siblings when compared everywhere.
pub fn sigma_z_family(
    sigma: &Substitution,
    x0: &str,
    zs: &[String],
) -> Result<Vec<Substitution>> {
    if !sigma.var_range().contains(x0) {
        return Err(Error::Invalid(format!("{x0} does not occur in the range of {sigma}")));
    }
    let footprint = sigma.footprint();
    let mut out = Vec::new();
    for z in zs {
        if z != x0 && footprint.contains(z) {
            return Err(Error::Invalid(format!(
                "{z} is not admissible: it occurs in the substitution"
            )));
        }
        let tau = crate::subst::Permutation::transposition(x0, z.clone()).as_substitution();
        out.push(sigma.compose(&tau));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Scope transfer

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeStatus {
    pub complete: bool,
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeTransferReport {
    /// Members violating Dom ∪ VRan ⊆ Var(Γ), by printed form.
    pub precondition_violations: Vec<String>,
    pub restricted: ScopeStatus,
    pub unrestricted: ScopeStatus,
    /// Minimal-complete status agrees between the two scopes.
    pub transfer_holds: bool,
}

/// Checks that a candidate set whose members stay within the problem
/// variables has the same minimal-complete status under both scopes, within
/// the bounded universe.
pub fn check_scope_transfer(
    gamma: &UnificationProblem,
    candidate: &[Substitution],
    fresh_vars: usize,
    depth: usize,
) -> Result<ScopeTransferReport> {
    let vars = gamma.vars();
    let precondition_violations: Vec<String> = candidate
        .iter()
        .filter(|s| !s.footprint().is_subset(&vars))
        .map(|s| s.to_string())
        .collect();
    let universe = enumerate_raw(gamma, fresh_vars, depth)?;
    let mut statuses = Vec::new();
    for scope in [gamma.restricted_scope(), Scope::AllVars] {
        let classes = dedupe_classes(&gamma.theory, &universe, &scope)?;
        let coverage = is_complete_within(&gamma.theory, candidate, &classes, &scope)?;
        let minimized = minimize_substitutions(&gamma.theory, candidate, &scope)?;
        statuses.push(ScopeStatus {
            complete: coverage.complete,
            minimal: minimized.len() == candidate.len(),
        });
    }
    let unrestricted = statuses.pop().unwrap();
    let restricted = statuses.pop().unwrap();
    let transfer_holds = precondition_violations.is_empty() && restricted == unrestricted;
    Ok(ScopeTransferReport { precondition_violations, restricted, unrestricted, transfer_holds })
}
