//! Matching modulo a theory: find a substitution `w` with
//! `w(pattern) = target` modulo the theory, simultaneously for a list of
//! equations. Target-side variables are never instantiated, and variables in
//! the identity-constrained set must be mapped to themselves; everything else
//! on the pattern side is free.
//!
//! Every matcher here is exact except the band and concept searches, which
//! give up honestly (`Undecided`) past their documented caps. Witnesses are
//! re-validated against the full problem before they are returned.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::dio::{min_solutions_inhomogeneous, DioSystem, DioVector};
use crate::error::{Error, Result};
use crate::normal::{
    ac_atom_counts, acuh1_canonical, acuh1_poly, enumerate_class, eq_modulo, fg_build, fg_reduce,
    fg_word, fl0_canonical, fl0_langs, free_band_canonical, normal_form, rebuild, role_depth,
};
use crate::subst::Substitution;
use crate::term::Term;
use crate::theory::{theory_info, TheoryId};

/// Pattern-target equations plus the variables that must stay fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchProblem {
    /// `(pattern, target)` pairs; the target side is frozen.
    pub equations: Vec<(Term, Term)>,
    /// Pattern variables that may only be mapped to themselves.
    pub identity_constrained: BTreeSet<String>,
}

impl MatchProblem {
    pub fn new(equations: Vec<(Term, Term)>) -> Self {
        MatchProblem { equations, identity_constrained: BTreeSet::new() }
    }

    pub fn with_identity_constrained(mut self, vars: BTreeSet<String>) -> Self {
        self.identity_constrained = vars;
        self
    }

    /// Pattern variables the matcher may instantiate.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (p, _) in &self.equations {
            out.extend(p.vars());
        }
        out.retain(|v| !self.identity_constrained.contains(v));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchOutcome {
    Witness(Substitution),
    NoMatch,
    /// The search hit an internal cap before deciding either way.
    Undecided,
}

impl MatchOutcome {
    pub fn witness(&self) -> Option<&Substitution> {
        match self {
            MatchOutcome::Witness(w) => Some(w),
            _ => None,
        }
    }

    pub fn decided(&self) -> bool {
        !matches!(self, MatchOutcome::Undecided)
    }
}

const SEARCH_NODE_CAP: usize = 2_000_000;
const BAND_LETTER_CAP: usize = 3;
const EL_CANDIDATE_CAP: usize = 14;
const BRUTE_POOL_CAP: usize = 200_000;

/// Decides the matching problem modulo `id`. A returned witness binds only
/// free variables and has been checked against every equation; internal caps
/// surface as `Undecided`, never as a wrong verdict.
pub fn match_modulo(id: &TheoryId, problem: &MatchProblem) -> Result<MatchOutcome> {
    let free = problem.free_vars();
    let mut open: Vec<(Term, Term)> = Vec::new();
    for (p, t) in &problem.equations {
        if p.vars().iter().all(|v| !free.contains(v)) {
            if !eq_modulo(id, p, t)? {
                return Ok(MatchOutcome::NoMatch);
            }
        } else {
            open.push((p.clone(), t.clone()));
        }
    }
    if open.is_empty() {
        return Ok(MatchOutcome::Witness(Substitution::identity()));
    }
    let outcome = match id {
        TheoryId::Empty => match_syntactic_all(id, &open, &free),
        TheoryId::C | TheoryId::A | TheoryId::D => match_by_classes(id, &open, &free),
        TheoryId::I => match_idempotent(&open, &free),
        TheoryId::AC | TheoryId::ACU => match_counting(id, &open, &free),
        TheoryId::ACI | TheoryId::ACUI => match_sets(id, &open, &free),
        TheoryId::AI => match_band(&open, &free),
        TheoryId::FG => match_fg(&open, &free),
        TheoryId::ACUh { k: 1 } => match_acuh1(&open, &free),
        TheoryId::ACUh { .. } => {
            Err(Error::unsupported(id.to_string(), "term-level matching is only available for k = 1"))
        }
        TheoryId::FL0 { .. } => match_fl0(&open, &free),
        TheoryId::EL { .. } => match_el(id, &open, &free),
    };
    let outcome = match outcome {
        Err(Error::Budget(_)) => Ok(MatchOutcome::Undecided),
        other => other,
    }?;
    if let MatchOutcome::Witness(w) = &outcome {
        if !w.domain().is_subset(&free) {
            return Err(Error::Internal("matcher bound a non-free variable".into()));
        }
        for (p, t) in &problem.equations {
            if !eq_modulo(id, &w.apply(p), t)? {
                return Err(Error::Internal(format!("matcher produced a bad witness for {p} vs {t}")));
            }
        }
    }
    Ok(outcome)
}

fn finish(bind: BTreeMap<String, Term>) -> MatchOutcome {
    MatchOutcome::Witness(Substitution::from_pairs(bind))
}

// ---------------------------------------------------------------------------
// Syntactic decomposition, also the per-member step of the class matchers

/// Extends `bind` so that the instantiated pattern of every pair equals its
/// right-hand side syntactically; conflicting re-bindings are tolerated when
/// the two values are equal modulo `id`.
fn syntactic_match(
    id: &TheoryId,
    pairs: Vec<(Term, Term)>,
    free: &BTreeSet<String>,
    bind: &mut BTreeMap<String, Term>,
) -> Result<bool> {
    let mut stack = pairs;
    while let Some((p, t)) = stack.pop() {
        match p {
            Term::Var(v) => {
                if free.contains(&v) {
                    match bind.get(&v) {
                        Some(prev) => {
                            if !eq_modulo(id, prev, &t)? {
                                return Ok(false);
                            }
                        }
                        None => {
                            bind.insert(v, t);
                        }
                    }
                } else if Term::Var(v) != t {
                    return Ok(false);
                }
            }
            Term::App(f, args) => match t {
                Term::App(g, targs) if g == f && targs.len() == args.len() => {
                    stack.extend(args.into_iter().zip(targs));
                }
                _ => return Ok(false),
            },
        }
    }
    Ok(true)
}

fn match_syntactic_all(
    id: &TheoryId,
    open: &[(Term, Term)],
    free: &BTreeSet<String>,
) -> Result<MatchOutcome> {
    let mut bind = BTreeMap::new();
    if syntactic_match(id, open.to_vec(), free, &mut bind)? {
        Ok(finish(bind))
    } else {
        Ok(MatchOutcome::NoMatch)
    }
}

/// Matching for the finite families: an instance equal to the target modulo
/// the theory is syntactically equal to some member of the target's class, so
/// trying every member with the syntactic matcher is complete.
fn match_by_classes(
    id: &TheoryId,
    open: &[(Term, Term)],
    free: &BTreeSet<String>,
) -> Result<MatchOutcome> {
    let classes: Vec<Vec<Term>> =
        open.iter().map(|(_, t)| enumerate_class(id, t)).collect::<Result<_>>()?;
    fn dfs(
        id: &TheoryId,
        i: usize,
        open: &[(Term, Term)],
        classes: &[Vec<Term>],
        free: &BTreeSet<String>,
        bind: &BTreeMap<String, Term>,
        nodes: &mut usize,
    ) -> Result<Option<BTreeMap<String, Term>>> {
        if i == open.len() {
            return Ok(Some(bind.clone()));
        }
        for member in &classes[i] {
            *nodes += 1;
            if *nodes > SEARCH_NODE_CAP {
                return Err(Error::Budget("class matching exceeded the node cap".into()));
            }
            let mut next = bind.clone();
            if syntactic_match(id, vec![(open[i].0.clone(), member.clone())], free, &mut next)? {
                if let Some(done) = dfs(id, i + 1, open, classes, free, &next, nodes)? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }
    let mut nodes = 0;
    match dfs(id, 0, open, &classes, free, &BTreeMap::new(), &mut nodes)? {
        Some(bind) => Ok(finish(bind)),
        None => Ok(MatchOutcome::NoMatch),
    }
}

// ---------------------------------------------------------------------------
// Pool-based assignment search, shared by the idempotent, band, concept and
// brute-force matchers

/// Tries every assignment of pool values to the free variables, pruning an
/// equation as soon as all its variables are assigned. Pools are per-variable
/// and ordered, so the search is deterministic.
fn assign_search(
    id: &TheoryId,
    open: &[(Term, Term)],
    pools: &[(String, Vec<Term>)],
    nodes: &mut usize,
) -> Result<MatchOutcome> {
    // An equation becomes checkable at the depth where its last free variable
    // gets its value.
    let ready_at: Vec<Vec<usize>> = (0..pools.len())
        .map(|depth| {
            open.iter()
                .enumerate()
                .filter(|(_, (p, _))| {
                    let pv = p.vars();
                    let mut last = None;
                    for (i, (v, _)) in pools.iter().enumerate() {
                        if pv.contains(v) {
                            last = Some(i);
                        }
                    }
                    last == Some(depth)
                })
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    fn dfs(
        id: &TheoryId,
        depth: usize,
        open: &[(Term, Term)],
        pools: &[(String, Vec<Term>)],
        ready_at: &[Vec<usize>],
        bind: &mut BTreeMap<String, Term>,
        nodes: &mut usize,
    ) -> Result<Option<BTreeMap<String, Term>>> {
        if depth == pools.len() {
            return Ok(Some(bind.clone()));
        }
        let (v, pool) = &pools[depth];
        'cand: for cand in pool {
            *nodes += 1;
            if *nodes > SEARCH_NODE_CAP {
                return Err(Error::Budget("assignment search exceeded the node cap".into()));
            }
            bind.insert(v.clone(), cand.clone());
            for &e in &ready_at[depth] {
                let (p, t) = &open[e];
                let inst = Substitution::from_pairs(bind.clone()).apply(p);
                if !eq_modulo(id, &inst, t)? {
                    continue 'cand;
                }
            }
            if let Some(done) = dfs(id, depth + 1, open, pools, ready_at, bind, nodes)? {
                return Ok(Some(done));
            }
        }
        bind.remove(v);
        Ok(None)
    }
    let mut bind = BTreeMap::new();
    match dfs(id, 0, open, pools, &ready_at, &mut bind, nodes)? {
        Some(done) => Ok(finish(done)),
        None => Ok(MatchOutcome::NoMatch),
    }
}

// ---------------------------------------------------------------------------
// Idempotency

/// Matching under idempotency alone. A collapse step `f(w,w) -> w` keeps a
/// full copy of everything inside the erased half, so the normal form of any
/// binding survives as a subterm of the instance normal form; candidate
/// values can therefore be drawn from the target's subterms, which makes the
/// search complete.
fn match_idempotent(open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    let id = TheoryId::I;
    let mut pools: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for (p, t) in open {
        let nf = normal_form(&id, t)?;
        let subs: BTreeSet<Term> = nf.subterms().into_iter().cloned().collect();
        for v in p.vars() {
            if !free.contains(&v) {
                continue;
            }
            match pools.get_mut(&v) {
                Some(pool) => pool.retain(|c| subs.contains(c)),
                None => {
                    pools.insert(v, subs.clone());
                }
            }
        }
    }
    if pools.values().any(BTreeSet::is_empty) {
        return Ok(MatchOutcome::NoMatch);
    }
    let pools: Vec<(String, Vec<Term>)> =
        pools.into_iter().map(|(v, s)| (v, s.into_iter().collect())).collect();
    let mut nodes = 0;
    assign_search(&id, open, &pools, &mut nodes)
}

// ---------------------------------------------------------------------------
// Counting theories: AC and ACU

/// Matching by atom counts. Each free variable gets an unknown count per
/// admissible atom; the equations say that the variable contributions plus
/// the frozen atoms reproduce the target multiset exactly, which is a linear
/// Diophantine system over the naturals.
fn match_counting(
    id: &TheoryId,
    open: &[(Term, Term)],
    free: &BTreeSet<String>,
) -> Result<MatchOutcome> {
    let with_unit = matches!(id, TheoryId::ACU);
    struct CountEq {
        mults: BTreeMap<String, u64>,
        rem: BTreeMap<Term, u64>,
    }
    let mut eqs: Vec<CountEq> = Vec::new();
    for (p, t) in open {
        let pat = ac_atom_counts(id, p)?;
        let mut rem = ac_atom_counts(id, t)?;
        let mut mults = BTreeMap::new();
        for (atom, n) in pat {
            match &atom {
                Term::Var(v) if free.contains(v) => {
                    mults.insert(v.clone(), n);
                }
                _ => match rem.get_mut(&atom) {
                    Some(c) if *c >= n => {
                        *c -= n;
                        if *c == 0 {
                            rem.remove(&atom);
                        }
                    }
                    _ => return Ok(MatchOutcome::NoMatch),
                },
            }
        }
        eqs.push(CountEq { mults, rem });
    }
    let occurring: BTreeSet<String> = eqs.iter().flat_map(|e| e.mults.keys().cloned()).collect();
    // An atom is admissible for a variable when every equation the variable
    // occurs in still needs that atom; anything else would overshoot the
    // target count there. Equality of atom multisets also forces every image
    // atom to come from the targets, so these index sets are complete.
    let mut allowed: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for v in &occurring {
        let mut inter: Option<BTreeSet<Term>> = None;
        for e in eqs.iter().filter(|e| e.mults.contains_key(v)) {
            let atoms: BTreeSet<Term> = e.rem.keys().cloned().collect();
            inter = Some(match inter {
                None => atoms,
                Some(prev) => prev.intersection(&atoms).cloned().collect(),
            });
        }
        allowed.insert(v.clone(), inter.unwrap_or_default());
    }
    let unknowns: Vec<(String, Term)> = occurring
        .iter()
        .flat_map(|v| allowed[v].iter().map(move |a| (v.clone(), a.clone())))
        .collect();
    let build_witness = |totals: &BTreeMap<String, BTreeMap<Term, u64>>| -> MatchOutcome {
        let mut bind = BTreeMap::new();
        for v in &occurring {
            let mut atoms: Vec<Term> = Vec::new();
            if let Some(counts) = totals.get(v) {
                for (a, &n) in counts {
                    atoms.extend(std::iter::repeat(a.clone()).take(n as usize));
                }
            }
            atoms.sort();
            bind.insert(v.clone(), rebuild("f", atoms, Some("0")));
        }
        finish(bind)
    };
    if unknowns.is_empty() {
        if eqs.iter().any(|e| !e.rem.is_empty()) || !with_unit {
            return Ok(MatchOutcome::NoMatch);
        }
        return Ok(build_witness(&BTreeMap::new()));
    }
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    for e in &eqs {
        for (atom, &need) in &e.rem {
            let row: Vec<i64> = unknowns
                .iter()
                .map(|(v, a)| if a == atom { e.mults.get(v).copied().unwrap_or(0) as i64 } else { 0 })
                .collect();
            if row.iter().all(|&c| c == 0) && need > 0 {
                return Ok(MatchOutcome::NoMatch);
            }
            rows.push(row);
            rhs.push(need as i64);
        }
    }
    if rows.is_empty() {
        // Nothing left to produce: only the unit theory can map the variables
        // to something invisible.
        if !with_unit {
            return Ok(MatchOutcome::NoMatch);
        }
        return Ok(build_witness(&BTreeMap::new()));
    }
    let system = DioSystem {
        unknowns: (0..unknowns.len()).map(|i| format!("q{i}")).collect(),
        rows,
        rhs,
    };
    let (particular, hom) = min_solutions_inhomogeneous(&system)?;
    let var_total = |sol: &DioVector, v: &String| -> BigUint {
        unknowns
            .iter()
            .zip(sol)
            .filter(|((u, _), _)| u == v)
            .map(|(_, c)| c.clone())
            .sum()
    };
    let to_totals = |sol: &DioVector| -> Result<BTreeMap<String, BTreeMap<Term, u64>>> {
        let mut out: BTreeMap<String, BTreeMap<Term, u64>> = BTreeMap::new();
        for ((v, a), c) in unknowns.iter().zip(sol) {
            let c = u64::try_from(c).map_err(|_| Error::Internal("oversized atom count".into()))?;
            if c > 0 {
                *out.entry(v.clone()).or_default().entry(a.clone()).or_insert(0) += c;
            }
        }
        Ok(out)
    };
    if with_unit {
        return Ok(match particular.first() {
            Some(sol) => build_witness(&to_totals(sol)?),
            None => MatchOutcome::NoMatch,
        });
    }
    // Without a unit every variable needs a nonempty image. Any solution is a
    // minimal one plus basis vectors, so if an all-nonempty solution exists,
    // some minimal solution can be topped up by basis vectors covering each
    // variable it leaves empty.
    'particular: for sol in &particular {
        let mut boosted = sol.clone();
        let mut boosts: Vec<&DioVector> = Vec::new();
        for v in &occurring {
            if var_total(sol, v).is_zero() {
                match hom.vectors.iter().find(|b| !var_total(b, v).is_zero()) {
                    Some(b) => {
                        if !boosts.contains(&b) {
                            boosts.push(b);
                        }
                    }
                    None => continue 'particular,
                }
            }
        }
        for b in boosts {
            for (x, y) in boosted.iter_mut().zip(b) {
                *x += y;
            }
        }
        return Ok(build_witness(&to_totals(&boosted)?));
    }
    Ok(MatchOutcome::NoMatch)
}

// ---------------------------------------------------------------------------
// Set theories: ACI and ACUI

/// Matching by atom sets. The largest safe image of a variable is the
/// intersection of the target sets of all its equations; since enlarging an
/// image can only enlarge the instance set, the problem is solvable exactly
/// when these maximal images already cover every target.
fn match_sets(id: &TheoryId, open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    let with_unit = matches!(id, TheoryId::ACUI);
    struct SetEq {
        vars: BTreeSet<String>,
        frozen: BTreeSet<Term>,
        target: BTreeSet<Term>,
    }
    let mut eqs: Vec<SetEq> = Vec::new();
    for (p, t) in open {
        let target: BTreeSet<Term> = ac_atom_counts(id, t)?.into_keys().collect();
        let mut vars = BTreeSet::new();
        let mut frozen = BTreeSet::new();
        for atom in ac_atom_counts(id, p)?.into_keys() {
            match &atom {
                Term::Var(v) if free.contains(v) => {
                    vars.insert(v.clone());
                }
                _ => {
                    frozen.insert(atom);
                }
            }
        }
        if !frozen.is_subset(&target) {
            return Ok(MatchOutcome::NoMatch);
        }
        eqs.push(SetEq { vars, frozen, target });
    }
    let occurring: BTreeSet<String> = eqs.iter().flat_map(|e| e.vars.iter().cloned()).collect();
    let mut caps: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for v in &occurring {
        let mut inter: Option<BTreeSet<Term>> = None;
        for e in eqs.iter().filter(|e| e.vars.contains(v)) {
            inter = Some(match inter {
                None => e.target.clone(),
                Some(prev) => prev.intersection(&e.target).cloned().collect(),
            });
        }
        let cap = inter.unwrap_or_default();
        if cap.is_empty() && !with_unit {
            return Ok(MatchOutcome::NoMatch);
        }
        caps.insert(v.clone(), cap);
    }
    for e in &eqs {
        let mut covered = e.frozen.clone();
        for v in &e.vars {
            covered.extend(caps[v].iter().cloned());
        }
        if covered != e.target {
            return Ok(MatchOutcome::NoMatch);
        }
    }
    let mut bind = BTreeMap::new();
    for (v, cap) in caps {
        let atoms: Vec<Term> = cap.into_iter().collect();
        bind.insert(v, rebuild("f", atoms, if with_unit { Some("0") } else { None }));
    }
    Ok(finish(bind))
}

// ---------------------------------------------------------------------------
// Free bands

/// Matching modulo associativity plus idempotency. Images can be drawn from
/// the free band over the target letters, which is finite; past three letters
/// the band is too large to sweep, and the matcher reports `Undecided`.
fn match_band(open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    let id = TheoryId::AI;
    let mut letters: BTreeSet<Term> = BTreeSet::new();
    for (_, t) in open {
        letters.extend(t.vars().into_iter().map(Term::var));
    }
    // Band equality preserves content, so frozen pattern letters must occur
    // in the targets and image letters may not leave them.
    for (p, _) in open {
        for v in p.vars() {
            if !free.contains(&v) && !letters.contains(&Term::var(v.clone())) {
                return Ok(MatchOutcome::NoMatch);
            }
        }
    }
    if letters.len() > BAND_LETTER_CAP {
        return Ok(MatchOutcome::Undecided);
    }
    let mut reps: BTreeSet<Vec<Term>> =
        letters.iter().map(|l| free_band_canonical(&[l.clone()])).collect();
    loop {
        let mut fresh: Vec<Vec<Term>> = Vec::new();
        for a in &reps {
            for b in &reps {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                let c = free_band_canonical(&w);
                if !reps.contains(&c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        reps.extend(fresh);
    }
    let pool: Vec<Term> = reps.into_iter().map(|w| rebuild("f", w, None)).collect();
    let pools: Vec<(String, Vec<Term>)> = open
        .iter()
        .flat_map(|(p, _)| p.vars())
        .filter(|v| free.contains(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|v| (v, pool.clone()))
        .collect();
    let mut nodes = 0;
    assign_search(&id, open, &pools, &mut nodes)
}

// ---------------------------------------------------------------------------
// One unary symbol cancelling another

/// Matching where `f(g(x)) = x`. Reduced words have the shape g^a f^b, and
/// appending an image word to a reduced pattern leaves a closed form for the
/// possible exponents, so per-variable candidate sets are finite and exact.
fn match_fg(open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    let mut candidates: BTreeMap<String, BTreeSet<(usize, usize, String)>> = BTreeMap::new();
    for (p, t) in open {
        let (pword, pleaf) = fg_word(p);
        debug_assert!(free.contains(&pleaf), "frozen-leaf equations are discharged up front");
        let pw = fg_reduce(&pword);
        let c = pw.iter().take_while(|&&ch| ch == 'g').count();
        let m = pw.len() - c;
        let (tword, tleaf) = fg_word(t);
        let tw = fg_reduce(&tword);
        let e = tw.iter().take_while(|&&ch| ch == 'g').count();
        let d = tw.len() - e;
        let mut here: BTreeSet<(usize, usize, String)> = BTreeSet::new();
        if e == c {
            // g^c f^m g^a f^b with a <= m cancels down to g^c f^(m-a+b).
            for a in m.saturating_sub(d)..=m {
                here.insert((a, d + a - m, tleaf.clone()));
            }
        } else if e > c {
            // With a > m the surplus g's survive: g^(c+a-m) f^b.
            here.insert((e - c + m, d, tleaf.clone()));
        }
        match candidates.get_mut(&pleaf) {
            Some(prev) => prev.retain(|cand| here.contains(cand)),
            None => {
                candidates.insert(pleaf, here);
            }
        }
    }
    let mut bind = BTreeMap::new();
    for (v, cands) in candidates {
        match cands.into_iter().next() {
            None => return Ok(MatchOutcome::NoMatch),
            Some((a, b, leaf)) => {
                let word: Vec<char> =
                    std::iter::repeat('g').take(a).chain(std::iter::repeat('f').take(b)).collect();
                bind.insert(v, fg_build(&word, &leaf));
            }
        }
    }
    Ok(finish(bind))
}

// ---------------------------------------------------------------------------
// One commuting homomorphism over ACU

/// Matching with `f`, unit and one endomorphism `h`. Terms are polynomial
/// vectors over the target variables, images are unknown polynomials, and
/// since coefficients are naturals nothing can cancel: image degrees beyond
/// the target degree are impossible, which bounds the coefficient system.
fn match_acuh1(open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    type Poly = BTreeMap<u32, u64>;
    struct PolyEq {
        pats: BTreeMap<String, Poly>,
        rem: BTreeMap<String, Poly>,
    }
    let mut eqs: Vec<PolyEq> = Vec::new();
    for (p, t) in open {
        let mut rem = acuh1_poly(t);
        let mut pats: BTreeMap<String, Poly> = BTreeMap::new();
        for (v, poly) in acuh1_poly(p) {
            if free.contains(&v) {
                pats.insert(v, poly);
                continue;
            }
            let target = rem.entry(v).or_default();
            for (exp, c) in poly {
                match target.get_mut(&exp) {
                    Some(have) if *have >= c => {
                        *have -= c;
                        if *have == 0 {
                            target.remove(&exp);
                        }
                    }
                    _ => return Ok(MatchOutcome::NoMatch),
                }
            }
        }
        rem.retain(|_, poly| !poly.is_empty());
        eqs.push(PolyEq { pats, rem });
    }
    let occurring: BTreeSet<String> = eqs.iter().flat_map(|e| e.pats.keys().cloned()).collect();
    // Unknown coefficient j of the z-polynomial of v, degree-capped by the
    // shallowest equation the variable occurs in.
    let mut unknowns: Vec<(String, String, u32)> = Vec::new();
    for v in &occurring {
        let mut zs: Option<BTreeSet<String>> = None;
        for e in eqs.iter().filter(|e| e.pats.contains_key(v)) {
            let here: BTreeSet<String> = e.rem.keys().cloned().collect();
            zs = Some(match zs {
                None => here,
                Some(prev) => prev.intersection(&here).cloned().collect(),
            });
        }
        for z in zs.unwrap_or_default() {
            let mut dmax: Option<u32> = None;
            for e in eqs.iter().filter(|e| e.pats.contains_key(v)) {
                let top = *e.rem[&z].keys().last().unwrap();
                let low = *e.pats[v].keys().next().unwrap();
                if top < low {
                    dmax = None;
                    break;
                }
                let d = top - low;
                dmax = Some(match dmax {
                    None => d,
                    Some(prev) => prev.min(d),
                });
            }
            if let Some(dmax) = dmax {
                for j in 0..=dmax {
                    unknowns.push((v.clone(), z.clone(), j));
                }
            }
        }
    }
    if unknowns.is_empty() {
        if eqs.iter().any(|e| !e.rem.is_empty()) {
            return Ok(MatchOutcome::NoMatch);
        }
        let bind = occurring.iter().map(|v| (v.clone(), Term::constant("0"))).collect();
        return Ok(finish(bind));
    }
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    for e in &eqs {
        let mut zs: BTreeSet<&String> = e.rem.keys().collect();
        zs.extend(unknowns.iter().filter(|(v, _, _)| e.pats.contains_key(v)).map(|(_, z, _)| z));
        for z in zs {
            let mut top = e.rem.get(z).and_then(|p| p.keys().last().copied()).unwrap_or(0);
            for (v, uz, j) in &unknowns {
                if uz == z {
                    if let Some(pat) = e.pats.get(v) {
                        top = top.max(pat.keys().last().unwrap() + j);
                    }
                }
            }
            for k in 0..=top {
                let row: Vec<i64> = unknowns
                    .iter()
                    .map(|(v, uz, j)| {
                        if uz != z || *j > k {
                            return 0;
                        }
                        match e.pats.get(v).and_then(|pat| pat.get(&(k - j))) {
                            Some(&c) => c as i64,
                            None => 0,
                        }
                    })
                    .collect();
                let need = e.rem.get(z).and_then(|p| p.get(&k)).copied().unwrap_or(0);
                if row.iter().all(|&c| c == 0) {
                    if need > 0 {
                        return Ok(MatchOutcome::NoMatch);
                    }
                    continue;
                }
                rows.push(row);
                rhs.push(need as i64);
            }
        }
    }
    let system = DioSystem {
        unknowns: (0..unknowns.len()).map(|i| format!("q{i}")).collect(),
        rows,
        rhs,
    };
    let (particular, _) = min_solutions_inhomogeneous(&system)?;
    match particular.first() {
        None => Ok(MatchOutcome::NoMatch),
        Some(sol) => {
            let mut images: BTreeMap<String, BTreeMap<String, Poly>> = BTreeMap::new();
            for ((v, z, j), c) in unknowns.iter().zip(sol) {
                let c = u64::try_from(c).map_err(|_| Error::Internal("oversized coefficient".into()))?;
                if c > 0 {
                    *images
                        .entry(v.clone())
                        .or_default()
                        .entry(z.clone())
                        .or_default()
                        .entry(*j)
                        .or_insert(0) += c;
                }
            }
            let mut bind = BTreeMap::new();
            for v in &occurring {
                let poly = images.remove(v).unwrap_or_default();
                bind.insert(v.clone(), acuh1_canonical(&poly));
            }
            Ok(finish(bind))
        }
    }
}

// ---------------------------------------------------------------------------
// Value restrictions: ACUI plus non-commuting homomorphisms

/// Matching in the language view: each variable's image is a finite set of
/// role words per target variable. The largest safe image is the set of words
/// that complete every pattern occurrence into the target language, and since
/// unions only grow with the images, those maximal images decide the problem.
fn match_fl0(open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    type Lang = BTreeSet<Vec<String>>;
    struct LangEq {
        pats: BTreeMap<String, Lang>,
        frozen: BTreeMap<String, Lang>,
        tgt: BTreeMap<String, Lang>,
    }
    let mut eqs: Vec<LangEq> = Vec::new();
    for (p, t) in open {
        let tgt = fl0_langs(t);
        let mut pats: BTreeMap<String, Lang> = BTreeMap::new();
        let mut frozen: BTreeMap<String, Lang> = BTreeMap::new();
        for (v, words) in fl0_langs(p) {
            if free.contains(&v) {
                pats.insert(v, words);
            } else {
                match tgt.get(&v) {
                    Some(have) if words.is_subset(have) => {
                        frozen.insert(v, words);
                    }
                    _ => return Ok(MatchOutcome::NoMatch),
                }
            }
        }
        eqs.push(LangEq { pats, frozen, tgt });
    }
    let occurring: BTreeSet<String> = eqs.iter().flat_map(|e| e.pats.keys().cloned()).collect();
    let zs: BTreeSet<String> = eqs.iter().flat_map(|e| e.tgt.keys().cloned()).collect();
    let mut caps: BTreeMap<String, BTreeMap<String, Lang>> = BTreeMap::new();
    for v in &occurring {
        let mut per_z: BTreeMap<String, Lang> = BTreeMap::new();
        for z in &zs {
            let mut cap: Option<Lang> = None;
            for e in eqs.iter().filter(|e| e.pats.contains_key(v)) {
                let empty = Lang::new();
                let tz = e.tgt.get(z).unwrap_or(&empty);
                for w in &e.pats[v] {
                    let safe: Lang = tz
                        .iter()
                        .filter(|tw| tw.starts_with(w))
                        .map(|tw| tw[w.len()..].to_vec())
                        .collect();
                    cap = Some(match cap {
                        None => safe,
                        Some(prev) => prev.intersection(&safe).cloned().collect(),
                    });
                }
            }
            let cap = cap.unwrap_or_default();
            if !cap.is_empty() {
                per_z.insert(z.clone(), cap);
            }
        }
        caps.insert(v.clone(), per_z);
    }
    for e in &eqs {
        for z in e.tgt.keys().chain(e.frozen.keys()) {
            let mut covered: Lang = e.frozen.get(z).cloned().unwrap_or_default();
            for (v, words) in &e.pats {
                if let Some(image) = caps[v].get(z) {
                    for w in words {
                        for u in image {
                            let mut wu = w.clone();
                            wu.extend(u.iter().cloned());
                            covered.insert(wu);
                        }
                    }
                }
            }
            if &covered != e.tgt.get(z).unwrap_or(&Lang::new()) {
                return Ok(MatchOutcome::NoMatch);
            }
        }
    }
    let mut bind = BTreeMap::new();
    for (v, per_z) in caps {
        bind.insert(v, fl0_canonical(&per_z));
    }
    Ok(finish(bind))
}

// ---------------------------------------------------------------------------
// Description-logic conjunctions

/// Matching for concept terms. A matcher, when one exists, can be chosen
/// among conjunctions of target subdescriptions, so candidates are reduced
/// concepts over the target's atoms with the target's role depth; the pool is
/// enumerated exhaustively up to a candidate cap.
fn match_el(id: &TheoryId, open: &[(Term, Term)], free: &BTreeSet<String>) -> Result<MatchOutcome> {
    let mut atoms: BTreeSet<Term> = BTreeSet::new();
    let mut rd_max = 0usize;
    for (_, t) in open {
        atoms.extend(t.vars().into_iter().map(Term::var));
        rd_max = rd_max.max(role_depth(id, t));
    }
    for (p, _) in open {
        for v in p.vars() {
            if !free.contains(&v) && !atoms.contains(&Term::var(v.clone())) {
                return Ok(MatchOutcome::NoMatch);
            }
        }
    }
    let roles = id.hom_symbols();
    let mut pool: BTreeSet<Term> = BTreeSet::new();
    for level in 0..=rd_max {
        let mut candidates: Vec<Term> = atoms.iter().cloned().collect();
        if level > 0 {
            for role in &roles {
                for c in &pool {
                    candidates.push(Term::App(role.clone(), vec![c.clone()]));
                }
            }
        }
        if candidates.len() > EL_CANDIDATE_CAP {
            return Ok(MatchOutcome::Undecided);
        }
        let mut next = BTreeSet::new();
        for mask in 0u32..(1 << candidates.len()) {
            let picked: Vec<Term> = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            next.insert(normal_form(id, &rebuild("and", picked, Some("top")))?);
        }
        pool = next;
    }
    let pool: Vec<Term> = pool.into_iter().collect();
    let pools: Vec<(String, Vec<Term>)> = open
        .iter()
        .flat_map(|(p, _)| p.vars())
        .filter(|v| free.contains(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|v| (v, pool.clone()))
        .collect();
    let mut nodes = 0;
    assign_search(id, open, &pools, &mut nodes)
}

// ---------------------------------------------------------------------------
// Brute force

/// Oracle matcher: sweep all substitutions whose images are terms over the
/// target variables up to `size_cap` symbols. A `NoMatch` verdict only means
/// no witness exists within that size bound.
pub fn brute_force_matcher(
    id: &TheoryId,
    problem: &MatchProblem,
    size_cap: usize,
) -> Result<MatchOutcome> {
    let free = problem.free_vars();
    let mut open: Vec<(Term, Term)> = Vec::new();
    for (p, t) in &problem.equations {
        if p.vars().iter().all(|v| !free.contains(v)) {
            if !eq_modulo(id, p, t)? {
                return Ok(MatchOutcome::NoMatch);
            }
        } else {
            open.push((p.clone(), t.clone()));
        }
    }
    if open.is_empty() {
        return Ok(MatchOutcome::Witness(Substitution::identity()));
    }
    let mut vars: BTreeSet<String> = BTreeSet::new();
    for (p, t) in &open {
        vars.extend(t.vars());
        vars.extend(p.vars().into_iter().filter(|v| !free.contains(v)));
    }
    let pool = all_terms(id, &vars, size_cap)?;
    let pools: Vec<(String, Vec<Term>)> = open
        .iter()
        .flat_map(|(p, _)| p.vars())
        .filter(|v| free.contains(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|v| (v, pool.clone()))
        .collect();
    let mut nodes = 0;
    match assign_search(id, &open, &pools, &mut nodes) {
        Err(Error::Budget(_)) => Ok(MatchOutcome::Undecided),
        other => other,
    }
}

/// All terms over the theory's signature and the given variables with at most
/// `size_cap` symbols, smallest first.
fn all_terms(id: &TheoryId, vars: &BTreeSet<String>, size_cap: usize) -> Result<Vec<Term>> {
    let sig = theory_info(id).signature;
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); size_cap + 1];
    if size_cap == 0 {
        return Err(Error::Invalid("size cap must be positive".into()));
    }
    by_size[1] = vars.iter().map(Term::var).collect();
    for sym in sig.symbols() {
        if sym.arity == 0 {
            by_size[1].push(Term::constant(sym.name.clone()));
        }
    }
    let mut total = by_size[1].len();
    for size in 2..=size_cap {
        let mut here = Vec::new();
        for sym in sig.symbols() {
            match sym.arity {
                0 => {}
                1 => here.extend(
                    by_size[size - 1].iter().map(|a| Term::App(sym.name.clone(), vec![a.clone()])),
                ),
                2 => {
                    for left in 1..size - 1 {
                        for a in &by_size[left] {
                            for b in &by_size[size - 1 - left] {
                                here.push(Term::App(sym.name.clone(), vec![a.clone(), b.clone()]));
                            }
                        }
                    }
                }
                n => return Err(Error::Internal(format!("unexpected arity {n} in {id}"))),
            }
        }
        total += here.len();
        if total > BRUTE_POOL_CAP {
            return Err(Error::Budget("brute-force term pool exceeded the cap".into()));
        }
        by_size[size] = here;
    }
    Ok(by_size.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;
    use crate::theory::theory_info;

    fn t(id: &TheoryId, s: &str) -> Term {
        parse_term(s, &theory_info(id).signature).unwrap()
    }

    fn solve(id: &TheoryId, pairs: &[(&str, &str)]) -> MatchOutcome {
        let equations = pairs.iter().map(|(p, g)| (t(id, p), t(id, g))).collect();
        match_modulo(id, &MatchProblem::new(equations)).unwrap()
    }

    fn solve_frozen(id: &TheoryId, pairs: &[(&str, &str)], frozen: &[&str]) -> MatchOutcome {
        let equations = pairs.iter().map(|(p, g)| (t(id, p), t(id, g))).collect();
        let frozen = frozen.iter().map(|v| v.to_string()).collect();
        match_modulo(id, &MatchProblem::new(equations).with_identity_constrained(frozen)).unwrap()
    }

    #[test]
    fn syntactic_matching() {
        let id = TheoryId::Empty;
        let got = solve(&id, &[("f(x,g(y))", "f(g(z),g(g(z)))")]);
        let w = got.witness().unwrap();
        assert_eq!(w.image_of("x"), t(&id, "g(z)"));
        assert_eq!(w.image_of("y"), t(&id, "g(z)"));
        assert_eq!(solve(&id, &[("f(x,x)", "f(g(z),z)")]), MatchOutcome::NoMatch);
        assert_eq!(
            solve_frozen(&id, &[("f(x,y)", "f(g(z),z)")], &["y"]),
            MatchOutcome::NoMatch
        );
        assert!(solve_frozen(&id, &[("f(x,y)", "f(g(y),y)")], &["y"]).witness().is_some());
    }

    #[test]
    fn commutative_matching_flips_arguments() {
        let id = TheoryId::C;
        assert!(solve(&id, &[("f(x,y)", "f(u,v)"), ("f(y,x)", "f(v,u)")]).witness().is_some());
        // x must be both u and v at once.
        assert_eq!(
            solve(&id, &[("f(x,x)", "f(u,v)")]),
            MatchOutcome::NoMatch
        );
        assert!(solve_frozen(&id, &[("f(x,u)", "f(u,v)")], &["u"]).witness().is_some());
    }

    #[test]
    fn associative_matching_splits_words() {
        let id = TheoryId::A;
        let got = solve(&id, &[("f(x,y)", "f(u,f(v,w))")]);
        assert!(got.witness().is_some());
        assert_eq!(solve(&id, &[("f(x,x)", "f(u,f(v,w))")]), MatchOutcome::NoMatch);
        assert!(solve(&id, &[("f(x,x)", "f(u,f(v,f(u,v)))")]).witness().is_some());
    }

    #[test]
    fn ac_matching_distributes_counts() {
        let id = TheoryId::AC;
        let got = solve(&id, &[("f(x,x)", "f(u,f(u,f(v,v)))")]);
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "f(u,v)"));
        assert_eq!(solve(&id, &[("f(x,x)", "f(u,f(u,u))")]), MatchOutcome::NoMatch);
        // Both variables need something; only three atoms are available for
        // two copies of x plus one y.
        assert!(solve(&id, &[("f(x,f(x,y))", "f(u,f(u,v))")]).witness().is_some());
        assert_eq!(solve(&id, &[("f(x,f(x,y))", "f(u,f(v,w))")]), MatchOutcome::NoMatch);
    }

    #[test]
    fn acu_matching_can_erase_variables() {
        let id = TheoryId::ACU;
        assert_eq!(solve(&id, &[("f(x,x)", "f(u,f(u,u))")]), MatchOutcome::NoMatch);
        let got = solve(&id, &[("f(x,y)", "u")]);
        assert!(got.witness().is_some());
        let got = solve(&id, &[("f(x,x)", "0")]);
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "0"));
    }

    #[test]
    fn set_matching_uses_maximal_images() {
        let id = TheoryId::ACUI;
        let got = solve(&id, &[("f(x,y)", "f(u,f(v,w))")]);
        // Maximal images: both variables swallow the whole target set.
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "f(u,f(v,w))"));
        assert_eq!(
            solve_frozen(&id, &[("f(x,u)", "f(v,w)")], &["u"]),
            MatchOutcome::NoMatch
        );
        // Same target twice with disjoint second targets: the cap of x is
        // empty, which only the unit theory tolerates.
        let pairs = [("f(x,u)", "f(u,v)"), ("f(x,w)", "f(w,f(u,v))")];
        assert!(solve_frozen(&id, &pairs, &["u", "w"]).witness().is_some());
        let aci = TheoryId::ACI;
        let pairs = [("f(x,u)", "u"), ("f(x,v)", "v")];
        assert_eq!(solve_frozen(&aci, &pairs, &["u", "v"]), MatchOutcome::NoMatch);
        assert!(solve_frozen(&TheoryId::ACUI, &pairs, &["u", "v"]).witness().is_some());
    }

    #[test]
    fn idempotent_matching_collapses() {
        let id = TheoryId::I;
        let got = solve(&id, &[("f(x,y)", "z")]);
        let w = got.witness().unwrap();
        assert_eq!(w.image_of("x"), t(&id, "z"));
        assert_eq!(w.image_of("y"), t(&id, "z"));
        assert!(solve(&id, &[("f(x,x)", "f(u,v)")]).witness().is_some());
        assert_eq!(
            solve_frozen(&id, &[("f(w,x)", "f(u,v)")], &["w"]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn band_matching_over_two_letters() {
        let id = TheoryId::AI;
        let got = solve(&id, &[("x", "f(u,f(v,u))")]);
        assert!(got.witness().is_some());
        let got = solve(&id, &[("f(x,y)", "f(u,v)")]);
        assert!(got.witness().is_some());
        // Content must match: w is not a target letter.
        assert_eq!(
            solve_frozen(&id, &[("f(w,x)", "f(u,v)")], &["w"]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn fg_matching_word_arithmetic() {
        let id = TheoryId::FG;
        let got = solve(&id, &[("f(x)", "g(g(f(y)))")]);
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "g(g(g(f(y))))"));
        // Intersecting two equations pins the image down.
        let got = solve(&id, &[("f(x)", "f(f(f(y)))"), ("g(x)", "g(f(f(y)))")]);
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "f(f(y))"));
        assert_eq!(solve(&id, &[("g(x)", "f(y)")]), MatchOutcome::NoMatch);
        // The pattern's leading g can never be cancelled from below.
        assert_eq!(solve(&id, &[("g(g(x))", "g(y)")]), MatchOutcome::NoMatch);
    }

    #[test]
    fn acuh_matching_solves_coefficients() {
        let id = TheoryId::ACUh { k: 1 };
        // Several witnesses exist (y can absorb everything while x goes to the
        // unit); any returned one has been validated by the matcher.
        let got = solve(&id, &[("f(h(x),y)", "f(h(h(z)),z)")]);
        assert!(got.witness().is_some());
        assert_eq!(solve(&id, &[("h(x)", "z")]), MatchOutcome::NoMatch);
        assert!(solve(&id, &[("f(x,x)", "f(z,z)")]).witness().is_some());
        assert_eq!(solve(&id, &[("f(x,x)", "f(z,f(z,z))")]), MatchOutcome::NoMatch);
        let k2 = TheoryId::ACUh { k: 2 };
        let problem = MatchProblem::new(vec![(t(&k2, "x"), t(&k2, "0"))]);
        assert!(matches!(match_modulo(&k2, &problem), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn fl0_matching_completes_languages() {
        let id = TheoryId::FL0 { k: 1 };
        let got = solve(&id, &[("r(x)", "r(r(z))")]);
        assert_eq!(got.witness().unwrap().image_of("x"), t(&id, "r(z)"));
        assert_eq!(solve(&id, &[("r(x)", "f(z,r(z))")]), MatchOutcome::NoMatch);
        let got = solve(&id, &[("f(x,r(y))", "f(z,r(z))")]);
        assert!(got.witness().is_some());
    }

    #[test]
    fn el_matching_over_concepts() {
        let id = TheoryId::EL { roles: vec!["r".into()] };
        let got = solve_frozen(&id, &[("and(x,some_r(y))", "and(a,some_r(a))")], &["a"]);
        assert!(got.witness().is_some());
        assert_eq!(
            solve_frozen(&id, &[("some_r(x)", "a")], &["a"]),
            MatchOutcome::NoMatch
        );
        // top is an admissible image.
        let got = solve_frozen(&id, &[("and(x,a)", "a")], &["a"]);
        assert!(got.witness().is_some());
    }

    #[test]
    fn brute_force_agrees_on_small_cases() {
        let cases: Vec<(TheoryId, Vec<(&str, &str)>)> = vec![
            (TheoryId::Empty, vec![("f(x,y)", "f(g(z),z)")]),
            (TheoryId::C, vec![("f(x,x)", "f(u,v)")]),
            (TheoryId::C, vec![("f(x,y)", "f(u,v)")]),
            (TheoryId::A, vec![("f(x,x)", "f(u,f(v,w))")]),
            (TheoryId::AC, vec![("f(x,x)", "f(u,f(u,f(v,v)))")]),
            (TheoryId::ACU, vec![("f(x,x)", "f(u,f(u,u))")]),
            (TheoryId::ACUI, vec![("f(x,y)", "f(u,v)")]),
            (TheoryId::I, vec![("f(x,y)", "z")]),
            (TheoryId::FG, vec![("f(x)", "g(f(y))")]),
        ];
        for (id, pairs) in cases {
            let equations = pairs.iter().map(|(p, g)| (t(&id, p), t(&id, g))).collect();
            let problem = MatchProblem::new(equations);
            let fast = match_modulo(&id, &problem).unwrap();
            let slow = brute_force_matcher(&id, &problem, 7).unwrap();
            assert_eq!(
                fast.witness().is_some(),
                slow.witness().is_some(),
                "disagreement for {id} on {pairs:?}"
            );
        }
    }
}
