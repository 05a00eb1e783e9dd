//! Semiring scalars and restrictive preorders.
//!
//! Vectors over these scalars represent terms of the monoidal theories:
//! naturals count occurrences under ACU, languages over the empty alphabet
//! record presence under ACUI, word languages track role paths under FL0,
//! and polynomials track homomorphism towers under ACUh. The integer
//! semiring carries no restrictive preorder and exists to host refutation
//! candidates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Word pools larger than this make the below-set lattice (2^pool languages)
/// unmaterializable.
const BELOW_WORD_POOL_CAP: usize = 17;
/// Ceiling on materialized polynomial below-sets.
const BELOW_POLY_CAP: usize = 500_000;
/// Ceiling on exhaustive polynomial windows.
const POLY_WINDOW_CAP: usize = 1_000_000;

/// Carrier family together with the data its elements range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemiringKind {
    /// Naturals with addition and multiplication.
    Nat,
    /// Integers with addition and multiplication. Hosts refutation
    /// candidates only; no restrictive preorder exists here.
    Int,
    /// Finite languages over `alphabet`: union as sum, elementwise
    /// concatenation as product, the empty language as zero, `{eps}` as one.
    WordSets { alphabet: Vec<String> },
    /// Polynomials in `indeterminates` variables with natural coefficients.
    NatPoly { indeterminates: usize },
}

/// One scalar. Languages are canonical as ordered word sets; polynomials
/// are canonical as exponent-vector maps that never store zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemiringValue {
    Nat(u64),
    Int(i64),
    Words(BTreeSet<Vec<String>>),
    Poly(BTreeMap<Vec<u32>, u64>),
}

fn nat_add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or_else(|| Error::Budget("natural overflow in semiring addition".into()))
}

fn nat_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or_else(|| Error::Budget("natural overflow in semiring product".into()))
}

impl SemiringKind {
    pub fn name(&self) -> &'static str {
        match self {
            SemiringKind::Nat => "naturals",
            SemiringKind::Int => "integers",
            SemiringKind::WordSets { .. } => "word languages",
            SemiringKind::NatPoly { .. } => "polynomials",
        }
    }

    /// Validates that `v` is an element of this semiring: matching carrier,
    /// letters drawn from the alphabet, exponent vectors of the right width,
    /// no stored zero coefficients.
    pub fn check(&self, v: &SemiringValue) -> Result<()> {
        match (self, v) {
            (SemiringKind::Nat, SemiringValue::Nat(_)) => Ok(()),
            (SemiringKind::Int, SemiringValue::Int(_)) => Ok(()),
            (SemiringKind::WordSets { alphabet }, SemiringValue::Words(ws)) => {
                for w in ws {
                    for letter in w {
                        if !alphabet.contains(letter) {
                            return Err(Error::Invalid(format!(
                                "letter {letter} is outside the alphabet {{{}}}",
                                alphabet.join(", ")
                            )));
                        }
                    }
                }
                Ok(())
            }
            (SemiringKind::NatPoly { indeterminates }, SemiringValue::Poly(p)) => {
                for (exps, c) in p {
                    if exps.len() != *indeterminates {
                        return Err(Error::Dimension(format!(
                            "monomial over {} indeterminates in a {}-indeterminate polynomial",
                            exps.len(),
                            indeterminates
                        )));
                    }
                    if *c == 0 {
                        return Err(Error::Invalid("stored zero coefficient".into()));
                    }
                }
                Ok(())
            }
            _ => Err(Error::Invalid(format!("value {v} does not belong to the {}", self.name()))),
        }
    }

    pub fn zero(&self) -> SemiringValue {
        match self {
            SemiringKind::Nat => SemiringValue::Nat(0),
            SemiringKind::Int => SemiringValue::Int(0),
            SemiringKind::WordSets { .. } => SemiringValue::Words(BTreeSet::new()),
            SemiringKind::NatPoly { .. } => SemiringValue::Poly(BTreeMap::new()),
        }
    }

    pub fn one(&self) -> SemiringValue {
        match self {
            SemiringKind::Nat => SemiringValue::Nat(1),
            SemiringKind::Int => SemiringValue::Int(1),
            SemiringKind::WordSets { .. } => {
                SemiringValue::Words([Vec::new()].into_iter().collect())
            }
            SemiringKind::NatPoly { indeterminates } => {
                SemiringValue::Poly([(vec![0; *indeterminates], 1)].into_iter().collect())
            }
        }
    }

    pub fn is_zero(&self, v: &SemiringValue) -> Result<bool> {
        self.check(v)?;
        Ok(*v == self.zero())
    }

    pub fn add(&self, a: &SemiringValue, b: &SemiringValue) -> Result<SemiringValue> {
        self.check(a)?;
        self.check(b)?;
        match (a, b) {
            (SemiringValue::Nat(x), SemiringValue::Nat(y)) => Ok(SemiringValue::Nat(nat_add(*x, *y)?)),
            (SemiringValue::Int(x), SemiringValue::Int(y)) => Ok(SemiringValue::Int(
                x.checked_add(*y)
                    .ok_or_else(|| Error::Budget("integer overflow in semiring addition".into()))?,
            )),
            (SemiringValue::Words(x), SemiringValue::Words(y)) => {
                Ok(SemiringValue::Words(x.union(y).cloned().collect()))
            }
            (SemiringValue::Poly(x), SemiringValue::Poly(y)) => {
                let mut out = x.clone();
                for (e, c) in y {
                    let slot = out.entry(e.clone()).or_insert(0);
                    *slot = nat_add(*slot, *c)?;
                }
                Ok(SemiringValue::Poly(out))
            }
            _ => Err(Error::Internal("semiring carriers diverged after check".into())),
        }
    }

    pub fn mul(&self, a: &SemiringValue, b: &SemiringValue) -> Result<SemiringValue> {
        self.check(a)?;
        self.check(b)?;
        match (a, b) {
            (SemiringValue::Nat(x), SemiringValue::Nat(y)) => Ok(SemiringValue::Nat(nat_mul(*x, *y)?)),
            (SemiringValue::Int(x), SemiringValue::Int(y)) => Ok(SemiringValue::Int(
                x.checked_mul(*y)
                    .ok_or_else(|| Error::Budget("integer overflow in semiring product".into()))?,
            )),
            (SemiringValue::Words(x), SemiringValue::Words(y)) => {
                let mut out = BTreeSet::new();
                for v in x {
                    for w in y {
                        out.insert(v.iter().chain(w.iter()).cloned().collect());
                    }
                }
                Ok(SemiringValue::Words(out))
            }
            (SemiringValue::Poly(x), SemiringValue::Poly(y)) => {
                let mut out: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for (e1, c1) in x {
                    for (e2, c2) in y {
                        let e: Vec<u32> = e1
                            .iter()
                            .zip(e2.iter())
                            .map(|(p, q)| {
                                p.checked_add(*q).ok_or_else(|| {
                                    Error::Budget("exponent overflow in polynomial product".into())
                                })
                            })
                            .collect::<Result<_>>()?;
                        let c = nat_mul(*c1, *c2)?;
                        let slot = out.entry(e).or_insert(0);
                        *slot = nat_add(*slot, c)?;
                    }
                }
                Ok(SemiringValue::Poly(out))
            }
            _ => Err(Error::Internal("semiring carriers diverged after check".into())),
        }
    }
}

impl fmt::Display for SemiringValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiringValue::Nat(n) => write!(f, "{n}"),
            SemiringValue::Int(i) => write!(f, "{i}"),
            SemiringValue::Words(ws) => {
                if ws.is_empty() {
                    return write!(f, "∅");
                }
                let words: Vec<String> = ws
                    .iter()
                    .map(|w| if w.is_empty() { "ε".to_string() } else { w.join("·") })
                    .collect();
                write!(f, "{{{}}}", words.join(", "))
            }
            SemiringValue::Poly(p) => {
                if p.is_empty() {
                    return write!(f, "0");
                }
                let monomials: Vec<String> = p
                    .iter()
                    .map(|(exps, &c)| {
                        let mut parts = Vec::new();
                        if c != 1 || exps.iter().all(|&e| e == 0) {
                            parts.push(c.to_string());
                        }
                        for (i, &e) in exps.iter().enumerate() {
                            if e == 0 {
                                continue;
                            }
                            let name = if exps.len() == 1 {
                                "X".to_string()
                            } else {
                                format!("X{}", i + 1)
                            };
                            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
                        }
                        parts.join("·")
                    })
                    .collect();
                write!(f, "{}", monomials.join(" + "))
            }
        }
    }
}

/// Total preorder under which strictness survives both multiplication by a
/// nonzero factor and addition, and every element has a finite below-set.
/// All three live orders factor through a numeric measure.
#[derive(Debug, Clone)]
pub struct RestrictivePreorder {
    kind: SemiringKind,
}

/// The preorder carried by a semiring: the usual order on naturals, longest
/// word on languages, max coefficient plus max exponent on polynomials.
/// Refused for the integers, where subtracting any strict pair collapses
/// every candidate.
pub fn restrictive_preorder(kind: &SemiringKind) -> Result<RestrictivePreorder> {
    match kind {
        SemiringKind::Int => Err(Error::unsupported(
            "int",
            "restrictive preorder; additive inverses collapse any candidate",
        )),
        _ => Ok(RestrictivePreorder { kind: kind.clone() }),
    }
}

impl RestrictivePreorder {
    pub fn kind(&self) -> &SemiringKind {
        &self.kind
    }

    /// The numeric rank the order compares by.
    pub fn measure(&self, a: &SemiringValue) -> Result<u64> {
        self.kind.check(a)?;
        match a {
            SemiringValue::Nat(n) => Ok(*n),
            SemiringValue::Words(ws) => Ok(ws.iter().map(|w| w.len() as u64).max().unwrap_or(0)),
            SemiringValue::Poly(p) => {
                let c = p.values().copied().max().unwrap_or(0);
                let e = p.keys().flat_map(|exps| exps.iter().copied()).max().unwrap_or(0);
                nat_add(c, e as u64)
            }
            SemiringValue::Int(_) => {
                Err(Error::Internal("integer value under a restrictive preorder".into()))
            }
        }
    }

    pub fn leq(&self, a: &SemiringValue, b: &SemiringValue) -> Result<bool> {
        Ok(self.measure(a)? <= self.measure(b)?)
    }

    pub fn strict(&self, a: &SemiringValue, b: &SemiringValue) -> Result<bool> {
        Ok(self.measure(a)? < self.measure(b)?)
    }

    /// Everything weakly below `a`, materialized. Finite by construction;
    /// refuses with `Budget` when the set would be astronomically large.
    pub fn below(&self, a: &SemiringValue) -> Result<Vec<SemiringValue>> {
        let m = self.measure(a)?;
        match &self.kind {
            SemiringKind::Nat => Ok((0..=m).map(SemiringValue::Nat).collect()),
            SemiringKind::WordSets { alphabet } => {
                let pool = words_up_to(alphabet, m as usize);
                if pool.len() > BELOW_WORD_POOL_CAP {
                    return Err(Error::Budget(format!(
                        "below-set over {} words would hold 2^{} languages",
                        pool.len(),
                        pool.len()
                    )));
                }
                let mut out = Vec::with_capacity(1 << pool.len());
                for mask in 0u32..(1u32 << pool.len()) {
                    let lang: BTreeSet<Vec<String>> = pool
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, w)| w.clone())
                        .collect();
                    out.push(SemiringValue::Words(lang));
                }
                Ok(out)
            }
            SemiringKind::NatPoly { indeterminates } => poly_below(*indeterminates, m),
            SemiringKind::Int => {
                Err(Error::Internal("integer value under a restrictive preorder".into()))
            }
        }
    }
}

/// All polynomials whose measure stays within `bound`. A used monomial needs
/// coefficient at least one, so its exponents stay below the bound; the walk
/// tracks the running max coefficient and exponent and prunes on their sum.
fn poly_below(k: usize, bound: u64) -> Result<Vec<SemiringValue>> {
    if bound > 8 {
        return Err(Error::Budget(format!("polynomial below-set at measure {bound}")));
    }
    if bound == 0 {
        return Ok(vec![SemiringValue::Poly(BTreeMap::new())]);
    }
    let mut slots: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &slots {
            for e in 0..bound as u32 {
                let mut t = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        slots = next;
    }
    fn walk(
        idx: usize,
        max_c: u64,
        max_e: u64,
        slots: &[Vec<u32>],
        bound: u64,
        current: &mut Vec<(Vec<u32>, u64)>,
        out: &mut Vec<SemiringValue>,
    ) -> Result<()> {
        if out.len() >= BELOW_POLY_CAP {
            return Err(Error::Budget(format!("polynomial below-set beyond {BELOW_POLY_CAP}")));
        }
        if idx == slots.len() {
            out.push(SemiringValue::Poly(current.iter().cloned().collect()));
            return Ok(());
        }
        walk(idx + 1, max_c, max_e, slots, bound, current, out)?;
        let slot_e = slots[idx].iter().copied().max().unwrap_or(0) as u64;
        let e2 = max_e.max(slot_e);
        let mut c = 1u64;
        while c.max(max_c) + e2 <= bound {
            current.push((slots[idx].clone(), c));
            walk(idx + 1, max_c.max(c), e2, slots, bound, current, out)?;
            current.pop();
            c += 1;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(0, 0, 0, &slots, bound, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// One verified sample window for a restrictive preorder.
#[derive(Debug, Clone)]
pub struct WindowReport {
    pub sample_size: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub below_sets_checked: usize,
    pub violations: Vec<String>,
}

/// Exercises the preorder on every pair and triple from `sample`: totality
/// and agreement with the measure, transitivity, strictness under products
/// with nonzero factors and under sums, and below-set soundness plus
/// completeness against the sample. A sound order reports no violations.
pub fn check_restrictive_window(
    pre: &RestrictivePreorder,
    sample: &[SemiringValue],
) -> Result<WindowReport> {
    let kind = pre.kind().clone();
    let n = sample.len();
    let mut violations = Vec::new();
    let ranks: Vec<u64> = sample.iter().map(|a| pre.measure(a)).collect::<Result<_>>()?;

    let mut pairs_checked = 0usize;
    for i in 0..n {
        for j in 0..n {
            pairs_checked += 1;
            let le = pre.leq(&sample[i], &sample[j])?;
            let ge = pre.leq(&sample[j], &sample[i])?;
            if !le && !ge {
                violations.push(format!("not total at {} and {}", sample[i], sample[j]));
            }
            if le != (ranks[i] <= ranks[j]) {
                violations.push(format!("order disagrees with measure at {} and {}", sample[i], sample[j]));
            }
        }
    }

    let mut triples_checked = 0usize;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                triples_checked += 1;
                if ranks[i] <= ranks[j] && ranks[j] <= ranks[k] && ranks[i] > ranks[k] {
                    violations.push(format!(
                        "not transitive at {}, {}, {}",
                        sample[i], sample[j], sample[k]
                    ));
                }
            }
            if ranks[i] >= ranks[j] {
                continue;
            }
            // Strict pair: products with nonzero factors and sums must both
            // preserve strictness.
            for c in sample {
                if !kind.is_zero(c)? {
                    let prod = kind.mul(&sample[j], c)?;
                    if pre.measure(&prod)? <= ranks[i] {
                        violations.push(format!(
                            "product breaks strictness at {} < {} times {}",
                            sample[i], sample[j], c
                        ));
                    }
                }
                let sum = kind.add(&sample[j], c)?;
                if pre.measure(&sum)? <= ranks[i] {
                    violations.push(format!(
                        "sum breaks strictness at {} < {} plus {}",
                        sample[i], sample[j], c
                    ));
                }
            }
        }
    }

    let mut below_sets_checked = 0usize;
    for (i, a) in sample.iter().enumerate() {
        let below = pre.below(a)?;
        below_sets_checked += 1;
        let members: BTreeSet<SemiringValue> = below.iter().cloned().collect();
        if members.len() != below.len() {
            violations.push(format!("below-set of {a} repeats elements"));
        }
        for b in &below {
            if !pre.leq(b, a)? {
                violations.push(format!("below-set of {a} holds {b}, which is not below it"));
            }
        }
        for (j, b) in sample.iter().enumerate() {
            if ranks[j] <= ranks[i] && !members.contains(b) {
                violations.push(format!("below-set of {a} misses {b}"));
            }
        }
    }

    Ok(WindowReport {
        sample_size: n,
        pairs_checked,
        triples_checked,
        below_sets_checked,
        violations,
    })
}

/// Why a candidate order fails the restrictive conditions, with concrete
/// witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateViolation {
    /// Neither direction holds between `a` and `b`.
    NotTotal { a: SemiringValue, b: SemiringValue },
    /// `a` is strictly below `b` yet not strictly below `b` times a
    /// nonzero `c`.
    Condition1 { a: SemiringValue, b: SemiringValue, c: SemiringValue },
    /// `a` is strictly below `b` yet not strictly below `b` plus `c`.
    Condition2 { a: SemiringValue, b: SemiringValue, c: SemiringValue },
    /// More window elements sit below `a` than the claimed finiteness bound.
    Condition3 { a: SemiringValue, below_in_window: usize, bound: usize },
}

impl fmt::Display for CandidateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateViolation::NotTotal { a, b } => {
                write!(f, "not total: {a} and {b} are incomparable")
            }
            CandidateViolation::Condition1 { a, b, c } => {
                write!(f, "condition 1 fails: {a} < {b} but not {a} < {b}·{c}")
            }
            CandidateViolation::Condition2 { a, b, c } => {
                write!(f, "condition 2 fails: {a} < {b} but not {a} < {b}+{c}")
            }
            CandidateViolation::Condition3 { a, below_in_window, bound } => {
                write!(
                    f,
                    "condition 3 fails: {below_in_window} window elements below {a}, bound {bound}"
                )
            }
        }
    }
}

/// Scans a window for the first witness that `candidate` breaks one of the
/// restrictive conditions: totality over pairs; then, when a finiteness
/// bound is claimed, the window population below each point against that
/// bound; then strictness under products and sums over triples, products
/// first. `None` means the window shows no violation.
pub fn refute_restrictive_candidate(
    kind: &SemiringKind,
    candidate: &dyn Fn(&SemiringValue, &SemiringValue) -> bool,
    window: &[SemiringValue],
    below_bound: Option<usize>,
) -> Result<Option<CandidateViolation>> {
    for v in window {
        kind.check(v)?;
    }
    for a in window {
        for b in window {
            if !candidate(a, b) && !candidate(b, a) {
                return Ok(Some(CandidateViolation::NotTotal { a: a.clone(), b: b.clone() }));
            }
        }
    }
    if let Some(bound) = below_bound {
        for a in window {
            let below_in_window = window.iter().filter(|b| candidate(b, a)).count();
            if below_in_window > bound {
                return Ok(Some(CandidateViolation::Condition3 {
                    a: a.clone(),
                    below_in_window,
                    bound,
                }));
            }
        }
    }
    for a in window {
        for b in window {
            if !(candidate(a, b) && !candidate(b, a)) {
                continue;
            }
            for c in window {
                if let Some(v) = check_candidate_triple(kind, candidate, a, b, c)? {
                    return Ok(Some(v));
                }
            }
        }
    }
    Ok(None)
}

/// Checks the two strictness conditions at one concrete triple, products
/// first. `None` means the triple is clean (including when `a` is not
/// strictly below `b`, where the conditions say nothing).
pub fn check_candidate_triple(
    kind: &SemiringKind,
    candidate: &dyn Fn(&SemiringValue, &SemiringValue) -> bool,
    a: &SemiringValue,
    b: &SemiringValue,
    c: &SemiringValue,
) -> Result<Option<CandidateViolation>> {
    kind.check(a)?;
    kind.check(b)?;
    kind.check(c)?;
    let strict = |x: &SemiringValue, y: &SemiringValue| candidate(x, y) && !candidate(y, x);
    if !strict(a, b) {
        return Ok(None);
    }
    if !kind.is_zero(c)? {
        let prod = kind.mul(b, c)?;
        if !strict(a, &prod) {
            return Ok(Some(CandidateViolation::Condition1 {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            }));
        }
    }
    let sum = kind.add(b, c)?;
    if !strict(a, &sum) {
        return Ok(Some(CandidateViolation::Condition2 {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
        }));
    }
    Ok(None)
}

/// Checks the semiring axioms on every pair and triple drawn from `sample`;
/// returns printed counterexamples, one per failing instance.
pub fn semiring_law_violations(
    kind: &SemiringKind,
    sample: &[SemiringValue],
) -> Result<Vec<String>> {
    let zero = kind.zero();
    let one = kind.one();
    let mut out = Vec::new();
    for a in sample {
        kind.check(a)?;
        if kind.add(a, &zero)? != *a {
            out.push(format!("zero is not neutral at {a}"));
        }
        if kind.mul(a, &one)? != *a {
            out.push(format!("one is not right-neutral at {a}"));
        }
        if kind.mul(&one, a)? != *a {
            out.push(format!("one is not left-neutral at {a}"));
        }
        if !kind.is_zero(&kind.mul(a, &zero)?)? {
            out.push(format!("zero does not right-annihilate {a}"));
        }
        if !kind.is_zero(&kind.mul(&zero, a)?)? {
            out.push(format!("zero does not left-annihilate {a}"));
        }
    }
    for a in sample {
        for b in sample {
            if kind.add(a, b)? != kind.add(b, a)? {
                out.push(format!("addition is not commutative at {a}, {b}"));
            }
        }
    }
    for a in sample {
        for b in sample {
            let ab = kind.add(a, b)?;
            let ab_mul = kind.mul(a, b)?;
            for c in sample {
                if kind.add(&ab, c)? != kind.add(a, &kind.add(b, c)?)? {
                    out.push(format!("addition is not associative at {a}, {b}, {c}"));
                }
                if kind.mul(&ab_mul, c)? != kind.mul(a, &kind.mul(b, c)?)? {
                    out.push(format!("product is not associative at {a}, {b}, {c}"));
                }
                let left = kind.mul(a, &kind.add(b, c)?)?;
                let right = kind.add(&kind.mul(a, b)?, &kind.mul(a, c)?)?;
                if left != right {
                    out.push(format!("product does not distribute from the left at {a}, {b}, {c}"));
                }
                let left2 = kind.mul(&ab, c)?;
                let right2 = kind.add(&kind.mul(a, c)?, &kind.mul(b, c)?)?;
                if left2 != right2 {
                    out.push(format!("product does not distribute from the right at {a}, {b}, {c}"));
                }
            }
        }
    }
    Ok(out)
}

/// 0..=cap as natural semiring elements.
pub fn nat_window(cap: u64) -> Vec<SemiringValue> {
    (0..=cap).map(SemiringValue::Nat).collect()
}

/// -cap..=cap as integer semiring elements, ascending.
pub fn int_window(cap: i64) -> Vec<SemiringValue> {
    (-cap..=cap).map(SemiringValue::Int).collect()
}

/// Every word over `alphabet` with length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut level: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for letter in alphabet {
                let mut v = w.clone();
                v.push(letter.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Deterministic language window: the empty language, every singleton over
/// words up to `max_len`, and every two-word language over words up to
/// `max_len - 1`.
pub fn language_sample(alphabet: &[String], max_len: usize) -> Vec<SemiringValue> {
    let mut out = vec![SemiringValue::Words(BTreeSet::new())];
    let singles = words_up_to(alphabet, max_len);
    for w in &singles {
        out.push(SemiringValue::Words([w.clone()].into_iter().collect()));
    }
    let shorter = words_up_to(alphabet, max_len.saturating_sub(1));
    for (i, v) in shorter.iter().enumerate() {
        for w in shorter.iter().skip(i + 1) {
            out.push(SemiringValue::Words([v.clone(), w.clone()].into_iter().collect()));
        }
    }
    out
}

/// Every polynomial over `indeterminates` variables with all coefficients
/// and exponents at most `cap`, in odometer order over the monomial slots.
pub fn poly_window(indeterminates: usize, cap: u32) -> Result<Vec<SemiringValue>> {
    let mut slots: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..indeterminates {
        let mut next = Vec::new();
        for s in &slots {
            for e in 0..=cap {
                let mut t = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        slots = next;
    }
    let total = ((cap as u128) + 1).checked_pow(slots.len() as u32);
    match total {
        Some(t) if t <= POLY_WINDOW_CAP as u128 => {}
        _ => {
            return Err(Error::Budget(format!(
                "polynomial window over {} monomial slots",
                slots.len()
            )))
        }
    }
    let mut out = Vec::new();
    let mut coeffs = vec![0u64; slots.len()];
    loop {
        let poly: BTreeMap<Vec<u32>, u64> = slots
            .iter()
            .zip(coeffs.iter())
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| (e.clone(), c))
            .collect();
        out.push(SemiringValue::Poly(poly));
        let mut idx = 0;
        loop {
            if idx == coeffs.len() {
                return Ok(out);
            }
            if coeffs[idx] < cap as u64 {
                coeffs[idx] += 1;
                break;
            }
            coeffs[idx] = 0;
            idx += 1;
        }
    }
}
