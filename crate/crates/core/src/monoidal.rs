//! Vector and matrix views of terms in the monoidal theories.
//!
//! Over a fixed variable basis, a term becomes a row of semiring scalars
//! (one coordinate per basis variable) and a substitution becomes a matrix
//! with one row per domain variable. Application turns into the
//! vector-matrix product, coordinates determine equivalence classes
//! exactly, and instantiation witnesses can be transferred between
//! substitutions that agree outside a set of strictly dominated entries.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::normal::{self, eq_modulo, normal_form};
use crate::semiring::{restrictive_preorder, RestrictivePreorder, SemiringKind, SemiringValue};
use crate::subst::Substitution;
use crate::term::Term;
use crate::theory::{theory_info, TheoryId};

/// The scalar semiring a theory's terms live over: naturals for ACU, truth
/// values for ACUI, role-word languages for FL0, homomorphism polynomials
/// for ACUh. Other theories have no faithful scalar view.
pub fn semiring_for(id: &TheoryId) -> Result<SemiringKind> {
    match id {
        TheoryId::ACU => Ok(SemiringKind::Nat),
        TheoryId::ACUI => Ok(SemiringKind::WordSets { alphabet: Vec::new() }),
        TheoryId::FL0 { .. } => Ok(SemiringKind::WordSets { alphabet: id.hom_symbols() }),
        TheoryId::ACUh { k } => Ok(SemiringKind::NatPoly { indeterminates: *k }),
        _ => Err(Error::unsupported(id.to_string(), "semiring view")),
    }
}

/// Row of scalars indexed by a variable basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiringVector {
    pub kind: SemiringKind,
    pub entries: Vec<SemiringValue>,
}

/// One row per domain-basis variable, one column per range-basis variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiringMatrix {
    pub kind: SemiringKind,
    pub rows: Vec<Vec<SemiringValue>>,
}

fn checked_basis(basis: &[String]) -> Result<BTreeSet<String>> {
    let set: BTreeSet<String> = basis.iter().cloned().collect();
    if set.len() != basis.len() {
        return Err(Error::Invalid("basis repeats a variable".into()));
    }
    Ok(set)
}

/// The coordinate row of `t` over `basis`: occurrence counts under ACU,
/// presence bits under ACUI, role-word languages under FL0, homomorphism
/// polynomials under ACUh with one homomorphism. Equal coordinates mean
/// equal terms modulo the theory and conversely.
pub fn term_to_vector(id: &TheoryId, t: &Term, basis: &[String]) -> Result<SemiringVector> {
    let kind = semiring_for(id)?;
    theory_info(id).signature.check(t)?;
    let set = checked_basis(basis)?;
    let outside: Vec<String> = t.vars().difference(&set).cloned().collect();
    if !outside.is_empty() {
        return Err(Error::Invalid(format!(
            "variables outside the basis: {}",
            outside.join(", ")
        )));
    }
    let entries = match id {
        TheoryId::ACU => {
            // Atoms over {f, 0} are exactly variables.
            let counts = normal::ac_atom_counts(id, t)?;
            basis
                .iter()
                .map(|v| {
                    SemiringValue::Nat(counts.get(&Term::var(v.clone())).copied().unwrap_or(0))
                })
                .collect()
        }
        TheoryId::ACUI => {
            let counts = normal::ac_atom_counts(id, t)?;
            basis
                .iter()
                .map(|v| {
                    let present = counts.contains_key(&Term::var(v.clone()));
                    SemiringValue::Words(if present {
                        [Vec::new()].into_iter().collect()
                    } else {
                        BTreeSet::new()
                    })
                })
                .collect()
        }
        TheoryId::FL0 { .. } => {
            let langs = normal::fl0_langs(t);
            basis
                .iter()
                .map(|v| SemiringValue::Words(langs.get(v).cloned().unwrap_or_default()))
                .collect()
        }
        TheoryId::ACUh { k } => {
            if *k != 1 {
                return Err(Error::unsupported(
                    id.to_string(),
                    "vector view with several homomorphisms",
                ));
            }
            let polys = normal::acuh1_poly(t);
            basis
                .iter()
                .map(|v| {
                    let coeffs = polys.get(v).cloned().unwrap_or_default();
                    SemiringValue::Poly(coeffs.into_iter().map(|(e, c)| (vec![e], c)).collect())
                })
                .collect()
        }
        _ => return Err(Error::unsupported(id.to_string(), "semiring view")),
    };
    Ok(SemiringVector { kind, entries })
}

/// The canonical term carrying the given coordinates: inverse to
/// `term_to_vector` up to equality in the theory.
pub fn vector_to_term(id: &TheoryId, v: &SemiringVector, basis: &[String]) -> Result<Term> {
    let kind = semiring_for(id)?;
    if v.kind != kind {
        return Err(Error::Invalid(format!(
            "vector over the {} applied under {id}",
            v.kind.name()
        )));
    }
    if v.entries.len() != basis.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates over a {}-variable basis",
            v.entries.len(),
            basis.len()
        )));
    }
    checked_basis(basis)?;
    for e in &v.entries {
        kind.check(e)?;
    }
    let t = match id {
        TheoryId::ACU => {
            let mut atoms = Vec::new();
            for (name, e) in basis.iter().zip(&v.entries) {
                for _ in 0..nat_entry(e)? {
                    atoms.push(Term::var(name.clone()));
                }
            }
            atoms.sort();
            normal::rebuild("f", atoms, Some("0"))
        }
        TheoryId::ACUI => {
            let mut atoms = Vec::new();
            for (name, e) in basis.iter().zip(&v.entries) {
                if !words_entry(e)?.is_empty() {
                    atoms.push(Term::var(name.clone()));
                }
            }
            normal::rebuild("f", atoms, Some("0"))
        }
        TheoryId::FL0 { .. } => {
            let langs: BTreeMap<String, BTreeSet<Vec<String>>> = basis
                .iter()
                .zip(&v.entries)
                .map(|(name, e)| Ok((name.clone(), words_entry(e)?.clone())))
                .collect::<Result<_>>()?;
            normal::fl0_canonical(&langs)
        }
        TheoryId::ACUh { k } => {
            if *k != 1 {
                return Err(Error::unsupported(
                    id.to_string(),
                    "vector view with several homomorphisms",
                ));
            }
            let polys: BTreeMap<String, BTreeMap<u32, u64>> = basis
                .iter()
                .zip(&v.entries)
                .map(|(name, e)| {
                    let coeffs =
                        poly_entry(e)?.iter().map(|(exps, c)| (exps[0], *c)).collect();
                    Ok((name.clone(), coeffs))
                })
                .collect::<Result<_>>()?;
            normal::acuh1_canonical(&polys)
        }
        _ => return Err(Error::unsupported(id.to_string(), "semiring view")),
    };
    normal_form(id, &t)
}

fn nat_entry(e: &SemiringValue) -> Result<u64> {
    match e {
        SemiringValue::Nat(n) => Ok(*n),
        _ => Err(Error::Internal("semiring carriers diverged after check".into())),
    }
}

fn words_entry(e: &SemiringValue) -> Result<&BTreeSet<Vec<String>>> {
    match e {
        SemiringValue::Words(ws) => Ok(ws),
        _ => Err(Error::Internal("semiring carriers diverged after check".into())),
    }
}

fn poly_entry(e: &SemiringValue) -> Result<&BTreeMap<Vec<u32>, u64>> {
    match e {
        SemiringValue::Poly(p) => Ok(p),
        _ => Err(Error::Internal("semiring carriers diverged after check".into())),
    }
}

/// One row per domain-basis variable: the coordinates of its image over the
/// range basis. Bindings outside the domain basis would be invisible to the
/// matrix and are refused.
pub fn subst_to_matrix(
    id: &TheoryId,
    sigma: &Substitution,
    basis_dom: &[String],
    basis_ran: &[String],
) -> Result<SemiringMatrix> {
    let kind = semiring_for(id)?;
    let domset = checked_basis(basis_dom)?;
    let stray: Vec<String> = sigma.domain().difference(&domset).cloned().collect();
    if !stray.is_empty() {
        return Err(Error::Invalid(format!(
            "bindings outside the domain basis: {}",
            stray.join(", ")
        )));
    }
    let rows = basis_dom
        .iter()
        .map(|x| Ok(term_to_vector(id, &sigma.image_of(x), basis_ran)?.entries))
        .collect::<Result<_>>()?;
    Ok(SemiringMatrix { kind, rows })
}

/// Coordinates of the applied term from coordinates of the original: entry
/// `j` of the result sums `v[k]` times `m[k][j]` over all rows `k`.
pub fn apply_via_matrix(v: &SemiringVector, m: &SemiringMatrix) -> Result<SemiringVector> {
    if v.kind != m.kind {
        return Err(Error::Invalid(format!(
            "vector over the {} against a matrix over the {}",
            v.kind.name(),
            m.kind.name()
        )));
    }
    let width = matrix_width(m)?;
    if v.entries.len() != m.rows.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates against {} matrix rows",
            v.entries.len(),
            m.rows.len()
        )));
    }
    let kind = &v.kind;
    let mut entries = Vec::with_capacity(width);
    for j in 0..width {
        let mut acc = kind.zero();
        for (k, row) in m.rows.iter().enumerate() {
            let prod = kind.mul(&v.entries[k], &row[j])?;
            acc = kind.add(&acc, &prod)?;
        }
        entries.push(acc);
    }
    Ok(SemiringVector { kind: kind.clone(), entries })
}

fn matrix_width(m: &SemiringMatrix) -> Result<usize> {
    let width = m.rows.first().map_or(0, |r| r.len());
    for row in &m.rows {
        if row.len() != width {
            return Err(Error::Dimension("ragged matrix".into()));
        }
    }
    Ok(width)
}

fn same_shape(m1: &SemiringMatrix, m2: &SemiringMatrix) -> Result<usize> {
    if m1.kind != m2.kind {
        return Err(Error::Invalid(format!(
            "matrices over the {} and the {}",
            m1.kind.name(),
            m2.kind.name()
        )));
    }
    let w1 = matrix_width(m1)?;
    let w2 = matrix_width(m2)?;
    if m1.rows.len() != m2.rows.len() || w1 != w2 {
        return Err(Error::Dimension(format!(
            "{}x{} against {}x{}",
            m1.rows.len(),
            w1,
            m2.rows.len(),
            w2
        )));
    }
    Ok(w1)
}

/// Every index pair of a rows-by-cols matrix.
pub fn all_pairs(rows: usize, cols: usize) -> BTreeSet<(usize, usize)> {
    (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect()
}

/// Entrywise domination: for every zero-based pair `(i, j)` in `p` and
/// every column `k`, entry `(i, j)` of `m1` lies strictly above entry
/// `(i, k)` of `m2`. The empty pair set holds vacuously.
pub fn greater_than_p(
    m1: &SemiringMatrix,
    m2: &SemiringMatrix,
    p: &BTreeSet<(usize, usize)>,
    pre: &RestrictivePreorder,
) -> Result<bool> {
    let width = same_shape(m1, m2)?;
    if m1.kind != *pre.kind() {
        return Err(Error::Invalid("preorder over a different semiring".into()));
    }
    for &(i, j) in p {
        if i >= m1.rows.len() || j >= width {
            return Err(Error::Dimension(format!(
                "pair ({i}, {j}) outside a {}x{} matrix",
                m1.rows.len(),
                width
            )));
        }
        for k in 0..width {
            if !pre.strict(&m2.rows[i][k], &m1.rows[i][j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Entrywise equality on the zero-based pairs in `p`.
pub fn coincide_on_p(
    m1: &SemiringMatrix,
    m2: &SemiringMatrix,
    p: &BTreeSet<(usize, usize)>,
) -> Result<bool> {
    let width = same_shape(m1, m2)?;
    for &(i, j) in p {
        if i >= m1.rows.len() || j >= width {
            return Err(Error::Dimension(format!(
                "pair ({i}, {j}) outside a {}x{} matrix",
                m1.rows.len(),
                width
            )));
        }
        if m1.rows[i][j] != m2.rows[i][j] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Carries an instantiation witness across dominated entries: when `s1`
/// maps onto `s2` under `lambda`, every `p`-entry of `s1` strictly
/// dominates the whole corresponding `s2` row, and `s3` agrees with `s1`
/// everywhere off `p`, the confined witness also maps `s3` onto `s2`.
/// Witness rows feeding a dominated entry carry more weight than the whole
/// target row and must vanish, so changing only those entries cannot be
/// observed. Hypothesis failures report `Invalid`; a conclusion failure
/// would be a bug here and reports `Internal`.
pub fn transfer_witness(
    id: &TheoryId,
    s1: &Substitution,
    s2: &Substitution,
    s3: &Substitution,
    basis: &[String],
    p: &BTreeSet<(usize, usize)>,
    lambda: &Substitution,
) -> Result<Substitution> {
    let kind = semiring_for(id)?;
    let pre = restrictive_preorder(&kind)?;
    if basis.is_empty() {
        return Err(Error::Invalid("empty basis".into()));
    }
    let set = checked_basis(basis)?;
    for (name, s) in [("first", s1), ("second", s2), ("third", s3)] {
        let stray: Vec<String> = s.footprint().difference(&set).cloned().collect();
        if !stray.is_empty() {
            return Err(Error::Invalid(format!(
                "the {name} substitution leaves the basis at {}",
                stray.join(", ")
            )));
        }
    }
    for x in basis {
        if !eq_modulo(id, &lambda.apply(&s1.image_of(x)), &s2.image_of(x))? {
            return Err(Error::Invalid(format!(
                "the witness does not carry the first substitution onto the second at {x}"
            )));
        }
    }
    let confined = confine_witness(lambda, basis, &set);
    for x in basis {
        if !eq_modulo(id, &confined.apply(&s1.image_of(x)), &s2.image_of(x))? {
            return Err(Error::Internal(
                "witness confinement lost the instance relation".into(),
            ));
        }
    }
    let m1 = subst_to_matrix(id, s1, basis, basis)?;
    let m2 = subst_to_matrix(id, s2, basis, basis)?;
    let m3 = subst_to_matrix(id, s3, basis, basis)?;
    if !greater_than_p(&m1, &m2, p, &pre)? {
        return Err(Error::Invalid(
            "no strict domination on the given entry pairs".into(),
        ));
    }
    let off: BTreeSet<(usize, usize)> =
        all_pairs(basis.len(), basis.len()).difference(p).cloned().collect();
    if !coincide_on_p(&m1, &m3, &off)? {
        return Err(Error::Invalid(
            "the third substitution differs off the given entry pairs".into(),
        ));
    }
    for x in basis {
        if !eq_modulo(id, &confined.apply(&s3.image_of(x)), &s2.image_of(x))? {
            return Err(Error::Internal(
                "transferred witness fails on the third substitution".into(),
            ));
        }
    }
    Ok(confined)
}

/// Drops witness bindings outside the basis and collapses stray range
/// variables onto the first basis variable. Instance relations through
/// basis-confined substitutions survive: the collapse substitutes into
/// both sides of each equation.
fn confine_witness(
    lambda: &Substitution,
    basis: &[String],
    set: &BTreeSet<String>,
) -> Substitution {
    let restricted = lambda.restrict(set);
    let stray: Vec<(String, Term)> = restricted
        .var_range()
        .difference(set)
        .map(|z| (z.clone(), Term::var(basis[0].clone())))
        .collect();
    Substitution::from_pairs(stray).compose(&restricted).restrict(set)
}
