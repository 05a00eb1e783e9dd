//! Linear Diophantine systems over the naturals: Hilbert bases of homogeneous
//! systems and minimal solutions of inhomogeneous ones, via the
//! Contejean-Devie completion procedure.
//!
//! Solution entries are arbitrary-precision naturals; nothing here assumes
//! the basis fits machine integers. The search itself is breadth-first with a
//! lexicographically sorted frontier, so results and their order are
//! deterministic.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A system `A·x = rhs` with named unknowns in column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DioSystem {
    pub unknowns: Vec<String>,
    /// Rows of `A`; each row has one coefficient per unknown.
    pub rows: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
}

impl DioSystem {
    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(|&c| c == 0)
    }

    fn check(&self) -> Result<()> {
        if self.unknowns.is_empty() {
            return Err(Error::Invalid("system has no unknowns".into()));
        }
        if self.rows.len() != self.rhs.len() {
            return Err(Error::Dimension("one right-hand side per row required".into()));
        }
        if self.rows.iter().any(|r| r.len() != self.unknowns.len()) {
            return Err(Error::Dimension("row width must match the unknown count".into()));
        }
        Ok(())
    }
}

/// A vector of naturals, one entry per unknown.
pub type DioVector = Vec<BigUint>;

/// The set of minimal nonzero solutions of a homogeneous system, sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertBasis {
    pub unknowns: Vec<String>,
    pub vectors: Vec<DioVector>,
}

const NODE_CAP: usize = 2_000_000;
const SOLUTION_CAP: usize = 100_000;

/// Computes the Hilbert basis of `A·x = 0`. The system splits into connected
/// components of the unknown/row incidence graph: a minimal solution is
/// supported inside a single component, otherwise its restriction to one
/// component would be a smaller nonzero solution. Each component runs the
/// completion procedure on its own.
pub fn hilbert_basis(system: &DioSystem) -> Result<HilbertBasis> {
    system.check()?;
    if !system.is_homogeneous() {
        return Err(Error::Invalid("hilbert basis is defined for homogeneous systems".into()));
    }
    let n = system.unknowns.len();
    let (comps, _) = column_components(system);
    let mut vectors: Vec<DioVector> = Vec::new();
    for (cols, rows) in &comps {
        let sub = hilbert_basis_connected(&subsystem(system, cols, rows))?;
        vectors.extend(sub.vectors.iter().map(|v| embed(v, cols, n)));
    }
    vectors.sort();
    Ok(HilbertBasis { unknowns: system.unknowns.clone(), vectors })
}

/// Contejean-Devie completion on one connected system: grow candidate vectors
/// from the unit vectors, stepping in direction `i` only when that decreases
/// the defect (negative inner product), and prune anything dominating an
/// already-found solution.
fn hilbert_basis_connected(system: &DioSystem) -> Result<HilbertBasis> {
    let n = system.unknowns.len();
    let mut basis: Vec<DioVector> = Vec::new();
    let mut frontier: Vec<DioVector> = (0..n).map(|i| unit(n, i)).collect();
    let mut visited = 0usize;
    while !frontier.is_empty() {
        frontier.sort();
        frontier.dedup();
        let mut next: Vec<DioVector> = Vec::new();
        for t in &frontier {
            visited += 1;
            if visited > NODE_CAP {
                return Err(Error::Budget(format!("completion exceeded {NODE_CAP} nodes")));
            }
            let defect = apply(system, t);
            if defect.iter().all(Zero::is_zero) {
                if !basis.iter().any(|b| dominates(t, b)) {
                    basis.push(t.clone());
                }
                continue;
            }
            for i in 0..n {
                let step: BigInt = system.rows.iter().zip(&defect).map(|(row, d)| d * row[i]).sum();
                if step.is_negative() {
                    let mut child = t.clone();
                    child[i] += 1u32;
                    if !basis.iter().any(|b| dominates(&child, b)) {
                        next.push(child);
                    }
                }
            }
        }
        frontier = next;
    }
    basis.retain_minimal();
    basis.sort();
    Ok(HilbertBasis { unknowns: system.unknowns.clone(), vectors: basis })
}

/// Minimal solutions of an inhomogeneous system, together with the Hilbert
/// basis of the associated homogeneous system. Solutions restrict and combine
/// componentwise, so each connected component is solved on its own: homogenize
/// with a fresh slack column carrying `-rhs`, keep the minimal solutions whose
/// slack entry is exactly one, and take all combinations across components.
pub fn min_solutions_inhomogeneous(system: &DioSystem) -> Result<(Vec<DioVector>, HilbertBasis)> {
    system.check()?;
    let n = system.unknowns.len();
    let (comps, zero_rows) = column_components(system);
    let feasible = zero_rows.iter().all(|&r| system.rhs[r] == 0);
    let mut particular: Vec<DioVector> = vec![vec![BigUint::zero(); n]];
    let mut hom_vectors: Vec<DioVector> = Vec::new();
    for (cols, rows) in &comps {
        let (sub_particular, sub_hom) = min_solutions_connected(&subsystem(system, cols, rows))?;
        hom_vectors.extend(sub_hom.vectors.iter().map(|v| embed(v, cols, n)));
        if particular.len().saturating_mul(sub_particular.len().max(1)) > SOLUTION_CAP {
            return Err(Error::Budget(format!("minimal solution count exceeded {SOLUTION_CAP}")));
        }
        particular = particular
            .iter()
            .flat_map(|acc| {
                sub_particular.iter().map(|v| {
                    let mut out = acc.clone();
                    for (&c, x) in cols.iter().zip(v) {
                        out[c] = x.clone();
                    }
                    out
                })
            })
            .collect();
    }
    if !feasible {
        particular.clear();
    }
    particular.sort();
    hom_vectors.sort();
    Ok((particular, HilbertBasis { unknowns: system.unknowns.clone(), vectors: hom_vectors }))
}

/// One connected component: homogenize with a slack column and read minimal
/// solutions off the lifted basis.
fn min_solutions_connected(system: &DioSystem) -> Result<(Vec<DioVector>, HilbertBasis)> {
    let n = system.unknowns.len();
    let mut hom = system.clone();
    hom.unknowns.push("_slack".into());
    for (row, &c) in hom.rows.iter_mut().zip(&system.rhs) {
        row.push(-c);
    }
    hom.rhs = vec![0; hom.rows.len()];
    let lifted = hilbert_basis_connected(&hom)?;
    let one = BigUint::one();
    let particular: Vec<DioVector> = lifted
        .vectors
        .iter()
        .filter(|v| v[n] == one)
        .map(|v| v[..n].to_vec())
        .collect();
    let homogeneous = HilbertBasis {
        unknowns: system.unknowns.clone(),
        vectors: lifted.vectors.iter().filter(|v| v[n].is_zero()).map(|v| v[..n].to_vec()).collect(),
    };
    Ok((particular, homogeneous))
}

/// Connected components of the incidence graph joining each row to the
/// unknowns it touches. Returns the components as `(columns, rows)` in
/// ascending index order, plus the rows with no nonzero coefficient.
fn column_components(system: &DioSystem) -> (Vec<(Vec<usize>, Vec<usize>)>, Vec<usize>) {
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let n = system.unknowns.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut zero_rows = Vec::new();
    for (r, row) in system.rows.iter().enumerate() {
        let mut touched = (0..n).filter(|&c| row[c] != 0);
        match touched.next() {
            None => zero_rows.push(r),
            Some(first) => {
                for c in touched {
                    let (a, b) = (root(&mut parent, first), root(&mut parent, c));
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for c in 0..n {
        let key = root(&mut parent, c);
        comps.entry(key).or_default().0.push(c);
    }
    for (r, row) in system.rows.iter().enumerate() {
        if let Some(c) = (0..n).find(|&c| row[c] != 0) {
            let key = root(&mut parent, c);
            comps.get_mut(&key).expect("component of a touched column").1.push(r);
        }
    }
    (comps.into_values().collect(), zero_rows)
}

fn subsystem(system: &DioSystem, cols: &[usize], rows: &[usize]) -> DioSystem {
    DioSystem {
        unknowns: cols.iter().map(|&c| system.unknowns[c].clone()).collect(),
        rows: rows.iter().map(|&r| cols.iter().map(|&c| system.rows[r][c]).collect()).collect(),
        rhs: rows.iter().map(|&r| system.rhs[r]).collect(),
    }
}

fn embed(v: &DioVector, cols: &[usize], n: usize) -> DioVector {
    let mut out = vec![BigUint::zero(); n];
    for (&c, x) in cols.iter().zip(v) {
        out[c] = x.clone();
    }
    out
}

/// True when the system has any solution over the naturals.
pub fn has_solution(system: &DioSystem) -> Result<bool> {
    if system.is_homogeneous() {
        return Ok(true);
    }
    Ok(!min_solutions_inhomogeneous(system)?.0.is_empty())
}

fn unit(n: usize, i: usize) -> DioVector {
    let mut v = vec![BigUint::zero(); n];
    v[i] = BigUint::one();
    v
}

fn apply(system: &DioSystem, x: &DioVector) -> Vec<BigInt> {
    system
        .rows
        .iter()
        .zip(&system.rhs)
        .map(|(row, &c)| {
            let mut acc = BigInt::from(-c);
            for (a, xi) in row.iter().zip(x) {
                acc += a * BigInt::from(xi.clone());
            }
            acc
        })
        .collect()
}

/// `a` dominates `b` componentwise (including equality).
fn dominates(a: &DioVector, b: &DioVector) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

trait RetainMinimal {
    fn retain_minimal(&mut self);
}

impl RetainMinimal for Vec<DioVector> {
    fn retain_minimal(&mut self) {
        let snapshot = self.clone();
        self.retain(|v| !snapshot.iter().any(|w| w != v && dominates(v, w)));
    }
}

/// The one-equation family `n·y = x1 + 2·x2 + … + n·xn`, whose basis
/// cardinality grows quickly with `n`. Unknown order is `y, x1, …, xn`.
pub fn scaled_sum_system(n: usize) -> DioSystem {
    let mut unknowns = vec!["y".to_string()];
    unknowns.extend((1..=n).map(|i| format!("x{i}")));
    let mut row = vec![n as i64];
    row.extend((1..=n).map(|i| -(i as i64)));
    DioSystem { unknowns, rows: vec![row], rhs: vec![0] }
}

/// Parses the equation-per-line format, e.g. `2y = x1 + 2x2`. Terms are
/// `coefficient`, `ident`, or `coefficient ident`, combined with `+` and `-`;
/// unknowns are ordered by first occurrence. Blank and `#` lines are skipped.
pub fn parse_dio_system(input: &str) -> Result<DioSystem> {
    let mut unknowns: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        let (lhs, right) = line.split_once('=').ok_or_else(|| err("expected `lhs = rhs`"))?;
        let mut coeffs: Vec<(usize, i64)> = Vec::new();
        let mut constant = 0i64;
        for (side, sign) in [(lhs, 1i64), (right, -1i64)] {
            for (ident, coeff) in parse_linear_side(side).map_err(|m| err(&m))? {
                match ident {
                    None => constant -= sign * coeff,
                    Some(name) => {
                        let idx = match unknowns.iter().position(|u| u == &name) {
                            Some(i) => i,
                            None => {
                                unknowns.push(name);
                                unknowns.len() - 1
                            }
                        };
                        coeffs.push((idx, sign * coeff));
                    }
                }
            }
        }
        rows.push(coeffs);
        rhs.push(constant);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no equations found".into()));
    }
    let n = unknowns.len();
    let rows = rows
        .into_iter()
        .map(|coeffs| {
            let mut row = vec![0i64; n];
            for (i, c) in coeffs {
                row[i] += c;
            }
            row
        })
        .collect();
    Ok(DioSystem { unknowns, rows, rhs })
}

/// One side of an equation as `(unknown, coefficient)` pairs; a `None`
/// unknown is a constant term.
fn parse_linear_side(side: &str) -> std::result::Result<Vec<(Option<String>, i64)>, String> {
    let mut out = Vec::new();
    let mut rest = side.trim();
    if rest.is_empty() {
        return Err("empty side".into());
    }
    let mut sign = 1i64;
    let mut expect_term = true;
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            rest = rest.trim_start();
        } else if c == '+' || c == '-' {
            if expect_term && c == '-' {
                sign = -sign;
                rest = &rest[1..];
            } else if expect_term {
                return Err("misplaced operator".into());
            } else {
                sign = if c == '-' { -1 } else { 1 };
                expect_term = true;
                rest = &rest[1..];
            }
        } else if c.is_ascii_digit() || c.is_ascii_alphabetic() {
            let split = rest
                .char_indices()
                .find(|(_, ch)| !(ch.is_ascii_alphanumeric() || *ch == '_'))
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let token = &rest[..split];
            rest = &rest[split..];
            let digits: String = token.chars().take_while(|ch| ch.is_ascii_digit()).collect();
            let ident = &token[digits.len()..];
            let coeff: i64 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| "coefficient overflow")? };
            if ident.is_empty() {
                out.push((None, sign * coeff));
            } else {
                if ident.starts_with('_') {
                    return Err(format!("unknown `{ident}` uses a reserved name"));
                }
                out.push((Some(ident.to_string()), sign * coeff));
            }
            expect_term = false;
            sign = 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    if expect_term {
        return Err("dangling operator".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(v: &[u32]) -> DioVector {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn parse_first_occurrence_order() {
        let sys = parse_dio_system("2y = x1 + 2x2").unwrap();
        assert_eq!(sys.unknowns, vec!["y", "x1", "x2"]);
        assert_eq!(sys.rows, vec![vec![2, -1, -2]]);
        assert_eq!(sys.rhs, vec![0]);
        let sys = parse_dio_system("x + y = 2\nx - y = 0").unwrap();
        assert_eq!(sys.rhs, vec![2, 0]);
    }

    #[test]
    fn scaled_sum_two_has_the_known_basis() {
        // 2y = x1 + 2x2, entries ordered (y, x1, x2).
        let basis = hilbert_basis(&scaled_sum_system(2)).unwrap();
        assert_eq!(basis.vectors, vec![nat(&[1, 0, 1]), nat(&[1, 2, 0])]);
    }

    #[test]
    fn basis_matches_brute_force_small() {
        let sys = DioSystem {
            unknowns: vec!["x".into(), "y".into(), "u".into()],
            rows: vec![vec![1, 1, -2]],
            rhs: vec![0],
        };
        let basis = hilbert_basis(&sys).unwrap();
        let brute = brute_minimal(&sys, 8);
        assert_eq!(basis.vectors, brute);
    }

    #[test]
    fn independent_blocks_combine_componentwise() {
        // Nine unknowns in six independent blocks glued into one system; the
        // completion must split them apart instead of searching the product
        // space, which overruns the node cap.
        let sys = DioSystem {
            unknowns: (0..9).map(|i| format!("q{i}")).collect(),
            rows: vec![
                vec![1, 0, 0, 0, 0, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0, 0, 0, 0, 0],
                vec![0, 0, 1, 0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 1, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 1, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 2, 0, 0, 0],
                vec![0, 0, 1, 0, 0, 0, 2, 0, 0],
                vec![0, 0, 0, 2, 0, 0, 0, 1, 0],
                vec![0, 0, 0, 0, 2, 0, 0, 0, 1],
                vec![0, 0, 1, 0, 0, 0, 0, 0, 0],
            ],
            rhs: vec![1, 1, 1, 1, 1, 4, 1, 3, 3, 1],
        };
        let (particular, hom) = min_solutions_inhomogeneous(&sys).unwrap();
        assert_eq!(particular, vec![nat(&[1, 1, 1, 1, 1, 2, 0, 1, 1])]);
        assert!(hom.vectors.is_empty());
    }

    #[test]
    fn block_diagonal_basis_is_the_union_of_block_bases() {
        let sys = DioSystem {
            unknowns: ["x", "y", "u", "a", "b"].iter().map(|s| s.to_string()).collect(),
            rows: vec![vec![1, 1, -2, 0, 0], vec![0, 0, 0, 1, -1]],
            rhs: vec![0, 0],
        };
        let basis = hilbert_basis(&sys).unwrap();
        assert_eq!(basis.vectors, brute_minimal(&sys, 4));
    }

    #[test]
    fn zero_rows_and_untouched_columns() {
        // A column no row touches contributes its unit vector to the basis; a
        // zero row with a nonzero right-hand side kills feasibility without
        // touching the homogeneous part.
        let sys = DioSystem {
            unknowns: vec!["x".into(), "y".into()],
            rows: vec![vec![2, 0], vec![0, 0]],
            rhs: vec![4, 1],
        };
        let (particular, hom) = min_solutions_inhomogeneous(&sys).unwrap();
        assert!(particular.is_empty());
        assert_eq!(hom.vectors, vec![nat(&[0, 1])]);
        let sys = DioSystem { rhs: vec![4, 0], ..sys };
        let (particular, hom) = min_solutions_inhomogeneous(&sys).unwrap();
        assert_eq!(particular, vec![nat(&[2, 0])]);
        assert_eq!(hom.vectors, vec![nat(&[0, 1])]);
    }

    #[test]
    fn inhomogeneous_particular_solutions() {
        // x + 2y = 3: minimal solutions (1,1) and (3,0); trivial homogeneous part.
        let sys = DioSystem { unknowns: vec!["x".into(), "y".into()], rows: vec![vec![1, 2]], rhs: vec![3] };
        let (particular, hom) = min_solutions_inhomogeneous(&sys).unwrap();
        assert_eq!(particular, vec![nat(&[1, 1]), nat(&[3, 0])]);
        assert!(hom.vectors.is_empty());
        // x - 2y = 3: one minimal solution, homogeneous basis {(2,1)}.
        let sys = DioSystem { unknowns: vec!["x".into(), "y".into()], rows: vec![vec![1, -2]], rhs: vec![3] };
        let (particular, hom) = min_solutions_inhomogeneous(&sys).unwrap();
        assert_eq!(particular, vec![nat(&[3, 0])]);
        assert_eq!(hom.vectors, vec![nat(&[2, 1])]);
        assert!(has_solution(&sys).unwrap());
        let none = DioSystem { unknowns: vec!["x".into()], rows: vec![vec![2]], rhs: vec![3] };
        assert!(!has_solution(&none).unwrap());
    }

    /// Brute-force minimal nonzero solutions with entries bounded by `bound`.
    pub(crate) fn brute_minimal(sys: &DioSystem, bound: u32) -> Vec<DioVector> {
        let n = sys.unknowns.len();
        let mut sols: Vec<Vec<u32>> = Vec::new();
        let mut v = vec![0u32; n];
        loop {
            if v.iter().any(|&x| x > 0) {
                let ok = sys.rows.iter().zip(&sys.rhs).all(|(row, &c)| {
                    let lhs: i128 = row.iter().zip(&v).map(|(&a, &x)| a as i128 * x as i128).sum();
                    lhs == c as i128
                });
                if ok {
                    sols.push(v.clone());
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    let mut out: Vec<DioVector> =
                        sols.iter()
                            .filter(|s| {
                                !sols.iter().any(|t| {
                                    t != *s && t.iter().zip(s.iter()).all(|(a, b)| a <= b)
                                })
                            })
                            .map(|s| s.iter().map(|&x| BigUint::from(x)).collect())
                            .collect();
                    out.sort();
                    return out;
                }
                if v[i] < bound {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }
}
