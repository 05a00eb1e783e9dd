//! Fixture builders shared by the benchmarks.

use modeq_core::{parse_term, theory_info, Term, TheoryId};

/// The equation `ny = x1 + 2x2 + ... + nxn`, whose solution basis grows
/// quickly with `n`.
pub fn lankford_system(n: usize) -> String {
    let rhs: Vec<String> = (1..=n)
        .map(|i| if i == 1 { "x1".to_string() } else { format!("{i}x{i}") })
        .collect();
    format!("{n}y = {}", rhs.join(" + "))
}

/// Right-leaning `f` sum of the given atoms.
pub fn sum_term(id: &TheoryId, atoms: &[&str]) -> Term {
    let sig = theory_info(id).signature;
    let text = atoms
        .iter()
        .rev()
        .fold(String::new(), |acc, a| {
            if acc.is_empty() {
                (*a).to_string()
            } else {
                format!("f({a},{acc})")
            }
        });
    parse_term(&text, &sig).expect("fixture parses")
}
