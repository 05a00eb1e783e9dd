//! Command-line front door: parses terms, substitutions, and problem files,
//! dispatches to the library, and prints reports that are byte-identical
//! across runs. Every bounded computation carries its bounds and a caveat so
//! no report overclaims.
//!
//! Exit codes: 0 success, 2 parse or input error, 3 refusal (no algorithm for
//! the theory/verb pair), 4 undecided at the configured bound, 1 internal
//! diagnostic.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use clap::{Parser, Subcommand};
use modeq_core::{
    apply_via_matrix, check_restrictive_window, compare, eq_modulo, equivalent, hilbert_basis,
    int_window, language_sample, min_solutions_inhomogeneous, more_general_poset, nat_window,
    normal_form, parse_dio_system, parse_problem, parse_substitution, parse_term, poly_window,
    probe_type, restrictive_preorder, semiring_law_violations, shrink_general, sigma_z_family,
    subst_to_matrix, term_to_vector, theory_info, unify_theory, vector_to_term,
    verify_descending_chain, Error, Flag, FreshVarGen, InstanceDecision, Result, Scope,
    ScopeProbe, SemiringKind, SemiringValue, SetStatus, Signature, Substitution, TheoryId,
    UnificationProblem,
};
use serde_json::{json, Map, Value};

/// Workbench for unification modulo equational theories.
#[derive(Parser)]
#[command(name = "modeq", version, max_term_width = 100)]
struct Cli {
    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized commands; the current verbs are deterministic, so
    /// the flag is accepted only for script uniformity.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    /// Give up with exit code 4 after this many seconds.
    #[arg(long, global = true, value_name = "SECONDS")]
    timeout: Option<u64>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Decide whether two terms are equal modulo the theory.
    Eq {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        /// Left term.
        s: String,
        /// Right term.
        t: String,
    },
    /// Print the canonical form of a term.
    Normalize {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        term: String,
    },
    /// Solve a problem file with the theory's complete-set routine.
    Unify {
        /// Must agree with the file's `theory:` header when given.
        #[arg(long, value_parser = parse_theory)]
        theory: Option<TheoryId>,
        /// Problem file: a `theory:` header, then one `s = t` per line.
        #[arg(long, value_name = "FILE")]
        problem: PathBuf,
    },
    /// Compare two substitutions under the instantiation preorder.
    Compare {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        /// `restricted` (the domains of both sides), `unrestricted` (all
        /// variables), or an explicit `vars=x,y`.
        #[arg(long, default_value = "unrestricted")]
        scope: String,
        /// File of `x := term` lines.
        #[arg(long, value_name = "FILE")]
        sigma: PathBuf,
        /// File of `x := term` lines.
        #[arg(long, value_name = "FILE")]
        theta: PathBuf,
    },
    /// Enumerate a bounded unifier universe and probe the type under both
    /// scopes.
    Probe {
        /// Must agree with the file's `theory:` header when given.
        #[arg(long, value_parser = parse_theory)]
        theory: Option<TheoryId>,
        #[arg(long, value_name = "FILE")]
        problem: PathBuf,
        /// Fresh variables admitted into generated images.
        #[arg(long, default_value_t = 0)]
        fresh: usize,
        /// Depth bound for generated images.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Build the swap-variant family of a solved problem's unifier.
    SigmaZ {
        /// Must agree with the file's `theory:` header when given.
        #[arg(long, value_parser = parse_theory)]
        theory: Option<TheoryId>,
        #[arg(long, value_name = "FILE")]
        problem: PathBuf,
        /// Number of fresh swap variables.
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Minimal nonnegative solutions of a linear Diophantine system.
    Hilbert {
        /// File of equations such as `2y = x1 + 2x2`, one per line.
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
    },
    /// Shrink sigma into the footprint of theta, given a witness lambda with
    /// lambda(sigma(x)) = theta(x) everywhere.
    Shrink {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        #[arg(long, value_name = "FILE")]
        sigma: PathBuf,
        #[arg(long, value_name = "FILE")]
        theta: PathBuf,
        #[arg(long, value_name = "FILE")]
        witness: PathBuf,
    },
    /// All equivalence classes more general than theta, with the strict
    /// order between them.
    Poset {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        #[arg(long, value_name = "FILE")]
        theta: PathBuf,
        /// Depth bound for generated images.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Check a strictly descending chain of substitutions.
    Chain {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        /// Substitution blocks separated by `--` lines; a block holding the
        /// single word `identity` is the identity substitution.
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
    /// Coordinates of a term over a variable basis in the theory's semiring.
    Vector {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        /// Comma-separated basis variables, e.g. x1,x2.
        #[arg(long)]
        basis: String,
        term: String,
    },
    /// Matrix of a substitution over domain and range bases, optionally
    /// applied to a term's coordinate vector.
    Matrix {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryId,
        /// File of `x := term` lines.
        #[arg(long, value_name = "FILE")]
        sigma: PathBuf,
        /// Comma-separated domain basis.
        #[arg(long)]
        dom: String,
        /// Comma-separated range basis; defaults to the domain basis.
        #[arg(long)]
        ran: Option<String>,
        /// Term over the domain basis to push through the matrix.
        #[arg(long, value_name = "TERM")]
        apply: Option<String>,
    },
    /// Sample a semiring window and check the restrictive-preorder and
    /// semiring laws on it.
    RestrictiveCheck {
        /// nat, int, words:k, or poly:k.
        #[arg(long)]
        semiring: String,
        /// Window size handed to the sampler: the largest number, word
        /// length, or coefficient/exponent. Polynomials over several
        /// indeterminates need a small window.
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
}

fn parse_theory(s: &str) -> std::result::Result<TheoryId, String> {
    TheoryId::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_with_timeout(cli.verb, cli.timeout) {
        Ok(report) => {
            print!("{}", report.render(cli.json));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Signature(_) | Error::Invalid(_) | Error::Dimension(_) => 2,
        Error::Unsupported { .. } => 3,
        Error::Undecided(_) | Error::Budget(_) => 4,
        Error::Internal(_) => 1,
    }
}

/// Runs the verb on a worker thread so an expired timeout can abandon it;
/// the process exits right after, taking the worker with it.
fn run_with_timeout(verb: Verb, timeout: Option<u64>) -> Result<Report> {
    let Some(secs) = timeout else { return run(verb) };
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let _ = tx.send(run(verb));
    });
    match rx.recv_timeout(Duration::from_secs(secs)) {
        Ok(outcome) => outcome,
        Err(_) => Err(Error::Undecided(format!("timed out after {secs} seconds"))),
    }
}

fn run(verb: Verb) -> Result<Report> {
    let mut report = match verb {
        Verb::Eq { theory, s, t } => run_eq(&theory, &s, &t),
        Verb::Normalize { theory, term } => run_normalize(&theory, &term),
        Verb::Unify { theory, problem } => run_unify(theory.as_ref(), &problem),
        Verb::Compare { theory, scope, sigma, theta } => {
            run_compare(&theory, &scope, &sigma, &theta)
        }
        Verb::Probe { theory, problem, fresh, depth } => {
            run_probe(theory.as_ref(), &problem, fresh, depth)
        }
        Verb::SigmaZ { theory, problem, count } => {
            run_sigma_z(theory.as_ref(), &problem, count)
        }
        Verb::Hilbert { system } => run_hilbert(&system),
        Verb::Shrink { theory, sigma, theta, witness } => {
            run_shrink(&theory, &sigma, &theta, &witness)
        }
        Verb::Poset { theory, theta, depth } => run_poset(&theory, &theta, depth),
        Verb::Chain { theory, file } => run_chain(&theory, &file),
        Verb::Vector { theory, basis, term } => run_vector(&theory, &basis, &term),
        Verb::Matrix { theory, sigma, dom, ran, apply } => {
            run_matrix(&theory, &sigma, &dom, ran.as_deref(), apply.as_deref())
        }
        Verb::RestrictiveCheck { semiring, window } => run_restrictive(&semiring, window),
    }?;
    // Bounded results must carry a caveat; a silent bound would overclaim.
    if !report.bounds.is_empty() && report.caveats.is_empty() {
        report.caveats.push("results are exact only within the stated bounds".into());
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
    verb: &'static str,
    theory: Option<String>,
    bounds: Map<String, Value>,
    results: Value,
    caveats: Vec<String>,
    table: Vec<String>,
}

impl Report {
    fn render(&self, json_mode: bool) -> String {
        if json_mode {
            let value = json!({
                "verb": self.verb,
                "theory": self.theory,
                "bounds": Value::Object(self.bounds.clone()),
                "results": self.results,
                "caveats": self.caveats,
            });
            let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
            text.push('\n');
            text
        } else {
            let mut lines = vec![format!("verb: {}", self.verb)];
            if let Some(t) = &self.theory {
                lines.push(format!("theory: {t}"));
            }
            for (k, v) in &self.bounds {
                lines.push(format!("bound {k}: {v}"));
            }
            lines.extend(self.table.iter().cloned());
            for c in &self.caveats {
                lines.push(format!("note: {c}"));
            }
            lines.join("\n") + "\n"
        }
    }
}

fn jstrings<I: IntoIterator>(items: I) -> Value
where
    I::Item: ToString,
{
    Value::Array(items.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn tuple_str<I: IntoIterator>(items: I) -> String
where
    I::Item: ToString,
{
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

// ---------------------------------------------------------------------------
// Shared input plumbing

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path, theory: Option<&TheoryId>) -> Result<UnificationProblem> {
    let gamma = parse_problem(&read_file(path)?)?;
    if let Some(id) = theory {
        if *id != gamma.theory {
            return Err(Error::Parse(format!(
                "--theory {id} disagrees with the file header {}",
                gamma.theory
            )));
        }
    }
    Ok(gamma)
}

fn load_substitution(path: &Path, sig: &Signature) -> Result<Substitution> {
    parse_substitution(&read_file(path)?, sig)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn split_names(list: &str) -> Result<Vec<String>> {
    let names: Vec<String> = list
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::Parse("empty variable list".into()));
    }
    Ok(names)
}

fn and_flag(a: Flag, b: Flag) -> Flag {
    match (a, b) {
        (Flag::No, _) | (_, Flag::No) => Flag::No,
        (Flag::Unknown, _) | (_, Flag::Unknown) => Flag::Unknown,
        _ => Flag::Yes,
    }
}

fn decision_json(d: &InstanceDecision) -> Value {
    match d {
        InstanceDecision::Holds(w) => json!({"holds": "yes", "witness": w.to_string()}),
        InstanceDecision::DoesNotHold => json!({"holds": "no"}),
        InstanceDecision::Undecided => json!({"holds": "unknown"}),
    }
}

fn decision_line(label: &str, d: &InstanceDecision) -> String {
    match d {
        InstanceDecision::Holds(w) => format!("{label}: yes  witness {w}"),
        InstanceDecision::DoesNotHold => format!("{label}: no"),
        InstanceDecision::Undecided => format!("{label}: unknown"),
    }
}

// ---------------------------------------------------------------------------
// Verbs

fn run_eq(id: &TheoryId, s: &str, t: &str) -> Result<Report> {
    let sig = theory_info(id).signature;
    let left = parse_term(s, &sig)?;
    let right = parse_term(t, &sig)?;
    let equal = eq_modulo(id, &left, &right)?;
    let left_nf = normal_form(id, &left)?;
    let right_nf = normal_form(id, &right)?;
    Ok(Report {
        verb: "eq",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "equal": equal,
            "left": left_nf.to_string(),
            "right": right_nf.to_string(),
        }),
        caveats: Vec::new(),
        table: vec![
            format!("equal: {}", if equal { "yes" } else { "no" }),
            format!("left canonical form: {left_nf}"),
            format!("right canonical form: {right_nf}"),
        ],
    })
}

fn run_normalize(id: &TheoryId, term: &str) -> Result<Report> {
    let sig = theory_info(id).signature;
    let t = parse_term(term, &sig)?;
    let nf = normal_form(id, &t)?;
    Ok(Report {
        verb: "normalize",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({"input": t.to_string(), "normal_form": nf.to_string()}),
        caveats: Vec::new(),
        table: vec![format!("input: {t}"), format!("normal form: {nf}")],
    })
}

fn run_unify(theory: Option<&TheoryId>, problem: &Path) -> Result<Report> {
    let gamma = load_problem(problem, theory)?;
    let set = unify_theory(&gamma)?;
    let mut bounds = Map::new();
    let mut caveats = Vec::new();
    let status = match set.status {
        SetStatus::Complete => "complete",
        SetStatus::CompleteWithinUniverse { fresh_vars, depth } => {
            bounds.insert("fresh".into(), json!(fresh_vars));
            bounds.insert("depth".into(), json!(depth));
            caveats.push("the set is complete only within the bounded universe".into());
            "complete-within-universe"
        }
        SetStatus::Unknown => "unknown",
    };
    let mut table = vec![
        format!("status: {status}"),
        format!("scope: {}", set.scope),
        format!("minimal: {}", if set.minimal { "yes" } else { "no" }),
        format!("unifiers: {}", set.unifiers.len()),
    ];
    for (i, u) in set.unifiers.iter().enumerate() {
        table.push(format!("  {}: {u}", i + 1));
    }
    Ok(Report {
        verb: "unify",
        theory: Some(gamma.theory.to_string()),
        bounds,
        results: json!({
            "status": status,
            "scope": set.scope.to_string(),
            "minimal": set.minimal,
            "unifiers": jstrings(&set.unifiers),
        }),
        caveats,
        table,
    })
}

fn parse_scope(spec: &str, sigma: &Substitution, theta: &Substitution) -> Result<Scope> {
    match spec {
        "unrestricted" | "all" | "all-vars" => Ok(Scope::AllVars),
        "restricted" => {
            let mut vars = sigma.domain();
            vars.extend(theta.domain());
            Ok(Scope::VarSet(vars))
        }
        other => match other.strip_prefix("vars=") {
            Some(list) => {
                let vars: BTreeSet<String> = split_names(list)?.into_iter().collect();
                Ok(Scope::VarSet(vars))
            }
            None => Err(Error::Parse(format!(
                "unknown scope `{other}`; use restricted, unrestricted, or vars=x,y"
            ))),
        },
    }
}

fn run_compare(id: &TheoryId, scope_spec: &str, sigma: &Path, theta: &Path) -> Result<Report> {
    let sig = theory_info(id).signature;
    let s = load_substitution(sigma, &sig)?;
    let t = load_substitution(theta, &sig)?;
    let scope = parse_scope(scope_spec, &s, &t)?;
    let cmp = compare(id, &s, &t, &scope)?;
    let mut caveats = Vec::new();
    if matches!(cmp.leq, InstanceDecision::Undecided)
        || matches!(cmp.geq, InstanceDecision::Undecided)
    {
        caveats.push("some directions were undecided by the bounded matcher".into());
    }
    Ok(Report {
        verb: "compare",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "scope": scope.to_string(),
            "leq": decision_json(&cmp.leq),
            "geq": decision_json(&cmp.geq),
            "equivalent": cmp.equivalent().to_string(),
            "strictly_more_general": cmp.strictly_more_general().to_string(),
            "incomparable": cmp.incomparable().to_string(),
        }),
        caveats,
        table: vec![
            format!("scope: {scope}"),
            decision_line("sigma <= theta", &cmp.leq),
            decision_line("theta <= sigma", &cmp.geq),
            format!("equivalent: {}", cmp.equivalent()),
            format!("strictly more general: {}", cmp.strictly_more_general()),
            format!("incomparable: {}", cmp.incomparable()),
        ],
    })
}

fn scope_probe_json(p: &ScopeProbe) -> Value {
    json!({
        "scope": p.scope.to_string(),
        "unifiers": p.unifier_count,
        "classes": p.class_count,
        "minimal_classes": p.minimal_class_count,
        "complete_within_universe": p.complete_within_universe,
        "verdict_hint": p.verdict_hint.to_string(),
    })
}

fn scope_probe_lines(label: &str, p: &ScopeProbe, table: &mut Vec<String>) {
    table.push(format!("[{label}] scope: {}", p.scope));
    table.push(format!(
        "[{label}] unifiers: {}  classes: {}  minimal classes: {}",
        p.unifier_count, p.class_count, p.minimal_class_count
    ));
    table.push(format!(
        "[{label}] complete within universe: {}",
        if p.complete_within_universe { "yes" } else { "no" }
    ));
    table.push(format!("[{label}] verdict hint: {}", p.verdict_hint));
}

fn run_probe(theory: Option<&TheoryId>, problem: &Path, fresh: usize, depth: usize) -> Result<Report> {
    let gamma = load_problem(problem, theory)?;
    let probe = probe_type(&gamma, fresh, depth)?;
    let mut bounds = Map::new();
    bounds.insert("fresh".into(), json!(fresh));
    bounds.insert("depth".into(), json!(depth));
    let mut table = Vec::new();
    scope_probe_lines("restricted", &probe.restricted, &mut table);
    scope_probe_lines("unrestricted", &probe.unrestricted, &mut table);
    Ok(Report {
        verb: "probe",
        theory: Some(gamma.theory.to_string()),
        bounds,
        results: json!({
            "restricted": scope_probe_json(&probe.restricted),
            "unrestricted": scope_probe_json(&probe.unrestricted),
        }),
        caveats: vec![
            "verdict hints are evidence from a bounded universe, not classifications".into(),
        ],
        table,
    })
}

fn run_sigma_z(theory: Option<&TheoryId>, problem: &Path, count: usize) -> Result<Report> {
    let gamma = load_problem(problem, theory)?;
    let vars = gamma.vars();
    let set = unify_theory(&gamma)?;
    let (sigma, x0) = set
        .unifiers
        .iter()
        .find_map(|s| {
            s.var_range()
                .into_iter()
                .find(|v| !vars.contains(v))
                .map(|x0| (s.clone(), x0))
        })
        .ok_or_else(|| {
            Error::Invalid(
                "no unifier introduces a variable outside the problem; the swap family needs one"
                    .into(),
            )
        })?;
    let footprint = sigma.footprint();
    let mut gen = FreshVarGen::avoiding(footprint.iter().chain(vars.iter()));
    let zs: Vec<String> = (0..count).map(|_| gen.fresh()).collect();
    let family = sigma_z_family(&sigma, &x0, &zs)?;
    let restricted = Scope::VarSet(vars.clone());
    let mut incomparable = Flag::Yes;
    let mut equiv = Flag::Yes;
    let mut pairs = 0usize;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            pairs += 1;
            let cmp = compare(&gamma.theory, &family[i], &family[j], &Scope::AllVars)?;
            incomparable = and_flag(incomparable, cmp.incomparable());
            let eq = equivalent(&gamma.theory, &family[i], &family[j], &restricted)?;
            equiv = and_flag(equiv, eq);
        }
    }
    let mut caveats = Vec::new();
    if incomparable == Flag::Unknown || equiv == Flag::Unknown {
        caveats.push("some pairwise comparisons were undecided".into());
    }
    let mut table = vec![format!("base: {sigma}"), format!("swap variable: {x0}")];
    for (i, v) in family.iter().enumerate() {
        table.push(format!("variant {}: {v}", i + 1));
    }
    table.push(format!("pairs compared: {pairs}"));
    table.push(format!("pairwise incomparable under all variables: {incomparable}"));
    table.push(format!("pairwise equivalent on problem variables: {equiv}"));
    Ok(Report {
        verb: "sigma-z",
        theory: Some(gamma.theory.to_string()),
        bounds: Map::new(),
        results: json!({
            "base": sigma.to_string(),
            "swap_variable": x0,
            "variants": jstrings(&family),
            "pairs_compared": pairs,
            "pairwise_incomparable_everywhere": incomparable.to_string(),
            "pairwise_equivalent_on_problem_variables": equiv.to_string(),
        }),
        caveats,
        table,
    })
}

fn run_hilbert(system: &Path) -> Result<Report> {
    let sys = parse_dio_system(&read_file(system)?)?;
    if sys.is_homogeneous() {
        let basis = hilbert_basis(&sys)?;
        let mut table = vec![
            format!("unknowns: {}", tuple_str(&basis.unknowns)),
            format!("basis vectors: {}", basis.vectors.len()),
        ];
        for v in &basis.vectors {
            table.push(format!("  {}", tuple_str(v)));
        }
        Ok(Report {
            verb: "hilbert",
            theory: None,
            bounds: Map::new(),
            results: json!({
                "homogeneous": true,
                "unknowns": basis.unknowns,
                "basis": Value::Array(basis.vectors.iter().map(jstrings).collect()),
            }),
            caveats: Vec::new(),
            table,
        })
    } else {
        let (minimal, basis) = min_solutions_inhomogeneous(&sys)?;
        let mut table = vec![
            format!("unknowns: {}", tuple_str(&basis.unknowns)),
            format!("minimal solutions: {}", minimal.len()),
        ];
        for v in &minimal {
            table.push(format!("  {}", tuple_str(v)));
        }
        table.push(format!("homogeneous basis vectors: {}", basis.vectors.len()));
        for v in &basis.vectors {
            table.push(format!("  {}", tuple_str(v)));
        }
        Ok(Report {
            verb: "hilbert",
            theory: None,
            bounds: Map::new(),
            results: json!({
                "homogeneous": false,
                "unknowns": basis.unknowns,
                "minimal_solutions": Value::Array(minimal.iter().map(jstrings).collect()),
                "basis": Value::Array(basis.vectors.iter().map(jstrings).collect()),
            }),
            caveats: Vec::new(),
            table,
        })
    }
}

fn run_shrink(id: &TheoryId, sigma: &Path, theta: &Path, witness: &Path) -> Result<Report> {
    let sig = theory_info(id).signature;
    let s = load_substitution(sigma, &sig)?;
    let t = load_substitution(theta, &sig)?;
    let lambda = load_substitution(witness, &sig)?;
    let cert = shrink_general(id, &s, &t, &lambda)?;
    let contained = cert.sigma_prime.footprint().is_subset(&t.footprint());
    Ok(Report {
        verb: "shrink",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "sigma_prime": cert.sigma_prime.to_string(),
            "forward_witness": cert.forward_witness.to_string(),
            "backward_witness": cert.backward_witness.to_string(),
            "within_theta_footprint": contained,
        }),
        caveats: Vec::new(),
        table: vec![
            format!("sigma': {}", cert.sigma_prime),
            format!("forward witness: {}", cert.forward_witness),
            format!("backward witness: {}", cert.backward_witness),
            format!(
                "within theta's footprint: {}",
                if contained { "yes" } else { "no" }
            ),
        ],
    })
}

fn run_poset(id: &TheoryId, theta: &Path, depth: usize) -> Result<Report> {
    let sig = theory_info(id).signature;
    let t = load_substitution(theta, &sig)?;
    let poset = more_general_poset(id, &t, depth)?;
    let mut bounds = Map::new();
    bounds.insert("depth".into(), json!(depth));
    let mut table = vec![format!("classes: {}", poset.classes.len())];
    for (i, c) in poset.classes.iter().enumerate() {
        table.push(format!("  {i}: {c}"));
    }
    table.push(format!("edges (more general first): {}", poset.edges.len()));
    for (i, j) in &poset.edges {
        table.push(format!("  {i} -> {j}"));
    }
    table.push(format!(
        "minimal classes: {}",
        tuple_str(&poset.minimal_classes)
    ));
    table.push(format!("undecided pairs: {}", poset.undecided_pairs));
    Ok(Report {
        verb: "poset",
        theory: Some(id.to_string()),
        bounds,
        results: json!({
            "classes": jstrings(&poset.classes),
            "edges": poset.edges.iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
            "minimal_classes": poset.minimal_classes,
            "undecided_pairs": poset.undecided_pairs,
        }),
        caveats: vec!["classes come from images generated up to the depth bound".into()],
        table,
    })
}

/// Blocks of `x := term` lines separated by `--` lines; `identity` names the
/// identity substitution. A trailing separator is ignored.
fn parse_chain(text: &str, sig: &Signature) -> Result<Vec<Substitution>> {
    let mut segments: Vec<Vec<&str>> = vec![Vec::new()];
    for line in text.lines() {
        if line.trim() == "--" {
            segments.push(Vec::new());
        } else {
            segments.last_mut().expect("nonempty").push(line);
        }
    }
    let count = segments.len();
    let mut chain = Vec::new();
    for (i, segment) in segments.iter().enumerate() {
        let meaningful: Vec<&str> = segment
            .iter()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if meaningful.is_empty() {
            if i + 1 == count {
                continue;
            }
            return Err(Error::Parse(format!(
                "chain block {} is empty; write `identity` for the identity substitution",
                i + 1
            )));
        }
        if meaningful == ["identity"] {
            chain.push(Substitution::identity());
            continue;
        }
        let block = segment.join("\n");
        chain.push(
            parse_substitution(&block, sig)
                .map_err(|e| Error::Parse(format!("chain block {}: {e}", i + 1)))?,
        );
    }
    Ok(chain)
}

fn run_chain(id: &TheoryId, file: &Path) -> Result<Report> {
    let sig = theory_info(id).signature;
    let chain = parse_chain(&read_file(file)?, &sig)?;
    let report = verify_descending_chain(id, &chain)?;
    let mut caveats = Vec::new();
    if report.valid == Flag::Unknown {
        caveats.push("some links were undecided".into());
    }
    let mut table = vec![format!("length: {}", chain.len())];
    for link in &report.links {
        table.push(format!("link {}: strict descent {}", link.index + 1, link.strict));
    }
    table.push(format!("valid: {}", report.valid));
    if let Some(i) = report.first_failing {
        table.push(format!("first failing link: {}", i + 1));
    }
    Ok(Report {
        verb: "chain",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "length": chain.len(),
            "links": report
                .links
                .iter()
                .map(|l| json!({"index": l.index, "strict": l.strict.to_string()}))
                .collect::<Vec<_>>(),
            "valid": report.valid.to_string(),
            "first_failing": report.first_failing,
        }),
        caveats,
        table,
    })
}

fn run_vector(id: &TheoryId, basis: &str, term: &str) -> Result<Report> {
    let sig = theory_info(id).signature;
    let t = parse_term(term, &sig)?;
    let names = split_names(basis)?;
    let v = term_to_vector(id, &t, &names)?;
    let mut table = vec![
        format!("semiring: {}", v.kind.name()),
        format!("coordinates: {}", tuple_str(&v.entries)),
    ];
    for (name, entry) in names.iter().zip(&v.entries) {
        table.push(format!("  {name}: {entry}"));
    }
    Ok(Report {
        verb: "vector",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "semiring": v.kind.name(),
            "basis": names,
            "entries": jstrings(&v.entries),
        }),
        caveats: Vec::new(),
        table,
    })
}

fn run_matrix(
    id: &TheoryId,
    sigma: &Path,
    dom: &str,
    ran: Option<&str>,
    apply: Option<&str>,
) -> Result<Report> {
    let sig = theory_info(id).signature;
    let s = load_substitution(sigma, &sig)?;
    let dom_names = split_names(dom)?;
    let ran_names = match ran {
        Some(list) => split_names(list)?,
        None => dom_names.clone(),
    };
    let m = subst_to_matrix(id, &s, &dom_names, &ran_names)?;
    let mut table = vec![format!("semiring: {}", m.kind.name())];
    for (name, row) in dom_names.iter().zip(&m.rows) {
        table.push(format!("row {name}: {}", tuple_str(row)));
    }
    let applied = match apply {
        Some(text) => {
            let t = parse_term(text, &sig)?;
            let v = term_to_vector(id, &t, &dom_names)?;
            let out = apply_via_matrix(&v, &m)?;
            let image = vector_to_term(id, &out, &ran_names)?;
            table.push(format!("input coordinates: {}", tuple_str(&v.entries)));
            table.push(format!("image coordinates: {}", tuple_str(&out.entries)));
            table.push(format!("image term: {image}"));
            json!({
                "term": t.to_string(),
                "input": jstrings(&v.entries),
                "image": jstrings(&out.entries),
                "image_term": image.to_string(),
            })
        }
        None => Value::Null,
    };
    Ok(Report {
        verb: "matrix",
        theory: Some(id.to_string()),
        bounds: Map::new(),
        results: json!({
            "semiring": m.kind.name(),
            "dom": dom_names,
            "ran": ran_names,
            "rows": m.rows.iter().map(jstrings).collect::<Vec<_>>(),
            "applied": applied,
        }),
        caveats: Vec::new(),
        table,
    })
}

/// Largest sample the quadratic and cubic window scans stay quick on.
const SAMPLE_CAP: usize = 64;

fn parse_semiring_spec(spec: &str) -> Result<SemiringKind> {
    let lower = spec.trim().to_ascii_lowercase();
    let (head, param) = match lower.split_once(':') {
        Some((h, p)) => (h, Some(p)),
        None => (lower.as_str(), None),
    };
    let count = |param: Option<&str>| -> Result<usize> {
        let k: usize = param
            .unwrap_or("1")
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad count in semiring spec `{spec}`")))?;
        if k == 0 {
            return Err(Error::Parse("the count must be at least 1".into()));
        }
        Ok(k)
    };
    match head {
        "nat" if param.is_none() => Ok(SemiringKind::Nat),
        "int" if param.is_none() => Ok(SemiringKind::Int),
        "words" => {
            let k = count(param)?;
            if k > 26 {
                return Err(Error::Parse("at most 26 letters".into()));
            }
            let alphabet = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
            Ok(SemiringKind::WordSets { alphabet })
        }
        "poly" => Ok(SemiringKind::NatPoly { indeterminates: count(param)? }),
        _ => Err(Error::Parse(format!(
            "unknown semiring `{spec}`; use nat, int, words:k, or poly:k"
        ))),
    }
}

fn sample_for(kind: &SemiringKind, window: u32) -> Result<Vec<SemiringValue>> {
    Ok(match kind {
        SemiringKind::Nat => nat_window(u64::from(window)),
        SemiringKind::Int => int_window(i64::from(window)),
        SemiringKind::WordSets { alphabet } => language_sample(alphabet, window as usize),
        SemiringKind::NatPoly { indeterminates } => poly_window(*indeterminates, window)?,
    })
}

fn run_restrictive(spec: &str, window: u32) -> Result<Report> {
    let kind = parse_semiring_spec(spec)?;
    let pre = restrictive_preorder(&kind)?;
    let full = sample_for(&kind, window)?;
    let truncated = full.len() > SAMPLE_CAP;
    let sample: Vec<SemiringValue> = full.into_iter().take(SAMPLE_CAP).collect();
    let report = check_restrictive_window(&pre, &sample)?;
    let laws = semiring_law_violations(&kind, &sample)?;
    let mut caveats = vec!["a clean sample is evidence at this window, not a proof".to_string()];
    if truncated {
        caveats.push(format!("sample truncated to the first {SAMPLE_CAP} elements"));
    }
    let mut bounds = Map::new();
    bounds.insert("window".into(), json!(window));
    bounds.insert("sample_size".into(), json!(report.sample_size));
    let mut table = vec![
        format!("semiring: {}", kind.name()),
        format!("sample: {} elements", report.sample_size),
        format!("pairs checked: {}", report.pairs_checked),
        format!("triples checked: {}", report.triples_checked),
        format!("below sets checked: {}", report.below_sets_checked),
        format!("order violations: {}", report.violations.len()),
    ];
    for v in &report.violations {
        table.push(format!("  {v}"));
    }
    table.push(format!("law violations: {}", laws.len()));
    for v in &laws {
        table.push(format!("  {v}"));
    }
    Ok(Report {
        verb: "restrictive-check",
        theory: None,
        bounds,
        results: json!({
            "semiring": kind.name(),
            "sample_size": report.sample_size,
            "pairs_checked": report.pairs_checked,
            "triples_checked": report.triples_checked,
            "below_sets_checked": report.below_sets_checked,
            "order_violations": report.violations,
            "law_violations": laws,
        }),
        caveats,
        table,
    })
}
