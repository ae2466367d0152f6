//! Exhaustive range checking: F-identities over `(n, k)` grids, agreement
//! of the three descriptions of a sequence, and rule conjecture.
//!
//! Everything here is a finite check. A PASS says nothing beyond the bound.

mod conjecture;
mod corpus;
mod statement;

use std::fmt;
use std::thread;

use num_bigint::{BigInt, BigUint};

use crate::parity::{CoefficientVector, Oracle, ParityError};
use crate::registry::RegistryEntry;
use crate::rulesys::{RuleError, RuleSystem};
use crate::transform::{rlt_by_runs, BaseSequence, TransformError};

pub use conjecture::{conjecture_rules, ConjectureResult};
pub use corpus::{corpus, generated_general_statements, CORPUS_TEXT};
pub use statement::{
    parse_corpus, AffinePair, Expectation, Guard, IdentityStatement, Rhs, StatementParseError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Parity(#[from] ParityError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Corpus(#[from] StatementParseError),
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("no rule found for residues {residues:?} mod 2^{modulus_exp}")]
    NoRuleFound {
        modulus_exp: u32,
        residues: Vec<u64>,
    },
}

/// Where a check first went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    Pair { n: u64, k: u64 },
    Index { n: u64, detail: String },
    Tuple(Vec<u64>),
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Pair { n, k } => write!(f, "(n,k)=({n},{k})"),
            Counterexample::Index { n, detail } => write!(f, "n={n} ({detail})"),
            Counterexample::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub subject: String,
    pub reference: Option<String>,
    pub expect: Expectation,
    /// Inclusive upper end of the checked range.
    pub bound: u64,
    pub outcome: Outcome,
    /// Points evaluated. For a FAIL this stops at the counterexample.
    pub checked: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// True when the outcome is the one the statement is tagged with.
    pub fn as_expected(&self) -> bool {
        self.passed() == (self.expect == Expectation::Pass)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.outcome {
            Outcome::Pass => None,
            Outcome::Fail(c) => Some(c),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}", self.subject)?;
        if let Some(r) = &self.reference {
            write!(f, " [{r}]")?;
        }
        write!(f, " bound={} checked={}", self.bound, self.checked)?;
        if let Outcome::Fail(c) = &self.outcome {
            write!(f, " at {c}")?;
        }
        if self.expect == Expectation::Fail {
            f.write_str(if self.passed() {
                " (expected fail)"
            } else {
                " (expected)"
            })?;
        }
        Ok(())
    }
}

/// Checks `stmt` for all `0 <= n, k <= bound`, scanning in lexicographic
/// order so the first disagreement is the minimal one.
pub fn check_identity(stmt: &IdentityStatement, bound: u64) -> VerificationReport {
    let mut checked = 0;
    let mut outcome = Outcome::Pass;
    'scan: for n in 0..=bound {
        for k in 0..=bound {
            if !stmt.admits(n, k) {
                continue;
            }
            checked += 1;
            if !stmt.holds_at(n, k) {
                outcome = Outcome::Fail(Counterexample::Pair { n, k });
                break 'scan;
            }
        }
    }
    VerificationReport {
        subject: stmt.claim(),
        reference: Some(stmt.reference.clone()),
        expect: stmt.expect,
        bound,
        outcome,
        checked,
    }
}

/// Order-preserving parallel map.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map(|w| w.get())
        .unwrap_or(1)
        .min(items.len())
        .max(1);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verifier worker panicked"))
            .collect()
    })
}

/// Checks a list of statements; reports come back in input order.
pub fn check_statements(stmts: &[IdentityStatement], bound: u64) -> Vec<VerificationReport> {
    par_map(stmts, |s| check_identity(s, bound))
}

/// Runs the bundled corpus at `bound`.
pub fn check_lemma_corpus(bound: u64) -> Vec<VerificationReport> {
    check_statements(&corpus(), bound)
}

/// Agreement of direct summation, the rule system and the run length
/// transform of `base` for every `n` in `[0, bound]`.
pub fn check_triple(
    c: &CoefficientVector,
    rules: &RuleSystem,
    base: &BaseSequence,
    bound: u64,
    oracle: &Oracle,
) -> Result<VerificationReport, VerifyError> {
    let sums = oracle.sums(
        c,
        bound
            .checked_add(1)
            .ok_or_else(|| VerifyError::InvalidArguments("bound too large".into()))?,
    )?;
    let mut eval = rules.evaluator();
    let mut outcome = Outcome::Pass;
    let mut checked = 0;
    for (n, &direct) in sums.iter().enumerate() {
        let idx = BigUint::from(n);
        // A rule system that goes negative or leaves an index uncovered is a
        // disagreement at that index, not an aborted check.
        let by_rules = eval.eval(&idx).map(BigInt::from);
        let by_runs = rlt_by_runs(base, &idx)?;
        checked += 1;
        let direct = BigInt::from(direct);
        let agree = matches!(&by_rules, Ok(v) if *v == direct) && by_runs == direct;
        if !agree {
            let rules_text = match by_rules {
                Ok(v) => v.to_string(),
                Err(e) => e.to_string(),
            };
            outcome = Outcome::Fail(Counterexample::Index {
                n: n as u64,
                detail: format!("direct={direct} rules={rules_text} runs={by_runs}"),
            });
            break;
        }
    }
    Ok(VerificationReport {
        subject: format!("triple equivalence @ {c}"),
        reference: None,
        expect: Expectation::Pass,
        bound,
        outcome,
        checked,
    })
}

/// [`check_triple`] for the entry's vector and every alias, one report each.
pub fn check_triple_equivalence(
    entry: &RegistryEntry,
    bound: u64,
) -> Result<Vec<VerificationReport>, VerifyError> {
    check_triple_equivalence_with(entry, bound, &Oracle::default())
}

pub fn check_triple_equivalence_with(
    entry: &RegistryEntry,
    bound: u64,
    oracle: &Oracle,
) -> Result<Vec<VerificationReport>, VerifyError> {
    entry
        .all_coefficients()
        .iter()
        .map(|c| {
            let mut report = check_triple(c, &entry.rules, &entry.base, bound, oracle)?;
            report.reference = Some(entry.name.clone());
            Ok(report)
        })
        .collect()
}

/// Compares direct summation at `c` against a printed list of first terms.
pub fn check_printed_terms(
    c: &CoefficientVector,
    printed: &[u64],
    reference: &str,
) -> Result<VerificationReport, VerifyError> {
    let sums = Oracle::default().sums(c, printed.len() as u64)?;
    let mut outcome = Outcome::Pass;
    let mut checked = 0;
    for (n, (&got, &want)) in sums.iter().zip(printed).enumerate() {
        checked += 1;
        if got != want {
            outcome = Outcome::Fail(Counterexample::Index {
                n: n as u64,
                detail: format!("direct={got} printed={want}"),
            });
            break;
        }
    }
    Ok(VerificationReport {
        subject: format!("first {} terms @ {c}", printed.len()),
        reference: Some(reference.to_string()),
        expect: Expectation::Pass,
        bound: printed.len().saturating_sub(1) as u64,
        outcome,
        checked,
    })
}

/// Which right-hand side of the product-of-binomials parity criterion to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductCriterion {
    /// `OR_a (k_a AND NOT k_a) != 0`, the operand as it is often misprinted.
    /// The mask is identically zero, so it claims every product is odd.
    AsPrinted,
    /// `OR_a (k_a AND NOT n_a) != 0`.
    Intended,
}

/// Checks "product of `C(n_a, k_a)` is even iff the criterion mask is
/// nonzero" over all tuples `(n_1, k_1, ..., n_T, k_T)` with entries in
/// `[0, bound]`, lexicographically. Parities come from a Pascal table built
/// by addition, so the check does not lean on the bitwise kernel.
pub fn check_product_rule(
    criterion: ProductCriterion,
    factors: usize,
    bound: u64,
) -> Result<VerificationReport, VerifyError> {
    if factors == 0 || bound > 256 {
        return Err(VerifyError::InvalidArguments(
            "need at least one factor and bound <= 256".into(),
        ));
    }
    let side = bound as usize + 1;
    let mut pascal = vec![vec![false; side]; side];
    for n in 0..side {
        pascal[n][0] = true;
        for k in 1..=n {
            pascal[n][k] = pascal[n - 1][k - 1] ^ pascal[n - 1][k];
        }
    }
    let width = 2 * factors;
    let mut tuple = vec![0u64; width];
    let mut checked = 0;
    let mut outcome = Outcome::Pass;
    loop {
        checked += 1;
        let odd = tuple
            .chunks(2)
            .all(|p| pascal[p[0] as usize][p[1] as usize]);
        let mask = tuple.chunks(2).fold(0u64, |acc, p| {
            acc | match criterion {
                ProductCriterion::AsPrinted => p[1] & !p[1],
                ProductCriterion::Intended => p[1] & !p[0],
            }
        });
        if odd != (mask == 0) {
            outcome = Outcome::Fail(Counterexample::Tuple(tuple.clone()));
            break;
        }
        // Odometer, last position fastest.
        let mut i = width;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if tuple[i] < bound {
                tuple[i] += 1;
                break;
            }
            tuple[i] = 0;
        }
        if tuple.iter().all(|&x| x == 0) {
            break;
        }
    }
    let claim = match criterion {
        ProductCriterion::AsPrinted => "k AND NOT k",
        ProductCriterion::Intended => "k AND NOT n",
    };
    Ok(VerificationReport {
        subject: format!("product of {factors} binomials is even iff OR of ({claim}) != 0"),
        reference: None,
        expect: match criterion {
            ProductCriterion::AsPrinted => Expectation::Fail,
            ProductCriterion::Intended => Expectation::Pass,
        },
        bound,
        outcome,
        checked,
    })
}
