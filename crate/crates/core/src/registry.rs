//! Named catalog tying coefficient vectors to base sequences, residue rule
//! systems and OEIS A-numbers.

use serde::Serialize;

use crate::parity::CoefficientVector;
use crate::rulesys::RuleSystem;
use crate::transform::{BaseSequence, LinearRecurrence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("no registry entry named {0:?}")]
    NotFound(String),
}

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub name: String,
    pub description: String,
    /// Extra lookup names.
    pub nicknames: Vec<String>,
    pub coefficients: CoefficientVector,
    pub base: BaseSequence,
    pub rules: RuleSystem,
    /// A-number of the base sequence.
    pub oeis_sequence: Option<String>,
    /// A-number of the transformed sequence.
    pub oeis_transform: Option<String>,
    /// Other coefficient vectors generating the same transform.
    pub aliases: Vec<CoefficientVector>,
}

impl RegistryEntry {
    pub fn recurrence(&self) -> Option<&LinearRecurrence> {
        self.base.as_recurrence()
    }

    /// The primary coefficient vector followed by every alias.
    pub fn all_coefficients(&self) -> Vec<CoefficientVector> {
        std::iter::once(self.coefficients)
            .chain(self.aliases.iter().copied())
            .collect()
    }

    fn answers_to(&self, key: &str) -> bool {
        let key = key.trim();
        self.name.eq_ignore_ascii_case(key)
            || self.nicknames.iter().any(|n| n.eq_ignore_ascii_case(key))
            || self
                .oeis_sequence
                .as_deref()
                .is_some_and(|a| a.eq_ignore_ascii_case(key))
            || self
                .oeis_transform
                .as_deref()
                .is_some_and(|a| a.eq_ignore_ascii_case(key))
    }
}

struct Row {
    name: &'static str,
    description: &'static str,
    nicknames: &'static [&'static str],
    coefficients: (i64, i64, i64, i64),
    feedback: &'static [i64],
    initial: &'static [i64],
    rules: &'static str,
    oeis_sequence: Option<&'static str>,
    oeis_transform: Option<&'static str>,
    aliases: &'static [(i64, i64, i64, i64)],
}

const EVEN: &str = "a(0) = 1\na(2n) = a(n)\n";

/// The extended Lucas system with `a(16n+9) = a(2n+1)`.
pub const LUCAS_RULES: &str = "a(0) = 1
a(2n) = a(n)
a(16n+1) = a(n)
a(16n+3) = 2a(n)
a(16n+5) = a(n)
a(16n+7) = a(n)
a(16n+9) = a(2n+1)
a(16n+11) = 2a(2n+1)
a(16n+13) = a(4n+3)
a(16n+15) = a(8n+7) + a(4n+3)
";

/// The extended Lucas system exactly as it circulates in print, with
/// `a(16n+9) = 2a(2n+1)`. It disagrees with direct summation at `n = 9`.
pub const LUCAS_RULES_PRINTED: &str = "a(0) = 1
a(2n) = a(n)
a(16n+1) = a(n)
a(16n+3) = 2a(n)
a(16n+5) = a(n)
a(16n+7) = a(n)
a(16n+9) = 2a(2n+1)
a(16n+11) = 2a(2n+1)
a(16n+13) = a(4n+3)
a(16n+15) = a(8n+7) + a(4n+3)
";

/// Term list printed alongside the extended Lucas system. It contradicts
/// both the system (which forces `a(1) = a(0) = 1`) and direct summation.
pub const LUCAS_TERMS_PRINTED: [u64; 30] = [
    1, 2, 2, 3, 2, 4, 3, 5, 2, 4, 4, 5, 3, 6, 5, 8, 2, 4, 4, 6, 4, 8, 5, 8, 3, 6, 6, 8, 5, 10,
];

const ROWS: &[Row] = &[
    Row {
        name: "powers-of-2",
        description: "1, 2, 4, 8, ... (Gould's sequence as its transform)",
        nicknames: &["gould", "dress", "pow2"],
        coefficients: (1, 0, 0, 1),
        feedback: &[2, 0],
        initial: &[1, 2],
        rules: "a(4n+1) = 2a(n)\na(4n+3) = 2a(2n+1)\n",
        oeis_sequence: Some("A000079"),
        oeis_transform: Some("A001316"),
        aliases: &[],
    },
    Row {
        name: "fibonacci",
        description: "1, 1, 2, 3, 5, 8, ...",
        nicknames: &["fib"],
        coefficients: (1, -1, 0, 2),
        feedback: &[1, 1],
        initial: &[1, 1],
        rules: "a(4n+1) = a(n)\na(4n+3) = a(2n+1) + a(n)\n",
        oeis_sequence: Some("A000045"),
        oeis_transform: Some("A246028"),
        aliases: &[(0, 2, 1, -1), (1, 3, 0, 2), (1, 3, 1, 1)],
    },
    Row {
        name: "truncated-fibonacci",
        description: "1, 2, 3, 5, 8, 13, ...",
        nicknames: &["tfib"],
        coefficients: (0, 3, 0, 1),
        feedback: &[1, 1],
        initial: &[1, 2],
        rules: "a(4n+1) = 2a(n)\na(4n+3) = a(2n+1) + a(n)\n",
        oeis_sequence: None,
        oeis_transform: Some("A245564"),
        // (0, 3*2^m, 0, 2^m) for m = 1, 2 and (0, 3*2^m, 0, 2*2^m) for m = 0, 1, 2
        aliases: &[(0, 6, 0, 2), (0, 12, 0, 4), (0, 3, 0, 2), (0, 6, 0, 4), (0, 12, 0, 8)],
    },
    Row {
        name: "one-plus-powers-of-2",
        description: "1, 1, 2, 4, 8, 16, ...",
        nicknames: &["pow2-shifted"],
        coefficients: (1, 0, 0, 2),
        feedback: &[2, 0],
        initial: &[1, 1],
        rules: "a(4n+1) = a(n)\na(4n+3) = 2a(2n+1)\n",
        oeis_sequence: Some("A011782"),
        oeis_transform: Some("A245195"),
        aliases: &[],
    },
    Row {
        name: "one-then-twos",
        description: "1, 2, 2, 2, 2, ...",
        nicknames: &["twos"],
        coefficients: (1, 2, 0, 2),
        feedback: &[1, 0],
        initial: &[1, 2],
        rules: "a(4n+1) = 2a(n)\na(4n+3) = a(2n+1)\n",
        oeis_sequence: Some("A040000"),
        oeis_transform: None,
        aliases: &[(1, 2, 1, 0)],
    },
    Row {
        name: "positive-integers",
        description: "1, 2, 3, 4, 5, ...",
        nicknames: &["integers"],
        coefficients: (1, 1, 1, -1),
        feedback: &[2, -1],
        initial: &[1, 2],
        rules: "a(4n+1) = 2a(n)\na(4n+3) = 2a(2n+1) - a(n)\n",
        oeis_sequence: Some("A000027"),
        oeis_transform: Some("A106737"),
        aliases: &[(1, 1, 0, 2), (1, 2, 0, 1), (1, 2, 1, 1)],
    },
    Row {
        name: "all-ones",
        description: "1, 1, 1, ... (a fixed point of the transform)",
        nicknames: &["ones"],
        coefficients: (1, -1, 0, 1),
        feedback: &[0, 1],
        initial: &[1, 1],
        rules: "a(4n+1) = a(n)\na(4n+3) = a(n)\n",
        oeis_sequence: Some("A000012"),
        oeis_transform: Some("A000012"),
        aliases: &[],
    },
    Row {
        name: "narayana",
        description: "Narayana's cows: 1, 1, 1, 2, 3, 4, 6, 9, 13, ...",
        nicknames: &["cows"],
        coefficients: (1, -1, 0, 6),
        feedback: &[1, 0, 1],
        initial: &[1, 1, 1],
        rules: "a(8n+1) = a(n)\na(8n+3) = a(n)\na(8n+5) = a(2n+1)\na(8n+7) = a(n) + a(4n+3)\n",
        oeis_sequence: Some("A000930"),
        oeis_transform: None,
        aliases: &[],
    },
    Row {
        name: "repeated-integers",
        description: "1, 1, 2, 2, 3, 3, 4, 4, ...",
        nicknames: &["doubled-integers"],
        coefficients: (1, 3, 0, 6),
        feedback: &[1, 1, -1],
        initial: &[1, 1, 2],
        rules: "a(8n+1) = a(n)\na(8n+3) = 2a(n)\na(8n+5) = a(2n+1)\na(8n+7) = a(4n+3) + a(2n+1) - a(n)\n",
        oeis_sequence: Some("A008619"),
        oeis_transform: None,
        aliases: &[],
    },
    Row {
        name: "extended-lucas",
        description: "Lucas numbers prepended with 1, 1: 1, 1, 2, 1, 3, 4, 7, 11, ...",
        nicknames: &["lucas"],
        coefficients: (1, 2, 2, -1),
        feedback: &[1, 1, 0, 0],
        initial: &[1, 1, 2, 1],
        rules: "",
        oeis_sequence: None,
        oeis_transform: None,
        aliases: &[],
    },
];

fn build(row: &Row) -> RegistryEntry {
    let (a1, a2, a3, a4) = row.coefficients;
    let rules_text = if row.name == "extended-lucas" {
        LUCAS_RULES.to_string()
    } else {
        format!("{EVEN}{}", row.rules)
    };
    RegistryEntry {
        name: row.name.to_string(),
        description: row.description.to_string(),
        nicknames: row.nicknames.iter().map(|s| s.to_string()).collect(),
        coefficients: CoefficientVector::new(a1, a2, a3, a4),
        base: BaseSequence::Recurrence(
            LinearRecurrence::new(row.feedback.to_vec(), row.initial.to_vec())
                .expect("builtin recurrence is well formed"),
        ),
        rules: rules_text
            .parse()
            .expect("builtin rule system is well formed"),
        oeis_sequence: row.oeis_sequence.map(String::from),
        oeis_transform: row.oeis_transform.map(String::from),
        aliases: row
            .aliases
            .iter()
            .map(|&(a1, a2, a3, a4)| CoefficientVector::new(a1, a2, a3, a4))
            .collect(),
    }
}

/// All built-in entries, in table order.
pub fn builtin_entries() -> Vec<RegistryEntry> {
    ROWS.iter().map(build).collect()
}

/// Case-insensitive lookup by name, nickname or A-number.
pub fn lookup(key: &str) -> Result<RegistryEntry, RegistryError> {
    ROWS.iter()
        .map(build)
        .find(|e| e.answers_to(key))
        .ok_or_else(|| RegistryError::NotFound(key.to_string()))
}

/// The printed extended Lucas system.
pub fn lucas_printed_rules() -> RuleSystem {
    LUCAS_RULES_PRINTED
        .parse()
        .expect("printed system is well formed")
}

/// One record of the machine-readable catalog.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogRecord {
    pub name: String,
    pub description: String,
    pub coefficients: [i64; 4],
    pub aliases: Vec<[i64; 4]>,
    pub base_initial: Vec<i64>,
    pub base_feedback: Vec<i64>,
    pub base_terms: Vec<String>,
    pub rules: String,
    pub oeis_sequence: Option<String>,
    pub oeis_transform: Option<String>,
}

pub fn catalog() -> Vec<CatalogRecord> {
    builtin_entries()
        .into_iter()
        .map(|e| {
            let rec = e.recurrence().cloned();
            CatalogRecord {
                name: e.name.clone(),
                description: e.description.clone(),
                coefficients: e.coefficients.as_array(),
                aliases: e.aliases.iter().map(|a| a.as_array()).collect(),
                base_initial: rec
                    .as_ref()
                    .map(|r| r.initial().to_vec())
                    .unwrap_or_default(),
                base_feedback: rec
                    .as_ref()
                    .map(|r| r.feedback().to_vec())
                    .unwrap_or_default(),
                base_terms: e.base.terms(12).iter().map(|t| t.to_string()).collect(),
                rules: e.rules.to_string(),
                oeis_sequence: e.oeis_sequence,
                oeis_transform: e.oeis_transform,
            }
        })
        .collect()
}

/// The catalog as pretty-printed JSON.
pub fn catalog_json() -> String {
    serde_json::to_string_pretty(&catalog()).expect("catalog serializes") + "\n"
}
