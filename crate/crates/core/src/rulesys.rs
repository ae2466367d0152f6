//! Residue-class recurrence systems such as
//! `{a(0) = 1; a(2n) = a(n); a(4n+1) = a(n); a(4n+3) = a(2n+1) + a(n)}`.
//!
//! Textual form, one item per line (`#` starts a comment, whitespace is
//! ignored):
//!
//! ```text
//! a(0) = 1
//! a(2n+0) = +1*a(1n+0)
//! a(4n+3) = +2*a(2n+1) -1*a(1n+0)
//! ```
//!
//! The parser also accepts the shorthand `a(4n+3) = 2a(2n+1) - a(n)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};

/// Largest supported modulus exponent.
pub const MAX_MODULUS_EXP: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("invalid rule {rule}: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("residue {residue} mod 2^{modulus_exp} is covered by two rules")]
    DuplicateRule { modulus_exp: u32, residue: u64 },
    #[error("no rule covers n = {residue} mod 2^{modulus_exp}")]
    Uncovered { modulus_exp: u32, residue: u64 },
    #[error("rule system needs a base value for a(0)")]
    MissingBase,
    #[error("no rule matches index {0}")]
    UncoveredIndex(BigUint),
    #[error("a({index}) evaluated to the negative value {value}")]
    NegativeValue { index: BigUint, value: BigInt },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `coeff * a(2^scale_exp * q + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: i64,
    pub scale_exp: u32,
    pub offset: u64,
}

impl Term {
    pub fn new(coeff: i64, scale: u64, offset: u64) -> Self {
        assert!(
            scale.is_power_of_two(),
            "term scale {scale} is not a power of two"
        );
        Term {
            coeff,
            scale_exp: scale.trailing_zeros(),
            offset,
        }
    }

    pub fn scale(&self) -> u64 {
        1 << self.scale_exp
    }

    fn argument(&self, q: &BigUint) -> BigUint {
        (q << self.scale_exp) + self.offset
    }
}

/// `a(2^modulus_exp * q + residue) = sum(terms)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueRule {
    modulus_exp: u32,
    residue: u64,
    terms: Vec<Term>,
}

impl ResidueRule {
    /// Checks the shape constraints that make every child argument smaller
    /// than its parent for `q >= 1`: scales are below the modulus and
    /// offsets never exceed the residue. The `q = 0` case is checked by
    /// [`RuleSystem::new`], which knows the base values.
    pub fn new(modulus_exp: u32, residue: u64, terms: Vec<Term>) -> Result<Self, RuleError> {
        // Canonical order: widest child first; like terms merged.
        let mut merged: BTreeMap<(std::cmp::Reverse<u32>, std::cmp::Reverse<u64>), i64> =
            BTreeMap::new();
        for t in terms {
            *merged
                .entry((std::cmp::Reverse(t.scale_exp), std::cmp::Reverse(t.offset)))
                .or_insert(0) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, coeff)| coeff != 0)
            .map(|((scale, offset), coeff)| Term {
                coeff,
                scale_exp: scale.0,
                offset: offset.0,
            })
            .collect();
        let rule = ResidueRule {
            modulus_exp,
            residue,
            terms,
        };
        let fail = |reason: String| RuleError::InvalidRule {
            rule: rule.to_string(),
            reason,
        };
        if modulus_exp == 0 || modulus_exp > MAX_MODULUS_EXP {
            return Err(fail(format!(
                "modulus exponent must be in 1..={MAX_MODULUS_EXP}"
            )));
        }
        if residue >= 1 << modulus_exp {
            return Err(fail("residue not below the modulus".into()));
        }
        for t in &rule.terms {
            if t.scale_exp >= modulus_exp {
                return Err(fail(format!(
                    "child scale {} is not below the modulus",
                    t.scale()
                )));
            }
            if t.offset > residue {
                return Err(fail(format!(
                    "child offset {} exceeds the residue",
                    t.offset
                )));
            }
        }
        Ok(rule)
    }

    pub fn modulus_exp(&self) -> u32 {
        self.modulus_exp
    }

    pub fn modulus(&self) -> u64 {
        1 << self.modulus_exp
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn matches(&self, n: &BigUint) -> bool {
        low_bits(n, self.modulus_exp) == self.residue
    }

    fn children(&self, n: &BigUint) -> Vec<(i64, BigUint)> {
        let q = n >> self.modulus_exp;
        self.terms
            .iter()
            .map(|t| (t.coeff, t.argument(&q)))
            .collect()
    }
}

fn low_bits(n: &BigUint, bits: u32) -> u64 {
    let mask = (1u64 << bits) - 1;
    n.iter_u64_digits().next().unwrap_or(0) & mask
}

fn fmt_affine(f: &mut fmt::Formatter<'_>, scale: u64, offset: u64) -> fmt::Result {
    write!(f, "a({scale}n+{offset})")
}

impl fmt::Display for ResidueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_affine(f, self.modulus(), self.residue)?;
        f.write_str(" =")?;
        if self.terms.is_empty() {
            f.write_str(" 0")?;
        }
        for t in &self.terms {
            write!(f, " {:+}*", t.coeff)?;
            fmt_affine(f, t.scale(), t.offset)?;
        }
        Ok(())
    }
}

/// A complete residue-class recurrence with base values.
///
/// Rules are matched longest modulus first, so an even rule `a(2n) = a(n)`
/// coexists with finer odd-residue rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSystem {
    rules: Vec<ResidueRule>,
    base: BTreeMap<u64, BigUint>,
}

impl RuleSystem {
    pub fn new(rules: Vec<ResidueRule>, base: BTreeMap<u64, BigUint>) -> Result<Self, RuleError> {
        if !base.contains_key(&0) {
            return Err(RuleError::MissingBase);
        }
        let mut rules = rules;
        rules.sort_by(|a, b| {
            b.modulus_exp
                .cmp(&a.modulus_exp)
                .then(a.residue.cmp(&b.residue))
        });

        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert((r.modulus_exp, r.residue)) {
                return Err(RuleError::DuplicateRule {
                    modulus_exp: r.modulus_exp,
                    residue: r.residue,
                });
            }
        }

        let sys = RuleSystem { rules, base };
        let top = sys.rules.first().map_or(0, |r| r.modulus_exp);
        if top == 0 {
            return Err(RuleError::Uncovered {
                modulus_exp: 1,
                residue: 0,
            });
        }
        for residue in 0..(1u64 << top) {
            if !sys.rules.iter().any(|r| residue % r.modulus() == r.residue) {
                return Err(RuleError::Uncovered {
                    modulus_exp: top,
                    residue,
                });
            }
        }

        // q = 0: the index equal to the residue must not depend on itself or
        // anything larger, unless it is a base value.
        for r in &sys.rules {
            let n = BigUint::from(r.residue);
            if sys.base.contains_key(&r.residue) || !std::ptr::eq(sys.rule_for(&n).unwrap(), r) {
                continue;
            }
            if let Some(t) = r.terms.iter().find(|t| t.offset >= r.residue) {
                return Err(RuleError::InvalidRule {
                    rule: r.to_string(),
                    reason: format!(
                        "at q = 0 the child a({}) does not precede a({}); add a base value",
                        t.offset, r.residue
                    ),
                });
            }
        }
        Ok(sys)
    }

    pub fn rules(&self) -> &[ResidueRule] {
        &self.rules
    }

    pub fn base(&self) -> &BTreeMap<u64, BigUint> {
        &self.base
    }

    pub fn max_modulus_exp(&self) -> u32 {
        self.rules.first().map_or(0, |r| r.modulus_exp)
    }

    pub fn rule_for(&self, n: &BigUint) -> Option<&ResidueRule> {
        self.rules.iter().find(|r| r.matches(n))
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            sys: self,
            cache: HashMap::new(),
            trace: None,
        }
    }

    pub fn eval(&self, n: &BigUint) -> Result<BigUint, RuleError> {
        self.evaluator().eval(n)
    }

    /// `[a(0), ..., a(count - 1)]` sharing one memo table.
    pub fn first_terms(&self, count: u64) -> Result<Vec<BigUint>, RuleError> {
        let mut ev = self.evaluator();
        (0..count).map(|n| ev.eval(&BigUint::from(n))).collect()
    }
}

impl fmt::Display for RuleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in &self.base {
            writeln!(f, "a({n}) = {v}")?;
        }
        // coarse rules first, then by residue
        let mut rules: Vec<&ResidueRule> = self.rules.iter().collect();
        rules.sort_by_key(|r| (r.modulus_exp, r.residue));
        for r in rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Memoizing evaluator bound to one thread of use.
pub struct Evaluator<'a> {
    sys: &'a RuleSystem,
    cache: HashMap<BigUint, BigUint>,
    trace: Option<Vec<(BigUint, BigUint)>>,
}

impl<'a> Evaluator<'a> {
    /// Records every `(parent, child)` dependency visited from now on.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> &[(BigUint, BigUint)] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn cached_len(&self) -> usize {
        self.cache.len()
    }

    fn lookup_base(&self, n: &BigUint) -> Option<BigUint> {
        n.to_u64()
            .and_then(|small| self.sys.base.get(&small))
            .cloned()
    }

    pub fn eval(&mut self, n: &BigUint) -> Result<BigUint, RuleError> {
        if let Some(v) = self.cache.get(n) {
            return Ok(v.clone());
        }
        let mut stack = vec![n.clone()];
        while let Some(top) = stack.last().cloned() {
            if self.cache.contains_key(&top) {
                stack.pop();
                continue;
            }
            if let Some(v) = self.lookup_base(&top) {
                self.cache.insert(top, v);
                stack.pop();
                continue;
            }
            let rule = self
                .sys
                .rule_for(&top)
                .ok_or_else(|| RuleError::UncoveredIndex(top.clone()))?;
            let children = rule.children(&top);
            let missing: Vec<BigUint> = children
                .iter()
                .map(|(_, c)| c)
                .filter(|c| !self.cache.contains_key(*c))
                .cloned()
                .collect();
            if let Some(trace) = self.trace.as_mut() {
                trace.extend(children.iter().map(|(_, c)| (top.clone(), c.clone())));
            }
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let value: BigInt = children
                .iter()
                .map(|(coeff, c)| BigInt::from(self.cache[c].clone()) * *coeff)
                .sum();
            if value.is_negative() {
                return Err(RuleError::NegativeValue { index: top, value });
            }
            self.cache.insert(top, value.magnitude().clone());
            stack.pop();
        }
        Ok(self.cache[n].clone())
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Cursor<'s> {
    s: &'s [u8],
    pos: usize,
}

impl<'s> Cursor<'s> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!(
                "expected '{}' at column {}",
                c as char,
                self.pos + 1
            ))
        }
    }

    fn number(&mut self) -> Option<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }

    fn done(&self) -> bool {
        self.pos == self.s.len()
    }
}

/// Affine argument inside `a(...)`: either a constant or `<scale>n[+<offset>]`.
enum Arg {
    Const(u64),
    Affine { scale: u64, offset: u64 },
}

fn parse_arg(cur: &mut Cursor<'_>) -> Result<Arg, String> {
    cur.expect(b'a')?;
    cur.expect(b'(')?;
    let lead = cur.number();
    let arg = if cur.eat(b'n') {
        let scale = lead.unwrap_or(1);
        let offset = if cur.eat(b'+') {
            cur.number().ok_or("expected offset after '+'")?
        } else {
            0
        };
        Arg::Affine { scale, offset }
    } else {
        Arg::Const(lead.ok_or("expected an index or affine argument")?)
    };
    cur.expect(b')')?;
    Ok(arg)
}

fn parse_line(line: &str) -> Result<Option<Line>, String> {
    let stripped: String = line
        .split('#')
        .next()
        .unwrap_or("")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if stripped.is_empty() {
        return Ok(None);
    }
    let mut cur = Cursor {
        s: stripped.as_bytes(),
        pos: 0,
    };
    let lhs = parse_arg(&mut cur)?;
    cur.expect(b'=')?;
    match lhs {
        Arg::Const(n) => {
            let v = cur.number().ok_or("expected a nonnegative base value")?;
            if !cur.done() {
                return Err("trailing input after base value".into());
            }
            Ok(Some(Line::Base(n, BigUint::from(v))))
        }
        Arg::Affine { scale, offset } => {
            if !scale.is_power_of_two() || scale < 2 {
                return Err(format!("rule modulus {scale} is not a power of two >= 2"));
            }
            let mut terms = Vec::new();
            if &stripped[cur.pos..] == "0" {
                return Ok(Some(Line::Rule(scale, offset, terms)));
            }
            while !cur.done() {
                let mut sign = 1i64;
                if cur.eat(b'-') {
                    sign = -1;
                } else {
                    cur.eat(b'+');
                }
                let coeff = cur.number().map(|c| c as i64).unwrap_or(1) * sign;
                cur.eat(b'*');
                match parse_arg(&mut cur)? {
                    Arg::Affine { scale, offset } => {
                        if !scale.is_power_of_two() {
                            return Err(format!("child scale {scale} is not a power of two"));
                        }
                        terms.push(Term::new(coeff, scale, offset));
                    }
                    Arg::Const(_) => {
                        return Err("constant child arguments are not supported".into())
                    }
                }
            }
            if terms.is_empty() {
                return Err("rule has no terms".into());
            }
            Ok(Some(Line::Rule(scale, offset, terms)))
        }
    }
}

enum Line {
    Base(u64, BigUint),
    Rule(u64, u64, Vec<Term>),
}

impl FromStr for RuleSystem {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rules = Vec::new();
        let mut base = BTreeMap::new();
        for (i, line) in s.lines().enumerate() {
            let parsed = parse_line(line).map_err(|message| RuleError::Parse {
                line: i + 1,
                message,
            })?;
            match parsed {
                None => {}
                Some(Line::Base(n, v)) => {
                    if base.insert(n, v).is_some() {
                        return Err(RuleError::Parse {
                            line: i + 1,
                            message: format!("duplicate base value a({n})"),
                        });
                    }
                }
                Some(Line::Rule(modulus, residue, terms)) => {
                    rules.push(ResidueRule::new(modulus.trailing_zeros(), residue, terms)?);
                }
            }
        }
        RuleSystem::new(rules, base)
    }
}

/// Builds a system from `a(0) = 1`, the even rule, and odd-residue rules.
pub fn with_even_rule(odd_rules: Vec<ResidueRule>) -> Result<RuleSystem, RuleError> {
    let mut rules = vec![ResidueRule::new(1, 0, vec![Term::new(1, 1, 0)])?];
    rules.extend(odd_rules);
    let base = BTreeMap::from([(0, BigUint::one())]);
    RuleSystem::new(rules, base)
}
