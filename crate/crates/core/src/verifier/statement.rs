//! Checkable identities `F(pn+q, p'k+q') = 0 | F(un+v, u'k+v')` and the
//! line format used by the corpus fixture:
//!
//! ```text
//! F(4n+3,4k+1) = F(1n+0,1k+0) @ coeffs=1,-1,0,2 expect=pass ref="fibonacci#2"
//! F(1n+0,1k+0) = 0 @ coeffs=1,0,0,1 expect=pass ref="general-mod4#1" when="k>n"
//! ```

use std::fmt;
use std::str::FromStr;

use crate::parity::{f_value_u64, CoefficientVector, Parity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct StatementParseError {
    pub line: usize,
    pub message: String,
}

/// The argument pair `(n_scale * n + n_offset, k_scale * k + k_offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePair {
    pub n_scale: u64,
    pub n_offset: u64,
    pub k_scale: u64,
    pub k_offset: u64,
}

impl AffinePair {
    pub const IDENTITY: AffinePair = AffinePair::new(1, 0, 1, 0);

    pub const fn new(n_scale: u64, n_offset: u64, k_scale: u64, k_offset: u64) -> Self {
        AffinePair {
            n_scale,
            n_offset,
            k_scale,
            k_offset,
        }
    }

    fn validate(&self) -> Result<(), String> {
        for (scale, offset) in [(self.n_scale, self.n_offset), (self.k_scale, self.k_offset)] {
            if !scale.is_power_of_two() {
                return Err(format!("multiplier {scale} is not a power of two"));
            }
            if offset >= scale && scale > 1 {
                return Err(format!(
                    "offset {offset} is not below its multiplier {scale}"
                ));
            }
            if scale == 1 && offset != 0 {
                return Err("unit multiplier requires a zero offset".into());
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, n: u64, k: u64) -> (u64, u64) {
        (
            self.n_scale * n + self.n_offset,
            self.k_scale * k + self.k_offset,
        )
    }
}

impl fmt::Display for AffinePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F({}n+{},{}k+{})",
            self.n_scale, self.n_offset, self.k_scale, self.k_offset
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rhs {
    Zero,
    F(AffinePair),
}

/// Restricts the checked `(n, k)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    /// Only pairs with `k > n`.
    KAboveN,
}

impl Guard {
    fn admits(self, n: u64, k: u64) -> bool {
        match self {
            Guard::KAboveN => k > n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expectation {
    Pass,
    Fail,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Pass => "pass",
            Expectation::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdentityStatement {
    pub coefficients: CoefficientVector,
    pub lhs: AffinePair,
    pub rhs: Rhs,
    pub guard: Option<Guard>,
    pub expect: Expectation,
    /// `<group>#<bullet>` anchor.
    pub reference: String,
}

impl IdentityStatement {
    pub fn new(
        coefficients: CoefficientVector,
        lhs: AffinePair,
        rhs: Rhs,
        reference: &str,
    ) -> Self {
        IdentityStatement {
            coefficients,
            lhs,
            rhs,
            guard: None,
            expect: Expectation::Pass,
            reference: reference.to_string(),
        }
    }

    pub fn group(&self) -> &str {
        self.reference.split('#').next().unwrap_or("")
    }

    pub fn bullet(&self) -> &str {
        self.reference.split('#').nth(1).unwrap_or("")
    }

    /// The claim without bookkeeping fields, e.g. `F(4n+3,4k+1) = F(1n+0,1k+0) @ 1,-1,0,2`.
    pub fn claim(&self) -> String {
        let rhs = match self.rhs {
            Rhs::Zero => "0".to_string(),
            Rhs::F(p) => p.to_string(),
        };
        let guard = match self.guard {
            Some(Guard::KAboveN) => " for k>n",
            None => "",
        };
        format!("{} = {rhs}{guard} @ {}", self.lhs, self.coefficients)
    }

    pub fn admits(&self, n: u64, k: u64) -> bool {
        self.guard.is_none_or(|g| g.admits(n, k))
    }

    /// Whether both sides agree at `(n, k)`.
    #[inline]
    pub fn holds_at(&self, n: u64, k: u64) -> bool {
        let c = &self.coefficients;
        let (ln, lk) = self.lhs.apply(n, k);
        let left = f_value_u64(c, ln, lk);
        let right = match self.rhs {
            Rhs::Zero => Parity::Even,
            Rhs::F(p) => {
                let (rn, rk) = p.apply(n, k);
                f_value_u64(c, rn, rk)
            }
        };
        left == right
    }
}

impl fmt::Display for IdentityStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs = match self.rhs {
            Rhs::Zero => "0".to_string(),
            Rhs::F(p) => p.to_string(),
        };
        write!(
            f,
            "{} = {rhs} @ coeffs={} expect={} ref=\"{}\"",
            self.lhs, self.coefficients, self.expect, self.reference
        )?;
        if let Some(Guard::KAboveN) = self.guard {
            f.write_str(" when=\"k>n\"")?;
        }
        Ok(())
    }
}

fn parse_pair(s: &str) -> Result<AffinePair, String> {
    let inner = s
        .strip_prefix("F(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("expected F(...), found {s:?}"))?;
    let (left, right) = inner
        .split_once(',')
        .ok_or_else(|| format!("expected two arguments in {s:?}"))?;
    let affine = |part: &str, var: char| -> Result<(u64, u64), String> {
        let (scale, offset) = part
            .split_once(var)
            .ok_or_else(|| format!("expected variable {var} in {part:?}"))?;
        let scale = if scale.is_empty() {
            1
        } else {
            scale
                .parse()
                .map_err(|_| format!("bad multiplier {scale:?}"))?
        };
        let offset = match offset.strip_prefix('+') {
            Some(o) => o.parse().map_err(|_| format!("bad offset {o:?}"))?,
            None if offset.is_empty() => 0,
            None => return Err(format!("bad offset {offset:?}")),
        };
        Ok((scale, offset))
    };
    let (n_scale, n_offset) = affine(left, 'n')?;
    let (k_scale, k_offset) = affine(right, 'k')?;
    let pair = AffinePair::new(n_scale, n_offset, k_scale, k_offset);
    pair.validate()?;
    Ok(pair)
}

fn parse_statement(line: &str) -> Result<IdentityStatement, String> {
    let (claim, meta) = line
        .split_once('@')
        .ok_or("missing '@' before the metadata")?;
    let claim: String = claim.chars().filter(|c| !c.is_whitespace()).collect();
    let (lhs, rhs) = claim.split_once('=').ok_or("missing '='")?;
    let lhs = parse_pair(lhs)?;
    let rhs = if rhs == "0" {
        Rhs::Zero
    } else {
        Rhs::F(parse_pair(rhs)?)
    };

    let mut coefficients = None;
    let mut expect = None;
    let mut reference = None;
    let mut guard = None;
    let mut rest = meta.trim();
    while !rest.is_empty() {
        let (key, after) = rest
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in {rest:?}"))?;
        let key = key.trim();
        let (value, remaining) = if let Some(quoted) = after.strip_prefix('"') {
            let end = quoted.find('"').ok_or("unterminated quote")?;
            (&quoted[..end], &quoted[end + 1..])
        } else {
            match after.find(char::is_whitespace) {
                Some(end) => (&after[..end], &after[end..]),
                None => (after, ""),
            }
        };
        match key {
            "coeffs" => {
                coefficients = Some(CoefficientVector::from_str(value).map_err(|e| e.to_string())?)
            }
            "expect" => {
                expect = Some(match value {
                    "pass" => Expectation::Pass,
                    "fail" => Expectation::Fail,
                    other => return Err(format!("expect must be pass or fail, found {other:?}")),
                })
            }
            "ref" => reference = Some(value.to_string()),
            "when" => {
                guard = Some(match value {
                    "k>n" => Guard::KAboveN,
                    other => return Err(format!("unknown guard {other:?}")),
                })
            }
            other => return Err(format!("unknown key {other:?}")),
        }
        rest = remaining.trim_start();
    }
    Ok(IdentityStatement {
        coefficients: coefficients.ok_or("missing coeffs=")?,
        lhs,
        rhs,
        guard,
        expect: expect.unwrap_or(Expectation::Pass),
        reference: reference.ok_or("missing ref=")?,
    })
}

impl FromStr for IdentityStatement {
    type Err = StatementParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_statement(s.trim()).map_err(|message| StatementParseError { line: 1, message })
    }
}

/// Parses a corpus file; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<IdentityStatement>, StatementParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| {
            parse_statement(l.trim()).map_err(|message| StatementParseError {
                line: i + 1,
                message,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let line = "F(4n+3,4k+1) = F(1n+0,1k+0) @ coeffs=1,-1,0,2 expect=pass ref=\"fibonacci#2\"";
        let stmt: IdentityStatement = line.parse().unwrap();
        assert_eq!(stmt.lhs, AffinePair::new(4, 3, 4, 1));
        assert_eq!(stmt.rhs, Rhs::F(AffinePair::IDENTITY));
        assert_eq!(stmt.group(), "fibonacci");
        assert_eq!(stmt.bullet(), "2");
        assert_eq!(stmt.to_string(), line);

        let guarded =
            "F(1n+0,1k+0) = 0 @ coeffs=1,0,0,1 expect=pass ref=\"general-mod4#1\" when=\"k>n\"";
        let stmt: IdentityStatement = guarded.parse().unwrap();
        assert_eq!(stmt.guard, Some(Guard::KAboveN));
        assert_eq!(stmt.to_string(), guarded);
    }

    #[test]
    fn shorthand_arguments() {
        let stmt: IdentityStatement = "F(4n+3, 4k+2) = F(2n+1, 2k+1) @ coeffs=1,0,0,2 ref=\"x#1\""
            .parse()
            .unwrap();
        assert_eq!(stmt.expect, Expectation::Pass);
        let stmt: IdentityStatement = "F(n,k) = 0 @ coeffs=1,0,0,1 ref=\"x#1\" when=\"k>n\""
            .parse()
            .unwrap();
        assert_eq!(stmt.lhs, AffinePair::IDENTITY);
    }

    #[test]
    fn rejects_malformed_statements() {
        for bad in [
            "F(3n+1,4k) = 0 @ coeffs=1,0,0,1 ref=\"x\"",
            "F(4n+5,4k) = 0 @ coeffs=1,0,0,1 ref=\"x\"",
            "F(4n+1,4k) = 0 coeffs=1,0,0,1",
            "F(4n+1,4k) = 0 @ coeffs=1,0,0 ref=\"x\"",
            "F(4n+1,4k) = 0 @ coeffs=1,0,0,1 expect=maybe ref=\"x\"",
            "F(4n+1,4k) = 0 @ coeffs=1,0,0,1",
            "G(4n+1,4k) = 0 @ coeffs=1,0,0,1 ref=\"x\"",
        ] {
            assert!(bad.parse::<IdentityStatement>().is_err(), "{bad}");
        }
        let err = parse_corpus("# c\n\nF(4n+1,4k) = 0 @ coeffs=1,0,0,1 ref=\"a#1\"\nnonsense\n")
            .unwrap_err();
        assert_eq!(err.line, 4);
    }

    #[test]
    fn holds_at_small_cases() {
        let c = CoefficientVector::new(1, -1, 0, 2);
        let mutated = IdentityStatement::new(
            c,
            AffinePair::new(4, 1, 4, 1),
            Rhs::F(AffinePair::IDENTITY),
            "m",
        );
        assert!(!mutated.holds_at(0, 0));
        let stmt = IdentityStatement::new(
            c,
            AffinePair::new(4, 3, 4, 1),
            Rhs::F(AffinePair::IDENTITY),
            "l",
        );
        assert!(stmt.holds_at(0, 0));
    }
}
