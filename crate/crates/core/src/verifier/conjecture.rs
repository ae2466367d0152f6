//! Guessing residue rules from direct sums.
//!
//! For each odd `r < 2^m` we look for integers `d_j` with
//! `a(2^m q + r) = sum_j d_j a(2^j q + 2^j - 1)` on sampled `q`, then check
//! the fit on every index up to the validation bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::VerifyError;
use crate::parity::{CoefficientVector, Oracle};
use crate::rulesys::{with_even_rule, ResidueRule, RuleSystem, Term, MAX_MODULUS_EXP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureResult {
    pub coefficients: CoefficientVector,
    pub modulus_exp: u32,
    pub sample_bound: u64,
    pub validation_bound: u64,
    /// Whether `a(2n) = a(n)` held on the validation range.
    pub even_rule: bool,
    pub discovered_rules: Vec<ResidueRule>,
    /// Odd residues with no validated rule.
    pub missing: Vec<u64>,
}

impl ConjectureResult {
    pub fn is_complete(&self) -> bool {
        self.even_rule && self.missing.is_empty()
    }

    /// Assembles `a(0) = 1`, the even rule and the discovered rules.
    pub fn rule_system(&self) -> Result<RuleSystem, VerifyError> {
        if !self.is_complete() {
            return Err(VerifyError::NoRuleFound {
                modulus_exp: self.modulus_exp,
                residues: self.missing.clone(),
            });
        }
        Ok(with_even_rule(self.discovered_rules.clone())?)
    }
}

/// Candidate offsets `2^j - 1` usable for residue `r`, largest first. Only
/// offsets below `r` keep the rule well founded at `q = 0`.
fn basis(m: u32, r: u64) -> Vec<u32> {
    (0..m).rev().filter(|&j| (1u64 << j) - 1 < r).collect()
}

/// Solves `rows * x = rhs` by Gauss-Jordan elimination with free variables
/// set to zero. Returns `None` when inconsistent.
fn solve(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].recip();
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[row].clone();
        for (i, other) in rows.iter_mut().enumerate() {
            if i != row && !other[col].is_zero() {
                let factor = other[col].clone();
                for (x, p) in other.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    if rows[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][cols].clone();
    }
    Some(x)
}

/// Fits and validates rules `a(2^m q + r)` for every odd `r < 2^m`.
/// Values come from direct summation, so `validation_bound` must lie within
/// the oracle bound.
pub fn conjecture_rules(
    c: &CoefficientVector,
    max_modulus_exp: u32,
    sample_bound: u64,
    validation_bound: u64,
) -> Result<ConjectureResult, VerifyError> {
    let m = max_modulus_exp;
    if m == 0 || m > MAX_MODULUS_EXP.min(20) {
        return Err(VerifyError::InvalidArguments(format!(
            "modulus exponent must be in 1..=20, got {m}"
        )));
    }
    if validation_bound < sample_bound {
        return Err(VerifyError::InvalidArguments(
            "validation bound must not be below the sample bound".into(),
        ));
    }
    let a = Oracle::default().sums(c, validation_bound + 1)?;
    let modulus = 1u64 << m;

    let even_rule = (0..=validation_bound / 2).all(|n| a[(2 * n) as usize] == a[n as usize]);

    let mut discovered = Vec::new();
    let mut missing = Vec::new();
    for r in (1..modulus).step_by(2) {
        match fit_residue(&a, m, r, sample_bound, validation_bound) {
            Some(rule) => discovered.push(rule),
            None => missing.push(r),
        }
    }
    Ok(ConjectureResult {
        coefficients: *c,
        modulus_exp: m,
        sample_bound,
        validation_bound,
        even_rule,
        discovered_rules: discovered,
        missing,
    })
}

fn fit_residue(
    a: &[u64],
    m: u32,
    r: u64,
    sample_bound: u64,
    validation_bound: u64,
) -> Option<ResidueRule> {
    let modulus = 1u64 << m;
    let js = basis(m, r);
    let index = |j: u32, q: u64| ((q << j) + (1u64 << j) - 1) as usize;
    let target = |q: u64| (modulus * q + r) as usize;
    let max_q = |bound: u64| {
        if bound < r {
            None
        } else {
            Some((bound - r) / modulus)
        }
    };

    let rows: Vec<Vec<BigRational>> = match max_q(sample_bound) {
        None => Vec::new(),
        Some(top) => (0..=top)
            .map(|q| {
                js.iter()
                    .map(|&j| a[index(j, q)])
                    .chain(std::iter::once(a[target(q)]))
                    .map(|v| BigRational::from_integer(BigInt::from(v)))
                    .collect()
            })
            .collect(),
    };
    let solution = if rows.is_empty() {
        vec![BigRational::zero(); js.len()]
    } else {
        solve(rows, js.len())?
    };
    // Coefficients must be integers; a fractional fit is not a rule.
    let mut coeffs = Vec::with_capacity(js.len());
    for x in &solution {
        if !x.denom().is_one() {
            return None;
        }
        coeffs.push(x.numer().to_i64()?);
    }

    if let Some(top) = max_q(validation_bound) {
        for q in 0..=top {
            let rhs: i128 = js
                .iter()
                .zip(&coeffs)
                .map(|(&j, &d)| d as i128 * a[index(j, q)] as i128)
                .sum();
            if rhs != a[target(q)] as i128 {
                return None;
            }
        }
    }
    let terms = js
        .iter()
        .zip(&coeffs)
        .filter(|(_, &d)| d != 0)
        .map(|(&j, &d)| Term::new(d, 1 << j, (1 << j) - 1))
        .collect();
    ResidueRule::new(m, r, terms).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules_text(res: &ConjectureResult) -> Vec<String> {
        res.discovered_rules.iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn gould_rules() {
        let res = conjecture_rules(&CoefficientVector::new(1, 0, 0, 1), 2, 256, 1024).unwrap();
        assert!(res.is_complete());
        assert_eq!(
            rules_text(&res),
            ["a(4n+1) = +2*a(1n+0)", "a(4n+3) = +2*a(2n+1)"]
        );
    }

    #[test]
    fn fibonacci_rules_and_system() {
        let c = CoefficientVector::new(1, -1, 0, 2);
        let res = conjecture_rules(&c, 2, 256, 1024).unwrap();
        let sys = res.rule_system().unwrap();
        let expected: RuleSystem =
            "a(0) = 1\na(2n) = a(n)\na(4n+1) = a(n)\na(4n+3) = a(2n+1) + a(n)\n"
                .parse()
                .unwrap();
        assert_eq!(sys, expected);
    }

    #[test]
    fn too_small_modulus_reports_missing() {
        // Narayana's transform needs modulus 8.
        let res = conjecture_rules(&CoefficientVector::new(1, -1, 0, 6), 2, 256, 1024).unwrap();
        assert!(!res.is_complete());
        assert!(!res.missing.is_empty());
        assert!(matches!(
            res.rule_system(),
            Err(VerifyError::NoRuleFound { .. })
        ));
    }

    #[test]
    fn argument_checks() {
        let c = CoefficientVector::new(1, 0, 0, 1);
        assert!(conjecture_rules(&c, 0, 10, 10).is_err());
        assert!(conjecture_rules(&c, 2, 100, 10).is_err());
    }

    #[test]
    fn solver_prefers_larger_offsets() {
        // x0 and x1 columns are identical; the first one takes the weight.
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        let rows = vec![vec![q(1), q(1), q(2)], vec![q(3), q(3), q(6)]];
        assert_eq!(solve(rows, 2).unwrap(), vec![q(2), q(0)]);
        let inconsistent = vec![vec![q(1), q(1)], vec![q(1), q(2)]];
        assert!(solve(inconsistent, 1).is_none());
    }
}
