//! Parity kernels for binomial coefficients and the product form
//! `F(n,k) = C(a1 n + a2 k, a3 n + a4 k) * C(n,k) mod 2`.
//!
//! Every kernel reduces to a submask test: `C(n,k)` is odd exactly when
//! `k AND-NOT n` is zero.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;
use std::thread;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision nonnegative integer used for `n`, `k` and masks.
pub type Natural = BigUint;

/// Largest `n` the direct summation oracle accepts unless overridden.
pub const DEFAULT_ORACLE_BOUND: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParityError {
    #[error("n = {n} exceeds the oracle bound {bound}; use a rule-system evaluator instead")]
    BoundExceeded { n: u64, bound: u64 },
    #[error("invalid coefficient vector {0:?}: expected four comma-separated integers")]
    BadCoefficients(String),
}

/// The four signed coefficients `(a1, a2, a3, a4)` of `F(n,k)`.
///
/// No sign restriction applies: a negative top or bottom argument makes the
/// binomial factor zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
}

impl CoefficientVector {
    pub const fn new(a1: i64, a2: i64, a3: i64, a4: i64) -> Self {
        CoefficientVector { a1, a2, a3, a4 }
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    fn top_bottom_big(&self, n: &BigUint, k: &BigUint) -> (BigInt, BigInt) {
        let n = BigInt::from_biguint(Sign::Plus, n.clone());
        let k = BigInt::from_biguint(Sign::Plus, k.clone());
        let top = &n * self.a1 + &k * self.a2;
        let bot = &n * self.a3 + &k * self.a4;
        (top, bot)
    }

    fn top_bottom_small(&self, n: u64, k: u64) -> Option<(i128, i128)> {
        let (n, k) = (n as i128, k as i128);
        let top = (self.a1 as i128 * n).checked_add(self.a2 as i128 * k)?;
        let bot = (self.a3 as i128 * n).checked_add(self.a4 as i128 * k)?;
        Some((top, bot))
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a1, self.a2, self.a3, self.a4)
    }
}

impl FromStr for CoefficientVector {
    type Err = ParityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<i64> = trimmed
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ParityError::BadCoefficients(s.to_string()))?;
        match parts.as_slice() {
            &[a1, a2, a3, a4] => Ok(CoefficientVector::new(a1, a2, a3, a4)),
            _ => Err(ParityError::BadCoefficients(s.to_string())),
        }
    }
}

/// Parity of an integer: `Even` is bit 0, `Odd` is bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

impl From<bool> for Parity {
    fn from(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl Mul for Parity {
    type Output = Parity;

    fn mul(self, rhs: Parity) -> Parity {
        Parity::from(self.is_odd() && rhs.is_odd())
    }
}

/// Bits set in `x` and clear in `y`.
pub fn and_not(x: &BigUint, y: &BigUint) -> BigUint {
    x ^ (x & y)
}

/// `C(n,k) mod 2`. Odd iff `k` is a submask of `n`; in particular even for `k > n`.
pub fn binom_parity(n: &BigUint, k: &BigUint) -> Parity {
    Parity::from(and_not(k, n).is_zero())
}

pub fn binom_parity_u64(n: u64, k: u64) -> Parity {
    Parity::from(k & !n == 0)
}

/// Parity of `prod C(n_a, k_a)`; the empty product is odd.
pub fn product_parity(pairs: &[(Natural, Natural)]) -> Parity {
    pairs
        .iter()
        .fold(Parity::Odd, |acc, (n, k)| acc * binom_parity(n, k))
}

/// Result of the mask `g(n,k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GValue {
    /// Some binomial argument is negative, so `F(n,k) = 0`.
    OutOfDomain,
    Mask(Natural),
}

impl GValue {
    pub fn is_zero_mask(&self) -> bool {
        matches!(self, GValue::Mask(m) if m.is_zero())
    }
}

/// `g(n,k) = ((a3 n + a4 k) AND-NOT (a1 n + a2 k)) OR (k AND-NOT n)`.
pub fn g_value(c: &CoefficientVector, n: &BigUint, k: &BigUint) -> GValue {
    let (top, bot) = c.top_bottom_big(n, k);
    match (top.to_biguint(), bot.to_biguint()) {
        (Some(top), Some(bot)) => GValue::Mask(and_not(&bot, &top) | and_not(k, n)),
        _ => GValue::OutOfDomain,
    }
}

/// `F(n,k)`: odd iff `k <= n`, both binomial arguments are nonnegative and
/// `g(n,k) = 0`.
pub fn f_value(c: &CoefficientVector, n: &BigUint, k: &BigUint) -> Parity {
    if let (Some(n), Some(k)) = (n.to_u64(), k.to_u64()) {
        return f_value_u64(c, n, k);
    }
    if k > n {
        return Parity::Even;
    }
    Parity::from(g_value(c, n, k).is_zero_mask())
}

/// Machine-word `F(n,k)`; falls back to big integers if the linear
/// combinations overflow `i128`.
#[inline]
pub fn f_value_u64(c: &CoefficientVector, n: u64, k: u64) -> Parity {
    // k > n always leaves a bit of k outside n, so this also covers k > n.
    if k & !n != 0 {
        return Parity::Even;
    }
    match c.top_bottom_small(n, k) {
        Some((top, bot)) => {
            if top < 0 || bot < 0 {
                return Parity::Even;
            }
            Parity::from((bot as u128) & !(top as u128) == 0)
        }
        None => {
            let (n, k) = (BigUint::from(n), BigUint::from(k));
            Parity::from(g_value(c, &n, &k).is_zero_mask())
        }
    }
}

/// Direct summation `a(n) = sum_{k=0}^{n} F(n,k)`, the Θ(n) reference oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    bound: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            bound: DEFAULT_ORACLE_BOUND,
        }
    }
}

impl Oracle {
    pub fn new(bound: u64) -> Self {
        Oracle { bound }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn sum(&self, c: &CoefficientVector, n: u64) -> Result<u64, ParityError> {
        if n > self.bound {
            return Err(ParityError::BoundExceeded {
                n,
                bound: self.bound,
            });
        }
        Ok(sum_unchecked(c, n))
    }

    /// `[a(0), ..., a(count - 1)]`, spread over the available cores.
    pub fn sums(&self, c: &CoefficientVector, count: u64) -> Result<Vec<u64>, ParityError> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if count - 1 > self.bound {
            return Err(ParityError::BoundExceeded {
                n: count - 1,
                bound: self.bound,
            });
        }
        let workers = thread::available_parallelism()
            .map(|w| w.get())
            .unwrap_or(1)
            .min(count as usize)
            .max(1) as u64;
        if workers == 1 {
            return Ok((0..count).map(|n| sum_unchecked(c, n)).collect());
        }
        // Strided partition: the cost of a(n) grows with n.
        let parts: Vec<Vec<u64>> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    s.spawn(move || {
                        (w..count)
                            .step_by(workers as usize)
                            .map(|n| sum_unchecked(c, n))
                            .collect::<Vec<u64>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut out = vec![0; count as usize];
        for (w, part) in parts.into_iter().enumerate() {
            for (i, v) in part.into_iter().enumerate() {
                out[w + i * workers as usize] = v;
            }
        }
        Ok(out)
    }
}

fn sum_unchecked(c: &CoefficientVector, n: u64) -> u64 {
    (0..=n).filter(|&k| f_value_u64(c, n, k).is_odd()).count() as u64
}

/// `sum_{k=0}^{n} F(n,k)` under the default oracle bound.
pub fn sum_direct(c: &CoefficientVector, n: u64) -> Result<u64, ParityError> {
    Oracle::default().sum(c, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(x: u64) -> Natural {
        BigUint::from(x)
    }

    /// Pascal rows reduced mod 2, built by addition only.
    fn pascal_mod2_rows(max_n: usize) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = vec![vec![1]];
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = vec![1u8; n + 1];
            for k in 1..n {
                row[k] = (prev[k - 1] + prev[k]) % 2;
            }
            rows.push(row);
        }
        rows
    }

    /// Exact binomial over u128, small arguments only.
    fn binom(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    const FIB: CoefficientVector = CoefficientVector::new(1, -1, 0, 2);
    const INTS: CoefficientVector = CoefficientVector::new(1, 1, 1, -1);

    #[test]
    fn binom_parity_examples() {
        assert_eq!(binom_parity(&nat(8), &nat(4)), Parity::Even);
        assert_eq!(binom_parity(&nat(5), &nat(2)), Parity::Even);
        assert_eq!(binom_parity(&nat(7), &nat(3)), Parity::Odd);
        for n in [0u64, 1, 17, u64::MAX] {
            assert_eq!(binom_parity(&nat(n), &nat(0)), Parity::Odd);
        }
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(7, 3), 35);
    }

    #[test]
    fn binom_parity_beyond_machine_words() {
        let n = (BigUint::from(1u8) << 300u32) - 1u8;
        let k = BigUint::from(1u8) << 299u32;
        assert_eq!(binom_parity(&n, &k), Parity::Odd);
        assert_eq!(binom_parity(&k, &n), Parity::Even);
    }

    #[test]
    fn submask_law_against_pascal_rows() {
        let rows = pascal_mod2_rows(1 << 10);
        for (n, row) in rows.iter().enumerate() {
            for (k, &bit) in row.iter().enumerate() {
                assert_eq!(
                    binom_parity_u64(n as u64, k as u64).bit(),
                    bit,
                    "C({n},{k})"
                );
            }
            // k > n
            assert_eq!(binom_parity_u64(n as u64, n as u64 + 1), Parity::Even);
        }
    }

    #[test]
    fn product_parity_examples() {
        assert_eq!(product_parity(&[]), Parity::Odd);
        assert_eq!(
            product_parity(&[(nat(3), nat(1)), (nat(5), nat(4))]),
            Parity::Odd
        );
        assert_eq!(
            product_parity(&[(nat(3), nat(1)), (nat(4), nat(2))]),
            Parity::Even
        );
    }

    #[test]
    fn g_value_examples() {
        assert_eq!(
            g_value(&FIB, &nat(7), &nat(1)),
            GValue::Mask(BigUint::zero())
        );
        assert_eq!(
            g_value(&CoefficientVector::new(1, 1, 1, -1), &nat(0), &nat(0)),
            GValue::Mask(BigUint::zero())
        );
        // top = 0, bot = 2
        assert_eq!(g_value(&FIB, &nat(1), &nat(1)), GValue::Mask(nat(2)));
        // top = 1 - 2 < 0
        assert_eq!(g_value(&FIB, &nat(1), &nat(2)), GValue::OutOfDomain);
    }

    #[test]
    fn f_value_examples() {
        assert_eq!(f_value(&FIB, &nat(7), &nat(2)), Parity::Odd);
        assert_eq!(f_value(&INTS, &nat(3), &nat(1)), Parity::Even);
        assert_eq!(
            f_value(&CoefficientVector::new(1, -1, 0, 1), &nat(6), &nat(2)),
            Parity::Even
        );
        for c in [FIB, INTS, CoefficientVector::new(0, 3, 0, 1)] {
            assert_eq!(f_value(&c, &nat(0), &nat(0)), Parity::Odd);
        }
        // k > n forces zero even when g would vanish
        assert_eq!(
            f_value(&CoefficientVector::new(1, 0, 0, 0), &nat(2), &nat(3)),
            Parity::Even
        );
    }

    #[test]
    fn f_value_big_path_agrees_with_word_path() {
        let c = CoefficientVector::new(i64::MAX, -3, 5, i64::MIN + 1);
        for n in 0..40u64 {
            for k in 0..=n {
                let big = if k > n {
                    Parity::Even
                } else {
                    Parity::from(g_value(&c, &nat(n), &nat(k)).is_zero_mask())
                };
                assert_eq!(f_value_u64(&c, n, k), big);
            }
        }
        // forces the i128 overflow fallback
        let huge = CoefficientVector::new(i64::MAX, i64::MAX, i64::MAX, i64::MAX);
        let n = u64::MAX;
        assert_eq!(
            f_value_u64(&huge, n, n),
            Parity::from(g_value(&huge, &nat(n), &nat(n)).is_zero_mask())
        );
    }

    #[test]
    fn f_value_matches_exact_binomials() {
        for c in [
            FIB,
            INTS,
            CoefficientVector::new(1, 2, 2, -1),
            CoefficientVector::new(0, 3, 0, 1),
        ] {
            for n in 0..24u64 {
                for k in 0..=n {
                    let top = c.a1 * n as i64 + c.a2 * k as i64;
                    let bot = c.a3 * n as i64 + c.a4 * k as i64;
                    let first = if top < 0 || bot < 0 {
                        0
                    } else {
                        binom(top as u64, bot as u64)
                    };
                    let expected = (first * binom(n, k)) % 2;
                    assert_eq!(
                        f_value_u64(&c, n, k).bit() as u128,
                        expected,
                        "{c} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn sum_direct_examples() {
        assert_eq!(sum_direct(&CoefficientVector::new(1, 0, 0, 1), 7), Ok(8));
        assert_eq!(sum_direct(&FIB, 7), Ok(3));
        assert_eq!(sum_direct(&INTS, 7), Ok(4));
        let odd_terms: Vec<u64> = (0..=7)
            .filter(|&k| f_value_u64(&INTS, 7, k).is_odd())
            .collect();
        assert_eq!(odd_terms, vec![0, 4, 6, 7]);
        for c in [
            FIB,
            INTS,
            CoefficientVector::new(1, 0, 0, 1),
            CoefficientVector::new(0, 3, 0, 1),
        ] {
            assert_eq!(sum_direct(&c, 0), Ok(1));
        }
    }

    #[test]
    fn sum_direct_bound() {
        let oracle = Oracle::new(100);
        assert_eq!(
            oracle.sum(&FIB, 101),
            Err(ParityError::BoundExceeded { n: 101, bound: 100 })
        );
        assert!(oracle.sums(&FIB, 102).is_err());
        assert_eq!(oracle.sums(&FIB, 101).unwrap().len(), 101);
        assert_eq!(Oracle::default().bound(), 1 << 24);
    }

    #[test]
    fn sums_match_pointwise() {
        let oracle = Oracle::default();
        let all = oracle.sums(&INTS, 300).unwrap();
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, oracle.sum(&INTS, n as u64).unwrap());
        }
    }

    #[test]
    fn gould_row_sums() {
        let c = CoefficientVector::new(1, 0, 0, 1);
        let sums = Oracle::default().sums(&c, 1 << 12).unwrap();
        for (n, s) in sums.into_iter().enumerate() {
            assert_eq!(s, 1 << (n as u64).count_ones());
        }
    }

    #[test]
    fn all_ones_fixed_point() {
        let c = CoefficientVector::new(1, -1, 0, 1);
        assert!(Oracle::default()
            .sums(&c, 1 << 12)
            .unwrap()
            .iter()
            .all(|&s| s == 1));
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!("1,-1,0,2".parse::<CoefficientVector>().unwrap(), FIB);
        assert_eq!(
            "(1, 2, 2, -1)".parse::<CoefficientVector>().unwrap(),
            CoefficientVector::new(1, 2, 2, -1)
        );
        assert!("1,2,3".parse::<CoefficientVector>().is_err());
        assert!("1,x,3,4".parse::<CoefficientVector>().is_err());
        assert_eq!(FIB.to_string(), "1,-1,0,2");
    }

    proptest! {
        #[test]
        fn lucas_digitwise(n in 0u64..4096, k in 0u64..4096) {
            let digits = (0..13).fold(Parity::Odd, |acc, i| {
                acc * binom_parity_u64((n >> i) & 1, (k >> i) & 1)
            });
            prop_assert_eq!(binom_parity_u64(n, k), digits);
        }

        #[test]
        fn multiplicativity(pairs in proptest::collection::vec((0u64..1 << 20, 0u64..1 << 20), 0..8)) {
            let big: Vec<(Natural, Natural)> = pairs.iter().map(|&(n, k)| (nat(n), nat(k))).collect();
            let expected = pairs.iter().fold(Parity::Odd, |acc, &(n, k)| acc * binom_parity_u64(n, k));
            prop_assert_eq!(product_parity(&big), expected);
        }

        #[test]
        fn central_binomial_even(n in 1u64..1 << 40) {
            prop_assert_eq!(binom_parity_u64(2 * n, n), Parity::Even);
        }

        #[test]
        fn big_and_word_kernels_agree(n in any::<u64>(), k in any::<u64>()) {
            prop_assert_eq!(binom_parity(&nat(n), &nat(k)), binom_parity_u64(n, k));
        }
    }
}
