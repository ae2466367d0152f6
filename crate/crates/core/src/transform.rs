//! Run length transform of a base sequence `S` (with `S(0) = 1`):
//! `T(n)` is the product of `S(l)` over the lengths `l` of the maximal runs
//! of 1-bits in `n`.
//!
//! Two independent routes are provided: [`rlt_by_runs`] decomposes `n`
//! directly, while [`RecurrenceTransform`] only ever applies the residue
//! recurrences satisfied by the transform of a linear recurrence sequence.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("malformed recurrence: {0}")]
    MalformedRecurrence(String),
    #[error("base sequence has {available} terms but a run of length {needed} was requested")]
    ExhaustedBase { needed: u64, available: usize },
    #[error("{0} is not splittable (must be odd and not of the form 2^k - 1)")]
    NotSplittable(BigUint),
}

/// Lengths of the maximal 1-bit runs of `n`, lowest run first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunDecomposition {
    runs: Vec<u64>,
}

impl RunDecomposition {
    pub fn runs(&self) -> &[u64] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Run lengths sorted ascending; the transform depends on nothing else.
    pub fn multiset(&self) -> Vec<u64> {
        let mut sorted = self.runs.clone();
        sorted.sort_unstable();
        sorted
    }

    pub fn total_ones(&self) -> u64 {
        self.runs.iter().sum()
    }
}

pub fn runs_of_ones(n: &BigUint) -> RunDecomposition {
    let mut runs = Vec::new();
    let mut current = 0u64;
    for i in 0..n.bits() {
        if n.bit(i) {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    RunDecomposition { runs }
}

/// `S(t+1) = sum_i feedback[i] * S(t - i)` with `S(i) = initial[i]` for
/// `i <= order - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRecurrence {
    feedback: Vec<i64>,
    initial: Vec<i64>,
}

impl LinearRecurrence {
    pub fn new(feedback: Vec<i64>, initial: Vec<i64>) -> Result<Self, TransformError> {
        if feedback.is_empty() {
            return Err(TransformError::MalformedRecurrence(
                "order must be at least 1".into(),
            ));
        }
        if feedback.len() != initial.len() {
            return Err(TransformError::MalformedRecurrence(format!(
                "{} feedback coefficients but {} initial values",
                feedback.len(),
                initial.len()
            )));
        }
        if initial[0] != 1 {
            return Err(TransformError::MalformedRecurrence(format!(
                "initial value S(0) = {} (must be 1)",
                initial[0]
            )));
        }
        if feedback.len() > 16 {
            return Err(TransformError::MalformedRecurrence(
                "order above 16 is not supported".into(),
            ));
        }
        Ok(LinearRecurrence { feedback, initial })
    }

    /// Second-order form: `S(0) = 1, S(1) = c1, S(t+1) = c2 S(t) + c3 S(t-1)`.
    pub fn second_order(c1: i64, c2: i64, c3: i64) -> Self {
        LinearRecurrence {
            feedback: vec![c2, c3],
            initial: vec![1, c1],
        }
    }

    pub fn order(&self) -> usize {
        self.feedback.len()
    }

    pub fn feedback(&self) -> &[i64] {
        &self.feedback
    }

    pub fn initial(&self) -> &[i64] {
        &self.initial
    }

    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self
            .initial
            .iter()
            .take(count)
            .map(|&v| BigInt::from(v))
            .collect();
        while out.len() < count {
            let t = out.len();
            let next = self
                .feedback
                .iter()
                .enumerate()
                .map(|(i, &d)| &out[t - 1 - i] * d)
                .sum();
            out.push(next);
        }
        out
    }
}

/// A base sequence for the transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSequence {
    Recurrence(LinearRecurrence),
    Explicit(Vec<BigInt>),
}

impl BaseSequence {
    pub fn explicit(values: Vec<BigInt>) -> Result<Self, TransformError> {
        if values.first() != Some(&BigInt::one()) {
            return Err(TransformError::MalformedRecurrence(
                "explicit base sequence must start with S(0) = 1".into(),
            ));
        }
        Ok(BaseSequence::Explicit(values))
    }

    pub fn as_recurrence(&self) -> Option<&LinearRecurrence> {
        match self {
            BaseSequence::Recurrence(r) => Some(r),
            BaseSequence::Explicit(_) => None,
        }
    }

    /// `S(0), ..., S(count - 1)`; explicit lists may be shorter.
    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        match self {
            BaseSequence::Recurrence(r) => r.terms(count),
            BaseSequence::Explicit(v) => v.iter().take(count).cloned().collect(),
        }
    }
}

/// `T(n)` as the product of `S(l)` over the run lengths of `n`.
pub fn rlt_by_runs(base: &BaseSequence, n: &BigUint) -> Result<BigInt, TransformError> {
    let runs = runs_of_ones(n);
    let longest = runs.runs().iter().copied().max().unwrap_or(0);
    let needed = usize::try_from(longest)
        .ok()
        .and_then(|l| l.checked_add(1))
        .ok_or(TransformError::ExhaustedBase {
            needed: longest,
            available: 0,
        })?;
    let terms = base.terms(needed);
    if terms.len() < needed {
        return Err(TransformError::ExhaustedBase {
            needed: longest,
            available: terms.len(),
        });
    }
    Ok(runs.runs().iter().map(|&l| &terms[l as usize]).product())
}

/// `mu(n) = (a, b, m)` with `a 2^m + b = n`, `2^m > 2b` and `a` minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub a: BigUint,
    pub b: BigUint,
    pub m: u64,
}

impl fmt::Display for SplitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.m)
    }
}

/// Splits an odd `n` (not all ones) at its most significant 0-bit: the high
/// part is `a`, the part below that bit is `b`.
pub fn mu(n: &BigUint) -> Result<SplitResult, TransformError> {
    let len = n.bits();
    if !n.bit(0) || n.count_ones() == len {
        return Err(TransformError::NotSplittable(n.clone()));
    }
    let zero = (0..len - 1)
        .rev()
        .find(|&i| !n.bit(i))
        .expect("odd n with a 0-bit below its top bit");
    let m = zero + 1;
    let a = n >> m;
    let b = n & ((BigUint::one() << zero) - 1u8);
    Ok(SplitResult { a, b, m })
}

fn mu_small(n: u64) -> (u64, u64, u32) {
    let split = mu(&BigUint::from(n)).expect("residue constant is splittable");
    (
        split.a.to_u64().unwrap(),
        split.b.to_u64().unwrap(),
        split.m as u32,
    )
}

/// Evaluator for the transform of a [`LinearRecurrence`] of order `k + 1`,
/// using only the residue rules modulo `w = 2^(k+1)`:
///
/// * `T(2n) = T(n)`
/// * `T(wn + i) = T(i) T(n)` for odd `i < 2^k`
/// * `T(wn + 2^k + i) = T(b) T(wn / 2^m + a)` for odd `i <= 2^k - 3`, where
///   `mu(2^k + i) = (a, b, m)`
/// * `T(wn + w - 1) = sum_i d_i T(2^(k-i) n + 2^(k-i) - 1)`
///
/// Seeds are `T(2^j - 1) = S(j)` for `j <= k`; other odd constants below
/// `2^k` are split with `mu`. Results are memoized, so the number of distinct
/// subproblems stays polynomial in the bit length of `n`.
#[derive(Debug, Clone)]
pub struct RecurrenceTransform {
    rec: LinearRecurrence,
    /// k
    top_exp: u32,
    /// `mu(2^k + i)` indexed by `(i - 1) / 2`.
    splits: Vec<(u64, u64, u32)>,
    cache: HashMap<BigUint, BigInt>,
}

enum Step {
    Done(BigInt),
    /// value = sum(coeff * product(T(args)))
    Combine(Vec<(i64, Vec<BigUint>)>),
}

impl RecurrenceTransform {
    pub fn new(rec: LinearRecurrence) -> Self {
        let top_exp = (rec.order() - 1) as u32;
        let half = 1u64 << top_exp;
        let splits = (1..half.saturating_sub(2))
            .step_by(2)
            .map(|i| {
                let (a, b, m) = mu_small(half + i);
                assert!(
                    m <= top_exp + 1 && b < half,
                    "split of {} stays inside the block",
                    half + i
                );
                (a, b, m)
            })
            .collect();
        RecurrenceTransform {
            rec,
            top_exp,
            splits,
            cache: HashMap::new(),
        }
    }

    pub fn recurrence(&self) -> &LinearRecurrence {
        &self.rec
    }

    pub fn cached_len(&self) -> usize {
        self.cache.len()
    }

    fn step(&self, n: &BigUint) -> Step {
        if n.is_zero() {
            return Step::Done(BigInt::from(self.rec.initial[0]));
        }
        let tz = n.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            return Step::Combine(vec![(1, vec![n >> tz])]);
        }
        let k = self.top_exp;
        let width = k + 1;
        let half = 1u64 << k;
        let w = half << 1;
        let q: BigUint = n >> width;
        let r = (n & BigUint::from(w - 1)).to_u64().unwrap();

        if r == w - 1 {
            let terms = self
                .rec
                .feedback
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let scale = k - i as u32;
                    let arg = (&q << scale) + ((BigUint::one() << scale) - 1u8);
                    (d, vec![arg])
                })
                .collect();
            return Step::Combine(terms);
        }
        if r < half {
            if !q.is_zero() {
                return Step::Combine(vec![(1, vec![BigUint::from(r), q])]);
            }
            // small odd constant below 2^k
            if (r + 1).is_power_of_two() {
                let j = (r + 1).trailing_zeros() as usize;
                return Step::Done(BigInt::from(self.rec.initial[j]));
            }
            let (a, b, _) = mu_small(r);
            return Step::Combine(vec![(1, vec![BigUint::from(b), BigUint::from(a)])]);
        }
        let (_, b, m) = self.splits[((r - half - 1) / 2) as usize];
        Step::Combine(vec![(1, vec![BigUint::from(b), n >> m])])
    }

    /// `T(n)`.
    pub fn eval(&mut self, n: &BigUint) -> BigInt {
        if let Some(v) = self.cache.get(n) {
            return v.clone();
        }
        // Explicit stack: bit lengths in the thousands would overflow the
        // call stack with plain recursion.
        let mut stack: Vec<BigUint> = vec![n.clone()];
        while let Some(top) = stack.last().cloned() {
            if self.cache.contains_key(&top) {
                stack.pop();
                continue;
            }
            match self.step(&top) {
                Step::Done(v) => {
                    self.cache.insert(top, v);
                    stack.pop();
                }
                Step::Combine(terms) => {
                    let missing: Vec<BigUint> = terms
                        .iter()
                        .flat_map(|(_, args)| args.iter())
                        .filter(|a| !self.cache.contains_key(*a))
                        .cloned()
                        .collect();
                    if missing.is_empty() {
                        let value: BigInt = terms
                            .iter()
                            .map(|(c, args)| {
                                args.iter().map(|a| &self.cache[a]).product::<BigInt>() * *c
                            })
                            .sum();
                        self.cache.insert(top, value);
                        stack.pop();
                    } else {
                        debug_assert!(missing.iter().all(|a| a < &top));
                        stack.extend(missing);
                    }
                }
            }
        }
        self.cache[n].clone()
    }
}

/// One-shot `T(n)` through the residue recurrences.
pub fn rlt_by_recurrence(rec: &LinearRecurrence, n: &BigUint) -> BigInt {
    RecurrenceTransform::new(rec.clone()).eval(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn fib() -> LinearRecurrence {
        LinearRecurrence::second_order(1, 1, 1)
    }

    fn sample_bases() -> Vec<LinearRecurrence> {
        vec![
            fib(),
            LinearRecurrence::second_order(2, 2, 0),
            LinearRecurrence::second_order(2, 2, -1),
            LinearRecurrence::second_order(1, 0, 1),
            LinearRecurrence::new(vec![2], vec![1]).unwrap(),
            LinearRecurrence::new(vec![1], vec![1]).unwrap(),
            LinearRecurrence::new(vec![1, 0, 1], vec![1, 1, 1]).unwrap(),
            LinearRecurrence::new(vec![1, 1, -1], vec![1, 1, 2]).unwrap(),
            LinearRecurrence::new(vec![1, 1, 0, 0], vec![1, 1, 2, 1]).unwrap(),
            LinearRecurrence::new(vec![3, -1, 2, 0, 1], vec![1, -2, 5, 0, 7]).unwrap(),
        ]
    }

    #[test]
    fn runs_examples() {
        assert_eq!(runs_of_ones(&nat(463)).multiset(), vec![3, 4]);
        assert!(runs_of_ones(&nat(0)).is_empty());
        // 413 = 110011101b, lowest run first
        assert_eq!(runs_of_ones(&nat(413)).runs(), &[1, 3, 2]);
        assert_eq!(runs_of_ones(&nat(413)).total_ones(), 6);
    }

    #[test]
    fn rlt_by_runs_examples() {
        let fib = BaseSequence::Recurrence(fib());
        assert_eq!(fib.terms(7), [1, 1, 2, 3, 5, 8, 13].map(BigInt::from));
        assert_eq!(rlt_by_runs(&fib, &nat(463)).unwrap(), BigInt::from(15));
        assert_eq!(rlt_by_runs(&fib, &nat(0)).unwrap(), BigInt::one());
        let ints = BaseSequence::explicit((1..=10).map(BigInt::from).collect()).unwrap();
        assert_eq!(rlt_by_runs(&ints, &nat(7)).unwrap(), BigInt::from(4));
    }

    #[test]
    fn explicit_base_exhaustion() {
        let short = BaseSequence::explicit(vec![BigInt::one(), BigInt::from(2)]).unwrap();
        assert_eq!(rlt_by_runs(&short, &nat(5)).unwrap(), BigInt::from(4));
        assert_eq!(
            rlt_by_runs(&short, &nat(3)),
            Err(TransformError::ExhaustedBase {
                needed: 2,
                available: 2
            })
        );
        assert!(BaseSequence::explicit(vec![BigInt::from(2)]).is_err());
    }

    #[test]
    fn fixed_points() {
        let ones = BaseSequence::explicit(vec![BigInt::one(); 32]).unwrap();
        let mut zeros = vec![BigInt::zero(); 32];
        zeros[0] = BigInt::one();
        let zeros = BaseSequence::explicit(zeros).unwrap();
        for n in 0..(1u64 << 12) {
            assert_eq!(rlt_by_runs(&ones, &nat(n)).unwrap(), BigInt::one());
            let expected = if n == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            assert_eq!(rlt_by_runs(&zeros, &nat(n)).unwrap(), expected);
        }
    }

    #[test]
    fn malformed_recurrences() {
        assert!(LinearRecurrence::new(vec![], vec![]).is_err());
        assert!(LinearRecurrence::new(vec![1, 1], vec![1]).is_err());
        assert!(LinearRecurrence::new(vec![1, 1], vec![2, 1]).is_err());
    }

    #[test]
    fn mu_examples() {
        let split = mu(&nat(413)).unwrap();
        assert_eq!((split.a, split.b, split.m), (nat(3), nat(29), 7));
        assert_eq!(
            mu(&nat(5)).unwrap(),
            SplitResult {
                a: nat(1),
                b: nat(1),
                m: 2
            }
        );
        assert_eq!(mu(&nat(7)), Err(TransformError::NotSplittable(nat(7))));
        assert!(mu(&nat(6)).is_err());
        assert!(mu(&nat(1)).is_err());
        assert!(mu(&nat(0)).is_err());
        assert_eq!(mu(&nat(413)).unwrap().to_string(), "3 29 7");
    }

    #[test]
    fn mu_round_trip_exhaustive() {
        for n in (3u64..1 << 16).step_by(2) {
            if (n + 1).is_power_of_two() {
                continue;
            }
            let s = mu(&nat(n)).unwrap();
            let (a, b, m) = (s.a.to_u64().unwrap(), s.b.to_u64().unwrap(), s.m);
            assert!(a > 0 && b > 0);
            assert_eq!(a * (1 << m) + b, n);
            assert!((1u64 << m) > 2 * b);
            // no smaller a: brute force over all m' and a'
            for m2 in 1..64u64 {
                let a2 = n >> m2;
                let b2 = n - (a2 << m2);
                if a2 > 0 && b2 > 0 && (1u64 << m2) > 2 * b2 {
                    assert!(a2 >= a, "n={n}: a={a} but a'={a2} at m'={m2}");
                }
            }
        }
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(rlt_by_recurrence(&fib(), &nat(15)), BigInt::from(5));
        let pow2 = LinearRecurrence::second_order(2, 2, 0);
        assert_eq!(rlt_by_recurrence(&pow2, &nat(7)), BigInt::from(8));
        for rec in sample_bases() {
            assert_eq!(rlt_by_recurrence(&rec, &nat(0)), BigInt::one());
        }
    }

    #[test]
    fn recurrence_matches_runs() {
        for rec in sample_bases() {
            let base = BaseSequence::Recurrence(rec.clone());
            let mut eval = RecurrenceTransform::new(rec.clone());
            for n in 0..(1u64 << 12) {
                let n = nat(n);
                assert_eq!(
                    eval.eval(&n),
                    rlt_by_runs(&base, &n).unwrap(),
                    "{rec:?} n={n}"
                );
            }
        }
    }

    #[test]
    fn large_argument_memo_stays_small() {
        let mut eval = RecurrenceTransform::new(fib());
        let n = (BigUint::one() << 4000u32) / 3u8; // 1010...10
        let v = eval.eval(&n);
        assert_eq!(v, BigInt::one());
        let all_ones = (BigUint::one() << 90u32) - 1u8;
        let expected = BaseSequence::Recurrence(fib()).terms(91)[90].clone();
        assert_eq!(eval.eval(&all_ones), expected);
        assert!(eval.cached_len() < 100_000);
    }

    proptest! {
        #[test]
        fn even_shift_invariance(n in 0u64..1 << 40, shift in 0u32..20) {
            let base = BaseSequence::Recurrence(fib());
            prop_assert_eq!(
                rlt_by_runs(&base, &(nat(n) << shift)).unwrap(),
                rlt_by_runs(&base, &nat(n)).unwrap()
            );
        }

        #[test]
        fn permutation_invariance(blocks in proptest::collection::vec(1u64..8, 0..6), seed in any::<u64>()) {
            // Rebuild n from the same run lengths in a shuffled order.
            let build = |lens: &[u64]| {
                let mut n = BigUint::zero();
                for &l in lens {
                    n = ((n << (l + 1)) | ((BigUint::one() << l) - 1u8)) << 1u8;
                }
                n
            };
            let mut shuffled = blocks.clone();
            let len = shuffled.len();
            if len > 1 {
                for i in (1..len).rev() {
                    let j = (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize;
                    shuffled.swap(i, j);
                }
            }
            let base = BaseSequence::Recurrence(LinearRecurrence::second_order(2, 2, -1));
            let a = build(&blocks);
            let b = build(&shuffled);
            prop_assert_eq!(runs_of_ones(&a).multiset(), runs_of_ones(&b).multiset());
            prop_assert_eq!(rlt_by_runs(&base, &a).unwrap(), rlt_by_runs(&base, &b).unwrap());
        }
    }
}
