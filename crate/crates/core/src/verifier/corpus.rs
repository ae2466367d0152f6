//! The bundled F-identity corpus and the generator for its general groups.

use super::statement::{parse_corpus, AffinePair, Guard, IdentityStatement, Rhs};
use crate::parity::CoefficientVector;
use crate::registry::{builtin_entries, lookup};

pub const CORPUS_TEXT: &str = include_str!("../../fixtures/identities.txt");

/// Every statement in the bundled fixture, in file order.
pub fn corpus() -> Vec<IdentityStatement> {
    parse_corpus(CORPUS_TEXT).expect("bundled corpus parses")
}

const I: Rhs = Rhs::F(AffinePair::IDENTITY);

fn pair(p: u64, q: u64, pp: u64, qq: u64) -> AffinePair {
    AffinePair::new(p, q, pp, qq)
}

/// `(x AND NOT y) mod m` in two's complement, so negative entries work.
fn and_not_mod(x: i64, y: i64, m: i64) -> i64 {
    (x & !y).rem_euclid(m)
}

/// Side condition for `F(M n + i, M k) = F(n, k)`: the masked residue
/// vanishes and both scaled entries are small nonnegative residues.
fn reduces(c: &CoefficientVector, i: i64, m: i64) -> bool {
    let (x, y) = (i * c.a3, i * c.a1);
    and_not_mod(x, y, m) == 0 && (0..m).contains(&y) && (0..m).contains(&x)
}

/// Side condition for `F(M n + i, M k) = 0`.
fn vanishes(c: &CoefficientVector, i: i64, m: i64) -> bool {
    and_not_mod(i * c.a3, i * c.a1, m) != 0
}

/// Regenerates the `general-mod4`, `general-mod8` and `general-mod16`
/// statements by evaluating each bullet's side condition at every registry
/// vector (and alias). Unconditional bullets are instantiated at fixed
/// vectors only.
pub fn generated_general_statements() -> Vec<IdentityStatement> {
    let entries = builtin_entries();
    let primary: Vec<CoefficientVector> = entries.iter().map(|e| e.coefficients).collect();
    let every: Vec<CoefficientVector> = entries.iter().flat_map(|e| e.all_coefficients()).collect();
    let at = |name: &str| lookup(name).expect("builtin entry").coefficients;

    let mut out = Vec::new();
    let mut st = |c: CoefficientVector, l: AffinePair, r: Rhs, reference: &str| {
        out.push(IdentityStatement::new(c, l, r, reference));
    };

    // general-mod4
    for &c in &primary {
        st(c, AffinePair::IDENTITY, Rhs::Zero, "general-mod4#1");
        st(c, pair(4, 0, 4, 0), I, "general-mod4#2");
        st(c, pair(2, 0, 2, 0), I, "general-mod4#2");
        for (p, q, pp, qq) in [
            (2, 0, 2, 1),
            (4, 1, 4, 2),
            (4, 1, 4, 3),
            (4, 2, 4, 1),
            (4, 2, 4, 3),
            (4, 0, 4, 1),
            (4, 0, 4, 2),
            (4, 0, 4, 3),
        ] {
            st(c, pair(p, q, pp, qq), Rhs::Zero, "general-mod4#3");
        }
    }
    for &c in &every {
        if (c.a3 == 0 || c.a3 == 1) && (c.a1 == 1 || c.a3 == 0) {
            for l in [pair(4, 1, 4, 0), pair(4, 3, 4, 0), pair(2, 1, 2, 0)] {
                st(c, l, I, "general-mod4#4");
            }
        }
        if reduces(&c, 1, 4) {
            st(c, pair(4, 1, 4, 0), I, "general-mod4#5");
        }
        if vanishes(&c, 1, 4) {
            st(c, pair(4, 1, 4, 0), Rhs::Zero, "general-mod4#6");
        }
        if vanishes(&c, 3, 4) {
            st(c, pair(4, 3, 4, 0), Rhs::Zero, "general-mod4#7");
        }
        if vanishes(&c, 1, 2) {
            st(c, pair(2, 1, 2, 0), Rhs::Zero, "general-mod4#8");
        }
    }

    // general-mod8: (residue of n, residues of k with F = 0)
    let mod8_zero: [(u64, &[u64]); 4] = [
        (0, &[1, 2, 3, 4, 5, 6, 7]),
        (1, &[2, 3, 4, 5, 6, 7]),
        (3, &[4, 5, 6, 7]),
        (5, &[2, 3, 6, 7]),
    ];
    for c in [at("narayana"), at("repeated-integers")] {
        for (b, (r, ks)) in mod8_zero.iter().enumerate() {
            for &i in ks.iter() {
                st(
                    c,
                    pair(8, *r, 8, i),
                    Rhs::Zero,
                    &format!("general-mod8#{}", b + 1),
                );
            }
        }
    }
    for &c in &every {
        for (j, i) in [1i64, 3, 5].into_iter().enumerate() {
            if reduces(&c, i, 8) {
                st(
                    c,
                    pair(8, i as u64, 8, 0),
                    I,
                    &format!("general-mod8#{}", 5 + 2 * j),
                );
            }
            if vanishes(&c, i, 8) {
                st(
                    c,
                    pair(8, i as u64, 8, 0),
                    Rhs::Zero,
                    &format!("general-mod8#{}", 6 + 2 * j),
                );
            }
        }
    }

    // general-mod16
    let mod16_zero: [(u64, &[u64]); 8] = [
        (0, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]),
        (1, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]),
        (3, &[4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]),
        (5, &[2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]),
        (7, &[8, 9, 10, 11, 12, 13, 14, 15]),
        (9, &[2, 3, 4, 5, 6, 7, 10, 11, 12, 13, 14, 15]),
        (11, &[4, 5, 6, 7, 12, 13, 14, 15]),
        (13, &[2, 3, 6, 7, 10, 11, 14, 15]),
    ];
    let lucas = at("extended-lucas");
    for (b, (r, ks)) in mod16_zero.iter().enumerate() {
        for &i in ks.iter() {
            st(
                lucas,
                pair(16, *r, 16, i),
                Rhs::Zero,
                &format!("general-mod16#{}", b + 1),
            );
        }
    }
    for &c in &every {
        for i in [1i64, 3, 5, 7, 9, 11, 13] {
            if reduces(&c, i, 16) {
                st(c, pair(16, i as u64, 16, 0), I, "general-mod16#9");
            }
            if vanishes(&c, i, 16) {
                st(c, pair(16, i as u64, 16, 0), Rhs::Zero, "general-mod16#10");
            }
        }
    }

    for s in out.iter_mut().filter(|s| s.reference == "general-mod4#1") {
        s.guard = Some(Guard::KAboveN);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::Expectation;
    use std::collections::BTreeSet;

    #[test]
    fn generator_reproduces_fixture() {
        let fixture: Vec<IdentityStatement> = corpus()
            .into_iter()
            .filter(|s| s.group().starts_with("general-"))
            .collect();
        assert_eq!(generated_general_statements(), fixture);
    }

    #[test]
    fn side_conditions() {
        let gould = CoefficientVector::new(1, 0, 0, 1);
        assert!(reduces(&gould, 1, 4) && !vanishes(&gould, 1, 4));
        let lucas = CoefficientVector::new(1, 2, 2, -1);
        // 2 AND NOT 1 = 2
        assert!(vanishes(&lucas, 1, 4) && !reduces(&lucas, 1, 4));
        // 6 AND NOT 3 = 4, which is 0 mod 4
        assert!(!vanishes(&lucas, 3, 4));
        assert_eq!(and_not_mod(-1, 0, 8), 7);
    }

    #[test]
    fn corpus_covers_every_bullet() {
        let refs: BTreeSet<String> = corpus().iter().map(|s| s.reference.clone()).collect();
        let mut expected: Vec<String> = Vec::new();
        for (group, bullets) in [
            ("general-mod4", 8),
            ("general-mod8", 10),
            ("general-mod16", 10),
            ("fibonacci", 3),
            ("truncated-fibonacci", 3),
            ("one-plus-powers-of-2", 3),
            ("one-then-twos", 3),
            ("positive-integers", 3),
            ("all-ones", 1),
            ("narayana", 9),
            ("repeated-integers", 11),
            ("extended-lucas", 18),
        ] {
            expected.extend((1..=bullets).map(|b| format!("{group}#{b}")));
        }
        expected.push("extended-lucas#proof".into());
        for r in &expected {
            assert!(refs.contains(r), "no statement for {r}");
        }
        assert_eq!(refs.len(), expected.len(), "unexpected anchors in corpus");
    }

    #[test]
    fn printed_forms_are_paired_with_corrections() {
        let stmts = corpus();
        let fails: Vec<&IdentityStatement> = stmts
            .iter()
            .filter(|s| s.expect == Expectation::Fail)
            .collect();
        assert_eq!(fails.len(), 5);
        for f in fails {
            assert!(stmts
                .iter()
                .any(|s| s.expect == Expectation::Pass && s.reference == f.reference));
        }
        assert!(stmts.len() >= 60);
    }
}
