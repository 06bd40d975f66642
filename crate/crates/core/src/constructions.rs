//! Explicit generator families of fixed order `k` on `n` points.
//!
//! Notation: `step_cycle(k, n, a)` is the cycle `(a a+1 .. a+k-1)` read mod `n`,
//! and `seq_step_product(k, n, a, l)` is the product of `l` consecutive step
//! cycles starting at `a`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{classify, Classification};
use crate::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{l} step {k}-cycles do not fit disjointly on {n} points")]
    OverlapError { k: usize, n: usize, l: usize },
    #[error("(k={k}, n={n}) outside the range of {family}: {reason}")]
    RangeError {
        family: Family,
        k: usize,
        n: usize,
        reason: String,
    },
    #[error("k={0} is odd; this family needs even k")]
    OddK(usize),
    #[error("no certified pair of {k}-cycles found on {n} points")]
    SearchExhausted { k: usize, n: usize },
    #[error("case formula undefined for (k={k}, n={n}): {reason}")]
    CaseUndefined { k: usize, n: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Prop61,
    Prop62,
    Miller,
    Conjecture,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Prop61 => "prop61",
            Family::Prop62 => "prop62",
            Family::Miller => "miller",
            Family::Conjecture => "conjecture",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prop61" => Ok(Family::Prop61),
            "prop62" => Ok(Family::Prop62),
            "miller" => Ok(Family::Miller),
            "conjecture" => Ok(Family::Conjecture),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

/// Which branch of a piecewise definition produced a generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionCase {
    pub family: Family,
    pub k: usize,
    pub n: usize,
    pub case_tag: String,
}

/// A constructed generating set with generator names.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub names: Vec<String>,
    pub gens: Vec<Permutation>,
    pub case: ConstructionCase,
}

impl GeneratorSet {
    fn new(family: Family, k: usize, n: usize, tag: impl Into<String>, named: Vec<(&str, Permutation)>) -> Self {
        let (names, gens) = named.into_iter().map(|(s, p)| (s.to_string(), p)).unzip();
        GeneratorSet {
            names,
            gens,
            case: ConstructionCase {
                family,
                k,
                n,
                case_tag: tag.into(),
            },
        }
    }

    pub fn get(&self, name: &str) -> Option<&Permutation> {
        self.names.iter().position(|s| s == name).map(|i| &self.gens[i])
    }
}

fn range_err(family: Family, k: usize, n: usize, reason: impl Into<String>) -> ConstructionError {
    ConstructionError::RangeError {
        family,
        k,
        n,
        reason: reason.into(),
    }
}

pub fn step_cycle(k: usize, n: usize, a: usize) -> Result<Permutation, ConstructionError> {
    if k < 2 || k > n || a >= n {
        return Err(ConstructionError::InvalidParams(format!(
            "step cycle needs 2 <= k <= n and a < n (k={k}, n={n}, a={a})"
        )));
    }
    let cycle: Vec<usize> = (0..k).map(|i| (a + i) % n).collect();
    Ok(Permutation::from_cycles(n, &[cycle]).expect("distinct points mod n"))
}

/// Product of `l` disjoint step `k`-cycles starting at `a`; `l = 0` is the identity.
pub fn seq_step_product(k: usize, n: usize, a: usize, l: usize) -> Result<Permutation, ConstructionError> {
    if k < 2 || k > n || a >= n {
        return Err(ConstructionError::InvalidParams(format!(
            "sequential product needs 2 <= k <= n and a < n (k={k}, n={n}, a={a})"
        )));
    }
    if l > n / k {
        return Err(ConstructionError::OverlapError { k, n, l });
    }
    let cycles: Vec<Vec<usize>> = (0..l)
        .map(|i| (0..k).map(|j| (a + i * k + j) % n).collect())
        .collect();
    Ok(Permutation::from_cycles(n, &cycles).expect("disjoint when l <= n/k"))
}

/// `(a, b, c)` for `k >= 3`, `n >= 2k`.
pub fn prop61_generators(k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    if k < 3 || n < 2 * k {
        return Err(range_err(Family::Prop61, k, n, "needs k >= 3 and n >= 2k"));
    }
    let q = n / k;
    let a = seq_step_product(k, n, 0, q)?;
    let (b, b_tag) = if !n.is_multiple_of(k) {
        (seq_step_product(k, n, k - 1, q)?, "k!|n")
    } else {
        (seq_step_product(k, n, k - 1, q - 1)?, "k|n")
    };
    let (c, c_tag) = if k == 3 {
        (Permutation::from_cycles(n, &[[0, 1, 2]]).unwrap(), "k=3")
    } else {
        let mut cyc = vec![1, 0];
        cyc.extend(2..k);
        (Permutation::from_cycles(n, &[cyc]).unwrap(), "k>3")
    };
    Ok(GeneratorSet::new(
        Family::Prop61,
        k,
        n,
        format!("{b_tag},{c_tag}"),
        vec![("a", a), ("b", b), ("c", c)],
    ))
}

/// At most four even permutations of order `k` (even, `k >= 4`) on `n >= k+2`
/// points: a generating set of `Sym(n-2)` made even with the transposition on
/// the two appended points `n-2, n-1`, plus `t`.
pub fn prop62_generators(k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    if k % 2 == 1 {
        return Err(ConstructionError::OddK(k));
    }
    if k < 4 || n < k + 2 {
        return Err(range_err(Family::Prop62, k, n, "needs even k >= 4 and n >= k+2"));
    }
    let m = n - 2;
    let (base, base_tag) = if m >= 2 * k {
        (prop61_generators(k, m)?, "base=prop61")
    } else {
        (miller_small_pair(k, m)?, "base=miller")
    };
    let swap = Permutation::from_cycles(n, &[[m, m + 1]]).unwrap();
    let mut named: Vec<(String, Permutation)> = Vec::new();
    for (name, g) in base.names.iter().zip(&base.gens) {
        let lifted = g.extend(n);
        if g.is_even() {
            named.push((name.clone(), lifted));
        } else {
            named.push((format!("{name}*"), lifted.compose_unchecked(&swap)));
        }
    }
    // t = (n-2 n-1 3 4 .. k)(1 2) when the point k lies below n-2; for n = k+2
    // the labels are shifted down by one: (n-2 n-1 2 .. k-1)(0 1).
    let (t, t_tag) = if k + 3 <= n {
        let mut cyc = vec![m, m + 1];
        cyc.extend(3..=k);
        (Permutation::from_cycles(n, &[cyc, vec![1, 2]]).unwrap(), "t=standard")
    } else {
        let mut cyc = vec![m, m + 1];
        cyc.extend(2..k);
        (Permutation::from_cycles(n, &[cyc, vec![0, 1]]).unwrap(), "t=shifted")
    };
    named.push(("t".into(), t));
    let (names, gens) = named.into_iter().unzip();
    Ok(GeneratorSet {
        names,
        gens,
        case: ConstructionCase {
            family: Family::Prop62,
            k,
            n,
            case_tag: format!("{base_tag},{t_tag}"),
        },
    })
}

/// The group two `k`-cycles should generate for `k <= n <= 2k-1`.
fn parity_target(k: usize) -> Classification {
    if k.is_multiple_of(2) {
        Classification::Symmetric
    } else {
        Classification::Alternating
    }
}

/// Visits `k`-cycles on `0..n` in lexicographic order of their cycle word,
/// minimum first, stopping when `visit` returns true.
fn for_each_k_cycle(k: usize, n: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        let lo = if cur.is_empty() { 0 } else { cur[0] + 1 };
        for x in lo..n {
            if used[x] {
                continue;
            }
            used[x] = true;
            cur.push(x);
            if rec(k, n, cur, used, visit) {
                return true;
            }
            cur.pop();
            used[x] = false;
        }
        false
    }
    let mut used = vec![false; n];
    rec(k, n, &mut Vec::with_capacity(k), &mut used, &mut visit)
}

/// Two `k`-cycles generating `Sym(n)` (`k` even) or `Alt(n)` (`k` odd) for
/// `3 <= k <= n <= 2k-1`, found by a deterministic search and certified with
/// the group engine.
pub fn miller_small_pair(k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    if k < 3 || n < k || n > 2 * k - 1 {
        return Err(range_err(Family::Miller, k, n, "needs 3 <= k <= n <= 2k-1"));
    }
    let target = parity_target(k);
    let first = step_cycle(k, n, 0)?;
    let certified = |second: &Permutation| classify(&[first.clone(), second.clone()]).ok() == Some(target.clone());
    for s in 1..n {
        let second = step_cycle(k, n, s)?;
        if certified(&second) {
            return Ok(GeneratorSet::new(
                Family::Miller,
                k,
                n,
                format!("step-pair s={s}"),
                vec![("x", first.clone()), ("y", second)],
            ));
        }
    }
    let mut found = None;
    for_each_k_cycle(k, n, |cyc| {
        let second = Permutation::from_cycles(n, &[cyc]).unwrap();
        if certified(&second) {
            found = Some(second);
            true
        } else {
            false
        }
    });
    match found {
        Some(second) => {
            let tag = format!("lex-search {second}");
            Ok(GeneratorSet::new(Family::Miller, k, n, tag, vec![("x", first), ("y", second)]))
        }
        None => Err(ConstructionError::SearchExhausted { k, n }),
    }
}

/// The candidate pair `(a, b)` for generating with two elements of order `k`.
///
/// Case 1: `k` odd, or `k` even with `n/k` odd; `b = (k-1 k k+1) s(k-1, n/k)`,
/// the 3-cycle read mod `n` like every other label.
/// Case 2: `k` even, `n/k` even, `n != k-1 (mod k)`; `b = s(k(n/k)-1, n/k-1)`.
/// Case 3: `k` even, `n/k` even, `n == k-1 (mod k)`; `b = d` as below, which
/// needs `n/k >= 3`.
pub fn conjecture_pair(k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    if k < 3 || n < k {
        return Err(range_err(Family::Conjecture, k, n, "needs n >= k >= 3"));
    }
    let q = n / k;
    let a = seq_step_product(k, n, 0, q)?;
    let (b, tag) = if k % 2 == 1 || q % 2 == 1 {
        let three = Permutation::from_cycles(n, &[[k - 1, k % n, (k + 1) % n]]).map_err(|_| ConstructionError::CaseUndefined {
            k,
            n,
            reason: "3-cycle (k-1 k k+1) degenerates mod n".into(),
        })?;
        (three.compose_unchecked(&seq_step_product(k, n, k - 1, q)?), "case1")
    } else if n % k != k - 1 {
        (seq_step_product(k, n, k * q - 1, q - 1)?, "case2")
    } else {
        if q < 3 {
            return Err(ConstructionError::CaseUndefined {
                k,
                n,
                reason: format!("d needs floor(n/k) >= 3, got {q}"),
            });
        }
        let pairs = seq_step_product(2, n, k * (q - 1) - 1, 2)?;
        let middle = seq_step_product(k, n, 1, q - 2)?;
        let last = step_cycle(k, n, k * q - 1)?;
        let d = pairs.compose_unchecked(&middle).compose_unchecked(&last);
        (d, "case3")
    };
    Ok(GeneratorSet::new(Family::Conjecture, k, n, tag, vec![("a", a), ("b", b)]))
}

/// Dispatch by family name.
pub fn build_family(family: Family, k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    match family {
        Family::Prop61 => prop61_generators(k, n),
        Family::Prop62 => prop62_generators(k, n),
        Family::Miller => miller_small_pair(k, n),
        Family::Conjecture => conjecture_pair(k, n),
    }
}

/// Three or fewer order-`k` elements for every `n >= k`: the Miller pair below
/// `2k`, the three-element family from `2k` on.
pub fn small_generating_set(k: usize, n: usize) -> Result<GeneratorSet, ConstructionError> {
    if n < 2 * k {
        miller_small_pair(k, n)
    } else {
        prop61_generators(k, n)
    }
}

/// The classification the family is expected to reach at `(k, n)`.
pub fn expected_target(family: Family, k: usize) -> Classification {
    match family {
        Family::Prop62 => Classification::Alternating,
        _ => parity_target(k),
    }
}

/// The three pairs for which the conjectured pair is known not to generate.
pub fn is_known_conjecture_exception(k: usize, n: usize) -> bool {
    matches!((k, n), (3, 6) | (3, 7) | (3, 8))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn step_cycles() {
        assert_eq!(step_cycle(4, 15, 14).unwrap(), p("(14 0 1 2)", 15));
        assert_eq!(step_cycle(2, 5, 0).unwrap(), p("(0 1)", 5));
        assert_eq!(step_cycle(5, 5, 3).unwrap().to_string(), "(0 1 2 3 4)");
        assert!(matches!(step_cycle(1, 5, 0), Err(ConstructionError::InvalidParams(_))));
        assert!(matches!(step_cycle(6, 5, 0), Err(ConstructionError::InvalidParams(_))));
        assert!(matches!(step_cycle(3, 5, 5), Err(ConstructionError::InvalidParams(_))));
    }

    #[test]
    fn sequential_products() {
        assert_eq!(
            seq_step_product(4, 15, 6, 3).unwrap(),
            p("(6 7 8 9)(10 11 12 13)(14 0 1 2)", 15)
        );
        assert_eq!(
            seq_step_product(5, 18, 0, 3).unwrap(),
            p("(0 1 2 3 4)(5 6 7 8 9)(10 11 12 13 14)", 18)
        );
        assert_eq!(
            seq_step_product(3, 9, 0, 4),
            Err(ConstructionError::OverlapError { k: 3, n: 9, l: 4 })
        );
        for (k, n) in [(3, 10), (4, 15), (7, 30)] {
            for l in 1..=n / k {
                assert!(seq_step_product(k, n, 2, l).unwrap().has_order(k as u64));
            }
        }
    }

    #[test]
    fn prop61_examples() {
        let set = prop61_generators(5, 18).unwrap();
        assert_eq!(set.get("a").unwrap(), &p("(0 1 2 3 4)(5 6 7 8 9)(10 11 12 13 14)", 18));
        assert_eq!(set.get("b").unwrap(), &p("(4 5 6 7 8)(9 10 11 12 13)(14 15 16 17 0)", 18));
        assert_eq!(set.get("c").unwrap(), &p("(1 0 2 3 4)", 18));
        assert_eq!(set.case.case_tag, "k!|n,k>3");

        let set = prop61_generators(3, 9).unwrap();
        assert_eq!(set.get("c").unwrap(), &p("(0 1 2)", 9));
        assert_eq!(set.get("b").unwrap(), &seq_step_product(3, 9, 2, 2).unwrap());
        assert_eq!(set.case.case_tag, "k|n,k=3");

        assert!(matches!(prop61_generators(5, 9), Err(ConstructionError::RangeError { .. })));
    }

    #[test]
    fn prop61_orders_and_parity() {
        for k in 3..=12 {
            for n in 2 * k..=40 {
                let set = prop61_generators(k, n).unwrap();
                for g in &set.gens {
                    assert!(g.has_order(k as u64), "k={k} n={n} {g}");
                }
                if k % 2 == 1 {
                    assert!(set.gens.iter().all(Permutation::is_even));
                } else {
                    assert!(!set.get("c").unwrap().is_even());
                }
            }
        }
    }

    #[test]
    fn prop62_examples() {
        let set = prop62_generators(4, 12).unwrap();
        let t = set.get("t").unwrap();
        assert_eq!(t, &p("(10 11 3 4)(1 2)", 12));
        assert!(t.has_order(4) && t.is_even());
        // c is odd for even k, so it carries the transposition (10 11)
        let c = prop61_generators(4, 10).unwrap().get("c").unwrap().extend(12);
        assert_eq!(set.get("c*").unwrap(), &c.compose(&p("(10 11)", 12)).unwrap());
        assert!(matches!(prop62_generators(6, 7), Err(ConstructionError::RangeError { .. })));
        assert_eq!(prop62_generators(5, 12).unwrap_err(), ConstructionError::OddK(5));
    }

    #[test]
    fn prop62_outputs_even_of_order_k() {
        for k in (4..=10).step_by(2) {
            for n in k + 2..=30 {
                let set = prop62_generators(k, n).unwrap();
                assert!(set.gens.len() <= 4);
                for g in &set.gens {
                    assert!(g.is_even() && g.has_order(k as u64), "k={k} n={n} {g}");
                }
            }
        }
    }

    #[test]
    fn miller_examples() {
        let set = miller_small_pair(3, 3).unwrap();
        assert_eq!(classify(&set.gens).unwrap(), Classification::Alternating);
        let set = miller_small_pair(5, 7).unwrap();
        assert_eq!(classify(&set.gens).unwrap(), Classification::Alternating);
        assert!(set.gens.iter().all(|g| g.cycle_lengths() == vec![5]));
        assert!(matches!(miller_small_pair(4, 9), Err(ConstructionError::RangeError { .. })));
    }

    #[test]
    fn conjecture_examples() {
        let set = conjecture_pair(4, 16).unwrap();
        assert_eq!(set.case.case_tag, "case2");
        assert_eq!(set.get("b").unwrap(), &p("(15 0 1 2)(3 4 5 6)(7 8 9 10)", 16));

        let set = conjecture_pair(4, 19).unwrap();
        assert_eq!(set.case.case_tag, "case3");
        assert_eq!(
            set.get("b").unwrap(),
            &p("(11 12)(13 14)(1 2 3 4)(5 6 7 8)(15 16 17 18)", 19)
        );

        let set = conjecture_pair(5, 18).unwrap();
        assert_eq!(set.case.case_tag, "case1");
        let b = set.get("b").unwrap();
        assert_eq!(b.cycles().cycles[0], vec![0, 14, 15, 16, 17]);
        assert!(b.to_string().contains("(4 6 7 8 5)"));
        assert!(b.has_order(5));

        // n = 3k-1 with k even lands in case 3 with floor(n/k) = 2
        assert!(matches!(conjecture_pair(4, 11), Err(ConstructionError::CaseUndefined { .. })));
    }

    #[test]
    fn conjecture_case_selection_is_total() {
        for k in 3..=16 {
            for n in k..=120 {
                let q = n / k;
                let expected = if k % 2 == 1 || q % 2 == 1 {
                    "case1"
                } else if n % k != k - 1 {
                    "case2"
                } else {
                    "case3"
                };
                match conjecture_pair(k, n) {
                    Ok(set) => {
                        assert_eq!(set.case.case_tag, expected, "k={k} n={n}");
                        for g in &set.gens {
                            assert!(g.has_order(k as u64), "k={k} n={n} {g}");
                        }
                    }
                    Err(ConstructionError::CaseUndefined { .. }) => {
                        assert_eq!(expected, "case3");
                        assert!(q < 3);
                    }
                    Err(e) => panic!("k={k} n={n}: {e}"),
                }
            }
        }
    }
}
