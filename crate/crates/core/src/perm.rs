//! Permutations of `{0, .., n-1}` stored as image tables.
//!
//! Composition is right-to-left: `p.compose(&q)` is the map `x -> p(q(x))`,
//! and the commutator of `p` and `q` is `p^-1 q^-1 p q`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("malformed cycle notation at byte {pos}: {msg}")]
    MalformedCycle { pos: usize, msg: String },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("image table is not a bijection")]
    NotBijective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A permutation of `{0, .., degree-1}`; `images[x]` is the image of `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

/// Disjoint cycles of length at least two, each rotated so its minimum comes
/// first and sorted by that minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub degree: usize,
    pub cycles: Vec<Vec<usize>>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n {
                return Err(PermError::PointOutOfRange { point: y, degree: n });
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(PermError::NotBijective);
            }
        }
        Ok(Permutation {
            images: images.into_iter().map(|y| y as u32).collect(),
        })
    }

    /// Builds the product of the given cycles, which must be pairwise disjoint.
    pub fn from_cycles<C: AsRef<[usize]>>(degree: usize, cycles: &[C]) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            let cycle = cycle.as_ref();
            for &x in cycle {
                if x >= degree {
                    return Err(PermError::PointOutOfRange { point: x, degree });
                }
                if std::mem::replace(&mut used[x], true) {
                    return Err(PermError::RepeatedPoint(x));
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x] = cycle[(i + 1) % cycle.len()] as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses text such as `"(6 7 8 9)(10 11 12 13)"`. Unlisted points are fixed;
    /// `""` and `"()"` both give the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let bytes = text.as_bytes();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(PermError::MalformedCycle {
                    pos,
                    msg: "expected '('".into(),
                });
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos == bytes.len() {
                    return Err(PermError::MalformedCycle {
                        pos,
                        msg: "unterminated cycle".into(),
                    });
                }
                if bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(PermError::MalformedCycle {
                        pos,
                        msg: format!("unexpected character {:?}", bytes[pos] as char),
                    });
                }
                let point: usize = text[start..pos].parse().map_err(|_| PermError::MalformedCycle {
                    pos: start,
                    msg: "point label too large".into(),
                })?;
                cycle.push(point);
            }
            if cycle.len() == 1 {
                // a 1-cycle is the identity on that point but still must be in range
                if cycle[0] >= degree {
                    return Err(PermError::PointOutOfRange {
                        point: cycle[0],
                        degree,
                    });
                }
            }
            cycles.push(cycle);
        }
        Self::from_cycles(degree, &cycles)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&y| y as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// Smallest point not fixed, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(x, &y)| *x as u32 != y)
            .map(|(x, _)| x)
    }

    pub fn support(&self) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|(x, &y)| *x as u32 != y)
            .map(|(x, _)| x)
            .collect()
    }

    /// `x -> self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose_unchecked(other))
    }

    /// As [`compose`](Self::compose) without the degree check; panics on mismatch.
    #[inline]
    pub fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&y| self.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose_unchecked(&sq);
            }
        }
        acc
    }

    /// `p^-1 q^-1 p q`.
    pub fn commutator(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        let pi = self.inverse();
        let qi = other.inverse();
        Ok(pi
            .compose_unchecked(&qi)
            .compose_unchecked(self)
            .compose_unchecked(other))
    }

    /// Lengths of all non-trivial cycles, in order of their minimum point.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().cycles.iter().map(Vec::len).collect()
    }

    pub fn cycles(&self) -> CycleDecomposition {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            cycles.push(cycle);
        }
        CycleDecomposition { degree: n, cycles }
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycle_lengths()
            .into_iter()
            .fold(BigUint::one(), |acc, len| acc.lcm(&BigUint::from(len)))
    }

    /// True when the order is exactly `k`.
    pub fn has_order(&self, k: u64) -> bool {
        self.order() == BigUint::from(k)
    }

    pub fn parity(&self) -> Parity {
        // a cycle of length m contributes m-1 transpositions
        let transpositions: usize = self.cycle_lengths().iter().map(|m| m - 1).sum();
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Extends to a larger degree, fixing the new points.
    pub fn extend(&self, degree: usize) -> Permutation {
        assert!(degree >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Permutation { images }
    }
}

impl CycleDecomposition {
    pub fn to_permutation(&self) -> Result<Permutation, PermError> {
        Permutation::from_cycles(self.degree, &self.cycles)
    }

    pub fn is_single_cycle(&self) -> bool {
        self.cycles.len() == 1
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in &self.cycles {
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cycles().fmt(f)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn parse_sequential_step_example() {
        let s = p("(6 7 8 9)(10 11 12 13)(14 0 1 2)", 15);
        assert_eq!(s.apply(6), 7);
        assert_eq!(s.apply(14), 0);
        assert_eq!(s.apply(2), 14);
        for x in [3, 4, 5] {
            assert_eq!(s.apply(x), x);
        }
        assert_eq!(s.to_string(), "(0 1 2 14)(6 7 8 9)(10 11 12 13)");
        assert_eq!(s.order(), BigUint::from(4u32));
    }

    #[test]
    fn parse_empty_and_errors() {
        assert!(p("", 5).is_identity());
        assert!(p("()", 5).is_identity());
        assert_eq!(
            Permutation::parse_cycles("(0 1)(1 2)", 3),
            Err(PermError::RepeatedPoint(1))
        );
        assert!(matches!(
            Permutation::parse_cycles("(0 3)", 3),
            Err(PermError::PointOutOfRange { point: 3, degree: 3 })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(0 1", 3),
            Err(PermError::MalformedCycle { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("0 1)", 3),
            Err(PermError::MalformedCycle { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(0,1)", 3),
            Err(PermError::MalformedCycle { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let c = p("(0 1 2)", 3);
        assert_eq!(c.compose(&Permutation::identity(3)).unwrap(), c);
        // hand-composed: 2->3->4, 3->4->2, 4->2->3
        let t = p("(2 3 4)", 9);
        assert_eq!(t.compose(&t).unwrap(), p("(2 4 3)", 9));
        let f = p("(0 1 2 3 4)", 5);
        assert!(f.compose(&f.inverse()).unwrap().is_identity());
        assert_eq!(
            f.compose(&Permutation::identity(4)),
            Err(PermError::DegreeMismatch(5, 4))
        );
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let p1 = p("(0 1)", 3);
        let q1 = p("(1 2)", 3);
        // x=0: q fixes 0, p sends 0->1
        assert_eq!(p1.compose(&q1).unwrap().apply(0), 1);
        // x=1: q sends 1->2, p fixes 2
        assert_eq!(p1.compose(&q1).unwrap().apply(1), 2);
    }

    #[test]
    fn power_examples() {
        let f = p("(0 1 2 3 4)", 5);
        assert!(f.pow(5).is_identity());
        assert_eq!(f.pow(-1), p("(0 4 3 2 1)", 5));
        assert!(f.pow(0).is_identity());
        let m = p("(0 1)(2 3 4)", 5);
        // repeated composition, independent of pow
        let mut acc = Permutation::identity(5);
        for i in 1..=6 {
            acc = acc.compose(&m).unwrap();
            assert_eq!(acc.is_identity(), i == 6);
        }
        assert!(m.pow(6).is_identity());
    }

    #[test]
    fn order_and_parity() {
        assert_eq!(Permutation::identity(4).order(), BigUint::one());
        let t = p("(10 11 3 4)(1 2)", 12);
        assert!(t.has_order(4));
        assert!(t.is_even());
        assert!(p("(0 1 2)", 3).is_even());
        assert_eq!(p("(1 0 2 3)", 4).parity(), Parity::Odd);
        assert!(Permutation::identity(3).is_even());
    }

    #[test]
    fn commutator_examples() {
        let a = p("(0 1 2 3 4)(5 6 7 8 9)(10 11 12 13 14)", 18);
        let c = p("(1 0 2 3 4)", 18);
        assert_eq!(a.commutator(&c).unwrap(), p("(0 1 3)", 18));
        assert!(a.commutator(&a).unwrap().is_identity());
    }

    fn perm_strategy(max_n: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_n)
            .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn pair_strategy(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
        (1..=max_n).prop_flat_map(|n| {
            let s = || Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (s(), s(), s()).prop_map(|(a, b, c)| {
                (
                    Permutation::from_images(a).unwrap(),
                    Permutation::from_images(b).unwrap(),
                    Permutation::from_images(c).unwrap(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn cycle_text_round_trip(q in perm_strategy(30)) {
            let text = q.to_string();
            prop_assert_eq!(Permutation::parse_cycles(&text, q.degree()).unwrap(), q.clone());
            prop_assert_eq!(q.cycles().to_permutation().unwrap(), q);
        }

        #[test]
        fn group_laws((x, y, z) in pair_strategy(20)) {
            let lhs = x.compose(&y).unwrap().compose(&z).unwrap();
            let rhs = x.compose(&y.compose(&z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(x.compose(&x.inverse()).unwrap().is_identity());
            prop_assert_eq!(
                x.compose(&y).unwrap().parity(),
                x.parity().combine(y.parity())
            );
        }

        #[test]
        fn order_of_power(q in perm_strategy(25), e in -40i64..40) {
            let m = q.order();
            let g = m.gcd(&BigUint::from(e.unsigned_abs()));
            let expected = if e == 0 { BigUint::one() } else { &m / g };
            prop_assert_eq!(q.pow(e).order(), expected);
            prop_assert!(q.pow(i64::try_from(m.clone()).unwrap_or(0)).is_identity() || m > BigUint::from(u32::MAX));
        }
    }
}
