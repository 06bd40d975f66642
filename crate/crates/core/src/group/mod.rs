//! Questions about the group generated by a list of permutations: order,
//! membership, orbits, multiple transitivity, primitivity, and whether it is
//! the full symmetric or alternating group.

mod chain;
mod jordan;

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::StabilizerChain;
pub use jordan::{jordan_certificate, jordan_certificate_named, JordanWitness, JordanWord};

use crate::perm::{Parity, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty generator list")]
    EmptyGeneratorList,
    #[error("generators have different degrees ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
}

/// Exact order of a permutation group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupCard(pub BigUint);

impl GroupCard {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for GroupCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for GroupCard {
    fn from(v: u64) -> Self {
        GroupCard(BigUint::from(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "lowercase")]
pub enum Classification {
    Symmetric,
    Alternating,
    Other(GroupCard),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Symmetric => f.write_str("symmetric"),
            Classification::Alternating => f.write_str("alternating"),
            Classification::Other(order) => write!(f, "other({order})"),
        }
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub(crate) fn check_generators(gens: &[Permutation]) -> Result<usize, GroupError> {
    let first = gens.first().ok_or(GroupError::EmptyGeneratorList)?;
    let n = first.degree();
    if let Some(bad) = gens.iter().find(|g| g.degree() != n) {
        return Err(GroupError::DegreeMismatch(n, bad.degree()));
    }
    Ok(n)
}

pub fn build_chain(gens: &[Permutation]) -> Result<StabilizerChain, GroupError> {
    StabilizerChain::build(gens)
}

pub fn group_order(chain: &StabilizerChain) -> GroupCard {
    chain.order()
}

/// `n!` if some generator is odd, `n!/2` otherwise.
fn parity_bound(gens: &[Permutation], n: usize) -> BigUint {
    let full = factorial(n);
    if gens.iter().any(|g| g.parity() == Parity::Odd) || n < 2 {
        full
    } else {
        full / BigUint::from(2u32)
    }
}

/// Chain for `<gens>`, stopping early once `Alt(n)` or `Sym(n)` is certified.
pub fn build_chain_bounded(gens: &[Permutation]) -> Result<StabilizerChain, GroupError> {
    let n = check_generators(gens)?;
    let bound = parity_bound(gens, n);
    StabilizerChain::build_with_bound(gens, Some(&bound))
}

pub fn classify(gens: &[Permutation]) -> Result<Classification, GroupError> {
    let chain = build_chain_bounded(gens)?;
    Ok(classify_chain(&chain))
}

pub fn classify_chain(chain: &StabilizerChain) -> Classification {
    let n = chain.degree();
    let order = chain.order().0;
    let full = factorial(n);
    if order == full {
        Classification::Symmetric
    } else if n >= 2 && order * BigUint::from(2u32) == full && chain.generators().iter().all(Permutation::is_even) {
        Classification::Alternating
    } else {
        Classification::Other(chain.order())
    }
}

/// Orbit of `point`, sorted ascending.
pub fn orbit(gens: &[Permutation], point: usize) -> Result<Vec<usize>, GroupError> {
    let n = check_generators(gens)?;
    if point >= n {
        return Err(GroupError::PointOutOfRange { point, degree: n });
    }
    Ok(orbit_unchecked(gens, point, n))
}

fn orbit_unchecked(gens: &[Permutation], point: usize, n: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut queue = VecDeque::from([point]);
    let mut out = vec![point];
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_transitive(gens: &[Permutation]) -> Result<bool, GroupError> {
    let n = check_generators(gens)?;
    Ok(orbit_unchecked(gens, 0, n).len() == n)
}

/// Transitive, and the stabilizer of the first base point is transitive on the
/// remaining points.
pub fn is_two_transitive(gens: &[Permutation]) -> Result<bool, GroupError> {
    let n = check_generators(gens)?;
    if n < 2 || !is_transitive(gens)? {
        return Ok(false);
    }
    let chain = build_chain_bounded(gens)?;
    Ok(two_transitive_from_chain(&chain))
}

pub fn two_transitive_from_chain(chain: &StabilizerChain) -> bool {
    let n = chain.degree();
    let base = chain.base();
    // transitive groups on n >= 2 points move 0, so it is the first base point
    if n < 2 || base.first() != Some(&0) || chain.transversal_sizes()[0] != n {
        return false;
    }
    let stab: Vec<Permutation> = chain.strong_generators(1).to_vec();
    if stab.is_empty() {
        return n == 2;
    }
    orbit_unchecked(&stab, 1, n).len() == n - 1
}

/// Smallest block containing `{0, x}`, as the union-find partition it induces.
fn minimal_block_partition(gens: &[Permutation], n: usize, x: usize) -> UnionFind<usize> {
    let mut uf = UnionFind::new(n);
    uf.union(0, x);
    let mut pending = vec![(0usize, x)];
    while let Some((p, q)) = pending.pop() {
        for g in gens {
            let (gp, gq) = (g.apply(p), g.apply(q));
            let (rp, rq) = (uf.find_mut(gp), uf.find_mut(gq));
            if rp != rq {
                uf.union(rp, rq);
                pending.push((rp, rq));
            }
        }
    }
    uf
}

pub fn is_primitive(gens: &[Permutation]) -> Result<bool, GroupError> {
    let n = check_generators(gens)?;
    if n < 2 || !is_transitive(gens)? {
        return Ok(false);
    }
    for x in 1..n {
        let mut uf = minimal_block_partition(gens, n, x);
        let root = uf.find_mut(0);
        let block_size = (0..n).filter(|&y| uf.find_mut(y) == root).count();
        if block_size < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Blocks of the minimal block system containing `{0, x}`; for diagnostics.
pub fn minimal_blocks(gens: &[Permutation], x: usize) -> Result<Vec<Vec<usize>>, GroupError> {
    let n = check_generators(gens)?;
    if x >= n {
        return Err(GroupError::PointOutOfRange { point: x, degree: n });
    }
    let mut uf = minimal_block_partition(gens, n, x);
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for y in 0..n {
        blocks.entry(uf.find_mut(y)).or_default().push(y);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort();
    Ok(out)
}
