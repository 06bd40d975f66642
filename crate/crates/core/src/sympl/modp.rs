//! Breadth-first enumeration of matrix groups over `Z/p`.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;

use super::{SymplError, SymplecticMatrix};
use crate::group::GroupCard;

/// Largest group order the enumeration will attempt.
pub const ENUMERATION_BUDGET: u64 = 2_000_000;

/// Square matrix over `Z/p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPMatrix {
    dim: usize,
    p: u8,
    entries: Vec<u8>,
}

impl ModPMatrix {
    pub fn reduce(m: &SymplecticMatrix, p: u8) -> Self {
        let entries = m
            .matrix()
            .entries()
            .iter()
            .map(|&x| x.rem_euclid(i64::from(p)) as u8)
            .collect();
        ModPMatrix {
            dim: m.matrix().dim(),
            p,
            entries,
        }
    }

    pub fn from_entries(dim: usize, p: u8, entries: Vec<u8>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        ModPMatrix { dim, p, entries }
    }

    pub fn identity(dim: usize, p: u8) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        ModPMatrix { dim, p, entries }
    }

    pub fn mul(&self, other: &ModPMatrix) -> ModPMatrix {
        let n = self.dim;
        let p = u32::from(self.p);
        let mut entries = vec![0u8; n * n];
        for r in 0..n {
            for c in 0..n {
                let s: u32 = (0..n)
                    .map(|m| u32::from(self.entries[r * n + m]) * u32::from(other.entries[m * n + c]))
                    .sum();
                entries[r * n + c] = (s % p) as u8;
            }
        }
        ModPMatrix {
            dim: n,
            p: self.p,
            entries,
        }
    }

    /// `M^T J M = J` over `Z/p`.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim;
        let p = i64::from(self.p);
        let col = |c: usize| -> Vec<i64> { (0..n).map(|r| i64::from(self.entries[r * n + c])).collect() };
        let cols: Vec<Vec<i64>> = (0..n).map(col).collect();
        for i in 0..n {
            for j in 0..n {
                let want = if j == i + 1 && i % 2 == 0 {
                    1
                } else if i == j + 1 && j % 2 == 0 {
                    -1
                } else {
                    0
                };
                if (super::pairing(&cols[i], &cols[j]) - want).rem_euclid(p) != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// `|Sp(2g, p)| = p^(g^2) * prod_{i=1..g} (p^(2i) - 1)`.
pub fn sp_order(g: u32, p: u32) -> BigUint {
    let pb = BigUint::from(p);
    let mut order = pb.pow(g * g);
    for i in 1..=g {
        order *= pb.pow(2 * i) - BigUint::one();
    }
    order
}

/// Enumerates the group generated by `mats` reduced mod `p` and compares its
/// order with `|Sp(2g, p)|`.
pub fn generates_mod_p(mats: &[SymplecticMatrix], p: u8) -> Result<(bool, GroupCard), SymplError> {
    let g = mats.first().map(|m| m.genus()).ok_or_else(|| SymplError::TooLarge("empty generator list".into()))?;
    if mats.iter().any(|m| m.genus() != g) {
        return Err(SymplError::TooLarge("generators of different genus".into()));
    }
    if !matches!(p, 2 | 3) || g > 3 {
        return Err(SymplError::TooLarge(format!("g={g}, p={p}: only g <= 3 and p in {{2, 3}}")));
    }
    let target = sp_order(g as u32, u32::from(p));
    if target > BigUint::from(ENUMERATION_BUDGET) {
        return Err(SymplError::TooLarge(format!("|Sp({}, {p})| = {target}", 2 * g)));
    }
    let gens: Vec<ModPMatrix> = mats.iter().map(|m| ModPMatrix::reduce(m, p)).collect();
    let id = ModPMatrix::identity(2 * g, p);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in &gens {
            let y = s.mul(&x);
            if !seen.contains(&y) {
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let order = BigUint::from(seen.len());
    Ok((order == target, GroupCard(order)))
}
