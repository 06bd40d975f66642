//! Integer symplectic matrices: the homology action of the rotations, Dehn
//! twist transvections, the Humphries classes, and generation checks mod p.
//!
//! Coordinates use the interleaved basis `(a1, b1, a2, b2, ...)` with
//! `<a_i, b_i> = 1` and every other pairing of basis vectors zero.

mod modp;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genus::GenusDecomposition;

pub use modp::{generates_mod_p, sp_order, ModPMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymplError {
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    BadShape { expected: usize, rows: usize, cols: usize },
    #[error("invalid decomposition {0:?}")]
    InvalidDecomposition(GenusDecomposition),
    #[error("zero vector has no transvection")]
    ZeroVector,
    #[error("vector of length {got} for genus {g}")]
    VectorLength { g: usize, got: usize },
    #[error("genus {g} out of range: {reason}")]
    RangeError { g: usize, reason: &'static str },
    #[error("group enumeration outside budget: {0}")]
    TooLarge(String),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, SymplError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(SymplError::BadShape {
                expected: dim,
                rows: dim,
                cols: bad.len(),
            });
        }
        Ok(IntMatrix {
            dim,
            entries: rows.concat(),
        })
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim.max(1)).map(<[i64]>::to_vec).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Product skipping zero entries of the left factor; the matrices here are
    /// sparse, so this is close to linear in the number of nonzeros.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            let row = &mut out.entries[r * n..(r + 1) * n];
            for m in 0..n {
                let x = self.entries[r * n + m];
                if x == 0 {
                    continue;
                }
                let other_row = &other.entries[m * n..(m + 1) * n];
                for (dst, &y) in row.iter_mut().zip(other_row) {
                    *dst += x * y;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        (0..e).fold(Self::identity(self.dim), |acc, _| acc.mul(self))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// Least `m` in `1..=limit` with `M^m = I`.
    pub fn order(&self, limit: u32) -> Option<u32> {
        let mut acc = self.clone();
        for m in 1..=limit {
            if acc.is_identity() {
                return Some(m);
            }
            acc = acc.mul(self);
        }
        None
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> i128 {
        let n = self.dim;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self.rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Rows on separate lines, entries separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SymplError> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|e| SymplError::Parse(format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(&rows)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// The standard form `J` for genus `g`: `J[2i][2i+1] = 1`, `J[2i+1][2i] = -1`.
pub fn standard_form(g: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * g);
    for i in 0..g {
        j.set(2 * i, 2 * i + 1, 1);
        j.set(2 * i + 1, 2 * i, -1);
    }
    j
}

/// `<u, v> = u^T J v`.
pub fn pairing(u: &[i64], v: &[i64]) -> i64 {
    u.chunks(2)
        .zip(v.chunks(2))
        .map(|(x, y)| x[0] * y[1] - x[1] * y[0])
        .sum()
}

/// An integer matrix with `M^T J M = J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct SymplecticMatrix {
    m: IntMatrix,
}

impl TryFrom<IntMatrix> for SymplecticMatrix {
    type Error = SymplError;
    fn try_from(m: IntMatrix) -> Result<Self, SymplError> {
        SymplecticMatrix::new(m)
    }
}

impl From<SymplecticMatrix> for IntMatrix {
    fn from(s: SymplecticMatrix) -> IntMatrix {
        s.m
    }
}

pub fn preserves_form(m: &IntMatrix) -> bool {
    if !m.dim().is_multiple_of(2) {
        return false;
    }
    let j = standard_form(m.dim() / 2);
    m.transpose().mul(&j).mul(m) == j
}

impl SymplecticMatrix {
    pub fn new(m: IntMatrix) -> Result<Self, SymplError> {
        if preserves_form(&m) {
            Ok(SymplecticMatrix { m })
        } else {
            Err(SymplError::NotSymplectic)
        }
    }

    pub fn identity(g: usize) -> Self {
        SymplecticMatrix {
            m: IntMatrix::identity(2 * g),
        }
    }

    pub fn genus(&self) -> usize {
        self.m.dim() / 2
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { m: self.m.mul(&other.m) }
    }

    /// The inverse of a symplectic matrix is `-J M^T J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = standard_form(self.genus());
        let mut inv = j.mul(&self.m.transpose()).mul(&j);
        inv.entries.iter_mut().for_each(|x| *x = -*x);
        SymplecticMatrix { m: inv }
    }

    pub fn order(&self, limit: u32) -> Option<u32> {
        self.m.order(limit)
    }
}

/// Which surface piece a basis pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// Genus-`k` piece with `k` handles permuted by the rotation.
    Handles,
    /// Genus-`(k-1)` piece: two spheres joined by `k` tubes.
    Tubes,
    /// The axis handle, fixed by the rotation.
    Axis,
}

/// Symplectic basis of a decomposed surface, one label per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub g: usize,
    pub labels: Vec<String>,
    /// `(kind, first coordinate, genus)` per piece in surface order.
    pub pieces: Vec<(PieceKind, usize, usize)>,
}

impl HomologyBasis {
    /// Plain basis `a1, b1, ..., ag, bg`.
    pub fn standard(g: usize) -> Self {
        let labels = (1..=g).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
        HomologyBasis {
            g,
            labels,
            pieces: vec![(PieceKind::Handles, 0, g)],
        }
    }

    /// Per-piece basis. On a tube piece, `c_i` is the meridian of tube `i` and
    /// `d_i` is the sum of the loops through tubes `m` and `m+1` for `m >= i`,
    /// which makes `<c_i, d_j> = delta_ij`.
    pub fn for_decomposition(dec: &GenusDecomposition) -> Result<Self, SymplError> {
        if !dec.is_valid() {
            return Err(SymplError::InvalidDecomposition(*dec));
        }
        let k = dec.k as usize;
        let mut labels = Vec::new();
        let mut pieces = Vec::new();
        for (p, genus) in dec.pieces().into_iter().enumerate() {
            let genus = genus as usize;
            let p = p + 1;
            let (kind, x, y) = if genus == k {
                (PieceKind::Handles, "a", "b")
            } else {
                (PieceKind::Tubes, "c", "d")
            };
            pieces.push((kind, labels.len(), genus));
            for i in 1..=genus {
                labels.push(format!("{x}{i}.{p}"));
                labels.push(format!("{y}{i}.{p}"));
            }
        }
        if dec.plus_one {
            pieces.push((PieceKind::Axis, labels.len(), 1));
            labels.push("e".into());
            labels.push("f".into());
        }
        Ok(HomologyBasis {
            g: labels.len() / 2,
            labels,
            pieces,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    pub fn unit(&self, coordinate: usize) -> Vec<i64> {
        let mut v = vec![0; self.dim()];
        v[coordinate] = 1;
        v
    }
}

/// Homology action of the order-`k` rotation of the decomposed surface.
pub fn rotation_matrix(dec: &GenusDecomposition) -> Result<SymplecticMatrix, SymplError> {
    let basis = HomologyBasis::for_decomposition(dec)?;
    let mut r = IntMatrix::zeros(basis.dim());
    // column j holds the image of basis vector j
    for &(kind, start, genus) in &basis.pieces {
        match kind {
            PieceKind::Handles => {
                for i in 0..genus {
                    let next = (i + 1) % genus;
                    r.set(start + 2 * next, start + 2 * i, 1);
                    r.set(start + 2 * next + 1, start + 2 * i + 1, 1);
                }
            }
            PieceKind::Tubes => {
                // c_i -> c_{i+1}, the last meridian -> minus the sum of all;
                // d_i -> d_{i+1} - d_1 with d_k = 0
                let c = |i: usize| start + 2 * i;
                let d = |i: usize| start + 2 * i + 1;
                for i in 0..genus {
                    if i + 1 < genus {
                        r.set(c(i + 1), c(i), 1);
                        r.set(d(i + 1), d(i), 1);
                    } else {
                        for m in 0..genus {
                            r.set(c(m), c(i), -1);
                        }
                    }
                    let prev = r.get(d(0), d(i));
                    r.set(d(0), d(i), prev - 1);
                }
            }
            PieceKind::Axis => {
                r.set(start, start, 1);
                r.set(start + 1, start + 1, 1);
            }
        }
    }
    SymplecticMatrix::new(r)
}

/// `x -> x + <x, v> v`.
pub fn twist_transvection(basis: &HomologyBasis, v: &[i64]) -> Result<SymplecticMatrix, SymplError> {
    if v.len() != basis.dim() {
        return Err(SymplError::VectorLength {
            g: basis.g,
            got: v.len(),
        });
    }
    if v.iter().all(|&x| x == 0) {
        return Err(SymplError::ZeroVector);
    }
    let n = basis.dim();
    let mut m = IntMatrix::identity(n);
    // column j: e_j + <e_j, v> v
    for j in 0..n {
        let coef = pairing(&basis.unit(j), v);
        if coef != 0 {
            for (i, &vi) in v.iter().enumerate() {
                let cur = m.get(i, j);
                m.set(i, j, cur + coef * vi);
            }
        }
    }
    SymplecticMatrix::new(m)
}

/// Names of the Humphries curves in chain order, then the two alpha curves.
pub fn humphries_names(g: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=g {
        out.push(format!("beta{i}"));
        if i < g {
            out.push(format!("gamma{i}"));
        }
    }
    out.push("alpha1".into());
    out.push("alpha2".into());
    out
}

/// Humphries classes in the order of [`humphries_names`]:
/// `beta_i = b_i`, `gamma_i = a_{i+1} - a_i`, `alpha_1 = a_1`, `alpha_2 = a_2`.
pub fn humphries_classes(g: usize) -> Result<Vec<Vec<i64>>, SymplError> {
    if g < 2 {
        return Err(SymplError::RangeError {
            g,
            reason: "Humphries curves need g >= 2",
        });
    }
    let dim = 2 * g;
    let unit = |i: usize| {
        let mut v = vec![0i64; dim];
        v[i] = 1;
        v
    };
    let a = |i: usize| 2 * (i - 1);
    let b = |i: usize| 2 * (i - 1) + 1;
    let mut out = Vec::new();
    for i in 1..=g {
        out.push(unit(b(i)));
        if i < g {
            let mut v = unit(a(i + 1));
            v[a(i)] = -1;
            out.push(v);
        }
    }
    out.push(unit(a(1)));
    out.push(unit(a(2)));
    Ok(out)
}

/// Geometric intersection pattern of the Humphries curves, indexed like
/// [`humphries_names`]: chain neighbours meet once, each alpha meets its beta.
pub fn humphries_adjacency(g: usize) -> Vec<Vec<bool>> {
    let chain = 2 * g - 1;
    let total = chain + 2;
    let mut adj = vec![vec![false; total]; total];
    for i in 0..chain - 1 {
        adj[i][i + 1] = true;
        adj[i + 1][i] = true;
    }
    // beta_1 sits at chain position 0, beta_2 at position 2
    for (alpha, beta) in [(chain, 0), (chain + 1, 2)] {
        adj[alpha][beta] = true;
        adj[beta][alpha] = true;
    }
    adj
}

/// Transvections along the Humphries classes; for `g = 1` along `a1`, `b1`.
pub fn humphries_transvections(g: usize) -> Result<Vec<SymplecticMatrix>, SymplError> {
    let basis = HomologyBasis::standard(g);
    let classes = if g == 1 {
        vec![basis.unit(0), basis.unit(1)]
    } else {
        humphries_classes(g)?
    };
    classes.iter().map(|v| twist_transvection(&basis, v)).collect()
}
