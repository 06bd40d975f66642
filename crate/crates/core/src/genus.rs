//! Which genera carry a symmetric embedding with `k`-fold rotation: `g` must
//! split as `a` genus-`k` pieces plus `b` genus-`(k-1)` pieces, or as `a`
//! genus-`k` pieces plus one axis handle.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenusError {
    #[error("{what} needs k >= {min}, got k={k}")]
    RangeError { what: &'static str, min: u64, k: u64 },
}

/// `g = a*k + b*(k-1)`, or `g = a*k + 1` when `plus_one` is set (then `b = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusDecomposition {
    pub k: u64,
    pub a: u64,
    pub b: u64,
    pub plus_one: bool,
}

impl GenusDecomposition {
    pub fn genus(&self) -> u64 {
        self.a * self.k + self.b * (self.k - 1) + u64::from(self.plus_one)
    }

    /// Structural validity: `k >= 2`, at least one piece, and the axis handle
    /// only alongside genus-`k` pieces.
    pub fn is_valid(&self) -> bool {
        self.k >= 2 && self.a + self.b >= 1 && (!self.plus_one || (self.b == 0 && self.a > 0))
    }

    /// Piece genera in surface order: the genus-`k` pieces first.
    pub fn pieces(&self) -> Vec<u64> {
        let mut out = vec![self.k; self.a as usize];
        out.extend(std::iter::repeat_n(self.k - 1, self.b as usize));
        out
    }
}

impl fmt::Display for GenusDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.plus_one {
            write!(f, "{}={}*{}+1", self.genus(), self.a, self.k)
        } else {
            write!(f, "{}={}*{}+{}*{}", self.genus(), self.a, self.k, self.b, self.k - 1)
        }
    }
}

/// Decomposition with the largest `a`; the `ak+1` form only as a fallback.
/// With `require_leading_k` only decompositions with `a >= 1` qualify.
pub fn decompose(k: u64, g: u64, require_leading_k: bool) -> Option<GenusDecomposition> {
    if k < 2 || g == 0 {
        return None;
    }
    let min_a = u64::from(require_leading_k);
    for a in (min_a..=g / k).rev() {
        let rest = g - a * k;
        if rest.is_multiple_of(k - 1) {
            let dec = GenusDecomposition {
                k,
                a,
                b: rest / (k - 1),
                plus_one: false,
            };
            if dec.a + dec.b >= 1 {
                return Some(dec);
            }
        }
    }
    if g > k && (g - 1).is_multiple_of(k) {
        return Some(GenusDecomposition {
            k,
            a: (g - 1) / k,
            b: 0,
            plus_one: true,
        });
    }
    None
}

/// Every genus at or above `(k-1)(k-3)` is representable.
pub fn stable_bound(k: u64) -> Result<u64, GenusError> {
    if k < 5 {
        return Err(GenusError::RangeError {
            what: "stable_bound",
            min: 5,
            k,
        });
    }
    Ok((k - 1) * (k - 3))
}

/// `(count, total)`: how many of `1..stable_bound(k)` are representable, out
/// of how many. Computed by enumeration, never by formula.
pub fn count_small_representable(k: u64) -> Result<(u64, u64), GenusError> {
    let bound = stable_bound(k).map_err(|_| GenusError::RangeError {
        what: "count_small_representable",
        min: 5,
        k,
    })?;
    let count = (1..bound).filter(|&g| decompose(k, g, false).is_some()).count() as u64;
    Ok((count, bound - 1))
}

/// Every `g >= (k-1)^2 + 1` has a decomposition with a genus-`k` piece.
pub fn theorem1_bound(k: u64) -> Result<u64, GenusError> {
    if k < 6 {
        return Err(GenusError::RangeError {
            what: "theorem1_bound",
            min: 6,
            k,
        });
    }
    Ok((k - 1) * (k - 1) + 1)
}

/// The closed forms for the small-genus window, kept separate from the
/// enumeration so the two can be compared.
pub fn claimed_small_count(k: u64) -> (u64, u64) {
    ((k * k - 3 * k - 4) / 2, k * k - 4 * k + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle over every (a, b) and the `ak+1` form.
    fn representable(k: u64, g: u64) -> bool {
        (0..=g / k).any(|a| (g - a * k).is_multiple_of(k - 1)) || (g > k && (g - 1).is_multiple_of(k))
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(5, 18, false).unwrap();
        assert_eq!((d.a, d.b, d.plus_one), (2, 2, false));
        assert_eq!(decompose(5, 7, false), None);
        let d = decompose(6, 26, true).unwrap();
        assert_eq!((d.a, d.b, d.plus_one), (1, 4, false));
        // 16 = 4*4 has an (a, b) form, which is preferred over 3*5 + 1
        let d = decompose(5, 16, false).unwrap();
        assert_eq!((d.a, d.b, d.plus_one), (0, 4, false));
        // 11 = 2*5 + 1 has no (a, b) form
        let d = decompose(5, 11, false).unwrap();
        assert_eq!((d.a, d.b, d.plus_one), (2, 0, true));
        assert_eq!(d.genus(), 11);
    }

    #[test]
    fn bounds() {
        assert_eq!(stable_bound(5), Ok(8));
        assert_eq!(stable_bound(6), Ok(15));
        assert!(stable_bound(4).is_err());
        assert_eq!(theorem1_bound(6), Ok(26));
        assert_eq!(theorem1_bound(8), Ok(50));
        assert!(theorem1_bound(5).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_small_representable(5), Ok((3, 7)));
        assert_eq!(count_small_representable(6), Ok((7, 14)));
        assert!(count_small_representable(4).is_err());
        for k in 5..=40 {
            let (count, total) = count_small_representable(k).unwrap();
            assert_eq!((count, total), claimed_small_count(k), "k={k}");
            assert_eq!(count, (3..=k - 2).sum::<u64>(), "k={k}");
        }
    }

    #[test]
    fn decompose_matches_oracle() {
        for k in 2..=15 {
            for g in 1..=300 {
                let dec = decompose(k, g, false);
                assert_eq!(dec.is_some(), representable(k, g), "k={k} g={g}");
                if let Some(d) = dec {
                    assert!(d.is_valid());
                    assert_eq!(d.genus(), g);
                    if !d.plus_one {
                        // nothing with a larger a works
                        assert!((d.a + 1..=g / k).all(|a| (g - a * k) % (k - 1) != 0));
                    }
                }
                if let Some(d) = decompose(k, g, true) {
                    assert!(d.a >= 1 && d.genus() == g);
                }
            }
        }
    }

    #[test]
    fn stable_ranges() {
        for k in 5..=40 {
            for g in stable_bound(k).unwrap()..=5000 {
                assert!(decompose(k, g, false).is_some(), "k={k} g={g}");
            }
        }
        for k in 6..=40 {
            for g in theorem1_bound(k).unwrap()..=5000 {
                let d = decompose(k, g, true).unwrap();
                assert!(!d.plus_one && d.a >= 1, "k={k} g={g}");
            }
        }
    }
}
