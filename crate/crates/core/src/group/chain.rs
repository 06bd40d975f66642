//! Deterministic Schreier-Sims.
//!
//! Every Schreier generator is sifted; there is no random sampling. When the
//! caller knows an upper bound on the group order (for instance `n!/2` when all
//! generators are even), construction stops as soon as the product of basic
//! orbit lengths reaches it. That product is always a lower bound for the order
//! of the generated group provided each basic orbit is the full orbit of the
//! current strong generators fixing the earlier base points, which this
//! implementation maintains after every insertion. Reaching the upper bound
//! therefore certifies that the partial chain is already complete.
//!
//! To reach that bound quickly on large degrees, the bounded construction
//! first sifts a stream of pseudo-random group elements (product replacement
//! driven by a fixed-seed generator, so runs are reproducible). The random
//! stream only proposes strong generators; the certificate is still the exact
//! lower bound meeting the upper bound. If the bound is not met, the full
//! deterministic Schreier generator scan runs to completion.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GroupCard, GroupError};
use crate::perm::Permutation;

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub base_point: usize,
    /// Strong generators fixing all earlier base points.
    pub gens: Vec<Permutation>,
    /// Basic orbit in discovery order.
    pub orbit: Vec<usize>,
    /// `reps[x]` maps the base point to `x`; `inv_reps[x]` is its inverse.
    pub reps: Vec<Option<Permutation>>,
    pub inv_reps: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut reps = vec![None; degree];
        let mut inv_reps = vec![None; degree];
        reps[base_point] = Some(Permutation::identity(degree));
        inv_reps[base_point] = Some(Permutation::identity(degree));
        Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            reps,
            inv_reps,
        }
    }

    /// Extends the orbit after `gens[first_new..]` were appended.
    fn extend_orbit(&mut self, first_new: usize) {
        // points known before only need the new generators
        let old_len = self.orbit.len();
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            let lo = if i < old_len { first_new } else { 0 };
            for gi in lo..self.gens.len() {
                let y = self.gens[gi].apply(x);
                if self.reps[y].is_none() {
                    let rep = self.gens[gi].compose_unchecked(self.reps[x].as_ref().unwrap());
                    self.inv_reps[y] = Some(rep.inverse());
                    self.reps[y] = Some(rep);
                    self.orbit.push(y);
                }
            }
            i += 1;
        }
    }
}

/// Base, strong generators and transversals for a permutation group.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    generators: Vec<Permutation>,
    pub(crate) levels: Vec<Level>,
}

/// Outcome of sifting an element through the chain.
pub(crate) enum Sift {
    /// Residue reached the bottom as the identity.
    Member,
    /// Residue left the chain at `level` (== levels.len() for a new base point).
    Dropout { level: usize, residue: Permutation },
}

impl StabilizerChain {
    /// Complete chain for `<gens>`.
    pub fn build(gens: &[Permutation]) -> Result<Self, GroupError> {
        Self::build_with_bound(gens, None)
    }

    /// Chain construction that stops once the order reaches `upper_bound`, a
    /// known upper bound on `|<gens>|`.
    pub fn build_with_bound(gens: &[Permutation], upper_bound: Option<&BigUint>) -> Result<Self, GroupError> {
        let degree = super::check_generators(gens)?;
        let mut chain = StabilizerChain {
            degree,
            generators: gens.to_vec(),
            levels: Vec::new(),
        };
        if let Some(first) = gens.iter().filter_map(Permutation::first_moved).min() {
            chain.levels.push(Level::new(first, degree));
        }
        for g in gens {
            if g.is_identity() {
                continue;
            }
            if chain.levels.iter().all(|l| g.apply(l.base_point) == l.base_point) {
                chain.levels.push(Level::new(g.first_moved().unwrap(), degree));
            }
        }
        let nontrivial: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in nontrivial {
            chain.add_strong_generator(g, 0);
        }
        if chain.levels.is_empty() {
            return Ok(chain);
        }
        if let Some(bound) = upper_bound {
            if chain.random_fill(bound) {
                return Ok(chain);
            }
        }
        chain.complete(upper_bound);
        Ok(chain)
    }

    /// Appends `h` to every level from 0 up to the last level whose earlier base
    /// points it fixes, refreshing the affected orbits. `h` must fix the base
    /// points before `from`.
    fn add_strong_generator(&mut self, h: Permutation, from: usize) {
        debug_assert!(self.levels[..from].iter().all(|l| h.apply(l.base_point) == l.base_point));
        let _ = from;
        let mut depth = 0;
        while depth < self.levels.len() {
            let level = &mut self.levels[depth];
            let first_new = level.gens.len();
            level.gens.push(h.clone());
            level.extend_orbit(first_new);
            if h.apply(level.base_point) != level.base_point {
                return;
            }
            depth += 1;
        }
        // h fixes every base point: open a new level on its first moved point
        let mut level = Level::new(h.first_moved().expect("non-identity residue"), self.degree);
        level.gens.push(h);
        level.extend_orbit(0);
        self.levels.push(level);
    }

    pub(crate) fn sift_from(&self, g: &Permutation, start: usize) -> Sift {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let beta = h.apply(level.base_point);
            match &level.inv_reps[beta] {
                None => return Sift::Dropout { level: i, residue: h },
                Some(inv) => h = inv.compose_unchecked(&h),
            }
        }
        if h.is_identity() {
            Sift::Member
        } else {
            Sift::Dropout {
                level: self.levels.len(),
                residue: h,
            }
        }
    }

    /// Sifts pseudo-random elements until the order reaches `bound` or a run of
    /// consecutive members suggests the chain is already complete. Returns true
    /// when the bound was reached.
    fn random_fill(&mut self, bound: &BigUint) -> bool {
        const SCRAMBLE: usize = 40;
        const STALL_LIMIT: usize = 40;
        if &self.order_bigint() >= bound {
            return true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7057_0c1a ^ self.degree as u64);
        let gens: Vec<Permutation> = self.generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let slots = gens.len().max(10);
        let mut state: Vec<Permutation> = (0..slots).map(|i| gens[i % gens.len()].clone()).collect();
        let mut acc = Permutation::identity(self.degree);
        let mut step = |state: &mut Vec<Permutation>, acc: &mut Permutation| {
            let i = rng.gen_range(0..slots);
            let mut j = rng.gen_range(0..slots - 1);
            if j >= i {
                j += 1;
            }
            let r = if rng.gen_bool(0.5) { state[j].clone() } else { state[j].inverse() };
            state[i] = if rng.gen_bool(0.5) {
                state[i].compose_unchecked(&r)
            } else {
                r.compose_unchecked(&state[i])
            };
            *acc = acc.compose_unchecked(&state[i]);
        };
        for _ in 0..SCRAMBLE {
            step(&mut state, &mut acc);
        }
        let mut stall = 0;
        while stall < STALL_LIMIT {
            step(&mut state, &mut acc);
            match self.sift_from(&acc, 0) {
                Sift::Member => stall += 1,
                Sift::Dropout { level, residue } => {
                    stall = 0;
                    self.add_strong_generator(residue, level);
                    if &self.order_bigint() >= bound {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn complete(&mut self, upper_bound: Option<&BigUint>) {
        if let Some(bound) = upper_bound {
            if &self.order_bigint() >= bound {
                return;
            }
        }
        // Process levels bottom-up; after an insertion at level j restart at j.
        let mut i = self.levels.len();
        while i > 0 {
            let li = i - 1;
            let mut inserted_at: Option<usize> = None;
            'scan: for oi in 0..self.levels[li].orbit.len() {
                for si in 0..self.levels[li].gens.len() {
                    let level = &self.levels[li];
                    let beta = level.orbit[oi];
                    let s = &level.gens[si];
                    let sb = s.apply(beta);
                    let u_beta = level.reps[beta].as_ref().unwrap();
                    let u_sb_inv = level.inv_reps[sb].as_ref().unwrap();
                    let schreier = u_sb_inv.compose_unchecked(&s.compose_unchecked(u_beta));
                    if schreier.is_identity() {
                        continue;
                    }
                    if let Sift::Dropout { level: j, residue } = self.sift_from(&schreier, li + 1) {
                        self.add_strong_generator(residue, li + 1);
                        if let Some(bound) = upper_bound {
                            if &self.order_bigint() >= bound {
                                return;
                            }
                        }
                        inserted_at = Some(j);
                        break 'scan;
                    }
                }
            }
            match inserted_at {
                Some(j) => i = (j + 1).min(self.levels.len()),
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    /// Basic orbit lengths, one per base point.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Strong generators fixing base points `0..level`.
    pub fn strong_generators(&self, level: usize) -> &[Permutation] {
        self.levels.get(level).map(|l| l.gens.as_slice()).unwrap_or(&[])
    }

    fn order_bigint(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn order(&self) -> GroupCard {
        GroupCard(self.order_bigint())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && matches!(self.sift_from(g, 0), Sift::Member)
    }
}
