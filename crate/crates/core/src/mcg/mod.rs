//! Combinatorial model of the order-`k` generators of the mapping class group.
//!
//! Each generator is recorded only through the curve images its construction
//! forces: a partial injective map on labelled curves, plus a few facts about
//! its powers. Curves whose image is not a labelled curve are simply absent
//! from the map. On top of these tables the module checks the three lantern
//! hypotheses, certifies that all Humphries curves lie in one orbit, and
//! replays the algebra that writes `T_{alpha1}` in the generators.

mod lantern;
mod orbit;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genus::GenusDecomposition;

pub use lantern::{
    lantern_proof, replay, verify_lantern_word, Letter, LanternProof, ProofStep, Rule, RuleSet, Symbol, TwistWord,
};
pub use orbit::{certify_single_orbit, without_family, EdgeFamily, OrbitCertificate};
pub use table::ActionTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McgError {
    #[error("invalid decomposition {0}")]
    InvalidDecomposition(String),
    #[error("k={0} is out of range (need k >= 5)")]
    RangeError(u32),
    #[error("k={k} not supported by the three-generator construction: {reason}")]
    UnsupportedK { k: u32, reason: &'static str },
    #[error("the three-generator construction has no ak+1 variant")]
    PlusOneUnsupported,
    #[error("action {name} is not a partial permutation: {detail}")]
    MalformedAction { name: String, detail: String },
    #[error("lantern curve data missing: {0}")]
    MissingLanternData(String),
    #[error("lantern hypotheses fail: {0}")]
    HypothesisFailure(String),
    #[error("proof step {step} ({rule}) is not a valid rewrite")]
    RewriteStepInvalid { step: usize, rule: String },
    #[error("bad curve label {0:?}")]
    BadLabel(String),
    #[error("action table: {0}")]
    Table(String),
}

/// The lantern curves that are not Humphries curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LanternCurve {
    X1,
    X2,
    X3,
}

/// A labelled curve. Humphries curves keep their global index; the excluded
/// gamma curves get their own kind; `AlphaL` is the extra alpha curve meeting
/// the last beta curve of the first chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveLabel {
    Alpha(u32),
    AlphaL,
    Beta(u32),
    Gamma(u32),
    XGamma(u32),
    Lantern(LanternCurve),
}

impl CurveLabel {
    pub const ALPHA1: CurveLabel = CurveLabel::Alpha(1);
    pub const ALPHA2: CurveLabel = CurveLabel::Alpha(2);
    pub const GAMMA1: CurveLabel = CurveLabel::Gamma(1);
    pub const GAMMA2: CurveLabel = CurveLabel::Gamma(2);
    pub const X1: CurveLabel = CurveLabel::Lantern(LanternCurve::X1);
    pub const X2: CurveLabel = CurveLabel::Lantern(LanternCurve::X2);
    pub const X3: CurveLabel = CurveLabel::Lantern(LanternCurve::X3);

    pub fn is_humphries(&self) -> bool {
        matches!(
            self,
            CurveLabel::Alpha(_) | CurveLabel::Beta(_) | CurveLabel::Gamma(_) | CurveLabel::XGamma(_)
        )
    }

    pub fn is_alpha(&self) -> bool {
        matches!(self, CurveLabel::Alpha(_) | CurveLabel::AlphaL)
    }

    /// Boundary curves of the lantern are disjoint from the other six.
    pub fn is_lantern_boundary(&self) -> bool {
        matches!(*self, CurveLabel::ALPHA1 | CurveLabel::ALPHA2 | CurveLabel::X1 | CurveLabel::GAMMA2)
    }

    pub fn is_lantern(&self) -> bool {
        self.is_lantern_boundary() || matches!(*self, CurveLabel::GAMMA1 | CurveLabel::X2 | CurveLabel::X3)
    }
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLabel::Alpha(i) => write!(f, "alpha:{i}"),
            CurveLabel::AlphaL => f.write_str("alpha:l"),
            CurveLabel::Beta(i) => write!(f, "beta:{i}"),
            CurveLabel::Gamma(i) => write!(f, "gamma:{i}"),
            CurveLabel::XGamma(i) => write!(f, "xgamma:{i}"),
            CurveLabel::Lantern(LanternCurve::X1) => f.write_str("lantern:x1"),
            CurveLabel::Lantern(LanternCurve::X2) => f.write_str("lantern:x2"),
            CurveLabel::Lantern(LanternCurve::X3) => f.write_str("lantern:x3"),
        }
    }
}

impl FromStr for CurveLabel {
    type Err = McgError;
    fn from_str(s: &str) -> Result<Self, McgError> {
        let bad = || McgError::BadLabel(s.to_string());
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let num = || idx.parse::<u32>().ok().filter(|&i| i >= 1).ok_or_else(bad);
        Ok(match (kind, idx) {
            ("alpha", "l") => CurveLabel::AlphaL,
            ("alpha", "1") => CurveLabel::ALPHA1,
            ("alpha", "2") => CurveLabel::ALPHA2,
            ("beta", _) => CurveLabel::Beta(num()?),
            ("gamma", _) => CurveLabel::Gamma(num()?),
            ("xgamma", _) => CurveLabel::XGamma(num()?),
            ("lantern", "x1") => CurveLabel::X1,
            ("lantern", "x2") => CurveLabel::X2,
            ("lantern", "x3") => CurveLabel::X3,
            _ => return Err(bad()),
        })
    }
}

impl Serialize for CurveLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CurveLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

type PartialMap = BTreeMap<CurveLabel, CurveLabel>;

/// A generator known through finitely many curve images: `map` is the
/// single-step action, `powers[e]` records images under the `e`-th power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAction {
    pub name: String,
    pub order: u32,
    pub map: PartialMap,
    pub powers: BTreeMap<u32, PartialMap>,
}

impl GeneratorAction {
    pub fn new(name: &str, order: u32) -> Self {
        GeneratorAction {
            name: name.to_string(),
            order,
            map: BTreeMap::new(),
            powers: BTreeMap::new(),
        }
    }

    fn table(&self, e: u32) -> Option<&PartialMap> {
        if e == 1 {
            Some(&self.map)
        } else {
            self.powers.get(&e)
        }
    }

    /// Records `self^e (from) = to`, rejecting conflicts and collisions.
    pub fn record(&mut self, e: u32, from: CurveLabel, to: CurveLabel) -> Result<(), McgError> {
        let name = self.name.clone();
        let table = if e == 1 {
            &mut self.map
        } else {
            self.powers.entry(e).or_default()
        };
        if let Some(prev) = table.get(&from) {
            if *prev != to {
                return Err(McgError::MalformedAction {
                    name,
                    detail: format!("{from} has images {prev} and {to} under power {e}"),
                });
            }
            return Ok(());
        }
        if let Some((other, _)) = table.iter().find(|(_, &v)| v == to) {
            return Err(McgError::MalformedAction {
                name,
                detail: format!("{other} and {from} both map to {to} under power {e}"),
            });
        }
        table.insert(from, to);
        Ok(())
    }

    fn step(&mut self, from: CurveLabel, to: CurveLabel) -> Result<(), McgError> {
        self.record(1, from, to)
    }

    fn chain(&mut self, curves: &[CurveLabel]) -> Result<(), McgError> {
        curves.windows(2).try_for_each(|w| self.step(w[0], w[1]))
    }

    /// `self^e (c)` for `e` of either sign, combining recorded powers. `None`
    /// when the recorded facts do not determine the image.
    pub fn apply_power(&self, c: CurveLabel, e: i64) -> Option<CurveLabel> {
        if e == 0 {
            return Some(c);
        }
        let inverse = e < 0;
        let mut exps: Vec<u32> = std::iter::once(1).chain(self.powers.keys().copied()).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        self.apply_rec(c, e.unsigned_abs(), inverse, &exps, 0)
    }

    fn apply_rec(&self, c: CurveLabel, e: u64, inverse: bool, exps: &[u32], depth: usize) -> Option<CurveLabel> {
        if e == 0 {
            return Some(c);
        }
        if depth > 64 {
            return None;
        }
        for &d in exps {
            if u64::from(d) > e {
                continue;
            }
            let table = self.table(d)?;
            let next = if inverse {
                table.iter().find(|(_, &v)| v == c).map(|(&k, _)| k)
            } else {
                table.get(&c).copied()
            };
            if let Some(next) = next {
                if let Some(out) = self.apply_rec(next, e - u64::from(d), inverse, exps, depth + 1) {
                    return Some(out);
                }
            }
        }
        None
    }

    /// Every recorded edge as `(exponent, from, to)`.
    pub fn edges(&self) -> Vec<(u32, CurveLabel, CurveLabel)> {
        let mut out: Vec<_> = self.map.iter().map(|(&a, &b)| (1, a, b)).collect();
        for (&e, table) in &self.powers {
            out.extend(table.iter().map(|(&a, &b)| (e, a, b)));
        }
        out
    }

    /// Injectivity, cycle lengths dividing `k / gcd(k, e)`, and agreement
    /// between power facts and iterated single steps.
    pub fn check_invariants(&self) -> Result<(), McgError> {
        let malformed = |detail: String| McgError::MalformedAction {
            name: self.name.clone(),
            detail,
        };
        let k = self.order;
        for e in std::iter::once(1).chain(self.powers.keys().copied()) {
            let table = self.table(e).unwrap();
            let mut targets: Vec<_> = table.values().collect();
            targets.sort();
            if targets.windows(2).any(|w| w[0] == w[1]) {
                return Err(malformed(format!("power {e} is not injective")));
            }
            let period = k / k.gcd(&e);
            for &start in table.keys() {
                let mut cur = start;
                for len in 1..=table.len() {
                    match table.get(&cur) {
                        None => break,
                        Some(&next) if next == start => {
                            if !period.is_multiple_of(len as u32) {
                                return Err(malformed(format!(
                                    "{start} lies on a cycle of length {len} under power {e}, which does not divide {period}"
                                )));
                            }
                            break;
                        }
                        Some(&next) => cur = next,
                    }
                }
            }
            if e > 1 {
                for (&from, &to) in table {
                    let mut cur = Some(from);
                    for _ in 0..e {
                        cur = cur.and_then(|c| self.map.get(&c).copied());
                    }
                    if let Some(stepped) = cur {
                        if stepped != to {
                            return Err(malformed(format!(
                                "power {e} sends {from} to {to} but iterating gives {stepped}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Which construction produced an action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Four,
    Three,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Four => "four",
            Variant::Three => "three",
        })
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "four" => Ok(Variant::Four),
            "three" => Ok(Variant::Three),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// A product of generator powers, applied right to left: `[(f, -2), (g, 3)]`
/// is `f^-2 g^3`.
pub type GenWord = Vec<(String, i64)>;

pub fn render_gen_word(w: &GenWord) -> String {
    w.iter()
        .map(|(g, e)| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Words playing the roles of `f`, `g`, `h` in the lantern lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRoles {
    pub f: GenWord,
    pub g: GenWord,
    pub h: GenWord,
}

/// The tables for one `(k, decomposition, variant)` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    pub k: u32,
    pub dec: GenusDecomposition,
    pub variant: Variant,
    pub actions: Vec<GeneratorAction>,
    pub roles: LemmaRoles,
    pub labels: Vec<CurveLabel>,
    /// The `G_i` sets, kept for edge-family bookkeeping.
    pub g_sets: Vec<Vec<CurveLabel>>,
}

impl ActionSet {
    pub fn action(&self, name: &str) -> Option<&GeneratorAction> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Image of `c` under a generator word, `None` if undetermined.
    pub fn apply_word(&self, word: &GenWord, c: CurveLabel) -> Option<CurveLabel> {
        word.iter()
            .rev()
            .try_fold(c, |cur, (name, e)| self.action(name)?.apply_power(cur, *e))
    }

    pub fn humphries_labels(&self) -> Vec<CurveLabel> {
        self.labels.iter().copied().filter(CurveLabel::is_humphries).collect()
    }
}

/// Chain bookkeeping: the pieces `F_i` and the excluded gamma curves.
struct Layout {
    k: u32,
    genera: Vec<u32>,
    starts: Vec<u32>,
    g: u32,
}

impl Layout {
    fn new(dec: &GenusDecomposition) -> Self {
        let genera: Vec<u32> = dec.pieces().into_iter().map(|x| x as u32).collect();
        let starts = genera
            .iter()
            .scan(0, |acc, &gi| {
                let s = *acc;
                *acc += gi;
                Some(s)
            })
            .collect();
        Layout {
            k: dec.k as u32,
            genera,
            starts,
            g: dec.genus() as u32,
        }
    }

    fn pieces(&self) -> usize {
        self.genera.len()
    }

    /// Genus of `F_i`, 1-based.
    fn genus_of(&self, i: usize) -> u32 {
        self.genera[i - 1]
    }

    fn beta(&self, i: usize, j: u32) -> CurveLabel {
        CurveLabel::Beta(self.starts[i - 1] + j)
    }

    fn gamma(&self, i: usize, j: u32) -> CurveLabel {
        CurveLabel::Gamma(self.starts[i - 1] + j)
    }

    /// The excluded gamma curve between `F_{i-1}` and `F_i`.
    fn xgamma_before(&self, i: usize) -> CurveLabel {
        CurveLabel::XGamma(self.starts[i - 1])
    }

    fn is_excluded(&self, m: u32) -> bool {
        self.starts[1..].contains(&m)
    }

    /// All Humphries labels followed by `x1, x2, x3`.
    fn labels(&self) -> Vec<CurveLabel> {
        let mut out = vec![CurveLabel::ALPHA1, CurveLabel::ALPHA2];
        for i in 1..=self.g {
            out.push(CurveLabel::Beta(i));
            if i < self.g {
                out.push(if self.is_excluded(i) {
                    CurveLabel::XGamma(i)
                } else {
                    CurveLabel::Gamma(i)
                });
            }
        }
        out.extend([CurveLabel::X1, CurveLabel::X2, CurveLabel::X3]);
        out
    }
}

fn validate(k: u32, dec: &GenusDecomposition) -> Result<(), McgError> {
    if k < 5 {
        return Err(McgError::RangeError(k));
    }
    if !dec.is_valid() || dec.k != u64::from(k) {
        return Err(McgError::InvalidDecomposition(format!("{dec:?} for k={k}")));
    }
    Ok(())
}

/// `f`: rotates the beta and gamma curves of every chain `F_i`; the beta
/// curves close up into a `k`-cycle on genus-`k` pieces.
fn build_f(layout: &Layout, with_alpha_l: bool) -> Result<GeneratorAction, McgError> {
    let mut f = GeneratorAction::new("f", layout.k);
    for i in 1..=layout.pieces() {
        let gi = layout.genus_of(i);
        let betas: Vec<_> = (1..=gi).map(|j| layout.beta(i, j)).collect();
        f.chain(&betas)?;
        if gi == layout.k {
            f.step(betas[betas.len() - 1], betas[0])?;
        }
        let gammas: Vec<_> = (1..gi).map(|j| layout.gamma(i, j)).collect();
        f.chain(&gammas)?;
    }
    if layout.genus_of(1) == layout.k {
        f.step(CurveLabel::ALPHA1, CurveLabel::ALPHA2)?;
    } else {
        f.step(CurveLabel::ALPHA1, CurveLabel::GAMMA1)?;
    }
    if with_alpha_l {
        f.step(CurveLabel::AlphaL, CurveLabel::ALPHA1)?;
    }
    Ok(f)
}

/// Four generators of order `k` (the fourth is the conjugate `T_{gamma2} f T_{gamma2}^-1`).
pub fn build_action_four(k: u32, dec: &GenusDecomposition) -> Result<ActionSet, McgError> {
    validate(k, dec)?;
    let layout = Layout::new(dec);
    let f = build_f(&layout, false)?;

    let mut g = GeneratorAction::new("g", k);
    let mut g_sets = Vec::new();
    for i in 2..=layout.pieces() {
        let set = vec![
            layout.beta(i - 1, layout.genus_of(i - 1) - 1),
            layout.xgamma_before(i),
            layout.beta(i, 2),
        ];
        g.chain(&set)?;
        g_sets.push(set);
    }
    g.step(CurveLabel::X3, CurveLabel::GAMMA1)?;
    g.step(CurveLabel::X1, CurveLabel::GAMMA2)?;
    if dec.plus_one {
        g.step(CurveLabel::GAMMA2, CurveLabel::Beta(layout.g))?;
    } else {
        g.step(CurveLabel::GAMMA2, CurveLabel::ALPHA2)?;
    }

    let mut h = GeneratorAction::new("h", k);
    for i in 2..=layout.pieces() {
        h.step(layout.beta(i, 1), layout.gamma(i, 2))?;
    }
    h.step(CurveLabel::GAMMA1, CurveLabel::X2)?;
    h.step(CurveLabel::GAMMA2, CurveLabel::ALPHA2)?;
    h.step(CurveLabel::ALPHA2, CurveLabel::Beta(4))?;
    if dec.plus_one {
        h.step(CurveLabel::Beta(4), CurveLabel::Gamma(layout.g - 1))?;
    }

    let set = ActionSet {
        k,
        dec: *dec,
        variant: Variant::Four,
        actions: vec![f, g, h],
        roles: LemmaRoles {
            f: vec![("f".into(), 1)],
            g: vec![("g".into(), 1)],
            h: vec![("h".into(), -1)],
        },
        labels: layout.labels(),
        g_sets,
    };
    set.actions.iter().try_for_each(GeneratorAction::check_invariants)?;
    Ok(set)
}

/// Three generators of order `k`: `f`, `g` and the conjugate of `f`.
pub fn build_action_three(k: u32, dec: &GenusDecomposition) -> Result<ActionSet, McgError> {
    if k < 6 {
        return Err(McgError::UnsupportedK {
            k,
            reason: "needs k >= 6",
        });
    }
    validate(k, dec)?;
    if dec.plus_one {
        return Err(McgError::PlusOneUnsupported);
    }
    if k == 7 && dec.a == 0 {
        return Err(McgError::UnsupportedK {
            k,
            reason: "k = 7 needs a leading genus-7 piece",
        });
    }
    let layout = Layout::new(dec);
    let f = build_f(&layout, true)?;

    let mut g = GeneratorAction::new("g", k);
    let mut g_sets = Vec::new();
    for i in 2..=layout.pieces() {
        let head = if i == 2 {
            CurveLabel::AlphaL
        } else {
            layout.gamma(i - 1, layout.genus_of(i - 1) - 1)
        };
        let set = vec![head, layout.xgamma_before(i), layout.gamma(i, 1), layout.beta(i, 3)];
        g.chain(&set)?;
        g_sets.push(set);
    }
    let roles = if k == 6 {
        // the lantern is carried around by r^2: three-fold symmetry
        g.step(CurveLabel::X1, CurveLabel::Beta(4))?;
        g.step(CurveLabel::Beta(4), CurveLabel::GAMMA2)?;
        for cycle in [
            [CurveLabel::X3, CurveLabel::GAMMA1, CurveLabel::X2],
            [CurveLabel::X1, CurveLabel::GAMMA2, CurveLabel::ALPHA2],
        ] {
            for j in 0..3 {
                g.record(2, cycle[j], cycle[(j + 1) % 3])?;
            }
        }
        LemmaRoles {
            f: vec![("f".into(), 1)],
            g: vec![("g".into(), 2)],
            h: vec![("g".into(), 4)],
        }
    } else {
        g.step(CurveLabel::X3, CurveLabel::GAMMA1)?;
        g.step(CurveLabel::X1, CurveLabel::GAMMA2)?;
        g.step(CurveLabel::Gamma(4), CurveLabel::Beta(6))?;
        g.record(3, CurveLabel::X2, CurveLabel::Gamma(3))?;
        g.record(3, CurveLabel::ALPHA2, CurveLabel::Gamma(4))?;
        LemmaRoles {
            f: vec![("f".into(), 1)],
            g: vec![("g".into(), 1)],
            h: vec![("f".into(), -2), ("g".into(), 3)],
        }
    };

    let mut labels = layout.labels();
    labels.push(CurveLabel::AlphaL);
    let set = ActionSet {
        k,
        dec: *dec,
        variant: Variant::Three,
        actions: vec![f, g],
        roles,
        labels,
        g_sets,
    };
    set.actions.iter().try_for_each(GeneratorAction::check_invariants)?;
    Ok(set)
}

pub fn build_actions(k: u32, dec: &GenusDecomposition, variant: Variant) -> Result<ActionSet, McgError> {
    match variant {
        Variant::Four => build_action_four(k, dec),
        Variant::Three => build_action_three(k, dec),
    }
}

/// `f(gamma1) = gamma2`, `g(x3, x1) = (gamma1, gamma2)`, `h(x2, alpha2) = (gamma1, gamma2)`
/// with `f, g, h` the role words of the set.
pub fn verify_lantern_hypotheses(set: &ActionSet) -> Result<bool, McgError> {
    let mentioned = |c: CurveLabel| set.actions.iter().any(|a| a.edges().iter().any(|&(_, x, y)| x == c || y == c));
    for c in [CurveLabel::X1, CurveLabel::X2, CurveLabel::X3] {
        if !mentioned(c) {
            return Err(McgError::MissingLanternData(format!("no image recorded for {c}")));
        }
    }
    Ok(lantern_hypothesis_failures(set).is_empty())
}

/// The lantern hypotheses that do not hold, as readable strings.
pub fn lantern_hypothesis_failures(set: &ActionSet) -> Vec<String> {
    let checks = [
        (&set.roles.f, CurveLabel::GAMMA1, CurveLabel::GAMMA2),
        (&set.roles.g, CurveLabel::X3, CurveLabel::GAMMA1),
        (&set.roles.g, CurveLabel::X1, CurveLabel::GAMMA2),
        (&set.roles.h, CurveLabel::X2, CurveLabel::GAMMA1),
        (&set.roles.h, CurveLabel::ALPHA2, CurveLabel::GAMMA2),
    ];
    checks
        .iter()
        .filter_map(|(word, from, to)| {
            let got = set.apply_word(word, *from);
            (got != Some(*to)).then(|| {
                let got = got.map_or("undetermined".to_string(), |c| c.to_string());
                format!("({}) {from} = {got}, expected {to}", render_gen_word(word))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
