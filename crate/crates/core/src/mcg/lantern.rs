//! Replay of the lantern computation as a sequence of checked rewrites.
//!
//! Starting from the one-letter word `T_{alpha1}`, each proof step names a
//! rule and gives the next word; [`replay`] accepts a step only if that single
//! rule, applied once, turns the previous word into the next. Three rules
//! carry the mathematics (the lantern relator, commuting disjoint twists,
//! conjugating a twist by a generator word); two are bookkeeping (cancelling
//! one inverse pair, and abbreviating `T_{gamma2} f T_{gamma2}^-1` as `f'`).

use std::fmt;

use serde::Serialize;

use super::{render_gen_word, ActionSet, CurveLabel, GenWord, McgError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    Gen(String),
    FPrime,
    Twist(CurveLabel),
}

/// A symbol to the power `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub sym: Symbol,
    pub inverse: bool,
}

impl Letter {
    pub fn twist(c: CurveLabel, inverse: bool) -> Self {
        Letter {
            sym: Symbol::Twist(c),
            inverse,
        }
    }

    pub fn gen(name: &str, inverse: bool) -> Self {
        Letter {
            sym: Symbol::Gen(name.to_string()),
            inverse,
        }
    }

    pub fn inv(&self) -> Self {
        Letter {
            sym: self.sym.clone(),
            inverse: !self.inverse,
        }
    }

    fn twist_curve(&self) -> Option<CurveLabel> {
        match self.sym {
            Symbol::Twist(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sym {
            Symbol::Gen(name) => f.write_str(name)?,
            Symbol::FPrime => f.write_str("f'")?,
            Symbol::Twist(c) => write!(f, "T({c})")?,
        }
        if self.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// A word in generators, `f'` and Dehn twists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TwistWord(pub Vec<Letter>);

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for TwistWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl TwistWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> TwistWord {
        TwistWord(self.0.iter().rev().map(Letter::inv).collect())
    }

    /// Letters of a generator word, e.g. `f^-2 g` becomes `f^-1 f^-1 g`.
    pub fn from_gen_word(w: &GenWord) -> TwistWord {
        TwistWord(
            w.iter()
                .flat_map(|(name, e)| std::iter::repeat_n(Letter::gen(name, *e < 0), e.unsigned_abs() as usize))
                .collect(),
        )
    }

    fn concat(parts: &[&[Letter]]) -> TwistWord {
        TwistWord(parts.iter().flat_map(|p| p.iter().cloned()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Insert a cyclic conjugate of the lantern relator or its inverse.
    Lantern,
    /// Swap adjacent twists about disjoint curves.
    Commute,
    /// Replace `T_c` by `W^-1 T_{W(c)} W` for a generator word `W`.
    Conjugate,
    /// Delete one adjacent inverse pair.
    FreeReduce,
    /// Replace `T_{gamma2} f^(+-1) T_{gamma2}^-1` by `f'^(+-1)`.
    FPrimeDef,
}

impl Rule {
    pub const PERMITTED: [Rule; 3] = [Rule::Lantern, Rule::Commute, Rule::Conjugate];

    pub fn is_structural(&self) -> bool {
        matches!(self, Rule::FreeReduce | Rule::FPrimeDef)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Lantern => "lantern",
            Rule::Commute => "commute",
            Rule::Conjugate => "conjugate",
            Rule::FreeReduce => "free_reduce",
            Rule::FPrimeDef => "f_prime_def",
        })
    }
}

/// The non-structural rules a replay may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub lantern: bool,
    pub commute: bool,
    pub conjugate: bool,
}

impl RuleSet {
    pub const ALL: RuleSet = RuleSet {
        lantern: true,
        commute: true,
        conjugate: true,
    };

    /// The eight subsets of the permitted rules, indexed by bitmask.
    pub fn from_mask(mask: u8) -> Self {
        RuleSet {
            lantern: mask & 1 != 0,
            commute: mask & 2 != 0,
            conjugate: mask & 4 != 0,
        }
    }

    pub fn allows(&self, rule: Rule) -> bool {
        match rule {
            Rule::Lantern => self.lantern,
            Rule::Commute => self.commute,
            Rule::Conjugate => self.conjugate,
            Rule::FreeReduce | Rule::FPrimeDef => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub rule: Rule,
    pub word: TwistWord,
}

/// A claimed rewrite chain from `T_{alpha1}` to the final word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanternProof {
    pub start: TwistWord,
    pub steps: Vec<ProofStep>,
}

impl LanternProof {
    pub fn final_word(&self) -> &TwistWord {
        self.steps.last().map_or(&self.start, |s| &s.word)
    }
}

/// `T_{alpha1} T_{alpha2} T_{x1} T_{gamma2} T_{x2}^-1 T_{x3}^-1 T_{gamma1}^-1`.
fn lantern_relator() -> TwistWord {
    let t = Letter::twist;
    TwistWord(vec![
        t(CurveLabel::ALPHA1, false),
        t(CurveLabel::ALPHA2, false),
        t(CurveLabel::X1, false),
        t(CurveLabel::GAMMA2, false),
        t(CurveLabel::X2, true),
        t(CurveLabel::X3, true),
        t(CurveLabel::GAMMA1, true),
    ])
}

/// Lantern curves pairwise meet except when one of them is a boundary curve.
fn disjoint(a: CurveLabel, b: CurveLabel) -> bool {
    a != b && a.is_lantern() && b.is_lantern() && (a.is_lantern_boundary() || b.is_lantern_boundary())
}

/// `(f^-1 f') (G^-1 f^-1 f' G) (H^-1 f^-1 f' H)` for the role words `G`, `H`.
pub fn expected_final_word(set: &ActionSet) -> TwistWord {
    let f_inv = Letter::gen("f", true);
    let fp = Letter {
        sym: Symbol::FPrime,
        inverse: false,
    };
    let core = [f_inv, fp];
    let g = TwistWord::from_gen_word(&set.roles.g);
    let h = TwistWord::from_gen_word(&set.roles.h);
    TwistWord::concat(&[
        &core,
        &g.inverse().0,
        &core,
        &g.0,
        &h.inverse().0,
        &core,
        &h.0,
    ])
}

struct Builder<'a> {
    set: &'a ActionSet,
    cur: TwistWord,
    steps: Vec<ProofStep>,
}

impl Builder<'_> {
    fn push(&mut self, rule: Rule, word: TwistWord) {
        self.cur = word.clone();
        self.steps.push(ProofStep { rule, word });
    }

    fn position(&self, letter: &Letter) -> usize {
        self.cur.0.iter().position(|l| l == letter).expect("letter present")
    }

    fn commute(&mut self, p: usize) {
        let mut w = self.cur.0.clone();
        w.swap(p, p + 1);
        self.push(Rule::Commute, TwistWord(w));
    }

    /// Conjugates the twist at `p` by `w`; returns the length of `w`.
    fn conjugate(&mut self, p: usize, w: &GenWord) -> Result<usize, McgError> {
        let letter = self.cur.0[p].clone();
        let c = letter.twist_curve().expect("twist letter");
        let image = self.set.apply_word(w, c).ok_or_else(|| {
            McgError::HypothesisFailure(format!("({}) {c} is undetermined", render_gen_word(w)))
        })?;
        let word = TwistWord::from_gen_word(w);
        let next = TwistWord::concat(&[
            &self.cur.0[..p],
            &word.inverse().0,
            &[Letter::twist(image, letter.inverse)],
            &word.0,
            &self.cur.0[p + 1..],
        ]);
        self.push(Rule::Conjugate, next);
        Ok(word.len())
    }

    /// Cancels inverse pairs straddling the boundary before index `j`.
    fn cancel_at(&mut self, mut j: usize) {
        while j > 0 && j < self.cur.len() && self.cur.0[j - 1] == self.cur.0[j].inv() {
            let mut w = self.cur.0.clone();
            w.drain(j - 1..=j);
            self.push(Rule::FreeReduce, TwistWord(w));
            j -= 1;
        }
    }
}

/// Builds the rewrite chain for the set's lemma roles. The chain is only
/// meaningful if the lantern hypotheses hold; [`replay`] checks each step.
pub fn lantern_proof(set: &ActionSet) -> Result<LanternProof, McgError> {
    let t = Letter::twist;
    let start = TwistWord(vec![t(CurveLabel::ALPHA1, false)]);
    let mut b = Builder {
        set,
        cur: start.clone(),
        steps: Vec::new(),
    };

    // T_a1 = T_g1 T_x3 T_x2 T_g2^-1 T_x1^-1 T_a2^-1
    let rel_inv = lantern_relator().inverse();
    let mut rotated = vec![rel_inv.0[6].clone()];
    rotated.extend_from_slice(&rel_inv.0[..6]);
    b.push(Rule::Lantern, TwistWord::concat(&[&b.cur.0, &rotated]));
    b.cancel_at(1);

    // regroup as (T_g1 T_g2^-1)(T_x3 T_x1^-1)(T_x2 T_a2^-1)
    b.commute(2);
    b.commute(1);
    b.commute(3);

    // the pairs (x3, x1) and (x2, alpha2) are conjugates of (gamma1, gamma2)
    for (first, role) in [(CurveLabel::X3, set.roles.g.clone()), (CurveLabel::X2, set.roles.h.clone())] {
        let p = b.position(&t(first, false));
        let m = b.conjugate(p, &role)?;
        b.conjugate(p + 2 * m + 1, &role)?;
        b.cancel_at(p + 2 * m + 1);
    }

    // T_gamma1 = f^-1 T_gamma2 f, right to left
    let f_word: GenWord = set.roles.f.clone();
    while let Some(p) = b.cur.0.iter().rposition(|l| *l == t(CurveLabel::GAMMA1, false)) {
        b.conjugate(p, &f_word)?;
    }

    // abbreviate T_gamma2 f T_gamma2^-1 as f'
    for _ in 0..3 {
        let pattern = [t(CurveLabel::GAMMA2, false), Letter::gen("f", false), t(CurveLabel::GAMMA2, true)];
        let p = b
            .cur
            .0
            .windows(3)
            .position(|w| w == pattern)
            .expect("f' pattern present");
        let next = TwistWord::concat(&[
            &b.cur.0[..p],
            &[Letter {
                sym: Symbol::FPrime,
                inverse: false,
            }],
            &b.cur.0[p + 3..],
        ]);
        b.push(Rule::FPrimeDef, next);
    }

    Ok(LanternProof {
        start,
        steps: b.steps,
    })
}

fn is_gen(l: &Letter) -> bool {
    matches!(l.sym, Symbol::Gen(_))
}

fn gen_word_of(letters: &[Letter]) -> GenWord {
    let mut out: GenWord = Vec::new();
    for l in letters {
        let Symbol::Gen(name) = &l.sym else { continue };
        let e = if l.inverse { -1 } else { 1 };
        match out.last_mut() {
            Some((last, exp)) if last == name && exp.signum() == e => *exp += e,
            _ => out.push((name.clone(), e)),
        }
    }
    out
}

fn check_step(set: &ActionSet, rule: Rule, prev: &TwistWord, next: &TwistWord) -> bool {
    let (a, b) = (&prev.0, &next.0);
    match rule {
        Rule::FreeReduce => {
            b.len() + 2 == a.len()
                && (1..a.len()).any(|j| a[j - 1] == a[j].inv() && a[..j - 1] == b[..j - 1] && a[j + 1..] == b[j - 1..])
        }
        Rule::FPrimeDef => {
            b.len() + 2 == a.len()
                && (0..b.len()).any(|p| {
                    let fp = &b[p];
                    fp.sym == Symbol::FPrime
                        && a[..p] == b[..p]
                        && a[p + 3..] == b[p + 1..]
                        && a[p] == Letter::twist(CurveLabel::GAMMA2, false)
                        && a[p + 1] == Letter::gen("f", fp.inverse)
                        && a[p + 2] == Letter::twist(CurveLabel::GAMMA2, true)
                })
        }
        Rule::Lantern => {
            let rel = lantern_relator();
            let n = rel.len();
            b.len() == a.len() + n
                && (0..=a.len()).any(|p| {
                    a[..p] == b[..p]
                        && a[p..] == b[p + n..]
                        && [rel.clone(), rel.inverse()].iter().any(|r| {
                            (0..n).any(|s| (0..n).all(|i| b[p + i] == r.0[(i + s) % n]))
                        })
                })
        }
        Rule::Commute => {
            a.len() == b.len()
                && (0..a.len().saturating_sub(1)).any(|p| {
                    let (Some(x), Some(y)) = (a[p].twist_curve(), a[p + 1].twist_curve()) else {
                        return false;
                    };
                    disjoint(x, y)
                        && b[p] == a[p + 1]
                        && b[p + 1] == a[p]
                        && a[..p] == b[..p]
                        && a[p + 2..] == b[p + 2..]
                })
        }
        Rule::Conjugate => {
            b.len() > a.len()
                && (b.len() - a.len()) % 2 == 0
                && (0..a.len()).any(|p| {
                    let Some(c) = a[p].twist_curve() else { return false };
                    let m = (b.len() - a.len()) / 2;
                    let middle = &b[p..p + 2 * m + 1];
                    let w = &middle[m + 1..];
                    a[..p] == b[..p]
                        && a[p + 1..] == b[p + 2 * m + 1..]
                        && w.iter().all(is_gen)
                        && middle[..m] == TwistWord(w.to_vec()).inverse().0[..]
                        && middle[m].inverse == a[p].inverse
                        && middle[m].twist_curve().is_some()
                        && set.apply_word(&gen_word_of(w), c) == middle[m].twist_curve()
                })
        }
    }
}

/// Checks every step of `proof` under `rules`; returns the final word.
pub fn replay(proof: &LanternProof, set: &ActionSet, rules: RuleSet) -> Result<TwistWord, McgError> {
    let mut prev = &proof.start;
    for (i, step) in proof.steps.iter().enumerate() {
        if !rules.allows(step.rule) || !check_step(set, step.rule, prev, &step.word) {
            return Err(McgError::RewriteStepInvalid {
                step: i + 1,
                rule: step.rule.to_string(),
            });
        }
        prev = &step.word;
    }
    Ok(prev.clone())
}

/// Checks the lantern hypotheses, builds and replays the rewrite chain, and
/// returns the word expressing `T_{alpha1}` in the generators.
pub fn verify_lantern_word(set: &ActionSet) -> Result<TwistWord, McgError> {
    if !super::verify_lantern_hypotheses(set)? {
        return Err(McgError::HypothesisFailure(super::lantern_hypothesis_failures(set).join("; ")));
    }
    let proof = lantern_proof(set)?;
    let word = replay(&proof, set, RuleSet::ALL)?;
    if word != expected_final_word(set) {
        return Err(McgError::RewriteStepInvalid {
            step: proof.steps.len(),
            rule: "final form".into(),
        });
    }
    Ok(word)
}
