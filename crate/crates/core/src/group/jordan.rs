//! Bounded search for a prime cycle `p <= n-3` in a permutation group: the
//! small-cycle hypothesis of Jordan's theorem.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perm::{CycleDecomposition, Permutation};

/// A power of a named generator, or a commutator of two such powers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum JordanWord {
    Power { gen: usize, exp: u32 },
    Commutator { left: (usize, u32), right: (usize, u32) },
}

impl JordanWord {
    pub fn evaluate(&self, gens: &[Permutation]) -> Permutation {
        match *self {
            JordanWord::Power { gen, exp } => gens[gen].pow(exp as i64),
            JordanWord::Commutator { left, right } => {
                let x = gens[left.0].pow(left.1 as i64);
                let y = gens[right.0].pow(right.1 as i64);
                x.commutator(&y).expect("generators share a degree")
            }
        }
    }

    /// Largest exponent appearing in the word.
    pub fn depth(&self) -> u32 {
        match *self {
            JordanWord::Power { exp, .. } => exp,
            JordanWord::Commutator { left, right } => left.1.max(right.1),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        let term = |(g, e): (usize, u32)| {
            if e == 1 {
                names[g].clone()
            } else {
                format!("{}^{}", names[g], e)
            }
        };
        match *self {
            JordanWord::Power { gen, exp } => term((gen, exp)),
            JordanWord::Commutator { left, right } => format!("[{},{}]", term(left), term(right)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanWitness {
    pub word: JordanWord,
    /// The word rendered with the generator names, e.g. `"[a,c]"`.
    pub text: String,
    pub cycle: Vec<usize>,
    pub prime: usize,
}

impl JordanWitness {
    pub fn resulting_cycle(&self, degree: usize) -> CycleDecomposition {
        CycleDecomposition {
            degree,
            cycles: vec![self.cycle.clone()],
        }
    }
}

impl fmt::Display for JordanWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cyc = self
            .cycle
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "{} = ({})", self.text, cyc)
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `Some(cycle)` if `g` is a single cycle of prime length at most `n - 3`.
pub fn prime_cycle(g: &Permutation) -> Option<Vec<usize>> {
    let n = g.degree();
    let dec = g.cycles();
    if dec.cycles.len() != 1 {
        return None;
    }
    let len = dec.cycles[0].len();
    (is_prime(len) && len + 3 <= n).then(|| dec.cycles.into_iter().next().unwrap())
}

/// Candidate words in search order: generators, their powers `2..=depth`,
/// commutators of distinct generators, then commutators of powers.
fn candidates(count: usize, depth: u32) -> Vec<JordanWord> {
    let mut out = Vec::new();
    for gen in 0..count {
        out.push(JordanWord::Power { gen, exp: 1 });
    }
    for exp in 2..=depth {
        for gen in 0..count {
            out.push(JordanWord::Power { gen, exp });
        }
    }
    let pairs = || (0..count).flat_map(|x| (0..count).filter(move |&y| y != x).map(move |y| (x, y)));
    for (x, y) in pairs() {
        out.push(JordanWord::Commutator {
            left: (x, 1),
            right: (y, 1),
        });
    }
    for i in 1..=depth {
        for j in 1..=depth {
            if i == 1 && j == 1 {
                continue;
            }
            for (x, y) in pairs() {
                out.push(JordanWord::Commutator {
                    left: (x, i),
                    right: (y, j),
                });
            }
        }
    }
    out
}

/// Searches the bounded word list for a prime cycle of length at most `n-3`.
/// Among all hits the smallest prime wins, ties going to the earliest word.
/// `None` only means the bounded search found nothing.
pub fn jordan_certificate(gens: &[Permutation], search_depth: u32) -> Option<JordanWitness> {
    let names: Vec<String> = (0..gens.len()).map(default_name).collect();
    jordan_certificate_named(gens, &names, search_depth)
}

fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

pub fn jordan_certificate_named(gens: &[Permutation], names: &[String], search_depth: u32) -> Option<JordanWitness> {
    if gens.is_empty() || gens.iter().any(|g| g.degree() != gens[0].degree()) {
        return None;
    }
    let mut best: Option<JordanWitness> = None;
    for word in candidates(gens.len(), search_depth.max(1)) {
        let value = word.evaluate(gens);
        if let Some(cycle) = prime_cycle(&value) {
            let prime = cycle.len();
            if best.as_ref().is_none_or(|b| prime < b.prime) {
                best = Some(JordanWitness {
                    text: word.render(names),
                    word,
                    cycle,
                    prime,
                });
                if prime == 2 {
                    break;
                }
            }
        }
    }
    best
}
