//! JSON form of an action set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{render_gen_word, ActionSet, CurveLabel, GenWord, GeneratorAction, Layout, LemmaRoles, McgError, Variant};
use crate::genus::GenusDecomposition;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerTable {
    pub exponent: u32,
    pub map: Vec<(CurveLabel, CurveLabel)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTable {
    pub name: String,
    pub order: u32,
    pub map: Vec<(CurveLabel, CurveLabel)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub powers: Vec<PowerTable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleTable {
    pub f: String,
    pub g: String,
    pub h: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTable {
    pub k: u32,
    pub genus: u64,
    pub variant: Variant,
    pub decomposition: GenusDecomposition,
    pub roles: RoleTable,
    pub g_sets: Vec<Vec<CurveLabel>>,
    pub generators: Vec<GeneratorTable>,
}

fn parse_gen_word(s: &str) -> Result<GenWord, McgError> {
    s.split_whitespace()
        .map(|tok| match tok.split_once('^') {
            None => Ok((tok.to_string(), 1)),
            Some((name, e)) => e
                .parse::<i64>()
                .map(|e| (name.to_string(), e))
                .map_err(|_| McgError::Table(format!("bad exponent in {tok:?}"))),
        })
        .collect()
}

impl ActionTable {
    pub fn from_set(set: &ActionSet) -> Self {
        let generators = set
            .actions
            .iter()
            .map(|a| GeneratorTable {
                name: a.name.clone(),
                order: a.order,
                map: a.map.iter().map(|(&x, &y)| (x, y)).collect(),
                powers: a
                    .powers
                    .iter()
                    .map(|(&e, t)| PowerTable {
                        exponent: e,
                        map: t.iter().map(|(&x, &y)| (x, y)).collect(),
                    })
                    .collect(),
            })
            .collect();
        ActionTable {
            k: set.k,
            genus: set.dec.genus(),
            variant: set.variant,
            decomposition: set.dec,
            roles: RoleTable {
                f: render_gen_word(&set.roles.f),
                g: render_gen_word(&set.roles.g),
                h: render_gen_word(&set.roles.h),
            },
            g_sets: set.g_sets.clone(),
            generators,
        }
    }

    /// Rebuilds the action set, re-checking every generator's invariants.
    pub fn to_set(&self) -> Result<ActionSet, McgError> {
        if self.decomposition.genus() != self.genus || u64::from(self.k) != self.decomposition.k {
            return Err(McgError::Table("genus or k disagrees with the decomposition".into()));
        }
        let mut actions = Vec::new();
        for gt in &self.generators {
            let mut a = GeneratorAction::new(&gt.name, gt.order);
            for &(x, y) in &gt.map {
                a.record(1, x, y)?;
            }
            for pt in &gt.powers {
                if pt.exponent < 2 {
                    return Err(McgError::Table(format!("power table with exponent {}", pt.exponent)));
                }
                for &(x, y) in &pt.map {
                    a.record(pt.exponent, x, y)?;
                }
            }
            a.check_invariants()?;
            actions.push(a);
        }
        let mut labels = Layout::new(&self.decomposition).labels();
        if self.variant == Variant::Three {
            labels.push(CurveLabel::AlphaL);
        }
        Ok(ActionSet {
            k: self.k,
            dec: self.decomposition,
            variant: self.variant,
            actions,
            roles: LemmaRoles {
                f: parse_gen_word(&self.roles.f)?,
                g: parse_gen_word(&self.roles.g)?,
                h: parse_gen_word(&self.roles.h)?,
            },
            labels,
            g_sets: self.g_sets.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("action tables serialise")
    }

    pub fn from_json(s: &str) -> Result<Self, McgError> {
        serde_json::from_str(s).map_err(|e| McgError::Table(e.to_string()))
    }

    /// Counts of recorded images per generator, for summaries.
    pub fn edge_counts(&self) -> BTreeMap<String, usize> {
        self.generators
            .iter()
            .map(|g| (g.name.clone(), g.map.len() + g.powers.iter().map(|p| p.map.len()).sum::<usize>()))
            .collect()
    }
}
