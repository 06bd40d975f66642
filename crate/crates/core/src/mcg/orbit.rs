//! Single-orbit certification by union–find over recorded curve images.

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{ActionSet, CurveLabel, Variant};

/// Outcome of the orbit check. `components` lists, for diagnosis, every
/// connected component that contains a Humphries curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCertificate {
    pub single_orbit: bool,
    pub components: Vec<Vec<CurveLabel>>,
}

/// True when every Humphries label lies in one component of the graph whose
/// edges are all recorded images (including power facts).
pub fn certify_single_orbit(set: &ActionSet) -> OrbitCertificate {
    let labels = &set.labels;
    let index = |c: &CurveLabel| labels.iter().position(|x| x == c);
    let mut uf = UnionFind::<usize>::new(labels.len());
    for action in &set.actions {
        for (_, from, to) in action.edges() {
            if let (Some(a), Some(b)) = (index(&from), index(&to)) {
                uf.union(a, b);
            }
        }
    }
    let roots = uf.into_labeling();
    let mut components: Vec<Vec<CurveLabel>> = Vec::new();
    let mut component_roots: Vec<usize> = Vec::new();
    for (i, c) in labels.iter().enumerate() {
        match component_roots.iter().position(|&r| r == roots[i]) {
            Some(j) => components[j].push(*c),
            None => {
                component_roots.push(roots[i]);
                components.push(vec![*c]);
            }
        }
    }
    components.retain(|comp| comp.iter().any(CurveLabel::is_humphries));
    for comp in &mut components {
        comp.sort();
    }
    components.sort();
    OrbitCertificate {
        single_orbit: components.len() == 1,
        components,
    }
}

/// Named groups of edges used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFamily {
    /// `f`-images touching an alpha curve.
    FAlpha,
    /// `g`-steps inside the `G_i` sets.
    GSets,
    /// The edges realising the lemma's third role: every `h` edge for the
    /// four-generator set, the `g`-power facts at `x2` and `alpha2` otherwise.
    H,
}

impl EdgeFamily {
    pub const ALL: [EdgeFamily; 3] = [EdgeFamily::FAlpha, EdgeFamily::GSets, EdgeFamily::H];

    fn contains(&self, set: &ActionSet, name: &str, e: u32, from: CurveLabel, to: CurveLabel) -> bool {
        match self {
            EdgeFamily::FAlpha => name == "f" && (from.is_alpha() || to.is_alpha()),
            EdgeFamily::GSets => {
                name == "g" && e == 1 && set.g_sets.iter().any(|s| s.contains(&from) && s.contains(&to))
            }
            EdgeFamily::H => match set.variant {
                Variant::Four => name == "h",
                Variant::Three => {
                    let touches = |c: CurveLabel| c == CurveLabel::X2 || c == CurveLabel::ALPHA2;
                    name == "g" && e > 1 && (touches(from) || touches(to))
                }
            },
        }
    }
}

/// A copy of the set with one edge family removed.
pub fn without_family(set: &ActionSet, family: EdgeFamily) -> ActionSet {
    let mut out = set.clone();
    for action in &mut out.actions {
        let name = action.name.clone();
        action
            .map
            .retain(|&from, &mut to| !family.contains(set, &name, 1, from, to));
        for (&e, table) in action.powers.iter_mut() {
            table.retain(|&from, &mut to| !family.contains(set, &name, e, from, to));
        }
    }
    out
}
