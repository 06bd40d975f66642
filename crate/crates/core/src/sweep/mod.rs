//! Commands behind the command-line tool: single-cell verification, grid
//! sweeps with caching, the Monte Carlo estimator, the mapping-class
//! pipeline, genus arithmetic and symplectic checks. Every command returns a
//! report value; printing and exit codes are left to the binary.

mod cache;
mod estimate;
mod report;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::constructions::{build_family, expected_target, is_known_conjecture_exception, ConstructionError, Family};
use crate::genus::{claimed_small_count, count_small_representable, decompose, stable_bound, theorem1_bound};
use crate::group::{classify, jordan_certificate_named};
use crate::mcg::{self, McgError, RuleSet, Variant};
use crate::sympl::{self, generates_mod_p, humphries_transvections, preserves_form, rotation_matrix, sp_order};

pub use cache::{Cache, CACHE_ENV};
pub use estimate::{
    cmd_estimate, exhaustive_rate, order_exists, rate, wilson_interval, EstimateError, EstimatorResult, Sampler,
    EXHAUSTIVE_MAX_N,
};
pub use report::{Cell, Outcome, Stage, Summary, SweepReport, SCHEMA_VERSION, TOOL_VERSION};

/// Genus checks run up to this bound.
pub const GENUS_CHECK_MAX: u64 = 5000;

/// Every command error is a usage or domain error (exit code 2); verification
/// failures are reported inside a successful report instead.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("cache: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record wall-clock time per cell (makes reports non-reproducible).
    pub timings: bool,
    /// Worker threads; `0` means one per core.
    pub jobs: usize,
    pub cache: Option<Cache>,
}

/// Cache activity of one sweep; not part of the report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub spot_checked: usize,
    pub mismatches: usize,
}

fn timed(timings: bool, f: impl FnOnce() -> Cell) -> Cell {
    let start = Instant::now();
    let mut cell = f();
    if timings {
        cell.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    cell
}

fn run_parallel<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>, CommandError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CommandError::Pool(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

fn grid(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Domain errors skip a sweep cell; anything else is a failure.
fn is_domain_error(e: &ConstructionError) -> bool {
    !matches!(e, ConstructionError::SearchExhausted { .. })
}

/// Builds the family at `(k, n)`, checks generator orders and classifies.
pub fn verify_cell(family: Family, k: usize, n: usize) -> Result<Cell, ConstructionError> {
    let mut cell = Cell::new(k as u64, Outcome::Fail);
    cell.n = Some(n as u64);
    let set = match build_family(family, k, n) {
        Ok(set) => set,
        Err(e) if is_domain_error(&e) => return Err(e),
        Err(e) => {
            cell.detail = Some(e.to_string());
            return Ok(cell);
        }
    };
    cell.case_tag = Some(set.case.case_tag.clone());
    cell.generator_orders = set.gens.iter().map(|g| g.order().to_u64().unwrap_or(u64::MAX)).collect();
    let orders_ok = cell.generator_orders.iter().all(|&o| o == k as u64);
    cell.stages.push(Stage::new(
        "orders",
        orders_ok,
        format!("{} generators of order {k}", set.gens.len()),
    ));
    let class = classify(&set.gens).expect("constructions give same-degree generators");
    let expected = expected_target(family, k);
    let generated = class == expected;
    cell.stages.push(Stage::new("classification", generated, class.to_string()));
    cell.classification = Some(class.to_string());
    cell.expected = Some(expected.to_string());
    cell.witness = jordan_certificate_named(&set.gens, &set.names, 1).map(|w| w.to_string());
    let known = family == Family::Conjecture && is_known_conjecture_exception(k, n);
    cell.outcome = match (orders_ok, known, generated) {
        (false, _, _) => Outcome::Fail,
        (true, true, false) => Outcome::ExpectedFail,
        (true, true, true) => Outcome::Fail,
        (true, false, true) => Outcome::Pass,
        (true, false, false) => Outcome::Fail,
    };
    if known {
        cell.detail = Some("known exception".into());
    }
    Ok(cell)
}

fn skip_cell(k: u64, n: Option<u64>, g: Option<u64>, reason: String) -> Cell {
    let mut cell = Cell::new(k, Outcome::Skip);
    cell.n = n;
    cell.g = g;
    cell.detail = Some(reason);
    cell
}

pub fn cmd_verify(family: Family, k: usize, n: usize, opts: &RunOptions) -> Result<SweepReport, CommandError> {
    let cell = verify_cell(family, k, n).map_err(|e| CommandError::Domain(e.to_string()))?;
    let cell = Cell {
        elapsed_ms: None,
        ..cell
    };
    let cell = timed(opts.timings, || cell);
    Ok(SweepReport::new(
        "verify",
        grid(&[("family", family.to_string()), ("k", k.to_string()), ("n", n.to_string())]),
        None,
        vec![cell],
    ))
}

/// Smallest `n` in the family's domain for this `k`.
pub fn family_floor(family: Family, k: usize) -> usize {
    match family {
        Family::Prop61 => 2 * k,
        Family::Prop62 => k + 2,
        Family::Miller | Family::Conjecture => k,
    }
}

const SPOT_CHECK_SEED: u64 = 0x5eed_cace;

/// Verifies every `(k, n)` with `k` in `ks` and `n` from `n_lo` (default: the
/// family's floor for that `k`) to `n_hi`. Cells come back ordered by `(k, n)`.
pub fn cmd_sweep(
    family: Family,
    ks: RangeInclusive<usize>,
    n_lo: Option<usize>,
    n_hi: usize,
    opts: &RunOptions,
) -> Result<(SweepReport, CacheStats), CommandError> {
    let grid_cells: Vec<(usize, usize)> = ks
        .clone()
        .flat_map(|k| (n_lo.unwrap_or_else(|| family_floor(family, k))..=n_hi).map(move |n| (k, n)))
        .collect();
    let compute = |&(k, n): &(usize, usize)| -> Cell {
        timed(opts.timings, || {
            verify_cell(family, k, n).unwrap_or_else(|e| skip_cell(k as u64, Some(n as u64), None, e.to_string()))
        })
    };
    let key = |&(k, n): &(usize, usize)| {
        Cache::key(
            "verify",
            &grid(&[("family", family.to_string()), ("k", k.to_string()), ("n", n.to_string())]),
            None,
        )
    };

    let mut stats = CacheStats::default();
    let cells = match &opts.cache {
        None => run_parallel(opts.jobs, &grid_cells, compute)?,
        Some(cache) => {
            let cached: Vec<Option<Cell>> = grid_cells.iter().map(|c| cache.get(&key(c))).collect();
            let missing: Vec<(usize, usize)> = grid_cells
                .iter()
                .zip(&cached)
                .filter(|(_, c)| c.is_none())
                .map(|(x, _)| *x)
                .collect();
            let fresh = run_parallel(opts.jobs, &missing, compute)?;
            for (c, cell) in missing.iter().zip(&fresh) {
                cache.put(&key(c), &Cell { elapsed_ms: None, ..cell.clone() })?;
            }
            stats.hits = grid_cells.len() - missing.len();
            stats.misses = missing.len();

            // recompute a random 1% of the hits (at least one) and compare
            let hit_idx: Vec<usize> = (0..grid_cells.len()).filter(|&i| cached[i].is_some()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
            let mut sample: Vec<usize> = hit_idx.iter().copied().filter(|_| rng.gen_bool(0.01)).collect();
            if sample.is_empty() && !hit_idx.is_empty() {
                sample.push(hit_idx[rng.gen_range(0..hit_idx.len())]);
            }
            let sample_cells: Vec<(usize, usize)> = sample.iter().map(|&i| grid_cells[i]).collect();
            let rechecked = run_parallel(opts.jobs, &sample_cells, compute)?;
            stats.spot_checked = sample.len();

            let mut fresh = fresh.into_iter();
            let mut cells: Vec<Cell> = cached
                .into_iter()
                .map(|c| c.unwrap_or_else(|| fresh.next().expect("one fresh cell per miss")))
                .collect();
            for (&i, recomputed) in sample.iter().zip(rechecked) {
                if !cells[i].same_result(&recomputed) {
                    stats.mismatches += 1;
                    cache.replace(&key(&grid_cells[i]), &Cell { elapsed_ms: None, ..recomputed.clone() })?;
                    cells[i] = recomputed;
                }
            }
            cells
        }
    };
    let n_range = match n_lo {
        Some(lo) => format!("{lo}..={n_hi}"),
        None => format!("floor..={n_hi}"),
    };
    let report = SweepReport::new(
        "sweep",
        grid(&[
            ("family", family.to_string()),
            ("k", format!("{}..={}", ks.start(), ks.end())),
            ("n", n_range),
        ]),
        None,
        cells,
    );
    Ok((report, stats))
}

fn mcg_domain(e: McgError) -> Option<String> {
    match e {
        McgError::RangeError(_)
        | McgError::UnsupportedK { .. }
        | McgError::PlusOneUnsupported
        | McgError::InvalidDecomposition(_) => Some(e.to_string()),
        _ => None,
    }
}

/// Runs the mapping-class pipeline for one `(k, g)`. `Err` carries a domain
/// error (inadmissible parameters).
pub fn mcg_cell(k: u32, g: u64, variant: Variant) -> Result<Cell, String> {
    if k < 5 {
        return Err(McgError::RangeError(k).to_string());
    }
    let dec = decompose(u64::from(k), g, variant == Variant::Three && k == 7)
        .ok_or_else(|| format!("genus {g} has no decomposition for k={k}"))?;
    let mut cell = Cell::new(u64::from(k), Outcome::Fail);
    cell.g = Some(g);
    cell.case_tag = Some(variant.to_string());
    cell.stages.push(Stage::new("decompose", true, dec.to_string()));

    let set = match mcg::build_actions(k, &dec, variant) {
        Ok(set) => set,
        Err(e) => {
            if let Some(msg) = mcg_domain(e.clone()) {
                return Err(msg);
            }
            cell.stages.push(Stage::new("build_action", false, e.to_string()));
            return Ok(cell);
        }
    };
    cell.generator_orders = set.actions.iter().map(|a| u64::from(a.order)).collect();
    cell.stages.push(Stage::new(
        "build_action",
        true,
        format!("{} generators, {} labels", set.actions.len(), set.labels.len()),
    ));

    let failures = mcg::lantern_hypothesis_failures(&set);
    let hyp = mcg::verify_lantern_hypotheses(&set);
    cell.stages.push(match hyp {
        Ok(true) => Stage::new("lantern_hypotheses", true, "f, g, h roles hold"),
        Ok(false) => Stage::new("lantern_hypotheses", false, failures.join("; ")),
        Err(e) => Stage::new("lantern_hypotheses", false, e.to_string()),
    });

    let orbit = mcg::certify_single_orbit(&set);
    cell.stages.push(Stage::new(
        "single_orbit",
        orbit.single_orbit,
        format!("{} component(s)", orbit.components.len()),
    ));

    match mcg::verify_lantern_word(&set) {
        Ok(word) => {
            cell.witness = Some(word.to_string());
            cell.stages.push(Stage::new("lantern_word", true, "replayed"));
        }
        Err(e) => cell.stages.push(Stage::new("lantern_word", false, e.to_string())),
    }

    let minimal = mcg::lantern_proof(&set)
        .map(|proof| (0..7u8).all(|mask| mcg::replay(&proof, &set, RuleSet::from_mask(mask)).is_err()))
        .unwrap_or(false);
    cell.stages.push(Stage::new(
        "rule_minimality",
        minimal,
        "every proper subset of {lantern, commute, conjugate} fails",
    ));

    let rotation = rotation_matrix(&dec).map(|r| (r.order(k + 1), preserves_form(r.matrix())));
    cell.stages.push(match rotation {
        Ok((order, form)) => Stage::new(
            "rotation_order",
            order == Some(k) && form,
            format!(
                "order {}, form {}",
                order.map_or("> k".to_string(), |o| o.to_string()),
                if form { "preserved" } else { "broken" }
            ),
        ),
        Err(e) => Stage::new("rotation_order", false, e.to_string()),
    });

    let pass = cell.stages.iter().all(|s| s.passed);
    cell.outcome = if pass { Outcome::Pass } else { Outcome::Fail };
    cell.classification = Some(if pass { "all stages pass" } else { "stage failure" }.into());
    Ok(cell)
}

pub fn cmd_mcg(k: u32, g: u64, variant: Variant, opts: &RunOptions) -> Result<SweepReport, CommandError> {
    let start = Instant::now();
    let mut cell = mcg_cell(k, g, variant).map_err(CommandError::Domain)?;
    if opts.timings {
        cell.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(SweepReport::new(
        "mcg",
        grid(&[("k", k.to_string()), ("g", g.to_string()), ("variant", variant.to_string())]),
        None,
        vec![cell],
    ))
}

/// The pipeline over a grid; inadmissible cells are skipped.
pub fn cmd_mcg_sweep(
    variant: Variant,
    ks: RangeInclusive<u32>,
    gs: RangeInclusive<u64>,
    opts: &RunOptions,
) -> Result<SweepReport, CommandError> {
    let grid_cells: Vec<(u32, u64)> = ks.clone().flat_map(|k| gs.clone().map(move |g| (k, g))).collect();
    let cells = run_parallel(opts.jobs, &grid_cells, |&(k, g)| {
        timed(opts.timings, || {
            mcg_cell(k, g, variant).unwrap_or_else(|e| skip_cell(u64::from(k), None, Some(g), e))
        })
    })?;
    Ok(SweepReport::new(
        "mcg-sweep",
        grid(&[
            ("k", format!("{}..={}", ks.start(), ks.end())),
            ("g", format!("{}..={}", gs.start(), gs.end())),
            ("variant", variant.to_string()),
        ]),
        None,
        cells,
    ))
}

/// Genus arithmetic for one `k`: stable range, small-genus count against
/// the closed form, and the leading-piece bound.
pub fn genus_cell(k: u64) -> Result<Cell, String> {
    let bound = stable_bound(k).map_err(|e| e.to_string())?;
    let mut cell = Cell::new(k, Outcome::Fail);
    let gaps: Vec<u64> = (bound..=GENUS_CHECK_MAX).filter(|&g| decompose(k, g, false).is_none()).collect();
    cell.stages.push(Stage::new(
        "stable_range",
        gaps.is_empty(),
        format!("{bound}..={GENUS_CHECK_MAX}, {} gap(s)", gaps.len()),
    ));
    let count = count_small_representable(k).map_err(|e| e.to_string())?;
    let claimed = claimed_small_count(k);
    cell.stages.push(Stage::new(
        "small_count",
        count == claimed,
        format!("{} of {} (closed form {} of {})", count.0, count.1, claimed.0, claimed.1),
    ));
    if let Ok(t1) = theorem1_bound(k) {
        let misses = (t1..=GENUS_CHECK_MAX)
            .filter(|&g| decompose(k, g, true).is_none_or(|d| d.plus_one || d.a == 0))
            .count();
        cell.stages.push(Stage::new(
            "leading_piece",
            misses == 0,
            format!("{t1}..={GENUS_CHECK_MAX}, {misses} miss(es)"),
        ));
    }
    cell.outcome = if cell.stages.iter().all(|s| s.passed) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    cell.classification = Some(format!("stable_bound={bound}"));
    Ok(cell)
}

/// With `g`: the decomposition of `g` for each `k`. Without: the genus
/// arithmetic checks for each `k`.
pub fn cmd_genus(ks: RangeInclusive<u64>, g: Option<u64>, opts: &RunOptions) -> Result<SweepReport, CommandError> {
    let mut cells = Vec::new();
    for k in ks.clone() {
        let cell = match g {
            Some(g) => {
                let dec = decompose(k, g, false)
                    .ok_or_else(|| CommandError::Domain(format!("genus {g} has no decomposition for k={k}")))?;
                let mut cell = Cell::new(k, Outcome::Pass);
                cell.g = Some(g);
                cell.classification = Some(dec.to_string());
                cell.case_tag = Some(if dec.plus_one { "ak+1" } else { "ak+b(k-1)" }.into());
                cell
            }
            None => timed(opts.timings, || {
                genus_cell(k).unwrap_or_else(|e| skip_cell(k, None, None, e))
            }),
        };
        cells.push(cell);
    }
    let mut params = vec![("k", format!("{}..={}", ks.start(), ks.end()))];
    if let Some(g) = g {
        params.push(("g", g.to_string()));
    }
    Ok(SweepReport::new("genus", grid(&params), None, cells))
}

/// With `k`: the rotation matrix of the decomposition of `g`. Without: do
/// the Humphries transvections generate `Sp(2g, p)`?
pub fn cmd_sympl(g: usize, k: Option<u64>, p: u8, opts: &RunOptions) -> Result<SweepReport, CommandError> {
    let start = Instant::now();
    let domain = |e: sympl::SymplError| CommandError::Domain(e.to_string());
    let mut cell;
    let params;
    match k {
        Some(k) => {
            let dec = decompose(k, g as u64, false)
                .ok_or_else(|| CommandError::Domain(format!("genus {g} has no decomposition for k={k}")))?;
            let r = rotation_matrix(&dec).map_err(domain)?;
            let order = r.order(k as u32 + 1);
            let form = preserves_form(r.matrix());
            let pass = order == Some(k as u32) && form;
            cell = Cell::new(k, if pass { Outcome::Pass } else { Outcome::Fail });
            cell.g = Some(g as u64);
            cell.classification = Some(order.map_or("order > k".into(), |o| format!("order {o}")));
            cell.expected = Some(format!("order {k}"));
            cell.case_tag = Some(dec.to_string());
            cell.stages.push(Stage::new("order", order == Some(k as u32), format!("{order:?}")));
            cell.stages.push(Stage::new("preserves_form", form, ""));
            cell.witness = Some(serde_json::to_string(&r).expect("matrices serialise"));
            params = vec![("g", g.to_string()), ("k", k.to_string())];
        }
        None => {
            let mats = humphries_transvections(g).map_err(domain)?;
            let (generates, order) = generates_mod_p(&mats, p).map_err(domain)?;
            cell = Cell::new(0, if generates { Outcome::Pass } else { Outcome::Fail });
            cell.g = Some(g as u64);
            cell.classification = Some(format!("order {order}"));
            cell.expected = Some(format!("order {}", sp_order(g as u32, u32::from(p))));
            cell.generator_orders = vec![];
            cell.case_tag = Some(format!("p={p}"));
            cell.stages.push(Stage::new("generates", generates, format!("{} transvections", mats.len())));
            params = vec![("g", g.to_string()), ("p", p.to_string())];
        }
    }
    if opts.timings {
        cell.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(SweepReport::new("sympl", grid(&params), None, vec![cell]))
}

#[cfg(test)]
mod tests;
