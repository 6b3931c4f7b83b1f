//! Exhaustive classification of normalized digit sets `D ⊂ [0, bound]`.
//!
//! Every set is classified independently, so the enumeration is striped
//! across worker threads that send finished records back over a channel.

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::thread;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use tilescope_core::skewform::skew_decompose;
use tilescope_core::tiling::{is_tile, stabilization_exponent};
use tilescope_core::{DigitSet, Error};

use crate::CliError;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "TILESCOPE_WORKERS";

pub const DEFAULT_MAX_BASE: i64 = 12;
pub const DEFAULT_MAX_BOUND: i64 = 64;
pub const DEFAULT_WORK_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub base: i64,
    pub bound: i64,
    pub max_m: u32,
    pub workers: usize,
    /// Largest number of candidate sets accepted.
    pub work_cap: u64,
    pub max_base: i64,
    pub max_bound: i64,
}

impl SearchOptions {
    pub fn new(base: i64, bound: i64) -> Self {
        Self {
            base,
            bound,
            max_m: 12,
            workers: default_workers(),
            work_cap: DEFAULT_WORK_CAP,
            max_base: DEFAULT_MAX_BASE,
            max_bound: DEFAULT_MAX_BOUND,
        }
    }
}

/// `TILESCOPE_WORKERS` if set and positive, otherwise the available
/// parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Tile,
    NonTile,
    /// Tile whose chain did not stabilize within `max_m`.
    Inconclusive,
    /// `D_m` too large to enumerate for the decomposition check.
    Unverifiable,
    /// Not a tile, yet some `D_m` is a skew-product form.
    NonTileDecomposes,
    /// Tile with stabilization exponent `m` but `D_m` does not decompose.
    TileWithoutDecomposition,
    /// `D_{m'}` decomposes for some `m'` below the stabilization exponent.
    DecomposesBeforeStabilization,
}

impl Status {
    pub fn is_violation(self) -> bool {
        matches!(
            self,
            Status::NonTileDecomposes
                | Status::TileWithoutDecomposition
                | Status::DecomposesBeforeStabilization
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRecord {
    pub digits: Vec<i64>,
    pub status: Status,
    pub tile: bool,
    /// Shortest collision length for non-tiles.
    pub collision_level: Option<u32>,
    pub m: Option<u32>,
    pub decomposed_at: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub base: i64,
    pub bound: i64,
    pub max_m: u32,
    pub sets: u64,
    pub tiles: u64,
    pub non_tiles: u64,
    pub inconclusive: u64,
    pub unverifiable: u64,
    pub max_observed_m: Option<u32>,
    pub m_histogram: BTreeMap<u32, u64>,
    pub violations: Vec<SetRecord>,
}

/// Number of `k`-subsets of an `n`-set, saturating.
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Sets `{0} ∪ S` with `S ⊂ [1, bound]`, `#S = base - 1`, `gcd = 1`, in
/// lexicographic order.
pub fn normalized_sets(base: i64, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    let k = (base - 1).max(0) as usize;
    let n = bound.max(0);
    let mut current: Option<Vec<i64>> = if (k as i64) <= n {
        Some((1..=k as i64).collect())
    } else {
        None
    };
    std::iter::from_fn(move || loop {
        let combo = current.take()?;
        // advance
        let mut next = combo.clone();
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if next[i] < n - (k - 1 - i) as i64 {
                next[i] += 1;
                for t in i + 1..k {
                    next[t] = next[t - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            current = Some(next);
        }
        if combo.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1 || (k == 0) {
            let mut set = Vec::with_capacity(k + 1);
            set.push(0);
            set.extend(combo);
            return Some(set);
        }
    })
}

pub fn classify(digits: &DigitSet, max_m: u32) -> SetRecord {
    let base = digits.base();
    let witness = is_tile(digits);
    let mut record = SetRecord {
        digits: digits.digits().to_vec(),
        status: Status::NonTile,
        tile: witness.is_tile(),
        collision_level: witness.length().map(|l| l as u32),
        m: None,
        decomposed_at: None,
    };
    let decomposes = |m: u32| -> Result<bool, Error> {
        let values = digits.expand(m)?.values;
        if values.len() as i64 != base.pow(m) {
            return Ok(false);
        }
        Ok(skew_decompose(&values, base.pow(m), 1)?.is_some())
    };

    if let Some(level) = record.collision_level {
        // From `level` on, #D_m < b^m and no decomposition can exist.
        for m in 1..level.min(max_m + 1) {
            match decomposes(m) {
                Ok(true) => {
                    record.decomposed_at = Some(m);
                    record.status = Status::NonTileDecomposes;
                    return record;
                }
                Ok(false) => {}
                Err(_) => break,
            }
        }
        return record;
    }

    let m = match stabilization_exponent(digits, max_m) {
        Ok(Some(m)) => m,
        _ => {
            record.status = Status::Inconclusive;
            return record;
        }
    };
    record.m = Some(m);
    for level in 1..=m {
        match decomposes(level) {
            Ok(true) => {
                record.decomposed_at = Some(level);
                record.status = if level < m {
                    Status::DecomposesBeforeStabilization
                } else {
                    Status::Tile
                };
                return record;
            }
            Ok(false) => {}
            Err(_) => {
                record.status = Status::Unverifiable;
                return record;
            }
        }
    }
    record.status = Status::TileWithoutDecomposition;
    record
}

fn check_limits(options: &SearchOptions) -> Result<(), CliError> {
    if options.base < 2 || options.base > options.max_base {
        return Err(CliError::Input(format!(
            "base {} outside [2, {}] (raise --max-base to allow)",
            options.base, options.max_base
        )));
    }
    if options.bound < options.base - 1 || options.bound > options.max_bound {
        return Err(CliError::Input(format!(
            "digit bound {} outside [{}, {}] (raise --max-bound to allow)",
            options.bound,
            options.base - 1,
            options.max_bound
        )));
    }
    let work = binomial(options.bound as u64, (options.base - 1) as u64);
    if work > options.work_cap {
        return Err(CliError::Input(format!(
            "about {work} candidate sets exceeds the work cap {} (raise --work-cap to allow)",
            options.work_cap
        )));
    }
    Ok(())
}

/// Classifies every normalized set; records come back sorted by digits.
pub fn search_records(options: &SearchOptions) -> Result<Vec<SetRecord>, CliError> {
    check_limits(options)?;
    let workers = options.workers.max(1);
    let (tx, rx) = mpsc::channel::<SetRecord>();
    thread::scope(|scope| {
        for worker in 0..workers {
            let tx = tx.clone();
            scope.spawn(move || {
                for (i, set) in normalized_sets(options.base, options.bound).enumerate() {
                    if i % workers != worker {
                        continue;
                    }
                    let digits =
                        DigitSet::new(options.base, set).expect("enumerated sets are valid");
                    if tx.send(classify(&digits, options.max_m)).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);
    });
    let mut records: Vec<SetRecord> = rx.into_iter().collect();
    records.sort_unstable_by(|a, b| a.digits.cmp(&b.digits));
    Ok(records)
}

pub fn summarize(options: &SearchOptions, records: &[SetRecord]) -> SearchSummary {
    let mut summary = SearchSummary {
        base: options.base,
        bound: options.bound,
        max_m: options.max_m,
        sets: records.len() as u64,
        tiles: 0,
        non_tiles: 0,
        inconclusive: 0,
        unverifiable: 0,
        max_observed_m: None,
        m_histogram: BTreeMap::new(),
        violations: Vec::new(),
    };
    for r in records {
        if r.tile {
            summary.tiles += 1;
        } else {
            summary.non_tiles += 1;
        }
        match r.status {
            Status::Inconclusive => summary.inconclusive += 1,
            Status::Unverifiable => summary.unverifiable += 1,
            s if s.is_violation() => summary.violations.push(r.clone()),
            _ => {}
        }
        if let Some(m) = r.m {
            *summary.m_histogram.entry(m).or_default() += 1;
            summary.max_observed_m = summary.max_observed_m.max(Some(m));
        }
    }
    summary
}

pub fn search(options: &SearchOptions) -> Result<(SearchSummary, Vec<SetRecord>), CliError> {
    let records = search_records(options)?;
    Ok((summarize(options, &records), records))
}
