//! Outer interval approximations of the attractor `T(b, D)`.
//!
//! With `H = [min D/(b-1), max D/(b-1)] ⊇ T`, the level-`k` approximation is
//! `⋃_{v ∈ D_k} (v + H) / b^k`. These sets are nested, contain `T`, and
//! their lengths decrease to the Lebesgue measure of `T`.

use serde::{Deserialize, Serialize};

use crate::digits::checked_pow;
use crate::periodic::PeriodicSet;
use crate::tiling::tile_measure;
use crate::{DigitSet, Error, Rational, Result};

/// Sorted, pairwise disjoint closed intervals with positive gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalUnion {
    pub level: u32,
    pub intervals: Vec<(Rational, Rational)>,
    pub total_length: Rational,
}

impl IntervalUnion {
    /// Merges integer intervals `[lo, hi]` measured in units of `1/unit`.
    fn from_scaled(level: u32, mut raw: Vec<(i64, i64)>, unit: i64) -> Self {
        raw.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::new();
        for (lo, hi) in raw {
            match merged.last_mut() {
                // touching intervals are joined
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        let length: i64 = merged.iter().map(|(lo, hi)| hi - lo).sum();
        Self {
            level,
            intervals: merged
                .into_iter()
                .map(|(lo, hi)| (Rational::new(lo, unit), Rational::new(hi, unit)))
                .collect(),
            total_length: Rational::new(length, unit),
        }
    }
}

/// `[min D/(b-1), max D/(b-1)]`.
pub fn hull(digits: &DigitSet) -> (Rational, Rational) {
    let denom = digits.base() - 1;
    (
        Rational::new(digits.min(), denom),
        Rational::new(digits.max(), denom),
    )
}

/// Level-`k` outer approximation; `k = 0` gives the hull.
pub fn approx(digits: &DigitSet, level: u32) -> Result<IntervalUnion> {
    let b = digits.base();
    if level == 0 {
        return Ok(IntervalUnion::from_scaled(
            0,
            vec![(digits.min(), digits.max())],
            b - 1,
        ));
    }
    let values = digits.expand(level)?.values;
    let unit = checked_pow(b, level)?
        .checked_mul(b - 1)
        .ok_or(Error::Overflow("interval denominator"))?;
    let raw = values
        .iter()
        .map(|&v| {
            let scaled = v
                .checked_mul(b - 1)
                .ok_or(Error::Overflow("interval endpoint"))?;
            Ok((scaled + digits.min(), scaled + digits.max()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalUnion::from_scaled(level, raw, unit))
}

/// Lengths of `approx(D, k)` for `k = 1..=max_level`, compared with the
/// exact measure `1/density(J)` when a tiling set is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub lengths: Vec<LevelLength>,
    pub target: Option<Rational>,
    /// `length(k_max) - target`.
    pub gap: Option<Rational>,
    /// First level whose length equals the target, if any.
    pub exact_from: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLength {
    pub level: u32,
    pub length: Rational,
    pub intervals: usize,
}

pub fn measure_report(
    digits: &DigitSet,
    max_level: u32,
    tiling: Option<&PeriodicSet>,
) -> Result<MeasureReport> {
    let target = tiling.map(tile_measure).transpose()?;
    let mut lengths = Vec::with_capacity(max_level as usize);
    for level in 1..=max_level {
        let u = approx(digits, level)?;
        lengths.push(LevelLength {
            level,
            length: u.total_length,
            intervals: u.intervals.len(),
        });
    }
    let gap = match (target, lengths.last()) {
        (Some(t), Some(last)) => Some(last.length - t),
        _ => None,
    };
    let exact_from = target.and_then(|t| lengths.iter().find(|l| l.length == t).map(|l| l.level));
    Ok(MeasureReport {
        lengths,
        target,
        gap,
        exact_from,
    })
}
