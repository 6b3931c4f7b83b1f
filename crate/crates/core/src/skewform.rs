//! Skew-product-form decompositions `D = ⋃_j (a_j + base^stage · B_j)` with
//! every `A ⊕ B_j` a complete residue system modulo `base`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::digits::{checked_pow, direct_sum_complete, scaled, sumset};
use crate::{DigitSet, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkewDecomposition {
    /// Modulus unit: `b`, or `b^m` when decomposing `D_m`.
    pub base: i64,
    pub stage: u32,
    /// The translations `a_j`, sorted.
    pub a: Vec<i64>,
    /// `bs[j]` is `B_j`, sorted.
    pub bs: Vec<Vec<i64>>,
}

impl SkewDecomposition {
    /// `base^stage`.
    pub fn step(&self) -> Result<i64> {
        checked_pow(self.base, self.stage)
    }

    /// The represented set, sorted. Repeated elements are kept so that
    /// overlapping chunks stay visible to [`verify_decomposition`].
    pub fn elements(&self) -> Result<Vec<i64>> {
        let step = self.step()?;
        let mut out = Vec::new();
        for (a, b) in self.a.iter().zip(&self.bs) {
            for &u in b {
                let v = u
                    .checked_mul(step)
                    .and_then(|x| x.checked_add(*a))
                    .ok_or(Error::Overflow("decomposition elements"))?;
                out.push(v);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Whether every `B_j` is the same set (product form).
    pub fn is_product_form(&self) -> bool {
        self.bs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Why [`detect`] found no decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Rejection {
    /// A residue class modulo `base` is not constant modulo `base^stage`.
    ClassNotConstant {
        residue: i64,
    },
    UnequalClassSizes {
        sizes: Vec<usize>,
    },
    /// `A ⊕ B_j` fails to be a complete residue system for this `a_j`.
    NotComplete {
        a: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    Found(SkewDecomposition),
    Rejected(Rejection),
}

impl Detection {
    pub fn found(self) -> Option<SkewDecomposition> {
        match self {
            Detection::Found(dec) => Some(dec),
            Detection::Rejected(_) => None,
        }
    }
}

/// Canonical detection: the chunks of a decomposition are forced to be the
/// residue classes of `set` modulo `base`, with `a_j` the class minimum.
pub fn detect(set: &[i64], base: i64, stage: u32) -> Result<Detection> {
    if base < 2 {
        return Err(Error::BaseTooSmall(base));
    }
    let distinct: BTreeSet<i64> = set.iter().copied().collect();
    if distinct.len() as i64 != base || set.len() != distinct.len() {
        return Err(Error::CardinalityMismatch {
            base,
            got: distinct.len(),
        });
    }
    let step = checked_pow(base, stage)?;

    let mut classes: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &e in &distinct {
        classes.entry(e.rem_euclid(base)).or_default().push(e);
    }
    let mut chunks: Vec<Vec<i64>> = classes.into_values().collect();
    chunks.sort_unstable_by_key(|c| c[0]);

    for chunk in &chunks {
        let rep = chunk[0];
        if chunk.iter().any(|&e| (e - rep).rem_euclid(step) != 0) {
            return Ok(Detection::Rejected(Rejection::ClassNotConstant {
                residue: rep.rem_euclid(base),
            }));
        }
    }
    let sizes: Vec<usize> = chunks.iter().map(Vec::len).collect();
    if sizes.windows(2).any(|w| w[0] != w[1]) {
        return Ok(Detection::Rejected(Rejection::UnequalClassSizes { sizes }));
    }

    let a: Vec<i64> = chunks.iter().map(|c| c[0]).collect();
    let bs: Vec<Vec<i64>> = chunks
        .iter()
        .map(|c| c.iter().map(|&e| (e - c[0]) / step).collect())
        .collect();
    let mut checked: BTreeSet<&[i64]> = BTreeSet::new();
    for (aj, b) in a.iter().zip(&bs) {
        if checked.insert(b.as_slice()) && !direct_sum_complete(&a, b, base) {
            return Ok(Detection::Rejected(Rejection::NotComplete { a: *aj }));
        }
    }
    Ok(Detection::Found(SkewDecomposition { base, stage, a, bs }))
}

/// [`detect`], discarding the rejection reason.
pub fn skew_decompose(set: &[i64], base: i64, stage: u32) -> Result<Option<SkewDecomposition>> {
    Ok(detect(set, base, stage)?.found())
}

/// Re-checks every structural invariant of `dec` against `set`.
pub fn verify_decomposition(dec: &SkewDecomposition, set: &[i64]) -> bool {
    if dec.base < 2 || dec.stage == 0 || dec.a.is_empty() || dec.a.len() != dec.bs.len() {
        return false;
    }
    let Ok(elements) = dec.elements() else {
        return false;
    };
    let mut expected = set.to_vec();
    expected.sort_unstable();
    if elements != expected || elements.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let s = dec.a.len() as i64;
    let mut residues: Vec<i64> = dec.a.iter().map(|a| a.rem_euclid(dec.base)).collect();
    residues.sort_unstable();
    residues.dedup();
    residues.len() == dec.a.len()
        && dec.bs.iter().all(|b| {
            s.checked_mul(b.len() as i64) == Some(dec.base)
                && direct_sum_complete(&dec.a, b, dec.base)
        })
}

/// Turns an `m`-stage decomposition of `D` with respect to `b` into a
/// 1-stage decomposition of `D_m` with respect to `b^m`.
///
/// `A' = A + bA + ... + b^{m-1}A`, and for each index tuple
/// `(i_1, ..., i_m)` the class `a_{i_1} + ... + b^{m-1} a_{i_m}` carries
/// `B_{i_1} + b B_{i_2} + ... + b^{m-1} B_{i_m}`.
pub fn lift_stage(dec: &SkewDecomposition) -> Result<SkewDecomposition> {
    let m = dec.stage;
    let b = dec.base;
    let s = dec.a.len();
    let lifted_base = checked_pow(b, m)?;

    // (a', B') per index tuple, built one position at a time.
    let mut parts: Vec<(i64, Vec<i64>)> = vec![(0, vec![0])];
    let mut weight: i64 = 1;
    for _ in 0..m {
        let mut next = Vec::with_capacity(parts.len() * s);
        for (a_acc, b_acc) in &parts {
            for j in 0..s {
                let a_term = dec.a[j]
                    .checked_mul(weight)
                    .ok_or(Error::Overflow("lift"))?;
                let b_term = scaled(&dec.bs[j], weight)?;
                next.push((
                    a_acc.checked_add(a_term).ok_or(Error::Overflow("lift"))?,
                    sumset(b_acc, &b_term)?,
                ));
            }
        }
        parts = next;
        weight = weight.checked_mul(b).ok_or(Error::Overflow("lift"))?;
    }
    parts.sort();
    let (a, bs): (Vec<i64>, Vec<Vec<i64>>) = parts.into_iter().unzip();
    let lifted = SkewDecomposition {
        base: lifted_base,
        stage: 1,
        a,
        bs,
    };

    let digits = DigitSet::new(b, dec.elements()?)?;
    let expanded = digits.expand(m)?;
    if !verify_decomposition(&lifted, &expanded.values) {
        return Err(Error::LiftVerification);
    }
    Ok(lifted)
}

/// Product form `D = A_0 ⊕ b A_1 ⊕ ... ⊕ b^{m-1} A_{m-1}` where
/// `A_0 ⊕ ... ⊕ A_{m-1}` is a complete residue system modulo `b`.
pub fn gen_product_form(factors: &[Vec<i64>], base: i64) -> Result<DigitSet> {
    let mut plain = vec![0i64];
    let mut count: usize = 1;
    for f in factors {
        plain = sumset(&plain, f)?;
        count = count.saturating_mul(f.len());
    }
    let complete =
        count as i64 == base && plain.len() == count && direct_sum_complete(&plain, &[0], base);
    if !complete {
        return Err(Error::NotCompleteResidues(base));
    }
    let mut digits = vec![0i64];
    let mut weight: i64 = 1;
    for f in factors {
        digits = sumset(&digits, &scaled(f, weight)?)?;
        weight = weight
            .checked_mul(base)
            .ok_or(Error::Overflow("product form"))?;
    }
    DigitSet::new(base, digits)
}

/// Weak product form: `d = a_j + b^m u + b^{m+1} x_{j,u}` for `a_j ∈ A`,
/// `u ∈ B`, where `A ⊕ B` is complete modulo `b = #A·#B`. `offsets` maps
/// `(j, u)` to `x_{j,u}`; missing keys mean 0.
pub fn gen_weak_product_form(
    a: &[i64],
    b: &[i64],
    stage: u32,
    offsets: &BTreeMap<(usize, i64), i64>,
) -> Result<DigitSet> {
    let base = (a.len() as i64)
        .checked_mul(b.len() as i64)
        .ok_or(Error::Overflow("weak product form"))?;
    if base < 2 || !direct_sum_complete(a, b, base) {
        return Err(Error::NotCompleteResidues(base));
    }
    let step = checked_pow(base, stage)?;
    let high = step
        .checked_mul(base)
        .ok_or(Error::Overflow("weak product form"))?;
    let mut digits = Vec::with_capacity(base as usize);
    for (j, &aj) in a.iter().enumerate() {
        for &u in b {
            let x = offsets.get(&(j, u)).copied().unwrap_or(0);
            let d = u
                .checked_mul(step)
                .and_then(|t| t.checked_add(aj))
                .and_then(|t| x.checked_mul(high).and_then(|h| t.checked_add(h)))
                .ok_or(Error::Overflow("weak product form"))?;
            digits.push(d);
        }
    }
    digits.sort_unstable();
    if let Some(w) = digits.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::GeneratedCollision(w[0]));
    }
    DigitSet::new(base, digits)
}
