//! Digit sets, their normalization, the expansions `D_k`, and the residue
//! helpers shared by every other module.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper bound on `base^k` for explicit enumeration of `D_k`.
pub const MAX_ENUMERATION: i64 = 1 << 22;

/// A base `b >= 2` together with `b` distinct integer digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitSet {
    base: i64,
    digits: Vec<i64>,
}

impl DigitSet {
    /// Builds a digit set, sorting the digits. Rejects `base < 2`, a digit
    /// count different from `base`, and repeated digits.
    pub fn new(base: i64, digits: impl IntoIterator<Item = i64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::BaseTooSmall(base));
        }
        let mut digits: Vec<i64> = digits.into_iter().collect();
        digits.sort_unstable();
        if let Some(w) = digits.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateDigit(w[0]));
        }
        if digits.len() as i64 != base {
            return Err(Error::WrongDigitCount {
                expected: base as usize,
                got: digits.len(),
            });
        }
        Ok(Self { base, digits })
    }

    /// The standard digit set `{0, 1, ..., b-1}`.
    pub fn standard(base: i64) -> Result<Self> {
        Self::new(base, 0..base.max(0))
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn min(&self) -> i64 {
        self.digits[0]
    }

    pub fn max(&self) -> i64 {
        self.digits[self.digits.len() - 1]
    }

    /// Largest `|d - d'|` over pairs of digits.
    pub fn spread(&self) -> i64 {
        self.max() - self.min()
    }

    /// `0 ∈ D` and the gcd of the digits is 1.
    pub fn is_normalized(&self) -> bool {
        self.digits.binary_search(&0).is_ok() && gcd_all(&self.digits) == 1
    }

    /// Largest level `k` that [`DigitSet::expand`] accepts.
    pub fn max_safe_level(&self) -> u32 {
        let magnitude = self.digits.iter().map(|d| d.abs()).max().unwrap_or(0);
        let mut k = 0u32;
        let mut power: i64 = 1;
        while let Some(next) = power.checked_mul(self.base) {
            if next > MAX_ENUMERATION {
                break;
            }
            // |values| <= magnitude * (b^k - 1) / (b - 1) <= magnitude * b^k
            if magnitude.checked_mul(next).is_none() {
                break;
            }
            power = next;
            k += 1;
        }
        k
    }

    /// The expansion `D_k = D + bD + ... + b^{k-1}D`, as a set.
    pub fn expand(&self, level: u32) -> Result<ExpandedDigits> {
        let safe_max = self.max_safe_level();
        if level == 0 || level > safe_max {
            return Err(Error::LevelTooLarge { level, safe_max });
        }
        let mut values = self.digits.clone();
        let mut scale: i64 = 1;
        for _ in 1..level {
            scale *= self.base;
            let mut next = Vec::with_capacity(values.len() * self.digits.len());
            for &d in &self.digits {
                let shift = d * scale;
                next.extend(values.iter().map(|&v| v + shift));
            }
            next.sort_unstable();
            next.dedup();
            values = next;
        }
        let total = self.base.pow(level);
        let collisions = (total - values.len() as i64) as u64;
        Ok(ExpandedDigits {
            base: self.base,
            level,
            values,
            collisions,
        })
    }
}

/// Output of [`normalize`]: `digits = (raw - offset) / scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub digits: DigitSet,
    pub offset: i64,
    pub scale: i64,
}

/// Translates the digits to start at 0 and divides out their gcd. Tiling
/// and decomposition properties are invariant under this affine change.
pub fn normalize(raw: &[i64], base: i64) -> Result<Normalized> {
    let input = DigitSet::new(base, raw.iter().copied())?;
    let offset = input.min();
    let shifted: Vec<i64> = input
        .digits()
        .iter()
        .map(|&d| d.checked_sub(offset).ok_or(Error::Overflow("normalize")))
        .collect::<Result<_>>()?;
    let scale = gcd_all(&shifted).max(1);
    let digits = DigitSet::new(base, shifted.into_iter().map(|d| d / scale))?;
    Ok(Normalized {
        digits,
        offset,
        scale,
    })
}

/// gcd of the nonzero entries; 0 if there are none.
pub fn gcd_all(values: &[i64]) -> i64 {
    values.iter().fold(0i64, |g, &v| g.gcd(&v))
}

/// `D_k` as an explicit set of integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedDigits {
    pub base: i64,
    pub level: u32,
    /// Sorted, distinct.
    pub values: Vec<i64>,
    /// `base^level - #values`.
    pub collisions: u64,
}

/// Sorted distinct residues of `set` modulo `modulus`.
pub fn residues_mod(set: &[i64], modulus: i64) -> Vec<i64> {
    assert!(modulus >= 1, "modulus must be positive");
    let mut out: Vec<i64> = set.iter().map(|v| v.rem_euclid(modulus)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// True iff `A ⊕ B` is a direct sum that hits every residue modulo `modulus`
/// exactly once.
pub fn direct_sum_complete(a: &[i64], b: &[i64], modulus: i64) -> bool {
    if modulus < 1 || (a.len() as i64).checked_mul(b.len() as i64) != Some(modulus) {
        return false;
    }
    let mut hit = vec![false; modulus as usize];
    let (ra, rb): (Vec<i64>, Vec<i64>) = (
        a.iter().map(|x| x.rem_euclid(modulus)).collect(),
        b.iter().map(|x| x.rem_euclid(modulus)).collect(),
    );
    for &x in &ra {
        for &y in &rb {
            let r = ((x + y) % modulus) as usize;
            if hit[r] {
                return false;
            }
            hit[r] = true;
        }
    }
    true
}

/// Set of all sums `a + b`, sorted and deduplicated.
pub fn sumset(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x.checked_add(y).ok_or(Error::Overflow("sumset"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `factor * set`, with overflow checking.
pub fn scaled(set: &[i64], factor: i64) -> Result<Vec<i64>> {
    set.iter()
        .map(|&v| v.checked_mul(factor).ok_or(Error::Overflow("scale")))
        .collect()
}

/// Checked `base^exp`.
pub fn checked_pow(base: i64, exp: u32) -> Result<i64> {
    base.checked_pow(exp).ok_or(Error::Overflow("power"))
}
