//! Full-periodic subsets `C + P·Z` of the integers.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::prime_factors;
use crate::{Error, Rational, Result};

/// The set `residues + period·Z`.
///
/// Values built through [`PeriodicSet::new`] are in canonical form (the
/// period is minimal), so two canonical sets are equal as subsets of `Z`
/// exactly when they are equal as values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicSet {
    period: i64,
    residues: Vec<i64>,
}

impl PeriodicSet {
    /// Canonical form of `residues + period·Z`. Residues may be given in any
    /// order and outside `[0, period)`.
    pub fn new(period: i64, residues: impl IntoIterator<Item = i64>) -> Result<Self> {
        Ok(Self::unreduced(period, residues)?.reduce())
    }

    /// Same set as [`PeriodicSet::new`] but keeping the given period.
    pub fn unreduced(period: i64, residues: impl IntoIterator<Item = i64>) -> Result<Self> {
        if period < 1 {
            return Err(Error::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        let mut residues: Vec<i64> = residues.into_iter().map(|r| r.rem_euclid(period)).collect();
        residues.sort_unstable();
        residues.dedup();
        Ok(Self { period, residues })
    }

    /// All of `Z`.
    pub fn integers() -> Self {
        Self {
            period: 1,
            residues: vec![0],
        }
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn residues(&self) -> &[i64] {
        &self.residues
    }

    pub fn contains(&self, n: i64) -> bool {
        self.residues
            .binary_search(&n.rem_euclid(self.period))
            .is_ok()
    }

    /// `#residues / period`.
    pub fn density(&self) -> Rational {
        Rational::new(self.residues.len() as i64, self.period)
    }

    /// Smallest period dividing the current one, residues rewritten.
    pub fn reduce(&self) -> Self {
        let mut current = self.clone();
        for p in prime_factors(self.period) {
            while current.period % p == 0 && current.has_period(current.period / p) {
                let q = current.period / p;
                let mut residues: Vec<i64> = current
                    .residues
                    .iter()
                    .filter(|&&r| r < q)
                    .copied()
                    .collect();
                residues.sort_unstable();
                current = Self {
                    period: q,
                    residues,
                };
            }
        }
        current
    }

    pub fn is_canonical(&self) -> bool {
        self.reduce().period == self.period
    }

    /// Whether shifting by `shift` (a divisor of the period) maps the set onto
    /// itself.
    fn has_period(&self, shift: i64) -> bool {
        self.residues.iter().all(|&r| {
            let moved = (r + shift) % self.period;
            self.residues.binary_search(&moved).is_ok()
        })
    }

    /// Residues of the set modulo a multiple of its period.
    pub fn residues_mod(&self, modulus: i64) -> Result<Vec<i64>> {
        if modulus < 1 || modulus % self.period != 0 {
            return Err(Error::InvalidArgument(format!(
                "{modulus} is not a multiple of the period {}",
                self.period
            )));
        }
        let copies = modulus / self.period;
        let mut out = Vec::with_capacity(self.residues.len() * copies as usize);
        for t in 0..copies {
            out.extend(self.residues.iter().map(|&r| r + t * self.period));
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        let modulus = self.period.lcm(&other.period);
        match self.residues_mod(modulus) {
            Ok(mine) => mine.iter().all(|&r| other.contains(r)),
            Err(_) => false,
        }
    }

    /// The canonical form of `factor·J + digits`.
    pub fn scale_add(&self, factor: i64, digits: &[i64]) -> Result<Self> {
        let period = self
            .period
            .checked_mul(factor)
            .ok_or(Error::Overflow("periodic scale"))?;
        let mut residues = Vec::with_capacity(self.residues.len() * digits.len());
        for &r in &self.residues {
            let base = r * factor;
            for &d in digits {
                residues.push(base + d.rem_euclid(period));
            }
        }
        Self::new(period, residues)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn density_examples() {
        assert_eq!(PeriodicSet::integers().density(), Rational::from_integer(1));
        assert_eq!(
            PeriodicSet::new(4, [0, 1]).unwrap().density(),
            Rational::new(1, 2)
        );
        let raw = PeriodicSet::unreduced(16, [0, 1, 4, 5, 8, 9, 12, 13]).unwrap();
        assert_eq!(raw.density(), Rational::new(1, 2));
        assert_eq!(raw.reduce().density(), Rational::new(1, 2));
    }

    #[test]
    fn reduce_examples() {
        let p = PeriodicSet::unreduced(16, [0, 1, 4, 5, 8, 9, 12, 13]).unwrap();
        assert_eq!(p.reduce(), PeriodicSet::unreduced(4, [0, 1]).unwrap());
        let q = PeriodicSet::unreduced(4, [0, 1]).unwrap();
        assert_eq!(q.reduce(), q);
        assert_eq!(
            PeriodicSet::unreduced(6, 0..6).unwrap().reduce(),
            PeriodicSet::integers()
        );
        assert!(!p.is_canonical());
    }

    #[test]
    fn subset_relation() {
        let j = PeriodicSet::new(4, [0, 1]).unwrap();
        let k = PeriodicSet::new(8, [0, 1, 4]).unwrap();
        assert!(j.is_subset_of(&PeriodicSet::integers()));
        assert!(!j.is_subset_of(&k));
        assert!(k.is_subset_of(&j));
    }

    #[test]
    fn scale_add_matches_hand_computation() {
        // 4·({0,1} + 4Z) + {0,1,8,9} = {0,1,4,5,8,9,12,13} + 16Z = {0,1} + 4Z
        let j = PeriodicSet::new(4, [0, 1]).unwrap();
        assert_eq!(j.scale_add(4, &[0, 1, 8, 9]).unwrap(), j);
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_preserves_membership(
            period in 1i64..60,
            raw in proptest::collection::vec(0i64..60, 1..12),
            probes in proptest::collection::vec(-500i64..500, 20),
        ) {
            let p = PeriodicSet::unreduced(period, raw).unwrap();
            let r = p.reduce();
            prop_assert_eq!(r.reduce(), r.clone());
            prop_assert!(r.is_canonical());
            prop_assert_eq!(p.density(), r.density());
            prop_assert_eq!(p.period() % r.period(), 0);
            for n in probes {
                prop_assert_eq!(p.contains(n), r.contains(n));
            }
        }
    }
}
