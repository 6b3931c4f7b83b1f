//! Hadamard triples and the spectral data attached to a skew decomposition.
//!
//! `(N, A, L)` is a Hadamard triple when `#A = #L` and the matrix
//! `(e^{2πi a c / N})_{a∈A, c∈L} / √#A` is unitary. Column orthogonality
//! reduces to `Σ_{a∈A} e^{2πi a (c - c') / N} = 0` for `c ≠ c'`, which
//! depends only on the order of `c - c'` in `Z_N` and is decided exactly by
//! cyclotomic divisibility. The floating-point residual in
//! [`unitarity_residual`] is a cross-check only.

use num_integer::Integer;
use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{
    divides, laba_spectrum, support, PrimePowerSupport, RationalSpectrum, T2Mode,
};
use crate::digits::{checked_pow, direct_sum_complete, scaled, sumset, MAX_ENUMERATION};
use crate::skewform::SkewDecomposition;
use crate::{Error, Result};

/// Orders in `Z_N` of all differences `c - c'` of distinct elements of a
/// candidate spectrum. Reusable across many sets `A` with the same `L`.
#[derive(Debug, Clone)]
pub struct DifferenceOrders {
    modulus: i64,
    size: usize,
    /// `None` if two elements of `L` coincide modulo `N`.
    orders: Option<Vec<u64>>,
}

impl DifferenceOrders {
    pub fn new(modulus: i64, spectrum: &[i64]) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidArgument(format!(
                "Hadamard modulus must be >= 1, got {modulus}"
            )));
        }
        if modulus > MAX_ENUMERATION {
            return Err(Error::InvalidArgument(format!(
                "Hadamard modulus {modulus} too large"
            )));
        }
        let mut residues: Vec<i64> = spectrum.iter().map(|c| c.rem_euclid(modulus)).collect();
        residues.sort_unstable();
        let size = {
            let mut distinct = spectrum.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        };
        if residues.windows(2).any(|w| w[0] == w[1]) {
            return Ok(Self {
                modulus,
                size,
                orders: None,
            });
        }
        let n = modulus as usize;
        let mut seen = vec![false; n];
        for &x in &residues {
            for &y in &residues {
                if x != y {
                    seen[(x - y).rem_euclid(modulus) as usize] = true;
                }
            }
        }
        let mut orders: Vec<u64> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(m, _)| (modulus / (m as i64).gcd(&modulus)) as u64)
            .collect();
        orders.sort_unstable();
        orders.dedup();
        Ok(Self {
            modulus,
            size,
            orders: Some(orders),
        })
    }

    /// Exact Hadamard test for `(N, set, L)`.
    pub fn is_hadamard_for(&self, set: &[i64]) -> Result<bool> {
        let mut distinct = set.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != self.size {
            return Ok(false);
        }
        let Some(orders) = &self.orders else {
            return Ok(false);
        };
        for &order in orders {
            if !divides(order, &distinct)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }
}

/// Exact test: `#A = #L` and every distinct-pair column sum vanishes.
pub fn is_hadamard(modulus: i64, set: &[i64], spectrum: &[i64]) -> Result<bool> {
    DifferenceOrders::new(modulus, spectrum)?.is_hadamard_for(set)
}

/// A checked `(N, A, L)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardTriple {
    pub modulus: i64,
    pub set: Vec<i64>,
    pub spectrum: Vec<i64>,
    pub verified: bool,
}

impl HadamardTriple {
    pub fn check(modulus: i64, set: &[i64], spectrum: &[i64]) -> Result<Self> {
        let verified = is_hadamard(modulus, set, spectrum)?;
        Ok(Self {
            modulus,
            set: set.to_vec(),
            spectrum: spectrum.to_vec(),
            verified,
        })
    }
}

/// Largest entrywise deviation of `M^H M` and `M M^H` from the identity, for
/// `M = (e^{2πi a c / N}) / √#A`. Zero (up to rounding) exactly for
/// Hadamard triples; when `#A ≠ #L` one of the Gram matrices has a diagonal
/// entry `#L/#A` or `#A/#L` away from 1.
pub fn unitarity_residual<F: Float + FloatConst>(modulus: i64, set: &[i64], spectrum: &[i64]) -> F {
    let norm = F::from(set.len()).expect("size fits the float type");
    let angle = |k: i128| {
        let r = k.rem_euclid(modulus as i128);
        F::TAU() * F::from(r).expect("residue fits") / F::from(modulus).expect("modulus fits")
    };
    let gram = |rows: &[i64], cols: &[i64]| -> F {
        // Entry (c, c') of Σ_{r ∈ rows} e^{2πi r (c' - c) / N} / #A.
        let mut worst = F::zero();
        for (i, &c) in cols.iter().enumerate() {
            for (j, &c2) in cols.iter().enumerate() {
                let (mut re, mut im) = (F::zero(), F::zero());
                for &r in rows {
                    let t = angle(r as i128 * (c2 as i128 - c as i128));
                    re = re + t.cos();
                    im = im + t.sin();
                }
                let target = if i == j { F::one() } else { F::zero() };
                let dev = ((re / norm - target).powi(2) + (im / norm).powi(2)).sqrt();
                worst = worst.max(dev);
            }
        }
        worst
    };
    gram(set, spectrum).max(gram(spectrum, set))
}

/// Spectral data for a decomposition `E = ⋃ (a_j + N^r B_j)` with respect to
/// `N = dec.base`: `L1 = N·Λ_A` and `L2 = N·Λ_{B_0}` from Łaba spectra, and
/// the two Hadamard conditions checked against them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnLaiReport {
    pub modulus: i64,
    pub decomposition: SkewDecomposition,
    pub support_a: PrimePowerSupport,
    pub support_b: PrimePowerSupport,
    /// `lcm(S_A)`.
    pub lcm_a: i64,
    /// `lcm(S_{B_j})`, shared by all `j`.
    pub lcm_b: i64,
    pub spectrum_a: RationalSpectrum,
    pub spectrum_b: RationalSpectrum,
    pub l1: Vec<i64>,
    pub l2: Vec<i64>,
    /// `(lcm_a, A, lcm_a·Λ_A)` and `(lcm_b, B_j, lcm_b·Λ_B)` are Hadamard.
    pub intermediate_a: bool,
    pub intermediate_b: Vec<bool>,
    /// `(N, A, L1)` is Hadamard.
    pub condition_i_a: bool,
    /// `(N, B_j, L2)` is Hadamard, per `j`.
    pub condition_i_b: Vec<bool>,
    /// `(N, A ⊕ B_j, L1 ⊕ L2)` is Hadamard, per `j`.
    pub condition_ii: Vec<bool>,
    /// `#(L1 ⊕ L2) = N`.
    pub counting_identity: bool,
    /// `L1 ⊕ L2` is a complete residue system modulo `N`.
    pub complete_residues: bool,
}

impl AnLaiReport {
    pub fn all_hold(&self) -> bool {
        self.intermediate_a
            && self.condition_i_a
            && self.counting_identity
            && self.complete_residues
            && self.intermediate_b.iter().all(|&f| f)
            && self.condition_i_b.iter().all(|&f| f)
            && self.condition_ii.iter().all(|&f| f)
    }
}

fn part_spectrum(part: &str, set: &[i64], mode: T2Mode) -> Result<RationalSpectrum> {
    laba_spectrum(set, mode).map_err(|e| match e {
        Error::CovenMeyerowitz(set) => Error::PartFailsCovenMeyerowitz {
            part: part.to_string(),
            set,
        },
        other => other,
    })
}

fn integral(part: &str, spectrum: &RationalSpectrum, factor: i64) -> Result<Vec<i64>> {
    spectrum
        .scaled_integers(factor)
        .map_err(|_| Error::NonIntegralSpectrum {
            part: part.to_string(),
            factor,
        })
}

pub fn build_spectral_data(dec: &SkewDecomposition, mode: T2Mode) -> Result<AnLaiReport> {
    let modulus = dec.base;
    let first_b = dec.bs.first().ok_or(Error::InvalidDecomposition)?;

    let support_a = support(&dec.a)?;
    let support_b = support(first_b)?;
    for (index, b) in dec.bs.iter().enumerate().skip(1) {
        if support(b)? != support_b {
            return Err(Error::SupportMismatch { index });
        }
    }
    let spectrum_a = part_spectrum("A", &dec.a, mode)?;
    let spectrum_b = part_spectrum("B_0", first_b, mode)?;
    for (j, b) in dec.bs.iter().enumerate().skip(1) {
        part_spectrum(&format!("B_{j}"), b, mode)?;
    }
    let (lcm_a, lcm_b) = (spectrum_a.modulus, spectrum_b.modulus);

    let l1 = integral("A", &spectrum_a, modulus)?;
    let l2 = integral("B_0", &spectrum_b, modulus)?;

    let intermediate_a = lcm_a < 2 || is_hadamard(lcm_a, &dec.a, &spectrum_a.numerators())?;
    let intermediate_b = if lcm_b < 2 {
        vec![true; dec.bs.len()]
    } else {
        let orders = DifferenceOrders::new(lcm_b, &spectrum_b.numerators())?;
        dec.bs
            .iter()
            .map(|b| orders.is_hadamard_for(b))
            .collect::<Result<_>>()?
    };

    let condition_i_a = is_hadamard(modulus, &dec.a, &l1)?;
    let orders_l2 = DifferenceOrders::new(modulus, &l2)?;
    let condition_i_b = dec
        .bs
        .iter()
        .map(|b| orders_l2.is_hadamard_for(b))
        .collect::<Result<_>>()?;

    let combined = sumset(&l1, &l2)?;
    let counting_identity =
        combined.len() as i64 == modulus && l1.len() * l2.len() == combined.len();
    let complete_residues = direct_sum_complete(&l1, &l2, modulus);
    let orders_combined = DifferenceOrders::new(modulus, &combined)?;
    let condition_ii = dec
        .bs
        .iter()
        .map(|b| {
            let sum = sumset(&dec.a, b)?;
            if sum.len() != dec.a.len() * b.len() {
                return Ok(false);
            }
            orders_combined.is_hadamard_for(&sum)
        })
        .collect::<Result<_>>()?;

    Ok(AnLaiReport {
        modulus,
        decomposition: dec.clone(),
        support_a,
        support_b,
        lcm_a,
        lcm_b,
        spectrum_a,
        spectrum_b,
        l1,
        l2,
        intermediate_a,
        intermediate_b,
        condition_i_a,
        condition_i_b,
        condition_ii,
        counting_identity,
        complete_residues,
    })
}

/// `C ⊕ bC ⊕ ... ⊕ b^{K-1}C` over `b^K`, verified exactly as a spectrum of
/// `δ_{b^{-K} (D ⊕ bD ⊕ ... ⊕ b^{K-1}D)}`. `None` when `(b, D, C)` is not a
/// Hadamard triple, so no uniform spectrum of this shape exists.
pub fn truncated_spectrum(
    digits: &[i64],
    base: i64,
    spectrum: &[i64],
    levels: u32,
) -> Result<Option<RationalSpectrum>> {
    if levels == 0 {
        return Err(Error::InvalidArgument(
            "truncated spectrum needs at least one level".into(),
        ));
    }
    if !is_hadamard(base, digits, spectrum)? {
        return Ok(None);
    }
    let modulus = checked_pow(base, levels).map_err(|_| Error::LevelTooLarge {
        level: levels,
        safe_max: 0,
    })?;
    if modulus > MAX_ENUMERATION {
        let safe_max = (1..levels)
            .rev()
            .find(|&k| base.pow(k) <= MAX_ENUMERATION)
            .unwrap_or(0);
        return Err(Error::LevelTooLarge {
            level: levels,
            safe_max,
        });
    }
    let (mut big_d, mut big_c) = (vec![0i64], vec![0i64]);
    let mut weight = 1i64;
    for _ in 0..levels {
        big_d = sumset(&big_d, &scaled(digits, weight)?)?;
        big_c = sumset(&big_c, &scaled(spectrum, weight)?)?;
        weight *= base;
    }
    if !is_hadamard(modulus, &big_d, &big_c)? {
        return Ok(None);
    }
    Ok(Some(RationalSpectrum::from_numerators(modulus, big_c)))
}
