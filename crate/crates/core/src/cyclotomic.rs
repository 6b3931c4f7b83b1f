//! Mask polynomials `P_A(x) = Σ_{a∈A} x^a` and their cyclotomic factors.
//!
//! Divisibility `Φ_s | P_A` is always decided by exact division in `Z[x]`
//! after folding `P_A` modulo `x^s - 1` (which `Φ_s` divides). Sets are
//! translated to start at 0 first; for `s >= 2` this does not change the
//! answer.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, prime_power, primes_up_to, totient};
use crate::poly::{Coefficient, Polynomial};
use crate::{Error, IntPolynomial, Rational, Result, WidePolynomial};

/// Largest index accepted by [`cyclotomic_poly`].
pub const MAX_CYCLOTOMIC_INDEX: u64 = 1 << 20;

/// Mask polynomial of `set` after translating its minimum to 0.
pub fn mask_poly(set: &[i64]) -> Result<IntPolynomial> {
    let Some(&min) = set.iter().min() else {
        return Ok(IntPolynomial::zero());
    };
    let exponents = set
        .iter()
        .map(|&a| {
            usize::try_from(a.checked_sub(min).ok_or(Error::Overflow("mask"))?)
                .map_err(|_| Error::Overflow("mask"))
        })
        .collect::<Result<Vec<_>>>()?;
    IntPolynomial::from_exponents(exponents)
}

/// `Φ_s`, via `Φ_{mp}(x) = Φ_m(x^p) / Φ_m(x)` over the distinct primes of
/// `s` followed by `Φ_s(x) = Φ_{rad s}(x^{s / rad s})`.
pub fn cyclotomic<T: Coefficient>(s: u64) -> Result<Polynomial<T>> {
    if s == 0 || s > MAX_CYCLOTOMIC_INDEX {
        return Err(Error::InvalidArgument(format!(
            "cyclotomic index {s} out of range"
        )));
    }
    let mut current = Polynomial::new(vec![-T::one(), T::one()]);
    let mut radical = 1u64;
    for (p, _) in factorize(s) {
        current = current.compose_power(p as usize).exact_div(&current)?;
        radical *= p;
    }
    Ok(current.compose_power((s / radical) as usize))
}

thread_local! {
    static CACHE: RefCell<HashMap<u64, Rc<IntPolynomial>>> = RefCell::new(HashMap::new());
}

/// `Φ_s` with 64-bit coefficients, memoized per thread.
pub fn cyclotomic_poly(s: u64) -> Result<Rc<IntPolynomial>> {
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&s).cloned()) {
        return Ok(hit);
    }
    let poly = Rc::new(cyclotomic::<i64>(s)?);
    CACHE.with(|c| c.borrow_mut().insert(s, poly.clone()));
    Ok(poly)
}

/// Whether `Φ_s` divides `P_A`, for `s >= 2`.
pub fn divides(s: u64, set: &[i64]) -> Result<bool> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "divides needs s >= 2, got {s}"
        )));
    }
    let Some(&min) = set.iter().min() else {
        return Ok(true);
    };
    let max = *set.iter().max().expect("nonempty");
    let degree = max.checked_sub(min).ok_or(Error::Overflow("mask"))? as u64;
    if totient(s) > degree {
        return Ok(false);
    }
    let folded =
        IntPolynomial::from_exponents(set.iter().map(|&a| ((a - min) as u64 % s) as usize))?;
    if folded.is_zero() {
        return Ok(true);
    }
    let phi = cyclotomic_poly(s)?;
    match folded.div_rem_monic(&phi) {
        Ok((_, r)) => Ok(r.is_zero()),
        Err(Error::Overflow(_)) => {
            let wide: WidePolynomial = folded.cast().expect("widening");
            let phi: WidePolynomial = phi.cast().expect("widening");
            Ok(wide.div_rem_monic(&phi)?.1.is_zero())
        }
        Err(e) => Err(e),
    }
}

/// The prime powers `s` with `Φ_s | P_A`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimePowerSupport {
    pub entries: Vec<u64>,
}

impl PrimePowerSupport {
    /// `Π Φ_s(1)`, i.e. the product of the underlying primes.
    pub fn product_of_primes(&self) -> Option<u64> {
        self.entries.iter().try_fold(1u64, |acc, &s| {
            let (p, _) = prime_power(s).expect("support entries are prime powers");
            acc.checked_mul(p)
        })
    }

    /// lcm of the entries (1 when empty).
    pub fn lcm(&self) -> Option<u64> {
        self.entries.iter().try_fold(1u64, |acc, &s| {
            let g = acc.gcd(&s);
            (acc / g).checked_mul(s)
        })
    }

    /// Entries grouped by prime, in increasing order of prime.
    fn by_prime(&self) -> Vec<Vec<u64>> {
        let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
        for &s in &self.entries {
            let (p, _) = prime_power(s).expect("support entries are prime powers");
            match groups.iter_mut().find(|(q, _)| *q == p) {
                Some((_, g)) => g.push(s),
                None => groups.push((p, vec![s])),
            }
        }
        groups.sort_unstable_by_key(|(p, _)| *p);
        groups.into_iter().map(|(_, g)| g).collect()
    }
}

/// `S_A`. A prime power `s = p^k` can only divide `P_A` when `p | #A`
/// (evaluate `P_A = Φ_s·Q` at 1: `#A = p·Q(1)`), and only when
/// `φ(s) <= deg P_A`; every such `s` is tested.
pub fn support(set: &[i64]) -> Result<PrimePowerSupport> {
    let (Some(&min), Some(&max)) = (set.iter().min(), set.iter().max()) else {
        return Err(Error::InvalidArgument("support of an empty set".into()));
    };
    let degree = (max - min) as u64;
    let mut entries = Vec::new();
    for (p, _) in factorize(set.len() as u64) {
        let mut s = p;
        while totient(s) <= degree {
            if divides(s, set)? {
                entries.push(s);
            }
            match s.checked_mul(p) {
                Some(next) => s = next,
                None => break,
            }
        }
    }
    entries.sort_unstable();
    Ok(PrimePowerSupport { entries })
}

/// [`support`] without the `p | #A` pruning: every prime power with
/// `φ(s) <= deg P_A`, primes sieved up to `deg + 1`.
pub fn support_exhaustive(set: &[i64]) -> Result<PrimePowerSupport> {
    let (Some(&min), Some(&max)) = (set.iter().min(), set.iter().max()) else {
        return Err(Error::InvalidArgument("support of an empty set".into()));
    };
    let degree = (max - min) as u64;
    let mut entries = Vec::new();
    for p in primes_up_to(degree + 1) {
        let mut s = p;
        while totient(s) <= degree {
            if divides(s, set)? {
                entries.push(s);
            }
            match s.checked_mul(p) {
                Some(next) => s = next,
                None => break,
            }
        }
    }
    entries.sort_unstable();
    Ok(PrimePowerSupport { entries })
}

/// (T1): `#A = Π_{s ∈ S_A} Φ_s(1)`.
pub fn check_t1(set: &[i64]) -> Result<bool> {
    let s = support(set)?;
    Ok(s.product_of_primes() == Some(set.len() as u64))
}

/// Which subsets of `S_A` (T2) quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T2Mode {
    /// Powers of pairwise distinct primes.
    #[default]
    CoprimeFactors,
    /// Any two or more distinct entries.
    Strict,
}

const MAX_T2_SUBSETS: u64 = 1 << 20;

/// (T2): `Φ_{s_1 ⋯ s_k} | P_A` for the subsets of `S_A` selected by `mode`.
pub fn check_t2(set: &[i64], mode: T2Mode) -> Result<bool> {
    let s = support(set)?;
    check_t2_with(set, &s, mode)
}

fn check_t2_with(set: &[i64], support: &PrimePowerSupport, mode: T2Mode) -> Result<bool> {
    let products: Vec<u64> = match mode {
        T2Mode::CoprimeFactors => {
            let groups = support.by_prime();
            let count = groups
                .iter()
                .try_fold(1u64, |acc, g| acc.checked_mul(g.len() as u64 + 1));
            if count.is_none_or(|c| c > MAX_T2_SUBSETS) {
                return Err(Error::InvalidArgument("too many (T2) subsets".into()));
            }
            // Choose at most one power per prime.
            let mut picks: Vec<(u64, usize)> = vec![(1, 0)];
            for g in &groups {
                let mut next = Vec::with_capacity(picks.len() * (g.len() + 1));
                for &(prod, k) in &picks {
                    next.push((prod, k));
                    for &s in g {
                        next.push((prod.saturating_mul(s), k + 1));
                    }
                }
                picks = next;
            }
            picks
                .into_iter()
                .filter(|&(_, k)| k >= 2)
                .map(|(p, _)| p)
                .collect()
        }
        T2Mode::Strict => {
            let n = support.entries.len();
            if n >= 21 {
                return Err(Error::InvalidArgument("too many (T2) subsets".into()));
            }
            (0u64..1 << n)
                .filter(|mask| mask.count_ones() >= 2)
                .map(|mask| {
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .fold(1u64, |acc, i| acc.saturating_mul(support.entries[i]))
                })
                .collect()
        }
    };
    for n in products {
        if n > MAX_CYCLOTOMIC_INDEX || !divides(n, set)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite set of rationals in `[0, 1)` with common denominator `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalSpectrum {
    pub modulus: i64,
    /// Sorted, distinct, each in `[0, 1)`.
    pub elements: Vec<Rational>,
}

impl RationalSpectrum {
    /// Builds the spectrum `{k / modulus}` from integer numerators.
    pub fn from_numerators(modulus: i64, numerators: impl IntoIterator<Item = i64>) -> Self {
        let mut elements: Vec<Rational> = numerators
            .into_iter()
            .map(|k| Rational::new(k.rem_euclid(modulus), modulus))
            .collect();
        elements.sort_unstable();
        elements.dedup();
        Self { modulus, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `factor · Λ` as integers; errors unless every element becomes integral.
    pub fn scaled_integers(&self, factor: i64) -> Result<Vec<i64>> {
        let mut out = self
            .elements
            .iter()
            .map(|e| {
                let scaled = *e * Rational::from_integer(factor);
                if scaled.is_integer() {
                    Ok(scaled.to_integer())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "{factor}·{e} is not an integer"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        Ok(out)
    }

    /// Numerators over the common denominator.
    pub fn numerators(&self) -> Vec<i64> {
        self.scaled_integers(self.modulus)
            .expect("modulus is a common denominator")
    }
}

/// Łaba's spectrum `{Σ_{s ∈ S_A} k_s / s : 0 <= k_s < p}` reduced into
/// `[0, 1)`, with modulus `lcm(S_A)`. Requires (T1) and (T2).
pub fn laba_spectrum(set: &[i64], mode: T2Mode) -> Result<RationalSpectrum> {
    let s = support(set)?;
    let t1 = s.product_of_primes() == Some(set.len() as u64);
    if !t1 || !check_t2_with(set, &s, mode)? {
        return Err(Error::CovenMeyerowitz(set.to_vec()));
    }
    let modulus = s
        .lcm()
        .and_then(|l| i64::try_from(l).ok())
        .ok_or(Error::Overflow("lcm"))?;
    let mut numerators = vec![0i64];
    for &entry in &s.entries {
        let (p, _) = prime_power(entry).expect("prime power");
        let unit = modulus / entry as i64;
        let mut next = Vec::with_capacity(numerators.len() * p as usize);
        for &n in &numerators {
            for k in 0..p as i64 {
                next.push((n + k * unit) % modulus);
            }
        }
        numerators = next;
    }
    Ok(RationalSpectrum::from_numerators(modulus, numerators))
}

/// Whether `Σ_{a∈A} e^{2πi a m / N} = 0`, decided as
/// `m ≢ 0 (mod N)` and `Φ_{N / gcd(m, N)} | P_A`.
pub fn vanishes_at(set: &[i64], m: i64, modulus: i64) -> Result<bool> {
    if modulus < 1 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be positive, got {modulus}"
        )));
    }
    let m = m.rem_euclid(modulus);
    if m == 0 {
        return Ok(set.is_empty());
    }
    let order = modulus / m.gcd(&modulus);
    divides(order as u64, set)
}
