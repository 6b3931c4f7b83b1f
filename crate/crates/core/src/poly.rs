//! Dense univariate polynomials over a primitive signed integer type.

use std::fmt;

use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient types usable in [`Polynomial`].
pub trait Coefficient: PrimInt + Signed + fmt::Debug + fmt::Display {}

impl<T: PrimInt + Signed + fmt::Debug + fmt::Display> Coefficient for T {}

/// Coefficients lowest degree first, with no trailing zeros; the zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial<T> {
    coefficients: Vec<T>,
}

impl<T: Coefficient> Polynomial<T> {
    pub fn new(mut coefficients: Vec<T>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self {
            coefficients: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self {
            coefficients: vec![T::one()],
        }
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coefficients = vec![T::zero(); n + 1];
        coefficients[n] = T::one();
        Self { coefficients }
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut p = Self::monomial(n);
        p.coefficients[0] = p.coefficients[0] - T::one();
        Self::new(p.coefficients)
    }

    /// `Σ x^e` over the given non-negative exponents (repeats add up).
    pub fn from_exponents(exponents: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut coefficients = Vec::new();
        for e in exponents {
            if coefficients.len() <= e {
                coefficients.resize(e + 1, T::zero());
            }
            coefficients[e] = coefficients[e]
                .checked_add(&T::one())
                .ok_or(Error::Overflow("polynomial"))?;
        }
        Ok(Self::new(coefficients))
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<T> {
        self.coefficients.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(T::one())
    }

    pub fn eval(&self, x: T) -> Result<T> {
        self.coefficients
            .iter()
            .rev()
            .try_fold(T::zero(), |acc, &c| {
                acc.checked_mul(&x)
                    .and_then(|v| v.checked_add(&c))
                    .ok_or(Error::Overflow("evaluation"))
            })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![T::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coefficients.iter().enumerate() {
                let term = a
                    .checked_mul(&b)
                    .ok_or(Error::Overflow("polynomial product"))?;
                out[i + j] = out[i + j]
                    .checked_add(&term)
                    .ok_or(Error::Overflow("polynomial product"))?;
            }
        }
        Ok(Self::new(out))
    }

    /// Quotient and remainder by a monic divisor. Zero coefficients of the
    /// divisor are skipped, so sparse divisors such as `Φ_{p^k}` are cheap.
    pub fn div_rem_monic(&self, divisor: &Self) -> Result<(Self, Self)> {
        if !divisor.is_monic() {
            return Err(Error::InvalidArgument("divisor must be monic".into()));
        }
        let dd = divisor.coefficients.len() - 1;
        if self.coefficients.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lower: Vec<(usize, T)> = divisor.coefficients[..dd]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        let mut rem = self.coefficients.clone();
        let mut quot = vec![T::zero(); rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let lead = rem[top];
            if lead.is_zero() {
                continue;
            }
            let shift = top - dd;
            quot[shift] = lead;
            rem[top] = T::zero();
            for &(i, c) in &lower {
                let term = lead
                    .checked_mul(&c)
                    .ok_or(Error::Overflow("polynomial division"))?;
                rem[shift + i] = rem[shift + i]
                    .checked_sub(&term)
                    .ok_or(Error::Overflow("polynomial division"))?;
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient; errors if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem_monic(divisor)?;
        if !r.is_zero() {
            return Err(Error::InvalidArgument("division is not exact".into()));
        }
        Ok(q)
    }

    /// Remainder modulo `x^n - 1`: exponents folded modulo `n`.
    pub fn fold_cyclic(&self, n: usize) -> Result<Self> {
        assert!(n >= 1, "cyclic fold needs n >= 1");
        let mut out = vec![T::zero(); n.min(self.coefficients.len())];
        for (e, &c) in self.coefficients.iter().enumerate() {
            let slot = &mut out[e % n];
            *slot = slot.checked_add(&c).ok_or(Error::Overflow("cyclic fold"))?;
        }
        Ok(Self::new(out))
    }

    /// `p(x^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            let constant = self.coefficients.iter().fold(T::zero(), |a, &c| a + c);
            return Self::new(vec![constant]);
        }
        let mut out = vec![T::zero(); (self.coefficients.len() - 1) * k + 1];
        for (e, &c) in self.coefficients.iter().enumerate() {
            out[e * k] = c;
        }
        Self::new(out)
    }

    /// Converts coefficients to another integer type.
    pub fn cast<U: Coefficient>(&self) -> Option<Polynomial<U>> {
        self.coefficients
            .iter()
            .map(|c| U::from(*c))
            .collect::<Option<Vec<U>>>()
            .map(Polynomial::new)
    }
}

impl<T: Coefficient> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_coefficient = !magnitude.is_one() || e == 0;
            if show_coefficient {
                write!(f, "{magnitude}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}
