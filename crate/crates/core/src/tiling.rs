//! Exact tile decision, the chain `J_k*`, and self-replicating tiling sets.
//!
//! `T(b, D)` tiles iff `#D_k = b^k` for every `k`. A collision in some `D_k`
//! is a pair of digit strings with `Σ b^i (d_i - d'_i) = 0`; reading the
//! strings from the least significant digit, the running carry stays in
//! `[-M, M]` with `M = max|d - d'| / (b - 1)`. So collisions at any length
//! are exactly the closed walks `0 → 0` through at least one edge with
//! `d ≠ d'` in a finite carry automaton.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::periodic::PeriodicSet;
use crate::{DigitSet, Error, Rational, Result};

/// One transition `carry --(d, d')--> (carry + d - d') / b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarryEdge {
    pub from: i64,
    pub to: i64,
    pub digit: i64,
    pub other: i64,
}

impl CarryEdge {
    pub fn is_nontrivial(&self) -> bool {
        self.digit != self.other
    }
}

#[derive(Debug, Clone)]
pub struct CarryAutomaton {
    base: i64,
    bound: i64,
    /// `outgoing[c + bound]` lists the edges leaving carry `c`.
    outgoing: Vec<Vec<CarryEdge>>,
}

impl CarryAutomaton {
    pub fn new(digits: &DigitSet) -> Self {
        let base = digits.base();
        let bound = digits.spread() / (base - 1);
        let mut outgoing = Vec::with_capacity((2 * bound + 1) as usize);
        for carry in -bound..=bound {
            let mut edges = Vec::new();
            for &digit in digits.digits() {
                for &other in digits.digits() {
                    let total = carry + digit - other;
                    if total % base == 0 {
                        let to = total / base;
                        debug_assert!(to.abs() <= bound);
                        edges.push(CarryEdge {
                            from: carry,
                            to,
                            digit,
                            other,
                        });
                    }
                }
            }
            outgoing.push(edges);
        }
        Self {
            base,
            bound,
            outgoing,
        }
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    /// Largest reachable `|carry|`.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn states(&self) -> impl Iterator<Item = i64> {
        -self.bound..=self.bound
    }

    pub fn edges_from(&self, carry: i64) -> &[CarryEdge] {
        &self.outgoing[(carry + self.bound) as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = &CarryEdge> {
        self.outgoing.iter().flatten()
    }

    /// Shortest closed walk `0 → 0` using a nontrivial edge, as the pair of
    /// digit strings it spells (least significant digit first).
    pub fn shortest_collision(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        // Nodes are (carry, seen a nontrivial edge yet).
        let node = |carry: i64, used: bool| ((carry + self.bound) as usize) * 2 + used as usize;
        let count = self.outgoing.len() * 2;
        let mut previous: Vec<Option<(usize, CarryEdge)>> = vec![None; count];
        let mut seen = vec![false; count];
        let start = node(0, false);
        let goal = node(0, true);
        seen[start] = true;
        let mut queue = VecDeque::from([(0i64, false)]);
        while let Some((carry, used)) = queue.pop_front() {
            let here = node(carry, used);
            for edge in self.edges_from(carry) {
                let next_used = used || edge.is_nontrivial();
                let there = node(edge.to, next_used);
                if seen[there] {
                    continue;
                }
                seen[there] = true;
                previous[there] = Some((here, *edge));
                if there == goal {
                    return Some(self.unwind(&previous, goal, start));
                }
                queue.push_back((edge.to, next_used));
            }
        }
        None
    }

    fn unwind(
        &self,
        previous: &[Option<(usize, CarryEdge)>],
        goal: usize,
        start: usize,
    ) -> (Vec<i64>, Vec<i64>) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut at = goal;
        while at != start {
            let (from, edge) = previous[at].expect("walk is connected to the start");
            left.push(edge.digit);
            right.push(edge.other);
            at = from;
        }
        left.reverse();
        right.reverse();
        (left, right)
    }
}

/// Certificate returned by [`is_tile`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TileWitness {
    Tile,
    /// Two different digit strings (least significant digit first) with the
    /// same value, so `#D_k < b^k` at `k = left.len()`.
    Collision {
        left: Vec<i64>,
        right: Vec<i64>,
        value: i64,
    },
}

impl TileWitness {
    pub fn is_tile(&self) -> bool {
        matches!(self, TileWitness::Tile)
    }

    /// Level at which the collision appears.
    pub fn length(&self) -> Option<usize> {
        match self {
            TileWitness::Tile => None,
            TileWitness::Collision { left, .. } => Some(left.len()),
        }
    }
}

/// Value `Σ b^i s_i` of a digit string, least significant digit first.
pub fn string_value(base: i64, string: &[i64]) -> Option<i64> {
    string
        .iter()
        .rev()
        .try_fold(0i64, |acc, &d| acc.checked_mul(base)?.checked_add(d))
}

/// Decides whether `T(b, D)` is a tile, for all levels at once.
pub fn is_tile(digits: &DigitSet) -> TileWitness {
    let automaton = CarryAutomaton::new(digits);
    match automaton.shortest_collision() {
        None => TileWitness::Tile,
        Some((mut left, mut right)) => {
            // Lead with the string holding the larger digit where they first differ.
            let first = left
                .iter()
                .zip(&right)
                .position(|(a, b)| a != b)
                .expect("nontrivial walk");
            if left[first] < right[first] {
                std::mem::swap(&mut left, &mut right);
            }
            let value = string_value(digits.base(), &left).unwrap_or(i64::MAX);
            TileWitness::Collision { left, right, value }
        }
    }
}

/// Brute force: no collisions in `D_k` for `k <= max_level`.
pub fn is_tile_oracle(digits: &DigitSet, max_level: u32) -> Result<bool> {
    for level in 1..=max_level {
        if digits.expand(level)?.collisions > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `J_0* = Z`, `J_k* = b·J_{k-1}* + D`, each entry in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicatingChain {
    pub base: i64,
    pub entries: Vec<PeriodicSet>,
}

impl ReplicatingChain {
    /// Extends the chain by one level.
    fn push_next(&mut self, digits: &DigitSet) -> Result<()> {
        let last = self.entries.last().expect("chain starts at Z");
        let next = last.scale_add(digits.base(), digits.digits())?;
        self.entries.push(next);
        Ok(())
    }

    pub fn densities(&self) -> Vec<Rational> {
        self.entries.iter().map(PeriodicSet::density).collect()
    }
}

pub fn replicating_chain(digits: &DigitSet, levels: u32) -> Result<ReplicatingChain> {
    let mut chain = ReplicatingChain {
        base: digits.base(),
        entries: vec![PeriodicSet::integers()],
    };
    for _ in 0..levels {
        chain.push_next(digits)?;
    }
    Ok(chain)
}

/// Smallest `m` in `[1, max_m]` with `J_{m+1}* = J_m*`; `None` means
/// inconclusive within the bound, not "not a tile".
pub fn stabilization_exponent(digits: &DigitSet, max_m: u32) -> Result<Option<u32>> {
    let mut chain = replicating_chain(digits, 1)?;
    for m in 1..=max_m {
        chain.push_next(digits)?;
        let k = m as usize;
        if chain.entries[k + 1] == chain.entries[k] {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `J = D_m + b^m Z` in canonical form, after checking that `m` stabilizes.
pub fn self_replicating_tiling(digits: &DigitSet, m: u32) -> Result<PeriodicSet> {
    if m == 0 {
        return Err(Error::NotStabilizing(m));
    }
    let chain = replicating_chain(digits, m + 1)?;
    let k = m as usize;
    if chain.entries[k + 1] != chain.entries[k] {
        return Err(Error::NotStabilizing(m));
    }
    Ok(chain.entries[k].clone())
}

/// Whether `b·J + D = J`.
pub fn verify_self_replicating(tiling: &PeriodicSet, digits: &DigitSet) -> bool {
    match tiling.scale_add(digits.base(), digits.digits()) {
        Ok(image) => image == tiling.reduce(),
        Err(_) => false,
    }
}

/// Lebesgue measure of the tile: `1 / density(J)`.
pub fn tile_measure(tiling: &PeriodicSet) -> Result<Rational> {
    let density = tiling.density();
    if density == Rational::from_integer(0) {
        return Err(Error::InvalidArgument("empty tiling set".into()));
    }
    Ok(density.recip())
}
