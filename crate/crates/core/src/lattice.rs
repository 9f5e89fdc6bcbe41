//! Multi-index arithmetic on the Fourier lattice ℤ³.
//!
//! Modes are enumerated shell by shell (by `|k|₁`), which is the induction
//! order of the coefficient recursion: every strict splitting `k = k¹ + k²`
//! with both parts nonzero in ℕ³ lands in strictly lower shells.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point `k = (k1, k2, k3)`, the frequency of `φ_k = e^{i k·x}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct MultiIndex {
    pub k1: i32,
    pub k2: i32,
    pub k3: i32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { k1: 0, k2: 0, k3: 0 };

    pub const fn new(k1: i32, k2: i32, k3: i32) -> Self {
        MultiIndex { k1, k2, k3 }
    }

    pub fn components(&self) -> [i32; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// Component by zero-based axis.
    pub fn get(&self, axis: usize) -> i32 {
        self.components()[axis]
    }

    /// Shell order `|k1| + |k2| + |k3|`.
    pub fn l1(&self) -> u32 {
        self.k1.unsigned_abs() + self.k2.unsigned_abs() + self.k3.unsigned_abs()
    }

    /// Squared Euclidean norm `k1² + k2² + k3²`.
    pub fn norm_sq(&self) -> u64 {
        self.components()
            .iter()
            .map(|&c| (c as i64 * c as i64) as u64)
            .sum()
    }

    pub fn dot(&self, other: &MultiIndex) -> i64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(&a, b)| a as i64 * b as i64)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// `k ≥ 0`: every component nonnegative.
    pub fn is_nonneg(&self) -> bool {
        self.k1 >= 0 && self.k2 >= 0 && self.k3 >= 0
    }

    /// `k > 0`: in ℕ³ and not the origin.
    pub fn is_positive(&self) -> bool {
        self.is_nonneg() && !self.is_zero()
    }
}

impl From<[i32; 3]> for MultiIndex {
    fn from(c: [i32; 3]) -> Self {
        MultiIndex::new(c[0], c[1], c[2])
    }
}

impl From<MultiIndex> for [i32; 3] {
    fn from(k: MultiIndex) -> Self {
        k.components()
    }
}

impl Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex::new(self.k1 + rhs.k1, self.k2 + rhs.k2, self.k3 + rhs.k3)
    }
}

impl Sub for MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex::new(self.k1 - rhs.k1, self.k2 - rhs.k2, self.k3 - rhs.k3)
    }
}

impl Neg for MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex::new(-self.k1, -self.k2, -self.k3)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k1, self.k2, self.k3)
    }
}

/// Sign pattern `(a, b, c)` selecting the octant `∧_{a,b,c}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i8; 3]", into = "[i8; 3]")]
pub struct Octant {
    signs: [i8; 3],
}

impl Octant {
    pub const POSITIVE: Octant = Octant { signs: [1, 1, 1] };

    /// Builds an octant from three signs; anything other than ±1 is rejected.
    pub fn new(a: i8, b: i8, c: i8) -> Result<Self> {
        let signs = [a, b, c];
        if signs.iter().all(|s| *s == 1 || *s == -1) {
            Ok(Octant { signs })
        } else {
            Err(Error::InvalidInput(format!(
                "octant signs must be ±1, got ({a},{b},{c})"
            )))
        }
    }

    /// All eight octants, `(+,+,+)` first, the third sign varying fastest.
    pub fn all() -> [Octant; 8] {
        let mut out = [Octant::POSITIVE; 8];
        for (idx, slot) in out.iter_mut().enumerate() {
            let s = |bit: usize| if idx >> bit & 1 == 1 { -1 } else { 1 };
            slot.signs = [s(2), s(1), s(0)];
        }
        out
    }

    pub fn signs(&self) -> [i8; 3] {
        self.signs
    }

    /// Sign applied to velocity component `j` (zero-based) under reflection.
    pub fn sign(&self, axis: usize) -> f64 {
        self.signs[axis] as f64
    }

    pub fn opposite(&self) -> Octant {
        Octant {
            signs: self.signs.map(|s| -s),
        }
    }

    /// The cell containing `k` under the convention that a zero component
    /// counts as `+`. The eight cells partition ℤ³.
    pub fn containing(k: &MultiIndex) -> Octant {
        let s = |c: i32| if c < 0 { -1 } else { 1 };
        Octant {
            signs: [s(k.k1), s(k.k2), s(k.k3)],
        }
    }

    /// Whether `k ∈ ∧_{a,b,c}` (boundary modes belong to several octants).
    pub fn admits(&self, k: &MultiIndex) -> bool {
        reflect(k, self).is_nonneg()
    }
}

impl Default for Octant {
    fn default() -> Self {
        Octant::POSITIVE
    }
}

impl TryFrom<[i8; 3]> for Octant {
    type Error = Error;
    fn try_from(s: [i8; 3]) -> Result<Self> {
        Octant::new(s[0], s[1], s[2])
    }
}

impl From<Octant> for [i8; 3] {
    fn from(o: Octant) -> Self {
        o.signs
    }
}

impl fmt::Display for Octant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: i8| if s > 0 { '+' } else { '-' };
        write!(f, "({},{},{})", c(self.signs[0]), c(self.signs[1]), c(self.signs[2]))
    }
}

/// `(a·k1, b·k2, c·k3)`. An involution that preserves `|k|₁`.
pub fn reflect(k: &MultiIndex, o: &Octant) -> MultiIndex {
    let [a, b, c] = o.signs.map(i32::from);
    MultiIndex::new(a * k.k1, b * k.k2, c * k.k3)
}

/// `ln Π_{k_j ≠ 0} |k_j|^{|k_j|-1} / |k_j|!`, the tree-count weight that
/// appears in both the smallness hypothesis and the decay bound.
pub fn ln_tree_weight(k: &MultiIndex) -> f64 {
    k.components()
        .iter()
        .map(|c| c.unsigned_abs())
        .filter(|&c| c > 0)
        .map(|c| {
            let c = c as f64;
            let ln_fact: f64 = (2..=c as u64).map(|i| (i as f64).ln()).sum();
            (c - 1.0) * c.ln() - ln_fact
        })
        .sum()
}

/// Every `k ∈ ℕ³` with `|k|₁ = n`, in lexicographic order.
pub fn shell_modes(n: u32) -> Vec<MultiIndex> {
    let n = n as i32;
    let mut out = Vec::with_capacity(((n + 1) * (n + 2) / 2) as usize);
    for k1 in 0..=n {
        for k2 in 0..=n - k1 {
            out.push(MultiIndex::new(k1, k2, n - k1 - k2));
        }
    }
    out
}

/// All modes of ℕ³ with `|k|₁ ≤ n`, shell by shell.
pub fn modes_up_to(n: u32) -> Vec<MultiIndex> {
    (0..=n).flat_map(shell_modes).collect()
}

/// Ordered pairs `(k¹, k²)` with `k¹ + k² = k` and both parts `> 0`.
///
/// Pairs are listed with `k¹` in lexicographic order. Rejects the origin and
/// anything outside ℕ³.
pub fn split_pairs(k: &MultiIndex) -> Result<Vec<(MultiIndex, MultiIndex)>> {
    if !k.is_positive() {
        return Err(Error::InvalidInput(format!(
            "split_pairs needs k in ℕ³ \\ {{0}}, got {k}"
        )));
    }
    let mut out = Vec::new();
    for a in 0..=k.k1 {
        for b in 0..=k.k2 {
            for c in 0..=k.k3 {
                let first = MultiIndex::new(a, b, c);
                let second = *k - first;
                if !first.is_zero() && !second.is_zero() {
                    out.push((first, second));
                }
            }
        }
    }
    Ok(out)
}

/// Ordered pairs with `k¹ + k² = k`, both in ℕ³, origin included on either side.
pub fn split_pairs_with_zero(k: &MultiIndex) -> Vec<(MultiIndex, MultiIndex)> {
    let mut out = Vec::new();
    for a in 0..=k.k1 {
        for b in 0..=k.k2 {
            for c in 0..=k.k3 {
                let first = MultiIndex::new(a, b, c);
                out.push((first, *k - first));
            }
        }
    }
    out
}
