//! Exponential polynomials `Σ c·t^p·e^{λt}` with integer-keyed exponents.
//!
//! An exponent is never stored as a number. It is stored as a key `(m, q)`
//! standing for `λ = −(i m·B₀ + ν q)`, where `ν` and the mean velocity `B₀`
//! are supplied separately through [`Rates`]. Two exponents are equal iff
//! their keys are equal, so resonance in the kernel integral is decided
//! with integer comparisons.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::MultiIndex;
use crate::scalar::Scalar;

/// Exponent key `(m, q)` encoding `λ = −(i m·B₀ + ν q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpKey {
    pub m: MultiIndex,
    pub q: u64,
}

impl ExpKey {
    pub const ZERO: ExpKey = ExpKey {
        m: MultiIndex::ZERO,
        q: 0,
    };

    pub fn new(m: MultiIndex, q: u64) -> Self {
        ExpKey { m, q }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

impl Add for ExpKey {
    type Output = ExpKey;
    fn add(self, rhs: ExpKey) -> ExpKey {
        ExpKey::new(self.m + rhs.m, self.q + rhs.q)
    }
}

/// Viscosity and mean velocity, the two parameters the exponent keys refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates<C> {
    pub nu: C,
    pub mean: [C; 3],
}

impl<C: Scalar> Rates<C> {
    pub fn new(nu: f64, mean: [Complex64; 3]) -> Self {
        Rates {
            nu: C::from_f64(nu),
            mean: mean.map(C::from_c64),
        }
    }

    /// `λ = −(i m·B₀ + ν q)` for an arbitrary (possibly negative) integer key.
    pub fn rate_of(&self, m: [i64; 3], q: i64) -> C {
        let mut phase = C::zero();
        for (mj, bj) in m.iter().zip(&self.mean) {
            if *mj != 0 {
                phase = phase.plus(&bj.scale_int(*mj));
            }
        }
        let phase = phase.times(&C::imag_unit());
        phase.plus(&self.nu.scale_int(q)).negated()
    }

    pub fn rate(&self, key: &ExpKey) -> C {
        let m = key.m.components().map(i64::from);
        self.rate_of(m, key.q as i64)
    }
}

/// One term of the canonical serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub m: [i32; 3],
    pub q: u64,
    pub p: u32,
    pub re: f64,
    pub im: f64,
}

/// A finite sum of `c·t^p·e^{λ t}` terms, indexed by `(key, p)`.
///
/// Zero coefficients are never stored; only exact zeros are pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<C = Complex64> {
    terms: BTreeMap<(ExpKey, u32), C>,
}

impl<C: Scalar> Default for ExpPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> ExpPoly<C> {
    pub fn zero() -> Self {
        ExpPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(ExpKey::ZERO, 0, c)
    }

    /// `c·t^p·e^{λ_key t}`.
    pub fn monomial(key: ExpKey, p: u32, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(key, p, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &ExpKey, p: u32) -> Option<&C> {
        self.terms.get(&(*key, p))
    }

    /// Terms in canonical order `(m, q, p)`.
    pub fn iter(&self) -> impl Iterator<Item = (&ExpKey, u32, &C)> {
        self.terms.iter().map(|((k, p), c)| (k, *p, c))
    }

    pub fn add_term(&mut self, key: ExpKey, p: u32, c: C) {
        if c.vanishes() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((key, p)) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().plus(&c);
                if sum.vanishes() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ExpPoly<C>) {
        for (key, p, c) in other.iter() {
            self.add_term(*key, p, c.clone());
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &ExpPoly<C>, factor: &C) {
        if factor.vanishes() {
            return;
        }
        for (key, p, c) in other.iter() {
            self.add_term(*key, p, c.times(factor));
        }
    }

    pub fn scale(&self, factor: &C) -> ExpPoly<C> {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn scale_int(&self, n: i64) -> ExpPoly<C> {
        if n == 0 {
            return Self::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.scale_int(n)))
                .collect(),
        }
    }

    /// Distributive product: keys add componentwise, powers add.
    pub fn mul(&self, other: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = Self::zero();
        self.mul_add_into(other, &mut out);
        out
    }

    /// `acc += self · other`, without materializing the product.
    pub fn mul_add_into(&self, other: &ExpPoly<C>, acc: &mut ExpPoly<C>) {
        for ((k1, p1), c1) in &self.terms {
            for ((k2, p2), c2) in &other.terms {
                acc.add_term(*k1 + *k2, p1 + p2, c1.times(c2));
            }
        }
    }

    /// Term-wise `d/dt`: `(c t^p e^{λt})' = c p t^{p-1} e^{λt} + c λ t^p e^{λt}`.
    pub fn derivative(&self, rates: &Rates<C>) -> ExpPoly<C> {
        let mut out = Self::zero();
        for ((key, p), c) in &self.terms {
            if *p > 0 {
                out.add_term(*key, p - 1, c.scale_int(*p as i64));
            }
            let lambda = rates.rate(key);
            if !lambda.vanishes() {
                out.add_term(*key, *p, c.times(&lambda));
            }
        }
        out
    }

    /// `e^{λ_K t}·(∫₀ᵗ f(s)·e^{−λ_K s} ds + c0)`.
    ///
    /// This is the solution of `g' = λ_K g + f`, `g(0) = c0`. A term whose key
    /// equals `kernel` is resonant and integrates to `c t^{p+1}/(p+1)`. Other
    /// terms are integrated by parts, leaving terms at their own key and a
    /// boundary constant at the kernel key. A term with a different key whose
    /// shifted rate is nevertheless exactly zero (possible only for
    /// degenerate `B₀`) is also treated as resonant.
    pub fn integrate_with_kernel(&self, kernel: &ExpKey, c0: &C, rates: &Rates<C>) -> ExpPoly<C> {
        let mut out = Self::zero();
        out.add_term(*kernel, 0, c0.clone());
        for ((key, p), c) in &self.terms {
            let p = *p;
            let shift = if key == kernel {
                C::zero()
            } else {
                let dm = (key.m - kernel.m).components().map(i64::from);
                let dq = key.q as i64 - kernel.q as i64;
                if dm == [0; 3] {
                    rates.nu.scale_int(-dq)
                } else {
                    rates.rate_of(dm, dq)
                }
            };
            if shift.vanishes() {
                out.add_term(*key, p + 1, c.divide(&C::from_int(p as i64 + 1)));
                continue;
            }
            // g_0 = c/a, g_j = -(p-j+1) g_{j-1}/a; boundary constant is -g_p.
            let mut g = c.divide(&shift);
            out.add_term(*key, p, g.clone());
            for j in 1..=p {
                g = g.scale_int(-((p - j + 1) as i64)).divide(&shift);
                out.add_term(*key, p - j, g.clone());
            }
            out.add_term(*kernel, 0, g.negated());
        }
        out
    }

    /// Complex conjugate of every coefficient, keys unchanged.
    ///
    /// For real `ν` this evaluates to the conjugate function when the phase
    /// `m·B₀` is replaced by `−m·conj(B₀)`, which is exactly what happens to
    /// the mean flow of the conjugated problem on the reflected mode set.
    pub fn conjugate_map(&self) -> ExpPoly<C> {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.conjugate()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> ExpPoly<D> {
        let mut out = ExpPoly::zero();
        for ((k, p), c) in &self.terms {
            out.add_term(*k, *p, f(c));
        }
        out
    }

    pub fn to_c64(&self) -> ExpPoly<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Evaluates `Σ c t^p exp(−(ν q + i m·B₀) t)` in floating point.
    pub fn evaluate(&self, t: f64, nu: f64, mean: &[Complex64; 3]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for ((key, p), c) in &self.terms {
            let phase: Complex64 = key
                .m
                .components()
                .iter()
                .zip(mean)
                .map(|(mj, bj)| bj * *mj as f64)
                .sum();
            let rate = -(phase * Complex64::i() + nu * key.q as f64);
            let tp = if *p == 0 { 1.0 } else { t.powi(*p as i32) };
            sum += c.to_c64() * tp * (rate * t).exp();
        }
        sum
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.terms.values().all(Scalar::is_finite)
    }

    /// Canonical serialized form, sorted by `(m, q, p)`.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|((key, p), c)| {
                let z = c.to_c64();
                TermRecord {
                    m: key.m.components(),
                    q: key.q,
                    p: *p,
                    re: z.re,
                    im: z.im,
                }
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Self {
        let mut out = Self::zero();
        for r in records {
            out.add_term(
                ExpKey::new(MultiIndex::from(r.m), r.q),
                r.p,
                C::from_c64(Complex64::new(r.re, r.im)),
            );
        }
        out
    }
}

impl<C: Scalar> Add for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn add(self, rhs: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<C: Scalar> Sub for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn sub(self, rhs: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = self.clone();
        out.add_scaled(rhs, &C::from_int(-1));
        out
    }
}

impl<C: Scalar> Neg for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn neg(self) -> ExpPoly<C> {
        ExpPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c.negated())).collect(),
        }
    }
}

impl Serialize for ExpPoly<Complex64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExpPoly<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        Ok(ExpPoly::from_records(&records))
    }
}
