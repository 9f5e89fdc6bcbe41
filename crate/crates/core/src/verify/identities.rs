//! Abel-type binomial identities and the product bound built from them,
//! checked in exact integer and rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

fn as_string<S: Serializer, T: ToString>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// One row of [`abel_identity`]. Big numbers serialize as decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbelRow {
    pub k: u32,
    /// `Σ_{m=1}^{k} C(k+1, m) m^m (k+1−m)^{k−m}`.
    #[serde(serialize_with = "as_string")]
    pub first_lhs: BigInt,
    /// `k (k+1)^k`.
    #[serde(serialize_with = "as_string")]
    pub first_rhs: BigInt,
    pub first_equal: bool,
    /// `Σ_{m=1}^{k} C(k+1, m) m^{m−1} (k+1−m)^{k−m}`.
    #[serde(serialize_with = "as_string")]
    pub second_lhs: BigInt,
    /// `2k (k+1)^{k−1}`.
    #[serde(serialize_with = "as_string")]
    pub second_middle: BigInt,
    /// `2 (k+1)^k`.
    #[serde(serialize_with = "as_string")]
    pub second_upper: BigInt,
    pub second_equal: bool,
    pub second_bounded: bool,
}

fn pow(base: u32, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Evaluates both identities for `k = 1..=kmax`.
///
/// The second identity is recorded as three quantities, the sum, its closed
/// form and the upper bound, with each relation reported separately.
pub fn abel_identity(kmax: u32) -> Vec<AbelRow> {
    (1..=kmax)
        .map(|k| {
            let mut binom = BigInt::one();
            let mut first = BigInt::zero();
            let mut second = BigInt::zero();
            for m in 1..=k {
                // C(k+1, m) from C(k+1, m−1)
                binom = binom * BigInt::from(k + 2 - m) / BigInt::from(m);
                let tail = pow(k + 1 - m, k - m);
                first += &binom * pow(m, m) * &tail;
                second += &binom * pow(m, m - 1) * &tail;
            }
            let first_rhs = BigInt::from(k) * pow(k + 1, k);
            let second_middle = BigInt::from(2 * k) * pow(k + 1, k - 1);
            let second_upper = BigInt::from(2u32) * pow(k + 1, k);
            AbelRow {
                k,
                first_equal: first == first_rhs,
                second_equal: second == second_middle,
                second_bounded: second_middle <= second_upper,
                first_lhs: first,
                first_rhs,
                second_lhs: second,
                second_middle,
                second_upper,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub k: Vec<u32>,
    #[serde(serialize_with = "as_string")]
    pub lhs: BigRational,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigRational,
    pub holds: bool,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `m^{m−1} (k+1−m)^{k−m} / (m! (k+1−m)!)`.
fn axis_factor(m: u32, k: u32) -> BigRational {
    BigRational::new(
        pow(m, m - 1) * pow(k + 1 - m, k - m),
        factorial(m) * factorial(k + 1 - m),
    )
}

/// Both sides of
///
/// `Σ_{1 ≤ m ≤ k} m₁ Π_j m_j^{m_j−1}(k_j+1−m_j)^{k_j−m_j} / (m_j!(k_j+1−m_j)!)
///   ≤ 2^{n−1} k₁ Π_j (k_j+1)^{k_j} / (k_j+1)!`
///
/// summed term by term over the whole box `(1,…,1) ≤ m ≤ k`.
pub fn corollary_bound(k: &[u32]) -> Result<CorollaryReport> {
    if k.is_empty() || k.len() > 3 {
        return Err(Error::InvalidInput(format!("dimension {} is not in 1..=3", k.len())));
    }
    if k.contains(&0) {
        return Err(Error::InvalidInput("every component must be positive".into()));
    }
    let factors: Vec<Vec<BigRational>> = k
        .iter()
        .map(|&kj| (1..=kj).map(|m| axis_factor(m, kj)).collect())
        .collect();

    let mut lhs = BigRational::zero();
    let mut m = vec![1u32; k.len()];
    loop {
        let mut term = BigRational::from_integer(BigInt::from(m[0]));
        for (j, &mj) in m.iter().enumerate() {
            term *= &factors[j][(mj - 1) as usize];
        }
        lhs += term;
        // odometer over the box, last axis fastest
        let mut axis = k.len();
        loop {
            if axis == 0 {
                let mut rhs = BigRational::from_integer(BigInt::from(1u64 << (k.len() - 1)) * BigInt::from(k[0]));
                for &kj in k {
                    rhs *= BigRational::new(pow(kj + 1, kj), factorial(kj + 1));
                }
                return Ok(CorollaryReport {
                    k: k.to_vec(),
                    holds: lhs <= rhs,
                    lhs,
                    rhs,
                });
            }
            axis -= 1;
            if m[axis] < k[axis] {
                m[axis] += 1;
                break;
            }
            m[axis] = 1;
        }
    }
}
