//! Exact counts of subspaces, free modules and full-rank matrices, plus their
//! leading-order estimates.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::report::{big_to_f64, ratio_to_f64, serialize_big};

/// An exact count, decomposed as `base^power · rest` where `rest` is the
/// q-polynomial part (a product of Gaussian-binomial-type factors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountValue {
    #[serde(serialize_with = "serialize_big")]
    pub exact: BigUint,
    pub base: u64,
    pub power: u64,
    /// Set when the arguments fell outside the natural range and the
    /// zero convention was applied.
    pub out_of_range: bool,
}

impl CountValue {
    fn zero_flagged(base: u64) -> Self {
        CountValue { exact: BigUint::zero(), base, power: 0, out_of_range: true }
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn pow_big(base: u64, e: u64) -> BigUint {
    BigUint::from(base).pow(u32::try_from(e).expect("exponent fits in u32"))
}

/// `[n choose k]_Q`; `k < 0` or `k > n` yield 0 with the flag set.
pub fn gaussian_binomial(n: i64, k: i64, big_q: u64) -> CountValue {
    if k < 0 || n < 0 || k > n {
        return CountValue::zero_flagged(big_q);
    }
    let (n, k) = (n as u64, k as u64);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= pow_big(big_q, n - i) - 1u32;
        den *= pow_big(big_q, i + 1) - 1u32;
    }
    CountValue { exact: num / den, base: big_q, power: 0, out_of_range: false }
}

/// Number of free rank-`k` submodules of `T^{n}` for a chain ring `T` with
/// residue size `Q` and nilpotency `s`: `Q^{(n-k)k(s-1)} [n choose k]_Q`.
/// Zero (flagged) outside `0 <= k <= n`.
pub fn count_free_modules(n: i64, k: i64, big_q: u64, s: u32) -> CountValue {
    let g = gaussian_binomial(n, k, big_q);
    if g.out_of_range {
        return g;
    }
    let power = (n - k) as u64 * k as u64 * (s as u64 - 1);
    CountValue { exact: pow_big(big_q, power) * g.exact, base: big_q, power, out_of_range: false }
}

/// q-limit: exponent `s k (n-k)` of the leading term `q^{s k (n-k)}`.
pub fn count_estimate_q(n: u64, k: u64, s: u32) -> u64 {
    assert!(k <= n);
    s as u64 * k * (n - k)
}

/// n-limit estimate `q^{s k (n-k)} ∏_{i=1..k} q^i/(q^i - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NLimitEstimate {
    pub power: u64,
    pub correction: BigRational,
    pub value: f64,
}

pub fn count_estimate_n(n: u64, k: u64, q: u64, s: u32) -> NLimitEstimate {
    assert!(k <= n);
    let power = count_estimate_q(n, k, s);
    let mut correction = BigRational::one();
    for i in 1..=k {
        let qi = pow_big(q, i);
        correction *= BigRational::new(qi.clone().into(), (qi - 1u32).into());
    }
    let value = (q as f64).powf(power as f64) * ratio_to_f64(&correction);
    NLimitEstimate { power, correction, value }
}

/// `k × m` matrices over `R` (residue size `q`, nilpotency `s`) whose rows
/// span a free module of rank `k`: `q^{(s-1)mk} ∏_{j<k} (q^m - q^j)`.
pub fn count_matrices_full_rank(k: u64, m: u64, q: u64, s: u32) -> CountValue {
    if k > m {
        return CountValue::zero_flagged(q);
    }
    let power = (s as u64 - 1) * m * k;
    let mut rest = BigUint::one();
    for j in 0..k {
        rest *= pow_big(q, m) - pow_big(q, j);
    }
    CountValue { exact: pow_big(q, power) * rest, base: q, power, out_of_range: false }
}

/// exact / q-estimate for the free-module count.
pub fn free_count_ratio_q(n: u64, k: u64, q: u64, s: u32) -> f64 {
    let exact = count_free_modules(n as i64, k as i64, q, s).exact;
    let est = pow_big(q, count_estimate_q(n, k, s));
    big_to_f64(&exact) / big_to_f64(&est)
}

pub fn count_to_u128(c: &CountValue) -> Option<u128> {
    c.exact.to_u128()
}
