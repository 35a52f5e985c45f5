//! Asymptotic classification of densities by exponent comparison.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::counting::{binomial, gaussian_binomial};
use crate::error::{Error, Result};
use crate::metrics::MetricId;
use crate::report::serialize_opt_ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    LimitOne,
    LimitZero,
    LimsupAtMost,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exponents {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Present exactly for `LimsupAtMost`.
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub bound: Option<BigRational>,
    pub exponents: Exponents,
    pub flags: Vec<String>,
}

impl Verdict {
    fn new(kind: VerdictKind, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Verdict { kind, bound: None, exponents: Exponents { lhs: lhs.into(), rhs: rhs.into() }, flags: Vec::new() }
    }

    fn limsup(bound: BigRational, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Verdict { bound: Some(bound), ..Verdict::new(VerdictKind::LimsupAtMost, lhs, rhs) }
    }

    fn flag(mut self, f: impl Into<String>) -> Self {
        self.flags.push(f.into());
        self
    }

    fn trichotomy(lhs: &BigRational, rhs: &BigRational, tie: BigRational, lt: String, rt: String) -> Self {
        match lhs.cmp(rhs) {
            std::cmp::Ordering::Less => Verdict::new(VerdictKind::LimitOne, lt, rt),
            std::cmp::Ordering::Greater => Verdict::new(VerdictKind::LimitZero, lt, rt),
            std::cmp::Ordering::Equal => Verdict::limsup(tie, lt, rt),
        }
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `1 / (1 + c)`.
fn tie_bound(c: BigRational) -> BigRational {
    (BigRational::one() + c).recip()
}

/// `q^e` for a possibly negative exponent.
fn qpow(q: u64, e: i64) -> BigRational {
    let p = int(BigInt::from(q).pow(e.unsigned_abs() as u32));
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn check_ell(m: usize, ell: usize) -> Result<()> {
    if ell == 0 || m == 0 || m % ell != 0 {
        return Err(Error::OutOfRange(format!("need ell | m with ell, m >= 1, got ell={ell}, m={m}")));
    }
    Ok(())
}

/// `q → ∞` limit of the density: the leading `q`-exponent of the punctured ball
/// volume against `s(N - kℓ + ℓ)`, `N = nm`.
pub fn classify_q_limit(
    metric: MetricId,
    n: usize,
    k: usize,
    ell: usize,
    d: usize,
    s: u32,
    m: usize,
) -> Result<Verdict> {
    check_ell(m, ell)?;
    let big_n = n * m;
    if n == 0 || s == 0 || d == 0 || k < 1 || k * ell > big_n {
        return Err(Error::OutOfRange(format!(
            "need n, s, d >= 1 and 1 <= k <= N/ell = {}, got n={n}, s={s}, d={d}, k={k}",
            big_n / ell.max(1)
        )));
    }
    let s64 = s as u64;
    let threshold = s64 * (big_n - k * ell + ell) as u64;
    let rhs = format!("s(N-k*ell+ell) = {threshold}");
    if d == 1 {
        return Ok(Verdict::new(VerdictKind::LimitOne, "empty punctured ball, v = 0", rhs));
    }
    let (exponent, coefficient, lhs) = match metric {
        MetricId::Hamming => {
            let r1 = (d - 1).min(n);
            let e = (m * r1) as u64 * s64;
            (e, binomial(n as u64, r1 as u64), format!("m*s*r1 = {e} (r1 = {r1})"))
        }
        MetricId::Rank => {
            let r1 = (d - 1).min(m.min(n));
            let e = s64 * (r1 * (m + n - r1)) as u64;
            (e, 1u32.into(), format!("s*r1*(m+n-r1) = {e} (r1 = {r1})"))
        }
    };
    let c = int(coefficient);
    let mut v = Verdict::trichotomy(&int(exponent), &int(threshold), tie_bound(c), lhs, rhs);
    if metric == MetricId::Hamming && v.kind == VerdictKind::LimsupAtMost && d - 1 <= n {
        let paper = binomial(n as u64, (d - 1) as u64) * (d - 1);
        v = v.flag(format!(
            "leading coefficient C(n,d-1) used; the printed estimate's coefficient {paper} would give bound {}",
            crate::report::fmt_ratio(&tie_bound(int(paper.clone())))
        ));
    }
    Ok(v)
}

/// Rank-metric `q`-limit table with `θ = (d-1)(min(m,n)-d+1)` and
/// `r = ℓ⌈n(d-1)/ℓ⌉ - n(d-1)` at `k = ⌊max(m,n)(min(m,n)-d+1)/ℓ⌋`.
pub fn classify_rank_q(m: usize, n: usize, ell: usize, d: usize) -> Result<Verdict> {
    check_ell(m, ell)?;
    let mn = m.min(n);
    if d < 2 || d > n || d > mn {
        return Err(Error::OutOfRange(format!("need 2 <= d <= min(m,n), got d={d}, m={m}, n={n}")));
    }
    let theta = ((d - 1) * (mn - d + 1)) as i64;
    let half = BigRational::new(1.into(), 2.into());
    let ell_i = ell as i64;
    if m >= n {
        return Ok(Verdict::trichotomy(
            &int(theta),
            &int(ell_i),
            half,
            format!("theta = {theta}"),
            format!("ell = {ell}"),
        ));
    }
    let x = (n * (d - 1)) as i64;
    let r = ell_i * ((x + ell_i - 1) / ell_i) - x;
    Ok(Verdict::trichotomy(
        &int(theta - r),
        &int(ell_i),
        half,
        format!("theta - r = {} (theta = {theta}, r = {r})", theta - r),
        format!("ell = {ell}"),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NLimitRule {
    /// `k(n) = R·N/ℓ`.
    Rate(BigRational),
    /// `k(n) = (m/ℓ)(n-d+1)`.
    HammingMdr,
    /// `k(n) = ⌊n(m-d+1)/ℓ⌋`.
    RankMax,
}

const WIDE_RANGE_FLAG: &str = "k(n) >= n for large n; range relaxed to k(n) <= N/ell";
const PAREN_FLAG: &str = "exponent read as (d-1)(s-1)(m-(d-1))";

/// `n → ∞` limit of the density along the sequence `k(n)` given by `rule`.
pub fn classify_n_limit(
    metric: MetricId,
    q: u64,
    s: u32,
    m: usize,
    ell: usize,
    d: usize,
    rule: NLimitRule,
) -> Result<Verdict> {
    check_ell(m, ell)?;
    if q < 2 || s == 0 || d == 0 {
        return Err(Error::OutOfRange(format!("need q >= 2, s >= 1, d >= 1, got q={q}, s={s}, d={d}")));
    }
    let s64 = s as i64;
    match rule {
        NLimitRule::HammingMdr => {
            if d < 2 {
                return Err(Error::OutOfRange("MDR sequence needs d >= 2".into()));
            }
            let t = s64 * ((m * (d - 1) + ell) as i64);
            Ok(Verdict::new(
                VerdictKind::LimitZero,
                format!("v ~ C(n,{})*q^{}, polynomial growth in n", d - 1, m as i64 * s64 * (d as i64 - 1)),
                format!("threshold q^{t}, constant in n"),
            ))
        }
        NLimitRule::RankMax => {
            if d < 2 || d > m {
                return Err(Error::OutOfRange(format!("rank-max sequence needs 2 <= d <= m, got d={d}, m={m}")));
            }
            let g = int(gaussian_binomial(m as i64, (d - 1) as i64, q).exact);
            let e = ((d - 1) * (m - d + 1)) as i64 * (s64 - 1) - 2 * s64 * ell as i64;
            let c = g * qpow(q, e);
            Ok(Verdict::limsup(
                tie_bound(c),
                format!("[m,d-1]_q * q^((d-1)(s-1)(m-d+1)) / q^(2*s*ell), net exponent {e}"),
                "1".to_string(),
            )
            .flag(PAREN_FLAG))
        }
        NLimitRule::Rate(rate) => {
            if rate < BigRational::zero() || rate > BigRational::one() {
                return Err(Error::OutOfRange(format!("rate {rate} outside [0,1]")));
            }
            if rate.is_zero() {
                return Err(Error::OutOfRange("rate 0 gives k(n) = 0".into()));
            }
            let wide = rate.clone() * int(m as i64) >= int(ell as i64);
            let one_minus = BigRational::one() - &rate;
            let rhs_slope = one_minus.clone() * int(m as i64) * int(s64);
            let rhs = format!("s(1-R)m = {rhs_slope} per n");
            let v = if d == 1 {
                Verdict::new(VerdictKind::LimitOne, "empty punctured ball, v = 0", rhs)
            } else {
                match metric {
                    MetricId::Hamming => {
                        let lhs = "0 per n (polynomial growth)".to_string();
                        if one_minus.is_zero() {
                            Verdict::new(VerdictKind::LimitZero, lhs, rhs)
                        } else {
                            Verdict::new(VerdictKind::LimitOne, lhs, rhs)
                        }
                    }
                    MetricId::Rank => rank_rate(q, s64, m, ell, d, &rate, rhs),
                }
            };
            Ok(if wide { v.flag(WIDE_RANGE_FLAG) } else { v })
        }
    }
}

fn rank_rate(q: u64, s: i64, m: usize, ell: usize, d: usize, rate: &BigRational, rhs: String) -> Verdict {
    let r1 = (d - 1).min(m);
    let lhs_slope = int(s * r1 as i64);
    let rhs_slope = (BigRational::one() - rate) * int(m as i64) * int(s);
    let lhs = format!("s*r1 = {lhs_slope} per n (r1 = {r1})");
    if lhs_slope != rhs_slope {
        return Verdict::trichotomy(&lhs_slope, &rhs_slope, BigRational::zero(), lhs, rhs);
    }
    if (m - r1) % ell != 0 {
        return Verdict::new(VerdictKind::Indeterminate, lhs, rhs)
            .flag("k(n) = n(m-d+1)/ell is not an integer for every n");
    }
    let g = int(gaussian_binomial(m as i64, r1 as i64, q).exact);
    let e = (r1 * (m - r1)) as i64 * (s - 1) - s * ell as i64;
    Verdict::limsup(tie_bound(g * qpow(q, e)), format!("{lhs}, offset exponent {e}"), rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::ratio;

    #[test]
    fn q_limit_examples() {
        for (m, ell, n, d) in [(1, 1, 3, 2), (2, 1, 3, 2), (2, 2, 4, 3), (3, 1, 2, 2)] {
            let k = m / ell * (n - d + 1);
            let v = classify_q_limit(MetricId::Hamming, n, k, ell, d, 2, m).unwrap();
            assert_eq!(v.kind, VerdictKind::LimitOne, "{m} {ell} {n} {d}");
        }
        let v = classify_q_limit(MetricId::Rank, 3, 6, 1, 2, 1, 3).unwrap();
        assert_eq!(v.kind, VerdictKind::LimitZero);
        let v = classify_q_limit(MetricId::Rank, 2, 2, 1, 2, 1, 2).unwrap();
        assert_eq!((v.kind, v.bound), (VerdictKind::LimsupAtMost, Some(ratio(1, 2))));
        assert_eq!(classify_q_limit(MetricId::Rank, 2, 1, 1, 1, 1, 2).unwrap().kind, VerdictKind::LimitOne);
        assert!(classify_q_limit(MetricId::Rank, 2, 5, 1, 2, 1, 2).is_err());
        assert!(classify_q_limit(MetricId::Rank, 2, 0, 1, 2, 1, 2).is_err());
    }

    #[test]
    fn hamming_tie_uses_true_coefficient() {
        // n=2, m=1, s=1, d=2: exponent 1; threshold 2 - k + 1 = 1 at k = 2.
        let v = classify_q_limit(MetricId::Hamming, 2, 2, 1, 2, 1, 1).unwrap();
        assert_eq!(v.bound, Some(ratio(1, 3)));
        assert_eq!(v.flags.len(), 1);
    }

    #[test]
    fn rank_q_examples() {
        assert_eq!(classify_rank_q(2, 2, 2, 2).unwrap().kind, VerdictKind::LimitOne);
        assert_eq!(classify_rank_q(2, 3, 2, 2).unwrap().kind, VerdictKind::LimitOne);
        let v = classify_rank_q(2, 3, 1, 2).unwrap();
        assert_eq!((v.kind, v.bound), (VerdictKind::LimsupAtMost, Some(ratio(1, 2))));
        assert_eq!(classify_rank_q(3, 3, 1, 2).unwrap().kind, VerdictKind::LimitZero);
        assert!(classify_rank_q(2, 3, 1, 3).is_err());
    }

    #[test]
    fn rank_table_matches_exponents() {
        for m in 1usize..=4 {
            for n in 1..=4 {
                for ell in (1..=m).filter(|l| m % l == 0) {
                    for d in 2..=n {
                        let k = (m.max(n) * (m.min(n) + 1).saturating_sub(d)) / ell;
                        let a = classify_rank_q(m, n, ell, d);
                        let b = classify_q_limit(MetricId::Rank, n, k, ell, d, 2, m);
                        match (a, b) {
                            (Ok(a), Ok(b)) => assert_eq!((a.kind, a.bound), (b.kind, b.bound), "{m} {n} {ell} {d}"),
                            (Err(_), Err(_)) => {}
                            (a, b) => panic!("{m} {n} {ell} {d}: {a:?} vs {b:?}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn n_limit_examples() {
        let v = classify_n_limit(MetricId::Hamming, 4, 1, 1, 1, 2, NLimitRule::HammingMdr).unwrap();
        assert_eq!(v.kind, VerdictKind::LimitZero);
        let v = classify_n_limit(MetricId::Rank, 2, 1, 2, 1, 2, NLimitRule::RankMax).unwrap();
        assert_eq!(v.bound, Some(ratio(4, 7)));
        assert_eq!(v.flags, vec![PAREN_FLAG.to_string()]);
        let half = ratio(1, 2);
        let v = classify_n_limit(MetricId::Hamming, 4, 1, 1, 1, 2, NLimitRule::Rate(half.clone())).unwrap();
        assert_eq!(v.kind, VerdictKind::LimitOne);
        let v = classify_n_limit(MetricId::Hamming, 4, 1, 1, 1, 2, NLimitRule::Rate(ratio(1, 1))).unwrap();
        assert_eq!(v.kind, VerdictKind::LimitZero);
        // rank, m=4, d=2: slope 1 vs 4(1-R).
        let r = |rate| classify_n_limit(MetricId::Rank, 2, 1, 4, 1, 2, NLimitRule::Rate(rate)).unwrap();
        assert_eq!(r(ratio(1, 2)).kind, VerdictKind::LimitOne);
        assert_eq!(r(ratio(7, 8)).kind, VerdictKind::LimitZero);
        let tie = r(ratio(3, 4));
        // [4,1]_2 = 15, offset exponent 1*3*0 - 1 = -1.
        assert_eq!(tie.bound, Some(ratio(2, 17)));
        let v = classify_n_limit(MetricId::Rank, 2, 1, 4, 2, 2, NLimitRule::Rate(ratio(3, 4))).unwrap();
        assert_eq!(v.kind, VerdictKind::Indeterminate);
        assert!(classify_n_limit(MetricId::Rank, 2, 1, 2, 1, 3, NLimitRule::RankMax).is_err());
        assert!(classify_n_limit(MetricId::Rank, 2, 1, 2, 1, 2, NLimitRule::Rate(ratio(3, 2))).is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let v = classify_rank_q(2, 3, 1, 2).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["kind"], "limsup_at_most");
        assert_eq!(j["bound"], "1/2");
        assert!(j["exponents"]["lhs"].is_string());
        let one = serde_json::to_value(classify_rank_q(2, 2, 2, 2).unwrap()).unwrap();
        assert!(one["bound"].is_null());
    }
}
