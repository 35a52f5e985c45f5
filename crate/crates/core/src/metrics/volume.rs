//! Ball volumes: exhaustive oracles, the printed closed forms, a corrected
//! Hamming closed form, and leading-term estimates.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{weight, MetricId};
use crate::counting::{binomial, count_free_modules, count_matrices_full_rank, gaussian_binomial};
use crate::error::{Error, Result};
use crate::report::{big_to_f64, serialize_big, serialize_opt_big, serialize_opt_bigint};
use crate::ring::{par_count, Domain, RingCtx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallDomain {
    /// `S^n`.
    Ambient,
    /// Vectors with at least one unit entry.
    Punctured,
    /// `(S/γ^{s-1}S)^n`.
    Quotient,
}

impl std::str::FromStr for BallDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ambient" => Ok(BallDomain::Ambient),
            "punctured" => Ok(BallDomain::Punctured),
            "quotient" => Ok(BallDomain::Quotient),
            other => Err(Error::InvalidSpec(format!("unknown domain '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeMethod {
    Oracle,
    Paper,
    Corrected,
    All,
}

impl std::str::FromStr for VolumeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(VolumeMethod::Oracle),
            "paper" => Ok(VolumeMethod::Paper),
            "corrected" => Ok(VolumeMethod::Corrected),
            "all" => Ok(VolumeMethod::All),
            other => Err(Error::InvalidSpec(format!("unknown method '{other}'"))),
        }
    }
}

/// Number of vectors of `domain` with weight `< radius`.
fn count_ball(metric: MetricId, ctx: &RingCtx, n: usize, radius: usize, domain: Domain) -> Result<BigUint> {
    let total = u128::try_from(ctx.ring().cardinality_big().pow(n as u32)).unwrap_or(u128::MAX);
    ctx.budget().check(total, ctx.budget().enumeration)?;
    if radius == 0 {
        return Ok(BigUint::zero());
    }
    Ok(par_count(ctx.ring(), n, domain, |v| weight(metric, ctx, v) < radius).into())
}

/// Exact size of the open ball `{x : D(x, 0) < radius}` within `domain`.
///
/// For `s = 1` the quotient ring is the zero ring; its ball is taken to be
/// `{0}` when `radius > 0` and empty otherwise.
pub fn ball_volume_oracle(
    metric: MetricId,
    ctx: &RingCtx,
    n: usize,
    radius: usize,
    domain: BallDomain,
) -> Result<BigUint> {
    match domain {
        BallDomain::Ambient => count_ball(metric, ctx, n, radius, Domain::Ambient),
        BallDomain::Punctured => count_ball(metric, ctx, n, radius, Domain::Punctured),
        BallDomain::Quotient => match ctx.quotient() {
            Some(qctx) => count_ball(metric, &qctx, n, radius, Domain::Ambient),
            None => Ok(BigUint::from(u8::from(radius > 0))),
        },
    }
}

/// Vectors of `(γS)^n` inside the ball.
pub fn gamma_multiples_volume(metric: MetricId, ctx: &RingCtx, n: usize, radius: usize) -> Result<BigUint> {
    count_ball(metric, ctx, n, radius, Domain::GammaMultiples)
}

fn qpow(q: u64, e: u64) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// `Σ_{i=0}^{r-1} C(n,i)·i·q^{m(s-1)}(q^m-1)(q^{ms}-1)^{i-1}`, the `i = 0` term being 0.
pub fn hamming_volume_paper(ctx: &RingCtx, n: usize, r: usize) -> BigUint {
    let (q, m, s) = (ctx.q(), ctx.spec().m as u64, ctx.spec().s as u64);
    let mut total = BigUint::zero();
    for i in 1..r.min(n + 1) as u64 {
        total += binomial(n as u64, i)
            * i
            * qpow(q, m * (s - 1))
            * (qpow(q, m) - 1u32)
            * (qpow(q, m * s) - 1u32).pow((i - 1) as u32);
    }
    total
}

/// `Σ_{i=1}^{r-1} C(n,i)[(q^{ms}-1)^i - (q^{m(s-1)}-1)^i]`: weight-`i` vectors
/// minus those with every entry in `γS`.
pub fn hamming_volume_corrected(ctx: &RingCtx, n: usize, r: usize) -> BigUint {
    let (q, m, s) = (ctx.q(), ctx.spec().m as u64, ctx.spec().s as u64);
    let nonzero = qpow(q, m * s) - 1u32;
    let nonzero_gamma = qpow(q, m * (s - 1)) - 1u32;
    let mut total = BigUint::zero();
    for i in 1..r.min(n + 1) as u32 {
        total += binomial(n as u64, i as u64) * (nonzero.pow(i) - nonzero_gamma.pow(i));
    }
    total
}

/// `Σ_{i=0}^{r-1} N^i_{n,q} q^{(s-1)mi} ∏_{j<i}(q^m - q^j)` as printed,
/// defined for `0 <= r-1 <= min(m, n)`.
pub fn rank_volume_paper(ctx: &RingCtx, n: usize, r: usize) -> Result<BigUint> {
    let (q, m, s) = (ctx.q(), ctx.spec().m, ctx.spec().s);
    if r == 0 || r - 1 > m.min(n) {
        return Err(Error::OutOfRange(format!("rank volume formula needs 0 <= r-1 <= min(m, n), got r={r}")));
    }
    let mut total = BigUint::zero();
    for i in 0..r as i64 {
        let modules = count_free_modules(n as i64, i, q, s).exact;
        total += modules * count_matrices_full_rank(i as u64, m as u64, q, s).exact;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub metric: MetricId,
    pub p: u64,
    pub s: u32,
    pub r: u32,
    pub m: usize,
    pub ell: usize,
    pub n: usize,
    pub radius: usize,
    pub domain: BallDomain,
    #[serde(serialize_with = "serialize_opt_big")]
    pub oracle: Option<BigUint>,
    #[serde(serialize_with = "serialize_opt_big")]
    pub paper: Option<BigUint>,
    #[serde(serialize_with = "serialize_opt_big")]
    pub corrected: Option<BigUint>,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub delta_paper: Option<BigInt>,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub delta_corrected: Option<BigInt>,
    /// `|ball(S^n)| - |ball((S/γ^{s-1})^n)|`, the set-difference reading of the
    /// punctured ball (punctured domain only).
    #[serde(serialize_with = "serialize_opt_big")]
    pub ball_difference: Option<BigUint>,
    /// The `s = 1` quotient convention was used.
    pub quotient_convention: bool,
    pub notes: Vec<String>,
}

pub fn volume_report(
    metric: MetricId,
    ctx: &RingCtx,
    n: usize,
    radius: usize,
    domain: BallDomain,
    method: VolumeMethod,
) -> Result<VolumeReport> {
    let spec = *ctx.spec();
    let want = |m: VolumeMethod| method == m || method == VolumeMethod::All;
    let mut notes = Vec::new();
    let uses_quotient = spec.s == 1 && domain != BallDomain::Ambient;

    let oracle = if want(VolumeMethod::Oracle) {
        Some(ball_volume_oracle(metric, ctx, n, radius, domain)?)
    } else {
        None
    };
    let ball_difference = match (&oracle, domain) {
        (Some(_), BallDomain::Punctured) => {
            let amb = ball_volume_oracle(metric, ctx, n, radius, BallDomain::Ambient)?;
            let quo = ball_volume_oracle(metric, ctx, n, radius, BallDomain::Quotient)?;
            Some(amb - quo)
        }
        _ => None,
    };

    let closed_forms = domain == BallDomain::Punctured;
    if !closed_forms && (want(VolumeMethod::Paper) || want(VolumeMethod::Corrected)) {
        notes.push("closed forms are stated for the punctured domain only".into());
    }
    let paper = if closed_forms && want(VolumeMethod::Paper) {
        match metric {
            MetricId::Hamming => Some(hamming_volume_paper(ctx, n, radius)),
            MetricId::Rank => match rank_volume_paper(ctx, n, radius) {
                Ok(v) => Some(v),
                Err(e) => {
                    notes.push(e.to_string());
                    None
                }
            },
        }
    } else {
        None
    };
    let corrected = match metric {
        MetricId::Hamming if closed_forms && want(VolumeMethod::Corrected) => {
            Some(hamming_volume_corrected(ctx, n, radius))
        }
        _ => None,
    };
    let delta = |f: &Option<BigUint>| match (f, &oracle) {
        (Some(f), Some(o)) => Some(BigInt::from(f.clone()) - BigInt::from(o.clone())),
        _ => None,
    };
    let quotient_convention = uses_quotient && (domain == BallDomain::Quotient || ball_difference.is_some());
    Ok(VolumeReport {
        metric,
        p: spec.p,
        s: spec.s,
        r: spec.r,
        m: spec.m,
        ell: spec.ell,
        n,
        radius,
        domain,
        delta_paper: delta(&paper),
        delta_corrected: delta(&corrected),
        oracle,
        paper,
        corrected,
        ball_difference,
        quotient_convention,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateLimit {
    Q,
    N,
}

/// Leading-term estimate `coefficient · q^exponent` (or an exact value when
/// the estimate is not a single power), evaluated at the context's `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub metric: MetricId,
    pub limit: EstimateLimit,
    #[serde(serialize_with = "serialize_big")]
    pub coefficient: BigUint,
    pub exponent: Option<u64>,
    #[serde(serialize_with = "serialize_big")]
    pub exact: BigUint,
    pub value: f64,
    /// `r = 1`: empty punctured ball, estimate 0.
    pub zero_convention: bool,
}

pub fn volume_estimates(
    metric: MetricId,
    ctx: &RingCtx,
    n: usize,
    r: usize,
    limit: EstimateLimit,
) -> Result<VolumeEstimate> {
    let (q, m, s) = (ctx.q(), ctx.spec().m as u64, ctx.spec().s as u64);
    let nn = n as u64;
    if r == 0 {
        return Err(Error::OutOfRange("radius must be at least 1".into()));
    }
    let r1 = (r - 1) as u64;
    let max = match (metric, limit) {
        (MetricId::Rank, EstimateLimit::Q) => m.min(nn),
        (MetricId::Rank, EstimateLimit::N) => m,
        (MetricId::Hamming, _) => nn,
    };
    if r1 > max {
        return Err(Error::OutOfRange(format!("estimate needs r-1 <= {max}, got r={r}")));
    }
    let mk = |coefficient: BigUint, exponent: Option<u64>, exact: BigUint, zero: bool| VolumeEstimate {
        metric,
        limit,
        value: big_to_f64(&exact),
        coefficient,
        exponent,
        exact,
        zero_convention: zero,
    };
    if r == 1 {
        return Ok(mk(BigUint::zero(), None, BigUint::zero(), true));
    }
    Ok(match (metric, limit) {
        (MetricId::Hamming, EstimateLimit::Q) => {
            let c = binomial(nn, r1) * r1;
            let e = m * s * r1;
            mk(c.clone(), Some(e), c * qpow(q, e), false)
        }
        (MetricId::Hamming, EstimateLimit::N) => {
            let c = binomial(nn, r1) * r1;
            let exact = c.clone()
                * (qpow(q, m * s) - 1u32)
                * (qpow(q, m * s) - qpow(q, m * (s - 1))).pow((r1 - 1) as u32);
            mk(c, None, exact, false)
        }
        (MetricId::Rank, EstimateLimit::Q) => {
            let e = s * r1 * (m + nn - r1);
            mk(BigUint::one(), Some(e), qpow(q, e), false)
        }
        (MetricId::Rank, EstimateLimit::N) => {
            let c = gaussian_binomial(m as i64, r1 as i64, q).exact;
            let e = r1 * ((s - 1) * (m + nn - r1) + nn);
            mk(c.clone(), Some(e), c * qpow(q, e), false)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};

    fn z4() -> RingCtx {
        build_ring(RingSpec::integers(2, 2)).unwrap()
    }

    fn gr42() -> RingCtx {
        build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap()
    }

    fn corpus() -> Vec<RingCtx> {
        [
            RingSpec::integers(2, 1),
            RingSpec::integers(3, 1),
            RingSpec::integers(2, 2),
            RingSpec::integers(3, 2),
            RingSpec::integers(2, 3),
            RingSpec::new(2, 2, 1, 2, 1),
            RingSpec::new(2, 2, 1, 2, 2),
            RingSpec::new(2, 2, 2, 1, 1),
        ]
        .into_iter()
        .map(|s| build_ring(s).unwrap())
        .collect()
    }

    fn max_n(_: &RingCtx) -> usize {
        3
    }

    #[test]
    fn oracle_examples() {
        let z4 = z4();
        let h = |r, d| ball_volume_oracle(MetricId::Hamming, &z4, 2, r, d).unwrap();
        assert_eq!(h(1, BallDomain::Punctured), BigUint::zero());
        assert_eq!(h(2, BallDomain::Punctured), BigUint::from(4u32));
        assert_eq!(h(3, BallDomain::Punctured), BigUint::from(12u32));
        assert_eq!(
            ball_volume_oracle(MetricId::Rank, &z4, 1, 2, BallDomain::Punctured).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            ball_volume_oracle(MetricId::Rank, &gr42(), 1, 2, BallDomain::Punctured).unwrap(),
            BigUint::from(12u32)
        );
        let f2 = build_ring(RingSpec::integers(2, 1)).unwrap();
        assert_eq!(ball_volume_oracle(MetricId::Hamming, &f2, 2, 2, BallDomain::Quotient).unwrap(), BigUint::one());
        assert_eq!(ball_volume_oracle(MetricId::Hamming, &f2, 2, 0, BallDomain::Quotient).unwrap(), BigUint::zero());
    }

    #[test]
    fn hamming_closed_forms() {
        let z4 = z4();
        assert_eq!(hamming_volume_paper(&z4, 2, 2), BigUint::from(4u32));
        assert_eq!(hamming_volume_corrected(&z4, 2, 2), BigUint::from(4u32));
        assert_eq!(hamming_volume_paper(&z4, 2, 3), BigUint::from(16u32));
        assert_eq!(hamming_volume_corrected(&z4, 2, 3), BigUint::from(12u32));
        let f2 = build_ring(RingSpec::integers(2, 1)).unwrap();
        assert_eq!(hamming_volume_paper(&f2, 2, 2), BigUint::from(2u32));
        assert_eq!(hamming_volume_corrected(&f2, 2, 2), BigUint::from(2u32));
    }

    #[test]
    fn rank_paper_formula() {
        let z4 = z4();
        assert_eq!(rank_volume_paper(&z4, 1, 1).unwrap(), BigUint::one());
        assert_eq!(rank_volume_paper(&z4, 1, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(rank_volume_paper(&gr42(), 1, 2).unwrap(), BigUint::from(13u32));
        assert!(matches!(rank_volume_paper(&z4, 1, 3), Err(Error::OutOfRange(_))));
        assert!(matches!(rank_volume_paper(&z4, 1, 0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn corrected_equals_oracle_on_corpus() {
        for ctx in corpus() {
            for n in 1..=max_n(&ctx) {
                for radius in 0..=n + 1 {
                    let o = ball_volume_oracle(MetricId::Hamming, &ctx, n, radius, BallDomain::Punctured).unwrap();
                    assert_eq!(hamming_volume_corrected(&ctx, n, radius), o, "{:?} n={n} r={radius}", ctx.spec());
                }
            }
        }
    }

    #[test]
    fn domain_decompositions() {
        for ctx in corpus() {
            for metric in [MetricId::Hamming, MetricId::Rank] {
                for n in 1..=max_n(&ctx) {
                    for radius in 0..=n + 1 {
                        let vol = |d| ball_volume_oracle(metric, &ctx, n, radius, d).unwrap();
                        let (amb, punct, quo) = (vol(BallDomain::Ambient), vol(BallDomain::Punctured), vol(BallDomain::Quotient));
                        let gamma = gamma_multiples_volume(metric, &ctx, n, radius).unwrap();
                        assert_eq!(amb, &punct + &gamma);
                        assert_eq!(amb - quo, punct);
                    }
                }
            }
        }
    }

    #[test]
    fn punctured_volume_divisible_by_unit_multiples() {
        for ctx in corpus() {
            let spec = *ctx.spec();
            let ql = ctx.q().pow(spec.ell as u32);
            let orbit = BigUint::from(ql).pow(spec.s - 1) * (ql - 1);
            for metric in [MetricId::Hamming, MetricId::Rank] {
                for n in 1..=max_n(&ctx) {
                    for radius in 0..=n + 1 {
                        let v = ball_volume_oracle(metric, &ctx, n, radius, BallDomain::Punctured).unwrap();
                        assert!((&v % &orbit).is_zero(), "{spec:?} {metric} n={n} r={radius}: {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn report_deltas() {
        let z4 = z4();
        let rep = volume_report(MetricId::Hamming, &z4, 2, 3, BallDomain::Punctured, VolumeMethod::All).unwrap();
        assert_eq!(rep.oracle, Some(BigUint::from(12u32)));
        assert_eq!(rep.paper, Some(BigUint::from(16u32)));
        assert_eq!(rep.delta_paper, Some(BigInt::from(4)));
        assert_eq!(rep.delta_corrected, Some(BigInt::zero()));
        assert_eq!(rep.ball_difference, Some(BigUint::from(12u32)));
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["oracle"], "12");
        assert_eq!(json["delta_paper"], "4");
        assert_eq!(json["domain"], "punctured");

        let rk = volume_report(MetricId::Rank, &gr42(), 1, 2, BallDomain::Punctured, VolumeMethod::All).unwrap();
        assert_eq!(rk.delta_paper, Some(BigInt::one()));
        assert_eq!(rk.corrected, None);
        let out = volume_report(MetricId::Rank, &z4, 1, 5, BallDomain::Punctured, VolumeMethod::All).unwrap();
        assert_eq!(out.paper, None);
        assert_eq!(out.notes.len(), 1);
    }

    #[test]
    fn estimate_examples() {
        let f4 = build_ring(RingSpec::new(2, 1, 1, 2, 1)).unwrap();
        let e = volume_estimates(MetricId::Rank, &f4, 2, 2, EstimateLimit::Q).unwrap();
        assert_eq!(e.exponent, Some(3));
        let e = volume_estimates(MetricId::Hamming, &z4(), 2, 2, EstimateLimit::Q).unwrap();
        assert_eq!((e.coefficient.clone(), e.exponent), (BigUint::from(2u32), Some(2)));
        assert_eq!(e.exact, BigUint::from(8u32));
        let e = volume_estimates(MetricId::Hamming, &z4(), 2, 1, EstimateLimit::N).unwrap();
        assert!(e.zero_convention && e.exact.is_zero());
        assert!(volume_estimates(MetricId::Rank, &z4(), 1, 3, EstimateLimit::Q).is_err());
    }

    /// oracle / estimate along the q sweeps tends to 1 monotonically.
    #[test]
    fn estimate_ratios_approach_one() {
        let ratio = |metric, spec: RingSpec, n, r, limit| {
            let ctx = build_ring(spec).unwrap();
            let o = ball_volume_oracle(metric, &ctx, n, r, BallDomain::Punctured).unwrap();
            big_to_f64(&o) / volume_estimates(metric, &ctx, n, r, limit).unwrap().value
        };
        let ham: Vec<f64> = [2u64, 3, 5, 7]
            .iter()
            .map(|&p| ratio(MetricId::Hamming, RingSpec::integers(p, 2), 2, 2, EstimateLimit::Q))
            .collect();
        assert!(ham.windows(2).all(|w| w[0] < w[1] && w[1] <= 1.0), "{ham:?}");
        let rank: Vec<f64> = [2u64, 3, 5]
            .iter()
            .map(|&p| ratio(MetricId::Rank, RingSpec::new(p, 1, 1, 2, 1), 1, 2, EstimateLimit::Q))
            .collect();
        assert!(rank.windows(2).all(|w| w[0] < w[1] && w[1] <= 1.0), "{rank:?}");
        let rank_n: Vec<f64> = (1..=5)
            .map(|n| ratio(MetricId::Rank, RingSpec::integers(2, 2), n, 2, EstimateLimit::N))
            .collect();
        for (i, r) in rank_n.iter().enumerate() {
            assert!((r - (1.0 - 0.5f64.powi(i as i32 + 1))).abs() < 1e-12);
        }
    }
}
