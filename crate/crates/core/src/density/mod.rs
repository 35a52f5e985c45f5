//! Densities of free codes with large minimum distance: the sandwich bounds,
//! exact and Monte-Carlo densities, asymptotic classifiers, GV experiments and
//! the bipartite-graph audit.

mod audit;
mod classify;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{census_map, has_min_distance_at_least, sample_free_code, CensusRoute};
use crate::counting::{binomial, count_free_modules};
use crate::error::{Error, Result};
use crate::metrics::{
    ball_volume_oracle, hamming_volume_corrected, hamming_volume_paper, rank_volume_paper, BallDomain, MetricId,
};
use crate::report::{serialize_big, serialize_opt_ratio, serialize_ratio};
use crate::ring::RingCtx;

pub use audit::{graph_audit, AlphaClass, AuditReport};
pub use classify::{classify_n_limit, classify_q_limit, classify_rank_q, NLimitRule, Verdict, VerdictKind};

/// Samples per Monte-Carlo chunk; each chunk owns one ChaCha stream.
pub const MC_CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeSource {
    #[default]
    Oracle,
    Paper,
    Corrected,
}

impl std::str::FromStr for VolumeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(VolumeSource::Oracle),
            "paper" => Ok(VolumeSource::Paper),
            "corrected" => Ok(VolumeSource::Corrected),
            other => Err(Error::InvalidSpec(format!("unknown volume source '{other}'"))),
        }
    }
}

/// `N/ℓ` for the degree-`ell` subring.
fn sbar_length(ctx: &RingCtx, n: usize, ell: usize) -> Result<usize> {
    Ok(n * ctx.subring(ell)?.rank_of_s())
}

/// `|S̄^*| = Q^{s-1}(Q-1)` with `Q = q^ℓ`.
fn sbar_units(ctx: &RingCtx, ell: usize) -> BigUint {
    let big_q = BigUint::from(ctx.q()).pow(ell as u32);
    big_q.pow(ctx.spec().s - 1) * (big_q - 1u32)
}

/// Punctured-ball volume `v(S_{q(γ)}^n, d)` from the chosen source.
pub fn punctured_volume(ctx: &RingCtx, metric: MetricId, n: usize, d: usize, source: VolumeSource) -> Result<BigUint> {
    match (source, metric) {
        (VolumeSource::Oracle, _) => ball_volume_oracle(metric, ctx, n, d, BallDomain::Punctured),
        (VolumeSource::Paper, MetricId::Hamming) => Ok(hamming_volume_paper(ctx, n, d)),
        (VolumeSource::Paper, MetricId::Rank) => rank_volume_paper(ctx, n, d),
        (VolumeSource::Corrected, MetricId::Hamming) => Ok(hamming_volume_corrected(ctx, n, d)),
        (VolumeSource::Corrected, MetricId::Rank) => {
            Err(Error::Unsupported("no corrected closed form for the rank-metric ball".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsParams {
    pub metric: MetricId,
    pub p: u64,
    pub s: u32,
    pub r: u32,
    pub m: usize,
    pub ell: usize,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub volume_source: VolumeSource,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub params: BoundsParams,
    #[serde(serialize_with = "serialize_big")]
    pub v: BigUint,
    /// `q^{ℓ(s-1)}(q^ℓ - 1)`.
    #[serde(serialize_with = "serialize_big")]
    pub unit_multiples: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub n_k: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub n_k1: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub n_k2: BigUint,
    /// Unclamped lower bound.
    #[serde(serialize_with = "serialize_ratio")]
    pub lower: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub lower_clamped: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub upper: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub theta_bar: BigRational,
}

fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Lower and upper density bounds for `1 <= k <= N/ℓ`, `d >= 1`.
/// `N^j_i` is 0 for `j < 0`.
pub fn density_bounds(
    ctx: &RingCtx,
    metric: MetricId,
    n: usize,
    k: usize,
    ell: usize,
    d: usize,
    source: VolumeSource,
) -> Result<BoundsReport> {
    let width = sbar_length(ctx, n, ell)?;
    if k < 1 || k > width {
        return Err(Error::OutOfRange(format!("need 1 <= k <= N/ell = {width}, got k={k}")));
    }
    if d < 1 {
        return Err(Error::OutOfRange("need d >= 1".into()));
    }
    let spec = *ctx.spec();
    let big_q = ctx.q().pow(ell as u32);
    let s = spec.s;
    let (w, k) = (width as i64, k as i64);
    let n_k = count_free_modules(w, k, big_q, s).exact;
    let n_k1 = count_free_modules(w - 1, k - 1, big_q, s).exact;
    let n_k2 = count_free_modules(w - 2, k - 2, big_q, s).exact;
    let v = punctured_volume(ctx, metric, n, d, source)?;
    let u = sbar_units(ctx, ell);

    let one = BigRational::one();
    let lower = &one - big_ratio(&(&v * &n_k1), &(&u * &n_k));
    let theta_bar = &one + (big_ratio(&v, &u) - &one) * big_ratio(&n_k2, &n_k1);
    let upper = if v.is_zero() {
        one.clone()
    } else {
        if !theta_bar.is_positive() {
            return Err(Error::OutOfRange(format!("theta_bar = {theta_bar} is not positive")));
        }
        &one - big_ratio(&(&v * &n_k1), &(&u * &n_k)) / &theta_bar
    };
    let lower_clamped = if lower.is_negative() { BigRational::zero() } else { lower.clone() };
    Ok(BoundsReport {
        params: BoundsParams {
            metric,
            p: spec.p,
            s: spec.s,
            r: spec.r,
            m: spec.m,
            ell,
            n,
            k: k as usize,
            d,
            volume_source: source,
        },
        v,
        unit_multiples: u,
        n_k,
        n_k1,
        n_k2,
        lower,
        lower_clamped,
        upper,
        theta_bar,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactDensity {
    /// Codes with minimum distance at least `d`.
    #[serde(serialize_with = "serialize_big")]
    pub good: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub total: BigUint,
    #[serde(serialize_with = "serialize_ratio")]
    pub density: BigRational,
}

/// Fraction of free rank-`k` codes with `D(C) >= d`, by full census.
pub fn exact_density(ctx: &RingCtx, metric: MetricId, n: usize, k: usize, ell: usize, d: usize) -> Result<ExactDensity> {
    let width = sbar_length(ctx, n, ell)?;
    let big_q = ctx.q().pow(ell as u32);
    let total = count_free_modules(width as i64, k as i64, big_q, ctx.spec().s).exact;
    if total.is_zero() {
        return Err(Error::OutOfRange(format!("no free codes of rank {k} in length N/ell = {width}")));
    }
    if d <= 1 {
        return Ok(ExactDensity { good: total.clone(), density: BigRational::one(), total });
    }
    let per_code = ctx.subring(ell)?.ring().cardinality().checked_pow(k as u32).unwrap_or(u128::MAX);
    ctx.budget().check(per_code, ctx.budget().codewords)?;
    let flags = census_map(ctx, ell, n, k, CensusRoute::Systematic, |code| {
        has_min_distance_at_least(ctx, code, metric, d)
    })?;
    let flags = flags.into_iter().collect::<Result<Vec<bool>>>()?;
    debug_assert_eq!(BigUint::from(flags.len()), total);
    let good = BigUint::from(flags.iter().filter(|&&b| b).count());
    Ok(ExactDensity { density: big_ratio(&good, &total), good, total })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub exact: Option<BigRational>,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub samples: usize,
    pub seed: u64,
    /// Fraction of drawn generator tuples that were free bases.
    pub acceptance_rate: f64,
}

/// Fraction of `samples` uniform free codes with `D(C) >= d`, with binomial
/// standard error. Chunk `c` draws from ChaCha stream `c` of `seed`, so the
/// estimate does not depend on the worker count.
pub fn mc_density(
    ctx: &RingCtx,
    metric: MetricId,
    n: usize,
    k: usize,
    ell: usize,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    let (hits, attempts) = mc_hits(ctx, metric, n, k, ell, d, samples, seed)?;
    let mean = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    let stderr = if samples == 0 { 0.0 } else { (mean * (1.0 - mean) / samples as f64).sqrt() };
    Ok(DensityEstimate {
        exact: None,
        mc_mean: mean,
        mc_stderr: stderr,
        samples,
        seed,
        acceptance_rate: if attempts == 0 { 1.0 } else { samples as f64 / attempts as f64 },
    })
}

#[allow(clippy::too_many_arguments)]
fn mc_hits(
    ctx: &RingCtx,
    metric: MetricId,
    n: usize,
    k: usize,
    ell: usize,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<(u64, u64)> {
    let width = sbar_length(ctx, n, ell)?;
    if k > width {
        return Err(Error::OutOfRange(format!("rank {k} exceeds N/ell = {width}")));
    }
    if d <= 1 {
        return Ok((samples as u64, 0));
    }
    let per_code = ctx.subring(ell)?.ring().cardinality().checked_pow(k as u32).unwrap_or(u128::MAX);
    ctx.budget().check(per_code, ctx.budget().codewords)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Result<(u64, u64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut hits, mut attempts) = (0u64, 0u64);
            for _ in 0..len {
                let s = sample_free_code(ctx, ell, n, k, &mut rng)?;
                attempts += s.attempts;
                if has_min_distance_at_least(ctx, &s.code, metric, d)? {
                    hits += 1;
                }
            }
            Ok((hits, attempts))
        })
        .collect();
    let mut total = (0u64, 0u64);
    for p in parts {
        let (h, a) = p?;
        total.0 += h;
        total.1 += a;
    }
    Ok(total)
}

/// Volume of the ambient ball `v(S^n, d)` for the GV rate.
pub fn ambient_volume(ctx: &RingCtx, metric: MetricId, n: usize, d: usize, source: VolumeSource) -> Result<BigUint> {
    match (source, metric) {
        (VolumeSource::Oracle, _) => ball_volume_oracle(metric, ctx, n, d, BallDomain::Ambient),
        (VolumeSource::Corrected, MetricId::Hamming) => {
            let nonzero = BigUint::from(ctx.q()).pow(ctx.spec().m as u32 * ctx.spec().s) - 1u32;
            Ok((0..d.min(n + 1)).map(|i| binomial(n as u64, i as u64) * nonzero.pow(i as u32)).sum())
        }
        _ => Err(Error::Unsupported(format!("no {source:?} closed form for the ambient {metric} ball"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvRate {
    #[serde(serialize_with = "serialize_big")]
    pub v: BigUint,
    pub rate: f64,
    pub k_suggest: usize,
}

fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        crate::report::big_to_f64(v).ln()
    } else {
        let shift = bits - 900;
        crate::report::big_to_f64(&(v >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `R = 1 - log_{q^s}(v(S^n, d)) / N`, `k = ⌊R·N/ℓ⌋` clamped to `[0, N/ℓ]`.
pub fn gv_rate(ctx: &RingCtx, metric: MetricId, n: usize, d: usize, source: VolumeSource) -> Result<GvRate> {
    let spec = *ctx.spec();
    let big_n = (n * spec.m) as f64;
    let v = ambient_volume(ctx, metric, n, d, source)?;
    let log_qs = (ctx.q() as f64).ln() * spec.s as f64;
    let rate = 1.0 - ln_big(&v) / log_qs / big_n;
    let width = sbar_length(ctx, n, spec.ell)?;
    let k = (rate * width as f64).floor().clamp(0.0, width as f64) as usize;
    Ok(GvRate { v, rate, k_suggest: k })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvExperiment {
    pub rate_used: f64,
    pub k: usize,
    pub success_prob: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Samples codes at rate `R - ε` (or rank `k_override`) and reports the
/// fraction with `D(C) >= d`.
#[allow(clippy::too_many_arguments)]
pub fn gv_experiment(
    ctx: &RingCtx,
    metric: MetricId,
    n: usize,
    d: usize,
    eps: f64,
    samples: usize,
    seed: u64,
    k_override: Option<usize>,
    source: VolumeSource,
) -> Result<GvExperiment> {
    let ell = ctx.spec().ell;
    let width = sbar_length(ctx, n, ell)?;
    let gv = gv_rate(ctx, metric, n, d, source)?;
    let rate_used = gv.rate - eps;
    let k = match k_override {
        Some(k) => k as i64,
        None => (rate_used * width as f64).floor() as i64,
    };
    if k < 1 {
        return Err(Error::DegenerateRate(k));
    }
    let est = mc_density(ctx, metric, n, k as usize, ell, d, samples, seed)?;
    Ok(GvExperiment {
        rate_used,
        k: k as usize,
        success_prob: est.mc_mean,
        stderr: est.mc_stderr,
        samples,
        seed,
    })
}

/// `((q^{sℓ} - 1)/q^{sℓ}, q^{sℓ}/(q^{sℓ} + 1))`.
pub fn gv_n_limit_bounds(q: u64, s: u32, ell: usize) -> (BigRational, BigRational) {
    let t = BigInt::from(q).pow(s * ell as u32);
    (
        BigRational::new(&t - 1, t.clone()),
        BigRational::new(t.clone(), t + 1),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub sweep_value: u64,
    pub p: u64,
    pub s: u32,
    pub r: u32,
    pub m: usize,
    pub n: usize,
    #[serde(serialize_with = "serialize_big")]
    pub v_quotient: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub v_ambient: BigUint,
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: BigRational,
    /// Ratio did not drop relative to the previous row.
    pub non_decreasing: bool,
    pub quotient_convention: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub metric: MetricId,
    pub d: usize,
    pub rows: Vec<ProbeRow>,
    pub strictly_decreasing: bool,
}

/// `v((S/γ^{s-1})^n, d) / v(S^n, d)` along a sweep of `(value, ring, n)` points.
pub fn gv_condition_probe(points: &[(u64, &RingCtx, usize)], metric: MetricId, d: usize) -> Result<ProbeReport> {
    let mut rows: Vec<ProbeRow> = Vec::new();
    for &(value, ctx, n) in points {
        let spec = *ctx.spec();
        let vq = ball_volume_oracle(metric, ctx, n, d, BallDomain::Quotient)?;
        let va = ball_volume_oracle(metric, ctx, n, d, BallDomain::Ambient)?;
        let ratio = if va.is_zero() { BigRational::zero() } else { big_ratio(&vq, &va) };
        let non_decreasing = rows.last().is_some_and(|prev| ratio >= prev.ratio);
        rows.push(ProbeRow {
            sweep_value: value,
            p: spec.p,
            s: spec.s,
            r: spec.r,
            m: spec.m,
            n,
            v_quotient: vq,
            v_ambient: va,
            ratio,
            non_decreasing,
            quotient_convention: spec.s == 1,
        });
    }
    let strictly_decreasing = rows.iter().all(|r| !r.non_decreasing);
    Ok(ProbeReport { metric, d, rows, strictly_decreasing })
}
