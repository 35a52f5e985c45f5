//! The `micro` verification suite: desk-scale corpus with frozen expected
//! values, plus the findings it is expected to raise.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::{census_map, codewords, enumerate_free_codes, sample_free_code, CensusRoute};
use crate::counting::{count_estimate_q, count_free_modules};
use crate::density::{
    classify_n_limit, classify_q_limit, classify_rank_q, density_bounds, exact_density, gv_condition_probe,
    graph_audit, mc_density, AuditReport, NLimitRule, VerdictKind, VolumeSource,
};
use crate::error::Result;
use crate::metrics::{
    ball_volume_oracle, hamming_volume_corrected, hamming_volume_paper, rank_volume_paper, volume_estimates,
    weight, BallDomain, EstimateLimit, MetricId,
};
use crate::report::{big_to_f64, fmt_ratio, fmt_span, ratio, ratio_to_f64, Finding};
use crate::ring::{build_ring, Budget, Domain, RingCtx, RingSpec, RingVector};

/// Finding ids the micro suite is expected to raise on a correct build.
pub const DEFAULT_MANIFEST: &[&str] = &[
    "audit-nonisolated-not-f",
    "bounds-lower-violation",
    "estimate-hamming-n-ratio",
    "estimate-hamming-q-coefficient",
    "volume-hamming-paper",
    "volume-rank-paper",
];

pub fn parse_manifest(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn default_manifest() -> BTreeSet<String> {
    DEFAULT_MANIFEST.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Wall time, not serialized.
    #[serde(skip)]
    pub seconds: f64,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criteria: Vec<CriterionResult>,
    pub findings: Vec<Finding>,
    pub unexpected_findings: Vec<String>,
    pub missing_findings: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.criteria {
            out.push(format!(
                "criterion {} {}: {} ({} checks)",
                c.id,
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.checks.len()
            ));
            for ch in c.checks.iter().filter(|ch| !ch.passed) {
                out.push(format!("  failed {}: {}", ch.name, ch.detail));
            }
        }
        for f in &self.findings {
            out.push(format!("finding {}: {}", f.id, f.detail));
        }
        for id in &self.unexpected_findings {
            out.push(format!("unexpected finding {id}"));
        }
        for id in &self.missing_findings {
            out.push(format!("missing expected finding {id}"));
        }
        out.push(format!("suite micro: {}", if self.passed { "PASS" } else { "FAIL" }));
        out
    }
}

#[derive(Default)]
struct Run {
    checks: Vec<Check>,
    findings: BTreeMap<String, Finding>,
}

impl Run {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: impl Into<String>, got: T, want: T) {
        let passed = got == want;
        self.check(name, passed, format!("got {got:?}, expected {want:?}"));
    }

    fn fallible<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(name, false, format!("error: {e}"));
                None
            }
        }
    }

    fn finding(&mut self, id: &str, detail: &str, witness: String) {
        self.findings
            .entry(id.to_string())
            .or_insert_with(|| Finding::new(id, detail))
            .witnesses
            .push(witness);
    }
}

pub fn ring_label(spec: &RingSpec) -> String {
    let ps = spec.p.pow(spec.s);
    if spec.r == 1 && spec.m == 1 {
        if spec.s == 1 {
            format!("F{}", spec.p)
        } else {
            format!("Z{ps}")
        }
    } else {
        format!("GR({ps},{}) m={} ell={}", spec.r as usize * spec.m, spec.m, spec.ell)
    }
}

fn ring(spec: RingSpec, budget: Budget) -> Result<RingCtx> {
    Ok(build_ring(spec)?.with_budget(budget))
}

fn z(p: u64, s: u32) -> RingSpec {
    RingSpec::integers(p, s)
}

fn gr42(ell: usize) -> RingSpec {
    RingSpec::new(2, 2, 1, 2, ell)
}

/// Free-module census points with their frozen sizes.
pub const CENSUS_CORPUS: &[((u64, u32, u32, usize, usize), usize, usize, u64)] = &[
    ((2, 2, 1, 1, 1), 2, 1, 6),
    ((2, 2, 1, 1, 1), 2, 2, 1),
    ((2, 2, 1, 1, 1), 3, 1, 28),
    ((2, 2, 1, 1, 1), 3, 2, 28),
    ((3, 2, 1, 1, 1), 2, 1, 12),
    ((2, 2, 1, 2, 2), 1, 1, 1),
    ((2, 2, 1, 2, 1), 1, 1, 6),
];

fn criterion_1(budget: Budget, run: &mut Run) {
    for &((p, s, r, m, ell), n, k, want) in CENSUS_CORPUS {
        let spec = RingSpec::new(p, s, r, m, ell);
        let name = format!("{} n={n} k={k}", ring_label(&spec));
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        let formula = count_free_modules((n * m / ell) as i64, k as i64, ctx.q().pow(ell as u32), s).exact;
        run.eq(format!("{name} formula"), formula, BigUint::from(want));
        for route in [CensusRoute::Systematic, CensusRoute::Reference] {
            if let Some(codes) = run.fallible(&name, enumerate_free_codes(&ctx, ell, n, k, route)) {
                let distinct: BTreeSet<_> = codes.iter().map(|c| c.canonical.clone()).collect();
                run.eq(format!("{name} census {route:?}"), (codes.len() as u64, distinct.len() as u64), (want, want));
            }
        }
    }
}

fn criterion_2(budget: Budget, run: &mut Run) {
    let Some(z4) = run.fallible("Z4", ring(z(2, 2), budget)) else { return };
    for (n, r, oracle, paper) in [(2, 2, 4u64, 4u64), (2, 3, 12, 16)] {
        let name = format!("hamming Z4 n={n} r={r}");
        if let Some(o) = run.fallible(&name, ball_volume_oracle(MetricId::Hamming, &z4, n, r, BallDomain::Punctured)) {
            run.eq(format!("{name} oracle"), o, BigUint::from(oracle));
        }
        run.eq(format!("{name} paper"), hamming_volume_paper(&z4, n, r), BigUint::from(paper));
    }
    for spec in [z(2, 2), z(3, 2), gr42(1), gr42(2), RingSpec::new(2, 2, 2, 1, 1)] {
        let Some(ctx) = run.fallible(&ring_label(&spec), ring(spec, budget)) else { continue };
        for n in 1..=3 {
            for r in 1..=n + 2 {
                let name = format!("hamming {} n={n} r={r}", ring_label(&spec));
                let Some(o) = run.fallible(&name, ball_volume_oracle(MetricId::Hamming, &ctx, n, r, BallDomain::Punctured))
                else {
                    continue;
                };
                let corrected = hamming_volume_corrected(&ctx, n, r);
                run.check(format!("{name} corrected"), corrected == o, format!("corrected {corrected}, oracle {o}"));
                let paper = hamming_volume_paper(&ctx, n, r);
                if paper != o {
                    run.finding(
                        "volume-hamming-paper",
                        "printed Hamming punctured-ball volume differs from the exhaustive count",
                        format!("{name}: paper {paper}, oracle {o}"),
                    );
                }
            }
        }
    }
    for (spec, want_oracle, want_paper) in [(z(2, 2), 2u64, 3u64), (gr42(1), 12, 13)] {
        let name = format!("rank {} n=1 r=2", ring_label(&spec));
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        let oracle = run.fallible(&name, ball_volume_oracle(MetricId::Rank, &ctx, 1, 2, BallDomain::Punctured));
        let paper = run.fallible(&name, rank_volume_paper(&ctx, 1, 2));
        if let (Some(o), Some(p)) = (oracle, paper) {
            run.eq(format!("{name} oracle"), o.clone(), BigUint::from(want_oracle));
            run.eq(format!("{name} paper"), p.clone(), BigUint::from(want_paper));
            if p != o {
                run.finding(
                    "volume-rank-paper",
                    "printed rank punctured-ball volume differs from the exhaustive count",
                    format!("{name}: paper {p}, oracle {o}, delta {}", num_bigint::BigInt::from(p.clone()) - num_bigint::BigInt::from(o.clone())),
                );
            }
        }
    }
}

/// `(spec, metric, n, k, d)` points with exact densities.
fn density_corpus() -> Vec<(RingSpec, MetricId, usize, usize, usize)> {
    vec![
        (z(2, 1), MetricId::Hamming, 2, 1, 2),
        (z(2, 1), MetricId::Hamming, 3, 2, 2),
        (z(3, 1), MetricId::Hamming, 3, 2, 2),
        (z(2, 2), MetricId::Hamming, 2, 1, 2),
        (z(2, 2), MetricId::Hamming, 3, 1, 2),
        (z(2, 2), MetricId::Hamming, 3, 1, 3),
        (z(2, 2), MetricId::Hamming, 3, 2, 2),
        (z(3, 2), MetricId::Hamming, 2, 1, 2),
        (z(3, 2), MetricId::Hamming, 3, 2, 2),
        (z(5, 2), MetricId::Hamming, 3, 2, 2),
        (gr42(2), MetricId::Hamming, 2, 1, 2),
        (gr42(1), MetricId::Rank, 2, 1, 2),
        (gr42(1), MetricId::Hamming, 2, 2, 2),
    ]
}

fn point_name(spec: &RingSpec, metric: MetricId, n: usize, k: usize, d: usize) -> String {
    format!("{} {metric} n={n} k={k} d={d}", ring_label(spec))
}

fn criterion_3(budget: Budget, run: &mut Run) {
    let frozen = [
        (z(2, 2), 2, 1, ratio(1, 3), ratio(2, 3), ratio(2, 3)),
        (z(2, 1), 2, 1, ratio(1, 3), ratio(1, 3), ratio(1, 3)),
    ];
    for (spec, n, k, density, lower, upper) in frozen {
        let name = point_name(&spec, MetricId::Hamming, n, k, 2);
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        if let Some(e) = run.fallible(&name, exact_density(&ctx, MetricId::Hamming, n, k, 1, 2)) {
            run.eq(format!("{name} exact"), fmt_ratio(&e.density), fmt_ratio(&density));
        }
        if let Some(b) = run.fallible(&name, density_bounds(&ctx, MetricId::Hamming, n, k, 1, 2, VolumeSource::Oracle)) {
            run.eq(format!("{name} lower"), fmt_ratio(&b.lower), fmt_ratio(&lower));
            run.eq(format!("{name} upper"), fmt_ratio(&b.upper), fmt_ratio(&upper));
        }
    }
    for (spec, metric, n, k, d) in density_corpus() {
        let name = point_name(&spec, metric, n, k, d);
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        let ell = spec.ell;
        let Some(e) = run.fallible(&name, exact_density(&ctx, metric, n, k, ell, d)) else { continue };
        let Some(b) = run.fallible(&name, density_bounds(&ctx, metric, n, k, ell, d, VolumeSource::Oracle)) else {
            continue;
        };
        let in_sandwich = b.lower_clamped <= e.density && e.density <= b.upper;
        let detail = format!(
            "exact {}, lower {}, upper {}",
            fmt_ratio(&e.density),
            fmt_ratio(&b.lower),
            fmt_ratio(&b.upper)
        );
        if spec.s == 1 {
            run.check(format!("{name} field sandwich"), in_sandwich, detail.clone());
        }
        if e.density < b.lower {
            run.finding(
                "bounds-lower-violation",
                "exact density below the lower bound fed with the oracle volume",
                format!("{name}: {detail}"),
            );
        }
        if e.density > b.upper {
            run.finding(
                "bounds-upper-violation",
                "exact density above the upper bound fed with the oracle volume",
                format!("{name}: {detail}"),
            );
        }
    }
}

/// Independent recount of an audit: vertices as codeword sets of cyclic spans,
/// incidence as set inclusion, distances from explicit codewords.
pub struct AuditRecount {
    pub vertices: usize,
    pub degrees: BTreeMap<usize, usize>,
    pub pair_counts: BTreeMap<usize, usize>,
    pub nonisolated: usize,
    pub f_distance: usize,
}

pub fn audit_recount(ctx: &RingCtx, metric: MetricId, n: usize, k: usize, ell: usize, d: usize) -> Result<AuditRecount> {
    let sub = ctx.subring(ell)?;
    let scalars: Vec<_> = sub.ring().elements().map(|a| sub.embed(ctx.ring(), &a)).collect();
    let mut spans: BTreeSet<BTreeSet<RingVector>> = BTreeSet::new();
    for x in ctx.enumerate_vectors(n, Domain::Punctured)? {
        if weight(metric, ctx, &x) < d {
            spans.insert(scalars.iter().map(|a| x.iter().map(|e| ctx.mul(a, e)).collect()).collect());
        }
    }
    let spans: Vec<_> = spans.into_iter().collect();
    let codes = census_map(ctx, ell, n, k, CensusRoute::Reference, |code| -> Result<(Vec<bool>, bool)> {
        let words: BTreeSet<RingVector> = codewords(ctx, code)?.collect();
        let inc = spans.iter().map(|v| v.is_subset(&words)).collect();
        let bad = words.iter().any(|w| {
            let wt = weight(metric, ctx, w);
            wt > 0 && wt < d
        });
        Ok((inc, bad))
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut degrees = BTreeMap::new();
    let mut pair_counts = BTreeMap::new();
    for a in 0..spans.len() {
        for b in 0..spans.len() {
            let joint = codes.iter().filter(|(inc, _)| inc[a] && inc[b]).count();
            let target = if a == b { &mut degrees } else { &mut pair_counts };
            *target.entry(joint).or_insert(0) += 1;
        }
    }
    Ok(AuditRecount {
        vertices: spans.len(),
        degrees,
        pair_counts,
        nonisolated: codes.iter().filter(|(inc, _)| inc.iter().any(|&b| b)).count(),
        f_distance: codes.iter().filter(|(_, bad)| *bad).count(),
    })
}

pub fn audit_matches_recount(a: &AuditReport, r: &AuditRecount) -> bool {
    a.vertices == r.vertices
        && a.classes[0].joint_counts == r.degrees
        && a.classes[1].joint_counts == r.pair_counts
        && a.nonisolated == r.nonisolated
        && a.f_distance == r.f_distance
}

fn criterion_4(budget: Budget, run: &mut Run) {
    for spec in [z(2, 1), z(3, 1)] {
        let Some(ctx) = run.fallible(&ring_label(&spec), ring(spec, budget)) else { continue };
        for n in 1..=3 {
            for k in 1..=2.min(n) {
                let name = point_name(&spec, MetricId::Hamming, n, k, 2);
                let Some(a) = run.fallible(&name, graph_audit(&ctx, MetricId::Hamming, n, k, 1, 2)) else { continue };
                let ok = a.vertices_match && a.regular && a.w1_holds && a.w0_holds && a.nonisolated_equals_f;
                run.check(format!("{name} certified"), ok, format!("{a:?}"));
            }
        }
    }
    let s2 = [
        (z(2, 2), MetricId::Hamming, 2, 1, 1),
        (z(2, 2), MetricId::Hamming, 3, 1, 1),
        (z(2, 2), MetricId::Hamming, 3, 2, 1),
        (z(3, 2), MetricId::Hamming, 2, 1, 1),
        (gr42(1), MetricId::Rank, 2, 1, 1),
    ];
    for (spec, metric, n, k, ell) in s2 {
        let name = point_name(&spec, metric, n, k, 2);
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        let Some(a) = run.fallible(&name, graph_audit(&ctx, metric, n, k, ell, 2)) else { continue };
        let Some(r) = run.fallible(&name, audit_recount(&ctx, metric, n, k, ell, 2)) else { continue };
        run.check(format!("{name} recount"), audit_matches_recount(&a, &r), format!("{a:?}"));
        run.check(format!("{name} vertex count"), a.vertices_match, format!("{} vs {}", a.vertices, fmt_ratio(&a.vertices_expected)));
        run.check(format!("{name} non-isolated within F"), a.nonisolated_subset_f, a.witnesses.join("; "));
        if !a.regular || !a.w1_holds || !a.w0_holds {
            run.finding(
                "audit-not-regular",
                "bipartite graph is not alpha-regular with the claimed joint counts",
                format!("{name}: {}", serde_json::to_string(&a.classes).unwrap_or_default()),
            );
        }
        if !a.nonisolated_equals_f {
            for w in &a.witnesses {
                run.finding(
                    "audit-nonisolated-not-f",
                    "codes of distance below d that contain no ball-generated vertex",
                    format!("{name}: {w}"),
                );
            }
        }
    }
}

fn criterion_5(run: &mut Run) {
    for m in 1usize..=4 {
        for n in 1usize..=4 {
            for ell in (1..=m).filter(|l| m % l == 0) {
                for d in 2..=n {
                    let name = format!("rank m={m} n={n} ell={ell} d={d}");
                    let k = m.max(n) * (m.min(n) + 1).saturating_sub(d) / ell;
                    let table = classify_rank_q(m, n, ell, d).ok().map(|v| (v.kind, v.bound));
                    let expo = classify_q_limit(MetricId::Rank, n, k, ell, d, 1, m).ok().map(|v| (v.kind, v.bound));
                    let theory = theta_table(m, n, ell, d);
                    run.check(
                        name,
                        table == theory && expo == theory,
                        format!("table {table:?}, exponents {expo:?}, theorem {theory:?}"),
                    );
                }
            }
        }
    }
    let half = Some(ratio(1, 2));
    for (m, n, ell, d) in [(2, 2, 1, 2), (2, 3, 1, 2)] {
        let v = classify_rank_q(m, n, ell, d).map(|v| (v.kind, v.bound));
        run.eq(format!("rank tie m={m} n={n} ell={ell} d={d}"), v.ok(), Some((VerdictKind::LimsupAtMost, half.clone())));
    }
    let v = classify_q_limit(MetricId::Rank, 2, 2, 1, 2, 1, 2).map(|v| (v.kind, v.bound));
    run.eq("rank q-limit m=n=2 ell=1 d=2", v.ok(), Some((VerdictKind::LimsupAtMost, half)));
    for (m, ell, n, d) in [(1, 1, 3, 2), (1, 1, 5, 3), (2, 1, 3, 2), (2, 2, 4, 3)] {
        let k = m / ell * (n - d + 1);
        let v = classify_q_limit(MetricId::Hamming, n, k, ell, d, 2, m).map(|v| v.kind);
        run.eq(format!("hamming MDR q-limit m={m} ell={ell} n={n} d={d}"), v.ok(), Some(VerdictKind::LimitOne));
        let v = classify_n_limit(MetricId::Hamming, 4, 2, m, ell, d, NLimitRule::HammingMdr).map(|v| v.kind);
        run.eq(format!("hamming MDR n-limit m={m} ell={ell} d={d}"), v.ok(), Some(VerdictKind::LimitZero));
    }
    let v = classify_n_limit(MetricId::Rank, 2, 1, 2, 1, 2, NLimitRule::RankMax).map(|v| v.bound);
    run.eq("rank-max q=2 s=1 m=2 ell=1 d=2", v.ok().flatten().map(|b| fmt_ratio(&b)), Some("4/7".to_string()));
}

/// The trichotomy as stated, evaluated directly.
fn theta_table(m: usize, n: usize, ell: usize, d: usize) -> Option<(VerdictKind, Option<BigRational>)> {
    if d < 2 || d > m.min(n) || m % ell != 0 {
        return None;
    }
    let theta = ((d - 1) * (m.min(n) - d + 1)) as i64;
    let (ell_i, x) = (ell as i64, (n * (d - 1)) as i64);
    let lhs = if m >= n { theta } else { theta - (ell_i * ((x + ell_i - 1) / ell_i) - x) };
    let l = ell_i;
    Some(if lhs < l {
        (VerdictKind::LimitOne, None)
    } else if lhs > l {
        (VerdictKind::LimitZero, None)
    } else {
        (VerdictKind::LimsupAtMost, Some(ratio(1, 2)))
    })
}

fn monotone_to_one(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs())
}

fn estimate_ratio(ctx: &RingCtx, metric: MetricId, n: usize, r: usize, limit: EstimateLimit) -> Result<f64> {
    let est = volume_estimates(metric, ctx, n, r, limit)?;
    let oracle = ball_volume_oracle(metric, ctx, n, r, BallDomain::Punctured)?;
    Ok(big_to_f64(&oracle) / big_to_f64(&est.exact))
}

fn criterion_6(budget: Budget, run: &mut Run) {
    for (n, k, s) in [(2u64, 1u64, 1u32), (3, 1, 2), (4, 2, 1)] {
        let exact = count_free_modules(n as i64, k as i64, 16, s).exact;
        let est = BigUint::from(16u32).pow(count_estimate_q(n, k, s) as u32);
        let r = ratio_to_f64(&BigRational::new(exact.into(), est.into()));
        run.check(format!("count estimate q=16 n={n} k={k} s={s}"), (r - 1.0).abs() <= 0.15, format!("ratio {r:.6}"));
    }
    let sweeps: Vec<(&str, Vec<(RingSpec, usize, usize)>, MetricId, EstimateLimit)> = vec![
        (
            "hamming q-sweep Z_{p^2} n=2 r=2",
            [2u64, 3, 5, 7, 11].iter().map(|&p| (z(p, 2), 2, 2)).collect(),
            MetricId::Hamming,
            EstimateLimit::Q,
        ),
        (
            "rank q-sweep GF(p^2) n=1 r=2",
            [2u64, 3, 5, 7].iter().map(|&p| (RingSpec::new(p, 1, 1, 2, 1), 1, 2)).collect(),
            MetricId::Rank,
            EstimateLimit::Q,
        ),
        ("rank n-sweep Z4 r=2", (1..=8).map(|n| (z(2, 2), n, 2)).collect(), MetricId::Rank, EstimateLimit::N),
    ];
    for (name, points, metric, limit) in sweeps {
        let mut ratios = Vec::new();
        for (spec, n, r) in points {
            let Some(ctx) = run.fallible(name, ring(spec, budget)) else { continue };
            if let Some(x) = run.fallible(name, estimate_ratio(&ctx, metric, n, r, limit)) {
                ratios.push(x);
            }
        }
        let last = ratios.last().copied().unwrap_or(f64::NAN);
        run.check(format!("{name} within 20%"), (last - 1.0).abs() <= 0.2, format!("ratios {ratios:?}"));
        run.check(format!("{name} monotone"), monotone_to_one(&ratios), format!("ratios {ratios:?}"));
    }
    if let Some(ctx) = run.fallible("Z121", ring(z(11, 2), budget)) {
        if let Some(x) = run.fallible("Z121", estimate_ratio(&ctx, MetricId::Hamming, 3, 3, EstimateLimit::Q)) {
            if (x - 1.0).abs() > 0.2 {
                run.finding(
                    "estimate-hamming-q-coefficient",
                    "printed Hamming q-estimate carries an extra factor d-1 in its leading coefficient",
                    format!("Z121 n=3 r=3: oracle/estimate = {x:.6}"),
                );
            }
        }
    }
    if let Some(ctx) = run.fallible("Z4", ring(z(2, 2), budget)) {
        let ratios: Vec<f64> = (1..=6)
            .filter_map(|n| estimate_ratio(&ctx, MetricId::Hamming, n, 2, EstimateLimit::N).ok())
            .collect();
        if ratios.last().is_some_and(|x| (x - 1.0).abs() > 0.2) {
            run.finding(
                "estimate-hamming-n-ratio",
                "printed Hamming n-estimate does not approach the exhaustive volume",
                format!("Z4 r=2 n=1..6: oracle/estimate = {ratios:?}"),
            );
        }
    }
}

fn criterion_7(budget: Budget, run: &mut Run) {
    let Some(z4) = run.fallible("Z4", ring(z(2, 2), budget)) else { return };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut freq: BTreeMap<_, usize> = BTreeMap::new();
    let samples = 60_000;
    for _ in 0..samples {
        match sample_free_code(&z4, 1, 2, 1, &mut rng) {
            Ok(s) => *freq.entry(s.code.canonical).or_default() += 1,
            Err(e) => {
                run.check("sampling", false, e.to_string());
                return;
            }
        }
    }
    run.eq("Z4 n=2 k=1 distinct sampled modules", freq.len(), 6);
    for (form, c) in &freq {
        let f = *c as f64 / samples as f64;
        run.check(
            format!("frequency of {}", fmt_span(&form.rows)),
            (f - 1.0 / 6.0).abs() <= 0.02,
            format!("{f:.4}"),
        );
    }
    for (i, (spec, metric, n, k, d)) in density_corpus().into_iter().enumerate() {
        let name = point_name(&spec, metric, n, k, d);
        let Some(ctx) = run.fallible(&name, ring(spec, budget)) else { continue };
        let Some(e) = run.fallible(&name, exact_density(&ctx, metric, n, k, spec.ell, d)) else { continue };
        let seed = 7 + i as u64;
        let Some(mc) = run.fallible(&name, mc_density(&ctx, metric, n, k, spec.ell, d, 3000, seed)) else { continue };
        let exact = ratio_to_f64(&e.density);
        let ok = (mc.mc_mean - exact).abs() <= 3.0 * mc.mc_stderr || (mc.mc_stderr == 0.0 && mc.mc_mean == exact);
        run.check(
            format!("{name} mc"),
            ok,
            format!("mc {:.5} +- {:.5}, exact {exact:.5}", mc.mc_mean, mc.mc_stderr),
        );
        if i == 3 {
            let again = mc_density(&ctx, metric, n, k, spec.ell, d, 3000, seed);
            run.check(
                format!("{name} replay"),
                again.as_ref().is_ok_and(|a| a.mc_mean.to_bits() == mc.mc_mean.to_bits()),
                format!("{again:?}"),
            );
        }
    }
}

/// Frozen exact densities for Hamming `n=3, k=2, d=2` over `Z_{p^2}`.
pub const TREND_DENSITIES: &[(u64, i64, i64)] = &[(2, 1, 7), (3, 4, 13), (5, 16, 31)];

fn criterion_8(budget: Budget, run: &mut Run) {
    let mut prev = BigRational::zero();
    let mut rings = Vec::new();
    for &(p, num, den) in TREND_DENSITIES {
        let name = format!("Z{} hamming n=3 k=2 d=2", p * p);
        let Some(ctx) = run.fallible(&name, ring(z(p, 2), budget)) else { return };
        if let Some(e) = run.fallible(&name, exact_density(&ctx, MetricId::Hamming, 3, 2, 1, 2)) {
            run.eq(format!("{name} exact"), fmt_ratio(&e.density), fmt_ratio(&ratio(num, den)));
            run.check(format!("{name} increasing"), e.density > prev, fmt_ratio(&e.density));
            prev = e.density;
        }
        rings.push(ctx);
    }
    let pts: Vec<(u64, &RingCtx, usize)> = rings.iter().map(|c| (c.q(), c, 2)).collect();
    if let Some(probe) = run.fallible("probe", gv_condition_probe(&pts, MetricId::Hamming, 2)) {
        let ratios: Vec<String> = probe.rows.iter().map(|r| fmt_ratio(&r.ratio)).collect();
        run.check("gv condition ratios decrease", probe.strictly_decreasing, ratios.join(", "));
    }
    debug_assert!(prev <= BigRational::one());
}

type CriterionFn = fn(Budget, &mut Run);

/// Runs criteria 1 to 8 and compares the raised findings with `manifest`.
pub fn run_micro_suite(budget: Budget, manifest: &BTreeSet<String>) -> SuiteReport {
    let table: [(u8, &str, CriterionFn); 8] = [
        (1, "module census", criterion_1),
        (2, "ball volumes", criterion_2),
        (3, "density ground truth", criterion_3),
        (4, "graph audit", criterion_4),
        (5, "classifier tables", |_, run| criterion_5(run)),
        (6, "asymptotic estimates", criterion_6),
        (7, "sampling statistics", criterion_7),
        (8, "density trend", criterion_8),
    ];
    let mut criteria = Vec::new();
    let mut findings: BTreeMap<String, Finding> = BTreeMap::new();
    for (id, name, f) in table {
        let start = Instant::now();
        let mut run = Run::default();
        f(budget, &mut run);
        for (fid, finding) in run.findings {
            findings
                .entry(fid)
                .and_modify(|e| e.witnesses.extend(finding.witnesses.clone()))
                .or_insert(finding);
        }
        criteria.push(CriterionResult {
            id,
            name: name.to_string(),
            passed: run.checks.iter().all(|c| c.passed),
            seconds: start.elapsed().as_secs_f64(),
            checks: run.checks,
        });
    }
    let raised: BTreeSet<String> = findings.keys().cloned().collect();
    let unexpected: Vec<String> = raised.difference(manifest).cloned().collect();
    let missing: Vec<String> = manifest.difference(&raised).cloned().collect();
    let passed = criteria.iter().all(|c| c.passed) && unexpected.is_empty() && missing.is_empty();
    SuiteReport {
        suite: "micro".into(),
        criteria,
        findings: findings.into_values().collect(),
        unexpected_findings: unexpected,
        missing_findings: missing,
        passed,
    }
}
