//! Bipartite graph between ball-generated cyclic modules and free codes.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use crate::codes::{census_map, has_min_distance_at_least, CensusRoute};
use crate::counting::count_free_modules;
use crate::error::Result;
use crate::linalg::{howell_form, sbar_expand, sbar_matrix, span_membership, HowellForm};
use crate::metrics::{ball_volume_oracle, weight, BallDomain, MetricId};
use crate::report::{fmt_span, fmt_vector, serialize_big, serialize_ratio};
use crate::ring::{Domain, RingCtx, RingVector};

/// Ordered vertex pairs `(V, V')` with association value `alpha`:
/// 1 for `V = V'`, 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaClass {
    pub alpha: u8,
    pub size: usize,
    /// Number of codes containing both members of a pair, with multiplicity.
    pub joint_counts: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub metric: MetricId,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub d: usize,
    #[serde(rename = "V")]
    pub vertices: usize,
    /// Punctured volume over `q^{ℓ(s-1)}(q^ℓ-1)`.
    #[serde(serialize_with = "serialize_ratio")]
    pub vertices_expected: BigRational,
    pub vertices_match: bool,
    pub codes: usize,
    pub classes: Vec<AlphaClass>,
    pub regular: bool,
    #[serde(serialize_with = "serialize_big")]
    pub w1_expected: BigUint,
    pub w1_holds: bool,
    #[serde(serialize_with = "serialize_big")]
    pub w0_expected: BigUint,
    pub w0_holds: bool,
    pub nonisolated: usize,
    /// Codes with `D(C) <= d - 1`.
    #[serde(rename = "F_distance")]
    pub f_distance: usize,
    pub nonisolated_subset_f: bool,
    pub nonisolated_equals_f: bool,
    pub witnesses: Vec<String>,
}

struct CodeRow {
    generators: Vec<RingVector>,
    incident: Vec<bool>,
    in_f: bool,
}

/// Builds the graph exhaustively: vertices are the cyclic `S̄`-modules spanned
/// by unimodular vectors of weight `< d`, codes are all free rank-`k` codes,
/// edges are inclusions.
pub fn graph_audit(ctx: &RingCtx, metric: MetricId, n: usize, k: usize, ell: usize, d: usize) -> Result<AuditReport> {
    let sub = ctx.subring(ell)?;
    let sbar = sub.ring().clone();
    let width = n * sub.rank_of_s();

    let mut vertices: BTreeMap<HowellForm, RingVector> = BTreeMap::new();
    for x in ctx.enumerate_vectors(n, Domain::Punctured)? {
        if weight(metric, ctx, &x) < d {
            let form = howell_form(&sbar_matrix(ctx, ell, std::slice::from_ref(&x))?);
            vertices.entry(form).or_insert(x);
        }
    }
    let reps: Vec<RingVector> = vertices.into_values().collect();
    let expanded = reps.iter().map(|x| sbar_expand(ctx, x, ell)).collect::<Result<Vec<_>>>()?;

    let v = ball_volume_oracle(metric, ctx, n, d, BallDomain::Punctured)?;
    let big_q = BigUint::from(ctx.q()).pow(ell as u32);
    let u = big_q.pow(ctx.spec().s - 1) * (&big_q - 1u32);
    let vertices_expected = BigRational::new(BigInt::from(v), BigInt::from(u));
    let vertices_match = vertices_expected == BigRational::from_integer(reps.len().into());

    let rows = census_map(ctx, ell, n, k, CensusRoute::Systematic, |code| -> Result<CodeRow> {
        Ok(CodeRow {
            generators: code.generators.clone(),
            incident: expanded.iter().map(|x| span_membership(&code.canonical, x, &sbar)).collect(),
            in_f: !has_min_distance_at_least(ctx, code, metric, d)?,
        })
    })?
    .into_iter()
    .collect::<Result<Vec<CodeRow>>>()?;

    let mut witnesses = Vec::new();
    let nv = reps.len();
    let mut classes = vec![
        AlphaClass { alpha: 1, size: 0, joint_counts: BTreeMap::new() },
        AlphaClass { alpha: 0, size: 0, joint_counts: BTreeMap::new() },
    ];
    let mut first_pair: [BTreeMap<usize, (usize, usize)>; 2] = Default::default();
    for a in 0..nv {
        for b in 0..nv {
            let joint = rows.iter().filter(|r| r.incident[a] && r.incident[b]).count();
            let c = usize::from(a != b);
            classes[c].size += 1;
            *classes[c].joint_counts.entry(joint).or_default() += 1;
            first_pair[c].entry(joint).or_insert((a, b));
        }
    }
    let regular = classes.iter().all(|c| c.joint_counts.len() <= 1);
    if !regular {
        for (c, firsts) in first_pair.iter().enumerate() {
            if firsts.len() > 1 {
                for (joint, &(a, b)) in firsts {
                    witnesses.push(format!(
                        "alpha={}: {} codes contain <{}> and <{}>",
                        classes[c].alpha,
                        joint,
                        fmt_vector(&reps[a]),
                        fmt_vector(&reps[b])
                    ));
                }
            }
        }
    }

    let s = ctx.spec().s;
    let (w, kk) = (width as i64, k as i64);
    let w1_expected = count_free_modules(w - 1, kk - 1, big_q_u64(ctx, ell), s).exact;
    let w0_expected = count_free_modules(w - 2, kk - 2, big_q_u64(ctx, ell), s).exact;
    let holds = |class: &AlphaClass, e: &BigUint| class.joint_counts.keys().all(|&j| BigUint::from(j) == *e);
    let w1_holds = holds(&classes[0], &w1_expected);
    let w0_holds = holds(&classes[1], &w0_expected);

    let mut nonisolated = 0;
    let mut f_distance = 0;
    let mut subset = true;
    let mut equal = true;
    for r in &rows {
        let linked = r.incident.iter().any(|&b| b);
        nonisolated += usize::from(linked);
        f_distance += usize::from(r.in_f);
        if linked && !r.in_f {
            subset = false;
            equal = false;
            witnesses.push(format!("non-isolated but D(C) >= d: {}", fmt_span(&r.generators)));
        } else if !linked && r.in_f {
            equal = false;
            witnesses.push(format!("isolated but D(C) <= d-1: {}", fmt_span(&r.generators)));
        }
    }

    Ok(AuditReport {
        metric,
        n,
        k,
        ell,
        d,
        vertices: nv,
        vertices_expected,
        vertices_match,
        codes: rows.len(),
        classes,
        regular,
        w1_expected,
        w1_holds,
        w0_expected,
        w0_holds,
        nonisolated,
        f_distance,
        nonisolated_subset_f: subset,
        nonisolated_equals_f: equal,
        witnesses,
    })
}

fn big_q_u64(ctx: &RingCtx, ell: usize) -> u64 {
    ctx.q().pow(ell as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};

    #[test]
    fn field_example_is_regular() {
        let f2 = build_ring(RingSpec::integers(2, 1)).unwrap();
        let a = graph_audit(&f2, MetricId::Hamming, 2, 1, 1, 2).unwrap();
        assert_eq!((a.vertices, a.codes), (2, 3));
        assert!(a.vertices_match && a.regular && a.w1_holds && a.w0_holds);
        assert_eq!((a.nonisolated, a.f_distance), (2, 2));
        assert!(a.nonisolated_equals_f);
        assert!(a.witnesses.is_empty());
    }

    #[test]
    fn z4_example_reports_mismatch() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let a = graph_audit(&z4, MetricId::Hamming, 2, 1, 1, 2).unwrap();
        assert_eq!(a.vertices, 2);
        assert!(a.vertices_match);
        assert_eq!((a.nonisolated, a.f_distance), (2, 4));
        assert!(a.nonisolated_subset_f);
        assert!(!a.nonisolated_equals_f);
        assert!(a.witnesses.iter().any(|w| w.contains("<(1,2)>")), "{:?}", a.witnesses);
        let j = serde_json::to_value(&a).unwrap();
        assert_eq!(j["V"], 2);
        assert_eq!(j["F_distance"], 4);
        assert_eq!(j["classes"][0]["joint_counts"]["1"], 2);
    }

    #[test]
    fn ambient_code_is_trivially_regular() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let a = graph_audit(&z4, MetricId::Hamming, 2, 2, 1, 2).unwrap();
        assert_eq!(a.codes, 1);
        assert!(a.regular);
        assert_eq!(a.nonisolated, 1);
        assert_eq!(a.classes[0].joint_counts, BTreeMap::from([(1, 2)]));
        assert_eq!(a.classes[1].joint_counts, BTreeMap::from([(1, 2)]));
    }
}
