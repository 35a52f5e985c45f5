//! Free `S̄`-linear codes in `S^n`.

mod census;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{howell_form, is_free_span, sbar_matrix, HowellForm};
use crate::metrics::{weight, MetricId};
use crate::ring::{Elem, RingCtx, RingSpec, RingVector};

pub use census::{
    census_map, enumerate_free_codes, free_generators_in, sample_free_code, CensusRoute, SampleOutcome,
};

/// A free `S̄`-submodule of `S^n` of rank `k`, with `S̄` the degree-`ell` subring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeCode {
    pub spec: RingSpec,
    pub ell: usize,
    pub n: usize,
    pub k: usize,
    /// `k` vectors of `S^n`.
    pub generators: Vec<RingVector>,
    /// Howell form of the generators expanded over `S̄`.
    pub canonical: HowellForm,
}

/// Builds the code spanned by `gens`, which must be a free basis.
pub fn make_code(ctx: &RingCtx, ell: usize, gens: &[RingVector]) -> Result<FreeCode> {
    let Some(first) = gens.first() else {
        return Err(Error::Dimension("a code needs at least one generator".into()));
    };
    let n = first.len();
    if gens.iter().any(|g| g.len() != n) {
        return Err(Error::Dimension("generators of different lengths".into()));
    }
    let mat = sbar_matrix(ctx, ell, gens)?;
    let (free, rank) = is_free_span(&mat);
    if !free {
        return Err(Error::NotFree);
    }
    if rank != gens.len() {
        return Err(Error::RankMismatch { rank, expected: gens.len() });
    }
    Ok(FreeCode {
        spec: *ctx.spec(),
        ell,
        n,
        k: gens.len(),
        generators: gens.to_vec(),
        canonical: howell_form(&mat),
    })
}

/// The zero code of length `n`.
pub fn zero_code(ctx: &RingCtx, ell: usize, n: usize) -> Result<FreeCode> {
    let sub = ctx.subring(ell)?;
    Ok(FreeCode {
        spec: *ctx.spec(),
        ell,
        n,
        k: 0,
        generators: Vec::new(),
        canonical: howell_form(&crate::linalg::RingMatrix::zeros(sub.ring().clone(), 0, n * sub.rank_of_s())),
    })
}

impl FreeCode {
    /// `|C| = |S̄|^k`.
    pub fn size(&self, ctx: &RingCtx) -> Result<u128> {
        let sub = ctx.subring(self.ell)?.ring().cardinality();
        sub.checked_pow(self.k as u32)
            .ok_or_else(|| Error::BudgetExceeded { requested: u128::MAX, budget: ctx.budget().codewords })
    }
}

/// All codewords. Walks `Z_{p^s}`-coordinates against the additive generators
/// `b_t · g_i`, so each step costs one vector addition.
pub struct Codewords<'a> {
    ctx: &'a RingCtx,
    steps: Vec<RingVector>,
    digits: Vec<u32>,
    modulus: u32,
    current: Option<RingVector>,
}

impl Iterator for Codewords<'_> {
    type Item = RingVector;

    fn next(&mut self) -> Option<RingVector> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut done = true;
        for (digit, step) in self.digits.iter_mut().zip(&self.steps) {
            for (c, s) in cur.iter_mut().zip(step) {
                *c = self.ctx.add(c, s);
            }
            *digit += 1;
            if *digit < self.modulus {
                done = false;
                break;
            }
            *digit = 0;
        }
        if done {
            self.current = None;
        }
        Some(out)
    }
}

pub fn codewords<'a>(ctx: &'a RingCtx, code: &FreeCode) -> Result<Codewords<'a>> {
    let size = code.size(ctx)?;
    ctx.budget().check(size, ctx.budget().codewords)?;
    let sub = ctx.subring(code.ell)?;
    let ring = ctx.ring();
    let degree = sub.ring().degree();
    let basis: Vec<Elem> = (0..degree)
        .map(|t| {
            let mut coeffs = vec![0u64; degree];
            coeffs[t] = 1;
            sub.embed(ring, &sub.ring().from_coeffs(&coeffs))
        })
        .collect();
    let steps: Vec<RingVector> = code
        .generators
        .iter()
        .flat_map(|g| basis.iter().map(move |b| g.iter().map(|x| ring.mul(b, x)).collect::<RingVector>()))
        .collect();
    Ok(Codewords {
        ctx,
        digits: vec![0; steps.len()],
        steps,
        modulus: ring.pk() as u32,
        current: Some(vec![ring.zero(); code.n]),
    })
}

/// Minimum weight of a nonzero codeword, which equals the minimum pairwise
/// distance because both metrics are translation invariant.
pub fn min_distance(ctx: &RingCtx, code: &FreeCode, metric: MetricId) -> Result<usize> {
    if code.k == 0 {
        return Err(Error::EmptyCode);
    }
    let mut best = usize::MAX;
    for c in codewords(ctx, code)?.skip(1) {
        best = best.min(weight(metric, ctx, &c));
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

/// `D(C) >= d`, stopping at the first light codeword. The zero code passes.
pub fn has_min_distance_at_least(ctx: &RingCtx, code: &FreeCode, metric: MetricId, d: usize) -> Result<bool> {
    if d <= 1 || code.k == 0 {
        return Ok(true);
    }
    for c in codewords(ctx, code)?.skip(1) {
        if weight(metric, ctx, &c) < d {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingletonReport {
    pub metric: MetricId,
    pub d: usize,
    /// Right-hand side of the bound on the left-hand quantity `achieved`.
    pub bound_rhs: i64,
    /// `k` (Hamming) or `ℓ·k` (rank).
    pub achieved: i64,
    pub defect: i64,
    pub is_extremal: bool,
}

/// Hamming: `k <= (m/ℓ)(n - d + 1)` (MDR when equal).
/// Rank: `ℓk <= max(m,n)(min(m,n) - d + 1)` (MRDR when equal).
pub fn singleton_check(ctx: &RingCtx, code: &FreeCode, metric: MetricId) -> Result<SingletonReport> {
    let d = min_distance(ctx, code, metric)?;
    Ok(singleton_for(ctx.spec().m, code.ell, code.n, code.k, d, metric))
}

pub fn singleton_for(m: usize, ell: usize, n: usize, k: usize, d: usize, metric: MetricId) -> SingletonReport {
    let (m, ell, n, k, di) = (m as i64, ell as i64, n as i64, k as i64, d as i64);
    let (bound_rhs, achieved) = match metric {
        MetricId::Hamming => ((m / ell) * (n - di + 1), k),
        MetricId::Rank => (m.max(n) * (m.min(n) - di + 1), ell * k),
    };
    SingletonReport { metric, d, bound_rhs, achieved, defect: bound_rhs - achieved, is_extremal: bound_rhs == achieved }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, Domain};
    use std::collections::BTreeSet;

    fn z4() -> RingCtx {
        build_ring(RingSpec::integers(2, 2)).unwrap()
    }

    fn v(ctx: &RingCtx, xs: &[i64]) -> RingVector {
        xs.iter().map(|&x| ctx.ring().from_int(x)).collect()
    }

    #[test]
    fn construction() {
        let ctx = z4();
        let c = make_code(&ctx, 1, &[v(&ctx, &[1, 2])]).unwrap();
        assert_eq!(c.k, 1);
        assert_eq!(make_code(&ctx, 1, &[v(&ctx, &[2, 0])]), Err(Error::NotFree));
        assert_eq!(
            make_code(&ctx, 1, &[v(&ctx, &[1, 0]), v(&ctx, &[3, 0])]),
            Err(Error::RankMismatch { rank: 1, expected: 2 })
        );
        let full = make_code(&ctx, 1, &[v(&ctx, &[1, 0]), v(&ctx, &[0, 1])]).unwrap();
        assert_eq!(full.k, 2);

        let gr = build_ring(RingSpec::new(2, 2, 1, 2, 2)).unwrap();
        let s = gr.ring();
        let full = make_code(&gr, 2, &[vec![s.one(), s.zero()], vec![s.zero(), s.one()]]).unwrap();
        assert_eq!(full.k, 2);
        assert_eq!(min_distance(&gr, &full, MetricId::Hamming).unwrap(), 1);
    }

    #[test]
    fn codeword_sets() {
        let ctx = z4();
        let c = make_code(&ctx, 1, &[v(&ctx, &[1, 1])]).unwrap();
        let words: BTreeSet<RingVector> = codewords(&ctx, &c).unwrap().collect();
        let expect: BTreeSet<RingVector> = (0..4).map(|a| v(&ctx, &[a, a])).collect();
        assert_eq!(words, expect);

        let zero = zero_code(&ctx, 1, 2).unwrap();
        assert_eq!(codewords(&ctx, &zero).unwrap().collect::<Vec<_>>(), vec![v(&ctx, &[0, 0])]);
        assert_eq!(min_distance(&ctx, &zero, MetricId::Hamming), Err(Error::EmptyCode));
    }

    /// Codewords are distinct, the right number, and closed under `+` and `S̄`-scaling.
    #[test]
    fn codewords_form_the_module() {
        let ctx = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        let sbar = ctx.subring_elements(1).unwrap();
        let s = ctx.ring();
        let gens = vec![vec![s.one(), s.elem_at(7)], vec![s.zero(), s.elem_at(5)]];
        let code = make_code(&ctx, 1, &gens).unwrap();
        let words: Vec<RingVector> = codewords(&ctx, &code).unwrap().collect();
        let set: BTreeSet<RingVector> = words.iter().cloned().collect();
        assert_eq!(words.len(), 16);
        assert_eq!(set.len(), 16);
        for a in &words {
            for b in &words {
                let sum: RingVector = a.iter().zip(b).map(|(x, y)| ctx.add(x, y)).collect();
                assert!(set.contains(&sum));
            }
            for c in &sbar {
                let sc: RingVector = a.iter().map(|x| ctx.mul(c, x)).collect();
                assert!(set.contains(&sc));
            }
        }
    }

    #[test]
    fn distance_examples() {
        let ctx = z4();
        let c11 = make_code(&ctx, 1, &[v(&ctx, &[1, 1])]).unwrap();
        let c12 = make_code(&ctx, 1, &[v(&ctx, &[1, 2])]).unwrap();
        assert_eq!(min_distance(&ctx, &c11, MetricId::Hamming).unwrap(), 2);
        assert_eq!(min_distance(&ctx, &c12, MetricId::Hamming).unwrap(), 1);
        assert_eq!(min_distance(&ctx, &c11, MetricId::Rank).unwrap(), 1);
        assert!(has_min_distance_at_least(&ctx, &c11, MetricId::Hamming, 2).unwrap());
        assert!(!has_min_distance_at_least(&ctx, &c12, MetricId::Hamming, 2).unwrap());
        let full = make_code(&ctx, 1, &[v(&ctx, &[1, 0]), v(&ctx, &[0, 1])]).unwrap();
        assert_eq!(min_distance(&ctx, &full, MetricId::Hamming).unwrap(), 1);
    }

    #[test]
    fn min_distance_matches_pairwise_definition() {
        for spec in [RingSpec::integers(2, 2), RingSpec::integers(3, 2), RingSpec::new(2, 2, 1, 2, 1)] {
            let ctx = build_ring(spec).unwrap();
            let n = if spec.m == 2 { 2 } else { 3 };
            for k in 1..=2.min(n) {
                let codes = enumerate_free_codes(&ctx, 1, n, k, CensusRoute::Systematic).unwrap();
                for code in codes.iter().step_by(7) {
                    let words: Vec<RingVector> = codewords(&ctx, code).unwrap().collect();
                    for metric in [MetricId::Hamming, MetricId::Rank] {
                        let mut pairwise = usize::MAX;
                        for (i, a) in words.iter().enumerate() {
                            for b in &words[i + 1..] {
                                pairwise = pairwise.min(crate::metrics::distance(metric, &ctx, a, b));
                            }
                        }
                        assert_eq!(min_distance(&ctx, code, metric).unwrap(), pairwise);
                    }
                }
            }
        }
    }

    #[test]
    fn singleton_examples() {
        let ctx = z4();
        let full = make_code(&ctx, 1, &[v(&ctx, &[1, 0]), v(&ctx, &[0, 1])]).unwrap();
        let r = singleton_check(&ctx, &full, MetricId::Hamming).unwrap();
        assert!(r.is_extremal && r.defect == 0);
        let c11 = make_code(&ctx, 1, &[v(&ctx, &[1, 1])]).unwrap();
        assert!(singleton_check(&ctx, &c11, MetricId::Hamming).unwrap().is_extremal);
        let c12 = make_code(&ctx, 1, &[v(&ctx, &[1, 2])]).unwrap();
        let r = singleton_check(&ctx, &c12, MetricId::Hamming).unwrap();
        assert_eq!((r.bound_rhs, r.achieved, r.defect, r.is_extremal), (2, 1, 1, false));
    }

    #[test]
    fn no_corpus_code_beats_singleton() {
        for spec in [RingSpec::integers(2, 2), RingSpec::integers(2, 1), RingSpec::new(2, 2, 1, 2, 1), RingSpec::new(2, 2, 1, 2, 2)] {
            let ctx = build_ring(spec).unwrap();
            for ell in [1, spec.m] {
                let n = if spec.m == 2 { 2 } else { 3 };
                let cap = n * spec.m / ell;
                for k in 1..=cap.min(2) {
                    for code in enumerate_free_codes(&ctx, ell, n, k, CensusRoute::Systematic).unwrap() {
                        for metric in [MetricId::Hamming, MetricId::Rank] {
                            assert!(singleton_check(&ctx, &code, metric).unwrap().defect >= 0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unit_rescaling_keeps_canonical_form() {
        let ctx = build_ring(RingSpec::integers(3, 2)).unwrap();
        let units: Vec<Elem> = ctx.subring_elements(1).unwrap().into_iter().filter(|u| ctx.is_unit(u)).collect();
        for g in ctx.enumerate_vectors(2, Domain::Punctured).unwrap().step_by(5) {
            let base = make_code(&ctx, 1, &[g.clone()]).unwrap();
            for u in &units {
                let ug: RingVector = g.iter().map(|x| ctx.mul(u, x)).collect();
                assert_eq!(make_code(&ctx, 1, &[ug]).unwrap().canonical, base.canonical);
            }
        }
    }

    #[test]
    fn json_shape() {
        let ctx = z4();
        let c = make_code(&ctx, 1, &[v(&ctx, &[1, 2])]).unwrap();
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["k"], 1);
        assert_eq!(j["ell"], 1);
        assert_eq!(j["generators"], serde_json::json!([[[1], [2]]]));
        assert!(j["canonical"]["rows"].is_array());
    }
}
