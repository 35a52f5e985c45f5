//! Hamming and rank weights on `S^n`, distances, and an audit of the metric axioms.

mod volume;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_generators, r_expand};
use crate::ring::{vector_at, Elem, RingCtx, RingVector};

pub use volume::{
    ball_volume_oracle, gamma_multiples_volume, hamming_volume_corrected, hamming_volume_paper, rank_volume_paper, volume_estimates,
    volume_report, BallDomain, EstimateLimit, VolumeEstimate, VolumeMethod, VolumeReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    Hamming,
    Rank,
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricId::Hamming => "hamming",
            MetricId::Rank => "rank",
        })
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(MetricId::Hamming),
            "rank" => Ok(MetricId::Rank),
            other => Err(Error::InvalidSpec(format!("unknown metric '{other}'"))),
        }
    }
}

pub fn hamming_weight(v: &[Elem]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

/// Minimal number of generators of the `R`-module spanned by the entries of `v`.
pub fn rank_weight(ctx: &RingCtx, v: &[Elem]) -> usize {
    if v.iter().all(Elem::is_zero) {
        return 0;
    }
    min_generators(&r_expand(ctx, v))
}

pub fn weight(metric: MetricId, ctx: &RingCtx, v: &[Elem]) -> usize {
    match metric {
        MetricId::Hamming => hamming_weight(v),
        MetricId::Rank => rank_weight(ctx, v),
    }
}

pub fn distance(metric: MetricId, ctx: &RingCtx, x: &[Elem], y: &[Elem]) -> usize {
    assert_eq!(x.len(), y.len(), "distance between vectors of different lengths");
    let diff: RingVector = x.iter().zip(y).map(|(a, b)| ctx.sub(a, b)).collect();
    weight(metric, ctx, &diff)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    /// All pairs, triples and scalars; fails if over the enumeration budget.
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
    /// Exhaustive when within budget, otherwise sampled with the given seed.
    Auto { samples: usize, seed: u64 },
}

/// Violation counts per axiom. Strict decreases under scaling are legal and
/// only recorded as witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomAudit {
    pub metric: Option<MetricId>,
    pub n: usize,
    pub exhaustive: bool,
    pub checks: u64,
    pub identity: u64,
    pub symmetry: u64,
    pub triangle: u64,
    pub translation: u64,
    pub scaling: u64,
    pub strict_decrease_witness: Option<String>,
}

impl AxiomAudit {
    pub fn violations(&self) -> u64 {
        self.identity + self.symmetry + self.triangle + self.translation + self.scaling
    }
}

pub fn metric_axiom_audit(metric: MetricId, ctx: &RingCtx, n: usize, mode: AuditMode) -> Result<AxiomAudit> {
    let ring = ctx.ring();
    let size = ring.cardinality_big().pow(n as u32);
    let space = u128::try_from(&size).unwrap_or(u128::MAX);
    let triples = space.checked_mul(space).and_then(|x| x.checked_mul(space)).unwrap_or(u128::MAX);
    let exhaustive = match mode {
        AuditMode::Exhaustive => {
            ctx.budget().check(triples, ctx.budget().enumeration)?;
            true
        }
        AuditMode::Auto { .. } => triples <= ctx.budget().enumeration,
        AuditMode::Sampled { .. } => false,
    };
    let mut audit = AxiomAudit { metric: Some(metric), n, exhaustive, ..Default::default() };
    let d = |x: &[Elem], y: &[Elem]| distance(metric, ctx, x, y);
    let add = |x: &[Elem], y: &[Elem]| -> RingVector { x.iter().zip(y).map(|(a, b)| ctx.add(a, b)).collect() };

    let check = |audit: &mut AxiomAudit, x: &[Elem], y: &[Elem], z: &[Elem], a: &Elem| {
        audit.checks += 1;
        let dxy = d(x, y);
        if (dxy == 0) != (x == y) {
            audit.identity += 1;
        }
        if dxy != d(y, x) {
            audit.symmetry += 1;
        }
        if d(x, z) > dxy + d(y, z) {
            audit.triangle += 1;
        }
        if d(&add(x, z), &add(y, z)) != dxy {
            audit.translation += 1;
        }
        let ax: RingVector = x.iter().map(|e| ctx.mul(a, e)).collect();
        let w = weight(metric, ctx, x);
        let wa = weight(metric, ctx, &ax);
        if wa > w {
            audit.scaling += 1;
        } else if wa < w && audit.strict_decrease_witness.is_none() && !ax.iter().all(Elem::is_zero) {
            audit.strict_decrease_witness = Some(format!("D({a:?}*{x:?}, 0) = {wa} < {w} = D({x:?}, 0)"));
        }
    };

    if exhaustive {
        let all: Vec<RingVector> = (0..space).map(|i| vector_at(ring, n, i)).collect();
        let scalars: Vec<Elem> = ring.elements().collect();
        for (ix, x) in all.iter().enumerate() {
            for (iy, y) in all.iter().enumerate() {
                for (iz, z) in all.iter().enumerate() {
                    let a = &scalars[(ix + iy + iz) % scalars.len()];
                    check(&mut audit, x, y, z, a);
                }
            }
            for a in &scalars {
                let ax: RingVector = x.iter().map(|e| ctx.mul(a, e)).collect();
                let (w, wa) = (weight(metric, ctx, x), weight(metric, ctx, &ax));
                if wa > w {
                    audit.scaling += 1;
                } else if wa < w && audit.strict_decrease_witness.is_none() && !ax.iter().all(Elem::is_zero) {
                    audit.strict_decrease_witness = Some(format!("D({a:?}*{x:?}, 0) = {wa} < {w} = D({x:?}, 0)"));
                }
            }
        }
    } else {
        let (samples, seed) = match mode {
            AuditMode::Sampled { samples, seed } | AuditMode::Auto { samples, seed } => (samples, seed),
            AuditMode::Exhaustive => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = ctx.random_vector(n, crate::ring::Domain::Ambient, &mut rng);
            let y = ctx.random_vector(n, crate::ring::Domain::Ambient, &mut rng);
            let z = ctx.random_vector(n, crate::ring::Domain::Ambient, &mut rng);
            let a = crate::ring::enumerate::random_elem(ring, &mut rng);
            check(&mut audit, &x, &y, &z, &a);
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, Domain, RingSpec};

    #[test]
    fn weight_examples() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let r = z4.ring();
        let v = vec![r.from_int(2), r.from_int(2)];
        assert_eq!(hamming_weight(&v), 2);
        assert_eq!(rank_weight(&z4, &v), 1);
        let zero = vec![r.zero(); 3];
        assert_eq!(hamming_weight(&zero), 0);
        assert_eq!(rank_weight(&z4, &zero), 0);

        let gr = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        let s = gr.ring();
        let y = gr.sbar_basis(1).unwrap()[1].clone();
        let v = vec![s.one(), s.scale(&y, 2)];
        assert_eq!(rank_weight(&gr, &v), 2);
        assert_eq!(hamming_weight(&v), 2);
    }

    #[test]
    fn distance_examples() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let r = z4.ring();
        let a = vec![r.from_int(1), r.from_int(0)];
        let b = vec![r.from_int(1), r.from_int(2)];
        assert_eq!(distance(MetricId::Hamming, &z4, &a, &a), 0);
        assert_eq!(distance(MetricId::Hamming, &z4, &a, &b), 1);
        assert_eq!(distance(MetricId::Rank, &z4, &a, &b), 1);
    }

    #[test]
    fn axioms_hold_exhaustively() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let h = metric_axiom_audit(MetricId::Hamming, &z4, 2, AuditMode::Exhaustive).unwrap();
        assert!(h.exhaustive);
        assert_eq!(h.violations(), 0);
        assert!(h.strict_decrease_witness.is_some());

        let gr = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        let r = metric_axiom_audit(MetricId::Rank, &gr, 1, AuditMode::Exhaustive).unwrap();
        assert_eq!(r.violations(), 0);
        assert_eq!(r.checks, 16u64.pow(3));

        let z4r = metric_axiom_audit(MetricId::Rank, &z4, 2, AuditMode::Exhaustive).unwrap();
        assert_eq!(z4r.violations(), 0);
    }

    #[test]
    fn sampled_audit_on_larger_space() {
        let gr = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        let a = metric_axiom_audit(MetricId::Rank, &gr, 3, AuditMode::Auto { samples: 3000, seed: 9 }).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a.checks, 3000);
        assert_eq!(a.violations(), 0);
        let tight = gr.clone().with_budget(crate::ring::Budget { enumeration: 10, ..Default::default() });
        assert!(matches!(
            metric_axiom_audit(MetricId::Hamming, &tight, 1, AuditMode::Exhaustive),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn strict_decrease_is_legal() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        let r = z4.ring();
        let x = vec![r.from_int(1), r.from_int(2)];
        let two_x: Vec<_> = x.iter().map(|e| r.mul(&r.from_int(2), e)).collect();
        assert_eq!(weight(MetricId::Hamming, &z4, &two_x), 1);
        assert_eq!(weight(MetricId::Hamming, &z4, &x), 2);
    }

    #[test]
    fn weights_invariant_under_units_and_bounded() {
        for spec in [RingSpec::integers(2, 2), RingSpec::integers(3, 2), RingSpec::new(2, 2, 1, 2, 1)] {
            let ctx = build_ring(spec).unwrap();
            let units: Vec<Elem> = ctx.ring().elements().filter(|u| ctx.is_unit(u)).collect();
            let n = if spec.m == 2 { 1 } else { 2 };
            for v in ctx.enumerate_vectors(n, Domain::Ambient).unwrap() {
                let (h, rk) = (hamming_weight(&v), rank_weight(&ctx, &v));
                assert!(rk <= spec.m.min(n));
                assert_eq!(h == 0, v.iter().all(Elem::is_zero));
                assert_eq!(rk == 0, h == 0);
                for u in &units {
                    let uv: Vec<_> = v.iter().map(|x| ctx.mul(u, x)).collect();
                    assert_eq!(hamming_weight(&uv), h);
                    assert_eq!(rank_weight(&ctx, &uv), rk);
                }
            }
        }
    }
}
