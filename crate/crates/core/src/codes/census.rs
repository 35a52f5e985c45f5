//! Census of free rank-`k` codes and uniform sampling.
//!
//! Codes are handled in `S̄`-coordinates, i.e. as free submodules of
//! `S̄^{N'}` with `N' = n·m/ℓ`. Two census routes:
//! - `Reference`: grow modules one generator at a time from unimodular
//!   vectors and deduplicate by Howell form. Slow, but hard to get wrong.
//! - `Systematic`: every free rank-`k` module has exactly one generator
//!   matrix that is the identity on its residue pivot columns `J`, has
//!   arbitrary entries right of each row's pivot and `γ`-multiples left of
//!   it. Enumerating those matrices lists each module once.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{codewords, FreeCode};
use crate::counting::count_free_modules;
use crate::error::{Error, Result};
use crate::linalg::{howell_form, is_free_span, sbar_combine, HowellForm, RingMatrix};
use crate::ring::enumerate::random_elem;
use crate::ring::{Domain, Elem, GaloisRing, RingCtx, RingVector, VectorIter};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusRoute {
    Reference,
    #[default]
    Systematic,
}

struct Setup {
    sbar: Arc<GaloisRing>,
    width: usize,
    expected: usize,
}

fn setup(ctx: &RingCtx, ell: usize, n: usize, k: usize) -> Result<Setup> {
    let sub = ctx.subring(ell)?;
    let width = n * sub.rank_of_s();
    let space = u128::try_from(ctx.ring().cardinality_big().pow(n as u32)).unwrap_or(u128::MAX);
    ctx.budget().check(space, ctx.budget().enumeration)?;
    let big_q = sub.ring().residue_size();
    let expected = count_free_modules(width as i64, k as i64, big_q, ctx.spec().s).exact;
    let expected_u = expected.to_u128().unwrap_or(u128::MAX);
    ctx.budget().check(expected_u, ctx.budget().census)?;
    Ok(Setup { sbar: sub.ring().clone(), width, expected: expected_u as usize })
}

fn to_code(ctx: &RingCtx, ell: usize, n: usize, rows: &[RingVector], canonical: HowellForm) -> FreeCode {
    let generators = rows
        .iter()
        .map(|r| sbar_combine(ctx, r, ell).expect("row width is a multiple of m/ell"))
        .collect();
    FreeCode { spec: *ctx.spec(), ell, n, k: rows.len(), generators, canonical }
}

/// Applies `f` to every free rank-`k` code, in a deterministic order that does
/// not depend on the thread count.
pub fn census_map<T, F>(ctx: &RingCtx, ell: usize, n: usize, k: usize, route: CensusRoute, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&FreeCode) -> T + Sync + Send,
{
    let st = setup(ctx, ell, n, k)?;
    if k > st.width {
        return Ok(Vec::new());
    }
    if k == 0 {
        return Ok(vec![f(&super::zero_code(ctx, ell, n)?)]);
    }
    match route {
        CensusRoute::Systematic => {
            let plan = SystematicPlan::new(&st.sbar, st.width, k);
            debug_assert_eq!(plan.total, st.expected);
            Ok((0..plan.total)
                .into_par_iter()
                .map(|idx| {
                    let rows = plan.matrix(idx);
                    let mat = RingMatrix::from_rows(st.sbar.clone(), st.width, &rows).expect("width");
                    f(&to_code(ctx, ell, n, &rows, howell_form(&mat)))
                })
                .collect())
        }
        CensusRoute::Reference => {
            let modules = reference_census(&st.sbar, st.width, k);
            Ok(modules
                .into_par_iter()
                .map(|(canonical, rows)| f(&to_code(ctx, ell, n, &rows, canonical)))
                .collect())
        }
    }
}

/// Every free rank-`k` code exactly once.
pub fn enumerate_free_codes(ctx: &RingCtx, ell: usize, n: usize, k: usize, route: CensusRoute) -> Result<Vec<FreeCode>> {
    census_map(ctx, ell, n, k, route, FreeCode::clone)
}

fn reference_census(sbar: &Arc<GaloisRing>, width: usize, k: usize) -> Vec<(HowellForm, Vec<RingVector>)> {
    let unimodular: Vec<RingVector> = VectorIter::new(sbar.clone(), width, Domain::Punctured).collect();
    let mut level: BTreeMap<HowellForm, Vec<RingVector>> = BTreeMap::new();
    level.insert(howell_form(&RingMatrix::zeros(sbar.clone(), 0, width)), Vec::new());
    for j in 0..k {
        let found: Vec<BTreeMap<HowellForm, Vec<RingVector>>> = level
            .par_iter()
            .map(|(_, gens)| {
                let mut local = BTreeMap::new();
                for x in &unimodular {
                    let mut rows = gens.clone();
                    rows.push(x.clone());
                    let mat = RingMatrix::from_rows(sbar.clone(), width, &rows).expect("width");
                    if is_free_span(&mat) == (true, j + 1) {
                        local.entry(howell_form(&mat)).or_insert(rows);
                    }
                }
                local
            })
            .collect();
        let mut next: BTreeMap<HowellForm, Vec<RingVector>> = BTreeMap::new();
        for map in found {
            for (key, rows) in map {
                match next.get_mut(&key) {
                    Some(existing) if *existing <= rows => {}
                    Some(existing) => *existing = rows,
                    None => {
                        next.insert(key, rows);
                    }
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Lexicographic `k`-subsets of `0..n`.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

struct Block {
    pivots: Vec<usize>,
    /// `(row, column, whole ring?)` for every free entry.
    slots: Vec<(usize, usize, bool)>,
    offset: usize,
}

struct SystematicPlan {
    width: usize,
    k: usize,
    all: Vec<Elem>,
    gamma: Vec<Elem>,
    zero: Elem,
    one: Elem,
    blocks: Vec<Block>,
    total: usize,
}

impl SystematicPlan {
    fn new(ring: &GaloisRing, width: usize, k: usize) -> Self {
        let all: Vec<Elem> = ring.elements().collect();
        let gamma: Vec<Elem> = all.iter().filter(|x| !ring.is_unit(x)).cloned().collect();
        let mut blocks = Vec::new();
        let mut offset = 0usize;
        for pivots in subsets(width, k) {
            let mut slots = Vec::new();
            let mut size = 1usize;
            for (i, &pc) in pivots.iter().enumerate() {
                for c in (0..width).filter(|c| !pivots.contains(c)) {
                    let any = c > pc;
                    size *= if any { all.len() } else { gamma.len() };
                    slots.push((i, c, any));
                }
            }
            blocks.push(Block { pivots, slots, offset });
            offset += size;
        }
        SystematicPlan { width, k, all, gamma, zero: ring.zero(), one: ring.one(), blocks, total: offset }
    }

    fn matrix(&self, idx: usize) -> Vec<RingVector> {
        let b = match self.blocks.binary_search_by(|b| b.offset.cmp(&idx)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let block = &self.blocks[b];
        let mut rest = idx - block.offset;
        let mut rows = vec![vec![self.zero.clone(); self.width]; self.k];
        for (i, &pc) in block.pivots.iter().enumerate() {
            rows[i][pc] = self.one.clone();
        }
        for &(i, c, any) in &block.slots {
            let pool = if any { &self.all } else { &self.gamma };
            rows[i][c] = pool[rest % pool.len()].clone();
            rest /= pool.len();
        }
        rows
    }
}

#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub code: FreeCode,
    /// Tuples drawn until one was a free basis, this one included.
    pub attempts: u64,
}

/// Uniform free rank-`k` code by rejection: draw `k` uniform vectors of `S^n`
/// until they form a free basis. Every module has the same number of ordered
/// free bases, so the accepted span is uniform.
pub fn sample_free_code<G: Rng + ?Sized>(ctx: &RingCtx, ell: usize, n: usize, k: usize, rng: &mut G) -> Result<SampleOutcome> {
    let sub = ctx.subring(ell)?;
    let width = n * sub.rank_of_s();
    if k > width {
        return Err(Error::OutOfRange(format!("rank {k} exceeds N/ell = {width}")));
    }
    if k == 0 {
        return Ok(SampleOutcome { code: super::zero_code(ctx, ell, n)?, attempts: 1 });
    }
    let ring = sub.ring();
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let rows: Vec<RingVector> = (0..k).map(|_| (0..width).map(|_| random_elem(ring, rng)).collect()).collect();
        let mat = RingMatrix::from_rows(ring.clone(), width, &rows).expect("width");
        if is_free_span(&mat) == (true, k) {
            let code = to_code(ctx, ell, n, &rows, howell_form(&mat));
            return Ok(SampleOutcome { code, attempts });
        }
    }
}

/// Number of vectors of `domain` generating `code` as a cyclic `S̄`-module.
pub fn free_generators_in(ctx: &RingCtx, code: &FreeCode, domain: Domain) -> Result<usize> {
    let mut count = 0;
    for y in codewords(ctx, code)? {
        if !domain.contains(ctx.ring(), &y) {
            continue;
        }
        if let Ok(c) = super::make_code(ctx, code.ell, &[y]) {
            if c.canonical == code.canonical {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, Budget, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    fn census_len(spec: RingSpec, ell: usize, n: usize, k: usize, route: CensusRoute) -> usize {
        let ctx = build_ring(spec).unwrap();
        enumerate_free_codes(&ctx, ell, n, k, route).unwrap().len()
    }

    #[test]
    fn subsets_lexicographic() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(1, 2).is_empty());
    }

    #[test]
    fn census_examples() {
        for route in [CensusRoute::Reference, CensusRoute::Systematic] {
            assert_eq!(census_len(RingSpec::integers(2, 2), 1, 2, 1, route), 6);
            assert_eq!(census_len(RingSpec::integers(2, 2), 1, 2, 2, route), 1);
            assert_eq!(census_len(RingSpec::integers(3, 2), 1, 2, 1, route), 12);
            assert_eq!(census_len(RingSpec::integers(2, 2), 1, 3, 1, route), 28);
            assert_eq!(census_len(RingSpec::integers(2, 2), 1, 3, 2, route), 28);
            assert_eq!(census_len(RingSpec::new(2, 2, 1, 2, 2), 2, 1, 1, route), 1);
            assert_eq!(census_len(RingSpec::new(2, 2, 1, 2, 1), 1, 1, 1, route), 6);
        }
        assert_eq!(census_len(RingSpec::integers(2, 2), 1, 2, 3, CensusRoute::Systematic), 0);
        assert_eq!(census_len(RingSpec::integers(2, 2), 1, 2, 0, CensusRoute::Systematic), 1);
    }

    /// Both routes list the same modules, each once, and match the closed form.
    #[test]
    fn routes_agree_with_each_other_and_the_count() {
        let cases = [
            (RingSpec::integers(2, 1), 1, 3, 1),
            (RingSpec::integers(3, 1), 1, 3, 2),
            (RingSpec::integers(2, 2), 1, 3, 2),
            (RingSpec::integers(3, 2), 1, 2, 1),
            (RingSpec::integers(2, 3), 1, 2, 1),
            (RingSpec::new(2, 2, 1, 2, 1), 1, 1, 1),
            (RingSpec::new(2, 2, 1, 2, 1), 1, 2, 1),
            (RingSpec::new(2, 2, 1, 2, 2), 2, 2, 1),
            (RingSpec::new(2, 1, 1, 2, 1), 1, 2, 2),
            (RingSpec::new(2, 2, 2, 1, 1), 1, 2, 1),
        ];
        for (spec, ell, n, k) in cases {
            let ctx = build_ring(spec).unwrap();
            let sys = enumerate_free_codes(&ctx, ell, n, k, CensusRoute::Systematic).unwrap();
            let refr = enumerate_free_codes(&ctx, ell, n, k, CensusRoute::Reference).unwrap();
            let a: BTreeSet<_> = sys.iter().map(|c| c.canonical.clone()).collect();
            let b: BTreeSet<_> = refr.iter().map(|c| c.canonical.clone()).collect();
            assert_eq!(a.len(), sys.len(), "{spec:?}: duplicate in systematic route");
            assert_eq!(a, b, "{spec:?}");
            let width = n * spec.m / ell;
            let q_ell = spec.q().pow(ell as u32);
            let expect = count_free_modules(width as i64, k as i64, q_ell, spec.s).exact;
            assert_eq!(expect, sys.len().into());
            for c in &sys {
                let remade = crate::codes::make_code(&ctx, ell, &c.generators).unwrap();
                assert_eq!(remade.canonical, c.canonical);
            }
        }
    }

    #[test]
    fn census_respects_budget() {
        let ctx = build_ring(RingSpec::integers(2, 2)).unwrap().with_budget(Budget { census: 10, ..Default::default() });
        assert!(matches!(
            enumerate_free_codes(&ctx, 1, 3, 1, CensusRoute::Systematic),
            Err(Error::BudgetExceeded { requested: 28, budget: 10 })
        ));
    }

    #[test]
    fn rank_one_codes_have_unit_many_generators() {
        for spec in [RingSpec::integers(2, 2), RingSpec::integers(3, 2), RingSpec::new(2, 2, 1, 2, 1), RingSpec::new(2, 2, 1, 2, 2)] {
            let ctx = build_ring(spec).unwrap();
            for ell in [1, spec.m] {
                let ql = spec.q().pow(ell as u32) as usize;
                let units = ql.pow(spec.s - 1) * (ql - 1);
                for code in enumerate_free_codes(&ctx, ell, 2, 1, CensusRoute::Systematic).unwrap() {
                    assert_eq!(free_generators_in(&ctx, &code, Domain::Punctured).unwrap(), units);
                }
            }
        }
    }

    #[test]
    fn sampling_is_uniform_and_reproducible() {
        let ctx = build_ring(RingSpec::integers(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts: HashMap<HowellForm, usize> = HashMap::new();
        let mut attempts = 0u64;
        let trials = 60_000;
        for _ in 0..trials {
            let s = sample_free_code(&ctx, 1, 2, 1, &mut rng).unwrap();
            attempts += s.attempts;
            *counts.entry(s.code.canonical).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for &c in counts.values() {
            assert!((c as f64 / trials as f64 - 1.0 / 6.0).abs() < 0.02);
        }
        let rate = trials as f64 / attempts as f64;
        assert!((rate - 0.75).abs() < 0.01, "acceptance {rate}");

        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| sample_free_code(&ctx, 1, 2, 1, &mut rng).unwrap().code.canonical).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));

        let f2 = build_ring(RingSpec::integers(2, 1)).unwrap();
        let full = sample_free_code(&f2, 1, 3, 3, &mut rng).unwrap();
        assert_eq!(full.code.canonical.pivots, vec![(0, 0), (1, 0), (2, 0)]);
    }
}
