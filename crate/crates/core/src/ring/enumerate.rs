use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::galois::{Elem, GaloisRing};

/// Subsets of `S^n` that can be enumerated or sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// All of `S^n`.
    Ambient,
    /// `S^n \ (γS)^n`: vectors with at least one unit entry.
    Punctured,
    /// `(γS)^n`.
    GammaMultiples,
}

impl Domain {
    pub fn contains(&self, ring: &GaloisRing, v: &[Elem]) -> bool {
        match self {
            Domain::Ambient => true,
            Domain::Punctured => v.iter().any(|x| ring.is_unit(x)),
            Domain::GammaMultiples => !v.iter().any(|x| ring.is_unit(x)),
        }
    }
}

/// Odometer over the coefficients of all vectors in `ring^n`, filtered by domain.
/// Vectors come out in increasing index order (coordinate 0 least significant).
pub struct VectorIter {
    ring: Arc<GaloisRing>,
    domain: Domain,
    current: Option<Vec<Elem>>,
}

impl VectorIter {
    pub fn new(ring: Arc<GaloisRing>, n: usize, domain: Domain) -> Self {
        let current = Some(vec![ring.zero(); n]);
        VectorIter { ring, domain, current }
    }

    fn advance(&mut self) {
        let pk = self.ring.pk() as u32;
        let Some(cur) = self.current.as_mut() else { return };
        for e in cur.iter_mut() {
            for c in e.0.iter_mut() {
                *c += 1;
                if *c < pk {
                    return;
                }
                *c = 0;
            }
        }
        self.current = None;
    }
}

impl Iterator for VectorIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        loop {
            let v = self.current.clone()?;
            self.advance();
            if self.domain.contains(&self.ring, &v) {
                return Some(v);
            }
        }
    }
}

pub fn random_elem<G: Rng + ?Sized>(ring: &GaloisRing, rng: &mut G) -> Elem {
    let mut e = ring.zero();
    for c in e.0.iter_mut() {
        *c = rng.gen_range(0..ring.pk() as u32);
    }
    e
}

/// Uniform sample from the domain (rejection for the punctured set).
pub fn random_vector<G: Rng + ?Sized>(ring: &GaloisRing, n: usize, domain: Domain, rng: &mut G) -> Vec<Elem> {
    match domain {
        Domain::Ambient => (0..n).map(|_| random_elem(ring, rng)).collect(),
        Domain::GammaMultiples => (0..n).map(|_| ring.shift_up(&random_elem(ring, rng), 1)).collect(),
        Domain::Punctured => loop {
            let v: Vec<Elem> = (0..n).map(|_| random_elem(ring, rng)).collect();
            if n == 0 || Domain::Punctured.contains(ring, &v) {
                return v;
            }
        },
    }
}

/// Position of `v` in the order produced by [`VectorIter`] over the ambient space.
pub fn vector_index(ring: &GaloisRing, v: &[Elem]) -> u128 {
    v.iter().rev().fold(0u128, |acc, x| acc * ring.cardinality() + ring.index_of(x))
}

/// Inverse of [`vector_index`].
pub fn vector_at(ring: &GaloisRing, n: usize, mut index: u128) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let e = ring.elem_at(index % ring.cardinality());
            index /= ring.cardinality();
            e
        })
        .collect()
}

/// Number of vectors of `domain` satisfying `pred`. Work is split on the last
/// coordinate across the rayon pool; the result does not depend on the split.
pub fn par_count<F>(ring: &Arc<GaloisRing>, n: usize, domain: Domain, pred: F) -> u128
where
    F: Fn(&[Elem]) -> bool + Sync,
{
    if n == 0 {
        let v: Vec<Elem> = Vec::new();
        return u128::from(domain.contains(ring, &v) && pred(&v));
    }
    (0..ring.cardinality())
        .into_par_iter()
        .map(|top| {
            let last = ring.elem_at(top);
            let mut count = 0u128;
            for mut v in VectorIter::new(ring.clone(), n - 1, Domain::Ambient) {
                v.push(last.clone());
                if domain.contains(ring, &v) && pred(&v) {
                    count += 1;
                }
            }
            count
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn punctured_counts() {
        let z4 = build_ring(RingSpec::integers(2, 2)).unwrap();
        assert_eq!(z4.enumerate_vectors(2, Domain::Punctured).unwrap().count(), 12);
        assert_eq!(z4.enumerate_vectors(1, Domain::Ambient).unwrap().count(), 4);
        assert_eq!(z4.enumerate_vectors(2, Domain::GammaMultiples).unwrap().count(), 4);
        let gr = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        assert_eq!(gr.enumerate_vectors(2, Domain::Punctured).unwrap().count(), 240);
        assert_eq!(par_count(gr.ring(), 2, Domain::Punctured, |_| true), 240);
        assert_eq!(par_count(z4.ring(), 0, Domain::Punctured, |_| true), 0);
        assert_eq!(par_count(z4.ring(), 0, Domain::GammaMultiples, |_| true), 1);
    }

    #[test]
    fn index_round_trip() {
        let ctx = build_ring(RingSpec::new(3, 2, 1, 1, 1)).unwrap();
        for (i, v) in ctx.enumerate_vectors(2, Domain::Ambient).unwrap().enumerate() {
            assert_eq!(vector_index(ctx.ring(), &v), i as u128);
            assert_eq!(vector_at(ctx.ring(), 2, i as u128), v);
        }
    }

    #[test]
    fn enumeration_respects_budget() {
        let ctx = build_ring(RingSpec::integers(2, 2)).unwrap();
        let mut b = *ctx.budget();
        b.enumeration = 100;
        let ctx = ctx.with_budget(b);
        assert!(ctx.enumerate_vectors(3, Domain::Ambient).is_ok());
        assert!(matches!(
            ctx.enumerate_vectors(4, Domain::Ambient),
            Err(crate::error::Error::BudgetExceeded { requested: 256, budget: 100 })
        ));
    }

    #[test]
    fn random_punctured_is_roughly_uniform() {
        let ctx = build_ring(RingSpec::integers(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts: HashMap<Vec<Elem>, usize> = HashMap::new();
        let trials = 24_000;
        for _ in 0..trials {
            *counts.entry(ctx.random_vector(2, Domain::Punctured, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 12);
        for &c in counts.values() {
            assert!((c as f64 - 2000.0).abs() < 250.0, "count {c}");
        }
    }
}
