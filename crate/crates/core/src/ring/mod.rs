//! The Galois-ring tower `R ⊆ S̄ ⊆ S`.
//!
//! `S = Z_{p^s}[Y]/(g)` with `g` the coefficient-wise lift of the smallest monic
//! irreducible of degree `r·m` over `F_p`. The base ring `R = GR(p^s, r)` and
//! every intermediate ring `GR(p^s, r·ℓ')` (`ℓ' | m`) are realized as fixed
//! rings of Frobenius powers: each is generated over `Z_{p^s}` by the
//! Teichmüller lift of a primitive element of the matching residue subfield,
//! which also gives it a standalone presentation through its minimal polynomial.

pub mod enumerate;
pub mod fp_poly;
pub mod galois;
pub mod zmod;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use enumerate::{par_count, vector_at, vector_index, Domain, VectorIter};
pub use galois::{Elem, GaloisRing};
use zmod::ZMatrix;

/// A vector over some ring of the tower.
pub type RingVector = Vec<Elem>;

/// Default cap on the number of items any exhaustive enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;
/// Default cap on the number of codes a census may produce.
pub const DEFAULT_CENSUS_BUDGET: u128 = 100_000;
/// Default cap on the number of codewords of a single code.
pub const DEFAULT_CODEWORD_BUDGET: u128 = 1 << 20;

/// Enumeration limits. The enumeration cap honours `RINGDENSE_BUDGET`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub enumeration: u128,
    pub census: u128,
    pub codewords: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            census: DEFAULT_CENSUS_BUDGET,
            codewords: DEFAULT_CODEWORD_BUDGET,
        }
    }
}

impl Budget {
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(v) = std::env::var("RINGDENSE_BUDGET").ok().and_then(|v| v.trim().parse().ok()) {
            b.enumeration = v;
        }
        b
    }

    pub fn check(&self, requested: u128, limit: u128) -> Result<()> {
        if requested > limit {
            Err(Error::BudgetExceeded { requested, budget: limit })
        } else {
            Ok(())
        }
    }
}

/// Parameters `(p, s, r, m, ℓ)` of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub s: u32,
    pub r: u32,
    pub m: usize,
    pub ell: usize,
}

impl RingSpec {
    pub fn new(p: u64, s: u32, r: u32, m: usize, ell: usize) -> Self {
        RingSpec { p, s, r, m, ell }
    }

    /// `Z_{p^s}` with `m = ℓ = 1`.
    pub fn integers(p: u64, s: u32) -> Self {
        RingSpec::new(p, s, 1, 1, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !fp_poly::is_prime(self.p) {
            return Err(Error::NonPrime(self.p));
        }
        if self.s == 0 || self.r == 0 || self.m == 0 || self.ell == 0 {
            return Err(Error::InvalidSpec("s, r, m and ell must all be >= 1".into()));
        }
        if self.m % self.ell != 0 {
            return Err(Error::InvalidSubring { ell: self.ell, m: self.m });
        }
        Ok(())
    }

    /// Residue size of `R`, `q = p^r`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    /// `|S| = q^{sm}`.
    pub fn s_cardinality(&self) -> BigUint {
        BigUint::from(self.q()).pow(self.s * self.m as u32)
    }

    /// Same tower with nilpotency index `s - 1`.
    pub fn truncated(&self) -> Option<RingSpec> {
        (self.s > 1).then_some(RingSpec { s: self.s - 1, ..*self })
    }
}

/// A ring `GR(p^s, r·ℓ')` of the tower, with its embedding into `S` and the
/// coordinate system of `S` as a free module over it.
#[derive(Clone, Debug)]
pub struct Subring {
    degree: usize,
    ring: Arc<GaloisRing>,
    /// Columns: images in `S` of the power basis of the standalone ring.
    embed: ZMatrix,
    /// `S` coefficients to stacked standalone coordinates, block `j` = `j`-th
    /// coordinate over the subring.
    to_coords: ZMatrix,
    from_coords: ZMatrix,
    basis: Vec<Elem>,
}

impl Subring {
    /// `ℓ'`, the degree of this ring over `R`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The ring in its own presentation.
    pub fn ring(&self) -> &Arc<GaloisRing> {
        &self.ring
    }

    /// A basis of `S` over this ring (`m/ℓ'` elements of `S`).
    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    /// Number of coordinates of one `S` element over this ring.
    pub fn rank_of_s(&self) -> usize {
        self.basis.len()
    }

    /// Image in `S` of an element of this ring.
    pub fn embed(&self, s_ring: &GaloisRing, x: &Elem) -> Elem {
        let v: Vec<u64> = x.0.iter().map(|&c| c as u64).collect();
        s_ring.from_coeffs(&self.embed.apply(&v))
    }

    /// Coordinates of `x ∈ S` over this ring.
    pub fn expand(&self, x: &Elem) -> Vec<Elem> {
        let v: Vec<u64> = x.0.iter().map(|&c| c as u64).collect();
        let coords = self.to_coords.apply(&v);
        let d = self.ring.degree();
        coords.chunks(d).map(|c| self.ring.from_coeffs(c)).collect()
    }

    /// Inverse of [`Self::expand`].
    pub fn combine(&self, s_ring: &GaloisRing, coords: &[Elem]) -> Elem {
        let flat: Vec<u64> = coords.iter().flat_map(|e| e.0.iter().map(|&c| c as u64)).collect();
        s_ring.from_coeffs(&self.from_coords.apply(&flat))
    }

    /// The element of this ring equal to `x`, if `x` lies in it.
    pub fn restrict(&self, x: &Elem) -> Option<Elem> {
        let mut coords = self.expand(x);
        if coords[1..].iter().all(Elem::is_zero) {
            Some(coords.swap_remove(0))
        } else {
            None
        }
    }
}

/// The realized tower for a [`RingSpec`]. Immutable once built.
#[derive(Clone, Debug)]
pub struct RingCtx {
    spec: RingSpec,
    ring: Arc<GaloisRing>,
    residue: GaloisRing,
    primitive: Elem,
    frobenius: Vec<ZMatrix>,
    subrings: BTreeMap<usize, Subring>,
    budget: Budget,
}

/// JSON description of a tower.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RingDescription {
    pub p: u64,
    pub s: u32,
    pub r: u32,
    pub m: usize,
    pub ell: usize,
    pub modulus: Vec<u64>,
    pub q: u64,
    pub cardinality: String,
}

/// Builds the tower: `S`, its residue field, Frobenius and every subring.
pub fn build_ring(spec: RingSpec) -> Result<RingCtx> {
    spec.validate()?;
    let deg = spec.r as usize * spec.m;
    let modulus = fp_poly::smallest_irreducible(spec.p, deg);
    debug_assert!(fp_poly::is_irreducible(&modulus, spec.p));
    let ring = Arc::new(GaloisRing::new(spec.p, spec.s, &modulus)?);
    let residue = ring.residue_field();
    let primitive = primitive_element(&residue);

    // σ_p(Y) from the Teichmüller digits of Y, then σ_p(x) = Σ x_j σ_p(Y)^j.
    let y = ring.from_coeffs(&[0, 1]);
    let sigma_y = ring
        .teichmuller_digits(&y)
        .iter()
        .enumerate()
        .fold(ring.zero(), |acc, (i, t)| {
            ring.add(&acc, &ring.shift_up(&ring.pow(t, spec.p as u128), i as u32))
        });
    let mut cols = Vec::with_capacity(deg);
    let mut cur = ring.one();
    for _ in 0..deg {
        cols.push(cur.0.iter().map(|&c| c as u64).collect::<Vec<_>>());
        cur = ring.mul(&cur, &sigma_y);
    }
    let sigma = ZMatrix::from_columns(&cols, deg, ring.pk());
    let mut frobenius = vec![ZMatrix::identity(deg, ring.pk())];
    for k in 1..deg {
        frobenius.push(sigma.mul(&frobenius[k - 1]));
    }

    let mut ctx = RingCtx {
        spec,
        ring,
        residue,
        primitive,
        frobenius,
        subrings: BTreeMap::new(),
        budget: Budget::from_env(),
    };
    for l in (1..=spec.m).filter(|l| spec.m % l == 0) {
        let sub = ctx.make_subring(l)?;
        ctx.subrings.insert(l, sub);
    }
    Ok(ctx)
}

/// Smallest element (by index) generating the multiplicative group of a field.
fn primitive_element(field: &GaloisRing) -> Elem {
    let order = field.residue_size() as u128 - 1;
    let factors = fp_poly::prime_factors(order);
    (1..field.cardinality())
        .map(|i| field.elem_at(i))
        .find(|x| factors.iter().all(|&f| field.pow(x, order / f) != field.one()))
        .expect("finite fields have primitive elements")
}

impl RingCtx {
    fn make_subring(&self, l: usize) -> Result<Subring> {
        let s_ring = &self.ring;
        let pk = s_ring.pk();
        let deg = s_ring.degree();
        if l == self.spec.m {
            return Ok(Subring {
                degree: l,
                ring: s_ring.clone(),
                embed: ZMatrix::identity(deg, pk),
                to_coords: ZMatrix::identity(deg, pk),
                from_coords: ZMatrix::identity(deg, pk),
                basis: vec![s_ring.one()],
            });
        }
        let sub_deg = self.spec.r as usize * l;
        let big_q = s_ring.residue_size() as u128;
        let small_q = (self.spec.p as u128).pow(sub_deg as u32);
        let omega = s_ring.teichmuller(&s_ring.lift(&self.primitive));
        let beta = s_ring.pow(&omega, (big_q - 1) / (small_q - 1));
        let rel = self.spec.m / l;

        let beta_pows: Vec<Elem> = (0..=sub_deg).map(|i| s_ring.pow(&beta, i as u128)).collect();
        let basis: Vec<Elem> = (0..rel).map(|j| s_ring.pow(&omega, j as u128)).collect();
        let mut cols = Vec::with_capacity(deg);
        for b in &basis {
            for bp in &beta_pows[..sub_deg] {
                cols.push(s_ring.mul(bp, b).0.iter().map(|&c| c as u64).collect::<Vec<_>>());
            }
        }
        let from_coords = ZMatrix::from_columns(&cols, deg, pk);
        let to_coords = from_coords.inverse(self.spec.p)?;

        let top: Vec<u64> = beta_pows[sub_deg].0.iter().map(|&c| c as u64).collect();
        let top_coords = to_coords.apply(&top);
        debug_assert!(top_coords[sub_deg..].iter().all(|&c| c == 0));
        let mut minpoly: Vec<u64> = top_coords[..sub_deg].iter().map(|&c| (pk - c) % pk).collect();
        minpoly.push(1);
        debug_assert!(fp_poly::is_irreducible(&minpoly, self.spec.p));
        let ring = Arc::new(GaloisRing::new(self.spec.p, self.spec.s, &minpoly)?);

        let embed_cols: Vec<Vec<u64>> = beta_pows[..sub_deg]
            .iter()
            .map(|e| e.0.iter().map(|&c| c as u64).collect())
            .collect();
        Ok(Subring {
            degree: l,
            ring,
            embed: ZMatrix::from_columns(&embed_cols, deg, pk),
            to_coords,
            from_coords,
            basis,
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    /// The ring `S`.
    pub fn ring(&self) -> &Arc<GaloisRing> {
        &self.ring
    }

    /// Residue field `F_{q^m}` of `S`.
    pub fn residue_field(&self) -> &GaloisRing {
        &self.residue
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn q(&self) -> u64 {
        self.spec.q()
    }

    /// Ring of the tower of degree `ℓ'` over `R`.
    pub fn subring(&self, l: usize) -> Result<&Subring> {
        self.subrings
            .get(&l)
            .ok_or(Error::InvalidSubring { ell: l, m: self.spec.m })
    }

    /// The base ring `R`.
    pub fn base(&self) -> &Subring {
        &self.subrings[&1]
    }

    /// The code alphabet `S̄` (degree `ℓ`).
    pub fn sbar(&self) -> &Subring {
        &self.subrings[&self.spec.ell]
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        self.ring.add(x, y)
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.ring.sub(x, y)
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        self.ring.mul(x, y)
    }

    pub fn inv(&self, x: &Elem) -> Result<Elem> {
        self.ring.inv(x)
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        self.ring.is_unit(x)
    }

    pub fn valuation(&self, x: &Elem) -> u32 {
        self.ring.valuation(x)
    }

    /// `Ψ`: the image in `F_{q^m}`.
    pub fn project_residue(&self, x: &Elem) -> Elem {
        self.ring.residue(x)
    }

    pub fn teichmuller_digits(&self, x: &Elem) -> Vec<Elem> {
        self.ring.teichmuller_digits(x)
    }

    /// `σ_p^power(x)`, acting as `t ↦ t^{p^power}` on Teichmüller digits.
    pub fn frobenius(&self, x: &Elem, power: usize) -> Elem {
        let k = power % self.frobenius.len();
        let v: Vec<u64> = x.0.iter().map(|&c| c as u64).collect();
        self.ring.from_coeffs(&self.frobenius[k].apply(&v))
    }

    /// The `q^m` Teichmüller representatives, `0` first, then powers of the
    /// lifted primitive element.
    pub fn teichmuller_set(&self) -> Result<Vec<Elem>> {
        let size = self.ring.residue_size() as u128;
        self.budget.check(size, self.budget.enumeration)?;
        let omega = self.ring.teichmuller(&self.ring.lift(&self.primitive));
        let mut out = vec![self.ring.zero()];
        let mut cur = self.ring.one();
        for _ in 0..size - 1 {
            out.push(cur.clone());
            cur = self.ring.mul(&cur, &omega);
        }
        Ok(out)
    }

    /// All elements of the degree-`ℓ'` subring, as elements of `S`.
    pub fn subring_elements(&self, l: usize) -> Result<Vec<Elem>> {
        let sub = self.subring(l)?;
        self.budget.check(sub.ring.cardinality(), self.budget.enumeration)?;
        Ok(sub.ring.elements().map(|e| sub.embed(&self.ring, &e)).collect())
    }

    /// Basis of `S` over the degree-`ℓ'` subring.
    pub fn sbar_basis(&self, l: usize) -> Result<Vec<Elem>> {
        Ok(self.subring(l)?.basis.clone())
    }

    /// The tower over `S/γ^{s-1}S`, or `None` for `s = 1`.
    pub fn quotient(&self) -> Option<RingCtx> {
        let spec = self.spec.truncated()?;
        Some(build_ring(spec).expect("truncation of a valid spec").with_budget(self.budget))
    }

    /// Reduction `S → S/γ^{s-1}S` in coefficients (both rings share the modulus).
    pub fn reduce_to_quotient(&self, x: &Elem) -> Elem {
        self.ring.reduce_mod(x, self.spec.s - 1)
    }

    pub fn describe(&self) -> RingDescription {
        RingDescription {
            p: self.spec.p,
            s: self.spec.s,
            r: self.spec.r,
            m: self.spec.m,
            ell: self.spec.ell,
            modulus: self.ring.modulus(),
            q: self.q(),
            cardinality: self.ring.cardinality_big().to_string(),
        }
    }

    /// Iterator over vectors of length `n` in the given domain.
    pub fn enumerate_vectors(&self, n: usize, domain: Domain) -> Result<VectorIter> {
        let total = self.ring.cardinality_big().pow(n as u32);
        let total = u128::try_from(total).unwrap_or(u128::MAX);
        self.budget.check(total, self.budget.enumeration)?;
        Ok(VectorIter::new(self.ring.clone(), n, domain))
    }

    /// A uniformly random vector of the domain.
    pub fn random_vector<G: rand::Rng + ?Sized>(&self, n: usize, domain: Domain, rng: &mut G) -> RingVector {
        enumerate::random_vector(&self.ring, n, domain, rng)
    }
}
