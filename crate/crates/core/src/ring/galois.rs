//! Arithmetic in a Galois ring `Z_{p^s}[Y]/(g)` with `g` monic of degree `d`
//! and irreducible modulo `p`.
//!
//! Elements are dense coefficient vectors in the power basis `1, Y, ..., Y^{d-1}`
//! with every coefficient reduced into `[0, p^s)`. The maximal ideal is `pR`,
//! so valuations, units and exact division are all read off the coefficients.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// An element of a Galois ring, as coefficients in the power basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub SmallVec<[u32; 4]>);

impl Elem {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0.as_slice())
        }
    }
}

/// `GR(p^s, d)` realized as `Z_{p^s}[Y]/(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisRing {
    p: u64,
    s: u32,
    /// `g` without its leading 1, low degree first.
    modulus: Vec<u64>,
    pk: u64,
}

impl GaloisRing {
    /// Builds the ring from a monic modulus given low degree first (leading 1
    /// included). Irreducibility of the residue is the caller's contract.
    pub fn new(p: u64, s: u32, modulus: &[u64]) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidSpec("nilpotency index must be >= 1".into()));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidSpec("modulus must be monic of degree >= 1".into()));
        }
        let pk = p
            .checked_pow(s)
            .filter(|&v| v < (1 << 31))
            .ok_or_else(|| Error::InvalidSpec(format!("p^s = {p}^{s} too large for coefficient storage")))?;
        let d = modulus.len() - 1;
        Ok(GaloisRing {
            p,
            s,
            modulus: modulus[..d].iter().map(|&c| c % pk).collect(),
            pk,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn degree(&self) -> usize {
        self.modulus.len()
    }

    /// `p^s`, the characteristic.
    pub fn pk(&self) -> u64 {
        self.pk
    }

    /// Monic modulus, low degree first, leading 1 included.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    /// Size of the residue field, `p^d`.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }

    /// `|R| = p^{sd}` if it fits in a `u128`.
    pub fn cardinality(&self) -> u128 {
        (self.pk as u128).pow(self.degree() as u32)
    }

    pub fn cardinality_big(&self) -> BigUint {
        BigUint::from(self.pk).pow(self.degree() as u32)
    }

    /// Number of units, `p^{d(s-1)}(p^d - 1)`.
    pub fn unit_count(&self) -> BigUint {
        let q = BigUint::from(self.residue_size());
        q.pow(self.s - 1) * (q - BigUint::one())
    }

    /// The ring `GR(p, d)` with the same modulus reduced mod `p`.
    pub fn residue_field(&self) -> GaloisRing {
        GaloisRing::new(self.p, 1, &self.modulus()).expect("residue of a valid modulus")
    }

    /// The ring with nilpotency index `s - 1` (the quotient by `p^{s-1}`).
    pub fn truncated(&self) -> Option<GaloisRing> {
        (self.s > 1).then(|| GaloisRing::new(self.p, self.s - 1, &self.modulus()).expect("valid truncation"))
    }

    pub fn zero(&self) -> Elem {
        Elem(SmallVec::from_elem(0, self.degree()))
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Elem {
        let mut e = self.zero();
        e.0[0] = v.rem_euclid(self.pk as i64) as u32;
        e
    }

    /// Element from coefficients (low degree first), reducing each mod `p^s`.
    /// Missing coefficients are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Elem {
        let mut e = self.zero();
        for (slot, &c) in e.0.iter_mut().zip(coeffs) {
            *slot = (c % self.pk) as u32;
        }
        e
    }

    /// The element whose coefficients are the base-`p^s` digits of `index`.
    pub fn elem_at(&self, mut index: u128) -> Elem {
        let mut e = self.zero();
        let pk = self.pk as u128;
        for slot in e.0.iter_mut() {
            *slot = (index % pk) as u32;
            index /= pk;
        }
        e
    }

    pub fn index_of(&self, x: &Elem) -> u128 {
        x.0.iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.pk as u128 + c as u128)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.cardinality()).map(move |i| self.elem_at(i))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let pk = self.pk as u32;
        let mut out = a.clone();
        for (o, &y) in out.0.iter_mut().zip(b.0.iter()) {
            let v = *o + y;
            *o = if v >= pk { v - pk } else { v };
        }
        out
    }

    pub fn add_assign(&self, a: &mut Elem, b: &Elem) {
        let pk = self.pk as u32;
        for (o, &y) in a.0.iter_mut().zip(b.0.iter()) {
            let v = *o + y;
            *o = if v >= pk { v - pk } else { v };
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let pk = self.pk as u32;
        let mut out = a.clone();
        for (o, &y) in out.0.iter_mut().zip(b.0.iter()) {
            *o = if *o >= y { *o - y } else { *o + pk - y };
        }
        out
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.sub(&self.zero(), a)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, a: &Elem, k: u64) -> Elem {
        let k = k % self.pk;
        Elem(a.0.iter().map(|&c| ((c as u64 * k) % self.pk) as u32).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let d = self.degree();
        let pk = self.pk;
        if d == 1 {
            return Elem(smallvec::smallvec![((a.0[0] as u64 * b.0[0] as u64) % pk) as u32]);
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % pk;
            }
        }
        // Y^d = -(g_0 + ... + g_{d-1} Y^{d-1})
        for top in (d..2 * d - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (j, &g) in self.modulus.iter().enumerate() {
                let idx = top - d + j;
                prod[idx] = (prod[idx] + pk - (c * g) % pk) % pk;
            }
        }
        Elem(prod[..d].iter().map(|&c| c as u32).collect())
    }

    pub fn pow(&self, x: &Elem, mut e: u128) -> Elem {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn pow_big(&self, x: &Elem, e: &BigUint) -> Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, x);
            }
        }
        acc
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        x.0.iter().any(|&c| c as u64 % self.p != 0)
    }

    /// Largest `j` with `x ∈ p^j R`; `valuation(0) = s`.
    pub fn valuation(&self, x: &Elem) -> u32 {
        x.0.iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut c = c as u64;
                let mut v = 0;
                while c % self.p == 0 {
                    c /= self.p;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(self.s)
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, x: &Elem) -> Result<Elem> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit);
        }
        // x^{p^d - 2} inverts the residue; Newton steps lift it.
        let mut y = self.pow(x, self.residue_size() as u128 - 2);
        let two = self.from_int(2);
        let mut precision = 1;
        while precision < self.s {
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
            precision *= 2;
        }
        debug_assert_eq!(self.mul(x, &y), self.one());
        Ok(y)
    }

    /// `x / p^e`, defined modulo `p^{s-e}`; requires `valuation(x) >= e`.
    pub fn shift_down(&self, x: &Elem, e: u32) -> Elem {
        let pe = self.p.pow(e) as u32;
        Elem(x.0.iter().map(|&c| c / pe).collect())
    }

    /// `p^e · x`.
    pub fn shift_up(&self, x: &Elem, e: u32) -> Elem {
        if e >= self.s {
            return self.zero();
        }
        self.scale(x, self.p.pow(e))
    }

    /// Canonical representative of `x` modulo `p^e R`: coefficients reduced mod `p^e`.
    pub fn reduce_mod(&self, x: &Elem, e: u32) -> Elem {
        if e >= self.s {
            return x.clone();
        }
        let pe = self.p.pow(e) as u32;
        Elem(x.0.iter().map(|&c| c % pe).collect())
    }

    /// Some `c` with `a · c = b`, when `valuation(b) >= valuation(a)`.
    pub fn div_exact(&self, b: &Elem, a: &Elem) -> Option<Elem> {
        let va = self.valuation(a);
        let vb = self.valuation(b);
        if vb == self.s {
            return Some(self.zero());
        }
        if vb < va {
            return None;
        }
        let unit = self.shift_down(a, va);
        let inv = self.inv(&unit).ok()?;
        Some(self.mul(&self.shift_down(b, va), &inv))
    }

    /// Residue-field image: coefficients mod `p`, as an element of [`Self::residue_field`].
    pub fn residue(&self, x: &Elem) -> Elem {
        Elem(x.0.iter().map(|&c| (c as u64 % self.p) as u32).collect())
    }

    /// Coefficient-wise lift of a residue-field element.
    pub fn lift(&self, a: &Elem) -> Elem {
        a.clone()
    }

    /// Teichmüller representative of the residue class of `x`: `x^{Q^{s-1}}`, `Q = p^d`.
    pub fn teichmuller(&self, x: &Elem) -> Elem {
        if self.s == 1 {
            return x.clone();
        }
        let e = BigUint::from(self.residue_size()).pow(self.s - 1);
        if e.is_zero() {
            return self.one();
        }
        self.pow_big(x, &e)
    }

    /// Digits `t_0, ..., t_{s-1}` (Teichmüller representatives) with
    /// `x = Σ p^i t_i`.
    pub fn teichmuller_digits(&self, x: &Elem) -> Vec<Elem> {
        let mut digits = Vec::with_capacity(self.s as usize);
        let mut rest = x.clone();
        for _ in 0..self.s {
            let t = self.teichmuller(&rest);
            rest = self.shift_down(&self.sub(&rest, &t), 1);
            digits.push(t);
        }
        digits
    }

    /// `Σ p^i t_i`.
    pub fn from_digits(&self, digits: &[Elem]) -> Elem {
        digits
            .iter()
            .enumerate()
            .fold(self.zero(), |acc, (i, t)| self.add(&acc, &self.shift_up(t, i as u32)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> GaloisRing {
        GaloisRing::new(2, 2, &[0, 1]).unwrap()
    }

    fn gr4_2() -> GaloisRing {
        GaloisRing::new(2, 2, &[1, 1, 1]).unwrap()
    }

    #[test]
    fn z4_basics() {
        let r = z4();
        let two = r.from_int(2);
        assert!(r.add(&two, &two).is_zero());
        assert_eq!(r.inv(&r.from_int(3)).unwrap(), r.from_int(3));
        assert_eq!(r.valuation(&two), 1);
        assert_eq!(r.valuation(&r.zero()), 2);
        assert_eq!(r.inv(&two), Err(Error::NotAUnit));
        assert_eq!(r.residue(&two), r.residue_field().zero());
        assert_eq!(r.residue(&r.from_int(3)), r.residue_field().one());
    }

    #[test]
    fn gr4_2_units_invert() {
        let r = gr4_2();
        assert_eq!(r.cardinality(), 16);
        let units: Vec<_> = r.elements().filter(|x| r.is_unit(x)).collect();
        assert_eq!(units.len(), 12);
        for u in &units {
            assert_eq!(r.mul(u, &r.inv(u).unwrap()), r.one());
        }
    }

    #[test]
    fn valuation_is_multiplicative_up_to_s() {
        let r = gr4_2();
        for x in r.elements() {
            for y in r.elements() {
                let v = (r.valuation(&x) + r.valuation(&y)).min(r.s());
                assert_eq!(r.valuation(&r.mul(&x, &y)), v);
            }
        }
    }

    #[test]
    fn digits_reconstruct() {
        let r = z4();
        let d = r.teichmuller_digits(&r.from_int(3));
        assert_eq!(d, vec![r.from_int(1), r.from_int(1)]);
        let g = GaloisRing::new(3, 3, &[2, 2, 1]).unwrap();
        for i in (0..g.cardinality()).step_by(37) {
            let x = g.elem_at(i);
            assert_eq!(g.from_digits(&g.teichmuller_digits(&x)), x);
        }
    }

    #[test]
    fn div_exact_inverts_multiplication() {
        let r = GaloisRing::new(3, 2, &[0, 1]).unwrap();
        for a in r.elements() {
            for b in r.elements() {
                match r.div_exact(&b, &a) {
                    Some(c) => assert_eq!(r.mul(&a, &c), b),
                    None => assert!(r.valuation(&b) < r.valuation(&a)),
                }
            }
        }
    }
}
