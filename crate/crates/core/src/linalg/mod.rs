//! Matrices over the rings of the tower and their normal forms.

mod howell;
mod smith;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Elem, GaloisRing, RingCtx, RingVector};

pub use howell::{howell_form, span_membership, HowellForm};
pub use smith::{is_free_span, min_generators, smith_exponents, smith_like_form, SmithResult};

/// Row-major matrix over one ring of the tower.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    ring: Arc<GaloisRing>,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        f.debug_struct("RingMatrix").field("rows", &rows).finish()
    }
}

impl RingMatrix {
    pub fn zeros(ring: Arc<GaloisRing>, rows: usize, cols: usize) -> Self {
        let entries = vec![ring.zero(); rows * cols];
        RingMatrix { ring, rows, cols, entries }
    }

    pub fn identity(ring: Arc<GaloisRing>, n: usize) -> Self {
        let mut m = Self::zeros(ring.clone(), n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ring.one();
        }
        m
    }

    /// Matrix with the given rows; all rows must have length `cols`.
    pub fn from_rows(ring: Arc<GaloisRing>, cols: usize, rows: &[RingVector]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row of length {} in a {cols}-column matrix", bad.len())));
        }
        Ok(RingMatrix {
            ring,
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    /// Convenience constructor from integers (for `Z_{p^s}`-style rings).
    pub fn from_ints(ring: Arc<GaloisRing>, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<RingVector> = rows
            .iter()
            .map(|r| r.iter().map(|&v| ring.from_int(v)).collect())
            .collect();
        Self::from_rows(ring, cols, &rows).expect("rectangular input")
    }

    pub fn ring(&self) -> &Arc<GaloisRing> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Elem {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<RingVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Elem::is_zero)
    }

    pub fn mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = RingMatrix::zeros(r.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = r.mul(a, other.at(k, j));
                    r.add_assign(out.at_mut(i, j), &prod);
                }
            }
        }
        Ok(out)
    }

    /// `x · M` for a row vector `x`.
    pub fn combine_rows(&self, coeffs: &[Elem]) -> RingVector {
        let r = &self.ring;
        let mut out = vec![r.zero(); self.cols];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(self.row(i)) {
                r.add_assign(o, &r.mul(c, e));
            }
        }
        out
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_dst -= f · row_src`.
    pub(crate) fn row_axpy(&mut self, dst: usize, src: usize, f: &Elem) {
        if f.is_zero() {
            return;
        }
        let r = self.ring.clone();
        for j in 0..self.cols {
            let t = r.mul(f, self.at(src, j));
            let v = r.sub(self.at(dst, j), &t);
            *self.at_mut(dst, j) = v;
        }
    }

    /// `col_dst -= f · col_src`.
    pub(crate) fn col_axpy(&mut self, dst: usize, src: usize, f: &Elem) {
        if f.is_zero() {
            return;
        }
        let r = self.ring.clone();
        for i in 0..self.rows {
            let t = r.mul(f, self.at(i, src));
            let v = r.sub(self.at(i, dst), &t);
            *self.at_mut(i, dst) = v;
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, f: &Elem) {
        let r = self.ring.clone();
        for j in 0..self.cols {
            let v = r.mul(f, self.at(i, j));
            *self.at_mut(i, j) = v;
        }
    }
}

/// Coordinates of `v ∈ S^n` over the degree-`ℓ` subring: length `n·m/ℓ`,
/// the coordinates of `v_i` occupying block `i`.
pub fn sbar_expand(ctx: &RingCtx, v: &[Elem], ell: usize) -> Result<RingVector> {
    let sub = ctx.subring(ell)?;
    Ok(v.iter().flat_map(|x| sub.expand(x)).collect())
}

/// Inverse of [`sbar_expand`].
pub fn sbar_combine(ctx: &RingCtx, coords: &[Elem], ell: usize) -> Result<RingVector> {
    let sub = ctx.subring(ell)?;
    let block = sub.rank_of_s();
    if coords.len() % block != 0 {
        return Err(Error::Dimension(format!("{} coordinates, block size {block}", coords.len())));
    }
    Ok(coords.chunks(block).map(|c| sub.combine(ctx.ring(), c)).collect())
}

/// The `n × m` matrix over `R` whose row `i` holds the `R`-coordinates of `v_i`.
pub fn r_expand(ctx: &RingCtx, v: &[Elem]) -> RingMatrix {
    let base = ctx.base();
    let rows: Vec<RingVector> = v.iter().map(|x| base.expand(x)).collect();
    RingMatrix::from_rows(base.ring().clone(), ctx.spec().m, &rows).expect("m coordinates per entry")
}

/// Matrix over `S̄` whose rows are the expansions of the given vectors of `S^n`.
pub fn sbar_matrix(ctx: &RingCtx, ell: usize, vectors: &[RingVector]) -> Result<RingMatrix> {
    let sub = ctx.subring(ell)?;
    let n = vectors.first().map_or(0, |v| v.len());
    let rows = vectors
        .iter()
        .map(|v| sbar_expand(ctx, v, ell))
        .collect::<Result<Vec<_>>>()?;
    RingMatrix::from_rows(sub.ring().clone(), n * sub.rank_of_s(), &rows)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};

    #[test]
    fn expand_identity_when_ell_is_m() {
        let ctx = build_ring(RingSpec::new(2, 2, 1, 2, 2)).unwrap();
        let s = ctx.ring();
        let v = vec![s.elem_at(5), s.elem_at(11)];
        assert_eq!(sbar_expand(&ctx, &v, 2).unwrap(), v);
    }

    #[test]
    fn r_expand_basis_digits() {
        let ctx = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        let s = ctx.ring();
        let basis = ctx.sbar_basis(1).unwrap();
        let r = ctx.base().ring();
        // x = a·b0 + b·b1
        let x = s.add(&s.scale(&basis[0], 3), &s.scale(&basis[1], 2));
        let m = r_expand(&ctx, &[x]);
        assert_eq!(m.row(0), &[r.from_int(3), r.from_int(2)]);
    }

    #[test]
    fn sbar_round_trip_exhaustive() {
        let ctx = build_ring(RingSpec::new(2, 2, 1, 2, 1)).unwrap();
        for v in ctx.enumerate_vectors(2, crate::ring::Domain::Ambient).unwrap() {
            let c = sbar_expand(&ctx, &v, 1).unwrap();
            assert_eq!(c.len(), 4);
            assert_eq!(sbar_combine(&ctx, &c, 1).unwrap(), v);
        }
    }
}
