//! Howell form over a Galois ring, used as the canonical key of a row span.
//!
//! Convention:
//! - rows are in echelon form with strictly increasing pivot columns;
//! - each pivot equals `γ^e` exactly;
//! - entries above a pivot `γ^e` are reduced modulo `γ^e` (coefficients mod `p^e`);
//! - zero rows are dropped;
//! - after a pivot `γ^e` is fixed, `γ^{s-e}` times its row is fed back into the
//!   remaining rows, so every element of the span vanishing on the first `c`
//!   columns lies in the span of the rows with pivot column `>= c`.

use serde::Serialize;

use super::RingMatrix;
use crate::ring::{Elem, RingVector};

/// Howell form plus pivot bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HowellForm {
    /// Rows of the form, top to bottom.
    pub rows: Vec<RingVector>,
    /// `(column, exponent)` of each row's pivot.
    pub pivots: Vec<(usize, u32)>,
}

impl HowellForm {
    pub fn as_matrix(&self, template: &RingMatrix) -> RingMatrix {
        RingMatrix::from_rows(template.ring().clone(), template.cols(), &self.rows).expect("same width")
    }

    /// `log_Q |span|` with `Q` the residue size: `Σ (s - e_i)`.
    pub fn log_size(&self, s: u32) -> u32 {
        self.pivots.iter().map(|&(_, e)| s - e).sum()
    }
}

pub fn howell_form(m: &RingMatrix) -> HowellForm {
    let ring = m.ring();
    let s = ring.s();
    let mut pool: Vec<RingVector> = m
        .row_vectors()
        .into_iter()
        .filter(|r| !r.iter().all(Elem::is_zero))
        .collect();
    let mut rows: Vec<RingVector> = Vec::new();
    let mut pivots = Vec::new();

    for c in 0..m.cols() {
        let Some((idx, e)) = pool
            .iter()
            .enumerate()
            .map(|(i, r)| (i, ring.valuation(&r[c])))
            .filter(|&(_, v)| v < s)
            .min_by_key(|&(i, v)| (v, i))
        else {
            continue;
        };
        let mut pivot_row = pool.remove(idx);
        let unit = ring.shift_down(&pivot_row[c], e);
        let unit_inv = ring.inv(&unit).expect("pivot cofactor is a unit");
        for x in pivot_row.iter_mut() {
            *x = ring.mul(&unit_inv, x);
        }
        for r in pool.iter_mut() {
            let f = ring.shift_down(&r[c], e);
            if f.is_zero() {
                continue;
            }
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x = ring.sub(x, &ring.mul(&f, y));
            }
        }
        if e > 0 {
            let closure: RingVector = pivot_row.iter().map(|x| ring.shift_up(x, s - e)).collect();
            pool.push(closure);
        }
        pool.retain(|r| !r.iter().all(Elem::is_zero));
        rows.push(pivot_row);
        pivots.push((c, e));
    }

    for i in 0..rows.len() {
        let (c, e) = pivots[i];
        for j in 0..i {
            let x = rows[j][c].clone();
            let reduced = ring.reduce_mod(&x, e);
            if reduced == x {
                continue;
            }
            let f = ring.shift_down(&ring.sub(&x, &reduced), e);
            let (head, tail) = rows.split_at_mut(i);
            for (a, b) in head[j].iter_mut().zip(&tail[0]) {
                *a = ring.sub(a, &ring.mul(&f, b));
            }
        }
    }
    HowellForm { rows, pivots }
}

/// Whether `v` lies in the span described by a Howell form.
pub fn span_membership(form: &HowellForm, v: &[Elem], ring: &crate::ring::GaloisRing) -> bool {
    let mut v = v.to_vec();
    let mut col = 0;
    for (row, &(c, e)) in form.rows.iter().zip(&form.pivots) {
        if v[col..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        if ring.valuation(&v[c]) < e {
            return false;
        }
        let f = ring.shift_down(&v[c], e);
        for (x, y) in v.iter_mut().zip(row) {
            *x = ring.sub(x, &ring.mul(&f, y));
        }
        col = c + 1;
    }
    v.iter().all(Elem::is_zero)
}
