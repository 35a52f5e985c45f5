//! Diagonalization over a Galois ring.
//!
//! Pivot = entry of least valuation in the trailing block (ties: smallest row,
//! then smallest column). Every entry of that row and column is then an exact
//! multiple of the pivot, so elimination never leaves the ring and the
//! exponents come out ascending.

use super::RingMatrix;

#[derive(Clone, Debug)]
pub struct SmithResult {
    pub u: RingMatrix,
    pub v: RingMatrix,
    /// Diagonal, with `γ^{e_i}` at position `(i, i)`.
    pub d: RingMatrix,
    /// Ascending exponents in `[0, s]`, one per diagonal position.
    pub exps: Vec<u32>,
}

/// `U · M · V = D` with `U`, `V` invertible.
pub fn smith_like_form(m: &RingMatrix) -> SmithResult {
    diagonalize(m, true)
}

/// Only the exponents; skips the transforms.
pub fn smith_exponents(m: &RingMatrix) -> Vec<u32> {
    diagonalize(m, false).exps
}

fn diagonalize(m: &RingMatrix, track: bool) -> SmithResult {
    let ring = m.ring().clone();
    let s = ring.s();
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = RingMatrix::identity(ring.clone(), if track { rows } else { 0 });
    let mut v = RingMatrix::identity(ring.clone(), if track { cols } else { 0 });
    let diag = rows.min(cols);
    let mut exps = Vec::with_capacity(diag);

    for t in 0..diag {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let val = ring.valuation(a.at(i, j));
                if val < s && best.map_or(true, |(b, _, _)| val < b) {
                    best = Some((val, i, j));
                    if val == 0 {
                        break;
                    }
                }
            }
            if best.map_or(false, |(b, _, _)| b == 0) {
                break;
            }
        }
        let Some((e, pi, pj)) = best else {
            exps.extend(std::iter::repeat(s).take(diag - t));
            break;
        };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if track {
            u.swap_rows(t, pi);
            v.swap_cols(t, pj);
        }
        let unit = ring.shift_down(a.at(t, t), e);
        let unit_inv = ring.inv(&unit).expect("pivot cofactor is a unit");
        a.scale_row(t, &unit_inv);
        if track {
            u.scale_row(t, &unit_inv);
        }
        for i in t + 1..rows {
            let f = ring.shift_down(a.at(i, t), e);
            a.row_axpy(i, t, &f);
            if track {
                u.row_axpy(i, t, &f);
            }
        }
        for j in t + 1..cols {
            let f = ring.shift_down(a.at(t, j), e);
            a.col_axpy(j, t, &f);
            if track {
                v.col_axpy(j, t, &f);
            }
        }
        exps.push(e);
    }
    SmithResult { u, v, d: a, exps }
}

/// Minimal number of generators of the row span.
pub fn min_generators(m: &RingMatrix) -> usize {
    let s = m.ring().s();
    smith_exponents(m).iter().filter(|&&e| e < s).count()
}

/// Whether the row span is free, and its rank when it is (0 otherwise
/// counts only the unit invariant factors).
pub fn is_free_span(m: &RingMatrix) -> (bool, usize) {
    let s = m.ring().s();
    let exps = smith_exponents(m);
    let free = exps.iter().all(|&e| e == 0 || e == s);
    (free, exps.iter().filter(|&&e| e == 0).count())
}
