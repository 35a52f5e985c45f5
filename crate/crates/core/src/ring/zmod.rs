//! Dense square matrices over `Z/p^s`, used for the Z-linear maps between
//! coefficient systems in the tower (Frobenius, embeddings, basis changes).

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: usize,
    pub modulus: u64,
    pub data: Vec<u64>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        ZMatrix { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<u64>], rows: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(rows, cols.len(), modulus);
        for (j, c) in cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v % modulus;
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * b) % self.modulus)
            })
            .collect()
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ZMatrix::zeros(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % self.modulus;
                }
            }
        }
        out
    }

    /// Inverse over `Z/p^s` by Gauss-Jordan with unit pivots.
    pub fn inverse(&self, p: u64) -> Result<ZMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let md = self.modulus;
        let mut a = self.clone();
        let mut inv = ZMatrix::identity(n, md);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col) % p != 0)
                .ok_or_else(|| Error::Dimension("matrix is singular modulo p".into()))?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let pinv = inv_unit(a.get(col, col), md, p);
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j] * pinv % md;
                inv.data[col * n + j] = inv.data[col * n + j] * pinv % md;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    a.data[r * n + j] = (a.data[r * n + j] + md - f * a.data[col * n + j] % md) % md;
                    inv.data[r * n + j] = (inv.data[r * n + j] + md - f * inv.data[col * n + j] % md) % md;
                }
            }
        }
        Ok(inv)
    }
}

/// Inverse of an integer unit modulo `md = p^s`.
pub fn inv_unit(a: u64, md: u64, p: u64) -> u64 {
    // a^{phi(md) - 1}
    let phi = md / p * (p - 1);
    let mut e = phi - 1;
    let mut base = a % md;
    let mut r = 1 % md;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % md;
        }
        base = base * base % md;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = ZMatrix { rows: 2, cols: 2, modulus: 9, data: vec![2, 3, 1, 5] };
        let inv = m.inverse(3).unwrap();
        assert_eq!(m.mul(&inv), ZMatrix::identity(2, 9));
        let singular = ZMatrix { rows: 2, cols: 2, modulus: 4, data: vec![2, 0, 0, 1] };
        assert!(singular.inverse(2).is_err());
    }
}
