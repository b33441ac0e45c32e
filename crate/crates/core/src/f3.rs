//! The field `F_3` and sparse matrices over it.

use crate::error::{domain, Result};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "i8")]
pub struct F3(u8);

impl F3 {
    pub const ZERO: F3 = F3(0);
    pub const ONE: F3 = F3(1);
    pub const TWO: F3 = F3(2);

    pub fn new(v: i64) -> Self {
        F3(v.rem_euclid(3) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// `0`, `1` or `-1`.
    pub fn signed(self) -> i8 {
        match self.0 {
            2 => -1,
            v => v as i8,
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; every nonzero element is its own inverse.
    pub fn inv(self) -> Option<F3> {
        (self.0 != 0).then_some(self)
    }
}

impl From<F3> for i8 {
    fn from(x: F3) -> i8 {
        x.signed()
    }
}

impl std::fmt::Display for F3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.signed())
    }
}

impl std::ops::Add for F3 {
    type Output = F3;
    fn add(self, o: F3) -> F3 {
        F3((self.0 + o.0) % 3)
    }
}

impl std::ops::Sub for F3 {
    type Output = F3;
    fn sub(self, o: F3) -> F3 {
        F3((self.0 + 3 - o.0) % 3)
    }
}

impl std::ops::Neg for F3 {
    type Output = F3;
    fn neg(self) -> F3 {
        F3((3 - self.0) % 3)
    }
}

impl std::ops::Mul for F3 {
    type Output = F3;
    fn mul(self, o: F3) -> F3 {
        F3((self.0 * o.0) % 3)
    }
}

/// Below this many columns rank is computed by dense elimination.
pub const DENSE_THRESHOLD: usize = 64;

/// Column-major sparse matrix; each column is sorted by row with no zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseF3Matrix {
    rows: usize,
    columns: Vec<Vec<(usize, F3)>>,
}

impl SparseF3Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseF3Matrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, F3)>>) -> Result<Self> {
        let mut m = SparseF3Matrix::new(rows, columns.len());
        for (c, col) in columns.into_iter().enumerate() {
            for (r, v) in col {
                if r >= rows {
                    return Err(domain(format!("row {r} out of range {rows}")));
                }
                m.add_to(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn from_dense(d: &[Vec<i64>]) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let mut m = SparseF3Matrix::new(rows, cols);
        for (r, row) in d.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.add_to(r, c, F3::new(*v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, F3)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> F3 {
        self.columns[c]
            .binary_search_by_key(&r, |e| e.0)
            .map(|k| self.columns[c][k].1)
            .unwrap_or(F3::ZERO)
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: F3) {
        assert!(r < self.rows, "row out of range");
        let col = &mut self.columns[c];
        match col.binary_search_by_key(&r, |e| e.0) {
            Ok(k) => {
                col[k].1 = col[k].1 + v;
                if col[k].1.is_zero() {
                    col.remove(k);
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    col.insert(k, (r, v));
                }
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseF3Matrix {
        SparseF3Matrix { rows: self.rows, columns: cols.iter().map(|&c| self.columns[c].clone()).collect() }
    }

    /// Rows kept by `keep`, renumbered in increasing order.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> SparseF3Matrix {
        let mut map = vec![usize::MAX; self.rows];
        let mut n = 0;
        for (r, slot) in map.iter_mut().enumerate() {
            if keep(r) {
                *slot = n;
                n += 1;
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|col| col.iter().filter(|e| map[e.0] != usize::MAX).map(|&(r, v)| (map[r], v)).collect())
            .collect();
        SparseF3Matrix { rows: n, columns }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseF3Matrix) -> Result<SparseF3Matrix> {
        if self.cols() != other.rows {
            return Err(domain(format!("shape mismatch {}x{} * {}x{}", self.rows, self.cols(), other.rows, other.cols())));
        }
        let mut out = SparseF3Matrix::new(self.rows, other.cols());
        for (c, col) in other.columns.iter().enumerate() {
            for &(k, v) in col {
                for &(r, w) in &self.columns[k] {
                    out.add_to(r, c, v * w);
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.cols()]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] = v.value();
            }
        }
        d
    }

    pub fn rank(&self) -> usize {
        if self.cols() < DENSE_THRESHOLD {
            self.rank_dense()
        } else {
            self.rank_sparse()
        }
    }

    pub fn rank_dense(&self) -> usize {
        let mut d = self.to_dense();
        let (rows, cols) = (self.rows, self.cols());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| d[r][c] != 0) else { continue };
            d.swap(rank, p);
            let inv = d[rank][c]; // self-inverse in F_3
            for x in d[rank].iter_mut() {
                *x = (*x * inv) % 3;
            }
            for r in 0..rows {
                if r != rank && d[r][c] != 0 {
                    let f = d[r][c];
                    for k in 0..cols {
                        d[r][k] = (d[r][k] + 3 * 3 - f * d[rank][k]) % 3;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Column reduction keyed on the lowest nonzero row of each column.
    pub fn rank_sparse(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<(usize, F3)>> = HashMap::new();
        for col in &self.columns {
            let mut v = col.clone();
            while let Some(&(low, coeff)) = v.last() {
                match pivots.get(&low) {
                    Some(p) => {
                        let f = coeff * p.last().unwrap().1.inv().unwrap();
                        v = axpy(&v, p, -f);
                    }
                    None => {
                        pivots.insert(low, v);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols() - self.rank()
    }
}

/// `x + f y` for sorted sparse vectors.
fn axpy(x: &[(usize, F3)], y: &[(usize, F3)], f: F3) -> Vec<(usize, F3)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (r, v) = if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            i += 1;
            x[i - 1]
        } else if i == x.len() || y[j].0 < x[i].0 {
            j += 1;
            (y[j - 1].0, y[j - 1].1 * f)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, x[i - 1].1 + y[j - 1].1 * f)
        };
        if !v.is_zero() {
            out.push((r, v));
        }
    }
    out
}
