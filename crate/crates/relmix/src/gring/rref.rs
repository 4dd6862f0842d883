//! Reduced row-echelon matrices over GF(p) with incremental row insertion.
//!
//! The representation is canonical: rows are kept fully reduced against each
//! other, pivots normalized to 1, and sorted by pivot column. Two subspaces
//! are equal iff their `RrefMatrix` values are equal, and the result is
//! independent of insertion order.

use crate::field::PrimeField;

#[derive(Debug, Clone)]
pub struct RrefMatrix {
    field: PrimeField,
    cols: usize,
    /// Rows sorted by pivot column, each normalized and reduced.
    rows: Vec<Vec<u64>>,
    /// Pivot column of each row, ascending.
    pivots: Vec<usize>,
    /// Column -> index into `rows` of the row pivoting there.
    pivot_of_col: Vec<Option<u32>>,
}

impl PartialEq for RrefMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.cols == other.cols && self.rows == other.rows
    }
}

impl Eq for RrefMatrix {}

impl RrefMatrix {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        RrefMatrix {
            field,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_of_col: vec![None; cols],
        }
    }

    /// Identity basis of the full space.
    pub fn full(field: PrimeField, cols: usize) -> Self {
        let mut rows = Vec::with_capacity(cols);
        for i in 0..cols {
            let mut r = vec![0u64; cols];
            r[i] = 1;
            rows.push(r);
        }
        RrefMatrix {
            field,
            cols,
            rows,
            pivots: (0..cols).collect(),
            pivot_of_col: (0..cols as u32).map(Some).collect(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Reduce `row` against the current rows in place. A single
    /// left-to-right pass suffices: reduced rows have entries only at their
    /// pivot and at non-pivot columns to its right, so elimination never
    /// reintroduces an earlier pivot column.
    pub fn reduce(&self, row: &mut [u64]) {
        debug_assert_eq!(row.len(), self.cols);
        for c in 0..self.cols {
            if row[c] == 0 {
                continue;
            }
            if let Some(r) = self.pivot_of_col[c] {
                let coef = row[c];
                axpy_neg(&self.field, row, coef, &self.rows[r as usize]);
            }
        }
    }

    /// Insert a row, returning true if it enlarged the span.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        self.reduce(&mut row);
        let pivot = match row.iter().position(|&x| x != 0) {
            Some(c) => c,
            None => return false,
        };
        // normalize
        let inv = self.field.inv(row[pivot]);
        if inv != 1 {
            for x in row.iter_mut() {
                if *x != 0 {
                    *x = self.field.mul(*x, inv);
                }
            }
        }
        // eliminate the new pivot column from existing rows
        for r in self.rows.iter_mut() {
            let c = r[pivot];
            if c != 0 {
                axpy_neg(&self.field, r, c, &row);
            }
        }
        let pos = self.pivots.partition_point(|&pc| pc < pivot);
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, row);
        for slot in self.pivot_of_col.iter_mut() {
            if let Some(r) = slot {
                if *r >= pos as u32 {
                    *r += 1;
                }
            }
        }
        self.pivot_of_col[pivot] = Some(pos as u32);
        true
    }

    /// Does the span contain this vector?
    pub fn contains_vector(&self, row: &[u64]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|&x| x == 0)
    }

    /// Is `other` a subspace of `self`? Both must share the column space.
    pub fn contains(&self, other: &RrefMatrix) -> bool {
        debug_assert_eq!(self.cols, other.cols);
        other.rows.iter().all(|r| self.contains_vector(r))
    }

    /// Span of the union of both row spaces.
    pub fn join(&self, other: &RrefMatrix) -> RrefMatrix {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r.clone());
        }
        out
    }
}

/// `row -= c * other` over GF(p).
#[inline]
fn axpy_neg(field: &PrimeField, row: &mut [u64], c: u64, other: &[u64]) {
    let p = field.prime();
    let cneg = p - c;
    for (x, &y) in row.iter_mut().zip(other) {
        if y != 0 {
            *x = (*x + cneg * y) % p;
        }
    }
}
