//! Per-degree coordinate data for a ring: the monomial basis of the ambient
//! piece, the span of relation multiples in echelon form, and the
//! standard-monomial basis of the quotient piece.

use super::rref::RrefMatrix;
use super::{Monomial, MultigradedRing, Polynomial};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use std::collections::HashMap;

/// Sparse row: (column, value) pairs, ascending columns, values nonzero.
type SparseRow = Vec<(u32, u64)>;

/// Echelon-form span of the relation multiples over the full monomial basis
/// of one degree. Rows are stored sparsely (monomial relations give unit
/// rows); a dense scratch buffer makes insertion cheap either way.
#[derive(Debug)]
struct IdealReducer {
    cols: usize,
    pivot_of_col: Vec<Option<u32>>,
    rows: Vec<SparseRow>,
}

impl IdealReducer {
    fn new(cols: usize) -> Self {
        IdealReducer {
            cols,
            pivot_of_col: vec![None; cols],
            rows: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert one sparse row, forward-reducing against the echelon rows.
    /// `scratch` must be an all-zero buffer of length `cols`; it is returned
    /// all-zero.
    fn insert(&mut self, field: &PrimeField, entries: &[(u32, u64)], scratch: &mut [u64]) {
        if entries.is_empty() {
            return;
        }
        let p = field.prime();
        let mut first = self.cols;
        let mut end = 0usize;
        for &(c, v) in entries {
            let c = c as usize;
            scratch[c] = field.add(scratch[c], v);
            first = first.min(c);
            end = end.max(c + 1);
        }
        let mut c = first;
        let mut pivot = None;
        while c < end {
            if scratch[c] == 0 {
                c += 1;
                continue;
            }
            match self.pivot_of_col[c] {
                Some(r) => {
                    let coef = scratch[c];
                    let cneg = p - coef;
                    for &(rc, rv) in &self.rows[r as usize] {
                        let rc = rc as usize;
                        scratch[rc] = (scratch[rc] + cneg * rv) % p;
                        end = end.max(rc + 1);
                    }
                    debug_assert_eq!(scratch[c], 0);
                    c += 1;
                }
                None => {
                    pivot = Some(c);
                    break;
                }
            }
        }
        if let Some(pc) = pivot {
            let inv = field.inv(scratch[pc]);
            let mut row: SparseRow = Vec::new();
            for (i, s) in scratch.iter_mut().enumerate().take(end).skip(pc) {
                if *s != 0 {
                    row.push((i as u32, field.mul(*s, inv)));
                    *s = 0;
                }
            }
            self.pivot_of_col[pc] = Some(self.rows.len() as u32);
            self.rows.push(row);
        } else {
            for s in scratch.iter_mut().take(end).skip(first) {
                *s = 0;
            }
        }
    }
}

/// Everything needed to compute in the graded piece `[B]_deg`.
#[derive(Debug)]
pub struct DegreeTable {
    degree: Multidegree,
    /// Monomials of this multidegree in the ambient polynomial ring,
    /// graded-reverse-lexicographic descending.
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    ideal: IdealReducer,
    /// Non-pivot columns, ascending: the standard monomials of the quotient.
    std_cols: Vec<usize>,
    /// Column -> position in the standard basis (None for pivot columns).
    col_to_std: Vec<Option<usize>>,
    /// Pivot column -> normal form of its monomial over the standard basis,
    /// stored sparsely.
    pivot_nf: HashMap<usize, SparseRow>,
    field: PrimeField,
}

impl DegreeTable {
    pub fn build(ring: &MultigradedRing, field: PrimeField, degree: Multidegree) -> Self {
        let monomials = enum_monomials(ring, &degree);
        let index: HashMap<Monomial, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let cols = monomials.len();
        let mut ideal = IdealReducer::new(cols);
        let mut scratch = vec![0u64; cols];
        let mut entries: Vec<(u32, u64)> = Vec::new();
        for (rel, rel_deg) in ring.relations().iter().zip(ring.relation_degrees()) {
            let shift = &degree - rel_deg;
            if shift.has_negative() {
                continue;
            }
            for m in enum_monomials(ring, &shift) {
                entries.clear();
                for (c, mono) in &rel.terms {
                    let v = field.reduce_i64(*c);
                    if v != 0 {
                        entries.push((index[&m.mul(mono)] as u32, v));
                    }
                }
                entries.sort_unstable_by_key(|e| e.0);
                ideal.insert(&field, &entries, &mut scratch);
            }
        }
        let mut col_to_std = vec![None; cols];
        let mut std_cols = Vec::with_capacity(cols - ideal.rank());
        for c in 0..cols {
            if ideal.pivot_of_col[c].is_none() {
                col_to_std[c] = Some(std_cols.len());
                std_cols.push(c);
            }
        }
        // Normal form of each pivot monomial over the standard basis, by
        // back-substitution right to left: the echelon row for pivot c reads
        // m_c = -sum_{c' > c} row[c'] m_{c'}, and every m_{c'} is either
        // standard or already resolved.
        let mut pivot_nf: HashMap<usize, SparseRow> = HashMap::with_capacity(ideal.rank());
        let mut acc = vec![0u64; std_cols.len()];
        for c in (0..cols).rev() {
            let Some(r) = ideal.pivot_of_col[c] else {
                continue;
            };
            let row = &ideal.rows[r as usize];
            let mut touched: Vec<usize> = Vec::new();
            for &(rc, rv) in row.iter().skip(1) {
                let rc = rc as usize;
                let neg = field.neg(rv);
                match col_to_std[rc] {
                    Some(s) => {
                        if acc[s] == 0 && neg != 0 {
                            touched.push(s);
                        }
                        acc[s] = field.add(acc[s], neg);
                    }
                    None => {
                        for &(s, v) in &pivot_nf[&rc] {
                            let s = s as usize;
                            let add = field.mul(neg, v);
                            if acc[s] == 0 && add != 0 {
                                touched.push(s);
                            }
                            acc[s] = field.add(acc[s], add);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut nf: SparseRow = Vec::with_capacity(touched.len());
            for s in touched {
                if acc[s] != 0 {
                    nf.push((s as u32, acc[s]));
                }
                acc[s] = 0;
            }
            pivot_nf.insert(c, nf);
        }
        DegreeTable {
            degree,
            monomials,
            index,
            ideal,
            std_cols,
            col_to_std,
            pivot_nf,
            field,
        }
    }

    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// All monomials of this multidegree in the ambient polynomial ring.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// dim of the relation span inside the ambient piece.
    pub fn ideal_dim(&self) -> usize {
        self.ideal.rank()
    }

    /// The relation span as a canonical RREF matrix over the monomial basis.
    /// Rebuilt on demand; meant for inspection at desk-scale degrees.
    pub fn ideal_rref(&self) -> RrefMatrix {
        let mut m = RrefMatrix::new(self.field, self.monomials.len());
        for row in &self.ideal.rows {
            let mut dense = vec![0u64; self.monomials.len()];
            for &(c, v) in row {
                dense[c as usize] = v;
            }
            m.insert(dense);
        }
        m
    }

    /// dim `[B]_deg`.
    pub fn quotient_dim(&self) -> usize {
        self.std_cols.len()
    }

    /// The standard monomials (quotient basis), in the fixed order.
    pub fn standard_monomials(&self) -> Vec<Monomial> {
        self.std_cols
            .iter()
            .map(|&c| self.monomials[c].clone())
            .collect()
    }

    pub fn std_cols(&self) -> &[usize] {
        &self.std_cols
    }

    /// Accumulate `coeff * NF(monomial at col)` into a standard-coordinate
    /// vector.
    #[inline]
    pub fn accumulate_term(&self, out: &mut [u64], col: usize, coeff: u64) {
        if coeff == 0 {
            return;
        }
        match self.col_to_std[col] {
            Some(s) => out[s] = self.field.add(out[s], coeff),
            None => {
                let p = self.field.prime();
                for &(s, v) in &self.pivot_nf[&col] {
                    let x = &mut out[s as usize];
                    *x = (*x + coeff * v) % p;
                }
            }
        }
    }

    /// Normal form of a multihomogeneous polynomial of this degree, as
    /// coordinates over the standard basis.
    pub fn normal_form(&self, poly: &Polynomial) -> Result<Vec<u64>> {
        let mut out = vec![0u64; self.quotient_dim()];
        for (c, m) in &poly.terms {
            let col = self
                .index
                .get(m)
                .copied()
                .ok_or_else(|| Error::InhomogeneousInput(format!("term {:?} off-degree", m)))?;
            self.accumulate_term(&mut out, col, self.field.reduce_i64(*c));
        }
        Ok(out)
    }
}

/// The monomials of multidegree `deg`, graded-reverse-lexicographic
/// descending on the declared variable order. Empty when a coordinate is
/// negative or no exponent vector matches.
pub fn enum_monomials(ring: &MultigradedRing, deg: &Multidegree) -> Vec<Monomial> {
    if deg.has_negative() {
        return Vec::new();
    }
    let nvars = ring.num_vars();
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    let var_degs: Vec<&Multidegree> = ring.vars().iter().map(|v| &v.degree).collect();
    fn rec(
        var: usize,
        remaining: Multidegree,
        exps: &mut Vec<u32>,
        var_degs: &[&Multidegree],
        out: &mut Vec<Monomial>,
    ) {
        if var == var_degs.len() {
            if remaining.is_zero() {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let d = var_degs[var];
        // max exponent bounded by any coordinate d touches
        let mut max_e = i64::MAX;
        for i in 0..d.rank() {
            if d.get(i) > 0 {
                max_e = max_e.min(remaining.get(i) / d.get(i));
            }
        }
        debug_assert!(max_e < i64::MAX);
        for e in 0..=max_e {
            exps[var] = e as u32;
            rec(var + 1, remaining.add_scaled(-e, d), exps, var_degs, out);
        }
        exps[var] = 0;
    }
    rec(0, deg.clone(), &mut exps, &var_degs, &mut out);
    out.sort_by(|a, b| {
        if a.grevlex_gt(b) {
            std::cmp::Ordering::Less
        } else if b.grevlex_gt(a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    out
}
