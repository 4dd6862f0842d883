//! Multidegrees: integer tuples indexing the graded pieces of a ring and the
//! axes of evaluation grids.

use std::fmt;
use std::ops::{Add, Sub};

/// A tuple of signed integers. The length is the grading rank of the ambient
/// ring (or the arity of a grid). Comparison is componentwise; the weight is
/// the coordinate sum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree(Vec<i64>);

impl Multidegree {
    pub fn new(entries: Vec<i64>) -> Self {
        Multidegree(entries)
    }

    pub fn zero(rank: usize) -> Self {
        Multidegree(vec![0; rank])
    }

    pub fn ones(rank: usize) -> Self {
        Multidegree(vec![1; rank])
    }

    /// The i-th elementary vector of the given rank.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Multidegree(v)
    }

    pub fn constant(rank: usize, value: i64) -> Self {
        Multidegree(vec![value; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: i64) {
        self.0[i] = value;
    }

    /// Coordinate sum.
    pub fn weight(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Componentwise `self >= other`.
    pub fn ge(&self, other: &Self) -> bool {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn has_negative(&self) -> bool {
        !self.is_nonnegative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// True if some coordinate is nonzero and exactly one coordinate is 1,
    /// the rest 0 (an elementary vector).
    pub fn is_unit_vector(&self) -> bool {
        self.0.iter().filter(|&&a| a != 0).count() == 1 && self.0.iter().any(|&a| a == 1)
    }

    pub fn componentwise_max(&self, other: &Self) -> Self {
        Multidegree(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: i64, other: &Self) -> Self {
        Multidegree(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }
}

impl Add<&Multidegree> for &Multidegree {
    type Output = Multidegree;
    fn add(self, rhs: &Multidegree) -> Multidegree {
        self.add_scaled(1, rhs)
    }
}

impl Sub<&Multidegree> for &Multidegree {
    type Output = Multidegree;
    fn sub(self, rhs: &Multidegree) -> Multidegree {
        self.add_scaled(-1, rhs)
    }
}

impl fmt::Debug for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for Multidegree {
    fn from(v: Vec<i64>) -> Self {
        Multidegree(v)
    }
}

/// Iterate the integer box `[origin, origin + extent)` in row-major order
/// (last axis fastest). Deterministic; used for both grid evaluation and
/// exponent enumeration.
pub fn box_points(origin: &Multidegree, extent: &[usize]) -> Vec<Multidegree> {
    assert_eq!(origin.rank(), extent.len());
    let total: usize = extent.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = origin.clone();
    if total == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        // increment with carry, last axis fastest
        let mut axis = extent.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            cur.set(axis, cur.get(axis) + 1);
            if cur.get(axis) < origin.get(axis) + extent[axis] as i64 {
                break;
            }
            cur.set(axis, origin.get(axis));
        }
    }
}

/// All nonnegative tuples of the given rank with coordinate sum `total`.
pub fn compositions(rank: usize, total: i64) -> Vec<Multidegree> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn rec(cur: &mut Vec<i64>, axis: usize, rest: i64, out: &mut Vec<Multidegree>) {
        if axis + 1 == cur.len() {
            cur[axis] = rest;
            out.push(Multidegree::new(cur.clone()));
            return;
        }
        for v in 0..=rest {
            cur[axis] = v;
            rec(cur, axis + 1, rest - v, out);
        }
    }
    if rank == 0 {
        if total == 0 {
            out.push(Multidegree::new(vec![]));
        }
        return out;
    }
    rec(&mut cur, 0, total, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn componentwise_order() {
        let a = Multidegree::new(vec![2, 3]);
        let b = Multidegree::new(vec![1, 3]);
        assert!(a.ge(&b));
        assert!(!b.ge(&a));
        assert_eq!(a.weight(), 5);
    }

    #[test]
    fn box_points_row_major() {
        let pts = box_points(&Multidegree::new(vec![1, 2]), &[2, 2]);
        let flat: Vec<Vec<i64>> = pts.iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(flat, vec![vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3]]);
    }

    #[test]
    fn compositions_count() {
        // stars and bars: C(4+2-1, 2-1) = 5
        assert_eq!(compositions(2, 4).len(), 5);
        assert_eq!(compositions(3, 2).len(), 6);
        assert!(compositions(2, 0)[0].is_zero());
    }
}
