//! Exact degreewise linear algebra over GF(p): multigraded polynomial rings
//! with homogeneous relations, monomial enumeration, graded pieces of ideals,
//! normal forms in the quotient, and products/powers of coordinatized
//! subspaces.

mod piece;
mod rref;
mod tables;

pub use piece::{
    AmbientBasis, EngineDescription, ModuleId, ProblemEngine, RingTables, SeedSetId,
    SubspacePiece, TraceKey,
};
pub use rref::RrefMatrix;
pub use tables::DegreeTable;

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use std::fmt;
use std::sync::Arc;

/// A monomial as an exponent vector indexed by the ring's variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Graded reverse lexicographic comparison for monomials of equal
    /// multidegree: a > b iff the last nonzero entry of a - b is negative.
    pub fn grevlex_gt(&self, other: &Monomial) -> bool {
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return a < b;
            }
        }
        false
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{:?}", self.0)
    }
}

/// A polynomial with integer coefficients in the ring's variables. The
/// coefficients stay as integers so the same input can be reduced modulo
/// different primes (main engine vs. verification).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub terms: Vec<(i64, Monomial)>,
}

impl Polynomial {
    pub fn from_terms(terms: Vec<(i64, Monomial)>) -> Self {
        Polynomial { terms }
    }

    pub fn monomial(nvars: usize, var: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[var] = 1;
        Polynomial {
            terms: vec![(1, m)],
        }
    }

    pub fn is_zero_modulo(&self, field: &PrimeField) -> bool {
        // terms may repeat a monomial; sum coefficients first
        let mut acc: std::collections::HashMap<&Monomial, i64> = std::collections::HashMap::new();
        for (c, m) in &self.terms {
            *acc.entry(m).or_insert(0) += c;
        }
        acc.values().all(|&c| field.reduce_i64(c) == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpec {
    pub name: String,
    pub degree: Multidegree,
}

/// An immutable multigraded polynomial ring over GF(p) with homogeneous
/// defining relations. Graded pieces are coordinatized lazily by
/// [`RingTables`].
#[derive(Debug)]
pub struct MultigradedRing {
    prime: u64,
    grading_rank: usize,
    vars: Vec<VarSpec>,
    relations: Vec<Polynomial>,
    relation_degrees: Vec<Multidegree>,
}

impl MultigradedRing {
    pub fn new(
        prime: u64,
        grading_rank: usize,
        vars: Vec<VarSpec>,
        relations: Vec<Polynomial>,
    ) -> Result<Arc<Self>> {
        PrimeField::new(prime)?;
        if grading_rank == 0 {
            return Err(Error::Invalid("grading rank must be at least 1".into()));
        }
        for v in &vars {
            if v.degree.rank() != grading_rank {
                return Err(Error::Invalid(format!(
                    "variable {} has degree of rank {} (expected {})",
                    v.name,
                    v.degree.rank(),
                    grading_rank
                )));
            }
            if !v.degree.is_nonnegative() || v.degree.weight() < 1 {
                return Err(Error::Invalid(format!(
                    "variable {} must have nonnegative degree of weight >= 1",
                    v.name
                )));
            }
        }
        let mut relation_degrees = Vec::with_capacity(relations.len());
        for rel in &relations {
            relation_degrees.push(multidegree_of(rel, &vars, grading_rank).map_err(|e| {
                match e {
                    Error::InhomogeneousInput(s) => Error::InhomogeneousRelation(s),
                    other => other,
                }
            })?);
        }
        Ok(Arc::new(MultigradedRing {
            prime,
            grading_rank,
            vars,
            relations,
            relation_degrees,
        }))
    }

    /// Same presentation over a different prime.
    pub fn with_prime(&self, prime: u64) -> Result<Arc<Self>> {
        MultigradedRing::new(
            prime,
            self.grading_rank,
            self.vars.clone(),
            self.relations.clone(),
        )
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn grading_rank(&self) -> usize {
        self.grading_rank
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn relation_degrees(&self) -> &[Multidegree] {
        &self.relation_degrees
    }

    /// Every variable degree is an elementary vector.
    pub fn is_standard(&self) -> bool {
        self.vars.iter().all(|v| v.degree.is_unit_vector())
    }

    /// Number of variables of degree e_i, per block.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.grading_rank];
        for v in &self.vars {
            for i in 0..self.grading_rank {
                if v.degree == Multidegree::unit(self.grading_rank, i) {
                    counts[i] += 1;
                }
            }
        }
        counts
    }

    pub fn multidegree_of(&self, poly: &Polynomial) -> Result<Multidegree> {
        multidegree_of(poly, &self.vars, self.grading_rank)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Multidegree {
        let mut d = Multidegree::zero(self.grading_rank);
        for (e, v) in m.0.iter().zip(&self.vars) {
            d = d.add_scaled(*e as i64, &v.degree);
        }
        d
    }
}

fn multidegree_of(poly: &Polynomial, vars: &[VarSpec], rank: usize) -> Result<Multidegree> {
    let mut deg: Option<Multidegree> = None;
    for (_, m) in &poly.terms {
        if m.0.len() != vars.len() {
            return Err(Error::Invalid("monomial arity mismatch".into()));
        }
        let mut d = Multidegree::zero(rank);
        for (e, v) in m.0.iter().zip(vars) {
            d = d.add_scaled(*e as i64, &v.degree);
        }
        match &deg {
            None => deg = Some(d),
            Some(prev) if *prev == d => {}
            Some(prev) => {
                return Err(Error::InhomogeneousInput(format!(
                    "terms of degrees {} and {}",
                    prev, d
                )))
            }
        }
    }
    deg.ok_or_else(|| Error::InhomogeneousInput("zero polynomial has no degree".into()))
}

/// The three module shapes the engine computes with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    WholeRing,
    Ideal(Vec<Polynomial>),
    CyclicQuotient(Vec<Polynomial>),
}

impl ModuleSpec {
    pub fn validate(&self, ring: &MultigradedRing) -> Result<()> {
        let gens = match self {
            ModuleSpec::WholeRing => return Ok(()),
            ModuleSpec::Ideal(g) | ModuleSpec::CyclicQuotient(g) => g,
        };
        for g in gens {
            ring.multidegree_of(g)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, deg: Vec<i64>) -> VarSpec {
        VarSpec {
            name: name.into(),
            degree: Multidegree::new(deg),
        }
    }

    #[test]
    fn standardness() {
        let r = MultigradedRing::new(
            32003,
            2,
            vec![var("x", vec![1, 0]), var("y", vec![0, 1])],
            vec![],
        )
        .unwrap();
        assert!(r.is_standard());
        assert_eq!(r.block_sizes(), vec![1, 1]);

        let r2 = MultigradedRing::new(32003, 1, vec![var("x", vec![2])], vec![]).unwrap();
        assert!(!r2.is_standard());
    }

    #[test]
    fn rejects_inhomogeneous_relation() {
        let nv = 2;
        let x = Monomial(vec![1, 0]);
        let y2 = Monomial(vec![0, 2]);
        let rel = Polynomial::from_terms(vec![(1, x), (1, y2)]);
        let err = MultigradedRing::new(
            32003,
            1,
            vec![var("x", vec![1]), var("y", vec![1])],
            vec![rel],
        )
        .unwrap_err();
        assert_eq!(err.kind(), "InhomogeneousRelation");
        let _ = nv;
    }

    #[test]
    fn grevlex_within_degree() {
        // degree 2 in k[x,y]: x^2 > xy > y^2
        let x2 = Monomial(vec![2, 0]);
        let xy = Monomial(vec![1, 1]);
        let y2 = Monomial(vec![0, 2]);
        assert!(x2.grevlex_gt(&xy));
        assert!(xy.grevlex_gt(&y2));
        assert!(!y2.grevlex_gt(&x2));
    }
}
