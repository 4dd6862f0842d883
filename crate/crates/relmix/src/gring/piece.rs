//! Coordinatized subspaces of graded pieces and the memoizing engine that
//! computes products and powers of them.
//!
//! Every dimension the engine reports is recorded in a trace keyed by a
//! replayable description, so an independent verifier can recompute it from
//! the raw inputs.

use super::rref::RrefMatrix;
use super::tables::{enum_monomials, DegreeTable};
use super::{ModuleSpec, Monomial, MultigradedRing, Polynomial};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use dashmap::DashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

static RING_TABLE_IDS: AtomicU64 = AtomicU64::new(1);

/// Which basis the rows of a piece are written over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientBasis {
    /// All monomials of the degree in the ambient polynomial ring.
    Monomials,
    /// The standard monomials of the quotient piece.
    Quotient,
}

/// A subspace of one graded piece, stored in reduced row-echelon form over
/// the piece's basis. Canonical: equal subspaces have equal matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspacePiece {
    ring_id: u64,
    degree: Multidegree,
    ambient: AmbientBasis,
    rows: RrefMatrix,
}

impl SubspacePiece {
    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn dim(&self) -> usize {
        self.rows.rank()
    }

    pub fn ambient(&self) -> AmbientBasis {
        self.ambient
    }

    pub fn rows(&self) -> &RrefMatrix {
        &self.rows
    }

    pub fn contains(&self, other: &SubspacePiece) -> Result<bool> {
        if self.ring_id != other.ring_id
            || self.degree != other.degree
            || self.ambient != other.ambient
        {
            return Err(Error::RingMismatch);
        }
        Ok(self.rows.contains(&other.rows))
    }

    /// Span of the union.
    pub fn join(&self, other: &SubspacePiece) -> Result<SubspacePiece> {
        if self.ring_id != other.ring_id
            || self.degree != other.degree
            || self.ambient != other.ambient
        {
            return Err(Error::RingMismatch);
        }
        Ok(SubspacePiece {
            ring_id: self.ring_id,
            degree: self.degree.clone(),
            ambient: self.ambient,
            rows: self.rows.join(&other.rows),
        })
    }
}

/// Lazily built per-degree tables for one ring and prime. Immutable from the
/// outside; safe to share across threads.
#[derive(Debug)]
pub struct RingTables {
    id: u64,
    ring: Arc<MultigradedRing>,
    field: PrimeField,
    tables: DashMap<Multidegree, Arc<DegreeTable>>,
}

impl RingTables {
    pub fn new(ring: Arc<MultigradedRing>) -> Result<Arc<Self>> {
        let field = PrimeField::new(ring.prime())?;
        Ok(Arc::new(RingTables {
            id: RING_TABLE_IDS.fetch_add(1, Ordering::Relaxed),
            ring,
            field,
            tables: DashMap::new(),
        }))
    }

    pub fn ring(&self) -> &Arc<MultigradedRing> {
        &self.ring
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn table(&self, deg: &Multidegree) -> Arc<DegreeTable> {
        if let Some(t) = self.tables.get(deg) {
            return t.clone();
        }
        let built = Arc::new(DegreeTable::build(&self.ring, self.field, deg.clone()));
        self.tables.entry(deg.clone()).or_insert(built).clone()
    }

    /// dim `[B]_deg`; zero when any coordinate is negative.
    pub fn quotient_dim(&self, deg: &Multidegree) -> usize {
        self.table(deg).quotient_dim()
    }

    /// The monomials of the degree, in the fixed order.
    pub fn monomials(&self, deg: &Multidegree) -> Vec<Monomial> {
        enum_monomials(&self.ring, deg)
    }

    /// The standard-monomial basis of `[B]_deg`.
    pub fn quotient_basis(&self, deg: &Multidegree) -> Vec<Monomial> {
        self.table(deg).standard_monomials()
    }

    /// The span of relation multiples inside the full monomial basis.
    pub fn ideal_piece(&self, deg: &Multidegree) -> SubspacePiece {
        let t = self.table(deg);
        SubspacePiece {
            ring_id: self.id,
            degree: deg.clone(),
            ambient: AmbientBasis::Monomials,
            rows: t.ideal_rref(),
        }
    }

    /// Normal form of a multihomogeneous polynomial as coordinates over the
    /// quotient basis of its degree.
    pub fn normal_form(&self, poly: &Polynomial) -> Result<(Multidegree, Vec<u64>)> {
        let deg = self.ring.multidegree_of(poly)?;
        let coords = self.table(&deg).normal_form(poly)?;
        Ok((deg, coords))
    }

    pub fn zero_piece(&self, deg: &Multidegree) -> SubspacePiece {
        let t = self.table(deg);
        SubspacePiece {
            ring_id: self.id,
            degree: deg.clone(),
            ambient: AmbientBasis::Quotient,
            rows: RrefMatrix::new(self.field, t.quotient_dim()),
        }
    }

    pub fn full_piece(&self, deg: &Multidegree) -> SubspacePiece {
        let t = self.table(deg);
        SubspacePiece {
            ring_id: self.id,
            degree: deg.clone(),
            ambient: AmbientBasis::Quotient,
            rows: RrefMatrix::full(self.field, t.quotient_dim()),
        }
    }

    /// Span of the normal forms of the given polynomials (all of the same
    /// multidegree).
    pub fn span_piece(&self, deg: &Multidegree, polys: &[Polynomial]) -> Result<SubspacePiece> {
        let t = self.table(deg);
        let mut rows = RrefMatrix::new(self.field, t.quotient_dim());
        for poly in polys {
            let d = self.ring.multidegree_of(poly)?;
            if d != *deg {
                return Err(Error::InhomogeneousInput(format!(
                    "generator of degree {} in piece of degree {}",
                    d, deg
                )));
            }
            rows.insert(t.normal_form(poly)?);
        }
        Ok(SubspacePiece {
            ring_id: self.id,
            degree: deg.clone(),
            ambient: AmbientBasis::Quotient,
            rows,
        })
    }

    /// `[I]_v` for the ideal generated by `gens`: the span of all monomial
    /// multiples of the generators, reduced into the quotient piece.
    pub fn ideal_submodule_piece(
        &self,
        gens: &[Polynomial],
        v: &Multidegree,
    ) -> Result<SubspacePiece> {
        let t = self.table(v);
        let mut rows = RrefMatrix::new(self.field, t.quotient_dim());
        for g in gens {
            let gdeg = self.ring.multidegree_of(g)?;
            let shift = v - &gdeg;
            if shift.has_negative() {
                continue;
            }
            for m in enum_monomials(&self.ring, &shift) {
                let mut row = vec![0u64; t.quotient_dim()];
                for (c, mono) in &g.terms {
                    let prod = m.mul(mono);
                    if let Some(col) = t.monomial_index(&prod) {
                        t.accumulate_term(&mut row, col, self.field.reduce_i64(*c));
                    }
                }
                rows.insert(row);
            }
        }
        Ok(SubspacePiece {
            ring_id: self.id,
            degree: v.clone(),
            ambient: AmbientBasis::Quotient,
            rows,
        })
    }

    /// RREF span of all pairwise products of lifted basis elements, reduced
    /// into the quotient piece of the sum degree.
    pub fn product(&self, u: &SubspacePiece, v: &SubspacePiece) -> Result<SubspacePiece> {
        if u.ring_id != self.id || v.ring_id != self.id {
            return Err(Error::RingMismatch);
        }
        if u.ambient != AmbientBasis::Quotient || v.ambient != AmbientBasis::Quotient {
            return Err(Error::RingMismatch);
        }
        let target_deg = &u.degree + &v.degree;
        let target = self.table(&target_deg);
        let ustd = self.table(&u.degree).standard_monomials();
        let vstd = self.table(&v.degree).standard_monomials();
        let mut rows = RrefMatrix::new(self.field, target.quotient_dim());
        for ur in u.rows.rows() {
            for vr in v.rows.rows() {
                let mut row = vec![0u64; target.quotient_dim()];
                for (i, &uc) in ur.iter().enumerate() {
                    if uc == 0 {
                        continue;
                    }
                    for (j, &vc) in vr.iter().enumerate() {
                        if vc == 0 {
                            continue;
                        }
                        let mono = ustd[i].mul(&vstd[j]);
                        let col = target
                            .monomial_index(&mono)
                            .expect("product monomial in target degree");
                        target.accumulate_term(&mut row, col, self.field.mul(uc, vc));
                    }
                }
                rows.insert(row);
            }
        }
        Ok(SubspacePiece {
            ring_id: self.id,
            degree: target_deg,
            ambient: AmbientBasis::Quotient,
            rows,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedSetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleId(pub usize);

#[derive(Debug)]
struct SeedSet {
    pieces: Vec<SubspacePiece>,
    degrees: Vec<Multidegree>,
    gens: Vec<Vec<Polynomial>>,
}

impl std::fmt::Display for TraceKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceKey::RingDim(d) => write!(f, "dim B_{}", d),
            TraceKey::IdealDim(d) => write!(f, "dim I_{}", d),
            TraceKey::ModuleDim { module, v } => write!(f, "dim M{}_{}", module, v),
            TraceKey::PowerDim {
                set,
                exps,
                module,
                v,
            } => write!(f, "dim H{}^{} M{}_{}", set, exps, module, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceKey {
    /// dim [B]_deg
    RingDim(Multidegree),
    /// dim of the relation span at this degree, over the monomial basis
    IdealDim(Multidegree),
    /// dim [M]_v
    ModuleDim { module: usize, v: Multidegree },
    /// dim of H_1^{n_1}...H_q^{n_q} [M]_v as a subspace of the module piece
    PowerDim {
        set: usize,
        exps: Multidegree,
        module: usize,
        v: Multidegree,
    },
}

type PowerKey = (usize, Multidegree, usize, Multidegree);

/// Snapshot of a problem's inputs, sufficient to replay every traced
/// dimension independently.
#[derive(Debug, Clone)]
pub struct EngineDescription {
    pub ring: Arc<MultigradedRing>,
    pub seed_gens: Vec<Vec<Vec<Polynomial>>>,
    pub modules: Vec<ModuleSpec>,
}

/// Per-problem computation context: seed subspaces, the power-piece memo and
/// the dimension trace. Dropping it clears all per-problem state.
pub struct ProblemEngine {
    tables: Arc<RingTables>,
    seed_sets: Vec<SeedSet>,
    modules: Vec<ModuleSpec>,
    memo: DashMap<PowerKey, Arc<SubspacePiece>>,
    trace: DashMap<TraceKey, u64>,
}

impl ProblemEngine {
    pub fn new(tables: Arc<RingTables>) -> Self {
        ProblemEngine {
            tables,
            seed_sets: Vec::new(),
            modules: vec![ModuleSpec::WholeRing],
            memo: DashMap::new(),
            trace: DashMap::new(),
        }
    }

    pub fn tables(&self) -> &Arc<RingTables> {
        &self.tables
    }

    pub fn whole_ring(&self) -> ModuleId {
        ModuleId(0)
    }

    /// Register a list of seed subspaces, each given by generators of one
    /// common multidegree. Every seed must be nonzero.
    pub fn register_seed_set(&mut self, gens: Vec<Vec<Polynomial>>) -> Result<SeedSetId> {
        let mut pieces = Vec::with_capacity(gens.len());
        let mut degrees = Vec::with_capacity(gens.len());
        for hs in &gens {
            if hs.is_empty() {
                return Err(Error::Invalid("seed subspace has no generators".into()));
            }
            let deg = self.tables.ring().multidegree_of(&hs[0])?;
            let piece = self.tables.span_piece(&deg, hs)?;
            if piece.dim() == 0 {
                return Err(Error::Invalid(format!(
                    "seed subspace at degree {} is zero",
                    deg
                )));
            }
            pieces.push(piece);
            degrees.push(deg);
        }
        self.seed_sets.push(SeedSet {
            pieces,
            degrees,
            gens,
        });
        Ok(SeedSetId(self.seed_sets.len() - 1))
    }

    pub fn register_module(&mut self, spec: ModuleSpec) -> Result<ModuleId> {
        spec.validate(self.tables.ring())?;
        if spec == ModuleSpec::WholeRing {
            return Ok(ModuleId(0));
        }
        self.modules.push(spec);
        Ok(ModuleId(self.modules.len() - 1))
    }

    pub fn seed_degrees(&self, set: SeedSetId) -> &[Multidegree] {
        &self.seed_sets[set.0].degrees
    }

    pub fn seed_piece(&self, set: SeedSetId, i: usize) -> &SubspacePiece {
        &self.seed_sets[set.0].pieces[i]
    }

    pub fn describe(&self) -> EngineDescription {
        EngineDescription {
            ring: self.tables.ring().clone(),
            seed_gens: self.seed_sets.iter().map(|s| s.gens.clone()).collect(),
            modules: self.modules.clone(),
        }
    }

    pub fn trace_snapshot(&self) -> std::collections::BTreeMap<TraceKey, u64> {
        self.trace
            .iter()
            .map(|e| (e.key().clone(), *e.value()))
            .collect()
    }

    /// Inject a wrong value into the trace (test hook for the verifier).
    pub fn corrupt_trace_entry(&self, key: &TraceKey, value: u64) {
        self.trace.insert(key.clone(), value);
    }

    /// dim [B]_deg, traced.
    pub fn dim_ring(&self, deg: &Multidegree) -> u64 {
        let d = self.tables.quotient_dim(deg) as u64;
        self.trace.insert(TraceKey::RingDim(deg.clone()), d);
        d
    }

    /// dim of the relation span at this degree, traced.
    pub fn dim_ideal(&self, deg: &Multidegree) -> u64 {
        let d = self.tables.table(deg).ideal_dim() as u64;
        self.trace.insert(TraceKey::IdealDim(deg.clone()), d);
        d
    }

    fn module_spec(&self, module: ModuleId) -> &ModuleSpec {
        &self.modules[module.0]
    }

    /// dim [M]_v, traced.
    pub fn dim_module(&self, module: ModuleId, v: &Multidegree) -> Result<u64> {
        let d = match self.module_spec(module) {
            ModuleSpec::WholeRing => self.tables.quotient_dim(v) as u64,
            ModuleSpec::Ideal(gens) => self.tables.ideal_submodule_piece(gens, v)?.dim() as u64,
            ModuleSpec::CyclicQuotient(gens) => {
                let total = self.tables.quotient_dim(v) as u64;
                let j = self.tables.ideal_submodule_piece(gens, v)?.dim() as u64;
                total - j
            }
        };
        self.trace.insert(
            TraceKey::ModuleDim {
                module: module.0,
                v: v.clone(),
            },
            d,
        );
        Ok(d)
    }

    /// The subspace H_1^{n_1}...H_q^{n_q} [M]_v inside the quotient piece of
    /// degree v + sum n_i d_i. For a cyclic quotient module the returned
    /// piece is the preimage in the ring piece (the span plus the
    /// denominator ideal's piece); its dimension minus the ideal piece's
    /// dimension is the module-subspace dimension.
    pub fn power_piece(
        &self,
        set: SeedSetId,
        exps: &Multidegree,
        module: ModuleId,
        v: &Multidegree,
    ) -> Result<Arc<SubspacePiece>> {
        if exps.has_negative() {
            return Err(Error::NegativeExponent(exps.to_string()));
        }
        let q = self.seed_sets[set.0].pieces.len();
        if exps.rank() != q {
            return Err(Error::Invalid(format!(
                "exponent tuple {} does not match {} seeds",
                exps, q
            )));
        }
        let key: PowerKey = (set.0, exps.clone(), module.0, v.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let piece = if exps.is_zero() {
            match self.module_spec(module) {
                ModuleSpec::WholeRing | ModuleSpec::CyclicQuotient(_) => self.tables.full_piece(v),
                ModuleSpec::Ideal(gens) => self.tables.ideal_submodule_piece(gens, v)?,
            }
        } else {
            let i = (0..q).rev().find(|&i| exps.get(i) > 0).unwrap();
            let prev_exps = exps - &Multidegree::unit(q, i);
            let prev = self.power_piece(set, &prev_exps, module, v)?;
            let mut next = self
                .tables
                .product(&self.seed_sets[set.0].pieces[i], &prev)?;
            if let ModuleSpec::CyclicQuotient(gens) = self.module_spec(module) {
                let j = self.tables.ideal_submodule_piece(gens, next.degree())?;
                next = next.join(&j)?;
            }
            next
        };
        let arc = Arc::new(piece);
        self.memo.insert(key, arc.clone());
        Ok(arc)
    }

    /// dim of H^exps [M]_v as a subspace of the module piece, traced.
    pub fn dim_power(
        &self,
        set: SeedSetId,
        exps: &Multidegree,
        module: ModuleId,
        v: &Multidegree,
    ) -> Result<u64> {
        let piece = self.power_piece(set, exps, module, v)?;
        let d = match self.module_spec(module) {
            ModuleSpec::WholeRing | ModuleSpec::Ideal(_) => piece.dim() as u64,
            ModuleSpec::CyclicQuotient(gens) => {
                let j = self.tables.ideal_submodule_piece(gens, piece.degree())?;
                (piece.dim() - j.dim()) as u64
            }
        };
        self.trace.insert(
            TraceKey::PowerDim {
                set: set.0,
                exps: exps.clone(),
                module: module.0,
                v: v.clone(),
            },
            d,
        );
        Ok(d)
    }
}
