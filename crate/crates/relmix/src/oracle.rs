//! Independent brute-force verifier. Recomputes every dimension the main
//! engine reported by a deliberately naive second route: lexicographic
//! monomial order, full generating sets materialized without memoization,
//! and fraction-free (division-free) Gaussian elimination modulo a second
//! prime. Shares only the multidegree type and the raw input descriptions
//! with the main engine; none of its linear algebra.

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::field::{PrimeField, DEFAULT_ORACLE_PRIME};
use crate::gring::{EngineDescription, ModuleSpec, Polynomial, TraceKey};
use itertools::Itertools;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub prime: u64,
    /// Queries whose piece degree has weight above this bound are skipped.
    pub size_bound: i64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            prime: DEFAULT_ORACLE_PRIME,
            size_bound: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub key: TraceKey,
    pub engine_value: u64,
    pub oracle_value: u64,
}

#[derive(Debug, Clone, Default)]
pub struct CrossCheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CrossCheckReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Replay every traced dimension against the oracle. Queries beyond the
/// size bound are counted as skipped, not checked; mismatches are data, not
/// errors.
pub fn cross_check(
    description: &EngineDescription,
    trace: &BTreeMap<TraceKey, u64>,
    config: &OracleConfig,
) -> Result<CrossCheckReport> {
    let oracle = Oracle::new(description, config)?;
    let mut report = CrossCheckReport::default();
    for (key, &engine_value) in trace {
        match oracle.dim(key) {
            Ok(oracle_value) => {
                report.checked += 1;
                if oracle_value != engine_value {
                    report.mismatches.push(Mismatch {
                        key: key.clone(),
                        engine_value,
                        oracle_value,
                    });
                }
            }
            Err(Error::SizeBound { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Dimension of one described piece by the naive route.
pub fn oracle_dim(
    description: &EngineDescription,
    query: &TraceKey,
    config: &OracleConfig,
) -> Result<u64> {
    Oracle::new(description, config)?.dim(query)
}

struct Oracle<'a> {
    desc: &'a EngineDescription,
    field: PrimeField,
    bound: i64,
    var_degrees: Vec<Multidegree>,
}

/// Oracle-side polynomial: monomial exponent vector -> coefficient mod the
/// oracle prime.
type OPoly = HashMap<Vec<u32>, u64>;

impl<'a> Oracle<'a> {
    fn new(desc: &'a EngineDescription, config: &OracleConfig) -> Result<Self> {
        let field = PrimeField::new(config.prime)?;
        let var_degrees = desc
            .ring
            .vars()
            .iter()
            .map(|v| v.degree.clone())
            .collect();
        Ok(Oracle {
            desc,
            field,
            bound: config.size_bound,
            var_degrees,
        })
    }

    fn check_bound(&self, deg: &Multidegree) -> Result<()> {
        if deg.weight() > self.bound {
            return Err(Error::SizeBound {
                weight: deg.weight(),
                bound: self.bound,
            });
        }
        Ok(())
    }

    fn dim(&self, query: &TraceKey) -> Result<u64> {
        match query {
            TraceKey::RingDim(deg) => {
                self.check_bound(deg)?;
                let monos = self.lex_monomials(deg);
                let rel = self.relation_rows(deg, &monos);
                Ok((monos.len() - ff_rank(rel, monos.len(), &self.field)) as u64)
            }
            TraceKey::IdealDim(deg) => {
                self.check_bound(deg)?;
                let monos = self.lex_monomials(deg);
                let rel = self.relation_rows(deg, &monos);
                Ok(ff_rank(rel, monos.len(), &self.field) as u64)
            }
            TraceKey::ModuleDim { module, v } => {
                self.check_bound(v)?;
                let monos = self.lex_monomials(v);
                match &self.desc.modules[*module] {
                    ModuleSpec::WholeRing => {
                        let rel = self.relation_rows(v, &monos);
                        Ok((monos.len() - ff_rank(rel, monos.len(), &self.field)) as u64)
                    }
                    ModuleSpec::Ideal(gens) => {
                        let rel = self.relation_rows(v, &monos);
                        let rel_rank = ff_rank(rel.clone(), monos.len(), &self.field);
                        let mut rows = rel;
                        rows.extend(self.multiple_rows(gens, v, &monos));
                        Ok((ff_rank(rows, monos.len(), &self.field) - rel_rank) as u64)
                    }
                    ModuleSpec::CyclicQuotient(gens) => {
                        let mut rows = self.relation_rows(v, &monos);
                        rows.extend(self.multiple_rows(gens, v, &monos));
                        Ok((monos.len() - ff_rank(rows, monos.len(), &self.field)) as u64)
                    }
                }
            }
            TraceKey::PowerDim {
                set,
                exps,
                module,
                v,
            } => {
                let seed_gens = &self.desc.seed_gens[*set];
                let mut target = v.clone();
                for (i, gens) in seed_gens.iter().enumerate() {
                    let d = self.poly_degree(&gens[0])?;
                    target = target.add_scaled(exps.get(i), &d);
                }
                self.check_bound(&target)?;
                let monos = self.lex_monomials(&target);
                let products = self.seed_products(seed_gens, exps);
                let spec = &self.desc.modules[*module];
                // base generators of [M]_v as oracle polynomials
                let base: Vec<OPoly> = match spec {
                    ModuleSpec::WholeRing | ModuleSpec::CyclicQuotient(_) => self
                        .lex_monomials(v)
                        .iter()
                        .map(|m| {
                            let mut p = OPoly::new();
                            p.insert(m.clone(), 1);
                            p
                        })
                        .collect(),
                    ModuleSpec::Ideal(gens) => self.generator_multiples(gens, v),
                };
                let mut power_rows = Vec::new();
                for prod in &products {
                    for b in &base {
                        let full = self.poly_mul(prod, b);
                        power_rows.push(self.poly_to_row(&full, &monos));
                    }
                }
                let mut denom_rows = self.relation_rows(&target, &monos);
                if let ModuleSpec::CyclicQuotient(gens) = spec {
                    denom_rows.extend(self.multiple_rows(gens, &target, &monos));
                }
                let denom_rank = ff_rank(denom_rows.clone(), monos.len(), &self.field);
                let mut all = denom_rows;
                all.extend(power_rows);
                Ok((ff_rank(all, monos.len(), &self.field) - denom_rank) as u64)
            }
        }
    }

    fn poly_degree(&self, poly: &Polynomial) -> Result<Multidegree> {
        self.desc.ring.multidegree_of(poly)
    }

    /// All monomials of the degree in descending lexicographic order on the
    /// exponent vectors (a different order than the main engine's).
    fn lex_monomials(&self, deg: &Multidegree) -> Vec<Vec<u32>> {
        if deg.has_negative() {
            return Vec::new();
        }
        let mut out: Vec<Vec<u32>> = Vec::new();
        let nvars = self.var_degrees.len();
        let mut exps = vec![0u32; nvars];
        fn rec(
            var: usize,
            remaining: Multidegree,
            exps: &mut Vec<u32>,
            degs: &[Multidegree],
            out: &mut Vec<Vec<u32>>,
        ) {
            if var == degs.len() {
                if remaining.is_zero() {
                    out.push(exps.clone());
                }
                return;
            }
            let d = &degs[var];
            let mut max_e = i64::MAX;
            for i in 0..d.rank() {
                if d.get(i) > 0 {
                    max_e = max_e.min(remaining.get(i) / d.get(i));
                }
            }
            // descending exponent: highest power of the earliest variable first
            for e in (0..=max_e).rev() {
                exps[var] = e as u32;
                rec(var + 1, remaining.add_scaled(-e, d), exps, degs, out);
            }
            exps[var] = 0;
        }
        rec(0, deg.clone(), &mut exps, &self.var_degrees, &mut out);
        out
    }

    fn poly_to_opoly(&self, poly: &Polynomial) -> OPoly {
        let mut out = OPoly::new();
        for (c, m) in &poly.terms {
            let v = self.field.reduce_i64(*c);
            let entry = out.entry(m.exponents().to_vec()).or_insert(0);
            *entry = self.field.add(*entry, v);
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn poly_mul(&self, a: &OPoly, b: &OPoly) -> OPoly {
        let mut out = OPoly::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let entry = out.entry(m).or_insert(0);
                *entry = self.field.add(*entry, self.field.mul(*ca, *cb));
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn poly_to_row(&self, poly: &OPoly, monos: &[Vec<u32>]) -> Vec<u64> {
        let index: HashMap<&Vec<u32>, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut row = vec![0u64; monos.len()];
        for (m, c) in poly {
            if let Some(&i) = index.get(m) {
                row[i] = self.field.add(row[i], *c);
            }
        }
        row
    }

    /// Rows for all monomial multiples of the given polynomials landing in
    /// the degree.
    fn multiple_rows(&self, gens: &[Polynomial], deg: &Multidegree, monos: &[Vec<u32>]) -> Vec<Vec<u64>> {
        self.generator_multiples(gens, deg)
            .iter()
            .map(|p| self.poly_to_row(p, monos))
            .collect()
    }

    fn generator_multiples(&self, gens: &[Polynomial], deg: &Multidegree) -> Vec<OPoly> {
        let mut out = Vec::new();
        for g in gens {
            let Ok(gdeg) = self.poly_degree(g) else {
                continue;
            };
            let shift = deg - &gdeg;
            if shift.has_negative() {
                continue;
            }
            let gp = self.poly_to_opoly(g);
            for m in self.lex_monomials(&shift) {
                let mut shifted = OPoly::new();
                shifted.insert(m, 1);
                out.push(self.poly_mul(&gp, &shifted));
            }
        }
        out
    }

    /// All relation multiples landing in the degree.
    fn relation_rows(&self, deg: &Multidegree, monos: &[Vec<u32>]) -> Vec<Vec<u64>> {
        self.multiple_rows(self.desc.ring.relations(), deg, monos)
    }

    /// Products of seed generators, one multiset of size exps_i from each
    /// seed, every combination materialized.
    fn seed_products(&self, seed_gens: &[Vec<Polynomial>], exps: &Multidegree) -> Vec<OPoly> {
        let mut acc: Vec<OPoly> = vec![{
            let mut one = OPoly::new();
            one.insert(vec![0; self.var_degrees.len()], 1);
            one
        }];
        for (i, gens) in seed_gens.iter().enumerate() {
            let e = exps.get(i) as usize;
            if e == 0 {
                continue;
            }
            let opolys: Vec<OPoly> = gens.iter().map(|g| self.poly_to_opoly(g)).collect();
            let mut next = Vec::new();
            for combo in (0..opolys.len()).combinations_with_replacement(e) {
                let mut prod = {
                    let mut one = OPoly::new();
                    one.insert(vec![0; self.var_degrees.len()], 1);
                    one
                };
                for j in combo {
                    prod = self.poly_mul(&prod, &opolys[j]);
                }
                for a in &acc {
                    next.push(self.poly_mul(a, &prod));
                }
            }
            acc = next;
        }
        acc
    }
}

/// Rank by fraction-free row elimination modulo the prime: pivot rows are
/// never normalized and no inverses are taken; duplicate rows are dropped
/// first.
fn ff_rank(mut rows: Vec<Vec<u64>>, cols: usize, field: &PrimeField) -> usize {
    rows.sort_unstable();
    rows.dedup();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let p = field.prime();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pos) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pos);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let piv = pivot_row[col];
        for row in tail.iter_mut() {
            let c = row[col];
            if c != 0 {
                let cneg = p - c;
                for (x, &y) in row.iter_mut().zip(pivot_row) {
                    // x <- piv * x - c * y, division-free
                    *x = (*x * piv % p + cneg * y % p) % p;
                }
                debug_assert_eq!(row[col], 0);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Multidegree;
    use crate::field::DEFAULT_PRIME;
    use crate::gring::{
        ModuleSpec, Monomial, MultigradedRing, ProblemEngine, RingTables, VarSpec,
    };
    use std::sync::Arc;

    fn md(v: Vec<i64>) -> Multidegree {
        Multidegree::new(v)
    }

    fn ring_p1(names: &[&str], rels: Vec<Polynomial>) -> Arc<MultigradedRing> {
        let vars = names
            .iter()
            .map(|n| VarSpec {
                name: n.to_string(),
                degree: md(vec![1]),
            })
            .collect();
        MultigradedRing::new(DEFAULT_PRIME, 1, vars, rels).unwrap()
    }

    #[test]
    fn ff_rank_basics() {
        let f = PrimeField::new(DEFAULT_ORACLE_PRIME).unwrap();
        let rows = vec![
            vec![1, 2, 3],
            vec![2, 4, 6], // dependent
            vec![0, 1, 1],
        ];
        assert_eq!(ff_rank(rows, 3, &f), 2);
        assert_eq!(ff_rank(vec![], 3, &f), 0);
    }

    #[test]
    fn oracle_counts_polynomial_ring() {
        // dim k[x0,x1,x2]_3 = 10
        let ring = ring_p1(&["x0", "x1", "x2"], vec![]);
        let tables = RingTables::new(ring).unwrap();
        let engine = ProblemEngine::new(tables);
        engine.dim_ring(&md(vec![3]));
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(report.checked, 1);
        assert!(report.is_clean());
        assert_eq!(
            oracle_dim(
                &engine.describe(),
                &TraceKey::RingDim(md(vec![3])),
                &OracleConfig::default()
            )
            .unwrap(),
            10
        );
    }

    #[test]
    fn oracle_agrees_on_quotient_and_powers() {
        // k[x,y]/(x^2 - y^2) with H = span(x): non-monomial relation
        let rel = Polynomial::from_terms(vec![
            (1, Monomial(vec![2, 0])),
            (-1, Monomial(vec![0, 2])),
        ]);
        let ring = ring_p1(&["x", "y"], vec![rel]);
        let tables = RingTables::new(ring).unwrap();
        let mut engine = ProblemEngine::new(tables);
        let set = engine
            .register_seed_set(vec![vec![Polynomial::monomial(2, 0)]])
            .unwrap();
        for v in 0..4i64 {
            engine.dim_ring(&md(vec![v]));
            for n in 0..4i64 {
                engine
                    .dim_power(set, &md(vec![n]), engine.whole_ring(), &md(vec![v]))
                    .unwrap();
            }
        }
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(report.is_clean(), "mismatches: {:?}", report.mismatches);
        assert!(report.checked >= 20);
    }

    #[test]
    fn oracle_agrees_on_modules() {
        let ring = ring_p1(&["x", "y"], vec![]);
        let tables = RingTables::new(ring).unwrap();
        let mut engine = ProblemEngine::new(tables);
        let ideal = engine
            .register_module(ModuleSpec::Ideal(vec![Polynomial::monomial(2, 0)]))
            .unwrap();
        let quot = engine
            .register_module(ModuleSpec::CyclicQuotient(vec![Polynomial::monomial(2, 1)]))
            .unwrap();
        let set = engine
            .register_seed_set(vec![vec![Polynomial::monomial(2, 0)]])
            .unwrap();
        for v in 0..4i64 {
            engine.dim_module(ideal, &md(vec![v])).unwrap();
            engine.dim_module(quot, &md(vec![v])).unwrap();
            engine
                .dim_power(set, &md(vec![2]), ideal, &md(vec![v]))
                .unwrap();
            engine
                .dim_power(set, &md(vec![2]), quot, &md(vec![v]))
                .unwrap();
        }
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(report.is_clean(), "mismatches: {:?}", report.mismatches);
    }

    #[test]
    fn size_bound_skips() {
        let ring = ring_p1(&["x", "y"], vec![]);
        let tables = RingTables::new(ring).unwrap();
        let engine = ProblemEngine::new(tables);
        engine.dim_ring(&md(vec![20]));
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(report.skipped, 1);
        assert_eq!(report.checked, 0);
    }

    #[test]
    fn corrupted_trace_is_flagged() {
        let ring = ring_p1(&["x", "y"], vec![]);
        let tables = RingTables::new(ring).unwrap();
        let engine = ProblemEngine::new(tables);
        engine.dim_ring(&md(vec![2]));
        engine.corrupt_trace_entry(&TraceKey::RingDim(md(vec![2])), 99);
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].engine_value, 99);
        assert_eq!(report.mismatches[0].oracle_value, 3);
    }

    #[test]
    fn characteristic_divisible_relation_is_flagged() {
        // relation with coefficient equal to the main prime: invisible to
        // the engine, visible to the oracle
        let rel = Polynomial::from_terms(vec![(DEFAULT_PRIME as i64, Monomial(vec![2, 0]))]);
        let ring = ring_p1(&["x", "y"], vec![rel]);
        let tables = RingTables::new(ring).unwrap();
        let engine = ProblemEngine::new(tables);
        engine.dim_ring(&md(vec![2]));
        let report = cross_check(
            &engine.describe(),
            &engine.trace_snapshot(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].engine_value, 3);
        assert_eq!(report.mismatches[0].oracle_value, 2);
    }
}
