//! Rational maps between projective spaces through their graphs: bigraded
//! piece dimensions of the graph coordinate ring, multidegrees and projective
//! degrees, exceptional-divisor multidegrees, and the three-route comparison
//! of two nested linear systems.
//!
//! The graph's bigraded ring is never presented by generators and relations;
//! every piece is a product span inside the ambient polynomial ring.

use crate::degree::{compositions, Multidegree};
use crate::error::{Error, Result};
use crate::gring::{
    EngineDescription, ModuleId, MultigradedRing, Polynomial, ProblemEngine, RingTables,
    SeedSetId, TraceKey, VarSpec,
};
use crate::hilbert::FitConfig;
use crate::multiplicity::{fit_lambda_leading, FitCertificate};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A linear system: degree-d forms on P^r in the given coordinates.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub var_names: Vec<String>,
    pub degree: i64,
    pub forms: Vec<Polynomial>,
}

impl LinearSystem {
    /// Validates homogeneity and derives the common degree.
    pub fn new(var_names: Vec<String>, forms: Vec<Polynomial>) -> Result<Self> {
        if var_names.len() < 2 {
            return Err(Error::Invalid(
                "a linear system needs at least two ambient variables".into(),
            ));
        }
        if forms.is_empty() {
            return Err(Error::Invalid("a linear system needs at least one form".into()));
        }
        // degree check via a scratch ring
        let ring = ambient_ring(&var_names, crate::field::DEFAULT_PRIME)?;
        let mut degree = None;
        for f in &forms {
            let d = ring.multidegree_of(f)?.get(0);
            match degree {
                None => degree = Some(d),
                Some(prev) if prev == d => {}
                Some(prev) => {
                    return Err(Error::InhomogeneousInput(format!(
                        "forms of degrees {} and {}",
                        prev, d
                    )))
                }
            }
        }
        let degree = degree.unwrap();
        if degree < 1 {
            return Err(Error::Invalid("forms must have degree >= 1".into()));
        }
        Ok(LinearSystem {
            var_names,
            degree,
            forms,
        })
    }

    /// Dimension of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        self.var_names.len() - 1
    }
}

fn ambient_ring(var_names: &[String], prime: u64) -> Result<Arc<MultigradedRing>> {
    let vars = var_names
        .iter()
        .map(|n| VarSpec {
            name: n.clone(),
            degree: Multidegree::new(vec![1]),
        })
        .collect();
    MultigradedRing::new(prime, 1, vars, vec![])
}

/// One or two linear systems computed against a shared ambient ring and
/// memo cache.
pub struct MapsProblem {
    engine: ProblemEngine,
    sets: Vec<SeedSetId>,
    systems: Vec<LinearSystem>,
    r: usize,
    config: FitConfig,
}

impl MapsProblem {
    pub fn new(systems: &[&LinearSystem], prime: u64, config: FitConfig) -> Result<Self> {
        let first = systems
            .first()
            .ok_or_else(|| Error::Invalid("no linear system given".into()))?;
        for s in systems {
            if s.var_names != first.var_names {
                return Err(Error::Invalid(
                    "all systems must share the ambient coordinates".into(),
                ));
            }
        }
        let ring = ambient_ring(&first.var_names, prime)?;
        let tables = RingTables::new(ring)?;
        let mut engine = ProblemEngine::new(tables);
        let mut sets = Vec::new();
        for s in systems {
            sets.push(engine.register_seed_set(vec![s.forms.clone()])?);
        }
        Ok(MapsProblem {
            engine,
            sets,
            systems: systems.iter().map(|s| (*s).clone()).collect(),
            r: first.ambient_dim(),
            config,
        })
    }

    pub fn engine(&self) -> &ProblemEngine {
        &self.engine
    }

    pub fn describe(&self) -> EngineDescription {
        self.engine.describe()
    }

    pub fn trace_snapshot(&self) -> BTreeMap<TraceKey, u64> {
        self.engine.trace_snapshot()
    }

    fn whole(&self) -> ModuleId {
        self.engine.whole_ring()
    }

    /// dim of the span of monomial multiples of b-fold form products in
    /// ambient degree a + b d: the bigraded piece of the graph ring.
    pub fn rees_piece(&self, system: usize, a: i64, b: i64) -> Result<u64> {
        if a < 0 || b < 0 {
            return Ok(0);
        }
        self.engine.dim_power(
            self.sets[system],
            &Multidegree::new(vec![b]),
            self.whole(),
            &Multidegree::new(vec![a]),
        )
    }

    /// Multidegrees of the graph: the weight-r normalized leading
    /// coefficients of the certified bigraded fit of the rees pieces.
    pub fn graph_multidegrees(&self, system: usize) -> Result<GraphDegrees> {
        let r = self.r as i64;
        let (fit, gamma) = fit_lambda_leading(
            |point: &Multidegree| self.rees_piece(system, point.get(0), point.get(1)),
            2,
            r,
            None,
            &self.config,
        )?;
        let base_slot = Multidegree::new(vec![r, 0]);
        let base = gamma.get(&base_slot).copied();
        if base != Some(1) {
            return Err(Error::Invalid(format!(
                "graph multidegree at {} is {:?}, expected 1 (uncertified fit?)",
                base_slot, base
            )));
        }
        Ok(GraphDegrees {
            r: self.r,
            d: self.systems[system].degree,
            gamma,
            certificate: FitCertificate::from_fit(&fit),
        })
    }

    /// Compare two registered systems `small ⊆ big` by all three routes; see
    /// [`compare_linear_systems`].
    pub fn compare(&self, small: usize, big: usize) -> Result<CompareReport> {
        let (sys_small, sys_big) = (&self.systems[small], &self.systems[big]);
        if sys_small.degree != sys_big.degree {
            return Err(Error::Invalid(format!(
                "systems have different form degrees {} and {}",
                sys_small.degree, sys_big.degree
            )));
        }
        // containment of spans in the degree-d piece
        let tables = self.engine.tables();
        let deg = Multidegree::new(vec![sys_small.degree]);
        let span_small = tables.span_piece(&deg, &sys_small.forms)?;
        let span_big = tables.span_piece(&deg, &sys_big.forms)?;
        if !span_big.contains(&span_small)? {
            return Err(Error::Invalid(
                "the first system is not contained in the second".into(),
            ));
        }

        // route (a): multiplicity criterion through piece-dimension callbacks
        let r = self.r as i64;
        let (fit, leads) = fit_lambda_leading(
            |point: &Multidegree| {
                let big_dim = self.rees_piece(big, point.get(0), point.get(1))?;
                let small_dim = self.rees_piece(small, point.get(0), point.get(1))?;
                big_dim.checked_sub(small_dim).ok_or_else(|| {
                    Error::Invalid("internal: small system piece exceeds big system piece".into())
                })
            },
            2,
            r,
            None,
            &self.config,
        )?;
        let multiplicity_route = leads.values().all(|&v| v == 0);

        // route (b) and (c): two independent graph-degree computations
        let graph_small = self.graph_multidegrees(small)?;
        let graph_big = self.graph_multidegrees(big)?;
        let degrees_small = graph_small.projective_degrees();
        let degrees_big = graph_big.projective_degrees();
        let degree_route = degrees_small == degrees_big;
        let exceptional_small = graph_small.exceptional_multidegrees()?;
        let exceptional_big = graph_big.exceptional_multidegrees()?;
        let exceptional_route = exceptional_small == exceptional_big;

        if multiplicity_route != degree_route || degree_route != exceptional_route {
            return Err(Error::CriteriaDisagreement(format!(
                "multiplicity route {}, degree route {}, exceptional route {}",
                multiplicity_route, degree_route, exceptional_route
            )));
        }
        Ok(CompareReport {
            multiplicity_route,
            degree_route,
            exceptional_route,
            degrees_small,
            degrees_big,
            exceptional_small,
            exceptional_big,
            multiplicities: leads,
            certificate: FitCertificate::from_fit(&fit),
        })
    }
}

/// Multidegrees of the graph of a rational map, plus the derived projective
/// degrees and exceptional-divisor multidegrees.
#[derive(Debug, Clone)]
pub struct GraphDegrees {
    pub r: usize,
    pub d: i64,
    /// (n1, n2) with n1 + n2 = r -> multidegree of the graph
    pub gamma: BTreeMap<Multidegree, u64>,
    pub certificate: FitCertificate,
}

impl GraphDegrees {
    /// d_i = gamma[(r - i, i)] for i = 0..r.
    pub fn projective_degrees(&self) -> Vec<u64> {
        let r = self.r as i64;
        (0..=r)
            .map(|i| {
                self.gamma
                    .get(&Multidegree::new(vec![r - i, i]))
                    .copied()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// deg^{(n1,n2)}(E) = d * gamma[(n1+1, n2)] - gamma[(n1, n2+1)] for
    /// n1 + n2 = r - 1; all values must be nonnegative.
    pub fn exceptional_multidegrees(&self) -> Result<BTreeMap<Multidegree, u64>> {
        let mut out = BTreeMap::new();
        if self.r == 0 {
            return Ok(out);
        }
        for slot in compositions(2, self.r as i64 - 1) {
            let up = Multidegree::new(vec![slot.get(0) + 1, slot.get(1)]);
            let right = Multidegree::new(vec![slot.get(0), slot.get(1) + 1]);
            let value = self.d as i128 * self.gamma.get(&up).copied().unwrap_or(0) as i128
                - self.gamma.get(&right).copied().unwrap_or(0) as i128;
            if value < 0 {
                return Err(Error::NegativeExceptionalDegree {
                    slot: slot.to_string(),
                    value: value as i64,
                });
            }
            out.insert(slot, value as u64);
        }
        Ok(out)
    }
}

/// The three equivalent conditions for the induced map between the graphs of
/// two nested linear systems to be finite birational, each computed by its
/// own route.
#[derive(Debug, Clone)]
pub struct CompareReport {
    /// (a) vanishing of the relative mixed multiplicities of the bigraded
    /// pair of graph rings
    pub multiplicity_route: bool,
    /// (b) equality of projective degrees
    pub degree_route: bool,
    /// (c) equality of exceptional multidegrees
    pub exceptional_route: bool,
    pub degrees_small: Vec<u64>,
    pub degrees_big: Vec<u64>,
    pub exceptional_small: BTreeMap<Multidegree, u64>,
    pub exceptional_big: BTreeMap<Multidegree, u64>,
    pub multiplicities: BTreeMap<Multidegree, u64>,
    pub certificate: FitCertificate,
}

impl CompareReport {
    pub fn verdict(&self) -> bool {
        self.multiplicity_route
    }
}

/// Compare `small ⊆ big` by all three routes and require agreement.
///
/// Route (a) applies the finiteness-and-birationality criterion to the
/// bigraded pair whose degree-(a,b) pieces are the rees pieces of the two
/// systems: the subalgebra generated by the linear forms in degree (1,0) and
/// the small system in degree (0,1), inside the graph ring of the big one.
/// The length function of that pair at parameter (1,1) is exactly
/// `rees_big(a,b) - rees_small(a,b)`, evaluated through piece-dimension
/// callbacks.
pub fn compare_linear_systems(
    small: &LinearSystem,
    big: &LinearSystem,
    prime: u64,
    config: &FitConfig,
) -> Result<CompareReport> {
    if small.var_names != big.var_names {
        return Err(Error::Invalid(
            "systems live on different ambient spaces".into(),
        ));
    }
    MapsProblem::new(&[small, big], prime, config.clone())?.compare(0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;
    use crate::gring::Monomial;

    fn p2_names() -> Vec<String> {
        vec!["x0".into(), "x1".into(), "x2".into()]
    }

    fn mono3(e: [u32; 3]) -> Polynomial {
        Polynomial::from_terms(vec![(1, Monomial(e.to_vec()))])
    }

    fn identity_system() -> LinearSystem {
        LinearSystem::new(
            p2_names(),
            vec![mono3([1, 0, 0]), mono3([0, 1, 0]), mono3([0, 0, 1])],
        )
        .unwrap()
    }

    fn cremona_system() -> LinearSystem {
        LinearSystem::new(
            p2_names(),
            vec![mono3([0, 1, 1]), mono3([1, 0, 1]), mono3([1, 1, 0])],
        )
        .unwrap()
    }

    fn all_quadrics() -> LinearSystem {
        LinearSystem::new(
            p2_names(),
            vec![
                mono3([2, 0, 0]),
                mono3([1, 1, 0]),
                mono3([1, 0, 1]),
                mono3([0, 2, 0]),
                mono3([0, 1, 1]),
                mono3([0, 0, 2]),
            ],
        )
        .unwrap()
    }

    fn binom(n: i64, k: i64) -> u64 {
        let mut acc: i128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as i128 / (i + 1) as i128;
        }
        acc as u64
    }

    #[test]
    fn rees_piece_base_cases() {
        let sys = cremona_system();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        // b = 0: the full piece
        assert_eq!(pr.rees_piece(0, 3, 0).unwrap(), binom(5, 2));
        // the six pairwise products of the net's forms are distinct monomials
        assert_eq!(pr.rees_piece(0, 0, 2).unwrap(), 6);
    }

    #[test]
    fn rees_piece_of_identity_system() {
        let sys = identity_system();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(pr.rees_piece(0, a, b).unwrap(), binom(a + b + 2, 2));
            }
        }
    }

    #[test]
    fn identity_graph_degrees() {
        let sys = identity_system();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        let g = pr.graph_multidegrees(0).unwrap();
        assert_eq!(g.projective_degrees(), vec![1, 1, 1]);
        let exc = g.exceptional_multidegrees().unwrap();
        assert!(exc.values().all(|&v| v == 0));
    }

    #[test]
    fn cremona_graph_degrees() {
        let sys = cremona_system();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        let g = pr.graph_multidegrees(0).unwrap();
        assert_eq!(g.projective_degrees(), vec![1, 2, 1]);
        let exc = g.exceptional_multidegrees().unwrap();
        assert_eq!(exc[&Multidegree::new(vec![1, 0])], 0);
        assert_eq!(exc[&Multidegree::new(vec![0, 1])], 3);
    }

    #[test]
    fn veronese_graph_degrees() {
        let sys = all_quadrics();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        let g = pr.graph_multidegrees(0).unwrap();
        assert_eq!(g.projective_degrees(), vec![1, 2, 4]);
        let exc = g.exceptional_multidegrees().unwrap();
        assert!(exc.values().all(|&v| v == 0), "base-point free system");
    }

    #[test]
    fn compare_equal_systems() {
        let sys = cremona_system();
        let rep =
            compare_linear_systems(&sys, &sys, DEFAULT_PRIME, &FitConfig::default()).unwrap();
        assert!(rep.multiplicity_route && rep.degree_route && rep.exceptional_route);
    }

    #[test]
    fn compare_cremona_inside_quadrics() {
        let rep = compare_linear_systems(
            &cremona_system(),
            &all_quadrics(),
            DEFAULT_PRIME,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(!rep.multiplicity_route && !rep.degree_route && !rep.exceptional_route);
        assert_eq!(rep.degrees_small, vec![1, 2, 1]);
        assert_eq!(rep.degrees_big, vec![1, 2, 4]);
    }

    #[test]
    fn compare_rejects_non_nested() {
        let err = compare_linear_systems(
            &all_quadrics(),
            &cremona_system(),
            DEFAULT_PRIME,
            &FitConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.kind(), "Invalid");
    }

    #[test]
    fn dense_system_matches_quadric_counts() {
        // non-monomial forms spanning all quadrics: same graph degrees
        let f1 = Polynomial::from_terms(vec![
            (1, Monomial(vec![2, 0, 0])),
            (1, Monomial(vec![0, 2, 0])),
        ]);
        let f2 = Polynomial::from_terms(vec![
            (1, Monomial(vec![0, 2, 0])),
            (-1, Monomial(vec![0, 0, 2])),
        ]);
        let sys = LinearSystem::new(
            p2_names(),
            vec![
                f1,
                f2,
                mono3([0, 0, 2]),
                mono3([1, 1, 0]),
                mono3([1, 0, 1]),
                mono3([0, 1, 1]),
            ],
        )
        .unwrap();
        let pr = MapsProblem::new(&[&sys], DEFAULT_PRIME, FitConfig::default()).unwrap();
        let g = pr.graph_multidegrees(0).unwrap();
        assert_eq!(g.projective_degrees(), vec![1, 2, 4]);
    }
}
