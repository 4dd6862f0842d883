//! The length functions of a pair A ⊆ B of standard multigraded algebras,
//! the multiplicity invariants extracted from their eventual polynomials,
//! the decomposition / monotonicity / stabilization identities between them,
//! and the finiteness and birationality verdicts for the associated
//! morphism.

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::gring::{ModuleId, MultigradedRing, ProblemEngine, RingTables, SeedSetId};
use crate::gring::Polynomial;
use crate::hilbert::{
    detect_stabilization, leading_coeffs, proj_dim, FitConfig, FittedPolynomial,
};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

/// Summary of a certified fit window, cheap to report.
#[derive(Debug, Clone)]
pub struct FitCertificate {
    pub origin: Vec<i64>,
    pub extent: Vec<usize>,
    pub validated_points: usize,
}

impl FitCertificate {
    pub fn from_fit(fit: &FittedPolynomial) -> Self {
        let (origin, extent) = fit.window();
        FitCertificate {
            origin: origin.entries().to_vec(),
            extent: extent.to_vec(),
            validated_points: fit.validated_points().len(),
        }
    }
}

/// One fitted multiplicity family: the normalized leading coefficients of a
/// certified eventual polynomial.
#[derive(Debug, Clone)]
pub struct MultResult {
    pub values: BTreeMap<Multidegree, u64>,
    pub total_degree: i64,
    pub certificate: FitCertificate,
}

/// Fit an eventual polynomial of the given arity, certify it, and extract
/// the weight-`r` normalized leading coefficients. This is the single path
/// every multiplicity in the crate goes through; callers that only have a
/// piece-dimension callback (no presented ring) use it directly.
pub fn fit_lambda_leading<F>(
    f: F,
    arity: usize,
    r: i64,
    floor: Option<&Multidegree>,
    config: &FitConfig,
) -> Result<(FittedPolynomial, BTreeMap<Multidegree, u64>)>
where
    F: Fn(&Multidegree) -> Result<u64> + Sync,
{
    let cap = r.max(0) as usize;
    let fit = detect_stabilization(f, arity, cap, floor, config)?;
    let leads = leading_coeffs(&fit, arity, r)?;
    Ok((fit, leads))
}

/// The pair A ⊆ B: the ring B plus the generating subspaces H_i of the
/// degree-e_i pieces of A. All computations share one memoizing engine.
pub struct Problem {
    engine: ProblemEngine,
    seeds: SeedSetId,
    config: FitConfig,
    r_cache: OnceLock<i64>,
}

impl Problem {
    pub fn new(
        ring: Arc<MultigradedRing>,
        h_gens: Vec<Vec<Polynomial>>,
        config: FitConfig,
    ) -> Result<Self> {
        if !ring.is_standard() {
            return Err(Error::Invalid(
                "multiplicity computations require a standard grading".into(),
            ));
        }
        let p = ring.grading_rank();
        if h_gens.len() != p {
            return Err(Error::Invalid(format!(
                "expected {} generating subspaces H_i (one per grading axis), got {}",
                p,
                h_gens.len()
            )));
        }
        for (i, gens) in h_gens.iter().enumerate() {
            for g in gens {
                let d = ring.multidegree_of(g)?;
                if d != Multidegree::unit(p, i) {
                    return Err(Error::Invalid(format!(
                        "generator of H_{} has degree {}, expected {}",
                        i + 1,
                        d,
                        Multidegree::unit(p, i)
                    )));
                }
            }
        }
        let tables = RingTables::new(ring)?;
        let mut engine = ProblemEngine::new(tables);
        let seeds = engine.register_seed_set(h_gens)?;
        Ok(Problem {
            engine,
            seeds,
            config,
            r_cache: OnceLock::new(),
        })
    }

    pub fn engine(&self) -> &ProblemEngine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut ProblemEngine {
        &mut self.engine
    }

    pub fn seeds(&self) -> SeedSetId {
        self.seeds
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    pub fn grading_rank(&self) -> usize {
        self.engine.tables().ring().grading_rank()
    }

    /// dim MultiProj(B), cached.
    pub fn r(&self) -> Result<i64> {
        if let Some(&r) = self.r_cache.get() {
            return Ok(r);
        }
        let r = proj_dim(&self.engine, &self.config)?;
        let _ = self.r_cache.set(r);
        Ok(r)
    }

    /// dim [B]_n - dim([A]_{n-t+1} [B]_{t-1}), where [A]_v = H_1^{v_1}...H_p^{v_p}.
    /// Pieces indexed by a degree with a negative coordinate are zero.
    pub fn lambda_ab(&self, t: &Multidegree, n: &Multidegree) -> Result<u64> {
        let p = self.grading_rank();
        if !t.ge(&Multidegree::ones(p)) {
            return Err(Error::Invalid(format!("t = {} must be >= (1,..,1)", t)));
        }
        let num = self.engine.dim_ring(n);
        let exps = &(n - t) + &Multidegree::ones(p);
        let den = if exps.has_negative() {
            0
        } else {
            let v = t - &Multidegree::ones(p);
            self.engine
                .dim_power(self.seeds, &exps, self.engine.whole_ring(), &v)?
        };
        num.checked_sub(den).ok_or_else(|| {
            Error::Invalid(format!(
                "internal: denominator dim {} exceeds dim [B]_{}",
                den, n
            ))
        })
    }

    /// dim(H^n [B]_v) - dim(H^{v+n-t} [B]_t); asserts the containment of the
    /// denominator subspace in the numerator first.
    pub fn lambda_sharp(
        &self,
        t: &Multidegree,
        v: &Multidegree,
        n: &Multidegree,
    ) -> Result<u64> {
        if !t.is_nonnegative() || !n.is_nonnegative() || !v.ge(t) {
            return Err(Error::Invalid(format!(
                "lambda_sharp requires t >= 0, n >= 0 and v >= t (got t={}, v={}, n={})",
                t, v, n
            )));
        }
        let whole = self.engine.whole_ring();
        let numerator = self.engine.power_piece(self.seeds, n, whole, v)?;
        let exps = &(v - t) + n;
        let denominator = self.engine.power_piece(self.seeds, &exps, whole, t)?;
        if !numerator.contains(&denominator)? {
            return Err(Error::ContainmentViolation(format!(
                "H^{} [B]_{} is not inside H^{} [B]_{}",
                exps, t, n, v
            )));
        }
        let num = self.engine.dim_power(self.seeds, n, whole, v)?;
        let den = self.engine.dim_power(self.seeds, &exps, whole, t)?;
        Ok(num - den)
    }

    /// Relative mixed multiplicities at parameter t: certified fit of
    /// lambda_ab on the region n >= t, leading coefficients at weight r.
    pub fn rel_mixed_mult(&self, t: &Multidegree) -> Result<MultResult> {
        let p = self.grading_rank();
        let r = self.r()?;
        let (fit, values) = fit_lambda_leading(
            |n: &Multidegree| self.lambda_ab(t, n),
            p,
            r,
            Some(t),
            &self.config,
        )?;
        Ok(MultResult {
            values,
            total_degree: fit.total_degree(),
            certificate: FitCertificate::from_fit(&fit),
        })
    }

    /// Mixed multiplicities of the fitted lambda_sharp at parameter t,
    /// indexed by concatenated (alpha | beta) exponent tuples of weight r.
    pub fn j_sharp(&self, t: &Multidegree) -> Result<MultResult> {
        let p = self.grading_rank();
        if !t.is_nonnegative() {
            return Err(Error::Invalid(format!("t = {} must be >= 0", t)));
        }
        let r = self.r()?;
        let mut floor_entries = t.entries().to_vec();
        floor_entries.extend(std::iter::repeat(0).take(p));
        let floor = Multidegree::new(floor_entries);
        let (fit, values) = fit_lambda_leading(
            |point: &Multidegree| {
                let (v, n) = split_point(point, p);
                self.lambda_sharp(t, &v, &n)
            },
            2 * p,
            r,
            Some(&floor),
            &self.config,
        )?;
        Ok(MultResult {
            values,
            total_degree: fit.total_degree(),
            certificate: FitCertificate::from_fit(&fit),
        })
    }

    /// j^#_{0,beta} at parameter t, for each beta of weight r.
    pub fn j_sharp_beta(&self, t: &Multidegree) -> Result<BTreeMap<Multidegree, u64>> {
        let p = self.grading_rank();
        let full = self.j_sharp(t)?;
        let mut out = BTreeMap::new();
        for (key, value) in full.values {
            let (alpha, beta) = split_key(&key, p);
            if alpha.is_zero() {
                out.insert(beta, value);
            }
        }
        Ok(out)
    }

    /// The stable multiplicities: computed directly as the weight-r
    /// coefficients of the Kleiman-Thorup length function of B with respect
    /// to the H_i, then cross-checked against the escalating-t limit of the
    /// relative mixed multiplicities.
    pub fn e_infinity(&self) -> Result<EInfinityResult> {
        let p = self.grading_rank();
        let br = buchsbaum_rim(
            &self.engine,
            self.engine.whole_ring(),
            self.seeds,
            &self.config,
        )?;
        let mut schedule = Vec::new();
        let mut prev: Option<BTreeMap<Multidegree, u64>> = None;
        let mut settled: Option<BTreeMap<Multidegree, u64>> = None;
        for tv in [1i64, 2, 4, 8] {
            let t = Multidegree::constant(p, tv);
            let current = self.rel_mixed_mult(&t)?.values;
            schedule.push((tv, current.clone()));
            if let Some(prev_map) = &prev {
                if *prev_map == current {
                    settled = Some(current);
                    break;
                }
            }
            prev = Some(current);
        }
        let settled = settled.ok_or_else(|| {
            Error::StabilizationMismatch(
                "relative mixed multiplicities did not settle along t = 1,2,4,8".into(),
            )
        })?;
        if settled != br.br {
            return Err(Error::StabilizationMismatch(format!(
                "settled relative values {:?} disagree with the direct stable computation {:?}",
                settled, br.br
            )));
        }
        Ok(EInfinityResult {
            values: br.br,
            schedule,
            certificate: br.certificate,
        })
    }

    /// Exact check of the decomposition identity
    /// e_t(beta) = br_beta + j^#_{0,beta}(t-1) for one beta of weight r.
    pub fn decomposition_check(&self, t: &Multidegree, beta: &Multidegree) -> Result<DecompWitness> {
        let p = self.grading_rank();
        let r = self.r()?;
        if beta.weight() != r {
            return Err(Error::Invalid(format!(
                "beta = {} must have weight r = {}",
                beta, r
            )));
        }
        let e_t = self
            .rel_mixed_mult(t)?
            .values
            .get(beta)
            .copied()
            .unwrap_or(0);
        let br = buchsbaum_rim(
            &self.engine,
            self.engine.whole_ring(),
            self.seeds,
            &self.config,
        )?
        .br
        .get(beta)
        .copied()
        .unwrap_or(0);
        let t_minus_one = t - &Multidegree::ones(p);
        let j_sharp = self
            .j_sharp_beta(&t_minus_one)?
            .get(beta)
            .copied()
            .unwrap_or(0);
        Ok(DecompWitness {
            e_t,
            br,
            j_sharp,
            holds: e_t == br + j_sharp,
        })
    }

    /// Finiteness and birationality verdicts for the associated morphism
    /// MultiProj(B) -> MultiProj(A). Equidimensionality of B is assumed, not
    /// verified; the report records the assumption.
    pub fn criteria(&self) -> Result<CriteriaReport> {
        let p = self.grading_rank();
        let r = self.r()?;
        let one = Multidegree::ones(p);
        let (e_map, e_cert, finite_birational) = match self.rel_mixed_mult(&one) {
            Ok(res) => {
                let all_zero = res.values.values().all(|&v| v == 0);
                let cert = res.certificate.clone();
                (Some(res.values), Some(cert), Verdict::from_bool(all_zero))
            }
            Err(Error::NoStabilization { .. }) => (
                None,
                None,
                Verdict::Undetermined("no stabilization for the t = (1,..,1) fit".into()),
            ),
            Err(e) => return Err(e),
        };
        let (einf_map, einf_cert, finite) = match self.e_infinity() {
            Ok(res) => {
                let all_zero = res.values.values().all(|&v| v == 0);
                let cert = res.certificate.clone();
                (Some(res.values), Some(cert), Verdict::from_bool(all_zero))
            }
            Err(Error::NoStabilization { .. }) => (
                None,
                None,
                Verdict::Undetermined("no stabilization for the stable-value fit".into()),
            ),
            Err(e) => return Err(e),
        };
        let segre_e = e_map.as_ref().map(|m| segre_collapse(m, r));
        let segre_einf = einf_map.as_ref().map(|m| segre_collapse(m, r));
        Ok(CriteriaReport {
            r,
            finite,
            finite_birational,
            e: e_map,
            e_infinity: einf_map,
            segre_e,
            segre_e_infinity: segre_einf,
            e_certificate: e_cert,
            e_infinity_certificate: einf_cert,
            assumption: "B assumed equidimensional; quotients of polynomial rings over a field \
                         are universally catenary"
                .into(),
        })
    }

    /// The single-graded relative multiplicity e_t(A, B) = e_t(r; A, B).
    pub fn suv_relative_mult(&self, t: i64) -> Result<u64> {
        if self.grading_rank() != 1 {
            return Err(Error::Invalid(
                "the single-graded relative multiplicity requires p = 1".into(),
            ));
        }
        let r = self.r()?;
        if r < 0 {
            return Ok(0);
        }
        let values = self.rel_mixed_mult(&Multidegree::new(vec![t]))?.values;
        Ok(values
            .get(&Multidegree::new(vec![r]))
            .copied()
            .unwrap_or(0))
    }

    /// Everything the pair yields at one parameter, with the decomposition
    /// identity verified for every exponent of weight r.
    pub fn multiplicity_report(&self, t: &Multidegree) -> Result<MultiplicityReport> {
        let p = self.grading_rank();
        let r = self.r()?;
        let rel = self.rel_mixed_mult(t)?;
        let br_res = buchsbaum_rim(
            &self.engine,
            self.engine.whole_ring(),
            self.seeds,
            &self.config,
        )?;
        let j_res = self.j_sharp(&(t - &Multidegree::ones(p)))?;
        let einf = self.e_infinity()?;
        let mut j_zero_alpha = BTreeMap::new();
        for (key, value) in &j_res.values {
            let (alpha, beta) = split_key(key, p);
            if alpha.is_zero() {
                j_zero_alpha.insert(beta, *value);
            }
        }
        for beta in crate::degree::compositions(p, r) {
            let e_t = rel.values.get(&beta).copied().unwrap_or(0);
            let br = br_res.br.get(&beta).copied().unwrap_or(0);
            let js = j_zero_alpha.get(&beta).copied().unwrap_or(0);
            if e_t != br + js {
                return Err(Error::StabilizationMismatch(format!(
                    "decomposition fails at {}: {} != {} + {}",
                    beta, e_t, br, js
                )));
            }
        }
        Ok(MultiplicityReport {
            r,
            t: t.clone(),
            rel_mixed: rel.values,
            br: br_res.br,
            j_sharp: j_res.values,
            e_infinity: einf.values,
            fit_certificates: vec![rel.certificate, br_res.certificate, j_res.certificate],
        })
    }
}

/// The assembled invariants of one pair at one parameter; construction
/// verifies the decomposition identity on every weight-r exponent.
#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    pub r: i64,
    pub t: Multidegree,
    pub rel_mixed: BTreeMap<Multidegree, u64>,
    pub br: BTreeMap<Multidegree, u64>,
    /// keyed by concatenated (alpha | beta) tuples
    pub j_sharp: BTreeMap<Multidegree, u64>,
    pub e_infinity: BTreeMap<Multidegree, u64>,
    pub fit_certificates: Vec<FitCertificate>,
}

/// dim [M]_{v + sum n_i d_i} - dim(H_1^{n_1}...H_q^{n_q} [M]_v).
pub fn lambda_kt(
    engine: &ProblemEngine,
    module: ModuleId,
    set: SeedSetId,
    v: &Multidegree,
    n: &Multidegree,
) -> Result<u64> {
    if !v.is_nonnegative() || !n.is_nonnegative() {
        return Err(Error::Invalid(format!(
            "lambda_kt requires v >= 0 and n >= 0 (got v={}, n={})",
            v, n
        )));
    }
    let degrees = engine.seed_degrees(set).to_vec();
    let mut target = v.clone();
    for (i, d) in degrees.iter().enumerate() {
        target = target.add_scaled(n.get(i), d);
    }
    let num = engine.dim_module(module, &target)?;
    let den = engine.dim_power(set, n, module, v)?;
    num.checked_sub(den).ok_or_else(|| {
        Error::Invalid(format!(
            "internal: power dim {} exceeds module dim at {}",
            den, target
        ))
    })
}

/// Total degree of the certified fit of v -> dim [M]_v: the dimension of the
/// support of the associated sheaf. -1 when the function is eventually zero.
pub fn module_dim(engine: &ProblemEngine, module: ModuleId, config: &FitConfig) -> Result<i64> {
    let ring = engine.tables().ring().clone();
    let p = ring.grading_rank();
    let cap = ring
        .block_sizes()
        .iter()
        .map(|&b| b.saturating_sub(1))
        .max()
        .unwrap_or(0);
    let fit = detect_stabilization(
        |v: &Multidegree| engine.dim_module(module, v),
        p,
        cap,
        None,
        config,
    )?;
    Ok(fit.total_degree())
}

/// Mixed Buchsbaum-Rim multiplicities of a module with respect to a seed
/// list: the normalized coefficients e(alpha, beta) of the certified fit of
/// the Kleiman-Thorup length function, at total weight r = dim Supp(M).
#[derive(Debug, Clone)]
pub struct BrResult {
    /// dim Supp of the module's sheaf (fit degree of its Hilbert function)
    pub r_module: i64,
    /// (alpha | beta) -> e(alpha, beta), |alpha| + |beta| = r_module
    pub all: BTreeMap<Multidegree, u64>,
    /// beta -> e(0, beta)
    pub br: BTreeMap<Multidegree, u64>,
    pub certificate: FitCertificate,
}

pub fn buchsbaum_rim(
    engine: &ProblemEngine,
    module: ModuleId,
    set: SeedSetId,
    config: &FitConfig,
) -> Result<BrResult> {
    let p = engine.tables().ring().grading_rank();
    let q = engine.seed_degrees(set).len();
    let r_module = module_dim(engine, module, config)?;
    let (fit, all) = fit_lambda_leading(
        |point: &Multidegree| {
            let (v, n) = split_point(point, p);
            lambda_kt(engine, module, set, &v, &n)
        },
        p + q,
        r_module,
        None,
        config,
    )?;
    let mut br = BTreeMap::new();
    for (key, value) in &all {
        let (alpha, beta) = split_key(key, p);
        if alpha.is_zero() {
            br.insert(beta, *value);
        }
    }
    Ok(BrResult {
        r_module,
        all,
        br,
        certificate: FitCertificate::from_fit(&fit),
    })
}

#[derive(Debug, Clone)]
pub struct EInfinityResult {
    pub values: BTreeMap<Multidegree, u64>,
    /// the escalating-t relative values actually computed, in order
    pub schedule: Vec<(i64, BTreeMap<Multidegree, u64>)>,
    pub certificate: FitCertificate,
}

#[derive(Debug, Clone)]
pub struct DecompWitness {
    pub e_t: u64,
    pub br: u64,
    pub j_sharp: u64,
    pub holds: bool,
}

/// Tri-state verdict: an uncertified fit never silently defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undetermined(String),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Undetermined(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriteriaReport {
    pub r: i64,
    pub finite: Verdict,
    pub finite_birational: Verdict,
    pub e: Option<BTreeMap<Multidegree, u64>>,
    pub e_infinity: Option<BTreeMap<Multidegree, u64>>,
    /// r!/beta! - weighted sums: the multiplicities of the Segre-collapsed
    /// single-graded pair.
    pub segre_e: Option<u64>,
    pub segre_e_infinity: Option<u64>,
    pub e_certificate: Option<FitCertificate>,
    pub e_infinity_certificate: Option<FitCertificate>,
    pub assumption: String,
}

fn segre_collapse(values: &BTreeMap<Multidegree, u64>, r: i64) -> u64 {
    let mut total: u64 = 0;
    for (beta, &v) in values {
        if v == 0 {
            continue;
        }
        let mut mult: u64 = 1;
        // multinomial r! / beta!
        let mut seen = 0i64;
        for b in beta.iter() {
            for i in 1..=b {
                seen += 1;
                mult = mult * seen as u64 / i as u64;
            }
        }
        debug_assert_eq!(seen, r);
        total += mult * v;
    }
    total
}

/// Split a grid point of rank p+q into its first p and last q coordinates.
pub fn split_point(point: &Multidegree, p: usize) -> (Multidegree, Multidegree) {
    let entries = point.entries();
    (
        Multidegree::new(entries[..p].to_vec()),
        Multidegree::new(entries[p..].to_vec()),
    )
}

pub fn split_key(key: &Multidegree, p: usize) -> (Multidegree, Multidegree) {
    split_point(key, p)
}

/// Concatenate (alpha | beta) into one exponent key.
pub fn join_key(alpha: &Multidegree, beta: &Multidegree) -> Multidegree {
    let mut entries = alpha.entries().to_vec();
    entries.extend_from_slice(beta.entries());
    Multidegree::new(entries)
}
