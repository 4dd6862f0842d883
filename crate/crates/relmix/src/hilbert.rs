//! Numerical functions on multidegree grids: exact polynomial fitting by
//! iterated forward differences, stabilization certification, and extraction
//! of normalized leading coefficients.

use crate::degree::{box_points, compositions, Multidegree};
use crate::error::{Error, Result};
use crate::gring::ProblemEngine;
use crate::par;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Tabulated values of a numerical function over an integer box.
#[derive(Debug, Clone)]
pub struct NumericalTable {
    origin: Multidegree,
    extent: Vec<usize>,
    values: Vec<u64>,
}

impl NumericalTable {
    pub fn new(origin: Multidegree, extent: Vec<usize>, values: Vec<u64>) -> Self {
        assert_eq!(origin.rank(), extent.len());
        assert_eq!(values.len(), extent.iter().product::<usize>());
        NumericalTable {
            origin,
            extent,
            values,
        }
    }

    pub fn arity(&self) -> usize {
        self.extent.len()
    }

    pub fn origin(&self) -> &Multidegree {
        &self.origin
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn points(&self) -> Vec<Multidegree> {
        box_points(&self.origin, &self.extent)
    }

    pub fn value_at_index(&self, flat: usize) -> u64 {
        self.values[flat]
    }
}

/// Evaluate a function over the box `[origin, origin + extent)`; the points
/// run in parallel.
pub fn eval_grid<F>(f: F, origin: &Multidegree, extent: &[usize]) -> Result<NumericalTable>
where
    F: Fn(&Multidegree) -> Result<u64> + Sync,
{
    let points = box_points(origin, extent);
    let values = par::try_map_indexed(points.len(), |i| f(&points[i]))?;
    Ok(NumericalTable::new(origin.clone(), extent.to_vec(), values))
}

/// Sequential variant of [`eval_grid`], kept for benchmarking the parallel
/// speedup.
pub fn eval_grid_seq<F>(f: F, origin: &Multidegree, extent: &[usize]) -> Result<NumericalTable>
where
    F: Fn(&Multidegree) -> Result<u64> + Sync,
{
    let points = box_points(origin, extent);
    let values = par::try_map_indexed_seq(points.len(), |i| f(&points[i]))?;
    Ok(NumericalTable::new(origin.clone(), extent.to_vec(), values))
}

/// A multivariate polynomial with exact rational coefficients, together with
/// the window it was fitted on and the points it was validated against.
#[derive(Debug, Clone)]
pub struct FittedPolynomial {
    /// exponent tuple -> coefficient, nonzero entries only
    coefficients: BTreeMap<Multidegree, BigRational>,
    total_degree: i64,
    window_origin: Multidegree,
    window_extent: Vec<usize>,
    validated_points: Vec<Multidegree>,
}

impl FittedPolynomial {
    pub fn coefficients(&self) -> &BTreeMap<Multidegree, BigRational> {
        &self.coefficients
    }

    pub fn coefficient(&self, exps: &Multidegree) -> BigRational {
        self.coefficients
            .get(exps)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Max exponent weight with nonzero coefficient; -1 for the zero
    /// polynomial.
    pub fn total_degree(&self) -> i64 {
        self.total_degree
    }

    pub fn window(&self) -> (&Multidegree, &[usize]) {
        (&self.window_origin, &self.window_extent)
    }

    pub fn validated_points(&self) -> &[Multidegree] {
        &self.validated_points
    }

    pub fn eval(&self, point: &Multidegree) -> BigRational {
        let mut acc = BigRational::zero();
        for (exps, coeff) in &self.coefficients {
            let mut term = coeff.clone();
            for (e, x) in exps.iter().zip(point.iter()) {
                let base = BigRational::from_integer(BigInt::from(x));
                for _ in 0..e {
                    term *= base.clone();
                }
            }
            acc += term;
        }
        acc
    }

    /// Render as a sorted human-readable string, e.g. for reports.
    pub fn to_display_string(&self) -> String {
        if self.coefficients.is_empty() {
            return "0".to_string();
        }
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .map(|(e, c)| format!("{} * n^{}", c, e))
            .collect();
        terms.join(" + ")
    }
}

/// Interpolate the sub-box `[origin, origin + cap]` of the table by a
/// polynomial of per-axis degree at most `cap`, via iterated forward
/// differences. Exact; the result reproduces every sub-box value.
pub fn fit_polynomial(table: &NumericalTable, cap: usize) -> Result<FittedPolynomial> {
    let arity = table.arity();
    if table.extent.iter().any(|&e| e < cap + 1) {
        return Err(Error::WindowTooSmall {
            extent: table.extent.clone(),
            cap,
        });
    }
    let side = cap + 1;
    // Copy the sub-box into an i128 tensor of shape side^arity.
    let mut strides_tbl = vec![1usize; arity];
    for i in (0..arity.saturating_sub(1)).rev() {
        strides_tbl[i] = strides_tbl[i + 1] * table.extent[i + 1];
    }
    let sub_total = side.pow(arity as u32);
    let mut diffs = vec![0i128; sub_total];
    let mut strides_sub = vec![1usize; arity];
    for i in (0..arity.saturating_sub(1)).rev() {
        strides_sub[i] = strides_sub[i + 1] * side;
    }
    for (flat, d) in diffs.iter_mut().enumerate() {
        let mut rem = flat;
        let mut tbl_flat = 0;
        for a in 0..arity {
            let idx = rem / strides_sub[a];
            rem %= strides_sub[a];
            tbl_flat += idx * strides_tbl[a];
        }
        *d = table.values[tbl_flat] as i128;
    }
    // In-place forward differencing along each axis: afterwards
    // diffs[k] = mixed difference of order k at the origin.
    for a in 0..arity {
        for level in 1..side {
            for flat in (0..sub_total).rev() {
                let idx_a = flat / strides_sub[a] % side;
                if idx_a >= level {
                    diffs[flat] -= diffs[flat - strides_sub[a]];
                }
            }
        }
    }
    // Newton basis per axis: binom(x - o_a, k) expanded in x.
    let mut newton: Vec<Vec<Vec<BigRational>>> = Vec::with_capacity(arity);
    for a in 0..arity {
        let o = table.origin.get(a);
        let mut per_k: Vec<Vec<BigRational>> = Vec::with_capacity(side);
        // start from the constant polynomial 1
        let mut cur = vec![BigRational::one()];
        per_k.push(cur.clone());
        for k in 1..side {
            // multiply by (x - o - (k-1)) / k
            let shift = BigRational::from_integer(BigInt::from(o + (k as i64 - 1)));
            let kk = BigRational::from_integer(BigInt::from(k as i64));
            let mut next = vec![BigRational::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c / &kk;
                next[i] -= c * &shift / &kk;
            }
            cur = next;
            per_k.push(cur.clone());
        }
        newton.push(per_k);
    }
    // Expand into monomial coefficients.
    let mut coeffs: BTreeMap<Multidegree, BigRational> = BTreeMap::new();
    let korders = box_points(&Multidegree::zero(arity), &vec![side; arity]);
    for (flat, k) in korders.iter().enumerate() {
        if diffs[flat] == 0 {
            continue;
        }
        let base = BigRational::from_integer(BigInt::from(diffs[flat]));
        // tensor product of the per-axis expansions
        let mut partial: Vec<(Vec<i64>, BigRational)> = vec![(Vec::new(), base)];
        for a in 0..arity {
            let expansion = &newton[a][k.get(a) as usize];
            let mut next = Vec::with_capacity(partial.len() * expansion.len());
            for (exps, c) in &partial {
                for (e, ec) in expansion.iter().enumerate() {
                    if ec.is_zero() {
                        continue;
                    }
                    let mut exps2 = exps.clone();
                    exps2.push(e as i64);
                    next.push((exps2, c * ec));
                }
            }
            partial = next;
        }
        for (exps, c) in partial {
            let key = Multidegree::new(exps);
            let entry = coeffs.entry(key).or_insert_with(BigRational::zero);
            *entry += c;
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    let total_degree = coeffs.keys().map(|e| e.weight()).max().unwrap_or(-1);
    let fit = FittedPolynomial {
        coefficients: coeffs,
        total_degree,
        window_origin: table.origin.clone(),
        window_extent: vec![side; arity],
        validated_points: Vec::new(),
    };
    // Exactness on the sub-box is an identity of the construction; verify it.
    for pt in box_points(&table.origin, &vec![side; arity]) {
        let mut tbl_flat = 0;
        for a in 0..arity {
            tbl_flat += (pt.get(a) - table.origin.get(a)) as usize * strides_tbl[a];
        }
        debug_assert_eq!(
            fit.eval(&pt),
            BigRational::from_integer(BigInt::from(table.values[tbl_flat])),
            "interpolation must reproduce the window"
        );
    }
    Ok(fit)
}

/// Controls for stabilization search. The defaults follow the artifact's
/// fixed policy: start the window at the all-ones origin, validate on a
/// shell of width 2, and double the origin up to 64 before giving up.
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub initial_origin: i64,
    pub validation_shell: usize,
    pub max_origin: i64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            initial_origin: 1,
            validation_shell: 2,
            max_origin: 64,
        }
    }
}

/// Search for a window on which the function agrees with its fitted
/// polynomial: fit on the box at origin `n0 * (1,..,1)` (clamped from below
/// by `floor`), validate on the shell of extra points on every axis, and
/// double `n0` on failure. Returns the certified fit, with the validated
/// shell points recorded.
pub fn detect_stabilization<F>(
    f: F,
    arity: usize,
    cap: usize,
    floor: Option<&Multidegree>,
    config: &FitConfig,
) -> Result<FittedPolynomial>
where
    F: Fn(&Multidegree) -> Result<u64> + Sync,
{
    let mut n0 = config.initial_origin.max(1);
    loop {
        let mut origin = Multidegree::constant(arity, n0);
        if let Some(fl) = floor {
            origin = origin.componentwise_max(fl);
        }
        let extent = vec![cap + 1 + config.validation_shell; arity];
        let table = eval_grid(&f, &origin, &extent)?;
        let mut fit = fit_polynomial(&table, cap)?;
        let window_side = (cap + 1) as i64;
        let mut validated = Vec::new();
        let mut ok = true;
        for (flat, pt) in table.points().iter().enumerate() {
            let inside_window = (0..arity).all(|a| pt.get(a) - origin.get(a) < window_side);
            let expected = BigRational::from_integer(BigInt::from(table.value_at_index(flat)));
            if fit.eval(pt) != expected {
                ok = false;
                break;
            }
            if !inside_window {
                validated.push(pt.clone());
            }
        }
        if ok {
            fit.validated_points = validated;
            return Ok(fit);
        }
        if n0 >= config.max_origin {
            return Err(Error::NoStabilization {
                max_origin: config.max_origin,
                context: format!("arity {}, degree cap {}", arity, cap),
            });
        }
        n0 = (n0 * 2).min(config.max_origin);
    }
}

/// Normalized leading coefficients: for each exponent tuple of weight `r`,
/// the coefficient scaled by the product of factorials. All values must be
/// nonnegative integers.
pub fn leading_coeffs(
    poly: &FittedPolynomial,
    arity: usize,
    r: i64,
) -> Result<BTreeMap<Multidegree, u64>> {
    if poly.total_degree() > r {
        return Err(Error::DegreeBoundExceeded {
            total: poly.total_degree(),
            bound: r,
        });
    }
    let mut out = BTreeMap::new();
    if r < 0 {
        return Ok(out);
    }
    for beta in compositions(arity, r) {
        let coeff = poly.coefficient(&beta);
        let mut fact = BigInt::one();
        for b in beta.iter() {
            for i in 2..=b {
                fact *= BigInt::from(i);
            }
        }
        let value = coeff * BigRational::from_integer(fact);
        if !value.is_integer() {
            return Err(Error::NonIntegralLeadingCoefficient {
                beta: beta.to_string(),
                value: value.to_string(),
            });
        }
        if value.is_negative() {
            return Err(Error::NegativeLeadingCoefficient {
                beta: beta.to_string(),
                value: value.to_string(),
            });
        }
        let as_int = value.to_integer().to_u64().ok_or_else(|| {
            Error::Invalid(format!("leading coefficient at {} overflows u64", beta))
        })?;
        out.insert(beta, as_int);
    }
    Ok(out)
}

/// The dimension of the multiprojective scheme of the ring: the total degree
/// of the certified fit of `n -> dim [B]_n`; -1 when the Hilbert function is
/// eventually zero.
pub fn proj_dim(engine: &ProblemEngine, config: &FitConfig) -> Result<i64> {
    let ring = engine.tables().ring().clone();
    if !ring.is_standard() {
        return Err(Error::Invalid(
            "projective dimension requires a standard grading".into(),
        ));
    }
    let p = ring.grading_rank();
    let cap = ring
        .block_sizes()
        .iter()
        .map(|&b| b.saturating_sub(1))
        .max()
        .unwrap_or(0);
    let fit = detect_stabilization(
        |n: &Multidegree| Ok(engine.dim_ring(n)),
        p,
        cap,
        None,
        config,
    )?;
    Ok(fit.total_degree())
}
