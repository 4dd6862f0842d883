//! Acceptance suite: one test per criterion, each printing a pass line.
//! Exact worked examples and randomized property checks; no tolerances
//! anywhere (all arithmetic is exact).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relmix::degree::{compositions, Multidegree};
use relmix::frontend::{parse_problem, run, RunFlags};
use relmix::gring::{Monomial, MultigradedRing, Polynomial, ProblemEngine, RingTables, VarSpec};
use relmix::hilbert::{detect_stabilization, proj_dim, FitConfig};
use relmix::maps::{compare_linear_systems, LinearSystem, MapsProblem};
use relmix::multiplicity::{Problem, Verdict};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

const PRIME: u64 = 32003;

fn md(v: Vec<i64>) -> Multidegree {
    Multidegree::new(v)
}

fn var(name: &str, deg: Vec<i64>) -> VarSpec {
    VarSpec {
        name: name.into(),
        degree: Multidegree::new(deg),
    }
}

fn mono_poly(nvars: usize, exps: &[u32]) -> Polynomial {
    let mut e = vec![0u32; nvars];
    e[..exps.len()].copy_from_slice(exps);
    Polynomial::from_terms(vec![(1, Monomial(e))])
}

/// Independent oracle for criterion 1: binomial(n + m, m) expanded as an
/// exact rational polynomial, by direct convolution of the linear factors.
fn binomial_poly_coeffs(m: usize) -> BTreeMap<i64, BigRational> {
    // (n+1)(n+2)...(n+m) / m!
    let mut coeffs: Vec<BigRational> = vec![BigRational::one()];
    for i in 1..=m as i64 {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] += c * BigRational::from_integer(BigInt::from(i));
        }
        coeffs = next;
    }
    let mut fact = BigRational::one();
    for i in 2..=m as i64 {
        fact *= BigRational::from_integer(BigInt::from(i));
    }
    coeffs
        .into_iter()
        .enumerate()
        .map(|(k, c)| (k as i64, c / &fact))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

#[test]
fn criterion_1_hilbert_polynomial_sanity() {
    for m in 0..=4usize {
        let start = Instant::now();
        let vars: Vec<VarSpec> = (0..=m).map(|i| var(&format!("x{}", i), vec![1])).collect();
        let ring = MultigradedRing::new(PRIME, 1, vars, vec![]).unwrap();
        let tables = RingTables::new(ring).unwrap();
        let engine = ProblemEngine::new(tables);
        let fit = detect_stabilization(
            |n: &Multidegree| Ok(engine.dim_ring(n)),
            1,
            m,
            None,
            &FitConfig::default(),
        )
        .unwrap();
        let expected = binomial_poly_coeffs(m);
        let got: BTreeMap<i64, BigRational> = fit
            .coefficients()
            .iter()
            .map(|(e, c)| (e.get(0), c.clone()))
            .collect();
        assert_eq!(got, expected, "Hilbert fit for m = {}", m);
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(1),
            "m = {} took {:?}",
            m,
            elapsed
        );
    }
    println!("acceptance criterion 1 (Hilbert polynomial sanity): PASS");
}

fn bigraded_pair() -> Problem {
    let mut vars = Vec::new();
    for n in ["x1", "x2", "x3"] {
        vars.push(var(n, vec![1, 0]));
    }
    for n in ["y1", "y2", "y3"] {
        vars.push(var(n, vec![0, 1]));
    }
    let rel = |xi: usize, yj: usize| {
        let mut e = [0u32; 6];
        e[xi] = 1;
        e[yj] = 1;
        mono_poly(6, &e)
    };
    let relations = vec![rel(2, 3), rel(2, 4), rel(2, 5), rel(0, 5), rel(1, 5)];
    let ring = MultigradedRing::new(PRIME, 2, vars, relations).unwrap();
    let h1 = vec![mono_poly(6, &[1]), mono_poly(6, &[0, 1])];
    let h2 = vec![mono_poly(6, &[0, 0, 0, 1]), mono_poly(6, &[0, 0, 0, 0, 1])];
    Problem::new(ring, vec![h1, h2], FitConfig::default()).unwrap()
}

#[test]
fn criterion_2_bigraded_finite_pair() {
    let start = Instant::now();
    let pr = bigraded_pair();
    assert_eq!(pr.r().unwrap(), 2);
    let e = pr.rel_mixed_mult(&md(vec![1, 1])).unwrap();
    let einf = pr.e_infinity().unwrap();
    for beta in [vec![2, 0], vec![1, 1], vec![0, 2]] {
        assert_eq!(e.values[&md(beta.clone())], 0, "e at {:?}", beta);
        assert_eq!(einf.values[&md(beta.clone())], 0, "e_inf at {:?}", beta);
    }
    let rep = pr.criteria().unwrap();
    assert_eq!(rep.finite, Verdict::True);
    assert_eq!(rep.finite_birational, Verdict::True);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
    println!(
        "acceptance criterion 2 (bigraded finite pair): PASS ({:?})",
        elapsed
    );
}

#[test]
fn criterion_3_non_finite_detection() {
    let start = Instant::now();
    let ring = MultigradedRing::new(
        PRIME,
        1,
        vec![var("x", vec![1]), var("y", vec![1])],
        vec![],
    )
    .unwrap();
    let pr = Problem::new(ring, vec![vec![mono_poly(2, &[1])]], FitConfig::default()).unwrap();
    let einf = pr.e_infinity().unwrap();
    assert_eq!(einf.values[&md(vec![1])], 1);
    let rep = pr.criteria().unwrap();
    assert_eq!(rep.finite, Verdict::False);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {:?}", elapsed);
    println!(
        "acceptance criterion 3 (non-finite detection): PASS ({:?})",
        elapsed
    );
}

/// A randomized monomial-generated pair: a ring on at most 4 variables over
/// one or two grading blocks, subspaces spanned by random variable subsets,
/// optionally one monomial relation of weight 2 or 3.
struct RandomSpec {
    problem: Problem,
    p: usize,
}

fn random_spec(rng: &mut ChaCha8Rng) -> RandomSpec {
    let p: usize = if rng.gen_bool(0.5) { 1 } else { 2 };
    let blocks: Vec<usize> = if p == 1 {
        vec![rng.gen_range(2..=4)]
    } else {
        let first = rng.gen_range(1..=3);
        let second = rng.gen_range(1..=(4 - first));
        vec![first, second]
    };
    let mut vars = Vec::new();
    for (b, &count) in blocks.iter().enumerate() {
        for i in 0..count {
            let mut deg = vec![0i64; p];
            deg[b] = 1;
            vars.push(var(&format!("v{}_{}", b, i), deg));
        }
    }
    let nvars = vars.len();
    let mut relations = Vec::new();
    if rng.gen_bool(0.33) && nvars >= 2 {
        // one monomial relation of total degree 2 or 3
        let degree = rng.gen_range(2..=3);
        let mut exps = vec![0u32; nvars];
        for _ in 0..degree {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        relations.push(Polynomial::from_terms(vec![(1, Monomial(exps))]));
    }
    let ring = MultigradedRing::new(PRIME, p, vars, relations).unwrap();
    // H_i: a random nonempty subset of the block-i variables
    let mut h_gens = Vec::new();
    let mut offset = 0;
    for &count in &blocks {
        let mut gens = Vec::new();
        for i in 0..count {
            if rng.gen_bool(0.6) {
                let mut e = vec![0u32; nvars];
                e[offset + i] = 1;
                gens.push(Polynomial::from_terms(vec![(1, Monomial(e))]));
            }
        }
        if gens.is_empty() {
            let pick = rng.gen_range(0..count);
            let mut e = vec![0u32; nvars];
            e[offset + pick] = 1;
            gens.push(Polynomial::from_terms(vec![(1, Monomial(e))]));
        }
        offset += count;
        h_gens.push(gens);
    }
    let problem = Problem::new(ring, h_gens, FitConfig::default()).unwrap();
    RandomSpec { problem, p }
}

#[test]
fn criterion_4_and_8_lemma_identities_and_fit_shape() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let total = 50;
    for case in 0..total {
        let spec = random_spec(&mut rng);
        let pr = &spec.problem;
        let p = spec.p;
        let r = pr.r().unwrap();
        let t = Multidegree::new((0..p).map(|_| rng.gen_range(1..=3)).collect());
        let t_prime = Multidegree::new((0..p).map(|i| rng.gen_range(t.get(i)..=3)).collect());

        // criterion 8: certified fit shape at both parameters (the leading
        // coefficients are nonnegative integers by construction; extraction
        // fails otherwise)
        let e_t = pr.rel_mixed_mult(&t).unwrap();
        let e_tp = pr.rel_mixed_mult(&t_prime).unwrap();
        assert!(
            e_t.total_degree <= r,
            "case {}: fit degree {} > r {}",
            case,
            e_t.total_degree,
            r
        );
        assert!(e_tp.total_degree <= r, "case {}", case);

        // nonincreasing in t, componentwise over beta
        for (beta, &v) in &e_tp.values {
            assert!(
                v <= e_t.values[beta],
                "case {}: e_t' {} > e_t {} at {}",
                case,
                v,
                e_t.values[beta],
                beta
            );
        }

        // decomposition identity at t for every beta of weight r
        for beta in compositions(p, r) {
            let w = pr.decomposition_check(&t, &beta).unwrap();
            assert!(
                w.holds,
                "case {}: {} != {} + {} at beta {}",
                case, w.e_t, w.br, w.j_sharp, beta
            );
        }

        // the correction multiplicities are nonincreasing in the parameter
        let ones = Multidegree::new(vec![1; p]);
        let j_low = pr.j_sharp(&(&t - &ones)).unwrap();
        let j_high = pr.j_sharp(&(&t_prime - &ones)).unwrap();
        for (key, &v) in &j_high.values {
            assert!(
                v <= j_low.values[key],
                "case {}: j# not nonincreasing at {}",
                case,
                key
            );
        }

        // stabilization: the escalating-t route settles and matches the
        // direct stable computation (asserted inside e_infinity)
        let einf = pr.e_infinity().unwrap();
        for (beta, &v) in &einf.values {
            assert!(
                v <= e_t.values[beta],
                "case {}: stable value above e_t",
                case
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {:?}", elapsed);
    println!(
        "acceptance criterion 4 (lemma identities, {} random specs): PASS ({:?})",
        total, elapsed
    );
    println!("acceptance criterion 8 (fit degree bound and integrality): PASS");
}

fn p2_system(forms: Vec<Polynomial>) -> LinearSystem {
    LinearSystem::new(vec!["x0".into(), "x1".into(), "x2".into()], forms).unwrap()
}

fn cremona_net() -> LinearSystem {
    p2_system(vec![
        mono_poly(3, &[0, 1, 1]),
        mono_poly(3, &[1, 0, 1]),
        mono_poly(3, &[1, 1, 0]),
    ])
}

fn quadric_system() -> LinearSystem {
    p2_system(vec![
        mono_poly(3, &[2, 0, 0]),
        mono_poly(3, &[1, 1, 0]),
        mono_poly(3, &[1, 0, 1]),
        mono_poly(3, &[0, 2, 0]),
        mono_poly(3, &[0, 1, 1]),
        mono_poly(3, &[0, 0, 2]),
    ])
}

#[test]
fn criterion_5_projective_degrees() {
    let start = Instant::now();
    let cremona = MapsProblem::new(&[&cremona_net()], PRIME, FitConfig::default()).unwrap();
    let g = cremona.graph_multidegrees(0).unwrap();
    assert_eq!(g.projective_degrees(), vec![1, 2, 1]);
    let exc = g.exceptional_multidegrees().unwrap();
    assert_eq!(exc[&md(vec![1, 0])], 0);
    assert_eq!(exc[&md(vec![0, 1])], 3);

    let veronese = MapsProblem::new(&[&quadric_system()], PRIME, FitConfig::default()).unwrap();
    let gv = veronese.graph_multidegrees(0).unwrap();
    assert_eq!(gv.projective_degrees(), vec![1, 2, 4]);
    assert!(gv
        .exceptional_multidegrees()
        .unwrap()
        .values()
        .all(|&v| v == 0));
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
    println!(
        "acceptance criterion 5 (projective degrees): PASS ({:?})",
        elapsed
    );
}

#[test]
fn criterion_6_three_way_equivalence() {
    let cfg = FitConfig::default();
    // nested, not birational: all three routes false
    let rep = compare_linear_systems(&cremona_net(), &quadric_system(), PRIME, &cfg).unwrap();
    assert!(!rep.multiplicity_route && !rep.degree_route && !rep.exceptional_route);
    // equal systems: all true
    for sys in [cremona_net(), quadric_system()] {
        let rep = compare_linear_systems(&sys, &sys, PRIME, &cfg).unwrap();
        assert!(rep.multiplicity_route && rep.degree_route && rep.exceptional_route);
    }
    // identity sub-system of itself
    let id = p2_system(vec![
        mono_poly(3, &[1]),
        mono_poly(3, &[0, 1]),
        mono_poly(3, &[0, 0, 1]),
    ]);
    let rep = compare_linear_systems(&id, &id, PRIME, &cfg).unwrap();
    assert!(rep.verdict());
    println!("acceptance criterion 6 (three-way equivalence): PASS");
}

#[test]
fn criterion_7_oracle_certification() {
    let corpus_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut paths: Vec<_> = std::fs::read_dir(&corpus_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "alg"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 8, "corpus should have several problems");
    let flags = RunFlags {
        oracle: true,
        second_prime: Some(65521),
        ..Default::default()
    };
    for path in &paths {
        let text = std::fs::read_to_string(path).unwrap();
        let doc = parse_problem(&text).unwrap();
        let out = run(&doc, &flags).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
        let oracle = &out.json["oracle"];
        assert_eq!(
            oracle["mismatches"],
            serde_json::json!([]),
            "mismatches in {}",
            path.display()
        );
        assert_eq!(out.exit_code, 0, "{}", path.display());
        assert!(
            oracle["checked"].as_u64().unwrap() > 0,
            "{} checked nothing",
            path.display()
        );
    }
    println!(
        "acceptance criterion 7 (oracle certification, {} corpus problems): PASS",
        paths.len()
    );
}

#[test]
fn projective_dimension_of_products() {
    // supporting check used by several criteria: r for a product of
    // projective spaces is the sum of the factors' dimensions
    let ring = MultigradedRing::new(
        PRIME,
        2,
        vec![
            var("x0", vec![1, 0]),
            var("x1", vec![1, 0]),
            var("y0", vec![0, 1]),
            var("y1", vec![0, 1]),
        ],
        vec![],
    )
    .unwrap();
    let tables = RingTables::new(ring).unwrap();
    let engine = ProblemEngine::new(tables);
    assert_eq!(proj_dim(&engine, &FitConfig::default()).unwrap(), 2);
}
