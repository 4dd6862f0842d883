//! Command dispatch and JSON result emission for parsed problem documents.

mod parse;

pub use parse::{parse_problem, ArgValue, Command, ModuleDecl, ProblemDocument};

use crate::degree::{compositions, Multidegree};
use crate::error::{Error, Result};
use crate::gring::{ModuleSpec, MultigradedRing, VarSpec};
use crate::hilbert::FitConfig;
use crate::maps::{LinearSystem, MapsProblem};
use crate::multiplicity::{
    buchsbaum_rim, split_key, FitCertificate, Problem, Verdict,
};
use crate::oracle::{cross_check, CrossCheckReport, OracleConfig};
use serde_json::{json, Map, Value};
use std::sync::Arc;

pub const SCHEMA_VERSION: u64 = 1;

/// CLI-level switches; document values are the defaults.
#[derive(Debug, Clone, Default)]
pub struct RunFlags {
    pub prime_override: Option<u64>,
    pub second_prime: Option<u64>,
    pub max_origin: Option<i64>,
    pub oracle: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub json: Value,
    pub exit_code: i32,
}

/// Render an error as the machine-readable object printed on stderr.
pub fn error_json(err: &Error) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(err.kind()));
    obj.insert("message".into(), json!(err.to_string()));
    if let Error::Parse { line, column, .. } = err {
        obj.insert("line".into(), json!(line));
        obj.insert("column".into(), json!(column));
    }
    json!({ "error": Value::Object(obj) })
}

/// Process exit code for an error, per the CLI contract.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::UndeclaredName(_) | Error::InhomogeneousRelation(_) => 3,
        Error::NoStabilization { .. } => 2,
        _ => 1,
    }
}

struct Session<'a> {
    doc: &'a ProblemDocument,
    prime: u64,
    config: FitConfig,
    problem: Option<Problem>,
    maps: Option<MapsProblem>,
}

impl<'a> Session<'a> {
    fn new(doc: &'a ProblemDocument, flags: &RunFlags) -> Self {
        let mut config = FitConfig::default();
        if let Some(m) = flags.max_origin {
            config.max_origin = m;
        }
        Session {
            doc,
            prime: flags.prime_override.unwrap_or(doc.prime),
            config,
            problem: None,
            maps: None,
        }
    }

    fn ring(&self) -> Result<Arc<MultigradedRing>> {
        let vars = self
            .doc
            .vars
            .iter()
            .map(|(n, d)| VarSpec {
                name: n.clone(),
                degree: d.clone(),
            })
            .collect();
        MultigradedRing::new(self.prime, self.doc.grading, vars, self.doc.relations.clone())
    }

    fn problem(&mut self) -> Result<&Problem> {
        if self.problem.is_none() {
            let p = self.doc.grading;
            let mut h = Vec::with_capacity(p);
            for i in 1..=p {
                let gens = self.doc.h_decls.get(&i).ok_or_else(|| {
                    Error::Invalid(format!("H{} not declared (grading rank is {})", i, p))
                })?;
                h.push(gens.clone());
            }
            self.problem = Some(Problem::new(self.ring()?, h, self.config.clone())?);
        }
        Ok(self.problem.as_ref().unwrap())
    }

    fn system(&self, index: usize) -> Result<LinearSystem> {
        if self.doc.grading != 1 {
            return Err(Error::Invalid(
                "map commands need a rank-1 grading".into(),
            ));
        }
        if !self.doc.relations.is_empty() {
            return Err(Error::Invalid(
                "map commands need a free ambient ring (no relations)".into(),
            ));
        }
        let forms = self
            .doc
            .h_decls
            .get(&index)
            .ok_or_else(|| Error::Invalid(format!("H{} not declared", index)))?;
        LinearSystem::new(
            self.doc.vars.iter().map(|(n, _)| n.clone()).collect(),
            forms.clone(),
        )
    }

    fn maps_problem(&mut self, count: usize) -> Result<&MapsProblem> {
        if self.maps.is_none() {
            let systems: Vec<LinearSystem> = (1..=count)
                .map(|i| self.system(i))
                .collect::<Result<_>>()?;
            let refs: Vec<&LinearSystem> = systems.iter().collect();
            self.maps = Some(MapsProblem::new(&refs, self.prime, self.config.clone())?);
        }
        Ok(self.maps.as_ref().unwrap())
    }

    fn arg_tuple(&self, cmd: &Command, key: &str, default: i64) -> Result<Multidegree> {
        let p = self.doc.grading;
        match cmd.args.get(key) {
            None => Ok(Multidegree::constant(p, default)),
            Some(ArgValue::Int(v)) => Ok(Multidegree::constant(p, *v)),
            Some(ArgValue::Tuple(vs)) => {
                if vs.len() != p {
                    return Err(Error::Invalid(format!(
                        "`{}` has {} entries, grading rank is {}",
                        key,
                        vs.len(),
                        p
                    )));
                }
                Ok(Multidegree::new(vs.clone()))
            }
            Some(other) => Err(Error::Invalid(format!(
                "`{}` must be an integer or tuple, got {}",
                key, other
            ))),
        }
    }

    fn dispatch(&mut self, cmd: &Command) -> Result<Value> {
        let mut out = Map::new();
        out.insert("schema".into(), json!(SCHEMA_VERSION));
        out.insert("command".into(), json!(cmd.verb));
        out.insert("prime".into(), json!(self.prime));
        match cmd.verb.as_str() {
            "relmult" => {
                let t = self.arg_tuple(cmd, "t", 1)?;
                let pr = self.problem()?;
                let res = pr.rel_mixed_mult(&t)?;
                out.insert("r".into(), json!(pr.r()?));
                out.insert("t".into(), json!(t.to_string()));
                out.insert("multiplicities".into(), beta_map(&res.values));
                out.insert("certificate".into(), cert_json(&res.certificate));
            }
            "jsharp" => {
                let t = self.arg_tuple(cmd, "t", 0)?;
                let p = self.doc.grading;
                let pr = self.problem()?;
                let res = pr.j_sharp(&t)?;
                out.insert("r".into(), json!(pr.r()?));
                out.insert("t".into(), json!(t.to_string()));
                out.insert("multiplicities".into(), alpha_beta_map(&res.values, p));
                out.insert("certificate".into(), cert_json(&res.certificate));
            }
            "br" => {
                let p = self.doc.grading;
                let module_spec = match cmd.args.get("module") {
                    None => ModuleSpec::WholeRing,
                    Some(ArgValue::Name(name)) => match self.doc.modules.get(name) {
                        Some(ModuleDecl::Ideal(g)) => ModuleSpec::Ideal(g.clone()),
                        Some(ModuleDecl::Quotient(g)) => ModuleSpec::CyclicQuotient(g.clone()),
                        None => return Err(Error::UndeclaredName(name.clone())),
                    },
                    Some(other) => {
                        return Err(Error::Invalid(format!(
                            "`module` must be a name, got {}",
                            other
                        )))
                    }
                };
                let pr = self.problem()?;
                let module = if module_spec == ModuleSpec::WholeRing {
                    pr.engine().whole_ring()
                } else {
                    // a fresh engine-registered module; requires mut access
                    let _ = pr;
                    let problem = self.problem.as_mut().unwrap();
                    problem.engine_mut().register_module(module_spec)?
                };
                let pr = self.problem.as_ref().unwrap();
                let res = buchsbaum_rim(pr.engine(), module, pr.seeds(), pr.config())?;
                out.insert("r".into(), json!(res.r_module));
                out.insert("multiplicities".into(), alpha_beta_map(&res.all, p));
                out.insert("br".into(), beta_map(&res.br));
                out.insert("certificate".into(), cert_json(&res.certificate));
            }
            "einf" => {
                let pr = self.problem()?;
                let res = pr.e_infinity()?;
                out.insert("r".into(), json!(pr.r()?));
                out.insert("multiplicities".into(), beta_map(&res.values));
                out.insert(
                    "schedule".into(),
                    Value::Array(
                        res.schedule
                            .iter()
                            .map(|(t, m)| json!({ "t": t, "values": beta_map(m) }))
                            .collect(),
                    ),
                );
                out.insert("certificate".into(), cert_json(&res.certificate));
            }
            "criteria" => {
                let pr = self.problem()?;
                let rep = pr.criteria()?;
                out.insert("r".into(), json!(rep.r));
                let mut verdicts = Map::new();
                verdicts.insert("finite".into(), verdict_json(&rep.finite));
                verdicts.insert(
                    "finiteBirational".into(),
                    verdict_json(&rep.finite_birational),
                );
                out.insert("verdicts".into(), Value::Object(verdicts));
                if let Some(e) = &rep.e {
                    out.insert("multiplicities".into(), beta_map(e));
                }
                if let Some(einf) = &rep.e_infinity {
                    out.insert("e_infinity".into(), beta_map(einf));
                }
                if let Some(s) = rep.segre_e {
                    out.insert("segre_e".into(), json!(s));
                }
                if let Some(s) = rep.segre_e_infinity {
                    out.insert("segre_e_infinity".into(), json!(s));
                }
                if let Some(c) = &rep.e_certificate {
                    out.insert("certificate".into(), cert_json(c));
                }
                out.insert("assumption".into(), json!(rep.assumption));
            }
            "decomp" => {
                let t = self.arg_tuple(cmd, "t", 1)?;
                let grading = self.doc.grading;
                let pr = self.problem()?;
                let r = pr.r()?;
                out.insert("r".into(), json!(r));
                out.insert("t".into(), json!(t.to_string()));
                let betas: Vec<Multidegree> = match cmd.args.get("beta") {
                    Some(ArgValue::Tuple(vs)) => vec![Multidegree::new(vs.clone())],
                    Some(ArgValue::Int(v)) => vec![Multidegree::new(vec![*v])],
                    _ => compositions(grading, r),
                };
                let mut holds_all = true;
                let mut witnesses = Map::new();
                for beta in betas {
                    let w = pr.decomposition_check(&t, &beta)?;
                    holds_all &= w.holds;
                    witnesses.insert(
                        beta.to_string(),
                        json!({
                            "e_t": w.e_t,
                            "br": w.br,
                            "j_sharp": w.j_sharp,
                            "holds": w.holds,
                        }),
                    );
                }
                out.insert("witnesses".into(), Value::Object(witnesses));
                out.insert("holds".into(), json!(holds_all));
            }
            "suv" => {
                let t = match cmd.args.get("t") {
                    None => 1,
                    Some(ArgValue::Int(v)) => *v,
                    Some(other) => {
                        return Err(Error::Invalid(format!(
                            "`t` must be an integer, got {}",
                            other
                        )))
                    }
                };
                let pr = self.problem()?;
                out.insert("r".into(), json!(pr.r()?));
                out.insert("t".into(), json!(t.to_string()));
                out.insert("value".into(), json!(pr.suv_relative_mult(t)?));
            }
            "mapdeg" => {
                let mp = self.maps_problem(1)?;
                let g = mp.graph_multidegrees(0)?;
                out.insert("r".into(), json!(g.r));
                out.insert("d".into(), json!(g.d));
                out.insert("projective_degrees".into(), json!(g.projective_degrees()));
                out.insert("gamma".into(), beta_map(&g.gamma));
                out.insert("exceptional".into(), beta_map(&g.exceptional_multidegrees()?));
                out.insert("certificate".into(), cert_json(&g.certificate));
            }
            "compare" => {
                let mp = self.maps_problem(2)?;
                let rep = mp.compare(0, 1)?;
                let mut routes = Map::new();
                routes.insert("multiplicities".into(), json!(rep.multiplicity_route));
                routes.insert("projective_degrees".into(), json!(rep.degree_route));
                routes.insert("exceptional".into(), json!(rep.exceptional_route));
                out.insert("routes".into(), Value::Object(routes));
                out.insert("verdicts".into(), json!({ "finiteBirational": rep.verdict() }));
                out.insert("degrees_first".into(), json!(rep.degrees_small));
                out.insert("degrees_second".into(), json!(rep.degrees_big));
                out.insert("multiplicities".into(), beta_map(&rep.multiplicities));
                out.insert("certificate".into(), cert_json(&rep.certificate));
            }
            other => {
                return Err(Error::Invalid(format!(
                    "unknown command `{}` (line {})",
                    other, cmd.line
                )))
            }
        }
        Ok(Value::Object(out))
    }

    fn oracle_report(&self, oracle_prime: Option<u64>) -> Result<CrossCheckReport> {
        let mut cfg = OracleConfig::default();
        if let Some(q) = oracle_prime {
            cfg.prime = q;
        }
        let mut total = CrossCheckReport::default();
        for (desc, trace) in [
            self.problem
                .as_ref()
                .map(|p| (p.engine().describe(), p.engine().trace_snapshot())),
            self.maps
                .as_ref()
                .map(|m| (m.describe(), m.trace_snapshot())),
        ]
        .into_iter()
        .flatten()
        {
            let rep = cross_check(&desc, &trace, &cfg)?;
            total.checked += rep.checked;
            total.skipped += rep.skipped;
            total.mismatches.extend(rep.mismatches);
        }
        Ok(total)
    }
}

fn beta_map(values: &std::collections::BTreeMap<Multidegree, u64>) -> Value {
    let mut map = Map::new();
    for (k, v) in values {
        map.insert(k.to_string(), json!(v));
    }
    Value::Object(map)
}

fn alpha_beta_map(values: &std::collections::BTreeMap<Multidegree, u64>, p: usize) -> Value {
    let mut map = Map::new();
    for (k, v) in values {
        let (alpha, beta) = split_key(k, p);
        map.insert(format!("{}|{}", alpha, beta), json!(v));
    }
    Value::Object(map)
}

fn cert_json(cert: &FitCertificate) -> Value {
    json!({
        "origin": cert.origin,
        "extent": cert.extent,
        "validated_points": cert.validated_points,
    })
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::True => json!(true),
        Verdict::False => json!(false),
        Verdict::Undetermined(reason) => json!({ "undetermined": reason }),
    }
}

/// Run every command block of the document and assemble the JSON report.
/// A single command yields its object directly; several are wrapped in a
/// `reports` array. With `flags.oracle`, every traced dimension is replayed
/// by the independent verifier and mismatches set exit code 4.
pub fn run(doc: &ProblemDocument, flags: &RunFlags) -> Result<RunOutput> {
    if doc.commands.is_empty() {
        return Err(Error::Invalid("document contains no `cmd` statement".into()));
    }
    let mut session = Session::new(doc, flags);
    let mut reports = Vec::new();
    for cmd in &doc.commands {
        reports.push(session.dispatch(cmd)?);
    }
    let mut exit_code = 0;
    let oracle_json = if flags.oracle {
        let rep = session.oracle_report(flags.second_prime)?;
        if !rep.is_clean() {
            exit_code = 4;
        }
        Some(json!({
            "checked": rep.checked,
            "skipped": rep.skipped,
            "mismatches": rep.mismatches.iter().map(|m| json!({
                "query": m.key.to_string(),
                "engine": m.engine_value,
                "oracle": m.oracle_value,
            })).collect::<Vec<_>>(),
        }))
    } else {
        None
    };
    let mut json = if reports.len() == 1 {
        reports.pop().unwrap()
    } else {
        json!({ "schema": SCHEMA_VERSION, "reports": reports })
    };
    if let Some(oracle) = oracle_json {
        json.as_object_mut()
            .expect("report object")
            .insert("oracle".into(), oracle);
    }
    Ok(RunOutput { json, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str, flags: &RunFlags) -> Result<RunOutput> {
        let doc = parse_problem(text)?;
        run(&doc, flags)
    }

    const X_IN_XY: &str = "prime 32003\ngrading 1\nvars x:1 y:1\nH1 = x\n";

    #[test]
    fn relmult_report_shape() {
        let out = run_text(
            &format!("{}cmd relmult t=1\n", X_IN_XY),
            &RunFlags::default(),
        )
        .unwrap();
        assert_eq!(out.exit_code, 0);
        let obj = out.json.as_object().unwrap();
        assert_eq!(obj["schema"], json!(1));
        assert_eq!(obj["command"], json!("relmult"));
        assert_eq!(obj["r"], json!(1));
        assert_eq!(obj["multiplicities"]["(1)"], json!(1));
        assert!(obj.contains_key("certificate"));
    }

    #[test]
    fn criteria_report_shape() {
        let out = run_text(
            &format!("{}cmd criteria\n", X_IN_XY),
            &RunFlags::default(),
        )
        .unwrap();
        let obj = out.json.as_object().unwrap();
        assert_eq!(obj["verdicts"]["finite"], json!(false));
        assert_eq!(obj["verdicts"]["finiteBirational"], json!(false));
    }

    #[test]
    fn deterministic_output() {
        let text = format!("{}cmd criteria\ncmd relmult t=2\n", X_IN_XY);
        let a = run_text(&text, &RunFlags::default()).unwrap();
        let b = run_text(&text, &RunFlags::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&a.json).unwrap(),
            serde_json::to_string(&b.json).unwrap()
        );
    }

    #[test]
    fn oracle_clean_run() {
        let out = run_text(
            &format!("{}cmd relmult t=1\n", X_IN_XY),
            &RunFlags {
                oracle: true,
                second_prime: Some(65521),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.exit_code, 0);
        let oracle = &out.json["oracle"];
        assert_eq!(oracle["mismatches"], json!([]));
        assert!(oracle["checked"].as_u64().unwrap() > 0);
    }

    #[test]
    fn oracle_flags_char_divisible_relation() {
        let text = "prime 32003\ngrading 1\nvars x:1 y:1\nrel 32003*x^2\nH1 = x\ncmd relmult t=1\n";
        let out = run_text(
            text,
            &RunFlags {
                oracle: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.exit_code, 4);
        assert!(!out.json["oracle"]["mismatches"].as_array().unwrap().is_empty());
    }

    #[test]
    fn mapdeg_cremona() {
        let text = "prime 32003\ngrading 1\nvars x0:1 x1:1 x2:1\nH1 = x1*x2, x0*x2, x0*x1\ncmd mapdeg\n";
        let out = run_text(text, &RunFlags::default()).unwrap();
        assert_eq!(out.json["projective_degrees"], json!([1, 2, 1]));
        assert_eq!(out.json["exceptional"]["(0,1)"], json!(3));
        assert_eq!(out.json["exceptional"]["(1,0)"], json!(0));
    }

    #[test]
    fn unknown_command_is_invalid() {
        let err = run_text(
            &format!("{}cmd bogus\n", X_IN_XY),
            &RunFlags::default(),
        )
        .unwrap_err();
        assert_eq!(err.kind(), "Invalid");
    }

    #[test]
    fn br_with_module() {
        let text = "prime 32003\ngrading 1\nvars x:1 y:1\nH1 = x\nmodule m = ideal(x)\ncmd br module=m\n";
        let out = run_text(text, &RunFlags::default()).unwrap();
        assert_eq!(out.json["br"]["(1)"], json!(1));
        assert_eq!(out.json["r"], json!(1));
    }

    #[test]
    fn error_objects_and_exit_codes() {
        let parse_err = parse_problem("").unwrap_err();
        assert_eq!(error_exit_code(&parse_err), 3);
        let obj = error_json(&parse_err);
        assert_eq!(obj["error"]["kind"], json!("ParseError"));
        assert_eq!(obj["error"]["line"], json!(1));

        let nostab = Error::NoStabilization {
            max_origin: 64,
            context: "test".into(),
        };
        assert_eq!(error_exit_code(&nostab), 2);
        assert_eq!(error_json(&nostab)["error"]["kind"], json!("NoStabilization"));

        let undeclared = run_text(
            "prime 7\ngrading 1\nvars x:1\nH1 = x\ncmd br module=nope\n",
            &RunFlags::default(),
        )
        .unwrap_err();
        assert_eq!(error_exit_code(&undeclared), 3);
    }
}
