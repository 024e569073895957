//! One function per CLI command; each returns the JSON it prints.

use serde_json::{json, Map, Value};

use prehom_core::invariants::{invariant_report, DeltaValue};
use prehom_core::lie::{fixed_space, stab_lie_algebra, stab_lie_algebra_tol, LieSubalgebra};
use prehom_core::octonion::{
    c_form, octonion_from_form, octonions, split_imaginary_basis, split_octonions, standard_imaginary_basis,
    AlgebraStructure,
};
use prehom_core::orbit::{
    classify_rational, classify_real, definiteness, irrationality_report, irrationality_report_exact,
    IrrationalityReport, Mode, OrbitReport,
};
use prehom_core::perturb::{extend_case1, extend_case2, extend_case3, Case1Sign, PartialTarget, PerturbationCertificate};
use prehom_core::representatives::{make_rep, RepName};
use prehom_core::search::{
    approximate_with, generators, hypothesis_check, via_orbit_target, BatchEvaluator, Extension, HypothesisReport,
    HypothesisVerdict, ObjectiveData, SearchConfig, SearchOutcome,
};
use prehom_core::{AlternatingForm, FormShape, Rational};

use crate::format::{
    form_to_json, index_key, matrix_to_json, target_to_json, AnyForm, FormatError, JsonScalar,
};
use crate::verify::{run_verify, VerifyReport};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] prehom_core::Error),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, CommandError>;

pub fn rep(tag: &str, d: Option<i64>, n: Option<usize>) -> Result<Value> {
    let x = make_rep(RepName::parse(tag, d, n)?)?;
    Ok(form_to_json(&x, None))
}

fn delta_json<S: JsonScalar>(d: &DeltaValue<S>) -> Value {
    match d {
        DeltaValue::Exact(v) => v.to_json(),
        DeltaValue::Inexact(v) => json!({ "approx": v }),
    }
}

fn invariant_of<S: JsonScalar>(x: &AlternatingForm<S>) -> Result<Value> {
    let r = invariant_report(x)?;
    Ok(json!({
        "case": r.case.case_number(),
        "delta": delta_json(&r.delta),
        "s_matrix": r.s_matrix.as_ref().map(matrix_to_json),
        "q_gram": r.q_form.as_ref().map(|q| matrix_to_json(q.gram())),
        "pfaffian": r.pfaffian.as_ref().map(JsonScalar::to_json),
    }))
}

pub fn invariant(x: &AnyForm) -> Result<Value> {
    match x {
        AnyForm::Rational(x) => invariant_of(x),
        AnyForm::Float(x) => invariant_of(x),
        AnyForm::Quad { form, .. } => invariant_of(form),
    }
}

fn orbit_json(o: &OrbitReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("case".into(), json!(o.case.case_number()));
    m.insert("real_orbit".into(), json!(o.real_orbit.tag()));
    m.insert("field_kx".into(), json!(o.field_kx));
    m.insert("real_rank_positive".into(), json!(o.real_rank_positive));
    m
}

fn irrationality_json(r: &IrrationalityReport, max_den: u64, tol: f64) -> Value {
    let mut flags = Map::new();
    for (name, v) in &r.flags {
        flags.insert(name.clone(), json!(v.label()));
    }
    match r.mode {
        Mode::Exact => json!({ "mode": "exact", "flags": flags }),
        Mode::Float => json!({ "mode": "float", "max_den": max_den, "tol": tol, "flags": flags }),
    }
}

pub fn classify(x: &AnyForm, max_den: u64, tol: f64) -> Result<Value> {
    let (orbit, irr) = match x {
        AnyForm::Rational(x) => (classify_rational(x)?, irrationality_report_exact(x)?),
        AnyForm::Float(x) => (classify_real(x, tol)?, irrationality_report(x, max_den, tol)?),
        AnyForm::Quad { form, .. } => (classify_real(form, tol)?, irrationality_report(&x.to_f64(), max_den, tol)?),
    };
    let mut m = orbit_json(&orbit);
    m.insert("irrationality".into(), irrationality_json(&irr, max_den, tol));
    Ok(Value::Object(m))
}

fn stab_of<S: JsonScalar>(x: &AlternatingForm<S>, tol: f64) -> Result<LieSubalgebra<S>> {
    Ok(if S::EXACT { stab_lie_algebra(x)? } else { stab_lie_algebra_tol(x, tol)? })
}

fn stab_json<S: JsonScalar>(x: &AlternatingForm<S>, tol: f64) -> Result<Value> {
    let l = stab_of(x, tol)?;
    Ok(json!({
        "dimension": l.dimension(),
        "basis": l.basis.iter().map(matrix_to_json).collect::<Vec<_>>(),
    }))
}

pub fn stab(x: &AnyForm, tol: f64) -> Result<Value> {
    match x {
        AnyForm::Rational(x) => stab_json(x, tol),
        AnyForm::Float(x) => stab_json(x, tol),
        AnyForm::Quad { form, .. } => stab_json(form, tol),
    }
}

fn fixed_json<S: JsonScalar>(x: &AlternatingForm<S>, tol: f64, d: Option<i64>) -> Result<Value> {
    let l = stab_of(x, tol)?;
    let f = fixed_space(&l, x.dim(), x.degree())?;
    Ok(json!({
        "dimension": f.len(),
        "basis": f.iter().map(|y| form_to_json(y, d)).collect::<Vec<_>>(),
    }))
}

pub fn fixed(x: &AnyForm, tol: f64) -> Result<Value> {
    match x {
        AnyForm::Rational(x) => fixed_json(x, tol, None),
        AnyForm::Float(x) => fixed_json(x, tol, None),
        AnyForm::Quad { form, d } => fixed_json(form, tol, *d),
    }
}

/// Normed-algebra checks on basis elements and their pairwise sums.
fn algebra_checks<S: JsonScalar>(a: &AlgebraStructure<S>, tol: f64) -> Result<Value> {
    let n = a.dim();
    let near = |u: &S, v: &S| (u.clone() - v.clone()).is_negligible(tol);
    let mut probes = Vec::new();
    for i in 0..n {
        probes.push(a.basis(i));
        for j in i + 1..n {
            probes.push(a.basis(i).add(&a.basis(j)));
        }
    }
    let one = a.one();
    let mut unit = true;
    let mut multiplicative = true;
    let mut alternative = true;
    for x in &probes {
        unit &= a.mul(&one, x)?.sub(x).is_negligible(tol) && a.mul(x, &one)?.sub(x).is_negligible(tol);
        for y in &probes {
            let nxy = a.norm(&a.mul(x, y)?)?;
            multiplicative &= near(&nxy, &(a.norm(x)? * a.norm(y)?));
            alternative &= a.associator(x, x, y)?.is_negligible(tol) && a.associator(y, x, x)?.is_negligible(tol);
        }
    }
    let definite = definiteness(a.norm_form().gram(), tol)?;
    Ok(json!({
        "unit": unit,
        "norm_multiplicative": multiplicative,
        "alternative": alternative,
        "norm_definite": definite,
        "probes": probes.len(),
    }))
}

fn table_json<S: JsonScalar>(x: &AlternatingForm<S>, tol: f64) -> Result<Value> {
    let a = octonion_from_form(x)?;
    let n = a.dim();
    let table: Vec<Value> = (0..n)
        .map(|i| {
            Value::Array((0..n).map(|j| Value::Array((0..n).map(|k| a.constant(i, j, k).to_json()).collect())).collect())
        })
        .collect();
    Ok(json!({
        "basis": ["1", "f1", "f2", "f3", "f4", "f5", "f6", "f7"],
        "table": table,
        "norm_gram": matrix_to_json(a.norm_form().gram()),
        "checks": algebra_checks(&a, tol)?,
    }))
}

pub fn octonion_table(x: &AnyForm, tol: f64) -> Result<Value> {
    match x {
        AnyForm::Rational(x) => table_json(x, 0.0),
        AnyForm::Float(x) => table_json(x, tol),
        AnyForm::Quad { form, .. } => table_json(form, 0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AlgebraKind {
    Split,
    Nonsplit,
}

pub fn octonion_c_form(kind: AlgebraKind) -> Result<Value> {
    let c = match kind {
        AlgebraKind::Split => c_form(&split_octonions::<Rational>(), &split_imaginary_basis())?,
        AlgebraKind::Nonsplit => c_form(&octonions::<Rational>(), &standard_imaginary_basis())?,
    };
    Ok(form_to_json(&c, None))
}

pub fn shape_for(case: u8, n: Option<usize>) -> Result<FormShape> {
    match (case, n) {
        (1, _) => Ok(FormShape::Case1),
        (2, _) => Ok(FormShape::Case2),
        (3, Some(n)) if n >= 1 => Ok(FormShape::Case3 { n }),
        (3, _) => Err(CommandError::Other("case 3 needs --n ≥ 1".into())),
        _ => Err(CommandError::Other(format!("unknown case {case}"))),
    }
}

pub fn certificate_json(c: &PerturbationCertificate, epsilon: f64) -> Value {
    let mut aux = Map::new();
    for (k, v) in &c.auxiliaries {
        aux.insert(k.clone(), v.to_json());
    }
    json!({
        "epsilon": epsilon,
        "deviation": c.deviation,
        "requested": c.requested.tag(),
        "orbit": c.orbit.tag(),
        "holds": c.holds(epsilon),
        "growth_steps": c.growth_steps,
        "auxiliaries": aux,
    })
}

pub fn perturb(y: &PartialTarget, epsilon: f64, sign: Case1Sign) -> Result<Value> {
    let c = match y.shape() {
        FormShape::Case1 => extend_case1(y, epsilon, sign)?,
        FormShape::Case2 => extend_case2(y, epsilon)?,
        FormShape::Case3 { .. } => extend_case3(y, epsilon)?,
    };
    Ok(json!({
        "form": form_to_json(&c.form, None),
        "certificate": certificate_json(&c, epsilon),
    }))
}

pub struct ApproximateArgs {
    pub epsilon: f64,
    pub depth: usize,
    pub beam: usize,
    pub seed: u64,
    pub via_orbit: bool,
    pub both_sides: bool,
    pub max_den: u64,
    pub tol: f64,
}

fn hypothesis_json(h: &HypothesisReport, max_den: u64, tol: f64) -> Value {
    json!({
        "verdict": match h.verdict { HypothesisVerdict::Pass => "pass", HypothesisVerdict::Warn => "warn" },
        "real_orbit": h.real_orbit.tag(),
        "real_rank_positive": h.real_rank_positive,
        "irrationality": h.irrationality.as_ref().map(|r| irrationality_json(r, max_den, tol)),
        "reasons": h.reasons,
    })
}

pub const TRACE_NOTE: &str =
    "observed best-so-far objective after each depth; an artifact of this run, not a convergence rate";

/// Runs the beam search; `evaluator` decides serial or parallel evaluation.
pub fn approximate(
    x: &AnyForm,
    y: &PartialTarget,
    args: &ApproximateArgs,
    evaluator: &dyn BatchEvaluator,
) -> Result<Value> {
    let xf = x.to_f64();
    let target = if args.via_orbit { via_orbit_target(&xf, y, args.epsilon)? } else { y.clone() };
    let ext = if args.both_sides { Extension::Both } else { Extension::Right };
    let cfg = SearchConfig::new(args.beam, args.depth, args.seed, args.epsilon)?.with_extension(ext);
    let out = approximate_with(&xf, &target, &cfg, evaluator)?;
    let hyp = hypothesis_check(&xf, args.max_den, args.tol)?;
    Ok(outcome_json(&xf, &target, &out, &hyp, args))
}

fn outcome_json(
    x: &AlternatingForm<f64>,
    y: &PartialTarget,
    out: &SearchOutcome,
    hyp: &HypothesisReport,
    args: &ApproximateArgs,
) -> Value {
    let h = &out.best.h;
    let n = x.dim();
    // u_i = h f_i is column i of h
    let basis: Vec<Vec<i64>> = (0..n).map(|c| (0..n).map(|r| h.get(r, c)).collect()).collect();
    let gens = generators(n);
    let word: Vec<Value> = out
        .best
        .word
        .iter()
        .map(|&l| {
            let (side, g) = if l < gens.len() { ("right", gens[l]) } else { ("left", gens[l - gens.len()]) };
            json!({ "i": g.i + 1, "j": g.j + 1, "sign": g.sign, "side": side })
        })
        .collect();
    let mut devs = Map::new();
    let hf: Vec<f64> = h.rows().into_iter().flatten().map(|v| v as f64).collect();
    if let Ok(data) = ObjectiveData::new(x, y) {
        for ((idx, _), d) in y.iter().zip(data.deviations(&hf)) {
            devs.insert(index_key(idx), d.to_json());
        }
    }
    json!({
        "basis": basis,
        "word": word,
        "objective": out.best.objective,
        "success": out.success,
        "epsilon": args.epsilon,
        "deviations": devs,
        "target": target_to_json(y),
        "hypothesis": hypothesis_json(hyp, args.max_den, args.tol),
        "trace": { "note": TRACE_NOTE, "best_so_far": out.trace },
        "seed": out.seed,
        "via_orbit": args.via_orbit,
    })
}

pub fn verify() -> (VerifyReport, Value) {
    let r = run_verify();
    let v = serde_json::to_value(&r).unwrap_or(Value::Null);
    (r, v)
}

/// Sign flag of `perturb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SignArg {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

impl From<SignArg> for Case1Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Case1Sign::Positive,
            SignArg::Minus => Case1Sign::Negative,
        }
    }
}
