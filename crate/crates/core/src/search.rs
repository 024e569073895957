//! Beam search over words in the elementary generators `E_ij(±1)` of `SL(n, ℤ)`
//! for an integral basis `u_i = h·f_i` with `x(u_I) ≈ y_I` on the constrained
//! indices.
//!
//! Objective values carry no convergence-rate claim; a trace only records what
//! one run of the search found.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lie::stab_lie_algebra_tol;
use crate::linalg::Matrix;
use crate::multilinear::{AlternatingForm, FormShape};
use crate::orbit::{classify_real, irrationality_report, IrrationalityReport, RealOrbit};
use crate::perturb::{constrained_indices, extend_case1, extend_case2, extend_case3, Case1Sign, PartialTarget};
use crate::scalar::{rat, Rational};

/// Which side new generators multiply on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// `h ↦ h·E`, refining the basis.
    Right,
    /// `h ↦ h·E` and `h ↦ E·h`.
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub beam_width: usize,
    pub max_depth: usize,
    /// Recorded with the result; the search itself is deterministic.
    pub seed: u64,
    pub epsilon: f64,
    pub extension: Extension,
}

impl SearchConfig {
    pub fn new(beam_width: usize, max_depth: usize, seed: u64, epsilon: f64) -> Result<Self> {
        if beam_width == 0 || max_depth == 0 {
            return Err(Error::invalid("beam width and depth must be positive"));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::invalid("epsilon must be positive"));
        }
        Ok(SearchConfig { beam_width, max_depth, seed, epsilon, extension: Extension::Right })
    }

    pub fn with_extension(mut self, e: Extension) -> Self {
        self.extension = e;
        self
    }
}

/// `E_ij(s) = I + s·e_ij`, `i ≠ j`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub i: usize,
    pub j: usize,
    pub sign: i64,
}

/// The `2n(n − 1)` generators in index order.
pub fn generators(n: usize) -> Vec<Generator> {
    let mut out = Vec::with_capacity(2 * n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(Generator { i, j, sign: 1 });
                out.push(Generator { i, j, sign: -1 });
            }
        }
    }
    out
}

/// An integral `n×n` matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMatrix {
    pub n: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::shape("square integer matrix expected"));
        }
        Ok(IntMatrix { n, data: rows.concat() })
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.n + c]
    }

    /// `h·E_ij(s)`: column `j` += `s`·column `i`.
    pub fn mul_right(&self, g: Generator) -> Option<Self> {
        let mut out = self.clone();
        for r in 0..self.n {
            let v = self.get(r, g.i).checked_mul(g.sign)?;
            out.data[r * self.n + g.j] = self.get(r, g.j).checked_add(v)?;
        }
        Some(out)
    }

    /// `E_ij(s)·h`: row `i` += `s`·row `j`.
    pub fn mul_left(&self, g: Generator) -> Option<Self> {
        let mut out = self.clone();
        for c in 0..self.n {
            let v = self.get(g.j, c).checked_mul(g.sign)?;
            out.data[g.i * self.n + c] = self.get(g.i, c).checked_add(v)?;
        }
        Some(out)
    }

    pub fn to_rational(&self) -> Matrix<Rational> {
        Matrix::from_fn(self.n, self.n, |r, c| rat(self.get(r, c), 1))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix::from_fn(self.n, self.n, |r, c| self.get(r, c) as f64)
    }

    pub fn det(&self) -> Result<Rational> {
        self.to_rational().det()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// One step of a word: generator index, offset by `2n(n − 1)` for left moves.
pub type Letter = usize;

/// Applies a word to the identity.
pub fn word_matrix(n: usize, word: &[Letter]) -> Result<IntMatrix> {
    let gens = generators(n);
    let g = gens.len();
    let mut h = IntMatrix::identity(n);
    for &l in word {
        let next = if l < g {
            h.mul_right(gens[l])
        } else if l < 2 * g {
            h.mul_left(gens[l - g])
        } else {
            return Err(Error::invalid("letter out of range"));
        };
        h = next.ok_or_else(|| Error::domain("integer overflow along word"))?;
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisCandidate {
    pub h: IntMatrix,
    pub word: Vec<Letter>,
    pub objective: f64,
}

/// Precomputed data for fast objective evaluation.
#[derive(Clone, Debug)]
pub struct ObjectiveData {
    n: usize,
    degree: usize,
    terms: Vec<(Vec<usize>, f64)>,
    targets: Vec<(Vec<usize>, f64)>,
}

impl ObjectiveData {
    pub fn new(x: &AlternatingForm<f64>, y: &PartialTarget) -> Result<Self> {
        let shape = x.shape()?;
        if shape != y.shape() {
            return Err(Error::shape("target and form belong to different cases"));
        }
        if !matches!(x.degree(), 2 | 3) {
            return Err(Error::shape("degree 2 or 3 expected"));
        }
        let terms = x.iter().map(|(i, v)| (i.iter().map(|k| k - 1).collect(), *v)).collect();
        let targets = y.iter().map(|(i, v)| (i.iter().map(|k| k - 1).collect(), *v)).collect();
        Ok(ObjectiveData { n: x.dim(), degree: x.degree(), terms, targets })
    }

    fn minor(&self, h: &[f64], rows: &[usize], cols: &[usize]) -> f64 {
        let n = self.n;
        let a = |r: usize, c: usize| h[rows[r] * n + cols[c]];
        if self.degree == 2 {
            a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)
        } else {
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
    }

    /// `x(h f_{i₁}, …)` for a real matrix `h` (row major).
    pub fn value(&self, h: &[f64], idx: &[usize]) -> f64 {
        self.terms.iter().map(|(j, c)| c * self.minor(h, j, idx)).sum()
    }

    /// Per-index deviations `y_I − x(u_I)`.
    pub fn deviations(&self, h: &[f64]) -> Vec<f64> {
        self.targets.iter().map(|(i, y)| y - self.value(h, i)).collect()
    }

    pub fn eval_real(&self, h: &[f64]) -> f64 {
        self.targets.iter().fold(0.0f64, |m, (i, y)| m.max((y - self.value(h, i)).abs()))
    }

    pub fn eval(&self, h: &IntMatrix) -> f64 {
        let hf: Vec<f64> = h.data.iter().map(|&v| v as f64).collect();
        self.eval_real(&hf)
    }
}

/// `max_I |y_I − x(h f_I)|` over the constrained indices.
pub fn objective(x: &AlternatingForm<f64>, y: &PartialTarget, h: &IntMatrix) -> Result<f64> {
    if h.n != x.dim() {
        return Err(Error::dims(x.dim(), h.n));
    }
    if h.det()? != rat(1, 1) {
        return Err(Error::invalid("h is not unimodular"));
    }
    Ok(ObjectiveData::new(x, y)?.eval(h))
}

/// Evaluates a batch of matrices, preserving order.
pub trait BatchEvaluator {
    fn evaluate(&self, data: &ObjectiveData, batch: &[IntMatrix]) -> Vec<f64>;
}

pub struct SerialEvaluator;

impl BatchEvaluator for SerialEvaluator {
    fn evaluate(&self, data: &ObjectiveData, batch: &[IntMatrix]) -> Vec<f64> {
        batch.iter().map(|h| data.eval(h)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: BasisCandidate,
    pub success: bool,
    /// Best objective so far after each level, starting at depth 0.
    pub trace: Vec<f64>,
    pub seed: u64,
}

fn rank(a: &BasisCandidate, b: &BasisCandidate) -> Ordering {
    a.objective.total_cmp(&b.objective).then_with(|| a.word.cmp(&b.word))
}

/// Beam search with the serial evaluator.
pub fn approximate(x: &AlternatingForm<f64>, y: &PartialTarget, config: &SearchConfig) -> Result<SearchOutcome> {
    approximate_with(x, y, config, &SerialEvaluator)
}

/// Beam search; `evaluator` may run in parallel since selection only depends on
/// the returned values.
pub fn approximate_with(
    x: &AlternatingForm<f64>,
    y: &PartialTarget,
    config: &SearchConfig,
    evaluator: &dyn BatchEvaluator,
) -> Result<SearchOutcome> {
    let data = ObjectiveData::new(x, y)?;
    let n = x.dim();
    let gens = generators(n);
    let g = gens.len();
    let start = IntMatrix::identity(n);
    let mut best = BasisCandidate { objective: data.eval(&start), h: start.clone(), word: Vec::new() };
    let mut trace = alloc::vec![best.objective];
    let mut seen: BTreeSet<IntMatrix> = BTreeSet::new();
    seen.insert(start);
    let mut beam = alloc::vec![best.clone()];
    for _ in 0..config.max_depth {
        if best.objective < config.epsilon {
            break;
        }
        let mut hs = Vec::new();
        let mut words = Vec::new();
        for c in &beam {
            for (k, gen) in gens.iter().enumerate() {
                let mut moves = alloc::vec![(k, c.h.mul_right(*gen))];
                if config.extension == Extension::Both {
                    moves.push((g + k, c.h.mul_left(*gen)));
                }
                for (letter, h) in moves {
                    let Some(h) = h else { continue };
                    let mut w = c.word.clone();
                    w.push(letter);
                    hs.push(h);
                    words.push(w);
                }
            }
        }
        // keep the smallest word for each new matrix
        let mut order: Vec<usize> = (0..hs.len()).collect();
        order.sort_by(|&a, &b| hs[a].cmp(&hs[b]).then_with(|| words[a].cmp(&words[b])));
        let mut fresh_h = Vec::new();
        let mut fresh_w = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            if pos > 0 && hs[order[pos - 1]] == hs[i] {
                continue;
            }
            if seen.contains(&hs[i]) {
                continue;
            }
            fresh_h.push(hs[i].clone());
            fresh_w.push(words[i].clone());
        }
        if fresh_h.is_empty() {
            trace.push(best.objective);
            continue;
        }
        let values = evaluator.evaluate(&data, &fresh_h);
        let mut level: Vec<BasisCandidate> = fresh_h
            .into_iter()
            .zip(fresh_w)
            .zip(values)
            .map(|((h, word), objective)| BasisCandidate { h, word, objective })
            .collect();
        level.sort_by(rank);
        level.truncate(config.beam_width);
        for c in &level {
            seen.insert(c.h.clone());
        }
        if rank(&level[0], &best) == Ordering::Less {
            best = level[0].clone();
        }
        trace.push(best.objective);
        beam = level;
    }
    debug_assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    Ok(SearchOutcome { success: best.objective < config.epsilon, best, trace, seed: config.seed })
}

/// Target moved onto the real orbit of `x` within `ε/2`, keeping only its
/// constrained coefficients.
pub fn via_orbit_target(x: &AlternatingForm<f64>, y: &PartialTarget, epsilon: f64) -> Result<PartialTarget> {
    let orbit = classify_real(x, 1e-12)?.real_orbit;
    let cert = match orbit {
        RealOrbit::Case1Positive => extend_case1(y, epsilon / 2.0, Case1Sign::Positive)?,
        RealOrbit::Case1Negative => extend_case1(y, epsilon / 2.0, Case1Sign::Negative)?,
        RealOrbit::Case2Split => extend_case2(y, epsilon / 2.0)?,
        RealOrbit::Case3Nondegenerate => extend_case3(y, epsilon / 2.0)?,
        RealOrbit::Case2Nonsplit => return Err(Error::Precondition("no perturbation onto the nonsplit orbit".into())),
        RealOrbit::Degenerate => return Err(Error::NotSemistable("x is degenerate".into())),
    };
    PartialTarget::restrict(&cert.form)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisVerdict {
    Pass,
    Warn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub verdict: HypothesisVerdict,
    pub real_orbit: RealOrbit,
    pub real_rank_positive: bool,
    pub irrationality: Option<IrrationalityReport>,
    pub reasons: Vec<String>,
}

/// Checks real rank positivity and the irrationality condition of the case.
pub fn hypothesis_check(x: &AlternatingForm<f64>, max_den: u64, tol: f64) -> Result<HypothesisReport> {
    let orbit = classify_real(x, tol)?;
    let mut reasons = Vec::new();
    if orbit.real_orbit == RealOrbit::Degenerate {
        reasons.push(String::from("x is not semistable"));
        return Ok(HypothesisReport {
            verdict: HypothesisVerdict::Warn,
            real_orbit: orbit.real_orbit,
            real_rank_positive: false,
            irrationality: None,
            reasons,
        });
    }
    if !orbit.real_rank_positive {
        reasons.push(String::from("real rank zero"));
    }
    let report = irrationality_report(x, max_den, tol)?;
    let needed: &[&str] = match orbit.real_orbit {
        RealOrbit::Case1Positive => &["E_x1", "E_x2", "Gr(x)"],
        RealOrbit::Case1Negative => &["Gr(x)"],
        RealOrbit::Case2Split | RealOrbit::Case2Nonsplit => &["Q_x"],
        _ => &["x"],
    };
    for p in needed {
        if !report.get(p).is_some_and(|v| v.is_irrational()) {
            reasons.push(alloc::format!("[{p}] rational"));
        }
    }
    let verdict = if reasons.is_empty() { HypothesisVerdict::Pass } else { HypothesisVerdict::Warn };
    Ok(HypothesisReport {
        verdict,
        real_orbit: orbit.real_orbit,
        real_rank_positive: orbit.real_rank_positive,
        irrationality: Some(report),
        reasons,
    })
}

/// `h ↦ exp(tY)·h` with `Y = Xᵀ`: moves `x(h f_I)` by `x(exp(tY)·)`, which is
/// `(exp(tX)·x)(h f_I)` and so constant for `X` in the stabilizer.
pub fn flat_direction(x_stab: &Matrix<f64>) -> Matrix<f64> {
    x_stab.transpose()
}

/// `exp(a)` by scaling and squaring around a Taylor series.
pub fn expm(a: &Matrix<f64>) -> Matrix<f64> {
    let norm = a.max_abs() * a.rows() as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale /= 2.0;
        squarings += 1;
    }
    let b = a.scale(&scale);
    let mut term = Matrix::<f64>::identity(a.rows());
    let mut sum = term.clone();
    for k in 1..=20 {
        term = term.mul(&b).scale(&(1.0 / k as f64));
        sum = sum.add(&term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// Central difference of `t ↦ objective(exp(tY)·h)` at `t = 0`.
pub fn directional_derivative(data: &ObjectiveData, h: &IntMatrix, y_dir: &Matrix<f64>, step: f64) -> f64 {
    let hf = h.to_f64();
    let at = |t: f64| data.eval_real(expm(&y_dir.scale(&t)).mul(&hf).entries());
    (at(step) - at(-step)) / (2.0 * step)
}

/// Largest `|d/dt objective(exp(tXᵀ)·h)|` over a float basis of the stabilizer
/// algebra of `x`.
pub fn stabilizer_flatness(x: &AlternatingForm<f64>, y: &PartialTarget, h: &IntMatrix, step: f64) -> Result<f64> {
    let data = ObjectiveData::new(x, y)?;
    let stab = stab_lie_algebra_tol(x, 1e-9)?;
    Ok(stab
        .basis
        .iter()
        .map(|b| directional_derivative(&data, h, &flat_direction(b), step).abs())
        .fold(0.0, f64::max))
}

/// The constrained indices of a shape, re-exported for callers building targets.
pub fn target_indices(shape: FormShape) -> Vec<Vec<usize>> {
    constrained_indices(shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::gl_action;
    use crate::representatives::{make_rep, RepName};
    use crate::scalar::rational_to_f64;
    use alloc::vec;

    fn rep(n: RepName) -> AlternatingForm<f64> {
        make_rep(n).unwrap().map_scalars(rational_to_f64)
    }

    fn irrational_case1() -> AlternatingForm<f64> {
        let mut g = Matrix::<f64>::identity(6);
        g[(0, 3)] = 2f64.sqrt();
        g[(1, 4)] = 3f64.sqrt();
        g[(2, 5)] = 5f64.sqrt();
        g[(4, 0)] = 7f64.sqrt() - 2.0;
        gl_action(&g, &rep(RepName::Case1W)).unwrap()
    }

    #[test]
    fn generator_count_and_unimodularity() {
        assert_eq!(generators(6).len(), 60);
        let h = word_matrix(4, &[0, 5, 17, 30]).unwrap();
        assert_eq!(h.det().unwrap(), rat(1, 1));
        assert!(word_matrix(3, &[999]).is_err());
    }

    #[test]
    fn objective_examples() {
        let w = rep(RepName::Case1W);
        let id = IntMatrix::identity(6);
        let own = PartialTarget::restrict(&w).unwrap();
        assert_eq!(objective(&w, &own, &id).unwrap(), 0.0);
        assert_eq!(objective(&w, &PartialTarget::zero(FormShape::Case1), &id).unwrap(), 1.0);
        let bad = IntMatrix { n: 6, data: { let mut d = id.data.clone(); d[0] = 2; d } };
        assert!(objective(&w, &own, &bad).is_err());

        // plant h* = E₁₂(1)·E₃₄(1)
        let x = irrational_case1();
        let g = generators(6);
        let e12 = g.iter().position(|q| *q == Generator { i: 0, j: 1, sign: 1 }).unwrap();
        let e34 = g.iter().position(|q| *q == Generator { i: 2, j: 3, sign: 1 }).unwrap();
        let h = word_matrix(6, &[e12, e34]).unwrap();
        let y = planted_target(&x, &h);
        assert_eq!(objective(&x, &y, &h).unwrap(), 0.0);
    }

    fn planted_target(x: &AlternatingForm<f64>, h: &IntMatrix) -> PartialTarget {
        let data = ObjectiveData::new(x, &PartialTarget::zero(x.shape().unwrap())).unwrap();
        let hf: Vec<f64> = h.data.iter().map(|&v| v as f64).collect();
        let shape = x.shape().unwrap();
        let vals: Vec<f64> = constrained_indices(shape)
            .iter()
            .map(|i| data.value(&hf, &i.iter().map(|k| k - 1).collect::<Vec<_>>()))
            .collect();
        PartialTarget::from_values(shape, &vals).unwrap()
    }

    #[test]
    fn objective_matches_evaluate() {
        let x = irrational_case1();
        let h = word_matrix(6, &[3, 14, 27, 40]).unwrap();
        let y = planted_target(&x, &h);
        let hm = h.to_f64();
        for (i, v) in y.iter() {
            let cols: Vec<Vec<f64>> = i.iter().map(|k| hm.column(k - 1)).collect();
            let e = crate::multilinear::evaluate(&x, &cols).unwrap();
            assert!((e - v).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_target_succeeds_immediately() {
        let x = irrational_case1();
        let y = PartialTarget::restrict(&x).unwrap();
        let cfg = SearchConfig::new(4, 3, 0, 1e-9).unwrap();
        let out = approximate(&x, &y, &cfg).unwrap();
        assert!(out.success);
        assert!(out.best.word.is_empty());
        assert_eq!(out.trace, vec![0.0]);
    }

    #[test]
    fn planted_recovery_small() {
        let x = irrational_case1();
        let h = word_matrix(6, &[3, 14, 27]).unwrap();
        let y = planted_target(&x, &h);
        let cfg = SearchConfig::new(64, 5, 7, 1e-9).unwrap();
        let out = approximate(&x, &y, &cfg).unwrap();
        assert!(out.success, "{:?}", out.trace);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.best.h.det().unwrap(), rat(1, 1));
    }

    #[test]
    fn serial_runs_are_reproducible() {
        let x = irrational_case1();
        let y = PartialTarget::zero(FormShape::Case1);
        let cfg = SearchConfig::new(16, 3, 1, 1e-9).unwrap().with_extension(Extension::Both);
        assert_eq!(approximate(&x, &y, &cfg).unwrap(), approximate(&x, &y, &cfg).unwrap());
    }

    #[test]
    fn flatness_along_stabilizer() {
        let x = irrational_case1();
        let y = PartialTarget::from_values(FormShape::Case1, &[0.3, -0.2, 0.5, 0.1, 0.0, -0.4, 0.7, 0.2, -0.1, 0.6]).unwrap();
        let h = word_matrix(6, &[3, 14, 27]).unwrap();
        let d = stabilizer_flatness(&x, &y, &h, 1e-4).unwrap();
        assert!(d < 1e-6, "{d}");
        // a generic direction is not flat
        let data = ObjectiveData::new(&x, &y).unwrap();
        let mut e = Matrix::<f64>::zeros(6, 6);
        e[(0, 0)] = 1.0;
        e[(5, 5)] = -1.0;
        assert!(directional_derivative(&data, &h, &e, 1e-4).abs() > 1e-3);
    }

    #[test]
    fn hypothesis_examples() {
        let r = hypothesis_check(&rep(RepName::Case2W1), 100_000, 1e-12).unwrap();
        assert_eq!(r.verdict, HypothesisVerdict::Warn);
        assert!(r.reasons.iter().any(|s| s == "real rank zero"));
        let r = hypothesis_check(&rep(RepName::Case3W(2)), 100_000, 1e-12).unwrap();
        assert_eq!(r.verdict, HypothesisVerdict::Warn);
        assert!(r.reasons.iter().any(|s| s == "[x] rational"));
        let r = hypothesis_check(&irrational_case1(), 1_000_000, 1e-14).unwrap();
        assert_eq!(r.verdict, HypothesisVerdict::Pass, "{r:?}");
    }

    #[test]
    fn via_orbit_moves_little() {
        let x = irrational_case1();
        let y = PartialTarget::zero(FormShape::Case1);
        let t = via_orbit_target(&x, &y, 0.1).unwrap();
        assert!(t.iter().all(|(_, v)| v.abs() < 0.05));
        assert!(via_orbit_target(&rep(RepName::Case2W1), &PartialTarget::zero(FormShape::Case2), 0.1).is_err());
    }
}
