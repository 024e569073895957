//! Real orbit classification, the field `k(x)`, the eigenspace pair `Gr(x)` and
//! irrationality predicates.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariants::{delta_case1, pfaffian, q_case2, s_case1};
use crate::linalg::{span_rank, Matrix};
use crate::multilinear::{combinations, AlternatingForm, FormShape};
use crate::scalar::{rational_reconstruct, squarefree_part, QuadExt, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RealOrbit {
    /// `Δ > 0`, the orbit of `w`.
    Case1Positive,
    /// `Δ < 0`, the orbit of `w₁`.
    Case1Negative,
    Case2Split,
    Case2Nonsplit,
    Case3Nondegenerate,
    Degenerate,
}

impl RealOrbit {
    pub fn tag(self) -> &'static str {
        match self {
            RealOrbit::Case1Positive => "case1_positive",
            RealOrbit::Case1Negative => "case1_negative",
            RealOrbit::Case2Split => "case2_split",
            RealOrbit::Case2Nonsplit => "case2_nonsplit",
            RealOrbit::Case3Nondegenerate => "case3_nondegenerate",
            RealOrbit::Degenerate => "degenerate",
        }
    }

    /// Whether the identity component of the real stabilizer has positive real rank.
    pub fn real_rank_positive(self) -> bool {
        matches!(
            self,
            RealOrbit::Case1Positive | RealOrbit::Case1Negative | RealOrbit::Case2Split | RealOrbit::Case3Nondegenerate
        )
    }
}

impl fmt::Display for RealOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitReport {
    pub case: FormShape,
    pub real_orbit: RealOrbit,
    /// Squarefree `d` with `k(x) = ℚ(√d)`; `1` means `ℚ`. Case 1 over `ℚ` only.
    pub field_kx: Option<i64>,
    pub real_rank_positive: bool,
}

fn sign_of<S: Scalar>(v: &S, tol: f64) -> i32 {
    if v.is_negligible(tol) {
        0
    } else if v.to_real() > 0.0 {
        1
    } else {
        -1
    }
}

/// Definiteness of a nondegenerate symmetric matrix: `Some(true)` definite,
/// `Some(false)` indefinite, `None` degenerate.
pub fn definiteness<S: Scalar>(gram: &Matrix<S>, tol: f64) -> Result<Option<bool>> {
    let n = gram.rows();
    if S::EXACT {
        if gram.det()?.is_zero() {
            return Ok(None);
        }
        let mut signs = Vec::with_capacity(n);
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            signs.push(sign_of(&gram.submatrix(&idx, &idx).det()?, 0.0));
        }
        let positive = signs.iter().all(|&s| s > 0);
        let negative = signs.iter().enumerate().all(|(k, &s)| s == if k % 2 == 0 { -1 } else { 1 });
        Ok(Some(positive || negative))
    } else {
        let m = DMatrix::from_fn(n, n, |r, c| gram[(r, c)].to_real());
        let eig = m.symmetric_eigen().eigenvalues;
        let scale = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
        if eig.iter().any(|e| e.abs() <= tol * scale) {
            return Ok(None);
        }
        let pos = eig.iter().filter(|&&e| e > 0.0).count();
        Ok(Some(pos == 0 || pos == n))
    }
}

/// Classification of `x` into real orbits of the semistable set.
pub fn classify_real<S: Scalar>(x: &AlternatingForm<S>, tol: f64) -> Result<OrbitReport> {
    let case = x.shape()?;
    let real_orbit = match case {
        FormShape::Case1 => match sign_of(&delta_case1(x)?, tol) {
            1 => RealOrbit::Case1Positive,
            -1 => RealOrbit::Case1Negative,
            _ => RealOrbit::Degenerate,
        },
        FormShape::Case2 => match definiteness(q_case2(x)?.gram(), tol)? {
            Some(true) => RealOrbit::Case2Nonsplit,
            Some(false) => RealOrbit::Case2Split,
            None => RealOrbit::Degenerate,
        },
        FormShape::Case3 { .. } => {
            if pfaffian(x)?.is_negligible(tol) {
                RealOrbit::Degenerate
            } else {
                RealOrbit::Case3Nondegenerate
            }
        }
    };
    Ok(OrbitReport { case, real_orbit, field_kx: None, real_rank_positive: real_orbit.real_rank_positive() })
}

/// [`classify_real`] for rational forms, with `k(x)` filled in for case 1.
pub fn classify_rational(x: &AlternatingForm<Rational>) -> Result<OrbitReport> {
    let mut r = classify_real(x, 0.0)?;
    if r.case == FormShape::Case1 && r.real_orbit != RealOrbit::Degenerate {
        r.field_kx = Some(field_kx(x)?);
    }
    Ok(r)
}

/// `k(x) = ℚ(√Δ(x))`, as the squarefree part `d` of `Δ(x)`.
pub fn field_kx(x: &AlternatingForm<Rational>) -> Result<i64> {
    if x.shape()? != FormShape::Case1 {
        return Err(Error::shape("k(x) is defined for forms in ∧³k⁶"));
    }
    let delta = delta_case1(x)?;
    if delta.is_zero() {
        return Err(Error::NotSemistable("Δ(x) = 0".into()));
    }
    Ok(squarefree_part(&delta)?.0)
}

/// `Gr(x)`: bases (rows) of the eigenspaces `E_{x1}`, `E_{x2}` of `S_x` for
/// `±Δ^{1/2}`, with their Plücker vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint<S> {
    pub first: Matrix<S>,
    pub second: Matrix<S>,
    pub plucker: [Vec<S>; 2],
}

/// The 20 maximal minors of a `3×6` matrix, columns in lexicographic order.
pub fn plucker<S: Scalar>(basis: &Matrix<S>) -> Result<Vec<S>> {
    if basis.rows() != 3 || basis.cols() != 6 {
        return Err(Error::shape("Plücker coordinates need a 3×6 basis"));
    }
    combinations(6, 3)
        .iter()
        .map(|c| {
            let cols: Vec<usize> = c.iter().map(|i| i - 1).collect();
            basis.submatrix(&[0, 1, 2], &cols).det()
        })
        .collect()
}

/// Divides by the first coordinate of magnitude above `tol`.
pub fn normalize_projective<S: Scalar>(v: &[S], tol: f64) -> Option<Vec<S>> {
    let lead = v.iter().find(|c| !c.is_negligible(tol))?.clone();
    Some(v.iter().map(|c| c.clone() / lead.clone()).collect())
}

fn eigen_pair<S: Scalar>(s: &Matrix<S>, root: &S, tol: Option<f64>) -> Result<GrassmannPoint<S>> {
    let id = Matrix::<S>::identity(6);
    let mut spaces = Vec::with_capacity(2);
    for lambda in [root.clone(), -root.clone()] {
        let ns = s.sub(&id.scale(&lambda)).nullspace(tol);
        if ns.len() != 3 {
            return Err(Error::domain("eigenspace of S_x is not 3-dimensional"));
        }
        spaces.push(Matrix::from_rows(ns)?);
    }
    let second = spaces.pop().expect("two spaces");
    let first = spaces.pop().expect("two spaces");
    let plucker = [plucker(&first)?, plucker(&second)?];
    Ok(GrassmannPoint { first, second, plucker })
}

/// Exact eigenspaces over `ℚ(√d)`, `d` from [`field_kx`].
pub fn eigenspaces(x: &AlternatingForm<Rational>) -> Result<GrassmannPoint<QuadExt>> {
    let delta = delta_case1(x)?;
    if delta.is_zero() {
        return Err(Error::NotSemistable("Δ(x) = 0".into()));
    }
    let (d, r) = squarefree_part(&delta)?;
    let root = if d == 1 { QuadExt::rational(r) } else { QuadExt::new(Rational::from_integer(0.into()), r, d)? };
    let s = s_case1(x)?.map(|v| QuadExt::rational(v.clone()));
    eigen_pair(&s, &root, None)
}

/// Floating eigenspaces over `ℂ`, `Δ^{1/2}` the principal root.
pub fn eigenspaces_float(x: &AlternatingForm<f64>, tol: f64) -> Result<GrassmannPoint<Complex64>> {
    let delta = delta_case1(x)?;
    let s = s_case1(x)?;
    let scale = s.max_abs().max(1.0);
    if delta.abs() <= tol * scale * scale {
        return Err(Error::NotSemistable("Δ(x) = 0".into()));
    }
    let root = Complex64::new(delta, 0.0).sqrt();
    let sc = s.map(|v| Complex64::new(*v, 0.0));
    eigen_pair(&sc, &root, Some(tol * scale))
}

/// Row spaces of `a` and `b` agree.
pub fn same_row_space<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: Option<f64>) -> bool {
    let ra: Vec<Vec<S>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let rb: Vec<Vec<S>> = (0..b.rows()).map(|i| b.row(i).to_vec()).collect();
    let both: Vec<Vec<S>> = ra.iter().chain(rb.iter()).cloned().collect();
    let r = span_rank(&ra, tol);
    r == span_rank(&rb, tol) && r == span_rank(&both, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    RationalCertified,
    IrrationalCertified,
    /// No bounded-denominator rational point fits.
    HeuristicIrrational,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::RationalCertified => "rational (certified)",
            Verdict::IrrationalCertified => "irrational (certified)",
            Verdict::HeuristicIrrational => "no rational point found (heuristic irrational)",
        }
    }

    pub fn is_irrational(self) -> bool {
        self != Verdict::RationalCertified
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrrationalityReport {
    pub mode: Mode,
    /// `(point, verdict)` with point one of `E_x1`, `E_x2`, `Gr(x)`, `Q_x`, `x`.
    pub flags: Vec<(String, Verdict)>,
}

impl IrrationalityReport {
    pub fn get(&self, name: &str) -> Option<Verdict> {
        self.flags.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

fn float_point(v: &[Complex64], max_den: u64, tol: f64) -> Verdict {
    let Some(n) = normalize_projective(v, tol) else {
        return Verdict::HeuristicIrrational;
    };
    let ok = n.iter().all(|c| c.im.abs() <= tol && rational_reconstruct(c.re, max_den, tol).is_some());
    if ok {
        Verdict::RationalCertified
    } else {
        Verdict::HeuristicIrrational
    }
}

fn real_point(v: &[f64], max_den: u64, tol: f64) -> Verdict {
    let c: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    float_point(&c, max_den, tol)
}

fn pair_symmetric<S: Scalar>(p: &[Vec<S>; 2], tol: f64) -> Option<(Vec<S>, Vec<S>)> {
    let a = normalize_projective(&p[0], tol)?;
    let b = normalize_projective(&p[1], tol)?;
    let sum = a.iter().zip(&b).map(|(x, y)| x.clone() + y.clone()).collect();
    let prod = a.iter().zip(&b).map(|(x, y)| x.clone() * y.clone()).collect();
    Some((sum, prod))
}

fn named(name: &str, v: Verdict) -> (String, Verdict) {
    (String::from(name), v)
}

/// Heuristic report for a real form: a point is rational when every normalized
/// coordinate is reconstructed by a fraction with denominator `≤ max_den`.
pub fn irrationality_report(x: &AlternatingForm<f64>, max_den: u64, tol: f64) -> Result<IrrationalityReport> {
    let mut flags = Vec::new();
    match x.shape()? {
        FormShape::Case1 => {
            let gr = eigenspaces_float(x, tol)?;
            flags.push(named("E_x1", float_point(&gr.plucker[0], max_den, tol)));
            flags.push(named("E_x2", float_point(&gr.plucker[1], max_den, tol)));
            let v = match pair_symmetric(&gr.plucker, tol) {
                Some((s, p)) => {
                    let both = s.iter().chain(p.iter()).all(|c| {
                        c.im.abs() <= tol && rational_reconstruct(c.re, max_den, tol).is_some()
                    });
                    if both {
                        Verdict::RationalCertified
                    } else {
                        Verdict::HeuristicIrrational
                    }
                }
                None => Verdict::HeuristicIrrational,
            };
            flags.push(named("Gr(x)", v));
        }
        FormShape::Case2 => {
            let q = q_case2(x)?;
            flags.push(named("Q_x", real_point(q.gram().entries(), max_den, tol)));
        }
        FormShape::Case3 { .. } => {
            flags.push(named("x", real_point(&x.to_dense(), max_den, tol)));
        }
    }
    Ok(IrrationalityReport { mode: Mode::Float, flags })
}

/// Exact report for a rational form.
pub fn irrationality_report_exact(x: &AlternatingForm<Rational>) -> Result<IrrationalityReport> {
    let mut flags = Vec::new();
    match x.shape()? {
        FormShape::Case1 => {
            let gr = eigenspaces(x)?;
            for (name, p) in [("E_x1", &gr.plucker[0]), ("E_x2", &gr.plucker[1])] {
                let n = normalize_projective(p, 0.0).ok_or_else(|| Error::domain("zero Plücker vector"))?;
                let v = if n.iter().all(QuadExt::is_rational) {
                    Verdict::RationalCertified
                } else {
                    Verdict::IrrationalCertified
                };
                flags.push(named(name, v));
            }
            // E_x2 is the Galois conjugate of E_x1, so the unordered pair is rational
            let (s, p) = pair_symmetric(&gr.plucker, 0.0).ok_or_else(|| Error::domain("zero Plücker vector"))?;
            let v = if s.iter().chain(p.iter()).all(QuadExt::is_rational) {
                Verdict::RationalCertified
            } else {
                Verdict::IrrationalCertified
            };
            flags.push(named("Gr(x)", v));
        }
        FormShape::Case2 => flags.push(named("Q_x", Verdict::RationalCertified)),
        FormShape::Case3 { .. } => flags.push(named("x", Verdict::RationalCertified)),
    }
    Ok(IrrationalityReport { mode: Mode::Exact, flags })
}
