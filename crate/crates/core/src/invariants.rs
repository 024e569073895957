//! Relative invariants.
//!
//! * `∧³k⁶`: the operator `S_x = x ∧ D₃(x)` with `S_x² = Δ(x)·I`, `Δ` of degree 4.
//! * `∧³k⁷`: the quadratic form `Q_x`, symmetrization of `x ∧ D₃(x) ∧ D₃(x)`,
//!   and `Δ` of degree 7 with `Δ(x)³ = (4/81)·det gram(Q_x)`.
//! * `∧²k²ⁿ`: the Pfaffian.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multilinear::{d3, sort_with_sign, AlternatingForm, FormShape, MixedTensor};
use crate::scalar::Scalar;

/// `Q(v) = vᵀ·gram·v` with a symmetric gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<S> {
    gram: Matrix<S>,
}

impl<S: Scalar> QuadraticForm<S> {
    pub fn from_gram(gram: Matrix<S>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::shape("gram matrix must be square"));
        }
        if gram != gram.transpose() {
            return Err(Error::invalid("gram matrix must be symmetric"));
        }
        Ok(QuadraticForm { gram })
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrize(m: &Matrix<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::shape("cannot symmetrize a non-square matrix"));
        }
        let half = S::one() / S::from_int(2);
        Ok(QuadraticForm { gram: m.add(&m.transpose()).scale(&half) })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn eval(&self, v: &[S]) -> Result<S> {
        self.polar(v, v)
    }

    /// `uᵀ·gram·v`.
    pub fn polar(&self, u: &[S], v: &[S]) -> Result<S> {
        let gv = self.gram.mul_vec(v)?;
        if u.len() != gv.len() {
            return Err(Error::dims(gv.len(), u.len()));
        }
        Ok(u.iter().zip(gv).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b))
    }

    pub fn det(&self) -> S {
        self.gram.det().expect("gram is square")
    }

    /// Coefficient of the monomial `e_i e_j` (1-based) in `Q`.
    pub fn monomial(&self, i: usize, j: usize) -> S {
        let g = self.gram[(i - 1, j - 1)].clone();
        if i == j {
            g
        } else {
            g.clone() + g
        }
    }

    /// Builds `Q` from monomial coefficients `(i, j, c)` meaning `c·e_i e_j`.
    pub fn from_monomials(dim: usize, terms: &[(usize, usize, S)]) -> Self {
        let mut g = Matrix::<S>::zeros(dim, dim);
        let half = S::one() / S::from_int(2);
        for (i, j, c) in terms {
            let (i, j) = (i - 1, j - 1);
            if i == j {
                g[(i, i)] = g[(i, i)].clone() + c.clone();
            } else {
                let h = c.clone() * half.clone();
                g[(i, j)] = g[(i, j)].clone() + h.clone();
                g[(j, i)] = g[(j, i)].clone() + h;
            }
        }
        QuadraticForm { gram: g }
    }

    /// Push-forward along `g`: gram ↦ g·gram·gᵀ.
    pub fn push_forward(&self, g: &Matrix<S>) -> Result<Self> {
        Ok(QuadraticForm { gram: g.try_mul(&self.gram)?.try_mul(&g.transpose())? })
    }

    pub fn scale(&self, s: &S) -> Self {
        QuadraticForm { gram: self.gram.scale(s) }
    }
}

/// `Δ` for `∧³k⁷`, exact when a cube root exists in the scalar field.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaValue<S> {
    Exact(S),
    Inexact(f64),
}

impl<S: Scalar> DeltaValue<S> {
    pub fn exact(&self) -> Option<&S> {
        match self {
            DeltaValue::Exact(s) => Some(s),
            DeltaValue::Inexact(_) => None,
        }
    }

    pub fn to_real(&self) -> f64 {
        match self {
            DeltaValue::Exact(s) => s.to_real(),
            DeltaValue::Inexact(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DeltaValue::Exact(s) => s.is_zero(),
            DeltaValue::Inexact(v) => *v == 0.0,
        }
    }
}

/// Everything the invariant machinery knows about one form.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport<S> {
    pub case: FormShape,
    pub delta: DeltaValue<S>,
    pub s_matrix: Option<Matrix<S>>,
    pub q_form: Option<QuadraticForm<S>>,
    pub pfaffian: Option<S>,
}

fn require<S: Scalar>(x: &AlternatingForm<S>, dim: usize, degree: usize) -> Result<()> {
    if x.dim() != dim || x.degree() != degree {
        return Err(Error::shape(format!(
            "expected a degree {degree} form on dimension {dim}, got degree {} on dimension {}",
            x.degree(),
            x.dim()
        )));
    }
    Ok(())
}

/// `S_x ∈ End(W)` for `x ∈ ∧³k⁶`, normalized so that `S_w = diag(1,1,1,−1,−1,−1)`
/// for `w = e₁₂₃ + e₄₅₆`.
///
/// The identification `∧⁵W ≅ W*` sends `e_{complement(j)}` to `s·f_j` where
/// `e_j ∧ e_{complement(j)} = s·e₁…₆`.
pub fn s_case1<S: Scalar>(x: &AlternatingForm<S>) -> Result<Matrix<S>> {
    require(x, 6, 3)?;
    let t = MixedTensor::from_form(x).wedge_tensor(&d3(x)?)?;
    let mut m = Matrix::<S>::zeros(6, 6);
    for ((five, c), v) in t.iter() {
        let j = (1..=6).find(|i| !five.contains(i)).expect("five of six indices");
        let idx: Vec<usize> = core::iter::once(j).chain(five.iter().copied()).collect();
        let (_, s) = sort_with_sign(&idx).expect("distinct indices");
        let entry = if s > 0 { v.clone() } else { -v.clone() };
        let cur = m[(c[0] - 1, j - 1)].clone();
        m[(c[0] - 1, j - 1)] = cur + entry;
    }
    Ok(m)
}

/// `Δ(x)` for `x ∈ ∧³k⁶`, read off `S_x² = Δ(x)·I`.
///
/// For exact scalars the identity is asserted; a failure indicates a bug. For
/// floating scalars the mean of the diagonal of `S_x²` is returned.
pub fn delta_case1<S: Scalar>(x: &AlternatingForm<S>) -> Result<S> {
    let s = s_case1(x)?;
    let s2 = s.mul(&s);
    if S::EXACT {
        let d = s2[(0, 0)].clone();
        assert!(
            s2 == Matrix::identity(6).scale(&d),
            "S_x^2 is not a scalar matrix: {s2:?}"
        );
        Ok(d)
    } else {
        Ok(s2.trace() / S::from_int(6))
    }
}

/// The `3×3` blocks `X` and `Y` of a form in `∧³k⁶`, and `z₁₂₃`, `z₄₅₆`.
pub fn case1_blocks<S: Scalar>(z: &AlternatingForm<S>) -> (S, S, Matrix<S>, Matrix<S>) {
    let c = |i, j, k| z.get(&[i, j, k]);
    let x = Matrix::from_fn(3, 3, |r, col| {
        let m = r + 4;
        match col {
            0 => c(2, 3, m),
            1 => -c(1, 3, m),
            _ => c(1, 2, m),
        }
    });
    let y = Matrix::from_fn(3, 3, |r, col| {
        let m = r + 1;
        match col {
            0 => c(m, 5, 6),
            1 => -c(m, 4, 6),
            _ => c(m, 4, 5),
        }
    });
    (c(1, 2, 3), c(4, 5, 6), x, y)
}

fn minor2<S: Scalar>(m: &Matrix<S>, i: usize, j: usize) -> S {
    let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
    m.submatrix(&rows, &cols).det().expect("2x2")
}

/// Closed formula
/// `Δ = (z₁₂₃z₄₅₆ − tr XY)² + 4z₁₂₃ det Y + 4z₄₅₆ det X − 4 Σ det X_ij det Y_ji`
/// where `X_ij` deletes row `i` and column `j`.
pub fn delta_case1_explicit<S: Scalar>(z: &AlternatingForm<S>) -> Result<S> {
    require(z, 6, 3)?;
    let (a, b, x, y) = case1_blocks(z);
    let t = a.clone() * b.clone() - x.mul(&y).trace();
    let four = S::from_int(4);
    let mut minors = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            minors = minors + minor2(&x, i, j) * minor2(&y, j, i);
        }
    }
    Ok(t.clone() * t
        + four.clone() * a * y.det()?
        + four.clone() * b * x.det()?
        - four * minors)
}

/// The (generally non-symmetric) matrix of `x ∧ D₃(x) ∧ D₃(x) ∈ ∧⁷W ⊗ W ⊗ W`,
/// with `∧⁷W ≅ k` via the coefficient of `e₁…₇`.
pub fn s_case2<S: Scalar>(x: &AlternatingForm<S>) -> Result<Matrix<S>> {
    require(x, 7, 3)?;
    let d = d3(x)?;
    let t = MixedTensor::from_form(x).wedge_tensor(&d)?.wedge_tensor(&d)?;
    let mut m = Matrix::<S>::zeros(7, 7);
    for ((_, c), v) in t.iter() {
        m[(c[0] - 1, c[1] - 1)] = v.clone();
    }
    Ok(m)
}

/// `Q_x`, the symmetrization of [`s_case2`].
pub fn q_case2<S: Scalar>(x: &AlternatingForm<S>) -> Result<QuadraticForm<S>> {
    QuadraticForm::symmetrize(&s_case2(x)?)
}

/// `Δ(x)³ = DELTA_CASE2_NUM/DELTA_CASE2_DEN · det gram(Q_x)`, fixed by `Δ(w) = 6`
/// and `det gram(Q_w) = 4374`.
pub const DELTA_CASE2_NUM: i64 = 4;
pub const DELTA_CASE2_DEN: i64 = 81;

/// Degree 7 invariant of `∧³k⁷` from `det gram(Q_x)`.
pub fn delta_case2<S: Scalar>(x: &AlternatingForm<S>) -> Result<DeltaValue<S>> {
    delta_from_q(&q_case2(x)?)
}

/// `Δ` from an already computed `Q_x`.
pub fn delta_from_q<S: Scalar>(q: &QuadraticForm<S>) -> Result<DeltaValue<S>> {
    let cube = q.det() * S::from_int(DELTA_CASE2_NUM) / S::from_int(DELTA_CASE2_DEN);
    if S::EXACT {
        match cube.cube_root() {
            Some(r) => Ok(DeltaValue::Exact(r)),
            None => {
                let v = cube.to_real();
                Ok(DeltaValue::Inexact(num_traits::Float::cbrt(v)))
            }
        }
    } else {
        Ok(DeltaValue::Exact(cube.cube_root().unwrap_or_else(|| S::from_int(0))))
    }
}

/// The skew-symmetric coefficient matrix `A` of a 2-form, `A_ij = x_ij`.
pub fn skew_matrix<S: Scalar>(x: &AlternatingForm<S>) -> Result<Matrix<S>> {
    if x.degree() != 2 {
        return Err(Error::shape("skew matrix of a form that is not a 2-form"));
    }
    let n = x.dim();
    Ok(Matrix::from_fn(n, n, |i, j| x.get(&[i + 1, j + 1])))
}

fn pf_rec<S: Scalar>(a: &Matrix<S>, idx: &[usize]) -> S {
    if idx.is_empty() {
        return S::one();
    }
    let first = idx[0];
    let mut acc = S::zero();
    for k in 1..idx.len() {
        let v = &a[(first, idx[k])];
        if v.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&i| i != idx[k]).collect();
        let term = v.clone() * pf_rec(a, &rest);
        // Sign (−1)^(k+1) for the k-th partner, k counted from 1.
        acc = if k % 2 == 1 { acc + term } else { acc - term };
    }
    acc
}

/// Pfaffian of a 2-form on an even dimensional space.
pub fn pfaffian<S: Scalar>(x: &AlternatingForm<S>) -> Result<S> {
    if x.degree() != 2 {
        return Err(Error::shape("Pfaffian needs a 2-form"));
    }
    if x.dim() % 2 == 1 {
        return Err(Error::shape(format!("Pfaffian needs even dimension, got {}", x.dim())));
    }
    let a = skew_matrix(x)?;
    let idx: Vec<usize> = (0..x.dim()).collect();
    Ok(pf_rec(&a, &idx))
}

/// All invariants relevant to the shape of `x`.
pub fn invariant_report<S: Scalar>(x: &AlternatingForm<S>) -> Result<InvariantReport<S>> {
    match x.shape()? {
        FormShape::Case1 => {
            let s = s_case1(x)?;
            let delta = delta_case1(x)?;
            Ok(InvariantReport {
                case: FormShape::Case1,
                delta: DeltaValue::Exact(delta),
                s_matrix: Some(s),
                q_form: None,
                pfaffian: None,
            })
        }
        FormShape::Case2 => {
            let q = q_case2(x)?;
            let delta = delta_from_q(&q)?;
            Ok(InvariantReport {
                case: FormShape::Case2,
                delta,
                s_matrix: None,
                q_form: Some(q),
                pfaffian: None,
            })
        }
        shape @ FormShape::Case3 { .. } => {
            let pf = pfaffian(x)?;
            Ok(InvariantReport {
                case: shape,
                delta: DeltaValue::Exact(pf.clone()),
                s_matrix: None,
                q_form: None,
                pfaffian: Some(pf),
            })
        }
    }
}

/// `true` when the relevant invariant vanishes.
pub fn is_degenerate<S: Scalar>(x: &AlternatingForm<S>, tol: f64) -> Result<bool> {
    Ok(match x.shape()? {
        FormShape::Case1 => delta_case1(x)?.is_negligible(tol),
        FormShape::Case2 => q_case2(x)?.det().is_negligible(tol),
        FormShape::Case3 { .. } => pfaffian(x)?.is_negligible(tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{combinations, gl_action};
    use crate::scalar::{rat, Rational};
    use alloc::vec;
    use proptest::prelude::*;

    type F = AlternatingForm<Rational>;

    fn w6() -> F {
        F::from_int_terms(6, 3, &[(&[1, 2, 3], 1), (&[4, 5, 6], 1)]).unwrap()
    }

    fn w7() -> F {
        F::from_int_terms(
            7,
            3,
            &[(&[2, 3, 4], 1), (&[5, 6, 7], 1), (&[1, 2, 5], 1), (&[1, 3, 6], 1), (&[1, 4, 7], 1)],
        )
        .unwrap()
    }

    fn q(v: i64) -> Rational {
        rat(v, 1)
    }

    #[test]
    fn s_case1_of_w() {
        let s = s_case1(&w6()).unwrap();
        let expect = Matrix::diagonal(&[q(1), q(1), q(1), q(-1), q(-1), q(-1)]);
        assert_eq!(s, expect);
        assert!(s_case1(&F::basis(6, &[1, 2, 3]).unwrap()).unwrap().is_zero());
        assert_eq!(s_case1(&w6().scale(&q(2))).unwrap(), expect.scale(&q(4)));
        assert!(s_case1(&w7()).is_err());
    }

    #[test]
    fn delta_case1_goldens() {
        assert_eq!(delta_case1(&w6()).unwrap(), q(1));
        assert_eq!(delta_case1_explicit(&w6()).unwrap(), q(1));
        assert_eq!(delta_case1_explicit(&F::zero(6, 3).unwrap()).unwrap(), q(0));
        // e₁₂₃ + α²(e₁₅₆ − e₂₄₆ + e₃₄₅) has Δ = 4α⁶.
        for d in [-1i64, 2, 3, 5] {
            let x = F::from_int_terms(6, 3, &[(&[1, 2, 3], 1), (&[1, 5, 6], d), (&[2, 4, 6], -d), (&[3, 4, 5], d)])
                .unwrap();
            assert_eq!(delta_case1(&x).unwrap(), q(4 * d * d * d));
        }
    }

    #[test]
    fn q_case2_of_w() {
        let qw = q_case2(&w7()).unwrap();
        let expect = QuadraticForm::from_monomials(
            7,
            &[(1, 1, q(-6)), (2, 5, q(6)), (3, 6, q(6)), (4, 7, q(6))],
        );
        assert_eq!(qw, expect);
        assert_eq!(qw.det(), q(4374));
        assert_eq!(delta_case2(&w7()).unwrap(), DeltaValue::Exact(q(6)));
        assert!(s_case2(&F::basis(7, &[1, 2, 3]).unwrap()).unwrap().is_zero());
        assert_eq!(s_case2(&w7().scale(&q(2))).unwrap(), s_case2(&w7()).unwrap().scale(&q(8)));
    }

    #[test]
    fn q_case2_degenerate_example() {
        let wp = F::from_int_terms(7, 3, &[(&[2, 3, 4], 1), (&[3, 4, 6], 1), (&[1, 2, 7], 1), (&[1, 4, 5], -1)])
            .unwrap();
        let qp = q_case2(&wp).unwrap();
        assert_eq!(qp.det(), q(0));
        assert_eq!(delta_case2(&wp).unwrap(), DeltaValue::Exact(q(0)));
    }

    #[test]
    fn delta_case2_inexact_for_irrational_cube() {
        let qf = QuadraticForm::from_gram(Matrix::<Rational>::diagonal(&[q(81), q(1), q(1), q(1), q(1), q(1), q(1)])).unwrap();
        // (4/81)·81 = 4 is not a cube.
        match delta_from_q(&qf).unwrap() {
            DeltaValue::Inexact(v) => assert!((v - 4f64.powf(1.0 / 3.0)).abs() < 1e-12),
            other => panic!("expected inexact, got {other:?}"),
        }
    }

    #[test]
    fn pfaffian_examples() {
        assert_eq!(pfaffian(&F::basis(2, &[1, 2]).unwrap()).unwrap(), q(1));
        assert_eq!(pfaffian(&F::zero(4, 2).unwrap()).unwrap(), q(0));
        let w = F::from_int_terms(4, 2, &[(&[1, 3], 1), (&[2, 4], 1)]).unwrap();
        assert_eq!(pfaffian(&w).unwrap(), q(-1));
        let v = F::from_int_terms(4, 2, &[(&[1, 2], 1), (&[3, 4], 1)]).unwrap();
        assert_eq!(pfaffian(&v).unwrap(), q(1));
        assert!(pfaffian(&F::zero(3, 2).unwrap()).is_err());
    }

    #[test]
    fn report_dispatch() {
        let r = invariant_report(&w7()).unwrap();
        assert_eq!(r.case, FormShape::Case2);
        assert!(r.q_form.is_some() && r.s_matrix.is_none() && r.pfaffian.is_none());
        let r1 = invariant_report(&w6()).unwrap();
        assert!(r1.s_matrix.is_some() && r1.q_form.is_none());
    }

    fn arb_form(dim: usize, degree: usize, den: i64) -> impl Strategy<Value = F> {
        let n = combinations(dim, degree).len();
        proptest::collection::vec((-5i64..6, 1..=den), n).prop_map(move |v| {
            let v: Vec<Rational> = v.into_iter().map(|(a, b)| rat(a, b)).collect();
            F::from_dense(dim, degree, &v).unwrap()
        })
    }

    fn arb_invertible(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec(-2i64..3, n * n)
            .prop_map(move |v| Matrix::from_fn(n, n, |i, j| q(v[i * n + j])))
            .prop_filter("invertible", |m| !m.det().unwrap().is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn s_squared_matches_closed_formula(x in arb_form(6, 3, 3)) {
            let s = s_case1(&x).unwrap();
            let d = delta_case1_explicit(&x).unwrap();
            prop_assert_eq!(s.mul(&s), Matrix::identity(6).scale(&d));
        }

        #[test]
        fn delta_case1_relative_invariance(x in arb_form(6, 3, 1), g in arb_invertible(6)) {
            let dg = g.det().unwrap();
            prop_assert_eq!(delta_case1(&gl_action(&g, &x).unwrap()).unwrap(), dg.clone() * dg * delta_case1(&x).unwrap());
        }

        #[test]
        fn homogeneity(x6 in arb_form(6, 3, 1), x4 in arb_form(8, 2, 2), l in -3i64..4) {
            let l = q(l);
            let l2 = l.clone() * l.clone();
            prop_assert_eq!(delta_case1(&x6.scale(&l)).unwrap(), l2.clone() * l2.clone() * delta_case1(&x6).unwrap());
            prop_assert_eq!(pfaffian(&x4.scale(&l)).unwrap(), l2.clone() * l2 * pfaffian(&x4).unwrap());
        }

        #[test]
        fn pfaffian_squared_is_det(x in arb_form(8, 2, 3)) {
            let pf = pfaffian(&x).unwrap();
            prop_assert_eq!(pf.clone() * pf, skew_matrix(&x).unwrap().det().unwrap());
        }

        #[test]
        fn pfaffian_relative_invariance(x in arb_form(8, 2, 1), g in arb_invertible(8)) {
            prop_assert_eq!(pfaffian(&gl_action(&g, &x).unwrap()).unwrap(), g.det().unwrap() * pfaffian(&x).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn case2_covariance(x in arb_form(7, 3, 1), g in arb_invertible(7), t in prop::sample::select(vec![-2i64, -1, 1, 2, 3])) {
            let t = q(t);
            let y = gl_action(&g, &x).unwrap().scale(&t);
            let lhs = q_case2(&y).unwrap();
            let factor = t.clone() * t.clone() * t * g.det().unwrap();
            let rhs = q_case2(&x).unwrap().push_forward(&g).unwrap().scale(&factor);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn case2_delta_cube(x in arb_form(7, 3, 2), l in -2i64..3) {
            let qf = q_case2(&x).unwrap();
            let d = delta_from_q(&qf).unwrap();
            let d = d.exact().expect("rational forms have rational delta").clone();
            prop_assert_eq!(d.clone() * d.clone() * d.clone() * q(81), qf.det() * q(4));
            let l = q(l);
            let dl = delta_case2(&x.scale(&l)).unwrap().exact().unwrap().clone();
            let l7 = (0..7).fold(q(1), |acc, _| acc * l.clone());
            prop_assert_eq!(dl, l7 * d);
            let ql = q_case2(&x.scale(&l)).unwrap();
            prop_assert_eq!(ql, qf.scale(&(l.clone() * l.clone() * l)));
        }
    }
}
