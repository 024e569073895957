//! Cayley–Dickson doubling and the octonion algebra attached to a trivector.
//!
//! Doubling `A ↦ A(±)` uses `(a, b)(c, d) = (ac ∓ d̄b, da + bc̄)` and
//! `‖(a, b)‖ = ‖a‖ ± ‖b‖`. Basis element `i < dim A` of `A(±)` is `(aᵢ, 0)`;
//! element `dim A + i` is `(0, aᵢ) = aᵢε`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::invariants::{delta_from_q, q_case2, DeltaValue, QuadraticForm};
use crate::linalg::Matrix;
use crate::multilinear::{evaluate, gl_action, unit_vector, AlternatingForm};
use crate::scalar::Scalar;

/// Sign of a doubling step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Coordinates of an algebra element.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> AlgElement<S> {
    pub fn new(coords: Vec<S>) -> Self {
        AlgElement { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        AlgElement::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        AlgElement::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn scale(&self, s: &S) -> Self {
        AlgElement::new(self.coords.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(S::is_zero)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coords.iter().all(|c| c.is_negligible(tol))
    }
}

/// Structure constants and norm of a finite dimensional normed algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraStructure<S> {
    dim: usize,
    /// `table[(i·dim + j)·dim + k]` is the coefficient of `b_k` in `b_i·b_j`.
    table: Vec<S>,
    norm: QuadraticForm<S>,
    unit: usize,
}

impl<S: Scalar> AlgebraStructure<S> {
    /// The ground field as a one dimensional algebra.
    pub fn field() -> Self {
        AlgebraStructure {
            dim: 1,
            table: vec![S::one()],
            norm: QuadraticForm::from_gram(Matrix::identity(1)).expect("symmetric"),
            unit: 0,
        }
    }

    pub fn from_table(dim: usize, table: Vec<S>, norm: QuadraticForm<S>, unit: usize) -> Result<Self> {
        if table.len() != dim * dim * dim {
            return Err(Error::dims(dim * dim * dim, table.len()));
        }
        if norm.dim() != dim {
            return Err(Error::dims(dim, norm.dim()));
        }
        if unit >= dim {
            return Err(Error::invalid("unit index out of range"));
        }
        Ok(AlgebraStructure { dim, table, norm, unit })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table(&self) -> &[S] {
        &self.table
    }

    pub fn norm_form(&self) -> &QuadraticForm<S> {
        &self.norm
    }

    /// Coefficient of `b_k` in `b_i·b_j` (0-based).
    pub fn constant(&self, i: usize, j: usize, k: usize) -> S {
        self.table[(i * self.dim + j) * self.dim + k].clone()
    }

    pub fn one(&self) -> AlgElement<S> {
        self.basis(self.unit)
    }

    pub fn basis(&self, i: usize) -> AlgElement<S> {
        AlgElement::new(unit_vector(self.dim, i + 1))
    }

    pub fn element(&self, coords: Vec<S>) -> Result<AlgElement<S>> {
        if coords.len() != self.dim {
            return Err(Error::dims(self.dim, coords.len()));
        }
        Ok(AlgElement::new(coords))
    }

    fn check(&self, x: &AlgElement<S>) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::dims(self.dim, x.dim()));
        }
        Ok(())
    }

    pub fn mul(&self, x: &AlgElement<S>, y: &AlgElement<S>) -> Result<AlgElement<S>> {
        self.check(x)?;
        self.check(y)?;
        let n = self.dim;
        let mut r = vec![S::zero(); n];
        for i in 0..n {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coords[j].is_zero() {
                    continue;
                }
                let c = x.coords[i].clone() * y.coords[j].clone();
                let base = (i * n + j) * n;
                for (k, rk) in r.iter_mut().enumerate() {
                    let t = &self.table[base + k];
                    if !t.is_zero() {
                        *rk = rk.clone() + c.clone() * t.clone();
                    }
                }
            }
        }
        Ok(AlgElement::new(r))
    }

    /// `⟨x, y⟩`, the polarization of the norm.
    pub fn inner(&self, x: &AlgElement<S>, y: &AlgElement<S>) -> Result<S> {
        self.check(x)?;
        self.norm.polar(&x.coords, &y.coords)
    }

    pub fn norm(&self, x: &AlgElement<S>) -> Result<S> {
        self.check(x)?;
        self.norm.eval(&x.coords)
    }

    /// `Re(x) = ⟨x, 1⟩` (a scalar).
    pub fn re(&self, x: &AlgElement<S>) -> Result<S> {
        self.inner(x, &self.one())
    }

    pub fn im(&self, x: &AlgElement<S>) -> Result<AlgElement<S>> {
        Ok(x.sub(&self.one().scale(&self.re(x)?)))
    }

    /// `x̄ = 2·Re(x)·1 − x`.
    pub fn conj(&self, x: &AlgElement<S>) -> Result<AlgElement<S>> {
        let two = S::from_int(2);
        Ok(self.one().scale(&(two * self.re(x)?)).sub(x))
    }

    /// `(xy)z − x(yz)`.
    pub fn associator(&self, x: &AlgElement<S>, y: &AlgElement<S>, z: &AlgElement<S>) -> Result<AlgElement<S>> {
        let l = self.mul(&self.mul(x, y)?, z)?;
        let r = self.mul(x, &self.mul(y, z)?)?;
        Ok(l.sub(&r))
    }

    /// The same algebra written in another basis (columns of `new_basis`).
    pub fn change_basis(&self, new_basis: &[AlgElement<S>], unit: usize) -> Result<Self> {
        if new_basis.len() != self.dim {
            return Err(Error::dims(self.dim, new_basis.len()));
        }
        let cols: Vec<Vec<S>> = new_basis.iter().map(|b| b.coords.clone()).collect();
        let p = Matrix::from_columns(&cols)?;
        let tol = if S::EXACT { None } else { Some(1e-12) };
        let pinv = p.inverse(tol)?.ok_or_else(|| Error::domain("new basis is not a basis"))?;
        let n = self.dim;
        let mut table = Vec::with_capacity(n * n * n);
        for a in new_basis {
            for b in new_basis {
                table.extend(pinv.mul_vec(&self.mul(a, b)?.coords)?);
            }
        }
        let gram = p.transpose().mul(self.norm.gram()).mul(&p);
        AlgebraStructure::from_table(n, table, QuadraticForm::from_gram(gram)?, unit)
    }
}

/// `A(±)`.
pub fn cd_double<S: Scalar>(a: &AlgebraStructure<S>, sign: Sign) -> Result<AlgebraStructure<S>> {
    let n = a.dim;
    let big = 2 * n;
    let s = match sign {
        Sign::Plus => S::one(),
        Sign::Minus => -S::one(),
    };
    let split = |v: &AlgElement<S>| {
        (AlgElement::new(v.coords[..n].to_vec()), AlgElement::new(v.coords[n..].to_vec()))
    };
    let mut table = Vec::with_capacity(big * big * big);
    for i in 0..big {
        for j in 0..big {
            let x = AlgElement::new(unit_vector(big, i + 1));
            let y = AlgElement::new(unit_vector(big, j + 1));
            let ((xa, xb), (yc, yd)) = (split(&x), split(&y));
            let first = a.mul(&xa, &yc)?.sub(&a.mul(&a.conj(&yd)?, &xb)?.scale(&s));
            let second = a.mul(&yd, &xa)?.add(&a.mul(&xb, &a.conj(&yc)?)?);
            table.extend(first.coords);
            table.extend(second.coords);
        }
    }
    let g = a.norm.gram();
    let gram = Matrix::block_diag(g, &g.scale(&s));
    AlgebraStructure::from_table(big, table, QuadraticForm::from_gram(gram)?, a.unit)
}

/// `k(+)`, with `norm(a + bε) = a² + b²`.
pub fn complex_plus<S: Scalar>() -> AlgebraStructure<S> {
    cd_double(&AlgebraStructure::field(), Sign::Plus).expect("doubling")
}

/// `ℍ = k(+)(+)`.
pub fn quaternions<S: Scalar>() -> AlgebraStructure<S> {
    cd_double(&complex_plus(), Sign::Plus).expect("doubling")
}

/// `𝕆 = ℍ(+)`.
pub fn octonions<S: Scalar>() -> AlgebraStructure<S> {
    cd_double(&quaternions(), Sign::Plus).expect("doubling")
}

/// `M(2,2) ≅ k(+)(−)`.
pub fn matrix_algebra<S: Scalar>() -> AlgebraStructure<S> {
    cd_double(&complex_plus(), Sign::Minus).expect("doubling")
}

/// Split octonions `M(2,2)(+)`.
pub fn split_octonions<S: Scalar>() -> AlgebraStructure<S> {
    cd_double(&matrix_algebra(), Sign::Plus).expect("doubling")
}

/// Coordinates in `k(+)(−)` of the `2×2` matrix `[[m11, m12], [m21, m22]]`.
pub fn matrix_coords<S: Scalar>(m: [i64; 4]) -> [S; 4] {
    let [m11, m12, m21, m22] = m;
    [
        S::from_ratio(m11 + m22, 2),
        S::from_ratio(m21 - m12, 2),
        S::from_ratio(m11 - m22, 2),
        S::from_ratio(m12 + m21, 2),
    ]
}

/// The element `a + bε` of the split octonions, `a`, `b` given as `2×2` matrices.
pub fn split_element<S: Scalar>(a: [i64; 4], b: [i64; 4]) -> AlgElement<S> {
    let mut c: Vec<S> = matrix_coords::<S>(a).to_vec();
    c.extend(matrix_coords::<S>(b));
    AlgElement::new(c)
}

/// The basis `f₁, …, f₇` of `Im(𝕆̃)`:
/// `diag(1,−1), E₁₂, E₁₁ε, −E₂₁ε, −E₂₁, E₂₂ε, E₁₂ε`.
pub fn split_imaginary_basis<S: Scalar>() -> Vec<AlgElement<S>> {
    let z = [0, 0, 0, 0];
    vec![
        split_element([1, 0, 0, -1], z),
        split_element([0, 1, 0, 0], z),
        split_element(z, [1, 0, 0, 0]),
        split_element(z, [0, 0, -1, 0]),
        split_element([0, 0, -1, 0], z),
        split_element(z, [0, 0, 0, 1]),
        split_element(z, [0, 1, 0, 0]),
    ]
}

/// The standard imaginary basis `b₁, …, b₇` of a doubled algebra of dim 8.
pub fn standard_imaginary_basis<S: Scalar>() -> Vec<AlgElement<S>> {
    (2..=8).map(|i| AlgElement::new(unit_vector(8, i))).collect()
}

/// Split octonions in the basis `1, f₁, …, f₇`.
pub fn split_octonions_f_basis<S: Scalar>() -> AlgebraStructure<S> {
    let o = split_octonions::<S>();
    let mut basis = vec![o.one()];
    basis.extend(split_imaginary_basis());
    o.change_basis(&basis, 0).expect("f-basis is a basis")
}

/// `C(x, y, z) = ⟨x, yz⟩` on `Im(A)`, as a trivector in the dual basis of `im_basis`.
pub fn c_form<S: Scalar>(a: &AlgebraStructure<S>, im_basis: &[AlgElement<S>]) -> Result<AlternatingForm<S>> {
    if a.dim != 8 || im_basis.len() != 7 {
        return Err(Error::shape("C is defined on 8-dimensional algebras with 7 imaginary basis vectors"));
    }
    let mut vals = vec![S::zero(); 343];
    for i in 0..7 {
        for j in 0..7 {
            let p = a.mul(&im_basis[i], &im_basis[j])?;
            for k in 0..7 {
                vals[(k * 7 + i) * 7 + j] = a.inner(&im_basis[k], &p)?;
            }
        }
    }
    let at = |i: usize, j: usize, k: usize| vals[(i * 7 + j) * 7 + k].clone();
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                let v = at(i, j, k);
                let alternating = (v.clone() + at(j, i, k)).is_negligible(1e-12)
                    && (v.clone() + at(i, k, j)).is_negligible(1e-12)
                    && (v.clone() + at(k, j, i)).is_negligible(1e-12);
                assert!(alternating, "C is not alternating at ({i}, {j}, {k})");
            }
        }
    }
    let mut f = AlternatingForm::zero(7, 3)?;
    for i in 0..7 {
        for j in i + 1..7 {
            for k in j + 1..7 {
                f.insert_strict(&[i + 1, j + 1, k + 1], at(i, j, k))?;
            }
        }
    }
    Ok(f)
}

fn exact_delta<S: Scalar>(q: &QuadraticForm<S>) -> Result<S> {
    match delta_from_q(q)? {
        DeltaValue::Exact(d) if !d.is_negligible(1e-12) => Ok(d),
        DeltaValue::Exact(_) => Err(Error::NotSemistable("Q_x is degenerate".into())),
        DeltaValue::Inexact(_) => Err(Error::domain("Δ(x) does not lie in the scalar field")),
    }
}

/// `𝕆_x` in the basis `1, f₁, …, f₇`: `Im(v₁v₂)` solves
/// `gram(Q_x)·u = 3·x(·, v₁, v₂)`, `Re(v₁v₂) = −Q_x(v₁, v₂)/Δ(x)`, and
/// `‖v‖ = Q_x(v)/Δ(x)` on the imaginary part.
pub fn octonion_from_form<S: Scalar>(x: &AlternatingForm<S>) -> Result<AlgebraStructure<S>> {
    if x.dim() != 7 || x.degree() != 3 {
        return Err(Error::shape("octonions come from trivectors in dimension 7"));
    }
    let q = q_case2(x)?;
    let delta = exact_delta(&q)?;
    let gram = q.gram();
    let tol = if S::EXACT { None } else { Some(1e-12) };
    let ginv = gram
        .inverse(tol)?
        .ok_or_else(|| Error::NotSemistable("Q_x is degenerate".into()))?;
    let three = S::from_int(3);
    let n = 8;
    let mut table = vec![S::zero(); n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for k in 0..n {
        table[idx(0, k, k)] = S::one();
        table[idx(k, 0, k)] = S::one();
    }
    let f = |i: usize| unit_vector::<S>(7, i);
    for i in 1..=7 {
        for j in 1..=7 {
            let rhs: Vec<S> = (1..=7)
                .map(|a| Ok(three.clone() * evaluate(x, &[f(a), f(i), f(j)])?))
                .collect::<Result<_>>()?;
            let u = ginv.mul_vec(&rhs)?;
            if !S::EXACT {
                let resid = gram.mul_vec(&u)?;
                let bad = resid.iter().zip(&rhs).any(|(a, b)| !(a.clone() - b.clone()).is_negligible(1e-9));
                if bad {
                    return Err(Error::domain("ill-conditioned product system"));
                }
            }
            for (a, ua) in u.into_iter().enumerate() {
                table[idx(i, j, a + 1)] = ua;
            }
            table[idx(i, j, 0)] = -gram[(i - 1, j - 1)].clone() / delta.clone();
        }
    }
    let inv_delta = S::one() / delta;
    let mut ngram = Matrix::zeros(8, 8);
    ngram[(0, 0)] = S::one();
    for i in 0..7 {
        for j in 0..7 {
            ngram[(i + 1, j + 1)] = gram[(i, j)].clone() * inv_delta.clone();
        }
    }
    AlgebraStructure::from_table(8, table, QuadraticForm::from_gram(ngram)?, 0)
}

/// The map `m(v) = t²·det(g)·g⁻ᵀ·v` on `Im`, extended by `1 ↦ 1`.
pub fn iso_map<S: Scalar>(t: &S, g: &Matrix<S>) -> Result<Matrix<S>> {
    let tol = if S::EXACT { None } else { Some(1e-12) };
    let ginv = g.inverse(tol)?.ok_or_else(|| Error::domain("g is singular"))?;
    let c = t.clone() * t.clone() * g.det()?;
    let m = ginv.transpose().scale(&c);
    Ok(Matrix::block_diag(&Matrix::identity(1), &m))
}

/// Checks that `m` of [`iso_map`] is an isomorphism `𝕆_x → 𝕆_y` of normed
/// algebras, where `y = t·(g·x)`.
pub fn iso_check<S: Scalar>(
    x: &AlternatingForm<S>,
    y: &AlternatingForm<S>,
    t: &S,
    g: &Matrix<S>,
    tol: f64,
) -> Result<bool> {
    let image = gl_action(g, x)?.scale(t);
    if !image.approx_eq(y, tol) {
        return Err(Error::Precondition("y is not (t, g)·x".into()));
    }
    let ox = octonion_from_form(x)?;
    let oy = octonion_from_form(y)?;
    let m = iso_map(t, g)?;
    let phi = |v: &AlgElement<S>| -> Result<AlgElement<S>> { Ok(AlgElement::new(m.mul_vec(&v.coords)?)) };
    if !phi(&ox.one())?.sub(&oy.one()).is_negligible(tol) {
        return Ok(false);
    }
    for i in 0..8 {
        for j in 0..8 {
            let (a, b) = (ox.basis(i), ox.basis(j));
            let lhs = phi(&ox.mul(&a, &b)?)?;
            let rhs = oy.mul(&phi(&a)?, &phi(&b)?)?;
            if !lhs.sub(&rhs).is_negligible(tol) {
                return Ok(false);
            }
            let d = ox.inner(&a, &b)? - oy.inner(&phi(&a)?, &phi(&b)?)?;
            if !d.is_negligible(tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::q_case2;
    use crate::representatives::{embed_form, fixtures, make_rep, RepName};
    use crate::scalar::{rat, QuadExt, Rational};
    use proptest::prelude::*;

    type Q = Rational;

    fn el(a: &AlgebraStructure<Q>, v: &[i64]) -> AlgElement<Q> {
        a.element(v.iter().map(|&x| rat(x, 1)).collect()).unwrap()
    }

    #[test]
    fn complex_plus_is_commutative_associative() {
        let c = complex_plus::<Q>();
        for i in 0..2 {
            for j in 0..2 {
                let (x, y) = (c.basis(i), c.basis(j));
                assert_eq!(c.mul(&x, &y).unwrap(), c.mul(&y, &x).unwrap());
                for k in 0..2 {
                    assert!(c.associator(&x, &y, &c.basis(k)).unwrap().is_zero());
                }
            }
        }
        assert_eq!(c.norm(&el(&c, &[3, 4])).unwrap(), rat(25, 1));
    }

    #[test]
    fn quaternion_units() {
        let h = quaternions::<Q>();
        let (i, j, k) = (h.basis(1), h.basis(2), h.basis(3));
        let ij = h.mul(&i, &j).unwrap();
        let minus_one = h.one().scale(&rat(-1, 1));
        assert_eq!(h.mul(&ij, &k).unwrap(), h.mul(&i, &h.mul(&j, &k).unwrap()).unwrap());
        assert_eq!(h.mul(&k, &k).unwrap(), minus_one);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert!(h.associator(&h.basis(a), &h.basis(b), &h.basis(c)).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn quaternion_ijk() {
        let h = quaternions::<Q>();
        let (i, j) = (h.basis(1), h.basis(2));
        let k = h.mul(&i, &j).unwrap();
        let prod = h.mul(&h.mul(&i, &j).unwrap(), &k).unwrap();
        assert_eq!(prod, h.one().scale(&rat(-1, 1)));
        assert_eq!(h.mul(&i, &h.mul(&j, &k).unwrap()).unwrap(), prod);
    }

    #[test]
    fn split_octonions_alternative_not_associative() {
        let o = split_octonions::<Q>();
        let mut nonzero = false;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let (x, y, z) = (o.basis(a), o.basis(b), o.basis(c));
                    let abc = o.associator(&x, &y, &z).unwrap();
                    nonzero |= !abc.is_zero();
                    assert_eq!(o.associator(&y, &x, &z).unwrap(), abc.scale(&rat(-1, 1)));
                    assert_eq!(o.associator(&x, &z, &y).unwrap(), abc.scale(&rat(-1, 1)));
                }
            }
        }
        assert!(nonzero);
    }

    #[test]
    fn split_norm_in_f_basis() {
        let of = split_octonions_f_basis::<Q>();
        let g = of.norm_form().gram();
        // ‖x‖ = −x₁² + x₂x₅ + x₃x₆ + x₄x₇ on Im, ‖1‖ = 1
        let expect = QuadraticForm::from_monomials(
            8,
            &[(1, 1, rat(1, 1)), (2, 2, rat(-1, 1)), (3, 6, rat(1, 1)), (4, 7, rat(1, 1)), (5, 8, rat(1, 1))],
        );
        assert_eq!(g, expect.gram());
        let o = split_octonions::<Q>();
        let one = o.one();
        assert_eq!(o.conj(&one).unwrap(), one);
        assert_eq!(o.re(&one).unwrap(), rat(1, 1));
        assert!(o.im(&one).unwrap().is_zero());
    }

    #[test]
    fn c_form_of_split_octonions() {
        let c = c_form(&split_octonions::<Q>(), &split_imaginary_basis()).unwrap();
        let expect = make_rep(RepName::Case2W).unwrap().scale(&rat(1, 2));
        assert_eq!(c, expect);
        // alternative reading Re(x(ȳz)) gives the same coefficients
        let o = split_octonions::<Q>();
        let f = split_imaginary_basis::<Q>();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let v = o.re(&o.mul(&f[i], &o.mul(&o.conj(&f[j]).unwrap(), &f[k]).unwrap()).unwrap()).unwrap();
                    assert_eq!(v, c.get(&[i + 1, j + 1, k + 1]));
                }
            }
        }
    }

    #[test]
    fn c_form_of_octonions_is_definite() {
        let c = c_form(&octonions::<Q>(), &standard_imaginary_basis()).unwrap();
        let q = q_case2(&c.scale(&rat(2, 1))).unwrap();
        let g = q.gram();
        // Sylvester: leading minors all of one sign pattern (definite)
        let signs: Vec<bool> = (1..=7)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                g.submatrix(&idx, &idx).det().unwrap() > rat(0, 1)
            })
            .collect();
        let pos = signs.iter().all(|&s| s);
        let neg = signs.iter().enumerate().all(|(k, &s)| s == (k % 2 == 1));
        assert!(pos || neg, "{signs:?}");
    }

    #[test]
    fn octonions_of_w_match_split_octonions() {
        let w = make_rep(RepName::Case2W).unwrap();
        let ow = octonion_from_form(&w).unwrap();
        assert_eq!(ow, split_octonions_f_basis::<Q>());
        let again = octonion_from_form(&c_form(&split_octonions::<Q>(), &split_imaginary_basis()).unwrap().scale(&rat(2, 1))).unwrap();
        assert_eq!(again, ow);
    }

    #[test]
    fn octonions_of_w1_are_definite() {
        let w1 = make_rep(RepName::Case2W1).unwrap();
        let o = octonion_from_form(&w1).unwrap();
        let g = o.norm_form().gram();
        for k in 1..=8 {
            let idx: Vec<usize> = (0..k).collect();
            assert!(g.submatrix(&idx, &idx).det().unwrap() > rat(0, 1));
        }
    }

    #[test]
    fn degenerate_form_rejected() {
        let wp = make_rep(RepName::Case2WPrime).unwrap();
        assert!(matches!(octonion_from_form(&wp), Err(Error::NotSemistable(_))));
    }

    #[test]
    fn iso_check_examples() {
        let w = make_rep(RepName::Case2W).unwrap();
        let id = Matrix::<Q>::identity(7);
        assert!(iso_check(&w, &w, &rat(1, 1), &id, 0.0).unwrap());
        let t = rat(2, 1);
        assert!(iso_check(&w, &w.scale(&t), &t, &id, 0.0).unwrap());
        assert!(matches!(iso_check(&w, &w.scale(&t), &rat(3, 1), &id, 0.0), Err(Error::Precondition(_))));
        let (t, g) = fixtures::case2_w1_element();
        let wq = embed_form(&w);
        let w1 = embed_form(&make_rep(RepName::Case2W1).unwrap());
        assert!(iso_check(&wq, &w1, &t, &g, 0.0).unwrap());
    }

    #[test]
    fn transported_norm_is_sum_of_squares() {
        // ‖g₁ᵀy‖_w = y₁² + ⋯ + y₇²
        let w = embed_form(&make_rep(RepName::Case2W).unwrap());
        let ow = octonion_from_form(&w).unwrap();
        let g1t = fixtures::case2_g1().transpose();
        for i in 0..7 {
            for j in 0..7 {
                let mut a = vec![QuadExt::zero()];
                a.extend(g1t.column(i));
                let mut b = vec![QuadExt::zero()];
                b.extend(g1t.column(j));
                let v = ow.inner(&AlgElement::new(a), &AlgElement::new(b)).unwrap();
                let expect = if i == j { QuadExt::one() } else { QuadExt::zero() };
                assert_eq!(v, expect);
            }
        }
    }

    fn arb_coords(n: usize) -> impl Strategy<Value = Vec<Q>> {
        proptest::collection::vec((-6i64..7, 1i64..4), n).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
    }

    fn algebras() -> Vec<AlgebraStructure<Q>> {
        vec![
            quaternions(),
            octonions(),
            split_octonions(),
            octonion_from_form(&make_rep(RepName::Case2W).unwrap()).unwrap(),
            octonion_from_form(&make_rep(RepName::Case2W1).unwrap()).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn normed_algebra_identities(x in arb_coords(8), y in arb_coords(8), z in arb_coords(8)) {
            for a in algebras() {
                let n = a.dim();
                let (x, y, z) = (AlgElement::new(x[..n].to_vec()), AlgElement::new(y[..n].to_vec()), AlgElement::new(z[..n].to_vec()));
                let xy = a.mul(&x, &y).unwrap();
                prop_assert_eq!(a.norm(&xy).unwrap(), a.norm(&x).unwrap() * a.norm(&y).unwrap());
                prop_assert_eq!(a.conj(&xy).unwrap(), a.mul(&a.conj(&y).unwrap(), &a.conj(&x).unwrap()).unwrap());
                let xyb = a.mul(&x, &a.conj(&y).unwrap()).unwrap();
                prop_assert_eq!(a.inner(&x, &y).unwrap(), a.re(&xyb).unwrap());
                let xxb = a.mul(&x, &a.conj(&x).unwrap()).unwrap();
                prop_assert_eq!(xxb, a.one().scale(&a.norm(&x).unwrap()));
                let abc = a.associator(&x, &y, &z).unwrap();
                prop_assert_eq!(a.associator(&y, &x, &z).unwrap(), abc.scale(&rat(-1, 1)));
                prop_assert_eq!(a.associator(&x, &z, &y).unwrap(), abc.scale(&rat(-1, 1)));
            }
        }

        #[test]
        fn c_form_vanishes_on_repeats(x in arb_coords(7), y in arb_coords(7)) {
            let c = c_form(&split_octonions::<Q>(), &split_imaginary_basis()).unwrap();
            prop_assert_eq!(evaluate(&c, &[x.clone(), x.clone(), y.clone()]).unwrap(), rat(0, 1));
        }
    }
}
