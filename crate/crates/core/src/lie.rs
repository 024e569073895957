//! Stabilizer Lie algebras and fixed spaces, by exact nullspaces.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{span_rank, Matrix};
use crate::multilinear::{combinations, lie_action, AlternatingForm};
use crate::scalar::Scalar;

/// A linear subspace of `𝔤𝔩(n)` given by a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LieSubalgebra<S> {
    pub dim: usize,
    pub basis: Vec<Matrix<S>>,
    pub label: Option<String>,
}

/// Result of a closure test, with the first offending pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub closed: bool,
    pub witness: Option<(usize, usize)>,
}

fn flatten<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    m.entries().to_vec()
}

fn unflatten<S: Scalar>(n: usize, v: &[S]) -> Matrix<S> {
    Matrix::from_fn(n, n, |i, j| v[i * n + j].clone())
}

impl<S: Scalar> LieSubalgebra<S> {
    /// Span of `basis`, reduced to an independent subset.
    pub fn span(dim: usize, basis: Vec<Matrix<S>>, label: Option<&str>) -> Result<Self> {
        let mut kept: Vec<Matrix<S>> = Vec::new();
        let mut rows: Vec<Vec<S>> = Vec::new();
        for m in basis {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::dims(dim, m.rows()));
            }
            rows.push(flatten(&m));
            if span_rank(&rows, exact_or::<S>(1e-9)) == kept.len() + 1 {
                kept.push(m);
            } else {
                rows.pop();
            }
        }
        Ok(LieSubalgebra { dim, basis: kept, label: label.map(String::from) })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(String::from(label));
        self
    }

    /// Whether `x` lies in the span.
    pub fn contains(&self, x: &Matrix<S>) -> bool {
        let mut rows: Vec<Vec<S>> = self.basis.iter().map(flatten).collect();
        rows.push(flatten(x));
        span_rank(&rows, exact_or::<S>(1e-9)) == self.basis.len()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|x| other.contains(x))
    }

    pub fn same_span(&self, other: &Self) -> bool {
        self.dimension() == other.dimension() && self.is_subspace_of(other)
    }

    /// `g·L·g⁻¹`.
    pub fn conjugate(&self, g: &Matrix<S>) -> Result<Self> {
        let ginv = g
            .inverse(exact_or::<S>(1e-12))?
            .ok_or_else(|| Error::domain("conjugating by a singular matrix"))?;
        let basis = self.basis.iter().map(|x| g.mul(x).mul(&ginv)).collect();
        Ok(LieSubalgebra { dim: self.dim, basis, label: self.label.clone() })
    }
}

fn exact_or<S: Scalar>(tol: f64) -> Option<f64> {
    if S::EXACT {
        None
    } else {
        Some(tol)
    }
}

/// `[X, Y] = XY − YX`.
pub fn bracket<S: Scalar>(x: &Matrix<S>, y: &Matrix<S>) -> Result<Matrix<S>> {
    x.bracket(y)
}

/// All `X ∈ 𝔤𝔩(n)` with `ρ(X)x = 0`.
pub fn annihilator<S: Scalar>(x: &AlternatingForm<S>) -> Result<LieSubalgebra<S>> {
    stabilizer(x, false, exact_or::<S>(1e-9))
}

/// The stabilizer Lie algebra `𝔥_x ⊂ 𝔰𝔩(n)` of `x`.
pub fn stab_lie_algebra<S: Scalar>(x: &AlternatingForm<S>) -> Result<LieSubalgebra<S>> {
    stabilizer(x, true, exact_or::<S>(1e-9))
}

/// [`stab_lie_algebra`] with an explicit elimination tolerance (ignored for
/// exact scalars).
pub fn stab_lie_algebra_tol<S: Scalar>(x: &AlternatingForm<S>, tol: f64) -> Result<LieSubalgebra<S>> {
    stabilizer(x, true, exact_or::<S>(tol))
}

fn stabilizer<S: Scalar>(x: &AlternatingForm<S>, traceless: bool, tol: Option<f64>) -> Result<LieSubalgebra<S>> {
    let n = x.dim();
    let targets = combinations(n, x.degree());
    let rows_n = targets.len() + usize::from(traceless);
    let mut sys = Matrix::<S>::zeros(rows_n, n * n);
    for k in 0..n {
        for l in 0..n {
            let col = k * n + l;
            let img = lie_action(&Matrix::unit(n, k, l), x)?;
            for (r, idx) in targets.iter().enumerate() {
                sys[(r, col)] = img.get(idx);
            }
            if traceless && k == l {
                sys[(targets.len(), col)] = S::one();
            }
        }
    }
    let basis = sys.nullspace(tol).iter().map(|v| unflatten(n, v)).collect();
    Ok(LieSubalgebra { dim: n, basis, label: None })
}

/// Basis of `{y ∈ ∧ᵈkⁿ : ρ(X)y = 0 for all X ∈ L}`.
pub fn fixed_space<S: Scalar>(l: &LieSubalgebra<S>, dim: usize, degree: usize) -> Result<Vec<AlternatingForm<S>>> {
    if l.dim != dim {
        return Err(Error::dims(l.dim, dim));
    }
    let basis = combinations(dim, degree);
    let rows_n = basis.len() * l.basis.len();
    let mut sys = Matrix::<S>::zeros(rows_n.max(1), basis.len());
    for (c, idx) in basis.iter().enumerate() {
        let e = AlternatingForm::basis(dim, idx)?;
        for (i, xm) in l.basis.iter().enumerate() {
            let img = lie_action(xm, &e)?;
            for (r, t) in basis.iter().enumerate() {
                sys[(i * basis.len() + r, c)] = img.get(t);
            }
        }
    }
    sys.nullspace(exact_or::<S>(1e-9))
        .iter()
        .map(|v| AlternatingForm::from_dense(dim, degree, v))
        .collect()
}

/// Whether every bracket of basis elements lies in the span.
pub fn subalgebra_closed<S: Scalar>(l: &LieSubalgebra<S>) -> Result<Closure> {
    for i in 0..l.basis.len() {
        for j in i + 1..l.basis.len() {
            let b = bracket(&l.basis[i], &l.basis[j])?;
            if !l.contains(&b) {
                return Ok(Closure { closed: false, witness: Some((i, j)) });
            }
        }
    }
    Ok(Closure { closed: true, witness: None })
}

/// The Lie subalgebra generated by `l`.
pub fn generated<S: Scalar>(l: &LieSubalgebra<S>) -> Result<LieSubalgebra<S>> {
    let mut cur = l.clone();
    loop {
        let mut extra = cur.basis.clone();
        for i in 0..cur.basis.len() {
            for j in i + 1..cur.basis.len() {
                extra.push(bracket(&cur.basis[i], &cur.basis[j])?);
            }
        }
        let next = LieSubalgebra::span(cur.dim, extra, None)?;
        if next.dimension() == cur.dimension() {
            return Ok(LieSubalgebra { label: l.label.clone(), ..next });
        }
        cur = next;
    }
}

/// Sum of subspaces; `None` when the sum is not direct.
pub fn direct_sum<S: Scalar>(parts: &[&LieSubalgebra<S>], label: Option<&str>) -> Result<Option<LieSubalgebra<S>>> {
    let dim = parts.first().map_or(0, |p| p.dim);
    let all: Vec<Matrix<S>> = parts.iter().flat_map(|p| p.basis.iter().cloned()).collect();
    let total = all.len();
    let s = LieSubalgebra::span(dim, all, label)?;
    Ok(if s.dimension() == total { Some(s) } else { None })
}

/// `X·gram + gram·Xᵀ = 0`: `X` is an infinitesimal isometry of the quadratic
/// form with this gram matrix under push-forward `gram ↦ g·gram·gᵀ`.
pub fn preserves_quadratic_form<S: Scalar>(x: &Matrix<S>, gram: &Matrix<S>, tol: f64) -> Result<bool> {
    let lhs = x.try_mul(gram)?.try_add(&gram.try_mul(&x.transpose())?)?;
    Ok(lhs.is_negligible(tol))
}

/// The blocks of `𝔰𝔩(6)` attached to `e₁₂₃ + e₄₅₆`.
pub mod case1 {
    use super::*;

    fn block(a_rows: core::ops::Range<usize>, a_cols: core::ops::Range<usize>) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for i in a_rows {
            for j in a_cols.clone() {
                v.push((i, j));
            }
        }
        v
    }

    fn units<S: Scalar>(cells: Vec<(usize, usize)>) -> Vec<Matrix<S>> {
        cells.into_iter().map(|(i, j)| Matrix::unit(6, i, j)).collect()
    }

    fn sl3_block<S: Scalar>(off: usize) -> Vec<Matrix<S>> {
        let mut v = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    v.push(Matrix::unit(6, off + i, off + j));
                }
            }
        }
        for i in 0..2 {
            let mut h = Matrix::zeros(6, 6);
            h[(off + i, off + i)] = S::one();
            h[(off + i + 1, off + i + 1)] = -S::one();
            v.push(h);
        }
        v
    }

    /// `{d(A, B) : tr A = tr B = 0}`.
    pub fn h1<S: Scalar>() -> LieSubalgebra<S> {
        let mut b = sl3_block(0);
        b.extend(sl3_block(3));
        LieSubalgebra { dim: 6, basis: b, label: Some(String::from("h1")) }
    }

    /// Upper right `3×3` block.
    pub fn u1<S: Scalar>() -> LieSubalgebra<S> {
        LieSubalgebra { dim: 6, basis: units(block(0..3, 3..6)), label: Some(String::from("u1")) }
    }

    /// Lower left `3×3` block.
    pub fn u2<S: Scalar>() -> LieSubalgebra<S> {
        LieSubalgebra { dim: 6, basis: units(block(3..6, 0..3)), label: Some(String::from("u2")) }
    }

    /// `k·diag(I₃, −I₃)`.
    pub fn t<S: Scalar>() -> LieSubalgebra<S> {
        let d = Matrix::diagonal(&[S::one(), S::one(), S::one(), -S::one(), -S::one(), -S::one()]);
        LieSubalgebra { dim: 6, basis: alloc::vec![d], label: Some(String::from("t")) }
    }

    /// `𝔥₁ ⊕ (selected summands)`, labelled.
    pub fn named<S: Scalar>(name: &str) -> Result<LieSubalgebra<S>> {
        let (h1, u1, u2, t) = (h1::<S>(), u1::<S>(), u2::<S>(), t::<S>());
        let parts: Vec<&LieSubalgebra<S>> = match name {
            "h1" => alloc::vec![&h1],
            "h1'" => alloc::vec![&h1, &t],
            "h2" => alloc::vec![&h1, &u1, &u2, &t],
            "h3" => alloc::vec![&h1, &u1],
            "h3'" => alloc::vec![&h1, &u1, &t],
            "h4" => alloc::vec![&h1, &u2],
            "h4'" => alloc::vec![&h1, &u2, &t],
            "u1" => alloc::vec![&u1],
            "u2" => alloc::vec![&u2],
            "t" => alloc::vec![&t],
            other => return Err(Error::invalid(alloc::format!("unknown subalgebra {other}"))),
        };
        direct_sum(&parts, Some(name))?.ok_or_else(|| Error::domain("summands are not independent"))
    }
}
