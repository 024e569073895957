//! Alternating tensors and the operations on them.
//!
//! Conventions, fixed here once:
//!
//! * A form of degree `d` on `W = kⁿ` is stored by its coefficients on the
//!   basis `e_I = e_{i₁} ∧ ⋯ ∧ e_{i_d}` of `∧ᵈW`, with 1-based strictly
//!   increasing index tuples `I`.
//! * [`gl_action`] pushes forward along `g`: `g·e_j = Σ_k g[k][j] e_k`, so
//!   `(g·x)_I = Σ_J x_J det g[I, J]`.
//! * [`evaluate`] reads `x` as a function on `W*`: `x(f_{i₁}, …, f_{i_d}) = x_I`
//!   for the dual basis `f_i`, extended multilinearly. Consequently
//!   `evaluate(g·x, v…) = evaluate(x, gᵀv…)`.
//! * [`lie_action`] is the derivative of [`gl_action`] at the identity.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Sorts a tuple of distinct indices, returning the permutation sign.
/// `None` if an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All strictly increasing `k`-tuples from `1..=n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(1, n, k, &mut cur, &mut out);
    }
    out
}

fn signed<S: Scalar>(v: S, sign: i32) -> S {
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// The three spaces this crate knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormShape {
    /// `∧³k⁶`
    Case1,
    /// `∧³k⁷`
    Case2,
    /// `∧²k²ⁿ`, carrying `n`.
    Case3 { n: usize },
}

impl FormShape {
    pub fn of(dim: usize, degree: usize) -> Result<Self> {
        match (dim, degree) {
            (6, 3) => Ok(FormShape::Case1),
            (7, 3) => Ok(FormShape::Case2),
            (m, 2) if m >= 2 && m % 2 == 0 => Ok(FormShape::Case3 { n: m / 2 }),
            _ => Err(Error::shape(format!(
                "no invariant theory for degree {degree} forms on dimension {dim}"
            ))),
        }
    }

    pub fn case_number(self) -> u8 {
        match self {
            FormShape::Case1 => 1,
            FormShape::Case2 => 2,
            FormShape::Case3 { .. } => 3,
        }
    }
}

/// A degree-`d` alternating tensor on an `n`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingForm<S> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> AlternatingForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if degree > dim || dim == 0 {
            return Err(Error::shape(format!("degree {degree} on dimension {dim}")));
        }
        Ok(AlternatingForm { dim, degree, coeffs: BTreeMap::new() })
    }

    /// Builds a form from terms with arbitrary index order (signs applied,
    /// repeated indices contribute nothing).
    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, S)>,
    {
        let mut f = Self::zero(dim, degree)?;
        for (idx, v) in terms {
            f.add_term(&idx, v)?;
        }
        Ok(f)
    }

    /// Integer-coefficient shorthand: `[(&[1,2,3], 1), (&[4,5,6], 1)]`.
    pub fn from_int_terms(dim: usize, degree: usize, terms: &[(&[usize], i64)]) -> Result<Self> {
        Self::from_terms(dim, degree, terms.iter().map(|(i, v)| (i.to_vec(), S::from_int(*v))))
    }

    /// The basis element `e_I`.
    pub fn basis(dim: usize, idx: &[usize]) -> Result<Self> {
        Self::from_terms(dim, idx.len(), [(idx.to_vec(), S::one())])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn shape(&self) -> Result<FormShape> {
        FormShape::of(self.dim, self.degree)
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::dims(self.degree, idx.len()));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > self.dim) {
            return Err(Error::invalid(format!("index {bad} outside 1..={}", self.dim)));
        }
        Ok(())
    }

    /// Stores `v` at a key that must already be strictly increasing.
    pub fn insert_strict(&mut self, idx: &[usize], v: S) -> Result<()> {
        self.check_indices(idx)?;
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("indices not strictly increasing"));
        }
        self.put(idx.to_vec(), v);
        Ok(())
    }

    /// Adds `v·e_{idx}` for any ordering of `idx`.
    pub fn add_term(&mut self, idx: &[usize], v: S) -> Result<()> {
        self.check_indices(idx)?;
        if let Some((key, sign)) = sort_with_sign(idx) {
            self.accumulate(key, signed(v, sign));
        }
        Ok(())
    }

    fn put(&mut self, key: Vec<usize>, v: S) {
        if v.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, v);
        }
    }

    fn accumulate(&mut self, key: Vec<usize>, v: S) {
        if v.is_zero() {
            return;
        }
        let new = match self.coeffs.get(&key) {
            Some(old) => old.clone() + v,
            None => v,
        };
        self.put(key, new);
    }

    /// Coefficient of `e_{idx}`, with the permutation sign for unsorted `idx`.
    pub fn get(&self, idx: &[usize]) -> S {
        match sort_with_sign(idx) {
            Some((key, sign)) => self.coeffs.get(&key).map_or_else(S::zero, |v| signed(v.clone(), sign)),
            None => S::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(S::magnitude).fold(0.0, f64::max)
    }

    fn same_space(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::dims(self.dim, o.dim));
        }
        if self.degree != o.degree {
            return Err(Error::dims(self.degree, o.degree));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_space(o)?;
        let mut r = self.clone();
        for (k, v) in &o.coeffs {
            r.accumulate(k.clone(), v.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut r = AlternatingForm { dim: self.dim, degree: self.degree, coeffs: BTreeMap::new() };
        for (k, v) in &self.coeffs {
            r.put(k.clone(), v.clone() * s.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Coordinates in the lexicographic basis of [`combinations`].
    pub fn to_dense(&self) -> Vec<S> {
        combinations(self.dim, self.degree).iter().map(|k| self.get(k)).collect()
    }

    pub fn from_dense(dim: usize, degree: usize, v: &[S]) -> Result<Self> {
        let basis = combinations(dim, degree);
        if basis.len() != v.len() {
            return Err(Error::dims(basis.len(), v.len()));
        }
        Self::from_terms(dim, degree, basis.into_iter().zip(v.iter().cloned()))
    }

    /// Converts every coefficient.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AlternatingForm<T> {
        let mut r = AlternatingForm { dim: self.dim, degree: self.degree, coeffs: BTreeMap::new() };
        for (k, v) in &self.coeffs {
            r.put(k.clone(), f(v));
        }
        r
    }

    /// Equality up to `tol` in every coefficient (exact equality for exact scalars).
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        match self.try_sub(o) {
            Ok(d) => d.coeffs.values().all(|v| v.is_negligible(tol)),
            Err(_) => false,
        }
    }
}

/// An element of `∧ᵃW ⊗ W^{⊗b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedTensor<S> {
    dim: usize,
    wedge_degree: usize,
    tensor_arity: usize,
    coeffs: BTreeMap<(Vec<usize>, Vec<usize>), S>,
}

impl<S: Scalar> MixedTensor<S> {
    pub fn zero(dim: usize, wedge_degree: usize, tensor_arity: usize) -> Self {
        MixedTensor { dim, wedge_degree, tensor_arity, coeffs: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn wedge_degree(&self) -> usize {
        self.wedge_degree
    }

    pub fn tensor_arity(&self) -> usize {
        self.tensor_arity
    }

    /// Adds `v · e_{wedge} ⊗ e_{t₁} ⊗ ⋯` for any ordering of `wedge`.
    pub fn add_term(&mut self, wedge: &[usize], tensor: &[usize], v: S) -> Result<()> {
        if wedge.len() != self.wedge_degree {
            return Err(Error::dims(self.wedge_degree, wedge.len()));
        }
        if tensor.len() != self.tensor_arity {
            return Err(Error::dims(self.tensor_arity, tensor.len()));
        }
        if wedge.iter().chain(tensor).any(|&i| i == 0 || i > self.dim) {
            return Err(Error::invalid(format!("index outside 1..={}", self.dim)));
        }
        let Some((key, sign)) = sort_with_sign(wedge) else {
            return Ok(());
        };
        let v = signed(v, sign);
        if v.is_zero() {
            return Ok(());
        }
        let k = (key, tensor.to_vec());
        let new = match self.coeffs.get(&k) {
            Some(old) => old.clone() + v,
            None => v,
        };
        if new.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, new);
        }
        Ok(())
    }

    pub fn get(&self, wedge: &[usize], tensor: &[usize]) -> S {
        match sort_with_sign(wedge) {
            Some((key, sign)) => self
                .coeffs
                .get(&(key, tensor.to_vec()))
                .map_or_else(S::zero, |v| signed(v.clone(), sign)),
            None => S::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &S)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `x ↦ x ⊗ (nothing)`.
    pub fn from_form(x: &AlternatingForm<S>) -> Self {
        let mut t = Self::zero(x.dim, x.degree, 0);
        for (k, v) in x.iter() {
            t.coeffs.insert((k.clone(), Vec::new()), v.clone());
        }
        t
    }

    /// `(α ⊗ a) · (β ⊗ b) = (α ∧ β) ⊗ a ⊗ b`.
    pub fn wedge_tensor(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::dims(self.dim, o.dim));
        }
        let deg = self.wedge_degree + o.wedge_degree;
        if deg > self.dim {
            return Err(Error::shape("wedge degree exceeds dimension"));
        }
        let mut r = Self::zero(self.dim, deg, self.tensor_arity + o.tensor_arity);
        for ((wa, ta), va) in &self.coeffs {
            for ((wb, tb), vb) in &o.coeffs {
                if wa.iter().any(|i| wb.contains(i)) {
                    continue;
                }
                let w: Vec<usize> = wa.iter().chain(wb).copied().collect();
                let t: Vec<usize> = ta.iter().chain(tb).copied().collect();
                r.add_term(&w, &t, va.clone() * vb.clone())?;
            }
        }
        Ok(r)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if (self.dim, self.wedge_degree, self.tensor_arity) != (o.dim, o.wedge_degree, o.tensor_arity) {
            return Err(Error::shape("adding mixed tensors of different type"));
        }
        let mut r = self.clone();
        for ((w, t), v) in &o.coeffs {
            r.add_term(w, t, v.clone())?;
        }
        Ok(r)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut r = Self::zero(self.dim, self.wedge_degree, self.tensor_arity);
        for (k, v) in &self.coeffs {
            let p = v.clone() * s.clone();
            if !p.is_zero() {
                r.coeffs.insert(k.clone(), p);
            }
        }
        r
    }
}

/// `a ∧ b`.
pub fn wedge<S: Scalar>(a: &AlternatingForm<S>, b: &AlternatingForm<S>) -> Result<AlternatingForm<S>> {
    if a.dim != b.dim {
        return Err(Error::dims(a.dim, b.dim));
    }
    let mut r = AlternatingForm::zero(a.dim, a.degree + b.degree)?;
    for (ka, va) in &a.coeffs {
        for (kb, vb) in &b.coeffs {
            let idx: Vec<usize> = ka.iter().chain(kb).copied().collect();
            if let Some((key, sign)) = sort_with_sign(&idx) {
                r.accumulate(key, signed(va.clone() * vb.clone(), sign));
            }
        }
    }
    Ok(r)
}

/// `D₃(v₁∧v₂∧v₃) = v₂∧v₃ ⊗ v₁ − v₁∧v₃ ⊗ v₂ + v₁∧v₂ ⊗ v₃`.
pub fn d3<S: Scalar>(x: &AlternatingForm<S>) -> Result<MixedTensor<S>> {
    if x.degree != 3 {
        return Err(Error::shape(format!("D3 needs a degree 3 form, got degree {}", x.degree)));
    }
    let mut t = MixedTensor::zero(x.dim, 2, 1);
    for (k, v) in &x.coeffs {
        let (i, j, l) = (k[0], k[1], k[2]);
        t.add_term(&[j, l], &[i], v.clone())?;
        t.add_term(&[i, l], &[j], -v.clone())?;
        t.add_term(&[i, j], &[l], v.clone())?;
    }
    Ok(t)
}

fn minor<S: Scalar>(g: &Matrix<S>, rows: &[usize], cols: &[usize]) -> S {
    // Indices are 1-based.
    let r: Vec<usize> = rows.iter().map(|i| i - 1).collect();
    let c: Vec<usize> = cols.iter().map(|i| i - 1).collect();
    g.submatrix(&r, &c).det().expect("square minor")
}

/// Push-forward `g·x`.
pub fn gl_action<S: Scalar>(g: &Matrix<S>, x: &AlternatingForm<S>) -> Result<AlternatingForm<S>> {
    if !g.is_square() || g.rows() != x.dim {
        return Err(Error::dims(x.dim, g.rows()));
    }
    let targets = combinations(x.dim, x.degree);
    let mut r = AlternatingForm::zero(x.dim, x.degree)?;
    for (j, v) in &x.coeffs {
        for i in &targets {
            let m = minor(g, i, j);
            if !m.is_zero() {
                r.accumulate(i.clone(), v.clone() * m);
            }
        }
    }
    Ok(r)
}

/// Infinitesimal action `ρ(X)x`, a derivation over the slots.
pub fn lie_action<S: Scalar>(xm: &Matrix<S>, x: &AlternatingForm<S>) -> Result<AlternatingForm<S>> {
    if !xm.is_square() || xm.rows() != x.dim {
        return Err(Error::dims(x.dim, xm.rows()));
    }
    let mut r = AlternatingForm::zero(x.dim, x.degree)?;
    for (key, v) in &x.coeffs {
        for slot in 0..key.len() {
            let j = key[slot] - 1;
            for k in 0..x.dim {
                let a = &xm[(k, j)];
                if a.is_zero() {
                    continue;
                }
                let mut idx = key.clone();
                idx[slot] = k + 1;
                if let Some((sorted, sign)) = sort_with_sign(&idx) {
                    r.accumulate(sorted, signed(v.clone() * a.clone(), sign));
                }
            }
        }
    }
    Ok(r)
}

/// `x(u₁, …, u_d)` with `x` read as a multilinear function on `W*`.
pub fn evaluate<S: Scalar>(x: &AlternatingForm<S>, vectors: &[Vec<S>]) -> Result<S> {
    if vectors.len() != x.degree {
        return Err(Error::dims(x.degree, vectors.len()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != x.dim) {
        return Err(Error::dims(x.dim, v.len()));
    }
    let mut acc = S::zero();
    for (key, c) in &x.coeffs {
        let m = Matrix::from_fn(x.degree, x.degree, |r, s| vectors[s][key[r] - 1].clone());
        acc = acc + c.clone() * m.det()?;
    }
    Ok(acc)
}

/// The standard basis vector `f_i` (1-based) of length `n`.
pub fn unit_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i - 1] = S::one();
    v
}
