//! Extending partially specified real targets to semistable points on a
//! prescribed real orbit.
//!
//! Every returned form is re-classified exactly: the float coordinates are
//! converted to the dyadic rationals they represent and run through
//! [`classify_real`] over `ℚ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::invariants::{delta_case1_explicit, pfaffian};
use crate::multilinear::{combinations, sort_with_sign, AlternatingForm, FormShape};
use crate::orbit::{classify_real, RealOrbit};
use crate::scalar::{rational_from_f64, Rational};

/// Growth loops stop once a free coordinate exceeds this magnitude.
pub const GROWTH_CAP: f64 = 18_446_744_073_709_551_616.0;

/// Halvings tried for a single nudge before moving on.
const MAX_HALVINGS: usize = 60;

/// Below this a value counts as vanishing when deciding whether to nudge.
const VANISH: f64 = 1e-12;

/// Target values on the constrained indices of a case.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialTarget {
    shape: FormShape,
    values: BTreeMap<Vec<usize>, f64>,
}

/// Indices `I` constrained in the given case: all `I ⊂ {1, …, dim − 1}`.
pub fn constrained_indices(shape: FormShape) -> Vec<Vec<usize>> {
    match shape {
        FormShape::Case1 => combinations(5, 3),
        FormShape::Case2 => combinations(6, 3),
        FormShape::Case3 { n } => combinations(2 * n - 1, 2),
    }
}

fn dim_degree(shape: FormShape) -> (usize, usize) {
    match shape {
        FormShape::Case1 => (6, 3),
        FormShape::Case2 => (7, 3),
        FormShape::Case3 { n } => (2 * n, 2),
    }
}

impl PartialTarget {
    pub fn new(shape: FormShape, values: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        let want = constrained_indices(shape);
        if values.len() != want.len() || want.iter().any(|i| !values.contains_key(i)) {
            return Err(Error::shape(format!(
                "target must give exactly the {} constrained coefficients",
                want.len()
            )));
        }
        if values.values().any(|v| !v.is_finite()) {
            return Err(Error::invalid("target values must be finite"));
        }
        Ok(PartialTarget { shape, values })
    }

    pub fn from_values(shape: FormShape, values: &[f64]) -> Result<Self> {
        let idx = constrained_indices(shape);
        if idx.len() != values.len() {
            return Err(Error::dims(idx.len(), values.len()));
        }
        PartialTarget::new(shape, idx.into_iter().zip(values.iter().copied()).collect())
    }

    pub fn zero(shape: FormShape) -> Self {
        PartialTarget { shape, values: constrained_indices(shape).into_iter().map(|i| (i, 0.0)).collect() }
    }

    /// Restriction of `x` to the constrained indices.
    pub fn restrict(x: &AlternatingForm<f64>) -> Result<Self> {
        let shape = x.shape()?;
        Ok(PartialTarget { shape, values: constrained_indices(shape).into_iter().map(|i| { let v = x.get(&i); (i, v) }).collect() })
    }

    pub fn shape(&self) -> FormShape {
        self.shape
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values.get(idx).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.values.iter()
    }

    /// `max_I |y_I − z_I|` over the constrained indices.
    pub fn deviation(&self, z: &AlternatingForm<f64>) -> f64 {
        self.values.iter().fold(0.0, |m, (i, v)| m.max((v - z.get(i)).abs()))
    }

    fn to_form(&self) -> AlternatingForm<f64> {
        let (dim, degree) = dim_degree(self.shape);
        let mut z = AlternatingForm::zero(dim, degree).expect("valid shape");
        for (i, v) in &self.values {
            z.insert_strict(i, *v).expect("sorted indices");
        }
        z
    }
}

/// Requested orbit in case 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case1Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationCertificate {
    pub form: AlternatingForm<f64>,
    pub deviation: f64,
    /// Named auxiliary polynomial values at the output.
    pub auxiliaries: Vec<(String, f64)>,
    pub requested: RealOrbit,
    /// Exact classification of the output.
    pub orbit: RealOrbit,
    /// Iterations spent in growth loops.
    pub growth_steps: usize,
}

impl PerturbationCertificate {
    pub fn auxiliary(&self, name: &str) -> Option<f64> {
        self.auxiliaries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn holds(&self, epsilon: f64) -> bool {
        self.deviation < epsilon && self.orbit == self.requested
    }
}

/// The dyadic rational form equal to a float form.
pub fn to_exact(z: &AlternatingForm<f64>) -> Result<AlternatingForm<Rational>> {
    let mut out = AlternatingForm::zero(z.dim(), z.degree())?;
    for (i, v) in z.iter() {
        let q = rational_from_f64(*v).ok_or_else(|| Error::invalid("non-finite coefficient"))?;
        out.insert_strict(i, q)?;
    }
    Ok(out)
}

/// Exact orbit of a float form.
pub fn exact_orbit(z: &AlternatingForm<f64>) -> Result<RealOrbit> {
    Ok(classify_real(&to_exact(z)?, 0.0)?.real_orbit)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("epsilon must be positive"))
    }
}

fn set(z: &mut AlternatingForm<f64>, idx: &[usize], v: f64) {
    z.insert_strict(idx, v).expect("sorted indices");
}

/// Adds `±δ` to `z_idx`, `δ = ε/2` halved until `|f(z)| > VANISH`, keeping the
/// sign of `δ` that gives the larger `|f|`. Returns `false` if no step works.
fn nudge(z: &mut AlternatingForm<f64>, idx: &[usize], epsilon: f64, f: impl Fn(&AlternatingForm<f64>) -> f64) -> bool {
    let base = z.get(idx);
    let mut delta = epsilon / 2.0;
    for _ in 0..MAX_HALVINGS {
        let mut best: Option<(f64, f64)> = None;
        for s in [delta, -delta] {
            set(z, idx, base + s);
            let v = f(z).abs();
            if v > VANISH && best.is_none_or(|(_, b)| v > b) {
                best = Some((s, v));
            }
        }
        if let Some((s, _)) = best {
            set(z, idx, base + s);
            return true;
        }
        delta /= 2.0;
    }
    set(z, idx, base);
    false
}

/// `Δ(z)` as `A·t² + B·t + C` in `t = z₄₅₆`.
pub fn case1_quadratic(z: &AlternatingForm<f64>) -> Result<(f64, f64, f64)> {
    let mut p = z.clone();
    let mut at = |t: f64| -> Result<f64> {
        set(&mut p, &[4, 5, 6], t);
        delta_case1_explicit(&p)
    };
    let (c, plus, minus) = (at(0.0)?, at(1.0)?, at(-1.0)?);
    Ok(((plus + minus) / 2.0 - c, (plus - minus) / 2.0, c))
}

/// Discriminant `B² − 4AC` of [`case1_quadratic`].
pub fn case1_discriminant(z: &AlternatingForm<f64>) -> Result<f64> {
    let (a, b, c) = case1_quadratic(z)?;
    Ok(b * b - 4.0 * a * c)
}

/// `(f₁, f₂, f₃, f₄)` with discriminant `f₁·z₁₅₆z₂₄₆ + f₂·z₁₅₆ + f₃·z₂₄₆ + f₄`,
/// fitted from four probes of `(z₁₅₆, z₂₄₆)` with the other coordinates fixed.
pub fn case1_discriminant_fit(z: &AlternatingForm<f64>) -> Result<[f64; 4]> {
    let mut p = z.clone();
    let mut at = |u: f64, v: f64| -> Result<f64> {
        set(&mut p, &[1, 5, 6], u);
        set(&mut p, &[2, 4, 6], v);
        case1_discriminant(&p)
    };
    let (d00, d10, d01, d11) = (at(0.0, 0.0)?, at(1.0, 0.0)?, at(0.0, 1.0)?, at(1.0, 1.0)?);
    Ok([d11 - d10 - d01 + d00, d10 - d00, d01 - d00, d00])
}

/// Closed form of the bilinear coefficient when `z_{ij6} = 0` off
/// `(1,5), (2,4), (4,5)`: `16z₁₂₃²(z₁₂₃z₃₄₅ + z₁₃₅z₂₃₄ − z₁₃₄z₂₃₅)`.
pub fn case1_f1(z: &AlternatingForm<f64>) -> f64 {
    let a = z.get(&[1, 2, 3]);
    16.0 * a * a * case1_bracket(z)
}

fn case1_bracket(z: &AlternatingForm<f64>) -> f64 {
    let c = |i, j, k| z.get(&[i, j, k]);
    c(1, 2, 3) * c(3, 4, 5) + c(1, 3, 5) * c(2, 3, 4) - c(1, 3, 4) * c(2, 3, 5)
}

/// Moves `z₁₂₃` away from zero by `ε/2` in the direction of `y₁₂₃`.
fn push_z123(z: &mut AlternatingForm<f64>, epsilon: f64) {
    let a = z.get(&[1, 2, 3]);
    let s = if a < 0.0 { -1.0 } else { 1.0 };
    set(z, &[1, 2, 3], a + s * epsilon / 2.0);
}

pub fn extend_case1(y: &PartialTarget, epsilon: f64, sign: Case1Sign) -> Result<PerturbationCertificate> {
    check_epsilon(epsilon)?;
    if y.shape != FormShape::Case1 {
        return Err(Error::shape("case 1 target expected"));
    }
    let mut z = y.to_form();
    let requested = match sign {
        Case1Sign::Positive => RealOrbit::Case1Positive,
        Case1Sign::Negative => RealOrbit::Case1Negative,
    };
    let mut steps = 0;
    let mut aux = Vec::new();
    match sign {
        Case1Sign::Positive => {
            if z.get(&[1, 2, 3]).abs() <= VANISH {
                push_z123(&mut z, epsilon);
            }
            let (a, b, c) = case1_quadratic(&z)?;
            let mut t = 1.0f64.max(b.abs()).max(c.abs());
            loop {
                set(&mut z, &[4, 5, 6], t);
                if exact_orbit(&z)? == requested {
                    break;
                }
                t *= 2.0;
                steps += 1;
                if t > GROWTH_CAP {
                    return Err(Error::domain("z456 growth exceeded its cap"));
                }
            }
            aux.push((String::from("leading_coefficient"), a));
            aux.push((String::from("delta"), delta_case1_explicit(&z)?));
        }
        Case1Sign::Negative => {
            if z.get(&[1, 2, 3]).abs() <= VANISH {
                push_z123(&mut z, epsilon);
            }
            if case1_f1(&z).abs() <= VANISH {
                let ok = [[3, 4, 5], [1, 3, 5], [2, 3, 4], [1, 3, 4], [2, 3, 5]]
                    .iter()
                    .any(|idx| nudge(&mut z, idx, epsilon, case1_f1));
                if !ok {
                    return Err(Error::domain("could not make f1 nonzero"));
                }
            }
            let f1 = case1_f1(&z);
            let s = if f1 > 0.0 { 1.0 } else { -1.0 };
            let mut m = 1.0f64;
            loop {
                set(&mut z, &[2, 4, 6], m);
                set(&mut z, &[1, 5, 6], s * m);
                set(&mut z, &[4, 5, 6], 0.0);
                let (a, b, _) = case1_quadratic(&z)?;
                set(&mut z, &[4, 5, 6], -b / (2.0 * a));
                if case1_discriminant(&z)? > 0.0 && exact_orbit(&z)? == requested {
                    break;
                }
                m *= 2.0;
                steps += 1;
                if m > GROWTH_CAP {
                    return Err(Error::domain("z156 growth exceeded its cap"));
                }
            }
            let fit = case1_discriminant_fit(&z)?;
            for (name, v) in ["f1", "f2", "f3", "f4"].iter().zip(fit) {
                aux.push((String::from(*name), v));
            }
            aux.push((String::from("discriminant"), case1_discriminant(&z)?));
            aux.push((String::from("delta"), delta_case1_explicit(&z)?));
        }
    }
    finish(y, z, aux, requested, steps)
}

fn finish(
    y: &PartialTarget,
    z: AlternatingForm<f64>,
    auxiliaries: Vec<(String, f64)>,
    requested: RealOrbit,
    growth_steps: usize,
) -> Result<PerturbationCertificate> {
    let orbit = exact_orbit(&z)?;
    Ok(PerturbationCertificate { deviation: y.deviation(&z), form: z, auxiliaries, requested, orbit, growth_steps })
}

/// `Σ sgn(perm) Π z_{head ∪ pair}` over ordered partitions of `rest` into pairs
/// `j < k` (each unordered partition counted `pairs!` times).
fn pair_sum(z: &AlternatingForm<f64>, head: &[usize], rest: &[usize], tail: &[usize]) -> f64 {
    fn rec(left: &[usize], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(acc.clone());
            return;
        }
        for a in 0..left.len() {
            for b in a + 1..left.len() {
                let mut rem = left.to_vec();
                let (ja, jb) = (left[a], left[b]);
                rem.retain(|&v| v != ja && v != jb);
                acc.push(ja);
                acc.push(jb);
                rec(&rem, acc, out);
                acc.truncate(acc.len() - 2);
            }
        }
    }
    let mut seqs = Vec::new();
    rec(rest, &mut Vec::new(), &mut seqs);
    let mut total = 0.0;
    for s in seqs {
        let (_, sign) = sort_with_sign(&s).expect("distinct");
        let mut prod = sign as f64;
        for p in s.chunks(2) {
            let mut idx: Vec<usize> = head.iter().chain(p.iter()).chain(tail.iter()).copied().collect();
            idx.sort_unstable();
            prod *= z.get(&idx);
        }
        total += prod;
    }
    total
}

/// Sum over `I₁`: `Σ sgn · z₁ⱼₖ z₁ⱼ'ₖ' z₁ⱼ''ₖ''`, `{j, …, k''} = {2, …, 7}`.
pub fn case2_f1(z: &AlternatingForm<f64>) -> f64 {
    pair_sum(z, &[1], &[2, 3, 4, 5, 6, 7], &[])
}

/// Sum over `I₂`: `Σ sgn · zᵢⱼ₇ zᵢ'ⱼ'₇ zᵢ''ⱼ''₇`, `{i, …, j''} = {1, …, 6}`.
pub fn case2_f2(z: &AlternatingForm<f64>) -> f64 {
    pair_sum(z, &[], &[1, 2, 3, 4, 5, 6], &[7])
}

/// Sum over `I₃`: `Σ sgn · z₁ⱼₖ z₁ⱼ'ₖ'`, `{j, k, j', k'} = {3, 4, 5, 6}`.
pub fn case2_f3(z: &AlternatingForm<f64>) -> f64 {
    pair_sum(z, &[1], &[3, 4, 5, 6], &[])
}

pub fn extend_case2(y: &PartialTarget, epsilon: f64) -> Result<PerturbationCertificate> {
    check_epsilon(epsilon)?;
    if y.shape != FormShape::Case2 {
        return Err(Error::shape("case 2 target expected"));
    }
    let requested = RealOrbit::Case2Split;
    let mut z = y.to_form();
    if case2_f3(&z).abs() <= VANISH {
        let order = [[1, 3, 4], [1, 5, 6], [1, 3, 5], [1, 4, 6], [1, 3, 6], [1, 4, 5]];
        let mut ok = false;
        for idx in &order {
            if nudge(&mut z, idx, epsilon, case2_f3) {
                ok = true;
                break;
            }
            // no single step helps yet: move this coordinate anyway so later
            // products pick it up
            let v = z.get(idx);
            set(&mut z, idx, v + epsilon / 2.0);
        }
        if !ok {
            return Err(Error::domain("could not make f3 nonzero"));
        }
    }
    let f3 = case2_f3(&z);
    let s = if f3 > 0.0 { 1.0 } else { -1.0 };
    let mut steps = 0;
    let mut t = 1.0f64;
    loop {
        set(&mut z, &[1, 2, 7], s * t);
        set(&mut z, &[3, 4, 7], 1.0);
        set(&mut z, &[5, 6, 7], -s);
        if case2_f1(&z) > 0.0 && case2_f2(&z) < 0.0 {
            break;
        }
        t *= 2.0;
        steps += 1;
        if t > GROWTH_CAP {
            return Err(Error::domain("z127 growth exceeded its cap"));
        }
    }
    if exact_orbit(&z)? != requested {
        // the slice may lie in the degenerate locus: move the remaining free
        // coordinates z_{ij7}, then constrained ones by at most ε/4, one at a
        // time, keeping f1 > 0 > f2
        let signs_hold = |z: &AlternatingForm<f64>| case2_f1(z) > 0.0 && case2_f2(z) < 0.0;
        let mut moves: Vec<(Vec<usize>, f64)> = combinations(6, 2)
            .into_iter()
            .filter(|p| !matches!(p.as_slice(), [1, 2] | [3, 4] | [5, 6]))
            .map(|p| (vec![p[0], p[1], 7], 0.5))
            .collect();
        moves.extend(constrained_indices(FormShape::Case2).into_iter().map(|i| (i, epsilon / 4.0)));
        let mut done = false;
        'outer: for (key, start) in moves {
            let base = z.get(&key);
            let mut eta = start;
            let mut kept = base;
            'halve: for _ in 0..MAX_HALVINGS {
                for v in [base + eta, base - eta] {
                    set(&mut z, &key, v);
                    steps += 1;
                    if signs_hold(&z) {
                        if exact_orbit(&z)? == requested {
                            done = true;
                            break 'outer;
                        }
                        kept = v;
                        break 'halve;
                    }
                }
                eta /= 2.0;
            }
            set(&mut z, &key, kept);
        }
        if !done {
            return Err(Error::domain("could not leave the degenerate locus"));
        }
    }
    let aux = vec![
        (String::from("f1"), case2_f1(&z)),
        (String::from("f2"), case2_f2(&z)),
        (String::from("f3"), case2_f3(&z)),
    ];
    finish(y, z, aux, requested, steps)
}

pub fn extend_case3(y: &PartialTarget, epsilon: f64) -> Result<PerturbationCertificate> {
    check_epsilon(epsilon)?;
    let FormShape::Case3 { n } = y.shape else {
        return Err(Error::shape("case 3 target expected"));
    };
    let requested = RealOrbit::Case3Nondegenerate;
    let top = 2 * n;
    let mut z = y.to_form();
    // pf is linear in the last column; its coefficients are signed Pfaffians of
    // the principal minors of y
    let coeffs = |z: &AlternatingForm<f64>| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(top - 1);
        for i in 1..top {
            let mut p = z.clone();
            for j in 1..top {
                set(&mut p, &[j, top], if j == i { 1.0 } else { 0.0 });
            }
            out.push(pfaffian(&p)?);
        }
        Ok(out)
    };
    let mut c = coeffs(&z)?;
    let best = |c: &[f64]| c.iter().enumerate().fold((0, 0.0f64), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
    let mut steps = 0;
    if best(&c).1 <= VANISH {
        // perturb by δ·(e₁₂ + e₃₄ + ⋯) on the first 2n − 2 indices
        let mut delta = epsilon / 2.0;
        let base = z.clone();
        loop {
            z = base.clone();
            for k in 1..n {
                let idx = [2 * k - 1, 2 * k];
                let v = z.get(&idx);
                set(&mut z, &idx, v + delta);
            }
            c = coeffs(&z)?;
            if best(&c).1 > VANISH {
                break;
            }
            delta /= 2.0;
            steps += 1;
            if steps > MAX_HALVINGS {
                return Err(Error::domain("could not make the Pfaffian nonzero"));
            }
        }
    }
    let (i, _) = best(&c);
    let mut scale = 1.0f64;
    loop {
        for j in 1..top {
            set(&mut z, &[j, top], if j == i + 1 { scale } else { 0.0 });
        }
        if exact_orbit(&z)? == requested {
            break;
        }
        scale *= 2.0;
        steps += 1;
        if scale > GROWTH_CAP {
            return Err(Error::domain("free column growth exceeded its cap"));
        }
    }
    let aux = vec![(String::from("pfaffian"), pfaffian(&z)?)];
    finish(y, z, aux, requested, steps)
}
