//! Orbit representatives and explicit group elements.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;


use crate::error::{Error, Result};
use crate::invariants::delta_case1;
use crate::linalg::Matrix;
use crate::multilinear::{gl_action, AlternatingForm};
use crate::scalar::{rat, QuadExt, Rational, Scalar};

/// Named representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepName {
    /// `e₁₂₃ + e₄₅₆`
    Case1W,
    /// `e₁₂₃ − e₁₅₆ + e₂₄₆ − e₃₄₅`
    Case1W1,
    /// `e₁₂₃ + d(e₁₅₆ − e₂₄₆ + e₃₄₅)`, the image of `w` under [`g_alpha`].
    Case1WAlpha(i64),
    /// `e₂₃₄ + e₅₆₇ + e₁₂₅ + e₁₃₆ + e₁₄₇`
    Case2W,
    /// `e₂₃₄ + e₃₄₆ + e₁₂₇ − e₁₄₅`, a point with degenerate `Q`.
    Case2WPrime,
    /// `−2(e₁₄₅ − e₁₆₇ + e₃₄₇ − e₃₅₆ + e₁₂₃ + e₂₄₆ + e₂₅₇)`, the real point with
    /// definite `Q` and `Δ = 2⁹·6`; see [`fixtures::case2_g1`].
    Case2W1,
    /// `e_{1,n+1} + ⋯ + e_{n,2n}`
    Case3W(usize),
}

impl RepName {
    pub const TAGS: [&'static str; 7] = [
        "case1_w",
        "case1_w1",
        "case1_walpha",
        "case2_w",
        "case2_wprime",
        "case2_w1",
        "case3_w",
    ];

    /// Parses a tag, taking `d` for `case1_walpha` and `n` for `case3_w`.
    pub fn parse(tag: &str, d: Option<i64>, n: Option<usize>) -> Result<Self> {
        let need = |what: &str| Error::invalid(format!("{tag} needs --{what}"));
        let r = match tag {
            "case1_w" => RepName::Case1W,
            "case1_w1" => RepName::Case1W1,
            "case1_walpha" => RepName::Case1WAlpha(d.ok_or_else(|| need("d"))?),
            "case2_w" => RepName::Case2W,
            "case2_wprime" => RepName::Case2WPrime,
            "case2_w1" => RepName::Case2W1,
            "case3_w" => RepName::Case3W(n.ok_or_else(|| need("n"))?),
            other => return Err(Error::invalid(format!("unknown representative {other}"))),
        };
        r.validate()?;
        Ok(r)
    }

    fn validate(self) -> Result<()> {
        match self {
            RepName::Case1WAlpha(d) => QuadExt::sqrt_d(d).map(|_| ()),
            RepName::Case3W(0) => Err(Error::invalid("n must be at least 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RepName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepName::Case1W => f.write_str("case1_w"),
            RepName::Case1W1 => f.write_str("case1_w1"),
            RepName::Case1WAlpha(d) => write!(f, "case1_walpha({d})"),
            RepName::Case2W => f.write_str("case2_w"),
            RepName::Case2WPrime => f.write_str("case2_wprime"),
            RepName::Case2W1 => f.write_str("case2_w1"),
            RepName::Case3W(n) => write!(f, "case3_w({n})"),
        }
    }
}

impl FromStr for RepName {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) form, e.g. `case1_walpha(2)`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(open) = s.find('(') {
            let tag = &s[..open];
            let arg = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::invalid(format!("malformed representative {s}")))?;
            let bad = |_| Error::invalid(format!("malformed parameter in {s}"));
            return match tag {
                "case1_walpha" => RepName::parse(tag, Some(arg.parse().map_err(bad)?), None),
                "case3_w" => RepName::parse(tag, None, Some(arg.parse().map_err(bad)?)),
                _ => Err(Error::invalid(format!("{tag} takes no parameter"))),
            };
        }
        RepName::parse(s, None, None)
    }
}

/// The representative as an exact form.
pub fn make_rep(name: RepName) -> Result<AlternatingForm<Rational>> {
    name.validate()?;
    match name {
        RepName::Case1W => AlternatingForm::from_int_terms(6, 3, &[(&[1, 2, 3], 1), (&[4, 5, 6], 1)]),
        RepName::Case1W1 => AlternatingForm::from_int_terms(
            6,
            3,
            &[(&[1, 2, 3], 1), (&[1, 5, 6], -1), (&[2, 4, 6], 1), (&[3, 4, 5], -1)],
        ),
        RepName::Case1WAlpha(d) => AlternatingForm::from_int_terms(
            6,
            3,
            &[(&[1, 2, 3], 1), (&[1, 5, 6], d), (&[2, 4, 6], -d), (&[3, 4, 5], d)],
        ),
        RepName::Case2W => AlternatingForm::from_int_terms(
            7,
            3,
            &[(&[2, 3, 4], 1), (&[5, 6, 7], 1), (&[1, 2, 5], 1), (&[1, 3, 6], 1), (&[1, 4, 7], 1)],
        ),
        RepName::Case2WPrime => AlternatingForm::from_int_terms(
            7,
            3,
            &[(&[2, 3, 4], 1), (&[3, 4, 6], 1), (&[1, 2, 7], 1), (&[1, 4, 5], -1)],
        ),
        RepName::Case2W1 => AlternatingForm::from_int_terms(
            7,
            3,
            &[
                (&[1, 4, 5], -2),
                (&[1, 6, 7], 2),
                (&[3, 4, 7], -2),
                (&[3, 5, 6], 2),
                (&[1, 2, 3], -2),
                (&[2, 4, 6], -2),
                (&[2, 5, 7], -2),
            ],
        ),
        RepName::Case3W(n) => {
            let terms: Vec<(Vec<usize>, Rational)> =
                (1..=n).map(|i| (alloc::vec![i, n + i], rat(1, 1))).collect();
            AlternatingForm::from_terms(2 * n, 2, terms)
        }
    }
}

/// `τ`, exchanging `e_i` and `e_{i+3}`.
pub fn tau<S: Scalar>() -> Matrix<S> {
    let mut t = Matrix::zeros(6, 6);
    for i in 0..3 {
        t[(i, i + 3)] = S::one();
        t[(i + 3, i)] = S::one();
    }
    t
}

/// Block diagonal `d(A, B)`.
pub fn d_ab<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    if !a.is_square() || !b.is_square() || a.rows() != 3 || b.rows() != 3 {
        return Err(Error::shape("d(A, B) needs two 3x3 blocks"));
    }
    Ok(Matrix::block_diag(a, b))
}

/// The element of `GL(6, ℚ(√d))` with `g·w = w_α` (`α = √d`), `g^σ = g·τ` and
/// `g·τ·g⁻¹ = diag(I₃, −I₃)`.
///
/// Columns: `(e₁+αe₄)/2, e₂+αe₅, e₃+αe₆, (e₁−αe₄)/2, e₂−αe₅, e₃−αe₆`, so
/// `det g = −2α³`.
pub fn g_alpha(d: i64) -> Result<Matrix<QuadExt>> {
    let alpha = QuadExt::sqrt_d(d)?;
    let one = QuadExt::one();
    let half = QuadExt::from_ratio(1, 2);
    let mut g = Matrix::zeros(6, 6);
    for (col, sign) in [(0usize, 1i64), (3, -1)] {
        let s = QuadExt::from_int(sign);
        for k in 0..3 {
            let scale = if k == 0 { half.clone() } else { one.clone() };
            g[(k, col + k)] = scale.clone();
            g[(k + 3, col + k)] = scale * s.clone() * alpha.clone();
        }
    }
    Ok(g)
}

/// Entry-wise Galois conjugate.
pub fn conj_matrix(m: &Matrix<QuadExt>) -> Matrix<QuadExt> {
    m.map(QuadExt::conj)
}

/// Rational matrix from one over `ℚ(√d)` whose entries are all rational.
pub fn rational_part(m: &Matrix<QuadExt>) -> Option<Matrix<Rational>> {
    if m.entries().iter().all(QuadExt::is_rational) {
        Some(m.map(|v| v.a.clone()))
    } else {
        None
    }
}

pub fn embed_rational(m: &Matrix<Rational>) -> Matrix<QuadExt> {
    m.map(|q| QuadExt::rational(q.clone()))
}

pub fn embed_form(x: &AlternatingForm<Rational>) -> AlternatingForm<QuadExt> {
    x.map_scalars(|q| QuadExt::rational(q.clone()))
}

/// `g_α·d(A, A^σ)·g_α⁻¹`, a rational element of the stabilizer of `w_α`.
pub fn stabilizer_witness_case1(a: &Matrix<QuadExt>, d: i64) -> Result<Matrix<Rational>> {
    if !a.is_square() || a.rows() != 3 {
        return Err(Error::shape("A must be 3x3"));
    }
    for v in a.entries() {
        QuadExt::sqrt_d(d)?.checked_d(v)?;
    }
    if !a.det()?.is_one() {
        return Err(Error::Precondition("det A must be 1".to_string()));
    }
    let g = g_alpha(d)?;
    let ginv = g.inverse(None)?.expect("g_alpha is invertible");
    let m = g.mul(&d_ab(a, &conj_matrix(a))?).mul(&ginv);
    let r = rational_part(&m);
    assert!(r.is_some(), "conjugation-invariant product has irrational entries");
    Ok(r.expect("checked"))
}

/// Generators of `Sp(2n, ℤ)` preserving `e_{1,n+1} + ⋯ + e_{n,2n}`:
/// `I + E_{i,n+i}`, `I + E_{n+i,i}`, `I + E_{i,n+j} + E_{j,n+i}`,
/// `I + E_{n+i,j} + E_{n+j,i}` and `diag(I + E_ij, I − E_ji)`.
pub fn symplectic_generators(n: usize) -> Vec<Matrix<Rational>> {
    let mut gens = Vec::new();
    let one = rat(1, 1);
    let id = Matrix::<Rational>::identity(2 * n);
    for i in 0..n {
        let mut a = id.clone();
        a[(i, n + i)] = one.clone();
        gens.push(a);
        let mut b = id.clone();
        b[(n + i, i)] = one.clone();
        gens.push(b);
        for j in 0..n {
            if j == i {
                continue;
            }
            if i < j {
                let mut c = id.clone();
                c[(i, n + j)] = one.clone();
                c[(j, n + i)] = one.clone();
                gens.push(c);
                let mut e = id.clone();
                e[(n + i, j)] = one.clone();
                e[(n + j, i)] = one.clone();
                gens.push(e);
            }
            let mut m = id.clone();
            m[(i, j)] = one.clone();
            m[(n + j, n + i)] = -one.clone();
            gens.push(m);
        }
    }
    gens
}

/// `Δ(w_α)` computed, for reporting next to the expected `64α²`.
pub fn delta_walpha(d: i64) -> Result<Rational> {
    delta_case1(&make_rep(RepName::Case1WAlpha(d))?)
}

/// Fixed test data.
pub mod fixtures {
    use super::*;

    /// The `7×7` matrix over `ℚ(√−1)` relating the split and the definite
    /// real forms of `∧³k⁷`; `det g₁ = −8`, and `(2⁹, −g₁/8)·w` is
    /// [`RepName::Case2W1`].
    pub fn case2_g1() -> Matrix<QuadExt> {
        let i = QuadExt::sqrt_d(-1).expect("-1 is squarefree");
        let z = QuadExt::zero();
        let p = QuadExt::one();
        let m = -QuadExt::one();
        let ni = -i.clone();
        let rows = alloc::vec![
            alloc::vec![z.clone(), m.clone(), z.clone(), z.clone(), m.clone(), z.clone(), z.clone()],
            alloc::vec![i.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            alloc::vec![z.clone(), i.clone(), z.clone(), z.clone(), ni.clone(), z.clone(), z.clone()],
            alloc::vec![z.clone(), z.clone(), p.clone(), z.clone(), z.clone(), p.clone(), z.clone()],
            alloc::vec![z.clone(), z.clone(), z.clone(), m.clone(), z.clone(), z.clone(), m.clone()],
            alloc::vec![z.clone(), z.clone(), i.clone(), z.clone(), z.clone(), ni.clone(), z.clone()],
            alloc::vec![z.clone(), z.clone(), z.clone(), ni, z.clone(), z.clone(), i],
        ];
        Matrix::from_rows(rows).expect("7x7")
    }

    /// The scalar `t = 2⁹` and `g = −g₁/8` with `(t, g)·w = w₁`.
    pub fn case2_w1_element() -> (QuadExt, Matrix<QuadExt>) {
        let t = QuadExt::from_int(512);
        let g = case2_g1().scale(&QuadExt::from_ratio(-1, 8));
        (t, g)
    }
}

/// `(t, g)·x = t·(g·x)`.
pub fn scaled_action<S: Scalar>(t: &S, g: &Matrix<S>, x: &AlternatingForm<S>) -> Result<AlternatingForm<S>> {
    Ok(gl_action(g, x)?.scale(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{delta_case2, pfaffian, DeltaValue};

    use proptest::prelude::*;

    fn qx(a: i64, b: i64, d: i64) -> QuadExt {
        QuadExt::new(rat(a, 1), rat(b, 1), d).unwrap()
    }

    #[test]
    fn rep_examples() {
        let w = make_rep(RepName::Case1W).unwrap();
        assert_eq!(w.len(), 2);
        let wa = make_rep(RepName::Case1WAlpha(2)).unwrap();
        assert_eq!(wa.get(&[1, 5, 6]), rat(2, 1));
        assert_eq!(wa.get(&[2, 4, 6]), rat(-2, 1));
        let w3 = make_rep(RepName::Case3W(2)).unwrap();
        assert_eq!(w3, AlternatingForm::from_int_terms(4, 2, &[(&[1, 3], 1), (&[2, 4], 1)]).unwrap());
        assert!(RepName::parse("case1_walpha", Some(4), None).is_err());
        assert!(RepName::parse("case1_walpha", None, None).is_err());
        assert!(RepName::parse("case3_w", None, Some(0)).is_err());
        assert_eq!("case1_walpha(-1)".parse::<RepName>().unwrap(), RepName::Case1WAlpha(-1));
        assert_eq!("case2_w1".parse::<RepName>().unwrap(), RepName::Case2W1);
        // w₁ is w_α at α² = −1
        assert_eq!(make_rep(RepName::Case1W1).unwrap(), make_rep(RepName::Case1WAlpha(-1)).unwrap());
    }

    #[test]
    fn g_alpha_properties() {
        for d in [-1i64, 2, 3, 5] {
            let g = g_alpha(d).unwrap();
            let w = embed_form(&make_rep(RepName::Case1W).unwrap());
            let wa = embed_form(&make_rep(RepName::Case1WAlpha(d)).unwrap());
            assert_eq!(gl_action(&g, &w).unwrap(), wa);
            assert_eq!(conj_matrix(&g), g.mul(&tau()));
            let ginv = g.inverse(None).unwrap().unwrap();
            let diag = Matrix::diagonal(&[1, 1, 1, -1, -1, -1].map(QuadExt::from_int));
            assert_eq!(g.mul(&tau()).mul(&ginv), diag);
            // det g = −2α³ = −2d·α
            assert_eq!(g.det().unwrap(), qx(0, -2 * d, d));
        }
        assert!(g_alpha(9).is_err());
    }

    #[test]
    fn walpha_delta_is_four_d_cubed() {
        for d in [-1i64, 2, 3, 5] {
            assert_eq!(delta_walpha(d).unwrap(), rat(4 * d * d * d, 1));
        }
    }

    #[test]
    fn stabilizer_witness_examples() {
        let id = Matrix::<QuadExt>::identity(3);
        assert_eq!(stabilizer_witness_case1(&id, 2).unwrap(), Matrix::identity(6));
        let mut a = Matrix::<QuadExt>::identity(3);
        a[(0, 1)] = QuadExt::sqrt_d(2).unwrap();
        let s = stabilizer_witness_case1(&a, 2).unwrap();
        let wa = make_rep(RepName::Case1WAlpha(2)).unwrap();
        assert_eq!(gl_action(&s, &wa).unwrap(), wa);
        assert_ne!(s, Matrix::identity(6));
        let mut bad = Matrix::<QuadExt>::identity(3);
        bad[(0, 0)] = QuadExt::from_int(2);
        assert!(matches!(stabilizer_witness_case1(&bad, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn tau_fixes_w() {
        let w = make_rep(RepName::Case1W).unwrap();
        assert_eq!(gl_action(&tau(), &w).unwrap(), w);
    }

    #[test]
    fn case2_w1_from_g1() {
        let g1 = fixtures::case2_g1();
        assert_eq!(g1.det().unwrap(), QuadExt::from_int(-8));
        let w = embed_form(&make_rep(RepName::Case2W).unwrap());
        let (t, g) = fixtures::case2_w1_element();
        let w1 = scaled_action(&t, &g, &w).unwrap();
        assert_eq!(w1, embed_form(&make_rep(RepName::Case2W1).unwrap()));
        assert_eq!(
            delta_case2(&make_rep(RepName::Case2W1).unwrap()).unwrap(),
            DeltaValue::Exact(rat(3072, 1))
        );
    }

    #[test]
    fn symplectic_generators_fix_w() {
        for n in 1..=3 {
            let w = make_rep(RepName::Case3W(n)).unwrap();
            for s in symplectic_generators(n) {
                assert_eq!(gl_action(&s, &w).unwrap(), w);
                assert_eq!(s.det().unwrap(), rat(1, 1));
            }
            assert!(!pfaffian(&w).unwrap().is_zero());
        }
    }

    fn arb_unimodular3() -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec((0usize..3, 0usize..3, -2i64..3), 1..8).prop_map(|ops| {
            let mut m = Matrix::<Rational>::identity(3);
            for (i, j, s) in ops {
                if i == j {
                    continue;
                }
                let mut e = Matrix::identity(3);
                e[(i, j)] = rat(s, 1);
                m = m.mul(&e);
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn d_ab_fixes_w(a in arb_unimodular3(), b in arb_unimodular3()) {
            let w = make_rep(RepName::Case1W).unwrap();
            prop_assert_eq!(gl_action(&d_ab(&a, &b).unwrap(), &w).unwrap(), w);
        }

        #[test]
        fn random_symplectic_words_fix_w(word in proptest::collection::vec(any::<prop::sample::Index>(), 1..10)) {
            let n = 3;
            let gens = symplectic_generators(n);
            let mut g = Matrix::<Rational>::identity(2 * n);
            for ix in word {
                g = g.mul(&gens[ix.index(gens.len())]);
            }
            let w = make_rep(RepName::Case3W(n)).unwrap();
            prop_assert_eq!(gl_action(&g, &w).unwrap(), w);
        }

        #[test]
        fn witness_is_rational_and_fixes(entries in proptest::collection::vec((-2i64..3, -2i64..3), 2)) {
            // A = [[1, u, 0], [0, 1, v], [0, 0, 1]] with u, v ∈ ℚ(√3)
            let d = 3;
            let mut a = Matrix::<QuadExt>::identity(3);
            a[(0, 1)] = qx(entries[0].0, entries[0].1, d);
            a[(1, 2)] = qx(entries[1].0, entries[1].1, d);
            let s = stabilizer_witness_case1(&a, d).unwrap();
            let wa = make_rep(RepName::Case1WAlpha(d)).unwrap();
            prop_assert_eq!(gl_action(&s, &wa).unwrap(), wa);
        }
    }
}
