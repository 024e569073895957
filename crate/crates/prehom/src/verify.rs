//! Golden identities, each recomputed from scratch and compared exactly.

use prehom_core::invariants::{delta_case1, delta_case2, q_case2, DeltaValue, QuadraticForm};
use prehom_core::lie::{case1, fixed_space, stab_lie_algebra};
use prehom_core::octonion::{c_form, split_imaginary_basis, split_octonions};
use prehom_core::representatives::{g_alpha, make_rep, RepName};
use prehom_core::scalar::rat;
use prehom_core::{AlternatingForm, QuadExt, Rational, Scalar};
use serde::Serialize;

use crate::format::{index_key, rational_to_string};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenRow {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<GoldenRow>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn row(&self, name: &str) -> Option<&GoldenRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

fn row(name: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>, pass: bool) -> GoldenRow {
    GoldenRow { name: name.into(), expected: expected.into(), computed: computed.into(), pass }
}

pub fn quad_to_string(v: &QuadExt) -> String {
    let a = rational_to_string(&v.a);
    if v.is_rational() {
        return a;
    }
    let b = rational_to_string(&v.b);
    let root = format!("√{}", v.d);
    let b_part = match b.as_str() {
        "1" => root,
        "-1" => format!("-{root}"),
        _ => format!("{b}{root}"),
    };
    if a == "0" {
        b_part
    } else if let Some(rest) = b_part.strip_prefix('-') {
        format!("{a} - {rest}")
    } else {
        format!("{a} + {b_part}")
    }
}

/// `c·e_i e_j` terms, upper triangle, in index order.
pub fn quadratic_to_string(q: &QuadraticForm<Rational>) -> String {
    let mut terms = Vec::new();
    for i in 1..=q.dim() {
        for j in i..=q.dim() {
            let c = q.monomial(i, j);
            if !c.is_zero() {
                let m = if i == j { format!("e{i}^2") } else { format!("e{i}e{j}") };
                terms.push(format!("{} {m}", rational_to_string(&c)));
            }
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn form_to_string(x: &AlternatingForm<Rational>) -> String {
    let terms: Vec<String> = x
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| format!("{} e{}", rational_to_string(v), index_key(i).replace(',', "")))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Compares all `dim(dim+1)/2` monomial coefficients.
fn compare_quadratic(name: &str, expected_label: &str, got: &QuadraticForm<Rational>, want: &QuadraticForm<Rational>) -> GoldenRow {
    let n = want.dim();
    let mut entries = 0;
    let mut same = got.dim() == n;
    if same {
        for i in 1..=n {
            for j in i..=n {
                entries += 1;
                same &= got.monomial(i, j) == want.monomial(i, j);
            }
        }
    }
    row(
        name,
        format!("{expected_label} ({entries} gram entries)"),
        quadratic_to_string(got),
        same,
    )
}

fn rational_row(name: &str, expected: Rational, got: Rational) -> GoldenRow {
    let pass = expected == got;
    row(name, rational_to_string(&expected), rational_to_string(&got), pass)
}

fn delta2(rep: RepName) -> prehom_core::Result<Rational> {
    match delta_case2(&make_rep(rep)?)? {
        DeltaValue::Exact(v) => Ok(v),
        DeltaValue::Inexact(_) => Err(prehom_core::Error::Domain("no rational cube root".into())),
    }
}

fn count_row(name: &str, expected: usize, got: usize) -> GoldenRow {
    row(name, expected.to_string(), got.to_string(), expected == got)
}

fn collect() -> prehom_core::Result<Vec<GoldenRow>> {
    let mut rows = Vec::new();

    let q = |terms: &[(usize, usize, i64)]| {
        QuadraticForm::from_monomials(7, &terms.iter().map(|&(i, j, c)| (i, j, rat(c, 1))).collect::<Vec<_>>())
    };
    let q_w = q_case2(&make_rep(RepName::Case2W)?)?;
    rows.push(compare_quadratic("Q_w", "6(-e1^2 + e2e5 + e3e6 + e4e7)", &q_w, &q(&[(1, 1, -6), (2, 5, 6), (3, 6, 6), (4, 7, 6)])));
    let q_wp = q_case2(&make_rep(RepName::Case2WPrime)?)?;
    rows.push(compare_quadratic("Q_w'", "6(-e1e4 + e2e3)", &q_wp, &q(&[(1, 4, -6), (2, 3, 6)])));

    let c = c_form(&split_octonions::<Rational>(), &split_imaginary_basis())?;
    let half = rat(1, 2);
    let want = AlternatingForm::from_terms(
        7,
        3,
        [[2, 3, 4], [5, 6, 7], [1, 2, 5], [1, 3, 6], [1, 4, 7]].iter().map(|i| (i.to_vec(), half.clone())),
    )?;
    let same = prehom_core::multilinear::combinations(7, 3).iter().all(|i| c.get(i) == want.get(i));
    rows.push(row("C", "1/2(e234 + e567 + e125 + e136 + e147) (35 coefficients)", form_to_string(&c), same));

    rows.push(rational_row("Δ(case1 w) = 1", rat(1, 1), delta_case1(&make_rep(RepName::Case1W)?)?));
    rows.push(rational_row("Δ(case1 w1) = -64", rat(-64, 1), delta_case1(&make_rep(RepName::Case1W1)?)?));
    for d in [-1i64, 2, 3, 5] {
        rows.push(rational_row(
            &format!("Δ(w_α) = 64α² (d = {d})"),
            rat(64 * d, 1),
            delta_case1(&make_rep(RepName::Case1WAlpha(d))?)?,
        ));
    }
    rows.push(rational_row("Δ(case2 w) = 6", rat(6, 1), delta2(RepName::Case2W)?));
    rows.push(rational_row("Δ(case2 w1) = 2^9·6", rat(512 * 6, 1), delta2(RepName::Case2W1)?));

    let reps = [
        ("case1", make_rep(RepName::Case1W)?, 16usize, 2usize),
        ("case2", make_rep(RepName::Case2W)?, 14, 1),
        ("case3", make_rep(RepName::Case3W(2))?, 10, 1),
    ];
    for (label, w, stab_dim, fixed_dim) in &reps {
        let l = stab_lie_algebra(w)?;
        rows.push(count_row(&format!("stab {label} dim = {stab_dim}"), *stab_dim, l.dimension()));
        let f = fixed_space(&l, w.dim(), w.degree())?;
        rows.push(count_row(&format!("fixed-space {label} dim = {fixed_dim}"), *fixed_dim, f.len()));
    }

    let (h1, u1, u2, t) = (case1::h1::<Rational>(), case1::u1(), case1::u2(), case1::t());
    let parts = [h1.dimension(), u1.dimension(), u2.dimension(), t.dimension()];
    let sum = prehom_core::lie::direct_sum(&[&h1, &u1, &u2, &t], None)?.map(|s| s.dimension()).unwrap_or(0);
    rows.push(row(
        "direct sum 16 + 9 + 9 + 1 = 35",
        "16 + 9 + 9 + 1 = 35",
        format!("{} + {} + {} + {} = {sum}", parts[0], parts[1], parts[2], parts[3]),
        parts == [16, 9, 9, 1] && sum == 35,
    ));

    for d in [-1i64, 2, 3, 5] {
        let g = g_alpha(d)?;
        let det = g.det()?;
        let want = QuadExt::from_int(-8) * QuadExt::sqrt_d(d)?;
        rows.push(row(format!("det g_α = -8α (d = {d})"), quad_to_string(&want), quad_to_string(&det), det == want));
    }
    Ok(rows)
}

/// Runs every golden row. A computation error becomes a failing row.
pub fn run_verify() -> VerifyReport {
    let rows = collect().unwrap_or_else(|e| vec![row("verify", "all rows computed", e.to_string(), false)]);
    let passed = rows.iter().filter(|r| r.pass).count();
    let failed = rows.len() - passed;
    VerifyReport { rows, passed, failed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_present_and_values() {
        let r = run_verify();
        assert!(r.row("Q_w").unwrap().pass);
        assert!(r.row("Q_w").unwrap().expected.contains("28 gram entries"));
        assert!(r.row("fixed-space case1 dim = 2").unwrap().pass);
        assert!(r.row("Δ(case2 w1) = 2^9·6").unwrap().pass);
        assert!(r.row("C").unwrap().pass);
        assert_eq!(r.row("Δ(case1 w1) = -64").unwrap().computed, "-4");
        assert_eq!(r.row("Δ(w_α) = 64α² (d = 2)").unwrap().computed, "32");
        assert_eq!(r.row("det g_α = -8α (d = 2)").unwrap().computed, "-4√2");
        assert_eq!(r.row("Q_w'").unwrap().computed, "6 e1e4");
    }

    #[test]
    fn quad_strings() {
        let v = QuadExt::new(rat(1, 2), rat(-3, 1), 5).unwrap();
        assert_eq!(quad_to_string(&v), "1/2 - 3√5");
        assert_eq!(quad_to_string(&QuadExt::sqrt_d(2).unwrap()), "√2");
    }
}
