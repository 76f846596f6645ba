//! Unimodular symmetric forms and their special isometry groups.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::FormError;
use crate::lattice;
use crate::matrix::{self, IntMatrix};
use crate::poly::{self, IntPoly};

/// Rank above which the bounded sweep refuses to run.
pub const SEARCH_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct UnimodularForm {
    q: IntMatrix,
    signature: (usize, usize),
}

impl TryFrom<IntMatrix> for UnimodularForm {
    type Error = FormError;

    fn try_from(q: IntMatrix) -> Result<Self, FormError> {
        UnimodularForm::new(q)
    }
}

impl From<UnimodularForm> for IntMatrix {
    fn from(f: UnimodularForm) -> Self {
        f.q
    }
}

impl UnimodularForm {
    pub fn new(q: IntMatrix) -> Result<Self, FormError> {
        if !q.is_square() || q.rows() == 0 {
            return Err(FormError::NotSquare { rows: q.rows(), cols: q.cols() });
        }
        if !q.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        let det = q.det();
        if det.abs() != BigInt::one() {
            return Err(FormError::NotUnimodular(det));
        }
        let signature = lattice::signature(&q);
        Ok(UnimodularForm { q, signature })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, FormError> {
        Self::new(IntMatrix::try_from_rows(rows)?)
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &UnimodularForm) -> UnimodularForm {
        UnimodularForm::new(IntMatrix::block_diagonal(&[self.q.clone(), other.q.clone()])).expect("sum of unimodular forms")
    }

    pub fn hyperbolic() -> UnimodularForm {
        UnimodularForm::from_rows(&[[0, 1], [1, 0]]).expect("H is unimodular")
    }

    pub fn diagonal(entries: &[i64]) -> Result<UnimodularForm, FormError> {
        let n = entries.len();
        let mut q = IntMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            q[(i, i)] = BigInt::from(e);
        }
        UnimodularForm::new(q)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.q.rows()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_definite(&self) -> bool {
        self.signature.0 == 0 || self.signature.1 == 0
    }

    pub fn is_isometry(&self, a: &IntMatrix) -> bool {
        a.rows() == self.rank() && a.is_square() && a.transpose().matmul(&self.q).matmul(a) == self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Completeness {
    /// The list is the whole group.
    Certified,
    /// Only isometries with entries inside the echoed bound were searched.
    BoundedOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsometryEnumeration {
    pub isometries: Vec<IntMatrix>,
    pub completeness: Completeness,
    /// Entry bound of the sweep when the result is bounded only.
    pub bound: Option<i64>,
    /// Certified per-entry bounds `|A_ij| ≤ b_ij` used for definite forms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry_bounds: Option<Vec<Vec<i64>>>,
}

fn small(q: &IntMatrix) -> Result<Vec<Vec<i64>>, FormError> {
    q.to_i64_rows().ok_or_else(|| FormError::Invariant("form entries exceed 64-bit range".into()))
}

/// Integral isometries of determinant 1.
///
/// Definite forms: column `j` of an isometry has `Q`-norm `Q_jj`, and
/// `v_i = ⟨Q⁻¹eᵢ, v⟩_Q`, so Cauchy–Schwarz gives `|v_i|² ≤ (Q⁻¹)_ii·Q_jj`;
/// the sweep inside those bounds is exhaustive. Indefinite rank 2: both
/// isotropic lines are rational, a determinant-one isometry scales them by
/// `t` and `1/t` with `t + 1/t` an integer and `t` rational, so `t = ±1`
/// and the group is `{±Id}`. Every other case is a bounded sweep.
pub fn enumerate_isometries(form: &UnimodularForm, entry_bound: i64) -> Result<IsometryEnumeration, FormError> {
    let n = form.rank();
    let q = small(form.matrix())?;
    if form.is_definite() {
        let sign = if form.signature.0 > 0 { 1 } else { -1 };
        let qinv = small(&form.matrix().inverse_unimodular()?)?;
        let bounds: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| isqrt(sign * q[j][j] * sign * qinv[i][i])).collect())
            .collect();
        let mut isometries = sweep(&q, &|i, j| bounds[i][j]);
        matrix::sort_by_order(&mut isometries);
        return Ok(IsometryEnumeration { isometries, completeness: Completeness::Certified, bound: None, entry_bounds: Some(bounds) });
    }
    if n == 2 {
        let isometries = vec![IntMatrix::identity(2), IntMatrix::identity(2).neg()];
        return Ok(IsometryEnumeration { isometries, completeness: Completeness::Certified, bound: None, entry_bounds: None });
    }
    if n > SEARCH_LIMIT {
        return Err(FormError::SearchLimit(n));
    }
    let mut isometries = sweep(&q, &|_, _| entry_bound);
    matrix::sort_by_order(&mut isometries);
    Ok(IsometryEnumeration { isometries, completeness: Completeness::BoundedOnly, bound: Some(entry_bound), entry_bounds: None })
}

fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Column-by-column search: each column must have the right norm and the
/// right inner products with the columns already chosen; `det = 1` at the end.
fn sweep(q: &[Vec<i64>], bound: &dyn Fn(usize, usize) -> i64) -> Vec<IntMatrix> {
    let n = q.len();
    let form = |u: &[i64], v: &[i64]| -> i64 { (0..n).map(|i| (0..n).map(|j| u[i] * q[i][j] * v[j]).sum::<i64>()).sum() };
    let mut candidates: Vec<Vec<Vec<i64>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut list = Vec::new();
        let mut v = vec![0i64; n];
        let b: Vec<i64> = (0..n).map(|i| bound(i, j)).collect();
        for (i, x) in v.iter_mut().enumerate() {
            *x = -b[i];
        }
        loop {
            if form(&v, &v) == q[j][j] {
                list.push(v.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                if v[i] < b[i] {
                    v[i] += 1;
                    break;
                }
                v[i] = -b[i];
                i += 1;
            }
            if i == n {
                break;
            }
        }
        candidates.push(list);
    }
    // candidates paired with Qv, so inner products are plain dot products
    let lists: Vec<Vec<(Vec<i64>, Vec<i64>)>> = candidates
        .into_iter()
        .map(|list| {
            list.into_iter()
                .map(|v| {
                    let qv = (0..n).map(|i| (0..n).map(|j| q[i][j] * v[j]).sum()).collect();
                    (v, qv)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<&[i64]> = Vec::with_capacity(n);
    let live: Vec<Vec<usize>> = lists.iter().map(|l| (0..l.len()).collect()).collect();
    fn dot(u: &[i64], v: &[i64]) -> i64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }
    // forward checking: after fixing column j, prune every later list
    fn dfs<'a>(
        j: usize,
        q: &[Vec<i64>],
        lists: &'a [Vec<(Vec<i64>, Vec<i64>)>],
        live: &[Vec<usize>],
        chosen: &mut Vec<&'a [i64]>,
        out: &mut Vec<IntMatrix>,
    ) {
        let n = q.len();
        if j == n {
            if det_small(chosen) == 1 {
                let cols: Vec<Vec<BigInt>> = chosen.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
                out.push(IntMatrix::from_columns(n, &cols));
            }
            return;
        }
        for &idx in &live[j] {
            let (v, qv) = &lists[j][idx];
            let mut next: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut dead = false;
            for k in j + 1..n {
                next[k] = live[k].iter().copied().filter(|&c| dot(&lists[k][c].0, qv) == q[j][k]).collect();
                if next[k].is_empty() {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            chosen.push(v);
            dfs(j + 1, q, lists, &next, chosen, out);
            chosen.pop();
        }
    }
    dfs(0, q, &lists, &live, &mut chosen, &mut out);
    out
}

/// Fraction-free determinant of a small matrix given by columns.
fn det_small(cols: &[&[i64]]) -> i128 {
    let n = cols.len();
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| cols[j][i] as i128).collect()).collect();
    let (mut sign, mut prev) = (1i128, 1i128);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Smallest `m` such that `A^m` has no root-of-unity eigenvalue other than 1:
/// the lcm of all `k ≥ 2` with `Φ_k | charpoly(A)`.
pub fn power_stabilize(a: &IntMatrix) -> (u64, IntMatrix) {
    let p = poly::charpoly(a);
    let m = poly::cyclotomic_factors(&p).iter().map(|&(k, _)| k as u64).filter(|&k| k >= 2).fold(1u64, |acc, k| acc.lcm(&k));
    (m, a.pow(m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSplit {
    /// `dim V`, `V = ker(A - I)`.
    pub dim_v: usize,
    /// `k = dim V⊥`.
    pub k: usize,
    pub v_basis: Vec<IntMatrix>,
    /// Columns span the saturated lattice `V⊥ ∩ ℤᴺ`.
    pub v_perp_basis: IntMatrix,
    pub q_prime: IntMatrix,
    pub q_double_prime: IntMatrix,
    pub a_prime: IntMatrix,
    /// `Q' ⊕ Q''` is unimodular, so it is a genuine splitting of `Q`.
    pub unimodular_splitting: bool,
}

/// Splits off the fixed sublattice `V` and restricts `A` to `V⊥`.
pub fn fixed_subspace_split(a: &IntMatrix, form: &UnimodularForm) -> Result<FixedSplit, FormError> {
    let n = form.rank();
    if !form.is_isometry(a) {
        return Err(FormError::NotIsometry);
    }
    let shifted = a.sub(&IntMatrix::identity(n));
    let v = lattice::integer_kernel(&shifted);
    let p = poly::charpoly(a);
    let one = IntPoly::from_i64(&[-1, 1]);
    let mut mult = 0;
    let mut rest = p;
    while !rest.is_constant() && one.divides(&rest) {
        rest = rest.pseudo_divmod(&one).0;
        mult += 1;
    }
    if v.len() != mult {
        return Err(FormError::NonSplitJordan { kernel: v.len(), multiplicity: mult });
    }
    let b = IntMatrix::from_columns(n, &v);
    let w = if v.is_empty() {
        IntMatrix::identity(n)
    } else {
        let conds = b.transpose().matmul(form.matrix());
        IntMatrix::from_columns(n, &lattice::integer_kernel(&conds))
    };
    let k = w.cols();
    let q_prime = w.transpose().matmul(form.matrix()).matmul(&w);
    let q_double_prime = if v.is_empty() { IntMatrix::zeros(0, 0) } else { b.transpose().matmul(form.matrix()).matmul(&b) };
    let a_prime = if k == 0 {
        IntMatrix::zeros(0, 0)
    } else {
        lattice::solve_integral(&w, &a.matmul(&w)).ok_or_else(|| FormError::Invariant("V⊥ is not A-invariant".into()))?
    };
    let unimodular_splitting = q_prime.det().abs().is_one() && q_double_prime.det().abs().is_one();
    if unimodular_splitting && (k % 2 == 1 || (k == 0 && !a.is_identity())) {
        return Err(FormError::Invariant(format!("dim V⊥ = {k} violates the eigenvalue pairing")));
    }
    Ok(FixedSplit {
        dim_v: v.len(),
        k,
        v_basis: v.iter().map(|c| IntMatrix::from_columns(n, std::slice::from_ref(c))).collect(),
        v_perp_basis: w,
        q_prime,
        q_double_prime,
        a_prime,
        unimodular_splitting,
    })
}

/// `2 + Tr(A^l)` for `l = 1..=len`.
pub fn eq71_sequence(a: &IntMatrix, len: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len as usize);
    let mut p = a.clone();
    for _ in 0..len {
        out.push(p.trace() + 2);
        p = p.matmul(a);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintStatus {
    Holds,
    Fails,
    Unsatisfiable,
    Assumed,
}

/// One link of a constraint chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintEvidence {
    pub constraint: String,
    pub status: ConstraintStatus,
    pub citation: String,
}

impl ConstraintEvidence {
    pub fn new(constraint: impl Into<String>, status: ConstraintStatus, citation: impl Into<String>) -> Self {
        ConstraintEvidence { constraint: constraint.into(), status, citation: citation.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormVerdict {
    NoAnosov,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub a: IntMatrix,
    pub power: u64,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem110Report {
    pub n: usize,
    pub signature: (usize, usize),
    pub chi_nonzero: bool,
    pub verdict: FormVerdict,
    pub completeness: Completeness,
    pub evidence: Vec<ConstraintEvidence>,
    /// Isometries meeting every constraint within the search bound.
    pub candidates: Vec<Candidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
}

/// Searches for an isometry that could be induced by an Anosov
/// diffeomorphism of a `(2n-1)`-connected `4n`-manifold with form `Q`.
pub fn theorem110_check(form: &UnimodularForm, chi_nonzero: bool, bound: i64) -> Result<Theorem110Report, FormError> {
    let n = form.rank();
    let mut evidence = Vec::new();
    let mut report = Theorem110Report {
        n,
        signature: form.signature(),
        chi_nonzero,
        verdict: FormVerdict::NoAnosov,
        completeness: Completeness::Certified,
        evidence: Vec::new(),
        candidates: Vec::new(),
        group_order: None,
    };
    if form.is_definite() {
        evidence.push(ConstraintEvidence::new(
            "Q definite, so SO(Q;R) is compact, SO(Q;Z) finite and A^m = Id for some m",
            ConstraintStatus::Holds,
            "Remark 7.1",
        ));
        if n <= 4 {
            report.group_order = Some(enumerate_isometries(form, 0)?.isometries.len());
        }
        report.evidence = evidence;
        return Ok(report);
    }
    evidence.push(ConstraintEvidence::new(
        "some eigenvalue of A^m has modulus > 1, so k = dim V⊥ ≥ 1",
        ConstraintStatus::Assumed,
        "Eq 7.1",
    ));
    evidence.push(ConstraintEvidence::new("k is even (eigenvalues of A' pair as λ, 1/λ)", ConstraintStatus::Assumed, "Thm 1.10"));
    evidence.push(ConstraintEvidence::new(
        "k ≠ 2: every SO(Q_i;Z), i = 1..4, consists of finite-order matrices",
        ConstraintStatus::Holds,
        "Thm 1.10",
    ));
    evidence.push(ConstraintEvidence::new(
        format!("k ≥ 4 requires N ≥ 4 (N = {n})"),
        if n >= 4 { ConstraintStatus::Holds } else { ConstraintStatus::Unsatisfiable },
        "Thm 1.10",
    ));
    if chi_nonzero {
        evidence.push(ConstraintEvidence::new(
            format!("χ ≠ 0 forces N - k ≥ 1, so N ≥ 5 (N = {n})"),
            if n >= 5 { ConstraintStatus::Holds } else { ConstraintStatus::Unsatisfiable },
            "Thm 1.10",
        ));
    }
    let min_n = if chi_nonzero { 5 } else { 4 };
    let unsatisfiable = n < min_n;
    if unsatisfiable && n < 4 {
        report.evidence = evidence;
        return Ok(report);
    }
    // bounded search for admissible isometries
    let enumeration = enumerate_isometries(form, bound)?;
    for a in &enumeration.isometries {
        let (m, am) = power_stabilize(a);
        if !has_expanding_eigenvalue(&am) {
            continue;
        }
        let Ok(split) = fixed_subspace_split(&am, form) else { continue };
        if split.k >= 4 && (!chi_nonzero || n - split.k >= 1) {
            report.candidates.push(Candidate { a: a.clone(), power: m, k: split.k });
        }
    }
    evidence.push(ConstraintEvidence::new(
        format!(
            "sweep over entries ≤ {bound}: {} isometries, {} admissible",
            enumeration.isometries.len(),
            report.candidates.len()
        ),
        ConstraintStatus::Holds,
        "Thm 1.10",
    ));
    if unsatisfiable {
        report.evidence = evidence;
        return Ok(report);
    }
    report.verdict = FormVerdict::Inconclusive;
    report.completeness = Completeness::BoundedOnly;
    report.evidence = evidence;
    Ok(report)
}

fn has_expanding_eigenvalue(a: &IntMatrix) -> bool {
    let p = poly::charpoly(a);
    let cyclo: usize = poly::cyclotomic_factors(&p).iter().map(|&(k, m)| poly::euler_phi(k as u64) as usize * m).sum();
    // all roots of a monic integer polynomial on the closed unit disc are
    // roots of unity, so a non-cyclotomic part has a root outside it
    cyclo < a.rows()
}

/// The four rank-2 unimodular forms up to integral equivalence.
pub fn rank2_forms() -> [(&'static str, UnimodularForm); 4] {
    [
        ("Q1", UnimodularForm::diagonal(&[1, 1]).expect("unimodular")),
        ("Q2", UnimodularForm::diagonal(&[-1, -1]).expect("unimodular")),
        ("Q3", UnimodularForm::diagonal(&[1, -1]).expect("unimodular")),
        ("Q4", UnimodularForm::hyperbolic()),
    ]
}

/// The groups `SO(Q_i;ℤ)` for the rank-2 forms, equal groups merged.
pub fn render_rank2_tables() -> Result<String, FormError> {
    let forms = rank2_forms();
    let mut out = String::new();
    for (name, f) in &forms {
        let _ = writeln!(out, "{name} = {}", f.matrix());
    }
    let groups: Vec<(String, Vec<IntMatrix>)> = forms
        .iter()
        .map(|(name, f)| Ok((name.to_string(), enumerate_isometries(f, 3)?.isometries)))
        .collect::<Result<_, FormError>>()?;
    let mut i = 0;
    while i < groups.len() {
        let mut names = vec![format!("SO({};Z)", groups[i].0)];
        let mut j = i + 1;
        while j < groups.len() && groups[j].1 == groups[i].1 {
            names.push(format!("SO({};Z)", groups[j].0));
            j += 1;
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{} = {{", names.join(" = "));
        let n = groups[i].1.len();
        for (idx, m) in groups[i].1.iter().enumerate() {
            let _ = writeln!(out, "  {m}{}", if idx + 1 < n { "," } else { "" });
        }
        let _ = writeln!(out, "}}");
        i = j;
    }
    Ok(out)
}

/// `p(x) = ±xᵏ p(1/x)` coefficientwise.
pub fn is_reciprocal_up_to_sign(p: &IntPoly) -> bool {
    let r = p.reciprocal();
    if r.degree() != p.degree() {
        return false;
    }
    *p == r || p.coeffs().iter().zip(r.coeffs()).all(|(a, b)| *a == -b)
}

pub fn bigint_to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank2_groups() {
        let forms = rank2_forms();
        let id = IntMatrix::identity(2);
        let four = vec![id.clone(), id.neg(), IntMatrix::from_rows(&[[0, -1], [1, 0]]), IntMatrix::from_rows(&[[0, 1], [-1, 0]])];
        for (_, f) in &forms[..2] {
            let e = enumerate_isometries(f, 3).unwrap();
            assert_eq!(e.completeness, Completeness::Certified);
            assert_eq!(e.isometries, four);
        }
        for (_, f) in &forms[2..] {
            let e = enumerate_isometries(f, 3).unwrap();
            assert_eq!(e.isometries, vec![id.clone(), id.neg()]);
            // the closed form agrees with a plain sweep
            let mut swept = sweep(&small(f.matrix()).unwrap(), &|_, _| 3);
            matrix::sort_by_order(&mut swept);
            assert_eq!(swept, e.isometries);
        }
        let one = UnimodularForm::diagonal(&[1]).unwrap();
        assert_eq!(enumerate_isometries(&one, 3).unwrap().isometries, vec![IntMatrix::identity(1)]);
    }

    #[test]
    fn validation() {
        assert_eq!(UnimodularForm::from_rows(&[[2, 0], [0, 1]]).unwrap_err(), FormError::NotUnimodular(BigInt::from(2)));
        assert_eq!(UnimodularForm::from_rows(&[[1, 1], [0, 1]]).unwrap_err(), FormError::NotSymmetric);
    }

    #[test]
    fn stabilize() {
        assert_eq!(power_stabilize(&IntMatrix::scalar(2, -1)).0, 2);
        let (m, p) = power_stabilize(&IntMatrix::from_rows(&[[0, -1], [1, 0]]));
        assert_eq!(m, 4);
        assert!(p.is_identity());
        assert_eq!(power_stabilize(&IntMatrix::from_rows(&[[2, 1], [1, 1]])).0, 1);
    }

    #[test]
    fn eq71() {
        assert_eq!(eq71_sequence(&IntMatrix::identity(3), 2), vec![BigInt::from(5), BigInt::from(5)]);
        let rot: Vec<i64> = eq71_sequence(&IntMatrix::from_rows(&[[0, -1], [1, 0]]), 4).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(rot, vec![2, 0, 2, 4]);
        let cat: Vec<i64> = eq71_sequence(&IntMatrix::from_rows(&[[2, 1], [1, 1]]), 3).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(cat, vec![5, 9, 20]);
    }

    /// A non-torsion element of SO(H ⊕ H; Z): g ⊕ (g⁻¹)ᵀ with g hyperbolic
    /// preserves the pairing between the two isotropic halves.
    fn boost() -> (UnimodularForm, IntMatrix) {
        // basis (e1, e2, f1, f2) with Q(e_i, f_j) = δ_ij
        let q = UnimodularForm::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        let g = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let ginv_t = g.inverse_unimodular().unwrap().transpose();
        (q, IntMatrix::block_diagonal(&[g, ginv_t]))
    }

    #[test]
    fn split_of_a_boost() {
        let (q, a) = boost();
        assert!(q.is_isometry(&a));
        let s = fixed_subspace_split(&a, &q).unwrap();
        assert_eq!((s.dim_v, s.k), (0, 4));
        assert!(is_reciprocal_up_to_sign(&poly::charpoly(&s.a_prime)));
        let id = fixed_subspace_split(&IntMatrix::identity(4), &q).unwrap();
        assert_eq!(id.k, 0);
    }

    #[test]
    fn split_with_fixed_part() {
        // A acts on H ⊕ H as the boost above, extended by a fixed ⟨1⟩
        let (q, a) = boost();
        let q5 = q.direct_sum(&UnimodularForm::diagonal(&[1]).unwrap());
        let a5 = IntMatrix::block_diagonal(&[a, IntMatrix::identity(1)]);
        let s = fixed_subspace_split(&a5, &q5).unwrap();
        assert_eq!((s.dim_v, s.k), (1, 4));
        assert!(s.unimodular_splitting);
        assert_eq!(s.q_double_prime, IntMatrix::identity(1));
        let qv = q5.matrix();
        for v in &s.v_basis {
            assert!(v.transpose().matmul(qv).matmul(&s.v_perp_basis).is_zero());
        }
    }

    #[test]
    fn jordan_block_is_reported() {
        // unipotent isometry of H ⊕ ⟨1⟩... use H ⊕ H with a shear preserving Q
        let q = UnimodularForm::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        // e ↦ e, f ↦ f + S e with S antisymmetric
        let a = IntMatrix::from_rows(&[[1, 0, 0, 1], [0, 1, -1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(q.is_isometry(&a));
        assert!(matches!(fixed_subspace_split(&a, &q), Err(FormError::NonSplitJordan { .. })));
    }

    #[test]
    fn theorem110_battery() {
        let h = UnimodularForm::hyperbolic();
        let hh = h.direct_sum(&h);
        let r = theorem110_check(&hh, true, 3).unwrap();
        assert_eq!(r.verdict, FormVerdict::NoAnosov);
        assert!(r.evidence.iter().any(|e| e.status == ConstraintStatus::Unsatisfiable));
        for (_, f) in rank2_forms() {
            assert_eq!(theorem110_check(&f, true, 3).unwrap().verdict, FormVerdict::NoAnosov);
        }
        let definite = UnimodularForm::diagonal(&[1, 1, 1]).unwrap();
        let r = theorem110_check(&definite, false, 3).unwrap();
        assert_eq!(r.verdict, FormVerdict::NoAnosov);
        assert_eq!(r.group_order, Some(24));
        // without the Euler characteristic constraint H ⊕ H admits a boost
        let r = theorem110_check(&hh, false, 2).unwrap();
        assert_eq!(r.verdict, FormVerdict::Inconclusive);
        assert_eq!(r.completeness, Completeness::BoundedOnly);
        assert!(!r.candidates.is_empty());
    }

    #[test]
    fn tables_render() {
        let t = render_rank2_tables().unwrap();
        assert!(t.contains("SO(Q1;Z) = SO(Q2;Z) = {"));
        assert!(t.contains("SO(Q3;Z) = SO(Q4;Z) = {"));
    }
}
