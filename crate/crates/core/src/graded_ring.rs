//! Graded-commutative cohomology rings over ℤ generated by classes with
//! truncated-polynomial relations `x^n = 0`.
//!
//! Generators are grouped by degree. A monomial's position in its degree
//! basis is fixed by its splitting (total exponent per degree group),
//! compared lexicographically, and then by the index tuples inside each
//! group. For products of spheres this is exactly the ordered basis used by
//! the block decomposition in [`crate::sphere_products`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::RingError;
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub label: String,
    pub degree: u32,
    /// Smallest power that vanishes: 2 for sphere classes, `n + 1` for the
    /// hyperplane class of ℂPⁿ.
    pub nilpotency: u32,
}

impl Generator {
    pub fn new(label: impl Into<String>, degree: u32, nilpotency: u32) -> Self {
        Generator { label: label.into(), degree, nilpotency }
    }
}

/// Wire form of a ring: `{"generators": [...]}` with an optional
/// `top_degree` that is checked when present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDescription {
    pub generators: Vec<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_degree: Option<u32>,
}

/// A basis monomial: one exponent per generator, in generator order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exponents: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_unit(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignedMonomial {
    Zero,
    Term { sign: i32, monomial: Monomial },
}

impl SignedMonomial {
    pub fn is_zero(&self) -> bool {
        matches!(self, SignedMonomial::Zero)
    }

    pub fn sign(&self) -> i32 {
        match self {
            SignedMonomial::Zero => 0,
            SignedMonomial::Term { sign, .. } => *sign,
        }
    }
}

/// A validated ring with its degree bases precomputed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RingDescription", into = "RingDescription")]
pub struct GradedRing {
    generators: Vec<Generator>,
    group_of: Vec<usize>,
    group_degrees: Vec<u32>,
    top_degree: u32,
    bases: Vec<Vec<Monomial>>,
    index: HashMap<Vec<u32>, usize>,
}

impl PartialEq for GradedRing {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for GradedRing {}

impl TryFrom<RingDescription> for GradedRing {
    type Error = RingError;

    fn try_from(desc: RingDescription) -> Result<Self, RingError> {
        let ring = GradedRing::new(desc.generators)?;
        if let Some(t) = desc.top_degree {
            if t != ring.top_degree {
                return Err(RingError::DegreeOutOfRange { degree: t as i64, top: ring.top_degree });
            }
        }
        Ok(ring)
    }
}

impl From<GradedRing> for RingDescription {
    fn from(r: GradedRing) -> Self {
        RingDescription { top_degree: Some(r.top_degree), generators: r.generators }
    }
}

impl GradedRing {
    pub fn new(generators: Vec<Generator>) -> Result<Self, RingError> {
        if generators.is_empty() {
            return Err(RingError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        let mut prev_degree = 0;
        for g in &generators {
            if g.degree == 0 {
                return Err(RingError::ZeroDegree { label: g.label.clone() });
            }
            if g.nilpotency < 2 {
                return Err(RingError::Nilpotency { label: g.label.clone(), nilpotency: g.nilpotency });
            }
            if g.degree % 2 == 1 && g.nilpotency > 2 {
                return Err(RingError::OddNilpotent { label: g.label.clone(), degree: g.degree, nilpotency: g.nilpotency });
            }
            if !seen.insert(g.label.clone()) {
                return Err(RingError::DuplicateLabel(g.label.clone()));
            }
            if g.degree < prev_degree {
                return Err(RingError::DegreeOrder { label: g.label.clone() });
            }
            prev_degree = g.degree;
        }
        let mut group_degrees: Vec<u32> = Vec::new();
        let mut group_of = Vec::with_capacity(generators.len());
        for g in &generators {
            if group_degrees.last() != Some(&g.degree) {
                group_degrees.push(g.degree);
            }
            group_of.push(group_degrees.len() - 1);
        }
        let top_degree = generators.iter().map(|g| g.degree * (g.nilpotency - 1)).sum();
        let mut ring = GradedRing {
            generators,
            group_of,
            group_degrees,
            top_degree,
            bases: Vec::new(),
            index: HashMap::new(),
        };
        ring.build_bases();
        Ok(ring)
    }

    /// `(S^{d_1})^{n_1} × … × (S^{d_m})^{n_m}` with canonical labels `x{q}^{p}`.
    /// `factors` must list strictly increasing dimensions.
    pub fn sphere_product(factors: &[(u32, u32)]) -> Result<Self, RingError> {
        let mut gens = Vec::new();
        for (p, &(dim, count)) in factors.iter().enumerate() {
            for q in 1..=count {
                gens.push(Generator::new(format!("x{q}^{}", p + 1), dim, 2));
            }
        }
        GradedRing::new(gens)
    }

    pub fn torus(n: u32) -> Result<Self, RingError> {
        GradedRing::sphere_product(&[(1, n)])
    }

    pub fn sphere(n: u32) -> Result<Self, RingError> {
        GradedRing::sphere_product(&[(n, 1)])
    }

    pub fn complex_projective(n: u32) -> Result<Self, RingError> {
        GradedRing::new(vec![Generator::new("x1^1", 2, n + 1)])
    }

    /// Künneth product `H*(M) ⊗ H*(N)`. Generators are merged by degree
    /// (stable, left factor first) and relabelled canonically.
    pub fn tensor(&self, other: &GradedRing) -> Result<Self, RingError> {
        let mut gens: Vec<Generator> = self.generators.iter().chain(&other.generators).cloned().collect();
        gens.sort_by_key(|g| g.degree);
        Ok(GradedRing::new(canonical_labels(gens))?)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    /// Degree of each generator group, increasing.
    pub fn group_degrees(&self) -> &[u32] {
        &self.group_degrees
    }

    /// Group index of each generator.
    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn generator_index(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    fn build_bases(&mut self) {
        let n = self.generators.len();
        let mut by_degree: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.top_degree as usize + 1];
        let mut exps = vec![0u32; n];
        fn rec(gens: &[Generator], i: usize, deg: u32, exps: &mut Vec<u32>, out: &mut Vec<Vec<Vec<u32>>>) {
            if i == gens.len() {
                out[deg as usize].push(exps.clone());
                return;
            }
            for e in 0..gens[i].nilpotency {
                exps[i] = e;
                rec(gens, i + 1, deg + e * gens[i].degree, exps, out);
            }
            exps[i] = 0;
        }
        rec(&self.generators, 0, 0, &mut exps, &mut by_degree);
        self.bases = by_degree
            .into_iter()
            .enumerate()
            .map(|(d, mut list)| {
                list.sort_by_cached_key(|e| self.order_key(e));
                list.into_iter().map(|exponents| Monomial { exponents, degree: d as u32 }).collect()
            })
            .collect();
        for basis in &self.bases {
            for (i, m) in basis.iter().enumerate() {
                self.index.insert(m.exponents.clone(), i);
            }
        }
    }

    /// Splitting first, then the index tuple of each group.
    fn order_key(&self, exps: &[u32]) -> (Vec<u32>, Vec<Vec<usize>>) {
        let groups = self.group_degrees.len();
        let mut alpha = vec![0u32; groups];
        let mut tuples = vec![Vec::new(); groups];
        for (i, &e) in exps.iter().enumerate() {
            let g = self.group_of[i];
            alpha[g] += e;
            for _ in 0..e {
                tuples[g].push(i);
            }
        }
        (alpha, tuples)
    }

    /// Total exponent per degree group.
    pub fn splitting(&self, m: &Monomial) -> Vec<u32> {
        self.order_key(&m.exponents).0
    }

    pub fn build_basis(&self, d: i64) -> Result<&[Monomial], RingError> {
        if d < 0 || d > self.top_degree as i64 {
            return Err(RingError::DegreeOutOfRange { degree: d, top: self.top_degree });
        }
        Ok(&self.bases[d as usize])
    }

    /// Basis of `H^d`, empty outside `0..=top`.
    pub fn basis(&self, d: u32) -> &[Monomial] {
        self.bases.get(d as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn betti(&self, d: u32) -> usize {
        self.basis(d).len()
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.bases.iter().enumerate().map(|(d, b)| if d % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) }).sum()
    }

    pub fn unit(&self) -> Monomial {
        self.bases[0][0].clone()
    }

    pub fn top_monomial(&self) -> &Monomial {
        &self.bases[self.top_degree as usize][0]
    }

    /// The generator `i` as a monomial.
    pub fn generator_monomial(&self, i: usize) -> Monomial {
        let mut exponents = vec![0; self.generators.len()];
        exponents[i] = 1;
        Monomial { exponents, degree: self.generators[i].degree }
    }

    pub fn monomial(&self, exponents: &[u32]) -> Result<Monomial, RingError> {
        if exponents.len() != self.generators.len() {
            return Err(RingError::BadMonomial(format!("expected {} exponents, got {}", self.generators.len(), exponents.len())));
        }
        for (g, &e) in self.generators.iter().zip(exponents) {
            if e >= g.nilpotency {
                return Err(RingError::BadMonomial(format!("exponent {e} of {} reaches nilpotency {}", g.label, g.nilpotency)));
            }
        }
        let degree = self.generators.iter().zip(exponents).map(|(g, &e)| g.degree * e).sum();
        Ok(Monomial { exponents: exponents.to_vec(), degree })
    }

    /// Parses `"x1^1*x2^1"`; a repeated label raises the exponent, `"1"` is the unit.
    pub fn parse_monomial(&self, text: &str) -> Result<Monomial, RingError> {
        let mut exps = vec![0u32; self.generators.len()];
        let text = text.trim();
        if text != "1" && !text.is_empty() {
            for tok in text.split(['*', ',']) {
                let tok = tok.trim();
                let i = self.generator_index(tok).ok_or_else(|| RingError::UnknownLabel(tok.to_string()))?;
                exps[i] += 1;
            }
        }
        self.monomial(&exps)
    }

    /// Position of `m` in its degree basis.
    pub fn position(&self, m: &Monomial) -> usize {
        self.index[&m.exponents]
    }

    pub fn cup(&self, a: &Monomial, b: &Monomial) -> SignedMonomial {
        let mut exponents = Vec::with_capacity(a.exponents.len());
        for (i, (x, y)) in a.exponents.iter().zip(&b.exponents).enumerate() {
            let e = x + y;
            if e >= self.generators[i].nilpotency {
                return SignedMonomial::Zero;
            }
            exponents.push(e);
        }
        // Moving each factor of b left past the factors of a with larger index.
        let mut parity = 0u64;
        let mut odd_in_b_below = 0u64;
        for i in 0..exponents.len() {
            if self.generators[i].degree % 2 == 1 {
                parity += a.exponents[i] as u64 * odd_in_b_below;
                odd_in_b_below += b.exponents[i] as u64;
            }
        }
        let sign = if parity % 2 == 0 { 1 } else { -1 };
        SignedMonomial::Term { sign, monomial: Monomial { exponents, degree: a.degree + b.degree } }
    }

    /// Cup product of two homogeneous elements given in the degree bases.
    pub fn cup_elements(&self, d: u32, u: &[BigInt], e: u32, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.betti(d + e)];
        let (bd, be) = (self.basis(d), self.basis(e));
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                if let SignedMonomial::Term { sign, monomial } = self.cup(&bd[i], &be[j]) {
                    out[self.position(&monomial)] += ui * vj * sign;
                }
            }
        }
        out
    }

    /// `P[i][j]` = coefficient of the top class in `basis_d[i] ⌣ basis_{top-d}[j]`.
    pub fn intersection_pairing(&self, d: u32) -> Result<IntMatrix, RingError> {
        if d > self.top_degree {
            return Err(RingError::DegreeOutOfRange { degree: d as i64, top: self.top_degree });
        }
        let (a, b) = (self.basis(d), self.basis(self.top_degree - d));
        let mut p = IntMatrix::zeros(a.len(), b.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if let SignedMonomial::Term { sign, .. } = self.cup(x, y) {
                    p[(i, j)] = BigInt::from(sign);
                }
            }
        }
        Ok(p)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".to_string();
        }
        let parts: Vec<String> = m
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.generators[i].label.clone() } else { format!("({})^{e}", self.generators[i].label) })
            .collect();
        parts.join(" ⌣ ")
    }

    /// Nonzero exponents keyed by label.
    pub fn exponent_map(&self, m: &Monomial) -> std::collections::BTreeMap<String, u32> {
        m.exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (self.generators[i].label.clone(), e))
            .collect()
    }
}

/// Relabels degree-sorted generators as `x{q}^{p}`.
fn canonical_labels(gens: Vec<Generator>) -> Vec<Generator> {
    let mut out = Vec::with_capacity(gens.len());
    let (mut p, mut q, mut last) = (0, 0, 0);
    for g in gens {
        if g.degree != last {
            p += 1;
            q = 0;
            last = g.degree;
        }
        q += 1;
        out.push(Generator::new(format!("x{q}^{p}"), g.degree, g.nilpotency));
    }
    out
}

impl fmt::Display for GradedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}(deg {}, {}^{} = 0)", g.label, g.degree, g.label, g.nilpotency))
            .collect();
        write!(f, "Z[{}]", parts.join(", "))
    }
}
