//! Graded ring automorphisms as per-degree integer matrices.
//!
//! Matrices use the column convention: column `j` of `M_d` holds the
//! coordinates of the image of the `j`-th basis monomial of `H^d`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::AutomorphismError;
use crate::graded_ring::GradedRing;
use crate::matrix::{self, IntMatrix, JsonInt};

/// Wire form `{"images": {"x1^1": [..], ..}}`: each generator's image in
/// the basis of its own degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorImages {
    pub images: BTreeMap<String, Vec<JsonInt>>,
}

impl GeneratorImages {
    pub fn new() -> Self {
        GeneratorImages { images: BTreeMap::new() }
    }

    pub fn with(mut self, label: &str, image: &[i64]) -> Self {
        self.images.insert(label.to_string(), image.iter().map(|&x| JsonInt(BigInt::from(x))).collect());
        self
    }

    /// Images read off the degree blocks of a linear map on each degree
    /// group: generator `j` of a group maps to column `j` of that group's block.
    pub fn from_group_blocks(ring: &GradedRing, blocks: &BTreeMap<u32, IntMatrix>) -> Result<Self, AutomorphismError> {
        let mut images = BTreeMap::new();
        for (p, &deg) in ring.group_degrees().iter().enumerate() {
            let members: Vec<usize> = (0..ring.generators().len()).filter(|&i| ring.group_of()[i] == p).collect();
            let block = blocks.get(&deg).cloned().unwrap_or_else(|| IntMatrix::identity(members.len()));
            if block.rows() != members.len() || block.cols() != members.len() {
                return Err(AutomorphismError::DegreeShape {
                    degree: deg,
                    expected: members.len(),
                    rows: block.rows(),
                    cols: block.cols(),
                });
            }
            for (col, &g) in members.iter().enumerate() {
                let mut v = vec![BigInt::zero(); ring.betti(deg)];
                for (row, &h) in members.iter().enumerate() {
                    v[ring.position(&ring.generator_monomial(h))] = block[(row, col)].clone();
                }
                images.insert(ring.generators()[g].label.clone(), v.into_iter().map(JsonInt).collect());
            }
        }
        Ok(GeneratorImages { images })
    }
}

impl Default for GeneratorImages {
    fn default() -> Self {
        Self::new()
    }
}

/// Wire form `{"degree_matrices": {"2": [[..]], ..}}`. Degree 0 and
/// degrees with zero Betti number may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismDescription {
    pub degree_matrices: BTreeMap<String, IntMatrix>,
}

/// Either wire form.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AutomorphismInput {
    Images(GeneratorImages),
    Matrices(AutomorphismDescription),
}

impl AutomorphismInput {
    pub fn resolve(self, ring: &GradedRing) -> Result<GradedAutomorphism, AutomorphismError> {
        match self {
            AutomorphismInput::Images(i) => induce(ring, &i),
            AutomorphismInput::Matrices(d) => GradedAutomorphism::from_description(ring, &d),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAutomorphism {
    matrices: Vec<IntMatrix>,
}

impl GradedAutomorphism {
    pub fn identity(ring: &GradedRing) -> Self {
        GradedAutomorphism { matrices: ring.betti_numbers().into_iter().map(IntMatrix::identity).collect() }
    }

    /// Validates shapes, `M_0 = [1]` and `det M_d = ±1`.
    pub fn from_matrices(ring: &GradedRing, matrices: Vec<IntMatrix>) -> Result<Self, AutomorphismError> {
        let aut = Self::from_matrices_unchecked(ring, matrices)?;
        aut.check_unimodular()?;
        Ok(aut)
    }

    /// Shape checks only.
    pub fn from_matrices_unchecked(ring: &GradedRing, matrices: Vec<IntMatrix>) -> Result<Self, AutomorphismError> {
        let betti = ring.betti_numbers();
        if matrices.len() != betti.len() {
            return Err(AutomorphismError::MissingDegree(matrices.len().min(betti.len()) as u32));
        }
        for (d, (m, &b)) in matrices.iter().zip(&betti).enumerate() {
            if m.rows() != b || m.cols() != b {
                return Err(AutomorphismError::DegreeShape { degree: d as u32, expected: b, rows: m.rows(), cols: m.cols() });
            }
        }
        if !matrices[0].is_identity() {
            return Err(AutomorphismError::UnitNotFixed);
        }
        Ok(GradedAutomorphism { matrices })
    }

    pub fn from_description(ring: &GradedRing, desc: &AutomorphismDescription) -> Result<Self, AutomorphismError> {
        let betti = ring.betti_numbers();
        let mut slots: Vec<Option<IntMatrix>> = vec![None; betti.len()];
        for (key, m) in &desc.degree_matrices {
            let d: usize = key.trim().parse().map_err(|_| AutomorphismError::BadDegreeKey(key.clone()))?;
            if d >= betti.len() {
                return Err(AutomorphismError::BadDegreeKey(key.clone()));
            }
            slots[d] = Some(m.clone());
        }
        let mut matrices = Vec::with_capacity(betti.len());
        for (d, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(m) => matrices.push(m),
                None if d == 0 || betti[d] == 0 => matrices.push(IntMatrix::identity(betti[d])),
                None => return Err(AutomorphismError::MissingDegree(d as u32)),
            }
        }
        Self::from_matrices(ring, matrices)
    }

    pub fn to_description(&self) -> AutomorphismDescription {
        AutomorphismDescription {
            degree_matrices: self
                .matrices
                .iter()
                .enumerate()
                .filter(|(_, m)| m.rows() > 0)
                .map(|(d, m)| (d.to_string(), m.clone()))
                .collect(),
        }
    }

    fn check_unimodular(&self) -> Result<(), AutomorphismError> {
        for (d, m) in self.matrices.iter().enumerate() {
            let det = m.det();
            if det.abs() != BigInt::one() {
                return Err(AutomorphismError::NotInvertible { degree: d as u32, det });
            }
        }
        Ok(())
    }

    pub fn top_degree(&self) -> u32 {
        (self.matrices.len() - 1) as u32
    }

    pub fn matrix(&self, d: u32) -> &IntMatrix {
        &self.matrices[d as usize]
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    /// Sign of the action on the top class.
    pub fn top_sign(&self) -> i32 {
        let m = self.matrices.last().expect("nonempty family");
        if m.rows() == 1 && m[(0, 0)].is_negative() {
            -1
        } else {
            1
        }
    }

    /// `self ∘ other` degreewise.
    pub fn compose(&self, other: &GradedAutomorphism) -> Result<Self, AutomorphismError> {
        if self.matrices.len() != other.matrices.len()
            || self.matrices.iter().zip(&other.matrices).any(|(a, b)| a.rows() != b.rows())
        {
            return Err(AutomorphismError::RingMismatch);
        }
        Ok(GradedAutomorphism { matrices: self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.matmul(b)).collect() })
    }

    pub fn power(&self, m: u64) -> Self {
        GradedAutomorphism { matrices: self.matrices.iter().map(|a| a.pow(m)).collect() }
    }

    pub fn inverse(&self) -> Result<Self, AutomorphismError> {
        let matrices = self.matrices.iter().map(IntMatrix::inverse_unimodular).collect::<Result<Vec<_>, _>>()?;
        Ok(GradedAutomorphism { matrices })
    }
}

impl Serialize for GradedAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_description().serialize(s)
    }
}

/// Extends generator images multiplicatively to every degree.
pub fn induce(ring: &GradedRing, images: &GeneratorImages) -> Result<GradedAutomorphism, AutomorphismError> {
    for label in images.images.keys() {
        if ring.generator_index(label).is_none() {
            return Err(AutomorphismError::UnknownGenerator(label.clone()));
        }
    }
    let gens = ring.generators();
    let mut gen_images: Vec<Vec<BigInt>> = Vec::with_capacity(gens.len());
    for g in gens {
        let img = images.images.get(&g.label).ok_or_else(|| AutomorphismError::MissingImage(g.label.clone()))?;
        let expected = ring.betti(g.degree);
        if img.len() != expected {
            return Err(AutomorphismError::ImageLength { label: g.label.clone(), degree: g.degree, expected, found: img.len() });
        }
        gen_images.push(img.iter().map(|x| x.0.clone()).collect());
    }
    // x^n = 0 must survive; odd classes square to zero automatically.
    for (i, g) in gens.iter().enumerate() {
        if g.degree % 2 == 1 {
            continue;
        }
        let mut pow = gen_images[i].clone();
        let mut deg = g.degree;
        for _ in 1..g.nilpotency {
            if deg + g.degree > ring.top_degree() {
                pow.clear();
                break;
            }
            pow = ring.cup_elements(deg, &pow, g.degree, &gen_images[i]);
            deg += g.degree;
        }
        if pow.iter().any(|x| !x.is_zero()) {
            return Err(AutomorphismError::NotRingMap { label: g.label.clone(), nilpotency: g.nilpotency });
        }
    }
    let mut matrices = Vec::with_capacity(ring.top_degree() as usize + 1);
    // images of every basis monomial, keyed by exponent vector
    let mut cache: std::collections::HashMap<Vec<u32>, Vec<BigInt>> = std::collections::HashMap::new();
    for d in 0..=ring.top_degree() {
        let basis = ring.basis(d);
        let mut columns = Vec::with_capacity(basis.len());
        for m in basis {
            let img = if m.is_unit() {
                vec![BigInt::one()]
            } else {
                // m = m' ⌣ x_last with x_last the highest-index factor; no reordering, sign +1
                let last = m.exponents().iter().rposition(|&e| e > 0).expect("non-unit");
                let mut prefix = m.exponents().to_vec();
                prefix[last] -= 1;
                let pdeg = d - gens[last].degree;
                let prefix_img = &cache[&prefix];
                ring.cup_elements(pdeg, prefix_img, gens[last].degree, &gen_images[last])
            };
            columns.push(img.clone());
            cache.insert(m.exponents().to_vec(), img);
        }
        matrices.push(IntMatrix::from_columns(basis.len(), &columns));
    }
    GradedAutomorphism::from_matrices(ring, matrices)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CupViolation {
    pub d: u32,
    pub e: u32,
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "matrix::serialize_bigint_vec")]
    pub lhs: Vec<BigInt>,
    #[serde(serialize_with = "matrix::serialize_bigint_vec")]
    pub rhs: Vec<BigInt>,
}

/// Pairs of basis monomials where `f*(a ⌣ b) ≠ f*a ⌣ f*b`.
pub fn check_cup_preservation(ring: &GradedRing, aut: &GradedAutomorphism) -> Vec<CupViolation> {
    let mut out = Vec::new();
    let top = ring.top_degree();
    for d in 1..=top {
        for e in d..=top - d {
            let (bd, be) = (ring.basis(d), ring.basis(e));
            for i in 0..bd.len() {
                for j in 0..be.len() {
                    let mut unit_i = vec![BigInt::zero(); bd.len()];
                    unit_i[i] = BigInt::one();
                    let mut unit_j = vec![BigInt::zero(); be.len()];
                    unit_j[j] = BigInt::one();
                    let prod = ring.cup_elements(d, &unit_i, e, &unit_j);
                    let lhs = aut.matrix(d + e).mul_vec(&prod);
                    let rhs = ring.cup_elements(d, &aut.matrix(d).column(i), e, &aut.matrix(e).column(j));
                    if lhs != rhs {
                        out.push(CupViolation { d, e, i, j, lhs, rhs });
                    }
                }
            }
        }
    }
    out
}

pub fn exterior_power(a: &IntMatrix, k: usize) -> Result<IntMatrix, crate::error::MatrixError> {
    a.exterior_power(k)
}

pub fn kronecker(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.kronecker(b)
}

/// `M_dᵀ · P_d · M_{top-d} = s · P_d` for every `d`, where `s` is the sign
/// on the top class and `P_d` the intersection pairing.
pub fn duality_check(ring: &GradedRing, aut: &GradedAutomorphism) -> bool {
    duality_defect(ring, aut).is_none()
}

/// First degree where the duality identity fails.
pub fn duality_defect(ring: &GradedRing, aut: &GradedAutomorphism) -> Option<u32> {
    let top = ring.top_degree();
    let s = BigInt::from(aut.top_sign());
    (0..=top).find(|&d| {
        let p = ring.intersection_pairing(d).expect("degree in range");
        let lhs = aut.matrix(d).transpose().matmul(&p).matmul(aut.matrix(top - d));
        lhs != p.scale(&s)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetConstraint {
    Plus,
    Minus,
    Both,
}

impl DetConstraint {
    fn admits(self, det: i64) -> bool {
        match self {
            DetConstraint::Plus => det == 1,
            DetConstraint::Minus => det == -1,
            DetConstraint::Both => det == 1 || det == -1,
        }
    }
}

/// All integral automorphisms of a rank-2 middle cohomology with
/// `x ⌣ x = qω`, `x ⌣ y = ω`, `y ⌣ y = 0` that preserve the cup product,
/// sending `ω ↦ ω` (`fix_top`) or `ω ↦ ±ω`. Matrices in column convention.
///
/// Writing `f*x = ax + by`, `f*y = cx + dy` and `f*ω = sω`, cup
/// preservation reads
///
/// ```text
/// a²q + 2ab = sq,   acq + ad + bc = s,   c²q + 2cd = 0.
/// ```
///
/// If `c = 0` the middle equation gives `ad = s`, so `a = ±1`, `d = sa`
/// and `2ab = (s-1)q`. If `c ≠ 0` the last equation gives `2d = -cq`;
/// substituting into the middle one yields `c(aq + 2b) = 2s`, so
/// `c ∈ {±1, ±2}`, and the first one then forces `a = cq/2`, `d = -a`,
/// `b = s/c - cq²/4`, with determinant `-s`. Every solution is therefore
/// one of finitely many explicit matrices.
pub fn solve_rank2_middle(q: i64, det: DetConstraint, fix_top: bool) -> Vec<IntMatrix> {
    let signs: &[i64] = if fix_top { &[1] } else { &[1, -1] };
    let mut out = Vec::new();
    for &s in signs {
        if det.admits(s) {
            for a in [1i64, -1] {
                let d = s * a;
                // 2ab = (s-1)q
                let b = (s - 1) * q * a / 2;
                out.push([[a, b], [0, d]]);
            }
        }
        if det.admits(-s) {
            for c in [1i64, -1, 2, -2] {
                if (c * q) % 2 != 0 {
                    continue;
                }
                let a = c * q / 2;
                // b = s/c - cq²/4, kept only when integral
                let num = 4 * s - c * c * q * q;
                if num % (4 * c) != 0 {
                    continue;
                }
                let b = num / (4 * c);
                out.push([[a, b], [c, -a]]);
            }
        }
    }
    // row form [[a, b], [c, d]] lists the images f*x, f*y; transpose to columns
    let mut mats: Vec<IntMatrix> = out.iter().map(|r| IntMatrix::from_rows(r).transpose()).collect();
    mats.dedup();
    matrix::sort_by_order(&mut mats);
    mats
}

/// Gram matrix `[[q, 1], [1, 0]]` of the rank-2 middle pairing.
pub fn rank2_gram(q: i64) -> IntMatrix {
    IntMatrix::from_rows(&[[q, 1], [1, 0]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2s2() -> GradedRing {
        GradedRing::sphere_product(&[(2, 2)]).unwrap()
    }

    #[test]
    fn induce_examples() {
        let r = s2s2();
        let id = induce(&r, &GeneratorImages::new().with("x1^1", &[1, 0]).with("x2^1", &[0, 1])).unwrap();
        assert_eq!(id, GradedAutomorphism::identity(&r));
        let swap = induce(&r, &GeneratorImages::new().with("x1^1", &[0, 1]).with("x2^1", &[1, 0])).unwrap();
        assert_eq!(swap.matrix(2), &IntMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert_eq!(swap.matrix(4), &IntMatrix::from_rows(&[[1]]));

        let s3s3 = GradedRing::sphere_product(&[(3, 2)]).unwrap();
        let a = induce(&s3s3, &GeneratorImages::new().with("x1^1", &[2, 1]).with("x2^1", &[1, 1])).unwrap();
        // (2x1 + x2)(x1 + x2) = 2 x1x2 + x2x1 = x1x2
        assert_eq!(a.matrix(6), &IntMatrix::from_rows(&[[1]]));
    }

    #[test]
    fn induce_rejects_bad_images() {
        let r = s2s2();
        let err = induce(&r, &GeneratorImages::new().with("x1^1", &[1, 1]).with("x2^1", &[0, 1])).unwrap_err();
        assert_eq!(err, AutomorphismError::NotRingMap { label: "x1^1".into(), nilpotency: 2 });
        let t2 = GradedRing::torus(2).unwrap();
        let err = induce(&t2, &GeneratorImages::new().with("x1^1", &[2, 0]).with("x2^1", &[0, 1])).unwrap_err();
        assert!(matches!(err, AutomorphismError::NotInvertible { degree: 1, .. }));
        let err = induce(&t2, &GeneratorImages::new().with("x1^1", &[1, 0])).unwrap_err();
        assert_eq!(err, AutomorphismError::MissingImage("x2^1".into()));
    }

    #[test]
    fn cup_preservation() {
        let r = s2s2();
        let shear = GradedAutomorphism::from_matrices(
            &r,
            vec![IntMatrix::identity(1), IntMatrix::zeros(0, 0), IntMatrix::from_rows(&[[1, 1], [0, 1]]), IntMatrix::zeros(0, 0), IntMatrix::identity(1)],
        )
        .unwrap();
        assert!(!check_cup_preservation(&r, &shear).is_empty());
        let neg = GradedAutomorphism::from_matrices(
            &r,
            vec![IntMatrix::identity(1), IntMatrix::zeros(0, 0), IntMatrix::scalar(2, -1), IntMatrix::zeros(0, 0), IntMatrix::identity(1)],
        )
        .unwrap();
        assert!(check_cup_preservation(&r, &neg).is_empty());
    }

    #[test]
    fn duality() {
        let t2 = GradedRing::torus(2).unwrap();
        let cat = induce(&t2, &GeneratorImages::new().with("x1^1", &[2, 1]).with("x2^1", &[1, 1])).unwrap();
        assert!(duality_check(&t2, &cat));
        let r = s2s2();
        let hyp = GradedAutomorphism::from_matrices(
            &r,
            vec![IntMatrix::identity(1), IntMatrix::zeros(0, 0), IntMatrix::from_rows(&[[2, 1], [1, 1]]), IntMatrix::zeros(0, 0), IntMatrix::identity(1)],
        )
        .unwrap();
        assert!(!duality_check(&r, &hyp));
    }

    #[test]
    fn description_round_trip() {
        let t2 = GradedRing::torus(2).unwrap();
        let cat = induce(&t2, &GeneratorImages::new().with("x1^1", &[2, 1]).with("x2^1", &[1, 1])).unwrap();
        let json = serde_json::to_string(&cat).unwrap();
        let input: AutomorphismInput = serde_json::from_str(&json).unwrap();
        assert_eq!(input.resolve(&t2).unwrap(), cat);
        let images: AutomorphismInput = serde_json::from_str(r#"{"images":{"x1^1":[2,1],"x2^1":[1,1]}}"#).unwrap();
        assert_eq!(images.resolve(&t2).unwrap(), cat);
        let missing: AutomorphismInput = serde_json::from_str(r#"{"degree_matrices":{"2":[[1]]}}"#).unwrap();
        assert_eq!(missing.resolve(&t2).unwrap_err(), AutomorphismError::MissingDegree(1));
    }

    fn brute_force(q: i64, det: DetConstraint, fix_top: bool, bound: i64) -> Vec<IntMatrix> {
        let g = rank2_gram(q);
        let mut out = Vec::new();
        let range = -bound..=bound;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    for d in range.clone() {
                        let m = IntMatrix::from_rows(&[[a, c], [b, d]]);
                        let dt = a * d - b * c;
                        if !det.admits(dt) {
                            continue;
                        }
                        let lhs = m.transpose().matmul(&g).matmul(&m);
                        let ok = lhs == g || (!fix_top && lhs == g.neg());
                        if ok {
                            out.push(m);
                        }
                    }
                }
            }
        }
        matrix::sort_by_order(&mut out);
        out
    }

    #[test]
    fn rank2_solver_matches_brute_force() {
        for q in -5..=5 {
            for det in [DetConstraint::Plus, DetConstraint::Minus, DetConstraint::Both] {
                for fix_top in [true, false] {
                    let closed: Vec<IntMatrix> =
                        solve_rank2_middle(q, det, fix_top).into_iter().filter(|m| m.max_abs_entry() <= BigInt::from(3)).collect();
                    assert_eq!(closed, brute_force(q, det, fix_top, 3), "q={q} det={det:?} fix_top={fix_top}");
                }
            }
        }
    }

    #[test]
    fn rank2_normalizations() {
        let id = IntMatrix::identity(2);
        for q in -4..=4 {
            assert_eq!(solve_rank2_middle(q, DetConstraint::Plus, true), vec![id.clone(), id.neg()]);
        }
        let all = solve_rank2_middle(0, DetConstraint::Both, false);
        assert_eq!(all.len(), 8);
        for m in &all {
            let mut nonzero = m.entries().iter().filter(|x| !x.is_zero());
            assert!(nonzero.all(|x| x.abs().is_one()));
            assert_eq!(m.entries().iter().filter(|x| !x.is_zero()).count(), 2);
        }
    }
}
