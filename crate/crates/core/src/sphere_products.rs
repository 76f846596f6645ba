//! Products of spheres `(S^{d_1})^{n_1} × … × (S^{d_m})^{n_m}`: splittings,
//! the invariant filtration, the diagonal block decomposition of the induced
//! maps and the two Lefschetz-based checkers built on it.
//!
//! `A_p` denotes the action on the degree-`d_p` generators. After passing to
//! a power, even-degree generators are fixed, so every diagonal block of
//! `f^{*d}` is a Kronecker product of exterior powers of the odd `A_p`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::{induce, GeneratorImages, GradedAutomorphism};
use crate::error::SphereProductError;
use crate::graded_ring::GradedRing;
use crate::lefschetz::{self, Convention, LefschetzSequence, SpectralSummary, TraceFamily};
use crate::matrix::IntMatrix;
use crate::poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub dim: u32,
    pub count: u32,
}

/// Wire form `{"factors": [{"dim": 1, "count": 2}, ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecDescription", into = "SpecDescription")]
pub struct SphereProductSpec {
    factors: Vec<Factor>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDescription {
    pub factors: Vec<Factor>,
}

impl TryFrom<SpecDescription> for SphereProductSpec {
    type Error = SphereProductError;

    fn try_from(d: SpecDescription) -> Result<Self, Self::Error> {
        SphereProductSpec::new(d.factors)
    }
}

impl From<SphereProductSpec> for SpecDescription {
    fn from(s: SphereProductSpec) -> Self {
        SpecDescription { factors: s.factors }
    }
}

/// Action on the generators of each odd sphere dimension, keyed by dimension.
pub type GeneratorBlocks = BTreeMap<u32, IntMatrix>;

impl SphereProductSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self, SphereProductError> {
        if factors.is_empty() {
            return Err(SphereProductError::Empty);
        }
        let dims: Vec<u32> = factors.iter().map(|f| f.dim).collect();
        if dims[0] == 0 || dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SphereProductError::Dimensions(dims));
        }
        if let Some(f) = factors.iter().find(|f| f.count == 0) {
            return Err(SphereProductError::ZeroCount { dim: f.dim });
        }
        Ok(SphereProductSpec { factors })
    }

    /// From `(dim, count)` pairs.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self, SphereProductError> {
        Self::new(pairs.iter().map(|&(dim, count)| Factor { dim, count }).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dimension(&self) -> u32 {
        self.factors.iter().map(|f| f.dim * f.count).sum()
    }

    /// Number of even-degree generators.
    pub fn e(&self) -> u32 {
        self.factors.iter().filter(|f| f.dim % 2 == 0).map(|f| f.count).sum()
    }

    pub fn ring(&self) -> GradedRing {
        let pairs: Vec<(u32, u32)> = self.factors.iter().map(|f| (f.dim, f.count)).collect();
        GradedRing::sphere_product(&pairs).expect("validated spec yields a valid ring")
    }

    pub fn count_of(&self, dim: u32) -> Option<u32> {
        self.factors.iter().find(|f| f.dim == dim).map(|f| f.count)
    }

    /// Checks shapes and unimodularity; even dimensions only accept the identity.
    pub fn validate_blocks(&self, blocks: &GeneratorBlocks) -> Result<(), SphereProductError> {
        for (&dim, a) in blocks {
            let n = self.count_of(dim).ok_or(SphereProductError::UnknownBlock { dim })? as usize;
            if a.rows() != n || a.cols() != n {
                return Err(SphereProductError::BlockShape { dim, expected: n, rows: a.rows(), cols: a.cols() });
            }
            if dim % 2 == 0 && !a.is_identity() {
                return Err(SphereProductError::Precondition(format!(
                    "block for the even dimension {dim} must be the identity (pass to a power first)"
                )));
            }
            let det = a.det();
            if det.abs() != BigInt::one() {
                return Err(SphereProductError::BlockNotUnimodular { dim, det });
            }
        }
        for f in &self.factors {
            if f.dim % 2 == 1 && !blocks.contains_key(&f.dim) {
                return Err(SphereProductError::MissingBlock { dim: f.dim });
            }
        }
        Ok(())
    }

    /// Hyperbolic witness blocks: the companion matrix of `xⁿ - x - 1` on
    /// each odd factor with `n ≥ 2`, `[1]` when `n = 1`.
    pub fn witness_blocks(&self) -> GeneratorBlocks {
        self.factors
            .iter()
            .filter(|f| f.dim % 2 == 1)
            .map(|f| (f.dim, witness_block(f.count as usize)))
            .collect()
    }

    /// Generator images that act by `A_p` on odd generators and fix the even ones.
    pub fn generator_images(&self, blocks: &GeneratorBlocks) -> Result<GeneratorImages, SphereProductError> {
        self.validate_blocks(blocks)?;
        Ok(GeneratorImages::from_group_blocks(&self.ring(), blocks)?)
    }

    pub fn induced_automorphism(&self, blocks: &GeneratorBlocks) -> Result<(GradedRing, GradedAutomorphism), SphereProductError> {
        let ring = self.ring();
        let aut = induce(&ring, &self.generator_images(blocks)?)?;
        Ok((ring, aut))
    }
}

pub fn witness_block(n: usize) -> IntMatrix {
    if n < 2 {
        return IntMatrix::identity(n);
    }
    let mut c = IntMatrix::zeros(n, n);
    for i in 0..n - 1 {
        c[(i + 1, i)] = BigInt::one();
    }
    c[(0, n - 1)] = BigInt::one();
    c[(1, n - 1)] = BigInt::one();
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Splitting {
    pub alpha: Vec<u32>,
    pub degree: u32,
    /// Zero on every even-dimensional factor.
    pub is_odd: bool,
    /// `degree mod 2`.
    pub parity: u32,
}

impl Splitting {
    fn new(spec: &SphereProductSpec, alpha: Vec<u32>) -> Self {
        let degree = alpha.iter().zip(&spec.factors).map(|(a, f)| a * f.dim).sum::<u32>();
        let is_odd = alpha.iter().zip(&spec.factors).all(|(a, f)| f.dim % 2 == 1 || *a == 0);
        Splitting { alpha, degree, is_odd, parity: degree % 2 }
    }

    /// Keeps only the odd-dimensional coordinates.
    pub fn odd_part(&self, spec: &SphereProductSpec) -> Splitting {
        let alpha = self.alpha.iter().zip(&spec.factors).map(|(a, f)| if f.dim % 2 == 1 { *a } else { 0 }).collect();
        Splitting::new(spec, alpha)
    }
}

/// Splittings of `d`, smallest first (lexicographic on `α`).
pub fn enumerate_splittings(spec: &SphereProductSpec, d: u32) -> Vec<Splitting> {
    let mut out = Vec::new();
    let mut alpha = vec![0u32; spec.factors.len()];
    fn rec(spec: &SphereProductSpec, p: usize, rest: u32, alpha: &mut Vec<u32>, out: &mut Vec<Splitting>) {
        if p == spec.factors.len() {
            if rest == 0 {
                out.push(Splitting::new(spec, alpha.clone()));
            }
            return;
        }
        let f = spec.factors[p];
        for a in 0..=f.count.min(rest / f.dim) {
            alpha[p] = a;
            rec(spec, p + 1, rest - a * f.dim, alpha, out);
        }
        alpha[p] = 0;
    }
    rec(spec, 0, d, &mut alpha, &mut out);
    out
}

/// All odd splittings of every degree.
pub fn odd_splittings(spec: &SphereProductSpec) -> Vec<Splitting> {
    (0..=spec.dimension()).flat_map(|d| enumerate_splittings(spec, d)).filter(|s| s.is_odd).collect()
}

fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Number of copies of `B(α)` in the diagonal block of splitting `α`.
pub fn block_multiplicity(spec: &SphereProductSpec, alpha: &Splitting) -> u64 {
    alpha.alpha.iter().zip(&spec.factors).filter(|(_, f)| f.dim % 2 == 0).map(|(a, f)| binomial(f.count, *a)).product()
}

/// `B(α) = ⊗_{odd d_p} Λ^{α_p}(A_p)`, factors in increasing `p`.
pub fn block(spec: &SphereProductSpec, blocks: &GeneratorBlocks, alpha: &Splitting) -> Result<IntMatrix, SphereProductError> {
    spec.validate_blocks(blocks)?;
    block_unchecked(spec, blocks, alpha)
}

fn block_unchecked(spec: &SphereProductSpec, blocks: &GeneratorBlocks, alpha: &Splitting) -> Result<IntMatrix, SphereProductError> {
    if alpha.alpha.len() != spec.factors.len() || alpha.alpha.iter().zip(&spec.factors).any(|(a, f)| *a > f.count) {
        return Err(SphereProductError::BadSplitting { alpha: alpha.alpha.clone() });
    }
    let mut b = IntMatrix::identity(1);
    for (a, f) in alpha.alpha.iter().zip(&spec.factors) {
        if f.dim % 2 == 1 && *a > 0 {
            let ap = blocks.get(&f.dim).ok_or(SphereProductError::MissingBlock { dim: f.dim })?;
            b = b.kronecker(&ap.exterior_power(*a as usize)?);
        }
    }
    Ok(b)
}

/// Full diagonal block of splitting `α` in the ordered basis: Kronecker
/// product over all factors, with identities on the even ones.
pub fn diagonal_block(spec: &SphereProductSpec, blocks: &GeneratorBlocks, alpha: &Splitting) -> Result<IntMatrix, SphereProductError> {
    let mut b = IntMatrix::identity(1);
    for (a, f) in alpha.alpha.iter().zip(&spec.factors) {
        let piece = if f.dim % 2 == 1 {
            let ap = blocks.get(&f.dim).ok_or(SphereProductError::MissingBlock { dim: f.dim })?;
            ap.exterior_power(*a as usize)?
        } else {
            IntMatrix::identity(binomial(f.count, *a) as usize)
        };
        b = b.kronecker(&piece);
    }
    Ok(b)
}

/// `A1 ⊗ A3^∧2`, or `Id_Z` for an even splitting.
pub fn block_symbol(spec: &SphereProductSpec, alpha: &Splitting) -> String {
    let parts: Vec<String> = alpha
        .alpha
        .iter()
        .zip(&spec.factors)
        .filter(|(a, f)| f.dim % 2 == 1 && **a > 0)
        .map(|(a, f)| if *a == 1 { format!("A{}", f.dim) } else { format!("A{}^∧{}", f.dim, a) })
        .collect();
    if parts.is_empty() {
        "Id_Z".to_string()
    } else {
        parts.join(" ⊗ ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockEntry {
    pub splitting: Splitting,
    pub symbol: String,
    /// Copies of `B(α)` contributed by this splitting.
    pub multiplicity: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeBlocks {
    pub degree: u32,
    pub entries: Vec<BlockEntry>,
}

impl DegreeBlocks {
    /// Block symbols with multiplicity expanded, in basis order.
    pub fn symbols(&self) -> Vec<String> {
        self.entries.iter().flat_map(|e| std::iter::repeat(e.symbol.clone()).take(e.multiplicity as usize)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Appearance {
    pub splitting: Splitting,
    pub symbol: String,
    pub appearances: u64,
    pub parity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub spec: SphereProductSpec,
    pub e: u32,
    pub degrees: Vec<DegreeBlocks>,
    /// How often each odd-splitting block appears across all degrees.
    pub appearances: Vec<Appearance>,
}

impl BlockDecomposition {
    /// The paper-style layout: one `f^{*d} = upp.tr(...)` line per degree,
    /// consecutive identity blocks merged as `Id_Z^k`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for db in &self.degrees {
            let symbols = db.symbols();
            let mut merged: Vec<String> = Vec::new();
            let mut run = 0;
            let flush = |run: &mut usize, merged: &mut Vec<String>| {
                match *run {
                    0 => {}
                    1 => merged.push("Id_Z".into()),
                    k => merged.push(format!("Id_Z^{k}")),
                }
                *run = 0;
            };
            for s in symbols {
                if s == "Id_Z" {
                    run += 1;
                } else {
                    flush(&mut run, &mut merged);
                    merged.push(s);
                }
            }
            flush(&mut run, &mut merged);
            let body = if merged.len() == 1 { merged[0].clone() } else { format!("upp.tr({})", merged.join(", ")) };
            let _ = writeln!(out, "f^{{*{}}} = {}", db.degree, body);
        }
        out
    }

    /// Block-diagonal part of `f^{*d}` in the ordered basis.
    pub fn assembled_diagonal(&self, blocks: &GeneratorBlocks, d: u32) -> Result<IntMatrix, SphereProductError> {
        let parts = enumerate_splittings(&self.spec, d)
            .iter()
            .map(|a| diagonal_block(&self.spec, blocks, a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntMatrix::block_diagonal(&parts))
    }
}

/// Per-degree diagonal blocks, with matrices when `blocks` is given. Checks
/// that each odd-splitting block occurs `2^e` times, always in one parity.
pub fn block_table(spec: &SphereProductSpec, blocks: Option<&GeneratorBlocks>) -> Result<BlockDecomposition, SphereProductError> {
    if let Some(b) = blocks {
        spec.validate_blocks(b)?;
    }
    let mut degrees = Vec::new();
    let mut tally: BTreeMap<Vec<u32>, (Splitting, u64, Option<u32>, bool)> = BTreeMap::new();
    for d in 0..=spec.dimension() {
        let mut entries = Vec::new();
        for s in enumerate_splittings(spec, d) {
            let odd = s.odd_part(spec);
            let multiplicity = block_multiplicity(spec, &s);
            let block = blocks.map(|b| block_unchecked(spec, b, &odd)).transpose()?;
            let slot = tally.entry(odd.alpha.clone()).or_insert((odd.clone(), 0, None, true));
            slot.1 += multiplicity;
            match slot.2 {
                None => slot.2 = Some(s.parity),
                Some(p) if p != s.parity => slot.3 = false,
                _ => {}
            }
            entries.push(BlockEntry { symbol: block_symbol(spec, &s), splitting: s, multiplicity, block });
        }
        degrees.push(DegreeBlocks { degree: d, entries });
    }
    let expected = 1u64 << spec.e();
    let mut appearances = Vec::new();
    for (_, (odd, count, parity, consistent)) in tally {
        if count != expected || !consistent {
            return Err(SphereProductError::MultiplicityLaw { alpha: odd.alpha, appearances: count, expected });
        }
        appearances.push(Appearance { symbol: block_symbol(spec, &odd), parity: parity.unwrap_or(0), splitting: odd, appearances: count });
    }
    Ok(BlockDecomposition { spec: spec.clone(), e: spec.e(), degrees, appearances })
}

/// Smallest `l` with `(f*)^l` fixing every even-degree generator modulo the
/// filtration, i.e. the leading `n_p × n_p` block of `M_{d_p}^l` is the identity.
pub fn even_generator_order(spec: &SphereProductSpec, aut: &GradedAutomorphism) -> Result<u64, SphereProductError> {
    let max_n = spec.factors.iter().map(|f| f.count as u64).max().unwrap_or(1);
    let total: u32 = spec.factors.iter().map(|f| f.count).sum();
    let fact: u64 = (1..=max_n).product();
    let bound = 2u64.saturating_mul(fact).saturating_mul(1u64.checked_shl(total).unwrap_or(u64::MAX));
    let mut gens = Vec::new();
    for f in spec.factors.iter().filter(|f| f.dim % 2 == 0) {
        let m = aut.matrix(f.dim);
        let idx: Vec<usize> = (0..f.count as usize).collect();
        let a = m.submatrix(&idx, &idx);
        // A non-cyclotomic factor means infinite order; no power can work.
        let p = poly::charpoly(&a);
        let cyclo: usize = poly::cyclotomic_factors(&p).iter().map(|(k, mult)| poly::euler_phi(*k as u64) as usize * mult).sum();
        if cyclo != a.rows() {
            return Err(SphereProductError::OrderBoundExceeded { bound });
        }
        gens.push(a);
    }
    let mut powers = gens.clone();
    let mut l = 1u64;
    loop {
        if powers.iter().all(IntMatrix::is_identity) {
            return Ok(l);
        }
        l += 1;
        if l > bound {
            return Err(SphereProductError::OrderBoundExceeded { bound });
        }
        for (p, g) in powers.iter_mut().zip(&gens) {
            *p = p.matmul(g);
        }
    }
}

/// Every `M_d` maps each `span B^d(α)` (splittings `≥ α`) into itself.
pub fn filtration_invariance_test(spec: &SphereProductSpec, aut: &GradedAutomorphism) -> bool {
    let ring = spec.ring();
    (0..=ring.top_degree()).all(|d| {
        let basis = ring.basis(d);
        let split: Vec<Vec<u32>> = basis.iter().map(|m| ring.splitting(m)).collect();
        let m = aut.matrix(d);
        (0..basis.len()).all(|j| (0..basis.len()).all(|i| split[i] >= split[j] || m[(i, j)].is_zero()))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SphereVerdict {
    NoAnosov,
    NoTransitiveAnosov,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedTerm {
    pub splitting: Splitting,
    pub symbol: String,
    pub sign: i32,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem16Report {
    pub e: u32,
    pub reductions: Vec<String>,
    pub terms: Vec<ReducedTerm>,
    pub sequence: LefschetzSequence,
    /// The generic per-degree computation reproduced `sequence` exactly.
    pub generic_agrees: bool,
    pub summary: SpectralSummary,
    /// Leading coefficient `2^e·|w_s|` of `|Fix(f^l)|`, if the growth is exponential.
    pub leading_coefficient: Option<f64>,
    pub w: Option<f64>,
    pub lambda: Option<f64>,
    pub verdict: SphereVerdict,
}

fn normalize_dets(blocks: &GeneratorBlocks, reductions: &mut Vec<String>) -> GeneratorBlocks {
    if blocks.values().any(|a| a.det().is_negative()) {
        reductions.push("f -> f^2 (det A_p = 1 for every p)".to_string());
        blocks.iter().map(|(k, a)| (*k, a.pow(2))).collect()
    } else {
        blocks.clone()
    }
}

/// `Λ(f^l) = Σ_{odd α} (-1)^{ε(α)} 2^e Tr(B(α)^{-l})` and its growth.
pub fn theorem16_check(spec: &SphereProductSpec, blocks: &GeneratorBlocks, len: u64) -> Result<Theorem16Report, SphereProductError> {
    if spec.e() == 0 {
        return Err(SphereProductError::Precondition("the product has no even-dimensional sphere (e = 0)".into()));
    }
    spec.validate_blocks(blocks)?;
    let mut reductions = vec!["even-degree generators fixed (finite power)".to_string()];
    let blocks = normalize_dets(blocks, &mut reductions);
    let weight = 1u64 << spec.e();
    let mut fam = TraceFamily::default();
    let mut terms = Vec::new();
    for s in odd_splittings(spec) {
        let b = block_unchecked(spec, &blocks, &s)?;
        let sign = if s.parity == 0 { 1 } else { -1 };
        fam.push(BigInt::from(sign) * BigInt::from(weight), b.inverse_unimodular()?);
        terms.push(ReducedTerm { symbol: block_symbol(spec, &s), splitting: s, sign, weight });
    }
    let values = fam.sequence(len);
    let (_, aut) = spec.induced_automorphism(&blocks)?;
    let generic = lefschetz::lefschetz_sequence(&aut, len, Convention::Inverse)?;
    let generic_agrees = generic.values == values;
    let summary = lefschetz::analyze_family(&fam, lefschetz::DEFAULT_TOLERANCE, len.min(lefschetz::DEFAULT_LENGTH))?;
    let sequence = LefschetzSequence { convention: Convention::Inverse, values };
    let (verdict, lead) = match summary.leading_group() {
        Some(g) if !sequence.is_identically_zero() => (SphereVerdict::NoTransitiveAnosov, Some((g.coefficient, g.modulus))),
        _ => (SphereVerdict::NoAnosov, None),
    };
    Ok(Theorem16Report {
        e: spec.e(),
        reductions,
        terms,
        generic_agrees,
        leading_coefficient: lead.map(|l| l.0),
        w: lead.map(|l| l.0 / weight as f64),
        lambda: lead.map(|l| l.1),
        summary,
        sequence,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairedBlock {
    pub degree: u32,
    pub minus: Vec<u32>,
    pub plus: Vec<u32>,
    pub symbol: String,
    pub blocks_equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem17Report {
    pub k: u32,
    pub reductions: Vec<String>,
    pub pairs: Vec<PairedBlock>,
    /// Sequence assembled from the paired blocks.
    pub paired_sequence: LefschetzSequence,
    /// Sequence from the full per-degree traces.
    pub generic_sequence: LefschetzSequence,
    pub identically_zero: bool,
    pub verdict: Option<SphereVerdict>,
}

/// Cancellation through a single odd sphere `S^k`: every splitting with
/// `α_k = 0` in degree `d` pairs with the one with `α_k = 1` in degree
/// `d + k`, the two diagonal blocks coincide, and their traces enter with
/// opposite signs.
pub fn theorem17_check(spec: &SphereProductSpec, blocks: &GeneratorBlocks, k: u32, len: u64) -> Result<Theorem17Report, SphereProductError> {
    if k % 2 == 0 {
        return Err(SphereProductError::Precondition(format!("k = {k} is even")));
    }
    let p = spec.factors.iter().position(|f| f.dim == k).ok_or_else(|| SphereProductError::Precondition(format!("S^{k} is not a factor")))?;
    if spec.factors[p].count != 1 {
        return Err(SphereProductError::Precondition(format!("S^{k} appears {} times, expected once", spec.factors[p].count)));
    }
    spec.validate_blocks(blocks)?;
    let mut reductions = vec!["even-degree generators fixed (finite power)".to_string()];
    let blocks = normalize_dets(blocks, &mut reductions);
    if !blocks[&k].is_identity() {
        return Err(SphereProductError::Precondition(format!("A_{k} must be [1] after normalization")));
    }
    let mut values = vec![BigInt::zero(); len as usize];
    let mut pairs = Vec::new();
    for d in 0..=spec.dimension() {
        for s in enumerate_splittings(spec, d).into_iter().filter(|s| s.alpha[p] == 0) {
            let mut up = s.alpha.clone();
            up[p] = 1;
            let partner = Splitting::new(spec, up);
            let a = diagonal_block(spec, &blocks, &s)?;
            let b = diagonal_block(spec, &blocks, &partner)?;
            let equal = a == b;
            let (ai, bi) = (a.inverse_unimodular()?, b.inverse_unimodular()?);
            let sign_a = if d % 2 == 0 { 1 } else { -1 };
            let sign_b = if (d + k) % 2 == 0 { 1 } else { -1 };
            let (mut pa, mut pb) = (ai.clone(), bi.clone());
            for slot in values.iter_mut() {
                *slot += pa.trace() * sign_a + pb.trace() * sign_b;
                pa = pa.matmul(&ai);
                pb = pb.matmul(&bi);
            }
            pairs.push(PairedBlock { degree: d, symbol: block_symbol(spec, &s), minus: s.alpha, plus: partner.alpha, blocks_equal: equal });
        }
    }
    let (_, aut) = spec.induced_automorphism(&blocks)?;
    let generic_sequence = lefschetz::lefschetz_sequence(&aut, len, Convention::Inverse)?;
    let paired_sequence = LefschetzSequence { convention: Convention::Inverse, values };
    let identically_zero = paired_sequence.is_identically_zero() && generic_sequence.is_identically_zero();
    Ok(Theorem17Report {
        k,
        reductions,
        verdict: identically_zero.then_some(SphereVerdict::NoAnosov),
        pairs,
        paired_sequence,
        generic_sequence,
        identically_zero,
    })
}

/// A cup-preserving automorphism of `(S¹)³ × S³` that mixes the `S³` class
/// with the product of the circle classes, for filtration tests.
pub fn mixing_example() -> (SphereProductSpec, GradedAutomorphism) {
    let spec = SphereProductSpec::from_pairs(&[(1, 3), (3, 1)]).expect("valid spec");
    let ring = spec.ring();
    let a1 = witness_block(3);
    let mut blocks = GeneratorBlocks::new();
    blocks.insert(1, a1);
    blocks.insert(3, IntMatrix::identity(1));
    let mut images = GeneratorImages::from_group_blocks(&ring, &blocks).expect("shapes match");
    // x1^2 ↦ x1^2 + x1^1 x2^1 x3^1
    let h3 = ring.basis(3);
    let mut v = vec![0i64; h3.len()];
    v[ring.position(&ring.generator_monomial(3))] = 1;
    v[ring.position(&ring.parse_monomial("x1^1*x2^1*x3^1").expect("labels exist"))] = 1;
    images = images.with("x1^2", &v);
    let aut = induce(&ring, &images).expect("mixing map is a ring automorphism");
    (spec, aut)
}

/// Matrix symbols for display, e.g. `A3 = [[2, 1], [1, 1]]`.
pub fn describe_blocks(blocks: &GeneratorBlocks) -> Vec<String> {
    blocks.iter().map(|(d, a)| format!("A{d} = {a}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> SphereProductSpec {
        SphereProductSpec::from_pairs(&[(1, 2), (2, 2), (3, 2)]).unwrap()
    }

    fn cat() -> IntMatrix {
        IntMatrix::from_rows(&[[2, 1], [1, 1]])
    }

    #[test]
    fn splittings_in_order() {
        let s = example();
        let alphas: Vec<Vec<u32>> = enumerate_splittings(&s, 4).into_iter().map(|x| x.alpha).collect();
        assert_eq!(alphas, vec![vec![0, 2, 0], vec![1, 0, 1], vec![2, 1, 0]]);
        let big = SphereProductSpec::from_pairs(&[(1, 4), (2, 2), (3, 2)]).unwrap();
        let alphas: Vec<Vec<u32>> = enumerate_splittings(&big, 3).into_iter().map(|x| x.alpha).collect();
        assert_eq!(alphas, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);
        assert_eq!(enumerate_splittings(&s, 0).len(), 1);
    }

    #[test]
    fn blocks_and_symbols() {
        let s = example();
        let mut b = GeneratorBlocks::new();
        b.insert(1, witness_block(2));
        b.insert(3, cat());
        let a = Splitting::new(&s, vec![1, 0, 1]);
        assert_eq!(block(&s, &b, &a).unwrap(), witness_block(2).kronecker(&cat()));
        assert_eq!(block_symbol(&s, &a), "A1 ⊗ A3");
        let top3 = Splitting::new(&s, vec![0, 0, 2]);
        assert_eq!(block(&s, &b, &top3).unwrap(), IntMatrix::from_rows(&[[1]]));
        let even = Splitting::new(&s, vec![0, 2, 0]);
        assert_eq!(block(&s, &b, &even).unwrap(), IntMatrix::identity(1));
        assert_eq!(block_symbol(&s, &even), "Id_Z");
        b.insert(3, IntMatrix::identity(3));
        assert!(matches!(block(&s, &b, &a), Err(SphereProductError::BlockShape { .. })));
    }

    #[test]
    fn table_multiplicities() {
        let t = block_table(&example(), None).unwrap();
        assert!(t.appearances.iter().all(|a| a.appearances == 4));
        let torus = SphereProductSpec::from_pairs(&[(1, 4)]).unwrap();
        let tt = block_table(&torus, None).unwrap();
        assert_eq!(tt.e, 0);
        for db in &tt.degrees {
            assert_eq!(db.entries.len(), 1);
            assert_eq!(db.entries[0].multiplicity, 1);
        }
    }

    #[test]
    fn diagonal_blocks_match_induced_maps() {
        let s = example();
        let mut b = GeneratorBlocks::new();
        b.insert(1, witness_block(2));
        b.insert(3, cat());
        let (ring, aut) = s.induced_automorphism(&b).unwrap();
        let table = block_table(&s, Some(&b)).unwrap();
        for d in 0..=ring.top_degree() {
            let diag = table.assembled_diagonal(&b, d).unwrap();
            let m = aut.matrix(d);
            // compare on the diagonal splitting blocks of the induced matrix
            let basis = ring.basis(d);
            let split: Vec<Vec<u32>> = basis.iter().map(|x| ring.splitting(x)).collect();
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    if split[i] == split[j] {
                        assert_eq!(m[(i, j)], diag[(i, j)], "d={d} ({i},{j})");
                    }
                }
            }
        }
        assert!(filtration_invariance_test(&s, &aut));
    }

    #[test]
    fn even_orders() {
        let s = SphereProductSpec::from_pairs(&[(2, 2)]).unwrap();
        let ring = s.ring();
        assert_eq!(even_generator_order(&s, &GradedAutomorphism::identity(&ring)).unwrap(), 1);
        let swap = induce(&ring, &GeneratorImages::new().with("x1^1", &[0, 1]).with("x2^1", &[1, 0])).unwrap();
        assert_eq!(even_generator_order(&s, &swap).unwrap(), 2);
        let rot = induce(&ring, &GeneratorImages::new().with("x1^1", &[0, 1]).with("x2^1", &[-1, 0])).unwrap();
        assert_eq!(even_generator_order(&s, &rot).unwrap(), 4);
    }

    #[test]
    fn mixing_breaks_under_permuted_basis() {
        let (spec, aut) = mixing_example();
        assert!(filtration_invariance_test(&spec, &aut));
        let ring = spec.ring();
        let n3 = ring.betti(3);
        let mut mats = aut.matrices().to_vec();
        let perm: Vec<usize> = (0..n3).rev().collect();
        mats[3] = mats[3].permute_basis(&perm);
        let permuted = GradedAutomorphism::from_matrices(&ring, mats).unwrap();
        assert!(!filtration_invariance_test(&spec, &permuted));
    }

    #[test]
    fn theorem16_example() {
        let s = SphereProductSpec::from_pairs(&[(2, 1), (3, 2)]).unwrap();
        let mut b = GeneratorBlocks::new();
        b.insert(3, cat());
        let r = theorem16_check(&s, &b, 20).unwrap();
        assert!(r.generic_agrees);
        assert_eq!(r.verdict, SphereVerdict::NoTransitiveAnosov);
        assert!((r.leading_coefficient.unwrap() - 2.0).abs() < 1e-9);
        let s2s2 = SphereProductSpec::from_pairs(&[(2, 2)]).unwrap();
        let r = theorem16_check(&s2s2, &GeneratorBlocks::new(), 20).unwrap();
        assert_eq!(r.verdict, SphereVerdict::NoAnosov);
        assert!(r.sequence.values.iter().all(|v| *v == BigInt::from(4)));
    }

    #[test]
    fn theorem17_example() {
        let s = SphereProductSpec::from_pairs(&[(3, 2), (5, 1)]).unwrap();
        let mut b = GeneratorBlocks::new();
        b.insert(3, cat());
        b.insert(5, IntMatrix::identity(1));
        let r = theorem17_check(&s, &b, 5, 20).unwrap();
        assert!(r.identically_zero);
        assert!(r.pairs.iter().all(|p| p.blocks_equal));
        assert_eq!(r.paired_sequence.values, r.generic_sequence.values);
        let s1s2 = SphereProductSpec::from_pairs(&[(1, 1), (2, 1)]).unwrap();
        let mut b = GeneratorBlocks::new();
        b.insert(1, IntMatrix::from_rows(&[[-1]]));
        let r = theorem17_check(&s1s2, &b, 1, 10).unwrap();
        assert!(r.identically_zero);
        assert_eq!(r.reductions.len(), 2);
        assert!(theorem17_check(&s, &b, 3, 5).is_err());
    }
}
