#![allow(dead_code)]

use anosov_core::automorphism::{induce, GeneratorImages, GradedAutomorphism};
use anosov_core::graded_ring::{GradedRing, Monomial, SignedMonomial};
use anosov_core::error::SpecError;
use anosov_core::intersection_form::{IsometryEnumeration, UnimodularForm};
use anosov_core::lefschetz::{lefschetz_sequence, Convention};
use anosov_core::matrix::{IntMatrix, JsonInt};
use anosov_core::sphere_products::{block_table, SphereProductSpec};
use anosov_core::toral_oracle;
use anosov_core::verdict::{apply_rules, betti_profile, euler_characteristic, recheck, Conclusion, Hypotheses, ManifoldSpec, Shape};
use num_bigint::BigInt;
use rand::Rng;

/// Sign of `a ⌣ b` computed by sorting the odd generators of the
/// concatenated word, or `None` when the product vanishes.
pub fn koszul_oracle(ring: &GradedRing, a: &Monomial, b: &Monomial) -> Option<i32> {
    let gens = ring.generators();
    let (ea, eb) = (a.exponents(), b.exponents());
    for i in 0..gens.len() {
        if ea[i] + eb[i] >= gens[i].nilpotency {
            return None;
        }
    }
    let mut inversions = 0;
    for (i, g) in gens.iter().enumerate() {
        if eb[i] == 0 || g.degree % 2 == 0 {
            continue;
        }
        for (j, h) in gens.iter().enumerate().skip(i + 1) {
            if ea[j] > 0 && h.degree % 2 == 1 {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

fn times(ring: &GradedRing, x: &SignedMonomial, c: &Monomial) -> SignedMonomial {
    match x {
        SignedMonomial::Zero => SignedMonomial::Zero,
        SignedMonomial::Term { sign, monomial } => match ring.cup(monomial, c) {
            SignedMonomial::Zero => SignedMonomial::Zero,
            SignedMonomial::Term { sign: s2, monomial: m } => SignedMonomial::Term { sign: sign * s2, monomial: m },
        },
    }
}

fn times_left(ring: &GradedRing, a: &Monomial, x: &SignedMonomial) -> SignedMonomial {
    match x {
        SignedMonomial::Zero => SignedMonomial::Zero,
        SignedMonomial::Term { sign, monomial } => match ring.cup(a, monomial) {
            SignedMonomial::Zero => SignedMonomial::Zero,
            SignedMonomial::Term { sign: s2, monomial: m } => SignedMonomial::Term { sign: sign * s2, monomial: m },
        },
    }
}

/// Sign coherence, graded commutativity and associativity over every
/// basis pair and triple. Returns the number of triples checked.
pub fn check_ring_axioms(ring: &GradedRing) -> Result<usize, String> {
    let all: Vec<Monomial> = (0..=ring.top_degree()).flat_map(|d| ring.basis(d).to_vec()).collect();
    for a in &all {
        for b in &all {
            let ab = ring.cup(a, b);
            let oracle = koszul_oracle(ring, a, b);
            if ab.is_zero() != oracle.is_none() || (!ab.is_zero() && Some(ab.sign()) != oracle) {
                return Err(format!("sign of {} ⌣ {}", ring.format_monomial(a), ring.format_monomial(b)));
            }
            let ba = ring.cup(b, a);
            let koszul = if (a.degree() * b.degree()) % 2 == 0 { 1 } else { -1 };
            let ok = match (&ab, &ba) {
                (SignedMonomial::Zero, SignedMonomial::Zero) => true,
                (SignedMonomial::Term { sign: s1, monomial: m1 }, SignedMonomial::Term { sign: s2, monomial: m2 }) => {
                    m1 == m2 && *s1 == koszul * s2
                }
                _ => false,
            };
            if !ok {
                return Err(format!("graded commutativity of {} and {}", ring.format_monomial(a), ring.format_monomial(b)));
            }
        }
    }
    let mut n = 0;
    for a in &all {
        for b in &all {
            let ab = ring.cup(a, b);
            for c in &all {
                let left = times(ring, &ab, c);
                let right = times_left(ring, a, &ring.cup(b, c));
                if left != right {
                    return Err(format!(
                        "associativity of {}, {}, {}",
                        ring.format_monomial(a),
                        ring.format_monomial(b),
                        ring.format_monomial(c)
                    ));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Sphere products with top degree ≤ `top` and at most `max_gens` generators.
pub fn small_sphere_products(top: u32, max_gens: u32) -> Vec<SphereProductSpec> {
    fn rec(dim: u32, left: u32, gens: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<SphereProductSpec>) {
        if dim > left {
            if !acc.is_empty() {
                out.push(SphereProductSpec::from_pairs(acc).unwrap());
            }
            return;
        }
        rec(dim + 1, left, gens, acc, out);
        let mut count = 1;
        while count * dim <= left && count <= gens {
            acc.push((dim, count));
            rec(dim + 1, left - count * dim, gens - count, acc, out);
            acc.pop();
            count += 1;
        }
    }
    let mut out = Vec::new();
    rec(1, top, max_gens, &mut Vec::new(), &mut out);
    out
}

pub fn ring_family(top: u32, max_gens: u32) -> Vec<GradedRing> {
    let mut rings: Vec<GradedRing> = small_sphere_products(top, max_gens).iter().map(SphereProductSpec::ring).collect();
    for n in 1..=6 {
        rings.push(GradedRing::complex_projective(n).unwrap());
    }
    let cp2 = GradedRing::complex_projective(2).unwrap();
    rings.push(cp2.tensor(&GradedRing::torus(2).unwrap()).unwrap());
    rings.push(cp2.tensor(&GradedRing::sphere(3).unwrap()).unwrap());
    rings.push(GradedRing::complex_projective(3).unwrap().tensor(&GradedRing::torus(3).unwrap()).unwrap());
    rings
}

pub fn functoriality(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix) -> Result<(), String> {
    let n = a.rows();
    let ab = a.matmul(b);
    for k in 0..=n {
        let lhs = ab.exterior_power(k).unwrap();
        let rhs = a.exterior_power(k).unwrap().matmul(&b.exterior_power(k).unwrap());
        if lhs != rhs {
            return Err(format!("Λ^{k}(AB) ≠ Λ^{k}A Λ^{k}B"));
        }
        if IntMatrix::identity(n).exterior_power(k).unwrap() != IntMatrix::identity(lhs.rows()) {
            return Err(format!("Λ^{k}(I) ≠ I"));
        }
    }
    if a.exterior_power(1).unwrap() != *a {
        return Err("Λ^1 A ≠ A".into());
    }
    if a.exterior_power(n).unwrap() != IntMatrix::from_vec(1, 1, vec![a.det()]).unwrap() {
        return Err("Λ^n A ≠ [det A]".into());
    }
    // (A ⊗ C)(B ⊗ C) = AB ⊗ C²
    let lhs = a.kronecker(c).matmul(&b.kronecker(c));
    let rhs = ab.kronecker(&c.matmul(c));
    if lhs != rhs {
        return Err("mixed product law".into());
    }
    let m = c.rows() as u32;
    let det = a.kronecker(c).det();
    let expected = num_traits::pow(a.det(), m as usize) * num_traits::pow(c.det(), n);
    if det != expected {
        return Err("det(A ⊗ C) ≠ det(A)^m det(C)^n".into());
    }
    Ok(())
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, bound: i64) -> IntMatrix {
    let data: Vec<BigInt> = (0..n * n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    IntMatrix::from_vec(n, n, data).unwrap()
}

pub fn det_identity(a: &IntMatrix) -> Result<(), String> {
    let lhs = toral_oracle::alternating_trace(a);
    let rhs = IntMatrix::identity(a.rows()).sub(a).det();
    if lhs != rhs {
        return Err(format!("Σ(-1)^k Tr Λ^k A = {lhs}, det(I - A) = {rhs}"));
    }
    Ok(())
}

/// A random automorphism of the sphere-product ring: unimodular blocks on
/// the odd generators, a signed permutation of each even group, and random
/// decomposable corrections on odd generators.
pub fn random_induced<R: Rng>(rng: &mut R, spec: &SphereProductSpec) -> GradedAutomorphism {
    let ring = spec.ring();
    let gens = ring.generators().to_vec();
    let mut images = GeneratorImages::new();
    for f in spec.factors() {
        let members: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].degree == f.dim).collect();
        let n = members.len();
        let block = if f.dim % 2 == 1 {
            toral_oracle::random_unimodular(rng, n, 2 * n)
        } else {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let mut m = IntMatrix::zeros(n, n);
            for (j, &i) in perm.iter().enumerate() {
                m[(i, j)] = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
            }
            m
        };
        let basis = ring.basis(f.dim);
        for (col, &g) in members.iter().enumerate() {
            let mut v = vec![BigInt::from(0); basis.len()];
            for (row, &h) in members.iter().enumerate() {
                v[ring.position(&ring.generator_monomial(h))] = block[(row, col)].clone();
            }
            if f.dim % 2 == 1 {
                for (pos, m) in basis.iter().enumerate() {
                    let decomposable = m.exponents().iter().sum::<u32>() >= 2;
                    if decomposable && rng.gen_bool(0.5) {
                        v[pos] += rng.gen_range(-2..=2);
                    }
                }
            }
            images.images.insert(gens[g].label.clone(), v.into_iter().map(JsonInt).collect());
        }
    }
    induce(&ring, &images).expect("random images define a ring automorphism")
}

pub fn torus_automorphism(a: &IntMatrix) -> (GradedRing, GradedAutomorphism) {
    let n = a.rows();
    let ring = GradedRing::torus(n as u32).unwrap();
    let mut images = GeneratorImages::new();
    for j in 0..n {
        images.images.insert(ring.generators()[j].label.clone(), a.column(j).into_iter().map(JsonInt).collect());
    }
    let aut = induce(&ring, &images).unwrap();
    (ring, aut)
}

/// Closure under products and inverses, identity membership, and the
/// isometry defect of every element.
pub fn check_group_closure(q: &IntMatrix, e: &IsometryEnumeration) -> Result<(), String> {
    let n = q.rows();
    let list = &e.isometries;
    if !list.contains(&IntMatrix::identity(n)) {
        return Err("identity missing".into());
    }
    for a in list {
        if a.transpose().matmul(q).matmul(a) != *q || a.det() != BigInt::from(1) {
            return Err(format!("{a} is not a special isometry"));
        }
        let inv = a.inverse_unimodular().map_err(|e| e.to_string())?;
        if !list.contains(&inv) {
            return Err(format!("inverse of {a} missing"));
        }
        for b in list {
            if !list.contains(&a.matmul(b)) {
                return Err(format!("product {a}·{b} missing"));
            }
        }
    }
    Ok(())
}

fn small_shape<R: Rng>(rng: &mut R, max_dim: u32) -> Shape {
    match rng.gen_range(0..4) {
        0 => Shape::Sphere { dim: rng.gen_range(1..=max_dim.max(1)) },
        1 => Shape::Torus { dim: rng.gen_range(1..=max_dim.clamp(1, 4)) },
        2 if max_dim >= 2 => Shape::ComplexProjective { n: rng.gen_range(1..=(max_dim / 2).min(3)) },
        _ => {
            let mut pairs = Vec::new();
            let mut left = max_dim;
            for dim in 1..=max_dim {
                if left >= dim && rng.gen_bool(0.4) {
                    let count = rng.gen_range(1..=(left / dim).min(2));
                    pairs.push((dim, count));
                    left -= dim * count;
                }
            }
            if pairs.is_empty() {
                pairs.push((max_dim.max(1), 1));
            }
            Shape::sphere_product(&pairs)
        }
    }
}

fn shape_dim(s: &Shape) -> u32 {
    s.dimension().unwrap()
}

/// A random closed manifold of dimension at most about ten.
pub fn random_shape<R: Rng>(rng: &mut R) -> Shape {
    match rng.gen_range(0..6) {
        0 | 1 => small_shape(rng, 6),
        2 => Shape::Product { factors: vec![small_shape(rng, 3), small_shape(rng, 3)] },
        3 => {
            let base = small_shape(rng, 4);
            let n = shape_dim(&base);
            Shape::SphereBundle { fiber_dim: rng.gen_range(n..=n + 2), base: Box::new(base), oriented: true }
        }
        4 => {
            let fiber = small_shape(rng, 4);
            let n = shape_dim(&fiber);
            Shape::FiberOverSphere { fiber: Box::new(fiber), base_sphere_dim: rng.gen_range(n + 2..=n + 3) }
        }
        _ => {
            let forms = [
                UnimodularForm::diagonal(&[1]).unwrap(),
                UnimodularForm::diagonal(&[1, -1]).unwrap(),
                UnimodularForm::diagonal(&[1, 1]).unwrap(),
                UnimodularForm::hyperbolic(),
                UnimodularForm::hyperbolic().direct_sum(&UnimodularForm::diagonal(&[1]).unwrap()),
            ];
            let form = forms[rng.gen_range(0..forms.len())].matrix().clone();
            Shape::FormManifold { dim: 4, form, highly_connected: true, chi_nonzero: None, bound: Some(2) }
        }
    }
}

pub fn random_hypotheses<R: Rng>(rng: &mut R) -> Hypotheses {
    Hypotheses {
        has_nonzero_exponential_char_class: rng.gen_bool(0.5),
        codimension_hint: None,
        orientable_distributions: rng.gen_bool(0.5),
    }
}

pub fn is_palindrome(b: &[usize]) -> bool {
    b.iter().eq(b.iter().rev())
}

/// Poincaré symmetry of the profile, agreement with the cohomology ring
/// when one is available, and χ matching the alternating sum.
pub fn check_profile(shape: &Shape) -> Result<(), String> {
    let b = match betti_profile(shape) {
        Ok(b) => b,
        Err(SpecError::OutsideHypotheses(_)) => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    if b.len() as u32 != shape_dim(shape) + 1 {
        return Err(format!("profile {b:?} has the wrong length"));
    }
    if !is_palindrome(&b) {
        return Err(format!("profile {b:?} is not palindromic"));
    }
    if let Some(ring) = shape.ring().map_err(|e| e.to_string())? {
        if ring.betti_numbers() != b {
            return Err(format!("ring gives {:?}, profile {b:?}", ring.betti_numbers()));
        }
        if ring.euler_characteristic() != euler_characteristic(&b) {
            return Err("χ mismatch".into());
        }
    }
    Ok(())
}

/// Every verdict survives recheck, and extra hypotheses never weaken the
/// strongest conclusion.
pub fn check_verdicts(shape: &Shape, h: &Hypotheses) -> Result<(), String> {
    let bare = apply_rules(&ManifoldSpec::new(shape.clone())).map_err(|e| e.to_string())?;
    let rich = apply_rules(&ManifoldSpec::new(shape.clone()).with_hypotheses(h.clone())).map_err(|e| e.to_string())?;
    for v in bare.verdicts.iter().chain(&rich.verdicts) {
        if !recheck(v) {
            return Err(format!("verdict {} {} fails recheck on {shape:?}", v.rule, v.citation));
        }
    }
    if rich.strongest() > bare.strongest() {
        return Err(format!("hypotheses weakened {:?} to {:?} on {shape:?}", bare.strongest(), rich.strongest()));
    }
    if rich.has(Conclusion::NoAnosov) && rich.verdicts.iter().any(|v| v.conclusion != Conclusion::NoAnosov) {
        return Err("NO_ANOSOV report carries weaker verdicts".into());
    }
    Ok(())
}

/// `Λ_F(l) = (-1)^n s^l Λ_I(l)`.
pub fn check_convention_duality(aut: &GradedAutomorphism, len: u64) -> Result<(), String> {
    let n = aut.top_degree();
    let s = aut.top_sign();
    let fwd = lefschetz_sequence(aut, len, Convention::Forward).map_err(|e| e.to_string())?;
    let inv = lefschetz_sequence(aut, len, Convention::Inverse).map_err(|e| e.to_string())?;
    for l in 1..=len {
        let sign = if n % 2 == 0 { 1 } else { -1 } * if s == -1 && l % 2 == 1 { -1 } else { 1 };
        if *fwd.get(l) != BigInt::from(sign) * inv.get(l) {
            return Err(format!("l = {l}: forward {} inverse {}", fwd.get(l), inv.get(l)));
        }
    }
    Ok(())
}

/// Diagonal blocks of `f^{*d}` for `(S¹)² × (S²)² × (S³)²` as printed in
/// the published table, with `Id_{Z^k}` expanded to `k` copies.
pub fn published_block_table() -> Vec<Vec<&'static str>> {
    vec![
        vec!["Id_Z"],
        vec!["A1"],
        vec!["A1^∧2", "Id_Z", "Id_Z"],
        vec!["A3", "A1", "A1"],
        vec!["A1 ⊗ A3", "Id_Z", "A1^∧2", "A1^∧2"],
        vec!["A3", "A3", "A1^∧2 ⊗ A3", "A1"],
        vec!["A3^∧2", "A1 ⊗ A3", "A1 ⊗ A3", "A1^∧2"],
        vec!["A1 ⊗ A3^∧2", "A3", "A1^∧2 ⊗ A3", "A1^∧2 ⊗ A3"],
        vec!["A3^∧2", "A3^∧2", "A1^∧2 ⊗ A3^∧2", "A1 ⊗ A3"],
        vec!["A1 ⊗ A3^∧2", "A1 ⊗ A3^∧2", "A1^∧2 ⊗ A3"],
        vec!["A3^∧2", "A1^∧2 ⊗ A3^∧2", "A1^∧2 ⊗ A3^∧2"],
        vec!["A1 ⊗ A3^∧2"],
        vec!["A1^∧2 ⊗ A3^∧2"],
    ]
}

/// The published basis of `H³` for `(S¹)⁴ × (S²)² × (S³)²`.
pub fn published_h3() -> Vec<&'static str> {
    vec![
        "x1^3",
        "x2^3",
        "x1^1 ⌣ x1^2",
        "x1^1 ⌣ x2^2",
        "x2^1 ⌣ x1^2",
        "x2^1 ⌣ x2^2",
        "x3^1 ⌣ x1^2",
        "x3^1 ⌣ x2^2",
        "x4^1 ⌣ x1^2",
        "x4^1 ⌣ x2^2",
        "x1^1 ⌣ x2^1 ⌣ x3^1",
        "x1^1 ⌣ x2^1 ⌣ x4^1",
        "x1^1 ⌣ x3^1 ⌣ x4^1",
        "x2^1 ⌣ x3^1 ⌣ x4^1",
    ]
}

pub fn example_spec() -> SphereProductSpec {
    SphereProductSpec::from_pairs(&[(1, 2), (2, 2), (3, 2)]).unwrap()
}

pub fn h3_example_spec() -> SphereProductSpec {
    SphereProductSpec::from_pairs(&[(1, 4), (2, 2), (3, 2)]).unwrap()
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

/// Per-degree block multisets, `2^e` appearances of every odd block, and
/// the `H³` basis.
pub fn check_block_table() -> Result<(), String> {
    let spec = example_spec();
    let table = block_table(&spec, None).map_err(|e| e.to_string())?;
    let published = published_block_table();
    if table.degrees.len() != published.len() {
        return Err(format!("{} degrees, expected {}", table.degrees.len(), published.len()));
    }
    for (db, want) in table.degrees.iter().zip(&published) {
        let got = sorted(db.symbols());
        let want = sorted(want.iter().map(|s| s.to_string()).collect());
        if got != want {
            return Err(format!("degree {}: {got:?} vs {want:?}", db.degree));
        }
    }
    let e = spec.e();
    for a in &table.appearances {
        if a.appearances != 1 << e {
            return Err(format!("{} appears {} times", a.symbol, a.appearances));
        }
    }
    let mut symbols: Vec<&str> = published.iter().flatten().copied().filter(|s| *s != "Id_Z").collect();
    symbols.sort();
    symbols.dedup();
    for s in &symbols {
        let count = published.iter().flatten().filter(|t| *t == s).count() as u64;
        if count != 1 << e {
            return Err(format!("published table has {s} {count} times"));
        }
    }
    let ring = h3_example_spec().ring();
    let h3: Vec<String> = ring.basis(3).iter().map(|m| ring.format_monomial(m)).collect();
    if h3 != published_h3() {
        return Err(format!("H³ basis {h3:?}"));
    }
    Ok(())
}
