//! Periodic points of hyperbolic toral automorphisms, counted on the lattice.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::automorphism::{induce, GeneratorImages, GradedAutomorphism};
use crate::error::OracleError;
use crate::graded_ring::GradedRing;
use crate::lattice;
use crate::lefschetz::{self, Convention, TraceFamily};
use crate::matrix::{self, IntMatrix};
use crate::poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToralMap {
    a: IntMatrix,
    hyperbolic: bool,
}

impl ToralMap {
    /// Accepts any `A ∈ GL(n,ℤ)`; hyperbolicity is recorded, not required.
    pub fn new(a: IntMatrix) -> Result<Self, OracleError> {
        if !a.is_square() || a.rows() == 0 || a.det().abs() != BigInt::from(1) {
            return Err(OracleError::NotUnimodular);
        }
        let hyperbolic = !poly::has_root_on_unit_circle(&poly::charpoly(&a))?;
        Ok(ToralMap { a, hyperbolic })
    }

    pub fn hyperbolic(a: IntMatrix) -> Result<Self, OracleError> {
        let m = Self::new(a)?;
        if !m.hyperbolic {
            return Err(OracleError::NotHyperbolic);
        }
        Ok(m)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.hyperbolic
    }

    fn shifted_power(&self, l: u64) -> IntMatrix {
        self.a.pow(l).sub(&IntMatrix::identity(self.dim()))
    }

    /// The automorphism of `H*(Tⁿ)` with `A` acting on `H¹`.
    pub fn induced(&self) -> Result<(GradedRing, GradedAutomorphism), OracleError> {
        let n = self.dim() as u32;
        let ring = GradedRing::torus(n).map_err(|e| OracleError::Growth(e.to_string()))?;
        let mut images = GeneratorImages::new();
        for (j, col) in (0..self.dim()).map(|j| (j, self.a.column(j))).collect::<Vec<_>>() {
            let label = ring.generators()[j].label.clone();
            images.images.insert(label, col.into_iter().map(matrix::JsonInt).collect());
        }
        let aut = induce(&ring, &images)?;
        Ok((ring, aut))
    }
}

/// `|det(A^l − I)|`.
pub fn fixed_point_count(map: &ToralMap, l: u64) -> Result<BigInt, OracleError> {
    let d = map.shifted_power(l).det();
    if d.is_zero() {
        return Err(OracleError::NonIsolated { l });
    }
    Ok(d.abs())
}

/// Order of `ℤⁿ/(A^l − I)ℤⁿ` from the Smith invariants.
pub fn smith_count(map: &ToralMap, l: u64) -> Result<BigInt, OracleError> {
    lattice::cokernel_order(&map.shifted_power(l)).ok_or(OracleError::NonIsolated { l })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheckRow {
    pub l: u64,
    #[serde(serialize_with = "matrix::serialize_bigint")]
    pub lefschetz: BigInt,
    #[serde(serialize_with = "matrix::serialize_bigint")]
    pub det_count: BigInt,
    #[serde(serialize_with = "matrix::serialize_bigint")]
    pub smith_count: BigInt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub matrix: IntMatrix,
    pub rows: Vec<CrossCheckRow>,
    /// Growth rate from the spectral analysis of the Lefschetz sequence.
    pub lambda: f64,
    /// Product of the expanding eigenvalue moduli.
    pub expected_lambda: f64,
    pub leading_coefficient: f64,
}

impl CrossCheckReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,lefschetz,det_count,smith_count\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.l, r.lefschetz, r.det_count, r.smith_count));
        }
        out
    }
}

/// Compares `|Λ(f^l)|` against both lattice counts for `l = 1..=len`, then
/// checks the growth law `|Λ(f^l)| ~ λ^l` with coefficient 1.
pub fn lefschetz_cross_check(map: &ToralMap, len: u64) -> Result<CrossCheckReport, OracleError> {
    if !map.hyperbolic {
        return Err(OracleError::NotHyperbolic);
    }
    let (_, aut) = map.induced()?;
    let family = TraceFamily::from_automorphism(&aut, Convention::Forward)?;
    let mut rows = Vec::with_capacity(len as usize);
    for l in 1..=len {
        let lef = family.value(l);
        let det_count = fixed_point_count(map, l)?;
        let smith = smith_count(map, l)?;
        if lef.abs() != det_count || det_count != smith {
            return Err(OracleError::Mismatch { l, lefschetz: lef, det_count, smith_count: smith });
        }
        rows.push(CrossCheckRow { l, lefschetz: lef, det_count, smith_count: smith });
    }
    let summary = lefschetz::analyze_family(&family, lefschetz::DEFAULT_TOLERANCE, lefschetz::DEFAULT_LENGTH)?;
    let g = summary.leading_group().ok_or_else(|| OracleError::Growth("no exponential growth".into()))?;
    let expected_lambda = expanding_product(&map.a)?;
    if (g.modulus - expected_lambda).abs() > 1e-6 * expected_lambda {
        return Err(OracleError::Growth(format!("lambda {} vs expanding product {}", g.modulus, expected_lambda)));
    }
    if (g.coefficient - 1.0).abs() > 1e-6 || g.residue_dependent {
        return Err(OracleError::Growth(format!("leading coefficient {} is not 1", g.coefficient)));
    }
    Ok(CrossCheckReport { matrix: map.a.clone(), rows, lambda: g.modulus, expected_lambda, leading_coefficient: g.coefficient })
}

/// `Π_{|λᵢ|>1} |λᵢ|`, with multiplicity.
pub fn expanding_product(a: &IntMatrix) -> Result<f64, OracleError> {
    let mut log = 0.0;
    for e in poly::eigenvalues(a)? {
        let m = e.value.norm();
        if m > 1.0 {
            log += e.multiplicity as f64 * m.ln();
        }
    }
    Ok(log.exp())
}

/// `Σ_k (−1)^k Tr Λᵏ(M)` from exterior powers, which equals `det(I − M)`.
pub fn alternating_trace(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut sum = BigInt::zero();
    for k in 0..=n {
        let t = m.exterior_power(k).expect("k ≤ n").trace();
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    sum
}

/// Product of `steps` random elementary matrices `I + c·E_ij`, `|c| ≤ 2`,
/// interleaved with random sign flips; unimodular by construction.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize, steps: usize) -> IntMatrix {
    let mut a = IntMatrix::identity(n);
    if n == 1 {
        if rng.gen_bool(0.5) {
            a = a.neg();
        }
        return a;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = if rng.gen_bool(0.5) { rng.gen_range(1..=2) } else { -rng.gen_range(1..=2) };
        // left multiplication by I + c E_ij adds c·(row j) to row i
        for col in 0..n {
            let v = a[(j, col)].clone() * c;
            a[(i, col)] += v;
        }
    }
    if rng.gen_bool(0.5) {
        for col in 0..n {
            let v = -a[(0, col)].clone();
            a[(0, col)] = v;
        }
    }
    a
}

/// Rejection-samples a hyperbolic `A ∈ GL(n,ℤ)`, `n ≥ 2`.
pub fn random_hyperbolic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ToralMap {
    assert!(n >= 2, "no hyperbolic automorphism of the circle");
    loop {
        let steps = rng.gen_range(n..=3 * n);
        let a = random_unimodular(rng, n, steps);
        if a.max_abs_entry() > BigInt::from(50) {
            continue;
        }
        if let Ok(m) = ToralMap::hyperbolic(a) {
            return m;
        }
    }
}

/// Uniform-ish element of `SL(2,ℤ)` with entries in `[-bound, bound]`:
/// pick `a, c` coprime, then solve `ad − bc = 1` and shift within the box.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> IntMatrix {
    use num_integer::Integer;
    loop {
        let a = rng.gen_range(-bound..=bound);
        let c = rng.gen_range(-bound..=bound);
        let e = a.extended_gcd(&c);
        if e.gcd != 1 {
            continue;
        }
        // a·x + c·y = 1, so d = x, b = −y gives ad − bc = 1
        let (d0, b0) = (e.x, -e.y);
        // the general solution is (d0 + t c, b0 + t a)
        let ts: Vec<i64> = (-2 * bound..=2 * bound)
            .filter(|t| (d0 + t * c).abs() <= bound && (b0 + t * a).abs() <= bound)
            .collect();
        if ts.is_empty() {
            continue;
        }
        let t = ts[rng.gen_range(0..ts.len())];
        return IntMatrix::from_rows(&[[a, b0 + t * a], [c, d0 + t * c]]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn cat() -> ToralMap {
        ToralMap::hyperbolic(IntMatrix::from_rows(&[[2, 1], [1, 1]])).unwrap()
    }

    #[test]
    fn cat_counts() {
        let m = cat();
        let counts: Vec<BigInt> = (1..=3).map(|l| fixed_point_count(&m, l).unwrap()).collect();
        assert_eq!(counts, vec![BigInt::from(1), BigInt::from(5), BigInt::from(16)]);
        assert_eq!(smith_count(&m, 3).unwrap(), BigInt::from(16));
        // A³ − I = [[12, 8], [8, 4]] has Smith form diag(4, 4)
        assert_eq!(lattice::smith_invariants(&m.matrix().pow(3).sub(&IntMatrix::identity(2))), vec![BigInt::from(4), BigInt::from(4)]);
    }

    #[test]
    fn fibonacci_counts() {
        let m = ToralMap::hyperbolic(IntMatrix::from_rows(&[[0, 1], [1, 1]])).unwrap();
        assert_eq!(fixed_point_count(&m, 1).unwrap(), BigInt::from(1));
        assert_eq!(fixed_point_count(&m, 2).unwrap(), BigInt::from(1));
        assert_eq!(smith_count(&m, 1).unwrap(), BigInt::from(1));
    }

    #[test]
    fn rejects() {
        assert_eq!(ToralMap::hyperbolic(IntMatrix::identity(2).neg()).unwrap_err(), OracleError::NotHyperbolic);
        assert_eq!(ToralMap::new(IntMatrix::from_rows(&[[2]])).unwrap_err(), OracleError::NotUnimodular);
        let rot = ToralMap::new(IntMatrix::from_rows(&[[0, -1], [1, 0]])).unwrap();
        assert!(!rot.is_hyperbolic());
        assert_eq!(fixed_point_count(&ToralMap::new(IntMatrix::identity(2)).unwrap(), 1).unwrap_err(), OracleError::NonIsolated { l: 1 });
    }

    #[test]
    fn cat_cross_check() {
        let r = lefschetz_cross_check(&cat(), 10).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!((r.lambda - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!(r.to_csv().starts_with("l,lefschetz,det_count,smith_count\n1,-1,1,1\n2,-5,5,5\n"));
    }

    #[test]
    fn random_sl3_cross_check() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let m = random_hyperbolic(&mut rng, 3);
            lefschetz_cross_check(&m, 6).unwrap();
        }
    }

    #[test]
    fn alternating_trace_is_det() {
        let a = IntMatrix::from_rows(&[[2, 1, 0], [1, 1, 1], [0, 1, 3]]);
        assert_eq!(alternating_trace(&a), IntMatrix::identity(3).sub(&a).det());
    }

    #[test]
    fn sl2_sampler() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..200 {
            let a = random_sl2(&mut rng, 10);
            assert_eq!(a.det(), BigInt::from(1));
            assert!(a.max_abs_entry() <= BigInt::from(10));
        }
    }
}
