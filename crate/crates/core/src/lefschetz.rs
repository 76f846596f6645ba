//! Lefschetz numbers of iterates and the exponential growth they force.
//!
//! A [`TraceFamily`] is any sum `c + Σ wₜ·Tr(Bₜˡ)`. The Lefschetz number of
//! an automorphism is one such family (one term per degree), and the block
//! decompositions of sphere products produce smaller, equivalent ones. The
//! spectral analysis works on families so both paths share one code path.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::GradedAutomorphism;
use crate::error::{AutomorphismError, SpectralError};
use crate::matrix::{self, IntMatrix};
use crate::poly;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_LENGTH: u64 = 30;
/// Largest residue modulus searched when the leading coefficient oscillates.
pub const MAX_PERIOD: u32 = 360;
pub const CASCADE_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `Σ (-1)^d Tr((M_d)^{-l})`
    #[default]
    #[serde(alias = "INVERSE_TRACES", alias = "inverse_traces")]
    Inverse,
    /// `Σ (-1)^d Tr((M_d)^{l})`
    #[serde(alias = "FORWARD_TRACES", alias = "forward_traces")]
    Forward,
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "inverse" | "inverse_traces" => Ok(Convention::Inverse),
            "forward" | "forward_traces" => Ok(Convention::Forward),
            other => Err(format!("unknown convention {other:?} (expected inverse or forward)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefschetzSequence {
    pub convention: Convention,
    #[serde(serialize_with = "matrix::serialize_bigint_vec")]
    pub values: Vec<BigInt>,
}

impl LefschetzSequence {
    /// `Λ(f^l)`, `l ≥ 1`.
    pub fn get(&self, l: u64) -> &BigInt {
        &self.values[(l - 1) as usize]
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,lefschetz\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{},{}", i + 1, v);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTerm {
    pub weight: BigInt,
    pub matrix: IntMatrix,
}

/// `constant + Σ weight·Tr(matrix^l)`
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TraceFamily {
    pub constant: BigInt,
    pub terms: Vec<TraceTerm>,
}

impl TraceFamily {
    pub fn push(&mut self, weight: impl Into<BigInt>, matrix: IntMatrix) {
        self.terms.push(TraceTerm { weight: weight.into(), matrix });
    }

    /// One term per degree, `(-1)^d · M_d^{±1}`.
    pub fn from_automorphism(aut: &GradedAutomorphism, convention: Convention) -> Result<Self, AutomorphismError> {
        let mut fam = TraceFamily::default();
        for (d, m) in aut.matrices().iter().enumerate() {
            if m.rows() == 0 {
                continue;
            }
            let b = match convention {
                Convention::Forward => m.clone(),
                Convention::Inverse => m.inverse_unimodular()?,
            };
            fam.push(if d % 2 == 0 { 1 } else { -1 }, b);
        }
        Ok(fam)
    }

    /// Exact values for `l = 1..=len`.
    pub fn sequence(&self, len: u64) -> Vec<BigInt> {
        let mut out = vec![self.constant.clone(); len as usize];
        for t in &self.terms {
            let mut p = t.matrix.clone();
            for slot in out.iter_mut() {
                *slot += &t.weight * p.trace();
                p = p.matmul(&t.matrix);
            }
        }
        out
    }

    pub fn value(&self, l: u64) -> BigInt {
        self.terms.iter().fold(self.constant.clone(), |acc, t| acc + &t.weight * t.matrix.pow(l).trace())
    }
}

pub fn lefschetz_number(aut: &GradedAutomorphism, l: u64, convention: Convention) -> Result<BigInt, AutomorphismError> {
    Ok(TraceFamily::from_automorphism(aut, convention)?.value(l))
}

pub fn lefschetz_sequence(aut: &GradedAutomorphism, len: u64, convention: Convention) -> Result<LefschetzSequence, AutomorphismError> {
    Ok(LefschetzSequence { convention, values: TraceFamily::from_automorphism(aut, convention)?.sequence(len) })
}

/// Eigenvalues sharing (up to tolerance) one modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusGroup {
    pub modulus: f64,
    /// Σ weight · (number of eigenvalues at this modulus).
    pub signed_multiplicity: i64,
    /// Smallest `s ≤ 360` with every argument in the group an `s`-th root
    /// of unity, if any.
    pub period: Option<u32>,
    /// `max_r |c(r)|` where `c(r) = Σ weight · cos(r·θ)` over the group.
    pub coefficient: f64,
    /// `|c(r)|` varies with the residue `r`.
    pub residue_dependent: bool,
    pub error: f64,
    #[serde(skip)]
    members: Vec<(Complex64, i64)>,
}

impl ModulusGroup {
    pub fn vanishes(&self) -> bool {
        self.coefficient <= 1e-7
    }

    /// `c(r)` as a function of the residue.
    pub fn residue_coefficient(&self, r: u64) -> f64 {
        self.members.iter().map(|(z, w)| *w as f64 * (r as f64 * z.arg()).cos()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Sorted by decreasing modulus.
    pub groups: Vec<ModulusGroup>,
    /// `log` of the largest eigenvalue modulus among the trace matrices.
    pub entropy: f64,
    /// Index of the leading non-vanishing group of modulus > 1.
    pub leading: Option<usize>,
    /// Groups of modulus > 1 skipped because their coefficient vanished.
    pub cascade_steps: usize,
    /// Worst relative deviation of the spectral reconstruction from the
    /// exact sequence over the checked range.
    pub max_residual: f64,
}

impl SpectralSummary {
    pub fn leading_group(&self) -> Option<&ModulusGroup> {
        self.leading.map(|i| &self.groups[i])
    }

    pub fn is_bounded(&self) -> bool {
        self.leading.is_none()
    }
}

/// `ln |x|` for a nonzero big integer, without overflow.
fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (x.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `x / e^{scale}` as a float.
fn scaled(x: &BigInt, scale: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let v = (ln_abs(x) - scale).exp();
    if x.is_negative() {
        -v
    } else {
        v
    }
}

/// Spectral summary of a trace family, cross-checked against its exact
/// values for `l = 1..=check_len`.
pub fn analyze_family(family: &TraceFamily, tolerance: f64, check_len: u64) -> Result<SpectralSummary, SpectralError> {
    let mut eig: Vec<(Complex64, i64, f64)> = Vec::new();
    for t in &family.terms {
        let w = t.weight.to_i64().ok_or(SpectralError::NoConvergence { degree: t.matrix.rows() })?;
        if w == 0 {
            continue;
        }
        for e in poly::eigenvalues(&t.matrix)? {
            eig.push((e.value, w * e.multiplicity as i64, e.error));
        }
    }
    eig.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));

    let mut groups: Vec<ModulusGroup> = Vec::new();
    let mut reps: Vec<(f64, f64)> = Vec::new(); // (modulus, error) of the group's first member
    for &(z, w, err) in &eig {
        let m = z.norm();
        if let Some(g) = groups.last_mut() {
            let (m0, e0) = *reps.last().expect("group has a representative");
            if (m0 - m).abs() <= tolerance * m0.max(1.0) {
                // Certified separation beyond round-off means two different
                // algebraic moduli fell into one bucket.
                let slack = 64.0 * f64::EPSILON * m0.max(1.0);
                if (m0 - m).abs() > e0 + err + slack {
                    return Err(SpectralError::UnresolvedGrouping { a: m0, b: m, tolerance });
                }
                g.signed_multiplicity += w;
                g.error = g.error.max(err);
                g.members.push((z, w));
                continue;
            }
        }
        reps.push((m, err));
        groups.push(ModulusGroup {
            modulus: m,
            signed_multiplicity: w,
            period: None,
            coefficient: 0.0,
            residue_dependent: false,
            error: err,
            members: vec![(z, w)],
        });
    }
    for g in &mut groups {
        finish_group(g);
    }

    let dominant = groups.first().map(|g| g.modulus).unwrap_or(1.0).max(1.0);
    let mut leading = None;
    let mut cascade_steps = 0;
    for (i, g) in groups.iter().enumerate() {
        if g.modulus <= 1.0 + tolerance {
            break;
        }
        if !g.vanishes() {
            leading = Some(i);
            break;
        }
        cascade_steps += 1;
        if cascade_steps > CASCADE_CAP {
            return Err(SpectralError::CascadeExhausted(CASCADE_CAP));
        }
    }

    // reconstruction Σ w λ^l against the exact values
    let exact = family.sequence(check_len);
    let ln_dom = dominant.ln();
    let mut max_residual = 0.0_f64;
    for (idx, v) in exact.iter().enumerate() {
        let l = (idx + 1) as u64;
        let scale = l as f64 * ln_dom;
        let mut approx = scaled(&family.constant, scale);
        for &(z, w, _) in &eig {
            let r = (z / dominant).powu(l as u32);
            approx += w as f64 * r.re;
        }
        let residual = (scaled(v, scale) - approx).abs();
        max_residual = max_residual.max(residual);
        if residual > 1e-6 {
            return Err(SpectralError::ReconstructionMismatch { l, residual });
        }
    }

    Ok(SpectralSummary {
        entropy: eig.first().map(|e| e.0.norm().ln().max(0.0)).unwrap_or(0.0),
        groups,
        leading,
        cascade_steps,
        max_residual,
    })
}

fn finish_group(g: &mut ModulusGroup) {
    let tau = std::f64::consts::TAU;
    g.period = (1..=MAX_PERIOD).find(|&s| {
        g.members.iter().all(|(z, _)| {
            let t = z.arg() / tau * s as f64;
            (t - t.round()).abs() < 1e-8
        })
    });
    let span = g.period.unwrap_or(MAX_PERIOD) as u64;
    let values: Vec<f64> = (0..span).map(|r| g.residue_coefficient(r).abs()).collect();
    let max = values.iter().cloned().fold(0.0, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    g.coefficient = max;
    g.residue_dependent = max - min > 1e-7;
}

pub fn growth_analysis(aut: &GradedAutomorphism, convention: Convention, tolerance: f64) -> Result<SpectralSummary, SpectralError> {
    let fam = TraceFamily::from_automorphism(aut, convention)?;
    analyze_family(&fam, tolerance, DEFAULT_LENGTH)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrowthClass {
    /// Every `Λ(f^l)` vanishes: `f^l` would have no fixed points.
    IdenticallyZero,
    /// No exponential growth.
    Bounded,
    /// `|Λ(f^l)| ~ w·λ^l` along subsequences.
    Coefficient { lambda: f64, w: f64, residue_dependent: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Compatibility {
    /// Growth law of a transitive Anosov diffeomorphism (coefficient 1).
    ConsistentWithTransitive,
    /// Integer coefficient `w ≥ 2`: at least `w` basic sets of maximal
    /// entropy, so not transitive.
    TransitiveExcluded,
    /// Bounded, identically zero, or a coefficient that is not a constant
    /// positive integer.
    InconsistentWithAnosov,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub growth: GrowthClass,
    pub compatibility: Compatibility,
    /// Minimum number of basic sets of maximal entropy when the
    /// coefficient is an integer.
    pub basic_sets: Option<u64>,
    /// Powers taken before the analysis, e.g. `f -> f^2`.
    pub reductions: Vec<String>,
    pub sequence: LefschetzSequence,
    pub summary: SpectralSummary,
}

/// Classifies the growth of `|Λ(f^l)|` against the periodic-orbit axioms.
pub fn anosov_compatibility(aut: &GradedAutomorphism) -> Result<CompatibilityReport, SpectralError> {
    let mut reductions = Vec::new();
    let mut f = aut.clone();
    if aut.top_sign() < 0 {
        f = aut.power(2);
        reductions.push("f -> f^2 (orientation of the top class)".to_string());
    }
    let fam = TraceFamily::from_automorphism(&f, Convention::Inverse)?;
    let sequence = LefschetzSequence { convention: Convention::Inverse, values: fam.sequence(DEFAULT_LENGTH) };
    let summary = analyze_family(&fam, DEFAULT_TOLERANCE, DEFAULT_LENGTH)?;
    Ok(classify(sequence, summary, reductions))
}

/// Turns a summary into a verdict record.
pub fn classify(sequence: LefschetzSequence, summary: SpectralSummary, reductions: Vec<String>) -> CompatibilityReport {
    let (growth, compatibility, basic_sets) = if sequence.is_identically_zero() {
        (GrowthClass::IdenticallyZero, Compatibility::InconsistentWithAnosov, None)
    } else {
        match summary.leading_group() {
            None => (GrowthClass::Bounded, Compatibility::InconsistentWithAnosov, None),
            Some(g) => {
                let w = g.coefficient;
                let n = w.round();
                let integral = (w - n).abs() < 1e-6 && n >= 1.0;
                let (c, b) = if g.residue_dependent || !integral {
                    (Compatibility::InconsistentWithAnosov, None)
                } else if n == 1.0 {
                    (Compatibility::ConsistentWithTransitive, Some(1))
                } else {
                    (Compatibility::TransitiveExcluded, Some(n as u64))
                };
                (GrowthClass::Coefficient { lambda: g.modulus, w, residue_dependent: g.residue_dependent }, c, b)
            }
        }
    };
    CompatibilityReport { growth, compatibility, basic_sets, reductions, sequence, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{induce, GeneratorImages};
    use crate::graded_ring::GradedRing;

    fn cat_on_t2() -> (GradedRing, GradedAutomorphism) {
        let t2 = GradedRing::torus(2).unwrap();
        let f = induce(&t2, &GeneratorImages::new().with("x1^1", &[2, 1]).with("x2^1", &[1, 1])).unwrap();
        (t2, f)
    }

    #[test]
    fn cat_map_numbers() {
        let (_, f) = cat_on_t2();
        assert_eq!(lefschetz_number(&f, 1, Convention::Forward).unwrap(), BigInt::from(-1));
        assert_eq!(lefschetz_number(&f, 3, Convention::Forward).unwrap(), BigInt::from(-16));
        let seq = lefschetz_sequence(&f, 5, Convention::Forward).unwrap();
        let det_oracle: Vec<BigInt> = (1..=5)
            .map(|l| IntMatrix::identity(2).sub(&IntMatrix::from_rows(&[[2, 1], [1, 1]]).pow(l)).det())
            .collect();
        assert_eq!(seq.values, det_oracle);
        assert!(seq.to_csv().starts_with("l,lefschetz\n1,-1\n"));
    }

    #[test]
    fn identity_gives_euler_characteristic() {
        let r = GradedRing::sphere_product(&[(1, 1), (2, 2)]).unwrap();
        let id = GradedAutomorphism::identity(&r);
        for l in 1..5 {
            assert_eq!(lefschetz_number(&id, l, Convention::Inverse).unwrap(), BigInt::from(r.euler_characteristic()));
        }
        let summary = growth_analysis(&GradedAutomorphism::identity(&GradedRing::sphere_product(&[(2, 2)]).unwrap()), Convention::Forward, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(summary.groups.len(), 1);
        assert!((summary.groups[0].modulus - 1.0).abs() < 1e-12);
        assert!(summary.is_bounded());
    }

    #[test]
    fn cat_map_growth() {
        let (_, f) = cat_on_t2();
        let s = growth_analysis(&f, Convention::Forward, DEFAULT_TOLERANCE).unwrap();
        let g = s.leading_group().unwrap();
        assert!((g.modulus - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(g.signed_multiplicity, -1);
        assert_eq!(g.coefficient, 1.0);
        let report = anosov_compatibility(&f).unwrap();
        assert_eq!(report.compatibility, Compatibility::ConsistentWithTransitive);
        assert_eq!(report.basic_sets, Some(1));
    }

    #[test]
    fn unresolved_grouping_is_reported() {
        // moduli 1e8+1 and 1e8 differ by 1e-8 relative, below a 1e-7 tolerance
        let mut fam = TraceFamily::default();
        fam.push(1, IntMatrix::from_rows(&[[100_000_001]]));
        fam.push(1, IntMatrix::from_rows(&[[100_000_000]]));
        let err = analyze_family(&fam, 1e-7, 3).unwrap_err();
        assert!(matches!(err, SpectralError::UnresolvedGrouping { .. }));
        assert!(analyze_family(&fam, 1e-9, 3).is_ok());
    }

    #[test]
    fn residue_dependence_is_flagged() {
        // eigenvalues ±φ² with equal weights: coefficient 2 on even l, 0 on odd l
        let a = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let mut fam = TraceFamily::default();
        fam.push(1, a.clone());
        fam.push(1, a.neg());
        let s = analyze_family(&fam, DEFAULT_TOLERANCE, 20).unwrap();
        let g = s.leading_group().unwrap();
        assert_eq!(g.period, Some(2));
        assert!(g.residue_dependent);
        assert!((g.coefficient - 2.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_reversal_reduction() {
        let t2 = GradedRing::torus(2).unwrap();
        // x1 -> x1 + x2, x2 -> x1: det -1
        let f = induce(&t2, &GeneratorImages::new().with("x1^1", &[1, 1]).with("x2^1", &[1, 0])).unwrap();
        let report = anosov_compatibility(&f).unwrap();
        assert_eq!(report.reductions.len(), 1);
        assert_eq!(report.compatibility, Compatibility::ConsistentWithTransitive);
    }
}
