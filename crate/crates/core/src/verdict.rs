//! Manifold descriptions, Betti profiles and the obstruction rule engine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automorphism::{induce, DetConstraint, GeneratorImages};
use crate::error::{Error, SpecError};
use crate::graded_ring::{GradedRing, RingDescription};
use crate::intersection_form::{self, Completeness, FormVerdict, Theorem110Report, UnimodularForm};
use crate::lefschetz::{self, CompatibilityReport};
use crate::matrix::IntMatrix;
use crate::sphere_products::{
    self, Factor, GeneratorBlocks, SphereProductSpec, SphereVerdict, Theorem16Report, Theorem17Report,
};

/// Default brute-force bound for isometry searches.
pub const DEFAULT_FORM_BOUND: i64 = 3;
/// Length of the Lefschetz sequences attached as evidence.
pub const EVIDENCE_LENGTH: u64 = 20;

/// Shape of a closed manifold, tagged by `"kind"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    SphereProduct {
        factors: Vec<Factor>,
        /// Generator blocks `A_p` keyed by sphere dimension.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<BTreeMap<u32, IntMatrix>>,
    },
    Ring {
        generators: Vec<crate::graded_ring::Generator>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        top_degree: Option<u32>,
    },
    Sphere {
        dim: u32,
    },
    Torus {
        dim: u32,
    },
    ComplexProjective {
        n: u32,
    },
    Product {
        factors: Vec<Shape>,
    },
    SphereBundle {
        fiber_dim: u32,
        base: Box<Shape>,
        /// Oriented bundle over an orientable base.
        #[serde(default = "yes")]
        oriented: bool,
    },
    FiberOverSphere {
        fiber: Box<Shape>,
        base_sphere_dim: u32,
    },
    FormManifold {
        /// Dimension `4n`.
        dim: u32,
        form: IntMatrix,
        /// `(2n-1)`-connected.
        #[serde(default = "yes")]
        highly_connected: bool,
        /// Must agree with `χ = N + 2` when given.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chi_nonzero: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<i64>,
    },
}

fn yes() -> bool {
    true
}

/// External topological input the rules may consume.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hypotheses {
    /// Some characteristic class with the exponential property is nonzero on `TM`.
    pub has_nonzero_exponential_char_class: bool,
    /// Restrict to Anosov diffeomorphisms of this codimension.
    pub codimension_hint: Option<u32>,
    /// Invariant distributions may be taken orientable (e.g. every finite
    /// cover is a self-cover, or the manifold is simply connected).
    pub orientable_distributions: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifoldSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub hypotheses: Hypotheses,
}

impl ManifoldSpec {
    pub fn new(shape: Shape) -> Self {
        ManifoldSpec { shape, hypotheses: Hypotheses::default() }
    }

    pub fn with_hypotheses(mut self, h: Hypotheses) -> Self {
        self.hypotheses = h;
        self
    }

    /// Parses a spec; errors name the offending line or field path.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let hypotheses = match value.as_object_mut().and_then(|o| o.remove("hypotheses")) {
            Some(h) => serde_path_to_error::deserialize::<_, Hypotheses>(h)
                .map_err(|e| SpecError::Invalid(format!("at hypotheses.{}: {}", e.path(), e.inner())))?,
            None => Hypotheses::default(),
        };
        let shape: Shape = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            SpecError::Invalid(if path == "." { e.inner().to_string() } else { format!("at {path}: {}", e.inner()) })
        })?;
        shape.validate()?;
        Ok(ManifoldSpec { shape, hypotheses })
    }
}

impl Shape {
    pub fn sphere_product(pairs: &[(u32, u32)]) -> Self {
        Shape::SphereProduct { factors: pairs.iter().map(|&(dim, count)| Factor { dim, count }).collect(), blocks: None }
    }

    fn validate(&self) -> Result<(), SpecError> {
        match self {
            Shape::SphereProduct { factors, blocks } => {
                let spec = SphereProductSpec::new(factors.clone())?;
                if let Some(b) = blocks {
                    spec.validate_blocks(b)?;
                }
            }
            Shape::Ring { generators, top_degree } => {
                GradedRing::try_from(RingDescription { generators: generators.clone(), top_degree: *top_degree })?;
            }
            Shape::Sphere { dim } | Shape::Torus { dim } if *dim == 0 => {
                return Err(SpecError::Invalid("dimension must be at least 1".into()))
            }
            Shape::ComplexProjective { n } if *n == 0 => return Err(SpecError::Invalid("n must be at least 1".into())),
            Shape::Product { factors } => {
                if factors.is_empty() {
                    return Err(SpecError::Invalid("product has no factors".into()));
                }
                factors.iter().try_for_each(Shape::validate)?;
            }
            Shape::SphereBundle { fiber_dim, base, .. } => {
                if *fiber_dim == 0 {
                    return Err(SpecError::Invalid("fiber dimension must be at least 1".into()));
                }
                base.validate()?;
            }
            Shape::FiberOverSphere { fiber, base_sphere_dim } => {
                if *base_sphere_dim == 0 {
                    return Err(SpecError::Invalid("base sphere dimension must be at least 1".into()));
                }
                fiber.validate()?;
            }
            Shape::FormManifold { dim, form, chi_nonzero, .. } => {
                if *dim == 0 || dim % 4 != 0 {
                    return Err(SpecError::Invalid(format!("form manifolds have dimension 4n, got {dim}")));
                }
                UnimodularForm::new(form.clone())?;
                if *chi_nonzero == Some(false) {
                    return Err(SpecError::Invalid("χ = N + 2 is never zero here".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn dimension(&self) -> Result<u32, SpecError> {
        Ok(match self {
            Shape::SphereProduct { factors, .. } => factors.iter().map(|f| f.dim * f.count).sum(),
            Shape::Ring { .. } => self.ring()?.map(|r| r.top_degree()).unwrap_or(0),
            Shape::Sphere { dim } | Shape::Torus { dim } => *dim,
            Shape::ComplexProjective { n } => 2 * n,
            Shape::Product { factors } => factors.iter().map(Shape::dimension).sum::<Result<u32, _>>()?,
            Shape::SphereBundle { fiber_dim, base, .. } => fiber_dim + base.dimension()?,
            Shape::FiberOverSphere { fiber, base_sphere_dim } => fiber.dimension()? + base_sphere_dim,
            Shape::FormManifold { dim, .. } => *dim,
        })
    }

    /// The cohomology ring when the shape determines it.
    pub fn ring(&self) -> Result<Option<GradedRing>, SpecError> {
        Ok(Some(match self {
            Shape::SphereProduct { factors, .. } => SphereProductSpec::new(factors.clone())?.ring(),
            Shape::Ring { generators, top_degree } => {
                GradedRing::try_from(RingDescription { generators: generators.clone(), top_degree: *top_degree })?
            }
            Shape::Sphere { dim } => GradedRing::sphere(*dim)?,
            Shape::Torus { dim } => GradedRing::torus(*dim)?,
            Shape::ComplexProjective { n } => GradedRing::complex_projective(*n)?,
            Shape::Product { factors } => {
                let mut acc: Option<GradedRing> = None;
                for f in factors {
                    let Some(r) = f.ring()? else { return Ok(None) };
                    acc = Some(match acc {
                        None => r,
                        Some(a) => a.tensor(&r)?,
                    });
                }
                acc.expect("nonempty product")
            }
            _ => return Ok(None),
        }))
    }

    /// Sphere products written as products of spheres and tori are
    /// recognised as such.
    pub fn as_sphere_product(&self) -> Option<(SphereProductSpec, Option<GeneratorBlocks>)> {
        match self {
            Shape::SphereProduct { factors, blocks } => Some((SphereProductSpec::new(factors.clone()).ok()?, blocks.clone())),
            Shape::Sphere { dim } => Some((SphereProductSpec::from_pairs(&[(*dim, 1)]).ok()?, None)),
            Shape::Torus { dim } => Some((SphereProductSpec::from_pairs(&[(1, *dim)]).ok()?, None)),
            Shape::Product { factors } => {
                let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
                for f in factors {
                    let (spec, blocks) = f.as_sphere_product()?;
                    if blocks.is_some() {
                        return None;
                    }
                    for fac in spec.factors() {
                        *counts.entry(fac.dim).or_default() += fac.count;
                    }
                }
                let pairs: Vec<(u32, u32)> = counts.into_iter().collect();
                Some((SphereProductSpec::from_pairs(&pairs).ok()?, None))
            }
            _ => None,
        }
    }

    pub fn simply_connected(&self) -> Option<bool> {
        match self {
            Shape::SphereProduct { factors, .. } => Some(factors.iter().all(|f| f.dim >= 2)),
            Shape::Sphere { dim } => Some(*dim >= 2),
            Shape::Torus { .. } => Some(false),
            Shape::ComplexProjective { .. } => Some(true),
            Shape::Ring { generators, .. } => generators.iter().any(|g| g.degree == 1).then_some(false),
            Shape::Product { factors } => {
                let all: Vec<Option<bool>> = factors.iter().map(Shape::simply_connected).collect();
                if all.contains(&Some(false)) {
                    Some(false)
                } else if all.iter().all(|x| *x == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
            Shape::SphereBundle { fiber_dim, base, .. } if *fiber_dim >= 2 => base.simply_connected(),
            Shape::FiberOverSphere { fiber, base_sphere_dim } if *base_sphere_dim >= 3 => fiber.simply_connected(),
            Shape::FormManifold { highly_connected, .. } => highly_connected.then_some(true),
            _ => None,
        }
    }
}

fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Rational Betti numbers `b_0..b_dim`.
///
/// Sphere bundles with fiber `S^m` over an `n`-manifold, `m ≥ n`, have a
/// vanishing Euler class (it lives in `H^{m+1} = 0`), so the Gysin sequence
/// splits and `b_k(E) = b_k(M) + b_{k-m}(M)`. Bundles over `S^m` with fiber
/// of dimension `n < m - 1` have a vanishing Wang differential.
pub fn betti_profile(shape: &Shape) -> Result<Vec<usize>, SpecError> {
    if let Some(ring) = shape.ring()? {
        return Ok(ring.betti_numbers());
    }
    match shape {
        Shape::Product { factors } => {
            let mut acc = vec![1];
            for f in factors {
                acc = convolve(&acc, &betti_profile(f)?);
            }
            Ok(acc)
        }
        Shape::SphereBundle { fiber_dim, base, oriented } => {
            let b = betti_profile(base)?;
            let n = (b.len() - 1) as u32;
            if !oriented {
                return Err(SpecError::OutsideHypotheses("Betti numbers of a non-oriented sphere bundle need the orientation cover".into()));
            }
            if *fiber_dim < n {
                return Err(SpecError::OutsideHypotheses(format!(
                    "fiber dimension {fiber_dim} below base dimension {n}: the Euler class is not determined"
                )));
            }
            Ok(shift_sum(&b, *fiber_dim as usize))
        }
        Shape::FiberOverSphere { fiber, base_sphere_dim } => {
            let b = betti_profile(fiber)?;
            let n = (b.len() - 1) as u32;
            if *base_sphere_dim <= n + 1 {
                return Err(SpecError::OutsideHypotheses(format!(
                    "base sphere dimension {base_sphere_dim} must exceed fiber dimension {n} + 1 for the Wang sequence to split"
                )));
            }
            Ok(shift_sum(&b, *base_sphere_dim as usize))
        }
        Shape::FormManifold { dim, form, highly_connected, .. } => {
            if !highly_connected {
                return Err(SpecError::OutsideHypotheses("only (2n-1)-connected form manifolds are profiled".into()));
            }
            let mut b = vec![0; *dim as usize + 1];
            b[0] = 1;
            b[*dim as usize] = 1;
            b[*dim as usize / 2] = form.rows();
            Ok(b)
        }
        _ => unreachable!("ring-describable shapes handled above"),
    }
}

fn shift_sum(b: &[usize], m: usize) -> Vec<usize> {
    let mut out = vec![0; b.len() + m];
    for (k, x) in b.iter().enumerate() {
        out[k] += x;
        out[k + m] += x;
    }
    out
}

pub fn euler_characteristic(betti: &[usize]) -> i64 {
    betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    NoAnosov,
    NoTransitiveAnosov,
    /// The number of basic sets of maximal entropy is even.
    ParityConstraint,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    Betti {
        profile: Vec<usize>,
    },
    Codimension {
        k: u32,
        b_k: usize,
    },
    CharacteristicClass {
        profile: Vec<usize>,
        chi: i64,
        max_positive_degree_betti: usize,
        source: String,
    },
    Bundle {
        fiber_dim: u32,
        base_dim: u32,
        base_betti: Vec<usize>,
        /// `(-1)^k + (-1)^{m+k}`: 0 for odd fibers, ±2 for even ones.
        trace_factor: u32,
    },
    MiddleRankTwo {
        solutions: Vec<IntMatrix>,
        compatibility: Vec<CompatibilityReport>,
    },
    SphereProductGrowth(Box<Theorem16Report>),
    SphereProductCancellation(Box<Theorem17Report>),
    Form(Box<Theorem110Report>),
    Witness {
        blocks: Vec<String>,
        compatibility: Box<CompatibilityReport>,
    },
    Unavailable {
        reason: String,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub conclusion: Conclusion,
    /// Rule identifier `R1`..`R6`.
    pub rule: String,
    pub citation: String,
    /// Restriction on the class of diffeomorphisms ruled out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub assumptions: Vec<String>,
    pub betti_profile: Option<Vec<usize>>,
    pub chi: Option<i64>,
    pub verdicts: Vec<Verdict>,
    /// Some verdict rests on a bounded search only.
    pub bounded_only: bool,
}

impl ObstructionReport {
    pub fn conclusions(&self) -> Vec<Conclusion> {
        self.verdicts.iter().map(|v| v.conclusion).collect()
    }

    pub fn has(&self, c: Conclusion) -> bool {
        self.verdicts.iter().any(|v| v.conclusion == c)
    }

    /// Strongest conclusion present.
    pub fn strongest(&self) -> Conclusion {
        self.verdicts.iter().map(|v| v.conclusion).min().unwrap_or(Conclusion::Inconclusive)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for a in &self.assumptions {
            out.push_str(&format!("# {a}\n"));
        }
        if let Some(b) = &self.betti_profile {
            out.push_str(&format!("betti: {b:?}\n"));
        }
        if let Some(c) = self.chi {
            out.push_str(&format!("chi: {c}\n"));
        }
        for v in &self.verdicts {
            let c = serde_json::to_value(v.conclusion).ok().and_then(|x| x.as_str().map(str::to_string)).unwrap_or_default();
            out.push_str(&format!("{:<22} {:<3} {}", c, v.rule, v.citation));
            if let Some(s) = &v.scope {
                out.push_str(&format!("  [{s}]"));
            }
            out.push('\n');
        }
        out
    }
}

const STANDING_ASSUMPTIONS: [&str; 2] = [
    "manifolds and bundles are replaced by orientation covers where needed; verdicts lift back",
    "f is replaced by a power preserving orientation of the top class",
];

fn verdict(conclusion: Conclusion, rule: &str, citation: &str, scope: Option<String>, evidence: Evidence) -> Verdict {
    Verdict { conclusion, rule: rule.into(), citation: citation.into(), scope, evidence }
}

/// Fires R1..R6 in order and assembles the report.
pub fn apply_rules(spec: &ManifoldSpec) -> Result<ObstructionReport, Error> {
    let shape = &spec.shape;
    let h = &spec.hypotheses;
    let profile = match betti_profile(shape) {
        Ok(b) => Some(b),
        Err(SpecError::OutsideHypotheses(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let chi = profile.as_deref().map(euler_characteristic);
    let dim = shape.dimension()?;
    let simply_connected = shape.simply_connected() == Some(true);
    let orientable = h.orientable_distributions || simply_connected;
    let orientable_scope = (!orientable).then(|| "Anosov diffeomorphisms with orientable invariant distributions".to_string());
    let mut verdicts = Vec::new();
    let mut bounded_only = false;

    // R1
    if let Some(b) = &profile {
        if b.iter().all(|&x| x <= 1) {
            verdicts.push(verdict(Conclusion::NoAnosov, "R1", "Prop 2.1", None, Evidence::Betti { profile: b.clone() }));
        }
    }

    // R2
    if let Some(k) = h.codimension_hint {
        if k == 0 || k > dim / 2 {
            return Err(SpecError::Invalid(format!("codimension {k} must lie in 1..={}", dim / 2)).into());
        }
        if let Some(b) = &profile {
            if b[k as usize] <= 1 {
                let scope = if orientable {
                    format!("codimension-{k} Anosov diffeomorphisms")
                } else {
                    format!("codimension-{k} Anosov diffeomorphisms with orientable invariant distributions")
                };
                verdicts.push(verdict(
                    Conclusion::NoTransitiveAnosov,
                    "R2",
                    "Prop 5.2",
                    Some(scope),
                    Evidence::Codimension { k, b_k: b[k as usize] },
                ));
            }
        }
    }

    // R3
    if let (Some(b), Some(chi)) = (&profile, chi) {
        let max = b.iter().skip(1).copied().max().unwrap_or(0);
        if max <= 2 && (chi != 0 || h.has_nonzero_exponential_char_class) {
            let (citation, source) = if chi != 0 {
                (if simply_connected { "Thm 6.1 (Thm 1.9)" } else { "Thm 6.1 (Cor 6.2)" }, "Euler class, χ ≠ 0")
            } else {
                ("Thm 6.1", "characteristic class with the exponential property (supplied)")
            };
            verdicts.push(verdict(
                Conclusion::NoTransitiveAnosov,
                "R3",
                citation,
                orientable_scope.clone(),
                Evidence::CharacteristicClass { profile: b.clone(), chi, max_positive_degree_betti: max, source: source.into() },
            ));
        }
    }

    // R4
    bundle_rules(shape, &mut verdicts)?;

    // R5
    if let Some((sp, blocks)) = shape.as_sphere_product() {
        sphere_product_rules(&sp, blocks.as_ref(), &mut verdicts);
    }

    // R6
    if let Shape::FormManifold { form, bound, .. } = shape {
        let q = UnimodularForm::new(form.clone())?;
        let chi_nonzero = chi.map(|c| c != 0).unwrap_or(true);
        let report = intersection_form::theorem110_check(&q, chi_nonzero, bound.unwrap_or(DEFAULT_FORM_BOUND))?;
        let conclusion = match report.verdict {
            FormVerdict::NoAnosov => Conclusion::NoAnosov,
            FormVerdict::Inconclusive => {
                bounded_only |= report.completeness == Completeness::BoundedOnly;
                Conclusion::Inconclusive
            }
        };
        verdicts.push(verdict(conclusion, "R6", "Thm 1.10", None, Evidence::Form(Box::new(report))));
    }

    if verdicts.iter().any(|v| v.conclusion == Conclusion::NoAnosov) {
        verdicts.retain(|v| !matches!(v.conclusion, Conclusion::NoTransitiveAnosov | Conclusion::ParityConstraint | Conclusion::Inconclusive));
        bounded_only = false;
    } else if verdicts.iter().any(|v| v.conclusion == Conclusion::NoTransitiveAnosov) {
        verdicts.retain(|v| v.conclusion != Conclusion::Inconclusive);
        bounded_only = false;
    }
    if verdicts.is_empty() {
        verdicts.push(verdict(Conclusion::Inconclusive, "-", "no rule applies", None, witness(shape)));
    }
    Ok(ObstructionReport {
        assumptions: STANDING_ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        betti_profile: profile,
        chi,
        verdicts,
        bounded_only,
    })
}

fn trace_factor(m: u32) -> u32 {
    if m % 2 == 0 {
        2
    } else {
        0
    }
}

/// Total space `E` of an `S^m`-bundle over an `n`-manifold `M` (or the
/// product `M × S^m`); `product` switches the citations.
fn sphere_fiber_rules(m: u32, base: &[usize], base_is_sphere: Option<u32>, product: bool, verdicts: &mut Vec<Verdict>) {
    let n = (base.len() - 1) as u32;
    let ev = || Evidence::Bundle { fiber_dim: m, base_dim: n, base_betti: base.to_vec(), trace_factor: trace_factor(m) };
    if let Some(s) = base_is_sphere {
        if m != s || m % 2 == 0 {
            verdicts.push(verdict(Conclusion::NoAnosov, "R4", "Cor 2.2", None, ev()));
        }
    }
    if m == n && m % 2 == 0 {
        let cite = if product { "Thm 1.1 (product bundle)" } else { "Thm 1.1" };
        verdicts.push(verdict(Conclusion::NoTransitiveAnosov, "R4", cite, None, ev()));
        if base.iter().all(|&b| b <= 1) {
            verdicts.push(verdict(Conclusion::NoAnosov, "R4", cite, None, ev()));
        }
        verdicts.push(verdict(
            Conclusion::ParityConstraint,
            "R4",
            "Addendum 3.6",
            Some("oriented bundle, orientable unstable distribution".into()),
            ev(),
        ));
    } else if m > n {
        let cite = if product { "Cor 1.4" } else { "Thm 1.2" };
        if m % 2 == 1 {
            verdicts.push(verdict(Conclusion::NoAnosov, "R4", cite, None, ev()));
        } else {
            verdicts.push(verdict(Conclusion::NoTransitiveAnosov, "R4", cite, None, ev()));
            verdicts.push(verdict(Conclusion::ParityConstraint, "R4", "Addendum 3.6", Some("orientable unstable distribution".into()), ev()));
        }
    }
}

fn bundle_rules(shape: &Shape, verdicts: &mut Vec<Verdict>) -> Result<(), SpecError> {
    match shape {
        Shape::SphereBundle { fiber_dim, base, .. } => {
            let b = betti_profile(base)?;
            let sphere = match **base {
                Shape::Sphere { dim } => Some(dim),
                _ => None,
            };
            sphere_fiber_rules(*fiber_dim, &b, sphere, false, verdicts);
        }
        Shape::FiberOverSphere { fiber, base_sphere_dim: m } => {
            let b = betti_profile(fiber)?;
            let n = (b.len() - 1) as u32;
            if *m > n + 1 {
                let ev = || Evidence::Bundle { fiber_dim: n, base_dim: *m, base_betti: b.clone(), trace_factor: trace_factor(*m) };
                if m % 2 == 1 {
                    verdicts.push(verdict(Conclusion::NoAnosov, "R4", "Thm 1.5", None, ev()));
                } else {
                    verdicts.push(verdict(Conclusion::NoTransitiveAnosov, "R4", "Thm 1.5", None, ev()));
                    verdicts.push(verdict(Conclusion::ParityConstraint, "R4", "Addendum 3.6", Some("orientable unstable distribution".into()), ev()));
                }
            }
        }
        Shape::SphereProduct { factors, .. } => {
            // M × S^m with S^m a top-dimensional factor
            let last = factors.last().expect("validated");
            let mut rest: Vec<Factor> = factors.clone();
            if last.count == 1 {
                rest.pop();
            } else {
                rest.last_mut().expect("nonempty").count -= 1;
            }
            if !rest.is_empty() {
                let pairs: Vec<(u32, u32)> = rest.iter().map(|f| (f.dim, f.count)).collect();
                let base = GradedRing::sphere_product(&pairs)?.betti_numbers();
                let sphere = (rest.len() == 1 && rest[0].count == 1).then_some(rest[0].dim);
                sphere_fiber_rules(last.dim, &base, sphere, true, verdicts);
            }
        }
        Shape::Product { factors } if factors.len() >= 2 => {
            if let Shape::Sphere { dim: m } = factors[factors.len() - 1] {
                let rest = Shape::Product { factors: factors[..factors.len() - 1].to_vec() };
                let b = betti_profile(&rest)?;
                let sphere = match factors[..factors.len() - 1] {
                    [Shape::Sphere { dim }] => Some(dim),
                    _ => None,
                };
                sphere_fiber_rules(m, &b, sphere, true, verdicts);
            }
        }
        _ => {}
    }
    Ok(())
}

fn evidence_blocks(spec: &SphereProductSpec, blocks: Option<&GeneratorBlocks>) -> GeneratorBlocks {
    blocks.cloned().unwrap_or_else(|| spec.witness_blocks())
}

fn sphere_product_rules(spec: &SphereProductSpec, blocks: Option<&GeneratorBlocks>, verdicts: &mut Vec<Verdict>) {
    let blocks = evidence_blocks(spec, blocks);
    let torus_times_sphere = spec.factors().len() == 2 && spec.factors()[0].dim == 1 && spec.factors()[1].count == 1;
    if spec.e() >= 1 {
        let ev = match sphere_products::theorem16_check(spec, &blocks, EVIDENCE_LENGTH) {
            Ok(r) => Evidence::SphereProductGrowth(Box::new(r)),
            Err(e) => Evidence::Unavailable { reason: e.to_string() },
        };
        let cite = if torus_times_sphere { "Thm 1.6 (Cor 1.8)" } else { "Thm 1.6" };
        verdicts.push(verdict(Conclusion::NoTransitiveAnosov, "R5", cite, None, ev));
    }
    if let Some(f) = spec.factors().iter().find(|f| f.dim % 2 == 1 && f.count == 1 && spec.factors().len() > 1) {
        let k = f.dim;
        let normalized: GeneratorBlocks = if blocks.get(&k).is_some_and(|a| !a.is_identity()) {
            blocks.iter().map(|(d, a)| (*d, a.pow(2))).collect()
        } else {
            blocks.clone()
        };
        let ev = match sphere_products::theorem17_check(spec, &normalized, k, EVIDENCE_LENGTH) {
            Ok(r) => Evidence::SphereProductCancellation(Box::new(r)),
            Err(e) => Evidence::Unavailable { reason: e.to_string() },
        };
        let cite = if torus_times_sphere { "Thm 1.7 (Cor 1.8)" } else { "Thm 1.7" };
        verdicts.push(verdict(Conclusion::NoAnosov, "R5", cite, None, ev));
    }
    // S^{2n} × S^{2n}: the middle cup form forces ±Id
    if let [f] = spec.factors() {
        if f.dim % 2 == 0 && f.count == 2 {
            if let Some(ev) = middle_rank_two(spec) {
                verdicts.push(verdict(Conclusion::NoAnosov, "R5", "Thm 1.1 (S^2n × S^2n)", None, ev));
            }
        }
    }
}

/// Solves the cup constraints on `H^{2n}(S^{2n} × S^{2n})` and reports the
/// growth of every solution.
fn middle_rank_two(spec: &SphereProductSpec) -> Option<Evidence> {
    let ring = spec.ring();
    let d = spec.factors()[0].dim;
    let solutions = crate::automorphism::solve_rank2_middle(0, DetConstraint::Plus, true);
    let mut compatibility = Vec::new();
    for a in &solutions {
        let mut blocks = BTreeMap::new();
        blocks.insert(d, a.clone());
        let images = GeneratorImages::from_group_blocks(&ring, &blocks).ok()?;
        let aut = induce(&ring, &images).ok()?;
        compatibility.push(lefschetz::anosov_compatibility(&aut).ok()?);
    }
    Some(Evidence::MiddleRankTwo { solutions, compatibility })
}

fn witness(shape: &Shape) -> Evidence {
    let Some((spec, blocks)) = shape.as_sphere_product() else { return Evidence::None };
    let blocks = evidence_blocks(&spec, blocks.as_ref());
    let run = || -> Result<CompatibilityReport, Error> {
        let (_, aut) = spec.induced_automorphism(&blocks)?;
        Ok(lefschetz::anosov_compatibility(&aut)?)
    };
    match run() {
        Ok(c) => Evidence::Witness { blocks: sphere_products::describe_blocks(&blocks), compatibility: Box::new(c) },
        Err(e) => Evidence::Unavailable { reason: e.to_string() },
    }
}

/// Re-runs the computation behind a verdict and checks it still implies
/// the stated conclusion.
pub fn recheck(v: &Verdict) -> bool {
    match (&v.evidence, v.conclusion) {
        (Evidence::Betti { profile }, Conclusion::NoAnosov) => profile.iter().all(|&b| b <= 1),
        (Evidence::Codimension { b_k, .. }, Conclusion::NoTransitiveAnosov) => *b_k <= 1,
        (Evidence::CharacteristicClass { profile, max_positive_degree_betti, .. }, Conclusion::NoTransitiveAnosov) => {
            *max_positive_degree_betti <= 2 && profile.iter().skip(1).all(|&b| b <= 2)
        }
        (Evidence::Bundle { trace_factor: t, .. }, c) => match c {
            Conclusion::NoAnosov => *t == 0 || v.citation.starts_with("Thm 1.1") || v.citation == "Cor 2.2",
            Conclusion::NoTransitiveAnosov | Conclusion::ParityConstraint => *t == 2,
            _ => false,
        },
        (Evidence::SphereProductGrowth(r), Conclusion::NoTransitiveAnosov) => {
            r.generic_agrees && matches!(r.verdict, SphereVerdict::NoTransitiveAnosov | SphereVerdict::NoAnosov)
        }
        (Evidence::SphereProductCancellation(r), Conclusion::NoAnosov) => {
            r.identically_zero && r.paired_sequence == r.generic_sequence
        }
        (Evidence::MiddleRankTwo { solutions, compatibility }, Conclusion::NoAnosov) => {
            !solutions.is_empty()
                && compatibility.iter().all(|c| c.compatibility == lefschetz::Compatibility::InconsistentWithAnosov)
        }
        (Evidence::Form(r), Conclusion::NoAnosov) => r.verdict == FormVerdict::NoAnosov,
        (_, Conclusion::Inconclusive) => true,
        _ => false,
    }
}
