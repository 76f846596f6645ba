//! Univariate integer polynomials: exact characteristic polynomials,
//! square-free decomposition, cyclotomic factors, and floating-point roots
//! with a posteriori error bounds.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::SpectralError;
use crate::matrix::IntMatrix;

/// Coefficients in ascending order; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// `x^deg · p(1/x)`
    pub fn reciprocal(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    /// Pseudo-division: returns `(q, r)` with `lc(d)^k · self = q·d + r`,
    /// `k = deg(self) - deg(d) + 1`.
    pub fn pseudo_divmod(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.coeffs.len() < d.coeffs.len() {
            return (IntPoly::zero(), self.clone());
        }
        let lc = d.leading();
        let dn = d.degree();
        let mut r = self.coeffs.clone();
        let steps = self.degree() - dn + 1;
        let mut q = vec![BigInt::zero(); steps];
        for s in (0..steps).rev() {
            let top = r[s + dn].clone();
            for c in q.iter_mut() {
                *c *= &lc;
            }
            for c in r.iter_mut() {
                *c *= &lc;
            }
            q[s] += &top;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[s + i] -= &top * dc;
            }
        }
        (IntPoly::new(q), IntPoly::new(r))
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.pseudo_divmod(self).1.is_zero()
    }

    /// Quotient up to a nonzero scalar, returned primitive. Assumes `d | self`.
    pub fn exact_quotient(&self, d: &IntPoly) -> IntPoly {
        let (q, r) = self.pseudo_divmod(d);
        debug_assert!(r.is_zero(), "exact_quotient on non-divisible polynomials");
        q.primitive()
    }

    /// Greatest common divisor (primitive, positive leading coefficient).
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_divmod(&b).1;
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// Square-free decomposition `p = c · Π fᵢ^{mᵢ}` with each `fᵢ`
    /// square-free, primitive and non-constant.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        if self.is_constant() {
            return Vec::new();
        }
        let f = self.primitive();
        let mut c = f.gcd(&f.derivative());
        let mut w = f.exact_quotient(&c);
        let mut out = Vec::new();
        let mut i = 1;
        while !w.is_constant() {
            let y = w.gcd(&c);
            let z = w.exact_quotient(&y);
            if !z.is_constant() {
                out.push((z, i));
            }
            i += 1;
            c = c.exact_quotient(&y);
            w = y;
        }
        out
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn as_f64(&self) -> Vec<f64> {
        // Scale by the leading coefficient's magnitude so huge coefficients
        // stay representable; roots are unaffected.
        let lead_bits = self.leading().bits() as i64;
        let shift = (lead_bits - 52).max(0);
        self.coeffs
            .iter()
            .map(|c| {
                if shift == 0 {
                    c.to_f64().unwrap_or(f64::INFINITY)
                } else {
                    (c >> shift as usize).to_f64().unwrap_or(f64::INFINITY)
                }
            })
            .collect()
    }

    /// Roots of a square-free polynomial with error radii.
    pub fn roots(&self) -> Result<Vec<Root>, SpectralError> {
        find_roots(&self.as_f64())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `det(xI - A)` by the Faddeev–LeVerrier recursion. Every division is
/// exact over ℤ, so the result is exact.
pub fn charpoly(a: &IntMatrix) -> IntPoly {
    assert!(a.is_square(), "charpoly of non-square matrix");
    let n = a.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += &coeffs[n - k + 1];
        }
        m = next;
        let t = a.matmul(&m).trace();
        coeffs[n - k] = -(t / BigInt::from(k));
    }
    IntPoly::new(coeffs)
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `k`-th cyclotomic polynomial.
pub fn cyclotomic(k: usize) -> IntPoly {
    assert!(k >= 1);
    thread_local! {
        static CACHE: std::cell::RefCell<Vec<Option<IntPoly>>> = const { std::cell::RefCell::new(Vec::new()) };
    }
    if let Some(p) = CACHE.with(|c| c.borrow().get(k).cloned().flatten()) {
        return p;
    }
    let mut p = IntPoly::x_pow_minus_one(k);
    for d in 1..k {
        if k % d == 0 {
            p = p.pseudo_divmod(&cyclotomic(d)).0;
        }
    }
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() <= k {
            c.resize(k + 1, None);
        }
        c[k] = Some(p.clone());
    });
    p
}

/// All `k` such that `Φ_k` divides `p`, with the multiplicity of each.
/// Only `k` with `φ(k) ≤ deg p` can occur.
pub fn cyclotomic_factors(p: &IntPoly) -> Vec<(usize, usize)> {
    let n = p.degree() as u64;
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // φ(k) ≥ sqrt(k/2), so k ≤ 2n² bounds the search.
    let limit = (2 * n * n).max(2) as usize;
    for k in 1..=limit {
        if euler_phi(k as u64) > n {
            continue;
        }
        let phi = cyclotomic(k);
        let mut rest = p.clone();
        let mut mult = 0;
        while !rest.is_constant() {
            let (q, r) = rest.pseudo_divmod(&phi);
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((k, mult));
        }
    }
    out
}

/// Unit-circle test: such roots are common roots of `p` and its reciprocal,
/// so only the roots of `gcd(p, p*)` are checked numerically.
pub fn has_root_on_unit_circle(p: &IntPoly) -> Result<bool, SpectralError> {
    if !cyclotomic_factors(p).is_empty() {
        return Ok(true);
    }
    let g = p.gcd(&p.reciprocal());
    if g.is_constant() {
        return Ok(false);
    }
    for (factor, _) in g.squarefree_decomposition() {
        for r in factor.roots()? {
            if (r.value.norm() - 1.0).abs() <= 1e-9_f64.max(r.error) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// Radius of a disc around `value` certified (up to floating-point
    /// evaluation of the inclusion formula) to contain a root.
    pub error: f64,
}

/// An eigenvalue with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
    pub error: f64,
}

/// Eigenvalues of an integer matrix from its exact characteristic
/// polynomial: square-free factors are solved separately so repeated
/// eigenvalues come back as exact multiplicities.
pub fn eigenvalues(a: &IntMatrix) -> Result<Vec<Eigenvalue>, SpectralError> {
    let p = charpoly(a);
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for r in factor.roots()? {
            out.push(Eigenvalue { value: r.value, multiplicity: mult, error: r.error });
        }
    }
    Ok(out)
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn abs_horner(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.abs())
}

fn find_roots(c: &[f64]) -> Result<Vec<Root>, SpectralError> {
    let n = c.len().saturating_sub(1);
    match n {
        0 => return Ok(Vec::new()),
        1 => {
            return Ok(vec![Root { value: Complex64::new(-c[0] / c[1], 0.0), error: f64::EPSILON * (c[0] / c[1]).abs() }]);
        }
        _ => {}
    }
    let lead = c[n];
    let mut z: Vec<Complex64> = {
        // Fujiwara-style radius
        let radius = (0..n)
            .map(|i| (c[i] / lead).abs().powf(1.0 / (n - i) as f64))
            .fold(0.0_f64, f64::max)
            .max(1e-3)
            * 1.1;
        (0..n)
            .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
            .collect()
    };
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_step = 0.0_f64;
        for k in 0..n {
            let (p, dp) = horner(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / z[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    // Final Newton polish on each (simple) root.
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zk);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.is_finite() {
                    *zk -= step;
                }
            }
        }
    }
    let roots: Vec<Root> = (0..n)
        .map(|k| {
            let (p, _) = horner(c, z[k]);
            let rounding = 4.0 * n as f64 * f64::EPSILON * abs_horner(c, z[k].norm());
            let denom: f64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).norm()).product::<f64>() * lead.abs();
            let radius = n as f64 * (p.norm() + rounding) / denom;
            let floor = 8.0 * f64::EPSILON * z[k].norm().max(1.0);
            Root { value: clean(z[k]), error: radius.max(floor) }
        })
        .collect();
    if !converged && roots.iter().any(|r| !r.error.is_finite() || r.error > 1e-6 * r.value.norm().max(1.0)) {
        return Err(SpectralError::NoConvergence { degree: n });
    }
    Ok(roots)
}

/// Snaps an imaginary part that is pure round-off to zero.
fn clean(z: Complex64) -> Complex64 {
    if z.im.abs() <= 1e-13 * z.norm().max(1.0) {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_examples() {
        let cat = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        assert_eq!(charpoly(&cat), IntPoly::from_i64(&[1, -3, 1]));
        let rot = IntMatrix::from_rows(&[[0, -1], [1, 0]]);
        assert_eq!(charpoly(&rot), IntPoly::from_i64(&[1, 0, 1]));
        assert_eq!(charpoly(&IntMatrix::identity(3)), IntPoly::from_i64(&[-1, 3, -3, 1]));
        assert_eq!(charpoly(&IntMatrix::zeros(0, 0)), IntPoly::one());
    }

    #[test]
    fn charpoly_matches_determinant_expansion() {
        // det(tI - A) evaluated at integer points t against the exact determinant.
        let a = IntMatrix::from_rows(&[[1, 2, 0, -1], [3, -1, 2, 0], [0, 1, 1, 4], [2, 0, -3, 1]]);
        let p = charpoly(&a);
        for t in -3..=3 {
            let shifted = IntMatrix::scalar(4, t).sub(&a);
            assert_eq!(p.eval(&BigInt::from(t)), shifted.det(), "t = {t}");
        }
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2), IntPoly::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(4), IntPoly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(euler_phi(12), 4);
        let p = IntPoly::from_i64(&[1, 2, 1]); // (x+1)^2
        assert_eq!(cyclotomic_factors(&p), vec![(2, 2)]);
        assert!(cyclotomic_factors(&IntPoly::from_i64(&[1, -3, 1])).is_empty());
    }

    #[test]
    fn squarefree() {
        // (x-1)^3 (x+2)
        let p = IntPoly::from_i64(&[-1, 1]).mul(&IntPoly::from_i64(&[-1, 1])).mul(&IntPoly::from_i64(&[-1, 1])).mul(&IntPoly::from_i64(&[2, 1]));
        let d = p.squarefree_decomposition();
        assert_eq!(d, vec![(IntPoly::from_i64(&[2, 1]), 1), (IntPoly::from_i64(&[-1, 1]), 3)]);
    }

    #[test]
    fn roots_of_cat_map() {
        let roots = IntPoly::from_i64(&[1, -3, 1]).roots().unwrap();
        let mut mods: Vec<f64> = roots.iter().map(|r| r.value.norm()).collect();
        mods.sort_by(f64::total_cmp);
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((mods[1] - phi2).abs() < 1e-13);
        assert!((mods[0] - 1.0 / phi2).abs() < 1e-13);
        assert!(roots.iter().all(|r| r.error < 1e-12));
    }

    #[test]
    fn unit_circle_detection() {
        assert!(has_root_on_unit_circle(&IntPoly::from_i64(&[1, 0, 1])).unwrap());
        assert!(!has_root_on_unit_circle(&IntPoly::from_i64(&[1, -3, 1])).unwrap());
        // x^4 - x^3 - x^2 - x + 1: a Salem-type polynomial with two roots on the unit circle
        assert!(has_root_on_unit_circle(&IntPoly::from_i64(&[1, -1, -1, -1, 1])).unwrap());
    }

    #[test]
    fn eigenvalues_with_multiplicity() {
        let ev = eigenvalues(&IntMatrix::identity(3)).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].multiplicity, 3);
        assert!((ev[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
}
