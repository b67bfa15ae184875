//! Dense real polynomials.
//!
//! Coefficients are stored in ascending order (`coeffs[i]` multiplies `z^i`)
//! and every constructor trims high-degree coefficients that are negligible
//! relative to the largest one, so `degree()` is meaningful after arithmetic
//! that cancels a leading term.

mod combinatorics;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use combinatorics::{binomial, br_polynomial, factorial, falling_factorial, falling_factorial_f64, stirling2};
pub use roots::{RootOptions, RootSet};

/// Relative threshold below which a leading coefficient is dropped.
pub const TRIM_REL: f64 = 1e-14;

/// Default tolerance for [`RealPolynomial::multiplicity_at`].
pub const DEFAULT_MULTIPLICITY_TOL: f64 = 1e-7;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for RealPolynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        RealPolynomial::new(coeffs)
    }
}

impl From<RealPolynomial> for Vec<f64> {
    fn from(p: RealPolynomial) -> Self {
        p.coeffs
    }
}

impl RealPolynomial {
    /// Builds a polynomial from ascending coefficients, trimming the tail.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        trim(&mut coeffs);
        RealPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RealPolynomial { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        RealPolynomial::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        RealPolynomial::new(vec![c])
    }

    /// `c * z^degree`.
    pub fn monomial(c: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = c;
        RealPolynomial::new(coeffs)
    }

    /// Builds a polynomial from descending coefficients (`c[0]` multiplies the
    /// highest power).
    pub fn from_descending(desc: &[f64]) -> Self {
        RealPolynomial::new(desc.iter().rev().copied().collect())
    }

    /// `(z - c)^n` expanded with binomial coefficients.
    pub fn binomial(c: f64, n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        for (j, &b) in binomial_row(n).iter().enumerate() {
            // coefficient of z^{n-j}
            coeffs[n - j] = b * (-c).powi(j as i32);
        }
        RealPolynomial::new(coeffs)
    }

    /// Monic polynomial with the given roots. Conjugate pairs give a real
    /// result; any residual imaginary part is discarded.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            acc = next;
        }
        RealPolynomial::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the highest stored coefficient; 0 for constants and zero.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Coefficient of `z^i` (zero above the degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return RealPolynomial::zero();
        }
        RealPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// `s`-th derivative evaluated at `x`, i.e. `sum_i c_i (i)_s x^(i-s)`.
    pub fn derivative_at(&self, x: f64, s: usize) -> f64 {
        let mut acc = 0.0;
        for i in (s..self.coeffs.len()).rev() {
            acc = acc * x + self.coeffs[i] * falling_factorial_f64(i as f64, s);
        }
        acc
    }

    pub fn scale(&self, k: f64) -> Self {
        RealPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Monic copy (leading coefficient divided out).
    pub fn monic(&self) -> Self {
        self.scale(1.0 / self.leading())
    }

    /// Multiplicity of `z0` as a root, judged by successive derivatives.
    ///
    /// Returns the largest `r` with `|p^(s)(z0)| <= tol * max|c| * s!` for
    /// every `s < r`. The zero polynomial reports 0.
    pub fn multiplicity_at(&self, z0: f64, tol: f64) -> usize {
        if self.is_zero() {
            return 0;
        }
        let cmax = self.max_abs_coeff();
        let mut r = 0;
        while r <= self.degree() {
            let bound = tol * cmax * factorial(r);
            if self.derivative_at(z0, r).abs() > bound {
                break;
            }
            r += 1;
        }
        r
    }

    /// All complex roots with default options.
    pub fn roots(&self) -> crate::Result<RootSet> {
        roots::find_roots(self, &RootOptions::default())
    }

    pub fn roots_with(&self, opts: &RootOptions) -> crate::Result<RootSet> {
        roots::find_roots(self, opts)
    }
}

fn trim(coeffs: &mut Vec<f64>) {
    let cmax = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let cutoff = TRIM_REL * cmax;
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= cutoff) {
        coeffs.pop();
    }
    if coeffs.is_empty() || cmax == 0.0 {
        coeffs.clear();
        coeffs.push(0.0);
    }
}

pub(crate) fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..n {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Raw coefficient arithmetic without trimming, for callers that need to
/// inspect a cancelled leading term.
pub(crate) fn mul_raw(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl fmt::Debug for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealPolynomial{:?}", self.coeffs)
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && !(first && i == 0) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}z")?,
                _ => write!(f, "{a}z^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for &RealPolynomial {
    type Output = RealPolynomial;
    fn add(self, rhs: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RealPolynomial {
    type Output = RealPolynomial;
    fn sub(self, rhs: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: &RealPolynomial) -> RealPolynomial {
        RealPolynomial::new(mul_raw(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &RealPolynomial {
    type Output = RealPolynomial;
    fn neg(self) -> RealPolynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RealPolynomial {
            type Output = RealPolynomial;
            fn $m(self, rhs: RealPolynomial) -> RealPolynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const RHO2: f64 = 0.618034;

    #[test]
    fn mul_binomial_square() {
        let p = RealPolynomial::binomial(1.0, 1);
        assert_eq!((&p * &p).coeffs(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn mul_by_one_is_identity() {
        let p = RealPolynomial::new(vec![0.3, -1.5, 2.0, 7.0]);
        assert_eq!(&p * &RealPolynomial::one(), p);
    }

    #[test]
    fn product_for_optimal_denominator() {
        let p = &RealPolynomial::binomial(RHO2, 4) * &RealPolynomial::binomial(1.0, 3);
        assert_eq!(p.degree(), 7);
        // -(4 rho^2 + 3)
        assert!((p.coeff(6) + 5.472136).abs() < 1e-6, "{}", p.coeff(6));
    }

    #[test]
    fn binomial_expansion() {
        assert_eq!(RealPolynomial::binomial(1.0, 2).coeffs(), &[1.0, -2.0, 1.0]);
        assert_eq!(RealPolynomial::binomial(0.0, 5).coeffs(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let p = RealPolynomial::binomial(RHO2, 4);
        assert!((p.coeff(0) - RHO2.powi(4)).abs() < 1e-15);
        assert!((p.coeff(0) - 0.145898).abs() < 1e-6);
    }

    #[test]
    fn trimming_drops_cancelled_leading_term() {
        let a = RealPolynomial::new(vec![1.0, 2.0, 1.0]);
        let b = RealPolynomial::new(vec![0.0, 1.0, 1.0 - 1e-17]);
        let d = &a - &b;
        assert_eq!(d.degree(), 1);
        assert!(RealPolynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn multiplicity_examples() {
        let sq = RealPolynomial::binomial(1.0, 2);
        assert_eq!(sq.multiplicity_at(1.0, DEFAULT_MULTIPLICITY_TOL), 2);
        let lin = RealPolynomial::new(vec![-0.5, 1.0]);
        assert_eq!(lin.multiplicity_at(1.0, DEFAULT_MULTIPLICITY_TOL), 0);
        let p = &RealPolynomial::binomial(RHO2, 4) * &RealPolynomial::binomial(1.0, 3);
        assert_eq!(p.multiplicity_at(1.0, DEFAULT_MULTIPLICITY_TOL), 3);
    }

    #[test]
    fn display_is_readable() {
        let p = RealPolynomial::new(vec![1.0, -2.0, 1.0]);
        assert_eq!(p.to_string(), "1z^2 - 2z + 1");
    }

    #[test]
    fn serde_round_trip_trims() {
        let p: RealPolynomial = serde_json::from_str("[1.0, 2.0, 0.0]").unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,2.0]");
    }

    proptest! {
        #[test]
        fn derivative_matches_central_differences(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 2..8),
            x in -1.5f64..1.5,
        ) {
            let p = RealPolynomial::new(coeffs);
            let h = 1e-5;
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            let d = p.derivative().eval(x);
            let scale = p.coeffs().iter().enumerate()
                .map(|(i, c)| (i as f64) * c.abs() * x.abs().max(1.0).powi(i as i32))
                .sum::<f64>().max(1.0);
            prop_assert!((fd - d).abs() <= 1e-6 * scale, "fd {} vs {}", fd, d);
            prop_assert!((p.derivative_at(x, 1) - d).abs() <= 1e-12 * scale);
        }

        #[test]
        fn eval_matches_explicit_sum(
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..10),
            x in -2.0f64..2.0,
        ) {
            let p = RealPolynomial::new(coeffs);
            let direct: f64 = p.coeffs().iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum();
            let scale: f64 = p.coeffs().iter().enumerate().map(|(i, c)| c.abs() * x.abs().powi(i as i32)).sum();
            prop_assert!((p.eval(x) - direct).abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
