//! Interpolation-theoretic side of the rate bound.
//!
//! A compensator placing all closed-loop poles in `|z| < rho` for every gain
//! in `[m, L]` exists exactly when a bounded analytic interpolation problem on
//! the unit disk is solvable. This module provides the conformal map `theta`
//! from the slit plane onto the disk, its inverse, the extremal Blaschke
//! interpolant, and the Pick matrix whose definiteness decides solvability.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{check_sector, Error, Result};

/// Default spacing of the pole perturbations `eps_i = delta * i`.
pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMarginProblem {
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub rho: f64,
    pub epsilons: Vec<f64>,
}

impl GainMarginProblem {
    /// Problem with perturbations `delta * (1, ..., n)`.
    pub fn new(m: f64, l: f64, n: usize, rho: f64, delta: f64) -> Result<Self> {
        let p = GainMarginProblem {
            m,
            l,
            n,
            rho,
            epsilons: (1..=n).map(|i| delta * i as f64).collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_sector(self.m, self.l)?;
        if self.n == 0 {
            return Err(Error::InvalidArgument("integrator order n must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        let e = &self.epsilons;
        let distinct = e.iter().enumerate().all(|(i, a)| e[..i].iter().all(|b| a != b));
        if e.len() != self.n || !distinct || e.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::BadPerturbations);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickMatrixReport {
    /// Row-major `(n+1) x (n+1)` matrix `[[P, 1], [1^T, 1 - theta(1)^2]]`.
    pub matrix: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    /// Exact determinant of the matrix defined by the inputs, rounded to f64.
    pub determinant: f64,
    pub determinant_sign: i8,
    /// `min_eigenvalue >= -1e-10 * ||M||`.
    pub psd_by_eigenvalue: bool,
    /// Exact positive semidefiniteness.
    pub feasible: bool,
}

fn in_slit(z: Complex64, m: f64, l: f64) -> bool {
    if l == m {
        return false;
    }
    let on_axis = z.im.abs() <= 1e-12 * z.norm().max(1.0);
    on_axis && (z.re <= 2.0 * m / (m - l) || z.re > 2.0 * l / (l - m))
}

/// Conformal map of the slit plane onto the unit disk with `theta(0) = 0`
/// and `theta(1) = rho_hb`.
pub fn theta(z: Complex64, m: f64, l: f64) -> Result<Complex64> {
    check_sector(m, l)?;
    if in_slit(z, m, l) {
        return Err(Error::DomainViolation { re: z.re, im: z.im });
    }
    let num = 1.0 - z * ((l - m) / (2.0 * l));
    let den = 1.0 - z * ((m - l) / (2.0 * m));
    let w = (num / den).sqrt();
    Ok((1.0 - w) / (1.0 + w))
}

/// `8 L m w / ((L - m)(L (w-1)^2 + m (w+1)^2))`.
pub fn theta_inverse(w: Complex64, m: f64, l: f64) -> Result<Complex64> {
    check_sector(m, l)?;
    let den = (l - m) * (l * (w - 1.0).powi(2) + m * (w + 1.0).powi(2));
    let scale = (l + m) * (l + m) * (1.0 + w.norm()).powi(2);
    if den.norm() <= 1e-14 * scale {
        return Err(Error::Singularity { re: w.re, im: w.im });
    }
    Ok(8.0 * l * m * w / den)
}

/// `(theta(1) / rho^n) ((rho - z) / (1 - rho z))^n`.
pub fn blaschke_interpolant(z: Complex64, rho: f64, n: usize, m: f64, l: f64) -> Result<Complex64> {
    check_sector(m, l)?;
    let t1 = theta_one(m, l);
    let f = (rho - z) / (1.0 - rho * z);
    Ok(t1 / rho.powi(n as i32) * f.powi(n as i32))
}

/// Sensitivity `theta^{-1}(S^(rho / z))` of the extremal design.
pub fn sensitivity(z: Complex64, rho: f64, n: usize, m: f64, l: f64) -> Result<Complex64> {
    let s_hat = blaschke_interpolant(rho / z, rho, n, m, l)?;
    theta_inverse(s_hat, m, l)
}

/// `K~(z) = (1/S(z) - 1)(z - 1) / lambda0` with `lambda0 = (m + L)/2`: the
/// compensator numerator/denominator ratio implied by the sensitivity.
pub fn recovered_k_tilde(z: Complex64, rho: f64, n: usize, m: f64, l: f64) -> Result<Complex64> {
    let s = sensitivity(z, rho, n, m, l)?;
    Ok((1.0 / s - 1.0) * (z - 1.0) / (0.5 * (m + l)))
}

fn theta_one(m: f64, l: f64) -> f64 {
    (l.sqrt() - m.sqrt()) / (l.sqrt() + m.sqrt())
}

/// Limit of the scaled Pick determinant as the perturbations vanish:
/// `(rho^(2n) - theta(1)^2) / (1 - rho^2)^(n^2)`, nonnegative iff
/// `rho^n >= theta(1)`.
///
/// A numerator within rounding distance of zero is reported as exactly zero.
pub fn feasibility_limit(rho: f64, n: usize, m: f64, l: f64) -> Result<f64> {
    check_sector(m, l)?;
    if !(rho > 0.0 && rho < 1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!("need 0 < rho < 1 and n >= 1, got rho = {rho}, n = {n}")));
    }
    let t2 = theta_one(m, l).powi(2);
    let mut num = rho.powi(2 * n as i32) - t2;
    if num.abs() <= 8.0 * n as f64 * f64::EPSILON * t2 {
        num = 0.0;
    }
    Ok(num / (1.0 - rho * rho).powi((n * n) as i32))
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Exact Pick matrix for the perturbed problem.
fn exact_pick(problem: &GainMarginProblem) -> Vec<Vec<BigRational>> {
    let n = problem.n;
    let one = BigRational::one();
    let r2 = exact(problem.rho) * exact(problem.rho);
    let shifted: Vec<BigRational> = problem.epsilons.iter().map(|&e| &one + exact(e)).collect();
    let t = exact(theta_one(problem.m, problem.l));
    let mut mat = vec![vec![BigRational::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            let a = &r2 / (&shifted[i] * &shifted[j]);
            mat[i][j] = (&one - a).recip();
        }
        mat[i][n] = one.clone();
        mat[n][i] = one.clone();
    }
    mat[n][n] = &one - &t * &t;
    mat
}

/// Elimination without pivoting; returns the pivots, or `None` if a zero
/// pivot appears before the last row.
fn pivots(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_zero() && k + 1 < n {
            return None;
        }
        for i in (k + 1)..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        out.push(p);
    }
    Some(out)
}

/// Determinant by partial-pivot elimination (any nonzero pivot).
fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        let p = a[k][k].clone();
        for i in (k + 1)..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        det *= p;
    }
    det
}

fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // fall back through a scaled integer when the ratio under/overflows
        let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
        let shift = (bits - 60).max(0) as usize;
        let scaled = x / BigRational::from_integer(BigInt::one() << shift);
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

pub fn pick_matrix(problem: &GainMarginProblem) -> Result<PickMatrixReport> {
    problem.validate()?;
    let exact_m = exact_pick(problem);
    let size = problem.n + 1;
    let matrix: Vec<Vec<f64>> = exact_m
        .iter()
        .map(|row| row.iter().map(rational_to_f64).collect())
        .collect();

    let dm = DMatrix::from_fn(size, size, |i, j| matrix[i][j]);
    let eig = SymmetricEigen::new(dm.clone());
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = dm.norm();

    let det = determinant(exact_m.clone());
    let determinant_sign = if det.is_zero() {
        0
    } else if det.is_positive() {
        1
    } else {
        -1
    };
    let feasible = match pivots(exact_m) {
        Some(p) => p[..size - 1].iter().all(|x| x.is_positive()) && !p[size - 1].is_negative(),
        None => false,
    };
    Ok(PickMatrixReport {
        matrix,
        min_eigenvalue,
        determinant: rational_to_f64(&det),
        determinant_sign,
        psd_by_eigenvalue: min_eigenvalue >= -1e-10 * norm,
        feasible,
    })
}
