//! Parameters of the general momentum recursion and its transfer-function view.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{binomial, factorial, falling_factorial_f64, RealPolynomial, DEFAULT_MULTIPLICITY_TOL};
use crate::{check_sector, Error, Result};

/// One instance of the recursion
/// `x(t+1) = x(t) + sum_j beta_j (x(t-j) - x(t-j-1)) - sum_j alpha_j grad f(x(t-j), t-j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmParams {
    pub k: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl AlgorithmParams {
    /// Builds and validates params; `k` is taken from `beta.len()`.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, m: f64, l: f64) -> Result<Self> {
        let p = AlgorithmParams {
            k: beta.len(),
            alpha,
            beta,
            m,
            l,
        };
        p.validate()?;
        Ok(p)
    }

    /// Polyak's heavy ball: `alpha = 4/(sqrt L + sqrt m)^2`, `beta = rho_hb^2`.
    pub fn heavy_ball(m: f64, l: f64) -> Result<Self> {
        check_sector(m, l)?;
        let (sl, sm) = (l.sqrt(), m.sqrt());
        let a = 4.0 / (sl + sm).powi(2);
        let b = ((sl - sm) / (sl + sm)).powi(2);
        AlgorithmParams::new(vec![a, 0.0], vec![b], m, l)
    }

    /// Plain gradient descent with step `2/(L+m)`.
    pub fn gradient_descent(m: f64, l: f64) -> Result<Self> {
        check_sector(m, l)?;
        AlgorithmParams::new(vec![2.0 / (l + m)], vec![], m, l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() != self.k + 1 || self.beta.len() != self.k {
            return Err(Error::LengthMismatch {
                k: self.k,
                expected_alpha: self.k + 1,
                expected_beta: self.k,
                alpha: self.alpha.len(),
                beta: self.beta.len(),
            });
        }
        check_sector(self.m, self.l)?;
        if self.alpha.iter().chain(&self.beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        if self.alpha.iter().sum::<f64>() == 0.0 {
            return Err(Error::ZeroAlphaSum);
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.l / self.m
    }

    pub fn transfer(&self) -> Result<TransferModel> {
        self.validate()?;
        let k = self.k;
        let mut d = vec![0.0; k + 1];
        d[k] = 1.0;
        for (j, &b) in self.beta.iter().enumerate() {
            d[k - j - 1] = -b;
        }
        let mut nt = vec![0.0; k + 1];
        for (j, &a) in self.alpha.iter().enumerate() {
            nt[k - j] = a;
        }
        let d_tilde = RealPolynomial::new(d);
        let d_full = &RealPolynomial::new(vec![-1.0, 1.0]) * &d_tilde;
        Ok(TransferModel {
            k,
            n_tilde: RealPolynomial::new(nt),
            d_tilde,
            d_full,
        })
    }

    /// Condition 1 at order `n` with the default tolerance.
    pub fn check_condition1(&self, n: usize) -> bool {
        self.check_condition1_tol(n, DEFAULT_MULTIPLICITY_TOL)
    }

    /// Checks `sum_j beta_j (kh-j-1)_r = (kh)_r` for `0 <= r <= n-2` at every
    /// witness `kh` in `k..=k+n`.
    ///
    /// Residuals are judged against `tol * C * r! * sum_{u<=r} binom(kh-k, u)`
    /// with `C` the largest coefficient of `(z-1) D~(z)`. At `kh = k` this is
    /// the same threshold [`TransferModel::integrator_count`] applies to the
    /// derivatives of `(z-1) D~` at 1, and the binomial sum bounds how those
    /// derivatives propagate to the shifted witnesses.
    pub fn check_condition1_tol(&self, n: usize, tol: f64) -> bool {
        if n <= 1 {
            return true;
        }
        let scale = self.d_full_scale();
        for kh in self.k..=self.k + n {
            let d = kh - self.k;
            for r in 0..=(n - 2) {
                let bound = tol * scale * factorial(r) * (0..=r).map(|u| binomial(d, u)).sum::<f64>();
                if self.condition1_residual(kh, r).abs() > bound {
                    return false;
                }
            }
        }
        true
    }

    /// `(kh)_r - sum_j beta_j (kh-j-1)_r`.
    pub fn condition1_residual(&self, kh: usize, r: usize) -> f64 {
        let lhs: f64 = self
            .beta
            .iter()
            .enumerate()
            .map(|(j, b)| b * falling_factorial_f64(kh as f64 - j as f64 - 1.0, r))
            .sum();
        falling_factorial_f64(kh as f64, r) - lhs
    }

    /// Whether the order-`r` identity holds (used to decide which falling
    /// factorial components of a trajectory the recursion absorbs exactly).
    pub(crate) fn condition1_order_holds(&self, r: usize) -> bool {
        self.check_condition1(r + 2)
    }

    fn d_full_scale(&self) -> f64 {
        // coefficients of (z-1) D~ are differences of neighbouring D~ coefficients
        let mut d = vec![0.0; self.k + 1];
        d[self.k] = 1.0;
        for (j, &b) in self.beta.iter().enumerate() {
            d[self.k - j - 1] = -b;
        }
        let mut s = d[0].abs().max(d[self.k].abs());
        for i in 1..=self.k {
            s = s.max((d[i - 1] - d[i]).abs());
        }
        s
    }
}

/// `N~(z) = sum_j alpha_j z^(k-j)`, `D~(z) = z^k - sum_j beta_j z^(k-j-1)` and
/// `D = (z-1) D~`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferModel {
    pub k: usize,
    pub n_tilde: RealPolynomial,
    pub d_tilde: RealPolynomial,
    pub d_full: RealPolynomial,
}

impl TransferModel {
    /// `(z-1) D~(z) + lambda N~(z)`; its roots are the closed-loop poles at
    /// curvature `lambda`.
    pub fn char_poly(&self, lambda: f64) -> RealPolynomial {
        &self.d_full + &self.n_tilde.scale(lambda)
    }

    /// Number of roots of `D` at `z = 1` (default tolerance).
    pub fn integrator_count(&self) -> usize {
        self.integrator_count_tol(DEFAULT_MULTIPLICITY_TOL)
    }

    pub fn integrator_count_tol(&self, tol: f64) -> usize {
        self.d_full.multiplicity_at(1.0, tol).max(1)
    }

    /// `K~(z) = N~(z) / D~(z)`.
    pub fn k_tilde(&self, z: Complex64) -> Complex64 {
        self.n_tilde.eval_complex(z) / self.d_tilde.eval_complex(z)
    }

    /// Reads `(alpha, beta)` back off the polynomials.
    pub fn to_params(&self, m: f64, l: f64) -> Result<AlgorithmParams> {
        let k = self.k;
        let lead = self.d_tilde.coeff(k);
        if self.d_tilde.degree() != k || lead != 1.0 {
            return Err(Error::InvalidArgument("D~ must be monic of degree k".into()));
        }
        let alpha = (0..=k).map(|j| self.n_tilde.coeff(k - j)).collect();
        let beta = (0..k).map(|j| -self.d_tilde.coeff(k - j - 1)).collect();
        AlgorithmParams::new(alpha, beta, m, l)
    }
}
