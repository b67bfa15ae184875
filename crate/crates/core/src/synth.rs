//! The rate-optimal tracking algorithm for a given sector and integrator order.
//!
//! The design places `n` closed-loop poles at `rho^2`, keeps `n - 1` extra
//! integrators in `D~`, and chooses `N~` so the sensitivity maps the sector
//! onto a Blaschke product. Coefficients are computed twice, once from the
//! closed-form binomial sums and once by multiplying out the polynomials, and
//! the two must agree.

use serde::{Deserialize, Serialize};

use crate::algoform::AlgorithmParams;
use crate::poly::{binomial, mul_raw, RealPolynomial};
use crate::rate::rate_lower_bound;
use crate::{check_sector, Error, Result};

/// Relative infinity-norm tolerance between the two synthesis routes.
pub const ROUTE_TOL: f64 = 1e-10;
/// Largest acceptable leftover of the cancelled `z^(2n)` coefficient,
/// relative to the largest numerator coefficient.
pub const CANCELLATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub params: AlgorithmParams,
    pub n: usize,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub kappa: f64,
    pub rho: f64,
    pub rho_squared: f64,
    pub rho_hb: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub cancellation_residual: f64,
    /// Relative disagreement between the two routes (worst of alpha and beta).
    pub route_disagreement: f64,
}

/// `(K1, K2, K3)` with `K1 + K2 = K3`.
pub fn ktilde_constants(m: f64, l: f64) -> Result<(f64, f64, f64)> {
    check_sector(m, l)?;
    let (sl, sm) = (l.sqrt(), m.sqrt());
    let k1 = (sl + sm).powi(2) / (4.0 * l * m);
    let k2 = (sl - sm).powi(2) / (4.0 * l * m);
    let k3 = (l + m) / (2.0 * l * m);
    Ok((k1, k2, k3))
}

/// Best achievable rate with `n` integrators; 0 for a degenerate sector.
pub fn optimal_rate(m: f64, l: f64, n: usize) -> Result<f64> {
    rate_lower_bound(m, l, n)
}

/// Coefficients of the optimal algorithm, cross-checked between routes.
pub fn synthesize(m: f64, l: f64, n: usize) -> Result<SynthesisReport> {
    check_sector(m, l)?;
    if n == 0 {
        return Err(Error::InvalidArgument("integrator order n must be at least 1".into()));
    }
    if l == m {
        return Err(Error::DegenerateSector(m));
    }
    let (k1, k2, k3) = ktilde_constants(m, l)?;
    let rho_hb = (l.sqrt() - m.sqrt()) / (l.sqrt() + m.sqrt());
    let rho2 = (2.0 * rho_hb.ln() / n as f64).exp();
    let rho = rho2.sqrt();

    let (alpha_a, beta_a) = binomial_sums(n, rho2, k1, k2, k3);
    let (alpha_b, beta_b, leading) = polynomial_products(n, rho2, k1, k2, k3);

    let num_scale = alpha_b.iter().fold(0.0_f64, |s, a| s.max(a.abs()));
    if !(leading.abs() <= CANCELLATION_TOL * num_scale) {
        return Err(Error::IllConditioned {
            residual: leading.abs(),
        });
    }
    let rel = relative_inf_distance(&alpha_a, &alpha_b).max(relative_inf_distance(&beta_a, &beta_b));
    if !(rel <= ROUTE_TOL) {
        return Err(Error::RouteMismatch { rel });
    }

    let params = AlgorithmParams::new(alpha_b, beta_b, m, l)?;
    Ok(SynthesisReport {
        params,
        n,
        m,
        l,
        kappa: l / m,
        rho,
        rho_squared: rho2,
        rho_hb,
        k1,
        k2,
        k3,
        cancellation_residual: leading.abs(),
        route_disagreement: rel,
    })
}

fn relative_inf_distance(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).fold(0.0_f64, |s, (x, y)| s.max((x - y).abs()));
    let scale = b.iter().fold(0.0_f64, |s, y| s.max(y.abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Closed-form coefficient sums. `alpha_j` is the coefficient of
/// `z^(2n-1-j)` in the numerator, `beta_j` minus the coefficient of
/// `z^(2n-2-j)` in the denominator.
fn binomial_sums(n: usize, rho2: f64, k1: f64, k2: f64, k3: f64) -> (Vec<f64>, Vec<f64>) {
    let k = 2 * n - 1;
    let mut alpha = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let r = j + 1;
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let mut cross = 0.0;
        for i in r.saturating_sub(n)..=r.min(n) {
            let s = if (r - i) % 2 == 0 { 1.0 } else { -1.0 };
            cross += binomial(n, i) * binomial(n, r - i) * (-rho2).powi(i as i32) * s;
        }
        alpha.push(k1 * binomial(2 * n, r) * (-rho2).powi(r as i32) + k2 * binomial(2 * n, r) * sign - k3 * cross);
    }
    let mut beta = Vec::with_capacity(k);
    for j in 0..k {
        let s_idx = j + 1;
        let mut c = 0.0;
        for i in s_idx.saturating_sub(n - 1)..=s_idx.min(n) {
            let s = if (s_idx - i) % 2 == 0 { 1.0 } else { -1.0 };
            c += binomial(n, i) * binomial(n - 1, s_idx - i) * (-rho2).powi(i as i32) * s;
        }
        beta.push(-c);
    }
    (alpha, beta)
}

/// Multiplies out `K1 (z-rho^2)^(2n) + K2 (z-1)^(2n) - K3 (z-rho^2)^n (z-1)^n`
/// and `(z-rho^2)^n (z-1)^(n-1)`. Also returns the raw `z^(2n)` coefficient of
/// the numerator, which cancels in exact arithmetic.
fn polynomial_products(n: usize, rho2: f64, k1: f64, k2: f64, k3: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let a = RealPolynomial::binomial(rho2, 2 * n);
    let b = RealPolynomial::binomial(1.0, 2 * n);
    let c = mul_raw(
        RealPolynomial::binomial(rho2, n).coeffs(),
        RealPolynomial::binomial(1.0, n).coeffs(),
    );
    let num: Vec<f64> = (0..=2 * n)
        .map(|i| k1 * a.coeff(i) + k2 * b.coeff(i) - k3 * c[i])
        .collect();
    let den = mul_raw(
        RealPolynomial::binomial(rho2, n).coeffs(),
        RealPolynomial::binomial(1.0, n - 1).coeffs(),
    );
    let k = 2 * n - 1;
    let alpha = (0..=k).map(|j| num[k - j]).collect();
    let beta = (0..k).map(|j| -den[k - j - 1]).collect();
    (alpha, beta, num[2 * n])
}
