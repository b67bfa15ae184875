#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use polytrack_core::poly::RealPolynomial;
use polytrack_core::synth::synthesize;
use polytrack_core::AlgorithmParams;
use rand::Rng;

/// One step of the recursion written as a linear map on the stacked state
/// `(x(t-k), ..., x(t))` for curvature matrix `delta`.
pub fn block_companion(params: &AlgorithmParams, delta: &DMatrix<f64>) -> DMatrix<f64> {
    let k = params.k;
    let p = delta.nrows();
    let size = p * (k + 1);
    let mut a = DMatrix::zeros(size, size);
    for blk in 0..k {
        for i in 0..p {
            a[(blk * p + i, (blk + 1) * p + i)] = 1.0;
        }
    }
    let last = k * p;
    // weight of x(t-j) in x(t+1), stored at block column k - j
    for j in 0..=k {
        let mut momentum = 0.0;
        if j == 0 {
            momentum += 1.0;
        }
        if j < k {
            momentum += params.beta[j];
        }
        if j >= 1 {
            momentum -= params.beta[j - 1];
        }
        let col = (k - j) * p;
        for r in 0..p {
            a[(last + r, col + r)] += momentum;
            for c in 0..p {
                a[(last + r, col + c)] -= params.alpha[j] * delta[(r, c)];
            }
        }
    }
    a
}

pub fn matrix_spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Params whose momentum polynomial is `d_tilde` (monic) with the given numerator.
pub fn params_from_polys(d_tilde: &RealPolynomial, alpha: Vec<f64>, m: f64, l: f64) -> AlgorithmParams {
    let k = d_tilde.degree();
    let lead = d_tilde.leading();
    let beta = (0..k).map(|j| -d_tilde.coeff(k - j - 1) / lead).collect();
    AlgorithmParams::new(alpha, beta, m, l).expect("valid params")
}

/// The optimal design with its stable poles moved and its numerator jittered,
/// keeping the `(z-1)^(n-1)` factor so the integrator count stays `n`.
pub fn perturbed_optimal<R: Rng>(rng: &mut R, m: f64, l: f64, n: usize) -> AlgorithmParams {
    let s = synthesize(m, l, n).unwrap();
    let mut d = RealPolynomial::binomial(1.0, n - 1);
    for _ in 0..n {
        let r = s.rho_squared * (1.0 + rng.random_range(-0.2..0.2));
        d = &d * &RealPolynomial::new(vec![-r, 1.0]);
    }
    let sigma = 10f64.powf(rng.random_range(-4.0..-1.0));
    let alpha = s
        .params
        .alpha
        .iter()
        .map(|a| a * (1.0 + sigma * rng.random_range(-1.0..1.0)))
        .collect();
    params_from_polys(&d, alpha, m, l)
}

/// The optimal design for a sector containing `[m, L]`, relabelled to `[m, L]`.
pub fn wider_sector_design<R: Rng>(rng: &mut R, m: f64, l: f64, n: usize) -> AlgorithmParams {
    let lo = m * rng.random_range(0.5..1.0);
    let hi = l * rng.random_range(1.0..2.0);
    let s = synthesize(lo, hi, n).unwrap();
    AlgorithmParams::new(s.params.alpha, s.params.beta, m, l).unwrap()
}

/// Heavy-ball-shaped params with random step and momentum.
pub fn random_heavy_ball<R: Rng>(rng: &mut R, m: f64, l: f64) -> AlgorithmParams {
    let beta = rng.random_range(0.0..0.95);
    let alpha = rng.random_range(0.05..2.0 * (1.0 + beta)) / l;
    let alpha1 = rng.random_range(-0.3..0.3) * alpha;
    AlgorithmParams::new(vec![alpha, alpha1], vec![beta], m, l).unwrap()
}

/// Monic polynomial with `count` random roots of modulus at most `radius`
/// (conjugate pairs for complex ones).
pub fn random_stable_factor<R: Rng>(rng: &mut R, count: usize, radius: f64) -> RealPolynomial {
    let mut roots = Vec::new();
    while roots.len() < count {
        if count - roots.len() >= 2 && rng.random_bool(0.5) {
            let z = Complex64::from_polar(rng.random_range(0.0..radius), rng.random_range(0.0..std::f64::consts::PI));
            roots.push(z);
            roots.push(z.conj());
        } else {
            roots.push(Complex64::new(rng.random_range(-radius..radius), 0.0));
        }
    }
    RealPolynomial::from_roots(&roots)
}
