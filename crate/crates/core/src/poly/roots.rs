//! Polynomial root finding.
//!
//! Roots are the eigenvalues of the balanced companion matrix, computed with a
//! Francis double-shift QR iteration on the upper Hessenberg form, then
//! polished by Newton steps on the original polynomial.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RealPolynomial;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Largest accepted scaled residual `|p(z)| / sum |c_i| |z|^i`.
    pub tol: f64,
    /// QR iterations allowed per deflation.
    pub max_iter: usize,
    /// Roots closer than `cluster_tol * max(1, |z|)` count as one multiple root.
    /// A root of multiplicity `r` splits by roughly `eps^(1/r)`, about 1e-4
    /// for `r = 4`.
    pub cluster_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-9,
            max_iter: 60,
            cluster_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSet {
    /// All roots, repeated according to multiplicity.
    pub roots: Vec<Complex64>,
    /// Size of the cluster each root belongs to.
    pub multiplicities: Vec<usize>,
    /// Worst scaled residual over the roots.
    pub residual: f64,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }
}

pub(super) fn find_roots(p: &RealPolynomial, opts: &RootOptions) -> Result<RootSet> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "root finding needs a polynomial of degree at least one".into(),
        ));
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|&&x| x == 0.0).count();
    let reduced = &c[zeros..];
    let d = reduced.len() - 1;

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if d > 0 {
        let lead = reduced[d];
        let mut a = vec![vec![0.0; d + 1]; d + 1];
        for j in 1..=d {
            a[1][j] = -reduced[d - j] / lead;
        }
        for i in 2..=d {
            a[i][i - 1] = 1.0;
        }
        balance(&mut a, d);
        let (wr, wi) = hqr(&mut a, d, opts.max_iter)?;
        for i in 1..=d {
            if wi[i] < 0.0 {
                continue;
            }
            let z = polish(p, Complex64::new(wr[i], wi[i]));
            if wi[i] > 0.0 {
                let z = Complex64::new(z.re, z.im.abs());
                roots.push(z);
                roots.push(z.conj());
            } else {
                roots.push(Complex64::new(z.re, 0.0));
            }
        }
    }

    let residual = roots
        .iter()
        .map(|&z| scaled_residual(p, z))
        .fold(0.0_f64, f64::max);
    if !(residual <= opts.tol) {
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual,
        });
    }
    let labels = cluster_labels(&roots, opts.cluster_tol);
    let multiplicities: Vec<usize> = labels
        .iter()
        .map(|h| labels.iter().filter(|x| *x == h).count())
        .collect();
    collapse_clusters(p, &mut roots, &labels);
    Ok(RootSet {
        roots,
        multiplicities,
        residual,
    })
}

fn scaled_residual(p: &RealPolynomial, z: Complex64) -> f64 {
    let r = z.norm();
    let denom: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs() * r.powi(i as i32))
        .sum();
    if denom == 0.0 {
        0.0
    } else {
        p.eval_complex(z).norm() / denom
    }
}

fn polish(p: &RealPolynomial, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut best = p.eval_complex(z).norm();
    for _ in 0..8 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval_complex(z) / d;
        let r = p.eval_complex(cand).norm();
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    z
}

/// A multiple root comes out of the eigenvalue solver as a small ring of
/// roots whose spread is far larger than the error of their mean. Each
/// cluster is replaced by its mean, refined as a simple root of the
/// `(s-1)`-th derivative, when `p` vanishes there to working precision.
fn collapse_clusters(p: &RealPolynomial, roots: &mut [Complex64], labels: &[usize]) {
    let mut heads: Vec<usize> = labels.to_vec();
    heads.sort_unstable();
    heads.dedup();
    for h in heads {
        let members: Vec<usize> = (0..roots.len()).filter(|&i| labels[i] == h).collect();
        let s = members.len();
        if s < 2 {
            continue;
        }
        let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>() / s as f64;
        let spread = members.iter().fold(0.0_f64, |m, &i| m.max((roots[i] - mean).norm()));
        let c = if mean.im < 0.0 {
            refine_multiple(p, s, mean.conj(), spread).map(|z| z.conj())
        } else {
            refine_multiple(p, s, mean, spread)
        };
        if let Some(c) = c {
            for &i in &members {
                roots[i] = c;
            }
        }
    }
}

fn refine_multiple(p: &RealPolynomial, s: usize, start: Complex64, spread: f64) -> Option<Complex64> {
    let mut q = p.clone();
    for _ in 0..s - 1 {
        q = q.derivative();
    }
    let dq = q.derivative();
    let mut z = start;
    if z.im.abs() <= 1e-14 * z.norm().max(1.0) {
        z.im = 0.0;
    }
    let mut best = q.eval_complex(z).norm();
    for _ in 0..8 {
        let d = dq.eval_complex(z);
        if d.norm() == 0.0 || best == 0.0 {
            break;
        }
        let cand = z - q.eval_complex(z) / d;
        let r = q.eval_complex(cand).norm();
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    let near = (z - start).norm() <= 2.0 * spread + 1e-12 * start.norm().max(1.0);
    (near && scaled_residual(p, z) <= COLLAPSE_RESIDUAL).then_some(z)
}

/// Scaled residual below which a cluster mean counts as a genuine multiple root.
const COLLAPSE_RESIDUAL: f64 = 1e-12;

fn cluster_labels(roots: &[Complex64], tol: f64) -> Vec<usize> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a] = b;
            }
        }
    }
    (0..n).map(|i| find(&mut label, i)).collect()
}

/// Balances a 1-based square matrix in place by powers of two.
fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut last = false;
    while !last {
        last = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    last = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of a 1-based upper Hessenberg matrix (destroyed).
///
/// Complex pairs are returned adjacently, the one with positive imaginary
/// part second.
fn hqr(a: &mut [Vec<f64>], n: usize, max_iter: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) as usize][($j) as usize]
        };
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at!(l, l - 1).abs() + s == s {
                    at!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
            } else {
                let mut y = at!(nn - 1, nn - 1);
                let mut w = at!(nn, nn - 1) * at!(nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    let (i1, i2) = ((nn - 1) as usize, nn as usize);
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        wr[i1] = x + z;
                        wr[i2] = x + z;
                        if z != 0.0 {
                            wr[i2] = x - w / z;
                        }
                        wi[i1] = 0.0;
                        wi[i2] = 0.0;
                    } else {
                        wr[i1] = x + p;
                        wr[i2] = x + p;
                        wi[i1] = -z;
                        wi[i2] = z;
                    }
                    nn -= 2;
                } else {
                    if its >= max_iter {
                        return Err(Error::NonConvergence {
                            iterations: its,
                            residual: at!(nn, nn - 1).abs(),
                        });
                    }
                    if its > 0 && its % 10 == 0 {
                        t += x;
                        for i in 1..=nn {
                            at!(i, i) -= x;
                        }
                        let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    let (mut p, mut q, mut r, mut z);
                    loop {
                        z = at!(m, m);
                        let r0 = x - z;
                        let s0 = y - z;
                        p = (r0 * s0 - w) / at!(m + 1, m) + at!(m, m + 1);
                        q = at!(m + 1, m + 1) - z - r0 - s0;
                        r = at!(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        at!(i, i - 2) = 0.0;
                        if i != m + 2 {
                            at!(i, i - 3) = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at!(k, k - 1);
                            q = at!(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = at!(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    at!(k, k - 1) = -at!(k, k - 1);
                                }
                            } else {
                                at!(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = at!(k, j) + q * at!(k + 1, j);
                                if k != nn - 1 {
                                    p += r * at!(k + 2, j);
                                    at!(k + 2, j) -= p * z;
                                }
                                at!(k + 1, j) -= p * y;
                                at!(k, j) -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * at!(i, k) + y * at!(i, k + 1);
                                if k != nn - 1 {
                                    p += z * at!(i, k + 2);
                                    at!(i, k + 2) -= p * r;
                                }
                                at!(i, k + 1) -= p * q;
                                at!(i, k) -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_with_complex_pair() {
        // z^2 + 1
        let p = RealPolynomial::new(vec![1.0, 0.0, 1.0]);
        let rs = p.roots().unwrap();
        let r = sorted(rs.roots);
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_roots_are_factored_out() {
        let p = RealPolynomial::new(vec![0.0, 0.0, -2.0, 1.0]);
        let rs = p.roots().unwrap();
        let r = sorted(rs.roots);
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
        assert_eq!(r[1], Complex64::new(0.0, 0.0));
        assert!((r[2].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_root_cluster() {
        let p = &RealPolynomial::binomial(1.0, 3) * &RealPolynomial::binomial(0.5, 4);
        let rs = p.roots().unwrap();
        assert_eq!(rs.len(), 7);
        for (z, m) in rs.roots.iter().zip(&rs.multiplicities) {
            if (z - 1.0).norm() < 0.01 {
                assert_eq!(*m, 3);
            } else {
                assert!((z - 0.5).norm() < 0.01);
                assert_eq!(*m, 4);
            }
        }
    }

    #[test]
    fn wilkinson_like_spread() {
        let roots: Vec<Complex64> = (1..=10).map(|i| Complex64::new(i as f64 * 0.1, 0.0)).collect();
        let p = RealPolynomial::from_roots(&roots);
        let got = sorted(p.roots().unwrap().roots);
        for (g, e) in got.iter().zip(&roots) {
            assert!((g - e).norm() < 1e-6, "{g} vs {e}");
        }
    }

    #[test]
    fn constant_is_rejected() {
        assert!(RealPolynomial::constant(3.0).roots().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn roots_reconstruct_polynomial(coeffs in proptest::collection::vec(-5.0f64..5.0, 2..12)) {
            let mut coeffs = coeffs;
            let last = coeffs.len() - 1;
            if coeffs[last].abs() < 0.1 {
                coeffs[last] = 1.0;
            }
            let p = RealPolynomial::new(coeffs);
            let rs = p.roots().unwrap();
            prop_assert_eq!(rs.len(), p.degree());
            let rebuilt = RealPolynomial::from_roots(&rs.roots).scale(p.leading());
            let scale = p.max_abs_coeff();
            for i in 0..=p.degree() {
                prop_assert!((rebuilt.coeff(i) - p.coeff(i)).abs() <= 1e-8 * scale,
                    "coefficient {} differs: {} vs {}", i, rebuilt.coeff(i), p.coeff(i));
            }
        }

        #[test]
        fn roots_of_products_of_factors(
            re in proptest::collection::vec(-0.9f64..0.9, 1..5),
            cx in proptest::collection::vec((0.05f64..0.9, 0.05f64..3.1), 0..3),
        ) {
            let mut expected: Vec<Complex64> = re.iter().map(|&r| Complex64::new(r, 0.0)).collect();
            for &(m, a) in &cx {
                let z = Complex64::from_polar(m, a);
                expected.push(z);
                expected.push(z.conj());
            }
            let p = RealPolynomial::from_roots(&expected);
            let got = p.roots().unwrap();
            for z in &expected {
                let best = got.roots.iter().map(|g| (g - z).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-4, "missing root {}", z);
            }
        }
    }
}
