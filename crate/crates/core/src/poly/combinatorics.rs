use super::RealPolynomial;

/// Falling factorial `(i)_r = i (i-1) ... (i-r+1)`, with `(i)_0 = 1`.
///
/// Negative `i` is allowed; the product is taken literally.
pub fn falling_factorial(i: i64, r: u32) -> i64 {
    (0..r as i64).map(|j| i - j).product()
}

pub fn falling_factorial_f64(x: f64, r: usize) -> f64 {
    (0..r).map(|j| x - j as f64).product()
}

pub fn factorial(r: usize) -> f64 {
    (1..=r).map(|j| j as f64).product()
}

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

/// Stirling numbers of the second kind `S(r, s)`.
pub fn stirling2(r: usize, s: usize) -> u128 {
    if s > r {
        return 0;
    }
    let mut row = vec![0u128; r + 1];
    row[0] = 1;
    for i in 1..=r {
        let mut next = vec![0u128; r + 1];
        for j in 1..=i {
            next[j] = j as u128 * row[j] + row[j - 1];
        }
        row = next;
    }
    row[s]
}

/// `B_r(z)` defined by `B_0 = z` and `B_{r+1} = z (r+1) B_r - z (z-1) B_r'`.
///
/// These arise when differentiating `z/(z-1)` repeatedly; `B_r(1) = r!`.
pub fn br_polynomial(r: usize) -> RealPolynomial {
    let z = RealPolynomial::monomial(1.0, 1);
    let z_zm1 = RealPolynomial::new(vec![0.0, -1.0, 1.0]);
    let mut b = z.clone();
    for i in 0..r {
        let lhs = (&z * &b).scale((i + 1) as f64);
        b = &lhs - &(&z_zm1 * &b.derivative());
    }
    b
}
