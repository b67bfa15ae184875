//! Worst-case asymptotic rate over the curvature sector.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algoform::{AlgorithmParams, TransferModel};
use crate::{check_sector, Result};

pub const DEFAULT_GRID: usize = 2001;
/// `stable` requires `sup_rate < 1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;
/// Slack allowed when comparing a rate against the lower bound.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub lambda: f64,
    pub spectral_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub sup_rate: f64,
    pub argmax_lambda: f64,
    /// Refined local maxima that come within 1e-7 of the supremum.
    pub maximizers: Vec<f64>,
    pub integrators: usize,
    pub bound: Option<f64>,
    pub meets_bound: Option<bool>,
    pub stable: bool,
    pub marginal: bool,
    pub samples: Vec<RateSample>,
}

/// `((sqrt L - sqrt m)/(sqrt L + sqrt m))^(1/n)`: no algorithm with `n`
/// integrators converges faster over the whole sector.
pub fn rate_lower_bound(m: f64, l: f64, n: usize) -> Result<f64> {
    check_sector(m, l)?;
    if n == 0 {
        return Err(crate::Error::InvalidArgument("integrator order n must be at least 1".into()));
    }
    let hb = (l.sqrt() - m.sqrt()) / (l.sqrt() + m.sqrt());
    if hb == 0.0 {
        return Ok(0.0);
    }
    Ok((hb.ln() / n as f64).exp())
}

/// Largest root modulus of the characteristic polynomial at `lambda`.
pub fn spectral_radius_at(model: &TransferModel, lambda: f64) -> Result<f64> {
    Ok(model.char_poly(lambda).roots()?.max_modulus())
}

/// Sweeps `[m, L]` on the default grid. The lower bound `rho_hb^(1/n)` is attached for
/// the model's own integrator count.
pub fn sup_rate(params: &AlgorithmParams) -> Result<RateReport> {
    let model = params.transfer()?;
    let n = model.integrator_count();
    sup_rate_with(&model, params.m, params.l, DEFAULT_GRID, Some(n))
}

/// Grid sweep followed by golden-section refinement of every grid-local
/// maximum. `declared_n` attaches the lower bound for that order.
pub fn sup_rate_with(
    model: &TransferModel,
    m: f64,
    l: f64,
    grid: usize,
    declared_n: Option<usize>,
) -> Result<RateReport> {
    check_sector(m, l)?;
    let grid = if l == m { 1 } else { grid.max(2) };
    let lambdas: Vec<f64> = (0..grid)
        .map(|i| {
            if i + 1 == grid {
                l
            } else {
                m + (l - m) * i as f64 / (grid - 1).max(1) as f64
            }
        })
        .collect();
    let radii: Vec<f64> = lambdas
        .par_iter()
        .map(|&lam| spectral_radius_at(model, lam))
        .collect::<Result<_>>()?;

    let mut peaks = Vec::new();
    for i in 0..grid {
        let left = i == 0 || radii[i] >= radii[i - 1];
        let right = i + 1 == grid || radii[i] >= radii[i + 1];
        if left && right {
            peaks.push(i);
        }
    }
    let tol = 1e-9 * (l - m);
    let refined: Vec<(f64, f64)> = peaks
        .par_iter()
        .map(|&i| {
            if grid == 1 {
                return Ok((lambdas[0], radii[0]));
            }
            let lo = lambdas[i.saturating_sub(1)];
            let hi = lambdas[(i + 1).min(grid - 1)];
            let (x, fx) = golden_max(|lam| spectral_radius_at(model, lam), lo, hi, tol)?;
            Ok(if fx >= radii[i] { (x, fx) } else { (lambdas[i], radii[i]) })
        })
        .collect::<Result<_>>()?;

    let (argmax_lambda, sup) = refined
        .iter()
        .copied()
        .fold((m, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let maximizers = refined
        .iter()
        .filter(|c| c.1 >= sup - 1e-7)
        .map(|c| c.0)
        .collect();
    let bound = declared_n.map(|n| rate_lower_bound(m, l, n)).transpose()?;
    Ok(RateReport {
        m,
        l,
        sup_rate: sup,
        argmax_lambda,
        maximizers,
        integrators: model.integrator_count(),
        bound,
        meets_bound: bound.map(|b| sup >= b - BOUND_SLACK),
        stable: sup < 1.0 - STABILITY_MARGIN,
        marginal: (sup - 1.0).abs() <= STABILITY_MARGIN,
        samples: lambdas
            .into_iter()
            .zip(radii)
            .map(|(lambda, spectral_radius)| RateSample {
                lambda,
                spectral_radius,
            })
            .collect(),
    })
}

fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    // the bracket endpoints can beat the interior probes on a kinked curve
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        let fx = f(x)?;
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_radius_examples() {
        let hb = AlgorithmParams::heavy_ball(1.0, 9.0).unwrap().transfer().unwrap();
        assert!((spectral_radius_at(&hb, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((spectral_radius_at(&hb, 1.0).unwrap() - 0.5).abs() < 1e-7);
        let gd = AlgorithmParams::gradient_descent(1.0, 9.0).unwrap().transfer().unwrap();
        assert!((spectral_radius_at(&gd, 9.0).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn baseline_sup_rates() {
        let r = sup_rate(&AlgorithmParams::heavy_ball(1.0, 9.0).unwrap()).unwrap();
        assert!((r.sup_rate - 0.5).abs() < 1e-6);
        assert!(r.stable);
        let r = sup_rate(&AlgorithmParams::gradient_descent(1.0, 9.0).unwrap()).unwrap();
        assert!((r.sup_rate - 0.8).abs() < 1e-6);
        assert!(r.maximizers.iter().any(|&x| (x - 1.0).abs() < 1e-6));
        assert!(r.maximizers.iter().any(|&x| (x - 9.0).abs() < 1e-6));
        assert!((r.bound.unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(r.meets_bound, Some(true));
    }

    #[test]
    fn lower_bound_examples() {
        assert!((rate_lower_bound(1.0, 9.0, 2).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((rate_lower_bound(1.0, 9.0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(rate_lower_bound(4.0, 4.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn unstable_params_are_flagged() {
        let p = AlgorithmParams::new(vec![1.0], vec![], 1.0, 9.0).unwrap();
        let r = sup_rate(&p).unwrap();
        assert!(!r.stable);
        assert!((r.sup_rate - 8.0).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_interior_peak() {
        let (x, fx) = golden_max(|x| Ok(1.0 - (x - 0.3).powi(2)), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}
