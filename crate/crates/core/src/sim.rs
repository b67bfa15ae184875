//! Tracking simulations on time-varying quadratic costs
//! `f(x, t) = 1/2 (x - x*(t))^T Delta (x - x*(t)) + c` with polynomial optima.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algoform::AlgorithmParams;
use crate::poly::stirling2;
use crate::{Error, Result};

/// Errors above this abort a run.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
/// Fitting band for the empirical rate.
pub const FIT_BAND: (f64, f64) = (1e-12, 1e-2);
/// Errors at or below this count as converged.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Diag(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCostSpec {
    pub p: usize,
    pub delta: Curvature,
    /// Trajectory coefficients: `x*(t) = a[0] + a[1] t + ... + a[n-1] t^(n-1)`.
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub c: f64,
}

impl QuadraticCostSpec {
    pub fn new(delta: Curvature, a: Vec<Vec<f64>>, c: f64) -> Result<Self> {
        let p = match &delta {
            Curvature::Diag(d) => d.len(),
            Curvature::Full(rows) => rows.len(),
        };
        let spec = QuadraticCostSpec { p, delta, a, c };
        spec.validate()?;
        Ok(spec)
    }

    /// One-dimensional cost with curvature `delta`.
    pub fn scalar(delta: f64, a: &[f64]) -> Result<Self> {
        QuadraticCostSpec::new(
            Curvature::Diag(vec![delta]),
            a.iter().map(|&v| vec![v]).collect(),
            0.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidArgument("dimension p must be positive".into()));
        }
        match &self.delta {
            Curvature::Diag(d) if d.len() != self.p => {
                return Err(Error::DimensionMismatch {
                    expected: self.p,
                    got: d.len(),
                })
            }
            Curvature::Full(rows) => {
                if rows.len() != self.p {
                    return Err(Error::DimensionMismatch {
                        expected: self.p,
                        got: rows.len(),
                    });
                }
                for row in rows {
                    if row.len() != self.p {
                        return Err(Error::DimensionMismatch {
                            expected: self.p,
                            got: row.len(),
                        });
                    }
                }
                for i in 0..self.p {
                    for j in 0..i {
                        let (x, y) = (rows[i][j], rows[j][i]);
                        if (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0) {
                            return Err(Error::InvalidArgument("delta must be symmetric".into()));
                        }
                    }
                }
            }
            _ => {}
        }
        if self.a.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs at least one coefficient vector".into()));
        }
        for v in &self.a {
            if v.len() != self.p {
                return Err(Error::DimensionMismatch {
                    expected: self.p,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// Number of trajectory coefficients, i.e. the polynomial order `n`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn delta_matrix(&self) -> DMatrix<f64> {
        match &self.delta {
            Curvature::Diag(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            Curvature::Full(rows) => DMatrix::from_fn(self.p, self.p, |i, j| rows[i][j]),
        }
    }

    /// Extremal eigenvalues of `Delta`.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.delta_matrix()).eigenvalues;
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Checks `m I <= Delta <= L I` up to 1e-9.
    pub fn check_sector(&self, m: f64, l: f64) -> Result<()> {
        let (lo, hi) = self.spectrum_bounds();
        if lo < m - 1e-9 || hi > l + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "spectrum of delta [{lo}, {hi}] leaves the sector [{m}, {l}]"
            )));
        }
        Ok(())
    }

    pub fn optimum_at(&self, t: i64) -> DVector<f64> {
        let t = t as f64;
        let mut out = DVector::zeros(self.p);
        for coeff in self.a.iter().rev() {
            out *= t;
            out += DVector::from_column_slice(coeff);
        }
        out
    }

    pub fn value(&self, x: &DVector<f64>, t: i64) -> Result<f64> {
        self.check_dim(x)?;
        let e = x - self.optimum_at(t);
        Ok(0.5 * e.dot(&(self.delta_matrix() * &e)) + self.c)
    }

    pub fn gradient(&self, x: &DVector<f64>, t: i64) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(self.delta_matrix() * (x - self.optimum_at(t)))
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Falling-factorial coefficients of the forward difference
    /// `x*(s+1) - x*(s) = sum_r c_r (s)_r`.
    fn difference_coefficients(&self) -> Vec<DVector<f64>> {
        let n = self.a.len();
        (0..n.saturating_sub(1))
            .map(|r| {
                let mut c = DVector::zeros(self.p);
                for (i, ai) in self.a.iter().enumerate() {
                    let s = stirling2(i, r + 1) as f64;
                    if s != 0.0 {
                        c += DVector::from_column_slice(ai) * (s * (r + 1) as f64);
                    }
                }
                c
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTrace {
    pub times: Vec<usize>,
    /// `x(t)`, or `x(t) - x*(t)` when `shifted` is set.
    pub iterates: Vec<Vec<f64>>,
    pub optima: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
    pub shifted: bool,
    pub fitted_rate: Option<f64>,
    pub steady_state_error: f64,
    pub converged_to_floor: bool,
}

impl TrajectoryTrace {
    fn build(iterates: Vec<DVector<f64>>, optima: Vec<DVector<f64>>, errors: Vec<f64>, shifted: bool) -> Self {
        let len = errors.len();
        let mut trace = TrajectoryTrace {
            times: (0..len).collect(),
            iterates: iterates.into_iter().map(|v| v.as_slice().to_vec()).collect(),
            optima: optima.into_iter().map(|v| v.as_slice().to_vec()).collect(),
            errors,
            shifted,
            fitted_rate: None,
            steady_state_error: 0.0,
            converged_to_floor: false,
        };
        trace.fitted_rate = fitted_rate(&trace.errors);
        trace.steady_state_error = steady_state_error(&trace, default_window(len));
        trace.converged_to_floor = trace.errors.last().is_some_and(|&e| e <= ERROR_FLOOR);
        trace
    }

    /// Iterates in original coordinates.
    pub fn original_iterates(&self) -> Vec<Vec<f64>> {
        if !self.shifted {
            return self.iterates.clone();
        }
        self.iterates
            .iter()
            .zip(&self.optima)
            .map(|(x, s)| x.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect()
    }
}

/// Mean error over the last `window` entries.
pub fn steady_state_error(trace: &TrajectoryTrace, window: usize) -> f64 {
    let w = window.clamp(1, trace.errors.len().max(1));
    let tail = &trace.errors[trace.errors.len().saturating_sub(w)..];
    if tail.is_empty() {
        0.0
    } else {
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

/// Ten percent of the run length, at least one step.
pub fn default_window(len: usize) -> usize {
    (len / 10).max(1)
}

/// Geometric rate from a least-squares fit of `log10 e(t)`.
///
/// Uses the steps whose error lies inside [`FIT_BAND`], restricted to the
/// final 40% of the span up to the last step still above the floor. Needs at
/// least five points.
pub fn fitted_rate(errors: &[f64]) -> Option<f64> {
    let (lo, hi) = FIT_BAND;
    let last = errors.iter().rposition(|&e| e > lo)?;
    let start = (0.6 * last as f64).ceil() as usize;
    let pts: Vec<(f64, f64)> = (start..=last)
        .filter(|&t| errors[t] > lo && errors[t] < hi)
        .map(|t| (t as f64, errors[t].log10()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(10f64.powf(sxy / sxx))
}

/// `x(0..=k)` all equal to `x*(0) + offset`; the default offset is the unit
/// vector `(1, ..., 1) / sqrt(p)`.
pub fn default_init(k: usize, spec: &QuadraticCostSpec, offset: Option<&[f64]>) -> Result<Vec<DVector<f64>>> {
    let off = match offset {
        Some(o) if o.len() != spec.p => {
            return Err(Error::DimensionMismatch {
                expected: spec.p,
                got: o.len(),
            })
        }
        Some(o) => DVector::from_column_slice(o),
        None => DVector::from_element(spec.p, 1.0 / (spec.p as f64).sqrt()),
    };
    let x0 = spec.optimum_at(0) + off;
    Ok(vec![x0; k + 1])
}

fn check_run_inputs(params: &AlgorithmParams, spec: &QuadraticCostSpec, t_end: usize, init: &[DVector<f64>]) -> Result<()> {
    params.validate()?;
    spec.validate()?;
    if t_end <= params.k {
        return Err(Error::InvalidArgument(format!(
            "horizon T = {t_end} must exceed the history depth k = {}",
            params.k
        )));
    }
    if init.len() != params.k + 1 {
        return Err(Error::DimensionMismatch {
            expected: params.k + 1,
            got: init.len(),
        });
    }
    for x in init {
        spec.check_dim(x)?;
    }
    Ok(())
}

/// Linear time-invariant update shared by every frame:
/// `e(t+1) = e(t) + sum_j beta_j (e(t-j) - e(t-j-1)) - sum_j alpha_j Delta e(t-j)`.
fn homogeneous_step(params: &AlgorithmParams, delta: &DMatrix<f64>, e: &[DVector<f64>], t: usize) -> DVector<f64> {
    let mut next = e[t].clone();
    for (j, &b) in params.beta.iter().enumerate() {
        next += (&e[t - j] - &e[t - j - 1]) * b;
    }
    for (j, &a) in params.alpha.iter().enumerate() {
        next -= delta * &e[t - j] * a;
    }
    next
}

fn diverged(step: usize, e: f64) -> Result<()> {
    if !(e <= DIVERGENCE_LIMIT) {
        return Err(Error::Divergence { step, error: e });
    }
    Ok(())
}

/// Runs the recursion for steps `0..=T` and reports `x(t)`.
///
/// The iteration is carried in error coordinates `e = x - x*` with the exact
/// forcing produced by the moving optimum. That forcing is a combination of
/// the order-`r` residuals of the momentum identity
/// `sum_j beta_j (t-j-1)_r = (t)_r`; orders at which the identity holds are
/// absorbed exactly by the recursion's integrators and contribute nothing.
pub fn run(params: &AlgorithmParams, spec: &QuadraticCostSpec, t_end: usize, init: &[DVector<f64>]) -> Result<TrajectoryTrace> {
    check_run_inputs(params, spec, t_end, init)?;
    let delta = spec.delta_matrix();
    let k = params.k;
    let diff = spec.difference_coefficients();
    let active: Vec<usize> = (0..diff.len()).filter(|&r| !params.condition1_order_holds(r)).collect();

    let optima: Vec<DVector<f64>> = (0..=t_end).map(|t| spec.optimum_at(t as i64)).collect();
    let mut e: Vec<DVector<f64>> = init.iter().zip(&optima).map(|(x, s)| x - s).collect();
    for t in 0..=k {
        diverged(t, e[t].norm())?;
    }
    for t in k..t_end {
        let mut next = homogeneous_step(params, &delta, &e, t);
        for &r in &active {
            let g = params.condition1_residual(t, r);
            next -= &diff[r] * g;
        }
        diverged(t + 1, next.norm())?;
        e.push(next);
    }
    let errors = e.iter().map(|v| v.norm()).collect();
    let iterates = e.iter().zip(&optima).map(|(v, s)| v + s).collect();
    Ok(TrajectoryTrace::build(iterates, optima, errors, false))
}

/// The recursion iterated literally in original coordinates with gradients
/// `Delta (x(t-j) - x*(t-j))`.
pub fn run_direct(params: &AlgorithmParams, spec: &QuadraticCostSpec, t_end: usize, init: &[DVector<f64>]) -> Result<TrajectoryTrace> {
    check_run_inputs(params, spec, t_end, init)?;
    let k = params.k;
    let optima: Vec<DVector<f64>> = (0..=t_end).map(|t| spec.optimum_at(t as i64)).collect();
    let mut x: Vec<DVector<f64>> = init.to_vec();
    let mut grads: Vec<DVector<f64>> = Vec::with_capacity(t_end + 1);
    for (t, xi) in x.iter().enumerate() {
        grads.push(spec.gradient(xi, t as i64)?);
    }
    for t in k..t_end {
        let mut next = x[t].clone();
        for (j, &b) in params.beta.iter().enumerate() {
            next += (&x[t - j] - &x[t - j - 1]) * b;
        }
        for (j, &a) in params.alpha.iter().enumerate() {
            next -= &grads[t - j] * a;
        }
        diverged(t + 1, (&next - &optima[t + 1]).norm())?;
        grads.push(spec.gradient(&next, (t + 1) as i64)?);
        x.push(next);
    }
    let errors = x.iter().zip(&optima).map(|(a, b)| (a - b).norm()).collect();
    Ok(TrajectoryTrace::build(x, optima, errors, false))
}

/// The time-invariant recursion in shifted coordinates `x~ = x - x*`, valid
/// when the momentum coefficients satisfy the identity up to the
/// trajectory's order. `init` is given in original coordinates.
pub fn run_shifted(params: &AlgorithmParams, spec: &QuadraticCostSpec, t_end: usize, init: &[DVector<f64>]) -> Result<TrajectoryTrace> {
    check_run_inputs(params, spec, t_end, init)?;
    let n = spec.order();
    if !params.check_condition1(n) {
        return Err(Error::Condition1Violated { n });
    }
    let delta = spec.delta_matrix();
    let optima: Vec<DVector<f64>> = (0..=t_end).map(|t| spec.optimum_at(t as i64)).collect();
    let mut e: Vec<DVector<f64>> = init.iter().zip(&optima).map(|(x, s)| x - s).collect();
    for t in params.k..t_end {
        let next = homogeneous_step(params, &delta, &e, t);
        diverged(t + 1, next.norm())?;
        e.push(next);
    }
    let errors = e.iter().map(|v| v.norm()).collect();
    Ok(TrajectoryTrace::build(e, optima, errors, true))
}
