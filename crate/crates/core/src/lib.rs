//! Synthesis and analysis of linear gradient-based algorithms that track the
//! minimizer of a quadratic cost whose optimum moves along a polynomial in
//! time.
//!
//! An algorithm is the recursion
//!
//! ```text
//! x(t+1) = x(t) + sum_{j<k} beta_j (x(t-j) - x(t-j-1)) - sum_{j<=k} alpha_j grad f(x(t-j), t-j)
//! ```
//!
//! over a cost `f(x, t) = 1/2 (x - x*(t))^T Delta (x - x*(t)) + c` with
//! `m I <= Delta <= L I` and `x*(t)` a polynomial of degree `n - 1`.
//!
//! Modules:
//!
//! * [`poly`]: real polynomials, root finding, multiplicities, combinatorics.
//! * [`algoform`]: parameters, transfer polynomials, integrator counting.
//! * [`synth`]: the rate-optimal design for a given `(m, L, n)`.
//! * [`rate`]: worst-case rate over the curvature sector.
//! * [`np`]: Nevanlinna-Pick machinery behind the rate lower bound.
//! * [`sim`]: tracking simulation and empirical rates.
//! * [`export`]: JSON/CSV writers for the reports above.

pub mod algoform;
pub mod error;
pub mod export;
pub mod np;
pub mod poly;
pub mod rate;
pub mod sim;
pub mod synth;

pub use algoform::{AlgorithmParams, TransferModel};
pub use error::{Error, Result};
pub use np::{GainMarginProblem, PickMatrixReport};
pub use poly::{RealPolynomial, RootSet};
pub use rate::RateReport;
pub use sim::{QuadraticCostSpec, TrajectoryTrace};
pub use synth::SynthesisReport;

/// Convergence rate of Polyak's heavy ball method on the sector `[m, L]`,
/// `(sqrt(L) - sqrt(m)) / (sqrt(L) + sqrt(m))`.
pub fn heavy_ball_rate(m: f64, l: f64) -> Result<f64> {
    check_sector(m, l)?;
    let (sl, sm) = (l.sqrt(), m.sqrt());
    Ok((sl - sm) / (sl + sm))
}

pub(crate) fn check_sector(m: f64, l: f64) -> Result<()> {
    if !(m > 0.0) || !(l >= m) || !l.is_finite() {
        return Err(Error::BadSector { m, l });
    }
    Ok(())
}
