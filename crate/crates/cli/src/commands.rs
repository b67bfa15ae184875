use polytrack_core::export::{write_compare_csv, write_rate_samples_csv, write_trace_csv};
use polytrack_core::np::{feasibility_limit, pick_matrix, GainMarginProblem, PickMatrixReport, DEFAULT_DELTA};
use polytrack_core::rate::{rate_lower_bound, sup_rate_with, RateReport, DEFAULT_GRID};
use polytrack_core::sim::{default_init, run, Curvature, QuadraticCostSpec, TrajectoryTrace};
use polytrack_core::synth::synthesize;
use polytrack_core::{AlgorithmParams, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::artifacts::ArtifactWriter;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
struct DegenerateSynthesis {
    m: f64,
    #[serde(rename = "L")]
    l: f64,
    n: usize,
    degenerate: bool,
    rho: f64,
    params: AlgorithmParams,
}

pub fn synth(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let (m, l) = cfg.sector()?;
    // sector errors take precedence over a missing order
    polytrack_core::heavy_ball_rate(m, l)?;
    let n = cfg.order()?;
    if m == l {
        // a single gradient step with size 1/m lands on the optimum
        let params = AlgorithmParams::gradient_descent(m, l)?;
        println!("degenerate sector m = L = {m}: gradient descent with step 1/m converges in one step, rho = 0");
        return out.write_json(
            "synthesis.json",
            &DegenerateSynthesis {
                m,
                l,
                n,
                degenerate: true,
                rho: 0.0,
                params,
            },
        );
    }
    let report = synthesize(m, l, n)?;
    println!("rho   = {:.9}", report.rho);
    println!("kappa = {}", report.kappa);
    println!("k     = {}", report.params.k);
    println!(
        "{} alpha and {} beta coefficients (routes agree to {:.1e})",
        report.params.alpha.len(),
        report.params.beta.len(),
        report.route_disagreement
    );
    out.write_json("synthesis.json", &report)
}

fn random_params(m: f64, l: f64, seed: u64) -> Result<AlgorithmParams, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=3);
    let beta = (0..k).map(|_| rng.random_range(-0.3..0.9)).collect();
    let alpha = (0..=k).map(|_| rng.random_range(-0.5..1.5) / l).collect();
    Ok(AlgorithmParams::new(alpha, beta, m, l)?)
}

/// Parameters for a named algorithm over the configured sector.
fn params_for(name: &str, cfg: &RunConfig) -> Result<AlgorithmParams, CliError> {
    let custom = || {
        cfg.params
            .clone()
            .ok_or_else(|| CliError::Input("algorithm custom needs \"params\" or \"params_path\" in the config".into()))
    };
    if name == "custom" {
        return custom();
    }
    let (m, l) = cfg.sector()?;
    let params = match name {
        "optimal" => synthesize(m, l, cfg.order()?)?.params,
        "heavy_ball" => AlgorithmParams::heavy_ball(m, l)?,
        "gradient_descent" => AlgorithmParams::gradient_descent(m, l)?,
        "random" => random_params(m, l, cfg.seed.unwrap_or(0))?,
        other => {
            return Err(CliError::Input(format!(
                "unknown algorithm {other:?} (expected optimal, heavy_ball, gradient_descent, custom or random)"
            )))
        }
    };
    Ok(params)
}

pub fn analyze(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let params = match (&cfg.algorithm, &cfg.params) {
        (Some(name), _) => params_for(name, cfg)?,
        (None, Some(p)) => p.clone(),
        (None, None) => return Err(CliError::Input("analyze needs --algorithm or \"params\" in the config".into())),
    };
    params.validate()?;
    let model = params.transfer()?;
    let declared = cfg.n.unwrap_or_else(|| model.integrator_count());
    let grid = cfg.grid.unwrap_or(DEFAULT_GRID);
    let report: RateReport = sup_rate_with(&model, params.m, params.l, grid, Some(declared))?;

    println!("sup_rate    = {:.9} at lambda = {:.6}", report.sup_rate, report.argmax_lambda);
    println!("integrators = {}", report.integrators);
    if let Some(b) = report.bound {
        println!("bound       = {b:.9} for n = {declared}");
    }
    out.write_json("rate.json", &report)?;
    out.write_with("rate_samples.csv", |w| write_rate_samples_csv(w, &report))?;

    if !report.stable {
        eprintln!("warning: the algorithm is not stable over [{}, {}]", params.m, params.l);
    } else if report.integrators >= declared && report.meets_bound == Some(false) {
        return Err(CliError::Numeric(format!(
            "BOUND VIOLATION: sup_rate {} is below the lower bound {} for {declared} integrators",
            report.sup_rate,
            report.bound.unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// The cubic trajectory `x*(t) = t - t^3/3` with unit curvature.
fn default_spec() -> QuadraticCostSpec {
    QuadraticCostSpec::scalar(1.0, &[0.0, 1.0, 0.0, -1.0 / 3.0]).expect("valid default trajectory")
}

fn spec_from(cfg: &RunConfig) -> Result<QuadraticCostSpec, CliError> {
    let spec = match (&cfg.a, &cfg.delta) {
        (None, None) => default_spec(),
        (Some(a), Some(delta)) => QuadraticCostSpec::new(delta.clone(), a.clone(), 0.0)?,
        (Some(a), None) => {
            let p = a.first().map_or(1, Vec::len);
            QuadraticCostSpec::new(Curvature::Diag(vec![1.0; p]), a.clone(), 0.0)?
        }
        (None, Some(_)) => return Err(CliError::Input("\"delta\" given without trajectory coefficients \"a\"".into())),
    };
    if let Some(p) = cfg.p {
        if p != spec.p {
            return Err(Error::DimensionMismatch { expected: p, got: spec.p }.into());
        }
    }
    if let (Some(m), Some(l)) = (cfg.m, cfg.l) {
        spec.check_sector(m, l)?;
    }
    Ok(spec)
}

fn simulate_one(name: &str, cfg: &RunConfig, spec: &QuadraticCostSpec, t_end: usize) -> Result<TrajectoryTrace, CliError> {
    let params = params_for(name, cfg)?;
    let init = default_init(params.k, spec, cfg.init_offset.as_deref())?;
    Ok(run(&params, spec, t_end, &init)?)
}

#[derive(Serialize)]
struct RunSummary {
    algorithm: String,
    #[serde(rename = "T")]
    t: usize,
    final_error: f64,
    fitted_rate: Option<f64>,
    steady_state_error: f64,
    converged_to_floor: bool,
}

impl RunSummary {
    fn new(name: &str, trace: &TrajectoryTrace) -> Self {
        RunSummary {
            algorithm: name.to_string(),
            t: trace.errors.len().saturating_sub(1),
            final_error: trace.errors.last().copied().unwrap_or(0.0),
            fitted_rate: trace.fitted_rate,
            steady_state_error: trace.steady_state_error,
            converged_to_floor: trace.converged_to_floor,
        }
    }
}

fn print_summary(s: &RunSummary) {
    let rate = s.fitted_rate.map_or("n/a".to_string(), |r| format!("{r:.6}"));
    println!(
        "{:<18} steady-state error {:.3e}, fitted rate {rate}",
        s.algorithm, s.steady_state_error
    );
}

pub fn simulate(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let spec = spec_from(cfg)?;
    let t_end = cfg.t.unwrap_or(200);
    let name = cfg.algorithm.clone().unwrap_or_else(|| "optimal".to_string());
    let trace = simulate_one(&name, cfg, &spec, t_end)?;
    let summary = RunSummary::new(&name, &trace);
    print_summary(&summary);
    out.write_with(&format!("trace_{name}.csv"), |w| write_trace_csv(w, &trace))?;
    out.write_json("summary.json", &summary)
}

pub fn compare(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let spec = spec_from(cfg)?;
    let t_end = cfg.t.unwrap_or(200);
    let names = cfg
        .algorithms
        .clone()
        .unwrap_or_else(|| vec!["optimal".to_string(), "gradient_descent".to_string()]);
    if names.is_empty() {
        return Err(CliError::Input("compare needs at least one algorithm".into()));
    }
    let mut runs = Vec::with_capacity(names.len());
    for name in &names {
        runs.push((name.clone(), simulate_one(name, cfg, &spec, t_end)?));
    }
    let summaries: Vec<RunSummary> = runs.iter().map(|(n, tr)| RunSummary::new(n, tr)).collect();
    summaries.iter().for_each(print_summary);
    out.write_with("compare.csv", |w| write_compare_csv(w, &runs))?;
    out.write_json("compare.json", &summaries)
}

#[derive(Serialize)]
struct NpReport {
    problem: GainMarginProblem,
    rate_bound: f64,
    feasibility_limit: f64,
    pick: PickMatrixReport,
}

pub fn np_check(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let (m, l) = cfg.sector()?;
    let n = cfg.order()?;
    let bound = rate_lower_bound(m, l, n)?;
    let rho = cfg.rho.unwrap_or(bound);
    let problem = GainMarginProblem::new(m, l, n, rho, cfg.pick_delta.unwrap_or(DEFAULT_DELTA))?;
    let limit = feasibility_limit(rho, n, m, l)?;
    let pick = pick_matrix(&problem)?;
    println!("rho = {rho:.9}, bound = {bound:.9}");
    println!("limit of the scaled Pick determinant = {limit:.6e}");
    println!(
        "Pick matrix: determinant sign {}, min eigenvalue {:.3e}, feasible {}",
        pick.determinant_sign, pick.min_eigenvalue, pick.feasible
    );
    out.write_json(
        "np.json",
        &NpReport {
            problem,
            rate_bound: bound,
            feasibility_limit: limit,
            pick,
        },
    )
}
