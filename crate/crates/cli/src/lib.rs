//! Command-line front end for the streamfade simulator.

pub mod args;
pub mod output;
pub mod plan;

use std::fmt;
use std::io::Write as _;

use streamfade_core::rng::derive_seed;
use streamfade_core::{
    ergodic_capacity, ergodic_upper_bound, optimal_window, run_experiment_with, ExperimentResult, ExperimentSpec,
    RunOptions, SchemeConfig, Selector,
};

use args::{Args, Format};
use output::{Document, OutputRecord};
use plan::Job;

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent arguments; nothing was run.
    Usage(String),
    /// Failure while simulating or writing output.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn runtime<E: fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let plan = plan::build(args).map_err(CliError::Usage)?;
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    // claim the output location before any trial runs
    let reserved = match &args.out {
        Some(path) => Some(output::reserve(path).map_err(|e| {
            CliError::Runtime(format!("cannot write to {}: {e}", path.display()))
        })?),
        None => None,
    };
    let options = RunOptions { workers: args.workers, check_dominance: false };
    let records = plan
        .jobs
        .iter()
        .map(|job| execute(job, options))
        .collect::<Result<Vec<_>, _>>()?;
    let doc = Document::new(plan.header, records);
    doc.check_finite().map_err(CliError::Runtime)?;
    let text = match plan.format {
        Format::Csv => doc.to_csv(),
        Format::Json => doc.to_json(),
    };
    match (reserved, &args.out) {
        (Some(file), Some(path)) => output::commit(file, path, &text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        _ => std::io::stdout().write_all(text.as_bytes()).map_err(runtime),
    }
}

fn execute(job: &Job, options: RunOptions) -> Result<OutputRecord, CliError> {
    match job {
        Job::Run(spec) => {
            let result = run_experiment_with(spec, options).map_err(runtime)?;
            record(spec, &result)
        }
        Job::BestWindow(base, candidates) => {
            let (window, result) = optimal_window(base, candidates).map_err(runtime)?;
            let index = candidates.iter().position(|&w| w == window).expect("chosen among candidates");
            let mut spec = *base;
            spec.selector = Selector::Scheme(SchemeConfig::Gts { window });
            spec.master_seed = derive_seed(base.master_seed, index as u64);
            record(&spec, &result)
        }
    }
}

fn record(spec: &ExperimentSpec, result: &ExperimentResult) -> Result<OutputRecord, CliError> {
    let power = spec.effective_power().map_err(runtime)?;
    let c_bar = ergodic_capacity(&spec.model, power).map_err(runtime)?;
    Ok(OutputRecord {
        scheme: spec.selector.tag().to_string(),
        m_total: spec.m_total,
        rate_r: spec.rate_r,
        power_db: spec.power_db,
        distance: spec.path_loss.map(|p| p.distance),
        window: spec.selector.window(),
        m_prime: result.m_prime,
        mean_rate: result.mean_rate,
        rate_se: result.rate_se,
        mean_decoded: result.mean_decoded,
        ergodic_bound: ergodic_upper_bound(spec.rate_r, c_bar),
        approx_flag: result.approx_flag,
        seed: spec.master_seed,
        trials: result.trials_run,
        cmf: result.cmf.clone(),
    })
}
