use streamfade_core::engine::apply_axis;
use streamfade_core::rng::derive_seed;
use streamfade_core::{
    ExperimentSpec, FadingModel, PathLoss, SchemeConfig, Selector, StConfig, SweepAxis, DEFAULT_AJE_SAFETY,
};

use crate::args::{Args, Format, Preset, SchemeArg};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

/// Candidate gTS windows when a preset picks the best one.
const WINDOW_CANDIDATES: [usize; 7] = [1, 2, 3, 5, 10, 25, 50];

#[derive(Debug, Clone)]
pub enum Job {
    Run(ExperimentSpec),
    /// gTS at the best window among the candidates.
    BestWindow(ExperimentSpec, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub header: Vec<String>,
    pub jobs: Vec<Job>,
    pub format: Format,
}

pub fn build(args: &Args) -> Result<Plan, String> {
    let plan = match args.preset {
        Some(preset) => preset_plan(args, preset)?,
        None => single_plan(args)?,
    };
    for job in &plan.jobs {
        let (Job::Run(spec) | Job::BestWindow(spec, _)) = job;
        spec.validate().map_err(|e| e.to_string())?;
    }
    Ok(Plan { format: args.format.unwrap_or(plan.format), ..plan })
}

fn st_config(args: &Args) -> StConfig {
    let default = StConfig::default();
    StConfig {
        exact_subset_limit: args.st_exact_limit.unwrap_or(default.exact_subset_limit),
        heuristic_subset_cap: args.st_heuristic_cap.unwrap_or(default.heuristic_subset_cap),
        ..default
    }
}

fn reject(present: bool, flag: &str, reason: &str) -> Result<(), String> {
    if present {
        Err(format!("{flag} {reason}"))
    } else {
        Ok(())
    }
}

fn single_plan(args: &Args) -> Result<Plan, String> {
    let scheme = args.scheme.ok_or("either --scheme or --preset is required")?;
    let sweep_axis = args.sweep.as_ref().map(|s| s.axis);
    let first = |axis: SweepAxis| {
        args.sweep.as_ref().filter(|s| s.axis == axis).and_then(|s| s.values.first().copied())
    };

    reject(args.window.is_some() && scheme != SchemeArg::Gts, "--window", "only applies to --scheme gts")?;
    reject(args.alpha_safety.is_some() && scheme != SchemeArg::Aje, "--alpha-safety", "only applies to --scheme aje")?;
    reject(
        (args.st_exact_limit.is_some() || args.st_heuristic_cap.is_some()) && scheme != SchemeArg::St,
        "--st-exact-limit/--st-heuristic-cap",
        "only apply to --scheme st",
    )?;
    reject(
        sweep_axis == Some(SweepAxis::Window) && scheme != SchemeArg::Gts,
        "a window sweep",
        "only applies to --scheme gts",
    )?;

    let m_total = match args.blocks.or(first(SweepAxis::Blocks).map(|v| v as usize)) {
        Some(m) => m,
        None => return Err("--blocks is required".into()),
    };
    let power_db = args.snr_db.or(first(SweepAxis::PowerDb)).ok_or("--snr-db is required")?;
    let rate_r = args.rate.or(first(SweepAxis::Rate)).unwrap_or(1.0);

    let selector = match scheme {
        SchemeArg::Mt => Selector::Scheme(SchemeConfig::Mt),
        SchemeArg::Je => Selector::Scheme(SchemeConfig::Je),
        SchemeArg::Aje => Selector::AdaptiveJe { safety: args.alpha_safety.unwrap_or(DEFAULT_AJE_SAFETY) },
        SchemeArg::Ts => Selector::Scheme(SchemeConfig::Ts),
        SchemeArg::Gts => {
            let window = args
                .window
                .or(first(SweepAxis::Window).map(|v| v as usize))
                .ok_or("--scheme gts needs --window (or a window sweep)")?;
            Selector::Scheme(SchemeConfig::Gts { window })
        }
        SchemeArg::St => Selector::Scheme(SchemeConfig::St(st_config(args))),
        SchemeArg::InformedBound => Selector::InformedBound,
    };

    let distance = args.distance.or(first(SweepAxis::Distance));
    let path_loss = match (distance, args.path_loss) {
        (Some(distance), Some(exponent)) => Some(PathLoss { distance, exponent }),
        (None, None) => None,
        (Some(_), None) => return Err("--distance needs --path-loss".into()),
        (None, Some(_)) => return Err("--path-loss needs --distance or a distance sweep".into()),
    };

    let base = ExperimentSpec {
        model: FadingModel::RayleighUnitMean,
        power_db,
        m_total,
        rate_r,
        selector,
        trials: args.trials.unwrap_or(DEFAULT_TRIALS),
        master_seed: args.seed.unwrap_or(DEFAULT_SEED),
        path_loss,
    };

    let mut header = vec![describe(&base)];
    let jobs = match &args.sweep {
        None => vec![Job::Run(base)],
        Some(sweep) => {
            let list: Vec<String> = sweep.values.iter().map(|v| v.to_string()).collect();
            header.push(format!("sweep {}={}", sweep.axis, list.join(",")));
            sweep_jobs(&base, sweep.axis, &sweep.values)?
        }
    };
    Ok(Plan { header, jobs, format: Format::Csv })
}

fn describe(spec: &ExperimentSpec) -> String {
    let mut s = format!(
        "scheme={} blocks={} rate={} snr_db={} trials={} seed={}",
        spec.selector.tag(),
        spec.m_total,
        spec.rate_r,
        spec.power_db,
        spec.trials,
        spec.master_seed
    );
    match spec.selector {
        Selector::Scheme(SchemeConfig::Gts { window }) => s += &format!(" window={window}"),
        Selector::Scheme(SchemeConfig::St(c)) => {
            s += &format!(" st_exact_limit={} st_heuristic_cap={}", c.exact_subset_limit, c.heuristic_subset_cap)
        }
        Selector::AdaptiveJe { safety } => s += &format!(" alpha_safety={safety}"),
        _ => {}
    }
    if let Some(pl) = spec.path_loss {
        s += &format!(" distance={} path_loss={}", pl.distance, pl.exponent);
    }
    s
}

/// Point `i` of a sweep runs under `derive_seed(seed, i)`, as in the engine.
fn sweep_jobs(base: &ExperimentSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<Job>, String> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut spec = apply_axis(base, axis, v).map_err(|e| e.to_string())?;
            spec.master_seed = derive_seed(base.master_seed, i as u64);
            Ok(Job::Run(spec))
        })
        .collect()
}

fn preset_plan(args: &Args, preset: Preset) -> Result<Plan, String> {
    let conflicting = [
        (args.scheme.is_some(), "--scheme"),
        (args.blocks.is_some(), "--blocks"),
        (args.rate.is_some(), "--rate"),
        (args.snr_db.is_some(), "--snr-db"),
        (args.window.is_some(), "--window"),
        (args.alpha_safety.is_some(), "--alpha-safety"),
        (args.distance.is_some(), "--distance"),
        (args.path_loss.is_some(), "--path-loss"),
        (args.sweep.is_some(), "--sweep"),
    ];
    for (present, flag) in conflicting {
        reject(present, flag, "cannot be combined with --preset (only --trials, --seed, --st-*, --out, --format, --workers)")?;
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let st = Selector::Scheme(SchemeConfig::St(st_config(args)));
    let aje = Selector::AdaptiveJe { safety: DEFAULT_AJE_SAFETY };
    let curve_schemes = [
        Selector::Scheme(SchemeConfig::Mt),
        Selector::Scheme(SchemeConfig::Je),
        aje,
        Selector::Scheme(SchemeConfig::Ts),
        st,
        Selector::InformedBound,
    ];
    let spec = |selector, m_total, rate_r, power_db, trials| ExperimentSpec {
        model: FadingModel::RayleighUnitMean,
        power_db,
        m_total,
        rate_r,
        selector,
        trials,
        master_seed: seed,
        path_loss: None,
    };
    let name = format!("{preset:?}").to_lowercase();
    let mut header = vec![format!("preset {name}")];
    let mut jobs = Vec::new();
    let mut format = Format::Csv;

    match preset {
        Preset::Fig4 => {
            let trials = args.trials.unwrap_or(10_000);
            let m = 2000;
            let windows = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 2000.0];
            header.push("gTS average rate vs window W, R=1, snr_db in {0, 2}".into());
            header.push(format!("reduced scale: M={m} instead of 10000; trials={trials} per point"));
            for db in [0.0, 2.0] {
                let base = spec(Selector::Scheme(SchemeConfig::Gts { window: 1 }), m, 1.0, db, trials);
                jobs.extend(sweep_jobs(&base, SweepAxis::Window, &windows)?);
            }
        }
        Preset::Fig5a | Preset::Fig5b => {
            let db = if preset == Preset::Fig5a { 1.44 } else { 0.0 };
            let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
            let m = 50;
            header.push(format!("decode-count cmf of every scheme, M={m}, R=1, snr_db={db}"));
            header.push(format!(
                "gts uses the best window among {WINDOW_CANDIDATES:?}; trials={trials} per point; cmf arrays in json output"
            ));
            for sel in curve_schemes {
                jobs.push(Job::Run(spec(sel, m, 1.0, db, trials)));
            }
            let gts = spec(Selector::Scheme(SchemeConfig::Gts { window: 1 }), m, 1.0, db, trials);
            jobs.push(Job::BestWindow(gts, WINDOW_CANDIDATES.to_vec()));
            format = Format::Json;
        }
        Preset::Fig6a | Preset::Fig6b => {
            let db = if preset == Preset::Fig6a { -3.0 } else { 2.0 };
            let trials = args.trials.unwrap_or(10_000);
            let blocks: Vec<f64> = (1..=100).map(f64::from).collect();
            header.push(format!("average decoded rate vs M in 1..100, R=1, snr_db={db}"));
            header.push(format!("trials={trials} per point"));
            for sel in curve_schemes {
                jobs.extend(sweep_jobs(&spec(sel, 1, 1.0, db, trials), SweepAxis::Blocks, &blocks)?);
            }
        }
        Preset::Fig7 => {
            let trials = args.trials.unwrap_or(10_000);
            let rates: Vec<f64> = (1..=20).map(|k| 0.5 * f64::from(k)).collect();
            header.push("average decoded rate vs R in 0.5..10, M=100, snr_db=20, aJE safety 0.95".into());
            header.push(format!("trials={trials} per point; ergodic_bound column is min(R, C)"));
            for sel in curve_schemes {
                jobs.extend(sweep_jobs(&spec(sel, 100, 1.0, 20.0, trials), SweepAxis::Rate, &rates)?);
            }
        }
        Preset::Fig8 => {
            let trials = args.trials.unwrap_or(10_000);
            let distances: Vec<f64> = (1..=10).map(f64::from).collect();
            header.push("average decoded rate vs distance d in 1..10, M=100, R=1, snr_db=20, path loss d^-3".into());
            header.push(format!("trials={trials} per point"));
            for sel in curve_schemes {
                let mut base = spec(sel, 100, 1.0, 20.0, trials);
                base.path_loss = Some(PathLoss { distance: 1.0, exponent: 3.0 });
                jobs.extend(sweep_jobs(&base, SweepAxis::Distance, &distances)?);
            }
        }
    }
    Ok(Plan { header, jobs, format })
}
