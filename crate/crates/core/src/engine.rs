//! Monte Carlo experiment runner.
//!
//! Trial `k` of an experiment always draws from the stream derived from
//! `(master_seed, k)`, and per-trial results are reduced through integer
//! histograms, so a result is bit-identical regardless of thread count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::informed_upper_bound;
use crate::channel::{effective_power, ergodic_capacity, sample_realization, FadingModel, PathLoss, PowerBudget};
use crate::error::{invalid, Error, Result};
use crate::montecarlo::fold_trials;
use crate::rng::derive_seed;
use crate::schemes::{check_rate, choose_m_prime, SchemeConfig};
use crate::stats::IntMoments;

/// Default `M'/M = safety * C̄ / R` factor for adaptive JE.
pub const DEFAULT_AJE_SAFETY: f64 = 0.95;

/// What a run decodes with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selector {
    Scheme(SchemeConfig),
    /// Adaptive JE with `M'` re-derived from the ergodic capacity at each
    /// operating point.
    AdaptiveJe { safety: f64 },
    /// Informed-transmitter upper bound.
    InformedBound,
}

impl Selector {
    pub fn tag(&self) -> &'static str {
        match self {
            Selector::Scheme(s) => s.tag(),
            Selector::AdaptiveJe { .. } => "aje",
            Selector::InformedBound => "informed-bound",
        }
    }

    pub fn window(&self) -> Option<usize> {
        match self {
            Selector::Scheme(SchemeConfig::Gts { window }) => Some(*window),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: FadingModel,
    pub power_db: f64,
    pub m_total: usize,
    pub rate_r: f64,
    pub selector: Selector,
    pub trials: u64,
    pub master_seed: u64,
    pub path_loss: Option<PathLoss>,
}

impl ExperimentSpec {
    /// Rayleigh experiment without path loss.
    pub fn new(selector: Selector, m_total: usize, rate_r: f64, power_db: f64, trials: u64, master_seed: u64) -> Self {
        ExperimentSpec {
            model: FadingModel::RayleighUnitMean,
            power_db,
            m_total,
            rate_r,
            selector,
            trials,
            master_seed,
            path_loss: None,
        }
    }

    /// Received power after path loss.
    pub fn effective_power(&self) -> Result<PowerBudget> {
        let p = PowerBudget::from_db(self.power_db)?;
        match self.path_loss {
            Some(pl) => effective_power(p, pl.distance, pl.exponent),
            None => Ok(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.m_total == 0 {
            return Err(invalid("m_total must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        check_rate(self.rate_r)?;
        if let Some(pl) = self.path_loss {
            pl.validate()?;
        }
        self.effective_power()?;
        match self.selector {
            Selector::Scheme(s) => s.validate(self.m_total),
            Selector::AdaptiveJe { safety } if !(safety > 0.0 && safety <= 1.0) => {
                Err(invalid(format!("aJE safety factor must lie in (0, 1], got {safety}")))
            }
            _ => Ok(()),
        }
    }

    /// Fixes `M'` for adaptive JE at this operating point.
    fn resolve(&self) -> Result<Resolved> {
        self.validate()?;
        let power = self.effective_power()?;
        let decoder = match self.selector {
            Selector::Scheme(s) => Decoder::Scheme(s),
            Selector::AdaptiveJe { safety } => {
                let c_bar = ergodic_capacity(&self.model, power)?;
                Decoder::Scheme(SchemeConfig::Aje {
                    m_prime: choose_m_prime(c_bar, self.rate_r, self.m_total, safety),
                })
            }
            Selector::InformedBound => Decoder::Informed,
        };
        Ok(Resolved { power, decoder })
    }
}

#[derive(Debug, Clone, Copy)]
enum Decoder {
    Scheme(SchemeConfig),
    Informed,
}

#[derive(Debug, Clone, Copy)]
struct Resolved {
    power: PowerBudget,
    decoder: Decoder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub mean_rate: f64,
    pub rate_se: f64,
    /// `cmf[m] = Pr{n_d <= m}`, `m = 0..=M`.
    pub cmf: Vec<f64>,
    pub mean_decoded: f64,
    pub approx_flag: bool,
    pub trials_run: u64,
    /// Raw decode-count histogram behind `cmf`.
    pub counts: Vec<u64>,
    /// `M'` actually used by adaptive JE.
    pub m_prime: Option<usize>,
}

impl ExperimentResult {
    /// `Pr{n_d = 0}`.
    pub fn zero_decode_prob(&self) -> f64 {
        self.cmf[0]
    }
}

/// Execution knobs that do not change the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Check every trial's count against the informed bound.
    pub check_dominance: bool,
}

#[derive(Debug, Clone)]
struct Tally {
    counts: Vec<u64>,
    moments: IntMoments,
    approximate: bool,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.moments = self.moments.merge(other.moments);
        self.approximate |= other.approximate;
        self
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_experiment_with(spec, RunOptions::default())
}

pub fn run_experiment_with(spec: &ExperimentSpec, options: RunOptions) -> Result<ExperimentResult> {
    let resolved = spec.resolve()?;
    match options.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| invalid(format!("cannot build worker pool: {e}")))?;
            pool.install(|| execute(spec, resolved, options.check_dominance))
        }
        None => execute(spec, resolved, options.check_dominance),
    }
}

fn execute(spec: &ExperimentSpec, resolved: Resolved, check_dominance: bool) -> Result<ExperimentResult> {
    let m_total = spec.m_total;
    let rate_r = spec.rate_r;
    let tally = fold_trials(
        spec.master_seed,
        spec.trials,
        || Tally { counts: vec![0; m_total + 1], moments: IntMoments::default(), approximate: false },
        |tally, rng| {
            let real = sample_realization(&spec.model, resolved.power, m_total, rng)?;
            let outcome = match resolved.decoder {
                Decoder::Scheme(s) => s.decode(&real, rate_r, resolved.power)?,
                Decoder::Informed => informed_upper_bound(&real, rate_r),
            };
            if check_dominance {
                let bound = informed_upper_bound(&real, rate_r).n_d;
                if outcome.n_d > bound {
                    return Err(Error::InvariantViolated(format!(
                        "{} decoded {} messages but the informed bound is {bound}",
                        spec.selector.tag(),
                        outcome.n_d
                    )));
                }
            }
            tally.counts[outcome.n_d] += 1;
            tally.moments.push(outcome.n_d as u64);
            tally.approximate |= outcome.approximate;
            Ok(())
        },
        Tally::merge,
    )?;
    let trials = spec.trials as f64;
    let mean_decoded = tally.moments.mean();
    let scale = rate_r / m_total as f64;
    let mut acc = 0u64;
    let cmf = tally
        .counts
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / trials
        })
        .collect();
    Ok(ExperimentResult {
        mean_rate: mean_decoded * rate_r / m_total as f64,
        rate_se: scale * (tally.moments.sample_variance() / trials).sqrt(),
        cmf,
        mean_decoded,
        approx_flag: tally.approximate,
        trials_run: spec.trials,
        counts: tally.counts,
        m_prime: match resolved.decoder {
            Decoder::Scheme(SchemeConfig::Aje { m_prime }) => Some(m_prime),
            _ => None,
        },
    })
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PowerDb,
    Rate,
    Blocks,
    Window,
    Distance,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::PowerDb => "snr_db",
            SweepAxis::Rate => "rate",
            SweepAxis::Blocks => "blocks",
            SweepAxis::Window => "window",
            SweepAxis::Distance => "distance",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "snr_db" | "power_db" | "snr" => Ok(SweepAxis::PowerDb),
            "rate" | "rate_r" => Ok(SweepAxis::Rate),
            "blocks" | "m_total" | "m" => Ok(SweepAxis::Blocks),
            "window" | "w" => Ok(SweepAxis::Window),
            "distance" | "d" => Ok(SweepAxis::Distance),
            other => Err(invalid(format!("unknown sweep axis '{other}'"))),
        }
    }
}

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(invalid(format!("{axis} values must be positive integers, got {v}")))
    }
}

/// `base` with `axis` set to `value`.
pub fn apply_axis(base: &ExperimentSpec, axis: SweepAxis, value: f64) -> Result<ExperimentSpec> {
    let mut spec = *base;
    match axis {
        SweepAxis::PowerDb => spec.power_db = value,
        SweepAxis::Rate => spec.rate_r = value,
        SweepAxis::Blocks => spec.m_total = as_count(axis, value)?,
        SweepAxis::Window => match &mut spec.selector {
            Selector::Scheme(SchemeConfig::Gts { window }) => *window = as_count(axis, value)?,
            other => return Err(invalid(format!("window sweep does not apply to {}", other.tag()))),
        },
        SweepAxis::Distance => match &mut spec.path_loss {
            Some(pl) => pl.distance = value,
            None => return Err(invalid("distance sweep needs a path-loss exponent")),
        },
    }
    spec.validate()?;
    Ok(spec)
}

/// One experiment per value; point `i` runs under a seed derived from
/// `(master_seed, i)`. Every point is validated before any trial runs.
pub fn sweep(base: &ExperimentSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<(f64, ExperimentResult)>> {
    sweep_with(base, axis, values, RunOptions::default())
}

pub fn sweep_with(
    base: &ExperimentSpec,
    axis: SweepAxis,
    values: &[f64],
    options: RunOptions,
) -> Result<Vec<(f64, ExperimentResult)>> {
    let specs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut spec = apply_axis(base, axis, v)?;
            spec.master_seed = derive_seed(base.master_seed, i as u64);
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    values
        .iter()
        .zip(&specs)
        .map(|(&v, spec)| Ok((v, run_experiment_with(spec, options)?)))
        .collect()
}

/// Best gTS window among `candidates` by mean rate; ties go to the smaller window.
pub fn optimal_window(base: &ExperimentSpec, candidates: &[usize]) -> Result<(usize, ExperimentResult)> {
    if candidates.is_empty() {
        return Err(invalid("no candidate windows"));
    }
    let values: Vec<f64> = candidates.iter().map(|&w| w as f64).collect();
    let results = sweep(base, SweepAxis::Window, &values)?;
    let mut best: Option<(usize, ExperimentResult)> = None;
    for (w, res) in results {
        let w = w as usize;
        let better = match &best {
            None => true,
            Some((bw, br)) => res.mean_rate > br.mean_rate || (res.mean_rate == br.mean_rate && w < *bw),
        };
        if better {
            best = Some((w, res));
        }
    }
    Ok(best.expect("candidates is non-empty"))
}
