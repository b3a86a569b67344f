use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use streamfade_core::SweepAxis;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "streamfade",
    version,
    about = "Monte Carlo simulator for deadline-constrained streaming over block fading channels"
)]
pub struct Args {
    /// Transmission scheme or bound to simulate.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,

    /// Number of messages (and channel blocks) M.
    #[arg(long)]
    pub blocks: Option<usize>,

    /// Message rate R in bits per channel use [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,

    /// Average SNR in dB.
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,

    /// Monte Carlo trials per operating point [default: 100000, or the preset's own].
    #[arg(long)]
    pub trials: Option<u64>,

    /// Master seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,

    /// gTS window size W.
    #[arg(long)]
    pub window: Option<usize>,

    /// aJE safety factor s in M'/M = s * C/R [default: 0.95].
    #[arg(long = "alpha-safety", allow_negative_numbers = true)]
    pub alpha_safety: Option<f64>,

    /// Receiver distance; needs --path-loss.
    #[arg(long, allow_negative_numbers = true)]
    pub distance: Option<f64>,

    /// Path-loss exponent; needs --distance or a distance sweep.
    #[arg(long = "path-loss", allow_negative_numbers = true)]
    pub path_loss: Option<f64>,

    /// Largest M for which ST searches every group size [default: 20].
    #[arg(long = "st-exact-limit")]
    pub st_exact_limit: Option<usize>,

    /// Largest ST group size tried above the exact limit [default: 4].
    #[arg(long = "st-heuristic-cap")]
    pub st_heuristic_cap: Option<usize>,

    /// Sweep one parameter, e.g. `snr_db=-3,0,2` or `blocks=1,10,100`.
    /// Axes: snr_db, rate, blocks, window, distance.
    #[arg(long)]
    pub sweep: Option<SweepArg>,

    /// Reproduce a standard set of operating points.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format [default: csv; json for the cmf presets].
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Worker threads; does not change results.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Mt,
    Je,
    Aje,
    Ts,
    Gts,
    St,
    InformedBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig4,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
    Fig7,
    Fig8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepArg {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl FromStr for SweepArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (axis, list) = s.split_once('=').ok_or("expected axis=v1,v2,...")?;
        let axis = axis.trim().parse::<SweepAxis>().map_err(|e| e.to_string())?;
        let values = list
            .split(',')
            .map(|v| {
                let v = v.trim();
                v.parse::<f64>().map_err(|_| format!("'{v}' is not a number"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err("sweep values must be finite".into());
        }
        Ok(SweepArg { axis, values })
    }
}
