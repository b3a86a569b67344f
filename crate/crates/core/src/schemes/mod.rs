//! Per-realization decoders for the streaming transmission schemes.
//!
//! Message and block indices are zero-based throughout: message `i` arrives
//! at the start of block `i` and every message shares the deadline at the end
//! of block `M - 1`.

mod joint;
mod superposition;
mod time_sharing;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, PowerBudget};
use crate::error::{invalid, Result};

pub use joint::{choose_m_prime, decode_aje, decode_je, je_prefix_feasible};
pub use superposition::{
    decode_st, st_power_allocation, st_subset_capacity, PowerAllocation, PowerPolicy, StConfig,
};
pub use time_sharing::{decode_gts, decode_ts, gts_accumulated_information, ts_accumulated_information};

/// Which messages the receiver recovers by the deadline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// Decoded message indices, ascending.
    pub decoded: Vec<usize>,
    pub n_d: usize,
    /// `n_d * R / M`.
    pub rate: f64,
    /// Set when the decoder used a restricted search.
    pub approximate: bool,
}

impl DecodeOutcome {
    pub(crate) fn from_indices(decoded: Vec<usize>, rate_r: f64, m_total: usize) -> Self {
        let n_d = decoded.len();
        DecodeOutcome {
            decoded,
            n_d,
            rate: n_d as f64 * rate_r / m_total as f64,
            approximate: false,
        }
    }

    pub(crate) fn prefix(n_d: usize, rate_r: f64, m_total: usize) -> Self {
        Self::from_indices((0..n_d).collect(), rate_r, m_total)
    }

    /// True when the decoded set is `{0, .., n_d - 1}`.
    pub fn is_prefix(&self) -> bool {
        self.decoded.iter().enumerate().all(|(k, &i)| k == i)
    }
}

/// A transmission scheme and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeConfig {
    /// Memoryless transmission.
    Mt,
    /// Joint encoding.
    Je,
    /// Adaptive joint encoding over the first `m_prime` messages.
    Aje { m_prime: usize },
    /// Equal time sharing among all available messages.
    Ts,
    /// Time sharing with each message confined to `window` blocks.
    Gts { window: usize },
    /// Superposition with successive joint decoding.
    St(StConfig),
}

impl SchemeConfig {
    /// Short tag used in output files.
    pub fn tag(&self) -> &'static str {
        match self {
            SchemeConfig::Mt => "mt",
            SchemeConfig::Je => "je",
            SchemeConfig::Aje { .. } => "aje",
            SchemeConfig::Ts => "ts",
            SchemeConfig::Gts { .. } => "gts",
            SchemeConfig::St(_) => "st",
        }
    }

    /// Checks the parameter ranges against the number of blocks.
    pub fn validate(&self, m_total: usize) -> Result<()> {
        match *self {
            SchemeConfig::Aje { m_prime } if m_prime == 0 || m_prime > m_total => Err(invalid(format!(
                "aJE m_prime must lie in [1, {m_total}], got {m_prime}"
            ))),
            SchemeConfig::Gts { window } if window == 0 || window > m_total => Err(invalid(format!(
                "gTS window must lie in [1, {m_total}], got {window}"
            ))),
            SchemeConfig::St(cfg) => cfg.validate(),
            _ => Ok(()),
        }
    }

    pub fn decode(&self, real: &ChannelRealization, rate_r: f64, power: PowerBudget) -> Result<DecodeOutcome> {
        check_rate(rate_r)?;
        match *self {
            SchemeConfig::Mt => Ok(decode_mt(real, rate_r)),
            SchemeConfig::Je => Ok(decode_je(real, rate_r)),
            SchemeConfig::Aje { m_prime } => decode_aje(real, rate_r, m_prime),
            SchemeConfig::Ts => Ok(decode_ts(real, rate_r)),
            SchemeConfig::Gts { window } => decode_gts(real, rate_r, window),
            SchemeConfig::St(cfg) => decode_st(real, rate_r, power, &cfg),
        }
    }
}

pub(crate) fn check_rate(rate_r: f64) -> Result<()> {
    if rate_r.is_finite() && rate_r > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("message rate must be finite and positive, got {rate_r}")))
    }
}

/// Memoryless transmission: message `t` is sent only in block `t`.
pub fn decode_mt(real: &ChannelRealization, rate_r: f64) -> DecodeOutcome {
    let decoded = real
        .capacities()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= rate_r)
        .map(|(t, _)| t)
        .collect();
    DecodeOutcome::from_indices(decoded, rate_r, real.blocks())
}
