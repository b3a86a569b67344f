use crate::channel::ChannelRealization;
use crate::error::{invalid, Result};

use super::DecodeOutcome;

/// Whether the first `m` messages are jointly decodable from blocks `0..m`:
/// `(m - j) R <= cap[j] + .. + cap[m-1]` for every `j < m`.
///
/// `m = 0` is always feasible.
pub fn je_prefix_feasible(cap: &[f64], rate_r: f64, m: usize) -> bool {
    assert!(m <= cap.len(), "prefix length {m} exceeds {} blocks", cap.len());
    let mut tail = 0.0;
    for (count, &c) in cap[..m].iter().rev().enumerate() {
        tail += c;
        if ((count + 1) as f64) * rate_r > tail {
            return false;
        }
    }
    true
}

/// Largest feasible prefix of `cap`.
///
/// With `D_k = sum_{t<k} (cap[t] - R)`, prefix `m` is feasible exactly when
/// `D_m >= D_k` for all `k < m`, so one pass with a running maximum suffices.
fn max_feasible_prefix(cap: &[f64], rate_r: f64) -> usize {
    let mut drift = 0.0;
    let mut peak = 0.0;
    let mut best = 0;
    for (t, &c) in cap.iter().enumerate() {
        drift += c - rate_r;
        if drift >= peak {
            best = t + 1;
            peak = drift;
        }
    }
    best
}

/// Joint encoding: block `t` carries a codeword indexed by messages `0..=t`.
pub fn decode_je(real: &ChannelRealization, rate_r: f64) -> DecodeOutcome {
    let n_d = max_feasible_prefix(real.capacities(), rate_r);
    DecodeOutcome::prefix(n_d, rate_r, real.blocks())
}

/// `clamp(round(safety * M * c_bar / R), 1, M)`.
pub fn choose_m_prime(c_bar: f64, rate_r: f64, m_total: usize, safety: f64) -> usize {
    let target = (safety * m_total as f64 * c_bar / rate_r).round();
    if target.is_nan() || target < 1.0 {
        1
    } else if target >= m_total as f64 {
        m_total
    } else {
        target as usize
    }
}

/// Adaptive joint encoding: only the first `m_prime` messages are sent and the
/// remaining blocks are split evenly among them, adding
/// `sum_{j >= m_prime} cap[j] / m_prime` to each of the first `m_prime` blocks.
///
/// The rate is normalised by the full `M`.
pub fn decode_aje(real: &ChannelRealization, rate_r: f64, m_prime: usize) -> Result<DecodeOutcome> {
    let m_total = real.blocks();
    if m_prime == 0 || m_prime > m_total {
        return Err(invalid(format!("m_prime must lie in [1, {m_total}], got {m_prime}")));
    }
    let cap = real.capacities();
    let share = cap[m_prime..].iter().sum::<f64>() / m_prime as f64;
    let boosted: Vec<f64> = cap[..m_prime].iter().map(|&c| c + share).collect();
    let n_d = max_feasible_prefix(&boosted, rate_r);
    Ok(DecodeOutcome::prefix(n_d, rate_r, m_total))
}
