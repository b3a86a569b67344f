use crate::channel::ChannelRealization;
use crate::error::{invalid, Result};

use super::DecodeOutcome;

/// Mutual information each message collects under equal time sharing:
/// `I[i] = sum_{t >= i} cap[t] / (t + 1)`.
pub fn ts_accumulated_information(cap: &[f64]) -> Vec<f64> {
    let mut info = vec![0.0; cap.len()];
    let mut acc = 0.0;
    for t in (0..cap.len()).rev() {
        acc += cap[t] / (t + 1) as f64;
        info[t] = acc;
    }
    info
}

/// Mutual information per message when message `i` is spread over blocks
/// `i ..= min(i + W - 1, M - 1)` and block `t` is split evenly among its
/// `min(t + 1, W)` active messages.
pub fn gts_accumulated_information(cap: &[f64], window: usize) -> Result<Vec<f64>> {
    let m_total = cap.len();
    if window == 0 || window > m_total {
        return Err(invalid(format!("window must lie in [1, {m_total}], got {window}")));
    }
    if window == m_total {
        return Ok(ts_accumulated_information(cap));
    }
    let share: Vec<f64> = cap
        .iter()
        .enumerate()
        .map(|(t, &c)| c / (t + 1).min(window) as f64)
        .collect();
    let mut info = vec![0.0; m_total];
    // Windows that reach the deadline nest, so they accumulate like TS.
    let tail_start = m_total - window;
    let mut acc = 0.0;
    for i in (tail_start..m_total).rev() {
        acc += share[i];
        info[i] = acc;
    }
    for (i, slot) in info.iter_mut().enumerate().take(tail_start) {
        let mut acc = 0.0;
        for t in (i..i + window).rev() {
            acc += share[t];
        }
        *slot = acc;
    }
    Ok(info)
}

/// Time sharing with equal allocation among all available messages.
///
/// `I[i]` is non-increasing in `i`, so the decoded set is always a prefix.
pub fn decode_ts(real: &ChannelRealization, rate_r: f64) -> DecodeOutcome {
    let info = ts_accumulated_information(real.capacities());
    let n_d = info.iter().take_while(|&&i| i >= rate_r).count();
    DecodeOutcome::prefix(n_d, rate_r, real.blocks())
}

/// Windowed time sharing. The decoded set need not be a prefix.
pub fn decode_gts(real: &ChannelRealization, rate_r: f64, window: usize) -> Result<DecodeOutcome> {
    if window == real.blocks() {
        return Ok(decode_ts(real, rate_r));
    }
    let info = gts_accumulated_information(real.capacities(), window)?;
    let decoded = info
        .iter()
        .enumerate()
        .filter(|(_, &i)| i >= rate_r)
        .map(|(i, _)| i)
        .collect();
    Ok(DecodeOutcome::from_indices(decoded, rate_r, real.blocks()))
}
