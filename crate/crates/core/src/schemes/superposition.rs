//! Superposition transmission with successive joint decoding.
//!
//! Block `t` carries the superposition of codewords for messages `0..=t`.
//! The receiver repeatedly looks for the smallest group of still-undecoded
//! messages whose joint capacity, treating the other undecoded messages as
//! noise, covers the group's total rate; it decodes the group, cancels it and
//! starts over.
//!
//! Under equal power splitting, block `t`'s contribution to `C(S)` depends on
//! `S` only through `|S ∩ {0..=t}|` and grows with it. The `i` lowest-indexed
//! undecoded messages therefore maximise `C(S)` over every size-`i` subset at
//! once, and they are also the lexicographically smallest maximiser. The
//! search below evaluates that one candidate per size instead of enumerating.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, PowerBudget};
use crate::error::{invalid, Result};

use super::DecodeOutcome;

/// How the per-block power is divided among active messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPolicy {
    #[default]
    EqualSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StConfig {
    pub power_policy: PowerPolicy,
    /// Largest `M` for which all subset sizes are searched.
    pub exact_subset_limit: usize,
    /// Largest joint-decoding group considered when `M` exceeds the limit.
    pub heuristic_subset_cap: usize,
}

impl Default for StConfig {
    fn default() -> Self {
        StConfig {
            power_policy: PowerPolicy::EqualSplit,
            exact_subset_limit: 20,
            heuristic_subset_cap: 4,
        }
    }
}

impl StConfig {
    pub fn validate(&self) -> Result<()> {
        if self.exact_subset_limit == 0 {
            return Err(invalid("ST exact subset limit must be at least 1"));
        }
        if self.heuristic_subset_cap == 0 {
            return Err(invalid("ST heuristic subset cap must be at least 1"));
        }
        Ok(())
    }

    /// Largest group size searched for `m_total` messages, and whether the
    /// search is restricted.
    fn search_bound(&self, m_total: usize) -> (usize, bool) {
        if m_total <= self.exact_subset_limit {
            (m_total, false)
        } else {
            (self.heuristic_subset_cap.min(m_total), true)
        }
    }
}

/// Power matrix `P[i][t]`, the power of message `i` in block `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    m_total: usize,
    entries: Vec<f64>,
}

impl PowerAllocation {
    pub fn m_total(&self) -> usize {
        self.m_total
    }

    #[inline]
    pub fn get(&self, message: usize, block: usize) -> f64 {
        self.entries[message * self.m_total + block]
    }

    /// Total power spent in `block`.
    pub fn column_sum(&self, block: usize) -> f64 {
        (0..self.m_total).map(|i| self.get(i, block)).sum()
    }
}

/// Equal split: `P[i][t] = P / (t + 1)` for `i <= t`, zero otherwise.
pub fn st_power_allocation(m_total: usize, power: PowerBudget) -> PowerAllocation {
    let mut entries = vec![0.0; m_total * m_total];
    for t in 0..m_total {
        let per_message = power.linear() / (t + 1) as f64;
        for i in 0..=t {
            entries[i * m_total + t] = per_message;
        }
    }
    PowerAllocation { m_total, entries }
}

/// Joint capacity of `subset` with the rest of `undecoded` treated as noise:
/// `sum_t log2(1 + phi[t] S[t] / (1 + phi[t] N[t]))`.
pub fn st_subset_capacity(
    phi: &[f64],
    alloc: &PowerAllocation,
    undecoded: &[usize],
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(invalid("subset must be non-empty"));
    }
    if phi.len() != alloc.m_total() {
        return Err(invalid(format!(
            "{} gains for a {}-message allocation",
            phi.len(),
            alloc.m_total()
        )));
    }
    if let Some(s) = subset.iter().find(|s| !undecoded.contains(s)) {
        return Err(invalid(format!("message {s} is not in the undecoded set")));
    }
    if let Some(s) = undecoded.iter().find(|&&s| s >= alloc.m_total()) {
        return Err(invalid(format!("message index {s} out of range")));
    }
    let total = phi
        .iter()
        .enumerate()
        .map(|(t, &g)| {
            let signal: f64 = subset.iter().map(|&s| alloc.get(s, t)).sum();
            let noise: f64 = undecoded
                .iter()
                .filter(|s| !subset.contains(s))
                .map(|&s| alloc.get(s, t))
                .sum();
            (g * signal / (1.0 + g * noise)).ln_1p()
        })
        .sum::<f64>();
    Ok(total / std::f64::consts::LN_2)
}

/// `C(S)` for `S` = the `size` lowest entries of `undecoded` (sorted), under
/// equal power splitting.
fn leading_group_capacity(phi: &[f64], power: f64, undecoded: &[usize], size: usize) -> f64 {
    let first = undecoded[0];
    let mut total = 0.0;
    let mut pending = undecoded.iter().peekable();
    let mut active = 0usize;
    for (t, &g) in phi.iter().enumerate().skip(first) {
        while pending.next_if(|&&s| s <= t).is_some() {
            active += 1;
        }
        let per_message = power / (t + 1) as f64;
        let in_group = active.min(size);
        let signal = in_group as f64 * per_message;
        let noise = (active - in_group) as f64 * per_message;
        total += (g * signal / (1.0 + g * noise)).ln_1p();
    }
    total / std::f64::consts::LN_2
}

/// Successive group decoding over the superposed codewords.
///
/// Group sizes `1, 2, ..` are tried in order; the first size whose best group
/// supports `size * R` is decoded and the search restarts on the remainder.
/// When `M` exceeds `exact_subset_limit` only sizes up to
/// `heuristic_subset_cap` are tried and the outcome is marked approximate.
pub fn decode_st(
    real: &ChannelRealization,
    rate_r: f64,
    power: PowerBudget,
    config: &StConfig,
) -> Result<DecodeOutcome> {
    config.validate()?;
    let m_total = real.blocks();
    let (max_group, approximate) = config.search_bound(m_total);
    let phi = real.gains();
    let mut undecoded: Vec<usize> = (0..m_total).collect();
    let mut decoded = Vec::with_capacity(m_total);
    while !undecoded.is_empty() {
        let limit = max_group.min(undecoded.len());
        let hit = (1..=limit).find(|&size| {
            size as f64 * rate_r <= leading_group_capacity(phi, power.linear(), &undecoded, size)
        });
        match hit {
            Some(size) => decoded.extend(undecoded.drain(..size)),
            None => break,
        }
    }
    decoded.sort_unstable();
    let mut outcome = DecodeOutcome::from_indices(decoded, rate_r, m_total);
    outcome.approximate = approximate;
    Ok(outcome)
}
