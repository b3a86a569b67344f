//! Upper bounds on the average decoded rate.

use crate::channel::ChannelRealization;
use crate::schemes::DecodeOutcome;

/// Whether a transmitter that knows every capacity in advance can deliver
/// `m` messages: `(m - i) R <= cap[i] + .. + cap[M-1]` for all `i < m`.
fn informed_feasible(suffix: &[f64], rate_r: f64, m: usize) -> bool {
    (0..m).all(|i| ((m - i) as f64) * rate_r <= suffix[i])
}

/// Informed-transmitter bound for one realization.
///
/// Feasibility is monotone in `m`, so the largest feasible count is found by
/// bisection.
pub fn informed_upper_bound(real: &ChannelRealization, rate_r: f64) -> DecodeOutcome {
    let cap = real.capacities();
    let m_total = cap.len();
    let mut suffix = vec![0.0; m_total];
    let mut acc = 0.0;
    for t in (0..m_total).rev() {
        acc += cap[t];
        suffix[t] = acc;
    }
    // invariant: lo feasible, hi + 1 infeasible (or past M)
    let (mut lo, mut hi) = (0usize, m_total);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if informed_feasible(&suffix, rate_r, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    DecodeOutcome::prefix(lo, rate_r, m_total)
}

/// `min(R, c_bar)`.
pub fn ergodic_upper_bound(rate_r: f64, c_bar: f64) -> f64 {
    rate_r.min(c_bar)
}
