//! Shared fixtures for the benchmarks.

use streamfade_core::rng::trial_stream;
use streamfade_core::{sample_realization, ChannelRealization, FadingModel, PowerBudget};

/// `count` Rayleigh realizations of `m_total` blocks at `power_db`.
pub fn realizations(m_total: usize, power_db: f64, count: u64, seed: u64) -> Vec<ChannelRealization> {
    let power = PowerBudget::from_db(power_db).expect("finite power");
    (0..count)
        .map(|k| {
            sample_realization(&FadingModel::RayleighUnitMean, power, m_total, &mut trial_stream(seed, k))
                .expect("valid realization")
        })
        .collect()
}
