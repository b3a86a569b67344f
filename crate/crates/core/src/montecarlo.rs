//! Deterministic parallel folding over Monte Carlo trials.
//!
//! Trials are cut into fixed-size batches. Each batch folds its trials in
//! index order, each trial drawing from its own stream, and the batch
//! summaries are merged left to right. The result is the same for any number
//! of worker threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::rng::{trial_stream, TrialRng};

const BATCH: u64 = 1024;

pub(crate) fn fold_trials<T, I, S, M>(master_seed: u64, trials: u64, init: I, step: S, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, &mut TrialRng) -> Result<()> + Sync,
    M: Fn(T, T) -> T,
{
    let batches = trials.div_ceil(BATCH);
    let parts: Vec<T> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            for k in b * BATCH..((b + 1) * BATCH).min(trials) {
                let mut rng = trial_stream(master_seed, k);
                step(&mut acc, &mut rng)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(init(), merge))
}
