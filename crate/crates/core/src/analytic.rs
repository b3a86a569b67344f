//! Closed-form and semi-analytic performance figures.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::channel::{sample_realization, FadingModel, PowerBudget};
use crate::error::{invalid, Error, Result};
use crate::montecarlo::fold_trials;
use crate::quadrature;
use crate::schemes::check_rate;
use crate::stats::{Estimate, IntMoments};

/// Probability of decoding exactly `m` messages, for `m = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeCountPmf {
    pub probs: Vec<f64>,
}

impl DecodeCountPmf {
    pub fn m_total(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    /// Average decoded rate `R * E[n_d] / M`.
    pub fn average_rate(&self, rate_r: f64) -> f64 {
        rate_r * self.mean() / self.m_total() as f64
    }

    /// `Pr{n_d <= m}`.
    pub fn cmf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// Per-block success probability of memoryless transmission, `Pr{C >= R}`.
///
/// For Rayleigh fading this is `exp(-(2^R - 1) / P)`.
pub fn mt_success_prob(model: &FadingModel, power: PowerBudget, rate_r: f64) -> Result<f64> {
    check_rate(rate_r)?;
    model.validate()?;
    Ok(model.capacity_survival(power, rate_r))
}

/// Binomial pmf of the MT decode count, built in log space.
pub fn mt_pmf_exact(m_total: usize, p: f64) -> Result<DecodeCountPmf> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability must lie in [0, 1], got {p}")));
    }
    let m_u = m_total as u64;
    let probs = (0..=m_total)
        .map(|m| {
            if p == 0.0 {
                return if m == 0 { 1.0 } else { 0.0 };
            }
            if p == 1.0 {
                return if m == m_total { 1.0 } else { 0.0 };
            }
            let ln = ln_binomial(m_u, m as u64) + m as f64 * p.ln() + (m_total - m) as f64 * (-p).ln_1p();
            ln.exp()
        })
        .collect();
    Ok(DecodeCountPmf { probs })
}

/// Gaussian approximation of the MT decode-count pmf at `m`.
pub fn mt_pmf_gaussian(m_total: usize, p: f64, m: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("gaussian approximation needs 0 < p < 1, got {p}")));
    }
    let var = m_total as f64 * p * (1.0 - p);
    let dev = m - m_total as f64 * p;
    Ok((-dev * dev / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
}

/// `(R / M) * sum_m Pr{C_1 + .. + C_m >= m R}`.
pub fn prefix_sum_rate(prefix_probs: &[f64], rate_r: f64) -> Result<f64> {
    if prefix_probs.is_empty() {
        return Err(invalid("need at least one prefix probability"));
    }
    if let Some(bad) = prefix_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("probabilities must lie in [0, 1], got {bad}")));
    }
    Ok(rate_r * prefix_probs.iter().sum::<f64>() / prefix_probs.len() as f64)
}

/// Monte Carlo estimate of `Pr{C_1 + .. + C_m >= m R}` for every `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixProbabilities {
    pub probs: Vec<f64>,
    pub rate_r: f64,
    /// Moments of the per-trial count of satisfied prefixes.
    pub counts: IntMoments,
}

impl PrefixProbabilities {
    /// Average JE rate through the prefix-sum identity, with its standard error.
    pub fn je_rate(&self) -> Estimate {
        self.counts.estimate().scaled(self.rate_r / self.probs.len() as f64)
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(invalid("trials must be at least 1"))
    } else {
        Ok(())
    }
}

/// One pass per trial computes every partial sum at once.
pub fn estimate_prefix_probs(
    model: &FadingModel,
    power: PowerBudget,
    m_total: usize,
    rate_r: f64,
    trials: u64,
    master_seed: u64,
) -> Result<PrefixProbabilities> {
    check_rate(rate_r)?;
    check_trials(trials)?;
    type Acc = (Vec<u64>, IntMoments);
    let (hits, counts) = fold_trials(
        master_seed,
        trials,
        || (vec![0u64; m_total], IntMoments::default()),
        |acc: &mut Acc, rng| {
            let real = sample_realization(model, power, m_total, rng)?;
            let mut partial = 0.0;
            let mut satisfied = 0;
            for (m, &c) in real.capacities().iter().enumerate() {
                partial += c;
                if partial >= (m + 1) as f64 * rate_r {
                    acc.0[m] += 1;
                    satisfied += 1;
                }
            }
            acc.1.push(satisfied);
            Ok(())
        },
        |mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
            (a.0, a.1.merge(b.1))
        },
    )?;
    Ok(PrefixProbabilities {
        probs: hits.iter().map(|&h| h as f64 / trials as f64).collect(),
        rate_r,
        counts,
    })
}

/// Monte Carlo estimate of `(R / M) * sum_m Pr{C_m/m + .. + C_M/M >= R}`
/// (one-based block indices).
pub fn ts_rate_analytic_estimate(
    model: &FadingModel,
    power: PowerBudget,
    m_total: usize,
    rate_r: f64,
    trials: u64,
    master_seed: u64,
) -> Result<Estimate> {
    check_rate(rate_r)?;
    check_trials(trials)?;
    let moments = fold_trials(
        master_seed,
        trials,
        IntMoments::default,
        |acc, rng| {
            let real = sample_realization(model, power, m_total, rng)?;
            let mut tail = 0.0;
            let mut satisfied = 0;
            for (t, &c) in real.capacities().iter().enumerate().rev() {
                tail += c / (t + 1) as f64;
                if tail >= rate_r {
                    satisfied += 1;
                }
            }
            acc.push(satisfied);
            Ok(())
        },
        IntMoments::merge,
    )?;
    Ok(moments.estimate().scaled(rate_r / m_total as f64))
}

/// Density and distribution of `C = log2(1 + phi P)` under Rayleigh fading.
#[derive(Debug, Clone, Copy)]
pub struct RayleighCapacity {
    power: f64,
}

impl RayleighCapacity {
    pub fn new(power: PowerBudget) -> Self {
        RayleighCapacity { power: power.linear() }
    }

    /// `f_C(c) = ln2 * 2^c / P * exp(-(2^c - 1) / P)` for `c >= 0`.
    pub fn pdf(&self, c: f64) -> f64 {
        if c < 0.0 {
            return 0.0;
        }
        let two_c = c.exp2();
        std::f64::consts::LN_2 * two_c / self.power * (-(two_c - 1.0) / self.power).exp()
    }

    /// `Pr{C >= c}`.
    pub fn survival(&self, c: f64) -> f64 {
        if c <= 0.0 {
            1.0
        } else {
            (-(c.exp2() - 1.0) / self.power).exp()
        }
    }

    /// `Pr{C < c}`.
    pub fn cdf(&self, c: f64) -> f64 {
        if c <= 0.0 {
            0.0
        } else {
            -(-(c.exp2() - 1.0) / self.power).exp_m1()
        }
    }

    /// Capacity beyond which the remaining mass is below `e^-50`.
    pub fn upper_support(&self) -> f64 {
        (50.0 * self.power).ln_1p() / std::f64::consts::LN_2
    }
}

const SMALL_M_TOL: f64 = 1e-9;

/// Integrates over `[lower, upper]`, splitting at the given kinks.
fn integrate_split<F: Fn(f64) -> f64>(f: F, lower: f64, upper: f64, kinks: &[f64], tol: f64) -> Result<f64> {
    if upper <= lower {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|&k| k > lower && k < upper).collect();
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut a = lower;
    for b in cuts.into_iter().chain(std::iter::once(upper)) {
        total += quadrature::integrate(&f, a, b, tol, quadrature::DEFAULT_MAX_INTERVALS)?;
        a = b;
    }
    Ok(total)
}

/// Probability that the last `k` blocks of a run support decoding:
/// `C_{m-i+1} + .. + C_m >= i R` for `i = 1..=k`.
fn decodable_tail_prob(dist: &RayleighCapacity, rate_r: f64, k: usize) -> Result<f64> {
    let top = dist.upper_support();
    match k {
        0 => Ok(1.0),
        1 => Ok(dist.survival(rate_r)),
        2 => integrate_split(
            |x2| dist.pdf(x2) * dist.survival(2.0 * rate_r - x2),
            rate_r,
            top,
            &[2.0 * rate_r],
            SMALL_M_TOL,
        ),
        3 => integrate_split(
            |x3| {
                let lo = (2.0 * rate_r - x3).max(0.0);
                let inner = integrate_split(
                    |x2| dist.pdf(x2) * dist.survival(3.0 * rate_r - x3 - x2),
                    lo,
                    top,
                    &[3.0 * rate_r - x3],
                    SMALL_M_TOL * 0.1,
                )
                .unwrap_or(f64::NAN);
                dist.pdf(x3) * inner
            },
            rate_r,
            top,
            &[2.0 * rate_r, 3.0 * rate_r],
            SMALL_M_TOL,
        ),
        _ => Err(Error::Unsupported(format!("nesting depth {k}"))),
    }
}

/// Probability that the `k` blocks after a run block any extension:
/// `C_{m+1} + .. + C_{m+i} < i R` for `i = 1..=k`.
fn blocked_head_prob(dist: &RayleighCapacity, rate_r: f64, k: usize) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        1 => Ok(dist.cdf(rate_r)),
        2 => integrate_split(|x1| dist.pdf(x1) * dist.cdf(2.0 * rate_r - x1), 0.0, rate_r, &[], SMALL_M_TOL),
        3 => integrate_split(
            |x1| {
                let inner = integrate_split(
                    |x2| dist.pdf(x2) * dist.cdf(3.0 * rate_r - x1 - x2),
                    0.0,
                    2.0 * rate_r - x1,
                    &[],
                    SMALL_M_TOL * 0.1,
                )
                .unwrap_or(f64::NAN);
                dist.pdf(x1) * inner
            },
            0.0,
            rate_r,
            &[],
            SMALL_M_TOL,
        ),
        _ => Err(Error::Unsupported(format!("nesting depth {k}"))),
    }
}

/// Exact JE decode-count pmf for `M <= 3` by nested quadrature over the
/// capacity density. Exactly `m` messages decode when the last `i` blocks of
/// the first `m` always cover `i R` and the first `i` blocks after them never
/// do; the two events involve disjoint blocks, so `eta(m)` factorises.
pub fn je_pmf_exact_small_m(
    m_total: usize,
    model: &FadingModel,
    power: PowerBudget,
    rate_r: f64,
) -> Result<DecodeCountPmf> {
    check_rate(rate_r)?;
    if !(1..=3).contains(&m_total) {
        return Err(Error::Unsupported(format!(
            "exact JE pmf is only evaluated for 1 <= M <= 3, got {m_total}"
        )));
    }
    if *model != FadingModel::RayleighUnitMean {
        return Err(Error::Unsupported("exact JE pmf requires Rayleigh fading".into()));
    }
    let dist = RayleighCapacity::new(power);
    let probs = (0..=m_total)
        .map(|m| Ok(decodable_tail_prob(&dist, rate_r, m)? * blocked_head_prob(&dist, rate_r, m_total - m)?))
        .collect::<Result<Vec<f64>>>()?;
    if probs.iter().any(|p| !p.is_finite()) {
        return Err(Error::QuadratureDiverged {
            lower: 0.0,
            upper: dist.upper_support(),
            error_estimate: f64::NAN,
            tolerance: SMALL_M_TOL,
        });
    }
    Ok(DecodeCountPmf { probs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(x: f64) -> PowerBudget {
        PowerBudget::from_db(x).unwrap()
    }

    const RAY: FadingModel = FadingModel::RayleighUnitMean;

    #[test]
    fn success_prob_examples() {
        let p = mt_success_prob(&RAY, db(1.44), 1.0).unwrap();
        assert!((p - 0.4879).abs() < 1e-4, "{p}");
        assert!((p - 0.5).abs() < 0.02);
        assert!((mt_success_prob(&RAY, db(0.0), 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((mt_success_prob(&RAY, db(0.0), 1e-12).unwrap() - 1.0).abs() < 1e-9);
        assert!(mt_success_prob(&RAY, db(0.0), 0.0).is_err());
    }

    #[test]
    fn success_prob_matches_tail_quadrature() {
        for (pw, r) in [(0.5, 0.3), (1.0, 1.0), (3.0, 2.0), (100.0, 6.0)] {
            let power = PowerBudget::from_linear(pw).unwrap();
            let threshold = crate::channel::gain_threshold(power, r);
            let tail = quadrature::integrate(|x| (-x).exp(), threshold, threshold + 40.0, 1e-12, 200).unwrap();
            assert!((tail - mt_success_prob(&RAY, power, r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_pmf_examples() {
        let pmf = mt_pmf_exact(2, 0.5).unwrap();
        for (a, b) in pmf.probs.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(mt_pmf_exact(3, 1.0).unwrap().probs, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(mt_pmf_exact(3, 0.0).unwrap().probs, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(mt_pmf_exact(3, 1.5).is_err());
    }

    #[test]
    fn binomial_pmf_is_normalised_with_binomial_mean() {
        for (m, p) in [(1, 0.3), (50, 0.4879), (1000, 0.01), (10_000, 0.5), (10_000, 0.999)] {
            let pmf = mt_pmf_exact(m, p).unwrap();
            assert!((pmf.total() - 1.0).abs() < 1e-9, "M={m} p={p}");
            assert!((pmf.mean() - m as f64 * p).abs() < 1e-9 * m as f64);
            assert!(pmf.probs.iter().all(|&x| x >= 0.0));
            let cmf = pmf.cmf();
            assert!(cmf.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn gaussian_approximation() {
        let (m, p) = (400usize, 0.3);
        let peak = mt_pmf_gaussian(m, p, m as f64 * p).unwrap();
        assert!((peak - 1.0 / (2.0 * std::f64::consts::PI * m as f64 * p * (1.0 - p)).sqrt()).abs() < 1e-15);
        for k in [1.0, 5.0, 12.5] {
            let hi = mt_pmf_gaussian(m, p, m as f64 * p + k).unwrap();
            let lo = mt_pmf_gaussian(m, p, m as f64 * p - k).unwrap();
            assert!((hi - lo).abs() < 1e-15);
        }
        assert!(mt_pmf_gaussian(10, 0.0, 0.0).is_err());
        assert!(mt_pmf_gaussian(10, 1.0, 10.0).is_err());
    }

    #[test]
    fn gaussian_is_close_to_binomial_for_large_m() {
        let exact = mt_pmf_exact(10_000, 0.5).unwrap();
        let tv: f64 = exact
            .probs
            .iter()
            .enumerate()
            .map(|(m, p)| (p - mt_pmf_gaussian(10_000, 0.5, m as f64).unwrap()).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "tv distance {tv}");
    }

    #[test]
    fn prefix_sum_rate_trivial_cases() {
        assert_eq!(prefix_sum_rate(&[1.0; 7], 2.0).unwrap(), 2.0);
        let p = mt_success_prob(&RAY, db(0.0), 1.0).unwrap();
        assert!((prefix_sum_rate(&[p], 1.0).unwrap() - p).abs() < 1e-15);
        assert!(prefix_sum_rate(&[], 1.0).is_err());
        assert!(prefix_sum_rate(&[1.2], 1.0).is_err());
    }

    #[test]
    fn single_block_prefix_estimate_is_mt() {
        let est = estimate_prefix_probs(&RAY, db(0.0), 1, 1.0, 200_000, 1).unwrap();
        let p = (-1.0f64).exp();
        let se = (p * (1.0 - p) / 200_000.0).sqrt();
        assert!((est.probs[0] - p).abs() < 4.0 * se);
        assert!((est.je_rate().value - est.probs[0]).abs() < 1e-15);
    }

    #[test]
    fn ts_estimate_trivial_cases() {
        // deterministic capacity c: I_M = c / M, so c = M R decodes everything
        let m = 4;
        let gain = (m as f64).exp2() - 1.0;
        let est = ts_rate_analytic_estimate(&FadingModel::Constant { gain }, PowerBudget::from_linear(1.0).unwrap(), m, 1.0, 10, 3).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);

        let single = ts_rate_analytic_estimate(&RAY, db(2.0), 1, 1.0, 100_000, 5).unwrap();
        let p = mt_success_prob(&RAY, db(2.0), 1.0).unwrap();
        assert!((single.value - p).abs() < 4.0 * single.std_error);
    }

    #[test]
    fn capacity_density_integrates_to_one() {
        for lin in [0.5, 1.0, 1.39, 100.0] {
            let d = RayleighCapacity::new(PowerBudget::from_linear(lin).unwrap());
            let mass = quadrature::integrate(|c| d.pdf(c), 0.0, d.upper_support(), 1e-12, 500).unwrap();
            assert!((mass - 1.0).abs() < 1e-10);
            for c in [0.1, 0.7, 2.0] {
                assert!((d.cdf(c) + d.survival(c) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_pmf_single_block() {
        let pmf = je_pmf_exact_small_m(1, &RAY, db(1.44), 1.0).unwrap();
        let p = mt_success_prob(&RAY, db(1.44), 1.0).unwrap();
        assert!((pmf.probs[1] - p).abs() < 1e-12);
        assert!((pmf.probs[0] - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn exact_pmf_normalises() {
        for m in 1..=3 {
            for x in [-3.0, 0.0, 1.44, 2.0, 10.0] {
                for r in [0.5, 1.0, 2.0] {
                    let pmf = je_pmf_exact_small_m(m, &RAY, db(x), r).unwrap();
                    assert!((pmf.total() - 1.0).abs() < 1e-4, "M={m} P={x} R={r}: {}", pmf.total());
                    assert!(pmf.probs.iter().all(|&p| p >= -1e-12));
                }
            }
        }
    }

    #[test]
    fn exact_pmf_rejects_large_m() {
        assert!(matches!(je_pmf_exact_small_m(4, &RAY, db(0.0), 1.0), Err(Error::Unsupported(_))));
        assert!(je_pmf_exact_small_m(0, &RAY, db(0.0), 1.0).is_err());
    }
}
