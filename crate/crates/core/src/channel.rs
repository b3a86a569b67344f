//! Block fading channel at the mutual-information level.
//!
//! Each block `t` draws a power gain `phi[t]` i.i.d. from a [`FadingModel`];
//! its instantaneous capacity is `log2(1 + phi[t] * P)` bits per channel use.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature;

/// Gains above this point carry less than `e^-40` of the Rayleigh mass.
pub const RAYLEIGH_TAIL_BOUND: f64 = 40.0;

const EXPECTATION_TOL: f64 = 1e-11;

/// Distribution of the per-block channel power gain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FadingModel {
    /// `phi ~ Exp(1)`, i.e. Rayleigh amplitude with unit mean power.
    #[default]
    RayleighUnitMean,
    /// A non-fading channel with fixed gain.
    Constant { gain: f64 },
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::RayleighUnitMean => Ok(()),
            FadingModel::Constant { gain } if gain.is_finite() && gain >= 0.0 => Ok(()),
            FadingModel::Constant { gain } => Err(invalid(format!("constant gain must be finite and non-negative, got {gain}"))),
        }
    }

    /// Draws one gain. Rayleigh uses the inverse transform `-ln(u)` with `u` in `(0, 1]`.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingModel::RayleighUnitMean => {
                let u = 1.0 - rng.random::<f64>();
                -u.ln()
            }
            FadingModel::Constant { gain } => gain,
        }
    }

    /// Density of the gain at `phi`, when it has one.
    pub fn density(&self, phi: f64) -> Option<f64> {
        match *self {
            FadingModel::RayleighUnitMean => Some(if phi > 0.0 { (-phi).exp() } else { 0.0 }),
            FadingModel::Constant { .. } => None,
        }
    }

    /// `E[g(phi)]`, by quadrature for Rayleigh.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        match *self {
            FadingModel::RayleighUnitMean => quadrature::integrate(
                |phi| g(phi) * (-phi).exp(),
                0.0,
                RAYLEIGH_TAIL_BOUND,
                EXPECTATION_TOL,
                quadrature::DEFAULT_MAX_INTERVALS,
            ),
            FadingModel::Constant { gain } => Ok(g(gain)),
        }
    }

    /// `Pr{log2(1 + phi P) >= rate}`.
    pub fn capacity_survival(&self, power: PowerBudget, rate: f64) -> f64 {
        let threshold = gain_threshold(power, rate);
        match *self {
            FadingModel::RayleighUnitMean => (-threshold.max(0.0)).exp(),
            FadingModel::Constant { gain } => {
                if capacity(gain, power) >= rate {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Smallest gain whose capacity reaches `rate`: `(2^rate - 1) / P`.
pub fn gain_threshold(power: PowerBudget, rate: f64) -> f64 {
    (rate.exp2() - 1.0) / power.linear()
}

/// Transmit SNR (power with unit-variance noise), stored linearly.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerBudget(f64);

impl PowerBudget {
    pub fn from_linear(p_linear: f64) -> Result<Self> {
        if p_linear.is_finite() && p_linear > 0.0 {
            Ok(PowerBudget(p_linear))
        } else {
            Err(invalid(format!("power must be finite and positive, got {p_linear}")))
        }
    }

    /// `10^(db / 10)`.
    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(invalid(format!("power in dB must be finite, got {db}")));
        }
        Self::from_linear(10f64.powf(db / 10.0))
    }

    #[inline]
    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// Instantaneous capacity of one block, in bpcu.
#[inline]
pub fn capacity(phi: f64, power: PowerBudget) -> f64 {
    (phi * power.linear()).ln_1p() / std::f64::consts::LN_2
}

/// One draw of the M block gains and their capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    phi: Vec<f64>,
    cap: Vec<f64>,
}

impl ChannelRealization {
    /// Builds a realization from explicit gains.
    pub fn from_gains(phi: Vec<f64>, power: PowerBudget) -> Result<Self> {
        if phi.is_empty() {
            return Err(invalid("a realization needs at least one block"));
        }
        if let Some(bad) = phi.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(invalid(format!("gains must be finite and non-negative, got {bad}")));
        }
        let cap = phi.iter().map(|&g| capacity(g, power)).collect();
        Ok(ChannelRealization { phi, cap })
    }

    /// Builds a realization from capacities alone, for decoders that never look
    /// at the gains. The gains are back-computed at unit power.
    pub fn from_capacities(cap: Vec<f64>) -> Result<Self> {
        if cap.is_empty() {
            return Err(invalid("a realization needs at least one block"));
        }
        if let Some(bad) = cap.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(invalid(format!("capacities must be finite and non-negative, got {bad}")));
        }
        let phi = cap.iter().map(|&c| c.exp2() - 1.0).collect();
        Ok(ChannelRealization { phi, cap })
    }

    #[inline]
    pub fn blocks(&self) -> usize {
        self.cap.len()
    }

    #[inline]
    pub fn gains(&self) -> &[f64] {
        &self.phi
    }

    #[inline]
    pub fn capacities(&self) -> &[f64] {
        &self.cap
    }
}

/// Draws `m_blocks` i.i.d. gains from `model` and their capacities.
pub fn sample_realization<R: Rng + ?Sized>(
    model: &FadingModel,
    power: PowerBudget,
    m_blocks: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if m_blocks == 0 {
        return Err(invalid("m_blocks must be at least 1"));
    }
    let phi: Vec<f64> = (0..m_blocks).map(|_| model.sample_gain(rng)).collect();
    let cap = phi.iter().map(|&g| capacity(g, power)).collect();
    Ok(ChannelRealization { phi, cap })
}

/// Ergodic capacity `E[log2(1 + phi P)]`.
pub fn ergodic_capacity(model: &FadingModel, power: PowerBudget) -> Result<f64> {
    model.validate()?;
    model.expectation(|phi| capacity(phi, power))
}

/// `Var[log2(1 + phi P)]`.
pub fn capacity_variance(model: &FadingModel, power: PowerBudget) -> Result<f64> {
    let mean = ergodic_capacity(model, power)?;
    let second = model.expectation(|phi| {
        let c = capacity(phi, power);
        c * c
    })?;
    Ok((second - mean * mean).max(0.0))
}

/// Rayleigh ergodic capacity in closed form, `e^{1/P} E1(1/P) / ln 2`.
pub fn rayleigh_ergodic_capacity_closed_form(power: PowerBudget) -> f64 {
    scaled_exp_integral_e1(1.0 / power.linear()) / std::f64::consts::LN_2
}

/// `e^x E1(x)` for `x > 0`, where `E1` is the exponential integral.
///
/// Power series below 1, modified Lentz continued fraction above.
pub fn scaled_exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    assert!(x > 0.0, "E1 is only defined here for positive arguments");
    if x <= 1.0 {
        let mut sum = -x.ln() - EULER_GAMMA;
        let mut fact = 1.0;
        for i in 1..200 {
            let i = i as f64;
            fact *= -x / i;
            let del = -fact / i;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        sum * x.exp()
    } else {
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h
    }
}

/// Path loss applied to the average received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    pub distance: f64,
    pub exponent: f64,
}

impl PathLoss {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(invalid(format!("distance must be positive, got {}", self.distance)));
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(invalid(format!("path-loss exponent must be positive, got {}", self.exponent)));
        }
        Ok(())
    }
}

/// `P * d^-alpha`.
pub fn effective_power(power: PowerBudget, distance: f64, path_loss_exponent: f64) -> Result<PowerBudget> {
    PathLoss { distance, exponent: path_loss_exponent }.validate()?;
    PowerBudget::from_linear(power.linear() * distance.powf(-path_loss_exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_stream;

    fn p(lin: f64) -> PowerBudget {
        PowerBudget::from_linear(lin).unwrap()
    }

    #[test]
    fn capacities_of_forced_gains() {
        let r = ChannelRealization::from_gains(vec![0.0, 0.0, 0.0], p(5.0)).unwrap();
        assert_eq!(r.capacities(), &[0.0, 0.0, 0.0]);
        let r = ChannelRealization::from_gains(vec![1.0], p(1.0)).unwrap();
        assert_eq!(r.capacities(), &[1.0]);
        let r = ChannelRealization::from_gains(vec![3.0], p(1.0)).unwrap();
        assert_eq!(r.capacities(), &[2.0]);
    }

    #[test]
    fn empty_and_negative_gains_rejected() {
        assert!(ChannelRealization::from_gains(vec![], p(1.0)).is_err());
        assert!(ChannelRealization::from_gains(vec![-1.0], p(1.0)).is_err());
        assert!(sample_realization(&FadingModel::RayleighUnitMean, p(1.0), 0, &mut trial_stream(1, 0)).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = FadingModel::RayleighUnitMean;
        let a = sample_realization(&m, p(2.0), 16, &mut trial_stream(9, 1)).unwrap();
        let b = sample_realization(&m, p(2.0), 16, &mut trial_stream(9, 1)).unwrap();
        assert_eq!(a, b);
        assert!(a.gains().iter().all(|g| *g >= 0.0));
        assert_eq!(a.gains().len(), a.capacities().len());
    }

    #[test]
    fn rayleigh_sample_mean_is_one() {
        let mut rng = trial_stream(3, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| FadingModel::RayleighUnitMean.sample_gain(&mut rng)).sum::<f64>() / n as f64;
        // unit variance, so SE = 1/sqrt(n)
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn db_round_trip() {
        for db in [-10.0, -3.0, 0.0, 1.44, 2.0, 20.0, 33.3] {
            let back = PowerBudget::from_db(db).unwrap().db();
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
        for lin in [0.01, 0.5, 1.0, 1.585, 100.0] {
            let back = PowerBudget::from_db(p(lin).db()).unwrap().linear();
            assert!((back - lin).abs() <= 1e-12 * lin);
        }
        assert!(PowerBudget::from_linear(0.0).is_err());
        assert!(PowerBudget::from_linear(-1.0).is_err());
        assert!(PowerBudget::from_db(f64::NAN).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for lin in [0.1, 0.5, 1.0, 1.585, 10.0, 100.0] {
            let q = ergodic_capacity(&FadingModel::RayleighUnitMean, p(lin)).unwrap();
            let cf = rayleigh_ergodic_capacity_closed_form(p(lin));
            assert!((q - cf).abs() < 1e-6, "P={lin}: quadrature {q} closed form {cf}");
        }
    }

    #[test]
    fn e1_reference_values() {
        // E1(1) = 0.219383934395520..., E1(0.1) = 1.822923958419390...
        assert!((scaled_exp_integral_e1(1.0) * (-1.0f64).exp() - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((scaled_exp_integral_e1(0.1) * (-0.1f64).exp() - 1.822_923_958_419_390_7).abs() < 1e-13);
        // E1(5) = 0.001148295591275...
        assert!((scaled_exp_integral_e1(5.0) * (-5.0f64).exp() - 0.001_148_295_591_275_325_7).abs() < 1e-15);
    }

    #[test]
    fn ergodic_capacity_anchor_values() {
        let m = FadingModel::RayleighUnitMean;
        for (db, quoted) in [(-3.0, 0.522), (0.0, 0.86), (1.44, 1.07), (2.0, 1.158)] {
            let c = ergodic_capacity(&m, PowerBudget::from_db(db).unwrap()).unwrap();
            assert!((c - quoted).abs() < 0.01, "{db} dB: {c}");
        }
        let c20 = ergodic_capacity(&m, PowerBudget::from_db(20.0).unwrap()).unwrap();
        assert!((c20 - 5.88).abs() < 0.01);
    }

    #[test]
    fn ergodic_capacity_increases_with_power() {
        let m = FadingModel::RayleighUnitMean;
        let caps: Vec<f64> = (0..12)
            .map(|k| ergodic_capacity(&m, PowerBudget::from_db(-10.0 + 3.0 * k as f64).unwrap()).unwrap())
            .collect();
        assert!(caps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn constant_model_has_zero_variance() {
        let m = FadingModel::Constant { gain: 2.5 };
        assert_eq!(capacity_variance(&m, p(3.0)).unwrap(), 0.0);
        assert_eq!(ergodic_capacity(&m, p(3.0)).unwrap(), capacity(2.5, p(3.0)));
        assert!(FadingModel::Constant { gain: -1.0 }.validate().is_err());
    }

    #[test]
    fn effective_power_examples() {
        assert_eq!(effective_power(p(100.0), 1.0, 3.0).unwrap().linear(), 100.0);
        assert!((effective_power(p(100.0), 10.0, 3.0).unwrap().linear() - 0.1).abs() < 1e-15);
        assert_eq!(effective_power(p(100.0), 2.0, 3.0).unwrap().linear(), 12.5);
        assert!(effective_power(p(100.0), 0.0, 3.0).is_err());
        assert!(effective_power(p(100.0), -2.0, 3.0).is_err());
    }

    #[test]
    fn capacity_survival_closed_form() {
        let m = FadingModel::RayleighUnitMean;
        assert!((m.capacity_survival(p(1.0), 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((m.capacity_survival(p(1.0), 1e-12) - 1.0).abs() < 1e-9);
    }
}
