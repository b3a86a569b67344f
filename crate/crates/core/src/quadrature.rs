//! Globally adaptive Gauss-Kronrod (7/15 point) integration on finite intervals.
//!
//! The interval with the largest local error estimate is bisected until the
//! summed error estimate falls below the requested absolute tolerance.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
// Gauss weights for the odd-indexed Kronrod nodes (plus the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of subintervals.
pub const DEFAULT_MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Segment {
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lower,
        upper,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lower, upper]` to absolute tolerance `abs_tol`.
///
/// Fails with [`Error::QuadratureDiverged`] when the tolerance cannot be met
/// within `max_intervals` subdivisions.
pub fn integrate<F>(f: F, lower: f64, upper: f64, abs_tol: f64, max_intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite, got [{lower}, {upper}]"
        )));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {abs_tol}")));
    }
    if lower == upper {
        return Ok(0.0);
    }
    if lower > upper {
        return integrate(f, upper, lower, abs_tol, max_intervals).map(|v| -v);
    }

    let mut segments = vec![kronrod15(&f, lower, upper)];
    loop {
        let total_error: f64 = segments.iter().map(|s| s.error).sum();
        let total: f64 = segments.iter().map(|s| s.value).sum();
        if !total.is_finite() {
            return Err(Error::QuadratureDiverged {
                lower,
                upper,
                error_estimate: f64::INFINITY,
                tolerance: abs_tol,
            });
        }
        if total_error <= abs_tol {
            return Ok(total);
        }
        if segments.len() >= max_intervals {
            return Err(Error::QuadratureDiverged {
                lower,
                upper,
                error_estimate: total_error,
                tolerance: abs_tol,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("segments is never empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lower + seg.upper);
        if mid <= seg.lower || mid >= seg.upper {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureDiverged {
                lower,
                upper,
                error_estimate: total_error,
                tolerance: abs_tol,
            });
        }
        segments.push(kronrod15(&f, seg.lower, mid));
        segments.push(kronrod15(&f, mid, seg.upper));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12, 10).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate(|x| (-x).exp(), 0.0, 40.0, 1e-12, 100).unwrap();
        assert!((v - (1.0 - (-40.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let a = integrate(f64::sin, 0.0, 1.0, 1e-12, 100).unwrap();
        let b = integrate(f64::sin, 1.0, 0.0, 1e-12, 100).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // integral of ln(x) over (0, 1] is -1
        let v = integrate(f64::ln, 0.0, 1.0, 1e-9, 500).unwrap();
        assert!((v + 1.0).abs() < 1e-9);
    }

    #[test]
    fn impossible_tolerance_is_reported() {
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, 1e-15, 5).unwrap_err();
        assert!(matches!(err, Error::QuadratureDiverged { .. }));
    }

    #[test]
    fn non_finite_bounds_rejected() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-6, 10).is_err());
    }
}
