//! Closed-form layer of the branching model: Poisson offspring law, PGF
//! iteration, extinction profile, and the resource-limit formulas.
//!
//! Every operation is a pure, deterministic function of validated inputs.
//! Model-level quantities require a supercritical intensity
//! (`lambda > 1 + 1e-9`); the PMF/PGF utilities accept any positive one.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, cast, cast_u64, Scalar};
use crate::special::ln_gamma;

/// Rejection margin above 1. Intensities in `(1, 1 + MARGIN]` are refused:
/// `ln(lambda)` is effectively zero there and the horizon bound blows up.
pub const SUPERCRITICAL_MARGIN: f64 = 1e-9;

/// Fixed-point tolerance for the extinction probability.
const EXTINCTION_TOL: f64 = 1e-12;

/// Iteration cap for the extinction fixed point; approached only as the
/// intensity tends to 1, where convergence is linear with rate ~lambda.
const EXTINCTION_MAX_ITER: u32 = 10_000;

pub(crate) fn require_supercritical<S: Scalar>(lambda: S) -> Result<()> {
    if lambda.is_finite() && lambda > cast::<S>(1.0 + SUPERCRITICAL_MARGIN) {
        Ok(())
    } else {
        Err(Error::Subcritical {
            lambda: as_f64(lambda),
        })
    }
}

fn require_positive_intensity<S: Scalar>(lambda: S) -> Result<()> {
    if lambda.is_finite() && lambda > S::zero() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "offspring intensity must be a positive finite real",
            value: as_f64(lambda),
        })
    }
}

fn require_unit_interval<S: Scalar>(s: S) -> Result<()> {
    if s >= S::zero() && s <= S::one() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "PGF argument must lie in [0, 1]",
            value: as_f64(s),
        })
    }
}

/// The Poisson offspring law with intensity `lambda`: each element decomposes
/// into a `Poisson(lambda)` number of children.
///
/// Construction enforces supercriticality, so a value of this type is a
/// witness that every model-level prediction is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffspringModel<S: Scalar> {
    lambda: S,
}

impl<S: Scalar> OffspringModel<S> {
    /// Builds the offspring law; `lambda` must exceed `1 + 1e-9`.
    ///
    /// # Examples
    ///
    /// ```
    /// use decomp::OffspringModel;
    /// assert!(OffspringModel::new(5.41).is_ok());
    /// assert!(OffspringModel::new(0.9).is_err());
    /// ```
    pub fn new(lambda: S) -> Result<Self> {
        require_supercritical(lambda)?;
        Ok(Self { lambda })
    }

    /// Mean offspring count per element.
    pub fn lambda(&self) -> S {
        self.lambda
    }

    /// `P{X = n}` under this law.
    pub fn pmf(&self, n: u64) -> S {
        poisson_pmf(self.lambda, n).expect("validated at construction")
    }

    /// Offspring PGF `f(s) = exp(lambda (s - 1))`.
    pub fn pgf(&self, s: S) -> Result<S> {
        offspring_pgf(self.lambda, s)
    }

    /// Extinction probability and the derived stopping quantities.
    pub fn extinction_profile(&self) -> ExtinctionProfile<S> {
        extinction_probability(self.lambda).expect("validated at construction")
    }
}

/// Extinction probability of the process together with the derived
/// level-of-detail and stopping-condition quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtinctionProfile<S: Scalar> {
    /// Probability the decomposition eventually dies out: the minimal root of
    /// `exp(lambda (a - 1)) = a` in (0, 1).
    pub alpha: S,
    /// Level of detail, `1 - alpha`.
    pub gamma: S,
    /// Expected element mass of a first-generation subprocess that dies at
    /// the second generation: `lambda exp(lambda (exp(-lambda) - 2))`.
    pub delta_n: S,
    /// Continuous bound on the decomposition horizon:
    /// `lambda (2 - exp(-lambda)) / ln(lambda) - 1`.
    pub g_lambda: S,
    /// Maximum horizon, `floor(g_lambda)`.
    pub k_max: u64,
}

/// `P{X = n} = lambda^n exp(-lambda) / n!`, evaluated in log space so counts
/// up to 10^4 stay finite.
///
/// Utility scope: any positive finite `lambda`, not only supercritical ones.
///
/// # Examples
///
/// ```
/// let p: f64 = decomp::poisson_pmf(3.0, 0).unwrap();
/// assert!((p - (-3.0_f64).exp()).abs() < 1e-15);
/// ```
pub fn poisson_pmf<S: Scalar>(lambda: S, n: u64) -> Result<S> {
    require_positive_intensity(lambda)?;
    let n_s = cast_u64::<S>(n);
    let log_p = n_s * lambda.ln() - lambda - ln_gamma(n_s + S::one())?;
    Ok(log_p.exp())
}

/// Offspring PGF `f(s) = exp(lambda (s - 1))` for `s` in [0, 1].
pub fn offspring_pgf<S: Scalar>(lambda: S, s: S) -> Result<S> {
    require_positive_intensity(lambda)?;
    require_unit_interval(s)?;
    Ok((lambda * (s - S::one())).exp())
}

/// n-fold PGF iterate `f_n(s)`, with `f_0(s) = s`.
///
/// `f_n(0)` is the probability of extinction by generation `n`.
pub fn iterated_pgf<S: Scalar>(lambda: S, n: u32, s: S) -> Result<S> {
    require_positive_intensity(lambda)?;
    require_unit_interval(s)?;
    let mut value = s;
    for _ in 0..n {
        value = (lambda * (value - S::one())).exp();
    }
    Ok(value)
}

/// Derivative of the n-fold iterate, via the exact chain-rule recursion
/// `f_n'(s) = f'(f_{n-1}(s)) f_{n-1}'(s)` with `f'(x) = lambda f(x)`.
pub fn iterated_pgf_derivative<S: Scalar>(lambda: S, n: u32, s: S) -> Result<S> {
    require_positive_intensity(lambda)?;
    require_unit_interval(s)?;
    if n == 0 {
        return Err(Error::Domain {
            what: "derivative iterate count must be >= 1",
            value: 0.0,
        });
    }
    let mut value = s;
    let mut deriv = S::one();
    for _ in 0..n {
        let next = (lambda * (value - S::one())).exp();
        deriv = deriv * lambda * next;
        value = next;
    }
    Ok(deriv)
}

/// Extinction probability by fixed-point iteration from 0, plus the derived
/// stopping quantities.
///
/// The iteration `a <- exp(lambda (a - 1))` is monotone increasing and
/// converges to the minimal root for every supercritical `lambda`; it stops
/// at `|delta| < 1e-12` or after 10^4 steps, whichever comes first.
///
/// # Examples
///
/// ```
/// let profile = decomp::extinction_probability(2.0_f64).unwrap();
/// assert!((profile.alpha - 0.203_187_869_979_98).abs() < 1e-12);
/// assert_eq!(profile.k_max, 4);
/// ```
pub fn extinction_probability<S: Scalar>(lambda: S) -> Result<ExtinctionProfile<S>> {
    require_supercritical(lambda)?;
    let tol = cast::<S>(EXTINCTION_TOL);
    let mut alpha = S::zero();
    for _ in 0..EXTINCTION_MAX_ITER {
        let next = (lambda * (alpha - S::one())).exp();
        let done = (next - alpha).abs() < tol;
        alpha = next;
        if done {
            break;
        }
    }
    let gamma = S::one() - alpha;
    let delta_n = lambda * (lambda * ((-lambda).exp() - cast::<S>(2.0))).exp();
    let g_lambda = lambda * (cast::<S>(2.0) - (-lambda).exp()) / lambda.ln() - S::one();
    // g is bounded by ~1.7e9 for admissible lambdas, so the cast is exact.
    let k_max = as_f64(g_lambda).floor() as u64;
    Ok(ExtinctionProfile {
        alpha,
        gamma,
        delta_n,
        g_lambda,
        k_max,
    })
}

/// Intensity that produces a given level of detail: `-ln(1 - gamma) / gamma`.
///
/// Inverse of the `gamma` field of [`extinction_probability`].
pub fn lambda_from_detail<S: Scalar>(gamma: S) -> Result<S> {
    if !(gamma > S::zero() && gamma < S::one()) {
        return Err(Error::Domain {
            what: "level of detail must lie strictly inside (0, 1)",
            value: as_f64(gamma),
        });
    }
    Ok(-(S::one() - gamma).ln() / gamma)
}

/// Expected element mass of a generation-`n` population that dies out exactly
/// at generation `n+1`: `E[Z(n); Z(n+1) = 0] = f_1(0) f_n'(f_1(0))`.
pub fn conditioned_extinction_mass<S: Scalar>(lambda: S, n: u32) -> Result<S> {
    require_supercritical(lambda)?;
    if n == 0 {
        return Err(Error::Domain {
            what: "conditioned mass is defined for generations n >= 1",
            value: 0.0,
        });
    }
    let f1_at_zero = (-lambda).exp();
    let mass = f1_at_zero * iterated_pgf_derivative(lambda, n, f1_at_zero)?;
    if n == 1 {
        // The n = 1 case has the closed form delta_n; both paths must agree.
        let closed = lambda * (lambda * ((-lambda).exp() - cast::<S>(2.0))).exp();
        debug_assert!(
            as_f64((mass - closed).abs()) < 1e-12,
            "recursion and closed form diverged: {mass:?} vs {closed:?}"
        );
    }
    Ok(mass)
}

/// Continuous horizon bound `g(lambda)` and the maximum horizon
/// `K = floor(g(lambda))`.
///
/// `K` is the last level whose expected dying-out mass still exceeds one
/// element, i.e. the level at which decomposition stops being worthwhile.
pub fn max_horizon<S: Scalar>(lambda: S) -> Result<(S, u64)> {
    let profile = extinction_probability(lambda)?;
    Ok((profile.g_lambda, profile.k_max))
}

/// Deepest level a resource budget of `t_budget` total elements affords:
/// `ceil(ln(1 + (lambda-1) t) / ln(lambda)) - 1`.
pub fn resource_limited_depth<S: Scalar>(lambda: S, t_budget: S) -> Result<u64> {
    require_supercritical(lambda)?;
    if t_budget < S::one() || !t_budget.is_finite() {
        return Err(Error::Domain {
            what: "resource budget must be a finite real >= 1",
            value: as_f64(t_budget),
        });
    }
    let levels = (S::one() + (lambda - S::one()) * t_budget).ln() / lambda.ln();
    Ok(as_f64(levels).ceil() as u64 - 1)
}

/// Total elements of a complete decomposition to depth `k`: the geometric sum
/// `(lambda^(k+1) - 1) / (lambda - 1)`.
pub fn resource_total<S: Scalar>(lambda: S, k: u64) -> Result<S> {
    require_supercritical(lambda)?;
    Ok((pow_u64(lambda, k + 1) - S::one()) / (lambda - S::one()))
}

/// `base^n` for integer exponents, preferring the exact-ish `powi` path.
pub(crate) fn pow_u64<S: Scalar>(base: S, n: u64) -> S {
    if n <= i32::MAX as u64 {
        base.powi(n as i32)
    } else {
        base.powf(cast_u64(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn pmf_matches_direct_evaluation() {
        let cases: &[(f64, u64, f64)] = &[
            (3.0, 0, 0.049_787_068_367_863_9),
            (5.0, 5, 0.175_467_369_767_851),
            (5.41, 2, 0.065_438_206_434_882_1),
            (2.0, 0, 0.135_335_283_236_613),
            (2.0, 1, 0.270_670_566_473_225),
            (2.0, 2, 0.270_670_566_473_225),
            (2.0, 3, 0.180_447_044_315_483),
            (4.5, 4, 0.189_807_620_540_125),
        ];
        for &(lambda, n, want) in cases {
            let p: f64 = poisson_pmf(lambda, n).unwrap();
            assert!((p - want).abs() < TOL, "pmf({lambda}, {n}) = {p}");
        }
    }

    #[test]
    fn pmf_stays_finite_for_large_counts() {
        let p: f64 = poisson_pmf(2.0, 10_000).unwrap();
        assert!(p.is_finite());
        assert!(p >= 0.0);
        let p: f64 = poisson_pmf(30.0, 10_000).unwrap();
        assert!(p.is_finite());
    }

    #[test]
    fn pmf_partial_sums_reach_one() {
        for &lambda in &[0.5f64, 1.5, 2.0, 5.41, 12.0, 30.0] {
            let cutoff = (10.0 * lambda).ceil() as u64 + 30;
            let sum: f64 = (0..=cutoff).map(|n| poisson_pmf(lambda, n).unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-9, "lambda = {lambda}: sum = {sum}");
        }
    }

    #[test]
    fn pmf_rejects_bad_intensity() {
        assert!(poisson_pmf(0.0_f64, 1).is_err());
        assert!(poisson_pmf(-2.0_f64, 1).is_err());
        assert!(poisson_pmf(f64::INFINITY, 1).is_err());
        assert!(poisson_pmf(f64::NAN, 1).is_err());
    }

    #[test]
    fn pgf_normalization_and_zero() {
        for &lambda in &[0.5, 2.0, 5.41, 12.0] {
            assert!((offspring_pgf(lambda, 1.0).unwrap() - 1.0_f64).abs() < TOL);
            let at_zero: f64 = offspring_pgf(lambda, 0.0).unwrap();
            assert!((at_zero - (-lambda).exp()).abs() < TOL);
        }
        let v: f64 = offspring_pgf(2.0, 0.5).unwrap();
        assert!((v - 0.367_879_441_171_442).abs() < TOL);
    }

    #[test]
    fn pgf_agrees_with_truncated_series() {
        for &(lambda, s) in &[(2.0, 0.5), (5.41, 0.25), (1.5, 0.9)] {
            let direct: f64 = offspring_pgf(lambda, s).unwrap();
            let series: f64 = (0..60)
                .map(|n| poisson_pmf(lambda, n).unwrap() * s.powi(n as i32))
                .sum();
            assert!((direct - series).abs() < 1e-10, "lambda={lambda} s={s}");
        }
    }

    #[test]
    fn pgf_rejects_arguments_outside_unit_interval() {
        assert!(offspring_pgf(2.0_f64, -0.1).is_err());
        assert!(offspring_pgf(2.0_f64, 1.1).is_err());
        assert!(iterated_pgf(2.0_f64, 3, 1.5).is_err());
    }

    #[test]
    fn iterated_pgf_identity_and_reference_points() {
        assert_eq!(iterated_pgf(7.0_f64, 0, 0.37).unwrap(), 0.37);
        let cases: &[(f64, u32, f64)] = &[
            (2.0, 1, 0.135_335_283_236_613),
            (2.0, 2, 0.177_403_330_819_14),
            (2.0, 3, 0.192_975_249_668_225),
            (2.0, 5, 0.201_525_291_675_242),
            (2.0, 10, 0.203_169_495_320_429),
            (1.5, 1, 0.223_130_160_148_43),
            (1.5, 5, 0.394_978_568_953_222),
            (5.0, 2, 0.006_968_813_731_720_46),
            (5.41, 3, 0.004_583_849_838_034_5),
        ];
        for &(lambda, n, want) in cases {
            let v: f64 = iterated_pgf(lambda, n, 0.0).unwrap();
            assert!((v - want).abs() < TOL, "f_{n}(0) at {lambda}: {v}");
        }
    }

    #[test]
    fn extinction_by_generation_is_monotone_and_converges() {
        for &lambda in &[1.5, 2.0, 3.0, 5.0, 8.0] {
            let alpha: f64 = extinction_probability(lambda).unwrap().alpha;
            let mut prev = 0.0;
            for n in 0..=40 {
                let v: f64 = iterated_pgf(lambda, n, 0.0).unwrap();
                assert!(v >= prev, "lambda={lambda} n={n}");
                prev = v;
            }
            let far: f64 = iterated_pgf(lambda, 200, 0.0).unwrap();
            assert!((far - alpha).abs() < 1e-8, "lambda={lambda}");
        }
    }

    #[test]
    fn derivative_reference_points() {
        for &lambda in &[1.5, 2.0, 5.41] {
            let v: f64 = iterated_pgf_derivative(lambda, 1, 1.0).unwrap();
            assert!((v - lambda).abs() < TOL);
        }
        let v: f64 = iterated_pgf_derivative(3.0, 2, 1.0).unwrap();
        assert!((v - 9.0).abs() < 1e-10);
        let v: f64 = iterated_pgf_derivative(2.0, 1, 0.135_335).unwrap();
        assert!((v - 0.354_806_460_649_863).abs() < TOL);
        let e2 = (-2.0_f64).exp();
        let v: f64 = iterated_pgf_derivative(2.0, 2, e2).unwrap();
        assert!((v - 0.136_937_808_227_193).abs() < TOL);
    }

    #[test]
    fn derivative_requires_at_least_one_iterate() {
        assert!(iterated_pgf_derivative(2.0_f64, 0, 0.5).is_err());
    }

    #[test]
    #[allow(clippy::excessive_precision)] // reference digits kept verbatim
    fn extinction_probability_reference_points() {
        let cases: &[(f64, f64)] = &[
            (1.5, 0.417_188_356_134_188_61),
            (2.0, 0.203_187_869_979_979_95),
            (3.0, 0.059_520_209_292_640_369),
            (5.0, 0.006_977_153_651_144_739_3),
            (5.41, 0.004_583_918_866_848_787_5),
            (7.0, 0.000_917_759_038_835_019_41),
            (8.0, 0.000_336_366_550_811_374_64),
            (12.0, 6.144_665_419_581_784_5e-6),
        ];
        for &(lambda, want) in cases {
            let profile = extinction_probability(lambda).unwrap();
            // The fixed point stops once successive iterates agree to 1e-12;
            // the remaining distance to the root is about q/(1-q) times that
            // with q = lambda * alpha, so a few 1e-12 at lambda = 1.5.
            assert!(
                (profile.alpha - want).abs() < 5e-12,
                "alpha({lambda}) = {}",
                profile.alpha
            );
            assert!((profile.alpha + profile.gamma - 1.0).abs() < 1e-15);
            // The fixed point really is a root.
            let residual = ((lambda * (profile.alpha - 1.0)).exp() - profile.alpha).abs();
            assert!(residual < 1e-10, "lambda={lambda} residual={residual}");
        }
    }

    #[test]
    fn extinction_near_critical_tends_to_one() {
        let profile = extinction_probability(1.0001_f64).unwrap();
        assert!((profile.alpha - 1.0).abs() < 1e-2);
        assert!(profile.alpha < 1.0);
    }

    #[test]
    fn extinction_rejects_subcritical() {
        for &lambda in &[0.9_f64, 1.0, 1.0 + 1e-10, -3.0] {
            let err = extinction_probability(lambda).unwrap_err();
            assert!(err.to_string().contains("model requires lambda > 1"));
        }
        assert!(extinction_probability(1.0 + 1e-8_f64).is_ok());
    }

    #[test]
    fn delta_n_reference_points() {
        let cases: &[(f64, f64)] = &[
            (1.5, 0.104_367_218_522_395),
            (2.0, 0.048_017_860_047_053_7),
            (5.0, 0.000_234_777_487_854_157),
            (5.41, 0.000_110_824_871_856_999),
            (7.0, 5.857_974_414_496_48e-6),
            (12.0, 4.530_495_476_736_2e-10),
        ];
        for &(lambda, want) in cases {
            let profile = extinction_probability(lambda).unwrap();
            assert!(
                (profile.delta_n - want).abs() < want.abs() * 1e-10 + 1e-15,
                "delta_n({lambda}) = {}",
                profile.delta_n
            );
        }
    }

    #[test]
    fn conditioned_mass_reference_points() {
        let cases: &[(f64, u32, f64)] = &[
            (2.0, 1, 0.048_017_860_047_053_7),
            (2.0, 2, 0.018_532_517_062_228_2),
            (2.0, 3, 0.007_378_899_794_109_07),
            (7.0, 1, 5.857_974_414_496_48e-6),
            (5.41, 1, 0.000_110_824_871_856_999),
            (5.41, 2, 2.748_304_728_633_37e-6),
            (5.41, 3, 6.815_518_645_282_98e-8),
        ];
        for &(lambda, n, want) in cases {
            let v: f64 = conditioned_extinction_mass(lambda, n).unwrap();
            assert!(
                (v - want).abs() < want.abs() * 1e-9 + 1e-16,
                "mass({lambda}, {n}) = {v}"
            );
        }
        assert!(conditioned_extinction_mass(2.0_f64, 0).is_err());
    }

    #[test]
    fn conditioned_mass_matches_closed_form_at_one() {
        for &lambda in &[1.5, 2.0, 5.0, 7.0, 12.0] {
            let via_recursion: f64 = conditioned_extinction_mass(lambda, 1).unwrap();
            let closed = lambda * (lambda * ((-lambda).exp() - 2.0)).exp();
            assert!((via_recursion - closed).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn max_horizon_reference_points() {
        let cases: &[(f64, f64, u64)] = &[
            (2.0, 4.380_285_079_590_32, 4),
            (3.0, 4.325_480_931_939_48, 4),
            (5.0, 5.192_416_736_307_4, 5),
            (5.41, 5.394_677_463_251_66, 5),
            (7.0, 6.191_296_490_762_76, 6),
            (8.0, 6.693_082_964_022, 6),
            (12.0, 8.658_280_833_808_91, 8),
        ];
        for &(lambda, g_want, k_want) in cases {
            let (g, k): (f64, u64) = max_horizon(lambda).unwrap();
            assert!((g - g_want).abs() < 1e-10, "g({lambda}) = {g}");
            assert_eq!(k, k_want, "k_max({lambda})");
        }
    }

    #[test]
    fn stopping_condition_is_tight() {
        for &lambda in &[2.0f64, 3.0, 5.0, 8.0, 12.0] {
            let profile = extinction_probability(lambda).unwrap();
            let k = profile.k_max as i32;
            let base: f64 = (lambda * ((-lambda).exp() - 2.0)).exp();
            assert!(lambda.powi(k + 1) * base < 1.0, "lambda={lambda}");
            assert!(lambda.powi(k + 2) * base >= 1.0, "lambda={lambda}");
        }
    }

    #[test]
    fn detail_level_reference_points_and_round_trip() {
        let v: f64 = lambda_from_detail(0.5).unwrap();
        assert!((v - 1.386_294_361_119_89).abs() < TOL);
        let v: f64 = lambda_from_detail(0.9999).unwrap();
        assert!((v - 9.211_261_498_126_11).abs() < TOL);
        let lambda: f64 = lambda_from_detail(0.8).unwrap();
        let gamma = extinction_probability(lambda).unwrap().gamma;
        assert!((gamma - 0.8).abs() < 1e-9);
        assert!(lambda_from_detail(0.0_f64).is_err());
        assert!(lambda_from_detail(1.0_f64).is_err());
    }

    #[test]
    fn resource_depth_reference_points() {
        assert_eq!(resource_limited_depth(2.0_f64, 1000.0).unwrap(), 9);
        assert_eq!(resource_limited_depth(7.0_f64, 1000.0).unwrap(), 4);
        assert_eq!(resource_limited_depth(10.0_f64, 1000.0).unwrap(), 3);
        assert_eq!(resource_limited_depth(5.41_f64, 1000.0).unwrap(), 4);
        assert_eq!(resource_limited_depth(3.0_f64, 1000.0).unwrap(), 6);
        assert_eq!(resource_limited_depth(12.0_f64, 1000.0).unwrap(), 3);
        // A budget of exactly one element affords the root alone.
        assert_eq!(resource_limited_depth(2.0_f64, 1.0).unwrap(), 0);
        assert!(resource_limited_depth(2.0_f64, 0.5).is_err());
    }

    #[test]
    fn resource_total_is_the_geometric_sum() {
        let v: f64 = resource_total(2.0, 9).unwrap();
        assert_eq!(v, 1023.0);
        let v: f64 = resource_total(7.0, 4).unwrap();
        assert!((v - 2801.0).abs() < 1e-9);
        // The depth formula and the total are inverse: the affordable depth's
        // full tree fits the budget only up to the next level.
        for &(lambda, budget) in &[(2.0, 1000.0), (7.0, 1000.0), (10.0, 1000.0)] {
            let k = resource_limited_depth(lambda, budget).unwrap();
            let next: f64 = resource_total(lambda, k + 1).unwrap();
            assert!(next > budget, "lambda={lambda}");
        }
    }

    #[test]
    fn model_construction_guards() {
        assert!(OffspringModel::new(1.0_f64).is_err());
        assert!(OffspringModel::new(f64::NAN).is_err());
        let m = OffspringModel::new(2.0_f64).unwrap();
        assert_eq!(m.lambda(), 2.0);
        assert!((m.pmf(1) - 0.270_670_566_473_225).abs() < TOL);
        let profile = m.extinction_profile();
        assert!((profile.alpha - 0.203_187_869_979_98).abs() < 1e-11);
    }

    #[test]
    fn works_in_single_precision() {
        let p: f32 = poisson_pmf(2.0_f32, 2).unwrap();
        assert!((p - 0.270_670_57_f32).abs() < 1e-6);
        let profile = extinction_probability(2.0_f32).unwrap();
        assert!((profile.alpha - 0.203_187_87_f32).abs() < 1e-5);
        assert_eq!(profile.k_max, 4);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn pmf_is_a_probability(lambda in 0.01f64..30.0, n in 0u64..500) {
            let p: f64 = poisson_pmf(lambda, n).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn iterated_pgf_stays_in_unit_interval(
            lambda in 1.01f64..20.0,
            n in 0u32..50,
            s in 0.0f64..=1.0,
        ) {
            let v: f64 = iterated_pgf(lambda, n, s).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn extinction_profile_is_consistent(lambda in 1.001f64..30.0) {
            let p = extinction_probability(lambda).unwrap();
            prop_assert!(p.alpha > 0.0 && p.alpha < 1.0);
            prop_assert!((p.alpha + p.gamma - 1.0).abs() < 1e-15);
            prop_assert!(p.delta_n >= 0.0);
            prop_assert_eq!(p.k_max, p.g_lambda.floor() as u64);
            prop_assert!(((lambda * (p.alpha - 1.0)).exp() - p.alpha).abs() < 1e-10);
        }

        #[test]
        fn derivative_is_positive_on_the_open_interval(
            lambda in 1.01f64..12.0,
            n in 1u32..8,
            s in 0.0f64..=1.0,
        ) {
            let d: f64 = iterated_pgf_derivative(lambda, n, s).unwrap();
            prop_assert!(d > 0.0);
        }
    }
}
