//! BPSK over AWGN, channel log-ratios, message scaling, and conversion to
//! the probability domain.
//!
//! Channel messages are carried as log-ratios with the convention
//! `l = ln(Pr(bit = 1 | y) / Pr(bit = 0 | y))`, so a positive received
//! value (closer to the +1 symbol of bit 0) yields a negative `l`. The
//! logistic map `p = e^l / (e^l + 1)` takes a log-ratio to `Pr(bit = 1)`,
//! which is the quantity a stochastic bit-stream can represent.
//!
//! Log-ratios are clamped to `|l| <= LOG_RATIO_MAX` and probabilities to
//! `[PROB_MIN, 1 - PROB_MIN]`: a decoder working at bit-stream precision
//! `1/2^s` cannot distinguish anything sharper, and the clamp keeps the
//! downstream equality nodes away from all-constant degenerate streams.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Saturation bound for channel and scaled log-ratios.
pub const LOG_RATIO_MAX: f64 = 40.0;

/// Probability floor, `2^-20`; far below any realizable stream precision.
pub const PROB_MIN: f64 = 1.0 / 1_048_576.0;

/// Probability ceiling, `1 - 2^-20`.
pub const PROB_MAX: f64 = 1.0 - PROB_MIN;

/// Derived noise parameters for a BPSK-over-AWGN link at a given Eb/N0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Energy per information bit over single-sided noise density, in dB.
    pub ebn0_db: f64,
    /// Code rate `k / n`.
    pub rate: f64,
    /// Noise standard deviation per real dimension.
    pub sigma: f64,
    /// Single-sided noise power density, `N0 = 2 sigma^2` at unit symbol energy.
    pub n0: f64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "code rate must lie in (0, 1], got {rate}"
            )));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Eb/N0 must be finite, got {ebn0_db}"
            )));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let sigma = (1.0 / (2.0 * rate * ebn0)).sqrt();
        Ok(ChannelConfig {
            ebn0_db,
            rate,
            sigma,
            n0: 2.0 * sigma * sigma,
        })
    }
}

/// Maps bits to unit-energy antipodal symbols: 0 → +1, 1 → −1.
pub fn bpsk_modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| 1.0 - 2.0 * f64::from(b & 1)).collect()
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` to each symbol.
///
/// With `sigma = 0` the output equals the input exactly while still
/// consuming one draw per symbol, so seeded runs stay aligned.
pub fn awgn_transmit<R: Rng + ?Sized>(symbols: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    Ok(symbols
        .iter()
        .map(|&s| {
            let g: f64 = rng.sample(StandardNormal);
            s + sigma * g
        })
        .collect())
}

/// Channel log-ratio of one received value: `l = -2 y / sigma^2`, clamped.
pub fn channel_logratio(y: f64, sigma: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be positive, got {sigma}"
        )));
    }
    Ok(clamp_log_ratio(-2.0 * y / (sigma * sigma)))
}

/// Channel message scaling: `l' = alpha * n0 * l`.
///
/// For AWGN log-ratios this collapses to `l' = -4 alpha y`, independent of
/// the noise level. `alpha * n0 = 1` is the identity.
pub fn scale_message(l: f64, alpha: f64, n0: f64) -> f64 {
    debug_assert!(alpha > 0.0, "scaling factor must be positive");
    clamp_log_ratio(alpha * n0 * l)
}

/// Logistic map from a log-ratio to `Pr(bit = 1)`, clamped to
/// `[PROB_MIN, PROB_MAX]`.
pub fn logratio_to_prob(l: f64) -> f64 {
    logistic(l).clamp(PROB_MIN, PROB_MAX)
}

/// Overflow-safe logistic. Computed from `|l|` so that
/// `logistic(-l) == 1 - logistic(l)` holds bit-exactly.
pub(crate) fn logistic(l: f64) -> f64 {
    let e = (-l.abs()).exp();
    let favored = 1.0 / (1.0 + e);
    if l >= 0.0 {
        favored
    } else {
        1.0 - favored
    }
}

pub(crate) fn clamp_log_ratio(l: f64) -> f64 {
    l.clamp(-LOG_RATIO_MAX, LOG_RATIO_MAX)
}
