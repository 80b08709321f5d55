//! Deterministic successive cancellation decoding in the likelihood-ratio
//! domain, plus the shared decode schedule used by every message type.
//!
//! Messages here are plain ratios `r = Pr(bit = 0) / Pr(bit = 1)`. The two
//! kernel operations combine a pair of inputs one stage down the code tree:
//!
//! ```text
//! f(a, b)        = (1 + ab) / (a + b)
//! g(a, b, u_sum) = a^(1 - 2 u_sum) * b
//! ```
//!
//! `decode_sc_with` runs the schedule generically over any [`ScKernel`], so
//! the deterministic decoder, the bit-stream decoder, and the exact
//! probability surrogate used in tests all share one traversal: depth-first
//! over the tree, f-stage before the left subtree, g-stage (fed with the
//! re-encoded left decisions) before the right subtree.

use crate::polar::CodeSpec;
use crate::{Error, Result};

/// Ratio ceiling, `2^40`.
pub const LR_MAX: f64 = 1_099_511_627_776.0;

/// Ratio floor, `2^-40`. Keeps `f` away from its 0/0 singularity at
/// `a + b = 0` and every ratio strictly positive.
pub const LR_MIN: f64 = 1.0 / LR_MAX;

pub fn clamp_lr(r: f64) -> f64 {
    r.clamp(LR_MIN, LR_MAX)
}

/// Bridges the channel convention `l = ln(P1/P0)` to a plain ratio `P0/P1`.
pub fn lr_from_log_ratio(l: f64) -> f64 {
    clamp_lr((-l).exp())
}

/// Check-node combination of two ratios (both operands unknown-sum stage).
pub fn f_lr(a: f64, b: f64) -> f64 {
    clamp_lr((1.0 + a * b) / (a + b))
}

/// Variable-node combination once the partial sum `u_sum` is known:
/// `a * b` for `u_sum = 0`, `b / a` for `u_sum = 1`.
pub fn g_lr(a: f64, b: f64, u_sum: u8) -> f64 {
    let r = if u_sum & 1 == 0 { a * b } else { b / a };
    clamp_lr(r)
}

/// Hard decision on a ratio; frozen positions always decode 0, and the
/// `r = 1` tie also decodes 0.
pub fn hard_decision_lr(r: f64, frozen: bool) -> u8 {
    if frozen {
        0
    } else {
        u8::from(r < 1.0)
    }
}

/// Node operations for one message domain of the SC schedule.
pub trait ScKernel {
    type Msg;

    fn f(&mut self, a: &Self::Msg, b: &Self::Msg) -> Self::Msg;
    fn g(&mut self, a: &Self::Msg, b: &Self::Msg, u_sum: u8) -> Self::Msg;
    fn decide(&mut self, msg: &Self::Msg, frozen: bool) -> u8;
}

/// Likelihood-ratio kernel of the reference decoder.
#[derive(Debug, Default, Clone, Copy)]
pub struct LrKernel;

impl ScKernel for LrKernel {
    type Msg = f64;

    fn f(&mut self, a: &f64, b: &f64) -> f64 {
        f_lr(*a, *b)
    }

    fn g(&mut self, a: &f64, b: &f64, u_sum: u8) -> f64 {
        g_lr(*a, *b, u_sum)
    }

    fn decide(&mut self, msg: &f64, frozen: bool) -> u8 {
        hard_decision_lr(*msg, frozen)
    }
}

/// Decodes one frame with the reference likelihood-ratio kernel.
pub fn decode_sc(spec: &CodeSpec, channel: &[f64]) -> Result<Vec<u8>> {
    decode_sc_with(spec, channel, &mut LrKernel)
}

/// Runs the SC schedule over arbitrary messages. `channel` carries one
/// message per code position.
pub fn decode_sc_with<K: ScKernel>(
    spec: &CodeSpec,
    channel: &[K::Msg],
    kernel: &mut K,
) -> Result<Vec<u8>> {
    if channel.len() != spec.n() {
        return Err(Error::LengthMismatch {
            what: "channel messages",
            expected: spec.n(),
            actual: channel.len(),
        });
    }
    let mut u_hat = vec![0u8; spec.n()];
    decode_rec(kernel, spec.frozen(), channel, 0, &mut u_hat);
    Ok(u_hat)
}

/// Depth-first SC over one subtree. Returns the GF(2) re-encoding of the
/// subtree's decided bits, which is exactly the partial-sum vector the
/// parent g-stage consumes.
fn decode_rec<K: ScKernel>(
    kernel: &mut K,
    frozen: &[bool],
    msgs: &[K::Msg],
    base: usize,
    u_hat: &mut [u8],
) -> Vec<u8> {
    let n = msgs.len();
    if n == 1 {
        let bit = kernel.decide(&msgs[0], frozen[base]);
        u_hat[base] = bit;
        return vec![bit];
    }
    let half = n / 2;
    let upper: Vec<K::Msg> = (0..half).map(|i| kernel.f(&msgs[i], &msgs[i + half])).collect();
    let left = decode_rec(kernel, frozen, &upper, base, u_hat);
    drop(upper);
    let lower: Vec<K::Msg> = (0..half)
        .map(|i| kernel.g(&msgs[i], &msgs[i + half], left[i]))
        .collect();
    let right = decode_rec(kernel, frozen, &lower, base + half, u_hat);

    let mut enc: Vec<u8> = left.iter().zip(&right).map(|(a, b)| a ^ b).collect();
    enc.extend_from_slice(&right);
    // Partial-sum consistency: the vector handed upward must equal the
    // re-encoding of this subtree's decided prefix.
    debug_assert_eq!(enc, crate::polar::polar_transform(&u_hat[base..base + n]));
    enc
}
