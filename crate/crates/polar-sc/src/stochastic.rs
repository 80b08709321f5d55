//! Bit-stream messages and the stochastic SC decoder.
//!
//! A [`BitStream`] of length `L = 2^s` represents the probability
//! `ones / L`, so its precision is `1/2^s`. The SC kernel translates to
//! streams as:
//!
//! * f node: a single XOR per time step. For independent inputs the output
//!   rate is `pa (1 - pb) + pb (1 - pa)`.
//! * g node: an equality node over `(a XOR u_sum, b)`. When the two input
//!   bits agree the common bit is emitted (a regenerative step); when they
//!   disagree the node is in a hold state and emits either the previous
//!   output bit or a uniform draw from a small edge memory of recent
//!   regenerative bits. Its regenerative statistics match
//!   `pa pb / (pa pb + (1-pa)(1-pb))` for `u_sum = 0` and the
//!   input-inverted form for `u_sum = 1`.
//!
//! Output streams lose randomness through reuse of their inputs, so by
//! default every f and g output is re-randomized: regenerated as a fresh
//! Bernoulli stream at its estimated rate. [`f_prob`] and [`g_prob`] are
//! the exact-arithmetic counterparts used as statistical oracles, and
//! [`ProbKernel`] runs the whole schedule on them as the infinite-length
//! surrogate of the stream decoder.

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;

use crate::polar::CodeSpec;
use crate::sc::{decode_sc_with, ScKernel};
use crate::{Error, Result};

/// Packed bit-stream; bit `t` lives at word `t / 64`, offset `t % 64`.
/// Words beyond `len` are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
}

impl BitStream {
    pub fn zeros(len: usize) -> Self {
        BitStream {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut s = BitStream::zeros(bits.len());
        for (t, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                s.set_bit(t);
            }
        }
        s
    }

    /// Draws `len` independent Bernoulli(`p`) bits; `p` is clamped to
    /// `[0, 1]`, and the endpoints produce exactly constant streams.
    pub fn bernoulli<R: Rng + ?Sized>(p: f64, len: usize, rng: &mut R) -> Self {
        let dist = Bernoulli::new(p.clamp(0.0, 1.0)).expect("probability clamped to [0, 1]");
        let mut words = vec![0u64; len.div_ceil(64)];
        for (w, word) in words.iter_mut().enumerate() {
            let bits = (len - w * 64).min(64);
            let mut acc = 0u64;
            for b in 0..bits {
                if dist.sample(rng) {
                    acc |= 1 << b;
                }
            }
            *word = acc;
        }
        BitStream { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bit(&self, t: usize) -> u8 {
        debug_assert!(t < self.len);
        ((self.words[t >> 6] >> (t & 63)) & 1) as u8
    }

    #[inline]
    fn set_bit(&mut self, t: usize) {
        debug_assert!(t < self.len);
        self.words[t >> 6] |= 1 << (t & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The represented probability, `ones / len`.
    pub fn estimate_prob(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        self.count_ones() as f64 / self.len as f64
    }

    fn xor(&self, other: &BitStream) -> BitStream {
        debug_assert_eq!(self.len, other.len);
        BitStream {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }
}

/// What a g node emits while its inputs disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoldPolicy {
    /// Repeat the previous output bit.
    RepeatLast,
    /// Draw uniformly from an edge memory of recent regenerative bits.
    EdgeMemory,
}

impl std::fmt::Display for HoldPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HoldPolicy::RepeatLast => "repeat",
            HoldPolicy::EdgeMemory => "edgemem",
        })
    }
}

/// Knobs of the stochastic decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeConfig {
    /// Stream length `L`, a power of two.
    pub stream_len: usize,
    /// Re-randomize every f and g output stream.
    pub rerandomize: bool,
    pub hold_policy: HoldPolicy,
    /// Edge-memory depth in bits; used only with [`HoldPolicy::EdgeMemory`].
    pub edge_mem_depth: usize,
}

impl Default for NodeConfig {
    fn default() -> Self {
        NodeConfig {
            stream_len: 1024,
            rerandomize: true,
            hold_policy: HoldPolicy::RepeatLast,
            edge_mem_depth: 64,
        }
    }
}

impl NodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stream_len == 0 || !self.stream_len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "stream length must be a power of two, got {}",
                self.stream_len
            )));
        }
        if self.hold_policy == HoldPolicy::EdgeMemory && self.edge_mem_depth == 0 {
            return Err(Error::InvalidParameter(
                "edge memory depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Ring of the last `depth` regenerative output bits of one g node.
#[derive(Debug, Clone)]
pub struct EdgeMemory {
    bits: Vec<u8>,
    head: usize,
    fill: usize,
}

impl EdgeMemory {
    pub fn new(depth: usize) -> Self {
        assert!(depth >= 1, "edge memory depth must be at least 1");
        EdgeMemory {
            bits: vec![0; depth],
            head: 0,
            fill: 0,
        }
    }

    pub fn push(&mut self, bit: u8) {
        self.bits[self.head] = bit & 1;
        self.head = (self.head + 1) % self.bits.len();
        self.fill = (self.fill + 1).min(self.bits.len());
    }

    /// Uniform draw over the filled portion; `None` before the first push.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u8> {
        if self.fill == 0 {
            None
        } else {
            Some(self.bits[rng.random_range(0..self.fill)])
        }
    }
}

/// Per-activation state of one g node: the previous output bit and, when
/// configured, its edge memory. The initial output bit is a fresh
/// Bernoulli(0.5) draw so early hold steps carry no systematic bias.
#[derive(Debug, Clone)]
pub struct EqualityState {
    last_out: u8,
    edge_mem: Option<EdgeMemory>,
}

impl EqualityState {
    pub fn init<R: Rng + ?Sized>(cfg: &NodeConfig, rng: &mut R) -> Self {
        EqualityState {
            last_out: rng.random::<bool>() as u8,
            edge_mem: match cfg.hold_policy {
                HoldPolicy::RepeatLast => None,
                HoldPolicy::EdgeMemory => Some(EdgeMemory::new(cfg.edge_mem_depth)),
            },
        }
    }

    fn regenerative(&mut self, bit: u8) -> u8 {
        if let Some(em) = &mut self.edge_mem {
            em.push(bit);
        }
        self.last_out = bit;
        bit
    }

    fn hold<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u8 {
        // Before the edge memory sees its first regenerative bit, fall back
        // to repeating the last output.
        let bit = match &self.edge_mem {
            Some(em) => em.sample(rng).unwrap_or(self.last_out),
            None => self.last_out,
        };
        self.last_out = bit;
        bit
    }
}

/// Stochastic f node: per-step XOR of the two input streams.
pub fn stochastic_f(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "f-node streams",
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.xor(b))
}

/// Stochastic g node: equality node over `(a XOR u_sum, b)` with the
/// configured hold behavior.
pub fn stochastic_g<R: Rng + ?Sized>(
    a: &BitStream,
    b: &BitStream,
    u_sum: u8,
    state: &mut EqualityState,
    rng: &mut R,
) -> Result<BitStream> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "g-node streams",
            expected: a.len(),
            actual: b.len(),
        });
    }
    let flip = u_sum & 1;
    let mut out = BitStream::zeros(a.len());
    for t in 0..a.len() {
        let a_t = a.bit(t) ^ flip;
        let b_t = b.bit(t);
        let bit = if a_t == b_t {
            state.regenerative(a_t)
        } else {
            state.hold(rng)
        };
        if bit == 1 {
            out.set_bit(t);
        }
    }
    Ok(out)
}

/// Regenerates a stream as fresh Bernoulli draws at its estimated rate,
/// destroying correlation with every other stream. All-zero and all-one
/// streams are fixed points.
pub fn rerandomize<R: Rng + ?Sized>(x: &BitStream, rng: &mut R) -> BitStream {
    BitStream::bernoulli(x.estimate_prob(), x.len(), rng)
}

/// Majority vote over the stream; frozen positions and the exact `L/2` tie
/// decode 0, matching the likelihood-ratio decoder's tie rule.
pub fn hard_decide_stream(x: &BitStream, frozen: bool) -> u8 {
    if frozen {
        0
    } else {
        u8::from(2 * x.count_ones() > x.len())
    }
}

/// Exact output rate of the f node for independent inputs.
pub fn f_prob(pa: f64, pb: f64) -> f64 {
    pa * (1.0 - pb) + pb * (1.0 - pa)
}

/// Exact stationary rate of the g node for independent inputs.
///
/// Fails when both inputs sit on conflicting endpoints (`0/0`); upstream
/// probability clamping keeps decoder inputs away from that case.
pub fn g_prob(pa: f64, pb: f64, u_sum: u8) -> Result<f64> {
    // Each complement is taken once, straight from the input; complementing
    // twice would wipe out the relative precision of a small probability.
    let (pa_eff, pa_eff_not) = if u_sum & 1 == 0 {
        (pa, 1.0 - pa)
    } else {
        (1.0 - pa, pa)
    };
    let num = pa_eff * pb;
    let den = num + pa_eff_not * (1.0 - pb);
    if den == 0.0 {
        return Err(Error::DegenerateInput { pa, pb });
    }
    Ok(num / den)
}

/// Stream-domain kernel: the SC schedule with XOR f nodes, equality g
/// nodes, and majority hard decisions.
pub struct StochasticKernel<'a, R: Rng + ?Sized> {
    cfg: &'a NodeConfig,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> StochasticKernel<'a, R> {
    pub fn new(cfg: &'a NodeConfig, rng: &'a mut R) -> Self {
        StochasticKernel { cfg, rng }
    }
}

impl<R: Rng + ?Sized> ScKernel for StochasticKernel<'_, R> {
    type Msg = BitStream;

    fn f(&mut self, a: &BitStream, b: &BitStream) -> BitStream {
        let out = stochastic_f(a, b).expect("schedule keeps stream lengths equal");
        if self.cfg.rerandomize {
            rerandomize(&out, self.rng)
        } else {
            out
        }
    }

    fn g(&mut self, a: &BitStream, b: &BitStream, u_sum: u8) -> BitStream {
        let mut state = EqualityState::init(self.cfg, self.rng);
        let out = stochastic_g(a, b, u_sum, &mut state, self.rng)
            .expect("schedule keeps stream lengths equal");
        if self.cfg.rerandomize {
            rerandomize(&out, self.rng)
        } else {
            out
        }
    }

    fn decide(&mut self, msg: &BitStream, frozen: bool) -> u8 {
        hard_decide_stream(msg, frozen)
    }
}

/// Infinite-stream surrogate: carries exact probabilities through the same
/// schedule, with the hard decision at `p = 0.5` deciding 0 on the tie.
/// Conflicting-certainty g inputs carry no information and map to 0.5.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProbKernel;

impl ScKernel for ProbKernel {
    type Msg = f64;

    fn f(&mut self, a: &f64, b: &f64) -> f64 {
        f_prob(*a, *b)
    }

    fn g(&mut self, a: &f64, b: &f64, u_sum: u8) -> f64 {
        g_prob(*a, *b, u_sum).unwrap_or(0.5)
    }

    fn decide(&mut self, msg: &f64, frozen: bool) -> u8 {
        if frozen {
            0
        } else {
            u8::from(*msg > 0.5)
        }
    }
}

/// Decodes one frame from per-symbol probabilities `Pr(bit = 1)`.
///
/// One input stream is generated per symbol; the schedule then mirrors
/// [`crate::sc::decode_sc`] node for node. With a fixed seed the decoded
/// vector and every internal stream are bit-identical across runs.
pub fn decode_stochastic_sc<R: Rng + ?Sized>(
    spec: &CodeSpec,
    probs: &[f64],
    cfg: &NodeConfig,
    rng: &mut R,
) -> Result<Vec<u8>> {
    if probs.len() != spec.n() {
        return Err(Error::LengthMismatch {
            what: "channel probabilities",
            expected: spec.n(),
            actual: probs.len(),
        });
    }
    cfg.validate()?;
    let streams: Vec<BitStream> = probs
        .iter()
        .map(|&p| BitStream::bernoulli(p, cfg.stream_len, rng))
        .collect();
    let mut kernel = StochasticKernel::new(cfg, rng);
    decode_sc_with(spec, &streams, &mut kernel)
}
