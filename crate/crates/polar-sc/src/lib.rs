//! Successive cancellation decoding of polar codes, twice over: a
//! deterministic likelihood-ratio decoder and a stochastic decoder carrying
//! every message as a Bernoulli bit-stream, plus a reproducible Monte Carlo
//! BER/FER harness for comparing them.
//!
//! * [`polar`] -- code construction (Bhattacharyya heuristic), encoding,
//!   message embedding.
//! * [`channel`] -- BPSK over AWGN, log-ratio messages, channel message
//!   scaling, probability conversion.
//! * [`sc`] -- the reference likelihood-ratio decoder and the generic SC
//!   schedule shared by all message domains.
//! * [`stochastic`] -- packed bit-streams, XOR/equality node kernels with
//!   hold policies and edge memory, re-randomization, and the stream
//!   decoder.
//! * [`sim`] -- deterministic seeded sweeps with early stopping and CSV
//!   output; the `polar-sc` binary is a thin CLI over it.
//!
//! ```
//! use polar_sc::polar::CodeSpec;
//! use polar_sc::sc;
//!
//! let spec = CodeSpec::new(8, 4, 0.5)?;
//! let msg = vec![1, 0, 1, 1];
//! let x = spec.encode(&spec.embed_message(&msg)?)?;
//! // Noiseless reception: saturated likelihood ratios recover the message.
//! let lrs: Vec<f64> = x
//!     .iter()
//!     .map(|&b| if b == 0 { sc::LR_MAX } else { sc::LR_MIN })
//!     .collect();
//! let u_hat = sc::decode_sc(&spec, &lrs)?;
//! assert_eq!(spec.extract_message(&u_hat)?, msg);
//! # Ok::<(), polar_sc::Error>(())
//! ```

pub mod channel;
pub mod polar;
pub mod sc;
pub mod sim;
pub mod stochastic;

mod error;

pub use error::{Error, Result};
