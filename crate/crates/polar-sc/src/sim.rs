//! Monte Carlo BER/FER sweeps with deterministic seeding and CSV output.
//!
//! Every frame owns a generator derived injectively from
//! `(master_seed, ebn0_index, frame_index)`, so a frame's outcome depends
//! only on the configuration and those indices. Early stopping is defined
//! in sequential frame order: a sweep point simulates exactly frames
//! `0..F` where `F` is the first count at which the accumulated frame
//! errors reach `min_frame_errors` (capped at `max_frames`). Frames are
//! executed in fixed-size chunks, in parallel inside each chunk, and any
//! results beyond `F` are discarded, which makes the output byte-identical
//! for every worker count.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    awgn_transmit, bpsk_modulate, channel_logratio, logratio_to_prob, scale_message, ChannelConfig,
};
use crate::polar::CodeSpec;
use crate::sc::{decode_sc, lr_from_log_ratio};
use crate::stochastic::{decode_stochastic_sc, HoldPolicy, NodeConfig};
use crate::{Error, Result};

/// Frames dispatched per parallel batch; results past the stopping frame
/// are discarded, so this only trades scheduling overhead against waste.
const FRAME_CHUNK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Deterministic,
    Stochastic,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Deterministic => "det",
            DecoderKind::Stochastic => "stoch",
        })
    }
}

/// Full description of one sweep: code, channel grid, decoder variant, and
/// stopping rules.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub k: usize,
    pub design_erasure: f64,
    pub ebn0_db: Vec<f64>,
    pub decoder: DecoderKind,
    pub stream_len: usize,
    /// Channel message scaling factor; 0 disables scaling.
    pub alpha: f64,
    pub rerandomize: bool,
    pub hold_policy: HoldPolicy,
    pub edge_mem_depth: usize,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub master_seed: u64,
    /// Worker threads; 0 picks the rayon default. Results do not depend on
    /// this value.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 128,
            k: 64,
            design_erasure: 0.5,
            ebn0_db: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            decoder: DecoderKind::Stochastic,
            stream_len: 1024,
            alpha: 0.5,
            rerandomize: true,
            hold_policy: HoldPolicy::RepeatLast,
            edge_mem_depth: 64,
            max_frames: 1_000_000,
            min_frame_errors: 100,
            master_seed: 1,
            workers: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "block length must be a power of two >= 2, got {}",
                self.n
            )));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "message length k={} out of range 1..={}",
                self.k, self.n
            )));
        }
        if !(self.design_erasure > 0.0 && self.design_erasure < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "design erasure must lie in (0, 1), got {}",
                self.design_erasure
            )));
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidParameter("empty Eb/N0 list".into()));
        }
        if self.ebn0_db.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Eb/N0 value".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidParameter("max_frames must be >= 1".into()));
        }
        if self.min_frame_errors == 0 {
            return Err(Error::InvalidParameter(
                "min_frame_errors must be >= 1".into(),
            ));
        }
        self.node_config().validate()
    }

    pub fn node_config(&self) -> NodeConfig {
        NodeConfig {
            stream_len: self.stream_len,
            rerandomize: self.rerandomize,
            hold_policy: self.hold_policy,
            edge_mem_depth: self.edge_mem_depth,
        }
    }

    fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// One simulated operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub decoder: DecoderKind,
    pub n: usize,
    pub k: usize,
    pub ebn0_db: f64,
    pub stream_len: usize,
    pub alpha: f64,
    pub rerandomize: bool,
    pub hold_policy: HoldPolicy,
    pub edge_mem_depth: usize,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
}

/// Injective mix of `(master_seed, ebn0_index, frame_index)` into a
/// generator seed: the three indices occupy disjoint bytes of the 32-byte
/// seed, with a fixed tag in the remainder.
pub fn derive_frame_rng(master_seed: u64, ebn0_index: u64, frame_index: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&ebn0_index.to_le_bytes());
    seed[16..24].copy_from_slice(&frame_index.to_le_bytes());
    seed[24..32].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Simulates one frame end to end: random message, encode, BPSK, AWGN,
/// channel log-ratios, optional scaling, decode, compare. Returns the
/// message bit-error count and the frame-error flag.
pub fn run_trial<R: Rng + ?Sized>(
    cfg: &SimConfig,
    ebn0_db: f64,
    rng: &mut R,
) -> Result<(u64, bool)> {
    cfg.validate()?;
    let spec = CodeSpec::new(cfg.n, cfg.k, cfg.design_erasure)?;
    run_trial_with(&spec, cfg, ebn0_db, rng)
}

fn run_trial_with<R: Rng + ?Sized>(
    spec: &CodeSpec,
    cfg: &SimConfig,
    ebn0_db: f64,
    rng: &mut R,
) -> Result<(u64, bool)> {
    let ch = ChannelConfig::new(ebn0_db, cfg.rate())?;
    let msg: Vec<u8> = (0..cfg.k).map(|_| rng.random::<bool>() as u8).collect();
    let x = spec.encode(&spec.embed_message(&msg)?)?;
    let y = awgn_transmit(&bpsk_modulate(&x), ch.sigma, rng)?;

    let mut log_ratios = Vec::with_capacity(cfg.n);
    for &yi in &y {
        let mut l = channel_logratio(yi, ch.sigma)?;
        if cfg.alpha > 0.0 {
            l = scale_message(l, cfg.alpha, ch.n0);
        }
        log_ratios.push(l);
    }

    let u_hat = match cfg.decoder {
        DecoderKind::Deterministic => {
            let lrs: Vec<f64> = log_ratios.iter().map(|&l| lr_from_log_ratio(l)).collect();
            decode_sc(spec, &lrs)?
        }
        DecoderKind::Stochastic => {
            let probs: Vec<f64> = log_ratios.iter().map(|&l| logratio_to_prob(l)).collect();
            decode_stochastic_sc(spec, &probs, &cfg.node_config(), rng)?
        }
    };

    let decoded = spec.extract_message(&u_hat)?;
    let bit_errors = msg
        .iter()
        .zip(&decoded)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok((bit_errors, bit_errors > 0))
}

/// Simulates one Eb/N0 grid entry to its stopping point.
pub fn run_point(cfg: &SimConfig, ebn0_index: usize) -> Result<BerPoint> {
    cfg.validate()?;
    let ebn0_db = *cfg.ebn0_db.get(ebn0_index).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "Eb/N0 index {ebn0_index} out of range 0..{}",
            cfg.ebn0_db.len()
        ))
    })?;
    let spec = CodeSpec::new(cfg.n, cfg.k, cfg.design_erasure)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;

    let (frames, bit_errors, frame_errors) = pool.install(|| -> Result<(u64, u64, u64)> {
        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        let mut frame_errors = 0u64;
        let mut next = 0u64;
        'outer: while next < cfg.max_frames {
            let end = (next + FRAME_CHUNK).min(cfg.max_frames);
            let chunk: Vec<(u64, bool)> = (next..end)
                .into_par_iter()
                .map(|frame| {
                    let mut rng = derive_frame_rng(cfg.master_seed, ebn0_index as u64, frame);
                    run_trial_with(&spec, cfg, ebn0_db, &mut rng)
                })
                .collect::<Result<_>>()?;
            next = end;
            for (be, fe) in chunk {
                frames += 1;
                bit_errors += be;
                frame_errors += u64::from(fe);
                if frame_errors >= cfg.min_frame_errors {
                    break 'outer;
                }
            }
        }
        Ok((frames, bit_errors, frame_errors))
    })?;

    Ok(BerPoint {
        decoder: cfg.decoder,
        n: cfg.n,
        k: cfg.k,
        ebn0_db,
        stream_len: cfg.stream_len,
        alpha: cfg.alpha,
        rerandomize: cfg.rerandomize,
        hold_policy: cfg.hold_policy,
        edge_mem_depth: cfg.edge_mem_depth,
        frames,
        bit_errors,
        frame_errors,
        ber: bit_errors as f64 / (frames as f64 * cfg.k as f64),
        fer: frame_errors as f64 / frames as f64,
    })
}

/// Runs every Eb/N0 grid entry in order.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    (0..cfg.ebn0_db.len()).map(|i| run_point(cfg, i)).collect()
}

pub const CSV_HEADER: &str =
    "decoder,n,k,ebn0_db,L,alpha,rerandomize,hold_policy,edge_mem_depth,frames,bit_errors,frame_errors,ber,fer";

/// Formats one CSV row; BER/FER carry 6 significant digits.
pub fn format_csv_row(p: &BerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{:.5e},{:.5e}",
        p.decoder,
        p.n,
        p.k,
        p.ebn0_db,
        p.stream_len,
        p.alpha,
        if p.rerandomize { "on" } else { "off" },
        p.hold_policy,
        p.edge_mem_depth,
        p.frames,
        p.bit_errors,
        p.frame_errors,
        p.ber,
        p.fer
    )
}

/// Writes the sweep as CSV plus a sibling gnuplot script.
pub fn write_csv(points: &[BerPoint], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        writeln!(out, "{}", format_csv_row(p))?;
    }
    out.flush()?;
    write_plot_script(path)?;
    Ok(())
}

fn write_plot_script(csv_path: &Path) -> Result<()> {
    let script_path = csv_path.with_extension("gnuplot");
    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let mut out = BufWriter::new(File::create(script_path)?);
    writeln!(out, "# gnuplot script for {csv_name}")?;
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set logscale y")?;
    writeln!(out, "set grid")?;
    writeln!(out, "set xlabel 'Eb/N0 (dB)'")?;
    writeln!(out, "set ylabel 'error rate'")?;
    writeln!(out, "set key bottom left")?;
    writeln!(
        out,
        "plot '{csv_name}' skip 1 using 4:13 with linespoints title 'BER', \\"
    )?;
    writeln!(
        out,
        "     '{csv_name}' skip 1 using 4:14 with linespoints title 'FER'"
    )?;
    out.flush()?;
    Ok(())
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_rngs_repeat_and_differ() {
        let mut a = derive_frame_rng(9, 0, 0);
        let mut b = derive_frame_rng(9, 0, 0);
        assert_eq!(a.random::<u64>(), b.random::<u64>());
        let mut c = derive_frame_rng(9, 0, 1);
        let mut d = derive_frame_rng(9, 1, 0);
        let base = derive_frame_rng(9, 0, 0).random::<u64>();
        assert_ne!(base, c.random::<u64>());
        assert_ne!(base, d.random::<u64>());
    }

    #[test]
    fn near_noiseless_trial_is_error_free() {
        let cfg = SimConfig {
            decoder: DecoderKind::Deterministic,
            ebn0_db: vec![60.0],
            alpha: 0.0,
            ..SimConfig::default()
        };
        let mut rng = derive_frame_rng(5, 0, 0);
        let (be, fe) = run_trial(&cfg, 60.0, &mut rng).unwrap();
        assert_eq!(be, 0);
        assert!(!fe);
    }

    #[test]
    fn trial_is_deterministic() {
        for decoder in [DecoderKind::Deterministic, DecoderKind::Stochastic] {
            let cfg = SimConfig {
                decoder,
                n: 32,
                k: 16,
                stream_len: 128,
                ..SimConfig::default()
            };
            let a = run_trial(&cfg, 2.0, &mut derive_frame_rng(8, 0, 3)).unwrap();
            let b = run_trial(&cfg, 2.0, &mut derive_frame_rng(8, 0, 3)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_point_respects_frame_cap() {
        let cfg = SimConfig {
            decoder: DecoderKind::Deterministic,
            n: 16,
            k: 8,
            ebn0_db: vec![0.0],
            max_frames: 10,
            min_frame_errors: 1,
            alpha: 0.0,
            ..SimConfig::default()
        };
        let points = run_ber_sweep(&cfg).unwrap();
        assert_eq!(points.len(), 1);
        let p = &points[0];
        assert!(p.frames <= 10 && p.frames >= 1);
        assert!((p.ber - p.bit_errors as f64 / (p.frames as f64 * 8.0)).abs() < 1e-15);
        assert!((p.fer - p.frame_errors as f64 / p.frames as f64).abs() < 1e-15);
        assert!(p.fer >= p.ber);
    }

    #[test]
    fn early_stop_counts_are_exact() {
        // At 0 dB errors are frequent, so the stop lands mid-chunk; the
        // reported frame count must be the first index reaching the
        // threshold under sequential accumulation.
        let cfg = SimConfig {
            decoder: DecoderKind::Deterministic,
            n: 16,
            k: 8,
            ebn0_db: vec![0.0],
            max_frames: 100_000,
            min_frame_errors: 25,
            alpha: 0.0,
            ..SimConfig::default()
        };
        let p = run_point(&cfg, 0).unwrap();
        assert_eq!(p.frame_errors, 25);

        let mut frames = 0u64;
        let mut frame_errors = 0u64;
        let spec_cfg = cfg.clone();
        while frame_errors < 25 {
            let mut rng = derive_frame_rng(cfg.master_seed, 0, frames);
            let (_, fe) = run_trial(&spec_cfg, 0.0, &mut rng).unwrap();
            frame_errors += u64::from(fe);
            frames += 1;
        }
        assert_eq!(p.frames, frames);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let ok = SimConfig::default();
        assert!(ok.validate().is_ok());
        for cfg in [
            SimConfig { n: 12, ..ok.clone() },
            SimConfig { k: 0, ..ok.clone() },
            SimConfig { k: 200, ..ok.clone() },
            SimConfig { design_erasure: 1.0, ..ok.clone() },
            SimConfig { ebn0_db: vec![], ..ok.clone() },
            SimConfig { ebn0_db: vec![f64::NAN], ..ok.clone() },
            SimConfig { alpha: -0.5, ..ok.clone() },
            SimConfig { max_frames: 0, ..ok.clone() },
            SimConfig { min_frame_errors: 0, ..ok.clone() },
            SimConfig { stream_len: 100, ..ok.clone() },
            SimConfig {
                hold_policy: HoldPolicy::EdgeMemory,
                edge_mem_depth: 0,
                ..ok.clone()
            },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?} should be rejected");
        }
    }

    #[test]
    fn csv_row_shape() {
        let p = BerPoint {
            decoder: DecoderKind::Stochastic,
            n: 128,
            k: 64,
            ebn0_db: 3.5,
            stream_len: 1024,
            alpha: 0.5,
            rerandomize: true,
            hold_policy: HoldPolicy::RepeatLast,
            edge_mem_depth: 64,
            frames: 20000,
            bit_errors: 1234,
            frame_errors: 321,
            ber: 1234.0 / (20000.0 * 64.0),
            fer: 321.0 / 20000.0,
        };
        let row = format_csv_row(&p);
        assert_eq!(row.split(',').count(), 14);
        assert_eq!(CSV_HEADER.split(',').count(), 14);
        assert!(row.starts_with("stoch,128,64,3.5,1024,0.5,on,repeat,64,"));
    }

    #[test]
    fn wilson_interval_basics() {
        let (lo, hi) = wilson_interval(0, 0, 1.96);
        assert_eq!((lo, hi), (0.0, 1.0));
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(lo > 0.39 && hi < 0.61);
        let (lo0, hi0) = wilson_interval(0, 1000, 1.96);
        assert_eq!(lo0, 0.0);
        assert!(hi0 < 0.01);
    }
}
