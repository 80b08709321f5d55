use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use polar_sc::sim::{format_csv_row, run_point, write_csv, DecoderKind, SimConfig, CSV_HEADER};
use polar_sc::stochastic::HoldPolicy;
use polar_sc::Error;

/// BER/FER sweeps for deterministic and stochastic SC polar decoders.
#[derive(Debug, Parser)]
#[command(name = "polar-sc", version, about)]
struct Cli {
    /// Codeword length (power of two)
    #[arg(long, default_value_t = 128)]
    n: usize,

    /// Message length
    #[arg(long, default_value_t = 64)]
    k: usize,

    /// Design erasure probability for code construction
    #[arg(long, default_value_t = 0.5)]
    design_erasure: f64,

    /// Comma-separated Eb/N0 grid in dB
    #[arg(long, value_delimiter = ',', default_value = "1.0,2.0,3.0,4.0,5.0")]
    ebn0: Vec<f64>,

    /// Decoder variant
    #[arg(long, value_enum, default_value_t = DecoderArg::Stoch)]
    decoder: DecoderArg,

    /// Bit-stream length L (power of two)
    #[arg(long, default_value_t = 1024)]
    stream_len: usize,

    /// Channel message scaling factor (0 disables scaling)
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,

    /// Re-randomize every f/g output stream
    #[arg(long, value_enum, default_value_t = Switch::On)]
    rerandomize: Switch,

    /// Hold policy of the stochastic g node
    #[arg(long, value_enum, default_value_t = HoldArg::Repeat)]
    hold: HoldArg,

    /// Edge memory depth in bits
    #[arg(long, default_value_t = 64)]
    edge_depth: usize,

    /// Frame cap per Eb/N0 point
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,

    /// Stop a point once this many frame errors are seen
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,

    /// Master seed; identical seeds give byte-identical CSV output
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Output CSV path (a sibling .gnuplot script is written next to it)
    #[arg(long, default_value = "ber.csv")]
    out: PathBuf,

    /// Worker threads (0 = automatic); does not affect results
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecoderArg {
    Det,
    Stoch,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HoldArg {
    Repeat,
    Edgemem,
}

impl Cli {
    fn into_config(self) -> (SimConfig, PathBuf) {
        let cfg = SimConfig {
            n: self.n,
            k: self.k,
            design_erasure: self.design_erasure,
            ebn0_db: self.ebn0,
            decoder: match self.decoder {
                DecoderArg::Det => DecoderKind::Deterministic,
                DecoderArg::Stoch => DecoderKind::Stochastic,
            },
            stream_len: self.stream_len,
            alpha: self.alpha,
            rerandomize: matches!(self.rerandomize, Switch::On),
            hold_policy: match self.hold {
                HoldArg::Repeat => HoldPolicy::RepeatLast,
                HoldArg::Edgemem => HoldPolicy::EdgeMemory,
            },
            edge_mem_depth: self.edge_depth,
            max_frames: self.max_frames,
            min_frame_errors: self.min_frame_errors,
            master_seed: self.seed,
            workers: self.workers,
        };
        (cfg, self.out)
    }
}

const EXIT_INVALID_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID_CONFIG);
        }
    };

    let (cfg, out) = cli.into_config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID_CONFIG);
    }

    eprintln!("{CSV_HEADER}");
    let mut points = Vec::with_capacity(cfg.ebn0_db.len());
    for i in 0..cfg.ebn0_db.len() {
        match run_point(&cfg, i) {
            Ok(point) => {
                eprintln!("{}", format_csv_row(&point));
                points.push(point);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code_for(&e));
            }
        }
    }

    if let Err(e) = write_csv(&points, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code_for(&e));
    }
    ExitCode::SUCCESS
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID_CONFIG,
    }
}
