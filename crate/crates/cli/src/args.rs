use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "omsig", version, about = "Ordered multi-signatures and sequential aggregate signatures")]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate public parameters.
    Setup(SetupArgs),
    /// Sequential aggregate signatures on vectors.
    #[command(subcommand)]
    Sas(SasCommand),
    /// Ordered multi-signatures on one message.
    #[command(subcommand)]
    Oms(OmsCommand),
    /// Sizes, pairing counts and timings per scheme.
    Bench(BenchArgs),
    /// Scripted security games.
    #[command(subcommand)]
    Harness(HarnessCommand),
}

#[derive(Args, Debug)]
pub struct SetupArgs {
    /// Vector length; ordered multi-signatures need 2.
    #[arg(long, default_value_t = 2)]
    pub ell: usize,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SeedArg {
    /// Deterministic randomness, for tests and pinned vectors only.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct MessageArgs {
    /// Message bytes given literally. Repeat to give one value per
    /// coordinate.
    #[arg(long = "msg", value_name = "TEXT")]
    pub msg: Vec<String>,
    /// Message bytes read from a file.
    #[arg(long = "msg-file", value_name = "PATH", conflicts_with = "msg")]
    pub msg_file: Option<PathBuf>,
    /// Treat each --msg as a scalar: decimal, or 0x-prefixed big-endian hex.
    #[arg(long)]
    pub raw_scalar: bool,
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    /// Key file (secret and public key).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Also write the public-key envelope here.
    #[arg(long = "pub", value_name = "PATH")]
    pub pub_out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug)]
pub struct RegisterArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub key: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub registry: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum SasCommand {
    Keygen(KeygenArgs),
    Register(RegisterArgs),
    /// Append a signature to a chain file, creating it if missing.
    Append(SasAppendArgs),
    Verify(SasVerifyArgs),
}

#[derive(Args, Debug)]
pub struct SasAppendArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub key: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub chain: PathBuf,
    #[command(flatten)]
    pub message: MessageArgs,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug)]
pub struct SasVerifyArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub chain: PathBuf,
    /// Require every signer in the chain to be registered here.
    #[arg(long, value_name = "PATH")]
    pub registry: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum OmsCommand {
    Keygen(KeygenArgs),
    Register(RegisterArgs),
    /// Aggregate an ordered key list.
    Kagg(KaggArgs),
    /// Append the next signer; its position is |list| + 1.
    Append(OmsAppendArgs),
    Verify(OmsVerifyArgs),
    /// Sign along a router path and verify every prefix.
    AttestPath(AttestArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct NMaxArg {
    #[arg(long = "n-max", default_value_t = omsig::oms::DEFAULT_N_MAX)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct KaggArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub list: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub n_max: NMaxArg,
}

#[derive(Args, Debug)]
pub struct OmsAppendArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub key: PathBuf,
    /// Signer list so far; updated in place.
    #[arg(long, value_name = "PATH")]
    pub list: PathBuf,
    /// Aggregate so far; updated in place.
    #[arg(long, value_name = "PATH")]
    pub sig: PathBuf,
    #[command(flatten)]
    pub message: MessageArgs,
    /// Derive the position from the list length (the only mode).
    #[arg(long)]
    pub pos_auto: bool,
    /// Rejected: positions are never caller-supplied.
    #[arg(long, hide = true)]
    pub pos: Option<u64>,
    /// Require cosigners already in the list to be registered.
    #[arg(long, value_name = "PATH")]
    pub registry: Option<PathBuf>,
    #[command(flatten)]
    pub n_max: NMaxArg,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug)]
pub struct OmsVerifyArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    /// Verify against a precomputed aggregated key.
    #[arg(long, value_name = "PATH", required_unless_present = "list", conflicts_with = "list")]
    pub apk: Option<PathBuf>,
    /// Verify against an ordered list, aggregating it first.
    #[arg(long, value_name = "PATH")]
    pub list: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub sig: PathBuf,
    #[command(flatten)]
    pub message: MessageArgs,
    /// Reuse aggregated keys across runs (with --list).
    #[arg(long, value_name = "DIR", requires = "list")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_name = "PATH", requires = "list")]
    pub registry: Option<PathBuf>,
    #[command(flatten)]
    pub n_max: NMaxArg,
}

#[derive(Args, Debug)]
pub struct AttestArgs {
    #[arg(long, value_name = "PATH")]
    pub pp: PathBuf,
    /// JSON manifest: ordered routers with key files, optional outputs.
    #[arg(long, value_name = "PATH")]
    pub topology: PathBuf,
    /// Packet bytes to attest.
    #[arg(long, value_name = "PATH")]
    pub message: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub registry: PathBuf,
    /// Directory for outputs the manifest does not name.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    #[command(flatten)]
    pub n_max: NMaxArg,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Chain lengths to measure.
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    pub n: Vec<usize>,
    /// Repetitions per timing.
    #[arg(short, long, default_value_t = 100)]
    pub k: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Subcommand, Debug)]
pub enum HarnessCommand {
    /// Run one EUF-CMA game and print its audit log.
    Run(HarnessRunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Ds,
    Sas,
    Oms,
}

#[derive(Args, Debug)]
pub struct HarnessRunArgs {
    #[arg(long)]
    pub strategy: String,
    #[arg(long, value_enum, default_value = "oms")]
    pub scheme: SchemeArg,
    /// Vector length for ds and sas.
    #[arg(long, default_value_t = 2)]
    pub ell: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the full replayable transcript here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
