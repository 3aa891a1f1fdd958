//! Library side of the `omsig` command-line tool.

pub mod args;
pub mod bench;
pub mod error;
mod game_cmd;
pub mod oms_cmd;
mod sas_cmd;
pub mod store;

use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use blstrs::Scalar;
use omsig::groups::{self, codec, SAS_TAG};
use omsig::oms::{self, OmsParams};
use omsig::sas::SharedParams;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use args::{Cli, Command, MessageArgs, SeedArg};
use error::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    let out = Output { json: cli.json };
    match cli.command {
        Command::Setup(a) => {
            let mut rng = make_rng(a.seed);
            let pp = SharedParams::setup(a.ell, &mut rng)
                .map_err(|e| CliError::usage("ell", e.to_string()))?;
            let bytes = pp.to_envelope();
            store::write(&a.out, &bytes)?;
            out.emit(
                json!({"pp": a.out, "ell": a.ell, "bytes": bytes.len()}),
                format!("wrote {} ({} bytes, ℓ = {})", a.out.display(), bytes.len(), a.ell),
            );
            Ok(())
        }
        Command::Sas(c) => sas_cmd::run(c, &out),
        Command::Oms(c) => oms_cmd::run(c, &out),
        Command::Bench(a) => bench::run(a, &out),
        Command::Harness(c) => game_cmd::run(c, &out),
    }
}

/// Where results go: one JSON object, or one human line.
pub struct Output {
    pub json: bool,
}

impl Output {
    pub fn emit(&self, value: Value, human: String) {
        if self.json {
            println!("{value}");
        } else {
            println!("{human}");
        }
    }
}

pub(crate) fn make_rng(seed: SeedArg) -> ChaCha20Rng {
    match seed.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

pub(crate) fn b64(bytes: &[u8]) -> String {
    B64.encode(bytes)
}

pub(crate) fn load_shared(path: &Path) -> CliResult<SharedParams> {
    SharedParams::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))
}

pub(crate) fn load_oms(path: &Path, n_max: usize) -> CliResult<OmsParams> {
    if n_max == 0 {
        return Err(CliError::usage("n-max", "--n-max must be positive"));
    }
    let pp = OmsParams::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))?;
    Ok(pp.with_n_max(n_max))
}

/// Decimal `u64`, or `0x` followed by up to 64 big-endian hex digits.
pub fn parse_scalar(s: &str) -> CliResult<Scalar> {
    if let Some(h) = s.strip_prefix("0x") {
        if h.is_empty() || h.len() > 64 {
            return Err(CliError::usage("scalar", format!("{s:?}: expected 1 to 64 hex digits")));
        }
        let padded = format!("{h:0>64}");
        let mut be = hex::decode(&padded).map_err(|e| CliError::usage("scalar", format!("{s:?}: {e}")))?;
        be.reverse();
        return codec::decode_scalar(&be).map_err(|e| CliError::decode(format!("scalar {s:?}"), e));
    }
    s.parse::<u64>()
        .map(groups::scalar_from_u64)
        .map_err(|_| CliError::usage("scalar", format!("{s:?}: expected decimal or 0x-hex")))
}

fn message_bytes(m: &MessageArgs) -> CliResult<Vec<Vec<u8>>> {
    if let Some(p) = &m.msg_file {
        return Ok(vec![store::read(p)?]);
    }
    if m.msg.is_empty() {
        return Err(CliError::usage("message", "give --msg or --msg-file"));
    }
    Ok(m.msg.iter().map(|s| s.as_bytes().to_vec()).collect())
}

/// The common message of an ordered multi-signature.
pub(crate) fn oms_message(m: &MessageArgs) -> CliResult<Scalar> {
    if m.raw_scalar {
        if m.msg.len() != 1 {
            return Err(CliError::usage("message", "--raw-scalar takes exactly one --msg"));
        }
        return parse_scalar(&m.msg[0]);
    }
    let parts = message_bytes(m)?;
    if parts.len() != 1 {
        return Err(CliError::usage("message", "give exactly one --msg"));
    }
    Ok(oms::encode(&parts[0]))
}

/// A vector message: coordinate `j` hashes the `j`-th `--msg` (or the
/// single one given) together with `j`.
pub(crate) fn sas_message(m: &MessageArgs, ell: usize) -> CliResult<Vec<Scalar>> {
    if m.raw_scalar {
        if m.msg.len() != ell {
            return Err(CliError::usage(
                "message",
                format!("--raw-scalar needs {ell} --msg values, got {}", m.msg.len()),
            ));
        }
        return m.msg.iter().map(|s| parse_scalar(s)).collect();
    }
    let parts = message_bytes(m)?;
    if parts.len() != 1 && parts.len() != ell {
        return Err(CliError::usage(
            "message",
            format!("give 1 or {ell} --msg values, got {}", parts.len()),
        ));
    }
    Ok((0..ell)
        .map(|j| {
            let mut b = parts[if parts.len() == 1 { 0 } else { j }].clone();
            b.extend_from_slice(&(j as u32).to_be_bytes());
            groups::encode_message(&b, SAS_TAG)
        })
        .collect())
}
