use omsig::sas::{self, SasChain, SasError, SasKeyPair};
use omsig::AggSignature;
use serde_json::json;

use crate::args::{KeygenArgs, RegisterArgs, SasAppendArgs, SasCommand, SasVerifyArgs};
use crate::error::{CliError, CliResult};
use crate::store::{self, RegistryFile};
use crate::{b64, load_shared, make_rng, sas_message, Output};

pub(crate) fn run(cmd: SasCommand, out: &Output) -> CliResult<()> {
    match cmd {
        SasCommand::Keygen(a) => keygen(a, out),
        SasCommand::Register(a) => register(a, None, out),
        SasCommand::Append(a) => append(a, out),
        SasCommand::Verify(a) => verify(a, out),
    }
}

fn keygen(a: KeygenArgs, out: &Output) -> CliResult<()> {
    let pp = load_shared(&a.pp)?;
    let kp = sas::keygen(&pp, &mut make_rng(a.seed));
    store::write(&a.out, &kp.to_envelope())?;
    let pk = kp.pk.to_envelope();
    if let Some(p) = &a.pub_out {
        store::write(p, &pk)?;
    }
    out.emit(
        json!({"key": a.out, "pk": b64(&pk), "ell": pp.ell}),
        format!("wrote {}; pk {}", a.out.display(), b64(&pk)),
    );
    Ok(())
}

pub(crate) fn load_keypair(path: &std::path::Path) -> CliResult<SasKeyPair> {
    SasKeyPair::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))
}

/// Shared by both schemes; `oms_ell` pins the vector length for the
/// ordered variant.
pub(crate) fn register(a: RegisterArgs, oms_ell: Option<usize>, out: &Output) -> CliResult<()> {
    let pp = load_shared(&a.pp)?;
    if let Some(ell) = oms_ell.filter(|&e| e != pp.ell) {
        return Err(CliError::usage("ell", format!("parameters have ℓ = {}, need {ell}", pp.ell)));
    }
    let kp = load_keypair(&a.key)?;
    match sas::kverify(&pp, &kp.pk, &kp.sk) {
        Ok(true) => {}
        Ok(false) => return Err(CliError::reject("kverify", "secret key does not match public key")),
        Err(e) => return Err(CliError::reject("kverify", e.to_string())),
    }
    let mut reg = RegistryFile::load(&a.registry)?;
    let added = reg.add(&kp.pk)?;
    out.emit(
        json!({"registered": true, "new": added, "size": reg.len()}),
        format!(
            "registered{} ({} keys)",
            if added { "" } else { " (already present)" },
            reg.len()
        ),
    );
    Ok(())
}

pub(crate) fn sas_error(e: SasError) -> CliError {
    let tag = match e {
        SasError::ZeroMessage => "zero-message",
        SasError::LengthMismatch { .. } => "length-mismatch",
        SasError::PriorInvalid => "prior-invalid",
        SasError::MissingPrior => "missing-prior",
        SasError::DuplicateKey => "duplicate",
        SasError::TooMany => "too-many",
        SasError::EmptyVector => "ell",
    };
    CliError::reject(tag, e.to_string())
}

fn load_chain(path: &std::path::Path) -> CliResult<SasChain> {
    if !path.exists() {
        return Ok(SasChain::new());
    }
    SasChain::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))
}

fn append(a: SasAppendArgs, out: &Output) -> CliResult<()> {
    let pp = load_shared(&a.pp)?;
    let kp = load_keypair(&a.key)?;
    let m = sas_message(&a.message, pp.ell)?;
    let mut chain = load_chain(&a.chain)?;
    chain
        .append(&pp, &kp, m, &mut make_rng(a.seed))
        .map_err(sas_error)?;
    store::write(&a.chain, &chain.to_envelope())?;
    let sig = chain.sig.map(|s| b64(&s.to_envelope())).unwrap_or_default();
    out.emit(
        json!({"n": chain.len(), "sig": sig}),
        format!("appended signer {}; chain written to {}", chain.len(), a.chain.display()),
    );
    Ok(())
}

fn verify(a: SasVerifyArgs, out: &Output) -> CliResult<()> {
    let pp = load_shared(&a.pp)?;
    let chain = load_chain(&a.chain)?;
    if let Some(r) = &a.registry {
        RegistryFile::load(r)?.require_all(&chain.keys)?;
    }
    let sig = chain.sig.unwrap_or_else(|| pp.base_signature());
    let valid = sas::verify(&pp, &chain.keys, &chain.msgs, &sig);
    report(valid, chain.len(), &sig, out)
}

fn report(valid: bool, n: usize, sig: &AggSignature, out: &Output) -> CliResult<()> {
    if !valid {
        return Err(CliError::reject("invalid", format!("aggregate over {n} signers does not verify")));
    }
    out.emit(
        json!({"valid": true, "n": n, "sig": b64(&sig.to_envelope())}),
        format!("valid ({n} signers)"),
    );
    Ok(())
}
