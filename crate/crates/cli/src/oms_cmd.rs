use std::path::{Path, PathBuf};

use omsig::oms::{self, AggregatedPublicKey, KaggError, OmsError, OmsKeyPair, OmsParams, OmsPublicKey};
use omsig::AggSignature;
use serde::Serialize;
use serde_json::json;

use crate::args::{AttestArgs, KaggArgs, KeygenArgs, OmsAppendArgs, OmsCommand, OmsVerifyArgs};
use crate::error::{CliError, CliResult};
use crate::store::{self, ApkFileCache, CacheOutcome, PathManifest, RegistryFile};
use crate::{b64, load_oms, make_rng, oms_message, Output};

pub(crate) fn run(cmd: OmsCommand, out: &Output) -> CliResult<()> {
    match cmd {
        OmsCommand::Keygen(a) => keygen(a, out),
        OmsCommand::Register(a) => crate::sas_cmd::register(a, Some(2), out),
        OmsCommand::Kagg(a) => kagg(a, out),
        OmsCommand::Append(a) => append(a, out),
        OmsCommand::Verify(a) => verify(a, out),
        OmsCommand::AttestPath(a) => attest_path(a, out),
    }
}

pub fn aggregate(pp: &OmsParams, keys: &[OmsPublicKey]) -> CliResult<AggregatedPublicKey> {
    oms::kagg(pp, keys).map_err(|e| match e {
        KaggError::TooMany => CliError::reject("too-many", format!("{} keys exceed n_max = {}", keys.len(), pp.n_max)),
        KaggError::Duplicate => CliError::reject("duplicate", "duplicate public key in list"),
    })
}

fn oms_error(e: OmsError) -> CliError {
    let tag = match e {
        OmsError::ZeroMessage => "zero-message",
        OmsError::PriorInvalid => "prior-invalid",
        OmsError::MissingPrior => "missing-prior",
        OmsError::Duplicate => "duplicate",
        OmsError::TooMany => "too-many",
        OmsError::AlreadySigned => "already-signed",
    };
    CliError::reject(tag, e.to_string())
}

fn load_keypair(path: &Path) -> CliResult<OmsKeyPair> {
    OmsKeyPair::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))
}

fn load_sig(path: &Path) -> CliResult<AggSignature> {
    AggSignature::from_envelope(&store::read(path)?).map_err(|e| CliError::decode(path.display(), e))
}

fn keygen(a: KeygenArgs, out: &Output) -> CliResult<()> {
    let pp = load_oms(&a.pp, oms::DEFAULT_N_MAX)?;
    let kp = oms::keygen(&pp, &mut make_rng(a.seed));
    store::write(&a.out, &kp.to_envelope())?;
    let pk = kp.pk.to_envelope();
    if let Some(p) = &a.pub_out {
        store::write(p, &pk)?;
    }
    out.emit(
        json!({"key": a.out, "pk": b64(&pk)}),
        format!("wrote {}; pk {}", a.out.display(), b64(&pk)),
    );
    Ok(())
}

fn kagg(a: KaggArgs, out: &Output) -> CliResult<()> {
    let pp = load_oms(&a.pp, a.n_max.n_max)?;
    let keys = store::decode_oms_keys(&store::read_list(&a.list)?)?;
    let apk = aggregate(&pp, &keys)?;
    let bytes = apk.to_envelope();
    store::write(&a.out, &bytes)?;
    out.emit(
        json!({"n": keys.len(), "apk": b64(&bytes), "bytes": apk.to_bytes().len()}),
        format!("aggregated {} keys into {}", keys.len(), a.out.display()),
    );
    Ok(())
}

fn append(a: OmsAppendArgs, out: &Output) -> CliResult<()> {
    if let Some(p) = a.pos {
        return Err(CliError::usage(
            "pos-flag",
            format!("--pos {p} rejected: the position is always |list| + 1 (use --pos-auto)"),
        ));
    }
    let pp = load_oms(&a.pp, a.n_max.n_max)?;
    let kp = load_keypair(&a.key)?;
    let m = oms_message(&a.message)?;
    let mut envelopes = store::read_list(&a.list)?;
    let keys = store::decode_oms_keys(&envelopes)?;
    if let Some(r) = &a.registry {
        let sas_keys: Vec<_> = keys.iter().map(OmsPublicKey::to_sas).collect();
        RegistryFile::load(r)?.require_all(&sas_keys)?;
    }
    if keys.contains(&kp.pk) {
        return Err(oms_error(OmsError::AlreadySigned));
    }
    let prev = if keys.is_empty() { None } else { Some(load_sig(&a.sig)?) };
    let sig = oms::sign_append(&pp, &kp.sk, &keys, &m, prev.as_ref(), &mut make_rng(a.seed))
        .map_err(oms_error)?;
    envelopes.push(kp.pk.to_envelope());
    store::write(&a.sig, &sig.to_envelope())?;
    store::write_list(&a.list, &envelopes)?;
    out.emit(
        json!({"position": envelopes.len(), "sig": b64(&sig.to_envelope())}),
        format!("signed at position {}", envelopes.len()),
    );
    Ok(())
}

fn verify(a: OmsVerifyArgs, out: &Output) -> CliResult<()> {
    let pp = load_oms(&a.pp, a.n_max.n_max)?;
    let m = oms_message(&a.message)?;
    let sig = load_sig(&a.sig)?;
    let mut cache_state = None;
    let apk = match (&a.apk, &a.list) {
        (Some(p), _) => AggregatedPublicKey::from_envelope(&store::read(p)?)
            .map_err(|e| CliError::decode(p.display(), e))?,
        (None, Some(list)) => {
            let envelopes = store::read_list(list)?;
            if let Some(r) = &a.registry {
                let keys = store::decode_sas_keys(&envelopes)?;
                RegistryFile::load(r)?.require_all(&keys)?;
            }
            match &a.cache_dir {
                Some(dir) => {
                    let cache = ApkFileCache::open(dir)?;
                    let (apk, outcome) = cache.get_or_compute(&pp, &envelopes)?;
                    cache_state = Some((outcome, cache.stats()));
                    apk
                }
                None => aggregate(&pp, &store::decode_oms_keys(&envelopes)?)?,
            }
        }
        (None, None) => return Err(CliError::usage("apk", "give --apk or --list")),
    };
    if !oms::verify(&pp, &apk, &m, &sig) {
        return Err(CliError::reject("invalid", "signature does not verify"));
    }
    let cache = cache_state.map(|(o, s)| {
        json!({"outcome": if o == CacheOutcome::Hit { "hit" } else { "miss" }, "hits": s.hits, "misses": s.misses})
    });
    let human = match cache_state {
        Some((o, s)) => format!(
            "valid (apk cache {}; {} hits, {} misses)",
            if o == CacheOutcome::Hit { "hit" } else { "miss" },
            s.hits,
            s.misses
        ),
        None => "valid".to_string(),
    };
    out.emit(json!({"valid": true, "cache": cache}), human);
    Ok(())
}

#[derive(Serialize)]
struct PrefixReport {
    position: usize,
    router: String,
    valid: bool,
}

fn output_path(chosen: &Option<PathBuf>, dir: &Path, name: &str) -> PathBuf {
    chosen.clone().unwrap_or_else(|| dir.join(name))
}

fn attest_path(a: AttestArgs, out: &Output) -> CliResult<()> {
    let pp = load_oms(&a.pp, a.n_max.n_max)?;
    let manifest = PathManifest::load(&a.topology)?;
    if manifest.routers.is_empty() {
        return Err(CliError::usage("manifest-format", "manifest lists no routers"));
    }
    let registry = RegistryFile::load(&a.registry)?;
    let m = oms::encode(&store::read(&a.message)?);

    let mut signers = Vec::with_capacity(manifest.routers.len());
    for r in &manifest.routers {
        let kp = load_keypair(&r.key)?;
        if let Some(pinned) = PathManifest::pinned_pk(r)? {
            if pinned != kp.pk.to_envelope() {
                return Err(CliError::reject("pk-mismatch", format!("router {}: key file does not match pinned pk", r.id)));
            }
        }
        if !registry.contains(&kp.pk.to_sas()) {
            return Err(CliError::reject("unregistered", format!("router {} is not registered", r.id)));
        }
        signers.push(kp);
    }
    let all: Vec<OmsPublicKey> = signers.iter().map(|k| k.pk).collect();
    aggregate(&pp, &all)?;

    let cache = a.cache_dir.as_deref().map(ApkFileCache::open).transpose()?;
    let mut rng = make_rng(a.seed);
    let mut chain = oms::OmsChain::new(m);
    let mut envelopes = Vec::new();
    let mut report = Vec::new();
    for (r, kp) in manifest.routers.iter().zip(&signers) {
        chain.append(&pp, kp, &mut rng).map_err(oms_error)?;
        envelopes.push(kp.pk.to_envelope());
        let apk = match &cache {
            Some(c) => c.get_or_compute(&pp, &envelopes)?.0,
            None => aggregate(&pp, &chain.keys)?,
        };
        let valid = oms::verify(&pp, &apk, &m, chain.sig.as_ref().expect("appended"));
        report.push(PrefixReport {
            position: chain.len(),
            router: r.id.clone(),
            valid,
        });
    }
    let sig = chain.sig.expect("non-empty path");
    let apk = aggregate(&pp, &chain.keys)?;
    let paths = [
        output_path(&manifest.sig, &a.out_dir, "sig.bin"),
        output_path(&manifest.apk, &a.out_dir, "apk.bin"),
        output_path(&manifest.list, &a.out_dir, "list.json"),
        output_path(&manifest.report, &a.out_dir, "report.json"),
    ];
    store::write(&paths[0], &sig.to_envelope())?;
    store::write(&paths[1], &apk.to_envelope())?;
    store::write_list(&paths[2], &envelopes)?;
    let report_json = serde_json::to_string_pretty(&report).expect("plain");
    store::write(&paths[3], report_json.as_bytes())?;

    let failed = report.iter().filter(|p| !p.valid).count();
    if failed > 0 {
        return Err(CliError::reject("invalid", format!("{failed} prefixes failed to verify")));
    }
    out.emit(
        json!({
            "routers": report.len(),
            "prefixes": report,
            "sig": paths[0],
            "apk": paths[1],
            "list": paths[2],
            "report": paths[3],
        }),
        format!("attested {} hops; every prefix verifies", report.len()),
    );
    Ok(())
}
