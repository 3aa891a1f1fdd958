//! File formats on disk: binary envelopes, JSON key lists, and the apk cache
//! directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use omsig::groups::codec::HEADER_LEN;
use omsig::oms::{AggregatedPublicKey, OmsParams, OmsPublicKey};
use omsig::sas::SasPublicKey;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Ordered JSON array of base64 public-key envelopes. A missing file reads
/// as the empty list.
pub fn read_list(path: &Path) -> CliResult<Vec<Vec<u8>>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let items: Vec<String> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage("list-format", format!("{}: {e}", path.display())))?;
    items
        .iter()
        .map(|s| {
            B64.decode(s)
                .map_err(|e| CliError::usage("list-format", format!("{}: {e}", path.display())))
        })
        .collect()
}

pub fn write_list(path: &Path, envelopes: &[Vec<u8>]) -> CliResult<()> {
    let items: Vec<String> = envelopes.iter().map(|e| B64.encode(e)).collect();
    let text = serde_json::to_string_pretty(&items).expect("strings");
    write(path, text.as_bytes())
}

pub fn decode_oms_keys(envelopes: &[Vec<u8>]) -> CliResult<Vec<OmsPublicKey>> {
    envelopes
        .iter()
        .enumerate()
        .map(|(i, e)| OmsPublicKey::from_envelope(e).map_err(|err| CliError::decode(format!("list entry {i}"), err)))
        .collect()
}

pub fn decode_sas_keys(envelopes: &[Vec<u8>]) -> CliResult<Vec<SasPublicKey>> {
    envelopes
        .iter()
        .enumerate()
        .map(|(i, e)| SasPublicKey::from_envelope(e).map_err(|err| CliError::decode(format!("list entry {i}"), err)))
        .collect()
}

/// Registered keys, stored in the list format; membership is by canonical
/// key bytes.
pub struct RegistryFile {
    path: PathBuf,
    envelopes: Vec<Vec<u8>>,
    members: HashSet<Vec<u8>>,
}

impl RegistryFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let envelopes = read_list(path)?;
        let members = decode_sas_keys(&envelopes)?
            .iter()
            .map(SasPublicKey::to_bytes)
            .collect();
        Ok(RegistryFile {
            path: path.to_path_buf(),
            envelopes,
            members,
        })
    }

    pub fn contains(&self, pk: &SasPublicKey) -> bool {
        self.members.contains(&pk.to_bytes())
    }

    /// Adds `pk` unless already present. Callers check the secret key first.
    pub fn add(&mut self, pk: &SasPublicKey) -> CliResult<bool> {
        if !self.members.insert(pk.to_bytes()) {
            return Ok(false);
        }
        self.envelopes.push(pk.to_envelope());
        write_list(&self.path, &self.envelopes)?;
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Fails with a rejection naming the first unregistered position.
    pub fn require_all(&self, keys: &[SasPublicKey]) -> CliResult<()> {
        match keys.iter().position(|k| !self.contains(k)) {
            Some(i) => Err(CliError::reject(
                "unregistered",
                format!("key at position {} is not registered", i + 1),
            )),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// On-disk aggregated-key cache: `<sha256>.apk` per ordered list plus a
/// `stats.json` hit counter.
pub struct ApkFileCache {
    dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
}

impl ApkFileCache {
    pub fn open(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(ApkFileCache {
            dir: dir.to_path_buf(),
        })
    }

    /// SHA-256 over the concatenated canonical key bytes, taken straight
    /// from the envelopes so a hit needs no point decoding.
    pub fn digest(envelopes: &[Vec<u8>]) -> String {
        let mut h = Sha256::new();
        for e in envelopes {
            // Envelope header, then a two-byte length prefix, then the points.
            h.update(e.get(HEADER_LEN + 2..).unwrap_or_default());
        }
        hex::encode(h.finalize())
    }

    pub fn stats(&self) -> CacheStats {
        fs::read_to_string(self.dir.join("stats.json"))
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default()
    }

    fn bump(&self, outcome: CacheOutcome) -> CliResult<()> {
        let mut s = self.stats();
        match outcome {
            CacheOutcome::Hit => s.hits += 1,
            CacheOutcome::Miss => s.misses += 1,
        }
        write(&self.dir.join("stats.json"), serde_json::to_string(&s).expect("plain").as_bytes())
    }

    pub fn get_or_compute(
        &self,
        pp: &OmsParams,
        envelopes: &[Vec<u8>],
    ) -> CliResult<(AggregatedPublicKey, CacheOutcome)> {
        let path = self.dir.join(format!("{}.apk", Self::digest(envelopes)));
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(apk) = AggregatedPublicKey::from_envelope(&bytes) {
                self.bump(CacheOutcome::Hit)?;
                return Ok((apk, CacheOutcome::Hit));
            }
        }
        let keys = decode_oms_keys(envelopes)?;
        let apk = crate::oms_cmd::aggregate(pp, &keys)?;
        write(&path, &apk.to_envelope())?;
        self.bump(CacheOutcome::Miss)?;
        Ok((apk, CacheOutcome::Miss))
    }
}

/// Router path description for `oms attest-path`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathManifest {
    pub routers: Vec<RouterEntry>,
    /// Output for the final aggregate; defaults to `sig.bin` beside the
    /// manifest.
    #[serde(default)]
    pub sig: Option<PathBuf>,
    #[serde(default)]
    pub apk: Option<PathBuf>,
    #[serde(default)]
    pub list: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RouterEntry {
    pub id: String,
    /// Key file (secret and public key) the router signs with.
    pub key: PathBuf,
    /// Optional pinned public-key envelope, base64; must match `key`.
    #[serde(default)]
    pub pk: Option<String>,
}

impl PathManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut m: PathManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::usage("manifest-format", format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for r in &mut m.routers {
            resolve(&mut r.key);
        }
        for p in [&mut m.sig, &mut m.apk, &mut m.list, &mut m.report].into_iter().flatten() {
            resolve(p);
        }
        let mut ids = HashSet::new();
        if let Some(r) = m.routers.iter().find(|r| !ids.insert(r.id.as_str())) {
            return Err(CliError::usage("manifest-format", format!("router id {:?} repeated", r.id)));
        }
        Ok(m)
    }

    pub fn pinned_pk(r: &RouterEntry) -> CliResult<Option<Vec<u8>>> {
        r.pk.as_deref()
            .map(|s| {
                B64.decode(s)
                    .map_err(|e| CliError::usage("manifest-format", format!("router {}: {e}", r.id)))
            })
            .transpose()
    }
}
