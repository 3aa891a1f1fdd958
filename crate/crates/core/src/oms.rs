//! Ordered multi-signatures on a common message.
//!
//! Signer `i` signs the pair `(m, i)` under a two-element SAS key, so the
//! position is bound by the exponent. Verification only needs the aggregated
//! key `(K̃₁, K̃₂) = (∏ Ṽ_{i,1}, ∏ Ṽ_{i,2}^i)`:
//!
//! ```text
//! e(A, Ũ · K̃₁^m · K̃₂) · e(B, D̃) = e(C, H̃)
//! ```
//!
//! Byte messages are mapped to scalars with [`encode`]. That hashing step is
//! an application choice and sits outside the standard-model analysis of the
//! scheme; [`sign_append`] and [`verify`] take the scalar directly.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use blstrs::{G2Projective, Scalar};
use ff::Field;
use group::Group;
use rand_core::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groups::codec::{self, DecodeError, Reader, TypeTag, Writer, G2_LEN};
use crate::groups::{self, OMS_TAG};
use crate::sas::{self, SasKeyPair, SasPublicKey, SasSecretKey, SharedParams};
use crate::signature::AggSignature;

pub const DEFAULT_N_MAX: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KaggError {
    #[error("signer list longer than n_max")]
    TooMany,
    #[error("duplicate public key in signer list")]
    Duplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OmsError {
    #[error("message is zero")]
    ZeroMessage,
    #[error("previous aggregate does not verify")]
    PriorInvalid,
    #[error("previous aggregate missing for a non-empty chain")]
    MissingPrior,
    #[error("duplicate public key in signer list")]
    Duplicate,
    #[error("signer position exceeds n_max")]
    TooMany,
    #[error("key is already in the chain")]
    AlreadySigned,
}

impl From<KaggError> for OmsError {
    fn from(e: KaggError) -> Self {
        match e {
            KaggError::TooMany => OmsError::TooMany,
            KaggError::Duplicate => OmsError::Duplicate,
        }
    }
}

/// Shared parameters fixed to `ℓ = 2`, plus the signer cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmsParams {
    pub shared: SharedParams,
    pub n_max: usize,
}

impl OmsParams {
    pub fn setup<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let shared = SharedParams::setup(2, rng).expect("ℓ = 2");
        OmsParams {
            shared,
            n_max: DEFAULT_N_MAX,
        }
    }

    /// Lifts SAS parameters; fails unless `ℓ = 2`.
    pub fn from_shared(shared: SharedParams) -> Option<Self> {
        (shared.ell == 2).then_some(OmsParams {
            shared,
            n_max: DEFAULT_N_MAX,
        })
    }

    /// `n_max` must stay below the group order; any `usize` cap on a
    /// 255-bit group does.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        assert!(n_max >= 1, "n_max must be positive");
        self.n_max = n_max;
        self
    }

    /// Same bytes as the `ℓ = 2` SAS parameters. `n_max` is local policy
    /// and is not serialized.
    pub fn to_envelope(&self) -> Vec<u8> {
        self.shared.to_envelope()
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let shared = SharedParams::from_envelope(bytes)?;
        Self::from_shared(shared).ok_or(DecodeError::Inconsistent)
    }
}

/// `(Ṽ₁, Ṽ₂)`; encodes exactly like an `ℓ = 2` SAS key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmsPublicKey {
    pub v: [G2Projective; 2],
}

impl OmsPublicKey {
    pub fn to_bytes(&self) -> [u8; 2 * G2_LEN] {
        let mut out = [0u8; 2 * G2_LEN];
        out[..G2_LEN].copy_from_slice(&codec::encode_g2(&self.v[0]));
        out[G2_LEN..].copy_from_slice(&codec::encode_g2(&self.v[1]));
        out
    }

    pub fn to_sas(&self) -> SasPublicKey {
        SasPublicKey { v: self.v.to_vec() }
    }

    pub fn from_sas(pk: &SasPublicKey) -> Option<Self> {
        match pk.v.as_slice() {
            [a, b] => Some(OmsPublicKey { v: [*a, *b] }),
            _ => None,
        }
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        self.to_sas().to_envelope()
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        Self::from_sas(&SasPublicKey::from_envelope(bytes)?).ok_or(DecodeError::Inconsistent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmsKeyPair {
    pub pk: OmsPublicKey,
    pub sk: SasSecretKey,
}

impl OmsKeyPair {
    pub fn to_sas(&self) -> SasKeyPair {
        SasKeyPair {
            pk: self.pk.to_sas(),
            sk: self.sk.clone(),
        }
    }

    pub fn from_sas(kp: SasKeyPair) -> Option<Self> {
        let pk = OmsPublicKey::from_sas(&kp.pk)?;
        (kp.sk.len() == 2).then(|| OmsKeyPair { pk, sk: kp.sk.clone() })
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        self.to_sas().to_envelope()
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        Self::from_sas(SasKeyPair::from_envelope(bytes)?).ok_or(DecodeError::Inconsistent)
    }
}

/// Same sampling as SAS key generation at `ℓ = 2`, so a shared seed yields
/// identical keys.
pub fn keygen<R: RngCore + ?Sized>(pp: &OmsParams, rng: &mut R) -> OmsKeyPair {
    OmsKeyPair::from_sas(sas::keygen(&pp.shared, rng)).expect("ℓ = 2")
}

pub fn kverify(pp: &OmsParams, pk: &OmsPublicKey, sk: &SasSecretKey) -> bool {
    sas::kverify(&pp.shared, &pk.to_sas(), sk).unwrap_or(false)
}

/// Aggregated key `(K̃₁, K̃₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AggregatedPublicKey {
    pub k1: G2Projective,
    pub k2: G2Projective,
}

impl AggregatedPublicKey {
    pub fn to_bytes(&self) -> [u8; 2 * G2_LEN] {
        let mut out = [0u8; 2 * G2_LEN];
        out[..G2_LEN].copy_from_slice(&codec::encode_g2(&self.k1));
        out[G2_LEN..].copy_from_slice(&codec::encode_g2(&self.k2));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let apk = AggregatedPublicKey {
            k1: r.g2()?,
            k2: r.g2()?,
        };
        r.finish()?;
        Ok(apk)
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        codec::seal(TypeTag::AggregatedKey, &self.to_bytes())
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        Self::from_bytes(codec::open(bytes, TypeTag::AggregatedKey)?)
    }
}

/// Aggregates an ordered key list.
///
/// `K̃₂ = Σ_i i·Ṽ_{i,2}` is accumulated as the sum of suffix sums, which
/// costs `2n` additions and no scalar multiplications.
pub fn kagg(pp: &OmsParams, keys: &[OmsPublicKey]) -> Result<AggregatedPublicKey, KaggError> {
    if keys.len() > pp.n_max {
        return Err(KaggError::TooMany);
    }
    let mut seen = HashSet::with_capacity(keys.len());
    if keys.iter().any(|k| !seen.insert(k.to_bytes())) {
        return Err(KaggError::Duplicate);
    }
    let mut k1 = G2Projective::identity();
    let mut suffix = G2Projective::identity();
    let mut k2 = G2Projective::identity();
    for k in keys.iter().rev() {
        k1 += k.v[0];
        suffix += k.v[1];
        k2 += suffix;
    }
    Ok(AggregatedPublicKey { k1, k2 })
}

/// `[(m, 1), (m, 2), …, (m, n)]`.
pub fn to_sas_messages(m: &Scalar, n: usize) -> Vec<Vec<Scalar>> {
    (1..=n)
        .map(|i| vec![*m, groups::scalar_from_u64(i as u64)])
        .collect()
}

/// Maps an application message to a scalar under the OMS domain tag.
pub fn encode(msg: &[u8]) -> Scalar {
    groups::encode_message(msg, OMS_TAG)
}

/// Appends the signer at position `|keys| + 1`.
pub fn sign_append<R: RngCore + ?Sized>(
    pp: &OmsParams,
    sk: &SasSecretKey,
    keys: &[OmsPublicKey],
    m: &Scalar,
    prev: Option<&AggSignature>,
    rng: &mut R,
) -> Result<AggSignature, OmsError> {
    if bool::from(m.is_zero()) {
        return Err(OmsError::ZeroMessage);
    }
    let n = keys.len() + 1;
    if n > pp.n_max {
        return Err(OmsError::TooMany);
    }
    let base = if keys.is_empty() {
        pp.shared.base_signature()
    } else {
        let prev = prev.ok_or(OmsError::MissingPrior)?;
        let apk = kagg(pp, keys)?;
        if !verify(pp, &apk, m, prev) {
            return Err(OmsError::PriorInvalid);
        }
        *prev
    };
    let r = groups::sample_nonzero_scalar(rng);
    Ok(sas::fold(&base, sk, &[*m, groups::scalar_from_u64(n as u64)], &r))
}

/// One three-pair product check against the aggregated key.
pub fn verify(pp: &OmsParams, apk: &AggregatedPublicKey, m: &Scalar, sig: &AggSignature) -> bool {
    if bool::from(m.is_zero()) || sig.is_degenerate() {
        return false;
    }
    let p = &pp.shared;
    let w = p.u + apk.k1 * m + apk.k2;
    groups::pairing_product_is_one(&[(sig.a, w), (sig.b, p.d), (-sig.c, p.h)])
}

/// Recomputes the aggregated key from `keys` before verifying.
pub fn verify_with_list(
    pp: &OmsParams,
    keys: &[OmsPublicKey],
    m: &Scalar,
    sig: &AggSignature,
) -> bool {
    match kagg(pp, keys) {
        Ok(apk) => verify(pp, &apk, m, sig),
        Err(_) => false,
    }
}

/// Cache key: SHA-256 over the concatenated key bytes, in order.
pub fn list_digest(keys: &[OmsPublicKey]) -> [u8; 32] {
    let mut h = Sha256::new();
    for k in keys {
        h.update(k.to_bytes());
    }
    h.finalize().into()
}

/// Read-mostly map from ordered key lists to their aggregated keys.
#[derive(Debug, Default)]
pub struct ApkCache {
    map: RwLock<HashMap<[u8; 32], AggregatedPublicKey>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ApkCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &self,
        pp: &OmsParams,
        keys: &[OmsPublicKey],
    ) -> Result<AggregatedPublicKey, KaggError> {
        let digest = list_digest(keys);
        if let Some(apk) = self.map.read().expect("cache lock").get(&digest) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(*apk);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let apk = kagg(pp, keys)?;
        self.map.write().expect("cache lock").insert(digest, apk);
        Ok(apk)
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A signer list, the common message, and the running aggregate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmsChain {
    pub keys: Vec<OmsPublicKey>,
    pub m: Scalar,
    pub sig: Option<AggSignature>,
}

impl OmsChain {
    pub fn new(m: Scalar) -> Self {
        OmsChain {
            keys: Vec::new(),
            m,
            sig: None,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn append<R: RngCore + ?Sized>(
        &mut self,
        pp: &OmsParams,
        signer: &OmsKeyPair,
        rng: &mut R,
    ) -> Result<(), OmsError> {
        if self.keys.contains(&signer.pk) {
            return Err(OmsError::AlreadySigned);
        }
        let sig = sign_append(pp, &signer.sk, &self.keys, &self.m, self.sig.as_ref(), rng)?;
        self.keys.push(signer.pk);
        self.sig = Some(sig);
        Ok(())
    }

    pub fn apk(&self, pp: &OmsParams) -> Result<AggregatedPublicKey, KaggError> {
        kagg(pp, &self.keys)
    }

    pub fn verify(&self, pp: &OmsParams) -> bool {
        match &self.sig {
            Some(sig) => verify_with_list(pp, &self.keys, &self.m, sig),
            None => false,
        }
    }

    /// Layout: `u32 n`, message scalar, `n` key pairs, then the signature
    /// when `n > 0`.
    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend_from_slice(&(self.keys.len() as u32).to_be_bytes());
        p.put_scalar(&self.m);
        for k in &self.keys {
            p.put_g2(&k.v[0]);
            p.put_g2(&k.v[1]);
        }
        if let Some(sig) = &self.sig {
            sig.write(&mut p);
        }
        codec::seal(TypeTag::OmsChain, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::OmsChain)?);
        let n = r.u32()? as usize;
        if n > sas::MAX_CHAIN_LEN {
            return Err(DecodeError::BadLength);
        }
        let m = r.scalar()?;
        let keys = (0..n)
            .map(|_| Ok(OmsPublicKey { v: [r.g2()?, r.g2()?] }))
            .collect::<Result<Vec<_>, DecodeError>>()?;
        let sig = if n == 0 && r.remaining() == 0 {
            None
        } else {
            Some(AggSignature::read(&mut r)?)
        };
        r.finish()?;
        Ok(OmsChain { keys, m, sig })
    }
}
