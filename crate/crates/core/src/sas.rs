//! Sequential aggregate signatures on vectors in `(Z_p^*)^ℓ`.
//!
//! The shared elements `(X₁, X₂, H̃, D̃, Ũ)` of the base scheme move into the
//! public parameters, so every signer's key is only `(Ṽ_j)_{j∈[ℓ]}`. A chain
//! starts from `(G, X₁, X₂)`; signer `n` re-randomises the running aggregate
//! while folding in its own message:
//!
//! ```text
//! A_n = A_{n-1}^r
//! B_n = (B_{n-1} · A_{n-1}^{Σ_j m_{n,j} y_{n,j,1}})^r
//! C_n = (C_{n-1} · A_{n-1}^{Σ_j m_{n,j} y_{n,j,2}})^r
//! ```
//!
//! and the final aggregate verifies with one three-term pairing product
//! `e(A, Ũ ∏_i ∏_j Ṽ_{i,j}^{m_{i,j}}) · e(B, D̃) = e(C, H̃)`.

use std::collections::HashSet;

use blstrs::{G1Projective, G2Projective, Scalar};
use ff::Field;
use group::Group;
use rand_core::RngCore;
use thiserror::Error;

use crate::groups::codec::{self, DecodeError, Reader, TypeTag, Writer, G2_LEN};
use crate::groups::{self, CurveId, GroupDesc};
use crate::signature::AggSignature;

/// Upper bound on the number of signers in one chain.
pub const MAX_CHAIN_LEN: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SasError {
    #[error("message contains a zero coordinate")]
    ZeroMessage,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("previous aggregate does not verify")]
    PriorInvalid,
    #[error("previous aggregate missing for a non-empty chain")]
    MissingPrior,
    #[error("duplicate public key in signer list")]
    DuplicateKey,
    #[error("signer list exceeds {MAX_CHAIN_LEN} entries")]
    TooMany,
    #[error("vector length must be at least 1")]
    EmptyVector,
}

/// Public parameters shared by every signer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedParams {
    pub group: GroupDesc,
    pub ell: usize,
    pub g: G1Projective,
    pub g_tilde: G2Projective,
    pub x1: G1Projective,
    pub x2: G1Projective,
    pub h: G2Projective,
    pub d: G2Projective,
    pub u: G2Projective,
}

/// Setup scalars `(d, x₁, x₂)`. Only escapes this module through the
/// security harness.
pub(crate) struct SetupSecrets {
    pub d: Scalar,
    pub x1: Scalar,
    pub x2: Scalar,
}

impl Drop for SetupSecrets {
    fn drop(&mut self) {
        groups::wipe_scalar(&mut self.d);
        groups::wipe_scalar(&mut self.x1);
        groups::wipe_scalar(&mut self.x2);
    }
}

impl SharedParams {
    pub fn setup<R: RngCore + ?Sized>(ell: usize, rng: &mut R) -> Result<Self, SasError> {
        Self::setup_with_secrets(ell, rng).map(|(pp, _)| pp)
    }

    pub(crate) fn setup_with_secrets<R: RngCore + ?Sized>(
        ell: usize,
        rng: &mut R,
    ) -> Result<(Self, SetupSecrets), SasError> {
        if ell == 0 {
            return Err(SasError::EmptyVector);
        }
        let g = groups::sample_g1_star(rng);
        let g_tilde = groups::sample_g2_star(rng);
        let secrets = SetupSecrets {
            d: groups::sample_nonzero_scalar(rng),
            x1: groups::sample_nonzero_scalar(rng),
            x2: groups::sample_nonzero_scalar(rng),
        };
        let h = groups::sample_g2_star(rng);
        let pp = SharedParams {
            group: GroupDesc::default(),
            ell,
            g,
            g_tilde,
            x1: g * secrets.x1,
            x2: g * secrets.x2,
            h,
            d: h * secrets.d,
            u: h * (secrets.x2 - secrets.d * secrets.x1),
        };
        Ok((pp, secrets))
    }

    /// Publicly checkable relation `e(G, Ũ) · e(X₁, D̃) = e(X₂, H̃)`, plus
    /// non-identity of the generators.
    pub fn is_consistent(&self) -> bool {
        self.ell >= 1
            && !bool::from(self.g.is_identity())
            && !bool::from(self.g_tilde.is_identity())
            && !bool::from(self.h.is_identity())
            && groups::pairing_product_is_one(&[
                (self.g, self.u),
                (self.x1, self.d),
                (-self.x2, self.h),
            ])
    }

    /// The empty-chain aggregate `(G, X₁, X₂)`.
    pub fn base_signature(&self) -> AggSignature {
        AggSignature::new(self.g, self.x1, self.x2)
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = vec![self.group.curve as u8];
        p.extend_from_slice(&(self.ell as u16).to_be_bytes());
        p.put_g1(&self.g);
        p.put_g2(&self.g_tilde);
        p.put_g1(&self.x1);
        p.put_g1(&self.x2);
        p.put_g2(&self.h);
        p.put_g2(&self.d);
        p.put_g2(&self.u);
        codec::seal(TypeTag::Params, &p)
    }

    /// Decodes and checks the consistency relation.
    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::Params)?);
        let curve = CurveId::from_byte(r.u8()?).ok_or(DecodeError::UnknownCurve)?;
        let ell = r.u16()? as usize;
        let pp = SharedParams {
            group: GroupDesc { curve },
            ell,
            g: r.g1()?,
            g_tilde: r.g2()?,
            x1: r.g1()?,
            x2: r.g1()?,
            h: r.g2()?,
            d: r.g2()?,
            u: r.g2()?,
        };
        r.finish()?;
        if !pp.is_consistent() {
            return Err(DecodeError::Inconsistent);
        }
        Ok(pp)
    }
}

/// Public key `(Ṽ_j)_{j∈[ℓ]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SasPublicKey {
    pub v: Vec<G2Projective>,
}

impl SasPublicKey {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Concatenated compressed points; the canonical identity of the key.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.v.len() * G2_LEN);
        for v in &self.v {
            out.put_g2(v);
        }
        out
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let ell = r.u16()? as usize;
        if ell == 0 {
            return Err(DecodeError::Inconsistent);
        }
        let v = (0..ell).map(|_| r.g2()).collect::<Result<Vec<_>, _>>()?;
        Ok(SasPublicKey { v })
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.v.len() as u16).to_be_bytes());
        for v in &self.v {
            out.put_g2(v);
        }
    }

    /// Envelope with `ℓ` as a two-byte prefix of the payload.
    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        self.write(&mut p);
        codec::seal(TypeTag::PublicKey, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::PublicKey)?);
        let pk = Self::read(&mut r)?;
        r.finish()?;
        Ok(pk)
    }
}

/// Secret key `(y_{j,1}, y_{j,2})_{j∈[ℓ]}`; wiped on drop.
#[derive(Clone, PartialEq, Eq)]
pub struct SasSecretKey {
    pub y: Vec<(Scalar, Scalar)>,
}

impl std::fmt::Debug for SasSecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SasSecretKey").field("ell", &self.y.len()).finish_non_exhaustive()
    }
}

impl Drop for SasSecretKey {
    fn drop(&mut self) {
        for (a, b) in self.y.iter_mut() {
            groups::wipe_scalar(a);
            groups::wipe_scalar(b);
        }
    }
}

impl SasSecretKey {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `(Σ_j m_j y_{j,1}, Σ_j m_j y_{j,2})`.
    pub fn exponents(&self, m: &[Scalar]) -> (Scalar, Scalar) {
        self.y
            .iter()
            .zip(m)
            .fold((Scalar::ZERO, Scalar::ZERO), |(e1, e2), ((y1, y2), mj)| {
                (e1 + mj * y1, e2 + mj * y2)
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SasKeyPair {
    pub pk: SasPublicKey,
    pub sk: SasSecretKey,
}

impl SasKeyPair {
    /// Key file: `ℓ`, the secret pairs, then the public points.
    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend_from_slice(&(self.sk.y.len() as u16).to_be_bytes());
        for (a, b) in &self.sk.y {
            p.put_scalar(a);
            p.put_scalar(b);
        }
        for v in &self.pk.v {
            p.put_g2(v);
        }
        codec::seal(TypeTag::SecretKey, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::SecretKey)?);
        let ell = r.u16()? as usize;
        if ell == 0 {
            return Err(DecodeError::Inconsistent);
        }
        let y = (0..ell)
            .map(|_| Ok((r.scalar()?, r.scalar()?)))
            .collect::<Result<Vec<_>, DecodeError>>()?;
        let v = (0..ell).map(|_| r.g2()).collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Ok(SasKeyPair {
            pk: SasPublicKey { v },
            sk: SasSecretKey { y },
        })
    }
}

fn derive_v(pp: &SharedParams, y1: &Scalar, y2: &Scalar) -> G2Projective {
    pp.h * y2 - pp.d * y1
}

pub fn keygen<R: RngCore + ?Sized>(pp: &SharedParams, rng: &mut R) -> SasKeyPair {
    let y: Vec<(Scalar, Scalar)> = (0..pp.ell)
        .map(|_| {
            (
                groups::sample_nonzero_scalar(rng),
                groups::sample_nonzero_scalar(rng),
            )
        })
        .collect();
    let v = y.iter().map(|(y1, y2)| derive_v(pp, y1, y2)).collect();
    SasKeyPair {
        pk: SasPublicKey { v },
        sk: SasSecretKey { y },
    }
}

/// Checks `Ṽ_j = H̃^{y_{j,2}} (D̃^{y_{j,1}})^{-1}` for all `j`.
pub fn kverify(pp: &SharedParams, pk: &SasPublicKey, sk: &SasSecretKey) -> Result<bool, SasError> {
    if pk.len() != pp.ell || sk.len() != pp.ell {
        return Err(SasError::LengthMismatch {
            expected: pp.ell,
            got: if pk.len() != pp.ell { pk.len() } else { sk.len() },
        });
    }
    let ok = sk.y.iter().all(|(y1, y2)| !bool::from(y1.is_zero()) && !bool::from(y2.is_zero()))
        && pk
            .v
            .iter()
            .zip(&sk.y)
            .all(|(v, (y1, y2))| *v == derive_v(pp, y1, y2));
    Ok(ok)
}

fn has_zero(m: &[Scalar]) -> bool {
    m.iter().any(|x| bool::from(x.is_zero()))
}

/// True if two entries of `keys` have the same canonical encoding.
pub fn has_duplicates(keys: &[SasPublicKey]) -> bool {
    let mut seen = HashSet::with_capacity(keys.len());
    keys.iter().any(|k| !seen.insert(k.to_bytes()))
}

/// Appends signer `n = |keys| + 1` to the aggregate of `keys`/`msgs`.
///
/// On an empty chain `prev` is ignored and the chain starts from
/// `(G, X₁, X₂)`; otherwise `prev` must verify and `keys` must be distinct.
pub fn sign_append<R: RngCore + ?Sized>(
    pp: &SharedParams,
    sk: &SasSecretKey,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
    m: &[Scalar],
    prev: Option<&AggSignature>,
    rng: &mut R,
) -> Result<AggSignature, SasError> {
    if m.len() != pp.ell || sk.len() != pp.ell {
        return Err(SasError::LengthMismatch {
            expected: pp.ell,
            got: if m.len() != pp.ell { m.len() } else { sk.len() },
        });
    }
    if has_zero(m) {
        return Err(SasError::ZeroMessage);
    }
    if keys.len() >= MAX_CHAIN_LEN {
        return Err(SasError::TooMany);
    }
    let base = if keys.is_empty() {
        pp.base_signature()
    } else {
        let prev = prev.ok_or(SasError::MissingPrior)?;
        if !verify(pp, keys, msgs, prev) {
            return Err(SasError::PriorInvalid);
        }
        if has_duplicates(keys) {
            return Err(SasError::DuplicateKey);
        }
        *prev
    };
    let r = groups::sample_nonzero_scalar(rng);
    Ok(fold(&base, sk, m, &r))
}

/// The aggregation step itself, with the nonce supplied.
pub(crate) fn fold(
    prev: &AggSignature,
    sk: &SasSecretKey,
    m: &[Scalar],
    r: &Scalar,
) -> AggSignature {
    let (mut e1, mut e2) = sk.exponents(m);
    let out = AggSignature::new(
        prev.a * r,
        (prev.b + prev.a * e1) * r,
        (prev.c + prev.a * e2) * r,
    );
    groups::wipe_scalar(&mut e1);
    groups::wipe_scalar(&mut e2);
    out
}

/// `Ũ · ∏_i ∏_j Ṽ_{i,j}^{m_{i,j}}`, assuming shapes were already checked.
pub(crate) fn message_point(
    pp: &SharedParams,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
) -> G2Projective {
    let points: Vec<G2Projective> = keys.iter().flat_map(|k| k.v.iter().copied()).collect();
    let scalars: Vec<Scalar> = msgs.iter().flat_map(|m| m.iter().copied()).collect();
    pp.u + groups::g2_msm(&points, &scalars)
}

/// Shape and message-space checks shared by verification and the harness.
pub(crate) fn well_formed(pp: &SharedParams, keys: &[SasPublicKey], msgs: &[Vec<Scalar>]) -> bool {
    keys.len() == msgs.len()
        && keys.len() <= MAX_CHAIN_LEN
        && keys.iter().all(|k| k.len() == pp.ell)
        && msgs.iter().all(|m| m.len() == pp.ell && !has_zero(m))
}

/// Verifies an aggregate with exactly one three-pair product check.
pub fn verify(
    pp: &SharedParams,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
    sig: &AggSignature,
) -> bool {
    if !well_formed(pp, keys, msgs) || sig.is_degenerate() {
        return false;
    }
    let w = message_point(pp, keys, msgs);
    groups::pairing_product_is_one(&[(sig.a, w), (sig.b, pp.d), (-sig.c, pp.h)])
}

/// An aggregate together with the signer list and messages it covers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SasChain {
    pub keys: Vec<SasPublicKey>,
    pub msgs: Vec<Vec<Scalar>>,
    pub sig: Option<AggSignature>,
}

impl SasChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Signs as the next signer and pushes the key and message.
    ///
    /// Also refuses a signer whose key is already in the chain, which the
    /// bare signing algorithm would only catch one hop later.
    pub fn append<R: RngCore + ?Sized>(
        &mut self,
        pp: &SharedParams,
        signer: &SasKeyPair,
        m: Vec<Scalar>,
        rng: &mut R,
    ) -> Result<(), SasError> {
        if self.keys.contains(&signer.pk) {
            return Err(SasError::DuplicateKey);
        }
        let sig = sign_append(pp, &signer.sk, &self.keys, &self.msgs, &m, self.sig.as_ref(), rng)?;
        self.keys.push(signer.pk.clone());
        self.msgs.push(m);
        self.sig = Some(sig);
        Ok(())
    }

    pub fn verify(&self, pp: &SharedParams) -> bool {
        match &self.sig {
            Some(sig) => verify(pp, &self.keys, &self.msgs, sig),
            None => false,
        }
    }

    /// Layout: `u32 n`, `u16 ℓ`, then `n` keys, `n·ℓ` scalars, and the
    /// signature (absent only when `n = 0`).
    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend_from_slice(&(self.keys.len() as u32).to_be_bytes());
        let ell = self.msgs.first().map_or(0, |m| m.len());
        p.extend_from_slice(&(ell as u16).to_be_bytes());
        for k in &self.keys {
            k.write(&mut p);
        }
        for m in &self.msgs {
            for x in m {
                p.put_scalar(x);
            }
        }
        if let Some(sig) = &self.sig {
            sig.write(&mut p);
        }
        codec::seal(TypeTag::SasChain, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::SasChain)?);
        let n = r.u32()? as usize;
        let ell = r.u16()? as usize;
        if n > MAX_CHAIN_LEN {
            return Err(DecodeError::BadLength);
        }
        let keys = (0..n)
            .map(|_| SasPublicKey::read(&mut r))
            .collect::<Result<Vec<_>, _>>()?;
        let msgs = (0..n)
            .map(|_| (0..ell).map(|_| r.scalar()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let sig = if r.remaining() == 0 && n == 0 {
            None
        } else {
            Some(AggSignature::read(&mut r)?)
        };
        r.finish()?;
        Ok(SasChain { keys, msgs, sig })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::pairing_count;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn msg(r: &mut ChaCha20Rng, ell: usize) -> Vec<Scalar> {
        (0..ell).map(|_| groups::sample_nonzero_scalar(r)).collect()
    }

    #[test]
    fn setup_satisfies_consistency_relation() {
        let mut r = rng(1);
        let pp = SharedParams::setup(2, &mut r).unwrap();
        assert!(pp.is_consistent());
        let env = pp.to_envelope();
        // header, curve id, ℓ, G X₁ X₂, G̃ H̃ D̃ Ũ
        assert_eq!(env.len(), 6 + 1 + 2 + 3 * 48 + 4 * 96);
        assert_eq!(SharedParams::from_envelope(&env).unwrap(), pp);
        assert_eq!(SharedParams::setup(0, &mut r), Err(SasError::EmptyVector));
    }

    #[test]
    fn tampered_params_fail_to_load() {
        let mut r = rng(2);
        let mut pp = SharedParams::setup(1, &mut r).unwrap();
        pp.x1 = groups::sample_g1_star(&mut r);
        assert!(!pp.is_consistent());
        assert_eq!(
            SharedParams::from_envelope(&pp.to_envelope()),
            Err(DecodeError::Inconsistent)
        );
    }

    #[test]
    fn keygen_and_kverify() {
        let mut r = rng(3);
        let pp = SharedParams::setup(2, &mut r).unwrap();
        let kp = keygen(&pp, &mut r);
        assert_eq!(kp.pk.len(), 2);
        assert!(kverify(&pp, &kp.pk, &kp.sk).unwrap());

        let mut bumped = kp.sk.clone();
        bumped.y[0].0 += Scalar::ONE;
        assert!(!kverify(&pp, &kp.pk, &bumped).unwrap());

        let swapped = SasPublicKey {
            v: vec![kp.pk.v[1], kp.pk.v[0]],
        };
        assert!(!kverify(&pp, &swapped, &kp.sk).unwrap());

        let short = SasPublicKey { v: vec![kp.pk.v[0]] };
        assert!(kverify(&pp, &short, &kp.sk).is_err());

        let pp1 = SharedParams::setup(1, &mut r).unwrap();
        assert_eq!(keygen(&pp1, &mut r).pk.to_bytes().len(), 96);
    }

    #[test]
    fn keys_under_one_setup_are_distinct() {
        let mut r = rng(4);
        let pp = SharedParams::setup(1, &mut r).unwrap();
        let keys: Vec<_> = (0..100).map(|_| keygen(&pp, &mut r).pk).collect();
        assert!(!has_duplicates(&keys));
    }

    #[test]
    fn single_signer_and_pairing_count() {
        let mut r = rng(5);
        let pp = SharedParams::setup(1, &mut r).unwrap();
        let kp = keygen(&pp, &mut r);
        let mut chain = SasChain::new();
        chain.append(&pp, &kp, msg(&mut r, 1), &mut r).unwrap();
        let before = pairing_count();
        assert!(chain.verify(&pp));
        assert_eq!(pairing_count() - before, 3);
    }

    #[test]
    fn five_signer_chain_verifies_at_every_prefix() {
        let mut r = rng(6);
        let pp = SharedParams::setup(2, &mut r).unwrap();
        let mut chain = SasChain::new();
        for i in 0..5 {
            let kp = keygen(&pp, &mut r);
            chain.append(&pp, &kp, msg(&mut r, 2), &mut r).unwrap();
            assert!(chain.verify(&pp), "prefix {}", i + 1);
        }
    }

    #[test]
    fn zero_coordinate_is_rejected() {
        let mut r = rng(7);
        let pp = SharedParams::setup(2, &mut r).unwrap();
        let kp = keygen(&pp, &mut r);
        let m = vec![Scalar::ONE, Scalar::ZERO];
        assert_eq!(
            sign_append(&pp, &kp.sk, &[], &[], &m, None, &mut r),
            Err(SasError::ZeroMessage)
        );
        let sig = sign_append(&pp, &kp.sk, &[], &[], &[Scalar::ONE; 2], None, &mut r).unwrap();
        assert!(verify(&pp, std::slice::from_ref(&kp.pk), &[vec![Scalar::ONE; 2]], &sig));
        assert!(!verify(&pp, &[kp.pk], &[m], &sig));
    }

    #[test]
    fn prior_checks() {
        let mut r = rng(8);
        let pp = SharedParams::setup(1, &mut r).unwrap();
        let a = keygen(&pp, &mut r);
        let b = keygen(&pp, &mut r);
        let c = keygen(&pp, &mut r);
        let m = msg(&mut r, 1);
        let s1 = sign_append(&pp, &a.sk, &[], &[], &m, None, &mut r).unwrap();
        let keys = vec![a.pk.clone()];
        let msgs = vec![m.clone()];
        assert_eq!(
            sign_append(&pp, &b.sk, &keys, &msgs, &m, None, &mut r),
            Err(SasError::MissingPrior)
        );
        let bad = AggSignature::new(s1.a, s1.b, s1.c + pp.g);
        assert_eq!(
            sign_append(&pp, &b.sk, &keys, &msgs, &m, Some(&bad), &mut r),
            Err(SasError::PriorInvalid)
        );
        // A verifying aggregate over a list with a repeated key.
        let s2 = sign_append(&pp, &a.sk, &keys, &msgs, &m, Some(&s1), &mut r).unwrap();
        let dup_keys = vec![a.pk.clone(), a.pk.clone()];
        let dup_msgs = vec![m.clone(), m.clone()];
        assert!(verify(&pp, &dup_keys, &dup_msgs, &s2));
        assert_eq!(
            sign_append(&pp, &c.sk, &dup_keys, &dup_msgs, &m, Some(&s2), &mut r),
            Err(SasError::DuplicateKey)
        );
        let mut chain = SasChain::new();
        chain.append(&pp, &a, m.clone(), &mut r).unwrap();
        assert_eq!(chain.append(&pp, &a, m, &mut r), Err(SasError::DuplicateKey));
    }

    #[test]
    fn swapping_distinct_messages_breaks_verification() {
        let mut r = rng(9);
        let pp = SharedParams::setup(1, &mut r).unwrap();
        for _ in 0..100 {
            let mut chain = SasChain::new();
            for _ in 0..2 {
                let kp = keygen(&pp, &mut r);
                chain.append(&pp, &kp, msg(&mut r, 1), &mut r).unwrap();
            }
            let mut swapped = chain.clone();
            swapped.msgs.swap(0, 1);
            assert!(!swapped.verify(&pp));
        }
    }

    #[test]
    fn empty_chain_base_verifies() {
        let mut r = rng(10);
        let pp = SharedParams::setup(3, &mut r).unwrap();
        assert!(verify(&pp, &[], &[], &pp.base_signature()));
        assert!(!verify(&pp, &[], &[], &AggSignature::new(pp.g, pp.x2, pp.x1)));
    }

    #[test]
    fn chain_envelope_round_trip() {
        let mut r = rng(11);
        let pp = SharedParams::setup(2, &mut r).unwrap();
        let mut chain = SasChain::new();
        assert_eq!(SasChain::from_envelope(&chain.to_envelope()).unwrap(), chain);
        for _ in 0..3 {
            let kp = keygen(&pp, &mut r);
            chain.append(&pp, &kp, msg(&mut r, 2), &mut r).unwrap();
        }
        let back = SasChain::from_envelope(&chain.to_envelope()).unwrap();
        assert_eq!(back, chain);
        assert!(back.verify(&pp));
        let kp = keygen(&pp, &mut r);
        assert_eq!(SasKeyPair::from_envelope(&kp.to_envelope()).unwrap(), kp);
        assert_eq!(SasPublicKey::from_envelope(&kp.pk.to_envelope()).unwrap(), kp.pk);
    }
}
