//! Trapdoor-aware tooling for exercising the security arguments.
//!
//! Everything here uses the setup secrets `(d, x₁, x₂)` and the secret keys
//! of registered signers. A real adversary has neither; in particular the
//! d-twisted signatures produced by [`d_twist`] verify but are not of honest
//! form, and only someone holding `d` can build them. They exist so that the
//! extraction in [`dbp_extract`] can be run on inputs of the shape it is
//! meant to handle.

use std::collections::HashMap;

use blstrs::{G1Projective, G2Projective, Scalar};
use ff::Field;
use group::Group;
use rand_core::RngCore;
use thiserror::Error;

use crate::ds::DsPublicKey;
use crate::groups;
use crate::oms::{self, OmsParams, OmsPublicKey};
use crate::sas::{self, SasKeyPair, SasPublicKey, SasSecretKey, SharedParams};
use crate::signature::AggSignature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("trapdoor view does not match the parameters")]
    ViewMismatch,
    #[error("no secret key known for signer {0}")]
    UnknownKey(usize),
    #[error("input does not verify")]
    NotVerifying,
    #[error("target index {0} out of range")]
    BadIndex(usize),
}

/// Setup secrets plus the secret keys of every signer added to the view.
/// Deliberately not serializable.
pub struct TrapdoorView {
    pub d: Scalar,
    pub x1: Scalar,
    pub x2: Scalar,
    sks: HashMap<Vec<u8>, SasSecretKey>,
}

impl std::fmt::Debug for TrapdoorView {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrapdoorView")
            .field("keys", &self.sks.len())
            .finish_non_exhaustive()
    }
}

impl Drop for TrapdoorView {
    fn drop(&mut self) {
        groups::wipe_scalar(&mut self.d);
        groups::wipe_scalar(&mut self.x1);
        groups::wipe_scalar(&mut self.x2);
    }
}

/// Runs setup and keeps the secrets.
pub fn setup_with_trapdoor<R: RngCore + ?Sized>(
    ell: usize,
    rng: &mut R,
) -> (SharedParams, TrapdoorView) {
    let (pp, s) = SharedParams::setup_with_secrets(ell, rng).expect("ℓ ≥ 1");
    let view = TrapdoorView {
        d: s.d,
        x1: s.x1,
        x2: s.x2,
        sks: HashMap::new(),
    };
    (pp, view)
}

pub fn oms_setup_with_trapdoor<R: RngCore + ?Sized>(rng: &mut R) -> (OmsParams, TrapdoorView) {
    let (pp, view) = setup_with_trapdoor(2, rng);
    (OmsParams::from_shared(pp).expect("ℓ = 2"), view)
}

impl TrapdoorView {
    /// Records `sk` as the key behind `pk`, replacing any earlier entry.
    pub fn insert(&mut self, pk: &SasPublicKey, sk: SasSecretKey) {
        self.sks.insert(pk.to_bytes(), sk);
    }

    pub fn insert_pair(&mut self, kp: &SasKeyPair) {
        self.insert(&kp.pk, kp.sk.clone());
    }

    pub fn remove(&mut self, pk: &SasPublicKey) -> Option<SasSecretKey> {
        self.sks.remove(&pk.to_bytes())
    }

    pub fn secret_key(&self, pk: &SasPublicKey) -> Option<&SasSecretKey> {
        self.sks.get(&pk.to_bytes())
    }

    pub fn matches(&self, pp: &SharedParams) -> bool {
        pp.x1 == pp.g * self.x1
            && pp.x2 == pp.g * self.x2
            && pp.d == pp.h * self.d
            && pp.u == pp.h * (self.x2 - self.d * self.x1)
    }

    fn check(&self, pp: &SharedParams) -> Result<(), HarnessError> {
        if self.matches(pp) {
            Ok(())
        } else {
            Err(HarnessError::ViewMismatch)
        }
    }

    /// `(ΣΣ m y₁, ΣΣ m y₂)` over all signers except `skip`.
    fn exponents(
        &self,
        keys: &[SasPublicKey],
        msgs: &[Vec<Scalar>],
        skip: Option<usize>,
    ) -> Result<(Scalar, Scalar), HarnessError> {
        let mut e1 = Scalar::ZERO;
        let mut e2 = Scalar::ZERO;
        for (i, (k, m)) in keys.iter().zip(msgs).enumerate() {
            if Some(i) == skip {
                continue;
            }
            let sk = self.secret_key(k).ok_or(HarnessError::UnknownKey(i))?;
            let (a, b) = sk.exponents(m);
            e1 += a;
            e2 += b;
        }
        Ok((e1, e2))
    }
}

/// Verification without pairings:
/// `A ≠ 1 ∧ C·B^{-d} = A^{x₂ − d x₁ + ΣΣ m (y₂ − d y₁)}`.
pub fn exponent_oracle_verify(
    view: &TrapdoorView,
    pp: &SharedParams,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
    sig: &AggSignature,
) -> Result<bool, HarnessError> {
    view.check(pp)?;
    if !sas::well_formed(pp, keys, msgs) || sig.is_degenerate() {
        return Ok(false);
    }
    let (s1, s2) = view.exponents(keys, msgs, None)?;
    let e = (view.x2 + s2) - view.d * (view.x1 + s1);
    Ok(sig.c - sig.b * view.d == sig.a * e)
}

/// `(A, B·G^t, C·G^{t·d})`: verifies whenever `sig` does.
pub fn d_twist(view: &TrapdoorView, pp: &SharedParams, sig: &AggSignature, t: &Scalar) -> AggSignature {
    AggSignature::new(sig.a, sig.b + pp.g * t, sig.c + pp.g * (*t * view.d))
}

/// Parameters seeded from a base-scheme signature `(A, B, C)` on the zero
/// vector: `(G, X₁, X₂) = (A, B, C)` with the base key's `(H̃, D̃, Ũ)`.
///
/// This is the only place a zero message is signed on purpose; it mirrors
/// how a reduction embeds a base-scheme key into the shared parameters.
pub fn params_from_ds(
    g_tilde: &G2Projective,
    pk: &DsPublicKey,
    zero_sig: &AggSignature,
) -> Result<SharedParams, HarnessError> {
    let zero = vec![Scalar::ZERO; pk.v.len()];
    if !crate::ds::verify(pk, &zero, zero_sig) {
        return Err(HarnessError::NotVerifying);
    }
    Ok(SharedParams {
        group: groups::GroupDesc::default(),
        ell: pk.v.len(),
        g: zero_sig.a,
        g_tilde: *g_tilde,
        x1: zero_sig.b,
        x2: zero_sig.c,
        h: pk.h,
        d: pk.d,
        u: pk.u,
    })
}

/// A DS forgery recovered from an aggregate: the target's message, the
/// stripped signature, and the key it verifies under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrippedForgery {
    pub m: Vec<Scalar>,
    pub sig: AggSignature,
    pub pk: DsPublicKey,
}

/// Composite base-scheme key `(H̃, D̃, Ũ, Ṽ_{i*})`.
pub fn composite_pk(pp: &SharedParams, target: &SasPublicKey) -> DsPublicKey {
    DsPublicKey {
        h: pp.h,
        d: pp.d,
        u: pp.u,
        v: target.v.clone(),
    }
}

/// Removes every cosigner's contribution except signer `target`'s.
///
/// Only the cosigners' secret keys are read from `view`; the target's key is
/// never looked up.
pub fn strip_to_ds(
    view: &TrapdoorView,
    pp: &SharedParams,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
    sig: &AggSignature,
    target: usize,
) -> Result<StrippedForgery, HarnessError> {
    if target >= keys.len() {
        return Err(HarnessError::BadIndex(target));
    }
    if !sas::verify(pp, keys, msgs, sig) {
        return Err(HarnessError::NotVerifying);
    }
    let (s1, s2) = view.exponents(keys, msgs, Some(target))?;
    Ok(StrippedForgery {
        m: msgs[target].clone(),
        sig: AggSignature::new(sig.a, sig.b - sig.a * s1, sig.c - sig.a * s2),
        pk: composite_pk(pp, &keys[target]),
    })
}

/// A pair `(E, F)` with `e(E, H̃)·e(F, D̃) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DbpSolution {
    pub e: G1Projective,
    pub f: G1Projective,
}

/// `E = A^{x₂ + ΣΣ m y₂}·C^{-1}`, `F = B·A^{-(x₁ + ΣΣ m y₁)}`.
///
/// Returns `None` for honest-form signatures, where both are the identity.
pub fn dbp_extract(
    view: &TrapdoorView,
    pp: &SharedParams,
    keys: &[SasPublicKey],
    msgs: &[Vec<Scalar>],
    sig: &AggSignature,
) -> Result<Option<DbpSolution>, HarnessError> {
    view.check(pp)?;
    if !sas::verify(pp, keys, msgs, sig) {
        return Err(HarnessError::NotVerifying);
    }
    let (s1, s2) = view.exponents(keys, msgs, None)?;
    let e = sig.a * (view.x2 + s2) - sig.c;
    let f = sig.b - sig.a * (view.x1 + s1);
    if bool::from(e.is_identity()) && bool::from(f.is_identity()) {
        return Ok(None);
    }
    Ok(Some(DbpSolution { e, f }))
}

pub fn dbp_check(sol: &DbpSolution, h: &G2Projective, d: &G2Projective) -> bool {
    if bool::from(sol.e.is_identity()) && bool::from(sol.f.is_identity()) {
        return false;
    }
    groups::pairing_product_is_one(&[(sol.e, *h), (sol.f, *d)])
}

/// Maps a verifying OMS signature to the SAS tuple
/// `(L, ((m, i))_{i∈[n]}, σ)` and reports whether it verifies.
pub fn oms_reduction_check(
    pp: &OmsParams,
    keys: &[OmsPublicKey],
    m: &Scalar,
    sig: &AggSignature,
) -> Result<bool, HarnessError> {
    if !oms::verify_with_list(pp, keys, m, sig) {
        return Err(HarnessError::NotVerifying);
    }
    let sas_keys: Vec<SasPublicKey> = keys.iter().map(OmsPublicKey::to_sas).collect();
    let msgs = oms::to_sas_messages(m, keys.len());
    Ok(sas::verify(&pp.shared, &sas_keys, &msgs, sig))
}
