//! Randomizable base signature on vectors of `ℓ` scalars.
//!
//! Key generation samples `d, x₁, x₂` and `(y_{j,1}, y_{j,2})_j`, and publishes
//! `D̃ = H̃^d`, `Ũ = H̃^{x₂ − d·x₁}`, `Ṽ_j = H̃^{y_{j,2} − d·y_{j,1}}`. A signature
//! is `(A, A^{x₁ + Σ m_j y_{j,1}}, A^{x₂ + Σ m_j y_{j,2}})` with `A = G^r`, and
//! verifies when `e(A, Ũ ∏ Ṽ_j^{m_j}) · e(B, D̃) = e(C, H̃)`.
//!
//! The message space is `(Z_p)^ℓ`: zero coordinates, including the all-zero
//! vector, are accepted.

use blstrs::{G1Projective, G2Projective, Scalar};
use group::Group;
use rand_core::RngCore;
use thiserror::Error;

use crate::groups::codec::{self, DecodeError, Reader, TypeTag, Writer};
use crate::groups::{self, CurveId, GroupDesc};
use crate::signature::AggSignature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsError {
    #[error("message has {got} coordinates, key expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vector length must be at least 1")]
    EmptyVector,
}

/// Public parameters `(BG, G, G̃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsParams {
    pub group: GroupDesc,
    pub g: G1Projective,
    pub g_tilde: G2Projective,
}

impl DsParams {
    pub fn setup<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        DsParams {
            group: GroupDesc::default(),
            g: groups::sample_g1_star(rng),
            g_tilde: groups::sample_g2_star(rng),
        }
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = vec![self.group.curve as u8];
        p.put_g1(&self.g);
        p.put_g2(&self.g_tilde);
        codec::seal(TypeTag::DsParams, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::DsParams)?);
        let curve = CurveId::from_byte(r.u8()?).ok_or(DecodeError::UnknownCurve)?;
        let g = r.g1()?;
        let g_tilde = r.g2()?;
        r.finish()?;
        if bool::from(g.is_identity()) || bool::from(g_tilde.is_identity()) {
            return Err(DecodeError::Inconsistent);
        }
        Ok(DsParams {
            group: GroupDesc { curve },
            g,
            g_tilde,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsPublicKey {
    pub h: G2Projective,
    pub d: G2Projective,
    pub u: G2Projective,
    pub v: Vec<G2Projective>,
}

impl DsPublicKey {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Number of `G̃` elements in the key: `3 + ℓ`.
    pub fn element_count(&self) -> usize {
        3 + self.v.len()
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend_from_slice(&(self.v.len() as u16).to_be_bytes());
        p.put_g2(&self.h);
        p.put_g2(&self.d);
        p.put_g2(&self.u);
        for v in &self.v {
            p.put_g2(v);
        }
        codec::seal(TypeTag::DsPublicKey, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::DsPublicKey)?);
        let ell = r.u16()? as usize;
        if ell == 0 {
            return Err(DecodeError::Inconsistent);
        }
        let h = r.g2()?;
        let d = r.g2()?;
        let u = r.g2()?;
        let v = (0..ell).map(|_| r.g2()).collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Ok(DsPublicKey { h, d, u, v })
    }
}

/// Secret key `(x₁, x₂, (y_{j,1}, y_{j,2})_j)`; wiped on drop.
#[derive(Clone, PartialEq, Eq)]
pub struct DsSecretKey {
    pub x1: Scalar,
    pub x2: Scalar,
    pub y: Vec<(Scalar, Scalar)>,
}

impl std::fmt::Debug for DsSecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DsSecretKey").field("ell", &self.y.len()).finish_non_exhaustive()
    }
}

impl Drop for DsSecretKey {
    fn drop(&mut self) {
        groups::wipe_scalar(&mut self.x1);
        groups::wipe_scalar(&mut self.x2);
        for (a, b) in self.y.iter_mut() {
            groups::wipe_scalar(a);
            groups::wipe_scalar(b);
        }
    }
}

impl DsSecretKey {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of scalars held: `2 + 2ℓ`.
    pub fn scalar_count(&self) -> usize {
        2 + 2 * self.y.len()
    }

    /// Exponents `(x₁ + Σ m_j y_{j,1}, x₂ + Σ m_j y_{j,2})`.
    pub fn exponents(&self, m: &[Scalar]) -> (Scalar, Scalar) {
        self.y
            .iter()
            .zip(m)
            .fold((self.x1, self.x2), |(e1, e2), ((y1, y2), mj)| {
                (e1 + mj * y1, e2 + mj * y2)
            })
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend_from_slice(&(self.y.len() as u16).to_be_bytes());
        p.put_scalar(&self.x1);
        p.put_scalar(&self.x2);
        for (a, b) in &self.y {
            p.put_scalar(a);
            p.put_scalar(b);
        }
        codec::seal(TypeTag::DsSecretKey, &p)
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(codec::open(bytes, TypeTag::DsSecretKey)?);
        let ell = r.u16()? as usize;
        let x1 = r.scalar()?;
        let x2 = r.scalar()?;
        let y = (0..ell)
            .map(|_| Ok((r.scalar()?, r.scalar()?)))
            .collect::<Result<Vec<_>, DecodeError>>()?;
        r.finish()?;
        Ok(DsSecretKey { x1, x2, y })
    }
}

#[derive(Clone, Debug)]
pub struct DsKeyPair {
    pub pk: DsPublicKey,
    pub sk: DsSecretKey,
}

/// Checks `Ũ = H̃^{x₂}·D̃^{−x₁}` and `Ṽ_j = H̃^{y_{j,2}}·D̃^{−y_{j,1}}` for every `j`.
pub fn key_matches(pk: &DsPublicKey, sk: &DsSecretKey) -> bool {
    pk.v.len() == sk.y.len()
        && pk.u == pk.h * sk.x2 - pk.d * sk.x1
        && pk
            .v
            .iter()
            .zip(&sk.y)
            .all(|(v, (y1, y2))| *v == pk.h * y2 - pk.d * y1)
}

pub fn keygen<R: RngCore + ?Sized>(
    _pp: &DsParams,
    ell: usize,
    rng: &mut R,
) -> Result<DsKeyPair, DsError> {
    if ell == 0 {
        return Err(DsError::EmptyVector);
    }
    let mut d = groups::sample_nonzero_scalar(rng);
    let x1 = groups::sample_nonzero_scalar(rng);
    let x2 = groups::sample_nonzero_scalar(rng);
    let y: Vec<(Scalar, Scalar)> = (0..ell)
        .map(|_| {
            (
                groups::sample_nonzero_scalar(rng),
                groups::sample_nonzero_scalar(rng),
            )
        })
        .collect();
    // H̃ is drawn from G̃* rather than G̃ so that D̃, Ũ, Ṽ_j are never trivial.
    let h = groups::sample_g2_star(rng);
    let pk = DsPublicKey {
        h,
        d: h * d,
        u: h * (x2 - d * x1),
        v: y.iter().map(|(y1, y2)| h * (y2 - d * y1)).collect(),
    };
    groups::wipe_scalar(&mut d);
    let sk = DsSecretKey { x1, x2, y };
    debug_assert!(key_matches(&pk, &sk));
    Ok(DsKeyPair { pk, sk })
}

fn check_len(expected: usize, m: &[Scalar]) -> Result<(), DsError> {
    if m.len() != expected {
        return Err(DsError::LengthMismatch {
            expected,
            got: m.len(),
        });
    }
    Ok(())
}

/// Signs with a caller-chosen first component `A`.
pub fn sign_with_base(
    sk: &DsSecretKey,
    m: &[Scalar],
    a: G1Projective,
) -> Result<AggSignature, DsError> {
    check_len(sk.y.len(), m)?;
    let (mut e1, mut e2) = sk.exponents(m);
    let sig = AggSignature::new(a, a * e1, a * e2);
    groups::wipe_scalar(&mut e1);
    groups::wipe_scalar(&mut e2);
    Ok(sig)
}

pub fn sign<R: RngCore + ?Sized>(
    pp: &DsParams,
    sk: &DsSecretKey,
    m: &[Scalar],
    rng: &mut R,
) -> Result<AggSignature, DsError> {
    check_len(sk.y.len(), m)?;
    let r = groups::sample_nonzero_scalar(rng);
    sign_with_base(sk, m, pp.g * r)
}

/// Single three-term pairing-product check.
pub fn verify(pk: &DsPublicKey, m: &[Scalar], sig: &AggSignature) -> bool {
    if m.len() != pk.v.len() || sig.is_degenerate() {
        return false;
    }
    let w = pk.u + groups::g2_msm(&pk.v, m);
    groups::pairing_product_is_one(&[(sig.a, w), (sig.b, pk.d), (-sig.c, pk.h)])
}

pub fn rerandomize_with(sig: &AggSignature, t: &Scalar) -> AggSignature {
    sig.pow(t)
}

/// Refreshes a signature to `(A^t, B^t, C^t)` for fresh `t ∈ Z_p^*`.
pub fn rerandomize<R: RngCore + ?Sized>(sig: &AggSignature, rng: &mut R) -> AggSignature {
    let t = groups::sample_nonzero_scalar(rng);
    rerandomize_with(sig, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ff::Field;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn random_msg(r: &mut ChaCha20Rng, ell: usize) -> Vec<Scalar> {
        (0..ell).map(|_| Scalar::random(&mut *r)).collect()
    }

    #[test]
    fn setup_is_deterministic_under_seed() {
        let a = DsParams::setup(&mut rng(1));
        let b = DsParams::setup(&mut rng(1));
        assert_eq!(a.to_envelope(), b.to_envelope());
        assert!(!bool::from(a.g.is_identity()));
        // header + curve id + |G| + |G̃|
        assert_eq!(a.to_envelope().len(), 6 + 1 + 48 + 96);
        assert_eq!(DsParams::from_envelope(&a.to_envelope()).unwrap(), a);
    }

    #[test]
    fn key_shapes() {
        let mut r = rng(2);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 1, &mut r).unwrap();
        assert_eq!(kp.pk.element_count(), 4);
        let kp3 = keygen(&pp, 3, &mut r).unwrap();
        assert_eq!(kp3.sk.scalar_count(), 8);
        assert!(key_matches(&kp3.pk, &kp3.sk));
        for (v, (y1, y2)) in kp3.pk.v.iter().zip(&kp3.sk.y) {
            assert_eq!(*v, kp3.pk.h * y2 + (-(kp3.pk.d * y1)));
        }
        assert_eq!(keygen(&pp, 0, &mut r).unwrap_err(), DsError::EmptyVector);
    }

    #[test]
    fn sign_verify_random_cases() {
        let mut r = rng(3);
        let pp = DsParams::setup(&mut r);
        for case in 0..100 {
            let ell = 1 + case % 4;
            let kp = keygen(&pp, ell, &mut r).unwrap();
            let m = random_msg(&mut r, ell);
            let sig = sign(&pp, &kp.sk, &m, &mut r).unwrap();
            assert!(verify(&kp.pk, &m, &sig));
        }
    }

    #[test]
    fn zero_vector_signature_ignores_message_keys() {
        let mut r = rng(4);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 2, &mut r).unwrap();
        let zero = vec![Scalar::ZERO; 2];
        let sig = sign(&pp, &kp.sk, &zero, &mut r).unwrap();
        assert_eq!(sig.b, sig.a * kp.sk.x1);
        assert_eq!(sig.c, sig.a * kp.sk.x2);
        assert!(verify(&kp.pk, &zero, &sig));
    }

    #[test]
    fn exponent_of_b_matches_secret_key() {
        let mut r = rng(5);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 3, &mut r).unwrap();
        let m = random_msg(&mut r, 3);
        let a = pp.g * Scalar::from(77u64);
        let sig = sign_with_base(&kp.sk, &m, a).unwrap();
        let mut e1 = kp.sk.x1;
        for j in 0..3 {
            e1 += m[j] * kp.sk.y[j].0;
        }
        assert_eq!(sig.b, a * e1);
    }

    #[test]
    fn rejects_identity_a_and_length_mismatch() {
        let mut r = rng(6);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 2, &mut r).unwrap();
        let m = random_msg(&mut r, 2);
        let sig = sign(&pp, &kp.sk, &m, &mut r).unwrap();
        let degenerate = AggSignature::new(G1Projective::identity(), sig.b, sig.c);
        assert!(!verify(&kp.pk, &m, &degenerate));
        // The all-identity triple satisfies the pairing equation trivially.
        let all_id = AggSignature::new(
            G1Projective::identity(),
            G1Projective::identity(),
            G1Projective::identity(),
        );
        assert!(!verify(&kp.pk, &m, &all_id));
        assert!(!verify(&kp.pk, &m[..1], &sig));
        assert!(matches!(
            sign(&pp, &kp.sk, &m[..1], &mut r),
            Err(DsError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn bit_flips_are_rejected() {
        let mut r = rng(7);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 1, &mut r).unwrap();
        let m = random_msg(&mut r, 1);
        let sig = sign(&pp, &kp.sk, &m, &mut r).unwrap();
        let bytes = sig.to_bytes();
        for component in 0..3 {
            for bit in [0usize, 7, 100, 300, 383] {
                let mut b = bytes;
                let idx = component * 48 + bit / 8;
                b[idx] ^= 1 << (bit % 8);
                if let Ok(s) = AggSignature::from_bytes(&b) {
                    assert!(!verify(&kp.pk, &m, &s));
                }
            }
        }
    }

    #[test]
    fn rerandomization() {
        let mut r = rng(8);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 2, &mut r).unwrap();
        let m = random_msg(&mut r, 2);
        let sig = sign(&pp, &kp.sk, &m, &mut r).unwrap();
        assert_eq!(rerandomize_with(&sig, &Scalar::ONE), sig);
        assert!(verify(&kp.pk, &m, &rerandomize(&sig, &mut r)));
        let bad = AggSignature::new(sig.a, sig.b + pp.g, sig.c);
        assert!(!verify(&kp.pk, &m, &rerandomize(&bad, &mut r)));

        let rr = Scalar::from(12345u64);
        let t = Scalar::from(678u64);
        let s = sign_with_base(&kp.sk, &m, pp.g * rr).unwrap();
        assert_eq!(rerandomize_with(&s, &t).a, pp.g * (t * rr));
    }

    #[test]
    fn envelopes_round_trip() {
        let mut r = rng(9);
        let pp = DsParams::setup(&mut r);
        let kp = keygen(&pp, 2, &mut r).unwrap();
        assert_eq!(DsPublicKey::from_envelope(&kp.pk.to_envelope()).unwrap(), kp.pk);
        assert_eq!(DsSecretKey::from_envelope(&kp.sk.to_envelope()).unwrap(), kp.sk);
    }
}
