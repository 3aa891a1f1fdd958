//! Type-3 pairing group layer.
//!
//! The source group `G` is BLS12-381 G1, the second source group `G̃` is G2
//! and the target group is `Gt`. No map from G2 to G1 is ever used; every
//! element keeps the role it was created with.
//!
//! All randomness is taken from a caller-supplied [`RngCore`], so seeded
//! generators reproduce every value bit for bit.

pub mod codec;

use std::cell::Cell;

use blstrs::{Bls12, G1Affine, G1Projective, G2Prepared, G2Projective, Gt, Scalar};
use ff::{Field, PrimeField};
use group::{Curve, Group};
use pairing::{MillerLoopResult, MultiMillerLoop};
use rand_core::RngCore;
use sha2::{Digest, Sha512};

pub use codec::DecodeError;

/// Domain tag for messages signed with the base scheme.
pub const DS_TAG: &[u8] = b"OMSK-V1-DS";
/// Domain tag for sequential aggregate signature messages.
pub const SAS_TAG: &[u8] = b"OMSK-V1-SAS";
/// Domain tag for ordered multi-signature messages.
pub const OMS_TAG: &[u8] = b"OMSK-V1-OMS";

/// Identifier of the pairing-friendly curve backing a parameter set.
///
/// Carried as one byte inside every parameter envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CurveId {
    Bls12_381 = 1,
}

impl CurveId {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(CurveId::Bls12_381),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurveId::Bls12_381 => "bls12-381",
        }
    }
}

/// Description of the bilinear group `(p, G, G̃, G_T, e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupDesc {
    pub curve: CurveId,
}

impl Default for GroupDesc {
    fn default() -> Self {
        GroupDesc {
            curve: CurveId::Bls12_381,
        }
    }
}

impl GroupDesc {
    /// Bit length of the prime group order `p`.
    pub fn order_bits(&self) -> u32 {
        match self.curve {
            CurveId::Bls12_381 => Scalar::NUM_BITS,
        }
    }

    /// Nominal security level in bits; bounds the admissible signer count.
    pub fn security_bits(&self) -> u32 {
        match self.curve {
            CurveId::Bls12_381 => 128,
        }
    }

    pub fn scalar_len(&self) -> usize {
        codec::SCALAR_LEN
    }

    /// Compressed length of an element of `G`.
    pub fn g1_len(&self) -> usize {
        codec::G1_LEN
    }

    /// Compressed length of an element of `G̃`.
    pub fn g2_len(&self) -> usize {
        codec::G2_LEN
    }

    /// Checks `e(G, G̃) != 1` for the canonical generators.
    pub fn is_nondegenerate(&self) -> bool {
        pairing(&G1Projective::generator(), &G2Projective::generator()) != Gt::identity()
    }
}

/// Draws a uniform element of `Z_p^*`, resampling on zero.
pub fn sample_nonzero_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::random(&mut *rng);
        if !bool::from(s.is_zero()) {
            return s;
        }
    }
}

/// Draws a uniform non-identity element of `G`.
pub fn sample_g1_star<R: RngCore + ?Sized>(rng: &mut R) -> G1Projective {
    G1Projective::generator() * sample_nonzero_scalar(rng)
}

/// Draws a uniform non-identity element of `G̃`.
pub fn sample_g2_star<R: RngCore + ?Sized>(rng: &mut R) -> G2Projective {
    G2Projective::generator() * sample_nonzero_scalar(rng)
}

/// Reduces a 512-bit little-endian integer modulo `p`.
pub fn scalar_from_wide(bytes: &[u8; 64]) -> Scalar {
    let radix = Scalar::from(u64::MAX) + Scalar::ONE;
    let mut acc = Scalar::ZERO;
    for chunk in bytes.chunks_exact(8).rev() {
        let limb = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        acc = acc * radix + Scalar::from(limb);
    }
    acc
}

/// Maps an arbitrary octet string to a message scalar in `Z_p^*`.
///
/// The digest is `SHA-512(len(tag) || tag || msg || counter)` reduced mod
/// `p`; a zero result is re-hashed with the next counter value.
pub fn encode_message(msg: &[u8], domain_tag: &[u8]) -> Scalar {
    let mut counter: u32 = 0;
    loop {
        let mut h = Sha512::new();
        h.update((domain_tag.len() as u64).to_be_bytes());
        h.update(domain_tag);
        h.update(msg);
        h.update(counter.to_be_bytes());
        let digest: [u8; 64] = h.finalize().into();
        let s = scalar_from_wide(&digest);
        if !bool::from(s.is_zero()) {
            return s;
        }
        counter += 1;
    }
}

/// Embeds a small integer (a signer position, say) as a scalar.
pub fn scalar_from_u64(v: u64) -> Scalar {
    Scalar::from(v)
}

/// The bilinear map `e: G × G̃ → G_T`.
pub fn pairing(x: &G1Projective, y: &G2Projective) -> Gt {
    blstrs::pairing(&x.to_affine(), &y.to_affine())
}

thread_local! {
    static PAIRINGS: Cell<u64> = const { Cell::new(0) };
}

/// Number of pairing terms evaluated on the current thread so far.
///
/// Every call to [`pairing_product_is_one`] adds the number of pairs it was
/// given; verifiers can therefore be audited by differencing this counter
/// around a call.
pub fn pairing_count() -> u64 {
    PAIRINGS.with(|c| c.get())
}

/// Returns true iff `∏ e(x_i, y_i) = 1_{G_T}`, using one shared final
/// exponentiation.
pub fn pairing_product_is_one(pairs: &[(G1Projective, G2Projective)]) -> bool {
    assert!(!pairs.is_empty(), "pairing product over an empty list");
    PAIRINGS.with(|c| c.set(c.get() + pairs.len() as u64));

    let g1: Vec<G1Affine> = pairs.iter().map(|(x, _)| x.to_affine()).collect();
    let g2: Vec<G2Prepared> = pairs
        .iter()
        .map(|(_, y)| G2Prepared::from(y.to_affine()))
        .collect();
    let terms: Vec<(&G1Affine, &G2Prepared)> = g1.iter().zip(g2.iter()).collect();
    let product = Bls12::multi_miller_loop(&terms).final_exponentiation();
    bool::from(product.is_identity())
}

/// Multiplies a `G̃` element by a small non-negative integer.
///
/// Positions in key aggregation are at most `n_max`, so a short
/// double-and-add beats a full 255-bit scalar multiplication.
pub fn g2_mul_u64(point: &G2Projective, k: u64) -> G2Projective {
    let mut acc = G2Projective::identity();
    for bit in (0..64 - k.leading_zeros()).rev() {
        acc = acc.double();
        if (k >> bit) & 1 == 1 {
            acc += point;
        }
    }
    acc
}

/// Computes `Σ s_i · P_i` in `G̃`.
pub fn g2_msm(points: &[G2Projective], scalars: &[Scalar]) -> G2Projective {
    assert_eq!(points.len(), scalars.len(), "msm length mismatch");
    match points.len() {
        0 => G2Projective::identity(),
        1 => points[0] * scalars[0],
        _ => G2Projective::multi_exp(points, scalars),
    }
}

/// Canonical compressed bytes of a `G̃` element, as used for equality and
/// duplicate detection.
pub fn g2_bytes(p: &G2Projective) -> [u8; codec::G2_LEN] {
    p.to_affine().to_compressed()
}

pub fn g1_bytes(p: &G1Projective) -> [u8; codec::G1_LEN] {
    p.to_affine().to_compressed()
}

/// Overwrites a scalar in place so the optimiser cannot elide the store.
pub(crate) fn wipe_scalar(s: &mut Scalar) {
    // SAFETY: `s` is a valid, aligned, exclusively borrowed Scalar.
    unsafe { std::ptr::write_volatile(s, Scalar::ZERO) };
    std::sync::atomic::compiler_fence(std::sync::atomic::Ordering::SeqCst);
}
