use blstrs::{G1Projective, Scalar};
use group::Group;

use crate::groups::codec::{self, DecodeError, Reader, TypeTag, Writer, G1_LEN};

/// A signature `(A, B, C)` of three `G` elements.
///
/// The same shape serves the base scheme, sequential aggregates and ordered
/// multi-signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AggSignature {
    pub a: G1Projective,
    pub b: G1Projective,
    pub c: G1Projective,
}

pub const SIGNATURE_LEN: usize = 3 * G1_LEN;

impl AggSignature {
    pub fn new(a: G1Projective, b: G1Projective, c: G1Projective) -> Self {
        AggSignature { a, b, c }
    }

    /// True if `A` is the identity; such signatures never verify.
    pub fn is_degenerate(&self) -> bool {
        bool::from(self.a.is_identity())
    }

    /// Raises every component to `t`.
    pub fn pow(&self, t: &Scalar) -> Self {
        AggSignature {
            a: self.a * t,
            b: self.b * t,
            c: self.c * t,
        }
    }

    pub fn to_bytes(&self) -> [u8; SIGNATURE_LEN] {
        let mut out = [0u8; SIGNATURE_LEN];
        out[..G1_LEN].copy_from_slice(&codec::encode_g1(&self.a));
        out[G1_LEN..2 * G1_LEN].copy_from_slice(&codec::encode_g1(&self.b));
        out[2 * G1_LEN..].copy_from_slice(&codec::encode_g1(&self.c));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let sig = Self::read(&mut r)?;
        r.finish()?;
        Ok(sig)
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(AggSignature {
            a: r.g1()?,
            b: r.g1()?,
            c: r.g1()?,
        })
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        out.put_g1(&self.a);
        out.put_g1(&self.b);
        out.put_g1(&self.c);
    }

    pub fn to_envelope(&self) -> Vec<u8> {
        codec::seal(TypeTag::Signature, &self.to_bytes())
    }

    pub fn from_envelope(bytes: &[u8]) -> Result<Self, DecodeError> {
        Self::from_bytes(codec::open(bytes, TypeTag::Signature)?)
    }
}
