mod common;

use blstrs::{Bls12, G1Projective, Scalar};
use ff::Field;
use group::Group;
use omsig::ds::{self, DsParams};
use omsig::groups;
use omsig::AggSignature;
use pairing::Engine;
use proptest::prelude::*;

use common::{msg, rng};

/// Pairing equation evaluated with three separate pairings in `G_T`.
fn naive_verify(pk: &ds::DsPublicKey, m: &[Scalar], sig: &AggSignature) -> bool {
    if bool::from(sig.a.is_identity()) || m.len() != pk.v.len() {
        return false;
    }
    let mut w = pk.u;
    for (v, mj) in pk.v.iter().zip(m) {
        w += v * mj;
    }
    let pair = |a: &G1Projective, b: &blstrs::G2Projective| {
        Bls12::pairing(&a.into(), &b.into())
    };
    pair(&sig.a, &w) + pair(&sig.b, &pk.d) == pair(&sig.c, &pk.h)
}

fn scalar() -> impl Strategy<Value = Scalar> {
    any::<[u8; 64]>().prop_map(|b| groups::scalar_from_wide(&b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn correctness_for_small_ell(seed in any::<u64>(), ell in 1usize..=4, zero_at in 0usize..8) {
        let mut r = rng(seed);
        let pp = DsParams::setup(&mut r);
        let kp = ds::keygen(&pp, ell, &mut r).unwrap();
        let mut m = msg(ell, &mut r);
        if zero_at < ell {
            m[zero_at] = Scalar::ZERO;
        }
        let sig = ds::sign(&pp, &kp.sk, &m, &mut r).unwrap();
        prop_assert!(ds::verify(&kp.pk, &m, &sig));
        prop_assert!(naive_verify(&kp.pk, &m, &sig));
    }

    #[test]
    fn rerandomization_is_closed(seed in any::<u64>(), t in scalar(), tamper in any::<bool>()) {
        prop_assume!(!bool::from(t.is_zero()));
        let mut r = rng(seed);
        let pp = DsParams::setup(&mut r);
        let kp = ds::keygen(&pp, 2, &mut r).unwrap();
        let m = msg(2, &mut r);
        let mut sig = ds::sign(&pp, &kp.sk, &m, &mut r).unwrap();
        if tamper {
            sig.c += pp.g;
        }
        let moved = ds::rerandomize_with(&sig, &t);
        prop_assert_eq!(ds::verify(&kp.pk, &m, &moved), !tamper);
        prop_assert_eq!(naive_verify(&kp.pk, &m, &moved), !tamper);
    }

    #[test]
    fn fast_and_naive_verifiers_agree_on_random_triples(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pp = DsParams::setup(&mut r);
        let kp = ds::keygen(&pp, 1, &mut r).unwrap();
        let m = msg(1, &mut r);
        let sig = AggSignature::new(
            groups::sample_g1_star(&mut r),
            groups::sample_g1_star(&mut r),
            groups::sample_g1_star(&mut r),
        );
        prop_assert_eq!(ds::verify(&kp.pk, &m, &sig), naive_verify(&kp.pk, &m, &sig));
    }
}

#[test]
fn other_messages_are_rejected_over_1000_trials() {
    let mut r = rng(11);
    let pp = DsParams::setup(&mut r);
    let kp = ds::keygen(&pp, 2, &mut r).unwrap();
    let m = msg(2, &mut r);
    let sig = ds::sign(&pp, &kp.sk, &m, &mut r).unwrap();
    for _ in 0..1000 {
        let mut other = msg(2, &mut r);
        if other == m {
            other[0] += Scalar::ONE;
        }
        assert!(!ds::verify(&kp.pk, &other, &sig));
    }
}

#[test]
fn rerandomized_base_tracks_known_exponents() {
    let mut r = rng(12);
    let pp = DsParams::setup(&mut r);
    let kp = ds::keygen(&pp, 1, &mut r).unwrap();
    let rr = groups::sample_nonzero_scalar(&mut r);
    let t = groups::sample_nonzero_scalar(&mut r);
    let sig = ds::sign_with_base(&kp.sk, &[Scalar::ONE], pp.g * rr).unwrap();
    assert_eq!(ds::rerandomize_with(&sig, &t).a, pp.g * (t * rr));
    assert_eq!(ds::rerandomize_with(&sig, &Scalar::ONE), sig);
}
