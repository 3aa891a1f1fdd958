#![allow(dead_code)]

use blstrs::Scalar;
use omsig::groups;
use omsig::harness::TrapdoorView;
use omsig::oms::{self, OmsChain, OmsKeyPair, OmsParams};
use omsig::sas::{self, SasChain, SasKeyPair, SharedParams};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn msg(ell: usize, r: &mut ChaCha20Rng) -> Vec<Scalar> {
    (0..ell).map(|_| groups::sample_nonzero_scalar(r)).collect()
}

/// Honest chain of `n` fresh signers; their keys go into `view` if given.
pub fn sas_chain(
    pp: &SharedParams,
    n: usize,
    mut view: Option<&mut TrapdoorView>,
    r: &mut ChaCha20Rng,
) -> (SasChain, Vec<SasKeyPair>) {
    let mut chain = SasChain::new();
    let mut kps = Vec::with_capacity(n);
    for _ in 0..n {
        let kp = sas::keygen(pp, r);
        if let Some(v) = view.as_deref_mut() {
            v.insert_pair(&kp);
        }
        chain.append(pp, &kp, msg(pp.ell, r), r).unwrap();
        kps.push(kp);
    }
    (chain, kps)
}

pub fn oms_chain(pp: &OmsParams, n: usize, r: &mut ChaCha20Rng) -> (OmsChain, Vec<OmsKeyPair>) {
    let mut chain = OmsChain::new(groups::sample_nonzero_scalar(r));
    let mut kps = Vec::with_capacity(n);
    for _ in 0..n {
        let kp = oms::keygen(pp, r);
        chain.append(pp, &kp, r).unwrap();
        kps.push(kp);
    }
    (chain, kps)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}
