//! EUF-CMA games in the certified-key model, driven by scripted adversaries.
//!
//! A run produces a [`GameTranscript`] of typed records. The verdict is
//! never cached: [`judge`] decodes the log and recomputes the three winning
//! conditions from scratch, so a transcript read back from JSON is judged
//! exactly like a fresh one.

use std::collections::HashSet;
use std::fmt;

use blstrs::{G2Projective, Scalar};
use ff::Field;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ds::{self, DsParams, DsPublicKey};
use crate::groups::codec::{self, DecodeError};
use crate::groups;
use crate::oms::{self, OmsParams, OmsPublicKey};
use crate::registry::{KeyRegistry, Registration};
use crate::sas::{self, SasKeyPair, SasPublicKey, SasSecretKey, SharedParams};
use crate::signature::AggSignature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Ds { ell: usize },
    Sas { ell: usize },
    Oms,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Ds { ell } => write!(f, "ds(ℓ={ell})"),
            Scheme::Sas { ell } => write!(f, "sas(ℓ={ell})"),
            Scheme::Oms => write!(f, "oms"),
        }
    }
}

/// Scripted adversaries. Each one is a fixed sequence of oracle calls
/// followed by a forgery attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Outputs a signature it obtained from the signing oracle.
    HonestReplay,
    /// Reorders the signers (or, for the base scheme, the message
    /// coordinates) of an oracle-signed aggregate.
    OrderTransposition,
    /// Builds a valid aggregate with a rogue key it never registered.
    UnregisteredCosigner,
    /// Swaps in a fresh message under an oracle-signed aggregate.
    MessageSubstitution,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::HonestReplay,
        Strategy::OrderTransposition,
        Strategy::UnregisteredCosigner,
        Strategy::MessageSubstitution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::HonestReplay => "honest-replay",
            Strategy::OrderTransposition => "order-transposition",
            Strategy::UnregisteredCosigner => "unregistered-cosigner",
            Strategy::MessageSubstitution => "message-substitution",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameFault {
    #[error("strategy {0:?} has no meaning for {1}")]
    Unsupported(Strategy, Scheme),
    #[error("signing oracle refused a query the strategy relies on")]
    OracleRefused,
    #[error("transcript is malformed: {0}")]
    Malformed(&'static str),
    #[error("transcript element failed to decode: {0}")]
    Decode(#[from] DecodeError),
}

/// One oracle interaction. Group elements and scalars are hex-encoded
/// envelopes or raw canonical scalars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum Record {
    Setup {
        scheme: Scheme,
        params: String,
    },
    Challenge {
        pk: String,
    },
    Register {
        pk: String,
        sk: String,
        accepted: bool,
    },
    Sign {
        keys: Vec<String>,
        msgs: Vec<Vec<String>>,
        prev: Option<String>,
        m: Vec<String>,
        response: Option<String>,
    },
    Forgery {
        keys: Vec<String>,
        msgs: Vec<Vec<String>>,
        sig: String,
    },
}

impl Record {
    fn name(&self) -> &'static str {
        match self {
            Record::Setup { .. } => "setup",
            Record::Challenge { .. } => "challenge",
            Record::Register { .. } => "register",
            Record::Sign { .. } => "sign",
            Record::Forgery { .. } => "forgery",
        }
    }

    fn args_and_response(&self) -> (String, String) {
        match self {
            Record::Setup { scheme, params } => (scheme.to_string(), params.clone()),
            Record::Challenge { pk } => (String::new(), pk.clone()),
            Record::Register { pk, sk, accepted } => {
                (format!("{pk}|{sk}"), accepted.to_string())
            }
            Record::Sign {
                keys,
                msgs,
                prev,
                m,
                response,
            } => (
                format!(
                    "{}|{}|{}|{}",
                    keys.join(","),
                    msgs.iter().map(|v| v.join(",")).collect::<Vec<_>>().join(";"),
                    prev.as_deref().unwrap_or(""),
                    m.join(",")
                ),
                response.clone().unwrap_or_default(),
            ),
            Record::Forgery { keys, msgs, sig } => (
                format!(
                    "{}|{}",
                    keys.join(","),
                    msgs.iter().map(|v| v.join(",")).collect::<Vec<_>>().join(";")
                ),
                sig.clone(),
            ),
        }
    }
}

/// The three winning conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verifies: bool,
    /// The challenge key appears in the forgery and its message (or
    /// message/position pair) was never signed by the oracle.
    pub fresh: bool,
    /// Every other key in the forgery was registered.
    pub certified: bool,
}

impl Verdict {
    pub fn wins(&self) -> bool {
        self.verifies && self.fresh && self.certified
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub strategy: Strategy,
    pub records: Vec<Record>,
    pub verdict: bool,
}

/// Compact audit line per record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub query: String,
    pub args_hash: String,
    pub response_hash: String,
}

fn sha_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

impl GameTranscript {
    pub fn audit(&self) -> Vec<AuditRecord> {
        self.records
            .iter()
            .map(|r| {
                let (args, resp) = r.args_and_response();
                AuditRecord {
                    query: r.name().to_string(),
                    args_hash: sha_hex(&args),
                    response_hash: sha_hex(&resp),
                }
            })
            .collect()
    }

    pub fn audit_json(&self) -> String {
        serde_json::to_string_pretty(&self.audit()).expect("plain data")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn hx(b: &[u8]) -> String {
    hex::encode(b)
}

fn unhex(s: &str) -> Result<Vec<u8>, GameFault> {
    hex::decode(s).map_err(|_| GameFault::Malformed("bad hex"))
}

fn scalar_hex(s: &Scalar) -> String {
    hx(&codec::encode_scalar(s))
}

fn scalars_hex(v: &[Scalar]) -> Vec<String> {
    v.iter().map(scalar_hex).collect()
}

fn unhex_scalars(v: &[String]) -> Result<Vec<Scalar>, GameFault> {
    v.iter()
        .map(|s| Ok(codec::decode_scalar(&unhex(s)?)?))
        .collect()
}

fn sk_hex(sk: &SasSecretKey) -> String {
    let flat: Vec<Scalar> = sk.y.iter().flat_map(|(a, b)| [*a, *b]).collect();
    scalars_hex(&flat).concat()
}

/// Keys, messages, and either the oracle's reply or the claimed aggregate.
type Entry<T> = (Vec<Vec<u8>>, Vec<Vec<Scalar>>, T);

/// Decoded log, shared by all schemes.
struct Log {
    scheme: Scheme,
    params: Vec<u8>,
    challenge: Vec<u8>,
    certified: HashSet<Vec<u8>>,
    signed: Vec<Entry<Vec<Scalar>>>,
    forgery: Entry<AggSignature>,
}

fn parse(t: &GameTranscript) -> Result<Log, GameFault> {
    let mut setup = None;
    let mut challenge = None;
    let mut certified = HashSet::new();
    let mut signed = Vec::new();
    let mut forgery = None;
    for r in &t.records {
        match r {
            Record::Setup { scheme, params } => setup = Some((*scheme, unhex(params)?)),
            Record::Challenge { pk } => challenge = Some(unhex(pk)?),
            Record::Register { pk, accepted, .. } => {
                if *accepted {
                    certified.insert(unhex(pk)?);
                }
            }
            Record::Sign {
                keys,
                msgs,
                m,
                response,
                ..
            } => {
                if response.is_some() {
                    let keys = keys.iter().map(|k| unhex(k)).collect::<Result<_, _>>()?;
                    let msgs = msgs
                        .iter()
                        .map(|v| unhex_scalars(v))
                        .collect::<Result<_, _>>()?;
                    signed.push((keys, msgs, unhex_scalars(m)?));
                }
            }
            Record::Forgery { keys, msgs, sig } => {
                if forgery.is_some() {
                    return Err(GameFault::Malformed("more than one forgery"));
                }
                let keys = keys.iter().map(|k| unhex(k)).collect::<Result<_, _>>()?;
                let msgs = msgs
                    .iter()
                    .map(|v| unhex_scalars(v))
                    .collect::<Result<_, _>>()?;
                forgery = Some((keys, msgs, AggSignature::from_envelope(&unhex(sig)?)?));
            }
        }
    }
    let (scheme, params) = setup.ok_or(GameFault::Malformed("no setup record"))?;
    Ok(Log {
        scheme,
        params,
        challenge: challenge.ok_or(GameFault::Malformed("no challenge record"))?,
        certified,
        signed,
        forgery: forgery.ok_or(GameFault::Malformed("no forgery record"))?,
    })
}

/// Recomputes the verdict from the records alone.
pub fn judge(t: &GameTranscript) -> Result<Verdict, GameFault> {
    let log = parse(t)?;
    let (fkeys, fmsgs, sig) = &log.forgery;
    match log.scheme {
        Scheme::Ds { .. } => {
            let _pp = DsParams::from_envelope(&log.params)?;
            let pk = DsPublicKey::from_envelope(&log.challenge)?;
            let [m] = fmsgs.as_slice() else {
                return Err(GameFault::Malformed("base forgery carries one message"));
            };
            let on_target = fkeys.len() == 1 && fkeys[0] == log.challenge;
            let fresh = on_target && !log.signed.iter().any(|(_, _, q)| q == m);
            Ok(Verdict {
                verifies: ds::verify(&pk, m, sig),
                fresh,
                certified: true,
            })
        }
        Scheme::Sas { .. } => {
            let pp = SharedParams::from_envelope(&log.params)?;
            let keys = fkeys
                .iter()
                .map(|k| SasPublicKey::from_envelope(k))
                .collect::<Result<Vec<_>, _>>()?;
            let verifies = sas::verify(&pp, &keys, fmsgs, sig);
            let target = fkeys.iter().position(|k| *k == log.challenge);
            let fresh = match target {
                Some(i) => fmsgs
                    .get(i)
                    .is_some_and(|m| !log.signed.iter().any(|(_, _, q)| q == m)),
                None => false,
            };
            let certified = fkeys
                .iter()
                .all(|k| *k == log.challenge || log.certified.contains(k));
            Ok(Verdict {
                verifies,
                fresh,
                certified,
            })
        }
        Scheme::Oms => {
            let pp = OmsParams::from_envelope(&log.params)?;
            let keys = fkeys
                .iter()
                .map(|k| OmsPublicKey::from_envelope(k))
                .collect::<Result<Vec<_>, _>>()?;
            let [m] = fmsgs.as_slice() else {
                return Err(GameFault::Malformed("ordered forgery carries one message"));
            };
            let [m] = m.as_slice() else {
                return Err(GameFault::Malformed("ordered message is one scalar"));
            };
            let verifies = oms::verify_with_list(&pp, &keys, m, sig);
            // Signing queries record (m, n) with n the position the oracle signed at.
            let queried: HashSet<(Vec<u8>, usize)> = log
                .signed
                .iter()
                .map(|(ks, _, q)| (codec::encode_scalar(&q[0]).to_vec(), ks.len() + 1))
                .collect();
            let target = fkeys.iter().position(|k| *k == log.challenge);
            let fresh = target.is_some_and(|i| {
                !queried.contains(&(codec::encode_scalar(m).to_vec(), i + 1))
            });
            let certified = fkeys
                .iter()
                .all(|k| *k == log.challenge || log.certified.contains(k));
            Ok(Verdict {
                verifies,
                fresh,
                certified,
            })
        }
    }
}

/// Replays the game and returns the transcript with its verdict.
pub fn run_euf_cma_game<R: RngCore + ?Sized>(
    scheme: Scheme,
    strategy: Strategy,
    rng: &mut R,
) -> Result<GameTranscript, GameFault> {
    let records = match scheme {
        Scheme::Ds { ell } => ds_game(ell, strategy, rng)?,
        Scheme::Sas { ell } => sas_game(ell, strategy, rng)?,
        Scheme::Oms => oms_game(strategy, rng)?,
    };
    let mut t = GameTranscript {
        strategy,
        records,
        verdict: false,
    };
    t.verdict = judge(&t)?.wins();
    Ok(t)
}

fn random_msg<R: RngCore + ?Sized>(ell: usize, rng: &mut R) -> Vec<Scalar> {
    (0..ell).map(|_| groups::sample_nonzero_scalar(rng)).collect()
}

fn ds_game<R: RngCore + ?Sized>(
    ell: usize,
    strategy: Strategy,
    rng: &mut R,
) -> Result<Vec<Record>, GameFault> {
    if strategy == Strategy::UnregisteredCosigner {
        return Err(GameFault::Unsupported(strategy, Scheme::Ds { ell }));
    }
    let pp = DsParams::setup(rng);
    let kp = ds::keygen(&pp, ell, rng).map_err(|_| GameFault::Malformed("ℓ = 0"))?;
    let pk_hex = hx(&kp.pk.to_envelope());
    let mut log = vec![
        Record::Setup {
            scheme: Scheme::Ds { ell },
            params: hx(&pp.to_envelope()),
        },
        Record::Challenge { pk: pk_hex.clone() },
    ];
    let m = random_msg(ell, rng);
    let sig = ds::sign(&pp, &kp.sk, &m, rng).map_err(|_| GameFault::OracleRefused)?;
    log.push(Record::Sign {
        keys: vec![],
        msgs: vec![],
        prev: None,
        m: scalars_hex(&m),
        response: Some(hx(&sig.to_envelope())),
    });
    let forged_m = match strategy {
        Strategy::HonestReplay => m,
        Strategy::OrderTransposition => m.iter().rev().copied().collect(),
        Strategy::MessageSubstitution => {
            let mut m2 = m;
            m2[0] += Scalar::ONE;
            m2
        }
        Strategy::UnregisteredCosigner => unreachable!(),
    };
    log.push(Record::Forgery {
        keys: vec![pk_hex],
        msgs: vec![scalars_hex(&forged_m)],
        sig: hx(&ds::rerandomize(&sig, rng).to_envelope()),
    });
    Ok(log)
}

/// Oracle side of the aggregate games: honest signing with the challenge key.
struct SasOracle<'a> {
    pp: &'a SharedParams,
    sk: &'a SasSecretKey,
}

impl SasOracle<'_> {
    fn sign<R: RngCore + ?Sized>(
        &self,
        keys: &[SasPublicKey],
        msgs: &[Vec<Scalar>],
        prev: Option<&AggSignature>,
        m: &[Scalar],
        rng: &mut R,
        log: &mut Vec<Record>,
    ) -> Option<AggSignature> {
        let resp = sas::sign_append(self.pp, self.sk, keys, msgs, m, prev, rng).ok();
        log.push(Record::Sign {
            keys: keys.iter().map(|k| hx(&k.to_envelope())).collect(),
            msgs: msgs.iter().map(|v| scalars_hex(v)).collect(),
            prev: prev.map(|s| hx(&s.to_envelope())),
            m: scalars_hex(m),
            response: resp.map(|s| hx(&s.to_envelope())),
        });
        resp
    }
}

fn register(
    pp: &SharedParams,
    reg: &mut KeyRegistry,
    kp: &SasKeyPair,
    log: &mut Vec<Record>,
) -> bool {
    let accepted = reg.register(pp, kp) == Registration::Accepted;
    log.push(Record::Register {
        pk: hx(&kp.pk.to_envelope()),
        sk: sk_hex(&kp.sk),
        accepted,
    });
    accepted
}

/// A key the adversary cannot register, chosen so that
/// `Σ_j m*_j Ṽ*_j + Σ_j Ṽ_j^{rogue} = H̃^α · D̃^{-β}` with all-ones rogue
/// messages. `(G, X₁·G^β, X₂·G^α)` then verifies without any secret.
fn rogue_key<R: RngCore + ?Sized>(
    pp: &SharedParams,
    target_part: G2Projective,
    rng: &mut R,
) -> (SasPublicKey, Scalar, Scalar) {
    let alpha = groups::sample_nonzero_scalar(rng);
    let beta = groups::sample_nonzero_scalar(rng);
    let mut v: Vec<G2Projective> = (1..pp.ell).map(|_| groups::sample_g2_star(rng)).collect();
    let rest: G2Projective = v.iter().sum();
    v.insert(0, pp.h * alpha - pp.d * beta - target_part - rest);
    (SasPublicKey { v }, alpha, beta)
}

fn sas_game<R: RngCore + ?Sized>(
    ell: usize,
    strategy: Strategy,
    rng: &mut R,
) -> Result<Vec<Record>, GameFault> {
    let pp = SharedParams::setup(ell, rng).map_err(|_| GameFault::Malformed("ℓ = 0"))?;
    let target = sas::keygen(&pp, rng);
    let mut log = vec![
        Record::Setup {
            scheme: Scheme::Sas { ell },
            params: hx(&pp.to_envelope()),
        },
        Record::Challenge {
            pk: hx(&target.pk.to_envelope()),
        },
    ];
    let oracle = SasOracle {
        pp: &pp,
        sk: &target.sk,
    };
    let mut reg = KeyRegistry::new();
    let own = sas::keygen(&pp, rng);
    register(&pp, &mut reg, &own, &mut log);

    // Adversary's own hop, then the oracle signs second.
    let m_own = random_msg(ell, rng);
    let m_t = random_msg(ell, rng);
    let s1 = sas::sign_append(&pp, &own.sk, &[], &[], &m_own, None, rng)
        .map_err(|_| GameFault::OracleRefused)?;
    let keys = vec![own.pk.clone()];
    let msgs = vec![m_own.clone()];
    let s2 = oracle
        .sign(&keys, &msgs, Some(&s1), &m_t, rng, &mut log)
        .ok_or(GameFault::OracleRefused)?;

    let (fkeys, fmsgs, fsig) = match strategy {
        Strategy::HonestReplay => (
            vec![own.pk.clone(), target.pk.clone()],
            vec![m_own, m_t],
            s2,
        ),
        Strategy::OrderTransposition => (
            vec![target.pk.clone(), own.pk.clone()],
            vec![m_t, m_own],
            s2,
        ),
        Strategy::MessageSubstitution => {
            let mut m2 = m_t;
            m2[0] += Scalar::ONE;
            (vec![own.pk.clone(), target.pk.clone()], vec![m_own, m2], s2)
        }
        Strategy::UnregisteredCosigner => {
            let m_star: Vec<Scalar> = m_t.iter().map(|x| *x + Scalar::ONE).collect();
            let target_part = groups::g2_msm(&target.pk.v, &m_star);
            let (rogue, alpha, beta) = rogue_key(&pp, target_part, rng);
            // The registration attempt fails: no secret key matches.
            let guess = SasKeyPair {
                pk: rogue.clone(),
                sk: sas::keygen(&pp, rng).sk,
            };
            register(&pp, &mut reg, &guess, &mut log);
            let base = AggSignature::new(pp.g, pp.x1 + pp.g * beta, pp.x2 + pp.g * alpha);
            (
                vec![target.pk.clone(), rogue],
                vec![m_star, vec![Scalar::ONE; ell]],
                ds::rerandomize(&base, rng),
            )
        }
    };
    log.push(Record::Forgery {
        keys: fkeys.iter().map(|k| hx(&k.to_envelope())).collect(),
        msgs: fmsgs.iter().map(|v| scalars_hex(v)).collect(),
        sig: hx(&fsig.to_envelope()),
    });
    Ok(log)
}

fn oms_game<R: RngCore + ?Sized>(strategy: Strategy, rng: &mut R) -> Result<Vec<Record>, GameFault> {
    let pp = OmsParams::setup(rng);
    let target = oms::keygen(&pp, rng);
    let mut log = vec![
        Record::Setup {
            scheme: Scheme::Oms,
            params: hx(&pp.to_envelope()),
        },
        Record::Challenge {
            pk: hx(&target.pk.to_envelope()),
        },
    ];
    let mut reg = KeyRegistry::new();
    let own = oms::keygen(&pp, rng);
    register(&pp.shared, &mut reg, &own.to_sas(), &mut log);

    let m = groups::sample_nonzero_scalar(rng);
    let s1 = oms::sign_append(&pp, &own.sk, &[], &m, None, rng)
        .map_err(|_| GameFault::OracleRefused)?;
    let resp = oms::sign_append(&pp, &target.sk, &[own.pk], &m, Some(&s1), rng).ok();
    log.push(Record::Sign {
        keys: vec![hx(&own.pk.to_envelope())],
        msgs: vec![],
        prev: Some(hx(&s1.to_envelope())),
        m: vec![scalar_hex(&m)],
        response: resp.map(|s| hx(&s.to_envelope())),
    });
    let s2 = resp.ok_or(GameFault::OracleRefused)?;

    let (fkeys, fm, fsig) = match strategy {
        Strategy::HonestReplay => (vec![own.pk, target.pk], m, s2),
        // Target moves to position 1, which the oracle never signed at.
        Strategy::OrderTransposition => (vec![target.pk, own.pk], m, s2),
        Strategy::MessageSubstitution => (vec![own.pk, target.pk], m + Scalar::ONE, s2),
        Strategy::UnregisteredCosigner => {
            // Rogue key b at position 2 with b₁ = Ṽ*₁^{-1} and
            // b₂ = (H̃^α D̃^{-β} Ṽ*₂^{-1})^{1/2}, so K̃₁ = 1 and
            // K̃₂ = H̃^α D̃^{-β} for any message.
            let alpha = groups::sample_nonzero_scalar(rng);
            let beta = groups::sample_nonzero_scalar(rng);
            let inv2 = Scalar::from(2u64).invert().unwrap();
            let p = &pp.shared;
            let rogue = OmsPublicKey {
                v: [-target.pk.v[0], (p.h * alpha - p.d * beta - target.pk.v[1]) * inv2],
            };
            let guess = SasKeyPair {
                pk: rogue.to_sas(),
                sk: oms::keygen(&pp, rng).sk,
            };
            register(p, &mut reg, &guess, &mut log);
            let base = AggSignature::new(p.g, p.x1 + p.g * beta, p.x2 + p.g * alpha);
            (
                vec![target.pk, rogue],
                m + Scalar::ONE,
                ds::rerandomize(&base, rng),
            )
        }
    };
    log.push(Record::Forgery {
        keys: fkeys.iter().map(|k| hx(&k.to_envelope())).collect(),
        msgs: vec![vec![scalar_hex(&fm)]],
        sig: hx(&fsig.to_envelope()),
    });
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn run(scheme: Scheme, s: Strategy, seed: u64) -> (GameTranscript, Verdict) {
        let t = run_euf_cma_game(scheme, s, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        let v = judge(&t).unwrap();
        (t, v)
    }

    #[test]
    fn honest_replay_is_not_fresh() {
        for scheme in [Scheme::Ds { ell: 2 }, Scheme::Sas { ell: 2 }, Scheme::Oms] {
            let (t, v) = run(scheme, Strategy::HonestReplay, 1);
            assert!(v.verifies && !v.fresh && v.certified, "{scheme}");
            assert!(!t.verdict);
        }
    }

    #[test]
    fn transposition_fails_verification() {
        let (_, v) = run(Scheme::Oms, Strategy::OrderTransposition, 2);
        assert_eq!(
            v,
            Verdict {
                verifies: false,
                fresh: true,
                certified: true
            }
        );
        let (t, v) = run(Scheme::Ds { ell: 3 }, Strategy::OrderTransposition, 2);
        assert!(!v.verifies && !t.verdict);
        // Aggregate verification is a product over signers, so SAS accepts
        // the reordered tuple; the target's message was queried, though.
        let (t, v) = run(Scheme::Sas { ell: 2 }, Strategy::OrderTransposition, 2);
        assert!(v.verifies && !v.fresh && !t.verdict);
    }

    #[test]
    fn rogue_cosigner_verifies_but_is_uncertified() {
        for scheme in [Scheme::Sas { ell: 1 }, Scheme::Sas { ell: 3 }, Scheme::Oms] {
            let (t, v) = run(scheme, Strategy::UnregisteredCosigner, 3);
            assert_eq!(
                v,
                Verdict {
                    verifies: true,
                    fresh: true,
                    certified: false
                },
                "{scheme}"
            );
            assert!(!t.verdict);
        }
        assert!(matches!(
            run_euf_cma_game(
                Scheme::Ds { ell: 1 },
                Strategy::UnregisteredCosigner,
                &mut ChaCha20Rng::seed_from_u64(3)
            ),
            Err(GameFault::Unsupported(..))
        ));
    }

    #[test]
    fn substitution_fails_verification() {
        for scheme in [Scheme::Ds { ell: 1 }, Scheme::Sas { ell: 2 }, Scheme::Oms] {
            let (_, v) = run(scheme, Strategy::MessageSubstitution, 4);
            assert!(!v.verifies && v.fresh, "{scheme}");
        }
    }

    #[test]
    fn replay_from_json_gives_same_verdict() {
        let (t, v) = run(Scheme::Oms, Strategy::UnregisteredCosigner, 5);
        let back = GameTranscript::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(judge(&back).unwrap(), v);
        let (again, _) = run(Scheme::Oms, Strategy::UnregisteredCosigner, 5);
        assert_eq!(again, t);
        let audit = t.audit();
        assert_eq!(audit.len(), t.records.len());
        assert_eq!(audit[0].query, "setup");
        assert_eq!(audit.last().unwrap().query, "forgery");
        assert_eq!(audit[0].args_hash.len(), 64);
    }

    #[test]
    fn judge_rejects_incomplete_logs() {
        let (mut t, _) = run(Scheme::Sas { ell: 1 }, Strategy::HonestReplay, 6);
        t.records.pop();
        assert_eq!(judge(&t), Err(GameFault::Malformed("no forgery record")));
    }
}
