//! Registered-key model: a key is admitted only alongside a secret key that
//! reproduces it.

use std::collections::HashSet;

use crate::sas::{self, SasKeyPair, SasPublicKey, SharedParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Registration {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, Default)]
pub struct KeyRegistry {
    keys: HashSet<Vec<u8>>,
}

impl KeyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Admits `kp.pk` if `kverify` passes. Registering the same key twice is
    /// a no-op.
    pub fn register(&mut self, pp: &SharedParams, kp: &SasKeyPair) -> Registration {
        match sas::kverify(pp, &kp.pk, &kp.sk) {
            Ok(true) => {
                self.keys.insert(kp.pk.to_bytes());
                Registration::Accepted
            }
            _ => Registration::Rejected,
        }
    }

    pub fn contains(&self, pk: &SasPublicKey) -> bool {
        self.keys.contains(&pk.to_bytes())
    }

    /// True if every key in `keys` was registered.
    pub fn all_registered(&self, keys: &[SasPublicKey]) -> bool {
        keys.iter().all(|k| self.contains(k))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}
