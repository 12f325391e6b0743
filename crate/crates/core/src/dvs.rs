//! The five-algorithm designated verifier signature contract.
//!
//! Every algorithm takes its randomness as an explicit stream, so a scheme
//! is a deterministic function of its inputs and the caller's seed.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::group::{exp, GroupElement, GroupParams, Scalar, Tag};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub group: GroupParams,
    pub scheme_label: String,
    pub kappa: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyPair {
    pub pk: GroupElement,
    pub sk: Scalar,
}

impl KeyPair {
    pub fn is_valid(&self, params: &Params) -> bool {
        exp(params.group.generator(), self.sk, &params.group) == self.pk
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Message(pub Vec<u8>);

impl Message {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Message {
    fn from(s: &str) -> Self {
        Message(s.as_bytes().to_vec())
    }
}

impl From<&[u8]> for Message {
    fn from(b: &[u8]) -> Self {
        Message(b.to_vec())
    }
}

/// A tag plus an optional scheme-specific trailer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub tag: Tag,
    #[serde(default)]
    pub extra: Vec<u8>,
}

impl Signature {
    pub fn new(tag: Tag) -> Self {
        Signature { tag, extra: Vec::new() }
    }

    pub fn with_extra(tag: Tag, extra: Vec<u8>) -> Self {
        Signature { tag, extra }
    }

    /// `tag || extra`
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.tag.as_bytes().to_vec();
        out.extend_from_slice(&self.extra);
        out
    }

    pub fn from_bytes(bytes: &[u8], tag_len: usize) -> Option<Self> {
        (bytes.len() >= tag_len).then(|| Signature {
            tag: Tag::from_bytes(bytes[..tag_len].to_vec()),
            extra: bytes[tag_len..].to_vec(),
        })
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The error symbol. Unlike a bare `⊥`, the reason distinguishes exclusion
/// by an oracle restriction from an invalid key or party index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bottom {
    InvalidKey,
    InvalidParty,
    RestrictedQuery,
}

impl fmt::Display for Bottom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bottom::InvalidKey => "invalid_key",
            Bottom::InvalidParty => "invalid_party",
            Bottom::RestrictedQuery => "restricted_query",
        };
        f.write_str(s)
    }
}

impl std::error::Error for Bottom {}

/// `(Setup, KeyGen, Sign, Verify, Simulate)`.
///
/// Argument order follows the usual convention: `sign` takes the sender's
/// keypair first, while `verify` and `simulate` take the verifier's keypair
/// first and the sender's public key after it.
pub trait DvsScheme: Send + Sync {
    fn label(&self) -> &str;

    fn setup(&self, kappa: u32, rng: &mut dyn RngCore) -> Result<Params, Error>;

    fn keygen(&self, params: &Params, rng: &mut dyn RngCore) -> KeyPair;

    fn sign(
        &self,
        sk_s: Scalar,
        pk_s: GroupElement,
        pk_v: GroupElement,
        m: &Message,
        params: &Params,
        rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom>;

    fn verify(
        &self,
        sk_v: Scalar,
        pk_v: GroupElement,
        pk_s: GroupElement,
        m: &Message,
        sigma: &Signature,
        params: &Params,
    ) -> Result<bool, Bottom>;

    fn simulate(
        &self,
        sk_v: Scalar,
        pk_v: GroupElement,
        pk_s: GroupElement,
        m: &Message,
        params: &Params,
        rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom>;

    /// `Sign[S][V](m)`
    fn sign_pair(
        &self,
        sender: &KeyPair,
        verifier_pk: GroupElement,
        m: &Message,
        params: &Params,
        rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom> {
        self.sign(sender.sk, sender.pk, verifier_pk, m, params, rng)
    }

    /// `Simulate[S][V](m)`
    fn simulate_pair(
        &self,
        sender_pk: GroupElement,
        verifier: &KeyPair,
        m: &Message,
        params: &Params,
        rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom> {
        self.simulate(verifier.sk, verifier.pk, sender_pk, m, params, rng)
    }

    /// `Verify[S][V](m, sigma)`
    fn verify_pair(
        &self,
        sender_pk: GroupElement,
        verifier: &KeyPair,
        m: &Message,
        sigma: &Signature,
        params: &Params,
    ) -> Result<bool, Bottom> {
        self.verify(verifier.sk, verifier.pk, sender_pk, m, sigma, params)
    }
}

/// Own-key validity: `pk = g^sk` and `pk` lies in the subgroup.
pub fn check_own_key(sk: Scalar, pk: GroupElement, params: &Params) -> Result<(), Bottom> {
    let group = &params.group;
    if sk.value() < group.q && group.is_member(pk) && exp(group.generator(), sk, group) == pk {
        Ok(())
    } else {
        Err(Bottom::InvalidKey)
    }
}

/// Counterparty validity: subgroup membership.
pub fn check_peer_key(pk: GroupElement, params: &Params) -> Result<(), Bottom> {
    if params.group.is_member(pk) {
        Ok(())
    } else {
        Err(Bottom::InvalidKey)
    }
}
