//! A Diffie–Hellman keyed MAC as the reference scheme, and three variants
//! that each break exactly one security property.
//!
//! | scheme         | differs from `dhmac` by                                  |
//! |----------------|----------------------------------------------------------|
//! | `leaky`        | trailer carries the sender's public key                  |
//! | `forgeable`    | verify also accepts the all-zero tag                     |
//! | `transferable` | trailer is `0x00` for sign and `0x01` for simulate       |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dvs::{check_own_key, check_peer_key, Bottom, DvsScheme, KeyPair, Message, Params, Signature};
use crate::group::{exp, hash_to_tag, setup_group, GroupElement, GroupProfile, Scalar, Tag};
use crate::Error;

const SIGN_DOMAIN: &[u8] = b"dvs-sign";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    Dhmac,
    Leaky,
    Forgeable,
    Transferable,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::Dhmac,
        SchemeId::Leaky,
        SchemeId::Forgeable,
        SchemeId::Transferable,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::Dhmac => "dhmac",
            SchemeId::Leaky => "leaky",
            SchemeId::Forgeable => "forgeable",
            SchemeId::Transferable => "transferable",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                kind: "scheme",
                name: s.to_string(),
            })
    }
}

/// The DH-MAC family. `id` selects which clause, if any, is broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DhMac {
    id: SchemeId,
    profile: GroupProfile,
}

impl DhMac {
    pub fn new(id: SchemeId, profile: GroupProfile) -> Self {
        DhMac { id, profile }
    }

    pub fn id(&self) -> SchemeId {
        self.id
    }

    pub fn profile(&self) -> GroupProfile {
        self.profile
    }

    fn tag(shared: GroupElement, pk_s: GroupElement, pk_v: GroupElement, m: &Message, params: &Params) -> Tag {
        hash_to_tag(
            SIGN_DOMAIN,
            &[&shared.encode(), &pk_s.encode(), &pk_v.encode(), m.as_bytes()],
            params.kappa,
        )
    }

    fn sign_trailer(&self, pk_s: GroupElement, params: &Params) -> Vec<u8> {
        match self.id {
            SchemeId::Leaky => pk_s.to_fixed_bytes(&params.group),
            SchemeId::Transferable => vec![0x00],
            SchemeId::Dhmac | SchemeId::Forgeable => Vec::new(),
        }
    }

    fn simulate_trailer(&self, pk_s: GroupElement, params: &Params) -> Vec<u8> {
        match self.id {
            SchemeId::Transferable => vec![0x01],
            _ => self.sign_trailer(pk_s, params),
        }
    }

    fn ignores_trailer(&self) -> bool {
        matches!(self.id, SchemeId::Leaky | SchemeId::Transferable)
    }
}

impl DvsScheme for DhMac {
    fn label(&self) -> &str {
        self.id.as_str()
    }

    fn setup(&self, kappa: u32, _rng: &mut dyn RngCore) -> Result<Params, Error> {
        let group = setup_group(kappa, self.profile)?;
        Ok(Params {
            group,
            scheme_label: self.id.as_str().to_string(),
            kappa,
        })
    }

    fn keygen(&self, params: &Params, rng: &mut dyn RngCore) -> KeyPair {
        let sk = params.group.random_scalar(rng);
        KeyPair {
            pk: exp(params.group.generator(), sk, &params.group),
            sk,
        }
    }

    fn sign(
        &self,
        sk_s: Scalar,
        pk_s: GroupElement,
        pk_v: GroupElement,
        m: &Message,
        params: &Params,
        _rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom> {
        check_own_key(sk_s, pk_s, params)?;
        check_peer_key(pk_v, params)?;
        let shared = exp(pk_v, sk_s, &params.group);
        Ok(Signature::with_extra(
            Self::tag(shared, pk_s, pk_v, m, params),
            self.sign_trailer(pk_s, params),
        ))
    }

    fn verify(
        &self,
        sk_v: Scalar,
        pk_v: GroupElement,
        pk_s: GroupElement,
        m: &Message,
        sigma: &Signature,
        params: &Params,
    ) -> Result<bool, Bottom> {
        check_own_key(sk_v, pk_v, params)?;
        check_peer_key(pk_s, params)?;
        if self.id == SchemeId::Forgeable
            && sigma.tag.len() == params.group.tag_len()
            && sigma.tag.is_all_zero()
        {
            return Ok(true);
        }
        if !self.ignores_trailer() && !sigma.extra.is_empty() {
            return Ok(false);
        }
        let shared = exp(pk_s, sk_v, &params.group);
        Ok(Self::tag(shared, pk_s, pk_v, m, params) == sigma.tag)
    }

    fn simulate(
        &self,
        sk_v: Scalar,
        pk_v: GroupElement,
        pk_s: GroupElement,
        m: &Message,
        params: &Params,
        _rng: &mut dyn RngCore,
    ) -> Result<Signature, Bottom> {
        check_own_key(sk_v, pk_v, params)?;
        check_peer_key(pk_s, params)?;
        let shared = exp(pk_s, sk_v, &params.group);
        Ok(Signature::with_extra(
            Self::tag(shared, pk_s, pk_v, m, params),
            self.simulate_trailer(pk_s, params),
        ))
    }
}

pub fn make_scheme(id: SchemeId) -> Arc<dyn DvsScheme> {
    make_scheme_with(id, GroupProfile::Standard)
}

pub fn make_scheme_with(id: SchemeId, profile: GroupProfile) -> Arc<dyn DvsScheme> {
    Arc::new(DhMac::new(id, profile))
}
