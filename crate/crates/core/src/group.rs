//! Prime-order subgroups of `Z_p^*` for safe primes `p = 2q + 1`, plus the
//! tag hash used by the signature schemes.
//!
//! Arithmetic is plain `u64` with `u128` intermediates, which caps the
//! standard profile at 62-bit subgroup orders. That is plenty for games run
//! at desk scale and keeps a trial in the low microseconds.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Error;

/// Smallest security parameter any profile accepts.
pub const MIN_KAPPA: u32 = 8;
/// Largest security parameter the standard profile can realize in `u64`.
pub const MAX_STANDARD_KAPPA: u32 = 62;

const HASH_LABEL: &str = "sha256";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GroupProfile {
    /// The fixed group `p = 23, q = 11, g = 2`.
    Toy,
    /// Smallest safe prime whose subgroup order has exactly `kappa` bits.
    #[default]
    Standard,
}

impl GroupProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupProfile::Toy => "toy",
            GroupProfile::Standard => "standard",
        }
    }
}

impl std::str::FromStr for GroupProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toy" => Ok(GroupProfile::Toy),
            "standard" => Ok(GroupProfile::Standard),
            other => Err(Error::UnknownIdentifier {
                kind: "profile",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupParams {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    pub kappa: u32,
    pub profile: GroupProfile,
    /// Name of the digest behind [`hash_to_tag`].
    pub hash: String,
}

impl GroupParams {
    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g)
    }

    /// Bytes needed to write any element of `Z_p` big-endian.
    pub fn element_width(&self) -> usize {
        byte_len(self.p)
    }

    pub fn tag_len(&self) -> usize {
        tag_len(self.kappa)
    }

    pub fn is_member(&self, x: GroupElement) -> bool {
        x.0 != 0 && x.0 < self.p && pow_mod(x.0, self.q, self.p) == 1
    }

    /// Uniform scalar in `[0, q)`.
    pub fn random_scalar(&self, rng: &mut dyn RngCore) -> Scalar {
        Scalar(rng.gen_range(0..self.q))
    }

    fn validate(&self) -> bool {
        is_prime(self.p)
            && is_prime(self.q)
            && (self.p - 1).is_multiple_of(self.q)
            && self.g != 1
            && self.is_member(GroupElement(self.g))
    }
}

/// An element of `Z_p^*`. Values obtained from [`exp`] are always in the
/// order-`q` subgroup; [`GroupElement::from_raw`] can build anything, so
/// code receiving keys from outside checks [`GroupParams::is_member`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(u64);

impl GroupElement {
    pub fn new(value: u64, params: &GroupParams) -> Option<Self> {
        let x = GroupElement(value);
        params.is_member(x).then_some(x)
    }

    pub fn from_raw(value: u64) -> Self {
        GroupElement(value)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    /// Minimal big-endian bytes (at least one byte).
    pub fn to_minimal_bytes(&self) -> Vec<u8> {
        let bytes = self.0.to_be_bytes();
        let skip = bytes.iter().take_while(|&&b| b == 0).count().min(7);
        bytes[skip..].to_vec()
    }

    /// Canonical encoding: one length byte followed by the minimal
    /// big-endian integer.
    pub fn encode(&self) -> Vec<u8> {
        let body = self.to_minimal_bytes();
        let mut out = Vec::with_capacity(body.len() + 1);
        out.push(body.len() as u8);
        out.extend_from_slice(&body);
        out
    }

    /// Big-endian bytes left-padded to the width of the modulus.
    pub fn to_fixed_bytes(&self, params: &GroupParams) -> Vec<u8> {
        let width = params.element_width();
        self.0.to_be_bytes()[8 - width..].to_vec()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scalar(u64);

impl Scalar {
    pub fn new(value: u64, params: &GroupParams) -> Option<Self> {
        (value < params.q).then_some(Scalar(value))
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tag(Vec<u8>);

impl Tag {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Tag(bytes)
    }

    pub fn zero(kappa: u32) -> Self {
        Tag(vec![0; tag_len(kappa)])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

/// `2 * ceil(kappa / 8)` bytes.
pub fn tag_len(kappa: u32) -> usize {
    2 * (kappa as usize).div_ceil(8)
}

pub fn setup_group(kappa: u32, profile: GroupProfile) -> Result<GroupParams, Error> {
    if kappa < MIN_KAPPA {
        return Err(Error::KappaTooSmall(kappa));
    }
    match profile {
        GroupProfile::Toy => Ok(GroupParams {
            p: 23,
            q: 11,
            g: 2,
            kappa,
            profile,
            hash: HASH_LABEL.to_string(),
        }),
        GroupProfile::Standard => {
            if kappa > MAX_STANDARD_KAPPA {
                return Err(Error::KappaTooLarge(kappa));
            }
            static CACHE: OnceLock<Mutex<HashMap<u32, GroupParams>>> = OnceLock::new();
            let cache = CACHE.get_or_init(Default::default);
            let mut cache = cache.lock().expect("group cache poisoned");
            Ok(cache
                .entry(kappa)
                .or_insert_with(|| standard_group(kappa))
                .clone())
        }
    }
}

fn standard_group(kappa: u32) -> GroupParams {
    let lo = 1u64 << (kappa - 1);
    let mut q = lo | 1;
    loop {
        if is_prime(q) && is_prime(2 * q + 1) {
            break;
        }
        q += 2;
    }
    // 4 = 2^2 is a quadratic residue != 1, hence of order q when p = 2q + 1.
    let params = GroupParams {
        p: 2 * q + 1,
        q,
        g: 4,
        kappa,
        profile: GroupProfile::Standard,
        hash: HASH_LABEL.to_string(),
    };
    debug_assert!(params.validate());
    params
}

pub fn exp(base: GroupElement, e: Scalar, params: &GroupParams) -> GroupElement {
    GroupElement(pow_mod(base.0, e.0, params.p))
}

pub fn hash_to_tag(domain_label: &[u8], parts: &[&[u8]], kappa: u32) -> Tag {
    let mut preimage = Vec::new();
    push_prefixed(&mut preimage, domain_label);
    preimage.extend_from_slice(&(parts.len() as u32).to_be_bytes());
    for part in parts {
        push_prefixed(&mut preimage, part);
    }
    let len = tag_len(kappa);
    let mut out = Vec::with_capacity(len);
    let mut block = 0u32;
    while out.len() < len {
        let digest = Sha256::new()
            .chain_update(block.to_be_bytes())
            .chain_update(&preimage)
            .finalize();
        let take = (len - out.len()).min(digest.len());
        out.extend_from_slice(&digest[..take]);
        block += 1;
    }
    Tag(out)
}

fn push_prefixed(buf: &mut Vec<u8>, bytes: &[u8]) {
    buf.extend_from_slice(&(bytes.len() as u64).to_be_bytes());
    buf.extend_from_slice(bytes);
}

fn byte_len(x: u64) -> usize {
    ((64 - x.leading_zeros() as usize).div_ceil(8)).max(1)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> GroupParams {
        setup_group(8, GroupProfile::Toy).unwrap()
    }

    #[test]
    fn toy_profile_is_fixed() {
        let a = toy();
        assert_eq!((a.p, a.q, a.g), (23, 11, 2));
        assert_eq!(a, toy());
        assert!(a.validate());
    }

    #[test]
    fn rejects_small_kappa() {
        assert!(matches!(
            setup_group(4, GroupProfile::Toy),
            Err(Error::KappaTooSmall(4))
        ));
        assert!(setup_group(7, GroupProfile::Standard).is_err());
        assert!(setup_group(63, GroupProfile::Standard).is_err());
    }

    #[test]
    fn standard_groups_are_valid() {
        for kappa in [8, 9, 16, 24, 32, 40, 48, 62] {
            let params = setup_group(kappa, GroupProfile::Standard).unwrap();
            assert!(params.validate(), "kappa {kappa}");
            assert_eq!(64 - params.q.leading_zeros(), kappa);
        }
        // smallest q >= 128 with q and 2q+1 prime
        let p8 = setup_group(8, GroupProfile::Standard).unwrap();
        assert_eq!((p8.q, p8.p), (131, 263));
    }

    #[test]
    fn exp_examples() {
        let params = toy();
        let e = |b, x| exp(GroupElement(b), Scalar(x), &params).value();
        assert_eq!(e(2, 3), 8);
        assert_eq!(e(2, 11 % 11), 1);
        // exponent equal to the group order, passed unreduced
        assert_eq!(pow_mod(2, 11, 23), 1);
        assert_eq!(e(8, 4), 2);
    }

    #[test]
    fn diffie_hellman_symmetry_exhaustive() {
        let params = toy();
        let g = params.generator();
        for a in 0..params.q {
            for b in 0..params.q {
                let (a, b) = (Scalar(a), Scalar(b));
                let ab = exp(exp(g, a, &params), b, &params);
                let ba = exp(exp(g, b, &params), a, &params);
                assert_eq!(ab, ba);
                assert!(params.is_member(ab));
            }
        }
    }

    #[test]
    fn membership() {
        let params = toy();
        let members: Vec<u64> = (1..23).filter(|&v| GroupElement::new(v, &params).is_some()).collect();
        // quadratic residues mod 23
        assert_eq!(members, vec![1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18]);
        assert!(GroupElement::new(0, &params).is_none());
        assert!(GroupElement::new(23, &params).is_none());
    }

    #[test]
    fn encodings() {
        let params = setup_group(16, GroupProfile::Standard).unwrap();
        let x = GroupElement::from_raw(0x0102);
        assert_eq!(x.to_minimal_bytes(), vec![1, 2]);
        assert_eq!(x.encode(), vec![2, 1, 2]);
        assert_eq!(GroupElement::from_raw(1).encode(), vec![1, 1]);
        assert_eq!(x.to_fixed_bytes(&params).len(), params.element_width());
        assert_eq!(params.element_width(), 3);
    }

    #[test]
    fn hash_is_deterministic_and_separated() {
        let a = hash_to_tag(b"d", &[b"ab", b"c"], 16);
        assert_eq!(a, hash_to_tag(b"d", &[b"ab", b"c"], 16));
        assert_ne!(a, hash_to_tag(b"d", &[b"a", b"bc"], 16));
        assert_ne!(a, hash_to_tag(b"e", &[b"ab", b"c"], 16));
        assert_eq!(hash_to_tag(b"d", &[], 8).len(), 2);
        assert_eq!(hash_to_tag(b"d", &[], 9).len(), 4);
        assert_eq!(hash_to_tag(b"d", &[], 256).len(), 64);
    }

    #[test]
    fn random_scalars_cover_toy_range() {
        use rand::SeedableRng;
        let params = toy();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        let mut seen = [false; 11];
        for _ in 0..1000 {
            seen[params.random_scalar(&mut rng).value() as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
