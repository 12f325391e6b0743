//! The two-phase adversary contract and the built-in adversaries.
//!
//! An adversary only learns what the game hands it: a [`View`] in phase 1,
//! its own opaque [`AdversaryState`] plus the challenge signature in
//! phase 2, and whatever it gets out of the oracle handle. Built-ins keep
//! nothing on `self` that later phases depend on; cross-phase data rides in
//! the state so reduction wrappers can envelope it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dvs::{Bottom, KeyPair, Message, Params, Signature};
use crate::group::{GroupElement, Tag};
use crate::oracles::Oracles;
use crate::Error;

/// Which challenge request the game expects back from phase 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChallengeKind {
    /// `m*`; the game picks the senders.
    Fixed,
    /// `(m*, s_0, s_1, r)`.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicView {
    pub params: Params,
    /// `pk_{P_0} .. pk_{P_n}`
    pub pks: Vec<GroupElement>,
    pub challenge: ChallengeKind,
    /// Guesses are meaningful in `0..guess_range`.
    pub guess_range: usize,
}

impl PublicView {
    pub fn n(&self) -> usize {
        self.pks.len() - 1
    }
}

/// Both full keypairs, as the non-transferability game hands them out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NtView {
    pub params: Params,
    pub sender: KeyPair,
    pub verifier: KeyPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum View {
    Psi(PublicView),
    Nt(NtView),
}

impl View {
    pub fn params(&self) -> &Params {
        match self {
            View::Psi(v) => &v.params,
            View::Nt(v) => &v.params,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChallengeRequest {
    Message(Message),
    Adaptive { m: Message, s0: usize, s1: usize, r: usize },
    /// No usable request; the game scores the trial as a loss.
    Abstain,
}

/// Opaque bytes an adversary carries from phase 1 into phase 2.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AdversaryState(pub Vec<u8>);

impl AdversaryState {
    pub fn encode<T: Serialize>(value: &T) -> Self {
        AdversaryState(serde_json::to_vec(value).expect("adversary state serializes"))
    }

    pub fn decode<T: DeserializeOwned>(&self) -> Option<T> {
        serde_json::from_slice(&self.0).ok()
    }
}

pub trait TwoPhaseAdversary: Send {
    fn phase1(
        &mut self,
        view: &View,
        oracles: &mut dyn Oracles,
        rng: &mut dyn RngCore,
    ) -> (ChallengeRequest, AdversaryState);

    /// Returns `c'` (or `b'` in the non-transferability game).
    fn phase2(
        &mut self,
        state: AdversaryState,
        sigma_star: &Signature,
        oracles: &mut dyn Oracles,
        rng: &mut dyn RngCore,
    ) -> usize;
}

impl<A: TwoPhaseAdversary + ?Sized> TwoPhaseAdversary for Box<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        (**self).phase1(view, oracles, rng)
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        (**self).phase2(state, sigma_star, oracles, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forgery {
    pub m: Message,
    pub sigma: Signature,
    pub s: usize,
    pub v: usize,
}

/// Single-phase adversary for the strong unforgeability game.
pub trait Forger: Send {
    fn forge(&mut self, view: &PublicView, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> Forgery;
}

/// Fresh adversary per trial.
pub type AdversaryFactory = Arc<dyn Fn() -> Box<dyn TwoPhaseAdversary> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryId {
    Random,
    Trailer,
    ZeroForger,
    VerifyProbe,
    CrossoverProbe,
}

impl AdversaryId {
    pub const ALL: [AdversaryId; 5] = [
        AdversaryId::Random,
        AdversaryId::Trailer,
        AdversaryId::ZeroForger,
        AdversaryId::VerifyProbe,
        AdversaryId::CrossoverProbe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AdversaryId::Random => "random",
            AdversaryId::Trailer => "trailer",
            AdversaryId::ZeroForger => "zero-forger",
            AdversaryId::VerifyProbe => "verify-probe",
            AdversaryId::CrossoverProbe => "crossover-probe",
        }
    }

    /// The two-phase form, if this adversary has one.
    pub fn build(&self) -> Option<Box<dyn TwoPhaseAdversary>> {
        match self {
            AdversaryId::Random => Some(Box::new(RandomGuesser)),
            AdversaryId::Trailer => Some(Box::new(TrailerReader)),
            AdversaryId::VerifyProbe => Some(Box::new(VerifyProbe::default())),
            AdversaryId::CrossoverProbe => Some(Box::new(CrossoverProbe::default())),
            AdversaryId::ZeroForger => None,
        }
    }

    pub fn factory(&self) -> Option<AdversaryFactory> {
        let id = *self;
        id.build()?;
        Some(Arc::new(move || id.build().expect("checked above")))
    }

    pub fn build_forger(&self) -> Option<Box<dyn Forger>> {
        match self {
            AdversaryId::ZeroForger => Some(Box::new(ZeroForger)),
            _ => None,
        }
    }
}

impl fmt::Display for AdversaryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversaryId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                kind: "adversary",
                name: s.to_string(),
            })
    }
}

const CHALLENGE_MESSAGE: &str = "challenge";

fn default_request(view: &View) -> ChallengeRequest {
    let m = Message::from(CHALLENGE_MESSAGE);
    match view {
        View::Psi(v) if v.challenge == ChallengeKind::Adaptive => ChallengeRequest::Adaptive {
            m,
            s0: 0,
            s1: 1,
            r: v.n(),
        },
        _ => ChallengeRequest::Message(m),
    }
}

fn guess_range(view: &View) -> usize {
    match view {
        View::Psi(v) => v.guess_range.max(1),
        View::Nt(_) => 2,
    }
}

/// Guesses uniformly; on adaptive challenges always names `(0, 1, n)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomGuesser;

pub fn random_guesser() -> RandomGuesser {
    RandomGuesser
}

impl TwoPhaseAdversary for RandomGuesser {
    fn phase1(&mut self, view: &View, _: &mut dyn Oracles, _: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        (default_request(view), AdversaryState::encode(&guess_range(view)))
    }

    fn phase2(&mut self, state: AdversaryState, _: &Signature, _: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let range: usize = state.decode().unwrap_or(2);
        rng.gen_range(0..range.max(1))
    }
}

/// Reads `σ*.extra`: in the privacy games it looks the trailer up among the
/// known public keys, in the transferability game it outputs the trailer
/// bit. Picks a random legal `(s_0, s_1, r)` on adaptive challenges.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrailerReader;

pub fn trailer_reader() -> TrailerReader {
    TrailerReader
}

#[derive(Serialize, Deserialize)]
enum TrailerState {
    /// Candidate trailers, indexed by guess.
    Candidates(Vec<Vec<u8>>),
    Bit,
}

impl TwoPhaseAdversary for TrailerReader {
    fn phase1(&mut self, view: &View, _: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let m = Message::from(CHALLENGE_MESSAGE);
        match view {
            View::Psi(v) => {
                let encode = |pk: &GroupElement| pk.to_fixed_bytes(&v.params.group);
                match v.challenge {
                    ChallengeKind::Fixed => (
                        ChallengeRequest::Message(m),
                        AdversaryState::encode(&TrailerState::Candidates(v.pks.iter().map(encode).collect())),
                    ),
                    ChallengeKind::Adaptive => {
                        let n = v.n();
                        let s0 = rng.gen_range(0..=n);
                        let s1 = (s0 + rng.gen_range(1..=n)) % (n + 1);
                        let r = loop {
                            let r = rng.gen_range(0..=n);
                            if r != s0 && r != s1 {
                                break r;
                            }
                        };
                        let candidates = vec![encode(&v.pks[s0]), encode(&v.pks[s1])];
                        (
                            ChallengeRequest::Adaptive { m, s0, s1, r },
                            AdversaryState::encode(&TrailerState::Candidates(candidates)),
                        )
                    }
                }
            }
            View::Nt(_) => (ChallengeRequest::Message(m), AdversaryState::encode(&TrailerState::Bit)),
        }
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, _: &mut dyn Oracles, _: &mut dyn RngCore) -> usize {
        match state.decode::<TrailerState>() {
            Some(TrailerState::Candidates(c)) => c.iter().position(|t| *t == sigma_star.extra).unwrap_or(0),
            Some(TrailerState::Bit) => usize::from(sigma_star.extra == [0x01]),
            None => 0,
        }
    }
}

/// Outputs the all-zero tag from `P_0` to `P_1` without querying anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForger;

pub fn zero_forger() -> ZeroForger {
    ZeroForger
}

impl Forger for ZeroForger {
    fn forge(&mut self, view: &PublicView, _: &mut dyn Oracles, _: &mut dyn RngCore) -> Forgery {
        Forgery {
            m: Message::from("forged"),
            sigma: Signature::new(Tag::zero(view.params.kappa)),
            s: 0,
            v: 1,
        }
    }
}

/// Gets one signature from `P_0` to `P_n`, then asks the verify oracle
/// about the all-zero tag on the same message. Guesses at random.
#[derive(Debug, Clone, Default)]
pub struct VerifyProbe {
    probe_answer: Option<Result<bool, Bottom>>,
}

pub fn verify_probe_adversary() -> VerifyProbe {
    VerifyProbe::default()
}

impl VerifyProbe {
    pub const MESSAGE: &'static str = "probe";

    /// What the verify oracle said about the zero tag in the last phase 1.
    pub fn probe_answer(&self) -> Option<Result<bool, Bottom>> {
        self.probe_answer
    }
}

impl TwoPhaseAdversary for VerifyProbe {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        if let View::Psi(v) = view {
            let m = Message::from(Self::MESSAGE);
            let n = v.n();
            let _ = oracles.sign(&m, 0, n);
            let zero = Signature::new(Tag::zero(v.params.kappa));
            self.probe_answer = Some(oracles.veri(&m, &zero, 0, n));
        }
        RandomGuesser.phase1(view, oracles, rng)
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        RandomGuesser.phase2(state, sigma_star, oracles, rng)
    }
}

/// Sensitive to whether crossover answers were signed or simulated.
///
/// In phase 1 it asks for `probes` signatures from `P_0` to the internal
/// party `P_2` and inspects the trailer of answer number `target`. If that
/// trailer marks a simulated signature it guesses at random; otherwise it
/// compares `σ*` with a fresh sign query from `P_0` to `P_n` on `m*`,
/// which identifies the signer whenever signing is deterministic.
#[derive(Debug, Clone, Copy)]
pub struct CrossoverProbe {
    pub probes: usize,
    pub target: usize,
}

impl Default for CrossoverProbe {
    fn default() -> Self {
        CrossoverProbe { probes: 3, target: 2 }
    }
}

pub fn crossover_probe(probes: usize, target: usize) -> CrossoverProbe {
    CrossoverProbe { probes, target }
}

#[derive(Serialize, Deserialize)]
struct ProbeState {
    simulated: bool,
    n: usize,
    m_star: Message,
}

impl TwoPhaseAdversary for CrossoverProbe {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Psi(v) = view else {
            return RandomGuesser.phase1(view, oracles, rng);
        };
        let mut simulated = false;
        for i in 1..=self.probes {
            let answer = oracles.sign(&Message(format!("probe-{i}").into_bytes()), 0, 2);
            if i == self.target {
                simulated = matches!(answer, Ok(sig) if sig.extra == [0x01]);
            }
        }
        let request = default_request(view);
        let m_star = match &request {
            ChallengeRequest::Message(m) | ChallengeRequest::Adaptive { m, .. } => m.clone(),
            ChallengeRequest::Abstain => Message::default(),
        };
        (request, AdversaryState::encode(&ProbeState { simulated, n: v.n(), m_star }))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let Some(st) = state.decode::<ProbeState>() else {
            return RandomGuesser.phase2(state, sigma_star, oracles, rng);
        };
        if st.simulated {
            return rng.gen_range(0..2);
        }
        match oracles.sign(&st.m_star, 0, st.n) {
            Ok(sig) if sig == *sigma_star => 0,
            _ => 1,
        }
    }
}

/// Plays an adaptive-challenge game with a fixed-challenge adversary by
/// always naming `s_0 = 0, s_1 = 1, r = n`.
pub struct FixedChoice<A> {
    inner: A,
}

pub fn fixed_choice<A: TwoPhaseAdversary>(inner: A) -> FixedChoice<A> {
    FixedChoice { inner }
}

impl<A: TwoPhaseAdversary> TwoPhaseAdversary for FixedChoice<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Psi(v) = view else {
            return self.inner.phase1(view, oracles, rng);
        };
        let inner_view = View::Psi(PublicView {
            challenge: ChallengeKind::Fixed,
            ..v.clone()
        });
        let (request, state) = self.inner.phase1(&inner_view, oracles, rng);
        let request = match request {
            ChallengeRequest::Message(m) => ChallengeRequest::Adaptive { m, s0: 0, s1: 1, r: v.n() },
            other => other,
        };
        (request, state)
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        self.inner.phase2(state, sigma_star, oracles, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::EmptyOracles;
    use crate::schemes::{make_scheme, SchemeId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn view(n: usize, challenge: ChallengeKind) -> (PublicView, Vec<KeyPair>) {
        let scheme = make_scheme(SchemeId::Leaky);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = scheme.setup(16, &mut rng).unwrap();
        let keys: Vec<KeyPair> = (0..=n).map(|_| scheme.keygen(&params, &mut rng)).collect();
        let pv = PublicView {
            params,
            pks: keys.iter().map(|k| k.pk).collect(),
            challenge,
            guess_range: 2,
        };
        (pv, keys)
    }

    #[test]
    fn ids_round_trip() {
        for id in AdversaryId::ALL {
            assert_eq!(id.as_str().parse::<AdversaryId>().unwrap(), id);
        }
        assert!("nosuch".parse::<AdversaryId>().is_err());
        assert!(AdversaryId::ZeroForger.build().is_none());
        assert!(AdversaryId::ZeroForger.build_forger().is_some());
        assert!(AdversaryId::Trailer.build_forger().is_none());
    }

    #[test]
    fn random_guesser_requests() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (pv, _) = view(3, ChallengeKind::Adaptive);
        let (req, state) = RandomGuesser.phase1(&View::Psi(pv), &mut EmptyOracles::default(), &mut rng);
        assert!(matches!(req, ChallengeRequest::Adaptive { s0: 0, s1: 1, r: 3, .. }));
        let sig = Signature::new(Tag::zero(16));
        let guesses: Vec<usize> = (0..200)
            .map(|_| RandomGuesser.phase2(state.clone(), &sig, &mut EmptyOracles::default(), &mut rng))
            .collect();
        assert!(guesses.iter().all(|&g| g < 2));
        assert!(guesses.contains(&0) && guesses.contains(&1));
    }

    #[test]
    fn trailer_reader_constant_on_empty_trailer() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (pv, _) = view(2, ChallengeKind::Fixed);
        let (_, state) = TrailerReader.phase1(&View::Psi(pv), &mut EmptyOracles::default(), &mut rng);
        for i in 0..100u8 {
            let sig = Signature::new(Tag::from_bytes(vec![i; 4]));
            assert_eq!(TrailerReader.phase2(state.clone(), &sig, &mut EmptyOracles::default(), &mut rng), 0);
        }
    }

    #[test]
    fn trailer_reader_identifies_leaky_sender() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (pv, keys) = view(4, ChallengeKind::Fixed);
        let group = pv.params.group.clone();
        let (_, state) = TrailerReader.phase1(&View::Psi(pv), &mut EmptyOracles::default(), &mut rng);
        for (i, k) in keys.iter().enumerate() {
            let sig = Signature::with_extra(Tag::zero(16), k.pk.to_fixed_bytes(&group));
            assert_eq!(TrailerReader.phase2(state.clone(), &sig, &mut EmptyOracles::default(), &mut rng), i);
        }
    }

    #[test]
    fn trailer_reader_adaptive_choices_are_legal() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for n in 2..6 {
            let (pv, _) = view(n, ChallengeKind::Adaptive);
            let view = View::Psi(pv);
            for _ in 0..200 {
                let (req, _) = TrailerReader.phase1(&view, &mut EmptyOracles::default(), &mut rng);
                let ChallengeRequest::Adaptive { s0, s1, r, .. } = req else { panic!("expected adaptive") };
                assert!(s0 <= n && s1 <= n && r <= n);
                assert!(s0 != s1 && r != s0 && r != s1);
            }
        }
    }

    #[test]
    fn zero_forger_output() {
        let (pv, _) = view(2, ChallengeKind::Fixed);
        let f = ZeroForger.forge(&pv, &mut EmptyOracles::default(), &mut ChaCha20Rng::seed_from_u64(0));
        assert_eq!((f.s, f.v), (0, 1));
        assert!(f.sigma.tag.is_all_zero());
        assert_eq!(f.sigma.tag.len(), 4);
    }

    #[test]
    fn state_envelope_round_trips() {
        let st = AdversaryState::encode(&(3usize, vec![1u8, 2]));
        assert_eq!(st.decode::<(usize, Vec<u8>)>(), Some((3, vec![1, 2])));
        assert_eq!(st.decode::<String>(), None);
    }
}
