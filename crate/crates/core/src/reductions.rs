//! Reductions between the security notions, as adversary transformers.
//!
//! Each wrapper is itself an adversary (or forger) for the target game and
//! runs its inner adversary against oracles it assembles from the ones it
//! was handed. Inner phase-1 state travels inside the wrapper's own state
//! envelope, so wrappers compose.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::adversaries::{
    AdversaryFactory, AdversaryState, ChallengeKind, ChallengeRequest, Forger, Forgery, PublicView,
    TwoPhaseAdversary, View,
};
use crate::dvs::{Bottom, DvsScheme, KeyPair, Message, Params, Signature};
use crate::games::play_hybrid;
use crate::group::{GroupElement, Tag};
use crate::oracles::{crossover_oracles, permute_oracles, CrossoverHook, OracleKind, Oracles, PartyRoster, Permutation};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    /// n-guess privacy adversary to two-guess (π fixes the verifier).
    Nf2nr,
    /// Adaptive-challenge adversary to fixed-challenge.
    Nf2adv,
    /// Replaces verify queries by a lookup in the sign/sim transcript.
    UfStrip,
    /// Privacy adversary to forger: the first fresh accepted verify query.
    ForgeExtract,
    /// n-party adversary run inside a 2-party game.
    Embed,
    /// Non-transferability adversary from two adjacent hybrids.
    NtHybrid,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::Nf2nr,
        ReductionKind::Nf2adv,
        ReductionKind::UfStrip,
        ReductionKind::ForgeExtract,
        ReductionKind::Embed,
        ReductionKind::NtHybrid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionKind::Nf2nr => "nf2nr",
            ReductionKind::Nf2adv => "nf2adv",
            ReductionKind::UfStrip => "uf-strip",
            ReductionKind::ForgeExtract => "forge-extract",
            ReductionKind::Embed => "embed",
            ReductionKind::NtHybrid => "nt-hybrid",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReductionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                kind: "reduction",
                name: s.to_string(),
            })
    }
}

fn permuted_view(v: &PublicView, pi: &Permutation, challenge: ChallengeKind, guess_range: usize) -> Option<View> {
    let pks = (0..v.pks.len())
        .map(|i| pi.apply(i).and_then(|j| v.pks.get(j).copied()))
        .collect::<Option<Vec<_>>>()?;
    Some(View::Psi(PublicView {
        params: v.params.clone(),
        pks,
        challenge,
        guess_range,
    }))
}

#[derive(Serialize, Deserialize)]
struct PermutedState {
    pi: Permutation,
    /// 0, 1 or 2; unused by the n-guess reduction.
    case: u8,
    inner: AdversaryState,
}

/// Plays the two-guess game with an n-guess adversary: relabel parties
/// by a random π fixing `n`, forward oracle calls through π, and map the
/// inner guess back with π, falling back to `0` outside `{0, 1}`.
pub struct Nf2nr<A> {
    inner: A,
    n: usize,
}

pub fn wrap_nf2nr<A: TwoPhaseAdversary>(inner: A, n: usize) -> Nf2nr<A> {
    Nf2nr { inner, n }
}

impl<A: TwoPhaseAdversary> TwoPhaseAdversary for Nf2nr<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Psi(v) = view else {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        };
        if v.n() != self.n {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        }
        let pi = Permutation::random_fixing_last(self.n, rng);
        let inner_view = permuted_view(v, &pi, ChallengeKind::Fixed, self.n).expect("π is a bijection on the roster");
        let (request, inner) = self.inner.phase1(&inner_view, &mut permute_oracles(oracles, pi.clone()), rng);
        (request, AdversaryState::encode(&PermutedState { pi, case: 0, inner }))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let Some(st) = state.decode::<PermutedState>() else {
            return 0;
        };
        let guess = self.inner.phase2(st.inner, sigma_star, &mut permute_oracles(oracles, st.pi.clone()), rng);
        match st.pi.apply(guess) {
            Some(c) if c <= 1 => c,
            _ => 0,
        }
    }
}

/// Plays the fixed-challenge game with an adaptive adversary. Parties are
/// relabelled by a uniform π; with `(s_0, s_1, r)` the inner choice, the
/// trial is faithful when `π(s_0), π(s_1), π(r) = 0, 1, n` (case 0),
/// faithful with the answer flipped when they are `1, 0, n` (case 1), and
/// answered by a coin otherwise (case 2).
pub struct Nf2adv<A> {
    inner: A,
    n: usize,
}

pub fn wrap_nf2adv<A: TwoPhaseAdversary>(inner: A, n: usize) -> Nf2adv<A> {
    Nf2adv { inner, n }
}

impl<A: TwoPhaseAdversary> TwoPhaseAdversary for Nf2adv<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Psi(v) = view else {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        };
        if v.n() != self.n {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        }
        let n = self.n;
        let pi = Permutation::random(n, rng);
        let inner_view = permuted_view(v, &pi, ChallengeKind::Adaptive, 2).expect("π is a bijection on the roster");
        let (request, inner) = self.inner.phase1(&inner_view, &mut permute_oracles(oracles, pi.clone()), rng);
        let (m, case) = match request {
            ChallengeRequest::Adaptive { m, s0, s1, r } => {
                let image = (pi.apply(s0), pi.apply(s1), pi.apply(r));
                let case = if image == (Some(0), Some(1), Some(n)) {
                    0
                } else if image == (Some(1), Some(0), Some(n)) {
                    1
                } else {
                    2
                };
                (m, case)
            }
            ChallengeRequest::Message(m) => (m, 2),
            ChallengeRequest::Abstain => return (ChallengeRequest::Abstain, AdversaryState::default()),
        };
        (ChallengeRequest::Message(m), AdversaryState::encode(&PermutedState { pi, case, inner }))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let Some(st) = state.decode::<PermutedState>() else {
            return 0;
        };
        let guess = self.inner.phase2(st.inner, sigma_star, &mut permute_oracles(oracles, st.pi.clone()), rng);
        match st.case {
            0 => guess,
            1 => match guess {
                0 => 1,
                1 => 0,
                other => other,
            },
            _ => rng.gen_range(0..2),
        }
    }
}

/// Answers the inner adversary's sign and sim calls from the real oracles
/// and its verify calls with "was `(m, σ)` handed out before".
struct TranscriptVerifier<'a> {
    base: &'a mut dyn Oracles,
    issued: &'a mut Vec<(Message, Signature)>,
}

impl Oracles for TranscriptVerifier<'_> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let r = self.base.sign(m, s, v);
        if let Ok(sig) = &r {
            self.issued.push((m.clone(), sig.clone()));
        }
        r
    }

    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let r = self.base.sim(m, s, v);
        if let Ok(sig) = &r {
            self.issued.push((m.clone(), sig.clone()));
        }
        r
    }

    fn veri(&mut self, m: &Message, sigma: &Signature, _: usize, _: usize) -> Result<bool, Bottom> {
        Ok(self.issued.iter().any(|(m2, s2)| m2 == m && s2 == sigma))
    }
}

#[derive(Serialize, Deserialize)]
struct StripState {
    issued: Vec<(Message, Signature)>,
    inner: AdversaryState,
}

/// Never touches the real verify oracles.
pub struct StripVerify<A> {
    inner: A,
}

pub fn strip_verify_adversary<A: TwoPhaseAdversary>(inner: A) -> StripVerify<A> {
    StripVerify { inner }
}

impl<A: TwoPhaseAdversary> TwoPhaseAdversary for StripVerify<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let mut issued = Vec::new();
        let (request, inner) = self.inner.phase1(
            view,
            &mut TranscriptVerifier {
                base: oracles,
                issued: &mut issued,
            },
            rng,
        );
        (request, AdversaryState::encode(&StripState { issued, inner }))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let Some(mut st) = state.decode::<StripState>() else {
            return 0;
        };
        self.inner.phase2(
            st.inner,
            sigma_star,
            &mut TranscriptVerifier {
                base: oracles,
                issued: &mut st.issued,
            },
            rng,
        )
    }
}

/// Forwards to the unforgeability oracles and watches verify queries for
/// an accepted signature that no sign or sim query produced.
struct ExtractingOracles<'a> {
    uf: &'a mut dyn Oracles,
    issued: Vec<Signature>,
    challenge: Option<Signature>,
    forgery: Option<Forgery>,
}

impl ExtractingOracles<'_> {
    fn issue(&mut self, r: Result<Signature, Bottom>) -> Result<Signature, Bottom> {
        if let Ok(sig) = &r {
            self.issued.push(sig.clone());
        }
        r
    }
}

impl Oracles for ExtractingOracles<'_> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if self.forgery.is_some() {
            return Err(Bottom::RestrictedQuery);
        }
        let r = self.uf.sign(m, s, v);
        self.issue(r)
    }

    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if self.forgery.is_some() {
            return Err(Bottom::RestrictedQuery);
        }
        let r = self.uf.sim(m, s, v);
        self.issue(r)
    }

    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom> {
        if self.forgery.is_some() || self.challenge.as_ref() == Some(sigma) {
            return Err(Bottom::RestrictedQuery);
        }
        let r = self.uf.veri(m, sigma, s, v);
        if r == Ok(true) && !self.issued.contains(sigma) {
            self.forgery = Some(Forgery {
                m: m.clone(),
                sigma: sigma.clone(),
                s,
                v,
            });
        }
        r
    }
}

/// Runs a privacy adversary in a privacy game it simulates itself and
/// outputs the first verify query that the real oracle accepts although no
/// sign or sim query produced it. Without such a query it outputs a tuple
/// naming no party, which always loses.
pub struct ForgeryExtractor<A> {
    inner: A,
    n: usize,
}

pub fn forgery_extractor<A: TwoPhaseAdversary>(inner: A, n: usize) -> ForgeryExtractor<A> {
    ForgeryExtractor { inner, n }
}

impl<A> ForgeryExtractor<A> {
    fn no_forgery(&self, kappa: u32) -> Forgery {
        Forgery {
            m: Message::default(),
            sigma: Signature::new(Tag::zero(kappa)),
            s: self.n + 1,
            v: self.n + 1,
        }
    }
}

impl<A: TwoPhaseAdversary> Forger for ForgeryExtractor<A> {
    fn forge(&mut self, view: &PublicView, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> Forgery {
        let kappa = view.params.kappa;
        let n = view.n();
        let c = rng.gen_range(0..2);
        let mut ext = ExtractingOracles {
            uf: oracles,
            issued: Vec::new(),
            challenge: None,
            forgery: None,
        };
        let inner_view = View::Psi(PublicView {
            challenge: ChallengeKind::Fixed,
            guess_range: 2,
            ..view.clone()
        });
        let (request, state) = self.inner.phase1(&inner_view, &mut ext, rng);
        if let Some(f) = ext.forgery.take() {
            return f;
        }
        let ChallengeRequest::Message(m_star) = request else {
            return self.no_forgery(kappa);
        };
        let Ok(sigma_star) = ext.sign(&m_star, c, n) else {
            return self.no_forgery(kappa);
        };
        ext.challenge = Some(sigma_star.clone());
        let _ = self.inner.phase2(state, &sigma_star, &mut ext, rng);
        ext.forgery.take().unwrap_or_else(|| self.no_forgery(kappa))
    }
}

#[derive(Serialize, Deserialize)]
struct EmbedState {
    params: Params,
    outer_pks: [GroupElement; 3],
    internal: Vec<KeyPair>,
    seed: u64,
    inner: AdversaryState,
}

/// Runs an adversary for the n-party privacy game inside a 2-party game.
/// The outer parties `0, 1, 2` become `0, 1, n`; parties `2..n` get fresh
/// keys and are answered through crossover oracles.
pub struct EmbedNto2<A> {
    inner: A,
    n: usize,
    scheme: Arc<dyn DvsScheme>,
    last_internal: Vec<KeyPair>,
}

pub fn embed_n_to_2<A: TwoPhaseAdversary>(inner: A, n: usize, scheme: Arc<dyn DvsScheme>) -> EmbedNto2<A> {
    EmbedNto2 {
        inner,
        n,
        scheme,
        last_internal: Vec::new(),
    }
}

impl<A> EmbedNto2<A> {
    /// Keys of parties `2..n` chosen in the most recent phase 1.
    pub fn internal_keys(&self) -> &[KeyPair] {
        &self.last_internal
    }
}

impl<A: TwoPhaseAdversary> TwoPhaseAdversary for EmbedNto2<A> {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        if self.n == 2 {
            return self.inner.phase1(view, oracles, rng);
        }
        let View::Psi(v) = view else {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        };
        if v.n() != 2 || v.challenge != ChallengeKind::Fixed {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        }
        let params = v.params.clone();
        let outer_pks = [v.pks[0], v.pks[1], v.pks[2]];
        let internal: Vec<KeyPair> = (2..self.n).map(|_| self.scheme.keygen(&params, rng)).collect();
        let seed = rng.next_u64();
        let mut pks = vec![outer_pks[0], outer_pks[1]];
        pks.extend(internal.iter().map(|k| k.pk));
        pks.push(outer_pks[2]);
        let inner_view = View::Psi(PublicView {
            params: params.clone(),
            pks,
            challenge: ChallengeKind::Fixed,
            guess_range: 2,
        });
        let (request, inner) = {
            let mut co = crossover_oracles(oracles, outer_pks, &internal, &*self.scheme, &params, self.n, seed)
                .expect("internal key count matches n");
            self.inner.phase1(&inner_view, &mut co, rng)
        };
        self.last_internal = internal.clone();
        let state = EmbedState {
            params,
            outer_pks,
            internal,
            seed,
            inner,
        };
        (request, AdversaryState::encode(&state))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        if self.n == 2 {
            return self.inner.phase2(state, sigma_star, oracles, rng);
        }
        let Some(st) = state.decode::<EmbedState>() else {
            return 0;
        };
        let seed = st.seed.wrapping_add(1);
        let Ok(mut co) = crossover_oracles(oracles, st.outer_pks, &st.internal, &*self.scheme, &st.params, self.n, seed) else {
            return 0;
        };
        self.inner.phase2(st.inner, sigma_star, &mut co, rng)
    }
}

#[derive(Serialize, Deserialize)]
enum NtPlan {
    /// No usable crossover; answer with a coin.
    Coin,
    Replay {
        params: Params,
        seed: u64,
        c: usize,
        kind: OracleKind,
        s: usize,
        v: usize,
        sender: KeyPair,
        verifier: KeyPair,
    },
}

/// Distinguishes sign from simulate using a privacy adversary whose success
/// differs between hybrids `Gm_k` and `Gm_{k+1}`.
///
/// Phase 1 simulates `Gm_k` internally up to crossover call `k + 1`, with
/// the game's sender and verifier keys planted at that call's two parties,
/// and submits the call's message as `m*`. Phase 2 replays the same run
/// from its seed and answers call `k + 1` with `σ*`. A sign-kind crossover
/// sees `σ*` as in `Gm_k` when it is a real signature; a sim-kind one when
/// it is a simulation. The output bit tracks whether the inner adversary
/// won.
pub struct NtFromHybrid {
    factory: AdversaryFactory,
    n: usize,
    k: usize,
    scheme: Arc<dyn DvsScheme>,
}

pub fn nt_from_hybrid(factory: AdversaryFactory, n: usize, k: usize, scheme: Arc<dyn DvsScheme>) -> NtFromHybrid {
    NtFromHybrid { factory, n, k, scheme }
}

impl NtFromHybrid {
    fn internal_run(
        &self,
        params: &Params,
        seed: u64,
        c: usize,
        planted: Option<(usize, usize, KeyPair, KeyPair)>,
        hook: CrossoverHook,
    ) -> Option<crate::games::HybridRun> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut roster = PartyRoster::generate(&*self.scheme, params, self.n, &mut rng).ok()?;
        if let Some((s, v, sender, verifier)) = planted {
            roster.replace(s, sender);
            roster.replace(v, verifier);
        }
        let oracle_seed = rng.next_u64();
        let mut adversary = (self.factory)();
        Some(play_hybrid(
            &*self.scheme,
            params,
            &roster,
            c,
            self.k,
            hook,
            oracle_seed,
            &mut adversary,
            &mut rng,
        ))
    }
}

impl TwoPhaseAdversary for NtFromHybrid {
    fn phase1(&mut self, view: &View, _: &mut dyn Oracles, rng: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Nt(nt) = view else {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        };
        let c = rng.gen_range(0..2);
        let seed = rng.next_u64();
        let halt = CrossoverHook::Halt { at: self.k + 1 };
        let coin = || (ChallengeRequest::Message(Message::default()), AdversaryState::encode(&NtPlan::Coin));
        let Some(site) = self.internal_run(&nt.params, seed, c, None, halt.clone()).and_then(|r| r.site) else {
            return coin();
        };
        let planted = (site.s, site.v, nt.sender, nt.verifier);
        let Some(replayed) = self.internal_run(&nt.params, seed, c, Some(planted), halt).and_then(|r| r.site) else {
            return coin();
        };
        // planting keys may steer the adversary elsewhere
        if (replayed.kind, replayed.s, replayed.v) != (site.kind, site.s, site.v) {
            return coin();
        }
        let plan = NtPlan::Replay {
            params: nt.params.clone(),
            seed,
            c,
            kind: site.kind,
            s: site.s,
            v: site.v,
            sender: nt.sender,
            verifier: nt.verifier,
        };
        (ChallengeRequest::Message(replayed.m), AdversaryState::encode(&plan))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, _: &mut dyn Oracles, rng: &mut dyn RngCore) -> usize {
        let Some(NtPlan::Replay { params, seed, c, kind, s, v, sender, verifier }) = state.decode::<NtPlan>() else {
            return rng.gen_range(0..2);
        };
        let hook = CrossoverHook::Inject {
            at: self.k + 1,
            answer: sigma_star.clone(),
        };
        let Some(run) = self.internal_run(&params, seed, c, Some((s, v, sender, verifier)), hook) else {
            return rng.gen_range(0..2);
        };
        if run.site.is_none() {
            return rng.gen_range(0..2);
        }
        let inner_won = run.outcome.guess == Some(c);
        match kind {
            OracleKind::Sim => usize::from(inner_won),
            _ => usize::from(!inner_won),
        }
    }
}
