//! Oracle families for the sender-privacy and unforgeability games.
//!
//! Adversaries see the [`Oracles`] trait only. The game drives the
//! [`OracleSet`] extension, which switches from phase-1 to phase-2
//! behaviour once the challenge pair `(m*, σ*)` is known and keeps the
//! per-trial transcript.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dvs::{Bottom, DvsScheme, KeyPair, Message, Params, Signature};
use crate::group::GroupElement;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Sign,
    Sim,
    Veri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    Signature(Signature),
    Verdict(bool),
    Bottom(Bottom),
}

impl From<&Result<Signature, Bottom>> for Answer {
    fn from(r: &Result<Signature, Bottom>) -> Self {
        match r {
            Ok(sig) => Answer::Signature(sig.clone()),
            Err(b) => Answer::Bottom(*b),
        }
    }
}

impl From<&Result<bool, Bottom>> for Answer {
    fn from(r: &Result<bool, Bottom>) -> Self {
        match r {
            Ok(v) => Answer::Verdict(*v),
            Err(b) => Answer::Bottom(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub phase: Phase,
    pub kind: OracleKind,
    pub m: Message,
    /// The submitted signature, for verify queries.
    pub sigma: Option<Signature>,
    pub s: usize,
    pub v: usize,
    pub answer: Answer,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCounts {
    pub sign: usize,
    pub sim: usize,
    pub veri: usize,
}

impl CallCounts {
    pub fn total(&self) -> usize {
        self.sign + self.sim + self.veri
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn push(&mut self, entry: TranscriptEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn counts(&self) -> CallCounts {
        let mut c = CallCounts::default();
        for e in &self.entries {
            match e.kind {
                OracleKind::Sign => c.sign += 1,
                OracleKind::Sim => c.sim += 1,
                OracleKind::Veri => c.veri += 1,
            }
        }
        c
    }

    /// Every signature handed out by a sign or sim oracle.
    pub fn issued(&self) -> impl Iterator<Item = &Signature> {
        self.entries.iter().filter_map(|e| match (&e.kind, &e.answer) {
            (OracleKind::Sign | OracleKind::Sim, Answer::Signature(sig)) => Some(sig),
            _ => None,
        })
    }
}

/// The adversary's handle on `O_sign`, `O_sim` and `O_veri` for the
/// current phase.
pub trait Oracles {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom>;
    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom>;
    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom>;
}

impl<T: Oracles + ?Sized> Oracles for &mut T {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        (**self).sign(m, s, v)
    }
    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        (**self).sim(m, s, v)
    }
    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom> {
        (**self).veri(m, sigma, s, v)
    }
}

pub trait OracleSet: Oracles {
    fn phase(&self) -> Phase;
    /// Injects the challenge and switches every oracle to its phase-2 form.
    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature);
    fn transcript(&self) -> &Transcript;
}

impl<T: OracleSet + ?Sized> OracleSet for &mut T {
    fn phase(&self) -> Phase {
        (**self).phase()
    }
    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature) {
        (**self).begin_phase2(m_star, sigma_star)
    }
    fn transcript(&self) -> &Transcript {
        (**self).transcript()
    }
}

/// Answers `RestrictedQuery` to everything.
#[derive(Debug, Default)]
pub struct EmptyOracles {
    phase: Option<Phase>,
    transcript: Transcript,
}

impl Oracles for EmptyOracles {
    fn sign(&mut self, _: &Message, _: usize, _: usize) -> Result<Signature, Bottom> {
        Err(Bottom::RestrictedQuery)
    }
    fn sim(&mut self, _: &Message, _: usize, _: usize) -> Result<Signature, Bottom> {
        Err(Bottom::RestrictedQuery)
    }
    fn veri(&mut self, _: &Message, _: &Signature, _: usize, _: usize) -> Result<bool, Bottom> {
        Err(Bottom::RestrictedQuery)
    }
}

impl OracleSet for EmptyOracles {
    fn phase(&self) -> Phase {
        self.phase.unwrap_or(Phase::One)
    }
    fn begin_phase2(&mut self, _: Message, _: Signature) {
        self.phase = Some(Phase::Two);
    }
    fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

/// Parties `P_0 .. P_n`; `P_n` is the challenge verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRoster {
    keypairs: Vec<KeyPair>,
}

impl PartyRoster {
    pub fn new(keypairs: Vec<KeyPair>) -> Result<Self, Error> {
        if keypairs.len() < 3 {
            return Err(Error::Config(format!(
                "a roster needs n >= 2, i.e. at least 3 keypairs (got {})",
                keypairs.len()
            )));
        }
        Ok(PartyRoster { keypairs })
    }

    /// `n + 1` fresh keypairs in index order.
    pub fn generate(scheme: &dyn DvsScheme, params: &Params, n: usize, rng: &mut dyn RngCore) -> Result<Self, Error> {
        Self::new((0..=n).map(|_| scheme.keygen(params, rng)).collect())
    }

    pub fn n(&self) -> usize {
        self.keypairs.len() - 1
    }

    pub fn get(&self, i: usize) -> Option<&KeyPair> {
        self.keypairs.get(i)
    }

    pub fn keypairs(&self) -> &[KeyPair] {
        &self.keypairs
    }

    pub fn public_keys(&self) -> Vec<GroupElement> {
        self.keypairs.iter().map(|k| k.pk).collect()
    }

    pub fn replace(&mut self, i: usize, keypair: KeyPair) {
        self.keypairs[i] = keypair;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rules {
    Standard,
    Huang,
}

/// The standard n-sender oracles, the Huang et al. oracle set, and the
/// no-verify variant, all over a fixed roster.
pub struct StandardOracles<'a> {
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    roster: &'a PartyRoster,
    rules: Rules,
    sim_enabled: bool,
    veri_enabled: bool,
    challenge: Option<(Message, Signature)>,
    transcript: Transcript,
    rng: ChaCha20Rng,
}

/// Both sign oracles answer `Sign[P_s][P_v](m)` and both sim oracles
/// `Simulate[P_s][P_v](m)` for `s, v ∈ [n]`. Phase-2 verify refuses `σ*`.
pub fn standard_oracles<'a>(
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    roster: &'a PartyRoster,
    seed: u64,
) -> StandardOracles<'a> {
    StandardOracles {
        scheme,
        params,
        roster,
        rules: Rules::Standard,
        sim_enabled: true,
        veri_enabled: true,
        challenge: None,
        transcript: Transcript::default(),
        rng: ChaCha20Rng::seed_from_u64(seed),
    }
}

/// Standard oracles with both verify oracles empty.
pub fn no_verify_oracles<'a>(
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    roster: &'a PartyRoster,
    seed: u64,
) -> StandardOracles<'a> {
    let mut o = standard_oracles(scheme, params, roster, seed);
    o.veri_enabled = false;
    o
}

/// Three parties; senders `{0, 1}`, verifier fixed to `P_2`; no sim
/// oracles; phase-2 sign refuses `m*`, phase-2 verify refuses `σ*` and
/// `m*`. Queries keep the `(m, s, v)` shape and must name `v = 2`.
pub fn huang_oracles<'a>(
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    roster: &'a PartyRoster,
    seed: u64,
) -> Result<StandardOracles<'a>, Error> {
    if roster.n() != 2 {
        return Err(Error::Config(format!(
            "huang oracles need n = 2, got n = {}",
            roster.n()
        )));
    }
    let mut o = standard_oracles(scheme, params, roster, seed);
    o.rules = Rules::Huang;
    o.sim_enabled = false;
    Ok(o)
}

impl<'a> StandardOracles<'a> {
    pub fn with_challenge(mut self, m_star: Message, sigma_star: Signature) -> Self {
        self.begin_phase2(m_star, sigma_star);
        self
    }

    pub fn roster(&self) -> &PartyRoster {
        self.roster
    }

    fn current_phase(&self) -> Phase {
        if self.challenge.is_some() {
            Phase::Two
        } else {
            Phase::One
        }
    }

    fn in_range(&self, s: usize, v: usize) -> bool {
        let n = self.roster.n();
        match self.rules {
            Rules::Standard => s <= n && v <= n,
            Rules::Huang => s <= 1 && v == n,
        }
    }

    fn log(&mut self, kind: OracleKind, m: &Message, sigma: Option<&Signature>, s: usize, v: usize, answer: Answer) {
        let phase = self.current_phase();
        self.transcript.push(TranscriptEntry {
            phase,
            kind,
            m: m.clone(),
            sigma: sigma.cloned(),
            s,
            v,
            answer,
        });
    }

    /// `Sign[P_s][P_v](m)` without any oracle rules. Indices must be in range.
    pub(crate) fn compute_sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let sender = self.roster.get(s).ok_or(Bottom::InvalidParty)?;
        let verifier = self.roster.get(v).ok_or(Bottom::InvalidParty)?;
        self.scheme.sign_pair(sender, verifier.pk, m, self.params, &mut self.rng)
    }

    pub(crate) fn compute_sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let sender = self.roster.get(s).ok_or(Bottom::InvalidParty)?;
        let verifier = self.roster.get(v).ok_or(Bottom::InvalidParty)?;
        self.scheme.simulate_pair(sender.pk, verifier, m, self.params, &mut self.rng)
    }

    pub(crate) fn record_signature(&mut self, kind: OracleKind, m: &Message, s: usize, v: usize, r: &Result<Signature, Bottom>) {
        self.log(kind, m, None, s, v, r.into());
    }
}

impl Oracles for StandardOracles<'_> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let r = if !self.in_range(s, v) {
            Err(Bottom::InvalidParty)
        } else if self.rules == Rules::Huang && matches!(&self.challenge, Some((m_star, _)) if m_star == m) {
            Err(Bottom::RestrictedQuery)
        } else {
            self.compute_sign(m, s, v)
        };
        self.record_signature(OracleKind::Sign, m, s, v, &r);
        r
    }

    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if !self.sim_enabled {
            return Err(Bottom::RestrictedQuery);
        }
        let r = if !self.in_range(s, v) {
            Err(Bottom::InvalidParty)
        } else {
            self.compute_sim(m, s, v)
        };
        self.record_signature(OracleKind::Sim, m, s, v, &r);
        r
    }

    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom> {
        if !self.veri_enabled {
            return Err(Bottom::RestrictedQuery);
        }
        let restricted = match (&self.challenge, self.rules) {
            (Some((_, sigma_star)), Rules::Standard) => sigma == sigma_star,
            (Some((m_star, sigma_star)), Rules::Huang) => sigma == sigma_star || m == m_star,
            (None, _) => false,
        };
        let r = if !self.in_range(s, v) {
            Err(Bottom::InvalidParty)
        } else if restricted {
            Err(Bottom::RestrictedQuery)
        } else {
            let sender = self.roster.keypairs()[s].pk;
            let verifier = self.roster.keypairs()[v];
            self.scheme.verify_pair(sender, &verifier, m, sigma, self.params)
        };
        self.log(OracleKind::Veri, m, Some(sigma), s, v, (&r).into());
        r
    }
}

impl OracleSet for StandardOracles<'_> {
    fn phase(&self) -> Phase {
        self.current_phase()
    }

    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature) {
        self.challenge = Some((m_star, sigma_star));
    }

    fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

/// A bijection on `{0, .., n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; mapping.len()];
        for &x in &mapping {
            if x >= mapping.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Config(format!("{mapping:?} is not a permutation")));
            }
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..=n).collect(),
        }
    }

    /// Uniform over all bijections on `{0, .., n}`.
    pub fn random(n: usize, rng: &mut dyn RngCore) -> Self {
        let mut mapping: Vec<usize> = (0..=n).collect();
        mapping.shuffle(rng);
        Permutation { mapping }
    }

    /// Uniform over bijections with `π(n) = n`.
    pub fn random_fixing_last(n: usize, rng: &mut dyn RngCore) -> Self {
        let mut mapping: Vec<usize> = (0..=n).collect();
        mapping[..n].shuffle(rng);
        Permutation { mapping }
    }

    pub fn n(&self) -> usize {
        self.mapping.len() - 1
    }

    pub fn apply(&self, i: usize) -> Option<usize> {
        self.mapping.get(i).copied()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &x) in self.mapping.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { mapping: inv }
    }

    pub fn fixes_last(&self) -> bool {
        self.mapping.last() == Some(&self.n())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }
}

/// Forwards `(m, s, v)` as `(m, π(s), π(v))`.
pub struct Permuted<O> {
    base: O,
    pi: Permutation,
}

pub fn permute_oracles<O: Oracles>(base: O, pi: Permutation) -> Permuted<O> {
    Permuted { base, pi }
}

impl<O> Permuted<O> {
    pub fn into_inner(self) -> O {
        self.base
    }

    fn map(&self, s: usize, v: usize) -> Result<(usize, usize), Bottom> {
        match (self.pi.apply(s), self.pi.apply(v)) {
            (Some(s), Some(v)) => Ok((s, v)),
            _ => Err(Bottom::InvalidParty),
        }
    }
}

impl<O: Oracles> Oracles for Permuted<O> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let (s, v) = self.map(s, v)?;
        self.base.sign(m, s, v)
    }
    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let (s, v) = self.map(s, v)?;
        self.base.sim(m, s, v)
    }
    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom> {
        let (s, v) = self.map(s, v)?;
        self.base.veri(m, sigma, s, v)
    }
}

impl<O: OracleSet> OracleSet for Permuted<O> {
    fn phase(&self) -> Phase {
        self.base.phase()
    }
    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature) {
        self.base.begin_phase2(m_star, sigma_star)
    }
    fn transcript(&self) -> &Transcript {
        self.base.transcript()
    }
}

/// `base` with both verify oracles empty.
pub struct Stripped<O> {
    base: O,
}

pub fn strip_verify<O: Oracles>(base: O) -> Stripped<O> {
    Stripped { base }
}

impl<O: Oracles> Oracles for Stripped<O> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        self.base.sign(m, s, v)
    }
    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        self.base.sim(m, s, v)
    }
    fn veri(&mut self, _: &Message, _: &Signature, _: usize, _: usize) -> Result<bool, Bottom> {
        Err(Bottom::RestrictedQuery)
    }
}

impl<O: OracleSet> OracleSet for Stripped<O> {
    fn phase(&self) -> Phase {
        self.base.phase()
    }
    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature) {
        self.base.begin_phase2(m_star, sigma_star)
    }
    fn transcript(&self) -> &Transcript {
        self.base.transcript()
    }
}

/// The n-party view assembled on top of a 2-party game: parties 0, 1 and
/// `n` are the outer game's `P_0, P_1, P_2`; parties `2..n` are simulated
/// locally from keypairs the caller owns.
pub struct CrossoverOracles<'a, O> {
    outer: O,
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    outer_pks: [GroupElement; 3],
    internal: &'a [KeyPair],
    n: usize,
    rng: ChaCha20Rng,
    transcript: Transcript,
}

/// Builds the crossover set `O''`. `internal[i]` is party `i + 2`.
pub fn crossover_oracles<'a, O: Oracles>(
    outer: O,
    outer_pks: [GroupElement; 3],
    internal: &'a [KeyPair],
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    n: usize,
    seed: u64,
) -> Result<CrossoverOracles<'a, O>, Error> {
    if n < 2 || internal.len() != n - 2 {
        return Err(Error::Config(format!(
            "crossover oracles for n = {n} need {} internal keypairs, got {}",
            n.saturating_sub(2),
            internal.len()
        )));
    }
    Ok(CrossoverOracles {
        outer,
        scheme,
        params,
        outer_pks,
        internal,
        n,
        rng: ChaCha20Rng::seed_from_u64(seed),
        transcript: Transcript::default(),
    })
}

impl<O> CrossoverOracles<'_, O> {
    fn is_outer(&self, i: usize) -> bool {
        i <= 1 || i == self.n
    }

    fn is_internal(&self, i: usize) -> bool {
        (2..self.n).contains(&i)
    }

    /// Outer slot for an outer party: `0 ↦ 0`, `1 ↦ 1`, `n ↦ 2`.
    fn outer_index(&self, i: usize) -> usize {
        i.min(2)
    }

    fn pk(&self, i: usize) -> GroupElement {
        if self.is_outer(i) {
            self.outer_pks[self.outer_index(i)]
        } else {
            self.internal[i - 2].pk
        }
    }

    fn internal_key(&self, i: usize) -> &KeyPair {
        &self.internal[i - 2]
    }

    /// Calls answered locally, i.e. those touching an internal party.
    pub fn local_transcript(&self) -> &Transcript {
        &self.transcript
    }

    fn record(&mut self, kind: OracleKind, m: &Message, s: usize, v: usize, r: &Result<Signature, Bottom>) {
        self.transcript.push(TranscriptEntry {
            phase: Phase::One,
            kind,
            m: m.clone(),
            sigma: None,
            s,
            v,
            answer: r.into(),
        });
    }

    fn local_sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let sender = *self.internal_key(s);
        let pk_v = self.pk(v);
        self.scheme.sign_pair(&sender, pk_v, m, self.params, &mut self.rng)
    }

    fn local_sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        let verifier = *self.internal_key(v);
        let pk_s = self.pk(s);
        self.scheme.simulate_pair(pk_s, &verifier, m, self.params, &mut self.rng)
    }
}

impl<O: Oracles> Oracles for CrossoverOracles<'_, O> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if s > self.n || v > self.n {
            return Err(Bottom::InvalidParty);
        }
        if self.is_outer(s) && self.is_outer(v) {
            let (s, v) = (self.outer_index(s), self.outer_index(v));
            return self.outer.sign(m, s, v);
        }
        let r = if self.is_internal(s) {
            self.local_sign(m, s, v)
        } else {
            // honest sender, internal verifier
            self.local_sim(m, s, v)
        };
        self.record(OracleKind::Sign, m, s, v, &r);
        r
    }

    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if s > self.n || v > self.n {
            return Err(Bottom::InvalidParty);
        }
        if self.is_outer(s) && self.is_outer(v) {
            let (s, v) = (self.outer_index(s), self.outer_index(v));
            return self.outer.sim(m, s, v);
        }
        let r = if self.is_internal(v) {
            self.local_sim(m, s, v)
        } else {
            // internal sender, honest verifier
            self.local_sign(m, s, v)
        };
        self.record(OracleKind::Sim, m, s, v, &r);
        r
    }

    fn veri(&mut self, _: &Message, _: &Signature, _: usize, _: usize) -> Result<bool, Bottom> {
        Err(Bottom::RestrictedQuery)
    }
}

/// Where a hybrid run stands at one particular crossover call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossoverSite {
    /// 1-based chronological crossover index.
    pub index: usize,
    pub kind: OracleKind,
    pub s: usize,
    pub v: usize,
    pub m: Message,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossoverHook {
    None,
    /// Record the site of crossover call `at` and refuse it.
    Halt { at: usize },
    /// Answer crossover call `at` with the given signature.
    Inject { at: usize, answer: Signature },
}

/// No-verify n-party oracles in which the first `swap_first` crossover
/// calls are answered by the other algorithm. A crossover call is a sign
/// query from an outer sender (`0`, `1`, `n`) to an internal verifier
/// (`2..n`), or a sim query from an internal sender to an outer verifier.
pub struct HybridOracles<'a> {
    base: StandardOracles<'a>,
    swap_first: usize,
    seen: usize,
    hook: CrossoverHook,
    site: Option<CrossoverSite>,
}

pub fn hybrid_oracles<'a>(
    scheme: &'a dyn DvsScheme,
    params: &'a Params,
    roster: &'a PartyRoster,
    seed: u64,
    swap_first: usize,
    hook: CrossoverHook,
) -> HybridOracles<'a> {
    HybridOracles {
        base: no_verify_oracles(scheme, params, roster, seed),
        swap_first,
        seen: 0,
        hook,
        site: None,
    }
}

impl HybridOracles<'_> {
    /// Crossover calls seen so far.
    pub fn crossover_count(&self) -> usize {
        self.seen
    }

    /// The site captured by a `Halt` or `Inject` hook.
    pub fn site(&self) -> Option<&CrossoverSite> {
        self.site.as_ref()
    }

    fn is_outer(&self, i: usize) -> bool {
        let n = self.base.roster().n();
        i <= 1 || i == n
    }

    fn is_internal(&self, i: usize) -> bool {
        (2..self.base.roster().n()).contains(&i)
    }

    fn crossover(&mut self, kind: OracleKind, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        self.seen += 1;
        let index = self.seen;
        let site = || CrossoverSite {
            index,
            kind,
            s,
            v,
            m: m.clone(),
        };
        let r = match &self.hook {
            CrossoverHook::Halt { at } if *at == index => {
                self.site = Some(site());
                Err(Bottom::RestrictedQuery)
            }
            CrossoverHook::Inject { at, answer } if *at == index => {
                let answer = answer.clone();
                self.site = Some(site());
                Ok(answer)
            }
            _ => {
                let swapped = index <= self.swap_first;
                match (kind, swapped) {
                    (OracleKind::Sign, false) | (OracleKind::Sim, true) => self.base.compute_sign(m, s, v),
                    _ => self.base.compute_sim(m, s, v),
                }
            }
        };
        self.base.record_signature(kind, m, s, v, &r);
        r
    }
}

impl Oracles for HybridOracles<'_> {
    fn sign(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if self.is_outer(s) && self.is_internal(v) {
            self.crossover(OracleKind::Sign, m, s, v)
        } else {
            self.base.sign(m, s, v)
        }
    }

    fn sim(&mut self, m: &Message, s: usize, v: usize) -> Result<Signature, Bottom> {
        if self.is_internal(s) && self.is_outer(v) {
            self.crossover(OracleKind::Sim, m, s, v)
        } else {
            self.base.sim(m, s, v)
        }
    }

    fn veri(&mut self, m: &Message, sigma: &Signature, s: usize, v: usize) -> Result<bool, Bottom> {
        self.base.veri(m, sigma, s, v)
    }
}

impl OracleSet for HybridOracles<'_> {
    fn phase(&self) -> Phase {
        self.base.phase()
    }
    fn begin_phase2(&mut self, m_star: Message, sigma_star: Signature) {
        self.base.begin_phase2(m_star, sigma_star)
    }
    fn transcript(&self) -> &Transcript {
        self.base.transcript()
    }
}
