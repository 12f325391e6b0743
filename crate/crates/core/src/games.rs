//! The security games: sender privacy (fixed-challenge, n-guess and
//! adaptive), non-transferability, strong unforgeability, and the hybrid
//! privacy games that interpolate between sign and simulate on crossover
//! queries.
//!
//! The `play_*` functions run one game over caller-supplied parameters,
//! keys and oracles; the `run_*` functions sample all of that from a
//! [`GameConfig`] and an rng. A malformed adversary output always scores as
//! a loss.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::adversaries::{AdversaryId, ChallengeKind, ChallengeRequest, Forger, NtView, PublicView, TwoPhaseAdversary, View};
use crate::dvs::{DvsScheme, Message, Params};
use crate::group::GroupProfile;
use crate::oracles::{
    huang_oracles, hybrid_oracles, no_verify_oracles, standard_oracles, CallCounts, CrossoverHook, CrossoverSite,
    EmptyOracles, OracleSet, PartyRoster,
};
use crate::reductions::ReductionKind;
use crate::schemes::SchemeId;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    /// Two candidate senders, the adversary names `m*`.
    Psi,
    /// `n` candidate senders.
    Nrpsi,
    /// The adversary names `(m*, s_0, s_1, r)`.
    Advpsi,
    Nt,
    Uf,
    /// `psi` over no-verify oracles with the first `j` crossovers swapped.
    Hybrid,
}

impl GameKind {
    pub const ALL: [GameKind; 6] = [
        GameKind::Psi,
        GameKind::Nrpsi,
        GameKind::Advpsi,
        GameKind::Nt,
        GameKind::Uf,
        GameKind::Hybrid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GameKind::Psi => "psi",
            GameKind::Nrpsi => "nrpsi",
            GameKind::Advpsi => "advpsi",
            GameKind::Nt => "nt",
            GameKind::Uf => "uf",
            GameKind::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GameKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                kind: "game",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    #[default]
    Standard,
    Huang,
    NoVerify,
    /// Only reachable through the n-to-2 embedding.
    Crossover,
}

impl OracleChoice {
    pub const ALL: [OracleChoice; 4] = [
        OracleChoice::Standard,
        OracleChoice::Huang,
        OracleChoice::NoVerify,
        OracleChoice::Crossover,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OracleChoice::Standard => "standard",
            OracleChoice::Huang => "huang",
            OracleChoice::NoVerify => "no-verify",
            OracleChoice::Crossover => "crossover",
        }
    }
}

impl fmt::Display for OracleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OracleChoice::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                kind: "oracle set",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub kind: GameKind,
    pub scheme: SchemeId,
    pub adversary: AdversaryId,
    #[serde(default)]
    pub oracles: OracleChoice,
    #[serde(default)]
    pub reduction: Option<ReductionKind>,
    pub kappa: u32,
    pub n: usize,
    /// Fixes the challenge index instead of sampling it.
    #[serde(default)]
    pub c: Option<usize>,
    /// `j` for `hybrid`, `k` for `nt-hybrid`.
    #[serde(default)]
    pub hybrid_index: Option<usize>,
    #[serde(default)]
    pub profile: GroupProfile,
}

impl GameConfig {
    pub fn new(kind: GameKind, scheme: SchemeId, adversary: AdversaryId) -> Self {
        GameConfig {
            kind,
            scheme,
            adversary,
            oracles: OracleChoice::Standard,
            reduction: None,
            kappa: 16,
            n: 2,
            c: None,
            hybrid_index: None,
            profile: GroupProfile::Standard,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_kappa(mut self, kappa: u32) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_oracles(mut self, oracles: OracleChoice) -> Self {
        self.oracles = oracles;
        self
    }

    pub fn with_reduction(mut self, reduction: ReductionKind) -> Self {
        self.reduction = Some(reduction);
        self
    }

    pub fn with_challenge(mut self, c: usize) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_hybrid_index(mut self, j: usize) -> Self {
        self.hybrid_index = Some(j);
        self
    }

    pub fn with_profile(mut self, profile: GroupProfile) -> Self {
        self.profile = profile;
        self
    }

    /// Success probability of blind guessing.
    pub fn baseline(&self) -> f64 {
        match self.kind {
            GameKind::Nrpsi => 1.0 / self.n as f64,
            GameKind::Uf => 0.0,
            _ => 0.5,
        }
    }

    /// Range a sampled challenge index is drawn from.
    fn challenge_range(&self) -> usize {
        match self.kind {
            GameKind::Nrpsi => self.n,
            _ => 2,
        }
    }

    /// Checks the configuration on its own; whether the adversary and
    /// reduction fit the game is checked when the trial runner is built.
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if let Some(c) = self.c {
            if c >= self.challenge_range() {
                return Err(Error::Config(format!(
                    "challenge index c = {c} is outside 0..{} for the {} game",
                    self.challenge_range(),
                    self.kind
                )));
            }
        }
        if self.oracles == OracleChoice::Huang && self.n != 2 {
            return Err(Error::Config(format!("huang oracles need n = 2, got n = {}", self.n)));
        }
        if self.kind == GameKind::Hybrid && self.hybrid_index.is_none() {
            return Err(Error::Config("the hybrid game needs a hybrid index j".into()));
        }
        crate::group::setup_group(self.kappa, self.profile).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    /// `c` (or `b`); `None` in the unforgeability game.
    pub challenge: Option<usize>,
    /// `None` when the adversary's output was malformed.
    pub guess: Option<usize>,
    pub won: bool,
    pub calls: CallCounts,
}

impl GameOutcome {
    fn loss(challenge: Option<usize>, calls: CallCounts) -> Self {
        GameOutcome {
            challenge,
            guess: None,
            won: false,
            calls,
        }
    }

    fn scored(challenge: usize, guess: usize, calls: CallCounts) -> Self {
        GameOutcome {
            challenge: Some(challenge),
            guess: Some(guess),
            won: guess == challenge,
            calls,
        }
    }
}

fn psi_view(params: &Params, roster: &PartyRoster, challenge: ChallengeKind, guess_range: usize) -> View {
    View::Psi(PublicView {
        params: params.clone(),
        pks: roster.public_keys(),
        challenge,
        guess_range,
    })
}

/// One fixed-challenge privacy game: `σ* = Sign[P_c][P_n](m*)`.
#[allow(clippy::too_many_arguments)]
pub fn play_psi(
    scheme: &dyn DvsScheme,
    params: &Params,
    roster: &PartyRoster,
    c: usize,
    oracles: &mut dyn OracleSet,
    adversary: &mut dyn TwoPhaseAdversary,
    guess_range: usize,
    rng: &mut dyn RngCore,
) -> GameOutcome {
    let n = roster.n();
    let view = psi_view(params, roster, ChallengeKind::Fixed, guess_range);
    let (request, state) = adversary.phase1(&view, oracles, rng);
    let ChallengeRequest::Message(m_star) = request else {
        return GameOutcome::loss(Some(c), oracles.transcript().counts());
    };
    let Ok(sigma_star) = scheme.sign_pair(&roster.keypairs()[c], roster.keypairs()[n].pk, &m_star, params, rng) else {
        return GameOutcome::loss(Some(c), oracles.transcript().counts());
    };
    oracles.begin_phase2(m_star, sigma_star.clone());
    let guess = adversary.phase2(state, &sigma_star, oracles, rng);
    GameOutcome::scored(c, guess, oracles.transcript().counts())
}

/// One adaptive privacy game: `σ* = Sign[P_{s_c}][P_r](m*)`.
#[allow(clippy::too_many_arguments)]
pub fn play_advpsi(
    scheme: &dyn DvsScheme,
    params: &Params,
    roster: &PartyRoster,
    c: usize,
    oracles: &mut dyn OracleSet,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> GameOutcome {
    let n = roster.n();
    let view = psi_view(params, roster, ChallengeKind::Adaptive, 2);
    let (request, state) = adversary.phase1(&view, oracles, rng);
    let (m_star, senders, r) = match request {
        ChallengeRequest::Adaptive { m, s0, s1, r } if s0 != s1 && s0.max(s1).max(r) <= n && r != s0 && r != s1 => {
            (m, [s0, s1], r)
        }
        _ => return GameOutcome::loss(Some(c), oracles.transcript().counts()),
    };
    let keys = roster.keypairs();
    let Ok(sigma_star) = scheme.sign_pair(&keys[senders[c]], keys[r].pk, &m_star, params, rng) else {
        return GameOutcome::loss(Some(c), oracles.transcript().counts());
    };
    oracles.begin_phase2(m_star, sigma_star.clone());
    let guess = adversary.phase2(state, &sigma_star, oracles, rng);
    GameOutcome::scored(c, guess, oracles.transcript().counts())
}

/// A hybrid game's outcome plus what its hook observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridRun {
    pub outcome: GameOutcome,
    pub site: Option<CrossoverSite>,
    pub crossovers: usize,
}

/// The fixed-challenge privacy game over hybrid oracles `Gm_j`.
#[allow(clippy::too_many_arguments)]
pub fn play_hybrid(
    scheme: &dyn DvsScheme,
    params: &Params,
    roster: &PartyRoster,
    c: usize,
    j: usize,
    hook: CrossoverHook,
    oracle_seed: u64,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> HybridRun {
    let mut oracles = hybrid_oracles(scheme, params, roster, oracle_seed, j, hook);
    let outcome = play_psi(scheme, params, roster, c, &mut oracles, adversary, 2, rng);
    HybridRun {
        outcome,
        site: oracles.site().cloned(),
        crossovers: oracles.crossover_count(),
    }
}

struct Sampled {
    c: usize,
    params: Params,
    roster: PartyRoster,
    oracle_seed: u64,
}

/// Order of randomness use shared by every privacy game: challenge index,
/// setup, `n + 1` keypairs, oracle seed.
fn sample(cfg: &GameConfig, scheme: &dyn DvsScheme, n: usize, rng: &mut dyn RngCore) -> Result<Sampled, Error> {
    let c = match cfg.c {
        Some(c) => c,
        None => rng.gen_range(0..cfg.challenge_range()),
    };
    let params = scheme.setup(cfg.kappa, rng)?;
    let roster = PartyRoster::generate(scheme, &params, n, rng)?;
    let oracle_seed = rng.next_u64();
    Ok(Sampled {
        c,
        params,
        roster,
        oracle_seed,
    })
}

/// `psi` or `nrpsi` over the configured oracle set, with `cfg.n` parties.
pub fn run_psi(
    cfg: &GameConfig,
    scheme: &dyn DvsScheme,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    run_psi_with_n(cfg, cfg.n, scheme, adversary, rng)
}

pub(crate) fn run_psi_with_n(
    cfg: &GameConfig,
    n: usize,
    scheme: &dyn DvsScheme,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    let guess_range = cfg.challenge_range();
    let s = sample(cfg, scheme, n, rng)?;
    let (params, roster) = (&s.params, &s.roster);
    let outcome = match cfg.oracles {
        OracleChoice::Standard => {
            let mut o = standard_oracles(scheme, params, roster, s.oracle_seed);
            play_psi(scheme, params, roster, s.c, &mut o, adversary, guess_range, rng)
        }
        OracleChoice::NoVerify => {
            let mut o = no_verify_oracles(scheme, params, roster, s.oracle_seed);
            play_psi(scheme, params, roster, s.c, &mut o, adversary, guess_range, rng)
        }
        OracleChoice::Huang => {
            let mut o = huang_oracles(scheme, params, roster, s.oracle_seed)?;
            play_psi(scheme, params, roster, s.c, &mut o, adversary, guess_range, rng)
        }
        OracleChoice::Crossover => {
            return Err(Error::Config(
                "crossover oracles are built by the n-to-2 embedding; use reduction 'embed'".into(),
            ))
        }
    };
    Ok(outcome)
}

pub fn run_advpsi(
    cfg: &GameConfig,
    scheme: &dyn DvsScheme,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    let s = sample(cfg, scheme, cfg.n, rng)?;
    let (params, roster) = (&s.params, &s.roster);
    let outcome = match cfg.oracles {
        OracleChoice::Standard => {
            let mut o = standard_oracles(scheme, params, roster, s.oracle_seed);
            play_advpsi(scheme, params, roster, s.c, &mut o, adversary, rng)
        }
        OracleChoice::NoVerify => {
            let mut o = no_verify_oracles(scheme, params, roster, s.oracle_seed);
            play_advpsi(scheme, params, roster, s.c, &mut o, adversary, rng)
        }
        other => {
            return Err(Error::Config(format!(
                "the advpsi game runs over standard or no-verify oracles, not {other}"
            )))
        }
    };
    Ok(outcome)
}

/// `Gm_j` with `j = cfg.hybrid_index`.
pub fn run_hybrid(
    cfg: &GameConfig,
    scheme: &dyn DvsScheme,
    adversary: &mut dyn TwoPhaseAdversary,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    let j = cfg.hybrid_index.unwrap_or(0);
    let s = sample(cfg, scheme, cfg.n, rng)?;
    let run = play_hybrid(scheme, &s.params, &s.roster, s.c, j, CrossoverHook::None, s.oracle_seed, adversary, rng);
    Ok(run.outcome)
}

/// The non-transferability game. `σ*` is a real signature when `b = 0` and
/// a simulation when `b = 1`; `b` is sampled when not given.
pub fn run_nt(
    kappa: u32,
    scheme: &dyn DvsScheme,
    adversary: &mut dyn TwoPhaseAdversary,
    b: Option<usize>,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    let b = match b {
        Some(b) if b > 1 => return Err(Error::Config(format!("b must be 0 or 1, got {b}"))),
        Some(b) => b,
        None => rng.gen_range(0..2),
    };
    let params = scheme.setup(kappa, rng)?;
    let sender = scheme.keygen(&params, rng);
    let verifier = scheme.keygen(&params, rng);
    let view = View::Nt(NtView {
        params: params.clone(),
        sender,
        verifier,
    });
    let mut oracles = EmptyOracles::default();
    let (request, state) = adversary.phase1(&view, &mut oracles, rng);
    let ChallengeRequest::Message(m_star) = request else {
        return Ok(GameOutcome::loss(Some(b), CallCounts::default()));
    };
    let sigma_star = if b == 0 {
        scheme.sign_pair(&sender, verifier.pk, &m_star, &params, rng)
    } else {
        scheme.simulate_pair(sender.pk, &verifier, &m_star, &params, rng)
    };
    let Ok(sigma_star) = sigma_star else {
        return Ok(GameOutcome::loss(Some(b), CallCounts::default()));
    };
    let guess = adversary.phase2(state, &sigma_star, &mut oracles, rng);
    Ok(GameOutcome::scored(b, guess, CallCounts::default()))
}

/// Strong unforgeability over the standard phase-1 oracles. The forgery
/// wins iff both indices are parties, it verifies, and the signature was
/// never handed out by a sign or sim oracle.
pub fn run_uf(
    cfg: &GameConfig,
    scheme: &dyn DvsScheme,
    forger: &mut dyn Forger,
    rng: &mut dyn RngCore,
) -> Result<GameOutcome, Error> {
    let params = scheme.setup(cfg.kappa, rng)?;
    let roster = PartyRoster::generate(scheme, &params, cfg.n, rng)?;
    let oracle_seed = rng.next_u64();
    let mut oracles = standard_oracles(scheme, &params, &roster, oracle_seed);
    let view = PublicView {
        params: params.clone(),
        pks: roster.public_keys(),
        challenge: ChallengeKind::Fixed,
        guess_range: 2,
    };
    let forgery = forger.forge(&view, &mut oracles, rng);
    let won = forged(scheme, &params, &roster, &forgery.m, &forgery.sigma, forgery.s, forgery.v)
        && !oracles.transcript().issued().any(|sig| *sig == forgery.sigma);
    Ok(GameOutcome {
        challenge: None,
        guess: None,
        won,
        calls: oracles.transcript().counts(),
    })
}

fn forged(
    scheme: &dyn DvsScheme,
    params: &Params,
    roster: &PartyRoster,
    m: &Message,
    sigma: &crate::dvs::Signature,
    s: usize,
    v: usize,
) -> bool {
    match (roster.get(s), roster.get(v)) {
        (Some(sender), Some(verifier)) => scheme.verify_pair(sender.pk, verifier, m, sigma, params) == Ok(true),
        _ => false,
    }
}
