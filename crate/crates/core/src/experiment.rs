//! Experiment specs, trial runners and result documents.
//!
//! A spec file (TOML or JSON) lists experiments and, optionally, relations
//! between their advantages. [`run_spec`] estimates every experiment and
//! checks every relation; the resulting [`ResultDocument`] is what the
//! command line tool prints.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::adversaries::{AdversaryFactory, AdversaryId};
use crate::dvs::DvsScheme;
use crate::estimator::{check_relation, estimate_with, AdvantageEstimate, Direction, Verdict, DEFAULT_SLACK};
use crate::games::{run_advpsi, run_hybrid, run_nt, run_psi, run_psi_with_n, run_uf, GameConfig, GameKind, GameOutcome, OracleChoice};
use crate::group::GroupProfile;
use crate::reductions::{
    embed_n_to_2, forgery_extractor, nt_from_hybrid, strip_verify_adversary, wrap_nf2adv, wrap_nf2nr, ReductionKind,
};
use crate::schemes::{make_scheme_with, SchemeId};
use crate::Error;

/// A validated game configuration ready to run trials.
pub struct Experiment {
    cfg: GameConfig,
    scheme: Arc<dyn DvsScheme>,
    factory: Option<AdversaryFactory>,
}

impl Experiment {
    pub fn new(mut cfg: GameConfig) -> Result<Self, Error> {
        if cfg.oracles == OracleChoice::Crossover {
            match cfg.reduction {
                None | Some(ReductionKind::Embed) => cfg.reduction = Some(ReductionKind::Embed),
                Some(other) => {
                    return Err(Error::Config(format!(
                        "crossover oracles come from the embed reduction and cannot be combined with {other}"
                    )))
                }
            }
        }
        cfg.validate()?;
        let factory = cfg.adversary.factory();
        let two_phase = factory.is_some();
        use GameKind::*;
        use ReductionKind::*;
        let fits = match (cfg.kind, cfg.reduction) {
            (Psi | Nrpsi, None | Some(UfStrip)) => two_phase,
            (Psi, Some(Nf2nr | Nf2adv | Embed)) => two_phase,
            (Advpsi, None | Some(UfStrip)) => two_phase,
            (Nt, None) => two_phase,
            (Nt, Some(NtHybrid)) => two_phase && cfg.n >= 3,
            (Uf, None) => cfg.adversary.build_forger().is_some(),
            (Uf, Some(ForgeExtract)) => two_phase,
            (Hybrid, None) => two_phase,
            _ => false,
        };
        if !fits {
            let what = match cfg.reduction {
                Some(r) => format!("adversary {} under reduction {r}", cfg.adversary),
                None => format!("adversary {}", cfg.adversary),
            };
            return Err(Error::Config(format!("{what} cannot play the {} game with n = {}", cfg.kind, cfg.n)));
        }
        if cfg.reduction == Some(Embed) && cfg.oracles == OracleChoice::Huang {
            return Err(Error::Config("the embed reduction runs over standard or no-verify outer oracles".into()));
        }
        let scheme = make_scheme_with(cfg.scheme, cfg.profile);
        Ok(Experiment { cfg, scheme, factory })
    }

    pub fn config(&self) -> &GameConfig {
        &self.cfg
    }

    /// `adversary`, or `reduction(adversary)` when wrapped.
    pub fn adversary_label(&self) -> String {
        match self.cfg.reduction {
            Some(r) => format!("{r}({})", self.cfg.adversary),
            None => self.cfg.adversary.to_string(),
        }
    }

    pub fn run_trial(&self, rng: &mut ChaCha20Rng) -> Result<GameOutcome, Error> {
        let cfg = &self.cfg;
        let scheme = &*self.scheme;
        let n = cfg.n;
        let adversary = || (self.factory.as_ref().expect("validated two-phase adversary"))();
        match (cfg.kind, cfg.reduction) {
            (GameKind::Psi | GameKind::Nrpsi, None) => run_psi(cfg, scheme, &mut adversary(), rng),
            (GameKind::Psi | GameKind::Nrpsi, Some(ReductionKind::UfStrip)) => {
                run_psi(cfg, scheme, &mut strip_verify_adversary(adversary()), rng)
            }
            (GameKind::Psi, Some(ReductionKind::Nf2nr)) => run_psi(cfg, scheme, &mut wrap_nf2nr(adversary(), n), rng),
            (GameKind::Psi, Some(ReductionKind::Nf2adv)) => run_psi(cfg, scheme, &mut wrap_nf2adv(adversary(), n), rng),
            (GameKind::Psi, Some(ReductionKind::Embed)) => {
                let mut outer = cfg.clone();
                if outer.oracles == OracleChoice::Crossover {
                    outer.oracles = OracleChoice::NoVerify;
                }
                let mut wrapped = embed_n_to_2(adversary(), n, self.scheme.clone());
                run_psi_with_n(&outer, 2, scheme, &mut wrapped, rng)
            }
            (GameKind::Advpsi, None) => run_advpsi(cfg, scheme, &mut adversary(), rng),
            (GameKind::Advpsi, Some(ReductionKind::UfStrip)) => {
                run_advpsi(cfg, scheme, &mut strip_verify_adversary(adversary()), rng)
            }
            (GameKind::Nt, None) => run_nt(cfg.kappa, scheme, &mut adversary(), cfg.c, rng),
            (GameKind::Nt, Some(ReductionKind::NtHybrid)) => {
                let factory = self.factory.clone().expect("validated two-phase adversary");
                let k = cfg.hybrid_index.unwrap_or(0);
                let mut b = nt_from_hybrid(factory, n, k, self.scheme.clone());
                run_nt(cfg.kappa, scheme, &mut b, cfg.c, rng)
            }
            (GameKind::Uf, None) => {
                let mut forger = cfg.adversary.build_forger().expect("validated forger");
                run_uf(cfg, scheme, &mut *forger, rng)
            }
            (GameKind::Uf, Some(ReductionKind::ForgeExtract)) => {
                run_uf(cfg, scheme, &mut forgery_extractor(adversary(), n), rng)
            }
            (GameKind::Hybrid, None) => run_hybrid(cfg, scheme, &mut adversary(), rng),
            (kind, reduction) => Err(Error::Config(format!("no runner for {kind} with {reduction:?}"))),
        }
    }

    pub fn estimate(&self, trials: u64, master_seed: u64, jobs: usize) -> Result<AdvantageEstimate, Error> {
        estimate_with(trials, master_seed, jobs, self.cfg.baseline(), |rng| self.run_trial(rng).map(|o| o.won))
    }
}

fn default_trials() -> u64 {
    10_000
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

fn default_n() -> usize {
    2
}

fn default_kappa() -> u32 {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentEntry {
    /// Used by relations; defaults to the entry's position.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub game: GameKind,
    pub scheme: SchemeId,
    pub adversary: AdversaryId,
    #[serde(default)]
    pub oracles: OracleChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionKind>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_kappa")]
    pub kappa: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    /// Hybrid index: `j` for `hybrid`, `k` for `nt-hybrid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default)]
    pub profile: GroupProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentEntry {
    pub fn new(game: GameKind, scheme: SchemeId, adversary: AdversaryId) -> Self {
        ExperimentEntry {
            name: None,
            game,
            scheme,
            adversary,
            oracles: OracleChoice::Standard,
            reduction: None,
            n: default_n(),
            kappa: default_kappa(),
            c: None,
            j: None,
            profile: GroupProfile::Standard,
            trials: None,
            seed: None,
        }
    }

    pub fn game_config(&self) -> GameConfig {
        GameConfig {
            kind: self.game,
            scheme: self.scheme,
            adversary: self.adversary,
            oracles: self.oracles,
            reduction: self.reduction,
            kappa: self.kappa,
            n: self.n,
            c: self.c,
            hybrid_index: self.j,
            profile: self.profile,
        }
    }
}

/// A factor written as a number or as a fraction such as `"2/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Factor {
    Number(f64),
    Text(String),
}

impl Factor {
    pub fn value(&self) -> Result<f64, Error> {
        match self {
            Factor::Number(x) => Ok(*x),
            Factor::Text(s) => parse_factor(s),
        }
    }
}

impl Default for Factor {
    fn default() -> Self {
        Factor::Number(1.0)
    }
}

pub fn parse_factor(s: &str) -> Result<f64, Error> {
    let bad = || Error::Config(format!("cannot read factor '{s}'; write a number or a fraction like 2/4"));
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub lhs: String,
    pub rhs: String,
    #[serde(default)]
    pub factor: Factor,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub experiments: Vec<ExperimentEntry>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
}

impl ExperimentSpec {
    pub fn single(entry: ExperimentEntry) -> Self {
        ExperimentSpec {
            seed: 0,
            trials: default_trials(),
            jobs: None,
            slack: default_slack(),
            out: None,
            experiments: vec![entry],
            relations: Vec::new(),
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`. Errors carry the
    /// line and column the parser reports.
    pub fn parse(text: &str) -> Result<Self, Error> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON spec: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(format!("invalid TOML spec: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn names(&self) -> Vec<String> {
        self.experiments
            .iter()
            .enumerate()
            .map(|(i, e)| e.name.clone().unwrap_or_else(|| i.to_string()))
            .collect()
    }

    /// Structural checks plus a dry build of every experiment.
    pub fn validate(&self) -> Result<(), Error> {
        if self.experiments.is_empty() {
            return Err(Error::Config("the spec lists no experiments".into()));
        }
        if self.slack.is_nan() || self.slack < 0.0 {
            return Err(Error::Config(format!("slack must be non-negative, got {}", self.slack)));
        }
        let names = self.names();
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if let Some(j) = seen.insert(name, i) {
                return Err(Error::Config(format!("experiments {j} and {i} share the name '{name}'")));
            }
        }
        for r in &self.relations {
            for side in [&r.lhs, &r.rhs] {
                if !seen.contains_key(side) {
                    return Err(Error::UnknownIdentifier {
                        kind: "experiment",
                        name: side.clone(),
                    });
                }
            }
            r.factor.value()?;
            if matches!(r.slack, Some(s) if s.is_nan() || s < 0.0) {
                return Err(Error::Config("relation slack must be non-negative".into()));
            }
        }
        for e in &self.experiments {
            Experiment::new(e.game_config())?;
        }
        Ok(())
    }
}

/// Fixed-point decimal with six places; never prints `-0`.
pub fn decimal(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentResult {
    pub game: String,
    pub scheme: String,
    pub adversary: String,
    pub n: usize,
    pub kappa: u32,
    pub trials: u64,
    pub wins: u64,
    pub p_hat: String,
    pub baseline: String,
    pub advantage: String,
    pub ci95: [String; 2],
}

impl ExperimentResult {
    fn new(experiment: &Experiment, est: &AdvantageEstimate) -> Self {
        let cfg = experiment.config();
        ExperimentResult {
            game: cfg.kind.to_string(),
            scheme: cfg.scheme.to_string(),
            adversary: experiment.adversary_label(),
            n: cfg.n,
            kappa: cfg.kappa,
            trials: est.trials,
            wins: est.wins,
            p_hat: decimal(est.p_hat),
            baseline: decimal(est.baseline),
            advantage: decimal(est.advantage),
            ci95: [decimal(est.ci95.0), decimal(est.ci95.1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationResult {
    pub lhs: String,
    pub rhs: String,
    pub factor: String,
    pub direction: Direction,
    pub slack: String,
    pub lhs_advantage: String,
    pub rhs_advantage: String,
    pub lhs_interval: [String; 2],
    pub rhs_interval: [String; 2],
    pub holds: bool,
}

impl RelationResult {
    fn new(lhs: &str, rhs: &str, v: &Verdict) -> Self {
        RelationResult {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            factor: decimal(v.factor),
            direction: v.direction,
            slack: decimal(v.slack),
            lhs_advantage: decimal(v.factor * v.lhs_advantage),
            rhs_advantage: decimal(v.rhs_advantage),
            lhs_interval: [decimal(v.lhs_interval.0), decimal(v.lhs_interval.1)],
            rhs_interval: [decimal(v.rhs_interval.0), decimal(v.rhs_interval.1)],
            holds: v.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub version: String,
    pub spec: ExperimentSpec,
    pub experiments: Vec<ExperimentResult>,
    pub relations: Vec<RelationResult>,
    pub seed: u64,
    pub seconds: f64,
}

impl ResultDocument {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result document serializes")
    }

    /// Plain-text tables for a terminal.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:<13} {:<28} {:>3} {:>5} {:>9} {:>9} {:>10} {:>10} {:>21}",
            "game", "scheme", "adversary", "n", "kappa", "trials", "p_hat", "baseline", "advantage", "ci95"
        );
        for e in &self.experiments {
            let _ = writeln!(
                out,
                "{:<8} {:<13} {:<28} {:>3} {:>5} {:>9} {:>9} {:>10} {:>10} {:>21}",
                e.game,
                e.scheme,
                e.adversary,
                e.n,
                e.kappa,
                e.trials,
                e.p_hat,
                e.baseline,
                e.advantage,
                format!("[{}, {}]", e.ci95[0], e.ci95[1])
            );
        }
        if !self.relations.is_empty() {
            let _ = writeln!(out);
            for r in &self.relations {
                let op = match r.direction {
                    Direction::Leq => "<=",
                    Direction::Eq => "==",
                };
                let _ = writeln!(
                    out,
                    "{} * Adv[{}] {} Adv[{}]: [{}, {}] vs [{}, {}] (slack {}) {}",
                    r.factor,
                    r.lhs,
                    op,
                    r.rhs,
                    r.lhs_interval[0],
                    r.lhs_interval[1],
                    r.rhs_interval[0],
                    r.rhs_interval[1],
                    r.slack,
                    if r.holds { "holds" } else { "FAILS" }
                );
            }
        }
        let _ = writeln!(out, "seed {} | {:.2}s", self.seed, self.seconds);
        out
    }
}

/// Estimates every experiment and checks every relation.
pub fn run_spec(spec: &ExperimentSpec, jobs: usize) -> Result<ResultDocument, Error> {
    spec.validate()?;
    let started = Instant::now();
    let names = spec.names();
    let mut estimates = HashMap::new();
    let mut experiments = Vec::with_capacity(spec.experiments.len());
    for (entry, name) in spec.experiments.iter().zip(&names) {
        let experiment = Experiment::new(entry.game_config())?;
        let trials = entry.trials.unwrap_or(spec.trials);
        let seed = entry.seed.unwrap_or(spec.seed);
        let est = experiment.estimate(trials, seed, jobs)?;
        experiments.push(ExperimentResult::new(&experiment, &est));
        estimates.insert(name.clone(), est);
    }
    let relations = spec
        .relations
        .iter()
        .map(|r| {
            let verdict = check_relation(
                &estimates[&r.lhs],
                &estimates[&r.rhs],
                r.factor.value()?,
                r.direction,
                r.slack.unwrap_or(spec.slack),
            );
            Ok(RelationResult::new(&r.lhs, &r.rhs, &verdict))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ResultDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        experiments,
        relations,
        seed: spec.seed,
        seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factors() {
        assert_eq!(parse_factor("2/4").unwrap(), 0.5);
        assert_eq!(parse_factor("1/12").unwrap(), 1.0 / 12.0);
        assert_eq!(parse_factor(" 0.25 ").unwrap(), 0.25);
        assert!(parse_factor("1/0").is_err());
        assert!(parse_factor("half").is_err());
        assert_eq!(Factor::Number(2.0).value().unwrap(), 2.0);
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(0.5), "0.500000");
        assert_eq!(decimal(-0.0), "0.000000");
        assert_eq!(decimal(-1e-9), "0.000000");
        assert_eq!(decimal(-0.25), "-0.250000");
    }

    #[test]
    fn toml_spec() {
        let spec = ExperimentSpec::parse(
            r#"
seed = 5
trials = 100

[[experiments]]
name = "a"
game = "psi"
scheme = "leaky"
adversary = "trailer"

[[experiments]]
game = "nrpsi"
scheme = "leaky"
adversary = "trailer"
n = 4

[[relations]]
lhs = "1"
rhs = "a"
factor = "2/4"
direction = "leq"
"#,
        )
        .unwrap();
        assert_eq!(spec.experiments.len(), 2);
        assert_eq!(spec.relations[0].factor.value().unwrap(), 0.5);
        spec.validate().unwrap();
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = ExperimentSpec::parse("seed = 5\ntrials = \n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = ExperimentSpec::parse("{\"seed\": 5,\n \"experiments\": [}").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn unknown_identifiers_are_named() {
        let e = ExperimentSpec::parse("[[experiments]]\ngame = \"psi\"\nscheme = \"nosuch\"\nadversary = \"random\"\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("nosuch"), "{e}");
        let mut spec = ExperimentSpec::single(ExperimentEntry::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random));
        spec.relations.push(RelationSpec {
            lhs: "0".into(),
            rhs: "missing".into(),
            factor: Factor::default(),
            direction: Direction::Leq,
            slack: None,
        });
        assert!(spec.validate().unwrap_err().to_string().contains("missing"));
    }

    #[test]
    fn invalid_combinations() {
        let bad = [
            GameConfig::new(GameKind::Uf, SchemeId::Dhmac, AdversaryId::Random),
            GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::ZeroForger),
            GameConfig::new(GameKind::Nt, SchemeId::Dhmac, AdversaryId::Random).with_reduction(ReductionKind::Nf2nr),
            GameConfig::new(GameKind::Nrpsi, SchemeId::Dhmac, AdversaryId::Random).with_reduction(ReductionKind::Embed),
            GameConfig::new(GameKind::Nt, SchemeId::Dhmac, AdversaryId::Random).with_reduction(ReductionKind::NtHybrid),
            GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random)
                .with_oracles(OracleChoice::Crossover)
                .with_reduction(ReductionKind::Nf2nr),
        ];
        for cfg in bad {
            assert!(Experiment::new(cfg.clone()).is_err(), "{cfg:?}");
        }
        let crossover = GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random)
            .with_n(5)
            .with_oracles(OracleChoice::Crossover);
        let e = Experiment::new(crossover).unwrap();
        assert_eq!(e.config().reduction, Some(ReductionKind::Embed));
        assert_eq!(e.adversary_label(), "embed(random)");
    }

    #[test]
    fn run_spec_document() {
        let mut spec = ExperimentSpec::single(ExperimentEntry::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer));
        spec.trials = 200;
        spec.experiments.push(ExperimentEntry::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Trailer));
        spec.relations.push(RelationSpec {
            lhs: "1".into(),
            rhs: "0".into(),
            factor: Factor::Number(1.0),
            direction: Direction::Leq,
            slack: None,
        });
        let doc = run_spec(&spec, 2).unwrap();
        assert_eq!(doc.experiments[0].wins, 200);
        assert_eq!(doc.experiments[0].advantage, "0.500000");
        assert!(doc.all_hold());
        let json: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        let keys: Vec<&str> = json["experiments"][0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut expected = vec!["game", "scheme", "adversary", "n", "kappa", "trials", "wins", "p_hat", "baseline", "advantage", "ci95"];
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert!(doc.render_table().contains("holds"));
    }

    fn entry_strategy() -> impl Strategy<Value = ExperimentEntry> {
        (
            prop::sample::select(GameKind::ALL.to_vec()),
            prop::sample::select(SchemeId::ALL.to_vec()),
            prop::sample::select(AdversaryId::ALL.to_vec()),
            2usize..8,
            8u32..40,
            prop::option::of(0usize..4),
            prop::option::of(1u64..100_000),
        )
            .prop_map(|(game, scheme, adversary, n, kappa, j, trials)| ExperimentEntry {
                n,
                kappa,
                j,
                trials,
                ..ExperimentEntry::new(game, scheme, adversary)
            })
    }

    proptest! {
        #[test]
        fn spec_round_trips_through_json_and_toml(entries in prop::collection::vec(entry_strategy(), 1..4), seed in 0u64..1 << 40, slack in 0.0f64..0.1) {
            let spec = ExperimentSpec { seed, slack, experiments: entries, ..ExperimentSpec::single(ExperimentEntry::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random)) };
            let json = serde_json::to_string(&spec).unwrap();
            prop_assert_eq!(&ExperimentSpec::parse(&json).unwrap(), &spec);
            let toml_text = toml::to_string(&spec).unwrap();
            prop_assert_eq!(&ExperimentSpec::parse(&toml_text).unwrap(), &spec);
        }

        #[test]
        fn result_document_round_trips(wins in 0u64..=1000, seed in 0u64..1 << 40) {
            let spec = ExperimentSpec::single(ExperimentEntry::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random));
            let est = AdvantageEstimate::from_counts(wins, 1000, 0.5);
            let experiment = Experiment::new(spec.experiments[0].game_config()).unwrap();
            let doc = ResultDocument {
                version: "0".into(),
                spec,
                experiments: vec![ExperimentResult::new(&experiment, &est)],
                relations: vec![RelationResult::new("0", "0", &check_relation(&est, &est, 1.0, Direction::Eq, 0.0))],
                seed,
                seconds: 0.5,
            };
            let back: ResultDocument = serde_json::from_str(&doc.to_json()).unwrap();
            prop_assert_eq!(back, doc);
        }
    }
}
