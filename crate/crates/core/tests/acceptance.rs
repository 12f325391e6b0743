//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use dvs_lab::adversaries::{verify_probe_adversary, AdversaryState, ChallengeRequest, View};
use dvs_lab::dvs::{DvsScheme, KeyPair, Message, Signature};
use dvs_lab::estimator::{check_relation, trial_rng, AdvantageEstimate, Direction};
use dvs_lab::experiment::Experiment;
use dvs_lab::games::{play_psi, run_psi, GameConfig, GameKind, OracleChoice};
use dvs_lab::group::{exp, GroupProfile, Scalar};
use dvs_lab::oracles::{standard_oracles, Oracles, PartyRoster};
use dvs_lab::reductions::{embed_n_to_2, strip_verify_adversary, ReductionKind};
use dvs_lab::schemes::{make_scheme, make_scheme_with, SchemeId};
use dvs_lab::{AdversaryId, Bottom};

const SEED: u64 = 0x5eed;

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

type Outcome = Result<String, String>;

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn est(cfg: GameConfig, trials: u64, seed: u64) -> AdvantageEstimate {
    Experiment::new(cfg)
        .expect("valid experiment")
        .estimate(trials, seed, jobs())
        .expect("experiment runs")
}

fn fmt(e: &AdvantageEstimate) -> String {
    format!("{}/{} adv {:.4}", e.wins, e.trials, e.advantage)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Signing and simulating coincide on every toy keypair pair.
fn c1_sign_equals_simulate() -> Outcome {
    let scheme = make_scheme_with(SchemeId::Dhmac, GroupProfile::Toy);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let params = scheme.setup(8, &mut rng).map_err(|e| e.to_string())?;
    let group = &params.group;
    let keys: Vec<KeyPair> = (0..group.q)
        .map(|x| {
            let sk = Scalar::new(x, group).expect("below q");
            KeyPair { pk: exp(group.generator(), sk, group), sk }
        })
        .collect();
    let messages = [Message::from(""), Message::from("m"), Message::from("another message")];
    let mut checked = 0;
    for s in &keys {
        for v in &keys {
            for m in &messages {
                let a = scheme.sign_pair(s, v.pk, m, &params, &mut rng);
                let b = scheme.simulate_pair(s.pk, v, m, &params, &mut rng);
                match (a, b) {
                    (Ok(a), Ok(b)) if a.to_bytes() == b.to_bytes() => checked += 1,
                    (a, b) => return Err(format!("mismatch at sk_s={:?} sk_v={:?}: {a:?} vs {b:?}", s.sk, v.sk)),
                }
            }
        }
    }
    check(checked == keys.len() * keys.len() * 3 && keys.len() == 11, format!("{checked} triples identical"))
}

fn c2_non_transferability() -> Outcome {
    let t = est(GameConfig::new(GameKind::Nt, SchemeId::Transferable, AdversaryId::Trailer), 1000, SEED);
    let d = est(GameConfig::new(GameKind::Nt, SchemeId::Dhmac, AdversaryId::Trailer), 1000, SEED);
    check(
        t.wins == t.trials && (d.p_hat - 0.5).abs() <= 0.04,
        format!("transferable {} ; dhmac rate {:.4}", fmt(&t), d.p_hat),
    )
}

fn c3_leaky_privacy() -> Outcome {
    let l2 = est(GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer).with_n(2), 1000, SEED);
    let l4 = est(GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer).with_n(4), 1000, SEED);
    let d = est(GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Trailer), 1000, SEED);
    check(
        l2.advantage >= 0.49 && l4.advantage >= 0.49 && d.advantage.abs() <= 0.04,
        format!("leaky n=2 {} ; leaky n=4 {} ; dhmac {}", fmt(&l2), fmt(&l4), fmt(&d)),
    )
}

fn c4_nr_to_nf() -> Outcome {
    let psi = est(GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer).with_n(4), 10_000, SEED);
    let nr = est(GameConfig::new(GameKind::Nrpsi, SchemeId::Leaky, AdversaryId::Trailer).with_n(4), 10_000, SEED);
    let v = check_relation(&psi, &nr, 2.0 / 4.0, Direction::Leq, 0.0);
    check(
        v.holds,
        format!("(2/4)*Adv_psi in [{:.4}, {:.4}] vs Adv_nrpsi in [{:.4}, {:.4}]", v.lhs_interval.0, v.lhs_interval.1, v.rhs_interval.0, v.rhs_interval.1),
    )
}

fn c5_nf_to_nr() -> Outcome {
    let nr = est(GameConfig::new(GameKind::Nrpsi, SchemeId::Leaky, AdversaryId::Trailer).with_n(4), 10_000, SEED);
    let wrapped = est(
        GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer)
            .with_n(4)
            .with_reduction(ReductionKind::Nf2nr),
        10_000,
        SEED,
    );
    let v = check_relation(&nr, &wrapped, 0.5, Direction::Leq, 0.0);
    check(
        v.holds,
        format!("Adv_psi(wrapped) {} >= (1/2)*Adv_nrpsi {}", fmt(&wrapped), fmt(&nr)),
    )
}

fn c6_nf_to_adaptive() -> Outcome {
    let adv = est(GameConfig::new(GameKind::Advpsi, SchemeId::Leaky, AdversaryId::Trailer).with_n(3), 100_000, SEED);
    let wrapped = est(
        GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer)
            .with_n(3)
            .with_reduction(ReductionKind::Nf2adv),
        100_000,
        SEED,
    );
    let v = check_relation(&adv, &wrapped, 1.0 / 12.0, Direction::Eq, 0.0);
    check(
        v.holds,
        format!(
            "Adv_psi(wrapped) {} vs Adv_advpsi/12 in [{:.4}, {:.4}]",
            fmt(&wrapped),
            v.lhs_interval.0,
            v.lhs_interval.1
        ),
    )
}

fn c7_forgery() -> Outcome {
    let f = est(GameConfig::new(GameKind::Uf, SchemeId::Forgeable, AdversaryId::ZeroForger), 1000, SEED);
    let d = est(GameConfig::new(GameKind::Uf, SchemeId::Dhmac, AdversaryId::ZeroForger), 1000, SEED);
    check(
        f.wins == f.trials && d.p_hat <= 0.01,
        format!("forgeable {} ; dhmac rate {:.4}", fmt(&f), d.p_hat),
    )
}

fn c8_strip_and_extract() -> Outcome {
    let cfg = GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::VerifyProbe);
    let scheme = make_scheme(SchemeId::Dhmac);
    let mut veri_calls = 0;
    for i in 0..1000 {
        let mut a = strip_verify_adversary(verify_probe_adversary());
        let o = run_psi(&cfg, &*scheme, &mut a, &mut trial_rng(SEED, i)).map_err(|e| e.to_string())?;
        veri_calls += o.calls.veri;
    }
    let extract = |id| {
        est(
            GameConfig::new(GameKind::Uf, id, AdversaryId::VerifyProbe).with_reduction(ReductionKind::ForgeExtract),
            1000,
            SEED,
        )
    };
    let f = extract(SchemeId::Forgeable);
    let d = extract(SchemeId::Dhmac);
    check(
        veri_calls == 0 && f.wins == f.trials && d.p_hat <= 0.01,
        format!("veri calls {veri_calls} ; extractor forgeable {} ; dhmac rate {:.4}", fmt(&f), d.p_hat),
    )
}

type Log = Arc<Mutex<Vec<(u8, Message, usize, usize, Result<Vec<u8>, Bottom>)>>>;

/// Makes randomized sign/sim queries from its own rng and logs the answers.
/// Guesses by comparing `σ*` with a fresh `Sign[P_0][P_n](m*)`.
struct QueryLogger {
    rng: ChaCha20Rng,
    queries: usize,
    log: Log,
}

impl QueryLogger {
    fn ask(&mut self, oracles: &mut dyn Oracles, n: usize) {
        for _ in 0..self.queries {
            let m = Message(vec![self.rng.gen::<u8>(); self.rng.gen_range(0..4)]);
            let (s, v) = loop {
                let s = self.rng.gen_range(0..=n);
                let v = self.rng.gen_range(0..=n);
                if s != v {
                    break (s, v);
                }
            };
            let sim = self.rng.gen_bool(0.5);
            let r = if sim { oracles.sim(&m, s, v) } else { oracles.sign(&m, s, v) };
            self.log.lock().unwrap().push((sim as u8, m, s, v, r.map(|sig| sig.to_bytes())));
        }
    }
}

impl dvs_lab::TwoPhaseAdversary for QueryLogger {
    fn phase1(&mut self, view: &View, oracles: &mut dyn Oracles, _: &mut dyn RngCore) -> (ChallengeRequest, AdversaryState) {
        let View::Psi(v) = view else {
            return (ChallengeRequest::Abstain, AdversaryState::default());
        };
        self.ask(oracles, v.n());
        let m = Message(vec![b'*', self.rng.gen()]);
        (ChallengeRequest::Message(m.clone()), AdversaryState::encode(&(v.n(), m)))
    }

    fn phase2(&mut self, state: AdversaryState, sigma_star: &Signature, oracles: &mut dyn Oracles, _: &mut dyn RngCore) -> usize {
        let Some((n, m)) = state.decode::<(usize, Message)>() else {
            return 0;
        };
        self.ask(oracles, n);
        match oracles.sign(&m, 0, n) {
            Ok(sig) if sig == *sigma_star => 0,
            _ => 1,
        }
    }
}

/// The embedded game against the same n-party game played honestly with
/// the outer and internal keys combined.
fn c9_embedding() -> Outcome {
    const N: usize = 5;
    const TRIALS: u64 = 100;
    const QUERIES: usize = 6;
    let scheme: Arc<dyn DvsScheme> = make_scheme(SchemeId::Dhmac);
    let cfg = GameConfig::new(GameKind::Psi, SchemeId::Dhmac, AdversaryId::Random).with_oracles(OracleChoice::NoVerify);
    let mut answers = 0;
    let mut coinciding = 0;
    for i in 0..TRIALS {
        let embedded_log = Log::default();
        let inner = QueryLogger {
            rng: trial_rng(SEED ^ 1, i),
            queries: QUERIES,
            log: embedded_log.clone(),
        };
        let mut wrapped = embed_n_to_2(inner, N, scheme.clone());
        // Replays the outer game's draws to recover c, the keys and the params.
        let mut replay = trial_rng(SEED, i);
        let c: usize = replay.gen_range(0..2);
        let params = scheme.setup(16, &mut replay).map_err(|e| e.to_string())?;
        let outer = PartyRoster::generate(&*scheme, &params, 2, &mut replay).map_err(|e| e.to_string())?;

        let embedded = run_psi(&cfg, &*scheme, &mut wrapped, &mut trial_rng(SEED, i)).map_err(|e| e.to_string())?;
        if embedded.challenge != Some(c) {
            return Err(format!("trial {i}: replayed challenge index differs"));
        }

        let mut keys = outer.keypairs()[..2].to_vec();
        keys.extend_from_slice(wrapped.internal_keys());
        keys.push(outer.keypairs()[2]);
        let roster = PartyRoster::new(keys).map_err(|e| e.to_string())?;
        let honest_log = Log::default();
        let mut honest_adversary = QueryLogger {
            rng: trial_rng(SEED ^ 1, i),
            queries: QUERIES,
            log: honest_log.clone(),
        };
        let mut oracles = standard_oracles(&*scheme, &params, &roster, i);
        let honest = play_psi(&*scheme, &params, &roster, c, &mut oracles, &mut honest_adversary, 2, &mut ChaCha20Rng::seed_from_u64(i));

        let (e, h) = (embedded_log.lock().unwrap(), honest_log.lock().unwrap());
        if *e != *h {
            let at = e.iter().zip(h.iter()).position(|(a, b)| a != b).unwrap_or(e.len().min(h.len()));
            return Err(format!("trial {i}: answer {at} differs: {:?} vs {:?}", e.get(at), h.get(at)));
        }
        answers += e.len();
        if (embedded.guess, embedded.won) == (honest.guess, honest.won) {
            coinciding += 1;
        }
    }
    check(
        answers >= 1000 && coinciding == TRIALS,
        format!("{answers} answers identical ; {coinciding}/{TRIALS} outcomes coincide"),
    )
}

fn c10_hybrids() -> Outcome {
    // Gm_0 against the no-verify privacy game, trial for trial.
    let scheme = make_scheme(SchemeId::Transferable);
    let hybrid0 = Experiment::new(
        GameConfig::new(GameKind::Hybrid, SchemeId::Transferable, AdversaryId::CrossoverProbe)
            .with_n(3)
            .with_hybrid_index(0),
    )
    .map_err(|e| e.to_string())?;
    let nv = GameConfig::new(GameKind::Psi, SchemeId::Transferable, AdversaryId::CrossoverProbe)
        .with_n(3)
        .with_oracles(OracleChoice::NoVerify);
    for i in 0..1000 {
        let a = hybrid0.run_trial(&mut trial_rng(SEED, i)).map_err(|e| e.to_string())?;
        let mut adversary = AdversaryId::CrossoverProbe.build().expect("two-phase");
        let b = run_psi(&nv, &*scheme, &mut adversary, &mut trial_rng(SEED, i)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("trial {i}: Gm_0 {a:?} vs no-verify {b:?}"));
        }
    }

    // On dhmac every hybrid is the same game.
    let dhmac: Vec<Experiment> = (0..=5)
        .map(|j| {
            Experiment::new(
                GameConfig::new(GameKind::Hybrid, SchemeId::Dhmac, AdversaryId::CrossoverProbe)
                    .with_n(4)
                    .with_hybrid_index(j),
            )
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for i in 0..1000 {
        let first = dhmac[0].run_trial(&mut trial_rng(SEED, i)).map_err(|e| e.to_string())?;
        for (j, x) in dhmac.iter().enumerate().skip(1) {
            if x.run_trial(&mut trial_rng(SEED, i)).map_err(|e| e.to_string())? != first {
                return Err(format!("dhmac trial {i}: Gm_{j} differs from Gm_0"));
            }
        }
    }

    // Locate the largest gap between consecutive hybrids.
    let rates: Vec<AdvantageEstimate> = (0..=4)
        .map(|j| {
            est(
                GameConfig::new(GameKind::Hybrid, SchemeId::Transferable, AdversaryId::CrossoverProbe)
                    .with_n(3)
                    .with_hybrid_index(j),
                10_000,
                SEED,
            )
        })
        .collect();
    let k = (0..4)
        .max_by(|&a, &b| {
            let ga = rates[a].p_hat - rates[a + 1].p_hat;
            let gb = rates[b].p_hat - rates[b + 1].p_hat;
            ga.abs().total_cmp(&gb.abs())
        })
        .expect("four gaps");
    let (lo_k, hi_k) = rates[k].ci95;
    let (lo_k1, hi_k1) = rates[k + 1].ci95;
    let gap = rates[k].p_hat - rates[k + 1].p_hat;
    let half_gap = (0.5 * (lo_k - hi_k1), 0.5 * (hi_k - lo_k1));
    let nt = est(
        GameConfig::new(GameKind::Nt, SchemeId::Transferable, AdversaryId::CrossoverProbe)
            .with_n(3)
            .with_reduction(ReductionKind::NtHybrid)
            .with_hybrid_index(k),
        10_000,
        SEED,
    );
    let (a, b) = nt.advantage_interval();
    let overlap = a <= half_gap.1 && half_gap.0 <= b;
    let rates: Vec<String> = rates.iter().map(|r| format!("{:.4}", r.p_hat)).collect();
    check(
        overlap && gap.abs() > 0.1,
        format!(
            "hybrid rates [{}], gap at k={k} {gap:.4} ; Adv_nt {:.4} in [{a:.4}, {b:.4}] vs gap/2 in [{:.4}, {:.4}]",
            rates.join(", "),
            nt.advantage,
            half_gap.0,
            half_gap.1
        ),
    )
}

fn c11_reproducible() -> Outcome {
    let configs = [
        GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Random).with_n(3),
        GameConfig::new(GameKind::Psi, SchemeId::Leaky, AdversaryId::Trailer)
            .with_n(3)
            .with_reduction(ReductionKind::Nf2adv),
        GameConfig::new(GameKind::Hybrid, SchemeId::Transferable, AdversaryId::CrossoverProbe)
            .with_n(3)
            .with_hybrid_index(1),
    ];
    let mut detail = Vec::new();
    for cfg in configs {
        let x = Experiment::new(cfg).map_err(|e| e.to_string())?;
        let one = x.estimate(5000, SEED, 1).map_err(|e| e.to_string())?;
        let four = x.estimate(5000, SEED, 4).map_err(|e| e.to_string())?;
        if one.wins != four.wins {
            return Err(format!("{}: {} wins with 1 job, {} with 4", x.adversary_label(), one.wins, four.wins));
        }
        detail.push(one.wins.to_string());
    }
    Ok(format!("wins {} identical for jobs 1 and 4", detail.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("sign equals simulate on toy dhmac", Duration::from_secs(1), c1_sign_equals_simulate),
        ("non-transferability", Duration::from_secs(5), c2_non_transferability),
        ("leaky privacy break", Duration::from_secs(10), c3_leaky_privacy),
        ("psi bounded by nrpsi", Duration::from_secs(60), c4_nr_to_nf),
        ("nrpsi adversary wrapped for psi", Duration::from_secs(60), c5_nf_to_nr),
        ("advpsi adversary wrapped for psi", Duration::from_secs(600), c6_nf_to_adaptive),
        ("unforgeability", Duration::from_secs(5), c7_forgery),
        ("verify stripping and extraction", Duration::from_secs(10), c8_strip_and_extract),
        ("n-to-2 embedding", Duration::from_secs(10), c9_embedding),
        ("hybrid argument", Duration::from_secs(300), c10_hybrids),
        ("reproducibility", Duration::from_secs(30), c11_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d} ; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} ({:.2}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
