//! Python bindings: schemes, advantage estimates and spec runs.

use std::sync::{Arc, Mutex};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use dvs_lab::dvs::{DvsScheme, Message, Params, Signature};
use dvs_lab::estimator::{self, AdvantageEstimate, Direction};
use dvs_lab::experiment::{run_spec as run_spec_doc, Experiment, ExperimentSpec};
use dvs_lab::games::{GameConfig, GameKind, OracleChoice};
use dvs_lab::group::{GroupElement, GroupProfile, Scalar};
use dvs_lab::reductions::ReductionKind;
use dvs_lab::schemes::{make_scheme_with, SchemeId};
use dvs_lab::{AdversaryId, Bottom, Error};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(value_error)
}

/// A scheme instance with fixed public parameters and its own rng.
#[pyclass(name = "Scheme", module = "dvslab")]
pub struct PyScheme {
    scheme: Arc<dyn DvsScheme>,
    params: Params,
    rng: Mutex<ChaCha20Rng>,
}

impl PyScheme {
    fn scalar(&self, x: u64) -> PyResult<Scalar> {
        Scalar::new(x, &self.params.group).ok_or_else(|| value_error(format!("secret key {x} is not below q")))
    }

    fn rng(&self) -> std::sync::MutexGuard<'_, ChaCha20Rng> {
        self.rng.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn signature<'py>(&self, py: Python<'py>, r: Result<Signature, Bottom>) -> PyResult<Bound<'py, PyBytes>> {
        let sig = r.map_err(value_error)?;
        Ok(PyBytes::new(py, &sig.to_bytes()))
    }
}

#[pymethods]
impl PyScheme {
    #[new]
    #[pyo3(signature = (name, kappa = 16, profile = "standard", seed = 0))]
    fn new(name: &str, kappa: u32, profile: &str, seed: u64) -> PyResult<Self> {
        let scheme = make_scheme_with(parse::<SchemeId>(name)?, parse::<GroupProfile>(profile)?);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params = scheme.setup(kappa, &mut rng).map_err(value_error)?;
        Ok(PyScheme {
            scheme,
            params,
            rng: Mutex::new(rng),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.scheme.label().to_string()
    }

    #[getter]
    fn kappa(&self) -> u32 {
        self.params.kappa
    }

    /// `(p, q, g)`
    #[getter]
    fn group(&self) -> (u64, u64, u64) {
        let g = &self.params.group;
        (g.p, g.q, g.g)
    }

    #[getter]
    fn tag_len(&self) -> usize {
        self.params.group.tag_len()
    }

    /// Returns `(pk, sk)`.
    fn keygen(&self) -> (u64, u64) {
        let k = self.scheme.keygen(&self.params, &mut *self.rng());
        (k.pk.value(), k.sk.value())
    }

    fn sign<'py>(&self, py: Python<'py>, sk_s: u64, pk_s: u64, pk_v: u64, message: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let sk = self.scalar(sk_s)?;
        let r = self.scheme.sign(
            sk,
            GroupElement::from_raw(pk_s),
            GroupElement::from_raw(pk_v),
            &Message::from(message),
            &self.params,
            &mut *self.rng(),
        );
        self.signature(py, r)
    }

    fn simulate<'py>(&self, py: Python<'py>, sk_v: u64, pk_v: u64, pk_s: u64, message: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let sk = self.scalar(sk_v)?;
        let r = self.scheme.simulate(
            sk,
            GroupElement::from_raw(pk_v),
            GroupElement::from_raw(pk_s),
            &Message::from(message),
            &self.params,
            &mut *self.rng(),
        );
        self.signature(py, r)
    }

    fn verify(&self, sk_v: u64, pk_v: u64, pk_s: u64, message: &[u8], signature: &[u8]) -> PyResult<bool> {
        let sk = self.scalar(sk_v)?;
        let sigma = Signature::from_bytes(signature, self.params.group.tag_len())
            .ok_or_else(|| value_error("signature is shorter than a tag"))?;
        self.scheme
            .verify(
                sk,
                GroupElement::from_raw(pk_v),
                GroupElement::from_raw(pk_s),
                &Message::from(message),
                &sigma,
                &self.params,
            )
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Scheme({:?}, kappa={})", self.scheme.label(), self.params.kappa)
    }
}

#[pyclass(name = "Estimate", module = "dvslab", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyEstimate {
    wins: u64,
    trials: u64,
    p_hat: f64,
    baseline: f64,
    advantage: f64,
    ci95: (f64, f64),
}

impl From<AdvantageEstimate> for PyEstimate {
    fn from(e: AdvantageEstimate) -> Self {
        PyEstimate {
            wins: e.wins,
            trials: e.trials,
            p_hat: e.p_hat,
            baseline: e.baseline,
            advantage: e.advantage,
            ci95: e.ci95,
        }
    }
}

impl From<&PyEstimate> for AdvantageEstimate {
    fn from(e: &PyEstimate) -> Self {
        AdvantageEstimate {
            wins: e.wins,
            trials: e.trials,
            p_hat: e.p_hat,
            baseline: e.baseline,
            advantage: e.advantage,
            ci95: e.ci95,
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "Estimate(wins={}, trials={}, advantage={:.6}, ci95=({:.6}, {:.6}))",
            self.wins, self.trials, self.advantage, self.ci95.0, self.ci95.1
        )
    }
}

/// Monte Carlo estimate of an adversary's advantage in one game.
#[pyfunction]
#[pyo3(signature = (
    game, scheme, adversary, *, n = 2, kappa = 16, trials = 10_000, seed = 0, jobs = 1,
    oracles = "standard", reduction = None, c = None, j = None, profile = "standard"
))]
#[allow(clippy::too_many_arguments)]
fn estimate(
    py: Python<'_>,
    game: &str,
    scheme: &str,
    adversary: &str,
    n: usize,
    kappa: u32,
    trials: u64,
    seed: u64,
    jobs: usize,
    oracles: &str,
    reduction: Option<&str>,
    c: Option<usize>,
    j: Option<usize>,
    profile: &str,
) -> PyResult<PyEstimate> {
    let cfg = GameConfig {
        kind: parse::<GameKind>(game)?,
        scheme: parse::<SchemeId>(scheme)?,
        adversary: parse::<AdversaryId>(adversary)?,
        oracles: parse::<OracleChoice>(oracles)?,
        reduction: reduction.map(parse::<ReductionKind>).transpose()?,
        kappa,
        n,
        c,
        hybrid_index: j,
        profile: parse::<GroupProfile>(profile)?,
    };
    let experiment = Experiment::new(cfg).map_err(value_error)?;
    let est = py
        .detach(|| experiment.estimate(trials, seed, jobs))
        .map_err(value_error)?;
    Ok(est.into())
}

#[pyfunction]
#[pyo3(signature = (wins, trials, level = 0.95))]
fn wilson_ci(wins: u64, trials: u64, level: f64) -> PyResult<(f64, f64)> {
    if wins > trials || !(0.0 < level && level < 1.0) {
        return Err(value_error("need wins <= trials and 0 < level < 1"));
    }
    Ok(estimator::wilson_ci(wins, trials, level))
}

/// Whether `factor * Adv(lhs)` relates to `Adv(rhs)` as `direction` says.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, factor = 1.0, direction = "leq", slack = estimator::DEFAULT_SLACK))]
fn check_relation(lhs: PyRef<'_, PyEstimate>, rhs: PyRef<'_, PyEstimate>, factor: f64, direction: &str, slack: f64) -> PyResult<bool> {
    let direction = parse::<Direction>(direction)?;
    let verdict = estimator::check_relation(&(&*lhs).into(), &(&*rhs).into(), factor, direction, slack);
    Ok(verdict.holds)
}

/// `(p, q, g)` for the group at security level `kappa`.
#[pyfunction]
#[pyo3(signature = (kappa, profile = "standard"))]
fn setup_group(kappa: u32, profile: &str) -> PyResult<(u64, u64, u64)> {
    let g = dvs_lab::group::setup_group(kappa, parse::<GroupProfile>(profile)?).map_err(value_error)?;
    Ok((g.p, g.q, g.g))
}

/// Runs a TOML or JSON spec and returns the result document as JSON.
#[pyfunction]
#[pyo3(signature = (text, jobs = 1))]
fn run_spec(py: Python<'_>, text: &str, jobs: usize) -> PyResult<String> {
    let spec = ExperimentSpec::parse(text).map_err(value_error)?;
    let doc = py.detach(|| run_spec_doc(&spec, jobs)).map_err(value_error)?;
    Ok(doc.to_json())
}

#[pymodule]
pub fn dvslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_ci, m)?)?;
    m.add_function(wrap_pyfunction!(check_relation, m)?)?;
    m.add_function(wrap_pyfunction!(setup_group, m)?)?;
    m.add_function(wrap_pyfunction!(run_spec, m)?)?;
    Ok(())
}
