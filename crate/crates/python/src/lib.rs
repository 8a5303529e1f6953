//! Python bindings for `sparsegame`.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use sparsegame::antichecker as ac;
use sparsegame::certificate as cert;
use sparsegame::solver;
use sparsegame::sparsify;
use sparsegame::{Error, GameMatrix, MixedStrategy, Player};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn player(name: &str) -> PyResult<Player> {
    name.parse().map_err(to_py)
}

/// A dense payoff matrix. Row player minimizes, column player maximizes.
#[pyclass(name = "Game", module = "sparsegame_py", frozen)]
struct PyGame {
    inner: GameMatrix,
}

#[pymethods]
impl PyGame {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGame {
            inner: GameMatrix::from_rows(rows).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn matching_pennies() -> Self {
        PyGame {
            inner: GameMatrix::matching_pennies(),
        }
    }

    #[staticmethod]
    fn rock_paper_scissors() -> Self {
        PyGame {
            inner: GameMatrix::rock_paper_scissors(),
        }
    }

    #[staticmethod]
    fn random_uniform(rows: usize, cols: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGame {
            inner: GameMatrix::random_uniform(rows, cols, seed).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: GameMatrix::from_json_str(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: GameMatrix::from_csv_reader(text.as_bytes()).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn payoff(&self, row: usize, col: usize) -> PyResult<f64> {
        if row >= self.inner.rows() || col >= self.inner.cols() {
            return Err(PyValueError::new_err(format!(
                "entry ({row}, {col}) is out of range"
            )));
        }
        Ok(self.inner.get(row, col))
    }

    fn payoffs(&self) -> Vec<Vec<f64>> {
        self.inner.row_vecs()
    }

    /// `(range_lo, range_hi)`.
    fn bounds(&self) -> (f64, f64) {
        (self.inner.range_lo(), self.inner.range_hi())
    }

    /// Best reply to a mixed strategy of `player`: `(index, value)`.
    #[pyo3(signature = (weights, player = "min"))]
    fn best_response(&self, weights: Vec<f64>, player: &str) -> PyResult<(usize, f64)> {
        let s = MixedStrategy::new(self::player(player)?, weights).map_err(to_py)?;
        let br = sparsegame::best_response(&self.inner, &s).map_err(to_py)?;
        Ok((br.index, br.value))
    }

    fn expected_payoff(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
        let p = MixedStrategy::new(Player::Min, p).map_err(to_py)?;
        let q = MixedStrategy::new(Player::Max, q).map_err(to_py)?;
        sparsegame::expected_payoff(&self.inner, &p, &q).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Game({}x{})", self.inner.rows(), self.inner.cols())
    }
}

#[pyclass(name = "SolveResult", module = "sparsegame_py", frozen, get_all)]
struct PySolveResult {
    method: String,
    value_lo: f64,
    value_hi: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    iterations: u64,
    converged: bool,
}

#[pymethods]
impl PySolveResult {
    fn gap(&self) -> f64 {
        self.value_hi - self.value_lo
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(method={}, value_lo={}, value_hi={})",
            self.method, self.value_lo, self.value_hi
        )
    }
}

impl From<solver::SolveResult> for PySolveResult {
    fn from(r: solver::SolveResult) -> Self {
        PySolveResult {
            method: match r.method {
                solver::SolveMethod::Exact => "exact".into(),
                solver::SolveMethod::Mwu => "mwu".into(),
            },
            value_lo: r.value_lo,
            value_hi: r.value_hi,
            p: r.p.weights().to_vec(),
            q: r.q.weights().to_vec(),
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[pyfunction]
fn solve_exact(game: &PyGame) -> PyResult<PySolveResult> {
    Ok(solver::solve_exact_small(&game.inner)
        .map_err(to_py)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (game, delta, max_iters = None))]
fn solve_mwu(game: &PyGame, delta: f64, max_iters: Option<u64>) -> PyResult<PySolveResult> {
    let g = &game.inner;
    let iters = max_iters.unwrap_or_else(|| {
        solver::mwu_iteration_budget(g.rows(), delta, g.range_hi() - g.range_lo())
    });
    Ok(solver::solve_mwu(g, delta, iters).map_err(to_py)?.into())
}

/// Exact when small enough, multiplicative weights otherwise.
#[pyfunction]
#[pyo3(signature = (game, delta = 1e-3))]
fn solve(game: &PyGame, delta: f64) -> PyResult<PySolveResult> {
    Ok(
        solver::solve_auto(&game.inner, &solver::SolveOptions::with_delta(delta))
            .map_err(to_py)?
            .into(),
    )
}

#[pyfunction]
fn k_uniform_bound(opponent_count: usize, epsilon: f64) -> PyResult<usize> {
    sparsify::k_uniform_bound(opponent_count, epsilon).map_err(to_py)
}

#[pyfunction]
fn dovetail_bound(opponent_count: usize, epsilon: f64) -> PyResult<usize> {
    sparsify::dovetail_bound(opponent_count, epsilon).map_err(to_py)
}

#[pyclass(name = "SparseStrategy", module = "sparsegame_py", frozen, get_all)]
struct PySparseStrategy {
    player: String,
    items: Vec<usize>,
    exploitability: f64,
    epsilon: f64,
    verified: bool,
    attempts: usize,
}

/// Draws a k-uniform strategy from `source` and retries until its
/// exploitability is within `epsilon` (scaled by the payoff range) of `value`.
#[pyfunction]
#[pyo3(signature = (game, source, value, epsilon, k = None, player = "min", seed = 0, max_attempts = 20))]
#[allow(clippy::too_many_arguments)]
fn sample_k_uniform(
    game: &PyGame,
    source: Vec<f64>,
    value: f64,
    epsilon: f64,
    k: Option<usize>,
    player: &str,
    seed: u64,
    max_attempts: usize,
) -> PyResult<PySparseStrategy> {
    let who = self::player(player)?;
    let mut params =
        sparsify::SparsifyParams::for_game(&game.inner, who, epsilon).map_err(to_py)?;
    params.k = k.unwrap_or(params.k);
    params.seed = seed;
    params.max_attempts = max_attempts;
    let source = MixedStrategy::new(who, source).map_err(to_py)?;
    let s = sparsify::sample_k_uniform(&game.inner, &source, value, &params).map_err(to_py)?;
    Ok(PySparseStrategy {
        player: who.to_string(),
        items: s.multiset.items().to_vec(),
        exploitability: s.exploitability,
        epsilon: s.epsilon,
        verified: s.verified,
        attempts: s.attempts,
    })
}

/// Deterministic k-uniform strategy: `(items, exploitability)`.
#[pyfunction]
#[pyo3(signature = (game, k, player = "min"))]
fn greedy_k_uniform(game: &PyGame, k: usize, player: &str) -> PyResult<(Vec<usize>, f64)> {
    let (m, x) =
        sparsify::greedy_k_uniform(&game.inner, k, self::player(player)?).map_err(to_py)?;
    Ok((m.items().to_vec(), x))
}

#[pyclass(name = "DovetailOutcome", module = "sparsegame_py", frozen, get_all)]
struct PyDovetailOutcome {
    player: String,
    items: Vec<usize>,
    achieved: f64,
    threshold: f64,
    epsilon: f64,
    verified: bool,
    within_bound: bool,
    attempts: usize,
}

impl From<sparsify::DovetailOutcome> for PyDovetailOutcome {
    fn from(o: sparsify::DovetailOutcome) -> Self {
        PyDovetailOutcome {
            player: o.set.player().to_string(),
            items: o.set.items().to_vec(),
            achieved: o.achieved,
            threshold: o.threshold,
            epsilon: o.epsilon,
            verified: o.verified,
            within_bound: o.within_bound,
            attempts: o.attempts,
        }
    }
}

/// `method` is `"sampled"` or `"greedy"`.
#[pyfunction]
#[pyo3(signature = (game, epsilon, player = "min", method = "sampled", seed = 0, max_attempts = 20))]
fn dovetail_set(
    game: &PyGame,
    epsilon: f64,
    player: &str,
    method: &str,
    seed: u64,
    max_attempts: usize,
) -> PyResult<PyDovetailOutcome> {
    let method = match method {
        "sampled" => sparsify::DovetailMethod::Sampled { seed, max_attempts },
        "greedy" => sparsify::DovetailMethod::GreedyCover,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(
        sparsify::dovetail_set(&game.inner, epsilon, self::player(player)?, method)
            .map_err(to_py)?
            .into(),
    )
}

#[pyclass(name = "Certificate", module = "sparsegame_py", frozen)]
struct PyCertificate {
    inner: cert::StrategyCertificate,
}

#[pymethods]
impl PyCertificate {
    #[new]
    fn new(
        claimed_value: f64,
        epsilon: f64,
        min_multiset: Vec<usize>,
        max_multiset: Vec<usize>,
        bounds: (f64, f64),
    ) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: cert::StrategyCertificate::new(
                claimed_value,
                epsilon,
                min_multiset,
                max_multiset,
                bounds,
            )
            .map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: cert::StrategyCertificate::from_json_str(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn claimed_value(&self) -> f64 {
        self.inner.claimed_value
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn min_multiset(&self) -> Vec<usize> {
        self.inner.min_multiset.items().to_vec()
    }

    #[getter]
    fn max_multiset(&self) -> Vec<usize> {
        self.inner.max_multiset.items().to_vec()
    }

    #[getter]
    fn bounds(&self) -> (f64, f64) {
        self.inner.declared_bounds
    }
}

#[pyclass(name = "Verdict", module = "sparsegame_py", frozen, get_all)]
struct PyVerdict {
    accepted: bool,
    min_exploitability: f64,
    max_guarantee: f64,
    reason: String,
}

#[pyfunction]
#[pyo3(signature = (game, epsilon, seed = 0))]
fn make_certificate(game: &PyGame, epsilon: f64, seed: u64) -> PyResult<PyCertificate> {
    Ok(PyCertificate {
        inner: cert::make_certificate(&game.inner, epsilon, seed).map_err(to_py)?,
    })
}

#[pyfunction]
fn check_certificate(game: &PyGame, certificate: &PyCertificate) -> PyResult<PyVerdict> {
    let v = cert::check_certificate(&game.inner, &certificate.inner).map_err(to_py)?;
    let reason = serde_json::to_value(v.reason)
        .ok()
        .and_then(|r| r.as_str().map(str::to_string))
        .unwrap_or_default();
    Ok(PyVerdict {
        accepted: v.accepted,
        min_exploitability: v.min_exploitability,
        max_guarantee: v.max_guarantee,
        reason,
    })
}

#[pyclass(name = "Language", module = "sparsegame_py", frozen)]
struct PyLanguage {
    inner: ac::Language,
}

#[pymethods]
impl PyLanguage {
    /// `parity`, `majority`, `x<i>`, `const0`, `const1` or `random:<seed>`.
    #[staticmethod]
    fn builtin(name: &str, n: usize) -> PyResult<Self> {
        Ok(PyLanguage {
            inner: ac::Language::builtin(name, n).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_truth_table(name: &str, table: &str) -> PyResult<Self> {
        Ok(PyLanguage {
            inner: ac::Language::parse_truth_table(name, table).map_err(to_py)?,
        })
    }

    fn truth_table(&self) -> String {
        self.inner.to_truth_table()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }
}

#[pyclass(name = "ProgramFamily", module = "sparsegame_py", frozen)]
struct PyProgramFamily {
    inner: ac::ProgramFamily,
}

#[pymethods]
impl PyProgramFamily {
    /// `constants`, `dictators`, `pairs`, `junta1`, `junta2` or `junta3`.
    #[staticmethod]
    fn builtin(name: &str, n: usize) -> PyResult<Self> {
        Ok(PyProgramFamily {
            inner: ac::ProgramFamily::builtin(name, n).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyProgramFamily {
            inner: ac::ProgramFamily::from_json_str(text).map_err(to_py)?,
        })
    }

    /// One program per row; each row needs `2**n` step counts.
    #[staticmethod]
    fn from_cost_matrix(name: &str, costs: Vec<Vec<u64>>) -> PyResult<Self> {
        Ok(PyProgramFamily {
            inner: ac::ProgramFamily::from_cost_matrix(name, costs).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn names(&self) -> Vec<String> {
        self.inner
            .programs()
            .iter()
            .map(|p| p.name.clone())
            .collect()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "AntiChecker", module = "sparsegame_py", frozen)]
struct PyAntiChecker {
    inner: ac::AntiChecker,
}

#[pymethods]
impl PyAntiChecker {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyAntiChecker {
            inner: ac::AntiChecker::from_json_str(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// The multiset as 0/1 strings.
    #[getter]
    fn items(&self) -> Vec<String> {
        self.inner.bitstrings()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn guaranteed_error(&self) -> f64 {
        self.inner.guaranteed_error
    }

    #[getter]
    fn verified_min_error(&self) -> f64 {
        self.inner.verified_min_error
    }

    #[getter]
    fn value_gap(&self) -> Option<f64> {
        self.inner.value_gap
    }

    #[getter]
    fn verified(&self) -> bool {
        self.inner.verified
    }
}

#[pyfunction]
#[pyo3(signature = (language, family, epsilon, seed = 0))]
fn build_anti_checker(
    language: &PyLanguage,
    family: &PyProgramFamily,
    epsilon: f64,
    seed: u64,
) -> PyResult<PyAntiChecker> {
    Ok(PyAntiChecker {
        inner: ac::build_anti_checker(&language.inner, &family.inner, epsilon, seed)
            .map_err(to_py)?,
    })
}

#[pyfunction]
fn sample_hard(anti_checker: &PyAntiChecker, seed: u64, count: usize) -> PyResult<Vec<String>> {
    ac::sample_hard(&anti_checker.inner, seed, count).map_err(to_py)
}

#[pyfunction]
fn family_complexity(language: &PyLanguage, family: &PyProgramFamily) -> PyResult<Option<u64>> {
    ac::family_complexity(&language.inner, &family.inner).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (family, t, epsilon, seed = 0))]
fn dovetail_anti_checker(
    family: &PyProgramFamily,
    t: u64,
    epsilon: f64,
    seed: u64,
) -> PyResult<PyDovetailOutcome> {
    Ok(ac::dovetail_anti_checker(&family.inner, t, epsilon, seed)
        .map_err(to_py)?
        .into())
}

#[pymodule]
fn sparsegame_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PySparseStrategy>()?;
    m.add_class::<PyDovetailOutcome>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyVerdict>()?;
    m.add_class::<PyLanguage>()?;
    m.add_class::<PyProgramFamily>()?;
    m.add_class::<PyAntiChecker>()?;
    m.add_function(wrap_pyfunction!(solve_exact, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mwu, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(k_uniform_bound, m)?)?;
    m.add_function(wrap_pyfunction!(dovetail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sample_k_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_k_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(dovetail_set, m)?)?;
    m.add_function(wrap_pyfunction!(make_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(check_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(build_anti_checker, m)?)?;
    m.add_function(wrap_pyfunction!(sample_hard, m)?)?;
    m.add_function(wrap_pyfunction!(family_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(dovetail_anti_checker, m)?)?;
    Ok(())
}
