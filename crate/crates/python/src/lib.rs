//! Python bindings for `metaea`.
//!
//! Positions and gene labels are 1-based on the Python side, matching the
//! chromosome text format.
//!
//!     import metaea
//!     c = metaea.Chromosome.parse("1: Initialize\n2: Mutate 1\n")
//!     print(c.decode(2))
//!     report = metaea.evaluate(c, metaea.Objective("griewangk", 5), runs=50, seed=1)

use std::collections::HashMap;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use metaea::engine::{random_chromosome, MacroConfig, MepChromosome};
use metaea::harness::{self, ExperimentResult};
use metaea::micro::{self, count_operators, EaProgram, EvalReport, OperatorCounts};
use metaea::objectives::{self, ObjectiveSpec};
use metaea::{seed, Error, Parallelism};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parallelism(parallel: bool) -> Parallelism {
    if parallel {
        Parallelism::Parallel
    } else {
        Parallelism::Sequential
    }
}

fn counts_dict(c: &OperatorCounts) -> HashMap<&'static str, usize> {
    HashMap::from([
        ("initializations", c.initializations),
        ("selections", c.selections),
        ("crossovers", c.crossovers),
        ("mutations", c.mutations),
    ])
}

/// An MEP chromosome: one EA instruction per gene.
#[pyclass(name = "Chromosome", module = "metaea", frozen)]
#[derive(Clone)]
struct PyChromosome {
    inner: MepChromosome,
}

#[pymethods]
impl PyChromosome {
    /// Parse the `label: Kind args` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        MepChromosome::parse(text)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Random valid chromosome of `code_length` genes.
    #[staticmethod]
    fn random(code_length: usize, seed: u64) -> PyResult<Self> {
        if code_length == 0 {
            return Err(PyValueError::new_err("code_length must be at least 1"));
        }
        let inner = random_chromosome(code_length, &mut seed::stream(seed));
        Ok(Self { inner })
    }

    /// Genes as `(kind, [1-based args])` tuples.
    fn genes(&self) -> Vec<(String, Vec<usize>)> {
        self.inner
            .genes()
            .iter()
            .map(|g| {
                (
                    g.kind().to_string(),
                    g.args().iter().map(|a| a + 1).collect(),
                )
            })
            .collect()
    }

    /// The EA encoded at 1-based `position`.
    fn decode(&self, position: usize) -> PyResult<PyProgram> {
        if position == 0 || position > self.inner.len() {
            return Err(PyIndexError::new_err(format!(
                "position {position} is outside 1..={}",
                self.inner.len()
            )));
        }
        Ok(PyProgram {
            inner: micro::decode(&self.inner, position - 1),
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Chromosome(<{} genes>)", self.inner.len())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner.genes() == other.inner.genes()
    }
}

/// A decoded EA.
#[pyclass(name = "Program", module = "metaea", frozen)]
struct PyProgram {
    inner: EaProgram,
}

#[pymethods]
impl PyProgram {
    /// 1-based position of the gene the program was decoded from.
    #[getter]
    fn source_position(&self) -> usize {
        self.inner.source_position + 1
    }

    fn counts(&self) -> HashMap<&'static str, usize> {
        counts_dict(&count_operators(&self.inner))
    }

    /// The program as a standalone chromosome.
    fn to_chromosome(&self) -> PyChromosome {
        PyChromosome {
            inner: self.inner.to_chromosome(),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// A registered benchmark objective bound to a dimension.
#[pyclass(name = "Objective", module = "metaea", frozen)]
struct PyObjective {
    inner: ObjectiveSpec,
}

#[pymethods]
impl PyObjective {
    #[new]
    fn new(name: &str, dimension: usize) -> PyResult<Self> {
        objectives::lookup(name, dimension)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn known() -> Vec<&'static str> {
        objectives::known_objectives()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn bounds(&self) -> (f64, f64) {
        (self.inner.lower(), self.inner.upper())
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&x).map_err(to_py)
    }
}

/// Repeated-run assessment of a chromosome.
#[pyclass(name = "EvalReport", module = "metaea", frozen, get_all)]
struct PyEvalReport {
    fitness: f64,
    /// 1-based.
    best_gene: usize,
    per_gene_mean: Vec<f64>,
    runs: usize,
}

impl From<EvalReport> for PyEvalReport {
    fn from(r: EvalReport) -> Self {
        Self {
            fitness: r.fitness,
            best_gene: r.best_gene + 1,
            per_gene_mean: r.per_gene_mean,
            runs: r.runs,
        }
    }
}

#[pymethods]
impl PyEvalReport {
    fn __repr__(&self) -> String {
        format!(
            "EvalReport(fitness={}, best_gene={}, runs={})",
            self.fitness, self.best_gene, self.runs
        )
    }
}

/// Run every encoded EA `runs` times and average per gene.
#[pyfunction]
#[pyo3(signature = (chromosome, objective, runs, seed=0, parallel=true))]
fn evaluate(
    py: Python<'_>,
    chromosome: &PyChromosome,
    objective: &PyObjective,
    runs: usize,
    seed: u64,
    parallel: bool,
) -> PyResult<PyEvalReport> {
    if runs == 0 {
        return Err(PyValueError::new_err("runs must be at least 1"));
    }
    let (c, obj) = (&chromosome.inner, &objective.inner);
    py.allow_threads(|| micro::evaluate(c, obj, runs, seed, parallelism(parallel)))
        .map(Into::into)
        .map_err(to_py)
}

/// Griewangk's function.
#[pyfunction]
fn griewangk(x: Vec<f64>) -> PyResult<f64> {
    objectives::griewangk(&x).map_err(to_py)
}

/// Experiment configuration.
#[pyclass(name = "Config", module = "metaea", get_all, set_all)]
#[derive(Clone)]
struct PyConfig {
    population_size: usize,
    code_length: usize,
    generations: usize,
    crossover_probability: f64,
    mutations_per_chromosome: usize,
    runs_per_eval: usize,
    objective: String,
    dimension: usize,
    master_seed: u64,
    macro_runs: usize,
}

impl From<MacroConfig> for PyConfig {
    fn from(c: MacroConfig) -> Self {
        Self {
            population_size: c.population_size,
            code_length: c.code_length,
            generations: c.generations,
            crossover_probability: c.crossover_probability,
            mutations_per_chromosome: c.mutations_per_chromosome,
            runs_per_eval: c.runs_per_eval,
            objective: c.objective,
            dimension: c.dimension,
            master_seed: c.master_seed,
            macro_runs: c.macro_runs,
        }
    }
}

impl From<&PyConfig> for MacroConfig {
    fn from(c: &PyConfig) -> Self {
        MacroConfig {
            population_size: c.population_size,
            code_length: c.code_length,
            generations: c.generations,
            crossover_probability: c.crossover_probability,
            mutations_per_chromosome: c.mutations_per_chromosome,
            runs_per_eval: c.runs_per_eval,
            objective: c.objective.clone(),
            dimension: c.dimension,
            master_seed: c.master_seed,
            macro_runs: c.macro_runs,
        }
    }
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn full_scale() -> Self {
        MacroConfig::full_scale().into()
    }

    #[staticmethod]
    fn desk_scale() -> Self {
        MacroConfig::desk_scale().into()
    }

    /// Parse `key = value` config text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        harness::parse_config_str(text)
            .map(Into::into)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        harness::parse_config(path).map(Into::into).map_err(to_py)
    }

    fn validate(&self) -> PyResult<()> {
        MacroConfig::from(self).validate().map_err(to_py)
    }

    fn to_text(&self) -> String {
        harness::format_config(&self.into())
    }

    fn chromosome_evaluations(&self) -> u128 {
        MacroConfig::from(self).chromosome_evaluations()
    }

    fn __repr__(&self) -> String {
        format!("Config({})", self.to_text().trim_end().replace('\n', ", "))
    }
}

/// Aggregated result of `run_experiment`.
#[pyclass(name = "ExperimentResult", module = "metaea", frozen)]
struct PyExperimentResult {
    inner: ExperimentResult,
}

#[pymethods]
impl PyExperimentResult {
    /// 1-based index of the run with the lowest final best fitness.
    #[getter]
    fn best_run(&self) -> usize {
        self.inner.best_run + 1
    }

    #[getter]
    fn best_run_fitness(&self) -> Vec<f64> {
        self.inner.best_run_fitness.clone()
    }

    #[getter]
    fn mean_fitness(&self) -> Vec<f64> {
        self.inner.mean_fitness.clone()
    }

    /// Per-generation operator counts averaged over runs.
    #[getter]
    fn mean_operator_counts(&self) -> Vec<HashMap<&'static str, f64>> {
        self.inner
            .mean_operator_counts
            .iter()
            .map(|m| {
                HashMap::from([
                    ("initializations", m.initializations),
                    ("selections", m.selections),
                    ("crossovers", m.crossovers),
                    ("mutations", m.mutations),
                ])
            })
            .collect()
    }

    /// Best chromosome of the final population of each run.
    fn best_chromosomes(&self) -> Vec<PyChromosome> {
        self.inner
            .traces
            .iter()
            .map(|t| PyChromosome {
                inner: t.best.clone(),
            })
            .collect()
    }

    /// Write fitness.csv and operators.csv; returns the paths.
    fn write_csv(&self, out_dir: std::path::PathBuf) -> PyResult<Vec<std::path::PathBuf>> {
        harness::write_csv(&self.inner, out_dir).map_err(to_py)
    }

    fn fitness_csv(&self) -> String {
        harness::fitness_csv(&self.inner)
    }

    fn operators_csv(&self) -> String {
        harness::operators_csv(&self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (config, parallel=true))]
fn run_experiment(
    py: Python<'_>,
    config: &PyConfig,
    parallel: bool,
) -> PyResult<PyExperimentResult> {
    let config = MacroConfig::from(config);
    py.allow_threads(|| harness::run_experiment(&config, parallelism(parallel)))
        .map(|inner| PyExperimentResult { inner })
        .map_err(to_py)
}

#[pymodule]
#[pyo3(name = "metaea")]
fn metaea_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChromosome>()?;
    m.add_class::<PyProgram>()?;
    m.add_class::<PyObjective>()?;
    m.add_class::<PyEvalReport>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyExperimentResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(griewangk, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
