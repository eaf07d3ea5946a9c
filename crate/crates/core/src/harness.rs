//! Multi-run experiments, config files and CSV output.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::engine::{evolve, ExperimentTrace, MacroConfig};
use crate::error::{Error, Result};
use crate::objectives::lookup;
use crate::seed;
use crate::Parallelism;

const KEYS: [&str; 10] = [
    "population_size",
    "code_length",
    "generations",
    "crossover_probability",
    "mutations_per_chromosome",
    "runs_per_eval",
    "objective",
    "dimension",
    "master_seed",
    "macro_runs",
];

const OPTIONAL: [&str; 2] = ["master_seed", "macro_runs"];

/// Parse a flat `key = value` config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<MacroConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

/// Parse config text. Blank lines and `#` comments are ignored. All
/// problems are collected and reported together with their line numbers.
pub fn parse_config_str(text: &str) -> Result<MacroConfig> {
    let mut seen: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut problems = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            problems.push(format!("line {line_no}: expected 'key = value'"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        match KEYS.iter().find(|k| **k == key) {
            None => problems.push(format!("line {line_no}: unknown key '{key}'")),
            Some(k) => {
                if let Some((first, _)) = seen.get(k) {
                    problems.push(format!(
                        "line {line_no}: duplicate key '{key}' (first set on line {first})"
                    ));
                } else {
                    seen.insert(k, (line_no, value));
                }
            }
        }
    }

    let missing: Vec<&str> = KEYS
        .iter()
        .filter(|k| !OPTIONAL.contains(k) && !seen.contains_key(*k))
        .copied()
        .collect();
    if !missing.is_empty() {
        problems.push(format!("missing keys: {}", missing.join(", ")));
    }

    fn get<T: std::str::FromStr>(
        seen: &HashMap<&str, (usize, &str)>,
        problems: &mut Vec<String>,
        key: &str,
        default: T,
        check: impl Fn(&T) -> Option<String>,
    ) -> T {
        let Some(&(line, value)) = seen.get(key) else {
            return default;
        };
        match value.parse::<T>() {
            Ok(v) => {
                if let Some(msg) = check(&v) {
                    problems.push(format!("line {line}: {key} {msg}"));
                }
                v
            }
            Err(_) => {
                problems.push(format!("line {line}: invalid value '{value}' for {key}"));
                default
            }
        }
    }

    let positive = |v: &usize| (*v == 0).then(|| "must be at least 1".to_string());
    let none = |_: &usize| None;

    let population_size = get(&seen, &mut problems, "population_size", 2, |v: &usize| {
        (*v < 2).then(|| "must be at least 2".to_string())
    });
    let code_length = get(&seen, &mut problems, "code_length", 1, positive);
    let generations = get(&seen, &mut problems, "generations", 0, none);
    let crossover_probability = get(
        &seen,
        &mut problems,
        "crossover_probability",
        0.0,
        |p: &f64| (!(0.0..=1.0).contains(p)).then(|| format!("{p} is outside [0, 1]")),
    );
    let mutations_per_chromosome = get(&seen, &mut problems, "mutations_per_chromosome", 0, none);
    let runs_per_eval = get(&seen, &mut problems, "runs_per_eval", 1, positive);
    let objective = get(&seen, &mut problems, "objective", String::new(), |_| None);
    let dimension = get(&seen, &mut problems, "dimension", 1, positive);
    let master_seed = get(&seen, &mut problems, "master_seed", 0u64, |_| None);
    let macro_runs = get(&seen, &mut problems, "macro_runs", 1, positive);

    if !objective.is_empty() {
        if let Err(e) = lookup(&objective, 1) {
            let line = seen["objective"].0;
            problems.push(format!("line {line}: {e}"));
        }
    }

    if !problems.is_empty() {
        return Err(Error::ConfigFile(problems));
    }
    let config = MacroConfig {
        population_size,
        code_length,
        generations,
        crossover_probability,
        mutations_per_chromosome,
        runs_per_eval,
        objective,
        dimension,
        master_seed,
        macro_runs,
    };
    config.validate()?;
    Ok(config)
}

/// Render a config in the file format accepted by [`parse_config_str`].
pub fn format_config(c: &MacroConfig) -> String {
    format!(
        "population_size = {}\ncode_length = {}\ngenerations = {}\n\
         crossover_probability = {}\nmutations_per_chromosome = {}\n\
         runs_per_eval = {}\nobjective = {}\ndimension = {}\n\
         master_seed = {}\nmacro_runs = {}\n",
        c.population_size,
        c.code_length,
        c.generations,
        c.crossover_probability,
        c.mutations_per_chromosome,
        c.runs_per_eval,
        c.objective,
        c.dimension,
        c.master_seed,
        c.macro_runs
    )
}

/// Operator counts averaged over macro runs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanOperatorCounts {
    pub initializations: f64,
    pub selections: f64,
    pub crossovers: f64,
    pub mutations: f64,
}

impl MeanOperatorCounts {
    pub fn total(&self) -> f64 {
        self.initializations + self.selections + self.crossovers + self.mutations
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: MacroConfig,
    /// One trace per macro run, in run order.
    pub traces: Vec<ExperimentTrace>,
    /// Run with the lowest final best fitness (lowest index on ties).
    pub best_run: usize,
    pub best_run_fitness: Vec<f64>,
    /// Best fitness per generation averaged over runs.
    pub mean_fitness: Vec<f64>,
    pub mean_operator_counts: Vec<MeanOperatorCounts>,
}

/// Seed of macro run `run`.
pub fn macro_run_seed(master_seed: u64, run: usize) -> u64 {
    seed::derive(master_seed, run as u64)
}

/// Run `macro_runs` independent evolutions and aggregate their series.
pub fn run_experiment(config: &MacroConfig, par: Parallelism) -> Result<ExperimentResult> {
    config.validate()?;
    let objective = lookup(&config.objective, config.dimension)?;
    let one = |run: usize| {
        evolve(
            config,
            &objective,
            macro_run_seed(config.master_seed, run),
            par,
        )
    };
    let traces: Vec<ExperimentTrace> = match par {
        Parallelism::Sequential => (0..config.macro_runs).map(one).collect::<Result<_>>()?,
        Parallelism::Parallel => (0..config.macro_runs)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?,
    };
    Ok(aggregate(config.clone(), traces))
}

/// Build the aggregate series from per-run traces.
pub fn aggregate(config: MacroConfig, traces: Vec<ExperimentTrace>) -> ExperimentResult {
    assert!(!traces.is_empty());
    let generations = traces[0].records.len();
    let runs = traces.len() as f64;

    let final_best = |t: &ExperimentTrace| t.records.last().expect("non-empty trace").best_fitness;
    let mut best_run = 0;
    for (i, t) in traces.iter().enumerate().skip(1) {
        if final_best(t) < final_best(&traces[best_run]) {
            best_run = i;
        }
    }

    let best_run_fitness = traces[best_run]
        .records
        .iter()
        .map(|r| r.best_fitness)
        .collect();
    let mut mean_fitness = vec![0.0; generations];
    let mut mean_operator_counts = vec![MeanOperatorCounts::default(); generations];
    for t in &traces {
        for (g, r) in t.records.iter().enumerate() {
            mean_fitness[g] += r.best_fitness;
            let c = &r.best_operator_counts;
            let m = &mut mean_operator_counts[g];
            m.initializations += c.initializations as f64;
            m.selections += c.selections as f64;
            m.crossovers += c.crossovers as f64;
            m.mutations += c.mutations as f64;
        }
    }
    for v in &mut mean_fitness {
        *v /= runs;
    }
    for m in &mut mean_operator_counts {
        m.initializations /= runs;
        m.selections /= runs;
        m.crossovers /= runs;
        m.mutations /= runs;
    }
    ExperimentResult {
        config,
        traces,
        best_run,
        best_run_fitness,
        mean_fitness,
        mean_operator_counts,
    }
}

pub const FITNESS_CSV: &str = "fitness.csv";
pub const OPERATORS_CSV: &str = "operators.csv";

pub fn fitness_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("generation,best_run_fitness,mean_fitness\n");
    for (g, (b, m)) in result
        .best_run_fitness
        .iter()
        .zip(&result.mean_fitness)
        .enumerate()
    {
        writeln!(out, "{g},{b:.6},{m:.6}").unwrap();
    }
    out
}

pub fn operators_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("generation,initializations,selections,crossovers,mutations\n");
    for (g, m) in result.mean_operator_counts.iter().enumerate() {
        writeln!(
            out,
            "{g},{:.6},{:.6},{:.6},{:.6}",
            m.initializations, m.selections, m.crossovers, m.mutations
        )
        .unwrap();
    }
    out
}

/// Write `fitness.csv` and `operators.csv` into `out_dir`, creating it if
/// needed. Returns the written paths.
pub fn write_csv(result: &ExperimentResult, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        (dir.join(FITNESS_CSV), fitness_csv(result)),
        (dir.join(OPERATORS_CSV), operators_csv(result)),
    ];
    let mut written = Vec::new();
    for (path, body) in files {
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
