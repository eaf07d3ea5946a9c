use crate::error::{Error, Result};

/// Parameters of one meta-evolution experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroConfig {
    pub population_size: usize,
    pub code_length: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutations_per_chromosome: usize,
    /// Repeated runs per chromosome evaluation.
    pub runs_per_eval: usize,
    pub objective: String,
    pub dimension: usize,
    pub master_seed: u64,
    pub macro_runs: usize,
}

impl MacroConfig {
    /// Settings of the published Griewangk experiment.
    pub fn full_scale() -> Self {
        Self {
            population_size: 100,
            code_length: 3000,
            generations: 100,
            crossover_probability: 0.7,
            mutations_per_chromosome: 5,
            runs_per_eval: 200,
            objective: "griewangk".into(),
            dimension: 5,
            master_seed: 0,
            macro_runs: 10,
        }
    }

    /// A scaled-down version that finishes in seconds.
    pub fn desk_scale() -> Self {
        Self {
            population_size: 20,
            code_length: 100,
            generations: 30,
            runs_per_eval: 20,
            macro_runs: 5,
            ..Self::full_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let positive = [
            ("population_size", self.population_size),
            ("code_length", self.code_length),
            ("runs_per_eval", self.runs_per_eval),
            ("dimension", self.dimension),
            ("macro_runs", self.macro_runs),
        ];
        for (name, v) in positive {
            if v == 0 {
                problems.push(format!("{name} must be at least 1"));
            }
        }
        if self.population_size == 1 {
            problems.push("population_size must be at least 2 for tournament selection".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            problems.push(format!(
                "crossover_probability {} is outside [0, 1]",
                self.crossover_probability
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::config(problems.join("; ")))
        }
    }

    /// Chromosome evaluations over the whole experiment: the initial
    /// population plus two offspring per steady-state iteration.
    pub fn chromosome_evaluations(&self) -> u128 {
        let per_run = self.population_size as u128
            + 2 * self.generations as u128 * self.population_size as u128;
        per_run * self.macro_runs as u128
    }

    /// Upper bound on objective evaluations (every gene evaluating once per
    /// run; Select genes actually evaluate nothing).
    pub fn objective_evaluations_bound(&self) -> u128 {
        self.chromosome_evaluations() * self.runs_per_eval as u128 * self.code_length as u128
    }
}
