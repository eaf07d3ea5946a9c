//! Macro level: MEP chromosomes and the steady-state GA evolving them.

mod chromosome;
mod config;
mod ga;

pub use chromosome::{Gene, GeneKind, MepChromosome};
pub use config::MacroConfig;
pub use ga::{
    binary_tournament, eval_seed, evolve, mutate_chromosome, random_chromosome, random_gene,
    steady_state_iteration, uniform_crossover, ExperimentTrace, GenerationRecord,
};
