//! Meta-evolution of evolutionary algorithms with Multi Expression
//! Programming.
//!
//! A steady-state GA (the macro level) evolves MEP chromosomes whose genes
//! are EA operators: `Initialize`, `Mutate`, `Select` and `Crossover`. Every
//! gene position encodes one small EA (the micro level) that works on real
//! vectors of a benchmark objective. A chromosome is scored by running all
//! of its EAs repeatedly and keeping the gene with the lowest mean result.
//!
//! ```
//! use metaea::engine::MepChromosome;
//! use metaea::micro::{decode, count_operators};
//!
//! let c: MepChromosome = "1: Initialize\n2: Mutate 1\n3: Select 1 2\n".parse().unwrap();
//! let program = decode(&c, 2);
//! assert_eq!(count_operators(&program).total(), 3);
//! ```

pub mod engine;
pub mod error;
pub mod harness;
pub mod micro;
pub mod objectives;
pub mod seed;

pub use error::{Error, Result};

/// Whether evaluation work may be spread over the rayon thread pool.
/// Results are identical either way.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}
