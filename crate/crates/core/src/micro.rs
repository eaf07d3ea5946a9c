//! The evolved (micro-level) EAs: real-vector operators, decoding of a
//! chromosome position into a standalone program, whole-chromosome
//! execution and repeated-run fitness assignment.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::engine::{Gene, GeneKind, MepChromosome};
use crate::error::Result;
use crate::objectives::ObjectiveSpec;
use crate::seed;
use crate::Parallelism;

/// Standard deviation of the Gaussian mutation.
pub const MUTATION_SIGMA: f64 = 0.5;

/// Weight of the first parent in the convex crossover.
pub const CROSSOVER_ALPHA: f64 = 0.5;

/// A point of the objective's domain with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl MicroSolution {
    pub fn new(x: Vec<f64>, objective: &ObjectiveSpec) -> Result<Self> {
        let value = objective.evaluate(&x)?;
        Ok(Self { x, value })
    }
}

/// Uniform random point of the domain box.
pub fn op_initialize(objective: &ObjectiveSpec, rng: &mut impl Rng) -> Result<MicroSolution> {
    let (lo, hi) = (objective.lower(), objective.upper());
    let x = (0..objective.dimension())
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    MicroSolution::new(x, objective)
}

/// Midpoint of two parents.
pub fn op_convex_crossover(
    a: &MicroSolution,
    b: &MicroSolution,
    objective: &ObjectiveSpec,
) -> Result<MicroSolution> {
    debug_assert_eq!(a.x.len(), b.x.len());
    let x =
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| CROSSOVER_ALPHA * u + (1.0 - CROSSOVER_ALPHA) * v)
            .collect();
    MicroSolution::new(x, objective)
}

/// Adds N(0, σ²) noise to every coordinate, then clamps to the box.
pub fn op_gaussian_mutation(
    s: &MicroSolution,
    objective: &ObjectiveSpec,
    rng: &mut impl Rng,
) -> Result<MicroSolution> {
    let normal = Normal::new(0.0, MUTATION_SIGMA).expect("sigma is positive");
    let (lo, hi) = (objective.lower(), objective.upper());
    let x =
        s.x.iter()
            .map(|v| (v + normal.sample(rng)).clamp(lo, hi))
            .collect();
    MicroSolution::new(x, objective)
}

/// Binary tournament between two solutions; ties keep `a`.
pub fn op_select<'a>(a: &'a MicroSolution, b: &'a MicroSolution) -> &'a MicroSolution {
    if b.value < a.value {
        b
    } else {
        a
    }
}

/// Compute the solution of gene `gene` from already computed operands.
/// `fetch` resolves an argument index to its solution; randomness comes
/// from the stream of (`run_seed`, `source`).
fn apply_gene<'s>(
    gene: Gene,
    source: usize,
    run_seed: u64,
    objective: &ObjectiveSpec,
    fetch: impl Fn(usize) -> &'s MicroSolution,
) -> Result<MicroSolution> {
    match gene {
        Gene::Initialize => op_initialize(objective, &mut seed::gene_stream(run_seed, source)),
        Gene::Mutate(a) => op_gaussian_mutation(
            fetch(a),
            objective,
            &mut seed::gene_stream(run_seed, source),
        ),
        Gene::Select(a, b) => Ok(op_select(fetch(a), fetch(b)).clone()),
        Gene::Crossover(a, b) => op_convex_crossover(fetch(a), fetch(b), objective),
    }
}

/// One instruction of a decoded program. Arguments of `gene` index earlier
/// instructions of the same program; `source` is the original gene index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub gene: Gene,
    pub source: usize,
}

/// The EA encoded at one chromosome position: the genes reachable from it,
/// in original order, with arguments renumbered to program-local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EaProgram {
    pub instructions: Vec<Instruction>,
    pub source_position: usize,
}

impl EaProgram {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// The program as a chromosome of its own (same text format).
    pub fn to_chromosome(&self) -> MepChromosome {
        MepChromosome::from_valid(self.instructions.iter().map(|i| i.gene).collect())
    }

    /// Run the program on its own. Instruction `i` draws from the stream of
    /// its source gene, so the last solution equals the value the whole
    /// chromosome computes at `source_position` under the same `run_seed`.
    pub fn execute(&self, objective: &ObjectiveSpec, run_seed: u64) -> Result<Vec<MicroSolution>> {
        let mut out: Vec<MicroSolution> = Vec::with_capacity(self.instructions.len());
        for ins in &self.instructions {
            let next = apply_gene(ins.gene, ins.source, run_seed, objective, |j| &out[j])?;
            out.push(next);
        }
        Ok(out)
    }
}

impl fmt::Display for EaProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_chromosome())
    }
}

/// Extract the EA rooted at `position` (0-based).
pub fn decode(c: &MepChromosome, position: usize) -> EaProgram {
    let genes = c.genes();
    assert!(position < genes.len(), "position {position} out of range");
    let mut reachable = vec![false; position + 1];
    reachable[position] = true;
    // Arguments point backwards, so a single downward sweep closes the set.
    for p in (0..=position).rev() {
        if reachable[p] {
            for a in genes[p].args() {
                reachable[a] = true;
            }
        }
    }
    let mut local = vec![usize::MAX; position + 1];
    let mut instructions = Vec::new();
    for (p, _) in reachable.iter().enumerate().filter(|(_, r)| **r) {
        local[p] = instructions.len();
        instructions.push(Instruction {
            gene: genes[p].map_args(|a| local[a]),
            source: p,
        });
    }
    EaProgram {
        instructions,
        source_position: position,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OperatorCounts {
    pub initializations: usize,
    pub selections: usize,
    pub crossovers: usize,
    pub mutations: usize,
}

impl OperatorCounts {
    pub fn total(&self) -> usize {
        self.initializations + self.selections + self.crossovers + self.mutations
    }
}

pub fn count_operators(p: &EaProgram) -> OperatorCounts {
    let mut c = OperatorCounts::default();
    for ins in &p.instructions {
        match ins.gene.kind() {
            GeneKind::Initialize => c.initializations += 1,
            GeneKind::Select => c.selections += 1,
            GeneKind::Crossover => c.crossovers += 1,
            GeneKind::Mutate => c.mutations += 1,
        }
    }
    c
}

/// Execute every gene once in index order, returning each gene's solution.
pub fn run_once_solutions(
    c: &MepChromosome,
    objective: &ObjectiveSpec,
    run_seed: u64,
) -> Result<Vec<MicroSolution>> {
    let mut slots: Vec<MicroSolution> = Vec::with_capacity(c.len());
    for (g, &gene) in c.genes().iter().enumerate() {
        let next = apply_gene(gene, g, run_seed, objective, |j| &slots[j])?;
        slots.push(next);
    }
    Ok(slots)
}

/// Objective value reached by every encoded EA in one run.
pub fn run_once(c: &MepChromosome, objective: &ObjectiveSpec, run_seed: u64) -> Result<Vec<f64>> {
    Ok(run_once_solutions(c, objective, run_seed)?
        .into_iter()
        .map(|s| s.value)
        .collect())
}

/// Repeated-run assessment of a chromosome.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// Mean objective value per gene over all runs.
    pub per_gene_mean: Vec<f64>,
    /// Lowest-mean gene (earliest on ties).
    pub best_gene: usize,
    pub fitness: f64,
    pub runs: usize,
}

/// Runs evaluated concurrently before folding into the running sum.
const RUN_BATCH: usize = 32;

/// Run all encoded EAs `runs` times and average per gene. Run `r` uses
/// [`seed::run_seed`]`(eval_seed, r)`. Sums are folded in run order, so the
/// report does not depend on `par`.
pub fn evaluate(
    c: &MepChromosome,
    objective: &ObjectiveSpec,
    runs: usize,
    eval_seed: u64,
    par: Parallelism,
) -> Result<EvalReport> {
    assert!(runs >= 1, "at least one run is required");
    let mut sums = vec![0.0; c.len()];
    let run = |r: usize| run_once(c, objective, seed::run_seed(eval_seed, r));
    for start in (0..runs).step_by(RUN_BATCH) {
        let end = (start + RUN_BATCH).min(runs);
        let batch: Vec<Vec<f64>> = match par {
            Parallelism::Sequential => (start..end).map(run).collect::<Result<_>>()?,
            Parallelism::Parallel => (start..end)
                .into_par_iter()
                .map(run)
                .collect::<Result<_>>()?,
        };
        for values in batch {
            for (s, v) in sums.iter_mut().zip(values) {
                *s += v;
            }
        }
    }
    let per_gene_mean: Vec<f64> = sums.into_iter().map(|s| s / runs as f64).collect();
    let (best_gene, fitness) = argmin(&per_gene_mean);
    Ok(EvalReport {
        per_gene_mean,
        best_gene,
        fitness,
        runs,
    })
}

/// Index and value of the minimum; earliest index on ties.
pub(crate) fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
}
