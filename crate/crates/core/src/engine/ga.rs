//! Steady-state macro GA over MEP chromosomes.

use rand::Rng;

use super::{Gene, GeneKind, MacroConfig, MepChromosome};
use crate::error::{Error, Result};
use crate::micro::{self, count_operators, decode, OperatorCounts};
use crate::objectives::ObjectiveSpec;
use crate::seed::{self, TAG_EVAL, TAG_GA};
use crate::Parallelism;

/// Random gene valid at `position`: always Initialize at 0, otherwise a
/// uniform kind with uniform backward arguments.
pub fn random_gene(position: usize, rng: &mut impl Rng) -> Gene {
    if position == 0 {
        return Gene::Initialize;
    }
    let kind = GeneKind::ALL[rng.random_range(0..GeneKind::ALL.len())];
    let mut arg = || rng.random_range(0..position);
    match kind {
        GeneKind::Initialize => Gene::Initialize,
        GeneKind::Mutate => Gene::Mutate(arg()),
        GeneKind::Select => {
            let a = arg();
            Gene::Select(a, arg())
        }
        GeneKind::Crossover => {
            let a = arg();
            Gene::Crossover(a, arg())
        }
    }
}

pub fn random_chromosome(code_length: usize, rng: &mut impl Rng) -> MepChromosome {
    assert!(code_length >= 1, "code_length must be positive");
    MepChromosome::from_valid((0..code_length).map(|p| random_gene(p, rng)).collect())
}

/// Swap each position between the two parents with probability 1/2.
pub fn uniform_crossover(
    a: &MepChromosome,
    b: &MepChromosome,
    rng: &mut impl Rng,
) -> Result<(MepChromosome, MepChromosome)> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "crossover parents differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let (first, second) = a
        .genes()
        .iter()
        .zip(b.genes())
        .map(|(&x, &y)| if rng.random_bool(0.5) { (y, x) } else { (x, y) })
        .unzip();
    Ok((
        MepChromosome::from_valid(first),
        MepChromosome::from_valid(second),
    ))
}

/// Regenerate `k` positions drawn uniformly with replacement.
pub fn mutate_chromosome(c: &MepChromosome, k: usize, rng: &mut impl Rng) -> MepChromosome {
    let mut genes = c.genes().to_vec();
    for _ in 0..k {
        let p = rng.random_range(0..genes.len());
        genes[p] = random_gene(p, rng);
    }
    let mut out = MepChromosome::from_valid(genes);
    if k == 0 {
        if let Some(r) = c.cached_eval() {
            out.set_eval(r.clone());
        }
    }
    out
}

fn fitness_of(population: &[MepChromosome], i: usize) -> Result<f64> {
    population[i]
        .fitness()
        .ok_or_else(|| Error::config(format!("population member {i} is not evaluated")))
}

/// Best of two distinct uniformly drawn members; the first drawn wins ties.
fn tournament(population: &[MepChromosome], rng: &mut impl Rng) -> Result<usize> {
    let n = population.len();
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    Ok(if fitness_of(population, j)? < fitness_of(population, i)? {
        j
    } else {
        i
    })
}

/// Two independent binary tournaments; returns the parents' indices.
pub fn binary_tournament(
    population: &[MepChromosome],
    rng: &mut impl Rng,
) -> Result<(usize, usize)> {
    if population.len() < 2 {
        return Err(Error::config("tournament needs at least 2 members"));
    }
    Ok((tournament(population, rng)?, tournament(population, rng)?))
}

fn evaluate_into(
    c: &mut MepChromosome,
    objective: &ObjectiveSpec,
    runs: usize,
    eval_seed: u64,
    par: Parallelism,
) -> Result<()> {
    let report = micro::evaluate(c, objective, runs, eval_seed, par)?;
    c.set_eval(report);
    Ok(())
}

/// Index of the worst member (highest fitness; earliest on ties).
fn worst_index(population: &[MepChromosome]) -> Result<usize> {
    let mut worst = 0;
    let mut worst_fit = fitness_of(population, 0)?;
    for i in 1..population.len() {
        let f = fitness_of(population, i)?;
        if f > worst_fit {
            worst = i;
            worst_fit = f;
        }
    }
    Ok(worst)
}

/// Index of the best member (lowest fitness; earliest on ties).
fn best_index(population: &[MepChromosome]) -> Result<usize> {
    let mut best = 0;
    let mut best_fit = fitness_of(population, 0)?;
    for i in 1..population.len() {
        let f = fitness_of(population, i)?;
        if f < best_fit {
            best = i;
            best_fit = f;
        }
    }
    Ok(best)
}

/// One steady-state step. The offspring are evaluated with `eval_seeds`.
/// Returns the replaced index, if the better offspring beat the worst member.
pub fn steady_state_iteration(
    population: &mut [MepChromosome],
    config: &MacroConfig,
    objective: &ObjectiveSpec,
    rng: &mut impl Rng,
    eval_seeds: [u64; 2],
    par: Parallelism,
) -> Result<Option<usize>> {
    let (pa, pb) = binary_tournament(population, rng)?;
    let (mut first, mut second) = if rng.random_bool(config.crossover_probability) {
        uniform_crossover(&population[pa], &population[pb], rng)?
    } else {
        (population[pa].clone(), population[pb].clone())
    };
    first = mutate_chromosome(&first, config.mutations_per_chromosome, rng);
    second = mutate_chromosome(&second, config.mutations_per_chromosome, rng);

    let runs = config.runs_per_eval;
    let (ra, rb) = match par {
        Parallelism::Sequential => (
            evaluate_into(&mut first, objective, runs, eval_seeds[0], par),
            evaluate_into(&mut second, objective, runs, eval_seeds[1], par),
        ),
        Parallelism::Parallel => rayon::join(
            || evaluate_into(&mut first, objective, runs, eval_seeds[0], par),
            || evaluate_into(&mut second, objective, runs, eval_seeds[1], par),
        ),
    };
    ra?;
    rb?;

    let child = if second.fitness() < first.fitness() {
        second
    } else {
        first
    };
    let worst = worst_index(population)?;
    if child.fitness().expect("evaluated") < fitness_of(population, worst)? {
        population[worst] = child;
        Ok(Some(worst))
    } else {
        Ok(None)
    }
}

/// Population statistics at a generation boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Operators of the EA at the best gene of the best chromosome.
    pub best_operator_counts: OperatorCounts,
    pub best_gene_index: usize,
    /// Instruction count of that EA.
    pub best_program_len: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentTrace {
    /// One record per generation, generation 0 first.
    pub records: Vec<GenerationRecord>,
    /// Best chromosome of the final population.
    pub best: MepChromosome,
}

fn record(population: &[MepChromosome], generation: usize) -> Result<GenerationRecord> {
    let best = best_index(population)?;
    let mut total = 0.0;
    for i in 0..population.len() {
        total += fitness_of(population, i)?;
    }
    let c = &population[best];
    let report = c.cached_eval().expect("checked above");
    let program = decode(c, report.best_gene);
    Ok(GenerationRecord {
        generation,
        best_fitness: report.fitness,
        mean_fitness: total / population.len() as f64,
        best_operator_counts: count_operators(&program),
        best_gene_index: report.best_gene,
        best_program_len: program.len(),
    })
}

/// Seed of the evaluation of population slot `slot` in `generation`.
/// Offspring of iteration `t` occupy slots `2t` and `2t + 1`.
pub fn eval_seed(run_seed: u64, generation: usize, slot: usize) -> u64 {
    seed::derive_path(run_seed, &[TAG_EVAL, generation as u64, slot as u64])
}

/// One macro run: random initial population, then `generations` rounds of
/// `population_size` steady-state iterations each.
pub fn evolve(
    config: &MacroConfig,
    objective: &ObjectiveSpec,
    run_seed: u64,
    par: Parallelism,
) -> Result<ExperimentTrace> {
    config.validate()?;
    if objective.dimension() != config.dimension {
        return Err(Error::config(format!(
            "objective dimension {} does not match configured dimension {}",
            objective.dimension(),
            config.dimension
        )));
    }
    let mut rng = seed::stream(seed::derive(run_seed, TAG_GA));
    let mut population: Vec<MepChromosome> = (0..config.population_size)
        .map(|_| random_chromosome(config.code_length, &mut rng))
        .collect();

    let eval_initial = |(slot, c): (usize, &mut MepChromosome)| {
        evaluate_into(
            c,
            objective,
            config.runs_per_eval,
            eval_seed(run_seed, 0, slot),
            par,
        )
    };
    match par {
        Parallelism::Sequential => population
            .iter_mut()
            .enumerate()
            .try_for_each(eval_initial)?,
        Parallelism::Parallel => {
            use rayon::prelude::*;
            population
                .par_iter_mut()
                .enumerate()
                .try_for_each(eval_initial)?
        }
    }

    let mut records = Vec::with_capacity(config.generations + 1);
    records.push(record(&population, 0)?);
    for generation in 1..=config.generations {
        for t in 0..config.population_size {
            let seeds = [
                eval_seed(run_seed, generation, 2 * t),
                eval_seed(run_seed, generation, 2 * t + 1),
            ];
            steady_state_iteration(&mut population, config, objective, &mut rng, seeds, par)?;
        }
        records.push(record(&population, generation)?);
    }
    let best = population.swap_remove(best_index(&population)?);
    Ok(ExperimentTrace { records, best })
}
