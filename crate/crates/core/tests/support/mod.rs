//! Test-only reference interpreter for encoded EAs.
//!
//! Written directly against the operator definitions (uniform init, midpoint
//! crossover, N(0, 0.25) mutation with clamping, best-of-two select) and the
//! per-gene stream scheme. It follows argument links recursively from a
//! position instead of sweeping the chromosome, so it shares no execution
//! path with the library.

#![allow(dead_code)]

use std::collections::HashMap;

use metaea::engine::{Gene, MepChromosome};
use metaea::objectives::ObjectiveSpec;
use metaea::seed::gene_stream;
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub const EXAMPLE_C: &str = "\
1: Initialize
2: Initialize
3: Mutate 1
4: Select 1, 3
5: Crossover 2, 4
6: Mutate 4
7: Mutate 5
8: Crossover 2, 6
";

/// (x, value) reached at `position` during the run keyed by `run_seed`.
pub fn reference_value(
    c: &MepChromosome,
    position: usize,
    obj: &ObjectiveSpec,
    run_seed: u64,
) -> (Vec<f64>, f64) {
    let mut memo = HashMap::new();
    solve(c.genes(), position, obj, run_seed, &mut memo)
}

fn solve(
    genes: &[Gene],
    p: usize,
    obj: &ObjectiveSpec,
    run_seed: u64,
    memo: &mut HashMap<usize, (Vec<f64>, f64)>,
) -> (Vec<f64>, f64) {
    if let Some(v) = memo.get(&p) {
        return v.clone();
    }
    let f = |x: &[f64]| obj.evaluate(x).unwrap();
    let out = match genes[p] {
        Gene::Initialize => {
            let mut rng = gene_stream(run_seed, p);
            let x: Vec<f64> = (0..obj.dimension())
                .map(|_| rng.random_range(obj.lower()..=obj.upper()))
                .collect();
            let v = f(&x);
            (x, v)
        }
        Gene::Mutate(a) => {
            let (xa, _) = solve(genes, a, obj, run_seed, memo);
            let mut rng = gene_stream(run_seed, p);
            let normal = Normal::new(0.0, 0.5).unwrap();
            let x: Vec<f64> = xa
                .iter()
                .map(|v| (v + normal.sample(&mut rng)).clamp(obj.lower(), obj.upper()))
                .collect();
            let v = f(&x);
            (x, v)
        }
        Gene::Select(a, b) => {
            let sa = solve(genes, a, obj, run_seed, memo);
            let sb = solve(genes, b, obj, run_seed, memo);
            if sb.1 < sa.1 {
                sb
            } else {
                sa
            }
        }
        Gene::Crossover(a, b) => {
            let (xa, _) = solve(genes, a, obj, run_seed, memo);
            let (xb, _) = solve(genes, b, obj, run_seed, memo);
            let x: Vec<f64> = xa.iter().zip(&xb).map(|(u, v)| 0.5 * u + 0.5 * v).collect();
            let v = f(&x);
            (x, v)
        }
    };
    memo.insert(p, out.clone());
    out
}

/// Positional validity checked from scratch.
pub fn violations(c: &MepChromosome) -> usize {
    let mut bad = 0;
    if c.genes().first() != Some(&Gene::Initialize) {
        bad += 1;
    }
    for (i, g) in c.genes().iter().enumerate() {
        if g.args().iter().any(|&a| a >= i) {
            bad += 1;
        }
    }
    bad
}
