//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run
//! with `cargo test -p metaea-core --test acceptance -- --nocapture` to see
//! them.

mod support;

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use metaea::engine::{
    mutate_chromosome, random_chromosome, uniform_crossover, MacroConfig, MepChromosome,
};
use metaea::harness::{format_config, run_experiment, ExperimentResult};
use metaea::micro::{count_operators, decode, evaluate, run_once};
use metaea::objectives::{griewangk, lookup};
use metaea::seed::{gene_stream, run_seed, stream};
use metaea::Parallelism;
use rand::Rng;

use support::{reference_value, violations, EXAMPLE_C};

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name} ({detail})");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn within(id: u32, started: Instant, limit: Duration) {
    let took = started.elapsed();
    assert!(
        took < limit,
        "criterion {id} took {took:?}, limit {limit:?}"
    );
}

#[test]
fn c1_table_decode_oracle() {
    let t0 = Instant::now();
    let c = MepChromosome::parse(EXAMPLE_C).unwrap();
    // Expected programs, closure-local 1-based labels.
    let expected = [
        "1: Initialize\n",
        "1: Initialize\n",
        "1: Initialize\n2: Mutate 1\n",
        "1: Initialize\n2: Mutate 1\n3: Select 1 2\n",
        // gene 5 recombines genes 2 and 4
        "1: Initialize\n2: Initialize\n3: Mutate 1\n4: Select 1 3\n5: Crossover 2 4\n",
        "1: Initialize\n2: Mutate 1\n3: Select 1 2\n4: Mutate 3\n",
        "1: Initialize\n2: Initialize\n3: Mutate 1\n4: Select 1 3\n5: Crossover 2 4\n6: Mutate 5\n",
        "1: Initialize\n2: Initialize\n3: Mutate 1\n4: Select 1 3\n5: Mutate 4\n6: Crossover 2 5\n",
    ];
    let mut mismatches = Vec::new();
    for (p, want) in expected.iter().enumerate() {
        let got = decode(&c, p);
        let want_c = MepChromosome::parse(want).unwrap();
        if got.to_chromosome() != want_c || got.to_string() != *want {
            mismatches.push(format!("EA{}: got\n{got}", p + 1));
        }
    }
    let counts8 = count_operators(&decode(&c, 7));
    let counts_ok = (
        counts8.initializations,
        counts8.mutations,
        counts8.selections,
        counts8.crossovers,
    ) == (2, 2, 1, 1);
    within(1, t0, Duration::from_secs(1));
    verdict(
        1,
        "decode reproduces the eight encoded EAs",
        mismatches.is_empty() && counts_ok,
        format!(
            "{} mismatches, EA8 counts ok = {counts_ok}",
            mismatches.len()
        ),
    );
}

#[test]
fn c2_griewangk_anchors() {
    let t0 = Instant::now();
    let origin = griewangk(&[0.0; 5]).unwrap();
    let corner = griewangk(&[500.0; 5]).unwrap();
    within(2, t0, Duration::from_secs(1));
    verdict(
        2,
        "griewangk(0)=0 and griewangk(500,...) in [312, 314]",
        origin == 0.0 && (312.0..=314.0).contains(&corner),
        format!("f(0)={origin}, f(500^5)={corner:.6}"),
    );
}

#[test]
fn c3_decode_run_equivalence() {
    let t0 = Instant::now();
    let obj = lookup("griewangk", 5).unwrap();
    let mut rng = stream(3);
    let mut compared = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..500 {
        let len = rng.random_range(1..=16);
        let c = random_chromosome(len, &mut rng);
        let rs: u64 = rng.random();
        let values = run_once(&c, &obj, rs).unwrap();
        for (p, v) in values.iter().enumerate() {
            let standalone = decode(&c, p).execute(&obj, rs).unwrap();
            let last = standalone.last().unwrap().value;
            let (_, reference) = reference_value(&c, p, &obj, rs);
            compared += 1;
            if last != *v || reference != *v {
                mismatches += 1;
            }
        }
    }
    within(3, t0, Duration::from_secs(30));
    verdict(
        3,
        "run_once equals standalone execution of every decoded program",
        mismatches == 0,
        format!("{compared} gene values compared, {mismatches} mismatches"),
    );
}

#[test]
fn c4_validity_closure() {
    let t0 = Instant::now();
    let mut rng = stream(4);
    let (mut created, mut crossed, mut mutated) = (0, 0, 0);
    for _ in 0..10_000 {
        let len = rng.random_range(1..=64);
        let a = random_chromosome(len, &mut rng);
        let b = random_chromosome(len, &mut rng);
        created += violations(&a) + violations(&b) + a.validate().is_err() as usize;
        let (x, y) = uniform_crossover(&a, &b, &mut rng).unwrap();
        crossed += violations(&x) + violations(&y) + x.validate().is_err() as usize;
        let m = mutate_chromosome(&a, 5, &mut rng);
        mutated += violations(&m) + m.validate().is_err() as usize;
    }
    within(4, t0, Duration::from_secs(30));
    verdict(
        4,
        "10^4 random/crossover/mutation results are all valid",
        created + crossed + mutated == 0,
        format!("violations: random={created} crossover={crossed} mutation={mutated}"),
    );
}

fn desk_config() -> MacroConfig {
    MacroConfig {
        population_size: 20,
        code_length: 100,
        generations: 30,
        runs_per_eval: 20,
        objective: "griewangk".into(),
        dimension: 5,
        macro_runs: 5,
        master_seed: 2024,
        ..MacroConfig::desk_scale()
    }
}

fn desk_result() -> &'static (ExperimentResult, Duration) {
    static RESULT: OnceLock<(ExperimentResult, Duration)> = OnceLock::new();
    RESULT.get_or_init(|| {
        let t0 = Instant::now();
        let r = run_experiment(&desk_config(), Parallelism::Parallel).unwrap();
        (r, t0.elapsed())
    })
}

#[test]
fn c5_desk_scale_experiment() {
    let (r, took) = desk_result();
    let first = r.mean_fitness[0];
    let last = *r.mean_fitness.last().unwrap();
    let reduction = 1.0 - last / first;
    let monotone = r.traces.iter().all(|t| {
        t.records
            .windows(2)
            .all(|w| w[1].best_fitness <= w[0].best_fitness)
    });
    assert!(*took < Duration::from_secs(300), "took {took:?}");
    verdict(
        5,
        "desk-scale run improves mean best fitness by at least 30%",
        reduction >= 0.30 && monotone && r.mean_fitness.len() == 31,
        format!("gen0 {first:.4} -> gen30 {last:.4}, reduction {:.1}%, non-increasing in all runs = {monotone}, {took:.1?}", reduction * 100.0),
    );
}

#[test]
fn c6_random_ea_anchor() {
    let obj = lookup("griewangk", 5).unwrap();
    let c = MepChromosome::parse("1: Initialize\n").unwrap();
    let eval_seed = 6;
    let report = evaluate(&c, &obj, 200, eval_seed, Parallelism::Parallel).unwrap();

    // Monte-Carlo mean of 200 uniform points drawn from the same streams.
    let mut sum = 0.0;
    for r in 0..200 {
        let mut rng = gene_stream(run_seed(eval_seed, r), 0);
        let x: Vec<f64> = (0..5).map(|_| rng.random_range(-500.0..=500.0)).collect();
        sum += griewangk(&x).unwrap();
    }
    let mc = sum / 200.0;
    let worst = griewangk(&[500.0; 5]).unwrap();
    verdict(
        6,
        "single-Initialize EA equals Monte-Carlo mean, far below the worst value",
        report.fitness == mc && mc < 0.5 * worst,
        format!(
            "fitness {:.6}, monte-carlo {mc:.6}, worst {worst:.3}",
            report.fitness
        ),
    );
}

fn run_cli(config: &Path, out: &Path, threads: &str) {
    let status = Command::new(env!("CARGO_BIN_EXE_metaea"))
        .args(["evolve"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--threads", threads])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
}

#[test]
fn c7_determinism_across_parallelism() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("desk.conf");
    std::fs::write(&config, format_config(&desk_config())).unwrap();
    let seq = dir.path().join("seq");
    let par = dir.path().join("par");
    run_cli(&config, &seq, "1");
    run_cli(&config, &par, "4");
    let mut same = true;
    for f in ["fitness.csv", "operators.csv"] {
        let a = std::fs::read(seq.join(f)).unwrap();
        let b = std::fs::read(par.join(f)).unwrap();
        same &= !a.is_empty() && a == b;
    }
    within(7, t0, Duration::from_secs(120));
    verdict(
        7,
        "evolve output is byte-identical across thread counts",
        same,
        format!("1 thread vs 4 threads, {:.1?}", t0.elapsed()),
    );
}

#[test]
fn c8_operator_count_consistency() {
    let (r, _) = desk_result();
    let mut checked = 0;
    let mut bad = 0;
    for t in &r.traces {
        for rec in &t.records {
            checked += 1;
            if rec.best_operator_counts.total() != rec.best_program_len {
                bad += 1;
            }
        }
    }
    // Emitted means agree with the per-run records.
    let runs = r.traces.len() as f64;
    let mut mean_ok = true;
    for (g, m) in r.mean_operator_counts.iter().enumerate() {
        let expect: f64 = r
            .traces
            .iter()
            .map(|t| t.records[g].best_program_len as f64)
            .sum::<f64>()
            / runs;
        mean_ok &= (m.total() - expect).abs() < 1e-9;
    }
    // The final best chromosome's program re-decodes to the recorded counts.
    let decode_ok = r.traces.iter().all(|t| {
        let rep = t.best.cached_eval().unwrap();
        count_operators(&decode(&t.best, rep.best_gene))
            == t.records.last().unwrap().best_operator_counts
    });
    verdict(
        8,
        "operator counts sum to the best program's instruction count",
        bad == 0 && mean_ok && decode_ok,
        format!("{checked} records, {bad} inconsistent, means ok = {mean_ok}, re-decode ok = {decode_ok}"),
    );
}
