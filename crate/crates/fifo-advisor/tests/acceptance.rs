// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use fifo_advisor::{parse_trace, write_trace, Parallel};
use fifo_advisor_core::benchgen::{self, BenchSpec, THROUGHPUT_BENCHMARK};
use fifo_advisor_core::optimize::{
    baseline_max, baseline_min, highlight, hypervolume, score, EvaluatedPoint, Optimizer, ParetoFrontier,
    SearchBudget, SearchOutcome,
};
use fifo_advisor_core::sim::{detect_deadlock_cycle, engine, reference, BlockReason, Sequential, WaitFor};
use fifo_advisor_core::{
    breakpoints, fifo_bram_count, simulate, FifoConfig, SimResult, TimingMode, TraceProgram,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

const WIDTHS: [u32; 10] = [1, 2, 4, 8, 9, 16, 18, 32, 36, 64];
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const BUDGET: usize = 1000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus() -> Vec<(&'static str, TraceProgram)> {
    benchgen::suite()
        .into_iter()
        .map(|e| {
            // Go through the file format so the corpus is what users load.
            let p = benchgen::generate(&e.spec).unwrap();
            (e.name, parse_trace(&write_trace(&p)).unwrap())
        })
        .collect()
}

fn random_depths(p: &TraceProgram, rng: &mut ChaCha8Rng, min: u32) -> Vec<u32> {
    p.upper_bounds().iter().map(|&u| rng.gen_range(min..=u)).collect()
}

// 1 ---------------------------------------------------------------------

fn bram_model() -> Verdict {
    let start = Instant::now();
    let golden = [((2, 512), 0), ((1024, 1), 0), ((1024, 32), 2), ((4096, 9), 2), ((2048, 32), 4)];
    for ((d, w), want) in golden {
        let got = fifo_bram_count(d, w);
        ensure(got == want, || format!("bram({d}, {w}) = {got}, expected {want}"))?;
    }
    let mut depth_violations = 0;
    let mut width_violations = Vec::new();
    for &w in &WIDTHS {
        for d in 1..5000 {
            if fifo_bram_count(d + 1, w) < fifo_bram_count(d, w) {
                depth_violations += 1;
            }
        }
    }
    for d in 1..=5000 {
        for pair in WIDTHS.windows(2) {
            let (a, b) = (fifo_bram_count(d, pair[0]), fifo_bram_count(d, pair[1]));
            if a > b {
                width_violations.push((d, pair[0], a, pair[1], b));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(depth_violations == 0, || format!("{depth_violations} depth-monotonicity violations"))?;
    if let Some(&(d, w0, a, w1, b)) = width_violations.first() {
        return Err(format!(
            "golden table exact and monotone in d, but {} width-monotonicity violations, e.g. \
             bram(d={d}, w={w0}) = {a} > bram(d={d}, w={w1}) = {b}",
            width_violations.len()
        ));
    }
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!("golden table exact, monotone in d and w ({elapsed:.3} s)"))
}

// 2 ---------------------------------------------------------------------

fn breakpoint_correctness() -> Verdict {
    let uppers: Vec<u32> = (2..=80)
        .chain([100, 255, 256, 257, 500, 1000, 1023, 1024, 1025, 1500, 2047, 2048, 2049])
        .chain([3000, 4095, 4096, 4097, 5000, 8192, 9000, 16384, 17000, 40000])
        .collect();
    let mut cases = 0;
    for &w in WIDTHS.iter().chain(&[3, 5, 17, 19, 31, 33, 64, 100, 512, 1024, 4096]) {
        for &u in &uppers {
            let scan: Vec<u32> = (2..=u)
                .filter(|&d| d == u || fifo_bram_count(d + 1, w) > fifo_bram_count(d, w))
                .collect();
            let got = breakpoints(w, u);
            ensure(got == scan, || format!("w={w} u={u}: {got:?} != scan {scan:?}"))?;
            for pair in got.windows(2) {
                let strict = fifo_bram_count(pair[0], w) < fifo_bram_count(pair[1], w);
                ensure(strict || pair[1] == u, || format!("w={w} u={u}: {pair:?} not increasing"))?;
            }
            cases += 1;
        }
    }
    ensure(breakpoints(32, 3000) == [32, 1024, 2048, 3000], || "w=32 u=3000 example".into())?;
    Ok(format!("{cases} (w, u) pairs equal the dense scan"))
}

// 3 ---------------------------------------------------------------------

fn deadlock_boundary() -> Verdict {
    let mut found = Vec::new();
    for n in [2usize, 4, 8, 16] {
        let p = benchgen::generate(&BenchSpec::write_then_read(n)).unwrap();
        let x = p.fifo_by_name("x").unwrap().id;
        let y = p.fifo_by_name("y").unwrap().id;
        let mut minimal = None;
        for dx in 1..=n as u32 {
            let mut depths = vec![2; 2];
            depths[x] = dx;
            depths[y] = 2;
            let r = engine::run(&p, &depths, TimingMode::Uniform).unwrap();
            if !r.deadlocked {
                minimal = Some(dx);
                break;
            }
        }
        ensure(minimal == Some(n as u32 - 1), || format!("n={n}: minimal x depth {minimal:?}"))?;
        found.push(minimal.unwrap());

        let min = simulate(&p, &baseline_min(&p), TimingMode::Uniform).unwrap();
        if n >= 4 {
            ensure(min.deadlocked, || format!("n={n}: Baseline-Min did not deadlock"))?;
            let wait = detect_deadlock_cycle(&min, &p).unwrap();
            let WaitFor::Cycle(ring) = wait else {
                return Err(format!("n={n}: no wait-for cycle"));
            };
            let shape: Vec<_> = ring
                .iter()
                .map(|b| (p.tasks()[b.task].name.as_str(), p.fifos()[b.fifo].name.as_str(), b.reason))
                .collect();
            ensure(
                shape == [("producer", "x", BlockReason::Full), ("consumer", "y", BlockReason::Empty)],
                || format!("n={n}: cycle {shape:?}"),
            )?;
        }
    }
    Ok(format!(
        "minimal x depths {found:?} for n = 2, 4, 8, 16; producer -> x (full) -> consumer -> y (empty)"
    ))
}

// 4 ---------------------------------------------------------------------

fn capacity_monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut feasible_pairs = 0;
    for i in 0..200u64 {
        let p = benchgen::fuzz(10_000 + i);
        let c = random_depths(&p, &mut rng, 2);
        let bigger: Vec<u32> = c
            .iter()
            .zip(p.upper_bounds())
            .map(|(&d, u)| rng.gen_range(d..=u))
            .collect();
        let small = simulate(&p, &FifoConfig::new(&p, c.clone()).unwrap(), TimingMode::Uniform).unwrap();
        let large = simulate(&p, &FifoConfig::new(&p, bigger.clone()).unwrap(), TimingMode::Uniform).unwrap();
        if !small.deadlocked {
            feasible_pairs += 1;
            ensure(!large.deadlocked, || format!("instance {i}: {c:?} feasible, {bigger:?} not"))?;
            ensure(large.latency <= small.latency, || {
                format!("instance {i}: latency {} at {bigger:?} > {} at {c:?}", large.latency, small.latency)
            })?;
        }
    }
    Ok(format!("200 instances, {feasible_pairs} with a feasible smaller config, 0 violations"))
}

// 5 ---------------------------------------------------------------------

fn baseline_max_feasible(corpus: &[(&str, TraceProgram)]) -> Verdict {
    for (name, p) in corpus {
        let r = simulate(p, &baseline_max(p), TimingMode::Uniform).unwrap();
        ensure(!r.deadlocked, || format!("{name} deadlocks at Baseline-Max"))?;
        let r = simulate(p, &baseline_max(p), TimingMode::DepthAware).unwrap();
        ensure(!r.deadlocked, || format!("{name} deadlocks at Baseline-Max (depth-aware)"))?;
    }
    Ok(format!("{} benchmarks deadlock-free in both timing modes", corpus.len()))
}

// 6 ---------------------------------------------------------------------

fn same(a: &SimResult, b: &SimResult) -> bool {
    a.latency == b.latency && a.deadlocked == b.deadlocked && a.peak_occupancy == b.peak_occupancy
}

fn differential(corpus: &[(&str, TraceProgram)]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut runs = 0;
    let mut full_match = 0;
    let mut check = |name: &str, p: &TraceProgram, depths: &[u32]| -> Result<(), String> {
        for mode in [TimingMode::Uniform, TimingMode::DepthAware] {
            let fast = engine::run(p, depths, mode).unwrap();
            let slow = reference::run(p, depths, mode).unwrap();
            ensure(same(&fast, &slow), || format!("{name} {mode:?} {depths:?}: {fast:?} vs {slow:?}"))?;
            runs += 1;
            if fast == slow {
                full_match += 1;
            }
        }
        Ok(())
    };
    for (name, p) in corpus {
        check(name, p, baseline_max(p).depths())?;
        check(name, p, baseline_min(p).depths())?;
        for _ in 0..4 {
            check(name, p, &random_depths(p, &mut rng, 2))?;
        }
    }
    for seed in 0..500 {
        let p = benchgen::fuzz(seed);
        check("fuzz", &p, &random_depths(&p, &mut rng, 1))?;
    }
    Ok(format!(
        "{runs} runs agree on latency, verdict and peak occupancy ({full_match} identical incl. stalls and diagnostics)"
    ))
}

// 7 ---------------------------------------------------------------------

/// Non-dominated feasible points by direct pairwise comparison, first
/// occurrence kept on exact ties, sorted by latency.
fn brute_force_frontier(points: &[EvaluatedPoint]) -> Vec<EvaluatedPoint> {
    let feasible: Vec<(usize, u64, u64)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.latency.map(|l| (i, l, p.bram)))
        .collect();
    let mut keep: Vec<(usize, u64, u64)> = feasible
        .iter()
        .copied()
        .filter(|&(i, l, b)| {
            feasible.iter().all(|&(j, l2, b2)| {
                let dominates = l2 <= l && b2 <= b && (l2 < l || b2 < b);
                let earlier_twin = l2 == l && b2 == b && j < i;
                !dominates && !earlier_twin
            })
        })
        .collect();
    keep.sort_by_key(|&(_, l, _)| l);
    keep.into_iter().map(|(i, _, _)| points[i].clone()).collect()
}

fn median(mut v: Vec<u128>) -> u128 {
    v.sort_unstable();
    v[v.len() / 2]
}

fn optimizer_contracts(corpus: &[(&str, TraceProgram)]) -> Verdict {
    let mut hv_lines = Vec::new();
    let mut zero_bram_checked = 0;
    for (name, p) in corpus {
        let base = simulate(p, &baseline_max(p), TimingMode::Uniform).unwrap();
        let base = EvaluatedPoint::new(p, baseline_max(p), &base);
        let base_lat = base.latency.unwrap();
        let mut hv_runs: Vec<(Optimizer, Vec<SearchOutcome>)> = Vec::new();
        for opt in Optimizer::ALL {
            let mut outcomes = Vec::new();
            for seed in SEEDS {
                let budget = SearchBudget {
                    max_evaluations: BUDGET,
                    seed,
                    ..SearchBudget::default()
                };
                let out = opt.run(p, &budget, TimingMode::Uniform, &Sequential).unwrap();
                let tag = || format!("{name} {} seed {seed}", opt.name());
                // (a)
                ensure(out.evaluations.len() <= BUDGET, || format!("{}: over budget", tag()))?;
                ensure(out.frontier.is_valid(), || format!("{}: frontier invariants", tag()))?;
                ensure(out.frontier.points == brute_force_frontier(&out.evaluations), || {
                    format!("{}: frontier differs from brute-force filter", tag())
                })?;
                // (b)
                let again = opt.run(p, &budget, TimingMode::Uniform, &Sequential).unwrap();
                ensure(again == out, || format!("{}: not deterministic", tag()))?;
                // (c)
                if opt == Optimizer::Greedy {
                    let last = out.final_point.as_ref().ok_or_else(|| format!("{}: no final point", tag()))?;
                    let lat = last.latency.ok_or_else(|| format!("{}: final point deadlocks", tag()))?;
                    ensure(lat as f64 <= 1.05 * base_lat as f64, || {
                        format!("{}: greedy latency {lat} > 1.05 x {base_lat}", tag())
                    })?;
                }
                outcomes.push(out);
            }
            hv_runs.push((opt, outcomes));
        }

        // (d)
        let is_chain_or_tree = name.starts_with("chain") || name.starts_with("tree");
        if is_chain_or_tree {
            let all_shift: Vec<u32> = p
                .fifos()
                .iter()
                .map(|f| breakpoints(f.width, p.upper_bound(f.id))[0])
                .collect();
            let all_shift_zero = all_shift
                .iter()
                .zip(p.fifos())
                .all(|(&d, f)| fifo_bram_count(d, f.width) == 0);
            let cfg = FifoConfig::new(p, all_shift).unwrap();
            let feasible = !simulate(p, &cfg, TimingMode::Uniform).unwrap().deadlocked;
            if all_shift_zero && feasible {
                zero_bram_checked += 1;
                let (_, gsa) = hv_runs
                    .iter()
                    .find(|(o, _)| *o == Optimizer::GroupedSimulatedAnnealing)
                    .unwrap();
                for (seed, out) in SEEDS.iter().zip(gsa) {
                    let ok = out.frontier.points.iter().any(|q| {
                        q.bram == 0 && q.latency.unwrap() as f64 <= 1.01 * base_lat as f64
                    });
                    ensure(ok, || {
                        let best0 = out.frontier.points.iter().find(|q| q.bram == 0).map(|q| q.latency);
                        format!("{name} grouped-sa seed {seed}: no 0-BRAM point within 1.01x (best {best0:?}, base {base_lat})")
                    })?;
                }
            }
        }

        // (e)
        let compared = [Optimizer::Random, Optimizer::GroupedRandom, Optimizer::GroupedSimulatedAnnealing];
        let worst = hv_runs
            .iter()
            .filter(|(o, _)| compared.contains(o))
            .flat_map(|(_, outs)| outs.iter().flat_map(|o| o.evaluations.iter().filter_map(|e| e.latency)))
            .max()
            .unwrap();
        let reference = (worst + 1, base.bram + 1);
        let med = |opt: Optimizer| {
            let (_, outs) = hv_runs.iter().find(|(o, _)| *o == opt).unwrap();
            median(outs.iter().map(|o| hypervolume(&o.evaluations, reference)).collect())
        };
        let (r, gr, gsa) = (
            med(Optimizer::Random),
            med(Optimizer::GroupedRandom),
            med(Optimizer::GroupedSimulatedAnnealing),
        );
        hv_lines.push(format!("{name}: {gsa}/{gr}/{r}"));
        ensure(gsa >= gr && gr >= r, || {
            format!("{name}: median hypervolume grouped-sa {gsa}, grouped-random {gr}, random {r}")
        })?;
    }
    Ok(format!(
        "{} benchmarks x 5 optimizers x 5 seeds; 0-BRAM check on {zero_bram_checked} chain/tree benchmarks; \
         median HV gsa/gr/r: {}",
        corpus.len(),
        hv_lines.join(", ")
    ))
}

// 8 ---------------------------------------------------------------------

fn un_deadlocking() -> Verdict {
    let p = benchgen::generate(&BenchSpec::write_then_read(8)).unwrap();
    let min = simulate(&p, &baseline_min(&p), TimingMode::Uniform).unwrap();
    ensure(min.deadlocked, || "Baseline-Min does not deadlock".into())?;
    let base = EvaluatedPoint::new(
        &p,
        baseline_max(&p),
        &simulate(&p, &baseline_max(&p), TimingMode::Uniform).unwrap(),
    );
    let budget = SearchBudget {
        max_evaluations: BUDGET,
        ..SearchBudget::default()
    };
    for opt in Optimizer::ALL {
        let out = opt.run(&p, &budget, TimingMode::Uniform, &Sequential).unwrap();
        ensure(!out.frontier.is_empty(), || format!("{}: empty frontier", opt.name()))?;
        if opt == Optimizer::GroupedSimulatedAnnealing {
            let h = highlight(&out.frontier, &base, 0.7).unwrap();
            ensure(h.bram == 0, || format!("grouped-sa highlight uses {} BRAMs", h.bram))?;
        }
    }
    Ok("every optimizer un-deadlocks WriteThenRead(8); grouped-sa highlight uses 0 BRAMs".into())
}

// 9 ---------------------------------------------------------------------

fn throughput() -> Verdict {
    let entry = benchgen::suite()
        .into_iter()
        .find(|e| e.name == THROUGHPUT_BENCHMARK)
        .unwrap();
    let p = benchgen::generate(&entry.spec).unwrap();
    ensure(p.fifo_count() >= 100 && p.event_count() >= 100_000, || {
        format!("{} fifos, {} events", p.fifo_count(), p.event_count())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let configs: Vec<FifoConfig> = (0..1000)
        .map(|_| FifoConfig::new(&p, random_depths(&p, &mut rng, 2)).unwrap())
        .collect();
    let mut timed = Vec::new();
    for jobs in [1, 8] {
        let eval = Parallel::new(jobs).unwrap();
        let start = Instant::now();
        let results = fifo_advisor_core::sim::Evaluator::evaluate_many(&eval, &p, &configs, TimingMode::Uniform).unwrap();
        timed.push((jobs, start.elapsed().as_secs_f64(), results));
    }
    let (t1, t8) = (timed[0].1, timed[1].1);
    ensure(timed[0].2 == timed[1].2, || "results differ between 1 and 8 workers".into())?;
    ensure(t1 <= 60.0, || format!("1 worker took {t1:.2} s"))?;
    ensure(t8 <= 10.0, || format!("8 workers took {t8:.2} s"))?;
    Ok(format!(
        "1000 evaluations of {} fifos / {} events: {t1:.2} s with 1 worker, {t8:.2} s with 8; identical results",
        p.fifo_count(),
        p.event_count()
    ))
}

// 10 --------------------------------------------------------------------

fn point(latency: u64, bram: u64) -> EvaluatedPoint {
    // Scores only read the objective values.
    let p = benchgen::generate(&BenchSpec::write_then_read(2)).unwrap();
    let mut e = EvaluatedPoint::new(
        &p,
        baseline_max(&p),
        &simulate(&p, &baseline_max(&p), TimingMode::Uniform).unwrap(),
    );
    e.latency = Some(latency);
    e.bram = bram;
    e
}

fn scoring() -> Verdict {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let base = point(1000, 40);
    ensure(score(&base, &base, 0.7) == Ok(1.0), || "point == baseline".into())?;
    let s = score(&point(1000, 0), &base, 0.7).unwrap();
    ensure(close(s, 0.7), || format!("0-BRAM point scored {s}"))?;
    // 0.7 * 0.9995 + 0.3 * 0.144
    let s = score(&point(9995, 144), &point(10_000, 1000), 0.7).unwrap();
    ensure(close(s, 0.74285), || format!("weighted case scored {s}"))?;
    let zero = point(100, 0);
    ensure(score(&point(100, 0), &zero, 0.7) == Ok(0.7), || "0/0 bram ratio".into())?;
    ensure(score(&point(100, 3), &zero, 0.7) == Ok(f64::INFINITY), || "x/0 bram ratio".into())?;

    let b = point(100, 10);
    let single = ParetoFrontier { points: vec![point(120, 2)] };
    ensure(highlight(&single, &b, 0.7) == Ok(&single.points[0]), || "singleton highlight".into())?;
    let pair = ParetoFrontier { points: vec![point(100, 5), point(150, 0)] };
    ensure(highlight(&pair, &b, 0.7) == Ok(&pair.points[0]), || "0.85 vs 1.05 highlight".into())?;
    ensure(highlight(&pair, &b, 0.0) == Ok(&pair.points[1]), || "alpha = 0 highlight".into())?;
    let tie = ParetoFrontier { points: vec![point(200, 0), point(100, 10)] };
    ensure(highlight(&tie, &b, 0.5) == Ok(&tie.points[1]), || "tie goes to lower latency".into())?;
    Ok("golden scores within 1e-12; highlight examples and tie-breaks hold".into())
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("BRAM model exactness", Box::new(bram_model)),
        ("breakpoint correctness", Box::new(breakpoint_correctness)),
        ("deadlock boundary", Box::new(deadlock_boundary)),
        ("capacity monotonicity", Box::new(capacity_monotonicity)),
        ("Baseline-Max feasibility", Box::new(|| baseline_max_feasible(&corpus))),
        ("simulator differential", Box::new(|| differential(&corpus))),
        ("optimizer contracts", Box::new(|| optimizer_contracts(&corpus))),
        ("un-deadlocking", Box::new(un_deadlocking)),
        ("throughput", Box::new(throughput)),
        ("scoring", Box::new(scoring)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
