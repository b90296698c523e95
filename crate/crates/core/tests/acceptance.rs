//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use deltahull::delta::{DeltaMethod, DeltaSearch};
use deltahull::exact::Rational;
use deltahull::graph::{build_fan_graph, build_polytope_graph, graph_diameter};
use deltahull::hull::enumerate_all_bases_oracle;
use deltahull::lattice::{count_integer_points_bruteforce, knapsack_bound_check, ConvexFn};
use deltahull::lb::{expected_counts, tightness_experiment, SubdivisionFan};
use deltahull::report::{enumerate, verify, AnalysisOptions};
use deltahull::{Execution, HPolyhedron};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Case;

struct Outcome {
    pass: bool,
    summary: String,
    failures: Vec<String>,
}

impl Outcome {
    fn from_failures(summary: String, failures: Vec<String>) -> Self {
        Outcome {
            pass: failures.is_empty(),
            summary,
            failures,
        }
    }
}

fn big_search() -> DeltaSearch {
    DeltaSearch {
        budget: 10_000_000_000,
        method: DeltaMethod::BranchAndBound,
        exec: Execution::default(),
    }
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 2..=4 {
        for k in 0..=4 {
            let fan = SubdivisionFan::generate(n, k);
            let a = fan.ray_matrix();
            let cones = fan.cone_bases();
            let stats = deltahull::delta::triangulation_stats(&a, &cones, &big_search()).unwrap();
            let diameter = graph_diameter(&build_fan_graph(&cones, &a)).unwrap();
            let e = expected_counts(n, k);
            let ratio = &stats.delta / &stats.delta_min;
            let mut bad = Vec::new();
            if stats.cone_count as u128 != e.cones {
                bad.push(format!("cones {} != {}", stats.cone_count, e.cones));
            }
            if diameter as u128 != e.diameter {
                bad.push(format!("diameter {diameter} != {}", e.diameter));
            }
            if ratio != Rational::from_integer(BigInt::from(e.delta_ratio)) {
                bad.push(format!("delta ratio {ratio} != {}", e.delta_ratio));
            }
            if !bad.is_empty() {
                failures.push(format!("n={n} k={k}: {}", bad.join(", ")));
            }
            checked += 1;
        }
    }
    Outcome::from_failures(format!("{checked} fans, n in 2..=4, k in 0..=4"), failures)
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 2..=3 {
        for k in 0..=3 {
            let p = common::subdivision_dual(n, k);
            let r = enumerate(&p, None, Execution::default()).unwrap();
            let d = graph_diameter(&build_polytope_graph(&p, &r)).unwrap();
            let e = expected_counts(n, k);
            let mut bad = Vec::new();
            if r.vertices.len() as u128 != e.cones {
                bad.push(format!("vertices {} != {}", r.vertices.len(), e.cones));
            }
            if d as u128 != e.diameter {
                bad.push(format!("diameter {d} != {}", e.diameter));
            }
            if !bad.is_empty() {
                failures.push(format!("n={n} k={k}: {}", bad.join(", ")));
            }
            checked += 1;
        }
    }
    Outcome::from_failures(
        format!("{checked} dual systems, n in 2..=3, k in 0..=3"),
        failures,
    )
}

/// Runs the full pipeline once per corpus instance; criteria 3, 4, 6, 7, 8
/// read their checks from the result.
struct CorpusRun {
    name: String,
    bounds: Vec<deltahull::delta::BoundReport>,
}

fn run_corpus(cases: &[Case]) -> Vec<CorpusRun> {
    let opts = AnalysisOptions {
        search: big_search(),
        minor_budget: 1_000_000,
        count: false,
        ..AnalysisOptions::default()
    };
    cases
        .iter()
        .map(|c| {
            let v = verify(&c.p, None, &opts)
                .unwrap_or_else(|e| panic!("{}: pipeline error {e}", c.name));
            CorpusRun {
                name: c.name.clone(),
                bounds: v.bounds,
            }
        })
        .collect()
}

fn bound_criterion(runs: &[CorpusRun], checks: &[&str]) -> Outcome {
    let mut failures = Vec::new();
    let mut evaluated = 0;
    let mut tightest: f64 = 0.0;
    for run in runs {
        for b in run
            .bounds
            .iter()
            .filter(|b| checks.contains(&b.check.as_str()))
        {
            evaluated += 1;
            if b.rhs > 0.0 {
                tightest = tightest.max(b.lhs / b.rhs);
            }
            if !b.holds {
                failures.push(format!(
                    "{}: {} lhs {} rhs {}",
                    run.name, b.check, b.lhs, b.rhs
                ));
            }
        }
    }
    Outcome::from_failures(
        format!(
            "{evaluated} checks over {} instances, max lhs/rhs {tightest:.4}",
            runs.len()
        ),
        failures,
    )
}

fn criterion_5() -> Outcome {
    let rows = tightness_experiment(2, 6, 6, &big_search()).unwrap();
    let mut failures = Vec::new();
    let mut table = String::from("\n      k  cones  delta/avg   ratio");
    for r in &rows {
        table.push_str(&format!(
            "\n      {}  {:5}  {:9.5}  {:.5}",
            r.k, r.cones, r.delta_over_avg, r.ratio
        ));
    }
    for w in rows.windows(2) {
        if w[1].ratio < w[0].ratio {
            failures.push(format!("ratio decreases at k={}", w[1].k));
        }
        if w[1].delta_over_avg < w[0].delta_over_avg {
            failures.push(format!("delta/avg decreases at k={}", w[1].k));
        }
    }
    let last = rows.last().unwrap();
    if last.ratio <= 0.9 {
        failures.push(format!("ratio at k=6 is {:.5} <= 0.9", last.ratio));
    }
    Outcome::from_failures(
        format!("n=2 digits=6 k<=6, final ratio {:.5}{table}", last.ratio),
        failures,
    )
}

fn criterion_9(cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for c in cases {
        let Ok(oracle) = enumerate_all_bases_oracle(&c.p, 100_000) else {
            continue;
        };
        let r = enumerate(&c.p, None, Execution::default()).unwrap();
        let mut mine: Vec<(Vec<Rational>, Vec<usize>)> = r
            .vertices
            .iter()
            .map(|v| (v.point.clone(), v.tight.clone()))
            .collect();
        mine.sort();
        let theirs: Vec<(Vec<Rational>, Vec<usize>)> = oracle
            .vertices
            .iter()
            .map(|v| (v.point.clone(), v.tight.clone()))
            .collect();
        if mine != theirs {
            failures.push(format!(
                "{}: {} vs oracle {} vertices",
                c.name,
                mine.len(),
                theirs.len()
            ));
        }
        checked += 1;
    }
    Outcome::from_failures(format!("{checked} instances with C(m,n) <= 1e5"), failures)
}

fn random_knapsack(rng: &mut ChaCha8Rng) -> (Vec<Rational>, Rational, Rational) {
    let len = rng.gen_range(1..=8);
    let alpha = Rational::new(rng.gen_range(1..=20).into(), rng.gen_range(1..=4).into());
    let beta = Rational::new(rng.gen_range(1..=60).into(), rng.gen_range(1..=4).into());
    let mut x: Vec<Rational> = (0..len)
        .map(|_| &alpha * Rational::new(rng.gen_range(0..=12).into(), 12.into()))
        .collect();
    let total: Rational = x.iter().sum();
    if total > beta {
        let shrink = &beta / &total;
        for v in &mut x {
            *v *= &shrink;
        }
    }
    (x, alpha, beta)
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=3usize {
        for t in 0..=6i64 {
            let p: HPolyhedron = deltahull::instances::standard_simplex(n, t);
            let r = enumerate(&p, None, Execution::default()).unwrap();
            let c =
                count_integer_points_bruteforce(&p, &r, 1_000_000, Execution::default()).unwrap();
            let expected = common::binom(t as u64 + n as u64, n as u64);
            if c.count != BigInt::from(expected) {
                failures.push(format!("simplex n={n} t={t}: {} != {expected}", c.count));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(common::FUZZ_SEED);
    let functions = [
        ConvexFn::Square,
        ConvexFn::Cube,
        ConvexFn::Hinge(Rational::new(1.into(), 2.into())),
    ];
    let mut violations = 0;
    for _ in 0..10_000 {
        let (x, alpha, beta) = random_knapsack(&mut rng);
        for f in &functions {
            if !knapsack_bound_check(&x, &alpha, &beta, |t| f.eval(t)).unwrap() {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        failures.push(format!("{violations} knapsack violations"));
    }
    Outcome::from_failures(
        "Ehrhart n<=3 t in 0..=6; 10^4 inputs x 3 functions".into(),
        failures,
    )
}

fn criterion_11(cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    let mut simple = 0;
    let mut worst: f64 = 0.0;
    for c in cases {
        let r = enumerate(&c.p, None, Execution::default()).unwrap();
        if !r.is_bounded() || !r.vertices.iter().all(|v| v.simple) {
            continue;
        }
        simple += 1;
        let nm = c.p.dim() * c.p.num_rows();
        worst = worst.max(r.work.max_row_evaluations_per_basis as f64 / nm as f64);
        if r.work.bases_visited != r.triangulation.len() {
            failures.push(format!(
                "{}: visited {} != |T| {}",
                c.name,
                r.work.bases_visited,
                r.triangulation.len()
            ));
        }
        if r.work.max_row_evaluations_per_basis > nm {
            failures.push(format!(
                "{}: {} row evaluations > n*m = {nm}",
                c.name, r.work.max_row_evaluations_per_basis
            ));
        }
    }
    Outcome::from_failures(
        format!("{simple} simple polytopes, max per-basis work {worst:.3} * n*m"),
        failures,
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: usize, title: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((id, title, o, start.elapsed().as_secs_f64()));
    };

    let mut corpus: Vec<Case> = common::generated();
    corpus.extend(common::fuzzed(200));
    let mut with_degenerate = common::degenerate();
    with_degenerate.extend(common::fuzzed(200));
    with_degenerate.extend(common::generated());

    timed(1, "subdivision family exactness", &mut criterion_1);
    timed(2, "dual polytope round trip", &mut criterion_2);
    let start = Instant::now();
    let runs = run_corpus(&corpus);
    let corpus_secs = start.elapsed().as_secs_f64();
    timed(3, "vertex bound on corpus", &mut || {
        bound_criterion(&runs, &["theorem-1"])
    });
    timed(4, "fan volume bound on corpus", &mut || {
        bound_criterion(&runs, &["fan-volume", "fan-cone-count"])
    });
    timed(5, "tightness trend", &mut criterion_5);
    timed(6, "totally unimodular transform", &mut || {
        bound_criterion(&runs, &["total-unimodularity"])
    });
    timed(7, "delta-distance floor", &mut || {
        bound_criterion(&runs, &["delta-distance-floor"])
    });
    timed(8, "tau-wide diameter certificate", &mut || {
        bound_criterion(&runs, &["tau-diameter"])
    });
    timed(9, "enumeration oracle equivalence", &mut || {
        criterion_9(&with_degenerate)
    });
    timed(10, "counting oracle and knapsack sweep", &mut criterion_10);
    timed(11, "work linearity", &mut || criterion_11(&corpus));

    println!(
        "shared corpus pipeline ({} instances): {corpus_secs:.1}s",
        corpus.len()
    );
    let mut failed = 0;
    for (id, title, o, secs) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} [{title}]: {verdict} ({}; {secs:.1}s)",
            o.summary
        );
        for f in &o.failures {
            println!("      - {f}");
        }
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
