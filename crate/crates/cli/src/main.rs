//! `deltahull`: exact vertex enumeration and subdeterminant analysis of
//! polyhedra `{x : A x <= b}`.
//!
//! Exit codes: 0 success, 1 internal error, 2 infeasible, 3 not pointed,
//! 4 invalid input, 5 bound violated, 6 unbounded, 7 budget exceeded.
//! Reports go to stdout (or the `--json` file); diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use deltahull::delta::{triangulation_stats, DeltaMethod, DeltaSearch};
use deltahull::format::{
    canonical_json, parse_instance, parse_point, FanDocument, Instance, InstanceDocument, Metadata,
};
use deltahull::graph::{build_fan_graph, build_polytope_graph, graph_diameter_with};
use deltahull::instances::RandomInstance;
use deltahull::lattice::{count_integer_points_bruteforce, estimate_counting_cost};
use deltahull::lb::{
    dual_instance, expected_counts, lift_polytope, normalize_rays, SubdivisionFan,
};
use deltahull::poly::{redundancy_scan, strip_redundant};
use deltahull::report::{
    enumerate, graph_json, stats_json, triangulation_json, verify, vertices_json, work_json,
    AnalysisOptions,
};
use deltahull::{Error, Execution, HPolyhedron, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "deltahull",
    version,
    about = "Exact polyhedral analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate vertices and the normal-fan triangulation.
    Vertices(InstanceArgs),
    /// Run every analysis and bound check.
    Verify(InstanceArgs),
    /// Subdeterminant statistics and counting-cost figures.
    Stats(InstanceArgs),
    /// Polytope and fan graph diameters.
    Diameter(InstanceArgs),
    /// Count integer points by box scan.
    Count(InstanceArgs),
    /// Write a generated instance (and, for subdivisions, a fan file).
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file (JSON, or CSV when the name ends in `.csv`).
    path: PathBuf,
    /// JSON array of rational strings used instead of phase one.
    #[arg(long)]
    feasible_point: Option<PathBuf>,
    /// Work cap for minor scans, lattice boxes and subset searches.
    #[arg(long, env = "DELTAHULL_BUDGET", default_value_t = 5_000_000)]
    budget: u128,
    /// Remove redundant constraints before the analysis.
    #[arg(long)]
    strip_redundant: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Skip the lattice count in `verify`.
    #[arg(long)]
    no_count: bool,
    /// Maximize determinants with pruning instead of a full scan.
    #[arg(long)]
    branch_and_bound: bool,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Subdivision,
    Random,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    kind: Kind,
    /// Output prefix: writes `<out>.instance.json` (and `<out>.fan.json`).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Subdivision depth.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Also store rays normalized to this many decimal digits.
    #[arg(long)]
    normalize: Option<u32>,
    /// Constraint count for random instances.
    #[arg(long, default_value_t = 8)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    max_entry: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Infeasible => (2, "infeasible"),
            Error::NotPointed { .. } | Error::UnboundedLine => (3, "not-pointed"),
            Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::PreconditionViolated(_)
            | Error::InfeasiblePoint { .. }
            | Error::NotAVertex { .. } => (4, "invalid-input"),
            Error::BoundViolated { .. } => (5, "bound-violated"),
            Error::Unbounded => (6, "unbounded"),
            Error::BudgetExceeded { .. } => (7, "budget-exceeded"),
            _ => (1, "internal"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 4,
        kind: "invalid-input",
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: 1,
        kind: "io",
        message: format!("cannot write {}: {e}", path.display()),
    })
}

impl InstanceArgs {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn search(&self) -> DeltaSearch {
        DeltaSearch {
            budget: self.budget,
            method: if self.branch_and_bound {
                DeltaMethod::BranchAndBound
            } else {
                DeltaMethod::Exhaustive
            },
            exec: self.exec(),
        }
    }

    /// Parses the instance and applies the redundancy policy.
    fn load(&self) -> Result<(HPolyhedron, Option<Vec<Rational>>, Value), Failure> {
        let text = read(&self.path)?;
        let Instance {
            polyhedron,
            mut feasible_point,
            ..
        } = parse_instance(&self.path.to_string_lossy(), &text)?;
        if let Some(fp) = &self.feasible_point {
            feasible_point = Some(parse_point(&read(fp)?)?);
        }
        let (p, redundancy) = if self.strip_redundant {
            let (reduced, removed) = strip_redundant(&polyhedron);
            if !removed.is_empty() {
                eprintln!("removed redundant rows {removed:?}");
            }
            (reduced, json!({"removed": removed}))
        } else {
            let flagged = redundancy_scan(&polyhedron);
            if !flagged.is_empty() {
                eprintln!("warning: rows {flagged:?} are redundant; pass --strip-redundant to remove them");
            }
            (polyhedron, json!({"flagged": flagged}))
        };
        Ok((p, feasible_point, redundancy))
    }

    fn emit(&self, report: &Value) -> Result<(), Failure> {
        let text = canonical_json(report);
        match &self.json {
            Some(path) => write(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn cmd_vertices(args: &InstanceArgs) -> Result<(), Failure> {
    let (p, fp, redundancy) = args.load()?;
    let result = enumerate(&p, fp.as_deref(), args.exec())?;
    let report = json!({
        "instance": InstanceDocument::from_polyhedron(&p, None),
        "redundancy": redundancy,
        "vertices": vertices_json(&result),
        "triangulation": triangulation_json(&result),
        "work": work_json(&result.work, p.dim(), p.num_rows()),
    });
    args.emit(&report)
}

fn cmd_verify(args: &InstanceArgs) -> Result<(), Failure> {
    let (p, fp, redundancy) = args.load()?;
    let opts = AnalysisOptions {
        search: args.search(),
        minor_budget: args.budget,
        cell_budget: args.budget,
        count: !args.no_count,
        exec: args.exec(),
    };
    let v = verify(&p, fp.as_deref(), &opts)?;
    let mut report = v.report.clone();
    report["redundancy"] = redundancy;
    let violations = v.violations();
    if let Some(first) = violations.first() {
        let dump = json!({"instance": InstanceDocument::from_polyhedron(&p, None), "violations": violations, "report": report});
        let path =
            std::env::temp_dir().join(format!("deltahull-reproducer-{}.json", std::process::id()));
        write(&path, &canonical_json(&dump))?;
        eprintln!("reproducer written to {}", path.display());
        args.emit(&report)?;
        return Err(Error::BoundViolated {
            check: first.check.clone(),
            lhs: first.lhs.to_string(),
            rhs: first.rhs.to_string(),
        }
        .into());
    }
    args.emit(&report)
}

fn cmd_stats(args: &InstanceArgs) -> Result<(), Failure> {
    let (p, fp, _) = args.load()?;
    let result = enumerate(&p, fp.as_deref(), args.exec())?;
    let stats = triangulation_stats(p.a(), &result.triangulation.cones, &args.search())?;
    let cost = estimate_counting_cost(&stats);
    let report = json!({
        "instance": InstanceDocument::from_polyhedron(&p, None),
        "stats": stats_json(&stats),
        "vertex_count": result.vertices.len(),
        "counting_cost": {
            "n4_delta_cones_detsq": cost.primary,
            "n3_delta_cones_detsq": cost.refined,
            "nn_delta4_over_avg": cost.envelope,
        },
    });
    args.emit(&report)
}

fn cmd_diameter(args: &InstanceArgs) -> Result<(), Failure> {
    let (p, fp, _) = args.load()?;
    let result = enumerate(&p, fp.as_deref(), args.exec())?;
    let graph = build_polytope_graph(&p, &result);
    let diameter = graph_diameter_with(&graph, args.exec());
    let fan = build_fan_graph(&result.triangulation.cones, p.a());
    let fan_diameter = graph_diameter_with(&fan, args.exec());
    let report = json!({
        "instance": InstanceDocument::from_polyhedron(&p, None),
        "graph": graph_json(&graph, &diameter),
        "fan_graph": graph_json(&fan, &fan_diameter),
    });
    diameter?;
    args.emit(&report)
}

fn cmd_count(args: &InstanceArgs) -> Result<(), Failure> {
    let (p, fp, _) = args.load()?;
    let result = enumerate(&p, fp.as_deref(), args.exec())?;
    let count = count_integer_points_bruteforce(&p, &result, args.budget, args.exec())?;
    let stats = triangulation_stats(p.a(), &result.triangulation.cones, &args.search())?;
    let cost = estimate_counting_cost(&stats);
    let report = json!({
        "instance": InstanceDocument::from_polyhedron(&p, None),
        "integer_points": count.count.to_string(),
        "cells_scanned": count.cells_scanned.to_string(),
        "box": count.bounds.iter().map(|(lo, hi)| [lo.to_string(), hi.to_string()]).collect::<Vec<_>>(),
        "counting_cost": {
            "n4_delta_cones_detsq": cost.primary,
            "n3_delta_cones_detsq": cost.refined,
            "nn_delta4_over_avg": cost.envelope,
        },
    });
    args.emit(&report)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let instance_path = with_suffix(&args.out, ".instance.json");
    let summary = match args.kind {
        Kind::Subdivision => {
            if args.dim < 2 {
                return Err(invalid("subdivision fans need --dim >= 2"));
            }
            let tower = SubdivisionFan::tower(args.dim, args.depth);
            let fan = tower.last().expect("nonempty tower");
            let lifted = lift_polytope(&tower)?;
            let dual = dual_instance(fan, &lifted)?;
            let normalized = args.normalize.map(|d| normalize_rays(&fan.rays, d));
            let meta = Metadata {
                name: Some(format!("subdivision-dual-n{}-k{}", args.dim, args.depth)),
                provenance: Some("polar of the lifted barycentric subdivision polytope".into()),
            };
            let fan_path = with_suffix(&args.out, ".fan.json");
            let doc = InstanceDocument::from_polyhedron(&dual, Some(meta));
            write(&instance_path, &canonical_json(&json!(doc)))?;
            write(
                &fan_path,
                &canonical_json(&json!(FanDocument::from_fan(fan, normalized.as_deref()))),
            )?;
            let e = expected_counts(args.dim, args.depth);
            json!({
                "instance": instance_path,
                "fan": fan_path,
                "rows": dual.num_rows(),
                "expected": {
                    "cones": e.cones.to_string(),
                    "diameter": e.diameter.to_string(),
                    "delta_ratio": e.delta_ratio.to_string(),
                },
            })
        }
        Kind::Random => {
            if args.dim < 1 || args.rows < args.dim || args.max_entry < 1 {
                return Err(invalid(
                    "random instances need 1 <= dim <= rows and max-entry >= 1",
                ));
            }
            let params = RandomInstance {
                dim: args.dim,
                rows: args.rows,
                max_entry: args.max_entry,
                seed: args.seed,
            };
            let p = params.generate();
            let meta = Metadata {
                name: Some(format!(
                    "random-n{}-m{}-e{}-s{}",
                    args.dim, args.rows, args.max_entry, args.seed
                )),
                provenance: Some("seeded ChaCha8 integer instance".into()),
            };
            write(
                &instance_path,
                &canonical_json(&json!(InstanceDocument::from_polyhedron(&p, Some(meta)))),
            )?;
            json!({"instance": instance_path, "rows": p.num_rows()})
        }
    };
    print!("{}", canonical_json(&summary));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Vertices(a) => cmd_vertices(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Diameter(a) => cmd_diameter(a),
        Command::Count(a) => cmd_count(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!(
                "{}",
                json!({"error": f.kind, "message": f.message, "exit_code": f.code})
            );
            ExitCode::from(f.code)
        }
    }
}
