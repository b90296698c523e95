//! The end-to-end analysis behind the command-line tool and its JSON
//! report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use crate::delta::{
    check_fan_bound, check_vertex_bound, totally_unimodular_transform, triangulation_stats,
    verify_total_unimodularity, wideness_and_diameter_bound, BoundReport, DeltaSearch, FanStats,
    DEFAULT_MINOR_BUDGET,
};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::exec::Execution;
use crate::format::{rational_value, render_all, InstanceDocument};
use crate::graph::{build_fan_graph, build_polytope_graph, graph_diameter_with, SkeletonGraph};
use crate::hull::{enumerate_vertices_with, EnumerationResult, WorkCounters};
use crate::lattice::{
    count_integer_points_bruteforce, estimate_counting_cost, DEFAULT_CELL_BUDGET,
};
use crate::poly::{find_initial_vertex, phase_one, Feasibility, HPolyhedron, VertexRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Search used for `Δ`; its budget caps `C(m, n)`.
    pub search: DeltaSearch,
    /// Cap on the number of minors for the total-unimodularity scan.
    pub minor_budget: u128,
    /// Cap on box cells for lattice counting.
    pub cell_budget: u128,
    pub count: bool,
    pub exec: Execution,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            search: DeltaSearch::default(),
            minor_budget: DEFAULT_MINOR_BUDGET,
            cell_budget: DEFAULT_CELL_BUDGET,
            count: true,
            exec: Execution::default(),
        }
    }
}

impl AnalysisOptions {
    /// The same budget for every scan.
    pub fn with_budget(budget: u128) -> Self {
        let mut o = AnalysisOptions::default();
        o.search.budget = budget;
        o.minor_budget = budget;
        o.cell_budget = budget;
        o
    }
}

/// Wall-clock timings of named stages, in milliseconds.
#[derive(Clone, Debug, Default)]
pub struct Timings(BTreeMap<String, f64>);

impl Timings {
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

/// A starting vertex: walk from the supplied point, or from the point found
/// by phase one.
pub fn initial_vertex(
    p: &HPolyhedron,
    feasible_point: Option<&[Rational]>,
) -> Result<VertexRecord> {
    match feasible_point {
        Some(x) => find_initial_vertex(p, x),
        None => match phase_one(p) {
            Feasibility::Feasible(x) => find_initial_vertex(p, &x),
            Feasibility::Infeasible => Err(Error::Infeasible),
        },
    }
}

pub fn enumerate(
    p: &HPolyhedron,
    feasible_point: Option<&[Rational]>,
    exec: Execution,
) -> Result<EnumerationResult> {
    let start = initial_vertex(p, feasible_point)?;
    enumerate_vertices_with(p, &start, exec)
}

pub fn vertices_json(result: &EnumerationResult) -> Value {
    let vertices: Vec<Value> = result
        .vertices
        .iter()
        .map(|v| json!({"point": render_all(&v.point), "tight": v.tight, "simple": v.simple}))
        .collect();
    let rays: Vec<Value> = result
        .rays
        .iter()
        .map(|r| json!({"vertex": r.vertex, "direction": render_all(&r.direction)}))
        .collect();
    json!({"vertices": vertices, "rays": rays})
}

pub fn triangulation_json(result: &EnumerationResult) -> Value {
    let cones: Vec<&[usize]> = result
        .triangulation
        .cones
        .iter()
        .map(|b| b.rows())
        .collect();
    let owners: Vec<[usize; 2]> = result
        .triangulation
        .vertex_index
        .iter()
        .map(|r| [r.start, r.end])
        .collect();
    json!({"cones": cones, "vertex_ranges": owners})
}

pub fn work_json(w: &WorkCounters, n: usize, m: usize) -> Value {
    json!({
        "bases_visited": w.bases_visited,
        "pivots": w.pivots,
        "row_evaluations": w.row_evaluations,
        "max_row_evaluations_per_basis": w.max_row_evaluations_per_basis,
        "row_evaluation_cap_n_times_m": n * m,
        "inverse_updates": w.inverse_updates,
        "inverse_recomputations": w.inverse_recomputations,
    })
}

pub fn stats_json(s: &FanStats) -> Value {
    json!({
        "delta": rational_value(&s.delta),
        "witness": s.witness.rows(),
        "delta_avg": rational_value(&s.delta_avg),
        "delta_min": rational_value(&s.delta_min),
        "cone_count": s.cone_count,
        "fan_volume": rational_value(&s.fan_volume),
    })
}

pub fn graph_json(g: &SkeletonGraph, diameter: &Result<usize>) -> Value {
    json!({
        "nodes": g.len(),
        "edges": g.edge_count(),
        "adjacency": g.adjacency,
        "diameter": diameter.as_ref().ok(),
    })
}

/// Everything `verify` computes, plus the rendered report.
#[derive(Debug)]
pub struct Verification {
    pub enumeration: EnumerationResult,
    pub stats: FanStats,
    pub bounds: Vec<BoundReport>,
    pub diameter: usize,
    pub report: Value,
}

impl Verification {
    pub fn violations(&self) -> Vec<&BoundReport> {
        self.bounds.iter().filter(|b| !b.holds).collect()
    }
}

/// Enumeration, statistics, graphs, every bound check and (optionally) the
/// lattice count. Failing checks are recorded, not raised; callers decide
/// how to react through [`Verification::violations`].
pub fn verify(
    p: &HPolyhedron,
    feasible_point: Option<&[Rational]>,
    opts: &AnalysisOptions,
) -> Result<Verification> {
    let mut t = Timings::default();
    let (n, m) = (p.dim(), p.num_rows());
    let result = t.time("enumeration", || enumerate(p, feasible_point, opts.exec))?;
    let search = DeltaSearch {
        exec: opts.exec,
        ..opts.search
    };
    let stats = t.time("statistics", || {
        triangulation_stats(p.a(), &result.triangulation.cones, &search)
    })?;
    let graph = t.time("polytope_graph", || build_polytope_graph(p, &result));
    let diameter = graph_diameter_with(&graph, opts.exec)?;
    let fan_graph = t.time("fan_graph", || {
        build_fan_graph(&result.triangulation.cones, p.a())
    });
    let fan_diameter = graph_diameter_with(&fan_graph, opts.exec);

    let mut bounds = vec![check_vertex_bound(&result, &stats)];
    bounds.extend(check_fan_bound(&stats));

    let tu = t.time("total_unimodularity", || {
        let transformed = totally_unimodular_transform(p.a(), &stats.witness)?;
        verify_total_unimodularity(&transformed, opts.minor_budget, opts.exec)
    });
    let tu_json = match tu {
        Ok(ok) => {
            bounds.push(BoundReport {
                check: "total-unimodularity".into(),
                lhs_exact: Some("max |minor| of A A_B^-1".into()),
                lhs: if ok { 1.0 } else { f64::INFINITY },
                rhs_exact: Some("1".into()),
                rhs: 1.0,
                holds: ok,
            });
            json!({"checked": true, "holds": ok})
        }
        Err(Error::BudgetExceeded { needed, budget }) => {
            json!({"checked": false, "reason": format!("{needed} minors exceed budget {budget}")})
        }
        Err(e) => return Err(e),
    };

    let wide = t.time("wideness", || {
        wideness_and_diameter_bound(p, &stats, &result.triangulation.cones)
    })?;
    bounds.push(wide.check_floor());
    bounds.push(wide.check_diameter(diameter));

    let counts = if !opts.count {
        json!({"skipped": "not requested"})
    } else {
        match t.time("lattice_count", || {
            count_integer_points_bruteforce(p, &result, opts.cell_budget, opts.exec)
        }) {
            Ok(c) => json!({
                "integer_points": c.count.to_string(),
                "cells_scanned": c.cells_scanned.to_string(),
                "box": c.bounds.iter().map(|(lo, hi)| [lo.to_string(), hi.to_string()]).collect::<Vec<_>>(),
            }),
            Err(Error::Unbounded) => json!({"skipped": "polyhedron is unbounded"}),
            Err(Error::BudgetExceeded { needed, budget }) => {
                json!({"skipped": format!("{needed} cells exceed budget {budget}")})
            }
            Err(e) => return Err(e),
        }
    };
    let cost = estimate_counting_cost(&stats);

    let report = json!({
        "instance": InstanceDocument::from_polyhedron(p, None),
        "vertices": vertices_json(&result),
        "triangulation": triangulation_json(&result),
        "stats": stats_json(&stats),
        "graph": graph_json(&graph, &Ok(diameter)),
        "fan_graph": {"nodes": fan_graph.len(), "edges": fan_graph.edge_count(), "diameter": fan_diameter.ok()},
        "bounds": bounds,
        "total_unimodularity": tu_json,
        "wideness": {
            "transform_basis": wide.transform_basis.rows(),
            "delta_sin_squared": rational_value(&wide.delta_distance.sin_squared),
            "delta": wide.delta_distance.delta,
            "tau_squared": rational_value(&wide.tau_squared),
            "tau": wide.tau,
            "diameter_bound": wide.diameter_bound,
            "lemma_floor": rational_value(&wide.lemma_floor),
        },
        "counts": counts,
        "counting_cost": {
            "n4_delta_cones_detsq": rational_value(&cost.primary_exact),
            "n3_delta_cones_detsq": rational_value(&cost.refined_exact),
            "nn_delta4_over_avg": rational_value(&cost.envelope_exact),
        },
        "timings_ms": t.to_json(),
        "work": work_json(&result.work, n, m),
    });
    Ok(Verification {
        enumeration: result,
        stats,
        bounds,
        diameter,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn cube_verifies() {
        let v = verify(&instances::cube(3), None, &AnalysisOptions::default()).unwrap();
        assert!(v.violations().is_empty(), "{:?}", v.violations());
        assert_eq!(v.diameter, 3);
        assert_eq!(v.report["counts"]["integer_points"], "8");
        assert_eq!(v.bounds.len(), 6);
    }

    #[test]
    fn infeasible_is_reported() {
        let p = HPolyhedron::new(
            crate::exact::RationalMatrix::from_i64(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]),
            crate::exact::ints(&[-1, 0, 1, 0]),
        )
        .unwrap();
        assert_eq!(
            enumerate(&p, None, Execution::Sequential).unwrap_err(),
            Error::Infeasible
        );
    }
}
