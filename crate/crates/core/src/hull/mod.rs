//! Vertex enumeration by breadth-first search over feasible bases.
//!
//! Every vertex's normal cone is triangulated once, on first discovery, and
//! the simplices of that triangulation are the BFS nodes. Each node is
//! expanded by pivoting every basis row out with an exact ratio test; a
//! positive step reaches an adjacent vertex, a zero step a sibling basis of
//! the same (degenerate) vertex, and no blocking row an unbounded edge.
//!
//! Per expanded basis the ratio test evaluates one length-`n` inner product
//! for each (leaving row, non-basic row) pair, `n (m - n)` in total; this is
//! the figure recorded in [`WorkCounters`].

mod triangulate;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::Range;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{basis_inverse_update, dot, Rational, RationalMatrix};
use crate::exec::Execution;
use crate::poly::{basis_inverse, basis_vertex, Basis, HPolyhedron, VertexRecord};

pub use triangulate::{placing_triangulation, triangulate_normal_cone};

/// One pivot out of a feasible basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotEdge {
    pub from_basis: Basis,
    pub leaving: usize,
    /// `None` for an unbounded edge.
    pub entering: Option<usize>,
    /// Step length along `direction`; zero for a degenerate pivot, `None`
    /// for an unbounded edge.
    pub step: Option<Rational>,
    pub direction: Vec<Rational>,
}

impl PivotEdge {
    pub fn is_ray(&self) -> bool {
        self.entering.is_none()
    }

    pub fn is_degenerate(&self) -> bool {
        self.step.as_ref().is_some_and(Zero::is_zero)
    }

    pub fn to_basis(&self) -> Option<Basis> {
        self.entering
            .map(|e| self.from_basis.exchange(self.leaving, e))
    }
}

/// Simplicial cones of the normal fan, grouped by owning vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Triangulation {
    pub cones: Vec<Basis>,
    /// `vertex_index[v]` is the range of `cones` owned by vertex `v`.
    pub vertex_index: Vec<Range<usize>>,
}

impl Triangulation {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn cones_of(&self, vertex: usize) -> &[Basis] {
        &self.cones[self.vertex_index[vertex].clone()]
    }

    fn push_vertex(&mut self, cones: Vec<Basis>) {
        let start = self.cones.len();
        self.cones.extend(cones);
        self.vertex_index.push(start..self.cones.len());
    }
}

/// An unbounded edge leaving a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnboundedEdge {
    pub vertex: usize,
    /// Primitive direction: scaled so the entries are coprime integers.
    pub direction: Vec<Rational>,
}

/// Instrumentation gathered during enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounters {
    pub bases_visited: usize,
    pub pivots: usize,
    pub row_evaluations: usize,
    pub max_row_evaluations_per_basis: usize,
    pub inverse_updates: usize,
    pub inverse_recomputations: usize,
}

#[derive(Clone, Debug)]
pub struct EnumerationResult {
    pub vertices: Vec<VertexRecord>,
    pub triangulation: Triangulation,
    /// Undirected adjacency between bases joined by a pivot (degenerate
    /// pivots included).
    pub pivot_graph: BTreeMap<Basis, BTreeSet<Basis>>,
    pub pivot_edges: Vec<PivotEdge>,
    pub rays: Vec<UnboundedEdge>,
    pub work: WorkCounters,
    /// Owning vertex of every basis met during the search.
    pub basis_vertex: HashMap<Basis, usize>,
}

impl EnumerationResult {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Number of undirected pivot-graph edges.
    pub fn pivot_edge_count(&self) -> usize {
        self.pivot_graph.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertex_of(&self, basis: &Basis) -> Option<usize> {
        self.basis_vertex.get(basis).copied()
    }
}

struct Expansion {
    edges: Vec<PivotEdge>,
    row_evaluations: usize,
    recomputed_inverse: bool,
    /// Updated inverses for every non-ray edge, keyed by target basis.
    inverses: Vec<(Basis, RationalMatrix)>,
    point: Vec<Rational>,
}

/// Ratio-test neighbours of a feasible basis given its inverse (columns
/// aligned with the sorted basis rows).
pub fn pivot_neighbors(p: &HPolyhedron, basis: &Basis, inv: &RationalMatrix) -> Vec<PivotEdge> {
    let point = inverse_apply(p, basis, inv);
    pivot_neighbors_at(p, basis, inv, &point).0
}

fn inverse_apply(p: &HPolyhedron, basis: &Basis, inv: &RationalMatrix) -> Vec<Rational> {
    let rhs: Vec<Rational> = basis.rows().iter().map(|&i| p.b()[i].clone()).collect();
    inv.mul_vec(&rhs)
}

fn pivot_neighbors_at(
    p: &HPolyhedron,
    basis: &Basis,
    inv: &RationalMatrix,
    point: &[Rational],
) -> (Vec<PivotEdge>, usize) {
    let n = p.dim();
    let mut edges = Vec::new();
    let mut evaluations = 0;
    let slacks: Vec<Option<Rational>> = (0..p.num_rows())
        .map(|i| (!basis.contains(i)).then(|| p.slack(i, point)))
        .collect();
    for (q, &leaving) in basis.rows().iter().enumerate() {
        let direction: Vec<Rational> = (0..n).map(|k| -inv[(k, q)].clone()).collect();
        let mut best: Option<Rational> = None;
        let mut argmins: Vec<usize> = Vec::new();
        for (i, slack) in slacks.iter().enumerate() {
            let Some(slack) = slack else { continue };
            evaluations += 1;
            let rate = dot(p.row(i), &direction);
            if !rate.is_positive() {
                continue;
            }
            let t = slack / rate;
            match &best {
                Some(b) if t > *b => {}
                Some(b) if t == *b => argmins.push(i),
                _ => {
                    best = Some(t);
                    argmins.clear();
                    argmins.push(i);
                }
            }
        }
        match best {
            None => edges.push(PivotEdge {
                from_basis: basis.clone(),
                leaving,
                entering: None,
                step: None,
                direction,
            }),
            Some(t) => {
                for entering in argmins {
                    edges.push(PivotEdge {
                        from_basis: basis.clone(),
                        leaving,
                        entering: Some(entering),
                        step: Some(t.clone()),
                        direction: direction.clone(),
                    });
                }
            }
        }
    }
    (edges, evaluations)
}

/// Inverse of the basis reached by `edge`, with columns reordered to the
/// sorted row order of the new basis.
fn pivoted_inverse(
    p: &HPolyhedron,
    inv: &RationalMatrix,
    edge: &PivotEdge,
) -> Option<(Basis, RationalMatrix)> {
    let entering = edge.entering?;
    let q = edge.from_basis.position(edge.leaving)?;
    let updated = basis_inverse_update(inv, q, p.row(entering)).ok()?;
    let mut positional: Vec<usize> = edge.from_basis.rows().to_vec();
    positional[q] = entering;
    let target = Basis::new(positional.clone());
    let n = positional.len();
    let mut sorted = RationalMatrix::zeros(n, n);
    for (s, row) in target.rows().iter().enumerate() {
        let from = positional
            .iter()
            .position(|r| r == row)
            .expect("row present");
        for k in 0..n {
            sorted[(k, s)] = updated[(k, from)].clone();
        }
    }
    Some((target, sorted))
}

fn primitive_direction(d: &[Rational]) -> Vec<Rational> {
    let (ints, _) = crate::exact::integerize(d);
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| {
        num_integer::Integer::gcd(&acc, v)
    });
    ints.into_iter()
        .map(|v| Rational::from_integer(if g.is_zero() { v } else { v / &g }))
        .collect()
}

fn register(
    p: &HPolyhedron,
    record: VertexRecord,
    vertices: &mut Vec<VertexRecord>,
    vertex_ids: &mut HashMap<Vec<Rational>, usize>,
    triangulation: &mut Triangulation,
    basis_owner: &mut HashMap<Basis, usize>,
) -> Result<(usize, Vec<Basis>)> {
    let id = vertices.len();
    let cones = triangulate_normal_cone(p, &record.tight)?;
    for c in &cones {
        basis_owner.insert(c.clone(), id);
    }
    vertex_ids.insert(record.point.clone(), id);
    vertices.push(record);
    triangulation.push_vertex(cones.clone());
    Ok((id, cones))
}

/// BFS enumeration of all vertices of `p` starting from `start`.
pub fn enumerate_vertices(p: &HPolyhedron, start: &VertexRecord) -> Result<EnumerationResult> {
    enumerate_vertices_with(p, start, Execution::default())
}

pub fn enumerate_vertices_with(
    p: &HPolyhedron,
    start: &VertexRecord,
    exec: Execution,
) -> Result<EnumerationResult> {
    // Re-derive the record so a stale or hand-built one cannot slip through.
    let start = VertexRecord::from_point(p, start.point.clone())?;

    let mut vertices: Vec<VertexRecord> = Vec::new();
    let mut vertex_ids: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut triangulation = Triangulation::default();
    let mut basis_owner: HashMap<Basis, usize> = HashMap::new();
    let mut pivot_graph: BTreeMap<Basis, BTreeSet<Basis>> = BTreeMap::new();
    let mut pivot_edges = Vec::new();
    let mut rays: Vec<UnboundedEdge> = Vec::new();
    let mut ray_seen: HashSet<UnboundedEdge> = HashSet::new();
    let mut work = WorkCounters::default();
    let mut enqueued: HashSet<Basis> = HashSet::new();
    let mut known_inverse: HashMap<Basis, RationalMatrix> = HashMap::new();

    let (_, first_cones) = register(
        p,
        start,
        &mut vertices,
        &mut vertex_ids,
        &mut triangulation,
        &mut basis_owner,
    )?;
    let mut frontier: Vec<Basis> = first_cones;
    frontier.sort();
    enqueued.extend(frontier.iter().cloned());

    while !frontier.is_empty() {
        let inverses: Vec<Option<RationalMatrix>> =
            frontier.iter().map(|b| known_inverse.remove(b)).collect();
        let jobs: Vec<(&Basis, Option<RationalMatrix>)> = frontier.iter().zip(inverses).collect();
        let expansions: Vec<Result<Expansion>> = exec.map_slice(&jobs, |(basis, inv)| {
            let (inv, recomputed) = match inv {
                Some(inv) => (inv.clone(), false),
                None => (basis_inverse(p, basis)?, true),
            };
            let point = inverse_apply(p, basis, &inv);
            let (edges, row_evaluations) = pivot_neighbors_at(p, basis, &inv, &point);
            let inverses = edges
                .iter()
                .filter_map(|e| pivoted_inverse(p, &inv, e))
                .collect();
            Ok(Expansion {
                edges,
                row_evaluations,
                recomputed_inverse: recomputed,
                inverses,
                point,
            })
        });

        let mut next: BTreeSet<Basis> = BTreeSet::new();
        for (basis, expansion) in frontier.iter().zip(expansions) {
            let expansion = expansion?;
            work.bases_visited += 1;
            work.row_evaluations += expansion.row_evaluations;
            work.max_row_evaluations_per_basis = work
                .max_row_evaluations_per_basis
                .max(expansion.row_evaluations);
            if expansion.recomputed_inverse {
                work.inverse_recomputations += 1;
            }
            let owner = basis_owner[basis];
            let mut updated: HashMap<Basis, RationalMatrix> =
                expansion.inverses.into_iter().collect();
            work.inverse_updates += updated.len();
            for edge in expansion.edges {
                work.pivots += 1;
                match (&edge.entering, &edge.step) {
                    (Some(_), Some(step)) => {
                        let target = edge.to_basis().expect("entering row");
                        let point: Vec<Rational> = expansion
                            .point
                            .iter()
                            .zip(&edge.direction)
                            .map(|(x, d)| x + step * d)
                            .collect();
                        let target_vertex = match vertex_ids.get(&point) {
                            Some(&id) => id,
                            None => {
                                let record = VertexRecord::from_point(p, point)?;
                                let (id, cones) = register(
                                    p,
                                    record,
                                    &mut vertices,
                                    &mut vertex_ids,
                                    &mut triangulation,
                                    &mut basis_owner,
                                )?;
                                for c in cones {
                                    if enqueued.insert(c.clone()) {
                                        if let Some(inv) = updated.remove(&c) {
                                            known_inverse.insert(c.clone(), inv);
                                        }
                                        next.insert(c);
                                    }
                                }
                                id
                            }
                        };
                        debug_assert!(step.is_zero() == (target_vertex == owner));
                        basis_owner.entry(target.clone()).or_insert(target_vertex);
                        if target != *basis {
                            pivot_graph
                                .entry(basis.clone())
                                .or_default()
                                .insert(target.clone());
                            pivot_graph.entry(target).or_default().insert(basis.clone());
                        }
                    }
                    _ => {
                        let ray = UnboundedEdge {
                            vertex: owner,
                            direction: primitive_direction(&edge.direction),
                        };
                        if ray_seen.insert(ray.clone()) {
                            rays.push(ray);
                        }
                    }
                }
                pivot_edges.push(edge);
            }
        }
        frontier = next.into_iter().collect();
    }

    Ok(EnumerationResult {
        vertices,
        triangulation,
        pivot_graph,
        pivot_edges,
        rays,
        work,
        basis_vertex: basis_owner,
    })
}

/// Exhaustive ground truth: every `n`-subset of rows.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Vertices sorted lexicographically by coordinates.
    pub vertices: Vec<VertexRecord>,
    /// Feasible bases grouped by the index of their vertex in `vertices`.
    pub bases_by_vertex: Vec<Vec<Basis>>,
}

impl OracleResult {
    pub fn feasible_bases(&self) -> impl Iterator<Item = &Basis> {
        self.bases_by_vertex.iter().flatten()
    }
}

pub fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((m - i) as u128) / (i as u128 + 1)
    })
}

/// Calls `f` on every `k`-subset of `0..m` (in lexicographic order) whose
/// smallest element is `first`.
pub fn for_each_combination_with_first(
    m: usize,
    k: usize,
    first: usize,
    mut f: impl FnMut(&[usize]),
) {
    if k == 0 || first + k > m {
        return;
    }
    let mut combo: Vec<usize> = (first..first + k).collect();
    loop {
        f(&combo);
        // Advance positions 1..k only.
        let mut i = k;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            if combo[i] < m - (k - i) {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn enumerate_all_bases_oracle(p: &HPolyhedron, budget: u128) -> Result<OracleResult> {
    enumerate_all_bases_oracle_with(p, budget, Execution::default())
}

pub fn enumerate_all_bases_oracle_with(
    p: &HPolyhedron,
    budget: u128,
    exec: Execution,
) -> Result<OracleResult> {
    let (m, n) = (p.num_rows(), p.dim());
    let needed = binomial(m, n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let per_first: Vec<Vec<(Basis, Vec<Rational>)>> = exec.map_range(m, |first| {
        let mut found = Vec::new();
        for_each_combination_with_first(m, n, first, |combo| {
            let basis = Basis::new(combo.to_vec());
            if let Ok(x) = basis_vertex(p, &basis) {
                if p.contains(&x) {
                    found.push((basis, x));
                }
            }
        });
        found
    });
    let mut grouped: BTreeMap<Vec<Rational>, Vec<Basis>> = BTreeMap::new();
    for (basis, x) in per_first.into_iter().flatten() {
        grouped.entry(x).or_default().push(basis);
    }
    let mut vertices = Vec::with_capacity(grouped.len());
    let mut bases_by_vertex = Vec::with_capacity(grouped.len());
    for (x, bases) in grouped {
        vertices.push(VertexRecord::from_point(p, x)?);
        bases_by_vertex.push(bases);
    }
    Ok(OracleResult {
        vertices,
        bases_by_vertex,
    })
}
