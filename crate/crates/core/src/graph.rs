//! Vertex-edge graphs of polyhedra and adjacency graphs of fans.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{adjugate_column, dot, rank_of, Rational, RationalMatrix};
use crate::exec::Execution;
use crate::hull::EnumerationResult;
use crate::poly::{Basis, HPolyhedron};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Polytope,
    Fan,
}

/// A simple undirected graph on `0..len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub kind: GraphKind,
    /// Sorted, duplicate-free neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
}

impl SkeletonGraph {
    fn from_edges(
        kind: GraphKind,
        nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut sets = vec![BTreeSet::new(); nodes];
        for (u, v) in edges {
            if u != v {
                sets[u].insert(v);
                sets[v].insert(u);
            }
        }
        SkeletonGraph {
            kind,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }
}

/// Whether two vertices of `p` span an edge: their common tight rows have
/// rank `n - 1`.
pub fn is_polytope_edge(p: &HPolyhedron, tight_u: &[usize], tight_v: &[usize]) -> bool {
    let common: Vec<usize> = tight_u
        .iter()
        .copied()
        .filter(|r| tight_v.contains(r))
        .collect();
    !common.is_empty() && rank_of(&p.a().select_rows(&common)) == p.dim() - 1
}

/// The graph of `P` from the positive-step pivots of an enumeration. Pivots
/// out of a degenerate vertex can follow a basis-cone ray that is not an
/// edge of `P`; those are filtered with [`is_polytope_edge`].
pub fn build_polytope_graph(p: &HPolyhedron, result: &EnumerationResult) -> SkeletonGraph {
    let mut edges = BTreeSet::new();
    for e in &result.pivot_edges {
        let (Some(to), Some(step)) = (e.to_basis(), e.step.as_ref()) else {
            continue;
        };
        if step.is_zero() {
            continue;
        }
        let (Some(u), Some(v)) = (result.vertex_of(&e.from_basis), result.vertex_of(&to)) else {
            continue;
        };
        if u == v {
            continue;
        }
        let (tu, tv) = (&result.vertices[u], &result.vertices[v]);
        if (tu.simple && tv.simple) || is_polytope_edge(p, &tu.tight, &tv.tight) {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    SkeletonGraph::from_edges(GraphKind::Polytope, result.vertices.len(), edges)
}

/// The graph of `P` by testing every vertex pair; the ground truth for
/// [`build_polytope_graph`].
pub fn polytope_graph_oracle(p: &HPolyhedron, tight_sets: &[Vec<usize>]) -> SkeletonGraph {
    let mut edges = Vec::new();
    for u in 0..tight_sets.len() {
        for v in u + 1..tight_sets.len() {
            if is_polytope_edge(p, &tight_sets[u], &tight_sets[v]) {
                edges.push((u, v));
            }
        }
    }
    SkeletonGraph::from_edges(GraphKind::Polytope, tight_sets.len(), edges)
}

/// Sign of `<u, x>` for the normal `u` of the hyperplane spanned by
/// `shared`, where `x` is a generator not in `shared`.
fn side(generators: &RationalMatrix, shared: &[usize], x: usize, normal: &[Rational]) -> i8 {
    let s = dot(normal, generators.row(x));
    debug_assert!(shared
        .iter()
        .all(|&r| dot(normal, generators.row(r)).is_zero()));
    if s.is_positive() {
        1
    } else if s.is_negative() {
        -1
    } else {
        0
    }
}

/// Adjacency of simplicial cones (rows of `generators` indexed by each
/// basis): two cones are adjacent when they share `n - 1` generators and
/// their remaining generators lie strictly on opposite sides of the
/// hyperplane those shared generators span.
pub fn build_fan_graph(cones: &[Basis], generators: &RationalMatrix) -> SkeletonGraph {
    let mut by_facet: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for (c, cone) in cones.iter().enumerate() {
        for (pos, &drop) in cone.rows().iter().enumerate() {
            let facet: Vec<usize> = cone.rows().iter().copied().filter(|&r| r != drop).collect();
            by_facet.entry(facet).or_default().push((c, pos));
        }
    }
    let mut edges = Vec::new();
    for (facet, members) in &by_facet {
        if members.len() < 2 {
            continue;
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (c1, p1) = members[i];
                let (c2, _) = members[j];
                let m1 = generators.select_rows(cones[c1].rows());
                let normal = adjugate_column(&m1, p1);
                let x1 = cones[c1].rows()[p1];
                let x2 = *cones[c2]
                    .rows()
                    .iter()
                    .find(|r| !facet.contains(r))
                    .expect("cone has one generator off the facet");
                let (s1, s2) = (
                    side(generators, facet, x1, &normal),
                    side(generators, facet, x2, &normal),
                );
                if s1 != 0 && s1 == -s2 {
                    edges.push((c1, c2));
                }
            }
        }
    }
    SkeletonGraph::from_edges(GraphKind::Fan, cones.len(), edges)
}

/// Eccentricity of `source`, or `None` when some node is unreachable.
pub fn eccentricity(g: &SkeletonGraph, source: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    let mut seen = 1;
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &g.adjacency[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                far = far.max(dist[v]);
                seen += 1;
                queue.push_back(v);
            }
        }
    }
    (seen == g.len()).then_some(far)
}

/// Exact diameter by breadth-first search from every node.
pub fn graph_diameter(g: &SkeletonGraph) -> Result<usize> {
    graph_diameter_with(g, Execution::default())
}

pub fn graph_diameter_with(g: &SkeletonGraph, exec: Execution) -> Result<usize> {
    if g.is_empty() {
        return Ok(0);
    }
    let ecc = exec.map_range(g.len(), |s| eccentricity(g, s));
    ecc.into_iter()
        .try_fold(0, |acc, e| e.map(|e| acc.max(e)))
        .ok_or(Error::DisconnectedGraph)
}

/// Cycle on `len` nodes, used as a reference graph in tests and benches.
pub fn cycle_graph(len: usize) -> SkeletonGraph {
    SkeletonGraph::from_edges(
        GraphKind::Polytope,
        len,
        (0..len).map(|i| (i, (i + 1) % len)),
    )
}

/// Graph of the `n`-cube: nodes are bit masks, edges flip one bit.
pub fn hypercube_graph(n: usize) -> SkeletonGraph {
    let nodes = 1usize << n;
    let edges = (0..nodes).flat_map(|u| (0..n).map(move |b| (u, u ^ (1 << b))));
    SkeletonGraph::from_edges(GraphKind::Polytope, nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::enumerate_vertices;
    use crate::instances;
    use crate::lb::SubdivisionFan;
    use crate::poly::find_initial_vertex;

    fn graph_of(p: &HPolyhedron) -> SkeletonGraph {
        let v0 = find_initial_vertex(p, &vec![Rational::zero(); p.dim()]).unwrap();
        build_polytope_graph(p, &enumerate_vertices(p, &v0).unwrap())
    }

    #[test]
    fn square_and_cube() {
        let g = graph_of(&instances::unit_square());
        assert_eq!(g.edge_count(), 4);
        assert_eq!(graph_diameter(&g).unwrap(), 2);
        let g = graph_of(&instances::cube(3));
        assert_eq!(g.edge_count(), 12);
        assert!((0..8).all(|v| g.degree(v) == 3));
        assert_eq!(graph_diameter(&g).unwrap(), 3);
    }

    #[test]
    fn pyramid_degrees() {
        let p = instances::square_pyramid();
        let g = graph_of(&p);
        let v0 = find_initial_vertex(&p, &[Rational::zero(), Rational::zero(), Rational::zero()])
            .unwrap();
        let r = enumerate_vertices(&p, &v0).unwrap();
        let apex = r.vertices.iter().position(|v| !v.simple).unwrap();
        assert_eq!(g.degree(apex), 4);
        for v in 0..5 {
            if v != apex {
                assert_eq!(g.degree(v), 3);
            }
        }
        let tight: Vec<Vec<usize>> = r.vertices.iter().map(|v| v.tight.clone()).collect();
        assert_eq!(polytope_graph_oracle(&p, &tight), g);
    }

    #[test]
    fn reference_diameters() {
        assert_eq!(graph_diameter(&cycle_graph(4)).unwrap(), 2);
        for n in 1..=5 {
            assert_eq!(graph_diameter(&hypercube_graph(n)).unwrap(), n);
        }
        let split = SkeletonGraph::from_edges(GraphKind::Fan, 3, [(0, 1)]);
        assert_eq!(graph_diameter(&split), Err(Error::DisconnectedGraph));
    }

    #[test]
    fn base_fan_graph_is_complete() {
        for n in 2..=4 {
            let f = SubdivisionFan::base(n);
            let g = build_fan_graph(&f.cone_bases(), &f.ray_matrix());
            assert_eq!(g.edge_count(), (n + 1) * n / 2);
            assert_eq!(graph_diameter(&g).unwrap(), 1);
        }
    }

    #[test]
    fn same_side_cones_are_not_adjacent() {
        // Both cones lie above the shared ray (1, 0).
        let gens = RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[1, 1]]);
        let g = build_fan_graph(&[Basis::new(vec![0, 1]), Basis::new(vec![0, 2])], &gens);
        assert_eq!(g.edge_count(), 0);
        let gens = RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[0, -1]]);
        let g = build_fan_graph(&[Basis::new(vec![0, 1]), Basis::new(vec![0, 2])], &gens);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn planar_fan_is_a_cycle() {
        // In the plane the subdivided fan is a cycle of 3 * 2^k cones.
        for k in 0..=4 {
            let f = SubdivisionFan::generate(2, k);
            let g = build_fan_graph(&f.cone_bases(), &f.ray_matrix());
            assert!((0..g.len()).all(|v| g.degree(v) == 2));
            assert_eq!(graph_diameter(&g).unwrap(), 3 * (1 << k) / 2);
        }
    }
}
