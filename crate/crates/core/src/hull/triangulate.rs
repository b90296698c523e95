//! Placing triangulations of polyhedral cones.
//!
//! Generators are inserted one at a time. A generator outside the span of
//! the current cone is joined to every simplex (the dimension goes up);
//! one inside the span is joined to every boundary facet it sees, i.e. every
//! facet whose opposite generator gets a negative coefficient when the new
//! vector is written in the simplex's own coordinates.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rank_of, solve_linear, Rational, RationalMatrix};
use crate::poly::{Basis, HPolyhedron};

/// Triangulates `cone(rows)` by placing in the given order. Returns the
/// simplices as lists of positions into `rows`; each has exactly
/// `rank(rows)` entries.
pub fn placing_triangulation(rows: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut spanning: Vec<usize> = Vec::new();
    for (g, vector) in rows.iter().enumerate() {
        if vector.iter().all(Zero::is_zero) {
            continue;
        }
        if simplices.is_empty() {
            simplices.push(vec![g]);
            spanning.push(g);
            continue;
        }
        let mut probe: Vec<Vec<Rational>> = spanning.iter().map(|&i| rows[i].clone()).collect();
        probe.push(vector.clone());
        let lifts_dimension =
            rank_of(&RationalMatrix::from_rows(probe).expect("equal lengths")) > spanning.len();
        if lifts_dimension {
            for s in &mut simplices {
                s.push(g);
            }
            spanning.push(g);
            continue;
        }
        let boundary = boundary_facets(&simplices);
        let mut added = Vec::new();
        for simplex in &simplices {
            let coords = coordinates_in(rows, simplex, vector);
            for (pos, lambda) in coords.iter().enumerate() {
                if !lambda.is_negative() {
                    continue;
                }
                let facet = facet_key(simplex, pos);
                if boundary.get(&facet) == Some(&1) {
                    let mut new_simplex: Vec<usize> = simplex
                        .iter()
                        .copied()
                        .filter(|&v| v != simplex[pos])
                        .collect();
                    new_simplex.push(g);
                    added.push(new_simplex);
                }
            }
        }
        simplices.extend(added);
    }
    simplices
}

fn facet_key(simplex: &[usize], drop: usize) -> Vec<usize> {
    let mut f: Vec<usize> = simplex
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != drop)
        .map(|(_, &v)| v)
        .collect();
    f.sort_unstable();
    f
}

fn boundary_facets(simplices: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    let mut count = HashMap::new();
    for s in simplices {
        for pos in 0..s.len() {
            *count.entry(facet_key(s, pos)).or_insert(0) += 1;
        }
    }
    count
}

/// Coefficients of `v` in the basis formed by `rows[simplex]` of its own
/// span (`v` must lie in that span).
fn coordinates_in(rows: &[Vec<Rational>], simplex: &[usize], v: &[Rational]) -> Vec<Rational> {
    let basis = RationalMatrix::from_rows(simplex.iter().map(|&i| rows[i].clone()).collect())
        .expect("equal lengths");
    let gram = basis.mul(&basis.transpose()).expect("shape");
    let rhs = basis.mul_vec(v);
    solve_linear(&gram, &rhs).expect("simplex generators are independent")
}

/// Placing triangulation of the normal cone spanned by the rows `tight`
/// (inserted in ascending row order), returned as bases of `p`.
pub fn triangulate_normal_cone(p: &HPolyhedron, tight: &[usize]) -> Result<Vec<Basis>> {
    let mut order = tight.to_vec();
    order.sort_unstable();
    let rows: Vec<Vec<Rational>> = order.iter().map(|&i| p.row(i).to_vec()).collect();
    let n = p.dim();
    let rank = rank_of(&p.a().select_rows(&order));
    if rank < n {
        return Err(Error::RankDeficient { rank, dim: n });
    }
    if order.len() == n {
        return Ok(vec![Basis::new(order)]);
    }
    Ok(placing_triangulation(&rows)
        .into_iter()
        .map(|s| Basis::new(s.into_iter().map(|k| order[k]).collect()))
        .collect())
}
