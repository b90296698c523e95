//! Exact primal simplex on inequality-form programs `max c.x s.t. A x <= b`.
//!
//! The iterate is always a feasible basis of row indices. Bland's rule picks
//! the lowest leaving row among improving directions and the lowest entering
//! row among ratio-test ties, which rules out cycling on degenerate vertices.

use num_traits::{Signed, Zero};

use crate::exact::{basis_inverse_update, dot, Rational, RationalMatrix};
use crate::poly::{independent_subset, HPolyhedron, VertexRecord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
        /// Basis rows, position-aligned with the final inverse.
        basis: Vec<usize>,
    },
    /// The objective grows without bound along `direction` from `point`.
    Unbounded {
        point: Vec<Rational>,
        direction: Vec<Rational>,
    },
}

pub fn maximize_from_vertex(p: &HPolyhedron, c: &[Rational], start: &VertexRecord) -> LpOutcome {
    let n = p.dim();
    assert_eq!(c.len(), n, "objective length mismatch");
    let mut basis = independent_subset(p.a(), &start.tight);
    assert_eq!(basis.len(), n, "start vertex has tight rank < n");
    let mut inv = crate::exact::inverse(&p.a().select_rows(&basis)).expect("independent rows");
    let mut x = start.point.clone();

    loop {
        // Multipliers y = c^T inv; y_q < 0 means leaving row basis[q] improves.
        let y: Vec<Rational> = (0..n).map(|q| column_dot(&inv, q, c)).collect();
        let leaving = (0..n)
            .filter(|&q| y[q].is_negative())
            .min_by_key(|&q| basis[q]);
        let Some(q) = leaving else {
            let value = dot(c, &x);
            return LpOutcome::Optimal {
                value,
                point: x,
                basis,
            };
        };
        let direction: Vec<Rational> = (0..n).map(|k| -inv[(k, q)].clone()).collect();
        let mut best: Option<(Rational, usize)> = None;
        for i in 0..p.num_rows() {
            if basis.contains(&i) {
                continue;
            }
            let rate = dot(p.row(i), &direction);
            if !rate.is_positive() {
                continue;
            }
            let t = p.slack(i, &x) / rate;
            let better = match &best {
                None => true,
                Some((bt, bi)) => t < *bt || (t == *bt && i < *bi),
            };
            if better {
                best = Some((t, i));
            }
        }
        let Some((t, entering)) = best else {
            return LpOutcome::Unbounded {
                point: x,
                direction,
            };
        };
        if !t.is_zero() {
            for (xi, di) in x.iter_mut().zip(&direction) {
                *xi += &t * di;
            }
        }
        inv = basis_inverse_update(&inv, q, p.row(entering))
            .expect("entering row has a positive rate along the edge");
        basis[q] = entering;
    }
}

fn column_dot(inv: &RationalMatrix, col: usize, c: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (k, ck) in c.iter().enumerate() {
        if !ck.is_zero() {
            acc += ck * &inv[(k, col)];
        }
    }
    acc
}
