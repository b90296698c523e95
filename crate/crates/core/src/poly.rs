//! H-polyhedra `{x : A x <= b}`, bases, vertices and feasibility.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    dot, format_rational, inverse, rank_of, solve_linear, Rational, RationalMatrix,
};
use crate::lp;

/// A pointed polyhedron given by an exact constraint system.
#[derive(Clone, PartialEq, Eq)]
pub struct HPolyhedron {
    a: RationalMatrix,
    b: Vec<Rational>,
}

impl HPolyhedron {
    /// Validates shape, pointedness (`rank A = n`) and that no two rows
    /// describe the same half-space.
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self> {
        let p = Self::new_unchecked(a, b)?;
        if p.num_rows() < p.dim() {
            return Err(Error::NotPointed {
                rank: p.num_rows(),
                dim: p.dim(),
            });
        }
        let rank = rank_of(&p.a);
        if rank < p.dim() {
            return Err(Error::NotPointed { rank, dim: p.dim() });
        }
        if let Some((i, j)) = p.duplicate_rows() {
            return Err(Error::DimensionMismatch(format!(
                "rows {i} and {j} describe the same half-space"
            )));
        }
        Ok(p)
    }

    /// Shape check only; used for auxiliary systems built internally.
    pub(crate) fn new_unchecked(a: RationalMatrix, b: Vec<Rational>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has {} entries",
                a.rows(),
                b.len()
            )));
        }
        if a.cols() == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        self.a.row(i)
    }

    /// `b_i - A_i x`.
    pub fn slack(&self, i: usize, x: &[Rational]) -> Rational {
        &self.b[i] - dot(self.a.row(i), x)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        (0..self.num_rows()).all(|i| !self.slack(i, x).is_negative())
    }

    /// First violated row, if any.
    pub fn violated_row(&self, x: &[Rational]) -> Option<usize> {
        (0..self.num_rows()).find(|&i| self.slack(i, x).is_negative())
    }

    /// The system with the given rows removed (order of the rest preserved).
    pub fn without_rows(&self, drop: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.num_rows()).filter(|i| !drop.contains(i)).collect();
        Self::new_unchecked(
            self.a.select_rows(&keep),
            keep.iter().map(|&i| self.b[i].clone()).collect(),
        )
    }

    /// Every row scaled by the same positive factor; leaves the feasible set
    /// fixed and multiplies every `n x n` minor by `factor^n`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(factor.is_positive(), "scale factor must be positive");
        Self {
            a: self.a.scaled(factor),
            b: self.b.iter().map(|v| v * factor).collect(),
        }
    }

    fn duplicate_rows(&self) -> Option<(usize, usize)> {
        let normalized: Vec<Vec<Rational>> = (0..self.num_rows())
            .map(|i| {
                let row = self.a.row(i);
                let lead = row.iter().find(|v| !v.is_zero()).map(|v| v.abs());
                match lead {
                    Some(s) => row.iter().chain([&self.b[i]]).map(|v| v / &s).collect(),
                    None => row.iter().chain([&self.b[i]]).cloned().collect(),
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..normalized.len()).collect();
        order.sort_by(|&x, &y| normalized[x].cmp(&normalized[y]).then(x.cmp(&y)));
        order
            .windows(2)
            .find(|w| normalized[w[0]] == normalized[w[1]])
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

impl fmt::Debug for HPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HPolyhedron")
            .field("a", &self.a)
            .field("b", &self.b.iter().map(format_rational).collect::<Vec<_>>())
            .finish()
    }
}

/// `n` row indices in strictly increasing order. Doubles as a simplicial cone
/// of the normal fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Basis(Vec<usize>);

impl Basis {
    /// Sorts the indices; panics on repeated indices.
    pub fn new(mut rows: Vec<usize>) -> Self {
        rows.sort_unstable();
        assert!(
            rows.windows(2).all(|w| w[0] < w[1]),
            "basis has repeated row indices"
        );
        Basis(rows)
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.0.binary_search(&row).is_ok()
    }

    /// Position of `row` inside the sorted index list.
    pub fn position(&self, row: usize) -> Option<usize> {
        self.0.binary_search(&row).ok()
    }

    /// The basis with `leaving` swapped for `entering`.
    pub fn exchange(&self, leaving: usize, entering: usize) -> Basis {
        Basis::new(
            self.0
                .iter()
                .map(|&r| if r == leaving { entering } else { r })
                .collect(),
        )
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A vertex with its full active set; degenerate vertices have more than
/// `n` tight rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub point: Vec<Rational>,
    pub tight: Vec<usize>,
    pub simple: bool,
}

impl VertexRecord {
    pub fn from_point(p: &HPolyhedron, point: Vec<Rational>) -> Result<Self> {
        let tight = tight_set(p, &point)?;
        let rank = rank_of(&p.a().select_rows(&tight));
        if rank < p.dim() {
            return Err(Error::NotAVertex { rank, dim: p.dim() });
        }
        Ok(Self {
            simple: tight.len() == p.dim(),
            point,
            tight,
        })
    }
}

pub fn basis_matrix(p: &HPolyhedron, basis: &Basis) -> RationalMatrix {
    p.a().select_rows(basis.rows())
}

/// Solution of `A_B x = b_B`.
pub fn basis_vertex(p: &HPolyhedron, basis: &Basis) -> Result<Vec<Rational>> {
    if basis.len() != p.dim() {
        return Err(Error::SingularBasis(basis.rows().to_vec()));
    }
    let rhs: Vec<Rational> = basis.rows().iter().map(|&i| p.b()[i].clone()).collect();
    solve_linear(&basis_matrix(p, basis), &rhs).map_err(|e| match e {
        Error::SingularMatrix => Error::SingularBasis(basis.rows().to_vec()),
        other => other,
    })
}

pub fn basis_inverse(p: &HPolyhedron, basis: &Basis) -> Result<RationalMatrix> {
    inverse(&basis_matrix(p, basis)).map_err(|_| Error::SingularBasis(basis.rows().to_vec()))
}

pub fn is_feasible_basis(p: &HPolyhedron, basis: &Basis) -> bool {
    basis_vertex(p, basis).is_ok_and(|x| p.contains(&x))
}

/// Rows with `A_i x = b_i`; errors if `x` violates any row.
pub fn tight_set(p: &HPolyhedron, x: &[Rational]) -> Result<Vec<usize>> {
    let mut tight = Vec::new();
    for i in 0..p.num_rows() {
        let s = p.slack(i, x);
        if s.is_negative() {
            return Err(Error::InfeasiblePoint { row: i });
        }
        if s.is_zero() {
            tight.push(i);
        }
    }
    Ok(tight)
}

/// Indices of a maximal linearly independent subset of `rows`, greedily in
/// the given order.
pub(crate) fn independent_subset(a: &RationalMatrix, rows: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for &r in rows {
        if chosen.len() == a.cols() {
            break;
        }
        chosen.push(r);
        if rank_of(&a.select_rows(&chosen)) < chosen.len() {
            chosen.pop();
        }
    }
    chosen
}

/// Component of `v` orthogonal to the span of the given (independent) rows.
fn project_out(a: &RationalMatrix, independent: &[usize], v: &[Rational]) -> Vec<Rational> {
    if independent.is_empty() {
        return v.to_vec();
    }
    let r = a.select_rows(independent);
    let gram = r.mul(&r.transpose()).expect("gram shape");
    let rhs = r.mul_vec(v);
    let coeffs = solve_linear(&gram, &rhs).expect("rows are independent");
    let mut out = v.to_vec();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(r.row(k)) {
            *o -= c * x;
        }
    }
    out
}

/// Ray casting from a feasible point to a vertex.
///
/// Each round takes the lowest-index standard basis vector not in the span
/// of the current tight rows, projects it orthogonally onto their null space
/// and walks to the farthest feasible point along it (or along its negation
/// when the forward ray never leaves the polyhedron).
pub fn find_initial_vertex(p: &HPolyhedron, x0: &[Rational]) -> Result<VertexRecord> {
    let n = p.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "start point has {} coordinates, expected {n}",
            x0.len()
        )));
    }
    let mut x = x0.to_vec();
    loop {
        let tight = tight_set(p, &x)?;
        let basis_rows = independent_subset(p.a(), &tight);
        if basis_rows.len() == n {
            return VertexRecord::from_point(p, x);
        }
        let direction = (0..n)
            .map(|j| {
                let mut e = vec![Rational::zero(); n];
                e[j] = Rational::from_integer(1.into());
                project_out(p.a(), &basis_rows, &e)
            })
            .find(|d| d.iter().any(|v| !v.is_zero()))
            .expect("rank < n leaves some unit vector outside the row span");
        let step = |d: &[Rational]| -> Option<Rational> {
            (0..p.num_rows())
                .filter_map(|i| {
                    let rate = dot(p.row(i), d);
                    rate.is_positive().then(|| p.slack(i, &x) / rate)
                })
                .min()
        };
        let negated: Vec<Rational> = direction.iter().map(|v| -v).collect();
        let (d, t) = match step(&direction) {
            Some(t) => (direction, t),
            None => match step(&negated) {
                Some(t) => (negated, t),
                None => return Err(Error::UnboundedLine),
            },
        };
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += &t * di;
        }
    }
}

/// Outcome of the feasibility phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

/// Finds an exact feasible point by minimising an auxiliary violation
/// variable `t` over `{(x, t) : A x - t <= b, t >= 0}` with the exact simplex
/// method under Bland's rule.
pub fn phase_one(p: &HPolyhedron) -> Feasibility {
    let n = p.dim();
    let m = p.num_rows();
    let one = Rational::from_integer(1.into());
    let mut rows = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut r = p.row(i).to_vec();
        r.push(-one.clone());
        rows.push(r);
    }
    let mut guard = vec![Rational::zero(); n + 1];
    guard[n] = -one.clone();
    rows.push(guard);
    let mut rhs = p.b().to_vec();
    rhs.push(Rational::zero());
    let aux =
        HPolyhedron::new_unchecked(RationalMatrix::from_rows(rows).expect("rectangular"), rhs)
            .expect("shape");

    let worst = p.b().iter().min().cloned().unwrap_or_else(Rational::zero);
    let t0 = if worst.is_negative() {
        -worst
    } else {
        Rational::zero()
    };
    let mut start = vec![Rational::zero(); n];
    start.push(t0);
    let vertex = find_initial_vertex(&aux, &start).expect("auxiliary system is pointed");
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = -one;
    match lp::maximize_from_vertex(&aux, &objective, &vertex) {
        lp::LpOutcome::Optimal { point, .. } => {
            if point[n].is_zero() {
                Feasibility::Feasible(point[..n].to_vec())
            } else {
                Feasibility::Infeasible
            }
        }
        lp::LpOutcome::Unbounded { .. } => unreachable!("t >= 0 bounds the auxiliary objective"),
    }
}

fn feasible_point(p: &HPolyhedron) -> Option<Vec<Rational>> {
    match phase_one(p) {
        Feasibility::Feasible(x) => Some(x),
        Feasibility::Infeasible => None,
    }
}

/// Rows whose individual removal leaves the feasible set unchanged, decided
/// by maximising `A_i x` over the remaining rows.
pub fn redundancy_scan(p: &HPolyhedron) -> Vec<usize> {
    let full_point = feasible_point(p);
    (0..p.num_rows())
        .filter(|&i| {
            let rest = p.without_rows(&[i]).expect("shape");
            match &full_point {
                // Empty set: row i is redundant iff the rest is empty too.
                None => feasible_point(&rest).is_none(),
                Some(x) => row_is_redundant(p, &rest, i, x),
            }
        })
        .collect()
}

fn row_is_redundant(p: &HPolyhedron, rest: &HPolyhedron, row: usize, x: &[Rational]) -> bool {
    if rank_of(rest.a()) < rest.dim() {
        // The rest contains a line along which A_row x is unbounded.
        return false;
    }
    let vertex = find_initial_vertex(rest, x).expect("rest is pointed and x is feasible");
    match lp::maximize_from_vertex(rest, p.row(row), &vertex) {
        lp::LpOutcome::Optimal { value, .. } => value <= p.b()[row],
        lp::LpOutcome::Unbounded { .. } => false,
    }
}

/// Removes redundant rows one at a time, rescanning after each removal so
/// that parallel copies keep one representative. Returns the reduced system
/// and the removed original indices.
pub fn strip_redundant(p: &HPolyhedron) -> (HPolyhedron, Vec<usize>) {
    let mut current = p.clone();
    let mut original: Vec<usize> = (0..p.num_rows()).collect();
    let mut removed = Vec::new();
    while let Some(&r) = redundancy_scan(&current).last() {
        removed.push(original.remove(r));
        current = current.without_rows(&[r]).expect("shape");
    }
    removed.sort_unstable();
    (current, removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ints, ratio};

    pub(crate) fn unit_square() -> HPolyhedron {
        // x <= 1, y <= 1, -x <= 0, -y <= 0
        HPolyhedron::new(
            RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]),
            ints(&[1, 1, 0, 0]),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let sq = unit_square();
        assert_eq!((sq.num_rows(), sq.dim()), (4, 2));
        let flat = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[1, 0], &[-1, 0]]),
            ints(&[1, 0]),
        );
        assert!(matches!(flat, Err(Error::NotPointed { rank: 1, dim: 2 })));
        let dup = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[2, 0]]),
            ints(&[1, 1, 2]),
        );
        assert!(matches!(dup, Err(Error::DimensionMismatch(_))));
        let shape = HPolyhedron::new(RationalMatrix::from_i64(&[&[1, 0], &[0, 1]]), ints(&[1]));
        assert!(matches!(shape, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn basis_vertex_examples() {
        let sq = unit_square();
        assert_eq!(
            basis_vertex(&sq, &Basis::new(vec![0, 1])).unwrap(),
            ints(&[1, 1])
        );
        assert_eq!(
            basis_vertex(&sq, &Basis::new(vec![0, 3])).unwrap(),
            ints(&[1, 0])
        );
        assert!(matches!(
            basis_vertex(&sq, &Basis::new(vec![0, 2])),
            Err(Error::SingularBasis(_))
        ));
    }

    #[test]
    fn feasible_basis_examples() {
        let sq = unit_square();
        assert!(is_feasible_basis(&sq, &Basis::new(vec![0, 1])));
        assert!(!is_feasible_basis(&sq, &Basis::new(vec![0, 2])));
        assert!(is_feasible_basis(&sq, &Basis::new(vec![2, 3])));
    }

    #[test]
    fn tight_set_examples() {
        let sq = unit_square();
        assert_eq!(tight_set(&sq, &ints(&[1, 1])).unwrap(), vec![0, 1]);
        assert!(tight_set(&sq, &[ratio(1, 2), ratio(1, 2)])
            .unwrap()
            .is_empty());
        assert_eq!(
            tight_set(&sq, &ints(&[2, 0])),
            Err(Error::InfeasiblePoint { row: 0 })
        );
    }

    #[test]
    fn pyramid_apex_has_four_tight_rows() {
        let p = crate::instances::square_pyramid();
        let apex = vec![int(0), int(0), int(1)];
        assert_eq!(tight_set(&p, &apex).unwrap().len(), 4);
    }

    #[test]
    fn ray_casting_examples() {
        let sq = unit_square();
        let v = find_initial_vertex(&sq, &[ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(v.point, ints(&[1, 1]));
        assert_eq!(v.tight, vec![0, 1]);
        assert!(v.simple);
        let corner = find_initial_vertex(&sq, &ints(&[0, 1])).unwrap();
        assert_eq!(corner.point, ints(&[0, 1]));
        let orthant = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[-1, 0], &[0, -1]]),
            ints(&[0, 0]),
        )
        .unwrap();
        assert_eq!(
            find_initial_vertex(&orthant, &ints(&[1, 1])).unwrap().point,
            ints(&[0, 0])
        );
    }

    #[test]
    fn phase_one_examples() {
        let sq = unit_square();
        match phase_one(&sq) {
            Feasibility::Feasible(x) => assert!(sq.contains(&x)),
            Feasibility::Infeasible => panic!("square is feasible"),
        }
        let empty =
            HPolyhedron::new_unchecked(RationalMatrix::from_i64(&[&[1], &[-1]]), ints(&[0, -1]))
                .unwrap();
        assert_eq!(phase_one(&empty), Feasibility::Infeasible);
        // Feasible set away from the origin.
        let shifted = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]),
            ints(&[7, 9, -5, -8]),
        )
        .unwrap();
        match phase_one(&shifted) {
            Feasibility::Feasible(x) => assert!(shifted.contains(&x)),
            Feasibility::Infeasible => panic!("box [5,7]x[8,9] is feasible"),
        }
    }

    #[test]
    fn redundancy_examples() {
        assert!(redundancy_scan(&unit_square()).is_empty());
        let with_extra = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1], &[1, 0]]),
            ints(&[1, 1, 0, 0, 2]),
        )
        .unwrap();
        assert_eq!(redundancy_scan(&with_extra), vec![4]);
        // Triangle x >= 0, y >= 0, x + y <= 2 with the hypotenuse shifted out.
        let triangle = HPolyhedron::new(
            RationalMatrix::from_i64(&[&[-1, 0], &[0, -1], &[1, 1], &[1, 1]]),
            ints(&[0, 0, 2, 3]),
        )
        .unwrap();
        assert_eq!(redundancy_scan(&triangle), vec![3]);
        let (stripped, removed) = strip_redundant(&triangle);
        assert_eq!(removed, vec![3]);
        assert_eq!(stripped.num_rows(), 3);
    }
}
