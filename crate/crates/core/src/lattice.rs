//! Lattice points of bounded polyhedra by exhaustive box scan, the cost
//! model for triangulation-based counting, and the knapsack inequality used
//! in its analysis.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::delta::FanStats;
use crate::error::{Error, Result};
use crate::exact::{integerize, to_f64, Rational};
use crate::exec::Execution;
use crate::hull::EnumerationResult;
use crate::poly::HPolyhedron;

/// Default cap on the number of box cells a scan may visit.
pub const DEFAULT_CELL_BUDGET: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub count: BigInt,
    /// Inclusive integer range scanned per coordinate.
    pub bounds: Vec<(BigInt, BigInt)>,
    pub cells_scanned: u128,
}

/// `A x <= b` restricted to integer `x`: rows scaled to integers, right-hand
/// sides rounded down.
struct IntegerSystem {
    rows: Vec<Vec<i128>>,
    rhs: Vec<i128>,
}

impl IntegerSystem {
    fn new(p: &HPolyhedron) -> Option<Self> {
        let mut rows = Vec::with_capacity(p.num_rows());
        let mut rhs = Vec::with_capacity(p.num_rows());
        for (i, row) in p.a().row_iter().enumerate() {
            let (ints, scale) = integerize(row);
            rows.push(
                ints.iter()
                    .map(|v| v.to_i128())
                    .collect::<Option<Vec<_>>>()?,
            );
            let b = (&p.b()[i] * Rational::from_integer(scale))
                .floor()
                .to_integer();
            rhs.push(b.to_i128()?);
        }
        Some(IntegerSystem { rows, rhs })
    }

    fn contains(&self, x: &[i128]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(r, &b)| {
            let mut acc: i128 = 0;
            for (a, v) in r.iter().zip(x) {
                acc += a * v;
            }
            acc <= b
        })
    }
}

/// Integer bounding box of the vertices: floor of the minimum to ceiling of
/// the maximum in every coordinate.
pub fn vertex_box(result: &EnumerationResult, n: usize) -> Vec<(BigInt, BigInt)> {
    (0..n)
        .map(|j| {
            let coords = result.vertices.iter().map(|v| &v.point[j]);
            let lo = coords.clone().min().expect("at least one vertex");
            let hi = coords.max().expect("at least one vertex");
            (lo.floor().to_integer(), hi.ceil().to_integer())
        })
        .collect()
}

pub fn box_cells(bounds: &[(BigInt, BigInt)]) -> u128 {
    bounds.iter().fold(1u128, |acc, (lo, hi)| {
        let width = (hi - lo + BigInt::one()).to_u128().unwrap_or(u128::MAX);
        acc.saturating_mul(width)
    })
}

/// `|P ∩ Z^n|` by testing every integer point of the vertex bounding box.
pub fn count_integer_points_bruteforce(
    p: &HPolyhedron,
    result: &EnumerationResult,
    budget: u128,
    exec: Execution,
) -> Result<CountReport> {
    if !result.is_bounded() {
        return Err(Error::Unbounded);
    }
    let n = p.dim();
    let bounds = vertex_box(result, n);
    let cells = box_cells(&bounds);
    if cells > budget {
        return Err(Error::BudgetExceeded {
            needed: cells,
            budget,
        });
    }
    let system = IntegerSystem::new(p).ok_or_else(|| {
        Error::PreconditionViolated("coefficients too large for the box scan".into())
    })?;
    let small: Vec<(i128, i128)> = bounds
        .iter()
        .map(|(lo, hi)| {
            (
                lo.to_i128().expect("within budget"),
                hi.to_i128().expect("within budget"),
            )
        })
        .collect();
    let (lo0, hi0) = small[0];
    let outer = (hi0 - lo0 + 1) as usize;
    let per_slice = exec.map_range(outer, |offset| {
        let mut x: Vec<i128> = small.iter().map(|&(lo, _)| lo).collect();
        x[0] = lo0 + offset as i128;
        let mut count: u64 = 0;
        loop {
            if system.contains(&x) {
                count += 1;
            }
            // Odometer over coordinates 1..n.
            let mut j = n;
            loop {
                j -= 1;
                if j == 0 {
                    return count;
                }
                if x[j] < small[j].1 {
                    x[j] += 1;
                    break;
                }
                x[j] = small[j].0;
            }
        }
    });
    let count: BigInt = per_slice.into_iter().map(BigInt::from).sum();
    Ok(CountReport {
        count,
        bounds,
        cells_scanned: cells,
    })
}

/// Cost figures for counting lattice points through a triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct CostEstimate {
    /// `n^4 * Δ * |T| * Σ |det A_B|^2`.
    pub primary_exact: Rational,
    pub primary: f64,
    /// The same with `n^3` in place of `n^4`.
    pub refined_exact: Rational,
    pub refined: f64,
    /// `n^n * Δ^4 / Δ_avg`.
    pub envelope_exact: Rational,
    pub envelope: f64,
}

pub fn estimate_counting_cost(stats: &FanStats) -> CostEstimate {
    let n = stats.dim();
    let nq = Rational::from_integer(BigInt::from(n));
    let squares: Rational = stats.cone_dets.iter().map(|d| d * d).sum();
    let common = &stats.delta * Rational::from_integer(BigInt::from(stats.cone_count)) * squares;
    let n3 = &nq * &nq * &nq;
    let refined_exact = &n3 * &common;
    let primary_exact = &nq * &refined_exact;
    let d2 = &stats.delta * &stats.delta;
    let envelope_exact =
        Rational::from_integer(BigInt::from(n).pow(n as u32)) * &d2 * &d2 / &stats.delta_avg;
    CostEstimate {
        primary: to_f64(&primary_exact),
        refined: to_f64(&refined_exact),
        envelope: to_f64(&envelope_exact),
        primary_exact,
        refined_exact,
        envelope_exact,
    }
}

/// Convex nondecreasing functions on `[0, inf)` with `f(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvexFn {
    Square,
    Cube,
    /// `max(0, t - c)` for `c >= 0`.
    Hinge(Rational),
}

impl ConvexFn {
    pub fn eval(&self, t: &Rational) -> Rational {
        match self {
            ConvexFn::Square => t * t,
            ConvexFn::Cube => t * t * t,
            ConvexFn::Hinge(c) => {
                let d = t - c;
                if d.is_positive() {
                    d
                } else {
                    Rational::zero()
                }
            }
        }
    }
}

/// For `0 <= x_i <= alpha` with `Σ x_i <= beta`, checks
/// `Σ f(x_i) <= floor(beta / alpha + 1) * f(alpha)`.
pub fn knapsack_bound_check(
    x: &[Rational],
    alpha: &Rational,
    beta: &Rational,
    f: impl Fn(&Rational) -> Rational,
) -> Result<bool> {
    if !alpha.is_positive() || !beta.is_positive() {
        return Err(Error::PreconditionViolated(
            "alpha and beta must be positive".into(),
        ));
    }
    if x.iter().any(|v| v.is_negative() || v > alpha) {
        return Err(Error::PreconditionViolated(
            "entries must lie in [0, alpha]".into(),
        ));
    }
    let total: Rational = x.iter().sum();
    if &total > beta {
        return Err(Error::PreconditionViolated(
            "entries must sum to at most beta".into(),
        ));
    }
    let lhs: Rational = x.iter().map(&f).sum();
    let copies = (beta / alpha + Rational::one()).floor();
    Ok(lhs <= copies * f(alpha))
}
