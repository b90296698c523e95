//! Subdeterminant statistics of a constraint matrix and the bounds they
//! control.
//!
//! `Δ(A)` is the largest `|det A_B|` over all `n`-row subsets `B`. For a
//! triangulation `T` of the normal fan we also report the average and the
//! minimum of `|det A_B|` over the cones of `T`, and `Σ|det A_B| / n!`, the
//! volume of the union of the simplices `conv(0, rows of A_B)`.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    adjugate_column, det_integer, dot, format_rational, integerize, inverse, norm_squared, rank_of,
    to_f64, Rational, RationalMatrix,
};
use crate::exec::Execution;
use crate::hull::{binomial, for_each_combination_with_first, EnumerationResult};
use crate::poly::{Basis, HPolyhedron};

/// Default cap on the number of minors a scan may evaluate.
pub const DEFAULT_MINOR_BUDGET: u128 = 5_000_000;

/// Relative slack applied to the floating-point side of every bound check.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DeltaMethod {
    /// Exact determinant of every `n`-subset.
    #[default]
    Exhaustive,
    /// Depth-first search over subsets in index order, pruned with a
    /// Gram-Schmidt volume bound and confirmed exactly at the leaves.
    BranchAndBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaSearch {
    pub budget: u128,
    pub method: DeltaMethod,
    pub exec: Execution,
}

impl Default for DeltaSearch {
    fn default() -> Self {
        DeltaSearch {
            budget: DEFAULT_MINOR_BUDGET,
            method: DeltaMethod::default(),
            exec: Execution::default(),
        }
    }
}

impl DeltaSearch {
    pub fn branch_and_bound(budget: u128) -> Self {
        DeltaSearch {
            budget,
            method: DeltaMethod::BranchAndBound,
            exec: Execution::default(),
        }
    }
}

/// Rows of `A` scaled to integers, with their scales, for exact minors.
struct ScaledRows {
    rows: Vec<Vec<BigInt>>,
    scales: Vec<BigInt>,
}

impl ScaledRows {
    fn new(a: &RationalMatrix) -> Self {
        let (rows, scales) = a.row_iter().map(integerize).unzip();
        ScaledRows { rows, scales }
    }

    fn abs_det(&self, subset: &[usize]) -> Rational {
        let sub: Vec<Vec<BigInt>> = subset.iter().map(|&i| self.rows[i].clone()).collect();
        let det = det_integer(sub);
        if det.is_zero() {
            return Rational::zero();
        }
        let scale = subset
            .iter()
            .fold(BigInt::one(), |acc, &i| acc * &self.scales[i]);
        Rational::new(det.abs(), scale)
    }
}

/// Keeps the larger value; among equal values the lexicographically smaller
/// subset.
fn better(candidate: &(Rational, Vec<usize>), incumbent: &Option<(Rational, Vec<usize>)>) -> bool {
    match incumbent {
        None => true,
        Some((v, w)) => match candidate.0.cmp(v) {
            Ordering::Greater => true,
            Ordering::Equal => candidate.1 < *w,
            Ordering::Less => false,
        },
    }
}

fn merge(
    parts: impl IntoIterator<Item = Option<(Rational, Vec<usize>)>>,
) -> Option<(Rational, Vec<usize>)> {
    let mut best = None;
    for c in parts.into_iter().flatten() {
        if better(&c, &best) {
            best = Some(c);
        }
    }
    best
}

/// `Δ(A)` with a witness, using [`DeltaSearch::default`].
pub fn delta_max(a: &RationalMatrix) -> Result<(Rational, Basis)> {
    delta_max_with(a, &DeltaSearch::default())
}

/// `Δ(A)` and the lexicographically smallest row subset attaining it.
///
/// Fails with `BudgetExceeded` when `C(m, n)` exceeds the budget (for both
/// methods, so the contract does not depend on how well pruning works), and
/// with `RankDeficient` when `rank(A) < n`.
pub fn delta_max_with(a: &RationalMatrix, search: &DeltaSearch) -> Result<(Rational, Basis)> {
    let (m, n) = (a.rows(), a.cols());
    let rank = rank_of(a);
    if rank < n {
        return Err(Error::RankDeficient { rank, dim: n });
    }
    let needed = binomial(m, n);
    if needed > search.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: search.budget,
        });
    }
    let exact = ScaledRows::new(a);
    let best = match search.method {
        DeltaMethod::Exhaustive => exhaustive(&exact, m, n, search.exec),
        DeltaMethod::BranchAndBound => branch_and_bound(a, &exact, search.exec),
    };
    let (value, witness) = best.expect("rank n guarantees a nonsingular subset");
    Ok((value, Basis::new(witness)))
}

fn exhaustive(
    exact: &ScaledRows,
    m: usize,
    n: usize,
    exec: Execution,
) -> Option<(Rational, Vec<usize>)> {
    let parts = exec.map_range(m, |first| {
        let mut best = None;
        for_each_combination_with_first(m, n, first, |combo| {
            let c = (exact.abs_det(combo), combo.to_vec());
            if !c.0.is_zero() && better(&c, &best) {
                best = Some(c);
            }
        });
        best
    });
    merge(parts)
}

struct Search<'a> {
    rows: Vec<Vec<f64>>,
    exact: &'a ScaledRows,
    n: usize,
    /// Bits of the best exact value found so far (as `f64`), shared by all
    /// workers; only ever raised.
    floor: &'a AtomicU64,
}

impl Search<'_> {
    fn threshold(&self) -> f64 {
        f64::from_bits(self.floor.load(AtomicOrdering::Relaxed)) * (1.0 - BOUND_SLACK)
    }

    fn raise_floor(&self, value: f64) {
        self.floor
            .fetch_max(value.to_bits(), AtomicOrdering::Relaxed);
    }

    /// Explores all completions of `chosen` with indices `>= start`.
    /// `basis` is an orthonormal basis of the chosen rows' span and `volume`
    /// their Gram volume.
    fn descend(
        &self,
        chosen: &mut Vec<usize>,
        basis: &mut Vec<Vec<f64>>,
        volume: f64,
        start: usize,
        best: &mut Option<(Rational, Vec<usize>)>,
    ) {
        let m = self.rows.len();
        let remaining = self.n - chosen.len();
        if start + remaining > m {
            return;
        }
        let residuals: Vec<Vec<f64>> = (start..m).map(|j| residual(&self.rows[j], basis)).collect();
        let norms: Vec<f64> = residuals.iter().map(|r| norm(r)).collect();
        // tail[j] = product of the largest `remaining - 1` norms after j.
        let tail = top_products(&norms, remaining - 1);
        for (offset, j) in (start..=m - remaining).enumerate() {
            let bound = volume * norms[offset] * tail[offset];
            if bound < self.threshold() || norms[offset] == 0.0 {
                continue;
            }
            chosen.push(j);
            if remaining == 1 {
                let exact = self.exact.abs_det(chosen);
                let candidate = (exact, chosen.clone());
                if !candidate.0.is_zero() && better(&candidate, best) {
                    self.raise_floor(to_f64(&candidate.0));
                    *best = Some(candidate);
                }
            } else {
                let unit: Vec<f64> = residuals[offset]
                    .iter()
                    .map(|v| v / norms[offset])
                    .collect();
                basis.push(unit);
                self.descend(chosen, basis, volume * norms[offset], j + 1, best);
                basis.pop();
            }
            chosen.pop();
        }
    }
}

fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for q in basis {
        let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        for (ri, qi) in r.iter_mut().zip(q) {
            *ri -= c * qi;
        }
    }
    r
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// For each position `i`, the product of the `k` largest values strictly
/// after `i` (zero when fewer than `k` remain).
fn top_products(values: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut top: Vec<f64> = Vec::with_capacity(k + 1);
    for i in (0..values.len()).rev() {
        out[i] = if top.len() == k {
            top.iter().product()
        } else {
            0.0
        };
        if k > 0 {
            let pos = top.partition_point(|&t| t > values[i]);
            top.insert(pos, values[i]);
            top.truncate(k);
        }
    }
    out
}

fn branch_and_bound(
    a: &RationalMatrix,
    exact: &ScaledRows,
    exec: Execution,
) -> Option<(Rational, Vec<usize>)> {
    let rows = a.to_f64_rows();
    let m = rows.len();
    let n = a.cols();
    let seed = greedy_subset(&rows, n).map(|s| (exact.abs_det(&s), s));
    let floor = AtomicU64::new(0f64.to_bits());
    if let Some((v, _)) = &seed {
        floor.store(to_f64(v).to_bits(), AtomicOrdering::Relaxed);
    }
    let search = Search {
        rows,
        exact,
        n,
        floor: &floor,
    };
    let parts = exec.map_range(m, |first| {
        let mut best = None;
        let r = norm(&search.rows[first]);
        if r > 0.0 {
            let mut chosen = vec![first];
            let mut basis = vec![search.rows[first].iter().map(|v| v / r).collect()];
            if n == 1 {
                let c = (exact.abs_det(&chosen), chosen.clone());
                best = Some(c);
            } else {
                search.descend(&mut chosen, &mut basis, r, first + 1, &mut best);
            }
        }
        best
    });
    merge(parts.into_iter().chain(std::iter::once(seed)))
}

/// Rows picked greedily by largest residual; a cheap first incumbent.
fn greedy_subset(rows: &[Vec<f64>], n: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for _ in 0..n {
        let (j, r, nr) = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| !chosen.contains(j))
            .map(|(j, v)| {
                let r = residual(v, &basis);
                let nr = norm(&r);
                (j, r, nr)
            })
            .max_by(|x, y| x.2.total_cmp(&y.2))?;
        if nr == 0.0 {
            return None;
        }
        basis.push(r.iter().map(|v| v / nr).collect());
        chosen.push(j);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Subdeterminant statistics of `A` over one triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanStats {
    pub delta: Rational,
    pub witness: Basis,
    pub delta_avg: Rational,
    pub delta_min: Rational,
    pub cone_count: usize,
    pub fan_volume: Rational,
    /// `|det A_B|` for every cone, in triangulation order.
    pub cone_dets: Vec<Rational>,
}

impl FanStats {
    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    pub fn det_sum(&self) -> Rational {
        self.cone_dets.iter().sum()
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Cone determinants, `Δ_avg`, `Δ_min` and the fan volume of `cones`,
/// together with `Δ(A)` from [`delta_max_with`].
pub fn triangulation_stats(
    a: &RationalMatrix,
    cones: &[Basis],
    search: &DeltaSearch,
) -> Result<FanStats> {
    if cones.is_empty() {
        return Err(Error::PreconditionViolated(
            "triangulation has no cones".into(),
        ));
    }
    let exact = ScaledRows::new(a);
    let cone_dets: Vec<Rational> = search.exec.map_slice(cones, |c| exact.abs_det(c.rows()));
    if let Some(k) = cone_dets.iter().position(Zero::is_zero) {
        return Err(Error::SingularBasis(cones[k].rows().to_vec()));
    }
    let (delta, witness) = delta_max_with(a, search)?;
    let n = a.cols();
    let sum: Rational = cone_dets.iter().sum();
    let count = cone_dets.len();
    Ok(FanStats {
        delta,
        witness,
        delta_avg: &sum / Rational::from_integer(BigInt::from(count)),
        delta_min: cone_dets.iter().min().cloned().expect("nonempty"),
        cone_count: count,
        fan_volume: sum / Rational::from_integer(factorial(n)),
        cone_dets,
    })
}

/// Volume of the Euclidean unit ball in `R^n`, through
/// `V_n = 2 pi / n * V_{n-2}` from `V_0 = 1`, `V_1 = 2`.
pub fn unit_ball_volume(n: usize) -> f64 {
    assert!(n >= 1, "unit_ball_volume needs n >= 1");
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Outcome of one inequality check. Both sides are always reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub check: String,
    /// Exact left side when it is rational.
    pub lhs_exact: Option<String>,
    pub lhs: f64,
    pub rhs_exact: Option<String>,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundReport {
    fn float(check: &str, lhs_exact: Option<String>, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            check: check.into(),
            lhs_exact,
            lhs,
            rhs_exact: None,
            rhs,
            holds: lhs <= rhs * (1.0 + BOUND_SLACK),
        }
    }

    /// `Ok(self)` when the inequality holds, `BoundViolated` otherwise.
    pub fn ensure(self) -> Result<Self> {
        if self.holds {
            Ok(self)
        } else {
            Err(Error::BoundViolated {
                check: self.check,
                lhs: self.lhs_exact.unwrap_or_else(|| self.lhs.to_string()),
                rhs: self.rhs_exact.unwrap_or_else(|| self.rhs.to_string()),
            })
        }
    }
}

/// `n! * Δ / Δ_avg * vol(B^n)`.
pub fn vertex_bound_rhs(stats: &FanStats) -> f64 {
    let n = stats.dim();
    let ratio = to_f64(&(&stats.delta / &stats.delta_avg));
    to_f64(&Rational::from_integer(factorial(n))) * ratio * unit_ball_volume(n)
}

/// `|vertices| <= |cones| <= n! * Δ / Δ_avg * vol(B^n)`. The left inequality
/// is exact; the reported left side is the cone count.
pub fn check_vertex_bound(result: &EnumerationResult, stats: &FanStats) -> BoundReport {
    let cones = stats.cone_count;
    let mut report = BoundReport::float(
        "theorem-1",
        Some(format!(
            "{} vertices, {} cones",
            result.vertices.len(),
            cones
        )),
        cones as f64,
        vertex_bound_rhs(stats),
    );
    report.holds &= result.vertices.len() <= cones;
    report
}

/// Fan volume `<= Δ * vol(B^n)` and `|cones| <= n! * Δ / Δ_avg * vol(B^n)`.
pub fn check_fan_bound(stats: &FanStats) -> Vec<BoundReport> {
    let n = stats.dim();
    let volume = BoundReport::float(
        "fan-volume",
        Some(format_rational(&stats.fan_volume)),
        to_f64(&stats.fan_volume),
        to_f64(&stats.delta) * unit_ball_volume(n),
    );
    let count = BoundReport::float(
        "fan-cone-count",
        Some(stats.cone_count.to_string()),
        stats.cone_count as f64,
        vertex_bound_rhs(stats),
    );
    vec![volume, count]
}

/// `A * (A_B)^{-1}`.
pub fn totally_unimodular_transform(a: &RationalMatrix, basis: &Basis) -> Result<RationalMatrix> {
    let inv = inverse(&a.select_rows(basis.rows()))
        .map_err(|_| Error::SingularBasis(basis.rows().to_vec()))?;
    a.mul(&inv)
}

/// Number of square minors of an `m x n` matrix, of every order.
pub fn minor_count(m: usize, n: usize) -> u128 {
    (1..=m.min(n))
        .map(|k| binomial(m, k).saturating_mul(binomial(n, k)))
        .fold(0u128, u128::saturating_add)
}

/// Whether every square minor of `a` has absolute value at most 1.
pub fn verify_total_unimodularity(
    a: &RationalMatrix,
    budget: u128,
    exec: Execution,
) -> Result<bool> {
    let (m, n) = (a.rows(), a.cols());
    let needed = minor_count(m, n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let one = Rational::one();
    if a.row_iter().flatten().any(|v| v.abs() > one) {
        return Ok(false);
    }
    for k in 2..=m.min(n) {
        let mut col_sets = Vec::new();
        for first in 0..n {
            for_each_combination_with_first(n, k, first, |c| col_sets.push(c.to_vec()));
        }
        let bad = exec.map_range(m, |first| {
            let mut found = false;
            for_each_combination_with_first(m, k, first, |rows| {
                if found {
                    return;
                }
                found = col_sets
                    .iter()
                    .any(|cols| crate::exact::det_exact(&a.submatrix(rows, cols)).abs() > one);
            });
            found
        });
        if bad.into_iter().any(|b| b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest normalized distance from a cone generator to the span of the
/// other generators, over a family of simplicial cones.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaDistance {
    /// Exact `sin^2` of the smallest angle between a generator and the
    /// hyperplane spanned by the rest.
    pub sin_squared: Rational,
    pub delta: f64,
    pub basis: Basis,
    pub row: usize,
}

/// `sin^2` of the angle between row `i` of the square matrix `m` and the
/// span of its other rows, using the adjugate normal
/// `u` (`<v_j, u> = 0` for `j != i`, `<v_i, u> = det m`).
pub fn generator_sin_squared(m: &RationalMatrix, i: usize) -> Rational {
    let v = m.row(i);
    let u = adjugate_column(m, i);
    let vu = dot(v, &u);
    &vu * &vu / (norm_squared(v) * norm_squared(&u))
}

pub fn local_delta_distance(p: &HPolyhedron, bases: &[Basis]) -> Result<DeltaDistance> {
    let mut best: Option<DeltaDistance> = None;
    for basis in bases {
        let m = p.a().select_rows(basis.rows());
        for (pos, &row) in basis.rows().iter().enumerate() {
            let s2 = generator_sin_squared(&m, pos);
            if s2.is_zero() {
                return Err(Error::SingularBasis(basis.rows().to_vec()));
            }
            if best.as_ref().map_or(true, |b| s2 < b.sin_squared) {
                best = Some(DeltaDistance {
                    delta: to_f64(&s2).sqrt(),
                    sin_squared: s2,
                    basis: basis.clone(),
                    row,
                });
            }
        }
    }
    best.ok_or_else(|| Error::PreconditionViolated("no bases given".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WidenessReport {
    pub transform_basis: Basis,
    pub delta_distance: DeltaDistance,
    /// `tau^2 = delta^2 / n^2`, exact.
    pub tau_squared: Rational,
    pub tau: f64,
    /// `8 n / tau * (1 + ln(1 / tau))`.
    pub diameter_bound: f64,
    /// `Δ_min / (n Δ)`.
    pub lemma_floor: Rational,
}

impl WidenessReport {
    /// `δ >= Δ_min / (n Δ)`, compared exactly on squares.
    pub fn check_floor(&self) -> BoundReport {
        let floor_sq = &self.lemma_floor * &self.lemma_floor;
        BoundReport {
            check: "delta-distance-floor".into(),
            lhs_exact: Some(format!("{} (squared)", format_rational(&floor_sq))),
            lhs: to_f64(&self.lemma_floor),
            rhs_exact: Some(format!(
                "{} (squared)",
                format_rational(&self.delta_distance.sin_squared)
            )),
            rhs: self.delta_distance.delta,
            holds: floor_sq <= self.delta_distance.sin_squared,
        }
    }

    pub fn check_diameter(&self, diameter: usize) -> BoundReport {
        BoundReport::float(
            "tau-diameter",
            Some(diameter.to_string()),
            diameter as f64,
            self.diameter_bound,
        )
    }
}

pub fn tau_diameter_bound(n: usize, tau: f64) -> f64 {
    8.0 * n as f64 / tau * (1.0 + (1.0 / tau).ln())
}

/// Transforms `P` by the witness basis of `stats` and measures the
/// δ-distance of the transformed system over the cones of `cones`.
pub fn wideness_and_diameter_bound(
    p: &HPolyhedron,
    stats: &FanStats,
    cones: &[Basis],
) -> Result<WidenessReport> {
    let n = p.dim();
    let transformed = totally_unimodular_transform(p.a(), &stats.witness)?;
    let tp = HPolyhedron::new_unchecked(transformed, p.b().to_vec())?;
    let dd = local_delta_distance(&tp, cones)?;
    let n_q = Rational::from_integer(BigInt::from(n));
    let tau_squared = &dd.sin_squared / (&n_q * &n_q);
    let tau = dd.delta / n as f64;
    Ok(WidenessReport {
        transform_basis: stats.witness.clone(),
        tau_squared,
        tau,
        diameter_bound: tau_diameter_bound(n, tau),
        lemma_floor: &stats.delta_min / (&n_q * &stats.delta),
        delta_distance: dd,
    })
}

/// `Δ` relative to row scaling: the exact factor `Π_{i in B} c_i` for a
/// subset, exposed for property tests.
pub fn scale_product(scales: &[Rational], subset: &[usize]) -> Rational {
    subset.iter().map(|&i| scales[i].clone()).product()
}

/// Float rendering of `Δ / Δ_min`, used in tables.
pub fn delta_ratio(stats: &FanStats) -> Rational {
    &stats.delta / &stats.delta_min
}
