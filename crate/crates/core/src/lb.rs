//! The barycentric-subdivision family of fans and the polytopes whose
//! normal fans they are.
//!
//! Start from the sum-zero simplex with vertices `(n+1) e_i - 1` and `-1`,
//! whose facets span `n + 1` simplicial cones. Each refinement step replaces
//! every cone `cone(r_1, ..., r_n)` by the `n` cones obtained by swapping one
//! generator for the barycenter `(r_1 + ... + r_n) / n`, so depth `k` has
//! `(n+1) n^k` cones. [`lift_polytope`] scales every ray so that the scaled
//! rays are the vertices of a simplicial polytope with exactly these cones
//! as facet cones; its polar `{x : <r_j, x> <= h_j}` then has the fan as its
//! normal fan.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::delta::{factorial, triangulation_stats, unit_ball_volume, DeltaSearch};
use crate::error::{Error, Result};
use crate::exact::{dot, int, norm_squared, solve_linear, to_f64, Rational, RationalMatrix};
use crate::poly::{Basis, HPolyhedron};

/// Columns `(n+1) e_i - 1` for `i < n` followed by the all-minus-ones
/// column, as an `n x (n+1)` matrix.
pub fn base_simplex(n: usize) -> RationalMatrix {
    assert!(n >= 2, "base_simplex needs n >= 2");
    let mut m = RationalMatrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..=n {
            m[(i, j)] = if i == j { int(n as i64) } else { int(-1) };
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionFan {
    pub n: usize,
    pub k: usize,
    /// Generators of the fan; rays of depth `k - 1` form a prefix.
    pub rays: Vec<Vec<Rational>>,
    /// Each cone as `n` sorted indices into `rays`.
    pub cones: Vec<Vec<usize>>,
    /// Index of each cone's parent in the depth `k - 1` fan.
    pub parent: Vec<Option<usize>>,
}

impl SubdivisionFan {
    /// The depth-0 fan: one cone per facet of the base simplex, listed in
    /// lexicographic order of their generator indices.
    pub fn base(n: usize) -> Self {
        let m = base_simplex(n);
        let rays: Vec<Vec<Rational>> = (0..=n).map(|j| m.column(j)).collect();
        let cones: Vec<Vec<usize>> = (0..=n)
            .rev()
            .map(|skip| (0..=n).filter(|&j| j != skip).collect())
            .collect();
        let parent = vec![None; cones.len()];
        SubdivisionFan {
            n,
            k: 0,
            rays,
            cones,
            parent,
        }
    }

    /// The depth-`k` fan, with every intermediate depth.
    pub fn tower(n: usize, k: usize) -> Vec<SubdivisionFan> {
        let mut out = vec![SubdivisionFan::base(n)];
        for _ in 0..k {
            let next = subdivide_fan(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }

    pub fn generate(n: usize, k: usize) -> SubdivisionFan {
        SubdivisionFan::tower(n, k).pop().expect("nonempty")
    }

    /// `M_k^T`: one row per ray.
    pub fn ray_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.rays.clone()).expect("rays share a length")
    }

    pub fn cone_bases(&self) -> Vec<Basis> {
        self.cones.iter().map(|c| Basis::new(c.clone())).collect()
    }

    /// Index of the ray added for cone `c` of this fan when it is subdivided.
    pub fn child_ray(&self, c: usize) -> usize {
        self.rays.len() + c
    }
}

/// One refinement step: every cone is split through the barycenter of its
/// generators; the barycenter of cone `c` becomes ray `rays.len() + c`.
pub fn subdivide_fan(fan: &SubdivisionFan) -> SubdivisionFan {
    let n = fan.n;
    let mut rays = fan.rays.clone();
    let mut cones = Vec::with_capacity(fan.cones.len() * n);
    let mut parent = Vec::with_capacity(fan.cones.len() * n);
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    for (c, cone) in fan.cones.iter().enumerate() {
        let mut bary = vec![Rational::zero(); n];
        for &r in cone {
            for (b, v) in bary.iter_mut().zip(&fan.rays[r]) {
                *b += v;
            }
        }
        for b in &mut bary {
            *b *= &inv_n;
        }
        let new_ray = rays.len();
        rays.push(bary);
        for swap in 0..n {
            let mut child: Vec<usize> = cone.clone();
            child[swap] = new_ray;
            child.sort_unstable();
            cones.push(child);
            parent.push(Some(c));
        }
    }
    SubdivisionFan {
        n,
        k: fan.k + 1,
        rays,
        cones,
        parent,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPolytope {
    /// Vertices `scaling[j] * rays[j]`, one per row.
    pub vertices: Vec<Vec<Rational>>,
    pub scaling: Vec<Rational>,
    /// `h_j = 1 / scaling[j]`: the polar is `{x : <rays[j], x> <= h_j}`.
    pub dual_rhs: Vec<Rational>,
}

impl LiftedPolytope {
    /// `vertices` as columns, `n x |rays|`.
    pub fn vertex_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.vertices.clone())
            .expect("equal lengths")
            .transpose()
    }
}

/// Normal `a` of the hyperplane `a . x = 1` through the given points.
fn facet_normal(points: &[&Vec<Rational>]) -> Result<Vec<Rational>> {
    let m = RationalMatrix::from_rows(points.iter().map(|p| (*p).clone()).collect())?;
    solve_linear(&m, &vec![Rational::one(); points.len()])
}

/// Scales the rays of `fans.last()` so that they are the vertices of a
/// simplicial polytope whose facet cones are the cones of the fan.
///
/// Depth by depth, each cone `T` of the previous depth is a facet of the
/// current polytope; its new ray `v` is pushed out to `alpha v` with `alpha`
/// the midpoint of the interval on which `alpha v` lies beyond `T` and
/// beneath every other current facet. Facets are updated after every
/// insertion, so later insertions of the same depth see the refined
/// polytope.
pub fn lift_polytope(fans: &[SubdivisionFan]) -> Result<LiftedPolytope> {
    let base = fans
        .first()
        .ok_or_else(|| Error::PreconditionViolated("empty fan sequence".into()))?;
    for (j, f) in fans.iter().enumerate() {
        if f.k != base.k + j
            || f.n != base.n
            || (j > 0 && f.rays.len() != fans[j - 1].rays.len() + fans[j - 1].cones.len())
        {
            return Err(Error::PreconditionViolated(
                "fans must be consecutive depths of one tower".into(),
            ));
        }
    }
    if base.k != 0 {
        return Err(Error::PreconditionViolated(
            "tower must start at depth 0".into(),
        ));
    }
    let last = fans.last().expect("nonempty");
    let mut scaling: Vec<Rational> = vec![Rational::one(); base.rays.len()];
    let mut points: Vec<Vec<Rational>> = base.rays.clone();

    // Current facets keyed by sorted vertex indices, with their normals.
    let mut facets: Vec<(Vec<usize>, Vec<Rational>)> = Vec::new();
    for cone in &base.cones {
        let pts: Vec<&Vec<Rational>> = cone.iter().map(|&r| &points[r]).collect();
        facets.push((cone.clone(), facet_normal(&pts)?));
    }

    for depth in 1..fans.len() {
        let prev = &fans[depth - 1];
        for (c, cone) in prev.cones.iter().enumerate() {
            let v = &last.rays[prev.child_ray(c)];
            let t = facets
                .iter()
                .position(|(f, _)| f == cone)
                .expect("every previous cone is a current facet");
            let alpha_t = Rational::one() / dot(&facets[t].1, v);
            let upper = facets
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != t)
                .filter_map(|(_, (_, a))| {
                    let d = dot(a, v);
                    d.is_positive().then(|| Rational::one() / d)
                })
                .min();
            let alpha = match upper {
                Some(u) if u <= alpha_t => return Err(Error::EmptyAlphaInterval { facet: c }),
                Some(u) => (&alpha_t + u) / int(2),
                None => &alpha_t * int(2),
            };
            let new_point: Vec<Rational> = v.iter().map(|x| x * &alpha).collect();
            let new_index = points.len();
            debug_assert_eq!(new_index, prev.child_ray(c));
            points.push(new_point);
            scaling.push(alpha);
            let (old, _) = facets.swap_remove(t);
            for swap in 0..old.len() {
                let mut child = old.clone();
                child[swap] = new_index;
                child.sort_unstable();
                let pts: Vec<&Vec<Rational>> = child.iter().map(|&r| &points[r]).collect();
                let normal = facet_normal(&pts)?;
                facets.push((child, normal));
            }
        }
    }
    let dual_rhs = scaling.iter().map(|s| Rational::one() / s).collect();
    Ok(LiftedPolytope {
        vertices: points,
        scaling,
        dual_rhs,
    })
}

/// The polar of the lifted polytope: `{x : <r_j, x> <= h_j}` over all rays.
pub fn dual_instance(fan: &SubdivisionFan, lifted: &LiftedPolytope) -> Result<HPolyhedron> {
    HPolyhedron::new(fan.ray_matrix(), lifted.dual_rhs.clone())
}

/// Round to the nearest integer, halves away from zero, for `sqrt(t)`, `t >= 0`.
fn round_sqrt(t: &Rational) -> BigInt {
    let four_t = (t * int(4)).floor().to_integer();
    (four_t.sqrt() + BigInt::one()) / BigInt::from(2)
}

/// Each ray scaled to unit length, with every coordinate rounded to the
/// nearest multiple of `10^-digits`.
pub fn normalize_rays(rays: &[Vec<Rational>], digits: u32) -> Vec<Vec<Rational>> {
    let scale = BigInt::from(10).pow(digits);
    let scale_q = Rational::from_integer(scale.clone());
    rays.iter()
        .map(|r| {
            let q = norm_squared(r);
            assert!(!q.is_zero(), "normalize_rays: zero ray");
            r.iter()
                .map(|x| {
                    let t = x * x * &scale_q * &scale_q / &q;
                    let mag = round_sqrt(&t);
                    let signed = if x.is_negative() { -mag } else { mag };
                    Rational::new(signed, scale.clone())
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedCounts {
    pub cones: u128,
    pub diameter: u128,
    pub delta_ratio: u128,
}

/// `(n+1) n^k` cones, fan-graph diameter `2^{k+1} - 1`, `Δ/Δ_min = n^k`.
pub fn expected_counts(n: usize, k: usize) -> ExpectedCounts {
    let nk = (n as u128).pow(k as u32);
    ExpectedCounts {
        cones: (n as u128 + 1) * nk,
        diameter: (1u128 << (k + 1)) - 1,
        delta_ratio: nk,
    }
}

/// Worst coverage of the base simplex boundary by the rays: the largest
/// distance from a grid point on a base facet to the nearest ray.
///
/// The grid on each facet consists of the points with barycentric
/// coordinates `(c_i + 1) / (samples - 1 + n)`, `c` ranging over the
/// compositions of `samples - 1` into `n` parts; `samples = 1` is the facet
/// barycenter alone.
pub fn density_profile(fan: &SubdivisionFan, samples: usize) -> f64 {
    assert!(samples >= 1, "density_profile needs samples >= 1");
    let n = fan.n;
    let base = SubdivisionFan::base(n);
    let rays: Vec<Vec<f64>> = fan
        .rays
        .iter()
        .map(|r| r.iter().map(to_f64).collect())
        .collect();
    let denom = (samples - 1 + n) as f64;
    let mut worst: f64 = 0.0;
    for facet in &base.cones {
        for comp in compositions(samples - 1, n) {
            let mut point = vec![0.0; n];
            for (&c, &r) in comp.iter().zip(facet) {
                let w = (c as f64 + 1.0) / denom;
                for (p, v) in point.iter_mut().zip(&base.rays[r]) {
                    *p += w * to_f64(v);
                }
            }
            let nearest = rays
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(&point)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            worst = worst.max(nearest);
        }
    }
    worst
}

/// All vectors of `parts` non-negative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TightnessRow {
    pub k: usize,
    pub cones: usize,
    pub delta: Rational,
    pub delta_avg: Rational,
    pub delta_over_avg: f64,
    /// `n! * Δ / Δ_avg * vol(B^n)` for the normalized rays.
    pub rhs: f64,
    /// `cones / rhs`.
    pub ratio: f64,
}

/// Cone count against the vertex bound for the normalized depth-`k` fans,
/// `k = 0..=k_max`.
pub fn tightness_experiment(
    n: usize,
    k_max: usize,
    digits: u32,
    search: &DeltaSearch,
) -> Result<Vec<TightnessRow>> {
    let mut rows = Vec::new();
    for fan in SubdivisionFan::tower(n, k_max) {
        let normalized = normalize_rays(&fan.rays, digits);
        let a = RationalMatrix::from_rows(normalized)?;
        let stats = triangulation_stats(&a, &fan.cone_bases(), search)?;
        let delta_over_avg = to_f64(&(&stats.delta / &stats.delta_avg));
        let rhs =
            to_f64(&Rational::from_integer(factorial(n))) * delta_over_avg * unit_ball_volume(n);
        rows.push(TightnessRow {
            k: fan.k,
            cones: stats.cone_count,
            delta: stats.delta,
            delta_avg: stats.delta_avg,
            delta_over_avg,
            rhs,
            ratio: stats.cone_count as f64 / rhs,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{det_exact, ints, ratio};

    #[test]
    fn base_simplex_columns() {
        let m = base_simplex(2);
        assert_eq!(m.column(0), ints(&[2, -1]));
        assert_eq!(m.column(1), ints(&[-1, 2]));
        assert_eq!(m.column(2), ints(&[-1, -1]));
        for n in 2..=5 {
            let m = base_simplex(n);
            for i in 0..n {
                let s: Rational = (0..=n).map(|j| m[(i, j)].clone()).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn subdivision_counts() {
        let f1 = subdivide_fan(&SubdivisionFan::base(2));
        assert_eq!((f1.cones.len(), f1.rays.len()), (6, 6));
        let f = SubdivisionFan::generate(3, 2);
        assert_eq!(f.cones.len(), 36);
        assert_eq!(
            expected_counts(2, 3),
            ExpectedCounts {
                cones: 24,
                diameter: 15,
                delta_ratio: 8
            }
        );
        assert_eq!(
            expected_counts(3, 0),
            ExpectedCounts {
                cones: 4,
                diameter: 1,
                delta_ratio: 1
            }
        );
        assert_eq!(
            expected_counts(4, 2),
            ExpectedCounts {
                cones: 80,
                diameter: 7,
                delta_ratio: 16
            }
        );
    }

    #[test]
    fn children_have_a_third_of_the_determinant() {
        let tower = SubdivisionFan::tower(3, 1);
        let (f0, f1) = (&tower[0], &tower[1]);
        let det = |f: &SubdivisionFan, c: &[usize]| det_exact(&f.ray_matrix().select_rows(c)).abs();
        for (c, cone) in f1.cones.iter().enumerate() {
            let p = f1.parent[c].unwrap();
            assert_eq!(det(f1, cone) * int(3), det(f0, &f0.cones[p]));
        }
    }

    #[test]
    fn lifting_depth_zero_is_identity() {
        let lifted = lift_polytope(&SubdivisionFan::tower(2, 0)).unwrap();
        assert!(lifted.scaling.iter().all(|s| s.is_one()));
        assert_eq!(lifted.vertex_matrix(), base_simplex(2));
    }

    #[test]
    fn lifted_points_push_outward() {
        let tower = SubdivisionFan::tower(2, 2);
        let lifted = lift_polytope(&tower).unwrap();
        // Barycenters of the base facets lie on the base simplex, so their
        // lifting factor must exceed 1.
        for j in 3..6 {
            assert!(lifted.scaling[j] > Rational::one());
        }
        assert_eq!(lifted.dual_rhs.len(), tower[2].rays.len());
    }

    #[test]
    fn normalize_examples() {
        let r = normalize_rays(&[ints(&[3, 4])], 4);
        assert_eq!(r[0], vec![ratio(3, 5), ratio(4, 5)]);
        let r = normalize_rays(&[ints(&[1, 1]), ints(&[-1, 0])], 6);
        for x in &r[0] {
            assert!((to_f64(x) - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-6);
        }
        assert_eq!(r[1], ints(&[-1, 0]));
    }

    #[test]
    fn round_sqrt_halves() {
        assert_eq!(round_sqrt(&int(4)), BigInt::from(2));
        assert_eq!(round_sqrt(&ratio(25, 4)), BigInt::from(3)); // 2.5 rounds up
        assert_eq!(round_sqrt(&int(6)), BigInt::from(2)); // 2.449
        assert_eq!(round_sqrt(&int(7)), BigInt::from(3)); // 2.645
    }

    #[test]
    fn density_examples() {
        let f0 = SubdivisionFan::generate(2, 0);
        let f3 = SubdivisionFan::generate(2, 3);
        assert!(density_profile(&f3, 9) < density_profile(&f0, 9));
        let f1 = SubdivisionFan::generate(2, 1);
        assert_eq!(density_profile(&f1, 1), 0.0);
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
