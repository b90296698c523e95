//! Small reference polyhedra and a seeded random instance generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, ints, rank_of, RationalMatrix};
use crate::poly::HPolyhedron;

/// `[0, 1]^2` as `x <= 1, y <= 1, -x <= 0, -y <= 0`.
pub fn unit_square() -> HPolyhedron {
    cube_with_side(2, 1)
}

/// `[0, side]^n`: rows `e_i x <= side` for all i, then `-e_i x <= 0`.
pub fn cube_with_side(n: usize, side: i64) -> HPolyhedron {
    let mut rows = Vec::with_capacity(2 * n);
    let mut b = Vec::with_capacity(2 * n);
    for sign in [1, -1] {
        for i in 0..n {
            let mut r = vec![int(0); n];
            r[i] = int(sign);
            rows.push(r);
            b.push(int(if sign > 0 { side } else { 0 }));
        }
    }
    HPolyhedron::new(RationalMatrix::from_rows(rows).unwrap(), b).unwrap()
}

pub fn cube(n: usize) -> HPolyhedron {
    cube_with_side(n, 1)
}

/// Pyramid over `[-1,1]^2` with apex `(0,0,1)`; the apex is degenerate
/// (four tight rows in dimension three).
pub fn square_pyramid() -> HPolyhedron {
    HPolyhedron::new(
        RationalMatrix::from_i64(&[
            &[0, 0, -1],
            &[1, 0, 1],
            &[0, 1, 1],
            &[-1, 0, 1],
            &[0, -1, 1],
        ]),
        ints(&[0, 1, 1, 1, 1]),
    )
    .unwrap()
}

/// Unit ball of the 1-norm: `sum_i s_i x_i <= 1` for every sign vector `s`.
pub fn cross_polytope(n: usize) -> HPolyhedron {
    let rows: Vec<_> = (0..1u32 << n)
        .map(|mask| {
            (0..n)
                .map(|i| int(if mask >> i & 1 == 1 { -1 } else { 1 }))
                .collect()
        })
        .collect();
    let b = vec![int(1); rows.len()];
    HPolyhedron::new(RationalMatrix::from_rows(rows).unwrap(), b).unwrap()
}

/// `{x >= 0, sum x <= t}`.
pub fn standard_simplex(n: usize, t: i64) -> HPolyhedron {
    let mut rows = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![int(0); n];
        r[i] = int(-1);
        rows.push(r);
        b.push(int(0));
    }
    rows.push(vec![int(1); n]);
    b.push(int(t));
    HPolyhedron::new(RationalMatrix::from_rows(rows).unwrap(), b).unwrap()
}

/// The non-negative orthant `{x >= 0}`, a pointed cone with a single vertex.
pub fn orthant(n: usize) -> HPolyhedron {
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let mut r = vec![int(0); n];
            r[i] = int(-1);
            r
        })
        .collect();
    HPolyhedron::new(RationalMatrix::from_rows(rows).unwrap(), vec![int(0); n]).unwrap()
}

/// Parameters of the random integer instance family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomInstance {
    pub dim: usize,
    pub rows: usize,
    pub max_entry: i64,
    pub seed: u64,
}

impl RandomInstance {
    /// Integer rows with entries in `[-max_entry, max_entry]` and right-hand
    /// sides in `[0, max_entry]`, so the origin is always feasible and
    /// degenerate vertices at the origin are common. Rank-deficient draws and
    /// duplicate half-spaces are redrawn; the result is seed-deterministic.
    pub fn generate(&self) -> HPolyhedron {
        assert!(self.rows >= self.dim && self.dim >= 1 && self.max_entry >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        loop {
            let rows: Vec<Vec<i64>> = (0..self.rows)
                .map(|_| loop {
                    let r: Vec<i64> = (0..self.dim)
                        .map(|_| rng.gen_range(-self.max_entry..=self.max_entry))
                        .collect();
                    if r.iter().any(|&v| v != 0) {
                        break r;
                    }
                })
                .collect();
            let b: Vec<i64> = (0..self.rows)
                .map(|_| rng.gen_range(0..=self.max_entry))
                .collect();
            let a = RationalMatrix::from_rows(rows.iter().map(|r| ints(r)).collect()).unwrap();
            if rank_of(&a) < self.dim {
                continue;
            }
            if let Ok(p) = HPolyhedron::new(a, ints(&b)) {
                return p;
            }
        }
    }
}

/// The fuzz corpus: `count` seeds cycling through `n in 2..=4`,
/// `m in n+2..=12`, entries bounded by 5.
pub fn fuzz_corpus(count: u64, base_seed: u64) -> Vec<(RandomInstance, HPolyhedron)> {
    (0..count)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            let dim = rng.gen_range(2..=4usize);
            let rows = rng.gen_range(dim + 2..=12usize);
            let params = RandomInstance {
                dim,
                rows,
                max_entry: 5,
                seed,
            };
            (params, params.generate())
        })
        .collect()
}
