//! Instance corpus and small independent oracles shared by the integration
//! tests.
#![allow(dead_code)]

use deltahull::exact::{int, Rational, RationalMatrix};
use deltahull::instances::{self, fuzz_corpus};
use deltahull::lb::{dual_instance, lift_polytope, SubdivisionFan};
use deltahull::HPolyhedron;
use num_traits::{One, Signed, Zero};

pub const FUZZ_SEED: u64 = 20_240_601;

pub struct Case {
    pub name: String,
    pub p: HPolyhedron,
}

/// The polar of the lifted depth-`k` subdivision polytope.
pub fn subdivision_dual(n: usize, k: usize) -> HPolyhedron {
    let tower = SubdivisionFan::tower(n, k);
    let lifted = lift_polytope(&tower).expect("lifting succeeds");
    dual_instance(tower.last().unwrap(), &lifted).expect("valid dual system")
}

pub fn generated() -> Vec<Case> {
    let mut out = Vec::new();
    for (n, kmax) in [(2, 3), (3, 3), (4, 1)] {
        for k in 0..=kmax {
            out.push(Case {
                name: format!("subdivision-dual n={n} k={k}"),
                p: subdivision_dual(n, k),
            });
        }
    }
    out
}

pub fn fuzzed(count: u64) -> Vec<Case> {
    fuzz_corpus(count, FUZZ_SEED)
        .into_iter()
        .map(|(params, p)| Case {
            name: format!(
                "random n={} m={} seed={}",
                params.dim, params.rows, params.seed
            ),
            p,
        })
        .collect()
}

/// Pyramid over `[-1, 1]^d` with apex `e_{d+1}`: rows `±e_i + e_{d+1} <= 1`
/// and `-x_{d+1} <= 0`. The apex has `2d` tight rows in dimension `d + 1`.
pub fn cube_pyramid(d: usize) -> HPolyhedron {
    let n = d + 1;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for i in 0..d {
        for s in [1, -1] {
            let mut r = vec![int(0); n];
            r[i] = int(s);
            r[d] = int(1);
            rows.push(r);
            b.push(int(1));
        }
    }
    let mut floor = vec![int(0); n];
    floor[d] = int(-1);
    rows.push(floor);
    b.push(int(0));
    HPolyhedron::new(RationalMatrix::from_rows(rows).unwrap(), b).unwrap()
}

/// Instances with degenerate vertices.
pub fn degenerate() -> Vec<Case> {
    vec![
        Case {
            name: "square pyramid".into(),
            p: instances::square_pyramid(),
        },
        Case {
            name: "cube pyramid d=3".into(),
            p: cube_pyramid(3),
        },
        Case {
            name: "cross-polytope n=3".into(),
            p: instances::cross_polytope(3),
        },
        Case {
            name: "cross-polytope n=4".into(),
            p: instances::cross_polytope(4),
        },
        Case {
            name: "standard simplex n=3 t=2".into(),
            p: instances::standard_simplex(3, 2),
        },
    ]
}

/// Determinant by cofactor expansion along the first row, exact.
pub fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `max |det|` over all `n`-row subsets by plain recursion.
pub fn all_minor_max(rows: &[Vec<Rational>]) -> Rational {
    let n = rows[0].len();
    let mut best = Rational::zero();
    let mut pick = Vec::new();
    fn rec(
        rows: &[Vec<Rational>],
        n: usize,
        start: usize,
        pick: &mut Vec<usize>,
        best: &mut Rational,
    ) {
        if pick.len() == n {
            let m: Vec<Vec<Rational>> = pick.iter().map(|&i| rows[i].clone()).collect();
            let d = cofactor_det(&m).abs();
            if d > *best {
                *best = d;
            }
            return;
        }
        for i in start..rows.len() {
            pick.push(i);
            rec(rows, n, i + 1, pick, best);
            pick.pop();
        }
    }
    rec(rows, n, 0, &mut pick, &mut best);
    best
}

/// Lattice points of `{A x <= b}` inside a box, scanning the last
/// coordinate outermost and every range downwards.
pub fn reversed_scan(p: &HPolyhedron, lo: &[i64], hi: &[i64]) -> u64 {
    let n = p.dim();
    let mut x: Vec<i64> = hi.to_vec();
    let mut count = 0;
    loop {
        let point: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        if p.contains(&point) {
            count += 1;
        }
        let mut j = 0;
        loop {
            if j == n {
                return count;
            }
            if x[j] > lo[j] {
                x[j] -= 1;
                break;
            }
            x[j] = hi[j];
            j += 1;
        }
    }
}

pub fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn one() -> Rational {
    Rational::one()
}
