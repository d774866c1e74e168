//! Brute-force oracles and fixtures shared by the test suites.
//!
//! Nothing here calls the simplex solver: LP optima come from vertex
//! enumeration, cube extrema from the closed form, and lattice audits from a
//! plain triple loop over those vertex optima. That keeps the oracles
//! independent of the code they check.

use nnpwl_core::lp::{Constraint, LinearProgram, Relation, Sense};
use nnpwl_core::rational::{frac, int};
use nnpwl_core::{AffineFunc, HalfSpace, Network, Point, Polyhedron, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Result of the vertex-enumeration oracle on a bounded system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexOptimum {
    Infeasible,
    Optimal(Rational),
}

/// Unique solution of the square system `a·x = b`, if any.
#[allow(clippy::needless_range_loop)]
pub fn gauss_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let d = &factor * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &factor * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}

fn satisfies(cs: &[Constraint], x: &[Rational]) -> bool {
    cs.iter().all(|c| c.satisfied_by(&Point::new(x.to_vec())).unwrap())
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All feasible vertices of a system in `n` variables: intersections of `n`
/// constraint hyperplanes with a unique solution that satisfy every constraint.
pub fn feasible_vertices(n: usize, cs: &[Constraint]) -> Vec<Vec<Rational>> {
    if n == 0 {
        return if satisfies(cs, &[]) { vec![vec![]] } else { vec![] };
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for idx in combinations(cs.len(), n) {
        let a = idx.iter().map(|&i| cs[i].func.coeffs().to_vec()).collect();
        let b = idx.iter().map(|&i| -cs[i].func.bias()).collect();
        if let Some(x) = gauss_solve(a, b) {
            if satisfies(cs, &x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Optimum of a program whose feasible set is bounded (e.g. contains the cube
/// bounds). Bounded nonempty polyhedra are pointed, so a vertex attains it.
pub fn vertex_optimum(lp: &LinearProgram) -> VertexOptimum {
    let vs = feasible_vertices(lp.arity(), &lp.constraints);
    let values = vs.iter().map(|x| lp.objective.eval(&Point::new(x.clone())).unwrap());
    let best = match lp.sense {
        Sense::Minimize => values.min(),
        Sense::Maximize => values.max(),
    };
    best.map_or(VertexOptimum::Infeasible, VertexOptimum::Optimal)
}

/// Minimum of `f` over a bounded region by vertex enumeration.
pub fn region_min(region: &Polyhedron, f: &AffineFunc) -> Option<Rational> {
    let lp = LinearProgram::minimize(f.clone(), region.constraints()).unwrap();
    match vertex_optimum(&lp) {
        VertexOptimum::Optimal(v) => Some(v),
        VertexOptimum::Infeasible => None,
    }
}

/// `min f` over `[0,1]ⁿ`: bias plus the negative coefficients.
pub fn cube_min(f: &AffineFunc) -> Rational {
    f.coeffs().iter().filter(|c| c.is_negative()).fold(f.bias().clone(), |s, c| s + c)
}

/// `max f` over `[0,1]ⁿ`: bias plus the positive coefficients.
pub fn cube_max(f: &AffineFunc) -> Rational {
    f.coeffs().iter().filter(|c| c.is_positive()).fold(f.bias().clone(), |s, c| s + c)
}

/// Ordered violating pairs by the definition, with "above" decided through
/// vertex minima.
pub fn audit_oracle(pairs: &[(AffineFunc, Polyhedron)]) -> Vec<(usize, usize)> {
    let m = pairs.len();
    let above = |p: usize, q: usize, r: usize| {
        let d = pairs[p].0.sub(&pairs[q].0).unwrap();
        !region_min(&pairs[r].1, &d).expect("nonempty region").is_negative()
    };
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j && !(0..m).any(|k| above(i, k, i) && above(k, j, j)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `i + k/grid` with `i ∈ {-1, 0, 1}`, the generator's law.
pub fn grid_value<R: Rng>(rng: &mut R, grid: i64) -> Rational {
    int(rng.gen_range(-1..=1)) + frac(rng.gen_range(0..grid), grid)
}

pub fn random_affine<R: Rng>(rng: &mut R, arity: usize, grid: i64) -> AffineFunc {
    let coeffs = (0..arity).map(|_| grid_value(rng, grid)).collect();
    AffineFunc::new(coeffs, grid_value(rng, grid))
}

/// Coordinate in `[0, 1]`: mostly random fractions with small denominators,
/// sometimes exactly `0`, `1/2` or `1` so boundaries get exercised.
pub fn random_coord<R: Rng>(rng: &mut R) -> Rational {
    match rng.gen_range(0..10) {
        0 => Rational::zero(),
        1 => Rational::one(),
        2 => frac(1, 2),
        _ => {
            let d = rng.gen_range(1..=97);
            frac(rng.gen_range(0..=d), d)
        }
    }
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Point {
    Point::new((0..n).map(|_| random_coord(rng)).collect())
}

/// Up to `count` points of `region` drawn by rejection from the cube.
pub fn rejection_sample<R: Rng>(rng: &mut R, region: &Polyhedron, count: usize, tries: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..tries {
        if out.len() == count {
            break;
        }
        let x = random_point(rng, region.dim());
        if region.contains(&x, false).unwrap() {
            out.push(x);
        }
    }
    out
}

/// Points of `{0, 1/k, …, 1}ⁿ`.
pub fn grid_points(n: usize, k: i64) -> Vec<Point> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                (0..=k).map(move |i| {
                    let mut q = p.clone();
                    q.push(frac(i, k));
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Point::new).collect()
}

/// Two inputs, hidden nodes `4/3·x₁ - x₂` and `x₁ - x₂ + 1/2`, output
/// `y₁ + y₂ + 1/2`.
pub fn example_e() -> Network {
    let h1 = AffineFunc::new(vec![frac(4, 3), int(-1)], int(0));
    let h2 = AffineFunc::new(vec![int(1), int(-1)], frac(1, 2));
    let out = AffineFunc::new(vec![int(1), int(1)], frac(1, 2));
    Network::new(2, vec![vec![h1, h2], vec![out]]).unwrap()
}

fn ge(coeffs: &[Rational], bias: Rational) -> HalfSpace {
    HalfSpace::ge(AffineFunc::new(coeffs.to_vec(), bias))
}

fn le(coeffs: &[Rational], bias: Rational) -> HalfSpace {
    HalfSpace::le(AffineFunc::new(coeffs.to_vec(), bias))
}

fn cube_with(n: usize, hs: Vec<HalfSpace>) -> Polyhedron {
    Polyhedron::unit_cube(n).unwrap().extend(hs).unwrap()
}

/// One-variable lattice example: two increasing pieces, a decreasing one, and a
/// steep increasing one on consecutive quarters of `[0, 1]`.
pub fn quarter_pairs() -> Vec<(AffineFunc, Polyhedron)> {
    let piece = |a: Rational, b: Rational| AffineFunc::new(vec![a], b);
    let quarter = |lo: i64, hi: i64| cube_with(1, vec![ge(&[int(1)], frac(-lo, 4)), le(&[int(1)], frac(-hi, 4))]);
    vec![
        (piece(frac(3, 10), frac(1, 4)), quarter(0, 1)),
        (piece(frac(6, 5), frac(1, 40)), quarter(1, 2)),
        (piece(frac(-3, 2), frac(11, 8)), quarter(2, 3)),
        (piece(frac(5, 2), frac(-13, 8)), quarter(3, 4)),
    ]
}

/// Two-variable, five-region encoding where the crossing line of `p₃` and
/// `p₅` runs through the interiors of both `Ω₃` and `Ω₅`.
pub fn crossing_pairs() -> Vec<(AffineFunc, Polyhedron)> {
    let (o, l, h) = (int(0), int(1), frac(1, 2));
    let ml = int(-1);
    vec![
        // Ω₁: x₂ ≥ 1/2, x₁ + x₂ ≤ 1; p₁ = x₂
        (
            AffineFunc::new(vec![o.clone(), l.clone()], o.clone()),
            cube_with(2, vec![ge(&[o.clone(), l.clone()], -&h), le(&[l.clone(), l.clone()], ml.clone())]),
        ),
        // Ω₂: x₁ ≤ 1/2, x₁ + x₂ ≥ 1; p₂ = 1 - x₁
        (
            AffineFunc::new(vec![ml.clone(), o.clone()], l.clone()),
            cube_with(2, vec![le(&[l.clone(), o.clone()], -&h), ge(&[l.clone(), l.clone()], ml.clone())]),
        ),
        // Ω₃: x₁ ≥ 1/2, x₁ ≤ x₂; p₃ = x₁
        (
            AffineFunc::new(vec![l.clone(), o.clone()], o.clone()),
            cube_with(2, vec![ge(&[l.clone(), o.clone()], -&h), le(&[l.clone(), ml.clone()], o.clone())]),
        ),
        // Ω₄: x₂ ≥ 1/2, x₁ ≥ x₂; p₄ = x₂
        (
            AffineFunc::new(vec![o.clone(), l.clone()], o.clone()),
            cube_with(2, vec![ge(&[o.clone(), l.clone()], -&h), ge(&[l.clone(), ml.clone()], o.clone())]),
        ),
        // Ω₅: x₂ ≤ 1/2; p₅ = 1/4 + x₂/2
        (AffineFunc::new(vec![o.clone(), h.clone()], frac(1, 4)), cube_with(2, vec![le(&[o.clone(), l.clone()], -&h)])),
    ]
}

/// Value of an encoding at `x`: the piece of the first region containing it.
pub fn encoding_value(pairs: &[(AffineFunc, Polyhedron)], x: &Point) -> Option<Rational> {
    pairs.iter().find(|(_, r)| r.contains(x, false).unwrap()).map(|(p, _)| p.eval(x).unwrap())
}

/// Constraint helper for hand-written systems.
pub fn constraint(coeffs: &[i64], bias: Rational, relation: Relation) -> Constraint {
    Constraint::new(AffineFunc::new(coeffs.iter().map(|&c| int(c)).collect(), bias), relation)
}
