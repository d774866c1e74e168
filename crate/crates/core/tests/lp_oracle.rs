use nnpwl_core::lp::{Constraint, LinearProgram, LpOutcome, Relation};
use nnpwl_core::rational::{frac, int};
use nnpwl_core::{solve, AffineFunc, Polyhedron};
use nnpwl_testkit::{constraint, random_affine, rejection_sample, vertex_optimum, VertexOptimum};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random bounded system: cube bounds plus up to five random rows.
fn random_program(seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let mut cs = Polyhedron::unit_cube(n).unwrap().constraints();
    for _ in 0..rng.gen_range(0..=5) {
        let relation = match rng.gen_range(0..7) {
            0 => Relation::Eq,
            1..=3 => Relation::Ge,
            _ => Relation::Le,
        };
        cs.push(Constraint::new(random_affine(&mut rng, n, 8), relation));
    }
    let objective = random_affine(&mut rng, n, 8);
    if rng.gen_bool(0.5) {
        LinearProgram::minimize(objective, cs).unwrap()
    } else {
        LinearProgram::maximize(objective, cs).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimum_matches_vertex_enumeration(seed in any::<u64>()) {
        let lp = random_program(seed);
        let got = solve(&lp);
        match vertex_optimum(&lp) {
            VertexOptimum::Infeasible => prop_assert!(got.is_infeasible()),
            VertexOptimum::Optimal(v) => prop_assert_eq!(got.optimum(), Some(&v)),
        }
    }

    #[test]
    fn witness_is_feasible_and_attains_optimum(seed in any::<u64>()) {
        let lp = random_program(seed);
        if let LpOutcome::Optimal { optimum, witness } = solve(&lp) {
            for c in &lp.constraints {
                prop_assert!(c.satisfied_by(&witness).unwrap());
            }
            prop_assert_eq!(lp.objective.eval(&witness).unwrap(), optimum);
        }
    }

    #[test]
    fn no_sampled_point_beats_the_minimum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let mut region = Polyhedron::unit_cube(n).unwrap();
        for _ in 0..rng.gen_range(0..=3) {
            region = region.extend([nnpwl_core::HalfSpace::ge(random_affine(&mut rng, n, 8))]).unwrap();
        }
        let f = random_affine(&mut rng, n, 8);
        if let Some(m) = region.minimize_over(&f).unwrap().optimum() {
            for x in rejection_sample(&mut rng, &region, 100, 5000) {
                prop_assert!(f.eval(&x).unwrap() >= *m);
            }
        }
    }
}

#[test]
fn cube_maximum_of_sum_minus_two() {
    let f = AffineFunc::new(vec![int(1), int(1)], int(-2));
    let lp = LinearProgram::maximize(f, Polyhedron::unit_cube(2).unwrap().constraints()).unwrap();
    assert_eq!(solve(&lp).optimum(), Some(&int(0)));
}

#[test]
fn opposite_hidden_signs_are_infeasible() {
    // 4/3·x₁ - x₂ ≥ 0 and x₁ - x₂ + 1/2 ≤ 0 inside the square.
    let mut cs = Polyhedron::unit_cube(2).unwrap().constraints();
    cs.push(Constraint::ge(AffineFunc::new(vec![frac(4, 3), int(-1)], int(0))));
    cs.push(Constraint::le(AffineFunc::new(vec![int(1), int(-1)], frac(1, 2))));
    let lp = LinearProgram::minimize(AffineFunc::zero(2), cs).unwrap();
    assert!(solve(&lp).is_infeasible());
}

#[test]
fn cycling_example_terminates() {
    // Beale's instance cycles under the textbook largest-coefficient rule.
    let x = |c: &[i64; 4]| c.map(int).to_vec();
    let objective = AffineFunc::new(vec![frac(-3, 4), int(20), frac(-1, 2), int(6)], int(0));
    let mut cs: Vec<Constraint> = (0..4).map(|k| Constraint::ge(AffineFunc::projection(4, k))).collect();
    cs.push(Constraint::le(AffineFunc::new(vec![frac(1, 4), int(-8), int(-1), int(9)], int(0))));
    cs.push(Constraint::le(AffineFunc::new(vec![frac(1, 2), int(-12), frac(-1, 2), int(3)], int(0))));
    cs.push(Constraint::le(AffineFunc::new(x(&[0, 0, 1, 0]), int(-1))));
    let lp = LinearProgram::minimize(objective, cs).unwrap();
    assert_eq!(solve(&lp).optimum(), Some(&frac(-5, 4)));
}

#[test]
fn unbounded_and_free_variables() {
    let lp =
        LinearProgram::maximize(AffineFunc::projection(1, 0), vec![constraint(&[1], int(0), Relation::Ge)]).unwrap();
    assert_eq!(solve(&lp), LpOutcome::Unbounded);
    // x free, x ≥ -3, objective min x → -3.
    let lp =
        LinearProgram::minimize(AffineFunc::projection(1, 0), vec![constraint(&[1], int(3), Relation::Ge)]).unwrap();
    assert_eq!(solve(&lp).optimum(), Some(&int(-3)));
    // Equality pinning a free variable.
    let lp = LinearProgram::maximize(
        AffineFunc::new(vec![int(1), int(1)], int(0)),
        vec![constraint(&[1, -1], int(2), Relation::Eq), constraint(&[0, 1], int(-5), Relation::Le)],
    )
    .unwrap();
    assert_eq!(solve(&lp).optimum(), Some(&int(8)));
}

#[test]
fn constant_constraints() {
    let ok =
        LinearProgram::minimize(AffineFunc::zero(1), vec![Constraint::ge(AffineFunc::constant(1, int(0)))]).unwrap();
    assert!(!solve(&ok).is_infeasible());
    let bad =
        LinearProgram::minimize(AffineFunc::zero(1), vec![Constraint::ge(AffineFunc::constant(1, int(-1)))]).unwrap();
    assert!(solve(&bad).is_infeasible());
}
