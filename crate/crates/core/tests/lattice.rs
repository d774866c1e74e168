use nnpwl_core::lattice::DEFAULT_MAX_SPLITS;
use nnpwl_core::rational::frac;
use nnpwl_core::{
    audit, build_lattice, eval_lattice, generate, is_above, nn2pwl, repair_split, AffineFunc, GeneratorConfig, Point,
    Polyhedron, TranslateOptions,
};
use nnpwl_testkit::{
    audit_oracle, crossing_pairs, encoding_value, example_e, quarter_pairs, random_affine, random_point,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn translated_pairs(seed: u64) -> Vec<(AffineFunc, Polyhedron)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GeneratorConfig::new(rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=3), 1, rng.gen());
    let rep = nn2pwl(&generate(&cfg.with_grid(64)).unwrap(), &TranslateOptions::default());
    rep.outputs[0].iter().map(|p| (p.piece.clone(), p.region.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn audit_matches_triple_loop(seed in any::<u64>()) {
        let pairs = translated_pairs(seed);
        prop_assume!(pairs.len() <= 6);
        let a = audit(&pairs).unwrap();
        prop_assert_eq!(a.violating_pairs, audit_oracle(&pairs));
    }

    #[test]
    fn audit_matches_triple_loop_on_arbitrary_pieces(seed in any::<u64>()) {
        // Same regions, unrelated pieces: violations become common.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = translated_pairs(seed);
        prop_assume!(pairs.len() <= 6);
        let n = pairs[0].1.dim();
        for p in &mut pairs {
            p.0 = random_affine(&mut rng, n, 4);
        }
        prop_assert_eq!(audit(&pairs).unwrap().violating_pairs, audit_oracle(&pairs));
    }

    #[test]
    fn above_is_reflexive_and_transitive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let cube = Polyhedron::unit_cube(n).unwrap();
        let fs: Vec<AffineFunc> = (0..3).map(|_| random_affine(&mut rng, n, 4)).collect();
        prop_assert!(is_above(&fs[0], &fs[0], &cube).unwrap().above);
        let ab = is_above(&fs[0], &fs[1], &cube).unwrap().above;
        let bc = is_above(&fs[1], &fs[2], &cube).unwrap().above;
        if ab && bc {
            prop_assert!(is_above(&fs[0], &fs[2], &cube).unwrap().above);
        }
    }

    #[test]
    fn lattice_form_equals_forward(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GeneratorConfig::new(2, rng.gen_range(1..=2), rng.gen_range(1..=3), 1, rng.gen());
        let net = generate(&cfg.with_grid(64)).unwrap();
        let pairs = nn2pwl(&net, &TranslateOptions::default()).outputs.remove(0);
        let a = audit(&pairs).unwrap();
        prop_assume!(a.is_lattice());
        let rep = build_lattice(&pairs, &a).unwrap();
        for j in 0..pairs.len() {
            prop_assert!(rep.k_sets[j].contains(&j));
        }
        for _ in 0..40 {
            let x = random_point(&mut rng, 2);
            let f = eval_lattice(&rep, &x).unwrap();
            prop_assert_eq!(&f, &net.forward(&x).unwrap()[0]);
            for j in 0..pairs.len() {
                prop_assert!(rep.region_term(j, &x).unwrap() <= f);
            }
        }
    }

    #[test]
    fn repair_preserves_values(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = translated_pairs(seed);
        prop_assume!(pairs.len() <= 12);
        let (fixed, report) = repair_split(pairs.clone(), DEFAULT_MAX_SPLITS).unwrap();
        prop_assert!(report.converged() || report.stalled || report.iterations == DEFAULT_MAX_SPLITS);
        prop_assert_eq!(report.final_violations, audit(&fixed).unwrap().violation_count());
        let n = pairs[0].1.dim();
        for _ in 0..40 {
            let x = random_point(&mut rng, n);
            prop_assert_eq!(encoding_value(&pairs, &x), encoding_value(&fixed, &x));
            let strict = fixed.iter().filter(|(_, r)| r.contains(&x, true).unwrap()).count();
            prop_assert!(strict <= 1);
        }
    }
}

#[test]
fn one_variable_example_k_sets() {
    let pairs = quarter_pairs();
    let a = audit(&pairs).unwrap();
    assert!(a.is_lattice());
    let rep = build_lattice(&pairs, &a).unwrap();
    assert_eq!(rep.k_sets, vec![vec![0, 2], vec![1, 2], vec![1, 2], vec![1, 3]]);
    // Inside the second quarter the lattice form is the second piece.
    let x = Point::new(vec![frac(3, 8)]);
    assert_eq!(eval_lattice(&rep, &x).unwrap(), pairs[1].0.eval(&x).unwrap());
    for k in 0..=40 {
        let x = Point::new(vec![frac(k, 40)]);
        assert_eq!(Some(eval_lattice(&rep, &x).unwrap()), encoding_value(&pairs, &x));
    }
}

#[test]
fn crossing_pieces_violate_and_repair() {
    let pairs = crossing_pairs();
    let a = audit(&pairs).unwrap();
    assert!(a.violating_pairs.contains(&(2, 4)), "{:?}", a.violating_pairs);
    assert_eq!(a.violating_pairs, audit_oracle(&pairs));
    let (fixed, report) = repair_split(pairs.clone(), DEFAULT_MAX_SPLITS).unwrap();
    assert!(report.converged(), "{report:?}");
    assert_eq!(report.initial_violations, a.violation_count());
    let rep = build_lattice(&fixed, &audit(&fixed).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let x = random_point(&mut rng, 2);
        let before = encoding_value(&pairs, &x).unwrap();
        assert_eq!(encoding_value(&fixed, &x).unwrap(), before);
        assert_eq!(eval_lattice(&rep, &x).unwrap(), before);
    }
}

#[test]
fn already_lattice_is_untouched() {
    let pairs = quarter_pairs();
    let (same, report) = repair_split(pairs.clone(), DEFAULT_MAX_SPLITS).unwrap();
    assert_eq!(report.iterations, 0);
    assert_eq!(same, pairs);
}

#[test]
fn worked_example_lattice_value() {
    let pairs = nn2pwl(&example_e(), &TranslateOptions::default()).outputs.remove(0);
    let a = audit(&pairs).unwrap();
    let (pairs, a) = if a.is_lattice() {
        (pairs.into_iter().map(|p| (p.piece, p.region)).collect::<Vec<_>>(), a)
    } else {
        let raw = pairs.into_iter().map(|p| (p.piece, p.region)).collect();
        let (fixed, _) = repair_split(raw, DEFAULT_MAX_SPLITS).unwrap();
        let a = audit(&fixed).unwrap();
        (fixed, a)
    };
    let rep = build_lattice(&pairs, &a).unwrap();
    assert_eq!(eval_lattice(&rep, &Point::new(vec![frac(1, 8), frac(1, 2)])).unwrap(), frac(5, 8));
}
