use nnpwl_core::network::{sample_weight, DEFAULT_GRID};
use nnpwl_core::rational::{frac, int};
use nnpwl_core::{generate, GeneratorConfig, Point, Rational};
use nnpwl_testkit::{example_e, random_point};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_config(rng: &mut ChaCha8Rng) -> GeneratorConfig {
    let cfg = GeneratorConfig::new(
        rng.gen_range(1..=3),
        rng.gen_range(0..=2),
        rng.gen_range(1..=4),
        rng.gen_range(1..=2),
        rng.gen(),
    );
    cfg.with_grid(64)
}

fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or_default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn outputs_stay_in_unit_interval(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = generate(&small_config(&mut rng)).unwrap();
        for _ in 0..20 {
            let y = net.forward(&random_point(&mut rng, net.inputs())).unwrap();
            prop_assert_eq!(y.len(), net.outputs());
            prop_assert!(y.iter().all(|v| !v.is_negative() && *v <= int(1)));
        }
    }

    #[test]
    fn segments_respect_the_lipschitz_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = generate(&small_config(&mut rng)).unwrap();
        let lip = net.lipschitz_bound();
        let x = random_point(&mut rng, net.inputs());
        let y = random_point(&mut rng, net.inputs());
        let along = |t: &Rational| {
            let c = x.coords().iter().zip(y.coords()).map(|(a, b)| a + t * (b - a)).collect();
            Point::new(c)
        };
        let ts: Vec<Rational> = (0..=4).map(|k| frac(k, 4)).collect();
        let pts: Vec<Point> = ts.iter().map(along).collect();
        let outs: Vec<Vec<Rational>> = pts.iter().map(|p| net.forward(p).unwrap()).collect();
        for w in 0..4 {
            let step = sup_distance(pts[w].coords(), pts[w + 1].coords());
            prop_assert!(sup_distance(&outs[w], &outs[w + 1]) <= &lip * step);
        }
    }

    #[test]
    fn generation_is_reproducible(seed in any::<u64>()) {
        let cfg = GeneratorConfig::new(3, 2, 3, 1, seed).with_grid(64);
        prop_assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }
}

#[test]
fn weight_integer_parts_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 10_000;
    let mut counts = [0usize; 3];
    let grid = frac(1, DEFAULT_GRID as i64);
    for _ in 0..draws {
        let w = sample_weight(&mut rng, DEFAULT_GRID);
        assert!(w >= int(-1) && w < int(2));
        assert!((&w / &grid).is_integer());
        let slot = if w < int(0) {
            0
        } else if w < int(1) {
            1
        } else {
            2
        };
        counts[slot] += 1;
    }
    let p = 1.0 / 3.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - draws as f64 * p).abs() <= 3.0 * sigma, "counts {counts:?}");
    }
}

#[test]
fn worked_example_forward() {
    let e = example_e();
    let layers = e.forward_layers(&Point::new(vec![frac(1, 8), frac(1, 2)])).unwrap();
    assert_eq!(layers[0], vec![int(0), frac(1, 8)]);
    assert_eq!(layers[1], vec![frac(5, 8)]);
}

#[test]
fn no_hidden_layers_allowed() {
    let net = generate(&GeneratorConfig::new(2, 0, 0, 1, 3)).unwrap();
    assert_eq!(net.layer_sizes(), vec![2, 1]);
}
