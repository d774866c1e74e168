use nnpwl::format::{read_regional, regional_json};
use nnpwl::report::{class_rows, emit_report, plot_script, read_class_csv, read_network_csv, Setup};
use nnpwl_core::{generate, nn2pwl, parse_rational, run_experiment, ExperimentPlan, Mode, TranslateOptions};

fn plan(mode: Mode, classes: usize, per_class: usize) -> ExperimentPlan {
    ExperimentPlan { mode, fixed: 2, classes, per_class, seed: 5, grid: 64 }
}

fn setup(mode: Mode, classes: usize, per_class: usize) -> Setup {
    let p = plan(mode, classes, per_class);
    Setup::new(p, run_experiment(&p, false).unwrap())
}

#[test]
fn single_class_single_network() {
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_report(&[setup(Mode::VaryLayers, 1, 1)], dir.path()).unwrap();
    let text = std::fs::read_to_string(&paths.classes).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(read_class_csv(&paths.classes).unwrap().len(), 1);
}

#[test]
fn csv_round_trips_and_matches_stats() {
    let dir = tempfile::tempdir().unwrap();
    let setups = [setup(Mode::VaryLayers, 2, 3), setup(Mode::VaryWidth, 2, 3)];
    let paths = emit_report(&setups, dir.path()).unwrap();
    let rows = read_class_csv(&paths.classes).unwrap();
    assert_eq!(rows, class_rows(&setups));
    let stats: Vec<_> = setups.iter().flat_map(|s| s.stats.iter()).collect();
    for (row, c) in rows.iter().zip(stats) {
        assert_eq!(parse_rational(&row.avg_regions).unwrap(), c.average);
        assert_eq!((row.max_regions, row.min_regions, row.networks), (c.max, c.min, c.networks.len()));
        assert_eq!(row.violators, c.networks.iter().filter(|n| n.violations > 0).count());
    }
    let nets = read_network_csv(&paths.networks).unwrap();
    assert_eq!(nets.len(), 12);
    let violators = read_network_csv(&paths.violators).unwrap();
    assert_eq!(violators.len(), nets.iter().filter(|n| n.violating_pairs > 0).count());
}

#[test]
fn plot_has_one_curve_per_setup() {
    let setups = [setup(Mode::VaryLayers, 2, 1), setup(Mode::VaryWidth, 2, 1)];
    let script = plot_script(&setups);
    assert_eq!(script.matches("'classes.csv'").count(), 2);
    assert!(script.contains("title 'layers-h2'") && script.contains("title 'width-l2'"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = emit_report(&[setup(Mode::VaryWidth, 2, 2)], a.path()).unwrap();
    let pb = emit_report(&[setup(Mode::VaryWidth, 2, 2)], b.path()).unwrap();
    for (x, y) in [(pa.classes, pb.classes), (pa.networks, pb.networks), (pa.plot, pb.plot)] {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn region_counts_match_serialized_recount() {
    let dir = tempfile::tempdir().unwrap();
    let s = setup(Mode::VaryLayers, 2, 3);
    for c in &s.stats {
        for n in &c.networks {
            let net = generate(&s.plan.generator_config(c.param, n.index)).unwrap();
            let path = dir.path().join("rep.json");
            std::fs::write(&path, regional_json(&nn2pwl(&net, &TranslateOptions::default()))).unwrap();
            assert_eq!(read_regional(&path).unwrap().nonempty_count(0), n.regions);
        }
    }
}

#[test]
fn empty_report_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_report(&[], dir.path()).is_err());
}
