//! CSV tables and a gnuplot script for experiment runs.
//!
//! `classes.csv` has one row per class, `networks.csv` one row per generated
//! network and `violators.csv` the subset of networks whose encoding fails the
//! lattice audit. `regions.gp` plots average region counts against the class
//! parameter, one curve per setup.

use std::fs;
use std::path::{Path, PathBuf};

use nnpwl_core::rational::{format_decimal, format_rational};
use nnpwl_core::{ClassStats, ExperimentPlan, Mode};
use serde::{Deserialize, Serialize};

/// One experiment plan together with its results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setup {
    pub label: String,
    pub plan: ExperimentPlan,
    pub stats: Vec<ClassStats>,
}

impl Setup {
    pub fn new(plan: ExperimentPlan, stats: Vec<ClassStats>) -> Self {
        Setup { label: default_label(&plan), plan, stats }
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::VaryLayers => "layers",
        Mode::VaryWidth => "width",
    }
}

/// `layers-h3` or `width-l3`.
pub fn default_label(plan: &ExperimentPlan) -> String {
    match plan.mode {
        Mode::VaryLayers => format!("layers-h{}", plan.fixed),
        Mode::VaryWidth => format!("width-l{}", plan.fixed),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub setup: String,
    pub mode: String,
    pub fixed: usize,
    pub param: usize,
    pub networks: usize,
    /// Exact mean as `a/b`.
    pub avg_regions: String,
    pub avg_regions_decimal: String,
    pub max_regions: usize,
    pub min_regions: usize,
    pub violators: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkRow {
    pub setup: String,
    pub param: usize,
    pub index: usize,
    pub seed: u64,
    pub regions: usize,
    pub violating_pairs: usize,
    pub unordered_violating_pairs: usize,
}

pub fn class_rows(setups: &[Setup]) -> Vec<ClassRow> {
    setups
        .iter()
        .flat_map(|s| {
            s.stats.iter().map(move |c| ClassRow {
                setup: s.label.clone(),
                mode: mode_name(s.plan.mode).to_owned(),
                fixed: s.plan.fixed,
                param: c.param,
                networks: c.networks.len(),
                avg_regions: format_rational(&c.average),
                avg_regions_decimal: format_decimal(&c.average, 3),
                max_regions: c.max,
                min_regions: c.min,
                violators: c.violator_count(),
            })
        })
        .collect()
}

pub fn network_rows(setups: &[Setup]) -> Vec<NetworkRow> {
    setups
        .iter()
        .flat_map(|s| {
            s.stats.iter().flat_map(move |c| {
                c.networks.iter().map(move |n| NetworkRow {
                    setup: s.label.clone(),
                    param: c.param,
                    index: n.index,
                    seed: n.seed,
                    regions: n.regions,
                    violating_pairs: n.violations,
                    unordered_violating_pairs: n.unordered_violations,
                })
            })
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("nothing to report")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub classes: PathBuf,
    pub networks: PathBuf,
    pub violators: PathBuf,
    pub plot: PathBuf,
}

fn csv_text<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io { path: "<buffer>".into(), source: e.into_error() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const NETWORK_HEADER: &[&str] =
    &["setup", "param", "index", "seed", "regions", "violating_pairs", "unordered_violating_pairs"];

/// Gnuplot script over `classes.csv`, one curve per setup.
pub fn plot_script(setups: &[Setup]) -> String {
    let mut s = String::new();
    s.push_str("# Average nonempty regions per class.\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set key left top\n");
    s.push_str("set xlabel 'class parameter'\n");
    s.push_str("set ylabel 'average number of regions'\n");
    s.push_str("set terminal pngcairo size 800,500\n");
    s.push_str("set output 'regions.png'\n");
    s.push_str("plot \\\n");
    let clauses: Vec<String> = setups
        .iter()
        .map(|st| {
            format!(
                "  'classes.csv' every ::1 using (strcol(1) eq '{0}' ? $4 : 1/0):7 with linespoints title '{0}'",
                st.label
            )
        })
        .collect();
    s.push_str(&clauses.join(", \\\n"));
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), ReportError> {
    fs::write(path, text).map_err(|source| ReportError::Io { path: path.display().to_string(), source })
}

/// Writes the three tables and the plot script into `dir`, creating it.
pub fn emit_report(setups: &[Setup], dir: &Path) -> Result<ReportPaths, ReportError> {
    if setups.is_empty() || setups.iter().all(|s| s.stats.is_empty()) {
        return Err(ReportError::Empty);
    }
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.display().to_string(), source })?;
    let paths = ReportPaths {
        classes: dir.join("classes.csv"),
        networks: dir.join("networks.csv"),
        violators: dir.join("violators.csv"),
        plot: dir.join("regions.gp"),
    };
    let nets = network_rows(setups);
    let violators: Vec<NetworkRow> = nets.iter().filter(|n| n.violating_pairs > 0).cloned().collect();
    write(&paths.classes, &csv_text(&class_rows(setups), &[])?)?;
    write(&paths.networks, &csv_text(&nets, NETWORK_HEADER)?)?;
    write(&paths.violators, &csv_text(&violators, NETWORK_HEADER)?)?;
    write(&paths.plot, &plot_script(setups))?;
    Ok(paths)
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ReportError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn read_class_csv(path: &Path) -> Result<Vec<ClassRow>, ReportError> {
    read_rows(path)
}

pub fn read_network_csv(path: &Path) -> Result<Vec<NetworkRow>, ReportError> {
    read_rows(path)
}
