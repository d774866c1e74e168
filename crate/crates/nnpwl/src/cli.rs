//! The `nnpwl` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use nnpwl_core::lattice::DEFAULT_MAX_SPLITS;
use nnpwl_core::network::DEFAULT_GRID;
use nnpwl_core::rational::{format_decimal, format_rational};
use nnpwl_core::{
    audit, build_lattice, generate, nn2pwl, repair_split, run_experiment, ExperimentPlan, GeneratorConfig, Mode,
    Rational, RegionPiece, RegionalRepresentation, TranslateOptions,
};

use crate::format::{self, AuditDoc, LatticeDoc, RegionalDoc, RegionalFormat, RepairDoc};
use crate::report::{self, Setup};

#[derive(Debug, Parser)]
#[command(name = "nnpwl", version, about = "Exact piecewise-linear translation of ReLU-TId networks")]
pub struct Cli {
    /// Render rationals in human-readable output as decimals with this many places.
    #[arg(long, global = true, value_name = "PLACES")]
    pub decimal: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a network into regional format (JSON).
    Translate {
        network: PathBuf,
        /// Keep pairs whose region is empty (they are flagged).
        #[arg(long)]
        no_prune_empty: bool,
        /// Do not restrict hidden symbols by hyperplane classification.
        #[arg(long)]
        no_classify: bool,
        /// Explore branches on one thread.
        #[arg(long)]
        sequential: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a network, or a regional document with --regional, at a point.
    Eval {
        file: PathBuf,
        /// Comma-separated coordinates, e.g. `1/8,1/2` or `0.125,0.5`.
        point: String,
        /// Treat FILE as a regional document instead of a network.
        #[arg(long)]
        regional: bool,
        /// Print every layer's outputs, not just the last.
        #[arg(long, conflicts_with = "regional")]
        layers: bool,
    },
    /// Audit each output's encoding for the lattice property.
    CheckLattice {
        regional: PathBuf,
        /// Split regions until the property holds (or the cap is hit).
        #[arg(long)]
        repair: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_SPLITS, requires = "repair")]
        max_iter: usize,
        /// Write the (possibly repaired) regional document here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Region counts per output.
    Stats { regional: PathBuf },
    /// Generate a random network (JSON).
    Generate {
        #[arg(long)]
        inputs: usize,
        #[arg(long)]
        hidden_layers: usize,
        #[arg(long, default_value_t = 0)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        outputs: usize,
        #[arg(long)]
        seed: u64,
        /// Denominator grid `D` of the weights `i + k/D`.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a region-counting experiment and write CSV tables plus a plot script.
    Experiment {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Inputs and width for `layers`; hidden layer count for `width`.
        #[arg(long)]
        fixed: usize,
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        per_class: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u32,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Layers,
    Width,
}

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable input (exit 1).
    Input(anyhow::Error),
    /// An operation broke an invariant it should maintain (exit 2).
    Invariant(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Invariant(e) => e,
        }
    }
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn invariant<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invariant(e.into())
}

struct Render {
    decimal: Option<usize>,
}

impl Render {
    fn value(&self, v: &Rational) -> String {
        match self.decimal {
            Some(p) => format_decimal(v, p),
            None => format_rational(v),
        }
    }

    fn values(&self, vs: &[Rational]) -> String {
        vs.iter().map(|v| self.value(v)).collect::<Vec<_>>().join(" ")
    }
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())).map_err(input),
        None => out.write_all(text.as_bytes()).map_err(input),
    }
}

/// Runs one parsed command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let render = Render { decimal: cli.decimal };
    match cli.command {
        Command::Translate { network, no_prune_empty, no_classify, sequential, output } => {
            let net = format::read_network(&network).map_err(input)?;
            let opts = TranslateOptions {
                prune_empty: !no_prune_empty,
                classify_hyperplanes: !no_classify,
                parallel: !sequential,
            };
            let rep = nn2pwl(&net, &opts);
            emit(output.as_deref(), &format::regional_json(&rep), out)
        }
        Command::Eval { file, point, regional, layers } => {
            let x = format::parse_point(&point).map_err(input)?;
            if regional {
                let rep = format::read_regional(&file).map_err(input)?;
                if x.dim() != rep.input_dim {
                    return Err(input(anyhow!(
                        "point has {} coordinates, document expects {}",
                        x.dim(),
                        rep.input_dim
                    )));
                }
                if !x.in_unit_cube() {
                    return Err(input(anyhow!("point lies outside [0, 1]^{}", x.dim())));
                }
                let ys = (0..rep.outputs.len())
                    .map(|k| rep.eval(k, &x))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| invariant(anyhow!("regional evaluation failed: {e}")))?;
                writeln!(out, "{}", render.values(&ys)).map_err(input)
            } else {
                let net = format::read_network(&file).map_err(input)?;
                let all = net.forward_layers(&x).map_err(input)?;
                if layers {
                    let last = all.len();
                    for (i, ys) in all.iter().enumerate() {
                        let name = if i + 1 == last { "output".to_owned() } else { format!("layer {}", i + 1) };
                        writeln!(out, "{name}: {}", render.values(ys)).map_err(input)?;
                    }
                    Ok(())
                } else {
                    writeln!(out, "{}", render.values(all.last().expect("at least one layer"))).map_err(input)
                }
            }
        }
        Command::CheckLattice { regional, repair, max_iter, output } => {
            let rep = format::read_regional(&regional).map_err(input)?.without_empty();
            let (docs, repaired) = check_lattice(&rep, repair, max_iter)?;
            writeln!(out, "{}", format::to_json(&docs).trim_end()).map_err(input)?;
            if let Some(path) = output {
                let closed =
                    docs.iter().all(|d| d.repair.as_ref().map_or(d.violation_count, |r| r.final_violations) == 0);
                let format = if closed { RegionalFormat::Closed } else { RegionalFormat::PreClosed };
                let text = format::to_json(&RegionalDoc::from_representation(&repaired, format));
                emit(Some(&path), &text, out)?;
            }
            Ok(())
        }
        Command::Stats { regional } => {
            let rep = format::read_regional(&regional).map_err(input)?;
            for (k, pairs) in rep.outputs.iter().enumerate() {
                writeln!(out, "output {}: {} pairs, {} nonempty", k + 1, pairs.len(), rep.nonempty_count(k))
                    .map_err(input)?;
            }
            writeln!(out, "total: {} pairs", rep.total_pairs()).map_err(input)
        }
        Command::Generate { inputs, hidden_layers, width, outputs, seed, grid, output } => {
            let cfg = GeneratorConfig::new(inputs, hidden_layers, width, outputs, seed).with_grid(grid);
            let net = generate(&cfg).map_err(input)?;
            emit(output.as_deref(), &format::network_json(&net), out)
        }
        Command::Experiment { mode, fixed, classes, per_class, seed, grid, out_dir, sequential } => {
            let mode = match mode {
                ModeArg::Layers => Mode::VaryLayers,
                ModeArg::Width => Mode::VaryWidth,
            };
            let plan = ExperimentPlan { mode, fixed, classes, per_class, seed, grid };
            let stats = run_experiment(&plan, !sequential).map_err(|e| match e {
                nnpwl_core::experiment::ExperimentError::Audit { .. } => invariant(e),
                other => input(other),
            })?;
            let setups = vec![Setup::new(plan, stats)];
            let paths = report::emit_report(&setups, &out_dir).map_err(input)?;
            let setup = &setups[0];
            for c in &setup.stats {
                writeln!(
                    out,
                    "{} class {}: {} networks, regions avg {} max {} min {}, {} violating",
                    setup.label,
                    c.param,
                    c.networks.len(),
                    render.value(&c.average),
                    c.max,
                    c.min,
                    c.violator_count()
                )
                .map_err(input)?;
            }
            writeln!(out, "wrote {}", paths.classes.display()).map_err(input)
        }
    }
}

fn check_lattice(
    rep: &RegionalRepresentation,
    repair: bool,
    max_iter: usize,
) -> Result<(Vec<AuditDoc>, RegionalRepresentation), Failure> {
    let mut docs = Vec::with_capacity(rep.outputs.len());
    let mut repaired = rep.clone();
    for (k, pairs) in rep.outputs.iter().enumerate() {
        let a = audit(pairs).map_err(|e| invariant(anyhow!("output {}: {e}", k + 1)))?;
        let mut doc = AuditDoc::new(k, &a);
        if a.is_lattice() {
            let lat = build_lattice(pairs, &a).map_err(invariant)?;
            doc.lattice = Some(LatticeDoc::from_representation(&lat));
        } else if repair {
            let raw = pairs.iter().map(|p| (p.piece.clone(), p.region.clone())).collect();
            let (fixed, report) = repair_split(raw, max_iter).map_err(invariant)?;
            let traces = split_traces(pairs, &fixed);
            repaired.outputs[k] = fixed
                .iter()
                .zip(traces)
                .map(|((piece, region), trace)| RegionPiece {
                    piece: piece.clone(),
                    region: region.clone(),
                    trace,
                    empty: false,
                })
                .collect();
            if report.converged() {
                let a = audit(&fixed).map_err(invariant)?;
                let lat = build_lattice(&fixed, &a).map_err(invariant)?;
                doc.lattice = Some(LatticeDoc::from_representation(&lat));
            }
            doc.repair = Some(RepairDoc::from(&report));
        }
        docs.push(doc);
    }
    Ok((docs, repaired))
}

/// Repair only ever splits a pair in place, so every refined region extends the
/// inequality list of exactly one original region; it inherits that trace.
fn split_traces(
    original: &[RegionPiece],
    fixed: &[(nnpwl_core::AffineFunc, nnpwl_core::Polyhedron)],
) -> Vec<nnpwl_core::SymbolTrace> {
    fixed
        .iter()
        .map(|(piece, region)| {
            original
                .iter()
                .find(|p| {
                    &p.piece == piece
                        && region.halfspaces().len() >= p.region.halfspaces().len()
                        && region.halfspaces()[..p.region.halfspaces().len()] == *p.region.halfspaces()
                })
                .map(|p| p.trace.clone())
                .expect("refined region descends from an original pair")
        })
        .collect()
}
