//! Exact translation of ReLU–TId feedforward networks into explicit
//! ⟨affine piece, polyhedral region⟩ form, with lattice-property audits and
//! max–min lattice representations.
//!
//! Everything runs on exact rationals. The crate is `no_std` (it needs
//! `alloc`); the `parallel` feature pulls in `std` and explores independent
//! recursion branches and audit rows on a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod affine;
pub mod experiment;
pub mod lattice;
pub mod lp;
pub mod network;
pub mod polyhedron;
pub mod rational;
pub mod translate;

pub use affine::{AffineFunc, ArityMismatch, Point};
pub use experiment::{run_experiment, ClassStats, ExperimentPlan, Mode};
pub use lattice::{
    audit, build_lattice, eval_lattice, is_above, repair_split, AboveCertificate, LatticeAudit, LatticeError,
    LatticeRepresentation, RepairReport,
};
pub use lp::{is_feasible, solve, Constraint, LinearProgram, LpOutcome, Relation, Sense};
pub use network::{generate, GeneratorConfig, Network, NetworkError};
pub use polyhedron::{HalfSpace, Polyhedron, Side};
pub use rational::{parse_rational, Rational};
pub use translate::{
    classify_layer, nn2pwl, recurse_layer, RegionPiece, RegionalRepresentation, Symbol, SymbolClassification,
    SymbolTrace, TranslateOptions,
};
