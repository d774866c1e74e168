//! JSON documents for networks, regional representations, audits and lattice
//! representations. Every rational travels as a string, `a/b` on output and
//! `a/b` or a decimal on input, so round trips are exact.

use std::path::Path;

use nnpwl_core::lattice::RepairReport;
use nnpwl_core::rational::{format_rational, ParseRationalError};
use nnpwl_core::translate::{PruneFlags, TraceParseError};
use nnpwl_core::{
    parse_rational, AffineFunc, HalfSpace, LatticeAudit, LatticeRepresentation, Network, NetworkError, Polyhedron,
    Rational, RegionPiece, RegionalRepresentation, Side, SymbolTrace,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number {text:?} at {at}: {source}")]
    Number { at: String, text: String, source: ParseRationalError },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Trace(#[from] TraceParseError),
    #[error("{0}")]
    Shape(String),
}

fn number(text: &str, at: impl FnOnce() -> String) -> Result<Rational, FormatError> {
    parse_rational(text).map_err(|source| FormatError::Number { at: at(), text: text.to_owned(), source })
}

/// An affine function `coeffs · x + bias`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuncDoc {
    pub coeffs: Vec<String>,
    pub bias: String,
}

impl FuncDoc {
    pub fn from_func(f: &AffineFunc) -> Self {
        FuncDoc { coeffs: f.coeffs().iter().map(format_rational).collect(), bias: format_rational(f.bias()) }
    }

    pub fn to_func(&self, at: &str) -> Result<AffineFunc, FormatError> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, t)| number(t, || format!("{at}, coefficient {}", k + 1)))
            .collect::<Result<_, _>>()?;
        Ok(AffineFunc::new(coeffs, number(&self.bias, || format!("{at}, bias"))?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDoc {
    /// `|L₀|, |L₁|, …, |L_Λ|`.
    pub layer_sizes: Vec<usize>,
    /// `layers[i][j]` is node `j + 1` of layer `i + 1`.
    pub layers: Vec<Vec<FuncDoc>>,
}

impl NetworkDoc {
    pub fn from_network(net: &Network) -> Self {
        NetworkDoc {
            layer_sizes: net.layer_sizes(),
            layers: net.layers().iter().map(|l| l.iter().map(FuncDoc::from_func).collect()).collect(),
        }
    }

    pub fn to_network(&self) -> Result<Network, FormatError> {
        let Some((&inputs, widths)) = self.layer_sizes.split_first() else {
            return Err(FormatError::Shape("layer_sizes is empty".into()));
        };
        if widths.len() != self.layers.len() {
            return Err(NetworkError::LayerCount { given: widths.len(), found: self.layers.len() }.into());
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, (layer, &declared)) in self.layers.iter().zip(widths).enumerate() {
            if layer.len() != declared {
                return Err(NetworkError::LayerWidth { layer: i + 1, declared, found: layer.len() }.into());
            }
            let funcs = layer
                .iter()
                .enumerate()
                .map(|(j, f)| f.to_func(&format!("layer {}, node {}", i + 1, j + 1)))
                .collect::<Result<_, _>>()?;
            layers.push(funcs);
        }
        Ok(Network::new(inputs, layers)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationDoc {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

/// Half-space `coeffs · x + bias ⋈ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpaceDoc {
    pub coeffs: Vec<String>,
    pub bias: String,
    pub relation: RelationDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDoc {
    pub trace: String,
    pub empty: bool,
    pub piece: FuncDoc,
    pub region: Vec<HalfSpaceDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneFlagsDoc {
    pub prune_empty: bool,
    pub classify_hyperplanes: bool,
}

/// `pre-closed` for translator output; `closed` once every output passed a
/// lattice audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionalFormat {
    PreClosed,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionalDoc {
    pub format: RegionalFormat,
    pub input_dim: usize,
    pub outputs: usize,
    pub prune_flags: PruneFlagsDoc,
    /// One list of pairs per output.
    pub xi: Vec<Vec<PairDoc>>,
}

fn region_doc(region: &Polyhedron) -> Vec<HalfSpaceDoc> {
    region
        .halfspaces()
        .iter()
        .map(|h| {
            let f = FuncDoc::from_func(&h.func);
            let relation = match h.side {
                Side::Ge => RelationDoc::Ge,
                Side::Le => RelationDoc::Le,
            };
            HalfSpaceDoc { coeffs: f.coeffs, bias: f.bias, relation }
        })
        .collect()
}

fn region_from_doc(dim: usize, hs: &[HalfSpaceDoc], at: &str) -> Result<Polyhedron, FormatError> {
    let halfspaces = hs
        .iter()
        .enumerate()
        .map(|(r, h)| {
            let f =
                FuncDoc { coeffs: h.coeffs.clone(), bias: h.bias.clone() }.to_func(&format!("{at}, row {}", r + 1))?;
            Ok(match h.relation {
                RelationDoc::Ge => HalfSpace::ge(f),
                RelationDoc::Le => HalfSpace::le(f),
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Polyhedron::from_halfspaces(dim, halfspaces).map_err(|e| FormatError::Shape(format!("{at}: {e}")))
}

impl RegionalDoc {
    pub fn from_representation(rep: &RegionalRepresentation, format: RegionalFormat) -> Self {
        let xi = rep
            .outputs
            .iter()
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|p| PairDoc {
                        trace: p.trace.to_string(),
                        empty: p.empty,
                        piece: FuncDoc::from_func(&p.piece),
                        region: region_doc(&p.region),
                    })
                    .collect()
            })
            .collect();
        RegionalDoc {
            format,
            input_dim: rep.input_dim,
            outputs: rep.outputs.len(),
            prune_flags: PruneFlagsDoc {
                prune_empty: rep.flags.prune_empty,
                classify_hyperplanes: rep.flags.classify_hyperplanes,
            },
            xi,
        }
    }

    pub fn to_representation(&self) -> Result<RegionalRepresentation, FormatError> {
        if self.xi.len() != self.outputs {
            return Err(FormatError::Shape(format!("outputs = {} but {} pair lists", self.outputs, self.xi.len())));
        }
        let n = self.input_dim;
        let mut outputs = Vec::with_capacity(self.xi.len());
        for (k, pairs) in self.xi.iter().enumerate() {
            let mut list = Vec::with_capacity(pairs.len());
            for (idx, p) in pairs.iter().enumerate() {
                let at = format!("output {}, pair {}", k + 1, idx + 1);
                let piece = p.piece.to_func(&at)?;
                if piece.arity() != n {
                    return Err(FormatError::Shape(format!("{at}: piece arity {} != input_dim {n}", piece.arity())));
                }
                let region = region_from_doc(n, &p.region, &at)?;
                let trace: SymbolTrace = p.trace.parse()?;
                list.push(RegionPiece { piece, region, trace, empty: p.empty });
            }
            outputs.push(list);
        }
        let flags = PruneFlags {
            prune_empty: self.prune_flags.prune_empty,
            classify_hyperplanes: self.prune_flags.classify_hyperplanes,
        };
        Ok(RegionalRepresentation { input_dim: n, outputs, flags })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairDoc {
    pub iterations: usize,
    pub initial_violations: usize,
    pub final_violations: usize,
    pub stalled: bool,
}

impl From<&RepairReport> for RepairDoc {
    fn from(r: &RepairReport) -> Self {
        RepairDoc {
            iterations: r.iterations,
            initial_violations: r.initial_violations,
            final_violations: r.final_violations,
            stalled: r.stalled,
        }
    }
}

/// Lattice audit of one output's encoding. Indices are 0-based positions in
/// the pair list; violating pairs are ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditDoc {
    pub output: usize,
    pub pairs: usize,
    pub violation_count: usize,
    pub unordered_violation_count: usize,
    pub violating_pairs: Vec<(usize, usize)>,
    /// Row `k`, column `j` is `1` when piece `k` is above piece `j` over region `j`.
    pub above_matrix: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair: Option<RepairDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeDoc>,
}

impl AuditDoc {
    pub fn new(output: usize, audit: &LatticeAudit) -> Self {
        let above_matrix =
            audit.above.iter().map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect();
        AuditDoc {
            output,
            pairs: audit.size(),
            violation_count: audit.violation_count(),
            unordered_violation_count: audit.unordered_violation_count(),
            violating_pairs: audit.violating_pairs.clone(),
            above_matrix,
            repair: None,
            lattice: None,
        }
    }
}

/// `f(x) = max_j min_{k ∈ K_j} p_k(x)` as a piece table plus index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub pieces: Vec<FuncDoc>,
    pub k_sets: Vec<Vec<usize>>,
}

impl LatticeDoc {
    pub fn from_representation(rep: &LatticeRepresentation) -> Self {
        LatticeDoc { pieces: rep.pieces.iter().map(FuncDoc::from_func).collect(), k_sets: rep.k_sets.clone() }
    }

    pub fn to_representation(&self) -> Result<LatticeRepresentation, FormatError> {
        let pieces: Vec<AffineFunc> = self
            .pieces
            .iter()
            .enumerate()
            .map(|(k, f)| f.to_func(&format!("piece {}", k + 1)))
            .collect::<Result<_, _>>()?;
        let bad =
            self.k_sets.iter().enumerate().find(|(j, ks)| !ks.contains(j) || ks.iter().any(|&k| k >= pieces.len()));
        if let Some((j, _)) = bad {
            return Err(FormatError::Shape(format!("K-set {j} must contain {j} and index existing pieces")));
        }
        if self.k_sets.len() != pieces.len() {
            return Err(FormatError::Shape("one K-set per piece required".into()));
        }
        Ok(LatticeRepresentation { pieces, k_sets: self.k_sets.clone() })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialise");
    s.push('\n');
    s
}

pub fn read_network(path: &Path) -> Result<Network, FormatError> {
    read_json::<NetworkDoc>(path)?.to_network()
}

pub fn read_regional(path: &Path) -> Result<RegionalRepresentation, FormatError> {
    read_json::<RegionalDoc>(path)?.to_representation()
}

pub fn network_json(net: &Network) -> String {
    to_json(&NetworkDoc::from_network(net))
}

pub fn regional_json(rep: &RegionalRepresentation) -> String {
    to_json(&RegionalDoc::from_representation(rep, RegionalFormat::PreClosed))
}

/// Parses `a,b,…` where each entry is a decimal or `p/q`.
pub fn parse_point(text: &str) -> Result<nnpwl_core::Point, FormatError> {
    let coords = text
        .split(',')
        .enumerate()
        .map(|(k, t)| number(t.trim(), || format!("point coordinate {}", k + 1)))
        .collect::<Result<_, _>>()?;
    Ok(nnpwl_core::Point::new(coords))
}
