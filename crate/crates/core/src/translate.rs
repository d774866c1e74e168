//! Translation of ReLU–TId networks into pre-closed regional format.
//!
//! Every hidden node gets a symbol `≤`/`≥` (which side of `f_j^i ∘ f = 0` the
//! input lies on) and every output node one of `≤`/`≶`/`≥` (below 0, inside
//! `[0, 1]`, above 1). Each configuration of symbols yields a region (the cube
//! plus one batch of half-spaces per layer) and the affine piece the network
//! computes on it. The recursion descends one layer at a time, carrying the
//! region built so far and the composed affine map `L_{i-1} ∘ ⋯ ∘ L₁`.
//!
//! A region counts as *empty* when it has no interior. Closed regions of lower
//! dimension are covered by their full-dimensional neighbours and carry no
//! information. A node whose composed function is identically zero (or, at the
//! output, identically one) makes two sibling branches coincide; the branch that
//! the activation's own case split does not select (`ReLU(t) = 0` for `t < 0`,
//! `TId(t) = 0` for `t < 0`, `TId(t) = 1` for `t > 1`) is treated as empty too.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::affine::{AffineFunc, ArityMismatch, Point};
use crate::network::Network;
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::rational::{one, Rational};

/// Node symbol, ordered `≤ < ≶ < ≥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Le,
    Mid,
    Ge,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Le => "<=",
            Symbol::Mid => "<>",
            Symbol::Ge => ">=",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed symbol trace `{0}`")]
pub struct TraceParseError(pub alloc::string::String);

impl FromStr for Symbol {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "<=" | "≤" => Ok(Symbol::Le),
            "<>" | "≶" => Ok(Symbol::Mid),
            ">=" | "≥" => Ok(Symbol::Ge),
            other => Err(TraceParseError(other.into())),
        }
    }
}

/// Symbols chosen for every hidden layer, then for the output node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolTrace {
    pub hidden: Vec<Vec<Symbol>>,
    pub output: Symbol,
}

impl fmt::Display for SymbolTrace {
    /// `<=,>=;<>`: hidden layers as comma lists, `;`-separated, output last.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for layer in &self.hidden {
            for (j, s) in layer.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                f.write_str(s.as_str())?;
            }
            f.write_str(";")?;
        }
        f.write_str(self.output.as_str())
    }
}

impl FromStr for SymbolTrace {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TraceParseError(s.into());
        let mut parts: Vec<&str> = s.split(';').collect();
        let output = parts.pop().ok_or_else(err)?.parse().map_err(|_| err())?;
        let hidden = parts
            .into_iter()
            .map(|layer| {
                layer
                    .split(',')
                    .map(|t| t.parse::<Symbol>().ok().filter(|s| *s != Symbol::Mid))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(err)
            })
            .collect::<Result<_, _>>()?;
        Ok(SymbolTrace { hidden, output })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPiece {
    pub piece: AffineFunc,
    pub region: Polyhedron,
    pub trace: SymbolTrace,
    /// Set when the region has no interior; only ever true in unpruned output.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PruneFlags {
    pub prune_empty: bool,
    pub classify_hyperplanes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Skip recursive calls and output pairs whose region is empty.
    pub prune_empty: bool,
    /// Restrict hidden-layer symbols to sides the node hyperplane leaves nonempty
    /// on the unit cube.
    pub classify_hyperplanes: bool,
    /// Explore sibling branches concurrently (needs the `parallel` feature;
    /// ignored otherwise). Output is identical either way.
    pub parallel: bool,
}

impl TranslateOptions {
    pub const BASE: TranslateOptions =
        TranslateOptions { prune_empty: false, classify_hyperplanes: false, parallel: false };

    pub fn flags(&self) -> PruneFlags {
        PruneFlags { prune_empty: self.prune_empty, classify_hyperplanes: self.classify_hyperplanes }
    }
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions { prune_empty: true, classify_hyperplanes: true, parallel: false }
    }
}

/// `Ξ_N = ⟨Ξ₁, …, Ξ_ν⟩`, each `Ξ_k` sorted by symbol trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionalRepresentation {
    pub input_dim: usize,
    pub outputs: Vec<Vec<RegionPiece>>,
    pub flags: PruneFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("output index {0} out of range")]
    NoSuchOutput(usize),
    #[error("no region contains the point")]
    Uncovered,
    #[error(transparent)]
    Arity(#[from] ArityMismatch),
}

impl RegionalRepresentation {
    pub fn empty(input_dim: usize, outputs: usize, flags: PruneFlags) -> Self {
        RegionalRepresentation { input_dim, outputs: vec![Vec::new(); outputs], flags }
    }

    pub fn total_pairs(&self) -> usize {
        self.outputs.iter().map(Vec::len).sum()
    }

    /// Pairs of `Ξ_k` whose region is not empty.
    pub fn nonempty(&self, k: usize) -> impl Iterator<Item = &RegionPiece> {
        self.outputs[k].iter().filter(|p| !p.empty)
    }

    pub fn nonempty_count(&self, k: usize) -> usize {
        self.nonempty(k).count()
    }

    /// Drops empty pairs, keeping order.
    pub fn without_empty(&self) -> RegionalRepresentation {
        RegionalRepresentation {
            input_dim: self.input_dim,
            outputs: self.outputs.iter().map(|xs| xs.iter().filter(|p| !p.empty).cloned().collect()).collect(),
            flags: self.flags,
        }
    }

    /// Value of output `k` at `x` from the first region containing it.
    pub fn eval(&self, k: usize, x: &Point) -> Result<Rational, EvalError> {
        let pairs = self.outputs.get(k).ok_or(EvalError::NoSuchOutput(k))?;
        eval_pieces(pairs, x)
    }

    fn sort_canonical(&mut self) {
        for xs in &mut self.outputs {
            xs.sort_by(|a, b| a.trace.cmp(&b.trace));
        }
    }
}

/// Value at `x` of the first pair whose region contains `x`.
pub fn eval_pieces(pairs: &[RegionPiece], x: &Point) -> Result<Rational, EvalError> {
    for p in pairs {
        if p.region.contains(x, false)? {
            return Ok(p.piece.eval(x)?);
        }
    }
    Err(EvalError::Uncovered)
}

/// Which hidden-node symbols admit a nonempty half-space on the unit cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admitted {
    Both,
    OnlyLe,
    OnlyGe,
}

impl Admitted {
    pub fn symbols(self) -> &'static [Symbol] {
        match self {
            Admitted::Both => &[Symbol::Le, Symbol::Ge],
            Admitted::OnlyLe => &[Symbol::Le],
            Admitted::OnlyGe => &[Symbol::Ge],
        }
    }

    pub fn admits(self, s: Symbol) -> bool {
        self.symbols().contains(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClass {
    pub admitted: Admitted,
    /// Maximum of the composed node function over the cube.
    pub max: Rational,
    /// Minimum of the composed node function over the cube.
    pub min: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolClassification {
    pub nodes: Vec<NodeClass>,
}

impl SymbolClassification {
    /// Number of symbol tuples in `I₁ × ⋯ × I_w`.
    pub fn combinations(&self) -> usize {
        self.nodes.iter().map(|n| n.admitted.symbols().len()).product()
    }
}

/// Classifies the nodes of hidden layer `i` against the composed functions
/// `f_j^i ∘ f` by maximising and minimising each over `[0,1]^{|L₀|}`.
///
/// `≤` alone when `M ≤ 0`, `≥` alone when `m ≥ 0`, both otherwise. For a
/// constant composed function `c` the single admitted symbol is `≥` when
/// `c ≥ 0` and `≤` when `c < 0`.
pub fn classify_layer(net: &Network, i: usize, f: &[AffineFunc]) -> Result<SymbolClassification, ArityMismatch> {
    let composed = compose_layer(net, i, f)?;
    Ok(classify_composed(&composed))
}

fn classify_composed(composed: &[AffineFunc]) -> SymbolClassification {
    let n = composed.first().map_or(0, AffineFunc::arity);
    let cube = Polyhedron::unit_cube(n.max(1)).expect("positive dimension");
    let nodes = composed
        .iter()
        .map(|g| {
            let max =
                cube.maximize_over(g).ok().and_then(|o| o.optimum().cloned()).expect("cube is bounded and nonempty");
            let min =
                cube.minimize_over(g).ok().and_then(|o| o.optimum().cloned()).expect("cube is bounded and nonempty");
            let admitted = if g.is_constant() {
                if g.bias().is_negative() {
                    Admitted::OnlyLe
                } else {
                    Admitted::OnlyGe
                }
            } else if !max.is_positive() {
                Admitted::OnlyLe
            } else if !min.is_negative() {
                Admitted::OnlyGe
            } else {
                Admitted::Both
            };
            NodeClass { admitted, max, min }
        })
        .collect();
    SymbolClassification { nodes }
}

fn compose_layer(net: &Network, i: usize, f: &[AffineFunc]) -> Result<Vec<AffineFunc>, ArityMismatch> {
    net.layer(i).iter().map(|node| node.compose(f)).collect()
}

/// State of one recursion branch entering layer `layer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// 1-based index of the layer about to be processed.
    pub layer: usize,
    pub region: Polyhedron,
    /// `L_{layer-1} ∘ ⋯ ∘ L₁` as affine maps valid on `region`.
    pub funcs: Vec<AffineFunc>,
    pub trace: Vec<Vec<Symbol>>,
    /// Some hidden node on the path was a zero function under symbol `≤`.
    pub shadowed: bool,
}

impl Branch {
    /// The root: the unit cube and the projections, entering `L₁`.
    pub fn root(net: &Network) -> Branch {
        let n = net.inputs();
        Branch {
            layer: 1,
            region: Polyhedron::unit_cube(n).expect("networks have inputs"),
            funcs: AffineFunc::projections(n),
            trace: Vec::new(),
            shadowed: false,
        }
    }

    /// Applies hidden-layer symbols: adds `f_j^i ∘ f ⋈_j 0` to the region and
    /// replaces the maps by `χ(⋈_j)·(f_j^i ∘ f)`.
    pub fn descend(&self, net: &Network, symbols: &[Symbol]) -> Result<Branch, ArityMismatch> {
        let composed = compose_layer(net, self.layer, &self.funcs)?;
        Ok(self.descend_composed(&composed, symbols))
    }

    fn descend_composed(&self, composed: &[AffineFunc], symbols: &[Symbol]) -> Branch {
        assert_eq!(composed.len(), symbols.len(), "one symbol per node");
        let n = self.region.dim();
        let mut halfspaces = Vec::with_capacity(composed.len());
        let mut funcs = Vec::with_capacity(composed.len());
        let mut shadowed = self.shadowed;
        for (g, s) in composed.iter().zip(symbols) {
            match s {
                Symbol::Le => {
                    shadowed |= is_constant_value(g, &Rational::zero());
                    halfspaces.push(HalfSpace::le(g.clone()));
                    funcs.push(AffineFunc::zero(n));
                }
                Symbol::Ge => {
                    halfspaces.push(HalfSpace::ge(g.clone()));
                    funcs.push(g.clone());
                }
                Symbol::Mid => panic!("hidden nodes take only <= or >="),
            }
        }
        let mut trace = self.trace.clone();
        trace.push(symbols.to_vec());
        Branch {
            layer: self.layer + 1,
            region: self.region.extend(halfspaces).expect("composed maps share the input arity"),
            funcs,
            trace,
            shadowed,
        }
    }

    fn is_negligible(&self) -> bool {
        self.shadowed || !self.region.has_interior()
    }
}

fn is_constant_value(g: &AffineFunc, value: &Rational) -> bool {
    g.is_constant() && g.bias() == value
}

/// All tuples of `choices[0] × choices[1] × ⋯` in lexicographic order.
fn symbol_product(choices: &[&'static [Symbol]]) -> Vec<Vec<Symbol>> {
    let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
    for options in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Runs the recursion from `branch`, appending the produced pairs to `acc`.
///
/// Pairs are appended in generation order; [`nn2pwl`] sorts afterwards.
pub fn recurse_layer(acc: &mut RegionalRepresentation, net: &Network, branch: &Branch, opts: &TranslateOptions) {
    let produced = explore(net, branch, opts);
    for (k, pairs) in produced.into_iter().enumerate() {
        acc.outputs[k].extend(pairs);
    }
}

fn explore(net: &Network, branch: &Branch, opts: &TranslateOptions) -> Vec<Vec<RegionPiece>> {
    if branch.layer == net.depth() {
        return output_pairs(net, branch, opts);
    }
    let composed = compose_layer(net, branch.layer, &branch.funcs).expect("branch maps match layer arity");
    let combos = if opts.classify_hyperplanes {
        let class = classify_composed(&composed);
        let choices: Vec<&'static [Symbol]> = class.nodes.iter().map(|c| c.admitted.symbols()).collect();
        symbol_product(&choices)
    } else {
        symbol_product(&vec![Admitted::Both.symbols(); composed.len()])
    };

    let visit = |symbols: &Vec<Symbol>| -> Option<Vec<Vec<RegionPiece>>> {
        let child = branch.descend_composed(&composed, symbols);
        if opts.prune_empty && child.is_negligible() {
            return None;
        }
        Some(explore(net, &child, opts))
    };

    let parts: Vec<Vec<Vec<RegionPiece>>> = run_branches(&combos, opts.parallel, visit);
    let mut merged: Vec<Vec<RegionPiece>> = vec![Vec::new(); net.outputs()];
    for part in parts {
        for (k, pairs) in part.into_iter().enumerate() {
            merged[k].extend(pairs);
        }
    }
    merged
}

#[cfg(feature = "parallel")]
fn run_branches<F>(combos: &[Vec<Symbol>], parallel: bool, visit: F) -> Vec<Vec<Vec<RegionPiece>>>
where
    F: Fn(&Vec<Symbol>) -> Option<Vec<Vec<RegionPiece>>> + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        combos.par_iter().filter_map(visit).collect()
    } else {
        combos.iter().filter_map(visit).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_branches<F>(combos: &[Vec<Symbol>], _parallel: bool, visit: F) -> Vec<Vec<Vec<RegionPiece>>>
where
    F: Fn(&Vec<Symbol>) -> Option<Vec<Vec<RegionPiece>>>,
{
    combos.iter().filter_map(visit).collect()
}

fn output_pairs(net: &Network, branch: &Branch, opts: &TranslateOptions) -> Vec<Vec<RegionPiece>> {
    let n = branch.region.dim();
    let last = net.layer(net.depth());
    last.iter()
        .map(|node| {
            let g = node.compose(&branch.funcs).expect("branch maps match layer arity");
            let g_minus_one = g.offset(&-one());
            let cases = [
                (
                    Symbol::Le,
                    AffineFunc::zero(n),
                    vec![HalfSpace::le(g.clone())],
                    is_constant_value(&g, &Rational::zero()),
                ),
                (Symbol::Mid, g.clone(), vec![HalfSpace::ge(g.clone()), HalfSpace::le(g_minus_one.clone())], false),
                (
                    Symbol::Ge,
                    AffineFunc::one(n),
                    vec![HalfSpace::ge(g_minus_one)],
                    is_constant_value(&g, &Rational::one()),
                ),
            ];
            cases
                .into_iter()
                .filter_map(|(symbol, piece, halfspaces, tie)| {
                    let region = branch.region.extend(halfspaces).expect("same arity");
                    let empty = branch.shadowed || tie || !region.has_interior();
                    if opts.prune_empty && empty {
                        return None;
                    }
                    let trace = SymbolTrace { hidden: branch.trace.clone(), output: symbol };
                    Some(RegionPiece { piece, region, trace, empty })
                })
                .collect()
        })
        .collect()
}

/// Translates `net` into `Ξ_N`, one list of ⟨piece, region⟩ pairs per output.
///
/// With both accelerations off this emits `3 · 2^{|L₁|+⋯+|L_{Λ-1}|}` pairs per
/// output, empty ones flagged. With either on, the nonempty pairs are the same.
pub fn nn2pwl(net: &Network, opts: &TranslateOptions) -> RegionalRepresentation {
    let mut acc = RegionalRepresentation::empty(net.inputs(), net.outputs(), opts.flags());
    recurse_layer(&mut acc, net, &Branch::root(net), opts);
    acc.sort_canonical();
    acc
}

/// Pair count of the base algorithm for every output together.
pub fn unpruned_pair_count(net: &Network) -> usize {
    3 * net.outputs() * (1usize << net.hidden_neurons())
}
