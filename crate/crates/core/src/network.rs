//! ReLU–TId feedforward networks: data model, exact forward pass and the
//! seeded random generator used by the experiments.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::{AffineFunc, ArityMismatch, Point};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("a network needs at least one non-input layer")]
    NoLayers,
    #[error("layer {0} has no nodes")]
    EmptyLayer(usize),
    #[error("input layer has no nodes")]
    NoInputs,
    #[error("node {node} of layer {layer} has arity {found}, expected {expected}")]
    NodeArity { layer: usize, node: usize, expected: usize, found: usize },
    #[error("layer sizes list {given} layers but {found} were supplied")]
    LayerCount { given: usize, found: usize },
    #[error("layer {layer} declares {declared} nodes but has {found}")]
    LayerWidth { layer: usize, declared: usize, found: usize },
    #[error(transparent)]
    Arity(#[from] ArityMismatch),
    #[error("input coordinate {0} lies outside [0, 1]")]
    InputOutsideCube(usize),
}

pub fn relu(t: &Rational) -> Rational {
    if t.is_negative() {
        Rational::zero()
    } else {
        t.clone()
    }
}

/// Truncated identity `max(0, min(1, t))`.
pub fn tid(t: &Rational) -> Rational {
    if t.is_negative() {
        Rational::zero()
    } else if *t > Rational::one() {
        Rational::one()
    } else {
        t.clone()
    }
}

/// Layers `L₁ … L_Λ`; hidden layers apply ReLU, the last applies TId.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    inputs: usize,
    layers: Vec<Vec<AffineFunc>>,
}

impl Network {
    /// `layers[i][j]` is the function of node `j` in layer `i + 1`.
    pub fn new(inputs: usize, layers: Vec<Vec<AffineFunc>>) -> Result<Self, NetworkError> {
        if inputs == 0 {
            return Err(NetworkError::NoInputs);
        }
        if layers.is_empty() {
            return Err(NetworkError::NoLayers);
        }
        let mut prev = inputs;
        for (i, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(NetworkError::EmptyLayer(i + 1));
            }
            for (j, f) in layer.iter().enumerate() {
                if f.arity() != prev {
                    return Err(NetworkError::NodeArity {
                        layer: i + 1,
                        node: j + 1,
                        expected: prev,
                        found: f.arity(),
                    });
                }
            }
            prev = layer.len();
        }
        Ok(Network { inputs, layers })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.layers.last().map_or(0, Vec::len)
    }

    /// Λ, the number of non-input layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `|L₀|, …, |L_Λ|`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        core::iter::once(self.inputs).chain(self.layers.iter().map(Vec::len)).collect()
    }

    /// Node functions of layer `i` (1-based, as in `L_i`).
    pub fn layer(&self, i: usize) -> &[AffineFunc] {
        &self.layers[i - 1]
    }

    pub fn layers(&self) -> &[Vec<AffineFunc>] {
        &self.layers
    }

    pub fn hidden_neurons(&self) -> usize {
        self.layers[..self.layers.len() - 1].iter().map(Vec::len).sum()
    }

    /// Exact outputs of every layer `L₁(x), L₂(L₁(x)), …`; the last entry is `N(x)`.
    pub fn forward_layers(&self, x: &Point) -> Result<Vec<Vec<Rational>>, NetworkError> {
        if x.dim() != self.inputs {
            return Err(ArityMismatch { expected: self.inputs, found: x.dim() }.into());
        }
        if let Some(k) = x.coords().iter().position(|c| c.is_negative() || *c > Rational::one()) {
            return Err(NetworkError::InputOutsideCube(k));
        }
        let last = self.layers.len() - 1;
        let mut out: Vec<Vec<Rational>> = Vec::with_capacity(self.layers.len());
        let mut current = x.coords().to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let activate = if i == last { tid } else { relu };
            let next: Vec<Rational> = layer.iter().map(|f| activate(&f.eval_unchecked(&current))).collect();
            out.push(next.clone());
            current = next;
        }
        Ok(out)
    }

    pub fn forward(&self, x: &Point) -> Result<Vec<Rational>, NetworkError> {
        Ok(self.forward_layers(x)?.pop().expect("at least one layer"))
    }

    /// Largest absolute row sum over all layers, multiplied together: a Lipschitz
    /// bound for `N` in the max-norm (both activations are 1-Lipschitz).
    pub fn lipschitz_bound(&self) -> Rational {
        self.layers.iter().fold(Rational::one(), |acc, layer| {
            let row_max = layer
                .iter()
                .map(|f| f.coeffs().iter().map(Signed::abs).fold(Rational::zero(), |s, c| s + c))
                .max()
                .unwrap_or_else(Rational::zero);
            acc * row_max
        })
    }
}

/// Shape and seed of a random network whose weights and biases are `i + k/D`,
/// `i` uniform in `{-1, 0, 1}` and `k` uniform in `{0, …, D-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub inputs: usize,
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub outputs: usize,
    pub seed: u64,
    pub denominator_grid: u32,
}

pub const DEFAULT_GRID: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("inputs, hidden width and outputs must all be positive")]
    ZeroCount,
    #[error("denominator grid must be at least 2, got {0}")]
    Grid(u32),
}

impl GeneratorConfig {
    pub fn new(inputs: usize, hidden_layers: usize, hidden_width: usize, outputs: usize, seed: u64) -> Self {
        GeneratorConfig { inputs, hidden_layers, hidden_width, outputs, seed, denominator_grid: DEFAULT_GRID }
    }

    pub fn with_grid(mut self, grid: u32) -> Self {
        self.denominator_grid = grid;
        self
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.inputs == 0 || self.outputs == 0 || (self.hidden_layers > 0 && self.hidden_width == 0) {
            return Err(GeneratorError::ZeroCount);
        }
        if self.denominator_grid < 2 {
            return Err(GeneratorError::Grid(self.denominator_grid));
        }
        Ok(())
    }
}

/// Draws one `i + k/D` value.
pub fn sample_weight<R: Rng + ?Sized>(rng: &mut R, grid: u32) -> Rational {
    let i: i64 = rng.gen_range(-1..=1);
    let k: u32 = rng.gen_range(0..grid);
    Rational::from_integer(BigInt::from(i)) + Rational::new(BigInt::from(k), BigInt::from(grid))
}

/// Deterministic for a fixed config: same seed, same network.
pub fn generate(cfg: &GeneratorConfig) -> Result<Network, GeneratorError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut widths = Vec::with_capacity(cfg.hidden_layers + 1);
    widths.extend(core::iter::repeat_n(cfg.hidden_width, cfg.hidden_layers));
    widths.push(cfg.outputs);
    let mut prev = cfg.inputs;
    let mut layers = Vec::with_capacity(widths.len());
    for width in widths {
        let layer = (0..width)
            .map(|_| {
                let coeffs = (0..prev).map(|_| sample_weight(&mut rng, cfg.denominator_grid)).collect();
                let bias = sample_weight(&mut rng, cfg.denominator_grid);
                AffineFunc::new(coeffs, bias)
            })
            .collect();
        layers.push(layer);
        prev = width;
    }
    Ok(Network::new(cfg.inputs, layers).expect("generated shapes are consistent"))
}
