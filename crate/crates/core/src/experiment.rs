//! Region-complexity experiments over populations of random networks.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::lattice::{audit, LatticeError};
use crate::network::{generate, GeneratorConfig, GeneratorError};
use crate::rational::Rational;
use crate::translate::{nn2pwl, TranslateOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `h` inputs and `h` neurons per hidden layer; class `l` has `l` hidden layers.
    VaryLayers,
    /// `l` hidden layers; class `m` has `m` inputs and `m` neurons per hidden layer.
    VaryWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentPlan {
    pub mode: Mode,
    /// `h` for [`Mode::VaryLayers`], `l` for [`Mode::VaryWidth`].
    pub fixed: usize,
    /// Classes are parameterised by `1..=classes`.
    pub classes: usize,
    pub per_class: usize,
    pub seed: u64,
    pub grid: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExperimentError {
    #[error("plan counts must all be at least one")]
    ZeroCount,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("lattice audit failed on class {class}, network {index}: {source}")]
    Audit { class: usize, index: usize, source: LatticeError },
}

impl ExperimentPlan {
    pub fn generator_config(&self, class: usize, index: usize) -> GeneratorConfig {
        let seed = network_seed(self.seed, class as u64, index as u64);
        let cfg = match self.mode {
            Mode::VaryLayers => GeneratorConfig::new(self.fixed, class, self.fixed, 1, seed),
            Mode::VaryWidth => GeneratorConfig::new(class, self.fixed, class, 1, seed),
        };
        cfg.with_grid(self.grid)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.fixed == 0 || self.classes == 0 || self.per_class == 0 {
            return Err(ExperimentError::ZeroCount);
        }
        Ok(())
    }
}

/// SplitMix64 finaliser over `(seed, class, index)`.
pub fn network_seed(seed: u64, class: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ class) ^ index)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkStats {
    pub index: usize,
    pub seed: u64,
    /// Nonempty pairs in `Ξ₁`.
    pub regions: usize,
    /// Ordered violating pairs.
    pub violations: usize,
    pub unordered_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassStats {
    pub param: usize,
    pub networks: Vec<NetworkStats>,
    pub average: Rational,
    pub max: usize,
    pub min: usize,
}

impl ClassStats {
    fn from_networks(param: usize, networks: Vec<NetworkStats>) -> Self {
        let total: usize = networks.iter().map(|n| n.regions).sum();
        let average = Rational::new(BigInt::from(total), BigInt::from(networks.len().max(1)));
        let max = networks.iter().map(|n| n.regions).max().unwrap_or(0);
        let min = networks.iter().map(|n| n.regions).min().unwrap_or(0);
        ClassStats { param, networks, average, max, min }
    }

    pub fn region_counts(&self) -> Vec<usize> {
        self.networks.iter().map(|n| n.regions).collect()
    }

    pub fn violators(&self) -> impl Iterator<Item = &NetworkStats> {
        self.networks.iter().filter(|n| n.violations > 0)
    }

    pub fn violator_count(&self) -> usize {
        self.violators().count()
    }
}

/// Generates, translates (both accelerations on) and audits every network of
/// the plan. The result depends only on the plan.
pub fn run_experiment(plan: &ExperimentPlan, parallel: bool) -> Result<Vec<ClassStats>, ExperimentError> {
    plan.validate()?;
    let opts = TranslateOptions { prune_empty: true, classify_hyperplanes: true, parallel };
    let jobs: Vec<(usize, usize)> = (1..=plan.classes).flat_map(|c| (0..plan.per_class).map(move |i| (c, i))).collect();
    let one = |&(class, index): &(usize, usize)| -> Result<(usize, NetworkStats), ExperimentError> {
        let cfg = plan.generator_config(class, index);
        let net = generate(&cfg)?;
        let rep = nn2pwl(&net, &opts);
        let pairs = &rep.outputs[0];
        let a = audit(pairs).map_err(|source| ExperimentError::Audit { class, index, source })?;
        Ok((
            class,
            NetworkStats {
                index,
                seed: cfg.seed,
                regions: pairs.len(),
                violations: a.violation_count(),
                unordered_violations: a.unordered_violation_count(),
            },
        ))
    };
    let results = run_jobs(&jobs, parallel, one)?;
    let mut classes: Vec<Vec<NetworkStats>> = (0..plan.classes).map(|_| Vec::new()).collect();
    for (class, stats) in results {
        classes[class - 1].push(stats);
    }
    Ok(classes
        .into_iter()
        .enumerate()
        .map(|(c, mut nets)| {
            nets.sort_by_key(|n| n.index);
            ClassStats::from_networks(c + 1, nets)
        })
        .collect())
}

#[cfg(feature = "parallel")]
fn run_jobs<F, T>(jobs: &[(usize, usize)], parallel: bool, f: F) -> Result<Vec<T>, ExperimentError>
where
    F: Fn(&(usize, usize)) -> Result<T, ExperimentError> + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    if parallel {
        jobs.par_iter().map(f).collect()
    } else {
        jobs.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_jobs<F, T>(jobs: &[(usize, usize)], _parallel: bool, f: F) -> Result<Vec<T>, ExperimentError>
where
    F: Fn(&(usize, usize)) -> Result<T, ExperimentError>,
{
    jobs.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = network_seed(7, 1, 0);
        assert_eq!(a, network_seed(7, 1, 0));
        assert_ne!(a, network_seed(7, 1, 1));
        assert_ne!(a, network_seed(7, 2, 0));
        assert_ne!(a, network_seed(8, 1, 0));
    }

    #[test]
    fn tiny_plan_is_deterministic() {
        let plan = ExperimentPlan { mode: Mode::VaryLayers, fixed: 2, classes: 2, per_class: 2, seed: 7, grid: 64 };
        let a = run_experiment(&plan, false).unwrap();
        let b = run_experiment(&plan, false).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for c in &a {
            assert_eq!(c.networks.len(), 2);
            assert!(Rational::from_integer(c.max.into()) >= c.average);
            assert!(c.average >= Rational::from_integer(c.min.into()));
        }
    }

    #[test]
    fn shapes_follow_mode() {
        let plan = ExperimentPlan { mode: Mode::VaryWidth, fixed: 3, classes: 4, per_class: 1, seed: 1, grid: 64 };
        let cfg = plan.generator_config(2, 0);
        assert_eq!((cfg.inputs, cfg.hidden_layers, cfg.hidden_width, cfg.outputs), (2, 3, 2, 1));
        let plan = ExperimentPlan { mode: Mode::VaryLayers, ..plan };
        let cfg = plan.generator_config(2, 0);
        assert_eq!((cfg.inputs, cfg.hidden_layers, cfg.hidden_width, cfg.outputs), (3, 2, 3, 1));
    }

    #[test]
    fn rejects_zero_counts() {
        let plan = ExperimentPlan { mode: Mode::VaryWidth, fixed: 3, classes: 0, per_class: 1, seed: 1, grid: 64 };
        assert_eq!(run_experiment(&plan, false), Err(ExperimentError::ZeroCount));
    }
}
