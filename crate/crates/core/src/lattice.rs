//! The "above" relation, lattice-property audits, lattice (max–min)
//! representations and split-based repair of encodings that lack the property.
//!
//! An encoding is a list of ⟨piece, region⟩ pairs `⟨p_i, Ω_i⟩`. It satisfies the
//! lattice property when for every ordered `i ≠ j` some `p_k` has
//! `p_i ≥ p_k` on `Ω_i` and `p_k ≥ p_j` on `Ω_j`. Then
//! `f(x) = max_j min { p_k(x) : p_k ≥ p_j on Ω_j }`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::affine::{check_arity, AffineFunc, ArityMismatch, Point};
use crate::lp::LpOutcome;
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::rational::Rational;
use crate::translate::RegionPiece;

/// Anything that pairs an affine piece with its region.
pub trait PieceRegion {
    fn piece(&self) -> &AffineFunc;
    fn region(&self) -> &Polyhedron;
}

impl PieceRegion for RegionPiece {
    fn piece(&self) -> &AffineFunc {
        &self.piece
    }

    fn region(&self) -> &Polyhedron {
        &self.region
    }
}

impl PieceRegion for (AffineFunc, Polyhedron) {
    fn piece(&self) -> &AffineFunc {
        &self.0
    }

    fn region(&self) -> &Polyhedron {
        &self.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("region {0} is empty")]
    EmptyRegion(usize),
    #[error("encoding violates the lattice property on {0} ordered pairs")]
    NotLattice(usize),
    #[error("encoding has no pairs")]
    NoPairs,
    #[error(transparent)]
    Arity(#[from] ArityMismatch),
}

/// Exact `min (p - q)` over a region and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AboveCertificate {
    pub minimum: Rational,
    pub above: bool,
}

/// Decides whether `p ≥ q` everywhere on `region` by minimising `p - q`.
pub fn is_above(p: &AffineFunc, q: &AffineFunc, region: &Polyhedron) -> Result<AboveCertificate, LatticeError> {
    check_arity(region.dim(), p.arity())?;
    let diff = p.sub(q)?;
    match region.minimize_over(&diff)? {
        LpOutcome::Optimal { optimum, .. } => {
            let above = !optimum.is_negative();
            Ok(AboveCertificate { minimum: optimum, above })
        }
        LpOutcome::Infeasible => Err(LatticeError::EmptyRegion(0)),
        LpOutcome::Unbounded => Ok(AboveCertificate { minimum: Rational::zero(), above: false }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAudit {
    /// `above[k][j]`: `p_k` is above `p_j` over `Ω_j`.
    pub above: Vec<Vec<bool>>,
    /// `below[i][k]`: `p_i` is above `p_k` over `Ω_i`.
    pub below: Vec<Vec<bool>>,
    /// Ordered pairs `(i, j)`, `i ≠ j`, with no bridging piece, lexicographic.
    pub violating_pairs: Vec<(usize, usize)>,
}

impl LatticeAudit {
    pub fn size(&self) -> usize {
        self.above.len()
    }

    pub fn violation_count(&self) -> usize {
        self.violating_pairs.len()
    }

    /// Number of unordered region pairs `{i, j}` violated in at least one direction.
    pub fn unordered_violation_count(&self) -> usize {
        self.violating_pairs.iter().filter(|&&(i, j)| i < j || !self.violating_pairs.contains(&(j, i))).count()
    }

    pub fn is_lattice(&self) -> bool {
        self.violating_pairs.is_empty()
    }

    /// `K_j = { k : p_k above p_j over Ω_j }` for region `j`.
    pub fn k_set(&self, j: usize) -> Vec<usize> {
        (0..self.size()).filter(|&k| self.above[k][j]).collect()
    }
}

/// Audits an encoding for the lattice property. Every region must be nonempty.
pub fn audit<P: PieceRegion + Sync>(pairs: &[P]) -> Result<LatticeAudit, LatticeError> {
    let m = pairs.len();
    if let Some(p) = pairs.first() {
        let n = p.region().dim();
        for (idx, p) in pairs.iter().enumerate() {
            check_arity(n, p.region().dim())?;
            check_arity(n, p.piece().arity())?;
            if p.region().is_empty() {
                return Err(LatticeError::EmptyRegion(idx));
            }
        }
    }
    // Per region r and piece k: min and max of p_k - p_r over Ω_r.
    let row = |r: usize| -> Result<Vec<(bool, bool)>, LatticeError> {
        let region = pairs[r].region();
        let base = pairs[r].piece();
        (0..m)
            .map(|k| {
                if k == r {
                    return Ok((true, true));
                }
                let d = pairs[k].piece().sub(base)?;
                let lo = region.minimize_over(&d)?;
                let hi = region.maximize_over(&d)?;
                let above = matches!(lo, LpOutcome::Optimal { ref optimum, .. } if !optimum.is_negative());
                let below = matches!(hi, LpOutcome::Optimal { ref optimum, .. } if !optimum.is_positive());
                if lo.is_infeasible() {
                    return Err(LatticeError::EmptyRegion(r));
                }
                Ok((above, below))
            })
            .collect()
    };
    let rows = audit_rows(m, row)?;

    let mut above = vec![vec![false; m]; m];
    let mut below = vec![vec![false; m]; m];
    for (r, entries) in rows.into_iter().enumerate() {
        for (k, (a, b)) in entries.into_iter().enumerate() {
            above[k][r] = a;
            below[r][k] = b;
        }
    }
    let mut violating_pairs = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        for j in 0..m {
            if i != j && !(0..m).any(|k| below[i][k] && above[k][j]) {
                violating_pairs.push((i, j));
            }
        }
    }
    Ok(LatticeAudit { above, below, violating_pairs })
}

#[cfg(feature = "parallel")]
fn audit_rows<F>(m: usize, row: F) -> Result<Vec<Vec<(bool, bool)>>, LatticeError>
where
    F: Fn(usize) -> Result<Vec<(bool, bool)>, LatticeError> + Sync + Send,
{
    use rayon::prelude::*;
    (0..m).into_par_iter().map(row).collect()
}

#[cfg(not(feature = "parallel"))]
fn audit_rows<F>(m: usize, row: F) -> Result<Vec<Vec<(bool, bool)>>, LatticeError>
where
    F: Fn(usize) -> Result<Vec<(bool, bool)>, LatticeError>,
{
    (0..m).map(row).collect()
}

/// `f(x) = max_j min_{k ∈ K_j} p_k(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRepresentation {
    pub pieces: Vec<AffineFunc>,
    pub k_sets: Vec<Vec<usize>>,
}

impl LatticeRepresentation {
    pub fn arity(&self) -> usize {
        self.pieces.first().map_or(0, AffineFunc::arity)
    }

    /// `f_{Ω_j}(x) = min_{k ∈ K_j} p_k(x)`.
    pub fn region_term(&self, j: usize, x: &Point) -> Result<Rational, ArityMismatch> {
        check_arity(self.arity(), x.dim())?;
        Ok(self.k_sets[j].iter().map(|&k| self.pieces[k].eval_unchecked(x.coords())).min().expect("K_j contains j"))
    }
}

/// Builds the lattice representation; refuses encodings that violate the property.
pub fn build_lattice<P: PieceRegion>(pairs: &[P], audit: &LatticeAudit) -> Result<LatticeRepresentation, LatticeError> {
    if pairs.is_empty() {
        return Err(LatticeError::NoPairs);
    }
    if !audit.is_lattice() {
        return Err(LatticeError::NotLattice(audit.violation_count()));
    }
    let pieces = pairs.iter().map(|p| p.piece().clone()).collect();
    let k_sets = (0..pairs.len()).map(|j| audit.k_set(j)).collect();
    Ok(LatticeRepresentation { pieces, k_sets })
}

pub fn eval_lattice(rep: &LatticeRepresentation, x: &Point) -> Result<Rational, ArityMismatch> {
    let mut best: Option<Rational> = None;
    for j in 0..rep.k_sets.len() {
        let term = rep.region_term(j, x)?;
        if best.as_ref().is_none_or(|b| term > *b) {
            best = Some(term);
        }
    }
    Ok(best.unwrap_or_else(Rational::zero))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    /// Splits performed.
    pub iterations: usize,
    pub initial_violations: usize,
    pub final_violations: usize,
    /// Violations remained but no violating pair admitted a proper split.
    pub stalled: bool,
}

impl RepairReport {
    pub fn converged(&self) -> bool {
        self.final_violations == 0
    }
}

pub const DEFAULT_MAX_SPLITS: usize = 1000;

/// Splits regions along piece crossings until the lattice property holds or
/// `max_iterations` splits have been made.
///
/// Each step takes the lexicographically first violating pair `(i, j)` whose
/// split is proper, and replaces `⟨p_j, Ω_j⟩` by `⟨p_j, Ω_j ∩ {p_j - p_i ≥ 0}⟩`
/// and `⟨p_j, Ω_j ∩ {p_j - p_i ≤ 0}⟩`. A split is proper when both halves have
/// interior; otherwise it would reproduce `Ω_j` and make no progress. The
/// function encoded never changes since both halves keep `p_j`.
pub fn repair_split(
    pairs: Vec<(AffineFunc, Polyhedron)>,
    max_iterations: usize,
) -> Result<(Vec<(AffineFunc, Polyhedron)>, RepairReport), LatticeError> {
    let mut pairs = pairs;
    let mut current = audit(&pairs)?;
    let initial_violations = current.violation_count();
    let mut iterations = 0;
    let mut stalled = false;
    while !current.is_lattice() && iterations < max_iterations {
        let split = current.violating_pairs.iter().find_map(|&(i, j)| {
            let cut = pairs[j].0.sub(&pairs[i].0).ok()?;
            let upper = pairs[j].1.extend([HalfSpace::ge(cut.clone())]).ok()?;
            let lower = pairs[j].1.extend([HalfSpace::le(cut)]).ok()?;
            (upper.has_interior() && lower.has_interior()).then_some((j, upper, lower))
        });
        let Some((j, upper, lower)) = split else {
            stalled = true;
            break;
        };
        let piece = pairs[j].0.clone();
        pairs[j] = (piece.clone(), upper);
        pairs.insert(j + 1, (piece, lower));
        iterations += 1;
        current = audit(&pairs)?;
    }
    let report = RepairReport { iterations, initial_violations, final_violations: current.violation_count(), stalled };
    Ok((pairs, report))
}
