//! Regions as ordered systems of closed half-spaces.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::affine::{check_arity, AffineFunc, ArityMismatch, Point};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Relation};
use crate::rational::{one, Rational};

/// Closed half-space `func(x) ≥ 0` or `func(x) ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Ge,
    Le,
}

impl From<Side> for Relation {
    fn from(side: Side) -> Relation {
        match side {
            Side::Ge => Relation::Ge,
            Side::Le => Relation::Le,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub func: AffineFunc,
    pub side: Side,
}

impl HalfSpace {
    pub fn new(func: AffineFunc, side: Side) -> Self {
        HalfSpace { func, side }
    }

    pub fn ge(func: AffineFunc) -> Self {
        Self::new(func, Side::Ge)
    }

    pub fn le(func: AffineFunc) -> Self {
        Self::new(func, Side::Le)
    }

    /// The same set written as `g(x) ≥ 0`.
    pub fn as_ge(&self) -> AffineFunc {
        match self.side {
            Side::Ge => self.func.clone(),
            Side::Le => self.func.neg(),
        }
    }

    fn holds(&self, value: &Rational, strict: bool) -> bool {
        match (self.side, strict) {
            (Side::Ge, false) => !value.is_negative(),
            (Side::Ge, true) => value.is_positive(),
            (Side::Le, false) => !value.is_positive(),
            (Side::Le, true) => value.is_negative(),
        }
    }

    fn to_constraint(&self) -> Constraint {
        Constraint::new(self.func.clone(), self.side.into())
    }

    /// Canonical representative of the half-space as a set: `g ≥ 0` scaled so the
    /// first nonzero entry of `(coeffs…, bias)` has magnitude one.
    pub fn normalized(&self) -> HalfSpace {
        let g = self.as_ge();
        let lead = g.coeffs().iter().chain(core::iter::once(g.bias())).find(|c| !c.is_zero()).cloned();
        match lead {
            Some(lead) => HalfSpace::ge(g.scale(&lead.abs().recip())),
            None => HalfSpace::ge(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PolyhedronError {
    #[error("dimension must be at least one")]
    ZeroDimension,
    #[error(transparent)]
    Arity(#[from] ArityMismatch),
}

impl Polyhedron {
    /// Whole space `ℚⁿ` (no constraints).
    pub fn universe(dim: usize) -> Self {
        Polyhedron { dim, halfspaces: Vec::new() }
    }

    pub fn from_halfspaces(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self, ArityMismatch> {
        for h in &halfspaces {
            check_arity(dim, h.func.arity())?;
        }
        Ok(Polyhedron { dim, halfspaces })
    }

    /// `[0,1]ⁿ` as `x₁ ≥ 0, x₁ ≤ 1, …, xₙ ≥ 0, xₙ ≤ 1`.
    pub fn unit_cube(n: usize) -> Result<Self, PolyhedronError> {
        if n == 0 {
            return Err(PolyhedronError::ZeroDimension);
        }
        let mut halfspaces = Vec::with_capacity(2 * n);
        for k in 0..n {
            let x = AffineFunc::projection(n, k);
            halfspaces.push(HalfSpace::ge(x.clone()));
            halfspaces.push(HalfSpace::le(x.offset(&-one())));
        }
        Ok(Polyhedron { dim: n, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty_system(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// A new polyhedron with `new` appended; `self` is untouched.
    pub fn extend<I>(&self, new: I) -> Result<Polyhedron, ArityMismatch>
    where
        I: IntoIterator<Item = HalfSpace>,
    {
        let mut out = self.clone();
        for h in new {
            check_arity(self.dim, h.func.arity())?;
            out.halfspaces.push(h);
        }
        Ok(out)
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        self.halfspaces.iter().map(HalfSpace::to_constraint).collect()
    }

    /// True iff no point satisfies every inequality.
    pub fn is_empty(&self) -> bool {
        !lp::is_feasible(&self.constraints())
    }

    /// True iff the polyhedron has nonempty topological interior in `ℚⁿ`
    /// (equivalently, it is full-dimensional).
    ///
    /// Constant inequalities are set-level: a violated one empties the set, and a
    /// satisfied one (`0 ≥ 0` included) constrains nothing. For the rest, solves
    /// `max t` subject to `g_i(x) ≥ t`, `0 ≤ t ≤ 1` in the `≥` orientation.
    pub fn has_interior(&self) -> bool {
        let n = self.dim;
        let t_col = |g: &AffineFunc| {
            let mut coeffs = g.coeffs().to_vec();
            coeffs.push(-one());
            AffineFunc::new(coeffs, g.bias().clone())
        };
        let mut cs = Vec::with_capacity(self.halfspaces.len() + 2);
        for h in &self.halfspaces {
            let g = h.as_ge();
            if g.is_constant() {
                if g.bias().is_negative() {
                    return false;
                }
                continue;
            }
            cs.push(Constraint::ge(t_col(&g)));
        }
        let t = AffineFunc::projection(n + 1, n);
        cs.push(Constraint::ge(t.clone()));
        cs.push(Constraint::le(t.offset(&-one())));
        let lp = LinearProgram::maximize(t, cs).expect("arity fixed above");
        match lp::solve(&lp) {
            LpOutcome::Optimal { optimum, .. } => optimum.is_positive(),
            LpOutcome::Infeasible => false,
            LpOutcome::Unbounded => unreachable!("t is capped at one"),
        }
    }

    /// Closed mode: every inequality holds. Strict mode: `x` is an interior point,
    /// i.e. every non-constant inequality holds strictly (constant ones must hold).
    pub fn contains(&self, x: &Point, strict: bool) -> Result<bool, ArityMismatch> {
        check_arity(self.dim, x.dim())?;
        Ok(self.halfspaces.iter().all(|h| {
            let value = h.func.eval_unchecked(x.coords());
            h.holds(&value, strict && !h.func.is_constant())
        }))
    }

    pub fn minimize_over(&self, f: &AffineFunc) -> Result<LpOutcome, ArityMismatch> {
        check_arity(self.dim, f.arity())?;
        let lp = LinearProgram::minimize(f.clone(), self.constraints())?;
        Ok(lp::solve(&lp))
    }

    pub fn maximize_over(&self, f: &AffineFunc) -> Result<LpOutcome, ArityMismatch> {
        check_arity(self.dim, f.arity())?;
        let lp = LinearProgram::maximize(f.clone(), self.constraints())?;
        Ok(lp::solve(&lp))
    }

    /// Drops exact duplicate half-spaces (same set after normalisation), keeping
    /// the first occurrence and the original order.
    pub fn dedup(&self) -> Polyhedron {
        let mut seen: Vec<HalfSpace> = Vec::with_capacity(self.halfspaces.len());
        let mut kept = Vec::with_capacity(self.halfspaces.len());
        for h in &self.halfspaces {
            let key = h.normalized();
            if !seen.contains(&key) {
                seen.push(key);
                kept.push(h.clone());
            }
        }
        Polyhedron { dim: self.dim, halfspaces: kept }
    }

    /// Representation-level equality: same multiset of normalised inequalities.
    pub fn same_representation(&self, other: &Polyhedron) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        let mut a: Vec<HalfSpace> = self.halfspaces.iter().map(HalfSpace::normalized).collect();
        let mut b: Vec<HalfSpace> = other.halfspaces.iter().map(HalfSpace::normalized).collect();
        a.sort();
        b.sort();
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use alloc::vec;

    fn aff(coeffs: &[Rational], bias: Rational) -> AffineFunc {
        AffineFunc::new(coeffs.to_vec(), bias)
    }

    fn pt(coords: &[Rational]) -> Point {
        Point::new(coords.to_vec())
    }

    fn wedge() -> Polyhedron {
        Polyhedron::unit_cube(2)
            .unwrap()
            .extend([
                HalfSpace::le(aff(&[frac(4, 3), int(-1)], int(0))),
                HalfSpace::ge(aff(&[int(1), int(-1)], frac(1, 2))),
            ])
            .unwrap()
    }

    #[test]
    fn cube_shapes() {
        let c2 = Polyhedron::unit_cube(2).unwrap();
        assert_eq!(c2.len(), 4);
        assert_eq!(c2.halfspaces()[1], HalfSpace::le(aff(&[int(1), int(0)], int(-1))));
        assert_eq!(c2.halfspaces()[2], HalfSpace::ge(aff(&[int(0), int(1)], int(0))));
        assert_eq!(Polyhedron::unit_cube(1).unwrap().len(), 2);
        assert_eq!(Polyhedron::unit_cube(0), Err(PolyhedronError::ZeroDimension));
        assert!(c2.contains(&pt(&[frac(1, 8), frac(1, 2)]), false).unwrap());
    }

    #[test]
    fn extend_leaves_input_alone() {
        let cube = Polyhedron::unit_cube(2).unwrap();
        let same = cube.extend(vec![]).unwrap();
        assert_eq!(same, cube);
        let r = wedge();
        assert_eq!(cube.len(), 4);
        assert_eq!(r.len(), 6);
        assert_eq!(&r.halfspaces()[..4], cube.halfspaces());
        assert!(cube.extend([HalfSpace::ge(AffineFunc::zero(3))]).is_err());
    }

    #[test]
    fn example_two_mid_region_nonempty() {
        let r = wedge();
        let g = aff(&[int(1), int(-1)], int(1));
        let mid = r.extend([HalfSpace::ge(g.clone()), HalfSpace::le(g.offset(&int(-1)))]).unwrap();
        assert!(!mid.is_empty());
        assert!(mid.has_interior());
        let low = r.extend([HalfSpace::le(g.clone())]).unwrap();
        assert!(low.is_empty());
        // x1 - x2 + 1 ≥ 1 meets the shaded area only at the origin.
        let high = r.extend([HalfSpace::ge(g.offset(&int(-1)))]).unwrap();
        assert!(!high.is_empty());
        assert!(!high.has_interior());
    }

    #[test]
    fn emptiness() {
        let cube = Polyhedron::unit_cube(2).unwrap();
        assert!(!cube.is_empty());
        assert!(cube.has_interior());
        let ex3 = cube
            .extend([
                HalfSpace::ge(aff(&[frac(4, 3), int(-1)], int(0))),
                HalfSpace::le(aff(&[int(1), int(-1)], frac(1, 2))),
            ])
            .unwrap();
        assert!(ex3.is_empty());
        assert!(!ex3.has_interior());
    }

    #[test]
    fn constant_inequalities_and_interior() {
        let cube = Polyhedron::unit_cube(2).unwrap();
        let zero_ge = cube.extend([HalfSpace::ge(AffineFunc::zero(2))]).unwrap();
        assert!(zero_ge.has_interior());
        let neg = cube.extend([HalfSpace::ge(AffineFunc::constant(2, int(-1)))]).unwrap();
        assert!(neg.is_empty());
        assert!(!neg.has_interior());
        // A segment inside the square.
        let x1 = AffineFunc::projection(2, 0);
        let x2 = AffineFunc::projection(2, 1);
        let seg = cube.extend([HalfSpace::ge(x1.sub(&x2).unwrap()), HalfSpace::le(x1.sub(&x2).unwrap())]).unwrap();
        assert!(!seg.is_empty());
        assert!(!seg.has_interior());
        // Unbounded but full-dimensional.
        let half = Polyhedron::from_halfspaces(2, vec![HalfSpace::ge(x1)]).unwrap();
        assert!(half.has_interior());
    }

    #[test]
    fn containment() {
        let r = wedge();
        assert!(r.contains(&pt(&[frac(1, 8), frac(1, 2)]), false).unwrap());
        let cube = Polyhedron::unit_cube(2).unwrap();
        assert!(!cube.contains(&pt(&[int(0), int(0)]), true).unwrap());
        assert!(cube.contains(&pt(&[frac(1, 2), frac(1, 2)]), true).unwrap());
        assert!(cube.contains(&pt(&[int(0)]), false).is_err());
    }

    #[test]
    fn optimisation() {
        let cube = Polyhedron::unit_cube(2).unwrap();
        let f = aff(&[int(1), int(1)], int(-2));
        assert_eq!(cube.maximize_over(&f).unwrap().optimum(), Some(&int(0)));
        assert_eq!(cube.minimize_over(&AffineFunc::projection(2, 0)).unwrap().optimum(), Some(&int(0)));
        let g = aff(&[int(1), int(-1)], int(1));
        assert_eq!(wedge().minimize_over(&g).unwrap().optimum(), Some(&frac(1, 2)));
        let ex3 = cube.extend([HalfSpace::ge(AffineFunc::constant(2, int(-1)))]).unwrap();
        assert!(ex3.minimize_over(&g).unwrap().is_infeasible());
    }

    #[test]
    fn dedup_and_representation() {
        let x1 = AffineFunc::projection(2, 0);
        let cube = Polyhedron::unit_cube(2).unwrap();
        let dup = cube.extend([HalfSpace::ge(x1.scale(&int(3))), HalfSpace::le(x1.neg())]).unwrap();
        assert_eq!(dup.dedup(), cube);
        assert!(!dup.same_representation(&cube));
        let mut shuffled = cube.halfspaces().to_vec();
        shuffled.reverse();
        let shuffled = Polyhedron::from_halfspaces(2, shuffled).unwrap();
        assert!(shuffled.same_representation(&cube));
    }
}
