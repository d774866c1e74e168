//! Affine functions `bias + Σ coeffs[k]·x[k]` and input points.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("arity mismatch: expected {expected}, found {found}")]
pub struct ArityMismatch {
    pub expected: usize,
    pub found: usize,
}

pub(crate) fn check_arity(expected: usize, found: usize) -> Result<(), ArityMismatch> {
    if expected == found {
        Ok(())
    } else {
        Err(ArityMismatch { expected, found })
    }
}

/// A point of `ℚⁿ`; network inputs live in the unit cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn in_unit_cube(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative() && *c <= Rational::one())
    }
}

impl From<Vec<Rational>> for Point {
    fn from(coords: Vec<Rational>) -> Self {
        Point(coords)
    }
}

/// Dense affine map `ℚⁿ → ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineFunc {
    bias: Rational,
    coeffs: Vec<Rational>,
}

impl AffineFunc {
    pub fn new(coeffs: Vec<Rational>, bias: Rational) -> Self {
        AffineFunc { bias, coeffs }
    }

    /// The constant function `value` of the given arity.
    pub fn constant(arity: usize, value: Rational) -> Self {
        AffineFunc { bias: value, coeffs: vec![Rational::zero(); arity] }
    }

    /// κ₀ of the given arity.
    pub fn zero(arity: usize) -> Self {
        Self::constant(arity, Rational::zero())
    }

    /// κ₁ of the given arity.
    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    /// `x ↦ x[index]`.
    pub fn projection(arity: usize, index: usize) -> Self {
        assert!(index < arity, "projection index {index} out of range for arity {arity}");
        let mut f = Self::zero(arity);
        f.coeffs[index] = Rational::one();
        f
    }

    /// The tuple of all projections, i.e. the identity map of `ℚⁿ`.
    pub fn projections(arity: usize) -> Vec<AffineFunc> {
        (0..arity).map(|k| Self::projection(arity, k)).collect()
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn bias(&self) -> &Rational {
        &self.bias
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &Point) -> Result<Rational, ArityMismatch> {
        check_arity(self.arity(), x.dim())?;
        Ok(self.eval_unchecked(x.coords()))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        let mut acc = self.bias.clone();
        for (c, v) in self.coeffs.iter().zip(x) {
            if !c.is_zero() {
                acc += c * v;
            }
        }
        acc
    }

    /// Symbolic composition `self ∘ (inner[0], …, inner[m-1])`.
    ///
    /// `inner.len()` must equal `self.arity()` and all inner functions must share
    /// one arity `n`; the result has arity `n`. An empty `inner` is only valid for
    /// a zero-arity `self`, whose composition is the constant `bias` of arity 0.
    pub fn compose(&self, inner: &[AffineFunc]) -> Result<AffineFunc, ArityMismatch> {
        check_arity(self.arity(), inner.len())?;
        let n = inner.first().map_or(0, AffineFunc::arity);
        for g in inner {
            check_arity(n, g.arity())?;
        }
        let mut out = Self::constant(n, self.bias.clone());
        for (w, g) in self.coeffs.iter().zip(inner) {
            if w.is_zero() {
                continue;
            }
            out.bias += w * &g.bias;
            for (o, c) in out.coeffs.iter_mut().zip(&g.coeffs) {
                if !c.is_zero() {
                    *o += w * c;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> AffineFunc {
        AffineFunc { bias: &self.bias * factor, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add(&self, other: &AffineFunc) -> Result<AffineFunc, ArityMismatch> {
        check_arity(self.arity(), other.arity())?;
        Ok(AffineFunc {
            bias: &self.bias + &other.bias,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &AffineFunc) -> Result<AffineFunc, ArityMismatch> {
        check_arity(self.arity(), other.arity())?;
        Ok(AffineFunc {
            bias: &self.bias - &other.bias,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> AffineFunc {
        AffineFunc { bias: -&self.bias, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// `self + delta`, shifting only the bias.
    pub fn offset(&self, delta: &Rational) -> AffineFunc {
        AffineFunc { bias: &self.bias + delta, coeffs: self.coeffs.clone() }
    }
}

impl fmt::Display for AffineFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            if mag.is_one() {
                write!(f, "x{}", k + 1)?;
            } else {
                write!(f, "{mag}*x{}", k + 1)?;
            }
            wrote = true;
        }
        if !wrote {
            return write!(f, "{}", self.bias);
        }
        if !self.bias.is_zero() {
            let sign = if self.bias.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", self.bias.abs())?;
        }
        Ok(())
    }
}
