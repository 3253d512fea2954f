//! Scalar backends.
//!
//! The pipeline runs over one of two field backends, chosen once per run:
//! arbitrary-precision rationals (authoritative, all comparisons exact) or
//! `f64` (performance mode, rank decisions governed by a relative tolerance).
//! [`Field`] is the abstraction both satisfy; the backend-specific pieces are
//! the rank-sensitive linear algebra and the notion of "negligible".

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::linalg::{approx, exact};

/// Exact rational scalar. `num_rational` keeps values in lowest terms with a
/// positive denominator, which is exactly the invariant the pipeline needs.
pub type Rat = BigRational;

/// Relative tolerance for the float backend's rank and zero decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(1e-8)
    }
}

/// A field the pipeline can run over.
///
/// `Cfg` carries the per-run decision context: `()` for the exact backend,
/// [`Tol`] for the float backend.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    type Cfg: Debug + Clone + Copy + Default + Send + Sync;

    /// Backend name as it appears in the input JSON `field` key.
    const NAME: &'static str;
    /// Whether comparisons are exact.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn parse(text: &str) -> std::result::Result<Self, String>;
    fn render(&self) -> String;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Is `x` negligible relative to the magnitude `scale`?
    /// Exact backend: `x == 0` (the scale is ignored).
    fn negligible(x: &Self, scale: &Self, cfg: &Self::Cfg) -> bool;

    fn rank(a: &Matrix<Self>, cfg: &Self::Cfg) -> usize;
    /// Basis of the right null space, each vector in a deterministic
    /// normalization.
    fn kernel_basis(a: &Matrix<Self>, cfg: &Self::Cfg) -> Vec<Vec<Self>>;
    /// Unique solution of `A x = rhs`; `NoSolution` if inconsistent,
    /// `NonUnique` if the column rank is deficient.
    fn solve_unique(a: &Matrix<Self>, rhs: &[Self], cfg: &Self::Cfg) -> Result<Vec<Self>>;
    fn invert(a: &Matrix<Self>, cfg: &Self::Cfg) -> Result<Matrix<Self>>;

    /// Normalize a direction vector to a canonical representative, returning
    /// `(unit, factor)` with `v = factor * unit`. `None` if `v` is zero.
    /// Exact backend: primitive integer entries, content 1, first nonzero
    /// entry positive. Float backend: unit 2-norm, first significant entry
    /// positive.
    fn normalize_direction(v: &[Self], cfg: &Self::Cfg) -> Option<(Vec<Self>, Self)>;

    /// A basis of the row span, used to shrink multiplication matrices
    /// before rank computations. The float backend returns the rows as-is.
    fn span_basis(rows: Vec<Vec<Self>>, cfg: &Self::Cfg) -> Vec<Vec<Self>>;
}

impl Field for Rat {
    type Cfg = ();

    const NAME: &'static str = "rational";
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let t = text.trim();
        match t.split_once('/') {
            Some((num, den)) => {
                let n: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad numerator `{num}`: {e}"))?;
                let d: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad denominator `{den}`: {e}"))?;
                if d.is_zero() {
                    return Err(format!("zero denominator in `{t}`"));
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                let n: BigInt = t.parse().map_err(|e| format!("bad integer `{t}`: {e}"))?;
                Ok(BigRational::from_integer(n))
            }
        }
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn negligible(x: &Self, _scale: &Self, _cfg: &Self::Cfg) -> bool {
        x.is_zero()
    }

    fn rank(a: &Matrix<Self>, _cfg: &Self::Cfg) -> usize {
        exact::rank(a)
    }

    fn kernel_basis(a: &Matrix<Self>, _cfg: &Self::Cfg) -> Vec<Vec<Self>> {
        exact::kernel_basis(a)
    }

    fn solve_unique(a: &Matrix<Self>, rhs: &[Self], _cfg: &Self::Cfg) -> Result<Vec<Self>> {
        exact::solve_unique(a, rhs)
    }

    fn invert(a: &Matrix<Self>, _cfg: &Self::Cfg) -> Result<Matrix<Self>> {
        exact::invert(a)
    }

    fn normalize_direction(v: &[Self], _cfg: &Self::Cfg) -> Option<(Vec<Self>, Self)> {
        exact::normalize_primitive(v)
    }

    fn span_basis(rows: Vec<Vec<Self>>, _cfg: &Self::Cfg) -> Vec<Vec<Self>> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut ech = exact::IntEchelon::new(cols);
        for row in &rows {
            ech.insert(row);
        }
        ech.basis_rows()
    }
}

impl Field for f64 {
    type Cfg = Tol;

    const NAME: &'static str = "float";
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let t = text.trim();
        match t.split_once('/') {
            Some((num, den)) => {
                let n: f64 = num
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad numerator `{num}`: {e}"))?;
                let d: f64 = den
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad denominator `{den}`: {e}"))?;
                if d == 0.0 {
                    return Err(format!("zero denominator in `{t}`"));
                }
                Ok(n / d)
            }
            None => t.parse().map_err(|e| format!("bad float `{t}`: {e}")),
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn negligible(x: &Self, scale: &Self, cfg: &Self::Cfg) -> bool {
        f64::abs(*x) <= cfg.0 * f64::abs(*scale)
    }

    fn rank(a: &Matrix<Self>, cfg: &Self::Cfg) -> usize {
        approx::rank(a, cfg.0)
    }

    fn kernel_basis(a: &Matrix<Self>, cfg: &Self::Cfg) -> Vec<Vec<Self>> {
        approx::kernel_basis(a, cfg.0)
    }

    fn solve_unique(a: &Matrix<Self>, rhs: &[Self], cfg: &Self::Cfg) -> Result<Vec<Self>> {
        approx::solve_unique(a, rhs, cfg.0)
    }

    fn invert(a: &Matrix<Self>, cfg: &Self::Cfg) -> Result<Matrix<Self>> {
        approx::invert(a, cfg.0)
    }

    fn normalize_direction(v: &[Self], cfg: &Self::Cfg) -> Option<(Vec<Self>, Self)> {
        approx::normalize_unit(v, cfg.0)
    }

    fn span_basis(rows: Vec<Vec<Self>>, _cfg: &Self::Cfg) -> Vec<Vec<Self>> {
        rows
    }
}

/// Parse a scalar with a path for error context.
pub fn parse_scalar<K: Field>(text: &str, path: &str) -> Result<K> {
    K::parse(text).map_err(|reason| Error::ParseError {
        path: path.to_string(),
        reason,
    })
}
