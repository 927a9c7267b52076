//! Scalar abstraction: the engine runs the same algorithms over exact
//! rationals (all algebraic certificates) and over f64 (flow integration).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, the default scalar for every exact check.
pub type Q = BigRational;

/// Field operations required by the matrix, Laurent, and invariant code.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Div<Output = Self>
{
    /// Whether arithmetic in this scalar is exact. Exact paths demand
    /// literal zeros in consistency checks; float paths get a relative
    /// tolerance instead.
    const IS_EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// Exact equality for rationals, absolute-tolerance comparison is the
    /// caller's business for floats; this is plain `==` everywhere.
    fn eq_zero(&self) -> bool {
        self.is_zero()
    }

    /// Nearest f64, for residual reporting and drift metrics.
    fn to_approx(&self) -> f64;
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_approx(&self) -> f64 {
        *self
    }
}

impl Scalar for Q {
    const IS_EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_approx(&self) -> f64 {
        q_to_f64(self)
    }
}

/// Builds the rational p/q.
pub fn q(p: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(den))
}

/// Builds the integer rational n.
pub fn qi(n: i64) -> Q {
    Q::from_i64(n)
}

/// Converts an exact rational to the nearest f64.
pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a manual quotient when the parts overflow i64/u64.
        let num = x.numer().to_f64().unwrap_or(f64::NAN);
        let den = x.denom().to_f64().unwrap_or(f64::NAN);
        num / den
    })
}
