//! Numeric scalar abstraction shared by every solver component.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real field the solver computes in: `f32` or `f64`.
///
/// The tolerance constants are expressed in `f64` and converted on use, so
/// each precision can carry thresholds matched to its machine epsilon.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute feasibility tolerance for `π` against `f`.
    const TOL_FEAS: f64;
    /// Relative threshold (scaled by `max(1, |z̄|)`) above which a cut counts as violated.
    const TOL_VIOLATION: f64;
    /// Pivot and reduced-cost tolerance inside the simplex.
    const TOL_LP: f64;
    /// Integrality tolerance for branch-and-bound.
    const TOL_INT: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn tol_feas() -> Self {
        Self::lit(Self::TOL_FEAS)
    }

    #[inline]
    fn tol_lp() -> Self {
        Self::lit(Self::TOL_LP)
    }

    #[inline]
    fn tol_int() -> Self {
        Self::lit(Self::TOL_INT)
    }

    /// Violation threshold at objective level `reference`.
    #[inline]
    fn tol_violation(reference: Self) -> Self {
        Self::lit(Self::TOL_VIOLATION) * reference.abs().max(Self::one())
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOL_FEAS: f64 = 1e-9;
    const TOL_VIOLATION: f64 = 1e-6;
    const TOL_LP: f64 = 1e-9;
    const TOL_INT: f64 = 1e-6;
}

impl Scalar for f32 {
    const TOL_FEAS: f64 = 1e-4;
    const TOL_VIOLATION: f64 = 1e-4;
    const TOL_LP: f64 = 1e-5;
    const TOL_INT: f64 = 1e-4;
}
