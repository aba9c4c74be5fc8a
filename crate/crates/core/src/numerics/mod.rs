//! Scalar numeric kernels: double-exponential quadrature on finite and
//! semi-infinite intervals, vertical-line contour integration, and
//! convergence-accelerated summation.
//!
//! Everything here is a pure function; results carry a certified absolute
//! error estimate (scheme estimate times a safety factor of 10).

mod quad;
pub(crate) mod series;

pub use quad::{integrate_semi_infinite, integrate_vertical_line, tanh_sinh};
pub use series::{sum_absolute, sum_alternating};

use num_complex::Complex64;

/// Value + absolute-error estimate + evaluation count from a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T = f64> {
    pub value: T,
    pub abs_err: f64,
    pub evals: u64,
}

/// Value + absolute-error estimate + term count from a summation.
#[derive(Debug, Clone, Copy)]
pub struct SumResult<T = f64> {
    pub value: T,
    pub abs_err: f64,
    pub terms_used: u64,
}

/// Scalar field abstraction so the kernels work over f64 and Complex64 alike.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::fmt::Debug
{
    fn zero() -> Self;
    fn scale(self, k: f64) -> Self;
    fn abs(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Default absolute tolerance used across the toolkit.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Safety factor applied to raw scheme error estimates.
pub(crate) const ERR_SAFETY: f64 = 10.0;
