//! Precision handling, complex arithmetic, truncated series, branch-controlled
//! fractional powers and ray quadrature: the numerical substrate shared by
//! every analytic module.

mod branch;
mod complex;
mod quadrature;
mod series;

pub use branch::{frac_pow, frac_pow_polar, BranchSpec};
pub use complex::{decimal_string, digits_for_bits, pi, real, Cx};
pub use quadrature::{quadrature_ray, quadrature_ray_vec, trapezoid_line, RayOptions, RayPoint};
pub use series::TruncatedSeries;
pub(crate) use series::{convolve, series_powi};

use crate::error::{Error, Result};
use rug::Float;

/// Environment variable overriding the default working precision.
pub const PRECISION_ENV: &str = "RT_PRECISION_BITS";

/// Working precision and requested absolute accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    bits: u32,
    target_abs_error: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: Self::DEFAULT_BITS, target_abs_error: Self::DEFAULT_TARGET }
    }
}

impl PrecisionContext {
    pub const DEFAULT_BITS: u32 = 256;
    pub const DEFAULT_TARGET: f64 = 1e-30;
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32, target_abs_error: f64) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision(format!("{bits} bits < {}", Self::MIN_BITS)));
        }
        if !(target_abs_error > 0.0 && target_abs_error.is_finite()) {
            return Err(Error::InvalidPrecision(format!("target error {target_abs_error}")));
        }
        Ok(PrecisionContext { bits, target_abs_error })
    }

    /// Default context with the bit count taken from `RT_PRECISION_BITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Ok(s) => {
                let bits = s
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidPrecision(format!("{PRECISION_ENV}={s}")))?;
                Self::new(bits, Self::DEFAULT_TARGET)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn target(&self) -> f64 {
        self.target_abs_error
    }

    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        Self::new(bits, self.target_abs_error)
    }

    pub fn with_target(&self, target: f64) -> Result<Self> {
        Self::new(self.bits, target)
    }

    /// Unit roundoff `2^{-bits}` as an `f64` (zero once it underflows).
    pub fn eps(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    pub fn zero(&self) -> Cx {
        Cx::zero(self.bits)
    }

    pub fn one(&self) -> Cx {
        Cx::one(self.bits)
    }

    pub fn cx(&self, re: f64, im: f64) -> Cx {
        Cx::from_f64(self.bits, re, im)
    }

    pub fn real(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn pi(&self) -> Float {
        pi(self.bits)
    }
}

/// A numerical result with an estimated absolute error and a convergence flag.
#[derive(Clone, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub err: f64,
    pub converged: bool,
}

impl<T> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Estimate { value, err: 0.0, converged: true }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate { value: f(self.value), err: self.err, converged: self.converged }
    }
}
