//! High-precision partial theta series `Θ(τ;ν,f,M) = Σ_{n≥1} n^ν f(n) e^{iπn²τ/M}`
//! with `M`-periodic coefficients.
//!
//! The crate evaluates these series directly, decomposes them into a pole
//! term, a Borel–Laplace median sum and an exponentially small remainder,
//! extracts Borel-plane singularity data, and checks the modular and
//! quantum-modular transformation laws numerically.

mod arith;
pub mod core_numerics;
pub mod error;
pub mod genfun;
pub mod modular;
pub mod periodic;
pub mod resummation;
pub mod theta;

pub use core_numerics::{Cx, Estimate, PrecisionContext, TruncatedSeries};
pub use error::{Error, Result};
