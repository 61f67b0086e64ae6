//! Fractional powers with an explicitly chosen branch of the argument.

use super::complex::{pi, Cx};
use crate::error::{Error, Result};
use num_rational::Rational64;
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::PI;

/// Admissible argument range `(arg_lo, arg_hi)` of the input; the output
/// argument is `e · arg` with `arg` the unique representative in the range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchSpec {
    pub arg_lo: f64,
    pub arg_hi: f64,
    /// Whether `arg_hi` itself belongs to the range.
    pub hi_inclusive: bool,
}

impl BranchSpec {
    pub fn new(arg_lo: f64, arg_hi: f64, hi_inclusive: bool) -> Result<Self> {
        if !(arg_lo < arg_hi) || arg_hi - arg_lo > 2.0 * PI + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "branch range ({arg_lo}, {arg_hi}) must be non-empty and at most 2π wide"
            )));
        }
        Ok(BranchSpec { arg_lo, arg_hi, hi_inclusive })
    }

    /// The principal branch, `−π < arg ≤ π`.
    pub fn principal() -> Self {
        BranchSpec { arg_lo: -PI, arg_hi: PI, hi_inclusive: true }
    }

    /// The Borel-plane branch `−3π/2 < arg ξ ≤ π/2`, so that
    /// `−3π/4 < arg ξ^{1/2} ≤ π/4`; the singular ray `arg ξ = π/2` itself is
    /// reached as a limit from inside the range.
    pub fn borel_plane() -> Self {
        BranchSpec { arg_lo: -1.5 * PI, arg_hi: 0.5 * PI, hi_inclusive: true }
    }

    /// A 2π-wide window centred on `center`.
    pub fn centered(center: f64) -> Self {
        BranchSpec { arg_lo: center - PI, arg_hi: center + PI, hi_inclusive: true }
    }

    fn contains(&self, a: f64) -> bool {
        // Arguments are rounded to f64 before the test; a rounding slack keeps
        // inputs that sit exactly on an inclusive edge (e.g. e^{iπ/2}) inside.
        const SLACK: f64 = 1e-14;
        a > self.arg_lo && (a < self.arg_hi || (self.hi_inclusive && a <= self.arg_hi + SLACK))
    }
}

/// `z^e` on the branch selected by `spec`.
pub fn frac_pow(z: &Cx, e: Rational64, spec: &BranchSpec) -> Result<Cx> {
    let p = z.prec();
    if z.is_zero() {
        return match e.numer().signum() {
            -1 => Err(Error::ZeroToNegativePower),
            0 => Ok(Cx::one(p)),
            _ => Ok(Cx::zero(p)),
        };
    }
    let principal = z.arg();
    let two_pi = Float::with_val(p, pi(p) * 2u32);
    let mut chosen = None;
    for k in [0i32, -1, 1, -2, 2] {
        let shift = Float::with_val(p, &two_pi * k);
        let a = Float::with_val(p, &principal + &shift);
        if spec.contains(a.to_f64()) {
            chosen = Some(a);
            break;
        }
    }
    let arg = chosen.ok_or(Error::OutsideBranch {
        arg: principal.to_f64(),
        lo: spec.arg_lo,
        hi: spec.arg_hi,
    })?;
    Ok(frac_pow_polar(&z.abs(), &arg, e))
}

/// `(r e^{iφ})^e = r^e e^{i e φ}` for an explicitly given argument `φ`.
pub fn frac_pow_polar(r: &Float, arg: &Float, e: Rational64) -> Cx {
    let p = r.prec();
    let (n, d) = (*e.numer(), *e.denom());
    let modulus = if d == 1 && n.unsigned_abs() <= u32::MAX as u64 {
        let mut m = Float::with_val(p, r.pow(n.unsigned_abs() as u32));
        if n < 0 {
            m.recip_mut();
        }
        m
    } else {
        let mut m = Float::with_val(p, r.ln_ref());
        m *= n;
        m /= d;
        m.exp_mut();
        m
    };
    let mut phase = Float::with_val(p, arg * n);
    phase /= d;
    Cx::polar(&modulus, &phase)
}
