//! Truncated power series `Σ_{j=0}^{P} c_j x^{offset+j}` with a rational
//! leading exponent, enough to carry Puiseux factors such as `ξ^{−1/2}`.

use super::branch::{frac_pow, BranchSpec};
use super::complex::Cx;
use crate::error::{Error, Result};
use num_rational::Rational64;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    offset: Rational64,
    coeffs: Vec<Cx>,
}

fn rational_to_string(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl TruncatedSeries {
    pub fn new(offset: Rational64, coeffs: Vec<Cx>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a truncated series needs at least one coefficient".into()));
        }
        Ok(TruncatedSeries { offset, coeffs })
    }

    /// Ordinary power series (offset 0).
    pub fn from_coeffs(coeffs: Vec<Cx>) -> Result<Self> {
        Self::new(Rational64::from_integer(0), coeffs)
    }

    pub fn zero(prec: u32, order: usize) -> Self {
        TruncatedSeries { offset: Rational64::from_integer(0), coeffs: vec![Cx::zero(prec); order + 1] }
    }

    /// The series `x` (offset 0) known to the given order.
    pub fn identity(prec: u32, order: usize) -> Self {
        let mut s = Self::zero(prec, order.max(1));
        s.coeffs[1] = Cx::one(prec);
        s
    }

    pub fn offset(&self) -> Rational64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cx> {
        self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    /// Coefficient of `x^{offset+j}`.
    pub fn coeff(&self, j: usize) -> &Cx {
        &self.coeffs[j]
    }

    /// Keep only coefficients up to relative order `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        TruncatedSeries { offset: self.offset, coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn scale(&self, k: &Cx) -> Self {
        TruncatedSeries { offset: self.offset, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    fn integer_offset(&self) -> Option<i64> {
        (*self.offset.denom() == 1).then(|| *self.offset.numer())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        let diff = self.offset - other.offset;
        if *diff.denom() != 1 {
            return Err(Error::IncompatibleOffsets(
                rational_to_string(self.offset),
                rational_to_string(other.offset),
            ));
        }
        let lo = self.offset.min(other.offset);
        let end = (self.offset + self.order() as i64).min(other.offset + other.order() as i64);
        let order = (end - lo).to_integer() as usize;
        let prec = self.prec();
        let mut coeffs = vec![Cx::zero(prec); order + 1];
        for (s, sign) in [(self, false), (other, negate)] {
            let shift = (s.offset - lo).to_integer() as usize;
            for (j, c) in s.coeffs.iter().enumerate() {
                let k = j + shift;
                if k > order {
                    break;
                }
                if sign {
                    coeffs[k] -= c;
                } else {
                    coeffs[k] += c;
                }
            }
        }
        Ok(TruncatedSeries { offset: lo, coeffs })
    }

    /// Cauchy product; offsets add and the relative order is the smaller one.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = convolve(&self.coeffs, &other.coeffs, order);
        TruncatedSeries { offset: self.offset + other.offset, coeffs }
    }

    /// `1/s` for a series whose leading coefficient is non-zero.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("reciprocal of a series with zero leading coefficient".into()));
        }
        Ok(TruncatedSeries { offset: -self.offset, coeffs: reciprocal_coeffs(&self.coeffs, self.order()) })
    }

    /// Formal composition `self ∘ inner`.
    ///
    /// `self` must have an integer offset; `inner` must start at a positive
    /// integer power of `x` (a vanishing constant term with offset 0 is
    /// accepted). The result is truncated where either input's truncation
    /// would first contaminate it.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let oa = self.integer_offset().ok_or_else(|| {
            Error::IncompatibleOffsets(rational_to_string(self.offset), rational_to_string(inner.offset))
        })?;
        let ob = inner.integer_offset().ok_or_else(|| {
            Error::IncompatibleOffsets(rational_to_string(self.offset), rational_to_string(inner.offset))
        })?;
        // Normalise inner = x^o · y(x) with y(0) possibly zero only if o ≥ 1.
        let (o, y): (i64, Vec<Cx>) = if ob == 0 {
            if !inner.coeffs[0].is_zero() {
                return Err(Error::NonzeroConstantTerm);
            }
            if inner.coeffs.len() < 2 {
                return Err(Error::NonzeroConstantTerm);
            }
            (1, inner.coeffs[1..].to_vec())
        } else if ob >= 1 {
            (ob, inner.coeffs.clone())
        } else {
            return Err(Error::NonzeroConstantTerm);
        };
        if oa < 0 && y[0].is_zero() {
            return Err(Error::InvalidArgument("negative outer offset needs an invertible inner series".into()));
        }
        let pa = self.order() as i64;
        let pb = y.len() as i64 - 1;
        let k_min = if oa != 0 { oa } else { 1 };
        let end = (o * (oa + pa + 1)).min(pb + 1 + o * k_min) - 1;
        let base = o * oa;
        let r = (end - base).max(0) as usize;
        let prec = self.prec();

        let mut y = y;
        y.resize(r + 1, Cx::zero(prec));
        y.truncate(r + 1);
        let mut power = series_powi(&y, oa, r)?;
        let mut out = vec![Cx::zero(prec); r + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            let shift = (o as usize) * j;
            if shift > r {
                break;
            }
            for k in 0..=(r - shift) {
                let t = a * &power[k];
                out[k + shift] += &t;
            }
            power = convolve(&power, &y, r);
        }
        Ok(TruncatedSeries { offset: Rational64::from_integer(base), coeffs: out })
    }

    /// Compositional inverse of `g(x) = g₁x + g₂x² + …` (offset 0, `g₀ = 0`, `g₁ ≠ 0`).
    pub fn reversion(&self) -> Result<Self> {
        if self.integer_offset() != Some(0) || !self.coeffs[0].is_zero() || self.order() < 1 {
            return Err(Error::NonzeroConstantTerm);
        }
        let g1 = &self.coeffs[1];
        if g1.is_zero() {
            return Err(Error::InvalidArgument("reversion needs a non-zero linear coefficient".into()));
        }
        let prec = self.prec();
        let order = self.order();
        let mut h = vec![Cx::zero(prec); order + 1];
        h[1] = g1.recip();
        for k in 2..=order {
            let hs = TruncatedSeries { offset: Rational64::from_integer(0), coeffs: h.clone() };
            let gh = self.compose(&hs)?;
            let excess = if k < gh.coeffs.len() { gh.coeffs[k].clone() } else { Cx::zero(prec) };
            h[k] = &h[k] - &(&excess / g1);
        }
        Ok(TruncatedSeries { offset: Rational64::from_integer(0), coeffs: h })
    }

    /// Evaluate `Σ c_j x^{offset+j}`; fractional leading powers use `branch`.
    pub fn eval(&self, x: &Cx, branch: &BranchSpec) -> Result<Cx> {
        let mut acc = Cx::zero(x.prec());
        let mut scratch = (rug::Float::new(x.prec()), rug::Float::new(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc.mul_add_assign(x, c, &mut scratch);
        }
        if *self.offset.numer() == 0 {
            return Ok(acc);
        }
        Ok(&acc * &frac_pow(x, self.offset, branch)?)
    }
}

/// Truncated Cauchy product of two coefficient lists.
pub(crate) fn convolve(a: &[Cx], b: &[Cx], order: usize) -> Vec<Cx> {
    let prec = a[0].prec();
    let mut out = vec![Cx::zero(prec); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            let t = ai * bj;
            out[i + j] += &t;
        }
    }
    out
}

pub(crate) fn reciprocal_coeffs(a: &[Cx], order: usize) -> Vec<Cx> {
    let prec = a[0].prec();
    let inv0 = a[0].recip();
    let mut r = vec![Cx::zero(prec); order + 1];
    r[0] = inv0.clone();
    for k in 1..=order {
        let mut s = Cx::zero(prec);
        for j in 1..=k.min(a.len() - 1) {
            s += &(&a[j] * &r[k - j]);
        }
        r[k] = -(&s * &inv0);
    }
    r
}

pub(crate) fn series_powi(y: &[Cx], n: i64, order: usize) -> Result<Vec<Cx>> {
    let prec = y[0].prec();
    let mut base = if n < 0 { reciprocal_coeffs(y, order) } else { y.to_vec() };
    let mut k = n.unsigned_abs();
    let mut acc = vec![Cx::zero(prec); order + 1];
    acc[0] = Cx::one(prec);
    while k > 0 {
        if k & 1 == 1 {
            acc = convolve(&acc, &base, order);
        }
        k >>= 1;
        if k > 0 {
            base = convolve(&base, &base, order);
        }
    }
    Ok(acc)
}
