//! Multiprecision complex numbers built on MPFR floats.
//!
//! All results inherit the precision of the left operand; callers create
//! values at the working precision of a [`PrecisionContext`](super::PrecisionContext).

use rug::float::Constant;
use rug::{Assign, Float};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A complex number `re + i·im` with MPFR components of equal precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

/// π at the given precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// A real number from an `f64` at the given precision.
pub fn real(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

impl Cx {
    pub fn new(re: Float, im: Float) -> Self {
        Cx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cx { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Cx { re: Float::with_val(prec, 1), im: Float::new(prec) }
    }

    pub fn i(prec: u32) -> Self {
        Cx { re: Float::new(prec), im: Float::with_val(prec, 1) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_int(prec: u32, n: i64) -> Self {
        Cx { re: Float::with_val(prec, n), im: Float::new(prec) }
    }

    /// Exact rational `p/q` rounded to the given precision.
    pub fn from_ratio(prec: u32, p: i64, q: i64) -> Self {
        let mut re = Float::with_val(prec, p);
        re /= q;
        Cx { re, im: Float::new(prec) }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Cx { re, im }
    }

    /// `e^{iθ}`.
    pub fn expi(theta: &Float) -> Self {
        let p = theta.prec();
        let mut sc = (Float::new(p), Float::new(p));
        sc.assign(theta.sin_cos_ref());
        Cx { re: sc.1, im: sc.0 }
    }

    /// `e^{iπ·p/q}` computed at the given precision.
    pub fn root_of_unity(prec: u32, p: i64, q: i64) -> Self {
        // Reduce p/q mod 2 first so the argument stays small and exact.
        let m = 2 * q;
        let r = p.rem_euclid(m);
        let mut theta = pi(prec + 8);
        theta *= r;
        theta /= q;
        Cx::expi(&theta).with_prec(prec)
    }

    /// `r·e^{iθ}`.
    pub fn polar(r: &Float, theta: &Float) -> Self {
        let mut z = Cx::expi(theta);
        z.re *= r;
        z.im *= r;
        z
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Copy rounded (or zero-extended) to another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Cx { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.mul_add_mul_ref(&self.re, &self.im, &self.im))
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in `(−π, π]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Multiply by a real scalar.
    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re * k), im: Float::with_val(p, &self.im * k) }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        Cx { re: self.re.clone() * k, im: self.im.clone() * k }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Cx { re: self.re.clone() / k, im: self.im.clone() / k }
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> Self {
        Cx { re: Float::with_val(self.prec(), -&self.im), im: self.re.clone() }
    }

    /// `self ← self·z + w` without temporaries beyond two scratch floats.
    pub fn mul_add_assign(&mut self, z: &Cx, w: &Cx, scratch: &mut (Float, Float)) {
        scratch.0.assign(self.re.mul_sub_mul_ref(&z.re, &self.im, &z.im));
        scratch.1.assign(self.re.mul_add_mul_ref(&z.im, &self.im, &z.re));
        self.re.assign(&scratch.0 + &w.re);
        self.im.assign(&scratch.1 + &w.im);
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re / &n), im: Float::with_val(p, -&self.im) / &n }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let mut sc = (Float::new(p), Float::new(p));
        sc.assign(self.im.sin_cos_ref());
        let e = Float::with_val(p, self.re.exp_ref());
        Cx { re: sc.1 * &e, im: sc.0 * &e }
    }

    /// `e^z − 1` without cancellation for small `z`.
    pub fn exp_m1(&self) -> Self {
        let p = self.prec();
        let mut sc = (Float::new(p), Float::new(p));
        sc.assign(self.im.sin_cos_ref());
        let em1 = Float::with_val(p, self.re.exp_m1_ref());
        // Re = expm1(a)·cos b − 2 sin²(b/2)
        let mut half = Float::with_val(p, &self.im / 2u32);
        half.sin_mut();
        half.square_mut();
        half *= 2u32;
        let re = Float::with_val(p, &em1 * &sc.1) - half;
        let e = em1 + 1u32;
        Cx { re, im: sc.0 * &e }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        Cx { re: Float::with_val(p, r.ln_ref()), im: self.arg() }
    }

    /// Principal square root (argument in `(−π/2, π/2]`).
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec();
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation.
        let abs_re = Float::with_val(p, self.re.abs_ref());
        let mut s = Float::with_val(p, &r + &abs_re);
        s /= 2;
        s.sqrt_mut();
        let mut t = Float::with_val(p, &self.im / &s);
        t /= 2;
        if self.re.is_sign_positive() {
            Cx { re: s, im: t }
        } else {
            let t = t.abs();
            let s = if self.im.is_sign_negative() { -s } else { s };
            Cx { re: t, im: s }
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Cx::one(self.prec());
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Decimal string pair with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (decimal_string(&self.re, digits), decimal_string(&self.im, digits))
    }

    /// Parse a pair of decimal strings at the given precision.
    pub fn parse(prec: u32, re: &str, im: &str) -> Option<Self> {
        let re = Float::parse(re.trim()).ok()?;
        let im = Float::parse(im.trim()).ok()?;
        Some(Cx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) })
    }
}

/// Decimal rendering of a float in scientific notation.
pub fn decimal_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Number of decimal digits that carry information at `bits` of precision.
pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize + 1
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        let (re, im) = self.to_decimal(d);
        write!(f, "({re}, {im})")
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, o: &'a Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, o: &'a Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, o: &'a Cx) -> Cx {
        let p = self.prec();
        Cx {
            re: Float::with_val(p, self.re.mul_sub_mul_ref(&o.re, &self.im, &o.im)),
            im: Float::with_val(p, self.re.mul_add_mul_ref(&o.im, &self.im, &o.re)),
        }
    }
}

impl<'a> Div<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn div(self, o: &'a Cx) -> Cx {
        let p = self.prec();
        let n = o.norm_sqr();
        let re = Float::with_val(p, self.re.mul_add_mul_ref(&o.re, &self.im, &o.im));
        let im = Float::with_val(p, self.im.mul_sub_mul_ref(&o.re, &self.re, &o.im));
        Cx { re: re / &n, im: im / &n }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, -&self.re), im: Float::with_val(p, -&self.im) }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re, im: -self.im }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Cx> for Cx {
            type Output = Cx;
            fn $m(self, o: Cx) -> Cx {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Cx> for Cx {
            type Output = Cx;
            fn $m(self, o: &'a Cx) -> Cx {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Cx> for &'a Cx {
            type Output = Cx;
            fn $m(self, o: Cx) -> Cx {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<'a> AddAssign<&'a Cx> for Cx {
    fn add_assign(&mut self, o: &'a Cx) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign<Cx> for Cx {
    fn add_assign(&mut self, o: Cx) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl<'a> SubAssign<&'a Cx> for Cx {
    fn sub_assign(&mut self, o: &'a Cx) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl<'a> MulAssign<&'a Cx> for Cx {
    fn mul_assign(&mut self, o: &'a Cx) {
        let r = &*self * o;
        *self = r;
    }
}

impl<'a> MulAssign<&'a Float> for Cx {
    fn mul_assign(&mut self, k: &'a Float) {
        self.re *= k;
        self.im *= k;
    }
}
