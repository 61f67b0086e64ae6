//! Direct evaluation of `Θ(τ; ν, f, M)`, its values at rational boundary
//! points, the formal series `Θ̃` (and the translated `Θ̃_α`), and the change
//! of variable `Q = (e^{2πiτ} − 1)/(2πi)`.

use crate::core_numerics::{pi, Cx, Estimate, PrecisionContext, TruncatedSeries};
use crate::error::{Error, Result};
use crate::genfun::lvalues;
use crate::periodic::PeriodicFunction;
use num_rational::Rational64;
use rug::ops::Pow;
use rug::Float;

/// Default cap on the number of terms of a direct summation.
pub const MAX_TERMS: u64 = 10_000_000;

/// The data `(ν, f)`; `M` is the period of `f`.
#[derive(Clone, Debug)]
pub struct ThetaSpec {
    pub nu: u32,
    pub f: PeriodicFunction,
}

impl ThetaSpec {
    pub fn new(nu: u32, f: PeriodicFunction) -> Self {
        ThetaSpec { nu, f }
    }

    pub fn period(&self) -> usize {
        self.f.period()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ThetaSpec { nu: self.nu, f: self.f.with_prec(prec) }
    }
}

/// Smallest `N` with `‖f‖∞ N^ν e^{−πN²y/M}/(1 − e^{−πNy/M}) < target`: a
/// bound for the tail `Σ_{n>N}` once `n^ν e^{−πn²y/M}` is decreasing.
pub fn truncation_index(nu: u32, norm: f64, y: f64, m: usize, target: f64) -> Option<u64> {
    if norm == 0.0 {
        return Some(0);
    }
    let a = std::f64::consts::PI * y / m as f64;
    let ln_target = target.ln() - norm.ln();
    let bound = |n: f64| nu as f64 * n.ln() - a * n * n - (-(-a * n).exp_m1()).ln();
    // Past the maximum of n^ν e^{−a n²} the majorant decreases monotonically.
    let start = ((nu as f64) / (2.0 * a)).sqrt().ceil().max(1.0);
    let mut lo = start;
    if bound(lo) < ln_target {
        return Some(lo as u64);
    }
    let mut hi = lo * 2.0;
    while bound(hi) >= ln_target {
        hi *= 2.0;
        if hi > MAX_TERMS as f64 * 2.0 {
            return None;
        }
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if bound(mid) < ln_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi as u64)
}

/// `Θ(τ; ν, f, M)` by direct summation with a certified tail bound.
///
/// Uses `x^{(n+1)²} = x^{n²} · x^{2n+1}` with `x = e^{iπτ/M}`, at a working
/// precision raised by `log₂ N` bits to absorb the accumulated rounding.
pub fn theta_eval(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let y = tau.im.to_f64();
    if !(y > 0.0) {
        return Err(Error::OutsideDomain(format!("Im τ = {y} is not positive")));
    }
    let m = spec.period();
    let norm = spec.f.norm_inf();
    let target = ctx.target() / 2.0;
    let n_max = truncation_index(spec.nu, norm, y, m, target)
        .filter(|&n| n <= MAX_TERMS)
        .ok_or_else(|| Error::NonConvergence("theta_eval", format!("more than {MAX_TERMS} terms at Im τ = {y}")))?;
    let bits = ctx.bits();
    let wp = bits + 64u32.min(((n_max + 1) as f64).log2().ceil() as u32 + 10);
    let mut x = tau.with_prec(wp);
    x = x.mul_i().scale(&pi(wp)).div_i64(m as i64).exp();
    let x2 = &x * &x;
    let mut pw = x.clone(); // x^{n²}
    let mut step = &x * &x2; // x^{2n+1}
    let mut acc = Cx::zero(wp);
    let mut abs_sum = 0.0f64;
    for n in 1..=n_max as i64 {
        let fv = spec.f.at(n);
        if !fv.is_zero() {
            let mut term = &pw * fv;
            if spec.nu > 0 {
                term = term.scale(&Float::with_val(wp, n).pow(spec.nu));
            }
            abs_sum += term.abs_f64();
            acc += &term;
        }
        pw = &pw * &step;
        step = &step * &x2;
    }
    let tail = if n_max == 0 { 0.0 } else { target };
    let roundoff = abs_sum * (n_max as f64 + 1.0) * 4.0 * (-(wp as f64)).exp2();
    Ok(Estimate { value: acc.with_prec(bits), err: tail + roundoff + (-(bits as f64)).exp2() * acc.abs_f64(), converged: true })
}

/// `Θ̃(τ) = Σ_{p≤P} L(−2p−ν, f)(πi/M)^p τ^p / p!`.
pub fn asymptotic_series(spec: &ThetaSpec, order: usize) -> TruncatedSeries {
    series_from_lvalues(&spec.f, spec.nu, spec.period(), order)
}

fn series_from_lvalues(f: &PeriodicFunction, nu: u32, m: usize, order: usize) -> TruncatedSeries {
    let p = f.prec();
    let l = lvalues(f, 2 * order + nu as usize);
    let step = Cx::new(Float::new(p), Float::with_val(p, pi(p) / m as u32));
    let mut pw = Cx::one(p);
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k > 0 {
            pw = (&pw * &step).div_i64(k as i64);
        }
        coeffs.push(&l[2 * k + nu as usize] * &pw);
    }
    TruncatedSeries::from_coeffs(coeffs).expect("non-empty")
}

/// `Θ̃_α(τ) = Σ_{p≤P} L(−2p−ν, f_{α/M})(πi/M)^p τ^p / p!` with the original `M`.
pub fn asymptotic_series_at(spec: &ThetaSpec, alpha: Rational64, order: usize) -> TruncatedSeries {
    let m = spec.period();
    let (tw, _) = spec.f.twist_beta(alpha / Rational64::from_integer(m as i64));
    series_from_lvalues(&tw, spec.nu, m, order)
}

/// `m(f_{α/M})`, the mean of the twisted function over its period.
pub fn twisted_mean(spec: &ThetaSpec, alpha: Rational64) -> Cx {
    let (tw, _) = spec.f.twist_beta(alpha / Rational64::from_integer(spec.period() as i64));
    tw.mean()
}

/// Whether `α ∈ Q̄_{f,M}`, i.e. `m(f_{α/M}) = 0`.
///
/// Means below `2^{−0.26·bits}` (≈ 10⁻²⁰ at 256 bits) count as zero, above
/// 10⁻¹⁰ as non-zero; anything in between is reported as indeterminate.
pub fn qbar_membership(spec: &ThetaSpec, alpha: Rational64) -> Result<bool> {
    let mean = twisted_mean(spec, alpha).abs_f64();
    let zero_tol = (-(spec.f.prec() as f64) * 0.26).exp2();
    if mean < zero_tol {
        Ok(true)
    } else if mean > 1e-10 {
        Ok(false)
    } else {
        Err(Error::Indeterminate(mean))
    }
}

/// `Θⁿᵗ(α) = L(−ν, f_{α/M})` when `α ∈ Q̄_{f,M}`; `None` when the
/// non-tangential limit diverges.
pub fn boundary_value(spec: &ThetaSpec, alpha: Rational64) -> Result<Option<Cx>> {
    if !qbar_membership(spec, alpha)? {
        return Ok(None);
    }
    let (tw, _) = spec.f.twist_beta(alpha / Rational64::from_integer(spec.period() as i64));
    Ok(lvalues(&tw, spec.nu as usize).pop())
}

/// Polynomial extrapolation to `h = 0` of samples `(h_j, v_j)` (Neville).
pub fn extrapolate_to_zero(hs: &[Float], vs: &[Cx]) -> Estimate<Cx> {
    let n = vs.len();
    let mut table: Vec<Cx> = vs.to_vec();
    let mut prev_diag = table[0].clone();
    let mut last_change = f64::INFINITY;
    for k in 1..n {
        for i in 0..n - k {
            // P_{i..i+k}(0) = (h_{i+k} P_{i..i+k−1} − h_i P_{i+1..i+k})/(h_{i+k} − h_i)
            let den = Float::with_val(hs[0].prec(), &hs[i + k] - &hs[i]);
            let a = table[i].scale(&hs[i + k]);
            let b = table[i + 1].scale(&hs[i]);
            table[i] = (&a - &b).scale(&den.recip());
        }
        last_change = (&table[0] - &prev_diag).abs_f64();
        prev_diag = table[0].clone();
    }
    Estimate { value: table[0].clone(), err: last_change, converged: true }
}

/// Numerical non-tangential limit of `Θ` at `α` along `τ = α + h_j e^{iφ}`,
/// `h_j = h_0 2^{−j}`, `j = 0..=13`, extrapolated to `h = 0`.
///
/// `h_0 = min(2^{−4}, c/16)` with `c = πM/M_α²`: the exponentially small
/// remainder `e^{−c/h}` and the Gevrey growth `p!/c^p` of the expansion at `α`
/// both live on the scale `c`, and on a geometric grid the extrapolation
/// weights of the coarse samples decay like `2^{−j²/2}`.
pub fn numerical_boundary_limit(
    spec: &ThetaSpec,
    alpha: Rational64,
    direction: f64,
    ctx: &PrecisionContext,
) -> Result<Estimate<Cx>> {
    let p = ctx.bits();
    let m = spec.period();
    let (_, m_alpha) = spec.f.twist_beta(alpha / Rational64::from_integer(m as i64));
    let c = std::f64::consts::PI * m as f64 / (m_alpha * m_alpha) as f64;
    let h0 = (1.0f64 / 16.0).min(c / 16.0);
    let a = Float::with_val(p, *alpha.numer()) / *alpha.denom();
    let (sin, cos) = direction.sin_cos();
    let mut hs = Vec::new();
    let mut vs = Vec::new();
    for j in 0..=13 {
        let h = Float::with_val(p, h0) / Float::with_val(p, 2u32).pow(j as u32);
        let tau = Cx::new(Float::with_val(p, &h * cos) + &a, Float::with_val(p, &h * sin));
        vs.push(theta_eval(spec, &tau, ctx)?.value);
        hs.push(h);
    }
    Ok(extrapolate_to_zero(&hs, &vs))
}

/// `g(τ) = (e^{2πiτ} − 1)/(2πi) = Σ_{k≥1} (2πi)^{k−1} τ^k / k!`.
pub fn q_variable_series(prec: u32, order: usize) -> TruncatedSeries {
    let two_pi_i = Cx::new(Float::new(prec), Float::with_val(prec, pi(prec) * 2u32));
    let mut coeffs = vec![Cx::zero(prec); order.max(1) + 1];
    let mut c = Cx::one(prec);
    for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
        if k > 1 {
            c = (&c * &two_pi_i).div_i64(k as i64);
        }
        *slot = c.clone();
    }
    TruncatedSeries::from_coeffs(coeffs).expect("non-empty")
}

/// `Θ̃* = Θ̃ ∘ g^{−1}`, the series re-expanded in `Q = g(τ)`, to order `P`.
pub fn compose_q_variable(series: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    if *series.offset().numer() != 0 {
        return Err(Error::InvalidArgument("series must have offset 0".into()));
    }
    if order > series.order() {
        return Err(Error::InvalidArgument(format!(
            "requested order {order} exceeds the series order {}",
            series.order()
        )));
    }
    let inverse = q_variable_series(series.prec(), order.max(1)).reversion()?;
    Ok(series.truncate(order).compose(&inverse)?.truncate(order))
}
