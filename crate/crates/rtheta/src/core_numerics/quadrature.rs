//! Double-exponential quadrature along rays `ξ = s·e^{iθ}, s ∈ (0, ∞)`, and a
//! trapezoidal rule on the real line for Gaussian-decaying integrands.
//!
//! The ray rule uses the exp-sinh map `u = exp(π/2·sinh t)`; when an
//! `s^{−1/2}` endpoint singularity is declared the ray is parametrised by
//! `s = u²` first, which removes the singularity. The step is halved until the
//! discretisation error, estimated from successive level differences, meets
//! the target; the truncation point on the right is where the declared
//! envelope `B·e^{−κ s}` drops below a tenth of the target.

use super::complex::Cx;
use super::{Estimate, PrecisionContext};
use rug::{Assign, Float};

/// A quadrature node on the ray: real parameter `s` and the point `ξ = s·e^{iθ}`.
#[derive(Clone, Debug)]
pub struct RayPoint {
    pub s: Float,
    pub xi: Cx,
}

/// Description of a ray integral `e^{iθ}∫_0^∞ g(s e^{iθ}) ds`.
#[derive(Clone, Debug)]
pub struct RayOptions {
    /// Direction of the ray.
    pub theta: f64,
    /// The integrand behaves like `s^{−1/2}` at the origin.
    pub sqrt_singularity: bool,
    /// Exponential decay rate `κ > 0` of the envelope `B e^{−κ s}`.
    pub decay_rate: f64,
    /// Envelope constant `B`; estimated from the samples when absent.
    pub envelope: Option<f64>,
    /// Maximum number of step halvings after the initial level.
    pub max_levels: u32,
    /// Minimum number of halvings before convergence may be declared.
    pub min_levels: u32,
    /// Initial step in the `t` variable.
    pub h0: f64,
}

impl RayOptions {
    pub fn new(theta: f64, decay_rate: f64) -> Self {
        RayOptions {
            theta,
            sqrt_singularity: false,
            decay_rate,
            envelope: None,
            max_levels: 12,
            min_levels: 2,
            h0: 0.5,
        }
    }

    pub fn with_sqrt_singularity(mut self, yes: bool) -> Self {
        self.sqrt_singularity = yes;
        self
    }

    pub fn with_envelope(mut self, b: f64) -> Self {
        self.envelope = Some(b);
        self
    }
}

struct RayMap {
    prec: u32,
    dir: Cx,
    half_pi: Float,
    squared: bool,
}

impl RayMap {
    /// Node at `t`: returns `ds/dt` and the point.
    fn node(&self, t: f64) -> (Float, RayPoint) {
        let p = self.prec;
        let tt = Float::with_val(p, t);
        let mut sc = (Float::new(p), Float::new(p));
        sc.assign(tt.sinh_cosh_ref());
        let mut u = Float::with_val(p, &sc.0 * &self.half_pi);
        u.exp_mut();
        // du/dt = u · π/2 · cosh t
        let mut dudt = Float::with_val(p, &u * &self.half_pi);
        dudt *= &sc.1;
        let (s, dsdt) = if self.squared {
            let s = Float::with_val(p, u.square_ref());
            let mut d = Float::with_val(p, &u * &dudt);
            d *= 2u32;
            (s, d)
        } else {
            (u, dudt)
        };
        let xi = self.dir.scale(&s);
        (dsdt, RayPoint { s, xi })
    }
}

/// Vector-valued ray integral; all components share the nodes.
///
/// Returns `e^{iθ}∫_0^∞ g(s e^{iθ}) ds` componentwise. The error estimate is
/// the maximum over components of the last refinement difference plus the
/// truncation tail and a roundoff floor.
pub fn quadrature_ray_vec<F>(g: F, dim: usize, opts: &RayOptions, ctx: &PrecisionContext) -> Estimate<Vec<Cx>>
where
    F: Fn(&RayPoint) -> Vec<Cx>,
{
    let p = ctx.bits();
    let target = ctx.target();
    let map = RayMap {
        prec: p,
        dir: Cx::expi(&Float::with_val(p, opts.theta)),
        half_pi: Float::with_val(p, rug::float::Constant::Pi) / 2u32,
        squared: opts.sqrt_singularity,
    };
    let kappa = opts.decay_rate.max(1e-300);
    let zero = || vec![Cx::zero(p); dim];
    let mut total = zero();
    let mut abs_total = 0.0f64;
    let accumulate = |total: &mut Vec<Cx>, abs_total: &mut f64, w: &Float, vals: &[Cx]| -> f64 {
        let mut m = 0.0f64;
        for (acc, v) in total.iter_mut().zip(vals) {
            let term = v.scale(w);
            m = m.max(term.abs_f64());
            *acc += &term;
        }
        *abs_total += m;
        m
    };

    // Level 0, walking outwards from t = 0 in both directions.
    let h0 = opts.h0;
    let mut ln_b = opts.envelope.map(|b| b.max(1e-300).ln()).unwrap_or(f64::NEG_INFINITY);
    let mut k_max = 0i64;
    let mut flagged = false;
    {
        let (w, pt) = map.node(0.0);
        let vals = g(&pt);
        let s = pt.s.to_f64();
        for v in &vals {
            let a = v.abs_f64();
            if a > 0.0 {
                ln_b = ln_b.max(a.ln() + kappa * s);
            }
        }
        accumulate(&mut total, &mut abs_total, &w, &vals);
    }
    loop {
        let k = k_max + 1;
        let t = k as f64 * h0;
        if t > 7.0 {
            flagged = true;
            break;
        }
        let (w, pt) = map.node(t);
        let s = pt.s.to_f64();
        let vals = g(&pt);
        for v in &vals {
            let a = v.abs_f64();
            if a > 0.0 {
                ln_b = ln_b.max(a.ln() + kappa * s);
            }
        }
        accumulate(&mut total, &mut abs_total, &w, &vals);
        k_max = k;
        let s_max = if ln_b.is_finite() { (ln_b - (target * kappa / 10.0).ln()) / kappa } else { 0.0 };
        if s > s_max && s > 1.0 / kappa {
            break;
        }
    }
    let t_max = k_max as f64 * h0;
    let s_max = map.node(t_max).1.s.to_f64();
    let tail = if ln_b.is_finite() { (ln_b - kappa * s_max).exp() / kappa } else { 0.0 };

    let mut k_min = 0i64;
    let mut small = 0;
    let mut left_tail = 0.0f64;
    loop {
        let k = k_min - 1;
        let t = k as f64 * h0;
        if t < -8.0 {
            flagged = true;
            break;
        }
        let (w, pt) = map.node(t);
        let vals = g(&pt);
        let m = accumulate(&mut total, &mut abs_total, &w, &vals);
        k_min = k;
        left_tail = m;
        if m < target * 1e-6 {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    let t_min = k_min as f64 * h0;

    let scale_sum = |sum: &Vec<Cx>, h: f64| -> Vec<Cx> {
        let hf = Float::with_val(p, h);
        sum.iter().map(|c| &c.scale(&hf) * &map.dir).collect()
    };
    let mut prev = scale_sum(&total, h0);
    let mut h = h0;
    let mut err = f64::INFINITY;
    let mut prev_diff = f64::INFINITY;
    let mut converged = false;
    for level in 1..=opts.max_levels {
        h /= 2.0;
        // New nodes are the odd multiples of h inside [t_min, t_max].
        let j_lo = ((t_min / h - 1.0) / 2.0).ceil() as i64;
        let j_hi = ((t_max / h - 1.0) / 2.0).floor() as i64;
        for j in j_lo..=j_hi {
            let t = (2 * j + 1) as f64 * h;
            let (w, pt) = map.node(t);
            let vals = g(&pt);
            accumulate(&mut total, &mut abs_total, &w, &vals);
        }
        let cur = scale_sum(&total, h);
        let diff = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs_f64()).fold(0.0, f64::max);
        let roundoff = abs_total * h * ctx.eps() * 16.0;
        // Once the rule is in its regime each halving doubles the correct
        // digits, so the current level is about as far from the limit as the
        // next difference, ≈ diff²/prev_diff; a factor 10 keeps it honest.
        let discretisation = if level >= 3 && diff < 1e-3 * prev_diff { 10.0 * diff * (diff / prev_diff) } else { diff };
        err = discretisation + roundoff + tail + left_tail * h0;
        prev_diff = diff;
        prev = cur;
        if level >= opts.min_levels && err <= target {
            converged = true;
            break;
        }
    }
    Estimate { value: prev, err, converged: converged && !flagged }
}

/// Scalar ray integral `e^{iθ}∫_0^∞ g(s e^{iθ}) ds`.
pub fn quadrature_ray<F>(g: F, opts: &RayOptions, ctx: &PrecisionContext) -> Estimate<Cx>
where
    F: Fn(&RayPoint) -> Cx,
{
    quadrature_ray_vec(|pt| vec![g(pt)], 1, opts, ctx).map(|mut v| v.swap_remove(0))
}

/// Trapezoidal rule for `∫_R g(s) ds` with `|g(s)| ≲ B e^{−a s²}`.
///
/// Starts with step `h0` and halves it until successive levels agree; the
/// integrand should be analytic in a strip around the real axis, which
/// makes the convergence geometric in `1/h`.
pub fn trapezoid_line<F>(g: F, gauss_rate: f64, h0: f64, max_levels: u32, ctx: &PrecisionContext) -> Estimate<Cx>
where
    F: Fn(&Float) -> Cx,
{
    let p = ctx.bits();
    let target = ctx.target();
    let a = gauss_rate.max(1e-300);
    let mut total = Cx::zero(p);
    let mut abs_total = 0.0f64;
    let mut ln_b = f64::NEG_INFINITY;
    // Nodes are exact multiples `j·h` in working precision: rounding them in
    // f64 would break the uniformity the trapezoidal rule relies on.
    let eval = |j: i64, h: f64, total: &mut Cx, abs_total: &mut f64, ln_b: &mut f64| {
        let s = Float::with_val(p, h) * j;
        let v = g(&s);
        let s = s.to_f64();
        let m = v.abs_f64();
        if m > 0.0 {
            *ln_b = ln_b.max(m.ln() + a * s * s);
        }
        *abs_total += m;
        *total += &v;
    };
    eval(0, h0, &mut total, &mut abs_total, &mut ln_b);
    let mut k = 0i64;
    let mut flagged = false;
    loop {
        k += 1;
        let s = k as f64 * h0;
        eval(k, h0, &mut total, &mut abs_total, &mut ln_b);
        eval(-k, h0, &mut total, &mut abs_total, &mut ln_b);
        let s_max = if ln_b.is_finite() { ((ln_b - (target / 10.0).ln()) / a).max(0.0).sqrt() } else { 0.0 };
        if s > s_max {
            break;
        }
        if k > 10_000_000 {
            flagged = true;
            break;
        }
    }
    let s_end = k as f64 * h0;
    let tail = if ln_b.is_finite() { 2.0 * (ln_b - a * s_end * s_end).exp() / (2.0 * a * s_end).max(1e-300) } else { 0.0 };
    let mut prev = total.scale(&Float::with_val(p, h0));
    let mut h = h0;
    let mut err = f64::INFINITY;
    let mut converged = false;
    for _ in 0..max_levels {
        h /= 2.0;
        let n = (s_end / h).floor() as i64;
        let mut j = 1;
        while j <= n {
            eval(j, h, &mut total, &mut abs_total, &mut ln_b);
            eval(-j, h, &mut total, &mut abs_total, &mut ln_b);
            j += 2;
        }
        let cur = total.scale(&Float::with_val(p, h));
        let diff = (&cur - &prev).abs_f64();
        err = diff + tail + abs_total * h * ctx.eps() * 16.0;
        prev = cur;
        if err <= target {
            converged = true;
            break;
        }
    }
    Estimate { value: prev, err, converged: converged && !flagged }
}
