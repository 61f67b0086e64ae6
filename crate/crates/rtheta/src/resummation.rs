//! Directional Laplace transforms of the Borel-plane functions, the lateral
//! and median sums of `Θ̃`, the splitting `Θ = pole + Θ⁺ + Θ⁻`, the Stokes
//! jump across the singular ray `arg ξ = π/2`, and the representation of `Θ`
//! as an integral of the generating function along `Re t = c`.

use crate::core_numerics::{frac_pow, frac_pow_polar, pi, quadrature_ray, trapezoid_line, BranchSpec, Cx, Estimate, PrecisionContext, RayOptions};
use crate::error::{Error, Result};
use crate::genfun::GenFun;
use crate::theta::{theta_eval, ThetaSpec};
use num_rational::Rational64;
use rug::Float;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

/// Closest a lateral ray may come to the singular direction `π/2`.
pub const EPS_MIN: f64 = PI / 24.0;

/// Default lateral offset `ε`.
pub const EPS_DEFAULT: f64 = PI / 12.0;

/// `L^θ φ(τ)` with its error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct RaySum {
    pub theta: f64,
    #[serde(skip)]
    pub tau: Cx,
    #[serde(skip)]
    pub value: Cx,
    pub err: f64,
}

/// Which Borel-plane function is transformed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaplaceKind {
    /// `ξ^{−1/2} φ̂⁺(ξ)`, principal root; integrable `ξ^{−1/2}` endpoint singularity.
    PlusWithSqrt,
    /// `½ φ̂⁻(ξ)`.
    HalfMinus,
}

/// Three pieces of `Θ` whose sum is `Θ(τ)`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pole: Cx,
    pub plus: Estimate<Cx>,
    pub minus: Estimate<Cx>,
}

impl Decomposition {
    pub fn total(&self) -> Cx {
        &(&self.pole + &self.plus.value) + &self.minus.value
    }

    pub fn err(&self) -> f64 {
        self.plus.err + self.minus.err
    }
}

/// How `Θ⁻` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinusMode {
    Quadrature,
    ClosedForm,
}

fn check_half_plane(theta: f64, tau: &Cx) -> Result<f64> {
    if tau.is_zero() {
        return Err(Error::OutsideDomain("τ = 0".into()));
    }
    let rate = (theta - tau.arg().to_f64()).cos() / tau.abs_f64();
    if rate <= 1e-12 {
        return Err(Error::OutsideDomain(format!("τ = {tau} outside the convergence half-plane of direction {theta}")));
    }
    Ok(rate)
}

/// `L^θ g(τ) = e^{iθ}∫_0^∞ e^{−s e^{iθ}/τ} g(s e^{iθ}) ds` for an arbitrary
/// integrand `g`.
///
/// `pole_distance`, when given, is the distance from the ray to the nearest
/// singularity of `g`; the roundoff floor is divided by it (relative to
/// `|τ|`), which accounts for the cancellation in the peak the pole
/// produces on the ray.
pub fn laplace_ray<G>(
    g: G,
    theta: f64,
    tau: &Cx,
    sqrt_singularity: bool,
    pole_distance: Option<f64>,
    ctx: &PrecisionContext,
) -> Result<RaySum>
where
    G: Fn(&Cx) -> Result<Cx>,
{
    let rate = check_half_plane(theta, tau)?;
    let p = ctx.bits();
    let tau = tau.with_prec(p);
    let inv_tau = tau.recip();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let opts = RayOptions::new(theta, rate).with_sqrt_singularity(sqrt_singularity);
    let est = quadrature_ray(
        |pt| {
            if failure.borrow().is_some() {
                return Cx::zero(p);
            }
            match g(&pt.xi) {
                Ok(v) => &(-&(&pt.xi * &inv_tau)).exp() * &v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    Cx::zero(p)
                }
            }
        },
        &opts,
        ctx,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !est.converged || !est.err.is_finite() {
        return Err(Error::NonConvergence("Laplace quadrature", format!("direction {theta}, τ = {tau}, err {:e}", est.err)));
    }
    let penalty = pole_distance.map_or(1.0, |d| (tau.abs_f64() / d).max(1.0));
    let err = est.err + est.value.abs_f64().max(1.0) * ctx.eps() * penalty;
    Ok(RaySum { theta, tau, value: est.value, err })
}

/// `L^θ` applied to one of the two Borel-plane integrands of `g`.
pub fn laplace_directional(
    kind: LaplaceKind,
    g: &GenFun,
    theta: f64,
    tau: &Cx,
    ctx: &PrecisionContext,
) -> Result<RaySum> {
    let offset = (theta - FRAC_PI_2).abs();
    if offset < EPS_MIN * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!("direction {theta} is within π/24 of the singular ray π/2")));
    }
    if theta <= -PI || theta >= PI {
        return Err(Error::InvalidArgument(format!("direction {theta} outside (−π, π)")));
    }
    let dist = offset.sin().min(1.0) * PI / g.period() as f64;
    let sqrt = kind == LaplaceKind::PlusWithSqrt;
    laplace_ray(
        |xi| {
            let (a, b) = g.laplace_integrands(xi)?;
            Ok(if sqrt { a } else { b })
        },
        theta,
        tau,
        sqrt,
        Some(dist),
        ctx,
    )
}

fn inv_sqrt_tau(tau: &Cx) -> Cx {
    frac_pow(tau, Rational64::new(-1, 2), &BranchSpec::principal()).expect("τ ≠ 0")
}

fn check_lateral(tau: &Cx, eps: f64) -> Result<()> {
    if !(EPS_MIN * (1.0 - 1e-12)..=FRAC_PI_2).contains(&eps) {
        return Err(Error::InvalidArgument(format!("ε = {eps} outside [π/24, π/2]")));
    }
    let arg = tau.arg().to_f64();
    if tau.im.is_sign_negative() || arg <= eps || arg >= PI - eps {
        return Err(Error::OutsideDomain(format!("arg τ = {arg} must lie in (ε, π − ε) with ε = {eps}")));
    }
    Ok(())
}

fn lateral_pair(kind: LaplaceKind, g: &GenFun, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<(RaySum, RaySum)> {
    check_lateral(tau, eps)?;
    let right = laplace_directional(kind, g, FRAC_PI_2 - eps, tau, ctx)?;
    let left = laplace_directional(kind, g, FRAC_PI_2 + eps, tau, ctx)?;
    Ok((right, left))
}

/// `(S^{π/2−ε}Θ̃(τ), S^{π/2+ε}Θ̃(τ))`, each `τ^{−1/2} L^{π/2∓ε}[ξ^{−1/2}φ̂⁺]`.
pub fn lateral_sums(spec: &ThetaSpec, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<(Estimate<Cx>, Estimate<Cx>)> {
    let g = GenFun::build(spec.nu, &spec.f.with_prec(ctx.bits()));
    lateral_sums_with(&g, tau, eps, ctx)
}

/// [`lateral_sums`] for an already built generating function.
pub fn lateral_sums_with(g: &GenFun, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<(Estimate<Cx>, Estimate<Cx>)> {
    let (r, l) = lateral_pair(LaplaceKind::PlusWithSqrt, g, tau, eps, ctx)?;
    let k = inv_sqrt_tau(&tau.with_prec(ctx.bits()));
    let scale = k.abs_f64();
    let wrap = |s: RaySum| Estimate { value: &k * &s.value, err: s.err * scale, converged: true };
    Ok((wrap(r), wrap(l)))
}

/// `S^θ Θ̃(τ) = τ^{−1/2} L^θ[ξ^{−1/2}φ̂⁺]` for a single direction `θ` and a
/// `τ` anywhere in the half-plane `arg τ ∈ (θ − π/2, θ + π/2)`, including
/// points off `H`. `τ^{−1/2}` is taken with `arg τ` equal to the principal
/// argument plus `2π·sheet`.
pub fn lateral_sum_at(g: &GenFun, theta: f64, tau: &Cx, sheet: i32, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let p = ctx.bits();
    let s = laplace_directional(LaplaceKind::PlusWithSqrt, g, theta, tau, ctx)?;
    let tau = tau.with_prec(p);
    let arg = tau.arg() + Float::with_val(p, pi(p) * 2u32) * sheet;
    let k = frac_pow_polar(&tau.abs(), &arg, Rational64::new(-1, 2));
    let scale = k.abs_f64();
    Ok(Estimate { value: &k * &s.value, err: s.err * scale, converged: true })
}

/// The median sum in the direction `π/2`: the average of the lateral sums,
/// which is `Θ⁺(τ)`.
pub fn median_sum(spec: &ThetaSpec, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let (a, b) = lateral_sums(spec, tau, eps, ctx)?;
    Ok(average(a, b))
}

fn average(a: Estimate<Cx>, b: Estimate<Cx>) -> Estimate<Cx> {
    Estimate { value: (&a.value + &b.value).div_i64(2), err: (a.err + b.err) / 2.0, converged: a.converged && b.converged }
}

/// `ε` adapted to `τ`: `min(π/12, arg τ/2, (π − arg τ)/2)`, never below `π/24`.
pub fn adaptive_eps(tau: &Cx) -> f64 {
    let arg = tau.arg().to_f64();
    EPS_DEFAULT.min(arg / 2.0).min((PI - arg) / 2.0).max(EPS_MIN)
}

/// `Θ⁻(τ)`, by quadrature `τ^{−1/2}(L^{π/2−ε} − L^{π/2+ε})[½φ̂⁻]` or by the
/// closed forms `(τ/i)^{−1/2}Θ(−1/τ; 0, f̂^ev)` (ν = 0) and
/// `i(τ/i)^{−3/2}Θ(−1/τ; 1, f̂^od)` (ν = 1).
pub fn theta_minus(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext, mode: MinusMode) -> Result<Estimate<Cx>> {
    match mode {
        MinusMode::Quadrature => {
            let g = GenFun::build(spec.nu, &spec.f.with_prec(ctx.bits()));
            theta_minus_quadrature(&g, tau, adaptive_eps(tau), ctx)
        }
        MinusMode::ClosedForm => {
            let hat = spec.f.with_prec(ctx.bits()).dft();
            let (ev, od) = hat.parity_split();
            match spec.nu {
                0 => inverted_theta(0, ev, tau, Cx::one(ctx.bits()), ctx),
                1 => inverted_theta(1, od, tau, Cx::i(ctx.bits()), ctx),
                nu => Err(Error::Unsupported(format!("closed form for Θ⁻ needs ν ≤ 1, got {nu}"))),
            }
        }
    }
}

/// `k (τ/i)^{−ν−1/2} Θ(−1/τ; ν, h)`.
fn inverted_theta(nu: u32, h: crate::periodic::PeriodicFunction, tau: &Cx, k: Cx, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let p = ctx.bits();
    let tau = tau.with_prec(p);
    let z = &tau / &Cx::i(p);
    let power = frac_pow(&z, Rational64::new(-(2 * nu as i64 + 1), 2), &BranchSpec::principal())?;
    let factor = &k * &power;
    let inv = -&tau.recip();
    let th = theta_eval(&ThetaSpec::new(nu, h), &inv, ctx)?;
    let scale = factor.abs_f64();
    Ok(Estimate { value: &factor * &th.value, err: th.err * scale, converged: th.converged })
}

fn theta_minus_quadrature(g: &GenFun, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let (r, l) = lateral_pair(LaplaceKind::HalfMinus, g, tau, eps, ctx)?;
    let k = inv_sqrt_tau(&tau.with_prec(ctx.bits()));
    Ok(Estimate { value: &k * &(&r.value - &l.value), err: (r.err + l.err) * k.abs_f64(), converged: true })
}

/// `½ Γ((ν+1)/2) m(f) ((π/M)(τ/i))^{−(ν+1)/2}`.
pub fn pole_term(spec: &ThetaSpec, tau: &Cx, prec: u32) -> Cx {
    let m = spec.period() as u32;
    let nu = spec.nu as i64;
    let mean = spec.f.with_prec(prec).mean();
    if mean.is_zero() {
        return Cx::zero(prec);
    }
    let gamma = Float::with_val(prec, Float::with_val(prec, nu + 1) / 2u32).gamma();
    let z = (&tau.with_prec(prec) / &Cx::i(prec)).scale(&Float::with_val(prec, pi(prec) / m));
    let power = frac_pow(&z, Rational64::new(-(nu + 1), 2), &BranchSpec::principal()).expect("τ/i ≠ 0");
    (&mean * &power).scale(&gamma).div_i64(2)
}

/// `Θ(τ) = pole + Θ⁺ + Θ⁻`, with `Θ⁺` the median sum and `Θ⁻` by quadrature,
/// both in the direction `π/2 ± ε` with `ε` from [`adaptive_eps`].
pub fn decomposition(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Decomposition> {
    let g = GenFun::build(spec.nu, &spec.f.with_prec(ctx.bits()));
    decomposition_with(&g, spec, tau, ctx)
}

/// [`decomposition`] for an already built generating function.
pub fn decomposition_with(g: &GenFun, spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Decomposition> {
    let eps = adaptive_eps(tau);
    let (a, b) = lateral_sums_with(g, tau, eps, ctx)?;
    let minus = theta_minus_quadrature(g, tau, eps, ctx)?;
    Ok(Decomposition { pole: pole_term(spec, tau, ctx.bits()), plus: average(a, b), minus })
}

/// `D(τ) = (S^{π/2−ε} − S^{π/2+ε})Θ̃(τ)` by quadrature, for `ν = 0, f` odd or
/// `ν = 1, f` even.
pub fn stokes_difference(spec: &ThetaSpec, tau: &Cx, eps: f64, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    check_stokes_parity(spec)?;
    let (a, b) = lateral_sums(spec, tau, eps, ctx)?;
    Ok(Estimate { value: &a.value - &b.value, err: a.err + b.err, converged: true })
}

/// Closed form of `D(τ)`: `2(τ/i)^{−1/2}Θ(−1/τ; 0, f̂)` for `ν = 0` and
/// `2i(τ/i)^{−3/2}Θ(−1/τ; 1, f̂)` for `ν = 1`.
pub fn stokes_difference_closed(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    check_stokes_parity(spec)?;
    let p = ctx.bits();
    let hat = spec.f.with_prec(p).dft();
    let k = if spec.nu == 0 { Cx::from_int(p, 2) } else { Cx::i(p).scale_i64(2) };
    inverted_theta(spec.nu, hat, tau, k, ctx)
}

fn check_stokes_parity(spec: &ThetaSpec) -> Result<()> {
    let f = &spec.f;
    let ok = match spec.nu {
        0 => f.is_odd(),
        1 => f.is_even(),
        _ => false,
    };
    if ok || f.norm_inf() == 0.0 {
        Ok(())
    } else {
        Err(Error::ParityMismatch(format!("Stokes difference needs ν = 0 with f odd or ν = 1 with f even (ν = {})", spec.nu)))
    }
}

/// `Θ(τ) = i τ^{−1/2} π^{−1/2} C^{−1} ∫_R e^{−(c+is)²/(C²τ)} F(c+is) ds`,
/// `C = (4π/M)^{1/2} e^{iπ/4}`: the image of the parabola `∂P_c` in the
/// `t = C ξ^{1/2}` plane is the vertical line `Re t = c`.
pub fn theta_via_parabola(spec: &ThetaSpec, tau: &Cx, c: f64, ctx: &PrecisionContext) -> Result<Estimate<Cx>> {
    let m = spec.period() as f64;
    if !(c > 0.0) || c >= 2.0 * PI / m {
        return Err(Error::InvalidArgument(format!("c = {c} must lie in (0, 2π/M)")));
    }
    if tau.im.is_sign_negative() || tau.im.is_zero() {
        return Err(Error::OutsideDomain(format!("Im τ must be positive, τ = {tau}")));
    }
    let p = ctx.bits();
    let wp = p + 64;
    let wctx = ctx.with_bits(wp)?;
    let g = GenFun::build(spec.nu, &spec.f.with_prec(wp));
    let tau = tau.with_prec(wp);
    let cc = g.borel_constant(wp);
    let k = (&cc * &cc * &tau).recip();
    let cf = Float::with_val(wp, c);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let (y, r2) = (tau.im.to_f64(), tau.norm_sqr().to_f64());
    let rate = m * y / (4.0 * PI * r2);
    let est = trapezoid_line(
        |s| {
            if failure.borrow().is_some() {
                return Cx::zero(wp);
            }
            let t = Cx::new(cf.clone(), s.clone());
            match g.eval(&t) {
                Ok(v) => &(-&(&(&t * &t) * &k)).exp() * &v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    Cx::zero(wp)
                }
            }
        },
        rate,
        c / 2.0,
        14,
        &wctx,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let rpi = Float::with_val(wp, pi(wp).sqrt_ref()).recip();
    let pref = (&Cx::i(wp) * &inv_sqrt_tau(&tau)).scale(&rpi);
    let pref = &pref / &cc;
    let scale = pref.abs_f64();
    Ok(Estimate { value: (&pref * &est.value).with_prec(p), err: est.err * scale, converged: est.converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::PeriodicFunction;

    #[test]
    fn pole_term_for_constant_function() {
        let spec = ThetaSpec::new(0, PeriodicFunction::from_i64(256, &[1]).unwrap());
        let v = pole_term(&spec, &Cx::i(256), 256);
        assert!((v - Cx::from_ratio(256, 1, 2)).abs_f64() < 1e-70);
    }

    #[test]
    fn adaptive_eps_bounds() {
        assert!((adaptive_eps(&Cx::i(64)) - EPS_DEFAULT).abs() < 1e-15);
        let low = Cx::from_f64(64, 1.0, 0.05);
        assert_eq!(adaptive_eps(&low), EPS_MIN);
    }
}
