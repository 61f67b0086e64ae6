//! `SL(2, Z)` acting on partial theta series: the exact `ν = 0, 1` laws under
//! `τ ↦ −1/τ`, the coefficient transport `f ↦ h` for a general `γ`, its
//! congruence-subgroup simplifications, quadratic Gauss sums, the modular
//! obstructions `G±`, and the boundary values at `±1/k`.
//!
//! Throughout, `M` is required to be even for the general-`γ` formulas; the
//! odd case needs adjustments that are not available in closed form.

use crate::arith;
use crate::core_numerics::{frac_pow, frac_pow_polar, pi, BranchSpec, Cx, Estimate, PrecisionContext, TruncatedSeries};
use crate::error::{Error, Result};
use crate::genfun::GenFun;
use crate::periodic::{Parity, PeriodicFunction, VectorForm};
use crate::resummation::{lateral_sums, median_sum, adaptive_eps, lateral_sum_at, EPS_DEFAULT, EPS_MIN};
use crate::theta::{asymptotic_series, boundary_value, theta_eval, ThetaSpec};
use num_rational::Rational64;
use rug::Float;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// `γ = (a b; c d)` with `ad − bc = 1`, normalised to `c > 0`, or `c = 0` and
/// `a = d = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ModularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::InvalidArgument(format!("({a} {b}; {c} {d}) has determinant ≠ 1")));
        }
        let flip = c < 0 || (c == 0 && a < 0);
        Ok(if flip { ModularMatrix { a: -a, b: -b, c: -c, d: -d } } else { ModularMatrix { a, b, c, d } })
    }

    /// `S = (0 −1; 1 0)`.
    pub fn s() -> Self {
        ModularMatrix { a: 0, b: -1, c: 1, d: 0 }
    }

    /// `T^b = (1 b; 0 1)`.
    pub fn t(b: i64) -> Self {
        ModularMatrix { a: 1, b, c: 0, d: 1 }
    }

    pub fn is_parabolic(&self) -> bool {
        self.c == 0
    }

    /// `γ(τ) = (aτ + b)/(cτ + d)`.
    pub fn act(&self, tau: &Cx) -> Result<Cx> {
        let p = tau.prec();
        let den = &tau.scale_i64(self.c) + &Cx::from_int(p, self.d);
        if den.is_zero() {
            return Err(Error::OutsideDomain(format!("τ = {tau} is the pole −d/c of γ")));
        }
        Ok(&(&tau.scale_i64(self.a) + &Cx::from_int(p, self.b)) / &den)
    }

    /// `cτ + d`.
    pub fn j_factor(&self, tau: &Cx) -> Cx {
        &tau.scale_i64(self.c) + &Cx::from_int(tau.prec(), self.d)
    }

    /// `Γ(N)`: `a ≡ d ≡ 1`, `b ≡ c ≡ 0 (mod N)`.
    pub fn in_gamma(&self, n: i64) -> bool {
        self.in_gamma1(n) && self.b.rem_euclid(n) == 0
    }

    /// `Γ₁(N)`: `a ≡ d ≡ 1`, `c ≡ 0 (mod N)`.
    pub fn in_gamma1(&self, n: i64) -> bool {
        self.a.rem_euclid(n) == 1 % n && self.d.rem_euclid(n) == 1 % n && self.c.rem_euclid(n) == 0
    }

    /// `Γ₀⁰(N)`: `b ≡ c ≡ 0 (mod N)`.
    pub fn in_gamma00(&self, n: i64) -> bool {
        self.b.rem_euclid(n) == 0 && self.c.rem_euclid(n) == 0
    }
}

/// Jacobi symbol `(m/n)` for odd `n > 0`.
pub fn jacobi_symbol(m: i64, n: i64) -> Result<i64> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("Jacobi symbol needs an odd positive modulus, got {n}")));
    }
    Ok(arith::jacobi(m, n))
}

/// `ε_d = 1` for `d ≡ 1` and `i` for `d ≡ 3 (mod 4)`.
fn eps_d(prec: u32, d: i64) -> Cx {
    if d.rem_euclid(4) == 1 {
        Cx::one(prec)
    } else {
        Cx::i(prec)
    }
}

/// `Λ_N^a(ℓ) = e^{iπ a ℓ²/N}`, reduced exactly.
fn lambda_pow(prec: u32, n: i64, a: i64, l: i64) -> Cx {
    let m = 2 * n as i128;
    let e = (a as i128).rem_euclid(m) * (l as i128 * l as i128).rem_euclid(m) % m;
    Cx::root_of_unity(prec, e as i64, n)
}

fn check_general_gamma(f: &PeriodicFunction, nu: u32) -> Result<Parity> {
    if f.period() % 2 == 1 {
        return Err(Error::Unsupported(format!("M = {} is odd; the general-γ formulas need M even", f.period())));
    }
    if nu > 1 {
        return Err(Error::Unsupported(format!("ν = {nu}; the general-γ formulas need ν ∈ {{0, 1}}")));
    }
    match f.parity(f.tolerance()) {
        Parity::Mixed => Err(Error::ParityMismatch("f must be even or odd".into())),
        p => Ok(p),
    }
}

/// `h(n) = (cM)^{−1/2} Λ_M^{bd}(n) Σ_{r mod M} f(r + dn) g(r) e^{2πibnr/M}`,
/// `g(r) = Σ_{ℓ mod cM, ℓ ≡ r (M)} Λ_{cM}^a(ℓ)`.
pub fn h_function(gamma: &ModularMatrix, spec: &ThetaSpec) -> Result<PeriodicFunction> {
    check_general_gamma(&spec.f, spec.nu)?;
    if gamma.c <= 0 {
        return Err(Error::InvalidArgument("h needs c > 0".into()));
    }
    let f = &spec.f;
    let p = f.prec();
    let m = f.period() as i64;
    let cm = gamma.c * m;
    let mut g = vec![Cx::zero(p); m as usize];
    for l in 0..cm {
        g[(l % m) as usize] += &lambda_pow(p, cm, gamma.a, l);
    }
    let norm = Float::with_val(p, cm).sqrt().recip();
    let values = (0..m)
        .map(|n| {
            let mut acc = Cx::zero(p);
            for (r, gr) in g.iter().enumerate() {
                let r = r as i64;
                if gr.is_zero() {
                    continue;
                }
                let e = (2 * (gamma.b as i128) * n as i128 * r as i128).rem_euclid(2 * m as i128) as i64;
                let w = &Cx::root_of_unity(p, e, m) * gr;
                acc += &(f.at(r + gamma.d * n) * &w);
            }
            (&lambda_pow(p, m, gamma.b * gamma.d, n) * &acc).scale(&norm)
        })
        .collect();
    PeriodicFunction::new(values)
}

/// `f` is a Dirichlet character mod `M`: `f(1) = 1`, completely multiplicative,
/// vanishing exactly off the units.
pub fn is_dirichlet_character(f: &PeriodicFunction) -> bool {
    let m = f.period() as i64;
    let tol = f.tolerance();
    let one = Cx::one(f.prec());
    if (f.at(1) - &one).abs_f64() > tol {
        return false;
    }
    for a in 0..m {
        let unit = num_integer::gcd(a, m) == 1;
        if unit != (f.at(a).abs_f64() > tol) {
            return false;
        }
        for b in a..m {
            if (f.at(a * b) - &(f.at(a) * f.at(b))).abs_f64() > tol {
                return false;
            }
        }
    }
    true
}

/// Which congruence rule produced `λ(γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CongruenceCase {
    /// `γ ∈ Γ(2M)`.
    Principal,
    /// `γ ∈ Γ₁(2M)` with the support condition at `n₀`.
    Gamma1,
    /// `γ ∈ Γ₀⁰(2M)` with `f` a Dirichlet character.
    Gamma00,
}

/// `λ(γ)` with `Θ(γτ) = λ Θ(τ)` (parabolic `γ`) or `h = λ f` (non-parabolic),
/// when `γ` lies in one of `Γ(2M)`, `Γ₁(2M)` (support condition) or `Γ₀⁰(2M)`
/// (Dirichlet character); `None` otherwise. The relation is verified
/// numerically before returning.
pub fn congruence_lambda(gamma: &ModularMatrix, spec: &ThetaSpec) -> Result<Option<(Cx, CongruenceCase)>> {
    check_general_gamma(&spec.f, spec.nu)?;
    let f = &spec.f;
    let p = f.prec();
    let m = f.period() as i64;
    let n2 = 2 * m;
    let n0 = f.support_n0();
    let found = if gamma.is_parabolic() {
        if gamma.b.rem_euclid(n2) == 0 {
            Some((Cx::one(p), CongruenceCase::Principal))
        } else {
            n0.map(|n0| (lambda_pow(p, m, gamma.b, n0), CongruenceCase::Gamma1))
        }
    } else {
        let base = || -> Result<Cx> {
            let sym = jacobi_symbol(2 * m * gamma.c, gamma.d.abs())?;
            Ok(Cx::root_of_unity(p, 1, 4).scale_i64(sym))
        };
        if gamma.in_gamma(n2) {
            Some((base()?, CongruenceCase::Principal))
        } else if let (true, Some(n0)) = (gamma.in_gamma1(n2), n0) {
            Some((&lambda_pow(p, m, gamma.b, n0) * &base()?, CongruenceCase::Gamma1))
        } else if gamma.in_gamma00(n2) && is_dirichlet_character(f) {
            let l = &(&base()? / &eps_d(p, gamma.d)) * f.at(gamma.d);
            Some((l, CongruenceCase::Gamma00))
        } else {
            None
        }
    };
    let Some((lambda, case)) = found else { return Ok(None) };
    let err = if gamma.is_parabolic() {
        let (tw, period) = f.twist_beta(Rational64::new(gamma.b, m));
        tw.max_diff(&f.resample(period)?.scale(&lambda))
    } else {
        h_function(gamma, spec)?.max_diff(&f.scale(&lambda))
    };
    if err > f.tolerance().max(1e-20 * f.norm_inf()) {
        return Err(Error::NonConvergence("congruence λ check", format!("‖h − λf‖ = {err:e}")));
    }
    Ok(Some((lambda, case)))
}

/// A residual and the error budget it is judged against.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Residual {
    pub residual: f64,
    pub budget: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.residual <= self.budget
    }
}

fn floor(p: u32, scale: f64) -> f64 {
    (-(p as f64) * 0.9).exp2() * scale.max(1.0) * 64.0
}

fn power_of_tau_over_i(tau: &Cx, num: i64, den: i64) -> Result<Cx> {
    let z = tau / &Cx::i(tau.prec());
    frac_pow(&z, Rational64::new(num, den), &BranchSpec::principal())
}

/// Residual of the `ν = 0` / `ν = 1` identities
///
/// `Θ(τ;0,f) = ½f̂^ev(0)(τ/i)^{−1/2} − ½f^ev(0) + S_med Θ̃(τ;0,f^od) + (τ/i)^{−1/2}Θ(−1/τ;0,f̂^ev)`,
/// `Θ(τ;1,f) = −M^{1/2}f̂^ev(0)/(2πiτ) + S_med Θ̃(τ;1,f^ev) + i(τ/i)^{−3/2}Θ(−1/τ;1,f̂^od)`.
pub fn verify_exact_relation(spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Residual> {
    let p = ctx.bits();
    let f = spec.f.with_prec(p);
    let tau = tau.with_prec(p);
    let m = f.period() as i64;
    let lhs = theta_eval(&ThetaSpec::new(spec.nu, f.clone()), &tau, ctx)?;
    let (ev, od) = f.parity_split();
    let (hev, hod) = f.dft().parity_split();
    let inv = -&tau.recip();
    let eps = adaptive_eps(&tau);
    let (rhs, err) = match spec.nu {
        0 => {
            let k = power_of_tau_over_i(&tau, -1, 2)?;
            let med = median_sum(&ThetaSpec::new(0, od), &tau, eps, ctx)?;
            let th = theta_eval(&ThetaSpec::new(0, hev.clone()), &inv, ctx)?;
            let a = (&k * hev.at(0)).div_i64(2);
            let b = ev.at(0).div_i64(2);
            let v = &(&(&a - &b) + &med.value) + &(&k * &th.value);
            (v, med.err + th.err * k.abs_f64())
        }
        1 => {
            let k = power_of_tau_over_i(&tau, -3, 2)?.mul_i();
            let med = median_sum(&ThetaSpec::new(1, ev), &tau, eps, ctx)?;
            let th = theta_eval(&ThetaSpec::new(1, hod), &inv, ctx)?;
            let two_pi_i = Cx::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
            let sqrt_m = Float::with_val(p, m).sqrt();
            let a = -&(&hev.at(0).scale(&sqrt_m) / &(&two_pi_i * &tau));
            let v = &(&a + &med.value) + &(&k * &th.value);
            (v, med.err + th.err * k.abs_f64())
        }
        nu => return Err(Error::Unsupported(format!("exact relations are stated for ν ∈ {{0, 1}}, got {nu}"))),
    };
    let residual = (&lhs.value - &rhs).abs_f64();
    Ok(Residual { residual, budget: 10.0 * (err + lhs.err) + floor(p, lhs.value.abs_f64()) })
}

/// Residual of the transformation law under `γ` (`c > 0`):
///
/// * `f` even, `ν = 0`: `θ(γτ; f) = ((cτ+d)/i)^{1/2} θ(τ; h)`, `θ = f(0) + 2Θ(·;0,·)`;
/// * `f` odd, `ν = 1`: `Θ(γτ;1,f) = i((cτ+d)/i)^{3/2} Θ(τ;1,h)`;
/// * `f` even, `ν = 1`: `Θ(τ;1,h) ± i((cτ+d)/i)^{−3/2}Θ(γτ;1,f) = (cM)^{1/2}f(0)i/(2π(cτ+d)) + S^{π/2∓ε}Θ̃(cτ+d;1,Λ_{cM}^{−d}h,cM)`;
/// * `f` odd, `ν = 0`: `Θ(τ;0,h) ∓ ((cτ+d)/i)^{−1/2}Θ(γτ;0,f) = S^{π/2∓ε}Θ̃(cτ+d;0,Λ_{cM}^{−d}h,cM)`.
///
/// For the last two both signs are checked and the larger residual is reported.
pub fn verify_gamma_relation(gamma: &ModularMatrix, spec: &ThetaSpec, tau: &Cx, ctx: &PrecisionContext) -> Result<Residual> {
    let p = ctx.bits();
    let spec = spec.with_prec(p);
    let parity = check_general_gamma(&spec.f, spec.nu)?;
    if gamma.c <= 0 {
        return Err(Error::InvalidArgument("the general-γ laws need c > 0".into()));
    }
    let tau = tau.with_prec(p);
    let h = h_function(gamma, &spec)?;
    let m = spec.period() as i64;
    let w = gamma.j_factor(&tau);
    let gt = gamma.act(&tau)?;
    let even = matches!(parity, Parity::Even | Parity::Zero);
    match (spec.nu, even) {
        (0, true) => {
            let lhs_t = theta_eval(&spec, &gt, ctx)?;
            let rhs_t = theta_eval(&ThetaSpec::new(0, h.clone()), &tau, ctx)?;
            let k = power_of_tau_over_i(&w, 1, 2)?;
            let lhs = &spec.f.at(0).clone() + &lhs_t.value.scale_i64(2);
            let rhs = &k * &(h.at(0) + &rhs_t.value.scale_i64(2));
            let err = 2.0 * (lhs_t.err + rhs_t.err * k.abs_f64());
            Ok(Residual { residual: (&lhs - &rhs).abs_f64(), budget: 10.0 * err + floor(p, lhs.abs_f64()) })
        }
        (1, false) => {
            let lhs_t = theta_eval(&spec, &gt, ctx)?;
            let rhs_t = theta_eval(&ThetaSpec::new(1, h), &tau, ctx)?;
            let k = power_of_tau_over_i(&w, 3, 2)?.mul_i();
            let rhs = &k * &rhs_t.value;
            let err = lhs_t.err + rhs_t.err * k.abs_f64();
            Ok(Residual { residual: (&lhs_t.value - &rhs).abs_f64(), budget: 10.0 * err + floor(p, lhs_t.value.abs_f64()) })
        }
        (nu, _) => {
            let th_h = theta_eval(&ThetaSpec::new(nu, h.clone()), &tau, ctx)?;
            let th_g = theta_eval(&spec, &gt, ctx)?;
            let (twisted, period) = h.twist_beta(Rational64::new(-gamma.d, gamma.c * m));
            // Λ_{cM}^{−d} has period dividing cM because cM is even.
            let twisted = if period == (gamma.c * m) as usize { twisted } else { twisted.resample((gamma.c * m) as usize)? };
            let eps = adaptive_eps(&w);
            let (right, left) = lateral_sums(&ThetaSpec::new(nu, twisted), &w, eps, ctx)?;
            let (k, constant) = if nu == 1 {
                let k = power_of_tau_over_i(&w, -3, 2)?.mul_i();
                let sqrt_cm = Float::with_val(p, gamma.c * m).sqrt();
                let two_pi = Float::with_val(p, pi(p) * 2u32);
                let c = (&spec.f.at(0).mul_i() / &w).scale(&Float::with_val(p, sqrt_cm / two_pi));
                (k, c)
            } else {
                (-&power_of_tau_over_i(&w, -1, 2)?, Cx::zero(p))
            };
            let mut worst: f64 = 0.0;
            for (sign, lat) in [(1i64, &right), (-1, &left)] {
                let lhs = &th_h.value + &(&k * &th_g.value).scale_i64(sign);
                let rhs = &constant + &lat.value;
                worst = worst.max((&lhs - &rhs).abs_f64());
            }
            let err = th_h.err + th_g.err * k.abs_f64() + right.err.max(left.err);
            Ok(Residual { residual: worst, budget: 10.0 * err + floor(p, th_h.value.abs_f64()) })
        }
    }
}

/// `m(f_{α/M}) = (1/M_α) Σ_{n mod M_α} f(n) e^{iπn²α/M}`.
pub fn gauss_mean(f: &PeriodicFunction, alpha: Rational64) -> Cx {
    let m = f.period() as i64;
    f.twist_beta(alpha / Rational64::from_integer(m)).0.mean()
}

/// `|m(f_{α/M}) − (iα)^{1/2} m((U_M f)_{−1/(αM)})|`.
pub fn gauss_reciprocity_residual(f: &PeriodicFunction, alpha: Rational64) -> Result<f64> {
    if *alpha.numer() == 0 {
        return Err(Error::InvalidArgument("α = 0 has no negative inverse".into()));
    }
    let p = f.prec();
    let lhs = gauss_mean(f, alpha);
    let inv = -alpha.recip();
    let rhs_mean = gauss_mean(&f.dft(), inv);
    let ia = Cx::from_ratio(p, *alpha.numer(), *alpha.denom()).mul_i();
    let root = frac_pow(&ia, Rational64::new(1, 2), &BranchSpec::principal())?;
    Ok((&lhs - &(&root * &rhs_mean)).abs_f64())
}

/// `(ν, F, J)` with `U_M F = J F`, for `{ν = 0, F odd}` or `{ν = 1, F even}`.
#[derive(Clone, Debug)]
pub struct QuantumForm {
    pub nu: u32,
    pub components: Vec<PeriodicFunction>,
    pub j: Vec<Vec<Cx>>,
}

/// `G₊` or `G₋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn other(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

fn check_quantum_parity(nu: u32, f: &PeriodicFunction) -> Result<()> {
    let ok = match (nu, f.parity(f.tolerance())) {
        (_, Parity::Zero) => true,
        (0, Parity::Odd) | (1, Parity::Even) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ParityMismatch(format!("G± needs ν = 0 with f odd or ν = 1 with f even (ν = {nu})")))
    }
}

impl QuantumForm {
    /// `F = f` with `J = f̂/f` if `f` is a `U_M` eigenvector, else `F = (f, f̂)`.
    pub fn from_spec(spec: &ThetaSpec) -> Result<Self> {
        check_quantum_parity(spec.nu, &spec.f)?;
        let eigen = if spec.f.norm_inf() == 0.0 { None } else { spec.f.eigen_check()? };
        match eigen {
            Some(l) => Ok(QuantumForm { nu: spec.nu, components: vec![spec.f.clone()], j: vec![vec![l]] }),
            None => Self::from_vector(spec.nu, VectorForm::from_dft_pair(&spec.f)?),
        }
    }

    pub fn from_vector(nu: u32, v: VectorForm) -> Result<Self> {
        for c in &v.components {
            check_quantum_parity(nu, c)?;
        }
        Ok(QuantumForm { nu, components: v.components, j: v.j })
    }

    pub fn period(&self) -> usize {
        self.components[0].period()
    }

    pub fn prec(&self) -> u32 {
        self.components[0].prec()
    }

    fn apply_j(&self, v: &[Cx]) -> Vec<Cx> {
        self.j
            .iter()
            .map(|row| {
                let mut acc = Cx::zero(v[0].prec());
                for (a, b) in row.iter().zip(v) {
                    acc += &(a * b);
                }
                acc
            })
            .collect()
    }

    fn means(&self) -> Vec<Cx> {
        self.components.iter().map(PeriodicFunction::mean).collect()
    }
}

/// `G±(τ) = Θ(τ;ν,F) ± i^ν(τ/i)^{−1/2−ν} J Θ(−1/τ;ν,F) + M m(F)/(2πiτ)` for
/// `τ ∈ H`, from its definition.
pub fn quantum_obstruction_direct(q: &QuantumForm, sign: Sign, tau: &Cx, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    let p = ctx.bits();
    let tau = tau.with_prec(p);
    if tau.im.is_sign_negative() || tau.im.is_zero() {
        return Err(Error::OutsideDomain(format!("the defining formula for G± needs Im τ > 0, τ = {tau}")));
    }
    let nu = q.nu as i64;
    let inv = -&tau.recip();
    let mut at_tau = Vec::new();
    let mut at_inv = Vec::new();
    for f in &q.components {
        let s = ThetaSpec::new(q.nu, f.with_prec(p));
        at_tau.push(theta_eval(&s, &tau, ctx)?.value);
        at_inv.push(theta_eval(&s, &inv, ctx)?.value);
    }
    let mut k = power_of_tau_over_i(&tau, -(1 + 2 * nu), 2)?;
    if nu == 1 {
        k = k.mul_i();
    }
    let k = k.scale_i64(sign.value());
    let jt = q.apply_j(&at_inv);
    let two_pi_i_tau = &Cx::new(Float::new(p), Float::with_val(p, pi(p) * 2u32)) * &tau;
    let m = q.period() as i64;
    Ok(at_tau
        .iter()
        .zip(&jt)
        .zip(q.means())
        .map(|((a, b), mean)| &(a + &(&k * b)) + &(&mean.with_prec(p).scale_i64(m) / &two_pi_i_tau))
        .collect())
}

/// The lateral direction used for `G±` at `τ`, and the sheet (multiple of
/// `2π` added to the principal argument) on which `G±` lives: `G₊` for `arg τ ∈ (−π/4, π)` with
/// `θ = π/2 − ε`, `G₋` for `arg τ ∈ (0, 5π/4)` with `θ = π/2 + ε`; off `H`
/// the rays `π/4` and `3π/4` are used.
pub fn obstruction_direction(sign: Sign, tau: &Cx) -> Result<(f64, i32)> {
    if tau.is_zero() {
        return Err(Error::OutsideDomain("τ = 0".into()));
    }
    let raw = tau.arg().to_f64();
    match sign {
        Sign::Plus => {
            if !(raw > -FRAC_PI_4 && raw < PI - EPS_MIN) {
                return Err(Error::OutsideDomain(format!("G₊ is evaluated for arg τ ∈ (−π/4, 23π/24), got {raw}")));
            }
            let theta = if raw < FRAC_PI_4 {
                FRAC_PI_4
            } else {
                FRAC_PI_2 - EPS_DEFAULT.min((PI - raw) / 2.0).max(EPS_MIN)
            };
            Ok((theta, 0))
        }
        Sign::Minus => {
            let sheet = i32::from(raw < -FRAC_PI_2);
            let arg = raw + 2.0 * PI * sheet as f64;
            if !(arg > EPS_MIN && arg < 5.0 * FRAC_PI_4) {
                return Err(Error::OutsideDomain(format!("G₋ is evaluated for arg τ ∈ (π/24, 5π/4), got {arg}")));
            }
            let theta = if arg > 3.0 * FRAC_PI_4 {
                3.0 * FRAC_PI_4
            } else {
                FRAC_PI_2 + EPS_DEFAULT.min(arg / 2.0).max(EPS_MIN)
            };
            Ok((theta, sheet))
        }
    }
}

/// `G±(τ) = S^θ Θ̃(τ;ν,F)` by lateral Borel–Laplace summation, valid on and
/// off `H` (see [`obstruction_direction`]).
pub fn quantum_obstruction(q: &QuantumForm, sign: Sign, tau: &Cx, ctx: &PrecisionContext) -> Result<Vec<Estimate<Cx>>> {
    let (theta, sheet) = obstruction_direction(sign, tau)?;
    q.components
        .iter()
        .map(|f| {
            let g = GenFun::build(q.nu, &f.with_prec(ctx.bits()));
            lateral_sum_at(&g, theta, tau, sheet, ctx)
        })
        .collect()
}

/// `S^θ Θ̃(τ;ν,F)` on an explicitly chosen ray, `τ^{−1/2}` on the principal
/// branch. Every admissible `θ` on the same side of `π/2` gives the same
/// analytic function, which is how continuity across `R₊` is checked.
pub fn quantum_obstruction_on_ray(q: &QuantumForm, theta: f64, tau: &Cx, ctx: &PrecisionContext) -> Result<Vec<Estimate<Cx>>> {
    q.components
        .iter()
        .map(|f| {
            let g = GenFun::build(q.nu, &f.with_prec(ctx.bits()));
            lateral_sum_at(&g, theta, tau, 0, ctx)
        })
        .collect()
}

/// Residual of the built-in modularity `G±(τ) = ±i^ν(τ/i)^{−1/2−ν} J G∓(−1/τ)`
/// (`m(F) = 0` required when `ν = 1`), both sides by Borel summation.
pub fn builtin_modularity_residual(q: &QuantumForm, sign: Sign, tau: &Cx, ctx: &PrecisionContext) -> Result<Residual> {
    let p = ctx.bits();
    let tau = tau.with_prec(p);
    if q.nu == 1 && q.means().iter().any(|m| m.abs_f64() > 1e-30) {
        return Err(Error::InvalidArgument("built-in modularity for ν = 1 needs m(F) = 0".into()));
    }
    let lhs = quantum_obstruction(q, sign, &tau, ctx)?;
    let inv = -&tau.recip();
    let rhs_g = quantum_obstruction(q, sign.other(), &inv, ctx)?;
    let nu = q.nu as i64;
    let mut k = power_of_tau_over_i(&tau, -(1 + 2 * nu), 2)?;
    if nu == 1 {
        k = k.mul_i();
    }
    let k = k.scale_i64(sign.value());
    let vals: Vec<Cx> = rhs_g.iter().map(|e| e.value.clone()).collect();
    let jg = q.apply_j(&vals);
    let mut worst: f64 = 0.0;
    let mut err = 0.0;
    for (l, r) in lhs.iter().zip(&jg) {
        worst = worst.max((&l.value - &(&k * r)).abs_f64());
        err += l.err;
    }
    err += rhs_g.iter().map(|e| e.err).sum::<f64>() * k.abs_f64() * 2.0;
    Ok(Residual { residual: worst, budget: 10.0 * err + floor(p, 1.0) })
}

/// Boundary values at `±1/k` against their prediction.
#[derive(Clone, Debug)]
pub struct BoundaryAsymptotics {
    /// `Θⁿᵗ(±1/k; ν, F)`.
    pub exact: Vec<Cx>,
    /// The right-hand side with `G±(±1/k)` by Borel summation.
    pub predicted: Vec<Cx>,
    /// `G±(±1/k)`.
    pub obstruction: Vec<Cx>,
    /// Error estimate of the prediction.
    pub err: f64,
    /// `Θ̃(±1/k; ν, F_i)` as series in `x = 1/k`.
    pub tail: Vec<TruncatedSeries>,
}

/// `Θⁿᵗ(±1/k;0,F) = −i e^{∓iπ/4} k^{1/2} J Θⁿᵗ(∓k;0,F) + G±(±1/k)` (F odd) and
/// `Θⁿᵗ(±1/k;1,F) = e^{±iπ/4} k^{3/2} J Θⁿᵗ(∓k;1,F) ∓ (M m(F)/(2πi)) k + G±(±1/k)`
/// (F even); `Sign::Plus` selects `+1/k`.
pub fn boundary_asymptotics(
    q: &QuantumForm,
    k: i64,
    sign: Sign,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<BoundaryAsymptotics> {
    if k <= 0 {
        return Err(Error::InvalidArgument(format!("k = {k} must be positive")));
    }
    let p = ctx.bits();
    let s = sign.value();
    let m = q.period() as i64;
    let nt = |alpha: Rational64| -> Result<Vec<Cx>> {
        q.components
            .iter()
            .map(|f| {
                boundary_value(&ThetaSpec::new(q.nu, f.with_prec(p)), alpha)?
                    .ok_or_else(|| Error::OutsideDomain(format!("{alpha} is not in Q̄ for every component")))
            })
            .collect()
    };
    // k must lie in Q̄ for F and for U_M F; J mixes the components, so the
    // component-wise check on F at ∓k and ±1/k covers what the formula uses.
    let exact = nt(Rational64::new(s, k))?;
    let at_k = nt(Rational64::from_integer(-s * k))?;
    let jt = q.apply_j(&at_k);
    let tau = Cx::from_ratio(p, s, k);
    let g = quantum_obstruction(q, sign, &tau, ctx)?;
    let kf = Float::with_val(p, k);
    let means = q.means();
    let mut predicted = Vec::new();
    for ((jv, gv), mean) in jt.iter().zip(&g).zip(&means) {
        let v = if q.nu == 0 {
            let phase = Cx::root_of_unity(p, -s, 4).mul_i().scale_i64(-1);
            &(&phase * jv).scale(&Float::with_val(p, kf.sqrt_ref())) + &gv.value
        } else {
            let phase = Cx::root_of_unity(p, s, 4);
            let k32 = Float::with_val(p, kf.sqrt_ref()) * &kf;
            let two_pi_i = Cx::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
            let lin = (&mean.with_prec(p).scale_i64(m * k) / &two_pi_i).scale_i64(-s);
            &(&(&phase * jv).scale(&k32) + &lin) + &gv.value
        };
        predicted.push(v);
    }
    let err = g.iter().map(|e| e.err).sum();
    let tail = q
        .components
        .iter()
        .map(|f| {
            let series = asymptotic_series(&ThetaSpec::new(q.nu, f.with_prec(p)), order);
            let coeffs = series.coeffs().iter().enumerate().map(|(j, c)| if s < 0 && j % 2 == 1 { -c } else { c.clone() }).collect();
            TruncatedSeries::from_coeffs(coeffs).expect("non-empty")
        })
        .collect();
    Ok(BoundaryAsymptotics { exact, predicted, obstruction: g.into_iter().map(|e| e.value).collect(), err, tail })
}

/// Evaluates a tail series at `x = 1/k`.
pub fn eval_tail(series: &TruncatedSeries, k: i64) -> Cx {
    let p = series.prec();
    let x = Cx::from_ratio(p, 1, k);
    let mut acc = Cx::zero(p);
    for c in series.coeffs().iter().rev() {
        acc = &(&acc * &x) + c;
    }
    acc
}

/// `(τ/i)^{r}` as a polar power, exposed for tests of the branch conventions.
pub fn tau_over_i_power(tau: &Cx, r: Rational64) -> Cx {
    let p = tau.prec();
    let z = tau / &Cx::i(p);
    frac_pow_polar(&z.abs(), &z.arg(), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_and_action() {
        let g = ModularMatrix::new(-1, 0, -2, -1).unwrap();
        assert_eq!(g, ModularMatrix { a: 1, b: 0, c: 2, d: 1 });
        let tau = Cx::i(128);
        let v = g.act(&tau).unwrap();
        assert!((v - (Cx::from_ratio(128, 2, 5) + Cx::from_ratio(128, 1, 5).mul_i())).abs_f64() < 1e-30);
        assert!((ModularMatrix::s().act(&tau).unwrap() - tau.clone()).abs_f64() < 1e-35);
        assert!(ModularMatrix::new(1, 1, 1, 1).is_err());
        assert!(ModularMatrix::s().act(&Cx::zero(128)).is_err());
        assert_eq!(ModularMatrix::new(-1, 3, 0, -1).unwrap(), ModularMatrix::t(-3));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_symbol(1, 1).unwrap(), 1);
        assert_eq!(jacobi_symbol(2, 15).unwrap(), 1);
        assert!(jacobi_symbol(3, 10).is_err());
    }

    #[test]
    fn subgroup_membership() {
        let g = ModularMatrix::new(1, 0, 24, 1).unwrap();
        assert!(g.in_gamma(24) && g.in_gamma1(24) && g.in_gamma00(24));
        let g = ModularMatrix::new(1, 1, 24, 25).unwrap();
        assert!(!g.in_gamma(24) && g.in_gamma1(24) && !g.in_gamma00(24));
    }
}
