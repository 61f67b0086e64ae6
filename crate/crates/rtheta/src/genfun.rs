//! The generating function `F(t) = Σ_{n≥1} n^ν f(n) e^{−nt}` as a rational
//! function of `q = e^{−t}`, its Laurent data at `t = 0` (hence the values
//! `L(−k, f)`), the Borel-plane functions `φ̂±`, their singularities at
//! `ξ_n = iπn²/M`, and the alien derivatives of the formal series `Θ̃`.

use crate::core_numerics::{convolve, pi, series_powi, Cx, TruncatedSeries};
use crate::error::{Error, Result};
use crate::periodic::PeriodicFunction;
use num_rational::Rational64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;
use std::sync::OnceLock;

/// `F(t) = A(q)/(1 − q^M)^{ν+1}` with `q = e^{−t}`.
#[derive(Clone, Debug)]
pub struct GenFun {
    nu: u32,
    f: PeriodicFunction,
    /// Coefficients of `A(q)`, kept at the guarded precision `hi`.
    numer: Vec<Cx>,
    hi: u32,
    taylor: OnceLock<BorelTaylor>,
}

/// Cached expansions at the origin of the Borel plane.
#[derive(Clone, Debug)]
struct BorelTaylor {
    /// `g_0..g_ν`: the polar part `Σ g_j t^{j−ν−1}` of `F`, at precision `hi`.
    pole: Vec<Cx>,
    /// Taylor coefficients of `φ̂⁺` and `φ̂⁻` in `ξ`.
    plus: Vec<Cx>,
    minus: Vec<Cx>,
}

/// Which Laplace integrand a singularity datum refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BorelIntegrand {
    /// `½ φ̂⁻(ξ)`, whose Stokes jump is `Θ⁻`.
    HalfMinus,
    /// `ξ^{−1/2} φ̂⁺(ξ)`, whose median sum is `τ^{1/2} Θ⁺`.
    StrippedPlus,
}

/// How to obtain principal parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityMode {
    ClosedForm,
    Numeric,
}

/// Principal part `Σ_{k=1}^{order} a_k (ξ − ξ_n)^{−k}` of a Borel integrand.
#[derive(Clone, Debug, Serialize)]
pub struct SingularityDatum {
    pub n: u32,
    pub order: u32,
    pub integrand: BorelIntegrand,
    /// `a_order, …, a_1`.
    #[serde(serialize_with = "ser_cx_list")]
    pub principal_coeffs: Vec<Cx>,
}

/// One term `coeff · (τ/i)^power` of an alien derivative.
#[derive(Clone, Debug, Serialize)]
pub struct AlienTerm {
    #[serde(serialize_with = "ser_rational")]
    pub power: Rational64,
    #[serde(serialize_with = "ser_cx")]
    pub coeff: Cx,
}

fn ser_cx<S: serde::Serializer>(z: &Cx, s: S) -> std::result::Result<S::Ok, S::Error> {
    let digits = crate::core_numerics::digits_for_bits(z.prec());
    let (re, im) = z.to_decimal(digits);
    serde::Serialize::serialize(&[re, im], s)
}

fn ser_cx_list<S: serde::Serializer>(zs: &[Cx], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[String; 2]> = zs
        .iter()
        .map(|z| {
            let (re, im) = z.to_decimal(crate::core_numerics::digits_for_bits(z.prec()));
            [re, im]
        })
        .collect();
    serde::Serialize::serialize(&v, s)
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&r.to_string(), s)
}

impl GenFun {
    /// Applies `q d/dq = −d/dt` ν times to `A₀(q)/(1−q^M)`, with
    /// `A₀ = Σ_{ℓ=1}^{M} f(ℓ) q^ℓ`.
    pub fn build(nu: u32, f: &PeriodicFunction) -> GenFun {
        let m = f.period();
        let hi = f.prec() + laurent_guard(nu, m);
        let mut a: Vec<Cx> = (0..=m).map(|l| if l == 0 { Cx::zero(hi) } else { f.at(l as i64).with_prec(hi) }).collect();
        // A_{k+1} = q A_k' (1 − q^M) + (k+1) M q^M A_k
        for k in 0..nu as usize {
            let mut next = vec![Cx::zero(hi); a.len() + m];
            for (j, aj) in a.iter().enumerate() {
                if aj.is_zero() {
                    continue;
                }
                let d = aj.scale_i64(j as i64);
                next[j] += &d;
                next[j + m] -= &d;
                next[j + m] += &aj.scale_i64(((k + 1) * m) as i64);
            }
            a = next;
        }
        GenFun { nu, f: f.clone(), numer: a, hi, taylor: OnceLock::new() }
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn f(&self) -> &PeriodicFunction {
        &self.f
    }

    pub fn period(&self) -> usize {
        self.f.period()
    }

    pub fn prec(&self) -> u32 {
        self.f.prec()
    }

    /// Coefficients of the numerator polynomial `A(q)`.
    pub fn numerator(&self) -> Vec<Cx> {
        self.numer.iter().map(|c| c.with_prec(self.prec())).collect()
    }

    fn is_zero(&self) -> bool {
        self.numer.iter().all(Cx::is_zero)
    }

    /// `C = (4π/M)^{1/2} e^{iπ/4}`.
    pub fn borel_constant(&self, prec: u32) -> Cx {
        let m = self.period() as u32;
        let r = Float::with_val(prec, pi(prec) * 4u32 / m).sqrt();
        Cx::root_of_unity(prec, 1, 4).scale(&r)
    }

    /// `ξ_n = iπn²/M`.
    pub fn xi_n(&self, n: u32, prec: u32) -> Cx {
        let v = Float::with_val(prec, pi(prec) * (n as u64 * n as u64)) / self.period() as u32;
        Cx::new(Float::new(prec), v)
    }

    /// `F(t)` at the precision of `t`.
    pub fn eval(&self, t: &Cx) -> Result<Cx> {
        let wp = t.prec();
        let m = self.period() as i64;
        if self.is_zero() {
            return Ok(Cx::zero(wp));
        }
        // Distance to the nearest lattice point 2πik/M.
        let step = Float::with_val(wp, pi(wp) * 2u32) / m;
        let k = Float::with_val(wp, &t.im / &step).round();
        let lattice = Cx::new(Float::new(wp), Float::with_val(wp, &k * &step));
        if (t - &lattice).abs_f64() < (-(wp as f64) / 2.0).exp2() {
            return Err(Error::PoleHit(format!("F(t) at t = {}", t)));
        }
        let mut scratch = (Float::new(wp), Float::new(wp));
        let mt = t.scale_i64(m);
        let (num, den) = if t.re.is_sign_positive() {
            let q = (-t).exp();
            let mut acc = Cx::zero(wp);
            for a in self.numer.iter().rev() {
                acc.mul_add_assign(&q, a, &mut scratch);
            }
            (acc, -(-&mt).exp_m1())
        } else {
            // Multiply through by q^{−M(ν+1)} to keep |q'| = |e^t| < 1.
            let q = t.exp();
            let mut acc = Cx::zero(wp);
            for a in self.numer.iter() {
                acc.mul_add_assign(&q, a, &mut scratch);
            }
            (acc, mt.exp_m1())
        };
        Ok(&num / &den.powi(self.nu as i64 + 1))
    }

    /// `F(t)` minus its polar part at 0.
    pub fn eval_reg(&self, t: &Cx) -> Result<Cx> {
        let bt = self.borel_taylor();
        let full = self.eval(t)?;
        let wp = t.prec();
        let tinv = t.recip();
        // Σ_{j=0}^{ν} g_j t^{j−ν−1}, by Horner in 1/t.
        let mut polar = Cx::zero(wp);
        let mut scratch = (Float::new(wp), Float::new(wp));
        for g in bt.pole.iter() {
            polar.mul_add_assign(&tinv, g, &mut scratch);
        }
        polar = &polar * &tinv;
        Ok(&full - &polar)
    }

    /// Laurent data at 0 computed at the guarded precision: the polar
    /// coefficients `g_0..g_ν` and the regular coefficients `c_0..c_order`.
    fn laurent_hi(&self, order: usize) -> (Vec<Cx>, Vec<Cx>) {
        let hi = self.hi;
        let nu = self.nu as usize;
        let m = self.period() as i64;
        let total = order + nu + 2;
        // N(t) = A(e^{−t}) = Σ_j t^j (−1)^j/j! Σ_k a_k k^j.
        let mut sums = vec![Cx::zero(hi); total];
        for (k, a) in self.numer.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut pw = a.clone();
            for s in sums.iter_mut() {
                *s += &pw;
                pw = pw.scale_i64(k as i64);
            }
        }
        let mut fact = Float::with_val(hi, 1u32);
        let numer: Vec<Cx> = sums
            .iter()
            .enumerate()
            .map(|(j, s)| {
                if j > 0 {
                    fact *= j as u32;
                }
                let v = s.scale(&Float::with_val(hi, fact.recip_ref()));
                if j % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        // E(t) = (1 − e^{−Mt})/(Mt) = Σ_j (−M t)^j/(j+1)!
        let mut e = Vec::with_capacity(total);
        let mut cur = Cx::one(hi);
        for j in 0..total {
            if j > 0 {
                cur = cur.scale_i64(-m).div_i64(j as i64 + 1);
            }
            e.push(cur.clone());
        }
        let einv = series_powi(&e, -(nu as i64 + 1), total - 1).expect("E(0) = 1");
        let mpow = Float::with_val(hi, m).pow(nu as u32 + 1);
        let g: Vec<Cx> = convolve(&numer, &einv, total - 1)
            .into_iter()
            .map(|c| {
                let mut c = c;
                c.re /= &mpow;
                c.im /= &mpow;
                c
            })
            .collect();
        (g[..=nu].to_vec(), g[nu + 1..].to_vec())
    }

    /// `F(t) = pole_coeff/t^{ν+1} + Σ_{k≤order} c_k t^k + O(t^{order+1})`.
    ///
    /// The intermediate polar coefficients of `t^{−ν}, …, t^{−1}` vanish.
    pub fn laurent_at_zero(&self, order: usize) -> (Cx, TruncatedSeries) {
        let p = self.prec();
        let (pole, c) = self.laurent_hi(order);
        let coeffs = c.iter().map(|x| x.with_prec(p)).collect();
        (pole[0].with_prec(p), TruncatedSeries::from_coeffs(coeffs).expect("non-empty"))
    }

    /// All polar coefficients `g_0..g_ν` (coefficients of `t^{−ν−1}..t^{−1}`).
    pub fn polar_part(&self) -> Vec<Cx> {
        self.borel_taylor().pole.iter().map(|x| x.with_prec(self.prec())).collect()
    }

    fn borel_taylor(&self) -> &BorelTaylor {
        self.taylor.get_or_init(|| {
            let p = self.prec();
            let n_xi = p as usize / 2 + 20;
            let (pole, c) = self.laurent_hi(2 * n_xi + 1);
            let hi = self.hi;
            let c2 = self.borel_constant(hi).powi(2);
            let rpi = Float::with_val(hi, pi(hi).sqrt_ref()).recip();
            let cc = self.borel_constant(hi);
            let mut pw = Cx::from_real(rpi);
            let mut plus = Vec::with_capacity(n_xi);
            let mut minus = Vec::with_capacity(n_xi);
            for j in 0..n_xi {
                plus.push((&c[2 * j] * &pw).with_prec(p));
                minus.push((&(&c[2 * j + 1] * &pw) * &cc).with_prec(p));
                pw = &pw * &c2;
            }
            BorelTaylor { pole, plus, minus }
        })
    }

    /// Radius of the disc around 0 where the Taylor expansions are used.
    fn taylor_radius(&self) -> f64 {
        std::f64::consts::PI / (16.0 * self.period() as f64)
    }

    /// Extra bits for subtracting the polar part outside the Taylor disc.
    fn borel_guard(&self) -> u32 {
        let m = self.period() as f64;
        let nu = self.nu as f64;
        let log_fact: f64 = (1..=self.nu).map(|k| (k as f64).log2()).sum();
        ((nu + 1.0) * (2.0 * m / std::f64::consts::PI).log2() + log_fact + 24.0).ceil() as u32
    }

    fn check_not_singular(&self, xi: &Cx) -> Result<()> {
        let m = self.period() as f64;
        let (re, im) = xi.to_f64();
        let a = (re * re + im * im).sqrt();
        let n0 = (a * m / std::f64::consts::PI).sqrt().round() as i64;
        for n in (n0 - 1).max(1)..=n0 + 1 {
            let xn = std::f64::consts::PI * (n * n) as f64 / m;
            let d = (re * re + (im - xn) * (im - xn)).sqrt();
            if d < 1e-8 * xn {
                return Err(Error::PoleHit(format!("ξ = {xi} is within 1e-8 of ξ_{n}")));
            }
        }
        Ok(())
    }

    /// `(φ̂⁺(ξ), φ̂⁻(ξ))`, sharing the two evaluations of `F_reg(±t)`.
    pub fn borel_pair(&self, xi: &Cx) -> Result<(Cx, Cx)> {
        let p = xi.prec();
        if xi.abs_f64() < self.taylor_radius() {
            let bt = self.borel_taylor();
            let mut scratch = (Float::new(p), Float::new(p));
            let mut a = Cx::zero(p);
            let mut b = Cx::zero(p);
            for (cp, cm) in bt.plus.iter().zip(&bt.minus).rev() {
                a.mul_add_assign(xi, cp, &mut scratch);
                b.mul_add_assign(xi, cm, &mut scratch);
            }
            return Ok((a, b));
        }
        self.check_not_singular(xi)?;
        let wp = p + self.borel_guard();
        let s = xi.with_prec(wp).sqrt();
        let t = &self.borel_constant(wp) * &s;
        let fp = self.eval_reg(&t)?;
        let fm = self.eval_reg(&-&t)?;
        let rpi = Float::with_val(wp, pi(wp).sqrt_ref()).recip();
        let even = (&fp + &fm).div_i64(2).scale(&rpi);
        let odd = (&(&fp - &fm).div_i64(2) / &s).scale(&rpi);
        Ok((even.with_prec(p), odd.with_prec(p)))
    }

    /// `φ̂⁺(ξ) = π^{−1/2} F⁺(C ξ^{1/2})`.
    pub fn borel_plus(&self, xi: &Cx) -> Result<Cx> {
        Ok(self.borel_pair(xi)?.0)
    }

    /// `φ̂⁻(ξ) = π^{−1/2} ξ^{−1/2} F⁻(C ξ^{1/2})`.
    pub fn borel_minus(&self, xi: &Cx) -> Result<Cx> {
        Ok(self.borel_pair(xi)?.1)
    }

    /// `(ξ^{−1/2} φ̂⁺(ξ), ½ φ̂⁻(ξ))` with the principal square root.
    pub fn laplace_integrands(&self, xi: &Cx) -> Result<(Cx, Cx)> {
        let (a, b) = self.borel_pair(xi)?;
        Ok((&a / &xi.sqrt(), b.div_i64(2)))
    }

    fn integrand(&self, which: BorelIntegrand, xi: &Cx) -> Result<Cx> {
        let (a, b) = self.laplace_integrands(xi)?;
        Ok(match which {
            BorelIntegrand::StrippedPlus => a,
            BorelIntegrand::HalfMinus => b,
        })
    }

    /// Distance from `ξ_n` to the nearest other singular point (including
    /// the branch point 0 of the stripped integrand).
    fn gap(&self, n: u32) -> f64 {
        let m = self.period() as f64;
        let n = n as f64;
        let below = if n > 1.0 { n * n - (n - 1.0) * (n - 1.0) } else { 1.0 };
        let above = (n + 1.0) * (n + 1.0) - n * n;
        std::f64::consts::PI * below.min(above) / m
    }

    /// Contour moments `m_j = (1/2πi)∮ g(ξ)(ξ−c)^j dξ`, `j = 0..count`, on the
    /// circle `|ξ − c| = radius` by the `nodes`-point trapezoidal rule.
    pub fn contour_moments(
        &self,
        which: BorelIntegrand,
        center: &Cx,
        radius: f64,
        nodes: usize,
        count: usize,
    ) -> Result<Vec<Cx>> {
        let p = center.prec();
        let r = Float::with_val(p, radius);
        let mut out = vec![Cx::zero(p); count];
        for j in 0..nodes {
            let w = Cx::root_of_unity(p, 2 * j as i64, nodes as i64).scale(&r);
            let g = self.integrand(which, &(center + &w))?;
            // (1/2πi) g (ξ−c)^k dξ with dξ = i w dθ and dθ = 2π/N.
            let mut term = &g * &w;
            for m in out.iter_mut() {
                *m += &term;
                term = &term * &w;
            }
        }
        Ok(out.into_iter().map(|m| m.div_i64(nodes as i64)).collect())
    }

    fn default_nodes(&self) -> usize {
        (self.prec() as usize * 3) / 4 + 16
    }

    /// Numerically extracted `a_1..a_count` of the Laurent expansion at `ξ_n`.
    pub fn principal_parts_numeric(&self, n: u32, which: BorelIntegrand, count: usize) -> Result<Vec<Cx>> {
        if n == 0 {
            return Err(Error::InvalidArgument("singularity index must be positive".into()));
        }
        let c = self.xi_n(n, self.prec());
        self.contour_moments(which, &c, self.gap(n) / 4.0, self.default_nodes(), count)
    }

    /// Principal part of a Borel integrand at `ξ_n`; the closed form is
    /// available for ν ≤ 1, the numeric mode for every ν.
    pub fn singularity_data(&self, n: u32, which: BorelIntegrand, mode: SingularityMode) -> Result<SingularityDatum> {
        if n == 0 {
            return Err(Error::InvalidArgument("singularity index must be positive".into()));
        }
        let order = self.nu + 1;
        let coeffs = match mode {
            SingularityMode::Numeric => {
                let mut a = self.principal_parts_numeric(n, which, order as usize)?;
                a.reverse();
                a
            }
            SingularityMode::ClosedForm => self.closed_form_principal(n, which)?,
        };
        Ok(SingularityDatum { n, order, integrand: which, principal_coeffs: coeffs })
    }

    fn closed_form_principal(&self, n: u32, which: BorelIntegrand) -> Result<Vec<Cx>> {
        let p = self.prec();
        let (hev, hod) = self.f.dft().parity_split();
        let two_pi_i = Cx::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
        let e1 = Cx::root_of_unity(p, 1, 4);
        let e3 = Cx::root_of_unity(p, 3, 4);
        let ni = n as i64;
        let zero = Cx::zero(p);
        Ok(match (self.nu, which) {
            (0, BorelIntegrand::HalfMinus) => vec![&(&e1 * hev.at(ni)) / &two_pi_i],
            (0, BorelIntegrand::StrippedPlus) => vec![&(&e1 * hod.at(ni)).scale_i64(2) / &two_pi_i],
            (1, BorelIntegrand::HalfMinus) => {
                vec![&(&e3.mul_i() * hod.at(ni)).scale_i64(ni) / &-&two_pi_i, zero]
            }
            (1, BorelIntegrand::StrippedPlus) => {
                vec![&(&e3.mul_i() * hev.at(ni)).scale_i64(2 * ni) / &-&two_pi_i, zero]
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "closed-form principal parts for ν = {} (use the numeric mode)",
                    self.nu
                )))
            }
        })
    }

    /// Locates the singularity near `ξ_n` from contour moments on a circle whose
    /// centre is deliberately offset from `ξ_n`; `None` if there is no pole.
    pub fn locate_singularity(&self, n: u32, which: BorelIntegrand) -> Result<Option<Cx>> {
        let p = self.prec();
        let parts = self.principal_parts_numeric(n, which, self.nu as usize + 1)?;
        let scale = parts.iter().map(Cx::abs_f64).fold(0.0, f64::max);
        let tol = (-(p as f64) * 0.5).exp2();
        let Some(k) = parts.iter().rposition(|a| a.abs_f64() > tol * scale.max(1.0)) else {
            return Ok(None);
        };
        let order = k + 1;
        let r = self.gap(n) / 4.0;
        let offset = Cx::root_of_unity(p, 1, 3).scale(&Float::with_val(p, r / 3.0));
        let center = &self.xi_n(n, p) + &offset;
        let mom = self.contour_moments(which, &center, r, self.default_nodes(), 2 * order)?;
        // The moments obey the recurrence with characteristic polynomial
        // (x − δ)^K, δ = pole − centre; its x^{K−1} coefficient is −Kδ.
        let mut a = vec![vec![Cx::zero(p); order]; order];
        let mut b = vec![Cx::zero(p); order];
        for j in 0..order {
            for i in 0..order {
                a[j][i] = mom[j + order - 1 - i].clone();
            }
            b[j] = -&mom[j + order];
        }
        let e = solve_linear(a, b)?;
        let delta = (-&e[0]).div_i64(order as i64);
        Ok(Some(&center + &delta))
    }

    /// Compares the moments of a Borel integrand on the circle `|ξ| = radius`
    /// with the sum of the local principal-part moments of the `ξ_n` inside;
    /// a nonzero residual reveals singularities other than the `ξ_n`.
    /// Uses `φ̂⁻/2` (regular at 0). Returns the largest residual.
    pub fn enclosed_singularity_residual(&self, radius: f64, nodes: usize) -> Result<f64> {
        let p = self.prec();
        let which = BorelIntegrand::HalfMinus;
        let count = self.nu as usize + 2;
        let zero = Cx::zero(p);
        let big = self.contour_moments(which, &zero, radius, nodes, count)?;
        let m = self.period() as f64;
        let mut sum = vec![Cx::zero(p); count];
        let mut n = 1u32;
        while std::f64::consts::PI * (n * n) as f64 / m < radius {
            // Moments about 0 from those about ξ_n: ξ^j = Σ C(j,i) ξ_n^{j−i} (ξ−ξ_n)^i.
            let local = self.principal_parts_numeric(n, which, count)?;
            let xn = self.xi_n(n, p);
            for (j, s) in sum.iter_mut().enumerate() {
                let mut binom = 1i64;
                for (i, l) in local.iter().enumerate().take(j + 1) {
                    *s += &(l * &xn.powi((j - i) as i64)).scale_i64(binom);
                    binom = binom * (j - i) as i64 / (i as i64 + 1);
                }
            }
            n += 1;
        }
        Ok(big.iter().zip(&sum).map(|(a, b)| (a - b).abs_f64()).fold(0.0, f64::max))
    }
}

fn laurent_guard(nu: u32, m: usize) -> u32 {
    64 + m as u32 + 16 * nu
}

/// Gaussian elimination with partial pivoting for a small dense system.
fn solve_linear(mut a: Vec<Vec<Cx>>, mut b: Vec<Cx>) -> Result<Vec<Cx>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs_f64().total_cmp(&a[j][col].abs_f64()))
            .unwrap_or(col);
        if a[piv][col].is_zero() {
            return Err(Error::NonConvergence("solve_linear", "singular system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = &a[row][col] / &a[col][col];
            for k in col..n {
                let t = &factor * &a[col][k];
                a[row][k] -= &t;
            }
            let t = &factor * &b[col];
            b[row] -= &t;
        }
    }
    let mut x = vec![Cx::zero(b[0].prec()); n];
    for row in (0..n).rev() {
        let mut s = b[row].clone();
        for k in row + 1..n {
            s -= &(&a[row][k] * &x[k]);
        }
        x[row] = &s / &a[row][row];
    }
    Ok(x)
}

/// `L(−k, f)`, read off the regular part of `F` for ν = 0:
/// `L(−k, f) = (−1)^k k! c_k`.
pub fn lvalue(f: &PeriodicFunction, k: usize) -> Cx {
    lvalues(f, k).pop().expect("k+1 values")
}

/// `L(0, f), L(−1, f), …, L(−kmax, f)` from a single Laurent expansion.
pub fn lvalues(f: &PeriodicFunction, kmax: usize) -> Vec<Cx> {
    let g = GenFun::build(0, f);
    let (_, c) = g.laurent_hi(kmax);
    let p = f.prec();
    let mut fact = Float::with_val(g.hi, 1u32);
    c.iter()
        .enumerate()
        .map(|(k, ck)| {
            if k > 0 {
                fact *= k as u32;
            }
            let v = ck.scale(&fact).with_prec(p);
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Exact Bernoulli numbers `B_0..B_n` (with `B_1 = −1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rational::from(1));
            continue;
        }
        let mut s = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            s += Rational::from(Integer::from(m as u32 + 1).binomial(j as u32)) * bj;
        }
        b.push(-s / Rational::from(m as u32 + 1));
    }
    b
}

/// Bernoulli polynomial `B_n(x)` at a rational point, exactly.
pub fn bernoulli_poly(n: usize, x: &Rational, numbers: &[Rational]) -> Rational {
    let mut acc = Rational::new();
    let mut xp = Rational::from(1);
    // Σ_j C(n,j) B_j x^{n−j}, accumulated from j = n downwards.
    for j in (0..=n).rev() {
        acc += Rational::from(Integer::from(n as u32).binomial(j as u32)) * &numbers[j] * &xp;
        xp *= x;
    }
    acc
}

/// Independent oracle: `L(−k, f) = −(M^k/(k+1)) Σ_{ℓ=1}^{M} f(ℓ) B_{k+1}(ℓ/M)`.
pub fn lvalue_bernoulli(f: &PeriodicFunction, k: usize) -> Cx {
    let p = f.prec();
    let m = f.period() as u32;
    let numbers = bernoulli_numbers(k + 1);
    let mut acc = Cx::zero(p);
    for l in 1..=m {
        let x = Rational::from((l, m));
        let b = bernoulli_poly(k + 1, &x, &numbers);
        acc += &f.at(l as i64).scale(&Float::with_val(p, &b));
    }
    let scale = Rational::from(Integer::from(m).pow(k as u32)) / Rational::from(k as u32 + 1);
    -acc.scale(&Float::with_val(p, &scale))
}

/// A monomial `(re + i·im)·(M/π)^{m_pi}·n^{n_pow}·(τ/i)^{power}` of an
/// alien-derivative formula, the whole formula being multiplied by `f̂^ev(n)`
/// or `f̂^od(n)` according to the parity of ν.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlienMonomial {
    pub re: Rational64,
    pub im: Rational64,
    pub m_pi: u32,
    pub n_pow: u32,
    pub power: Rational64,
}

fn mono(re: i64, im: i64, den: i64, m_pi: u32, n_pow: u32, power: (i64, i64)) -> AlienMonomial {
    AlienMonomial {
        re: Rational64::new(re, den),
        im: Rational64::new(im, den),
        m_pi,
        n_pow,
        power: Rational64::new(power.0, power.1),
    }
}

/// The closed forms of `Δ_{ξ_n} Θ̃(τ; ν, f, M)` for `ν ≤ 4`.
///
/// For ν = 4 the coefficient of `(M/π)²(τ/i)^{−5/2}` is 3/2, which is what the
/// commutator rule yields from the ν = 2 formula and what the numerically
/// extracted Stokes data confirm.
pub fn alien_table(nu: u32) -> Result<Vec<AlienMonomial>> {
    Ok(match nu {
        0 => vec![mono(2, 0, 1, 0, 0, (-1, 2))],
        1 => vec![mono(0, 2, 1, 0, 1, (-3, 2))],
        2 => vec![mono(-2, 0, 1, 0, 2, (-5, 2)), mono(1, 0, 1, 1, 0, (-3, 2))],
        3 => vec![mono(0, -2, 1, 0, 3, (-7, 2)), mono(0, 3, 1, 1, 1, (-5, 2))],
        4 => vec![
            mono(2, 0, 1, 0, 4, (-9, 2)),
            mono(-6, 0, 1, 1, 2, (-7, 2)),
            mono(3, 0, 2, 2, 0, (-5, 2)),
        ],
        _ => return Err(Error::Unsupported(format!("closed-form alien derivative for ν = {nu} > 4"))),
    })
}

/// One application of `Θ(·; ν+2) = (M/iπ) dΘ(·; ν)/dτ` through the commutator
/// `Δ_ω d/dτ = (d/dτ + ω τ^{−2}) Δ_ω`, written in `T = τ/i` as the operator
/// `−(M/π) d/dT − n² T^{−2}`.
pub fn alien_commutator_step(terms: &[AlienMonomial]) -> Vec<AlienMonomial> {
    let mut out: Vec<AlienMonomial> = Vec::new();
    let mut push = |t: AlienMonomial| {
        if let Some(e) = out.iter_mut().find(|e| e.m_pi == t.m_pi && e.n_pow == t.n_pow && e.power == t.power) {
            e.re += t.re;
            e.im += t.im;
        } else {
            out.push(t);
        }
    };
    for t in terms {
        let d = -t.power;
        push(AlienMonomial { re: t.re * d, im: t.im * d, m_pi: t.m_pi + 1, n_pow: t.n_pow, power: t.power - 1 });
        push(AlienMonomial { re: -t.re, im: -t.im, m_pi: t.m_pi, n_pow: t.n_pow + 2, power: t.power - 2 });
    }
    out.retain(|t| *t.re.numer() != 0 || *t.im.numer() != 0);
    out
}

/// Whether one commutator step applied to the ν table reproduces the ν + 2
/// table, as a multiset of exact monomials.
pub fn commutator_matches_table(nu: u32) -> Result<bool> {
    let stepped = alien_commutator_step(&alien_table(nu)?);
    let target = alien_table(nu + 2)?;
    Ok(stepped.len() == target.len() && target.iter().all(|t| stepped.contains(t)))
}

fn rat_float(prec: u32, r: Rational64) -> Float {
    Float::with_val(prec, *r.numer()) / *r.denom()
}

impl GenFun {
    /// `Δ_{ξ_n} Θ̃` as a list of `coeff·(τ/i)^power`, from the closed forms.
    pub fn alien_derivative(&self, n: u32) -> Result<Vec<AlienTerm>> {
        if n == 0 {
            return Err(Error::InvalidArgument("singularity index must be positive".into()));
        }
        let table = alien_table(self.nu)?;
        let p = self.prec();
        let (hev, hod) = self.f.dft().parity_split();
        let hat = if self.nu % 2 == 0 { hod.at(n as i64).clone() } else { hev.at(n as i64).clone() };
        let m_pi = Float::with_val(p, self.period() as u32) / pi(p);
        Ok(table
            .iter()
            .filter_map(|t| {
                let c = Cx::new(rat_float(p, t.re), rat_float(p, t.im));
                let mut scale = m_pi.clone().pow(t.m_pi);
                scale *= Float::with_val(p, n).pow(t.n_pow);
                let coeff = (&c * &hat).scale(&scale);
                if coeff.is_zero() {
                    None
                } else {
                    Some(AlienTerm { power: t.power, coeff })
                }
            })
            .collect())
    }

    /// `Δ_{ξ_n} Θ̃` from numerically extracted principal parts of
    /// `ξ^{−1/2}φ̂⁺`, using `(L⁻ − L⁺)[(ξ−ξ_n)^{−k}] = 2πi(−1/τ)^{k−1}/(k−1)!·e^{−ξ_n/τ}`.
    pub fn alien_derivative_numeric(&self, n: u32) -> Result<Vec<AlienTerm>> {
        let p = self.prec();
        let parts = self.principal_parts_numeric(n, BorelIntegrand::StrippedPlus, self.nu as usize + 1)?;
        let two_pi_i = Cx::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
        let mut fact = Float::with_val(p, 1u32);
        let mut out = Vec::new();
        for (idx, a) in parts.iter().enumerate() {
            let k = idx + 1;
            if k > 1 {
                fact *= (k - 1) as u32;
            }
            // τ^{−1/2−(k−1)} = e^{iπr/2}(τ/i)^r with r = −1/2 − (k−1).
            let power = Rational64::new(-(2 * k as i64 - 1), 2);
            let phase = Cx::root_of_unity(p, -(2 * k as i64 - 1), 4);
            let mut c = &(a * &two_pi_i) * &phase;
            c = c.scale(&Float::with_val(p, fact.recip_ref()));
            if k % 2 == 0 {
                c = -c;
            }
            out.push(AlienTerm { power, coeff: c });
        }
        out.reverse();
        Ok(out)
    }
}
