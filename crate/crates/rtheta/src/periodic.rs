//! M-periodic coefficient functions `f: Z → C`: parity decomposition, the
//! unitary DFT `U_M`, quadratic twists, support tests and the example catalog.

use crate::arith::{conrey_phase, kronecker};
use crate::core_numerics::{digits_for_bits, pi, Cx};
use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Rational64;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Parity class of a periodic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Zero,
    Even,
    Odd,
    Mixed,
}

/// An M-periodic function stored by its values at residues `0..M`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction {
    values: Vec<Cx>,
}

impl PeriodicFunction {
    pub fn new(values: Vec<Cx>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        let p = values[0].prec();
        let values = values.into_iter().map(|v| if v.prec() == p { v } else { v.with_prec(p) }).collect();
        Ok(PeriodicFunction { values })
    }

    pub fn from_i64(prec: u32, values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Cx::from_int(prec, v)).collect())
    }

    pub fn from_f64(prec: u32, values: &[(f64, f64)]) -> Result<Self> {
        Self::new(values.iter().map(|&(re, im)| Cx::from_f64(prec, re, im)).collect())
    }

    /// `n ↦ g(n)` sampled on `0..period`.
    pub fn from_fn(period: usize, g: impl FnMut(i64) -> Cx) -> Result<Self> {
        Self::new((0..period as i64).map(g).collect())
    }

    pub fn zero(prec: u32, period: usize) -> Self {
        PeriodicFunction { values: vec![Cx::zero(prec); period.max(1)] }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Cx] {
        &self.values
    }

    pub fn prec(&self) -> u32 {
        self.values[0].prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        PeriodicFunction { values: self.values.iter().map(|v| v.with_prec(prec)).collect() }
    }

    /// `f(n)` for any integer `n`.
    pub fn at(&self, n: i64) -> &Cx {
        &self.values[n.rem_euclid(self.period() as i64) as usize]
    }

    /// `n ↦ f(−n)`.
    pub fn reflect(&self) -> Self {
        let m = self.period() as i64;
        PeriodicFunction { values: (0..m).map(|n| self.at(-n).clone()).collect() }
    }

    /// The same function viewed with period `new_period` (a multiple of M).
    pub fn resample(&self, new_period: usize) -> Result<Self> {
        if new_period == 0 || new_period % self.period() != 0 {
            return Err(Error::InvalidArgument(format!(
                "period {new_period} is not a multiple of {}",
                self.period()
            )));
        }
        Ok(PeriodicFunction { values: (0..new_period as i64).map(|n| self.at(n).clone()).collect() })
    }

    pub fn scale(&self, c: &Cx) -> Self {
        PeriodicFunction { values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Pointwise combination after bringing both to their common period.
    fn zip(&self, other: &Self, op: impl Fn(&Cx, &Cx) -> Cx) -> Self {
        let m = self.period().lcm(&other.period()) as i64;
        PeriodicFunction { values: (0..m).map(|n| op(self.at(n), other.at(n))).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn conj(&self) -> Self {
        PeriodicFunction { values: self.values.iter().map(Cx::conj).collect() }
    }

    pub fn re(&self) -> Self {
        let p = self.prec();
        PeriodicFunction { values: self.values.iter().map(|v| Cx::new(v.re.clone(), Float::new(p))).collect() }
    }

    pub fn im(&self) -> Self {
        let p = self.prec();
        PeriodicFunction { values: self.values.iter().map(|v| Cx::new(v.im.clone(), Float::new(p))).collect() }
    }

    /// `⟨f, g⟩ = Σ f(ℓ) conj(g(ℓ))` over one common period.
    pub fn inner(&self, other: &Self) -> Cx {
        let m = self.period().lcm(&other.period()) as i64;
        let mut acc = Cx::zero(self.prec());
        for n in 0..m {
            acc += &(self.at(n) * &other.at(n).conj());
        }
        acc
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(Cx::abs_f64).fold(0.0, f64::max)
    }

    /// `max_n |f(n) − g(n)|` over the common period.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.sub(other).norm_inf()
    }

    /// Default smallness threshold at the working precision.
    pub fn tolerance(&self) -> f64 {
        (-(self.prec() as f64) * 0.75).exp2().max(1e-300)
    }

    pub fn parity(&self, tol: f64) -> Parity {
        let r = self.reflect();
        let even = self.max_diff(&r) <= tol;
        let odd = self.add(&r).norm_inf() <= tol;
        match (even, odd) {
            (true, true) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self.parity(self.tolerance()), Parity::Even | Parity::Zero)
    }

    pub fn is_odd(&self) -> bool {
        matches!(self.parity(self.tolerance()), Parity::Odd | Parity::Zero)
    }

    /// Unitary DFT `f̂(n) = M^{−1/2} Σ_ℓ f(ℓ) e^{−2πiℓn/M}`.
    pub fn dft(&self) -> Self {
        let m = self.period();
        let p = self.prec();
        let roots: Vec<Cx> = (0..m as i64).map(|k| Cx::root_of_unity(p, -2 * k, m as i64)).collect();
        let norm = Float::with_val(p, m).sqrt().recip();
        let mut scratch = (Float::new(p), Float::new(p));
        let values = (0..m)
            .map(|n| {
                let mut acc = Cx::zero(p);
                for l in (0..m).rev() {
                    let mut term = self.values[l].clone();
                    term.mul_add_assign(&roots[(l * n) % m], &acc, &mut scratch);
                    acc = term;
                }
                acc.scale(&norm)
            })
            .collect();
        PeriodicFunction { values }
    }

    /// `(f^ev, f^od)` with `f^ev(n) = (f(n)+f(−n))/2`, `f^od(n) = (f(n)−f(−n))/2`.
    pub fn parity_split(&self) -> (Self, Self) {
        let r = self.reflect();
        let ev = PeriodicFunction {
            values: self.values.iter().zip(&r.values).map(|(a, b)| (a + b).div_i64(2)).collect(),
        };
        let od = PeriodicFunction {
            values: self.values.iter().zip(&r.values).map(|(a, b)| (a - b).div_i64(2)).collect(),
        };
        (ev, od)
    }

    /// Mean value `m(f) = M^{−1} Σ_ℓ f(ℓ)`.
    pub fn mean(&self) -> Cx {
        let mut acc = Cx::zero(self.prec());
        for v in &self.values {
            acc += v;
        }
        acc.div_i64(self.period() as i64)
    }

    /// `f_β(n) = f(n) e^{iπn²β}` together with its period.
    ///
    /// The multiplier `e^{iπn²u/v}` (`u/v` in lowest terms) has minimal period
    /// `v` when `uv` is even and `2v` otherwise; the returned period is the lcm
    /// of that with M.
    pub fn twist_beta(&self, beta: Rational64) -> (Self, usize) {
        let (u, v) = (*beta.numer() as i128, *beta.denom() as i128);
        let q = twist_multiplier_period(beta);
        let m_new = self.period().lcm(&q);
        let p = self.prec();
        let values = (0..m_new as i64)
            .map(|n| {
                let n = n as i128;
                // e^{iπ n² u / v}: reduce the exponent modulo 2v exactly.
                let r = (n * n % (2 * v) * u).rem_euclid(2 * v);
                self.at(n as i64) * &Cx::root_of_unity(p, r as i64, v as i64)
            })
            .collect();
        (PeriodicFunction { values }, m_new)
    }

    /// `Λ_M^b f`, `Λ_M(n) = e^{iπn²/M}`, which keeps period M when `M` or `b`
    /// is even.
    pub fn lambda_twist(&self, b: i64) -> Result<Self> {
        let m = self.period() as i64;
        if m % 2 == 1 && b % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "Λ_M^b with M={m} and b={b} both odd changes the period; use twist_beta"
            )));
        }
        let (tw, period) = self.twist_beta(Rational64::new(b, m));
        debug_assert_eq!(period as i64, m);
        Ok(tw)
    }

    /// Smallest `n₀ ≥ 0` with `n² ≡ n₀² (mod 2M)` on the support of `f`.
    pub fn support_n0(&self) -> Option<i64> {
        let m2 = 2 * self.period() as i64;
        let tol = self.tolerance();
        let support: Vec<i64> = (0..m2).filter(|&n| self.at(n).abs_f64() > tol).collect();
        let Some(&first) = support.first() else {
            return Some(0);
        };
        let sq = first * first % m2;
        if support.iter().any(|&n| n * n % m2 != sq) {
            return None;
        }
        (0..m2).find(|&n0| n0 * n0 % m2 == sq)
    }

    /// The eigenvalue `λ ∈ {1, −1, i, −i}` of `U_M` if `f` is an eigenvector.
    ///
    /// The test is `‖f̂ − λf‖∞ < tol·max(1, ‖f‖∞)` with `tol = 10⁻²⁰` at 256 bits,
    /// scaled as `2^{−0.26·bits}` for other precisions.
    pub fn eigen_check(&self) -> Result<Option<Cx>> {
        let scale = self.norm_inf();
        if scale == 0.0 {
            return Err(Error::InvalidArgument("eigen_check of the zero function".into()));
        }
        let tol = (-(self.prec() as f64) * 0.26).exp2() * scale.max(1.0);
        let hat = self.dft();
        let p = self.prec();
        for (re, im) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let lambda = Cx::from_int(p, re) + Cx::from_int(p, im).mul_i();
            if hat.max_diff(&self.scale(&lambda)) < tol {
                return Ok(Some(lambda));
            }
        }
        Ok(None)
    }

    /// JSON form `{"period": M, "values": [["re", "im"], ...]}` with enough
    /// decimal digits to round-trip at the current precision.
    pub fn to_json(&self) -> PeriodicJson {
        let digits = digits_for_bits(self.prec()) + 2;
        PeriodicJson {
            period: self.period(),
            values: self
                .values
                .iter()
                .map(|v| {
                    let (re, im) = v.to_decimal(digits);
                    [re, im]
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PeriodicJson, prec: u32) -> Result<Self> {
        if json.values.len() != json.period {
            return Err(Error::Parse(format!(
                "period {} but {} values",
                json.period,
                json.values.len()
            )));
        }
        let values = json
            .values
            .iter()
            .map(|[re, im]| {
                Cx::parse(prec, re, im).ok_or_else(|| Error::Parse(format!("bad complex value ({re}, {im})")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str, prec: u32) -> Result<Self> {
        let json: PeriodicJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json, prec)
    }
}

/// Serialized form of a [`PeriodicFunction`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicJson {
    pub period: usize,
    pub values: Vec<[String; 2]>,
}

/// Minimal period of `n ↦ e^{iπn²β}`.
pub fn twist_multiplier_period(beta: Rational64) -> usize {
    let (u, v) = (*beta.numer(), *beta.denom());
    if (u * v) % 2 == 0 {
        v as usize
    } else {
        2 * v as usize
    }
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 6] =
    ["jacobi_theta3", "dedekind_eta_char", "rr_f51", "rr_f52", "poincare_fplus", "poincare_fminus"];

/// Dirichlet character `χ_q(a, ·)` (Conrey labelling) as a q-periodic function.
pub fn conrey_character(prec: u32, q: u64, a: u64) -> PeriodicFunction {
    PeriodicFunction {
        values: (0..q as i64)
            .map(|n| match conrey_phase(q, a, n) {
                None => Cx::zero(prec),
                Some((num, den)) => Cx::root_of_unity(prec, 2 * num as i64, den as i64),
            })
            .collect(),
    }
}

/// Kronecker symbol `n ↦ (d|n)` as a `|d|`-periodic function (valid for
/// fundamental discriminants `d`).
pub fn kronecker_character(prec: u32, d: i64) -> PeriodicFunction {
    PeriodicFunction { values: (0..d.abs()).map(|n| Cx::from_int(prec, kronecker(d, n))).collect() }
}

/// Named examples: `(ν, f)`.
pub fn catalog(name: &str, prec: u32) -> Result<(u32, PeriodicFunction)> {
    let f = match name {
        "jacobi_theta3" => PeriodicFunction::from_i64(prec, &[1])?,
        "dedekind_eta_char" => kronecker_character(prec, 12),
        "rr_f51" => conrey_character(prec, 20, 7).re(),
        "rr_f52" => conrey_character(prec, 20, 7).im(),
        "poincare_fplus" => conrey_character(prec, 60, 23).re(),
        "poincare_fminus" => conrey_character(prec, 60, 23).im(),
        _ => return Err(Error::UnknownCatalog(name.to_string())),
    };
    Ok((0, f))
}

/// A vector of periodic functions with `U_M F = J F` for a constant matrix `J`.
#[derive(Clone, Debug)]
pub struct VectorForm {
    pub components: Vec<PeriodicFunction>,
    /// Row-major `J`.
    pub j: Vec<Vec<Cx>>,
}

impl VectorForm {
    /// `F = (f, f̂)` with `J = [[0, 1], [±1, 0]]`, the sign being the parity
    /// of `f` since `U_M f̂ = f(−·)`.
    pub fn from_dft_pair(f: &PeriodicFunction) -> Result<Self> {
        let p = f.prec();
        let sign = match f.parity(f.tolerance()) {
            Parity::Even | Parity::Zero => 1,
            Parity::Odd => -1,
            Parity::Mixed => {
                return Err(Error::ParityMismatch("vector form needs an even or odd function".into()))
            }
        };
        Ok(VectorForm {
            components: vec![f.clone(), f.dft()],
            j: vec![vec![Cx::zero(p), Cx::one(p)], vec![Cx::from_int(p, sign), Cx::zero(p)]],
        })
    }

    /// Largest entry of `U_M F − J F`.
    pub fn residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, comp) in self.j.iter().zip(&self.components) {
            let mut rhs = PeriodicFunction::zero(comp.prec(), comp.period());
            for (c, g) in row.iter().zip(&self.components) {
                rhs = rhs.add(&g.scale(c));
            }
            worst = worst.max(comp.dft().max_diff(&rhs));
        }
        worst
    }

    /// Catalog vector forms `F* = (Re χ, Im χ)` with their reflection matrices.
    pub fn catalog(name: &str, prec: u32) -> Result<Self> {
        let (s1, s2) = golden_sines(prec);
        let cx = |x: &Float| Cx::from_real(x.clone());
        match name {
            "rr_f51" | "rr_f52" | "rogers_ramanujan" => Ok(VectorForm {
                components: vec![catalog("rr_f51", prec)?.1, catalog("rr_f52", prec)?.1],
                j: vec![vec![cx(&s2), cx(&s1)], vec![cx(&s1), -cx(&s2)]],
            }),
            "poincare_fplus" | "poincare_fminus" | "poincare" => {
                let mi = |x: &Float| -cx(x).mul_i();
                Ok(VectorForm {
                    components: vec![catalog("poincare_fplus", prec)?.1, catalog("poincare_fminus", prec)?.1],
                    j: vec![vec![mi(&s1), mi(&s2)], vec![mi(&s2), -mi(&s1)]],
                })
            }
            _ => Err(Error::UnknownCatalog(name.to_string())),
        }
    }
}

/// `s_k = (2/√5) sin(kπ/5)` for `k = 1, 2`.
pub fn golden_sines(prec: u32) -> (Float, Float) {
    let c = Float::with_val(prec, 2u32) / Float::with_val(prec, 5u32).sqrt();
    let pi5 = Float::with_val(prec, pi(prec) / 5u32);
    let s1 = Float::with_val(prec, pi5.sin_ref()) * &c;
    let s2 = Float::with_val(prec, Float::with_val(prec, &pi5 * 2u32).sin()) * &c;
    (s1, s2)
}
