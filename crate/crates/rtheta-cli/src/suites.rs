//! The `verify` suites. Each produces rows with a residual and the fixed
//! threshold it is judged against; cases that do not apply to the given
//! `(ν, f)` are reported as skipped with the reason.

use num_rational::Rational64;
use rayon::prelude::*;
use rtheta::core_numerics::PrecisionContext;
use rtheta::genfun::{commutator_matches_table, BorelIntegrand, GenFun, SingularityMode};
use rtheta::modular::{
    boundary_asymptotics, builtin_modularity_residual, congruence_lambda, gauss_reciprocity_residual, h_function,
    verify_exact_relation, verify_gamma_relation, ModularMatrix, QuantumForm, Sign,
};
use rtheta::periodic::{Parity, PeriodicFunction};
use rtheta::resummation::{
    decomposition, stokes_difference, stokes_difference_closed, theta_minus, theta_via_parabola, MinusMode,
};
use rtheta::theta::{boundary_value, numerical_boundary_limit, theta_eval, ThetaSpec};
use rtheta::{Cx, Error};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::report::CheckRow;

/// Pass thresholds per suite. They are fixed so that reports are comparable
/// across runs; `--target` only controls the working accuracy.
pub mod thresholds {
    pub const DECOMPOSITION: f64 = 1e-20;
    pub const MODULARITY: f64 = 1e-20;
    pub const STOKES: f64 = 1e-18;
    pub const ALIEN: f64 = 1e-18;
    pub const GAUSS: f64 = 1e-25;
    /// Numerical non-tangential limits are Richardson extrapolations.
    pub const BOUNDARY_LIMIT: f64 = 1e-10;
    pub const BOUNDARY_COROLLARY: f64 = 1e-12;
    pub const PARABOLA: f64 = 1e-20;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Decomposition,
    Modularity,
    Stokes,
    Alien,
    Gauss,
    Boundary,
    Parabola,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Decomposition => "decomposition",
            Suite::Modularity => "modularity",
            Suite::Stokes => "stokes",
            Suite::Alien => "alien",
            Suite::Gauss => "gauss",
            Suite::Boundary => "boundary",
            Suite::Parabola => "parabola",
        }
    }
}

/// Inputs shared by the suites.
pub struct VerifyInput {
    pub f: PeriodicFunction,
    /// `ν` values to run; `None` means the suite's default set.
    pub nu: Option<u32>,
    pub taus: Vec<(String, Cx)>,
    pub eps: f64,
    pub alphas: Vec<Rational64>,
    pub ks: Vec<i64>,
    pub ctx: PrecisionContext,
}

impl VerifyInput {
    fn nus(&self, default: &[u32]) -> Vec<u32> {
        match self.nu {
            Some(n) => vec![n],
            None => default.to_vec(),
        }
    }

    fn spec(&self, nu: u32) -> ThetaSpec {
        ThetaSpec::new(nu, self.f.clone())
    }

    fn taus_or_default(&self) -> Vec<(String, Cx)> {
        if !self.taus.is_empty() {
            return self.taus.clone();
        }
        let p = self.ctx.bits();
        vec![("i".into(), Cx::i(p)), ("0.3+0.7i".into(), Cx::from_f64(p, 0.3, 0.7))]
    }
}

/// Runs the independent jobs in parallel, keeping their order.
fn run_jobs(jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync + '_>>) -> Vec<CheckRow> {
    jobs.par_iter().map(|j| j()).collect::<Vec<_>>().into_iter().flatten().collect()
}

fn result_row(suite: &str, case: &str, nu: Option<u32>, param: &str, r: Result<f64, Error>, threshold: f64) -> CheckRow {
    match r {
        Ok(res) => CheckRow::judged(suite, case, nu, param, res, threshold),
        Err(e) => CheckRow::error(suite, case, nu, param, e),
    }
}

fn quantum_parity(nu: u32, f: &PeriodicFunction) -> bool {
    matches!((nu, f.parity(f.tolerance())), (_, Parity::Zero) | (0, Parity::Odd) | (1, Parity::Even))
}

pub fn run(suite: Suite, input: &VerifyInput) -> Vec<CheckRow> {
    match suite {
        Suite::Decomposition => decomposition_suite(input),
        Suite::Modularity => modularity_suite(input),
        Suite::Stokes => stokes_suite(input),
        Suite::Alien => alien_suite(input),
        Suite::Gauss => gauss_suite(input),
        Suite::Boundary => boundary_suite(input),
        Suite::Parabola => parabola_suite(input),
    }
}

fn decomposition_suite(input: &VerifyInput) -> Vec<CheckRow> {
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    for nu in input.nus(&[0, 1, 2]) {
        for (label, tau) in input.taus_or_default() {
            let spec = input.spec(nu);
            let ctx = &input.ctx;
            jobs.push(Box::new(move || {
                let r = decomposition(&spec, &tau, ctx).and_then(|d| {
                    let direct = theta_eval(&spec, &tau, ctx)?;
                    Ok((&d.total() - &direct.value).abs_f64())
                });
                vec![result_row("decomposition", "theta = pole + plus + minus", Some(nu), &label, r, thresholds::DECOMPOSITION)]
            }));
        }
    }
    run_jobs(jobs)
}

fn gamma_matrices(m: i64) -> Vec<(String, ModularMatrix)> {
    let mut out = vec![
        ("S".to_string(), ModularMatrix::s()),
        ("(1,0;2,1)".to_string(), ModularMatrix::new(1, 0, 2, 1).expect("unimodular")),
        ("(2,1;3,2)".to_string(), ModularMatrix::new(2, 1, 3, 2).expect("unimodular")),
    ];
    out.push((format!("(1,0;{},1)", 2 * m), ModularMatrix::new(1, 0, 2 * m, 1).expect("unimodular")));
    out
}

/// Largest `cM` for which the quantum `γ`-law (a Borel sum with period `cM`)
/// is attempted.
const MAX_QUANTUM_CM: i64 = 512;

fn modularity_suite(input: &VerifyInput) -> Vec<CheckRow> {
    const SUITE: &str = "modularity";
    let m = input.f.period() as i64;
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    for nu in input.nus(&[0, 1]) {
        if nu > 1 {
            jobs.push(Box::new(move || vec![CheckRow::skipped(SUITE, "all", Some(nu), "", "transformation laws are stated for ν ∈ {0, 1}")]));
            continue;
        }
        for (label, tau) in input.taus_or_default() {
            let spec = input.spec(nu);
            let ctx = &input.ctx;
            jobs.push(Box::new(move || {
                let r = verify_exact_relation(&spec, &tau, ctx).map(|r| r.residual);
                vec![result_row(SUITE, "exact relation under S", Some(nu), &label, r, thresholds::MODULARITY)]
            }));
        }
        let parity = input.f.parity(input.f.tolerance());
        let general = m % 2 == 0 && parity != Parity::Mixed;
        let quantum = quantum_parity(nu, &input.f);
        let (label, tau) = input.taus_or_default().pop().expect("non-empty");
        for (name, g) in gamma_matrices(m) {
            let case = format!("gamma relation {name}");
            if !general {
                let why = if m % 2 == 1 { "M odd" } else { "f is neither even nor odd" };
                jobs.push(Box::new(move || vec![CheckRow::skipped(SUITE, case.clone(), Some(nu), "", why)]));
                continue;
            }
            if quantum && g.c * m > MAX_QUANTUM_CM {
                let why = format!("cM = {} exceeds {MAX_QUANTUM_CM} for the Borel side", g.c * m);
                jobs.push(Box::new(move || vec![CheckRow::skipped(SUITE, case.clone(), Some(nu), "", why.clone())]));
                continue;
            }
            let spec = input.spec(nu);
            let ctx = &input.ctx;
            let (label, tau) = (label.clone(), tau.clone());
            jobs.push(Box::new(move || {
                let r = verify_gamma_relation(&g, &spec, &tau, ctx).map(|r| r.residual);
                vec![result_row(SUITE, &case, Some(nu), &label, r, thresholds::MODULARITY)]
            }));
        }
        if general {
            for (name, g) in [
                (format!("(1,0;{},1)", 2 * m), ModularMatrix::new(1, 0, 2 * m, 1).expect("unimodular")),
                (format!("T^{}", 2 * m), ModularMatrix::t(2 * m)),
                ("T".to_string(), ModularMatrix::t(1)),
            ] {
                let spec = input.spec(nu);
                jobs.push(Box::new(move || {
                    let case = format!("congruence lambda {name}");
                    let row = match congruence_lambda(&g, &spec) {
                        Ok(Some((lambda, _))) if !g.is_parabolic() => match h_function(&g, &spec) {
                            Ok(h) => CheckRow::judged(SUITE, case, Some(nu), "", h.max_diff(&spec.f.scale(&lambda)), thresholds::MODULARITY),
                            Err(e) => CheckRow::error(SUITE, case, Some(nu), "", e),
                        },
                        // The parabolic λ is checked against the twist inside congruence_lambda.
                        Ok(Some(_)) => CheckRow::judged(SUITE, case, Some(nu), "", 0.0, thresholds::MODULARITY),
                        Ok(None) => CheckRow::skipped(SUITE, case, Some(nu), "", "γ outside the congruence cases"),
                        Err(e) => CheckRow::error(SUITE, case, Some(nu), "", e),
                    };
                    vec![row]
                }));
            }
        }
        if quantum {
            for (label, tau) in input.taus_or_default() {
                let f = input.f.clone();
                let ctx = &input.ctx;
                jobs.push(Box::new(move || {
                    let spec = ThetaSpec::new(nu, f.clone());
                    let q = match QuantumForm::from_spec(&spec) {
                        Ok(q) => q,
                        Err(e) => return vec![CheckRow::error(SUITE, "built-in modularity", Some(nu), &label, e)],
                    };
                    [Sign::Plus, Sign::Minus]
                        .into_iter()
                        .map(|sign| {
                            let case = format!("built-in modularity G{}", if sign == Sign::Plus { '+' } else { '-' });
                            match builtin_modularity_residual(&q, sign, &tau, ctx) {
                                Ok(r) => CheckRow::judged(SUITE, case, Some(nu), &label, r.residual, thresholds::MODULARITY),
                                Err(Error::InvalidArgument(why)) => CheckRow::skipped(SUITE, case, Some(nu), &label, why),
                                Err(e) => CheckRow::error(SUITE, case, Some(nu), &label, e),
                            }
                        })
                        .collect()
                }));
            }
        } else {
            jobs.push(Box::new(move || {
                vec![CheckRow::skipped(SUITE, "built-in modularity", Some(nu), "", "needs ν = 0 with f odd or ν = 1 with f even")]
            }));
        }
    }
    run_jobs(jobs)
}

fn stokes_suite(input: &VerifyInput) -> Vec<CheckRow> {
    const SUITE: &str = "stokes";
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    for nu in input.nus(&[0, 1]) {
        for (label, tau) in input.taus_or_default() {
            let spec = input.spec(nu);
            let ctx = &input.ctx;
            let eps = input.eps;
            jobs.push(Box::new(move || {
                let mut rows = Vec::new();
                if quantum_parity(nu, &spec.f) && nu <= 1 {
                    let r = stokes_difference(&spec, &tau, eps, ctx).and_then(|q| {
                        let c = stokes_difference_closed(&spec, &tau, ctx)?;
                        Ok((&q.value - &c.value).abs_f64())
                    });
                    rows.push(result_row(SUITE, "lateral difference vs closed form", Some(nu), &label, r, thresholds::STOKES));
                } else {
                    rows.push(CheckRow::skipped(SUITE, "lateral difference vs closed form", Some(nu), &label, "needs ν = 0 with f odd or ν = 1 with f even"));
                }
                if nu <= 1 {
                    let r = theta_minus(&spec, &tau, ctx, MinusMode::Quadrature).and_then(|q| {
                        let c = theta_minus(&spec, &tau, ctx, MinusMode::ClosedForm)?;
                        Ok((&q.value - &c.value).abs_f64())
                    });
                    rows.push(result_row(SUITE, "remainder quadrature vs closed form", Some(nu), &label, r, thresholds::STOKES));
                }
                rows
            }));
        }
    }
    run_jobs(jobs)
}

fn alien_suite(input: &VerifyInput) -> Vec<CheckRow> {
    const SUITE: &str = "alien";
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    for nu in input.nus(&[0, 1, 2, 3]) {
        let f = input.f.clone();
        jobs.push(Box::new(move || {
            let g = GenFun::build(nu, &f);
            let mut rows = Vec::new();
            for n in 1..=3u32 {
                if nu <= 1 {
                    for which in [BorelIntegrand::HalfMinus, BorelIntegrand::StrippedPlus] {
                        let case = format!("principal part {which:?} at xi_{n}");
                        let r = g.singularity_data(n, which, SingularityMode::ClosedForm).and_then(|c| {
                            let num = g.singularity_data(n, which, SingularityMode::Numeric)?;
                            Ok(c.principal_coeffs
                                .iter()
                                .zip(&num.principal_coeffs)
                                .map(|(a, b)| (a - b).abs_f64())
                                .fold(0.0, f64::max))
                        });
                        rows.push(result_row(SUITE, &case, Some(nu), "", r, thresholds::ALIEN));
                    }
                }
                let case = format!("alien derivative at xi_{n}");
                if nu > 4 {
                    rows.push(CheckRow::skipped(SUITE, case, Some(nu), "", "closed forms are tabulated for ν ≤ 4"));
                    continue;
                }
                let r = g.alien_derivative(n).and_then(|closed| {
                    let num = g.alien_derivative_numeric(n)?;
                    let mut worst: f64 = 0.0;
                    for t in &num {
                        let c = closed.iter().find(|c| c.power == t.power).map(|c| c.coeff.clone()).unwrap_or_else(|| Cx::zero(t.coeff.prec()));
                        worst = worst.max((&c - &t.coeff).abs_f64());
                    }
                    Ok(worst)
                });
                rows.push(result_row(SUITE, &case, Some(nu), "", r, thresholds::ALIEN));
            }
            if nu + 2 <= 4 {
                let res = if commutator_matches_table(nu).unwrap_or(false) { 0.0 } else { 1.0 };
                rows.push(CheckRow::judged(SUITE, format!("commutator ν={nu} → ν={}", nu + 2), Some(nu), "", res, 0.5).with_note("exact rational comparison"));
            }
            rows
        }));
    }
    run_jobs(jobs)
}

fn default_alphas() -> Vec<Rational64> {
    [(1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1), (1, 3), (-1, 3), (3, 1)]
        .into_iter()
        .map(|(a, b)| Rational64::new(a, b))
        .collect()
}

fn gauss_suite(input: &VerifyInput) -> Vec<CheckRow> {
    let alphas = if input.alphas.is_empty() { default_alphas() } else { input.alphas.clone() };
    alphas
        .par_iter()
        .map(|&a| {
            let r = gauss_reciprocity_residual(&input.f, a);
            result_row("gauss", "reciprocity", None, &a.to_string(), r, thresholds::GAUSS)
        })
        .collect()
}

fn boundary_suite(input: &VerifyInput) -> Vec<CheckRow> {
    const SUITE: &str = "boundary";
    let alphas = if input.alphas.is_empty() {
        [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)].into_iter().map(|(a, b)| Rational64::new(a, b)).collect()
    } else {
        input.alphas.clone()
    };
    let ks = if input.ks.is_empty() { vec![1, 2, 3, 5] } else { input.ks.clone() };
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    for nu in input.nus(&[0, 1]) {
        for &alpha in &alphas {
            let spec = input.spec(nu);
            let ctx = &input.ctx;
            jobs.push(Box::new(move || {
                let param = alpha.to_string();
                let row = match boundary_value(&spec, alpha) {
                    Ok(Some(bv)) => {
                        let r = numerical_boundary_limit(&spec, alpha, FRAC_PI_2, ctx).map(|l| (&bv - &l.value).abs_f64());
                        result_row(SUITE, "L-value vs numerical limit", Some(nu), &param, r, thresholds::BOUNDARY_LIMIT)
                    }
                    Ok(None) => CheckRow::skipped(SUITE, "L-value vs numerical limit", Some(nu), &param, "α ∉ Q̄: the limit diverges"),
                    Err(e) => CheckRow::error(SUITE, "L-value vs numerical limit", Some(nu), &param, e),
                };
                vec![row]
            }));
        }
        if !quantum_parity(nu, &input.f) {
            jobs.push(Box::new(move || {
                vec![CheckRow::skipped(SUITE, "quantum modularity at ±1/k", Some(nu), "", "needs ν = 0 with f odd or ν = 1 with f even")]
            }));
            continue;
        }
        for &k in &ks {
            for sign in [Sign::Plus, Sign::Minus] {
                let f = input.f.clone();
                let ctx = &input.ctx;
                jobs.push(Box::new(move || {
                    let param = format!("{}1/{k}", if sign == Sign::Plus { "+" } else { "-" });
                    let case = "quantum modularity at ±1/k";
                    let r = QuantumForm::from_spec(&ThetaSpec::new(nu, f.clone()))
                        .and_then(|q| boundary_asymptotics(&q, k, sign, 4, ctx))
                        .map(|b| b.exact.iter().zip(&b.predicted).map(|(e, p)| (e - p).abs_f64()).fold(0.0, f64::max));
                    let row = match r {
                        Err(Error::OutsideDomain(why)) => CheckRow::skipped(SUITE, case, Some(nu), &param, why),
                        Err(Error::Indeterminate(mean)) => {
                            CheckRow::skipped(SUITE, case, Some(nu), &param, format!("Q̄ membership indeterminate, |mean| = {mean:e}"))
                        }
                        other => result_row(SUITE, case, Some(nu), &param, other, thresholds::BOUNDARY_COROLLARY),
                    };
                    vec![row]
                }));
            }
        }
    }
    run_jobs(jobs)
}

fn parabola_suite(input: &VerifyInput) -> Vec<CheckRow> {
    let mut jobs: Vec<Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>> = Vec::new();
    let m = input.f.period() as f64;
    for nu in input.nus(&[0, 1]) {
        for (label, tau) in input.taus_or_default() {
            for frac in [0.25, 0.5] {
                let spec = input.spec(nu);
                let ctx = &input.ctx;
                let c = frac * 2.0 * PI / m;
                let label = label.clone();
                let tau = tau.clone();
                jobs.push(Box::new(move || {
                    let r = theta_via_parabola(&spec, &tau, c, ctx).and_then(|v| {
                        let direct = theta_eval(&spec, &tau, ctx)?;
                        Ok((&v.value - &direct.value).abs_f64())
                    });
                    vec![result_row("parabola", &format!("line Re t = {frac}·2π/M"), Some(nu), &label, r, thresholds::PARABOLA)]
                }));
            }
        }
    }
    run_jobs(jobs)
}
