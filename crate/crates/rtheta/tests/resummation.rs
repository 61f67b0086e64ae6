use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtheta::core_numerics::{pi, Cx, PrecisionContext};
use rtheta::genfun::GenFun;
use rtheta::periodic::{catalog, PeriodicFunction, CATALOG_NAMES};
use rtheta::resummation::{
    decomposition, decomposition_with, lateral_sums, laplace_directional, laplace_ray, median_sum, pole_term,
    stokes_difference, stokes_difference_closed, theta_minus, theta_via_parabola, LaplaceKind, MinusMode, EPS_DEFAULT,
};
use rtheta::theta::{theta_eval, ThetaSpec};
use rug::Float;
use std::f64::consts::{FRAC_PI_2, PI};

const P: u32 = 256;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P, 1e-40).unwrap()
}

fn spec(name: &str, nu: u32) -> ThetaSpec {
    ThetaSpec::new(nu, catalog(name, P).unwrap().1)
}

fn ones() -> ThetaSpec {
    ThetaSpec::new(0, PeriodicFunction::from_i64(P, &[1]).unwrap())
}

#[test]
fn stokes_jump_of_a_simple_pole() {
    // (L^{π/2−ε} − L^{π/2+ε})[1/(2πi(ξ − ξ₁))] = e^{−ξ₁/τ}.
    let c = ctx();
    let xi1 = Cx::new(Float::new(P), Float::with_val(P, pi(P) / 5u32));
    let two_pi_i = Cx::new(Float::new(P), Float::with_val(P, pi(P) * 2u32));
    let g = |xi: &Cx| Ok((&two_pi_i * &(xi - &xi1)).recip());
    let tau = Cx::from_f64(P, 0.2, 0.9);
    let a = laplace_ray(g, FRAC_PI_2 - EPS_DEFAULT, &tau, false, Some(0.1), &c).unwrap();
    let b = laplace_ray(g, FRAC_PI_2 + EPS_DEFAULT, &tau, false, Some(0.1), &c).unwrap();
    let expect = (-&(&xi1 / &tau)).exp();
    assert!((&(&a.value - &b.value) - &expect).abs_f64() < 1e-38);
}

#[test]
fn laplace_of_inverse_sqrt() {
    // L^θ[ξ^{−1/2}/Γ(1/2)] = τ^{1/2}.
    let c = ctx();
    let rpi = Float::with_val(P, pi(P).sqrt()).recip();
    for (theta, tau) in [(0.3, Cx::from_f64(P, 0.5, 1.0)), (1.2, Cx::from_f64(P, -0.4, 0.8))] {
        let s = laplace_ray(|xi| Ok(xi.sqrt().recip().scale(&rpi)), theta, &tau, true, None, &c).unwrap();
        assert!((&s.value - &tau.sqrt()).abs_f64() < 1e-38);
        assert!(s.err < 1e-38);
    }
}

#[test]
fn laplace_rejects_bad_directions_and_points() {
    let c = ctx();
    let g = GenFun::build(0, &catalog("dedekind_eta_char", P).unwrap().1);
    let tau = Cx::from_f64(P, 0.0, 1.0);
    assert!(laplace_directional(LaplaceKind::HalfMinus, &g, FRAC_PI_2 + 0.05, &tau, &c).is_err());
    assert!(laplace_directional(LaplaceKind::HalfMinus, &g, -1.5, &tau, &c).is_err());
    let zero = GenFun::build(1, &PeriodicFunction::zero(P, 5));
    let s = laplace_directional(LaplaceKind::PlusWithSqrt, &zero, 1.2, &tau, &c).unwrap();
    assert!(s.value.is_zero());
}

#[test]
fn lateral_sums_for_even_nu0_are_constant() {
    let c = ctx();
    let f = PeriodicFunction::from_i64(P, &[3, 1, -2, -2, 1]).unwrap();
    let (a, b) = lateral_sums(&ThetaSpec::new(0, f), &Cx::from_f64(P, 0.3, 0.8), EPS_DEFAULT, &c).unwrap();
    for s in [a, b] {
        assert!((&s.value - &Cx::from_ratio(P, -3, 2)).abs_f64() < 1e-35);
    }
    let (a, b) = lateral_sums(&ThetaSpec::new(2, PeriodicFunction::zero(P, 4)), &Cx::i(P), EPS_DEFAULT, &c).unwrap();
    assert!(a.value.is_zero() && b.value.is_zero());
}

#[test]
fn lateral_sums_do_not_depend_on_eps() {
    let c = ctx();
    let s = spec("rr_f51", 0);
    let tau = Cx::from_f64(P, 0.1, 0.7);
    let base = lateral_sums(&s, &tau, PI / 12.0, &c).unwrap();
    for eps in [PI / 24.0, PI / 6.0] {
        let other = lateral_sums(&s, &tau, eps, &c).unwrap();
        let tol = 10.0 * (base.0.err + other.0.err).max(1e-38);
        assert!((&base.0.value - &other.0.value).abs_f64() < tol, "ε={eps}");
        assert!((&base.1.value - &other.1.value).abs_f64() < tol, "ε={eps}");
    }
}

#[test]
fn median_sum_is_real_on_imaginary_axis() {
    let c = ctx();
    for name in ["jacobi_theta3", "dedekind_eta_char", "rr_f52"] {
        for nu in 0..2 {
            let m = median_sum(&spec(name, nu), &Cx::from_f64(P, 0.0, 0.6), EPS_DEFAULT, &c).unwrap();
            assert!(m.value.im.to_f64().abs() < 1e-35, "{name} ν={nu}");
        }
    }
}

#[test]
fn stokes_difference_closed_form_matches_quadrature() {
    let c = ctx();
    for (name, nu) in [("poincare_fplus", 0), ("rr_f51", 1), ("dedekind_eta_char", 1), ("poincare_fminus", 0)] {
        let s = spec(name, nu);
        for tau in [Cx::i(P), Cx::from_f64(P, 0.25, 0.5)] {
            let q = stokes_difference(&s, &tau, EPS_DEFAULT, &c).unwrap();
            let cf = stokes_difference_closed(&s, &tau, &c).unwrap();
            assert!((&q.value - &cf.value).abs_f64() < 1e-18, "{name}: {} vs {}", q.value, cf.value);
        }
    }
    assert!(stokes_difference(&spec("dedekind_eta_char", 0), &Cx::i(P), EPS_DEFAULT, &c).is_err());
}

#[test]
fn stokes_difference_example_chi12_at_i() {
    let c = ctx();
    let s = spec("dedekind_eta_char", 1);
    let d = stokes_difference(&s, &Cx::i(P), EPS_DEFAULT, &c).unwrap();
    let hat = s.f.dft();
    let th = theta_eval(&ThetaSpec::new(1, hat), &Cx::i(P), &c).unwrap().value;
    assert!((&d.value - &th.mul_i().scale_i64(2)).abs_f64() < 1e-30);
}

#[test]
fn theta_minus_closed_form_matches_quadrature() {
    let c = ctx();
    for name in ["jacobi_theta3", "dedekind_eta_char", "rr_f51", "poincare_fminus"] {
        for nu in 0..2 {
            let s = spec(name, nu);
            for tau in [Cx::from_ratio(P, 1, 3).mul_i(), Cx::from_f64(P, -0.3, 0.9)] {
                let q = theta_minus(&s, &tau, &c, MinusMode::Quadrature).unwrap();
                let cf = theta_minus(&s, &tau, &c, MinusMode::ClosedForm).unwrap();
                assert!((&q.value - &cf.value).abs_f64() < 1e-20, "{name} ν={nu}: {} vs {}", q.value, cf.value);
            }
        }
    }
    let odd = spec("poincare_fplus", 0);
    assert!(theta_minus(&odd, &Cx::i(P), &c, MinusMode::ClosedForm).unwrap().value.abs_f64() < 1e-60);
    assert!(theta_minus(&spec("rr_f51", 2), &Cx::i(P), &c, MinusMode::ClosedForm).is_err());
}

#[test]
fn theta_minus_chi12_example() {
    // ν = 0, χ₁₂ even and self-dual: Θ⁻(i/3) = √3 Θ(3i; 0, χ₁₂).
    let c = ctx();
    let s = spec("dedekind_eta_char", 0);
    let q = theta_minus(&s, &Cx::from_ratio(P, 1, 3).mul_i(), &c, MinusMode::Quadrature).unwrap();
    let th = theta_eval(&s, &Cx::from_int(P, 3).mul_i(), &c).unwrap().value;
    let sqrt3 = Float::with_val(P, 3u32).sqrt();
    assert!((&q.value - &th.scale(&sqrt3)).abs_f64() < 1e-20);
}

#[test]
fn pole_term_vanishes_for_mean_zero() {
    assert!(pole_term(&spec("poincare_fplus", 1), &Cx::i(P), P).is_zero());
    let v = pole_term(&ones(), &Cx::i(P), P);
    assert!((&v - &Cx::from_ratio(P, 1, 2)).abs_f64() < 1e-70);
}

#[test]
fn decomposition_sums_to_theta() {
    let c = ctx();
    let tau = Cx::from_f64(P, 0.3, 0.7);
    for name in CATALOG_NAMES {
        for nu in 0..3 {
            let s = spec(name, nu);
            let d = decomposition(&s, &tau, &c).unwrap();
            let direct = theta_eval(&s, &tau, &c).unwrap();
            let diff = (&d.total() - &direct.value).abs_f64();
            assert!(diff < 1e-35 && diff <= 10.0 * (d.err() + direct.err).max(1e-38), "{name} ν={nu}: {diff:e}");
        }
    }
}

#[test]
fn decomposition_at_random_points() {
    let c = PrecisionContext::new(P, 1e-30).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["jacobi_theta3", "rr_f52"] {
        let s = spec(name, 1);
        let g = GenFun::build(1, &s.f);
        for _ in 0..4 {
            let arg = rng.gen_range(PI / 8.0..7.0 * PI / 8.0);
            let r = (rng.gen_range(0.3f64.ln()..3.0f64.ln())).exp();
            let tau = Cx::from_f64(P, r * arg.cos(), r * arg.sin());
            let d = decomposition_with(&g, &s, &tau, &c).unwrap();
            let direct = theta_eval(&s, &tau, &c).unwrap();
            assert!((&d.total() - &direct.value).abs_f64() < 1e-25, "{name} τ={tau}");
        }
    }
}

#[test]
fn parabola_matches_direct_sum() {
    let c = ctx();
    let s = ones();
    let v = theta_via_parabola(&s, &Cx::i(P), 1.0, &c).unwrap();
    let direct = theta_eval(&s, &Cx::i(P), &c).unwrap();
    assert!((&v.value - &direct.value).abs_f64() < 1e-25);
    for name in CATALOG_NAMES {
        let s = spec(name, 1);
        let m = s.period() as f64;
        for tau in [Cx::i(P), Cx::from_f64(P, 0.3, 0.7)] {
            let direct = theta_eval(&s, &tau, &c).unwrap().value;
            for frac in [0.25, 0.5] {
                let v = theta_via_parabola(&s, &tau, frac * 2.0 * PI / m, &c).unwrap();
                assert!((&v.value - &direct).abs_f64() < 1e-25, "{name} c={frac}");
            }
        }
    }
    assert!(theta_via_parabola(&s, &Cx::i(P), 2.0 * PI, &c).is_err());
    let zero = ThetaSpec::new(0, PeriodicFunction::zero(P, 3));
    assert!(theta_via_parabola(&zero, &Cx::i(P), 0.5, &c).unwrap().value.is_zero());
}
